"""Assertion language over weak-memory states and register valuations.

Atoms observe the state through value and order only: definite / possible /
conditional observation, write order, value occurrence, encountered values,
covered chains and initial values, plus register comparisons and boolean
auxiliary variables.  Value arguments may be integer literals or register
names; registers are resolved at evaluation time.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Union

from .errors import IllFormedAssertion, UnresolvedName
from .memory import MemState

# An atom value argument: a literal or the name of a register.
Value = Union[int, str]


@dataclass(frozen=True)
class RegValuation:
    """Total valuation of the program's registers and auxiliaries."""

    regs: tuple = ()
    aux: tuple = ()

    @staticmethod
    def make(regs=None, aux=None):
        return RegValuation(
            tuple(sorted((regs or {}).items())), tuple(sorted((aux or {}).items()))
        )

    def reg(self, name):
        for k, v in self.regs:
            if k == name:
                return v
        raise UnresolvedName(f"register {name!r}")

    def aux_val(self, name):
        for k, v in self.aux:
            if k == name:
                return v
        raise UnresolvedName(f"auxiliary {name!r}")

    def set_reg(self, name, value):
        return RegValuation(
            tuple((k, value if k == name else v) for k, v in self.regs), self.aux
        )

    def set_aux(self, name, value):
        return RegValuation(
            self.regs, tuple((k, value if k == name else v) for k, v in self.aux)
        )

    def reg_dict(self):
        return dict(self.regs)

    def aux_dict(self):
        return dict(self.aux)


def resolve(v: Value, rv: RegValuation) -> int:
    return rv.reg(v) if isinstance(v, str) else v


# ---------------------------------------------------------------------------
# Assertion AST
# ---------------------------------------------------------------------------


class Assertion:
    """Base class; subclasses are frozen dataclasses, safe to share."""

    __slots__ = ()


@dataclass(frozen=True)
class BoolLit(Assertion):
    value: bool


@dataclass(frozen=True)
class Not(Assertion):
    arg: Assertion


@dataclass(frozen=True)
class And(Assertion):
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class Or(Assertion):
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class Implies(Assertion):
    left: Assertion
    right: Assertion


@dataclass(frozen=True)
class DObs(Assertion):
    """Definite observation: t's view sits at the last write of x, valued n."""

    x: str
    t: int
    n: Value


@dataclass(frozen=True)
class PObs(Assertion):
    """Possible observation: some write visible to t on x has value n."""

    x: str
    t: int
    n: Value


@dataclass(frozen=True)
class CObs(Assertion):
    """Conditional observation: acquiring n from x gives t a definite m on y."""

    x: str
    n: Value
    y: str
    t: int
    m: Value


@dataclass(frozen=True)
class OrdPossible(Assertion):
    """Some m-valued write on x precedes some n-valued write on x."""

    m: Value
    x: str
    n: Value


@dataclass(frozen=True)
class OrdDefinite(Assertion):
    """Every m-write on x precedes every n-write, and such a pair exists."""

    m: Value
    x: str
    n: Value


@dataclass(frozen=True)
class InitVal(Assertion):
    """The minimal-timestamp write on x has value n."""

    x: str
    n: Value


@dataclass(frozen=True)
class ZeroOcc(Assertion):
    """No write of n has occurred on x, whose initial value is i."""

    x: str
    n: Value
    i: Value


@dataclass(frozen=True)
class AtMostOne(Assertion):
    """At most one write on x has value n."""

    x: str
    n: Value


@dataclass(frozen=True)
class Encountered(Assertion):
    """Thread t's viewfront on x has passed some write valued n."""

    t: int
    x: str
    n: Value


@dataclass(frozen=True)
class Covered(Assertion):
    """Every uncovered write on x is the last one, and it has value n."""

    x: str
    n: Value


@dataclass(frozen=True)
class RegCmp(Assertion):
    lhs: Value
    op: str  # ==, !=, <, <=, >, >=
    rhs: Value


@dataclass(frozen=True)
class AuxAtom(Assertion):
    name: str


TRUE = BoolLit(True)
FALSE = BoolLit(False)

_CMP = {
    "==": lambda a, b: a == b,
    "!=": lambda a, b: a != b,
    "<": lambda a, b: a < b,
    "<=": lambda a, b: a <= b,
    ">": lambda a, b: a > b,
    ">=": lambda a, b: a >= b,
}


def conj(parts) -> Assertion:
    parts = [p for p in parts if p != TRUE]
    if not parts:
        return TRUE
    out = parts[0]
    for p in parts[1:]:
        out = And(out, p)
    return out


def conjuncts(a: Assertion) -> list:
    """Flatten nested conjunctions into a list."""
    if isinstance(a, And):
        return conjuncts(a.left) + conjuncts(a.right)
    if a == TRUE:
        return []
    return [a]


# ---------------------------------------------------------------------------
# Atom evaluators
# ---------------------------------------------------------------------------


def eval_d_obs(sigma: MemState, t: int, x: str, n: int) -> bool:
    last = sigma.last_write(x)
    return sigma.tview[t][x] == last and sigma.mods[last].val == n


def eval_p_obs(sigma: MemState, t: int, x: str, n: int) -> bool:
    return any(sigma.mods[w].val == n for w in sigma.visible_writes(t, x))


def eval_c_obs(sigma: MemState, t: int, x: str, n: int, y: str, m: int) -> bool:
    last_y = sigma.last_write(y)
    for w in sigma.visible_writes(t, x):
        if sigma.mods[w].val != n:
            continue
        if not (
            sigma.mview[w][y] == last_y
            and sigma.mods[last_y].val == m
            and sigma.mods[w].rel
        ):
            return False
    return True


def eval_ord_possible(sigma: MemState, m: int, x: str, n: int) -> bool:
    ws = sigma.writes_on(x)
    return any(
        sigma.mods[w].val == m and sigma.mods[w2].val == n and w.ts < w2.ts
        for w in ws
        for w2 in ws
    )


def eval_ord_definite(sigma: MemState, m: int, x: str, n: int) -> bool:
    ws = sigma.writes_on(x)
    for w in ws:
        if sigma.mods[w].val != m:
            continue
        for w2 in ws:
            if sigma.mods[w2].val == n and not w.ts < w2.ts:
                return False
    return eval_ord_possible(sigma, m, x, n)


def eval_init(sigma: MemState, x: str, n: int) -> bool:
    ws = sigma.writes_on(x)
    if not ws:
        raise IllFormedAssertion(f"no writes on {x}")
    return sigma.mods[ws[0]].val == n


def eval_zero_occ(sigma: MemState, x: str, n: int, i: int) -> bool:
    if i == n:
        raise IllFormedAssertion("zero-occurrence value equals the initial value")
    return eval_init(sigma, x, i) and not eval_ord_possible(sigma, i, x, n)


def eval_amo(sigma: MemState, x: str, n: int) -> bool:
    return not eval_ord_possible(sigma, n, x, n)


def eval_encountered(sigma: MemState, t: int, x: str, n: int) -> bool:
    front = sigma.tview[t][x].ts
    return any(
        w.ts <= front and sigma.mods[w].val == n for w in sigma.writes_on(x)
    )


def eval_covered(sigma: MemState, x: str, n: int) -> bool:
    last = sigma.last_write(x)
    for w in sigma.writes_on(x):
        if w in sigma.covered:
            continue
        if w != last or sigma.mods[w].val != n:
            return False
    return True


def eval_assertion(a: Assertion, sigma: MemState, rv: RegValuation) -> bool:
    """Standard boolean semantics; register references resolved through rv."""
    if isinstance(a, BoolLit):
        return a.value
    if isinstance(a, Not):
        return not eval_assertion(a.arg, sigma, rv)
    if isinstance(a, And):
        return eval_assertion(a.left, sigma, rv) and eval_assertion(a.right, sigma, rv)
    if isinstance(a, Or):
        return eval_assertion(a.left, sigma, rv) or eval_assertion(a.right, sigma, rv)
    if isinstance(a, Implies):
        return (not eval_assertion(a.left, sigma, rv)) or eval_assertion(
            a.right, sigma, rv
        )
    if isinstance(a, DObs):
        return eval_d_obs(sigma, a.t, a.x, resolve(a.n, rv))
    if isinstance(a, PObs):
        return eval_p_obs(sigma, a.t, a.x, resolve(a.n, rv))
    if isinstance(a, CObs):
        return eval_c_obs(sigma, a.t, a.x, resolve(a.n, rv), a.y, resolve(a.m, rv))
    if isinstance(a, OrdPossible):
        return eval_ord_possible(sigma, resolve(a.m, rv), a.x, resolve(a.n, rv))
    if isinstance(a, OrdDefinite):
        return eval_ord_definite(sigma, resolve(a.m, rv), a.x, resolve(a.n, rv))
    if isinstance(a, InitVal):
        return eval_init(sigma, a.x, resolve(a.n, rv))
    if isinstance(a, ZeroOcc):
        return eval_zero_occ(sigma, a.x, resolve(a.n, rv), resolve(a.i, rv))
    if isinstance(a, AtMostOne):
        return eval_amo(sigma, a.x, resolve(a.n, rv))
    if isinstance(a, Encountered):
        return eval_encountered(sigma, a.t, a.x, resolve(a.n, rv))
    if isinstance(a, Covered):
        return eval_covered(sigma, a.x, resolve(a.n, rv))
    if isinstance(a, RegCmp):
        return _CMP[a.op](resolve(a.lhs, rv), resolve(a.rhs, rv))
    if isinstance(a, AuxAtom):
        return rv.aux_val(a.name)
    raise TypeError(f"not an assertion: {a!r}")


# ---------------------------------------------------------------------------
# Structure queries (used by validation, the rule engine and the oracle)
# ---------------------------------------------------------------------------


def atoms(a: Assertion):
    """Yield every atom in the tree (leaves of the boolean structure)."""
    if isinstance(a, Not):
        yield from atoms(a.arg)
    elif isinstance(a, (And, Or, Implies)):
        yield from atoms(a.left)
        yield from atoms(a.right)
    elif not isinstance(a, BoolLit):
        yield a


def shared_vars(a: Assertion):
    out = set()
    for atom in atoms(a):
        for f in ("x", "y"):
            v = getattr(atom, f, None)
            if v is not None:
                out.add(v)
    return out


def threads(a: Assertion):
    out = set()
    for atom in atoms(a):
        t = getattr(atom, "t", None)
        if t is not None:
            out.add(t)
    return out


def value_args(a: Assertion):
    for atom in atoms(a):
        for f in ("n", "m", "i", "lhs", "rhs"):
            v = getattr(atom, f, None)
            if v is not None:
                yield v


def reg_names(a: Assertion):
    return {v for v in value_args(a) if isinstance(v, str)}


def aux_names(a: Assertion):
    return {atom.name for atom in atoms(a) if isinstance(atom, AuxAtom)}


def constants(a: Assertion):
    return {v for v in value_args(a) if isinstance(v, int)}


# ---------------------------------------------------------------------------
# Surface syntax rendering
# ---------------------------------------------------------------------------


def _val(v: Value) -> str:
    return str(v)


def format_assertion(a: Assertion, prec: int = 0) -> str:
    """Render in the concrete litmus syntax; parses back to an equal tree."""
    if isinstance(a, BoolLit):
        return "true" if a.value else "false"
    if isinstance(a, Not):
        return "!" + format_assertion(a.arg, 3)
    if isinstance(a, And):
        s = f"{format_assertion(a.left, 2)} && {format_assertion(a.right, 2)}"
        return f"({s})" if prec > 2 else s
    if isinstance(a, Or):
        s = f"{format_assertion(a.left, 1)} || {format_assertion(a.right, 1)}"
        return f"({s})" if prec > 1 else s
    if isinstance(a, Implies):
        s = f"{format_assertion(a.left, 1)} -> {format_assertion(a.right, 0)}"
        return f"({s})" if prec > 0 else s
    if isinstance(a, DObs):
        return f"[{a.x} ={a.t} {_val(a.n)}]"
    if isinstance(a, PObs):
        return f"[{a.x} ~{a.t} {_val(a.n)}]"
    if isinstance(a, CObs):
        return f"[{a.x} = {_val(a.n)}][[{a.y} ={a.t} {_val(a.m)}]]"
    if isinstance(a, OrdPossible):
        return f"[{_val(a.m)} < {a.x} {_val(a.n)}]"
    if isinstance(a, OrdDefinite):
        return f"[{_val(a.m)} << {a.x} {_val(a.n)}]"
    if isinstance(a, InitVal):
        return f"init({a.x},{_val(a.n)})"
    if isinstance(a, ZeroOcc):
        return f"zero({a.x},{_val(a.n)},{_val(a.i)})"
    if isinstance(a, AtMostOne):
        return f"amo({a.x},{_val(a.n)})"
    if isinstance(a, Encountered):
        return f"enc({a.t},{a.x},{_val(a.n)})"
    if isinstance(a, Covered):
        return f"cvd({a.x},{_val(a.n)})"
    if isinstance(a, RegCmp):
        return f"{_val(a.lhs)} {a.op} {_val(a.rhs)}"
    if isinstance(a, AuxAtom):
        return a.name
    raise TypeError(f"not an assertion: {a!r}")
