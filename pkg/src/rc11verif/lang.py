"""Annotated concurrent programs: statement AST, programs, validation.

Each atomic statement (and each branching construct) carries a
pre-annotation; loops additionally carry an invariant.  Guards and
auxiliary assignments range over registers and auxiliaries only, never
over the weak-memory state; memory is accessed exclusively through the
read / write / swap statement forms.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Tuple, Union

from . import assertions as A
from .assertions import Assertion

# ---------------------------------------------------------------------------
# Integer expressions (right-hand sides of writes and register assigns)
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class IntLit:
    value: int


@dataclass(frozen=True)
class RegRef:
    name: str


@dataclass(frozen=True)
class BinOp:
    op: str  # + or -
    left: "Exp"
    right: "Exp"


Exp = Union[IntLit, RegRef, BinOp]


def eval_exp(e: Exp, rv: A.RegValuation) -> int:
    if isinstance(e, IntLit):
        return e.value
    if isinstance(e, RegRef):
        return rv.reg(e.name)
    if isinstance(e, BinOp):
        l, r = eval_exp(e.left, rv), eval_exp(e.right, rv)
        return l + r if e.op == "+" else l - r
    raise TypeError(f"not an expression: {e!r}")


def exp_regs(e: Exp) -> set:
    if isinstance(e, RegRef):
        return {e.name}
    if isinstance(e, BinOp):
        return exp_regs(e.left) | exp_regs(e.right)
    return set()


def format_exp(e: Exp) -> str:
    if isinstance(e, IntLit):
        return str(e.value)
    if isinstance(e, RegRef):
        return e.name
    return f"{format_exp(e.left)} {e.op} {format_exp(e.right)}"


def exp_constants(e: Exp) -> set:
    if isinstance(e, IntLit):
        return {e.value}
    if isinstance(e, BinOp):
        return exp_constants(e.left) | exp_constants(e.right)
    return set()


# ---------------------------------------------------------------------------
# Statements
# ---------------------------------------------------------------------------


class Stmt:
    __slots__ = ()


@dataclass(frozen=True)
class WriteRlx(Stmt):
    pre: Assertion
    x: str
    exp: Exp
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class WriteRel(Stmt):
    pre: Assertion
    x: str
    exp: Exp
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class ReadRlx(Stmt):
    pre: Assertion
    reg: str
    x: str
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class ReadAcq(Stmt):
    pre: Assertion
    reg: str
    x: str
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class Swap(Stmt):
    """Atomic read-modify-write; the old value binds to ``binder`` if given."""

    pre: Assertion
    x: str
    exp: Exp
    binder: Optional[str] = None
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class LocalAssign(Stmt):
    """Register := integer expression, or auxiliary := boolean expression."""

    pre: Assertion
    name: str
    value: object  # Exp for registers, Assertion (register/aux only) for aux
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class Atomic(Stmt):
    """One indivisible step: at most one memory statement plus local assigns.

    Inner statements are unannotated (their ``pre`` is ignored); the block's
    own annotation governs.
    """

    pre: Assertion
    stmts: Tuple[Stmt, ...]
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class Await(Stmt):
    """Blocks until the register/aux guard holds, then runs local assigns."""

    pre: Assertion
    guard: Assertion
    stmts: Tuple[Stmt, ...]
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class If(Stmt):
    pre: Assertion
    guard: Assertion
    then: Tuple[Stmt, ...]
    els: Tuple[Stmt, ...]
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class DoUntil(Stmt):
    """do body until guard, with a loop invariant at the guard point."""

    body: Tuple[Stmt, ...]
    guard: Assertion
    inv: Assertion
    label: Optional[str] = None
    line: int = 0


@dataclass(frozen=True)
class While(Stmt):
    pre: Assertion
    guard: Assertion
    inv: Assertion
    body: Tuple[Stmt, ...]
    label: Optional[str] = None
    line: int = 0


MEMORY_STMTS = (WriteRlx, WriteRel, ReadRlx, ReadAcq, Swap)
SIMPLE_STMTS = MEMORY_STMTS + (LocalAssign, Atomic, Await)


def is_memory(s: Stmt) -> bool:
    return isinstance(s, MEMORY_STMTS)


def atomic_statements(body) -> list:
    """Every atomic (single-step) statement in a statement sequence."""
    out = []
    for s in body:
        if isinstance(s, SIMPLE_STMTS):
            out.append(s)
        elif isinstance(s, If):
            out.extend(atomic_statements(s.then))
            out.extend(atomic_statements(s.els))
        elif isinstance(s, DoUntil):
            out.extend(atomic_statements(s.body))
        elif isinstance(s, While):
            out.extend(atomic_statements(s.body))
        else:
            raise TypeError(f"not a statement: {s!r}")
    return out


def annotations_of(body, post: Assertion) -> list:
    """Every assertion attached to a thread: pres, invariants, and the post."""
    out = []
    for s in body:
        if isinstance(s, SIMPLE_STMTS):
            out.append(s.pre)
        elif isinstance(s, If):
            out.append(s.pre)
            out.extend(annotations_of(s.then, None))
            out.extend(annotations_of(s.els, None))
        elif isinstance(s, DoUntil):
            out.extend(annotations_of(s.body, None))
            out.append(s.inv)
        elif isinstance(s, While):
            out.append(s.pre)
            out.append(s.inv)
            out.extend(annotations_of(s.body, None))
    if post is not None:
        out.append(post)
    return out


def written_locals(s: Stmt) -> set:
    """Register/aux names the statement can overwrite."""
    if isinstance(s, (ReadRlx, ReadAcq)):
        return {s.reg}
    if isinstance(s, Swap):
        return {s.binder} if s.binder else set()
    if isinstance(s, LocalAssign):
        return {s.name}
    if isinstance(s, (Atomic, Await)):
        out = set()
        for inner in s.stmts:
            out |= written_locals(inner)
        return out
    return set()


def format_stmt(s: Stmt) -> str:
    """One-line rendering of a statement without its annotation."""
    if isinstance(s, WriteRlx):
        return f"{s.x} := {format_exp(s.exp)}"
    if isinstance(s, WriteRel):
        return f"{s.x} :=R {format_exp(s.exp)}"
    if isinstance(s, ReadRlx):
        return f"{s.reg} <- {s.x}"
    if isinstance(s, ReadAcq):
        return f"{s.reg} <-A {s.x}"
    if isinstance(s, Swap):
        base = f"swap({s.x}, {format_exp(s.exp)})"
        return f"{base} -> {s.binder}" if s.binder else base
    if isinstance(s, LocalAssign):
        rhs = (
            format_exp(s.value)
            if isinstance(s.value, (IntLit, RegRef, BinOp))
            else A.format_assertion(s.value)
        )
        return f"{s.name} := {rhs}"
    if isinstance(s, Atomic):
        inner = " ".join(format_stmt(i) + ";" for i in s.stmts)
        return f"atomic {{ {inner} }}"
    if isinstance(s, Await):
        inner = " ".join(format_stmt(i) + ";" for i in s.stmts)
        return f"await {A.format_assertion(s.guard)} {{ {inner} }}"
    if isinstance(s, If):
        return f"if {A.format_assertion(s.guard)} {{ ... }}"
    if isinstance(s, DoUntil):
        return f"do {{ ... }} until {A.format_assertion(s.guard)}"
    if isinstance(s, While):
        return f"while {A.format_assertion(s.guard)} {{ ... }}"
    raise TypeError(f"not a statement: {s!r}")


# ---------------------------------------------------------------------------
# Programs
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class ThreadSpec:
    tid: int
    body: Tuple[Stmt, ...]
    post: Assertion


@dataclass(frozen=True)
class Program:
    name: str
    inits: Tuple[Tuple[str, int], ...]
    regs: Tuple[str, ...]
    aux: Tuple[Tuple[str, bool], ...]
    pre: Assertion
    invariant: Optional[Assertion]
    threads: Tuple[ThreadSpec, ...]
    post: Assertion

    @property
    def shared(self):
        return tuple(x for x, _ in self.inits)

    @property
    def thread_count(self):
        return len(self.threads)

    def initial_valuation(self) -> A.RegValuation:
        return A.RegValuation.make({r: 0 for r in self.regs}, dict(self.aux))

    def constants(self) -> set:
        """Integer literals appearing anywhere in the program."""
        out = {v for _, v in self.inits}
        for a in self.all_assertions():
            out |= A.constants(a)
        for t in self.threads:
            for s in atomic_statements(t.body):
                out |= _stmt_constants(s)
        return out

    def all_assertions(self) -> list:
        out = [self.pre, self.post]
        if self.invariant is not None:
            out.append(self.invariant)
        for t in self.threads:
            out.extend(annotations_of(t.body, t.post))
            for s in atomic_statements(t.body):
                out.extend(_stmt_guards(s))
        for t in self.threads:
            out.extend(_control_guards(t.body))
        return out


def _stmt_constants(s: Stmt) -> set:
    if isinstance(s, (WriteRlx, WriteRel, Swap)):
        return exp_constants(s.exp)
    if isinstance(s, LocalAssign) and isinstance(s.value, (IntLit, RegRef, BinOp)):
        return exp_constants(s.value)
    if isinstance(s, (Atomic, Await)):
        out = set()
        for inner in s.stmts:
            out |= _stmt_constants(inner)
        return out
    return set()


def _stmt_guards(s: Stmt) -> list:
    if isinstance(s, Await):
        return [s.guard]
    if isinstance(s, LocalAssign) and isinstance(s.value, Assertion):
        return [s.value]
    return []


def _control_guards(body) -> list:
    out = []
    for s in body:
        if isinstance(s, If):
            out.append(s.guard)
            out.extend(_control_guards(s.then))
            out.extend(_control_guards(s.els))
        elif isinstance(s, DoUntil):
            out.append(s.guard)
            out.extend(_control_guards(s.body))
        elif isinstance(s, While):
            out.append(s.guard)
            out.extend(_control_guards(s.body))
    return out


# ---------------------------------------------------------------------------
# Validation
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Diagnostic:
    severity: str  # "error" | "warning"
    message: str
    line: int = 0

    def __str__(self):
        where = f" (line {self.line})" if self.line else ""
        return f"{self.severity}: {self.message}{where}"


def validate(p: Program) -> list:
    """Static checks; an empty error-free list means the program is runnable."""
    diags = []
    shared = set(p.shared)
    regs = set(p.regs)
    aux = {name for name, _ in p.aux}

    for name in aux:
        if name in shared:
            diags.append(
                Diagnostic("error", f"auxiliary {name!r} is also a shared variable")
            )
        if name in regs:
            diags.append(Diagnostic("error", f"auxiliary {name!r} is also a register"))
    for name in regs & shared:
        diags.append(Diagnostic("error", f"register {name!r} is also a shared variable"))

    ids = [t.tid for t in p.threads]
    if ids != list(range(1, len(ids) + 1)):
        diags.append(Diagnostic("error", f"thread ids {ids} are not dense from 1"))

    reg_writers = {}
    aux_writers = {}

    def note_writer(table, name, tid, line):
        table.setdefault(name, set()).add(tid)

    def check_assertion(a: Assertion, line=0):
        if a is None:
            return
        for atom in A.atoms(a):
            for f in ("x", "y"):
                v = getattr(atom, f, None)
                if v is not None and v not in shared:
                    diags.append(
                        Diagnostic("error", f"unknown shared variable {v!r}", line)
                    )
            t = getattr(atom, "t", None)
            if t is not None and not (1 <= t <= len(p.threads)):
                diags.append(Diagnostic("error", f"unknown thread {t}", line))
            for f in ("n", "m", "i", "lhs", "rhs"):
                v = getattr(atom, f, None)
                if isinstance(v, str) and v not in regs:
                    diags.append(Diagnostic("error", f"unknown register {v!r}", line))
            if isinstance(atom, A.AuxAtom) and atom.name not in aux:
                diags.append(
                    Diagnostic("error", f"unknown auxiliary {atom.name!r}", line)
                )

    def check_guard(a: Assertion, line=0):
        check_assertion(a, line)
        for atom in A.atoms(a):
            if not isinstance(atom, (A.RegCmp, A.AuxAtom)):
                diags.append(
                    Diagnostic(
                        "error",
                        "guards may mention registers and auxiliaries only",
                        line,
                    )
                )

    def check_exp(e, line=0):
        for r in exp_regs(e):
            if r not in regs:
                diags.append(Diagnostic("error", f"unknown register {r!r}", line))

    def check_simple(s: Stmt, tid: int, inside_atomic: bool):
        if isinstance(s, (WriteRlx, WriteRel)):
            if s.x not in shared:
                diags.append(
                    Diagnostic("error", f"unknown shared variable {s.x!r}", s.line)
                )
            check_exp(s.exp, s.line)
        elif isinstance(s, (ReadRlx, ReadAcq)):
            if s.x not in shared:
                diags.append(
                    Diagnostic("error", f"unknown shared variable {s.x!r}", s.line)
                )
            if s.reg not in regs:
                diags.append(Diagnostic("error", f"unknown register {s.reg!r}", s.line))
            else:
                note_writer(reg_writers, s.reg, tid, s.line)
        elif isinstance(s, Swap):
            if s.x not in shared:
                diags.append(
                    Diagnostic("error", f"unknown shared variable {s.x!r}", s.line)
                )
            check_exp(s.exp, s.line)
            if s.binder is not None:
                if s.binder not in regs:
                    diags.append(
                        Diagnostic("error", f"unknown register {s.binder!r}", s.line)
                    )
                else:
                    note_writer(reg_writers, s.binder, tid, s.line)
        elif isinstance(s, LocalAssign):
            if s.name in regs:
                note_writer(reg_writers, s.name, tid, s.line)
                check_exp(s.value, s.line)
            elif s.name in aux:
                note_writer(aux_writers, s.name, tid, s.line)
                if isinstance(s.value, Assertion):
                    check_guard(s.value, s.line)
                else:
                    diags.append(
                        Diagnostic(
                            "error",
                            f"auxiliary {s.name!r} needs a boolean right-hand side",
                            s.line,
                        )
                    )
            else:
                diags.append(Diagnostic("error", f"unknown local {s.name!r}", s.line))
        else:
            diags.append(
                Diagnostic(
                    "error", f"statement not allowed here: {format_stmt(s)}", s.line
                )
            )

    def walk(body, tid):
        for s in body:
            if isinstance(s, Atomic):
                check_assertion(s.pre, s.line)
                mem = [i for i in s.stmts if is_memory(i)]
                if len(mem) > 1:
                    diags.append(
                        Diagnostic(
                            "error",
                            "atomic block contains more than one memory statement",
                            s.line,
                        )
                    )
                for inner in s.stmts:
                    check_simple(inner, tid, True)
            elif isinstance(s, Await):
                check_assertion(s.pre, s.line)
                check_guard(s.guard, s.line)
                for inner in s.stmts:
                    if not isinstance(inner, LocalAssign):
                        diags.append(
                            Diagnostic(
                                "error",
                                "await bodies may contain local assignments only",
                                s.line,
                            )
                        )
                    else:
                        check_simple(inner, tid, True)
            elif isinstance(s, SIMPLE_STMTS):
                check_assertion(s.pre, s.line)
                check_simple(s, tid, False)
            elif isinstance(s, If):
                check_assertion(s.pre, s.line)
                check_guard(s.guard, s.line)
                walk(s.then, tid)
                walk(s.els, tid)
            elif isinstance(s, DoUntil):
                check_guard(s.guard, s.line)
                check_assertion(s.inv, s.line)
                walk(s.body, tid)
            elif isinstance(s, While):
                check_assertion(s.pre, s.line)
                check_guard(s.guard, s.line)
                check_assertion(s.inv, s.line)
                walk(s.body, tid)
            else:
                diags.append(Diagnostic("error", f"unknown statement {s!r}"))

    check_assertion(p.pre)
    check_assertion(p.post)
    if p.invariant is not None:
        check_assertion(p.invariant)
    for t in p.threads:
        walk(t.body, t.tid)
        check_assertion(t.post)

    for name, writers in sorted(aux_writers.items()):
        if len(writers) > 1:
            diags.append(
                Diagnostic(
                    "error",
                    f"auxiliary {name!r} written by threads {sorted(writers)}",
                )
            )
    for name, writers in sorted(reg_writers.items()):
        if len(writers) > 1:
            diags.append(
                Diagnostic(
                    "warning",
                    f"register {name!r} written by threads {sorted(writers)}",
                )
            )
    return diags


def validation_errors(p: Program) -> list:
    return [d for d in validate(p) if d.severity == "error"]
