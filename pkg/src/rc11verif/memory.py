"""Timestamped weak-memory states and their transition functions.

A state tracks, per shared variable, a chain of writes totally ordered by
exact rational timestamps, a set of covered writes (consumed by
read-modify-writes), a value/release record per write, one viewfront per
thread and one viewfront per write.  Reads, writes and updates are pure:
each returns the full list of successor states, one per legal
nondeterministic choice, in a deterministic order (ascending timestamp of
the chosen write).
"""

from __future__ import annotations

from fractions import Fraction
from typing import Iterable, NamedTuple

from .errors import (
    DomainMismatch,
    DuplicateVariable,
    EmptyProgram,
    NoUncoveredVisibleWrite,
    NoWritesOnVariable,
    UnknownWrite,
)


class WriteId(NamedTuple):
    """A write, uniquely named by its variable and timestamp."""

    var: str
    ts: Fraction


class WriteRecord(NamedTuple):
    val: int
    rel: bool


# A view maps every variable of the state to one write on that variable.
View = dict


class MemState:
    """Immutable weak-memory state.

    Instances are never mutated after construction; transition functions
    build fresh states sharing unchanged components.  ``key()`` returns a
    hashable structural fingerprint used for memoisation and equality.
    """

    __slots__ = (
        "variables",
        "thread_ids",
        "writes",
        "covered",
        "mods",
        "tview",
        "mview",
        "_key",
    )

    def __init__(self, variables, thread_ids, writes, covered, mods, tview, mview):
        self.variables = tuple(variables)
        self.thread_ids = tuple(thread_ids)
        self.writes = frozenset(writes)
        self.covered = frozenset(covered)
        self.mods = mods
        self.tview = tview
        self.mview = mview
        self._key = None

    # -- structural identity ------------------------------------------------

    def key(self):
        if self._key is None:
            per_var = tuple(
                tuple(
                    (w.ts, self.mods[w].val, self.mods[w].rel, w in self.covered)
                    for w in self.writes_on(v)
                )
                for v in self.variables
            )
            tv = tuple(
                tuple(self.tview[t][v].ts for v in self.variables)
                for t in self.thread_ids
            )
            mv = tuple(
                tuple(self.mview[w][v].ts for v in self.variables)
                for v2 in self.variables
                for w in self.writes_on(v2)
            )
            self._key = (per_var, tv, mv)
        return self._key

    def __eq__(self, other):
        if not isinstance(other, MemState):
            return NotImplemented
        return (
            self.variables == other.variables
            and self.thread_ids == other.thread_ids
            and self.key() == other.key()
        )

    def __hash__(self):
        return hash(self.key())

    def __repr__(self):
        parts = []
        for v in self.variables:
            chain = ",".join(
                f"{self.mods[w].val}{'R' if self.mods[w].rel else ''}"
                f"{'*' if w in self.covered else ''}@{w.ts}"
                for w in self.writes_on(v)
            )
            parts.append(f"{v}:[{chain}]")
        return f"<MemState {' '.join(parts)}>"

    # -- queries -------------------------------------------------------------

    def writes_on(self, x: str) -> tuple:
        """All writes on ``x``, ascending by timestamp."""
        return tuple(sorted(w for w in self.writes if w.var == x))

    def last_write(self, x: str) -> WriteId:
        ws = self.writes_on(x)
        if not ws:
            raise NoWritesOnVariable(x)
        return ws[-1]

    def value_of(self, w: WriteId) -> int:
        if w not in self.writes:
            raise UnknownWrite(w)
        return self.mods[w].val

    def visible_writes(self, t: int, x: str) -> tuple:
        """Writes on ``x`` at or after thread ``t``'s viewfront, ascending.

        Covered writes are not filtered out here: a read may target them.
        """
        front = self.tview[t][x].ts
        return tuple(w for w in self.writes_on(x) if w.ts >= front)


def writes_on(sigma: MemState, x: str):
    return sigma.writes_on(x)


def last_write(sigma: MemState, x: str) -> WriteId:
    return sigma.last_write(x)


def value_of(sigma: MemState, w: WriteId) -> int:
    return sigma.value_of(w)


def visible_writes(sigma: MemState, t: int, x: str):
    return sigma.visible_writes(t, x)


def wfs_violations(sigma: MemState) -> list:
    """Diagnostic form of well-formedness: the list of violated clauses."""
    bad = []
    for t in sigma.thread_ids:
        for x in sigma.variables:
            w = sigma.tview[t][x]
            if w.var != x or w not in sigma.writes:
                bad.append(f"thread view t{t}/{x} not a write on {x}")
    for w in sigma.writes:
        for x in sigma.variables:
            u = sigma.mview[w][x]
            if u.var != x or u not in sigma.writes:
                bad.append(f"write view {w}/{x} not a write on {x}")
    # Finiteness of writes_on holds by construction (writes is a finite set).
    for w in sigma.writes:
        if sigma.mview[w][w.var] != w:
            bad.append(f"write view of {w} does not map its own variable to itself")
    for x in sigma.variables:
        ws = sigma.writes_on(x)
        if not ws:
            bad.append(f"no writes on {x}")
        elif ws[-1] in sigma.covered:
            bad.append(f"last write on {x} is covered")
    if not sigma.covered <= sigma.writes:
        bad.append("covered set contains unknown writes")
    return bad


def well_formed(sigma: MemState) -> bool:
    return not wfs_violations(sigma)


def init_state(inits: Iterable, threads: int) -> MemState:
    """Initial state: one non-releasing write per variable at timestamp 0.

    Every thread view and every initial write's view is the full initial
    view.
    """
    inits = list(inits)
    if not inits:
        raise EmptyProgram("at least one shared variable is required")
    seen = set()
    for x, _ in inits:
        if x in seen:
            raise DuplicateVariable(x)
        seen.add(x)
    variables = tuple(x for x, _ in inits)
    thread_ids = tuple(range(1, threads + 1))
    zero = Fraction(0)
    initial = {x: WriteId(x, zero) for x in variables}
    mods = {initial[x]: WriteRecord(v, False) for x, v in inits}
    full_view = dict(initial)
    tview = {t: dict(full_view) for t in thread_ids}
    mview = {initial[x]: dict(full_view) for x in variables}
    return MemState(
        variables, thread_ids, initial.values(), frozenset(), mods, tview, mview
    )


def view_merge(f: View, g: View) -> View:
    """Pointwise timestamp maximum of two views; ties keep ``f``'s entry."""
    if set(f) != set(g):
        raise DomainMismatch(f"{sorted(f)} vs {sorted(g)}")
    return {x: f[x] if g[x].ts <= f[x].ts else g[x] for x in f}


def fresh_timestamp(sigma: MemState, w: WriteId) -> Fraction:
    """A timestamp strictly between ``w`` and the next write on its variable.

    The midpoint when a successor exists, ``tst w + 1`` otherwise.  Density
    of the rationals guarantees such a value always exists; this picks one
    canonical representative per insertion gap.
    """
    if w not in sigma.writes:
        raise UnknownWrite(w)
    later = [u.ts for u in sigma.writes_on(w.var) if u.ts > w.ts]
    if later:
        return (w.ts + min(later)) / 2
    return w.ts + 1


def _uncovered_visible(sigma: MemState, t: int, x: str):
    if not sigma.writes_on(x):
        raise NoWritesOnVariable(x)
    ws = [w for w in sigma.visible_writes(t, x) if w not in sigma.covered]
    if not ws:
        # Unreachable from well-formed states: the last write is never
        # covered and is always visible.
        raise NoUncoveredVisibleWrite((t, x))
    return ws


def step_read(sigma: MemState, t: int, x: str, acquiring: bool) -> list:
    """All read outcomes for thread ``t`` on ``x``: (poststate, value) pairs.

    One outcome per visible write.  Only ``t``'s viewfront changes: to the
    write read, and, for an acquiring read of a releasing write, merged
    with that write's viewfront.
    """
    if not sigma.writes_on(x):
        raise NoWritesOnVariable(x)
    out = []
    for w in sigma.visible_writes(t, x):
        view = dict(sigma.tview[t])
        view[x] = w
        if acquiring and sigma.mods[w].rel:
            view = view_merge(view, sigma.mview[w])
        tview = dict(sigma.tview)
        tview[t] = view
        post = MemState(
            sigma.variables,
            sigma.thread_ids,
            sigma.writes,
            sigma.covered,
            sigma.mods,
            tview,
            sigma.mview,
        )
        out.append((post, sigma.mods[w].val))
    return out


def step_write(sigma: MemState, t: int, x: str, v: int, releasing: bool) -> list:
    """All write outcomes: one poststate per uncovered visible write.

    The new write lands immediately after the chosen write; the writer's
    viewfront advances to it and becomes the new write's viewfront.
    """
    out = []
    for w in _uncovered_visible(sigma, t, x):
        ts = fresh_timestamp(sigma, w)
        w2 = WriteId(x, ts)
        mods = dict(sigma.mods)
        mods[w2] = WriteRecord(v, releasing)
        view = dict(sigma.tview[t])
        view[x] = w2
        tview = dict(sigma.tview)
        tview[t] = view
        mview = dict(sigma.mview)
        mview[w2] = dict(view)
        out.append(
            MemState(
                sigma.variables,
                sigma.thread_ids,
                sigma.writes | {w2},
                sigma.covered,
                mods,
                tview,
                mview,
            )
        )
    return out


def step_update(sigma: MemState, t: int, x: str, v: int) -> list:
    """All RMW outcomes: (poststate, value read) pairs.

    Covers the write read from, installs a releasing write of ``v``
    immediately after it, and synchronises with the covered write's
    viewfront when that write is releasing.  Returns the overwritten value.
    """
    out = []
    for w in _uncovered_visible(sigma, t, x):
        ts = fresh_timestamp(sigma, w)
        w2 = WriteId(x, ts)
        mods = dict(sigma.mods)
        mods[w2] = WriteRecord(v, True)
        view = dict(sigma.tview[t])
        view[x] = w2
        if sigma.mods[w].rel:
            view = view_merge(view, sigma.mview[w])
        tview = dict(sigma.tview)
        tview[t] = view
        mview = dict(sigma.mview)
        mview[w2] = dict(view)
        out.append(
            (
                MemState(
                    sigma.variables,
                    sigma.thread_ids,
                    sigma.writes | {w2},
                    sigma.covered | {w},
                    mods,
                    tview,
                    mview,
                ),
                sigma.mods[w].val,
            )
        )
    return out


def canonicalize(sigma: MemState) -> MemState:
    """Relabel per-variable timestamps to 0,1,2,... preserving order.

    Only timestamp order is observable, so the result is indistinguishable
    from the input to every assertion and transition; canonical states make
    exploration memoisable.  Idempotent.
    """
    remap = {}
    for x in sigma.variables:
        for i, w in enumerate(sigma.writes_on(x)):
            remap[w] = WriteId(x, Fraction(i))

    def rv(view):
        return {x: remap[view[x]] for x in view}

    return MemState(
        sigma.variables,
        sigma.thread_ids,
        remap.values(),
        frozenset(remap[w] for w in sigma.covered),
        {remap[w]: rec for w, rec in sigma.mods.items()},
        {t: rv(sigma.tview[t]) for t in sigma.thread_ids},
        {remap[w]: rv(view) for w, view in sigma.mview.items()},
    )
