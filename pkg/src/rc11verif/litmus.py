"""Concrete litmus-file syntax: lexer, recursive-descent parser, printer.

The grammar (UTF-8, ``#`` comments to end of line)::

    vars x=0 f=0;
    regs r1 r2;                      # optional, default value 0
    aux after1=false;                # optional
    pre { <assertion> }
    invariant { <assertion> }        # optional global invariant
    thread 1 { <statements> } post { <assertion> }
    ...
    post { <assertion> }

Statements (each optionally preceded by ``{assertion}`` — default ``true``
— and an ``@label``)::

    x := e;          x :=R e;        r <- x;          r <-A x;
    swap(x, e) [-> r];               aux_or_reg := e;
    atomic { ... }   await b { ... }
    if b { ... } [else { ... }]
    while b inv {A} { ... }
    do { ... } until b inv {A};

Assertions::

    [x =t n]   [x ~t n]   [x = n][[y =t m]]   [m < x n]   [m << x n]
    init(x,n)  zero(x,n,i)  amo(x,n)  enc(t,x,n)  cvd(x,n)
    r1 == 1    after1    !A    A && B    A || B    A -> B   true  false
"""

from __future__ import annotations

import re

from . import assertions as A
from . import lang as L
from .errors import ParseError

_TOKEN_RE = re.compile(
    r"""
    (?P<ws>[ \t\r]+)
  | (?P<comment>\#[^\n]*)
  | (?P<nl>\n)
  | (?P<lbb>\[\[) | (?P<rbb>\]\])
  | (?P<assignR>:=R(?![A-Za-z0-9_]))
  | (?P<assign>:=)
  | (?P<readA><-A(?![A-Za-z0-9_]))
  | (?P<read><-)
  | (?P<arrow>->)
  | (?P<le><=) | (?P<ge>>=) | (?P<eq>==) | (?P<ne>!=)
  | (?P<ltlt><<)
  | (?P<andand>&&) | (?P<oror>\|\|)
  | (?P<int>\d+)
  | (?P<ident>[A-Za-z_][A-Za-z0-9_]*)
  | (?P<sym>[{}\[\]();,=~!<>@+\-])
    """,
    re.VERBOSE,
)

KEYWORDS = {
    "vars", "regs", "aux", "pre", "invariant", "thread", "post",
    "do", "until", "inv", "while", "if", "else", "await", "atomic",
    "swap", "true", "false", "init", "zero", "amo", "enc", "cvd",
}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind},{self.text!r}@{self.line}:{self.col})"


def tokenize(text: str) -> list:
    toks = []
    line, col, pos = 1, 1, 0
    while pos < len(text):
        m = _TOKEN_RE.match(text, pos)
        if not m:
            raise ParseError(f"unexpected character {text[pos]!r}", line, col)
        kind = m.lastgroup
        tok = m.group()
        if kind == "nl":
            line += 1
            col = 1
        elif kind not in ("ws", "comment"):
            if kind == "ident" and tok in KEYWORDS:
                kind = tok
            elif kind == "sym":
                kind = tok
            toks.append(Token(kind, tok, line, col))
            col += len(tok)
        else:
            col += len(tok)
        pos = m.end()
    toks.append(Token("eof", "", line, col))
    return toks


class Parser:
    def __init__(self, text: str, name: str = "program"):
        self.toks = tokenize(text)
        self.pos = 0
        self.name = name
        self.shared = []
        self.regs = []
        self.aux = []

    # -- token helpers -------------------------------------------------------

    def peek(self, ahead=0) -> Token:
        return self.toks[min(self.pos + ahead, len(self.toks) - 1)]

    def next(self) -> Token:
        t = self.peek()
        self.pos += 1
        return t

    def at(self, *kinds) -> bool:
        return self.peek().kind in kinds

    def accept(self, kind):
        if self.at(kind):
            return self.next()
        return None

    def expect(self, kind) -> Token:
        t = self.peek()
        if t.kind != kind:
            raise ParseError(
                f"expected {kind!r}, found {t.text or 'end of input'!r}",
                t.line,
                t.col,
            )
        return self.next()

    def fail(self, message):
        t = self.peek()
        raise ParseError(message, t.line, t.col)

    # -- program -------------------------------------------------------------

    def parse_program(self) -> L.Program:
        if self.at("eof"):
            self.fail("empty input")
        self.expect("vars")
        inits = []
        while self.at("ident"):
            x = self.next().text
            self.expect("=")
            v = self.parse_int()
            inits.append((x, v))
        self.expect(";")
        self.shared = [x for x, _ in inits]

        if self.accept("regs"):
            while self.at("ident"):
                self.regs.append(self.next().text)
            self.expect(";")
        if self.accept("aux"):
            while self.at("ident"):
                name = self.next().text
                self.expect("=")
                t = self.peek()
                if t.kind in ("true", "false"):
                    self.next()
                    self.aux.append((name, t.kind == "true"))
                else:
                    self.fail("auxiliary initial value must be true or false")
            self.expect(";")

        self.expect("pre")
        pre = self.parse_braced_assertion()
        invariant = None
        if self.accept("invariant"):
            invariant = self.parse_braced_assertion()

        threads = []
        while self.at("thread"):
            self.next()
            tid = self.parse_int()
            self.expect("{")
            body = self.parse_stmts()
            self.expect("}")
            self.expect("post")
            tpost = self.parse_braced_assertion()
            threads.append(L.ThreadSpec(tid, tuple(body), tpost))
        if not threads:
            self.fail("expected at least one thread")

        self.expect("post")
        post = self.parse_braced_assertion()
        self.expect("eof")
        return L.Program(
            self.name,
            tuple(inits),
            tuple(self.regs),
            tuple(self.aux),
            pre,
            invariant,
            tuple(threads),
            post,
        )

    def parse_int(self) -> int:
        return int(self.expect("int").text)

    # -- statements ------------------------------------------------------------

    def parse_stmts(self) -> list:
        out = []
        while not self.at("}", "eof"):
            out.append(self.parse_stmt())
        return out

    def parse_stmt(self) -> L.Stmt:
        line = self.peek().line
        pre = A.TRUE
        if self.at("{"):
            pre = self.parse_braced_assertion()
        label = None
        if self.accept("@"):
            label = self.expect("ident").text
        t = self.peek()

        if t.kind == "atomic":
            self.next()
            self.expect("{")
            inner = []
            while not self.at("}"):
                inner.append(self.parse_simple())
            self.expect("}")
            self.accept(";")
            return L.Atomic(pre, tuple(inner), label, line)

        if t.kind == "await":
            self.next()
            guard = self.parse_assertion()
            self.expect("{")
            inner = []
            while not self.at("}"):
                inner.append(self.parse_simple())
            self.expect("}")
            self.accept(";")
            return L.Await(pre, guard, tuple(inner), label, line)

        if t.kind == "if":
            self.next()
            guard = self.parse_assertion()
            self.expect("{")
            then = self.parse_stmts()
            self.expect("}")
            els = []
            if self.accept("else"):
                self.expect("{")
                els = self.parse_stmts()
                self.expect("}")
            self.accept(";")
            return L.If(pre, guard, tuple(then), tuple(els), label, line)

        if t.kind == "while":
            self.next()
            guard = self.parse_assertion()
            self.expect("inv")
            inv = self.parse_braced_assertion()
            self.expect("{")
            body = self.parse_stmts()
            self.expect("}")
            self.accept(";")
            return L.While(pre, guard, inv, tuple(body), label, line)

        if t.kind == "do":
            if pre != A.TRUE:
                self.fail("a do-until takes no annotation; annotate its first statement")
            self.next()
            self.expect("{")
            body = self.parse_stmts()
            self.expect("}")
            self.expect("until")
            guard = self.parse_assertion()
            self.expect("inv")
            inv = self.parse_braced_assertion()
            self.accept(";")
            return L.DoUntil(tuple(body), guard, inv, label, line)

        s = self.parse_simple(pre, label)
        return s

    def parse_simple(self, pre=A.TRUE, label=None) -> L.Stmt:
        """A single-step statement followed by ';'."""
        line = self.peek().line
        if self.at("swap"):
            self.next()
            self.expect("(")
            x = self.expect("ident").text
            self.expect(",")
            e = self.parse_exp()
            self.expect(")")
            binder = None
            if self.accept("arrow"):
                binder = self.expect("ident").text
            self.expect(";")
            if x not in self.shared:
                raise ParseError(f"swap target {x!r} is not a shared variable", line, 0)
            return L.Swap(pre, x, e, binder, label, line)

        name = self.expect("ident").text
        t = self.peek()
        if t.kind == "assignR":
            self.next()
            e = self.parse_exp()
            self.expect(";")
            return L.WriteRel(pre, name, e, label, line)
        if t.kind == "assign":
            self.next()
            if name in self.aux_names():
                b = self.parse_assertion()
                self.expect(";")
                return L.LocalAssign(pre, name, b, label, line)
            e = self.parse_exp()
            self.expect(";")
            if name in self.shared:
                return L.WriteRlx(pre, name, e, label, line)
            return L.LocalAssign(pre, name, e, label, line)
        if t.kind == "readA":
            self.next()
            x = self.expect("ident").text
            self.expect(";")
            return L.ReadAcq(pre, name, x, label, line)
        if t.kind == "read":
            self.next()
            x = self.expect("ident").text
            self.expect(";")
            return L.ReadRlx(pre, name, x, label, line)
        self.fail("expected ':=', ':=R', '<-' or '<-A'")

    def aux_names(self):
        return {n for n, _ in self.aux}

    # -- expressions -----------------------------------------------------------

    def parse_exp(self) -> L.Exp:
        e = self.parse_exp_atom()
        while self.at("+", "-"):
            op = self.next().kind
            e = L.BinOp(op, e, self.parse_exp_atom())
        return e

    def parse_exp_atom(self) -> L.Exp:
        if self.at("int"):
            return L.IntLit(self.parse_int())
        if self.at("ident"):
            return L.RegRef(self.next().text)
        if self.accept("("):
            e = self.parse_exp()
            self.expect(")")
            return e
        self.fail("expected an integer expression")

    # -- assertions -------------------------------------------------------------

    def parse_braced_assertion(self) -> A.Assertion:
        self.expect("{")
        a = self.parse_assertion()
        self.expect("}")
        return a

    def parse_assertion(self) -> A.Assertion:
        return self.parse_implies()

    def parse_implies(self) -> A.Assertion:
        left = self.parse_or()
        if self.accept("arrow"):
            return A.Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> A.Assertion:
        left = self.parse_and()
        while self.accept("oror"):
            left = A.Or(left, self.parse_and())
        return left

    def parse_and(self) -> A.Assertion:
        left = self.parse_not()
        while self.accept("andand"):
            left = A.And(left, self.parse_not())
        return left

    def parse_not(self) -> A.Assertion:
        if self.accept("!"):
            return A.Not(self.parse_not())
        return self.parse_atom()

    def parse_value(self):
        if self.at("int"):
            return self.parse_int()
        if self.at("ident"):
            return self.next().text
        self.fail("expected a value (integer or register)")

    def parse_atom(self) -> A.Assertion:
        t = self.peek()
        if t.kind == "true":
            self.next()
            return A.TRUE
        if t.kind == "false":
            self.next()
            return A.FALSE
        if t.kind == "(":
            self.next()
            a = self.parse_assertion()
            self.expect(")")
            return a
        if t.kind == "[":
            return self.parse_bracket_atom()
        if t.kind in ("init", "amo", "cvd", "zero", "enc"):
            return self.parse_fn_atom()
        if t.kind in ("ident", "int"):
            first = self.parse_value()
            if self.at("eq", "ne", "le", "ge", "<", ">"):
                op = {"eq": "==", "ne": "!=", "le": "<=", "ge": ">=",
                      "<": "<", ">": ">"}[self.next().kind]
                return A.RegCmp(first, op, self.parse_value())
            if isinstance(first, str):
                return A.AuxAtom(first)
            self.fail("expected a comparison operator after an integer")
        self.fail("expected an assertion")

    def parse_fn_atom(self) -> A.Assertion:
        kind = self.next().kind
        self.expect("(")
        if kind == "enc":
            t = self.parse_int()
            self.expect(",")
            x = self.expect("ident").text
            self.expect(",")
            n = self.parse_value()
            self.expect(")")
            return A.Encountered(t, x, n)
        x = self.expect("ident").text
        self.expect(",")
        n = self.parse_value()
        if kind == "zero":
            self.expect(",")
            i = self.parse_value()
            self.expect(")")
            return A.ZeroOcc(x, n, i)
        self.expect(")")
        if kind == "init":
            return A.InitVal(x, n)
        if kind == "amo":
            return A.AtMostOne(x, n)
        return A.Covered(x, n)

    def parse_bracket_atom(self) -> A.Assertion:
        self.expect("[")
        first = self.parse_value()
        t = self.peek()
        if t.kind in ("<", "ltlt"):
            self.next()
            x = self.expect("ident").text
            n = self.parse_value()
            self.expect("]")
            cls = A.OrdPossible if t.kind == "<" else A.OrdDefinite
            return cls(first, x, n)
        if t.kind in ("=", "~"):
            self.next()
            if not isinstance(first, str):
                self.fail("the variable of an observation atom must be an identifier")
            v1 = self.parse_value()
            if t.kind == "=" and self.at("]"):
                # conditional observation: [x = n][[y =t m]]
                self.next()
                self.expect("lbb")
                y = self.expect("ident").text
                self.expect("=")
                tid = self.parse_int()
                m = self.parse_value()
                self.expect("rbb")
                return A.CObs(first, v1, y, tid, m)
            if not isinstance(v1, int):
                self.fail("thread subscripts must be integer literals")
            n = self.parse_value()
            self.expect("]")
            cls = A.DObs if t.kind == "=" else A.PObs
            return cls(first, v1, n)
        self.fail("expected '=', '~', '<' or '<<' inside a bracket atom")


def parse(text: str, name: str = "program") -> L.Program:
    """Parse a litmus file into a Program; raises ParseError with position."""
    return Parser(text, name).parse_program()


# ---------------------------------------------------------------------------
# Pretty printer
# ---------------------------------------------------------------------------


def _fmt_annotated(s: L.Stmt, indent: str) -> list:
    lines = []
    pre = getattr(s, "pre", None)
    label = f"@{s.label} " if getattr(s, "label", None) else ""
    ann = "" if pre is None or pre == A.TRUE else f"{{{A.format_assertion(pre)}}} "

    if isinstance(s, L.Atomic):
        inner = " ".join(L.format_stmt(i) + ";" for i in s.stmts)
        lines.append(f"{indent}{ann}{label}atomic {{ {inner} }}")
    elif isinstance(s, L.Await):
        inner = " ".join(L.format_stmt(i) + ";" for i in s.stmts)
        lines.append(
            f"{indent}{ann}{label}await {A.format_assertion(s.guard)} {{ {inner} }}"
        )
    elif isinstance(s, L.If):
        lines.append(f"{indent}{ann}{label}if {A.format_assertion(s.guard)} {{")
        for i in s.then:
            lines.extend(_fmt_annotated(i, indent + "  "))
        if s.els:
            lines.append(f"{indent}}} else {{")
            for i in s.els:
                lines.extend(_fmt_annotated(i, indent + "  "))
        lines.append(f"{indent}}}")
    elif isinstance(s, L.While):
        lines.append(
            f"{indent}{ann}{label}while {A.format_assertion(s.guard)} "
            f"inv {{{A.format_assertion(s.inv)}}} {{"
        )
        for i in s.body:
            lines.extend(_fmt_annotated(i, indent + "  "))
        lines.append(f"{indent}}}")
    elif isinstance(s, L.DoUntil):
        lines.append(f"{indent}{label}do {{")
        for i in s.body:
            lines.extend(_fmt_annotated(i, indent + "  "))
        lines.append(
            f"{indent}}} until {A.format_assertion(s.guard)} "
            f"inv {{{A.format_assertion(s.inv)}}};"
        )
    else:
        lines.append(f"{indent}{ann}{label}{L.format_stmt(s)};")
    return lines


def pretty_print(p: L.Program) -> str:
    """Render a Program in litmus syntax; parses back to an equal tree."""
    lines = []
    lines.append("vars " + " ".join(f"{x}={v}" for x, v in p.inits) + ";")
    if p.regs:
        lines.append("regs " + " ".join(p.regs) + ";")
    if p.aux:
        lines.append(
            "aux "
            + " ".join(f"{n}={'true' if v else 'false'}" for n, v in p.aux)
            + ";"
        )
    lines.append(f"pre {{{A.format_assertion(p.pre)}}}")
    if p.invariant is not None:
        lines.append(f"invariant {{{A.format_assertion(p.invariant)}}}")
    for t in p.threads:
        lines.append(f"thread {t.tid} {{")
        for s in t.body:
            lines.extend(_fmt_annotated(s, "  "))
        lines.append(f"}} post {{{A.format_assertion(t.post)}}}")
    lines.append(f"post {{{A.format_assertion(p.post)}}}")
    return "\n".join(lines) + "\n"
