"""Syntax checker for the IMITATOR 3.4 model (.imi) and property (.imiprop) formats.

Only the constructs a PTA without discrete variables needs are accepted:
clock/parameter/constant declarations, automata with (urgent/accepting)
locations, invariants, guarded transitions with resets, the ``init`` block,
and synthesis properties over location predicates.  Besides the grammar, names
are resolved: undeclared variables, unknown locations, duplicate locations and
a missing initial location are errors.
"""

import re


class ImitatorSyntaxError(Exception):
    def __init__(self, msg, line=None, col=None):
        where = "" if line is None else "%d:%d: " % (line, col)
        super().__init__(where + msg)
        self.line, self.col = line, col


_TOKEN = re.compile(r"""
    (?P<ws>[ \t\r\n]+) |
    (?P<num>\d+(?:\.\d+)?) |
    (?P<id>[A-Za-z][A-Za-z0-9_]*) |
    (?P<op>:=|<=|>=|&&|\|\||\#synth|[<>=&|+\-*/(){}\[\],;:])
""", re.X)

RESERVED = {"var", "clock", "parameter", "constant", "discrete", "automaton", "actions",
            "loc", "urgent", "accepting", "invariant", "when", "sync", "do", "goto", "end",
            "init", "continuous", "True", "False", "and", "or", "not", "property", "stop",
            "wait", "if", "then", "else", "int", "bool", "rat"}

UNARY = {"EF", "AGnot", "AG", "EG", "AF"}
BINARY = {"EU", "AU", "EW", "AW"}


def _strip_comments(text):
    out, depth, i = [], 0, 0
    while i < len(text):
        if text.startswith("(*", i):
            depth += 1
            i += 2
            continue
        if depth and text.startswith("*)", i):
            depth -= 1
            i += 2
            continue
        ch = text[i]
        if depth:
            out.append("\n" if ch == "\n" else " ")
        else:
            out.append(ch)
        i += 1
    if depth:
        raise ImitatorSyntaxError("unterminated comment")
    return "".join(out)


def _tokens(text):
    text = _strip_comments(text)
    out, pos, line, col0 = [], 0, 1, 0
    while pos < len(text):
        m = _TOKEN.match(text, pos)
        if not m:
            raise ImitatorSyntaxError("unexpected character %r" % text[pos], line, pos - col0 + 1)
        kind = m.lastgroup
        val = m.group(kind)
        if kind == "ws":
            nl = val.count("\n")
            if nl:
                line += nl
                col0 = pos + val.rfind("\n") + 1
        else:
            out.append((kind, val, line, pos - col0 + 1))
        pos = m.end()
    out.append(("eof", "", line, pos - col0 + 1))
    return out


class _Parser:
    def __init__(self, text):
        self.toks = _tokens(text)
        self.i = 0

    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        return ImitatorSyntaxError(msg, tok[2], tok[3])

    def accept(self, val):
        if self.peek()[1] == val and self.peek()[0] != "eof":
            return self.next()
        return None

    def expect(self, val):
        t = self.peek()
        if t[1] != val or t[0] == "eof":
            raise self.error("expected %r, found %r" % (val, t[1] or "end of input"))
        return self.next()

    def ident(self, what="identifier"):
        t = self.peek()
        if t[0] != "id" or t[1] in RESERVED:
            raise self.error("expected %s, found %r" % (what, t[1] or "end of input"))
        return self.next()

    # linear expressions ---------------------------------------------------

    def linexpr(self, names):
        self.lterm(names)
        while self.peek()[1] in ("+", "-"):
            self.next()
            self.lterm(names)

    def lterm(self, names):
        if self.accept("-"):
            self.lterm(names)
            return
        t = self.peek()
        if t[1] == "(":
            self.next()
            self.linexpr(names)
            self.expect(")")
        elif t[0] == "num":
            self.next()
            if self.accept("/"):
                if self.peek()[0] != "num":
                    raise self.error("expected a number after '/'")
                self.next()
            if self.accept("*"):
                self.lterm(names)
        elif t[0] == "id" and t[1] not in RESERVED:
            self.next()
            if names is not None and t[1] not in names:
                raise self.error("undeclared variable %r" % t[1], t)
            if self.accept("*"):
                if self.peek()[0] != "num":
                    raise self.error("non-linear product")
                self.next()
        else:
            raise self.error("expected a linear term, found %r" % (t[1] or "end of input"))

    def constraint(self, names):
        self.linexpr(names)
        t = self.peek()
        if t[1] not in ("<", "<=", "=", ">=", ">"):
            raise self.error("expected a comparison operator, found %r" % (t[1] or "end of input"))
        self.next()
        self.linexpr(names)

    def convex(self, names):
        if self.accept("True") or self.accept("False"):
            return
        self.constraint(names)
        while self.accept("&"):
            self.constraint(names)


def validate_model(text):
    """Check a .imi text; returns a summary dict or raises ImitatorSyntaxError."""
    p = _Parser(text)
    p.expect("var")
    clocks, params, consts = set(), set(), set()
    while p.peek()[0] == "id" and p.peek()[1] not in ("automaton",):
        names = [p.ident("variable name")]
        while p.accept(","):
            names.append(p.ident("variable name"))
        p.expect(":")
        kind = p.next()
        if kind[1] not in ("clock", "parameter", "constant"):
            raise p.error("unsupported variable type %r" % kind[1], kind)
        if kind[1] == "constant":
            p.expect("=")
            p.linexpr(set())
        p.expect(";")
        target = {"clock": clocks, "parameter": params, "constant": consts}[kind[1]]
        for tok in names:
            n = tok[1]
            if n in clocks | params | consts:
                raise p.error("variable %r declared twice" % n, tok)
            target.add(n)
    allvars = clocks | params | consts
    automata = {}
    while p.peek()[1] == "automaton":
        p.next()
        name = p.ident("automaton name")[1]
        if name in automata:
            raise p.error("automaton %r declared twice" % name)
        actions = set()
        if p.accept("actions"):
            p.expect(":")
            if p.peek()[1] != ";":
                actions.add(p.ident("action")[1])
                while p.accept(","):
                    actions.add(p.ident("action")[1])
            p.expect(";")
        locs, gotos = {}, []
        while p.peek()[1] in ("loc", "urgent", "accepting"):
            while p.peek()[1] in ("urgent", "accepting"):
                p.next()
            p.expect("loc")
            tok = p.ident("location name")
            if tok[1] in locs:
                raise p.error("location %r declared twice" % tok[1], tok)
            locs[tok[1]] = 0
            p.expect(":")
            p.expect("invariant")
            p.convex(allvars)
            if p.accept("stop"):
                p.expect("{")
                if p.peek()[1] != "}":
                    p.ident("clock")
                    while p.accept(","):
                        p.ident("clock")
                p.expect("}")
            while p.accept("when"):
                p.convex(allvars)
                if p.accept("sync"):
                    a = p.ident("action")
                    if a[1] not in actions:
                        raise p.error("undeclared action %r" % a[1], a)
                if p.accept("do"):
                    p.expect("{")
                    if p.peek()[1] != "}":
                        _update(p, clocks, allvars)
                        while p.accept(","):
                            _update(p, clocks, allvars)
                    p.expect("}")
                p.expect("goto")
                gotos.append(p.ident("location name"))
                p.expect(";")
                locs[tok[1]] += 1
        if not locs:
            raise p.error("automaton %r has no location" % name)
        for g in gotos:
            if g[1] not in locs:
                raise ImitatorSyntaxError("unknown location %r" % g[1], g[2], g[3])
        p.expect("end")
        automata[name] = set(locs)
    if not automata:
        raise p.error("no automaton declared")
    p.expect("init")
    p.expect(":=")
    p.expect("{")
    initial = {}
    p.expect("discrete")
    p.expect("=")
    while p.accept("loc"):
        p.expect("[")
        a = p.ident("automaton name")
        p.expect("]")
        p.expect(":=")
        l = p.ident("location name")
        if a[1] not in automata:
            raise ImitatorSyntaxError("unknown automaton %r" % a[1], a[2], a[3])
        if l[1] not in automata[a[1]]:
            raise ImitatorSyntaxError("unknown location %r" % l[1], l[2], l[3])
        if a[1] in initial:
            raise ImitatorSyntaxError("two initial locations for %r" % a[1], a[2], a[3])
        initial[a[1]] = l[1]
        p.expect(",")
    p.expect(";")
    p.expect("continuous")
    p.expect("=")
    while p.accept("&"):
        p.constraint(allvars)
    p.expect(";")
    p.expect("}")
    p.expect("end")
    if p.peek()[0] != "eof":
        raise p.error("trailing input after 'end'")
    for a in automata:
        if a not in initial:
            raise ImitatorSyntaxError("automaton %r has no initial location" % a)
    return {"clocks": clocks, "parameters": params, "automata": automata, "initial": initial}


def _update(p, clocks, allvars):
    tok = p.ident("clock")
    if tok[1] not in clocks:
        raise p.error("%r is not a clock" % tok[1], tok)
    p.expect(":=")
    p.linexpr(allvars)


def validate_property(text, model=None):
    """Check a .imiprop text (optionally against the summary of ``validate_model``)."""
    p = _Parser(text)
    p.expect("property")
    p.expect(":=")
    p.expect("#synth")
    op = p.ident("property operator")
    if op[1] not in UNARY | BINARY:
        raise p.error("unknown property %r" % op[1], op)
    p.expect("(")
    _state_pred(p, model)
    if op[1] in BINARY:
        p.expect(",")
        _state_pred(p, model)
    p.expect(")")
    p.expect(";")
    if p.peek()[0] != "eof":
        raise p.error("trailing input after the property")
    return {"operator": op[1]}


def _state_pred(p, model):
    _state_conj(p, model)
    while p.peek()[1] in ("or", "||"):
        p.next()
        _state_conj(p, model)


def _state_conj(p, model):
    _state_atom(p, model)
    while p.peek()[1] in ("and", "&", "&&"):
        p.next()
        _state_atom(p, model)


def _state_atom(p, model):
    if p.accept("not"):
        p.expect("(")
        _state_pred(p, model)
        p.expect(")")
        return
    if p.accept("("):
        _state_pred(p, model)
        p.expect(")")
        return
    if p.accept("True") or p.accept("False") or p.accept("accepting"):
        return
    p.expect("loc")
    p.expect("[")
    a = p.ident("automaton name")
    p.expect("]")
    p.expect("=")
    l = p.ident("location name")
    if model is not None:
        automata = model["automata"]
        if a[1] not in automata:
            raise ImitatorSyntaxError("unknown automaton %r" % a[1], a[2], a[3])
        if l[1] not in automata[a[1]]:
            raise ImitatorSyntaxError("unknown location %r" % l[1], l[2], l[3])
