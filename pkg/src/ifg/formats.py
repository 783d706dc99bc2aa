"""Text formats for grammars, automata, structures, and reports.

Grammar files hold one rule per line, terminated by a period:

    s(S) -> np(NP) vp(VP) { [[S],(l,NP),(r,VP)], [[NP],(n,X)], [[VP],(n,X)] }.
    v(V) -> [read] { [[V],(lex,read),(n,sg)] }.

Lowercase-initial identifiers are nonterminals, constants, or labels
depending on position; uppercase-initial identifiers are variables, which
are scoped to their rule; terminals sit in square brackets.  ``%`` starts
a comment, ``%start`` overrides the default start symbol (the first
rule's lhs) and ``%kind`` tags the grammar so emitted specialization and
interaction-free grammars can be reloaded.

Automaton files are ``;``-separated declarations:

    state q0 q1 ; start q0 ; final q1 ; arc q0 john q1 ;
"""

from __future__ import annotations

import json
from typing import Any

from .chart import Chart, InputFsa
from .constraints import Constant, Constraint, ConstraintSet, Variable
from .errors import FsaSyntaxError, GrammarSyntaxError, GrammarValidationError
from .grammar import (
    Grammar,
    GrammarKind,
    NontermCall,
    Rule,
    Terminal,
    Violation,
    validate_reference_grammar,
)
from .solutions import FeatureStructure

_WORD_CHARS = "_@'-"


def _tokenize(line: str, lineno: int) -> list[tuple[str, str, int]]:
    tokens = []
    i, n = 0, len(line)
    while i < n:
        ch = line[i]
        if ch.isspace():
            i += 1
            continue
        if ch == "-" and i + 1 < n and line[i + 1] == ">":
            tokens.append(("->", "->", i + 1))
            i += 2
            continue
        if ch in "()[]{},.":
            tokens.append((ch, ch, i + 1))
            i += 1
            continue
        if ch.isalnum() or ch in _WORD_CHARS:
            j = i
            while j < n:
                c = line[j]
                if c == "-" and j + 1 < n and line[j + 1] == ">":
                    break
                if c.isalnum() or c in _WORD_CHARS:
                    j += 1
                else:
                    break
            tokens.append(("WORD", line[i:j], i + 1))
            i = j
            continue
        raise GrammarSyntaxError(f"unexpected character {ch!r}", lineno, i + 1)
    return tokens


class _RuleParser:
    def __init__(self, tokens: list[tuple[str, str, int]], lineno: int):
        self.tokens = tokens
        self.lineno = lineno
        self.pos = 0
        self.vars: dict[str, Variable] = {}

    def error(self, message: str):
        col = self.tokens[self.pos][2] if self.pos < len(self.tokens) else (
            self.tokens[-1][2] if self.tokens else 1
        )
        raise GrammarSyntaxError(message, self.lineno, col)

    def peek(self) -> str | None:
        return self.tokens[self.pos][0] if self.pos < len(self.tokens) else None

    def take(self, kind: str, what: str) -> str:
        if self.peek() != kind:
            self.error(f"expected {what}")
        value = self.tokens[self.pos][1]
        self.pos += 1
        return value

    def name(self, what: str) -> str:
        word = self.take("WORD", what)
        if not word[0].islower():
            self.pos -= 1
            self.error(f"{what} must start with a lowercase letter")
        return word

    def variable(self) -> Variable:
        word = self.take("WORD", "a variable")
        if not word[0].isupper():
            self.pos -= 1
            self.error("a variable must start with an uppercase letter")
        return self.vars.setdefault(word, Variable(word))

    def term(self):
        word = self.take("WORD", "a term")
        if word[0].isupper():
            return self.vars.setdefault(word, Variable(word))
        if word[0].islower():
            return Constant(word)
        self.pos -= 1
        self.error("a term must be a variable or a constant")

    def symbol(self):
        if self.peek() == "[":
            self.take("[", "'['")
            token = self.take("WORD", "a terminal token")
            self.take("]", "']' after the terminal")
            return Terminal(token)
        name = self.name("a nonterminal")
        self.take("(", "'(' after the nonterminal")
        var = self.variable()
        self.take(")", "')'")
        return NontermCall(name, var)

    def constraint(self) -> Constraint:
        self.take("[", "'['")
        self.take("[", "'[['")
        ident = [self.term()]
        while self.peek() == ",":
            nxt = self.tokens[self.pos + 1][0] if self.pos + 1 < len(self.tokens) else None
            if nxt == "(":
                break
            self.take(",", "','")
            ident.append(self.term())
        self.take("]", "']' closing the identification set")
        access = []
        while self.peek() == ",":
            self.take(",", "','")
            self.take("(", "'('")
            label = self.name("an attribute label")
            self.take(",", "',' in the access pair")
            access.append((label, self.term()))
            self.take(")", "')'")
        self.take("]", "']' closing the constraint")
        return Constraint(tuple(ident), tuple(access))

    def rule(self, rule_id: str) -> Rule:
        lhs_name = self.name("a nonterminal")
        self.take("(", "'(' after the lhs nonterminal")
        lhs_var = self.variable()
        self.take(")", "')'")
        self.take("->", "'->'")
        rhs = [self.symbol()]
        while self.peek() not in ("{", ".", None):
            rhs.append(self.symbol())
        constraints = ConstraintSet()
        if self.peek() == "{":
            self.take("{", "'{'")
            if self.peek() == "WORD" and self.tokens[self.pos][1] == "TOP":
                self.pos += 1
                constraints = ConstraintSet(top=True)
            elif self.peek() != "}":
                items = [self.constraint()]
                while self.peek() == ",":
                    self.take(",", "','")
                    items.append(self.constraint())
                constraints = ConstraintSet(tuple(items))
            self.take("}", "'}'")
        self.take(".", "'.' terminating the rule")
        if self.peek() is not None:
            self.error("unexpected input after the rule terminator")
        return Rule(rule_id, lhs_name, lhs_var, tuple(rhs), constraints)


_KINDS = {k.value: k for k in GrammarKind}


def parse_grammar_file(text: str) -> Grammar:
    """Parse grammar text; reference grammars are validated on the way in.

    Raises GrammarSyntaxError with a location for malformed input and
    GrammarValidationError carrying the violation report when a reference
    grammar breaks the binary/lexical shape rules.
    """
    rules: list[Rule] = []
    start: str | None = None
    kind = GrammarKind.REFERENCE
    lineno = 0
    for lineno, raw in enumerate(text.splitlines(), 1):
        stripped = raw.strip()
        if stripped.startswith("%start") or stripped.startswith("%kind"):
            parts = stripped.split()
            if len(parts) != 2:
                raise GrammarSyntaxError(f"{parts[0]} expects exactly one argument", lineno, 1)
            if parts[0] == "%start":
                start = parts[1]
            else:
                if parts[1] not in _KINDS:
                    raise GrammarSyntaxError(f"unknown grammar kind {parts[1]!r}", lineno, 1)
                kind = _KINDS[parts[1]]
            continue
        line = raw.split("%", 1)[0]
        if not line.strip():
            continue
        tokens = _tokenize(line, lineno)
        rules.append(_RuleParser(tokens, lineno).rule(f"r{len(rules) + 1}"))
    if not rules:
        raise GrammarSyntaxError("no rules", max(lineno, 1), 1)
    g = Grammar(tuple(rules), start or rules[0].lhs_name, kind)
    if kind is GrammarKind.REFERENCE:
        report = validate_reference_grammar(g)
        if report:
            raise GrammarValidationError(report)
    return g


def parse_fsa_file(text: str) -> InputFsa:
    """Parse an automaton file into an InputFsa.

    State names are mapped to dense integers in declaration order.
    Acyclicity is not enforced here; callers decide what cycles mean.
    """
    decls: list[tuple[int, list[str]]] = []
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("%", 1)[0]
        for chunk in line.split(";"):
            parts = chunk.split()
            if parts:
                decls.append((lineno, parts))
    order: dict[str, int] = {}
    start: int | None = None
    finals: list[int] = []
    transitions: list[tuple[int, str, int]] = []

    def state_of(name: str, lineno: int) -> int:
        if name not in order:
            raise FsaSyntaxError(f"undeclared state {name!r}", lineno)
        return order[name]

    for lineno, parts in decls:
        kw, args = parts[0], parts[1:]
        if kw == "state":
            if not args:
                raise FsaSyntaxError("state declaration names no states", lineno)
            for name in args:
                order.setdefault(name, len(order))
        elif kw == "start":
            if len(args) != 1:
                raise FsaSyntaxError("start expects exactly one state", lineno)
            start = state_of(args[0], lineno)
        elif kw == "final":
            if not args:
                raise FsaSyntaxError("final declaration names no states", lineno)
            finals.extend(state_of(a, lineno) for a in args)
        elif kw == "arc":
            if len(args) != 3:
                raise FsaSyntaxError("arc expects: arc <from> <token> <to>", lineno)
            transitions.append((state_of(args[0], lineno), args[1], state_of(args[2], lineno)))
        else:
            raise FsaSyntaxError(f"unknown declaration {kw!r}", lineno)
    if start is None:
        raise FsaSyntaxError("missing start declaration", max(len(text.splitlines()), 1))
    if not finals:
        raise FsaSyntaxError("missing final declaration", max(len(text.splitlines()), 1))
    return InputFsa(
        states=frozenset(range(len(order))),
        transitions=frozenset(transitions),
        start=start,
        finals=frozenset(finals),
    )


def _variable_spellings(rule: Rule) -> dict[Variable, str]:
    """Deterministic, collision-free spellings for one rule's variables."""
    names: dict[Variable, str] = {}
    taken: set[str] = set()
    for v in rule.variables():
        candidate, k = v.base, 1
        while candidate in taken:
            k += 1
            candidate = f"{v.base}_{k}"
        taken.add(candidate)
        names[v] = candidate
    return names


def _term_str(t, names: dict[Variable, str]) -> str:
    return names[t] if isinstance(t, Variable) else t.name


def _constraint_str(c: Constraint, names: dict[Variable, str]) -> str:
    parts = ["[" + ",".join(_term_str(t, names) for t in c.ident) + "]"]
    parts.extend(f"({l},{_term_str(t, names)})" for l, t in c.access)
    return "[" + ",".join(parts) + "]"


def format_rule(rule: Rule) -> str:
    names = _variable_spellings(rule)
    symbols = []
    for s in rule.rhs:
        if isinstance(s, Terminal):
            symbols.append(f"[{s.token}]")
        else:
            symbols.append(f"{s.name}({names[s.var]})")
    head = f"{rule.lhs_name}({names[rule.lhs_var]}) -> {' '.join(symbols)}"
    cs = rule.constraints
    if cs.top:
        return f"{head} {{ TOP }}."
    if len(cs) == 0:
        return f"{head}."
    body = ", ".join(_constraint_str(c, names) for c in cs)
    return f"{head} {{ {body} }}."


def format_grammar(g: Grammar) -> str:
    lines = [f"%kind {g.kind.value}", f"%start {g.start}"]
    lines.extend(format_rule(r) for r in g.rules)
    return "\n".join(lines) + "\n"


def format_structure(fs: FeatureStructure) -> str:
    """Render a structure with ``#n`` tags on non-atomic nodes.

    Atoms print inline; a node already printed reappears as a bare tag,
    which also keeps cyclic structures finite on the page.
    """
    tags: dict = {}

    def rend(node) -> str:
        atom = fs.atom(node)
        if atom is not None:
            return atom.name
        if node in tags:
            return f"#{tags[node]}"
        tags[node] = len(tags)
        tag = tags[node]
        inner = " ".join(f"{l}:{rend(t)}" for l, t in fs.successors(node))
        return f"#{tag}{{{inner}}}"

    return rend(fs.root)


def format_chart(chart: Chart) -> str:
    lines = [
        f"chart: {len(chart)} edges over {len(chart.fsa.states)} states",
        "accepting: " + (" ".join(e.composite_name for e in chart.accepting_edges()) or "(none)"),
    ]
    for e in chart.edges():
        lines.append(f"{e.composite_name}: {len(e.derivations)} derivation(s)")
    return "\n".join(lines) + "\n"


def _constraints_json(cs: ConstraintSet, names: dict[Variable, str]):
    if cs.top:
        return "TOP"
    return [
        {
            "ident": [_term_str(t, names) for t in c.ident],
            "access": [[l, _term_str(t, names)] for l, t in c.access],
        }
        for c in cs
    ]


def _grammar_json(g: Grammar) -> dict:
    rules = []
    for r in g.rules:
        names = _variable_spellings(r)
        rhs = []
        for s in r.rhs:
            if isinstance(s, Terminal):
                rhs.append({"terminal": s.token})
            else:
                rhs.append({"nonterminal": s.name, "var": names[s.var]})
        prov = None
        if r.provenance is not None:
            prov = {
                k: v
                for k, v in (
                    ("parent", r.provenance.parent),
                    ("definer", r.provenance.definer),
                    ("source", r.provenance.source),
                )
                if v is not None
            }
        rules.append(
            {
                "id": r.id,
                "lhs": r.lhs_name,
                "lhsVar": names[r.lhs_var],
                "rhs": rhs,
                "constraints": _constraints_json(r.constraints, names),
                "provenance": prov,
            }
        )
    return {"kind": g.kind.value, "start": g.start, "rules": rules}


def _structure_json(fs: FeatureStructure) -> dict:
    return {
        "nodes": fs.ordered_nodes(),
        "root": fs.root,
        "atoms": {str(n): a.name for n, a in fs.atoms.items()},
        "edges": [[src, label, dst] for src, label, dst in fs.edges()],
    }


def _chart_json(chart: Chart) -> dict:
    return {
        "edges": [
            {
                "name": e.composite_name,
                "from": e.src,
                "to": e.dst,
                "derivations": len(e.derivations),
            }
            for e in chart.edges()
        ],
        "accepting": [e.composite_name for e in chart.accepting_edges()],
    }


def _violations_json(report: list[Violation]) -> dict:
    return {
        "violations": [
            {"code": v.code, "rule": v.rule_id, "message": v.message} for v in report
        ]
    }


def emit(artifact: Any, format: str = "text") -> bytes:
    """Serialize an artifact deterministically as UTF-8 bytes.

    Grammars round-trip through ``parse_grammar_file`` up to variable
    renaming.  Supported artifacts: Grammar, FeatureStructure (and lists
    of them), Chart, ConstraintSet, validation reports, and plain dicts
    for statistics.
    """
    if format not in ("text", "json"):
        raise ValueError(f"unknown format {format!r}")
    if format == "json":
        return (json.dumps(_json_obj(artifact), indent=2) + "\n").encode("utf-8")
    return _text(artifact).encode("utf-8")


def _text(artifact: Any) -> str:
    if isinstance(artifact, Grammar):
        return format_grammar(artifact)
    if isinstance(artifact, FeatureStructure):
        return format_structure(artifact) + "\n"
    if isinstance(artifact, Chart):
        return format_chart(artifact)
    if isinstance(artifact, ConstraintSet):
        if artifact.top:
            return "TOP\n"
        names = {v: str(v) for v in artifact.variables()}
        return ", ".join(_constraint_str(c, names) for c in artifact) + "\n"
    if isinstance(artifact, (list, tuple)):
        if all(isinstance(x, FeatureStructure) for x in artifact):
            return "".join(format_structure(x) + "\n" for x in artifact)
        if all(isinstance(x, Violation) for x in artifact):
            return "".join(str(v) + "\n" for v in artifact)
    if isinstance(artifact, dict):
        return "".join(f"{k}={v}\n" for k, v in artifact.items())
    raise TypeError(f"cannot emit {type(artifact).__name__}")


def _json_obj(artifact: Any):
    if isinstance(artifact, Grammar):
        return _grammar_json(artifact)
    if isinstance(artifact, FeatureStructure):
        return _structure_json(artifact)
    if isinstance(artifact, Chart):
        return _chart_json(artifact)
    if isinstance(artifact, ConstraintSet):
        if artifact.top:
            return "TOP"
        names = {v: str(v) for v in artifact.variables()}
        return _constraints_json(artifact, names)
    if isinstance(artifact, (list, tuple)):
        if all(isinstance(x, FeatureStructure) for x in artifact):
            return {"structures": [_structure_json(x) for x in artifact]}
        if all(isinstance(x, Violation) for x in artifact):
            return _violations_json(list(artifact))
    if isinstance(artifact, dict):
        return artifact
    raise TypeError(f"cannot emit {type(artifact).__name__}")
