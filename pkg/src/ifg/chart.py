"""Chart construction over strings and word lattices.

The chart is built bottom-up over the states of an input automaton, so a
plain string is just the linear automaton over its tokens.  Each edge
records every combination of daughters that produced it; reading edges as
nonterminals and combinations as rules yields the specialization grammar,
which generates exactly the parses of the input and carries a fresh copy
of the source rule's constraints on every rule instance.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass, field

from .constraints import NameSupply
from .errors import (
    CyclicGrammarError,
    CyclicSpecializationError,
    GrammarValidationError,
    NoParseError,
)
from .grammar import (
    Grammar,
    GrammarKind,
    NontermCall,
    Provenance,
    Rule,
    Terminal,
    fresh_rename,
    rule_dependency_order,
    validate_reference_grammar,
)


@dataclass(frozen=True)
class InputFsa:
    """A finite-state automaton over surface tokens.

    States are dense integers.  The transition graph may contain cycles;
    chart construction stays finite either way, but a cyclic chart is
    rejected later by the transformation stage.
    """

    states: frozenset[int]
    transitions: frozenset[tuple[int, str, int]]
    start: int
    finals: frozenset[int]

    def __post_init__(self):
        object.__setattr__(self, "states", frozenset(self.states))
        object.__setattr__(self, "transitions", frozenset(self.transitions))
        object.__setattr__(self, "finals", frozenset(self.finals))
        if self.start not in self.states:
            raise ValueError(f"start state {self.start} is not declared")
        if not self.finals:
            raise ValueError("at least one final state is required")
        for p, _, q in self.transitions:
            if p not in self.states or q not in self.states:
                raise ValueError(f"transition endpoint {p} -> {q} is not declared")
        if not self.finals <= self.states:
            missing = sorted(self.finals - self.states)
            raise ValueError(f"final state {missing[0]} is not declared")

    def find_cycle(self) -> tuple[int, ...] | None:
        """A cycle through the transition graph, or None if acyclic."""
        succ: dict[int, list[int]] = {s: [] for s in self.states}
        for p, _, q in sorted(self.transitions):
            succ[p].append(q)
        color = {s: 0 for s in self.states}
        path: list[int] = []

        def visit(start: int) -> tuple[int, ...] | None:
            stack = [(start, 0)]
            while stack:
                node, i = stack.pop()
                if i == 0:
                    if color[node] == 2:
                        continue
                    color[node] = 1
                    path.append(node)
                if i < len(succ[node]):
                    stack.append((node, i + 1))
                    nxt = succ[node][i]
                    if color[nxt] == 1:
                        return tuple(path[path.index(nxt):])
                    if color[nxt] == 0:
                        stack.append((nxt, 0))
                else:
                    color[node] = 2
                    path.pop()
            return None

        for s in sorted(self.states):
            if color[s] == 0:
                cycle = visit(s)
                if cycle is not None:
                    return cycle
        return None

    def is_acyclic(self) -> bool:
        return self.find_cycle() is None


def string_to_fsa(tokens) -> InputFsa:
    """The linear automaton accepting exactly the given token sequence."""
    tokens = list(tokens)
    n = len(tokens)
    return InputFsa(
        states=frozenset(range(n + 1)),
        transitions=frozenset((i, tok, i + 1) for i, tok in enumerate(tokens)),
        start=0,
        finals=frozenset({n}),
    )


@dataclass(frozen=True)
class LexicalDerivation:
    rule: Rule
    token: str


@dataclass(frozen=True)
class BinaryDerivation:
    rule: Rule
    left: "Edge"
    right: "Edge"


@dataclass(eq=False)
class Edge:
    """One chart edge: a nonterminal covering a span of the automaton."""

    name: str
    src: int
    dst: int
    derivations: list = field(default_factory=list)
    _seen: set = field(default_factory=set, repr=False)

    @property
    def key(self) -> tuple[str, int, int]:
        return (self.name, self.src, self.dst)

    @property
    def composite_name(self) -> str:
        return f"{self.name}@{self.src}-{self.dst}"

    def __str__(self) -> str:
        return self.composite_name


class Chart:
    """The set of edges found for a backbone grammar over an automaton."""

    def __init__(self, backbone: Grammar, fsa: InputFsa):
        self.backbone = backbone
        self.fsa = fsa
        self._edges: dict[tuple[str, int, int], Edge] = {}

    def edges(self) -> list[Edge]:
        """All edges, in discovery order."""
        return list(self._edges.values())

    def edge(self, name: str, src: int, dst: int) -> Edge | None:
        return self._edges.get((name, src, dst))

    def accepting_edges(self) -> list[Edge]:
        """Start-symbol edges from the automaton start to a final state."""
        out = []
        for f in sorted(self.fsa.finals):
            e = self._edges.get((self.backbone.start, self.fsa.start, f))
            if e is not None:
                out.append(e)
        return out

    def recognizes(self) -> bool:
        return bool(self.accepting_edges())

    def derivation_count(self) -> int:
        """Number of complete parse trees below the accepting edges."""
        memo: dict[tuple[str, int, int], int] = {}
        on_path: set[tuple[str, int, int]] = set()

        def count(e: Edge) -> int:
            if e.key in memo:
                return memo[e.key]
            if e.key in on_path:
                raise CyclicGrammarError("chart is cyclic", [e.composite_name])
            on_path.add(e.key)
            total = 0
            for d in e.derivations:
                if isinstance(d, LexicalDerivation):
                    total += 1
                else:
                    total += count(d.left) * count(d.right)
            on_path.discard(e.key)
            memo[e.key] = total
            return total

        return sum(count(e) for e in self.accepting_edges())

    def __len__(self) -> int:
        return len(self._edges)


def build_backbone_chart(backbone: Grammar, fsa: InputFsa) -> Chart:
    """Bottom-up chart construction over the automaton's states.

    An edge (a, p, q) exists iff nonterminal a derives some token string
    labeling a path from p to q; every justifying combination of rule and
    daughter edges is recorded on the edge.  Works for cyclic automata too
    since the number of (rule, states) combinations is finite.
    """
    violations = validate_reference_grammar(backbone)
    if violations:
        raise GrammarValidationError(violations)

    lexical: dict[str, list[Rule]] = {}
    by_left: dict[str, list[tuple[Rule, str]]] = {}
    by_right: dict[str, list[tuple[Rule, str]]] = {}
    for r in backbone.rules:
        if len(r.rhs) == 1:
            lexical.setdefault(r.rhs[0].token, []).append(r)
        else:
            b, c = r.rhs[0].name, r.rhs[1].name
            by_left.setdefault(b, []).append((r, c))
            by_right.setdefault(c, []).append((r, b))

    chart = Chart(backbone, fsa)
    edges = chart._edges
    by_src: dict[tuple[str, int], list[Edge]] = {}
    by_dst: dict[tuple[str, int], list[Edge]] = {}
    agenda: deque[Edge] = deque()

    def get_edge(name: str, p: int, q: int) -> Edge:
        key = (name, p, q)
        e = edges.get(key)
        if e is None:
            e = Edge(name, p, q)
            edges[key] = e
            by_src.setdefault((name, p), []).append(e)
            by_dst.setdefault((name, q), []).append(e)
            agenda.append(e)
        return e

    def combine(rule: Rule, left: Edge, right: Edge) -> None:
        mother = get_edge(rule.lhs_name, left.src, right.dst)
        sig = (rule.id, left.key, right.key)
        if sig not in mother._seen:
            mother._seen.add(sig)
            mother.derivations.append(BinaryDerivation(rule, left, right))

    for p, token, q in sorted(fsa.transitions):
        for r in lexical.get(token, ()):
            e = get_edge(r.lhs_name, p, q)
            sig = (r.id, token)
            if sig not in e._seen:
                e._seen.add(sig)
                e.derivations.append(LexicalDerivation(r, token))

    while agenda:
        e = agenda.popleft()
        for rule, cname in by_left.get(e.name, ()):
            for right in list(by_src.get((cname, e.dst), ())):
                combine(rule, e, right)
        for rule, bname in by_right.get(e.name, ()):
            for left in list(by_dst.get((bname, e.src), ())):
                combine(rule, left, e)
    return chart


def check_acyclic(subject) -> tuple[bool, tuple[str, ...] | None]:
    """Whether a chart's derivation graph or a grammar's call graph is acyclic.

    Returns (True, None) or (False, witness) where the witness is a cycle
    as a sequence of nonterminal names.
    """
    if isinstance(subject, Grammar):
        dep = rule_dependency_order(subject)
        return (dep.cycle is None, dep.cycle)
    if not isinstance(subject, Chart):
        raise TypeError(f"expected Chart or Grammar, got {type(subject).__name__}")

    chart = subject
    color: dict[tuple[str, int, int], int] = {}
    path: list[Edge] = []

    def daughters(e: Edge) -> list[Edge]:
        out = []
        for d in e.derivations:
            if isinstance(d, BinaryDerivation):
                out.append(d.left)
                out.append(d.right)
        return out

    def visit(start: Edge):
        stack = [(start, 0)]
        while stack:
            node, i = stack.pop()
            succ = daughters(node)
            if i == 0:
                if color.get(node.key, 0) == 2:
                    continue
                color[node.key] = 1
                path.append(node)
            if i < len(succ):
                stack.append((node, i + 1))
                nxt = succ[i]
                state = color.get(nxt.key, 0)
                if state == 1:
                    names = [p.composite_name for p in path]
                    return tuple(names[[p.key for p in path].index(nxt.key):])
                if state == 0:
                    stack.append((nxt, 0))
            else:
                color[node.key] = 2
                path.pop()
        return None

    for e in chart.edges():
        if color.get(e.key, 0) == 0:
            cycle = visit(e)
            if cycle is not None:
                return (False, cycle)
    return (True, None)


def specialize(g: Grammar, fsa: InputFsa) -> Grammar:
    """Read the chart as a grammar carrying the unification constraints.

    One rule is emitted per (edge, derivation) pair; nonterminal names are
    ``name@from-to`` composites and every rule gets a fresh-variable copy
    of its source rule's constraint set.  Raises NoParseError when no
    accepting edge exists and CyclicSpecializationError (with the built
    grammar attached) when the chart is cyclic.
    """
    chart = build_backbone_chart(g, fsa)
    return specialize_chart(chart)


def specialize_chart(chart: Chart) -> Grammar:
    """Like ``specialize`` but reuses an already-built chart."""
    accepting = chart.accepting_edges()
    if not accepting:
        raise NoParseError("the input is not accepted by the backbone grammar")

    supply = NameSupply()
    rules: list[Rule] = []
    counter = 0

    def emit(lhs_name: str, derivation, source: Rule) -> None:
        nonlocal counter
        counter += 1
        inst = fresh_rename(source, supply)
        if isinstance(derivation, LexicalDerivation):
            rhs: tuple = (Terminal(derivation.token),)
        else:
            rhs = (
                NontermCall(derivation.left.composite_name, inst.rhs[0].var),
                NontermCall(derivation.right.composite_name, inst.rhs[1].var),
            )
        rules.append(
            Rule(
                id=f"e{counter}",
                lhs_name=lhs_name,
                lhs_var=inst.lhs_var,
                rhs=rhs,
                constraints=inst.constraints,
                provenance=Provenance(source=source.id),
            )
        )

    for edge in chart.edges():
        for d in edge.derivations:
            emit(edge.composite_name, d, d.rule)

    if len(accepting) == 1:
        start = accepting[0].composite_name
    else:
        # Several accepting edges: copy each of their rules under a
        # synthetic root so the grammar keeps a single start symbol
        # without introducing chain productions.
        start = "root"
        for edge in accepting:
            for d in edge.derivations:
                emit(start, d, d.rule)

    ok, witness = check_acyclic(chart)
    grammar = Grammar(tuple(rules), start, GrammarKind.SPECIALIZATION, cyclic=not ok)
    if not ok:
        raise CyclicSpecializationError(
            "the specialization grammar is cyclic and cannot be made interaction-free",
            witness=witness,
            grammar=grammar,
        )
    return grammar
