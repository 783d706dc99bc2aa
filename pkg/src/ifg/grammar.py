"""Rules and grammars over a context-free backbone.

A rule pairs a context-free production with a constraint set relating the
argument variables of its nonterminals: ``a(A) -> b(B) c(C)`` plus
constraints over A, B, C.  Grammars come in three kinds: ``reference``
grammars are user-written and restricted to binary or lexical rules;
``specialization`` grammars are charts read as grammars; and
``interaction-free`` grammars are the output of the transformation and
support backtrack-free enumeration.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field, replace
from functools import cached_property
from typing import Iterable, Union

from .constraints import (
    Constant,
    Constraint,
    ConstraintSet,
    EMPTY,
    NameSupply,
    Variable,
)
from .errors import CyclicGrammarError


@dataclass(frozen=True, slots=True)
class Terminal:
    """A surface token on a rule's right-hand side."""

    token: str

    def __str__(self) -> str:
        return f"[{self.token}]"

    def __repr__(self) -> str:
        return str(self)


@dataclass(frozen=True, slots=True)
class NontermCall:
    """A nonterminal occurrence with its argument variable."""

    name: str
    var: Variable

    def __str__(self) -> str:
        return f"{self.name}({self.var})"

    def __repr__(self) -> str:
        return str(self)


Symbol = Union[Terminal, NontermCall]


class GrammarKind(enum.Enum):
    REFERENCE = "reference"
    SPECIALIZATION = "specialization"
    INTERACTION_FREE = "interaction-free"


@dataclass(frozen=True, slots=True)
class Provenance:
    """Where a derived rule came from.

    ``source`` names the reference rule a specialization rule instantiates;
    ``parent`` and ``definer`` name the expanded rule and the inlined rule
    for rules produced by partial evaluation.
    """

    parent: str | None = None
    definer: str | None = None
    source: str | None = None


@dataclass(frozen=True)
class Rule:
    """One grammar rule: lhs nonterminal, rhs symbols, constraint set."""

    id: str
    lhs_name: str
    lhs_var: Variable
    rhs: tuple[Symbol, ...]
    constraints: ConstraintSet = EMPTY
    provenance: Provenance | None = None

    def __post_init__(self):
        object.__setattr__(self, "rhs", tuple(self.rhs))

    @property
    def calls(self) -> tuple[NontermCall, ...]:
        return tuple(s for s in self.rhs if isinstance(s, NontermCall))

    @property
    def arg_vars(self) -> tuple[Variable, ...]:
        return tuple(c.var for c in self.calls)

    def variables(self) -> list[Variable]:
        """All variables of the rule in document order, no duplicates."""
        out = [self.lhs_var]
        seen = {self.lhs_var}
        for c in self.calls:
            if c.var not in seen:
                seen.add(c.var)
                out.append(c.var)
        for v in self.constraints.variables():
            if v not in seen:
                seen.add(v)
                out.append(v)
        return out

    def __str__(self) -> str:
        rhs = " ".join(str(s) for s in self.rhs)
        if self.constraints.top:
            return f"{self.lhs_name}({self.lhs_var}) -> {rhs} {{ TOP }}"
        if len(self.constraints) > 0:
            body = ", ".join(str(c) for c in self.constraints)
            return f"{self.lhs_name}({self.lhs_var}) -> {rhs} {{ {body} }}"
        return f"{self.lhs_name}({self.lhs_var}) -> {rhs}"


@dataclass(frozen=True)
class Grammar:
    """An ordered list of rules with a start symbol and a kind tag."""

    rules: tuple[Rule, ...]
    start: str
    kind: GrammarKind = GrammarKind.REFERENCE
    cyclic: bool = False

    def __post_init__(self):
        object.__setattr__(self, "rules", tuple(self.rules))
        ids = [r.id for r in self.rules]
        if len(set(ids)) != len(ids):
            dup = sorted({i for i in ids if ids.count(i) > 1})
            raise ValueError(f"duplicate rule ids: {', '.join(dup)}")

    @cached_property
    def _by_name(self) -> dict[str, tuple[Rule, ...]]:
        out: dict[str, list[Rule]] = {}
        for r in self.rules:
            out.setdefault(r.lhs_name, []).append(r)
        return {k: tuple(v) for k, v in out.items()}

    @cached_property
    def _by_id(self) -> dict[str, Rule]:
        return {r.id: r for r in self.rules}

    def rules_for(self, name: str) -> tuple[Rule, ...]:
        return self._by_name.get(name, ())

    def rule(self, rule_id: str) -> Rule:
        try:
            return self._by_id[rule_id]
        except KeyError:
            raise KeyError(f"no rule with id {rule_id!r}") from None

    def nonterminals(self) -> list[str]:
        """Defined nonterminal names, in first-definition order."""
        return list(self._by_name)

    def called_names(self) -> list[str]:
        out: list[str] = []
        seen = set()
        for r in self.rules:
            for c in r.calls:
                if c.name not in seen:
                    seen.add(c.name)
                    out.append(c.name)
        return out

    def with_rule_replaced(self, rule_id: str, new_rules: Iterable[Rule]) -> Grammar:
        """The same grammar with one rule spliced out and replaced in place."""
        new_rules = tuple(new_rules)
        rules: list[Rule] = []
        found = False
        for r in self.rules:
            if r.id == rule_id:
                rules.extend(new_rules)
                found = True
            else:
                rules.append(r)
        if not found:
            raise KeyError(f"no rule with id {rule_id!r}")
        return replace(self, rules=tuple(rules))

    def __str__(self) -> str:
        head = f"%% {self.kind.value} grammar, start = {self.start}"
        return "\n".join([head] + [str(r) for r in self.rules])


@dataclass(frozen=True, slots=True)
class Violation:
    """One validation finding; violations are data, not failures."""

    code: str
    rule_id: str | None
    message: str

    def __str__(self) -> str:
        where = f" (rule {self.rule_id})" if self.rule_id else ""
        return f"{self.code}{where}: {self.message}"


def validate_reference_grammar(g: Grammar) -> list[Violation]:
    """Check the shape required of user-written grammars.

    Every rule must be binary (exactly two nonterminal calls) or lexical
    (exactly one terminal); chain and empty productions are rejected, the
    start symbol must be defined, and within each rule the argument
    variables of distinct calls must be distinct from each other and from
    the lhs variable.  An empty report means the grammar is valid.
    """
    report: list[Violation] = []
    for r in g.rules:
        calls = r.calls
        terminals = [s for s in r.rhs if isinstance(s, Terminal)]
        if len(r.rhs) == 0:
            report.append(Violation("empty-production", r.id, "empty right-hand side"))
        elif len(r.rhs) == 1 and len(calls) == 1:
            report.append(
                Violation("chain-production", r.id, f"unary expansion to {calls[0].name}")
            )
        elif not (
            (len(r.rhs) == 2 and len(calls) == 2)
            or (len(r.rhs) == 1 and len(terminals) == 1)
        ):
            report.append(
                Violation(
                    "invalid-rhs",
                    r.id,
                    "right-hand side must be two nonterminals or one terminal",
                )
            )
        args = list(r.arg_vars)
        if len(set(args)) != len(args):
            report.append(
                Violation("duplicate-argument", r.id, "nonterminal arguments must be distinct")
            )
        if r.lhs_var in args:
            report.append(
                Violation(
                    "lhs-argument-reused",
                    r.id,
                    f"lhs variable {r.lhs_var} reused as a rhs argument",
                )
            )
    if not g.rules_for(g.start):
        report.append(Violation("missing-start", None, f"start symbol {g.start!r} has no rule"))
    return report


def fresh_rename(rule: Rule, supply: NameSupply | None = None) -> Rule:
    """A copy of ``rule`` with every variable consistently renamed fresh.

    The supply must only hand out identifiers never used before; passing
    None uses a throwaway supply, which is only safe when the result never
    meets other renamed rules.
    """
    if supply is None:
        supply = NameSupply()
    mapping: dict[Variable, Variable] = {}

    def rename(v: Variable) -> Variable:
        if v not in mapping:
            mapping[v] = supply.fresh(v.base)
        return mapping[v]

    def rename_term(t):
        return rename(t) if isinstance(t, Variable) else t

    lhs_var = rename(rule.lhs_var)
    rhs = tuple(
        NontermCall(s.name, rename(s.var)) if isinstance(s, NontermCall) else s
        for s in rule.rhs
    )
    if rule.constraints.top:
        cs = rule.constraints
    else:
        cs = ConstraintSet(
            tuple(
                Constraint(
                    tuple(rename_term(t) for t in c.ident),
                    tuple((l, rename_term(t)) for l, t in c.access),
                )
                for c in rule.constraints
            )
        )
    return Rule(rule.id, rule.lhs_name, lhs_var, rhs, cs, rule.provenance)


@dataclass(frozen=True)
class DependencyOrder:
    """Result of ordering nonterminals so callees precede callers.

    Exactly one of ``order`` and ``cycle`` is set.  ``order`` lists every
    nonterminal (including called but undefined ones) with each name
    preceding all names that call it; ``cycle`` is a witness path.
    """

    order: tuple[str, ...] | None = None
    cycle: tuple[str, ...] | None = None

    @property
    def is_acyclic(self) -> bool:
        return self.cycle is None


def rule_dependency_order(g: Grammar) -> DependencyOrder:
    """Topologically order nonterminal names, lowest first.

    The graph has an edge from each lhs name to each name called on its
    rhs.  If the graph is acyclic the returned order places every
    nonterminal before all of its callers; otherwise a cycle witness is
    returned instead.
    """
    graph: dict[str, list[str]] = {}
    for r in g.rules:
        succ = graph.setdefault(r.lhs_name, [])
        for c in r.calls:
            if c.name not in succ:
                succ.append(c.name)
            graph.setdefault(c.name, [])

    WHITE, GRAY, BLACK = 0, 1, 2
    color = {n: WHITE for n in graph}
    order: list[str] = []
    path: list[str] = []

    def visit(start: str) -> tuple[str, ...] | None:
        # Iterative DFS; postorder emits callees before callers.
        stack: list[tuple[str, int]] = [(start, 0)]
        while stack:
            node, i = stack.pop()
            if i == 0:
                if color[node] == BLACK:
                    continue
                color[node] = GRAY
                path.append(node)
            succ = graph[node]
            if i < len(succ):
                stack.append((node, i + 1))
                nxt = succ[i]
                if color[nxt] == GRAY:
                    return tuple(path[path.index(nxt):])
                if color[nxt] == WHITE:
                    stack.append((nxt, 0))
            else:
                color[node] = BLACK
                path.pop()
                order.append(node)
        return None

    for name in graph:
        if color[name] == WHITE:
            cycle = visit(name)
            if cycle is not None:
                return DependencyOrder(cycle=cycle)
    return DependencyOrder(order=tuple(order))


def rules_in_dependency_order(g: Grammar) -> list[Rule]:
    """All rules sorted lowest-first.

    Rules of a lower nonterminal precede rules of a higher one; within a
    nonterminal, definition order breaks the tie.  Raises
    CyclicGrammarError when the call graph is cyclic.
    """
    dep = rule_dependency_order(g)
    if dep.cycle is not None:
        raise CyclicGrammarError("grammar call graph is cyclic", dep.cycle)
    position = {name: i for i, name in enumerate(dep.order)}
    indexed = list(enumerate(g.rules))
    indexed.sort(key=lambda pair: (position[pair[1].lhs_name], pair[0]))
    return [r for _, r in indexed]


def pure_derivation_grammar(g: Grammar, supply: NameSupply | None = None) -> Grammar:
    """Replace each rule's constraints with derivation-recording ones.

    Binary rules get ``[[A],(l,B),(r,C)]`` and lexical rules
    ``[[A],(lex,t)]``, so the solutions of the result encode exactly the
    parse trees of the backbone.  Rule shapes must already be binary or
    lexical.
    """
    if supply is None:
        supply = NameSupply()
    rules = []
    for r in g.rules:
        lhs = supply.fresh(r.lhs_var.base)
        if len(r.rhs) == 2 and len(r.calls) == 2:
            b, c = r.rhs
            bv = supply.fresh(b.var.base)
            cv = supply.fresh(c.var.base)
            cs = ConstraintSet((Constraint((lhs,), (("l", bv), ("r", cv))),))
            rules.append(
                Rule(r.id, r.lhs_name, lhs, (NontermCall(b.name, bv), NontermCall(c.name, cv)), cs)
            )
        elif len(r.rhs) == 1 and isinstance(r.rhs[0], Terminal):
            token = r.rhs[0].token
            cs = ConstraintSet((Constraint((lhs,), (("lex", Constant(token)),)),))
            rules.append(Rule(r.id, r.lhs_name, lhs, r.rhs, cs))
        else:
            raise ValueError(f"rule {r.id} is neither binary nor lexical")
    return Grammar(tuple(rules), g.start, g.kind)


def rule_alpha_equivalent(a: Rule, b: Rule) -> bool:
    """True iff the rules are identical up to a bijective variable renaming.

    Rule ids and provenance are ignored; names, terminals, constants, and
    the order of symbols and constraints must all match.
    """
    fwd: dict[Variable, Variable] = {}
    bwd: dict[Variable, Variable] = {}

    def match_var(x: Variable, y: Variable) -> bool:
        if fwd.get(x, y) != y or bwd.get(y, x) != x:
            return False
        fwd[x] = y
        bwd[y] = x
        return True

    def match_term(x, y) -> bool:
        if isinstance(x, Constant) or isinstance(y, Constant):
            return x == y
        return match_var(x, y)

    if a.lhs_name != b.lhs_name or len(a.rhs) != len(b.rhs):
        return False
    if not match_var(a.lhs_var, b.lhs_var):
        return False
    for sa, sb in zip(a.rhs, b.rhs):
        if isinstance(sa, Terminal) or isinstance(sb, Terminal):
            if sa != sb:
                return False
        elif sa.name != sb.name or not match_var(sa.var, sb.var):
            return False
    ca, cb = a.constraints, b.constraints
    if ca.top != cb.top or len(ca) != len(cb):
        return False
    for x, y in zip(ca, cb):
        if len(x.ident) != len(y.ident) or len(x.access) != len(y.access):
            return False
        for tx, ty in zip(x.ident, y.ident):
            if not match_term(tx, ty):
                return False
        for (lx, tx), (ly, ty) in zip(x.access, y.access):
            if lx != ly or not match_term(tx, ty):
                return False
    return True


def grammar_alpha_equivalent(a: Grammar, b: Grammar) -> bool:
    """Rule-by-rule alpha equivalence, with matching start and kind."""
    if a.start != b.start or a.kind != b.kind or len(a.rules) != len(b.rules):
        return False
    return all(rule_alpha_equivalent(x, y) for x, y in zip(a.rules, b.rules))
