"""Feature structures and solution enumeration.

``enumerate_solutions`` walks an interaction-free grammar top-down,
threading a single union-find through the derivation so each solution is
produced without backtracking; any clash there is a certification bug,
not a search failure.  ``oracle_enumerate`` is the slow ground truth: it
materializes every derivation of an arbitrary acyclic grammar, collects
the constraints, standardizes once per derivation, and keeps the
survivors.  Structures are compared up to isomorphism with ``iso_equal``.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterator

from .constraints import Constant, Constraint, ConstraintSet, NameSupply, Term, Variable
from .errors import (
    CyclicGrammarError,
    GrammarKindError,
    InvariantViolationError,
    NotStandardizedError,
    UnsatisfiableError,
)
from .grammar import (
    Grammar,
    GrammarKind,
    NontermCall,
    Rule,
    fresh_rename,
    rule_dependency_order,
)
from .standardize import is_interaction_free, is_standardized, standardize


class FeatureStructure:
    """A rooted labeled graph, functional per label, with atomic leaves.

    At most one edge with a given label leaves any node, atom-bearing
    nodes have no outgoing edges, every node is reachable from the root,
    and cycles are permitted.
    """

    def __init__(self, root, atoms=None, edges=()):
        self.root = root
        self.atoms: dict = dict(atoms or {})
        self._succ: dict = {root: {}}
        for src, label, dst in edges:
            slots = self._succ.setdefault(src, {})
            if label in slots:
                raise ValueError(f"two edges labeled {label!r} leave node {src!r}")
            slots[label] = dst
            self._succ.setdefault(dst, {})
        for node, atom in self.atoms.items():
            if self._succ.get(node):
                raise ValueError(f"atom node {node!r} has outgoing edges")
            self._succ.setdefault(node, {})
            if not isinstance(atom, Constant):
                self.atoms[node] = Constant(str(atom))
        reached = {self.root}
        agenda = [self.root]
        while agenda:
            for dst in self._succ[agenda.pop()].values():
                if dst not in reached:
                    reached.add(dst)
                    agenda.append(dst)
        if reached != set(self._succ):
            stray = sorted(set(self._succ) - reached, key=repr)
            raise ValueError(f"node {stray[0]!r} is not reachable from the root")

    @property
    def nodes(self) -> frozenset:
        return frozenset(self._succ)

    def ordered_nodes(self) -> list:
        """Nodes in insertion (discovery) order."""
        return list(self._succ)

    def atom(self, node) -> Constant | None:
        return self.atoms.get(node)

    def successors(self, node) -> list[tuple[str, object]]:
        """Outgoing (label, target) pairs, in insertion order."""
        return list(self._succ[node].items())

    def edges(self) -> list[tuple[object, str, object]]:
        return [(n, l, d) for n, slots in self._succ.items() for l, d in slots.items()]

    def __len__(self) -> int:
        return len(self._succ)

    def __repr__(self) -> str:
        return f"<FeatureStructure root={self.root!r} nodes={len(self)}>"


def structure_of(cs: ConstraintSet, root: Variable) -> FeatureStructure:
    """The most general structure satisfying ``cs``, read off at ``root``.

    Each identification class reachable from the root's class through
    access relations becomes one node; classes holding a constant become
    atoms.  Node ids are dense integers in discovery order.
    """
    if cs.top:
        raise UnsatisfiableError("no structure satisfies TOP")
    if not is_standardized(cs):
        raise NotStandardizedError("structure_of requires a standardized constraint set")

    cls: dict[Term, int] = {}
    access: dict[int, list[tuple[str, Term]]] = {}
    constants: dict[int, Constant] = {}

    def class_of(t: Term) -> int:
        if t not in cls:
            cid = len(access)
            cls[t] = cid
            access[cid] = []
            if isinstance(t, Constant):
                constants[cid] = t
        return cls[t]

    for c in cs:
        cid = class_of(c.ident[0])
        for t in c.ident[1:]:
            cls[t] = cid
            if isinstance(t, Constant):
                constants[cid] = t
        access[cid] = list(c.access)
    for c in cs:
        for _, t in c.access:
            class_of(t)
    root_cid = class_of(root)

    ids: dict[int, int] = {}
    edges: list[tuple[int, str, int]] = []
    atoms: dict[int, Constant] = {}

    def visit(cid: int) -> int:
        if cid in ids:
            return ids[cid]
        node = len(ids)
        ids[cid] = node
        if cid in constants:
            atoms[node] = constants[cid]
        for label, target in access[cid]:
            edges.append((node, label, visit(cls[target])))
        return node

    visit(root_cid)
    return FeatureStructure(root=0, atoms=atoms, edges=edges)


def iso_equal(a: FeatureStructure, b: FeatureStructure) -> bool:
    """Root-, label-, and atom-preserving bijection between the node sets.

    Decided by synchronized traversal with forward and backward
    correspondence tables, which handles cycles and distinguishes shared
    nodes from duplicated equal subtrees.
    """
    fwd: dict = {}
    bwd: dict = {}
    stack = [(a.root, b.root)]
    while stack:
        x, y = stack.pop()
        if x in fwd or y in bwd:
            if fwd.get(x) != y or bwd.get(y) != x:
                return False
            continue
        fwd[x] = y
        bwd[y] = x
        if a.atom(x) != b.atom(y):
            return False
        sx = dict(a.successors(x))
        sy = dict(b.successors(y))
        if sx.keys() != sy.keys():
            return False
        for label, tx in sx.items():
            stack.append((tx, sy[label]))
    return True


def multiset_iso_equal(xs, ys) -> bool:
    """Multiset equality of two structure collections under iso_equal."""
    remaining = list(ys)
    if len(xs) != len(remaining):
        return False
    for x in xs:
        for i, y in enumerate(remaining):
            if iso_equal(x, y):
                del remaining[i]
                break
        else:
            return False
    return True


@dataclass
class EnumerationStats:
    """Counters recorded while enumerating solutions."""

    solutions: int = 0
    failures: int = 0    # unification clashes; must stay 0 on certified input
    dead_ends: int = 0   # expansions of a nonterminal with no rules


class _ConstraintState:
    """A union-find with an undo trail, threaded through a derivation.

    On interaction-free input the inserted constraint sets can never
    clash, so any duplicate label, constant conflict, or access on a
    constant-bearing class is reported as an invariant violation.
    """

    def __init__(self, stats: EnumerationStats):
        self.stats = stats
        self.parent: dict[Term, Term] = {}
        self.size: dict[Term, int] = {}
        self.const: dict[Term, Constant] = {}
        self.acc: dict[Term, dict[str, Term]] = {}
        self.trail: list = []

    def checkpoint(self) -> int:
        return len(self.trail)

    def rollback(self, mark: int) -> None:
        while len(self.trail) > mark:
            action = self.trail.pop()
            kind = action[0]
            if kind == "add":
                t = action[1]
                del self.parent[t]
                del self.size[t]
                self.const.pop(t, None)
                self.acc.pop(t, None)
            elif kind == "parent":
                _, node, old_size_root, old_size = action
                self.parent[node] = node
                self.size[old_size_root] = old_size
            elif kind == "const":
                _, root, old = action
                if old is None:
                    del self.const[root]
                else:
                    self.const[root] = old
            elif kind == "acc":
                _, root, label = action
                del self.acc[root][label]
            elif kind == "acc_move":
                _, src, dst, label, value = action
                del self.acc[dst][label]
                self.acc.setdefault(src, {})[label] = value

    def add(self, t: Term) -> None:
        if t not in self.parent:
            self.parent[t] = t
            self.size[t] = 1
            if isinstance(t, Constant):
                self.const[t] = t
            self.trail.append(("add", t))

    def find(self, t: Term) -> Term:
        while self.parent[t] != t:  # no path compression: keeps undo exact
            t = self.parent[t]
        return t

    def _fail(self, message: str):
        self.stats.failures += 1
        raise InvariantViolationError(
            f"unification clash on certified interaction-free input: {message}"
        )

    def union(self, a: Term, b: Term) -> None:
        ra, rb = self.find(a), self.find(b)
        if ra == rb:
            return
        if self.size[ra] < self.size[rb]:
            ra, rb = rb, ra
        ca, cb = self.const.get(ra), self.const.get(rb)
        if ca is not None and cb is not None and ca != cb:
            self._fail(f"constants {ca} and {cb} identified")
        self.trail.append(("parent", rb, ra, self.size[ra]))
        self.parent[rb] = ra
        self.size[ra] += self.size[rb]
        if cb is not None and ca is None:
            self.trail.append(("const", ra, None))
            self.const[ra] = cb
        mb = self.acc.get(rb)
        if mb:
            ma = self.acc.setdefault(ra, {})
            for label in list(mb):
                if label in ma:
                    self._fail(f"label {label} set by two rules")
                value = mb.pop(label)
                ma[label] = value
                self.trail.append(("acc_move", rb, ra, label, value))
        if self.const.get(ra) is not None and self.acc.get(ra):
            self._fail(f"constant {self.const[ra]} given an attribute")

    def insert(self, cs: ConstraintSet) -> None:
        """Add one rule instance's standardized constraints."""
        if cs.top:
            self._fail("a rule with TOP constraints was instantiated")
        for c in cs:
            for t in c.ident:
                self.add(t)
            first = c.ident[0]
            for t in c.ident[1:]:
                self.union(first, t)
            if c.access:
                root = self.find(first)
                if self.const.get(root) is not None:
                    self._fail(f"constant {self.const[root]} given an attribute")
                m = self.acc.setdefault(root, {})
                for label, target in c.access:
                    self.add(target)
                    if label in m:
                        self._fail(f"label {label} set twice")
                    m[label] = target
                    self.trail.append(("acc", root, label))

    def extract(self, root_var: Variable) -> FeatureStructure:
        """Build the structure rooted at ``root_var`` from the live state."""
        self.add(root_var)
        ids: dict[Term, int] = {}
        edges: list[tuple[int, str, int]] = []
        atoms: dict[int, Constant] = {}

        def visit(root: Term) -> int:
            if root in ids:
                return ids[root]
            node = len(ids)
            ids[root] = node
            c = self.const.get(root)
            if c is not None:
                atoms[node] = c
            for label, target in self.acc.get(root, {}).items():
                edges.append((node, label, visit(self.find(target))))
            return node

        visit(self.find(root_var))
        return FeatureStructure(root=0, atoms=atoms, edges=edges)


def certify_interaction_free(g: Grammar) -> None:
    """Raise unless ``g`` is acyclic and every rule is interaction-free."""
    if g.kind is not GrammarKind.INTERACTION_FREE:
        raise GrammarKindError(
            f"expected an interaction-free grammar, got kind {g.kind.value!r}"
        )
    dep = rule_dependency_order(g)
    if dep.cycle is not None:
        raise CyclicGrammarError("grammar is cyclic", dep.cycle)
    for r in g.rules:
        if not is_interaction_free(r):
            raise InvariantViolationError(f"rule {r.id} is not interaction-free")


def enumerate_solutions(
    g: Grammar, stats: EnumerationStats | None = None
) -> Iterator[FeatureStructure]:
    """Lazily yield one structure per complete top-down derivation.

    The grammar must be certified interaction-free and acyclic; the
    constraint state is standardized incrementally along the derivation
    and can never become TOP, so no backtracking occurs.
    """
    certify_interaction_free(g)
    if stats is None:
        stats = EnumerationStats()
    supply = NameSupply()
    state = _ConstraintState(stats)

    def derive(name: str) -> Iterator[Variable]:
        rules = g.rules_for(name)
        if not rules:
            stats.dead_ends += 1
            raise InvariantViolationError(
                f"nonterminal {name} has no rules; the grammar is not fully productive"
            )
        for rule in rules:
            inst = fresh_rename(rule, supply)
            mark = state.checkpoint()
            state.insert(inst.constraints)
            yield from bind(inst, inst.calls, 0)
            state.rollback(mark)

    def bind(inst: Rule, calls: tuple[NontermCall, ...], i: int) -> Iterator[Variable]:
        if i == len(calls):
            yield inst.lhs_var
            return
        call = calls[i]
        for sub_root in derive(call.name):
            mark = state.checkpoint()
            state.add(call.var)
            state.add(sub_root)
            state.union(call.var, sub_root)
            yield from bind(inst, calls, i + 1)
            state.rollback(mark)

    if not g.rules_for(g.start):
        return
    for root_var in derive(g.start):
        stats.solutions += 1
        yield state.extract(root_var)


def oracle_enumerate(g: Grammar) -> list[FeatureStructure]:
    """Exhaustively enumerate solutions of any acyclic grammar.

    Every top-down derivation is materialized, its constraints collected
    (with fresh variables per rule instance and a bridging constraint per
    call) and standardized in one pass; derivations whose sets collapse to
    TOP are discarded.  Returns the surviving structures as a multiset.
    """
    dep = rule_dependency_order(g)
    if dep.cycle is not None:
        raise CyclicGrammarError("oracle_enumerate requires an acyclic grammar", dep.cycle)
    supply = NameSupply()

    def derivations(name: str) -> Iterator[tuple[Variable, list[Constraint]]]:
        for rule in g.rules_for(name):
            inst = fresh_rename(rule, supply)
            if inst.constraints.top:
                continue
            base = list(inst.constraints)
            calls = inst.calls

            def rec(i: int, acc: list[Constraint]) -> Iterator[tuple[Variable, list[Constraint]]]:
                if i == len(calls):
                    yield inst.lhs_var, acc
                    return
                call = calls[i]
                for sub_var, sub_cons in derivations(call.name):
                    bridged = acc + sub_cons + [Constraint((call.var, sub_var))]
                    yield from rec(i + 1, bridged)

            yield from rec(0, base)

    out: list[FeatureStructure] = []
    for root_var, constraints in derivations(g.start):
        cs = standardize(ConstraintSet(tuple(constraints)))
        if cs.top:
            continue
        out.append(structure_of(cs, root_var))
    return out


def count_derivations(g: Grammar) -> int:
    """Number of complete top-down derivations from the start symbol."""
    dep = rule_dependency_order(g)
    if dep.cycle is not None:
        raise CyclicGrammarError("count_derivations requires an acyclic grammar", dep.cycle)
    counts: dict[str, int] = {}
    for name in dep.order:
        total = 0
        for rule in g.rules_for(name):
            product = 1
            for call in rule.calls:
                product *= counts.get(call.name, 0)
            total += product
        counts[name] = total
    return counts.get(g.start, 0)
