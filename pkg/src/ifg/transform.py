"""Transformation of acyclic specialization grammars into interaction-free form.

The loop repeatedly picks a lowest non-interaction-free rule, partially
evaluates the leftmost nonterminal call whose argument variable occurs in
an identification set, standardizes the resulting copies, and drops the
ones whose constraints collapse to TOP.  Calls whose argument can no
longer interact are never expanded, so alternative analyses below them
stay factorized in the grammar.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, replace

from .constraints import Constraint, ConstraintSet, NameSupply
from .errors import CyclicGrammarError, GrammarKindError, TransformError
from .grammar import (
    Grammar,
    GrammarKind,
    NontermCall,
    Provenance,
    Rule,
    Terminal,
    fresh_rename,
    rule_dependency_order,
    rules_in_dependency_order,
)
from .standardize import is_interaction_free, standardize


@dataclass
class TransformStats:
    """Counters describing one transformation run."""

    expansions: int = 0          # partial-evaluation events
    produced: int = 0            # rule copies that survived standardization
    eliminated: int = 0          # rule copies dropped as TOP
    dropped_input_rules: int = 0  # input rules whose own constraints were TOP
    pruned_dead: int = 0         # rules removed for calling a ruleless nonterminal
    swept: int = 0               # rules removed as unreachable from the start

    def as_dict(self) -> dict[str, int]:
        return {
            "expansions": self.expansions,
            "produced": self.produced,
            "eliminated": self.eliminated,
            "dropped_input_rules": self.dropped_input_rules,
            "pruned_dead": self.pruned_dead,
            "swept": self.swept,
        }


def select_lowest_non_if(g: Grammar) -> str | None:
    """Id of a non-IF rule all of whose strictly lower rules are IF.

    Rules are scanned lowest-first (callees before callers, definition
    order within a nonterminal), so the first non-IF rule found qualifies.
    Returns None when every rule is interaction-free.  Requires an acyclic
    grammar with standardized rules.
    """
    for rule in rules_in_dependency_order(g):
        if not is_interaction_free(rule):
            return rule.id
    return None


def triggering_position(rule: Rule) -> int | None:
    """Leftmost rhs index whose call argument occurs in an identification set."""
    if rule.constraints.top:
        return None
    ident_terms = set()
    for c in rule.constraints:
        ident_terms.update(c.ident)
    for i, sym in enumerate(rule.rhs):
        if isinstance(sym, NontermCall) and sym.var in ident_terms:
            return i
    return None


def partial_evaluate(
    g: Grammar,
    rule_id: str,
    position: int,
    *,
    supply: NameSupply | None = None,
    ids=None,
    stats: TransformStats | None = None,
) -> list[Rule]:
    """Inline the defining rules of the call at ``position``.

    One candidate is produced per defining rule: the definer is renamed
    fresh, its rhs is spliced in place of the call, its constraints are
    appended together with a bridging constraint identifying the call
    argument with the definer's lhs variable, and the result is
    standardized.  Candidates whose constraints become TOP are dropped.
    A nonterminal with no defining rules yields an empty list.
    """
    rule = g.rule(rule_id)
    if not 0 <= position < len(rule.rhs):
        raise TransformError(f"rule {rule_id} has no rhs position {position}")
    sym = rule.rhs[position]
    if isinstance(sym, Terminal):
        raise TransformError(f"position {position} of rule {rule_id} is a terminal")
    ident_terms = {t for c in rule.constraints for t in c.ident}
    if sym.var not in ident_terms:
        raise TransformError(
            f"argument {sym.var} of {sym.name} occurs in no identification set"
        )
    if supply is None:
        supply = NameSupply()
    if ids is None:
        ids = (f"{rule_id}.{k}" for k in itertools.count(1))
    if stats is None:
        stats = TransformStats()

    out: list[Rule] = []
    for definer in g.rules_for(sym.name):
        inst = fresh_rename(definer, supply)
        new_rhs = rule.rhs[:position] + inst.rhs + rule.rhs[position + 1 :]
        if inst.constraints.top:
            stats.eliminated += 1
            continue
        bridged = ConstraintSet(
            rule.constraints.constraints
            + inst.constraints.constraints
            + (Constraint((sym.var, inst.lhs_var)),)
        )
        cs = standardize(bridged)
        if cs.top:
            stats.eliminated += 1
            continue
        stats.produced += 1
        out.append(
            Rule(
                id=next(ids),
                lhs_name=rule.lhs_name,
                lhs_var=rule.lhs_var,
                rhs=new_rhs,
                constraints=cs,
                provenance=Provenance(parent=rule.id, definer=definer.id),
            )
        )
    return out


def to_interaction_free(
    g: Grammar, *, sweep: bool = True, stats: TransformStats | None = None
) -> Grammar:
    """Transform an acyclic specialization grammar into an equivalent IF one.

    Every rule of the result is interaction-free, all nonterminals are
    productive and (with ``sweep``) reachable, and the multiset of
    feature-structure solutions is preserved.  Reference grammars are
    rejected: specialize them first.
    """
    if g.kind is GrammarKind.REFERENCE:
        raise GrammarKindError("cannot transform a reference grammar; specialize it first")
    if g.kind is GrammarKind.INTERACTION_FREE:
        return g
    dep = rule_dependency_order(g)
    if g.cyclic or dep.cycle is not None:
        raise CyclicGrammarError("cannot transform a cyclic grammar", dep.cycle)
    if stats is None:
        stats = TransformStats()

    rules: list[Rule] = []
    for r in g.rules:
        cs = standardize(r.constraints)
        if cs.top:
            stats.dropped_input_rules += 1
        else:
            rules.append(replace(r, constraints=cs))
    current = Grammar(tuple(rules), g.start, GrammarKind.SPECIALIZATION)
    current = _prune_dead_calls(current, stats)

    supply = NameSupply()
    taken = {r.id for r in current.rules}
    ids = (f"t{k}" for k in itertools.count(1) if f"t{k}" not in taken)

    while True:
        rule_id = select_lowest_non_if(current)
        if rule_id is None:
            break
        rule = current.rule(rule_id)
        position = triggering_position(rule)
        replacements = partial_evaluate(
            current, rule_id, position, supply=supply, ids=ids, stats=stats
        )
        stats.expansions += 1
        current = current.with_rule_replaced(rule_id, replacements)

    current = _prune_dead_calls(current, stats)
    if sweep:
        before = len(current.rules)
        current = sweep_unreachable(current)
        stats.swept += before - len(current.rules)
    return replace(current, kind=GrammarKind.INTERACTION_FREE)


def _prune_dead_calls(g: Grammar, stats: TransformStats) -> Grammar:
    """Drop rules that call a nonterminal with no defining rules.

    Eliminating all rules of a nonterminal leaves its interaction-free
    callers behind; those callers generate nothing and must go too, so the
    removal is iterated to a fixpoint.
    """
    rules = list(g.rules)
    while True:
        defined = {r.lhs_name for r in rules}
        kept = [r for r in rules if all(c.name in defined for c in r.calls)]
        if len(kept) == len(rules):
            break
        stats.pruned_dead += len(rules) - len(kept)
        rules = kept
    return replace(g, rules=tuple(rules))


def sweep_unreachable(g: Grammar) -> Grammar:
    """Drop rules whose lhs nonterminal is unreachable from the start."""
    reachable = {g.start}
    agenda = [g.start]
    while agenda:
        name = agenda.pop()
        for r in g.rules_for(name):
            for c in r.calls:
                if c.name not in reachable:
                    reachable.add(c.name)
                    agenda.append(c.name)
    return replace(g, rules=tuple(r for r in g.rules if r.lhs_name in reachable))
