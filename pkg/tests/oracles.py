"""Independent ground-truth oracles used by the tests.

Nothing here reuses the library's union-find machinery: satisfiability is
decided by enumerating assignments of variables to a bounded universe of
finite feature trees, and backbone parses are counted by a naive
exponential recursive parser.  Deliberately slow and simple.
"""

from __future__ import annotations

import itertools
from functools import lru_cache

from ifg.constraints import Constant, ConstraintSet, NameSupply, Variable
from ifg.grammar import Grammar, Terminal, fresh_rename
from ifg.constraints import Constraint
from ifg.standardize import standardize
from ifg.solutions import structure_of


class OracleBudgetExceeded(Exception):
    pass


# A tree is ("atom", name) or ("node", ((label, tree), ...)) with labels
# sorted, absent labels omitted.
BARE = ("node", ())


@lru_cache(maxsize=None)
def tree_universe(labels: tuple[str, ...], consts: tuple[str, ...], depth: int):
    atoms = tuple(("atom", c) for c in consts)
    if depth <= 0:
        return atoms + (BARE,)
    below = tree_universe(labels, consts, depth - 1)
    options = (None,) + below
    nodes = []
    for combo in itertools.product(options, repeat=len(labels)):
        entries = tuple((l, t) for l, t in zip(labels, combo) if t is not None)
        if entries:
            nodes.append(("node", entries))
    return atoms + (BARE,) + tuple(nodes)


def _value(term, sigma):
    if isinstance(term, Constant):
        return ("atom", term.name)
    return sigma[term]


def constraint_holds(c: Constraint, sigma: dict) -> bool:
    first = _value(c.ident[0], sigma)
    for t in c.ident[1:]:
        if _value(t, sigma) != first:
            return False
    if c.access:
        if first[0] != "node":
            return False
        entries = dict(first[1])
        for label, t in c.access:
            if entries.get(label) != _value(t, sigma):
                return False
    return True


def satisfies(cs: ConstraintSet, sigma: dict) -> bool:
    if cs.top:
        return False
    return all(constraint_holds(c, sigma) for c in cs)


def alphabet(cs: ConstraintSet) -> tuple[tuple[str, ...], tuple[str, ...]]:
    labels = sorted({l for c in cs for l, _ in c.access})
    consts = sorted({t.name for c in cs for t in c.terms() if isinstance(t, Constant)})
    return tuple(labels), tuple(consts)


def satisfiable(cs: ConstraintSet, depth: int | None = None, budget: int = 3_000_000) -> bool:
    """Exhaustive search over assignments into the bounded tree universe.

    The default depth bound is the number of distinct labels plus one,
    which is enough when access chains are no longer than that; the test
    generators guarantee it.  Raises OracleBudgetExceeded rather than
    returning a wrong answer when the search space is too large.
    """
    if cs.top:
        return False
    labels, consts = alphabet(cs)
    if depth is None:
        depth = len(labels) + 1
    universe = tree_universe(labels, consts, depth)
    variables = cs.variables()
    index = {v: i for i, v in enumerate(variables)}

    ground: list[Constraint] = []
    check_at: list[list[Constraint]] = [[] for _ in variables]
    for c in cs:
        needs = [index[t] for t in c.terms() if isinstance(t, Variable)]
        if needs:
            check_at[max(needs)].append(c)
        else:
            ground.append(c)
    if not all(constraint_holds(c, {}) for c in ground):
        return False
    if not variables:
        return True

    sigma: dict = {}
    work = 0

    def dfs(i: int) -> bool:
        nonlocal work
        for tree in universe:
            work += 1
            if work > budget:
                raise OracleBudgetExceeded(f"gave up after {work} assignments")
            sigma[variables[i]] = tree
            if all(constraint_holds(c, sigma) for c in check_at[i]):
                if i + 1 == len(variables) or dfs(i + 1):
                    return True
        del sigma[variables[i]]
        return False

    return dfs(0)


def assignments_agree(
    a: ConstraintSet,
    b: ConstraintSet,
    rng,
    exhaustive_limit: int = 200_000,
    samples: int = 300,
) -> bool:
    """Whether a and b are satisfied by the same assignments.

    All variables of either set are assigned; the check is exhaustive when
    the product of choices is small and sampled otherwise.
    """
    labels = sorted(set(alphabet(a)[0]) | set(alphabet(b)[0]))
    consts = sorted(set(alphabet(a)[1]) | set(alphabet(b)[1]))
    universe = tree_universe(tuple(labels), tuple(consts), len(labels) + 1)
    variables = list(dict.fromkeys(a.variables() + b.variables()))
    k = len(variables)
    if k == 0:
        return satisfies(a, {}) == satisfies(b, {})
    total = len(universe) ** k
    if total <= exhaustive_limit:
        combos = itertools.product(universe, repeat=k)
    else:
        combos = (tuple(rng.choice(universe) for _ in range(k)) for _ in range(samples))
    for combo in combos:
        sigma = dict(zip(variables, combo))
        if satisfies(a, sigma) != satisfies(b, sigma):
            return False
    return True


def cf_parse_trees(g: Grammar, tokens: list[str]):
    """All backbone parse trees by naive exponential span splitting."""
    memo: dict = {}

    def parse(name: str, i: int, j: int):
        key = (name, i, j)
        if key in memo:
            return memo[key]
        out = []
        for rule in g.rules_for(name):
            if len(rule.rhs) == 1 and isinstance(rule.rhs[0], Terminal):
                if j == i + 1 and tokens[i] == rule.rhs[0].token:
                    out.append((name, tokens[i]))
            elif len(rule.calls) == 2:
                b, c = rule.calls
                for k in range(i + 1, j):
                    for left in parse(b.name, i, k):
                        for right in parse(c.name, k, j):
                            out.append((name, left, right))
        memo[key] = out
        return out

    return parse(g.start, 0, len(tokens))


def direct_solutions(g: Grammar, tokens: list[str]):
    """Top-down parsing of a reference grammar with constraint collection.

    Enumerates derivations by recursive descent over spans, renames each
    rule instance fresh, bridges call arguments to sub-derivation roots,
    standardizes once per complete derivation, and keeps the survivors.
    """
    supply = NameSupply()

    def derive(name: str, i: int, j: int):
        for rule in g.rules_for(name):
            inst = fresh_rename(rule, supply)
            if len(inst.rhs) == 1 and isinstance(inst.rhs[0], Terminal):
                if j == i + 1 and tokens[i] == inst.rhs[0].token:
                    yield inst.lhs_var, list(inst.constraints)
            elif len(inst.calls) == 2:
                b, c = inst.calls
                for k in range(i + 1, j):
                    for bv, bc in derive(b.name, i, k):
                        for cv, cc in derive(c.name, k, j):
                            yield (
                                inst.lhs_var,
                                list(inst.constraints)
                                + bc
                                + [Constraint((b.var, bv))]
                                + cc
                                + [Constraint((c.var, cv))],
                            )

    out = []
    for root, constraints in derive(g.start, 0, len(tokens)):
        cs = standardize(ConstraintSet(tuple(constraints)))
        if not cs.top:
            out.append(structure_of(cs, root))
    return out
