"""Seeded random generators for constraint sets and grammars."""

from __future__ import annotations

import random

from ifg.constraints import Constant, Constraint, ConstraintSet, Variable
from ifg.grammar import Grammar, GrammarKind, NontermCall, Rule, Terminal
from ifg.solutions import count_derivations


def random_constraint_set(
    rng: random.Random,
    max_constraints: int = 8,
    max_vars: int = 4,
    max_labels: int = 2,
    max_consts: int = 2,
) -> ConstraintSet:
    """A random constraint set whose constraint graph is stratified.

    Variables are placed on strata, access relations point exactly one
    stratum down, and each stratum owns one label, so an access chain of
    length k uses k distinct labels.  The class graph is therefore acyclic
    and a minimal model never needs trees deeper than the number of
    distinct labels plus one, which keeps the bounded satisfiability
    oracle exact.  Constants may appear anywhere; clashes are welcome.
    """
    n_strata = rng.randint(2, max_labels + 1)
    labels = [f"l{i}" for i in range(n_strata - 1)]
    consts = [Constant(f"k{i}") for i in range(rng.randint(1, max_consts))]
    n_vars = rng.randint(1, max_vars)
    strata: list[list[Variable]] = [[] for _ in range(n_strata)]
    for i in range(n_vars):
        strata[rng.randrange(n_strata)].append(Variable(f"X{i}"))

    constraints = []
    for _ in range(rng.randint(1, max_constraints)):
        s = rng.randrange(n_strata)
        ident_pool = strata[s] + consts
        ident = tuple(rng.sample(ident_pool, rng.randint(1, min(3, len(ident_pool)))))
        target_pool = (strata[s + 1] if s + 1 < n_strata else []) + consts
        access = tuple(
            (labels[s], rng.choice(target_pool))
            for _ in range(rng.randint(0, 2))
            if s < n_strata - 1
        )
        constraints.append(Constraint(ident, access))
    return ConstraintSet(tuple(constraints))


def random_specialization_grammar(
    rng: random.Random,
    max_rules: int = 12,
    max_labels: int = 4,
    max_consts: int = 3,
    max_derivations: int = 200,
) -> Grammar:
    """A random acyclic specialization-kind grammar.

    Nonterminals live on levels and rules only call strictly lower
    levels, so the call graph is acyclic; every called nonterminal has at
    least one rule and the bottom level is lexical.  Regenerates until
    the derivation count stays affordable for the exhaustive oracle.
    """
    for _ in range(1000):
        g = _attempt(rng, max_rules, max_labels, max_consts)
        if 0 < count_derivations(g) <= max_derivations:
            return g
    raise AssertionError("generator failed to produce a usable grammar")


def _attempt(rng: random.Random, max_rules: int, max_labels: int, max_consts: int) -> Grammar:
    labels = [f"l{i}" for i in range(rng.randint(1, max_labels))]
    consts = [Constant(f"k{i}") for i in range(rng.randint(1, max_consts))]
    terminals = ["t0", "t1", "t2"]
    n_levels = rng.randint(2, 4)
    names = [f"n{i}" for i in range(n_levels + rng.randint(0, 2))]
    level = {name: (0 if i == 0 else rng.randint(1, n_levels - 1) if i < n_levels else rng.randint(0, n_levels - 1))
             for i, name in enumerate(names)}
    # the last name is the start symbol and sits on top
    start = names[-1]
    level[start] = n_levels

    rule_budget = rng.randint(len(names), max_rules)
    rules: list[Rule] = []
    counter = 0

    def add_rule(name: str) -> None:
        nonlocal counter
        counter += 1
        lhs = Variable("R", counter)
        below = [n for n in names if level[n] < level[name]]
        arity = 0 if not below else rng.choice([0, 1, 2, 2])
        rhs: list = []
        arg_vars: list[Variable] = []
        for j in range(arity):
            counter += 1
            v = Variable("A", counter)
            arg_vars.append(v)
            rhs.append(NontermCall(rng.choice(below), v))
        if not rhs or rng.random() < 0.3:
            rhs.insert(rng.randint(0, len(rhs)), Terminal(rng.choice(terminals)))
        locals_ = []
        for _ in range(rng.randint(0, 2)):
            counter += 1
            locals_.append(Variable("L", counter))
        pool = [lhs] + arg_vars + locals_ + consts
        constraints = []
        for _ in range(rng.randint(0, 3)):
            ident = tuple(rng.sample(pool, rng.randint(1, min(3, len(pool)))))
            access = tuple(
                (rng.choice(labels), rng.choice(pool)) for _ in range(rng.randint(0, 2))
            )
            constraints.append(Constraint(ident, access))
        rules.append(
            Rule(f"g{len(rules) + 1}", name, lhs, tuple(rhs), ConstraintSet(tuple(constraints)))
        )

    for name in names:
        add_rule(name)
    while len(rules) < rule_budget:
        add_rule(rng.choice(names))

    return Grammar(tuple(rules), start, GrammarKind.SPECIALIZATION)
