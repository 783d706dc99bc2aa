"""Reduction of constraint sets to standardized form.

A constraint set is standardized when identification sets are pairwise
disjoint, no label occurs twice within a constraint, and an identification
set holds at most one constant, which then admits no access relations.
Standardization preserves the set of satisfied structures and detects
unsatisfiability, in which case the result is ``TOP``.

``standardize`` runs in near-linear time on a union-find; ``reduce_once``
exposes the single-step rewriting it is equivalent to, which is useful for
testing confluence under different rewrite orders.
"""

from __future__ import annotations

from .constraints import Constant, Constraint, ConstraintSet, Term, TOP
from .errors import NotStandardizedError
from .grammar import Rule


def reduce_once(cs: ConstraintSet) -> tuple[ConstraintSet, bool]:
    """Apply one rewrite step; returns (result, changed).

    In priority order: an identification set with two distinct constants,
    or a constant next to a nonempty access list, rewrites the whole set
    to TOP; two constraints with overlapping identification sets merge
    into one (union of idents, concatenated accesses); a duplicate label
    within a constraint drops its second occurrence and appends a new
    constraint identifying the two targets.  If nothing applies the input
    is returned unchanged with a False flag.
    """
    if cs.top:
        raise ValueError("reduce_once: input is TOP")
    for c in cs:
        consts = {t for t in c.ident if isinstance(t, Constant)}
        if len(consts) >= 2 or (consts and c.access):
            return TOP, True
    items = list(cs)
    for i in range(len(items)):
        ident_i = set(items[i].ident)
        for j in range(i + 1, len(items)):
            if ident_i & set(items[j].ident):
                merged = Constraint(
                    items[i].ident + items[j].ident,
                    items[i].access + items[j].access,
                )
                rest = items[:i] + [merged] + items[i + 1 : j] + items[j + 1 :]
                return ConstraintSet(tuple(rest)), True
    for i, c in enumerate(items):
        seen: dict[str, Term] = {}
        for k, (label, target) in enumerate(c.access):
            if label in seen:
                trimmed = Constraint(c.ident, c.access[:k] + c.access[k + 1 :])
                rest = items[:i] + [trimmed] + items[i + 1 :]
                rest.append(Constraint((seen[label], target)))
                return ConstraintSet(tuple(rest)), True
            seen[label] = target
    return cs, False


def standardize(cs: ConstraintSet) -> ConstraintSet:
    """Reduce a constraint set to an equivalent standardized one.

    Returns TOP exactly when the input admits no satisfying structure.
    Runs in near-linear time: identification sets are merged through a
    union-find with path compression, and label deduplication is resolved
    by unioning the two targets, keeping the first-listed access relation.
    """
    if cs.top:
        return TOP

    parent: dict[Term, Term] = {}
    size: dict[Term, int] = {}
    const: dict[Term, Constant] = {}  # root -> its constant, if any
    acc: dict[Term, dict[str, tuple[int, Term]]] = {}  # root -> label -> (stamp, target)

    def add(t: Term) -> None:
        if t not in parent:
            parent[t] = t
            size[t] = 1
            if isinstance(t, Constant):
                const[t] = t

    def find(t: Term) -> Term:
        root = t
        while parent[root] != root:
            root = parent[root]
        while parent[t] != root:
            parent[t], t = root, parent[t]
        return root

    pending: list[tuple[Term, Term]] = []

    def union(a: Term, b: Term) -> bool:
        """Merge the classes of a and b; False signals unsatisfiability."""
        ra, rb = find(a), find(b)
        if ra == rb:
            return True
        if size[ra] < size[rb]:
            ra, rb = rb, ra
        parent[rb] = ra
        size[ra] += size[rb]
        ca, cb = const.get(ra), const.get(rb)
        if ca is not None and cb is not None and ca != cb:
            return False
        if cb is not None:
            const[ra] = cb
        ma = acc.get(ra)
        mb = acc.pop(rb, None)
        if mb:
            if ma is None:
                acc[ra] = mb
            else:
                if len(ma) < len(mb):
                    ma, mb = mb, ma
                    acc[ra] = ma
                for label, entry in mb.items():
                    if label in ma:
                        kept, other = ma[label], entry
                        if other[0] < kept[0]:
                            kept, other = other, kept
                        ma[label] = kept
                        pending.append((kept[1], other[1]))
                    else:
                        ma[label] = entry
        if const.get(ra) is not None and acc.get(ra):
            return False
        return True

    def settle() -> bool:
        while pending:
            a, b = pending.pop()
            if not union(a, b):
                return False
        return True

    for c in cs:
        first = c.ident[0]
        add(first)
        for t in c.ident[1:]:
            add(t)
            if not union(first, t) or not settle():
                return TOP

    stamp = 0
    for c in cs:
        for label, target in c.access:
            add(target)
            root = find(c.ident[0])
            if const.get(root) is not None:
                return TOP
            m = acc.setdefault(root, {})
            if label in m:
                pending.append((m[label][1], target))
                if not settle():
                    return TOP
            else:
                m[label] = (stamp, target)
            stamp += 1

    # Rebuild: one constraint per class worth emitting, deterministically.
    first_pos: dict[Term, int] = {}
    ident_constraint: dict[Term, int] = {}
    pos = 0
    for i, c in enumerate(cs):
        for t in c.ident:
            if t not in first_pos:
                first_pos[t] = pos
                pos += 1
            if t not in ident_constraint:
                ident_constraint[t] = i
        for _, t in c.access:
            if t not in first_pos:
                first_pos[t] = pos
                pos += 1

    members: dict[Term, list[Term]] = {}
    for t in sorted(first_pos, key=first_pos.get):
        members.setdefault(find(t), []).append(t)

    keyed = []
    for root, terms in members.items():
        entries = sorted((s, l, t) for l, (s, t) in acc.get(root, {}).items())
        access = tuple((l, t) for _, l, t in entries)
        if len(terms) == 1 and not access:
            continue  # vacuous singleton
        idents = [ident_constraint[t] for t in terms if t in ident_constraint]
        key = (0, min(idents)) if idents else (1, first_pos[terms[0]])
        keyed.append((key, Constraint(tuple(terms), access)))
    keyed.sort(key=lambda p: p[0])
    return ConstraintSet(tuple(c for _, c in keyed))


def is_standardized(cs: ConstraintSet) -> bool:
    """Check the standardized-form conditions directly."""
    if cs.top:
        return True
    seen: set[Term] = set()
    for c in cs:
        if any(t in seen for t in c.ident):
            return False
        seen.update(c.ident)
        labels = c.labels()
        if len(set(labels)) != len(labels):
            return False
        consts = {t for t in c.ident if isinstance(t, Constant)}
        if len(consts) >= 2:
            return False
        if consts and c.access:
            return False
    return True


def is_interaction_free(rule: Rule) -> bool:
    """True iff no rhs argument variable occurs in any identification set.

    The rule's constraints must already be standardized; a TOP rule is
    never interaction-free.
    """
    if not is_standardized(rule.constraints):
        raise NotStandardizedError(f"rule {rule.id} has non-standardized constraints")
    if rule.constraints.top:
        return False
    args = set(rule.arg_vars)
    if not args:
        return True
    for c in rule.constraints:
        if any(t in args for t in c.ident):
            return False
    return True


def equivalent(a: ConstraintSet, b: ConstraintSet) -> bool:
    """Semantic equality: same Top-ness, term partition, and access shape.

    Vacuous singleton classes (a term equal only to itself, with no access
    relations) do not affect the comparison.
    """
    a, b = standardize(a), standardize(b)
    if a.top or b.top:
        return a.top == b.top
    return _canonical(a) == _canonical(b)


def _canonical(cs: ConstraintSet) -> frozenset:
    cls: dict[Term, frozenset] = {}
    for c in cs:
        group = frozenset(c.ident)
        for t in c.ident:
            cls[t] = group
    for c in cs:
        for _, t in c.access:
            cls.setdefault(t, frozenset((t,)))
    entries = []
    for c in cs:
        group = cls[c.ident[0]]
        access = frozenset((l, cls[t]) for l, t in c.access)
        entries.append((group, access))
    return frozenset(entries)
