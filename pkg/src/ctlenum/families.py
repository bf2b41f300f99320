"""Deterministic model and formula families for sweeps and validation.

Exhaustive generation is kept to very small sizes (three worlds is
already a few thousand labeled structures); larger sizes are covered by
seeded sampling so sweeps stay inside their time budgets.
"""

from __future__ import annotations

import itertools
import random
from typing import Iterable, Iterator, Sequence

from . import formula as F
from .kripke import KripkeModel, Submodel, closure, compile_model, ground_set


def _canonical_key(
    n: int,
    edges: frozenset[tuple[int, int]],
    labels: tuple[frozenset[str], ...],
) -> tuple:
    """Minimal form over permutations of the non-root worlds."""
    best = None
    for perm in itertools.permutations(range(1, n)):
        mapping = {0: 0, **{old: new for new, old in enumerate(perm, start=1)}}
        key = (
            tuple(sorted((mapping[a], mapping[b]) for a, b in edges)),
            tuple(
                tuple(sorted(labels[old]))
                for old in sorted(range(n), key=lambda w: mapping[w])
            ),
        )
        if best is None or key < best:
            best = key
    return best


def _graphs(n: int, connected: bool) -> Iterator[frozenset[tuple[int, int]]]:
    pairs = [(a, b) for a in range(n) for b in range(n)]
    for picked in range(1 << len(pairs)):
        edges = frozenset(pairs[i] for i in range(len(pairs)) if picked >> i & 1)
        out = {a for a, _ in edges}
        if len(out) < n:
            continue
        if connected:
            seen = {0}
            stack = [0]
            while stack:
                u = stack.pop()
                for a, b in edges:
                    if a == u and b not in seen:
                        seen.add(b)
                        stack.append(b)
            if len(seen) < n:
                continue
        yield edges


def _to_model(
    n: int, edges: Iterable[tuple[int, int]], labels: Sequence[frozenset[str]]
) -> KripkeModel:
    names = [f"w{i + 1}" for i in range(n)]
    return KripkeModel.of(
        worlds=[(names[i], sorted(labels[i])) for i in range(n)],
        edges=sorted((names[a], names[b]) for a, b in edges),
        root=names[0],
    )


def all_models(
    max_worlds: int,
    atoms: Sequence[str] = ("p",),
    connected: bool = True,
    dedup: bool = True,
) -> Iterator[KripkeModel]:
    """Every rooted total model up to the size bound, labeled over the
    given atoms, deduplicated up to renaming of non-root worlds."""
    label_choices = [
        frozenset(c)
        for k in range(len(atoms) + 1)
        for c in itertools.combinations(atoms, k)
    ]
    for n in range(1, max_worlds + 1):
        seen = set()
        for edges in _graphs(n, connected):
            for labels in itertools.product(label_choices, repeat=n):
                if dedup:
                    key = _canonical_key(n, edges, labels)
                    if key in seen:
                        continue
                    seen.add(key)
                yield _to_model(n, edges, labels)


def sample_models(
    n_worlds: int,
    count: int,
    seed: int,
    atoms: Sequence[str] = ("p",),
    max_edges: int | None = None,
    connected: bool = True,
) -> list[KripkeModel]:
    """Seeded random rooted total models, deduplicated."""
    rng = random.Random(seed)
    cap = max_edges if max_edges is not None else n_worlds * n_worlds
    out: list[KripkeModel] = []
    seen = set()
    attempts = 0
    while len(out) < count and attempts < count * 200:
        attempts += 1
        model = random_model(rng, n_worlds, atoms, connected=connected)
        if len(model.edges) > cap:
            continue
        compiled = compile_model(model)
        key = _canonical_key(
            compiled.n,
            frozenset(compiled.edges),
            tuple(w.labels for w in model.worlds),
        )
        if key in seen:
            continue
        seen.add(key)
        out.append(model)
    return out


def random_model(
    rng: random.Random,
    n_worlds: int,
    atoms: Sequence[str] = ("p",),
    edge_prob: float = 0.35,
    connected: bool = True,
) -> KripkeModel:
    """One random rooted total (optionally connected) model."""
    n = n_worlds
    edges = {
        (a, b) for a in range(n) for b in range(n) if rng.random() < edge_prob
    }
    for a in range(n):
        if not any(x == a for x, _ in edges):
            edges.add((a, rng.randrange(n)))
    if connected:
        order = list(range(1, n))
        rng.shuffle(order)
        reachable = {0}
        for b in order:
            edges.add((rng.choice(sorted(reachable)), b))
            reachable.add(b)
    labels = tuple(
        frozenset(a for a in atoms if rng.random() < 0.5) for _ in range(n)
    )
    return _to_model(n, edges, labels)


def random_submodel(
    rng: random.Random, model: KripkeModel, connected: bool = True
) -> Submodel:
    """A random valid submodel: delete a random element subset, close."""
    elements = ground_set(model)
    while True:
        deleted = [e for e in elements if rng.random() < 0.4]
        sub = closure(model, deleted, connected=connected)
        if sub is not None:
            return sub


def chain_models(n_worlds: int, atom: str = "p") -> KripkeModel:
    """A line of worlds, each with a self-loop; the atom sits on the root.

    Exactly 2**n - 1 connected valid submodels exist (kept prefixes with
    free self-loops), all satisfying EF atom, which makes these models a
    good ruler for per-solution delay measurements."""
    names = [f"w{i + 1}" for i in range(n_worlds)]
    edges = [(names[i], names[i + 1]) for i in range(n_worlds - 1)]
    edges += [(name, name) for name in names]
    worlds = [(names[i], [atom] if i == 0 else []) for i in range(n_worlds)]
    return KripkeModel.of(worlds, sorted(edges), names[0])


# --- formula batteries ----------------------------------------------------------

_MONOTONE_UNARY = (F.EX, F.EF, F.EG)
_MONOTONE_BINARY = (F.And, F.Or, F.EU, F.ER)
_GENERAL_UNARY = (F.Not, F.EX, F.AX, F.EF, F.AF, F.EG, F.AG)
_GENERAL_BINARY = (F.And, F.Or, F.EU, F.AU, F.ER, F.AR)


def _by_size(
    leaves: Sequence[F.Formula],
    unary: Sequence[type],
    binary: Sequence[type],
    size: int,
) -> Iterator[F.Formula]:
    if size == 1:
        yield from leaves
        return
    for op in unary:
        for child in _by_size(leaves, unary, binary, size - 1):
            yield op(child)
    for op in binary:
        for left_size in range(1, size - 1):
            for left in _by_size(leaves, unary, binary, left_size):
                for right in _by_size(leaves, unary, binary, size - 1 - left_size):
                    yield op(left, right)


def formulas_by_size(
    atoms: Sequence[str],
    count: int,
    monotone: bool = False,
    constants: bool = True,
) -> list[F.Formula]:
    """First `count` formulas in a deterministic size-then-shape order."""
    leaves: list[F.Formula] = [F.Atom(a) for a in atoms]
    if constants:
        leaves += [F.Top(), F.Bottom()]
    unary = _MONOTONE_UNARY if monotone else _GENERAL_UNARY
    binary = _MONOTONE_BINARY if monotone else _GENERAL_BINARY
    out: list[F.Formula] = []
    size = 1
    while len(out) < count and size < 12:
        for phi in _by_size(leaves, unary, binary, size):
            out.append(phi)
            if len(out) == count:
                break
        size += 1
    return out


def afag_chain_formulas(atom: str, max_operators: int) -> list[F.Formula]:
    """All AF/AG chains over one atom up to the operator bound."""
    out: list[F.Formula] = []
    for length in range(max_operators + 1):
        for ops in itertools.product((F.AF, F.AG), repeat=length):
            phi: F.Formula = F.Atom(atom)
            for op in reversed(ops):
                phi = op(phi)
            out.append(phi)
    return out


def random_monotone_formula(
    rng: random.Random, depth: int, atoms: Sequence[str]
) -> F.Formula:
    """Random negation-free existential formula of bounded depth."""
    if depth == 0 or rng.random() < 0.25:
        roll = rng.random()
        if roll < 0.8:
            return F.Atom(rng.choice(list(atoms)))
        return F.Top() if roll < 0.9 else F.Bottom()
    op = rng.choice(_MONOTONE_UNARY + _MONOTONE_BINARY)
    if op in _MONOTONE_UNARY:
        return op(random_monotone_formula(rng, depth - 1, atoms))
    return op(
        random_monotone_formula(rng, depth - 1, atoms),
        random_monotone_formula(rng, depth - 1, atoms),
    )
