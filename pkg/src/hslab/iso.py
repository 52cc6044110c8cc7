"""Hidden-shift instances built from graph isomorphism.

A rigid graph (trivial automorphism group) makes g -> encoding of g applied
to the graph an injective function on the symmetric group. Two rigid graphs
give a pair of injective oracles that either differ by a right translation
(the graphs are isomorphic, and the translation is the hidden shift) or
have disjoint ranges. This module provides the graph type, rigidity and
isomorphism checks by exhaustive search, a vectorized survey of rigid
graphs by size, oracle construction, a brute-force shift finder, and the
mixed quantum state an oracle pair induces.
"""

from __future__ import annotations

from dataclasses import dataclass
from itertools import combinations, permutations

import numpy as np

from .errors import CapacityError, ConsistencyError, DomainError
from .groups import Group, symmetric_group
from .states import DENSE_DIM_LIMIT, ShiftState

MAX_RIGID_CHECK_N = 8
MAX_ORACLE_N = 6


@dataclass(frozen=True)
class Graph:
    """Simple undirected graph on vertices 0..n-1 with optional vertex colors."""

    n: int
    edges: tuple
    colors: tuple | None = None

    def encode(self) -> bytes:
        """Canonical byte encoding; injective on graphs with n <= 8."""
        if self.n > 8:
            raise CapacityError("byte encoding supports at most 8 vertices")
        out = [self.n, 1 if self.colors is not None else 0]
        if self.colors is not None:
            out.extend(self.colors)
        out.append(len(self.edges))
        out.extend(u * 8 + v for u, v in self.edges)
        return bytes(out)


def graph(n: int, edges, colors=None) -> Graph:
    """Validated constructor; edges are unordered pairs of 0-based vertices."""
    if n < 1:
        raise DomainError("graph needs at least one vertex")
    canon = set()
    for e in edges:
        u, v = e
        if not (0 <= u < n and 0 <= v < n):
            raise DomainError(f"edge {e!r} leaves the vertex range")
        if u == v:
            raise DomainError(f"loop at vertex {u} is not allowed")
        canon.add((min(u, v), max(u, v)))
    if colors is not None:
        colors = tuple(int(c) for c in colors)
        if len(colors) != n:
            raise DomainError("need one color per vertex")
        if any(not 0 <= c < 256 for c in colors):
            raise DomainError("colors must be bytes (0..255)")
    return Graph(n, tuple(sorted(canon)), colors)


def graph_act(images, A: Graph) -> Graph:
    """Relabel vertices: vertex v becomes images[v], colors travel with vertices."""
    if len(images) != A.n or sorted(images) != list(range(A.n)):
        raise DomainError("images must be a permutation of the vertices")
    edges = tuple(
        sorted(
            (min(images[u], images[v]), max(images[u], images[v])) for u, v in A.edges
        )
    )
    colors = None
    if A.colors is not None:
        moved = [0] * A.n
        for v in range(A.n):
            moved[images[v]] = A.colors[v]
        colors = tuple(moved)
    return Graph(A.n, edges, colors)


def automorphism_witness(A: Graph):
    """First non-identity relabeling fixing the graph, or None if rigid."""
    if A.n > MAX_RIGID_CHECK_N:
        raise CapacityError(f"exhaustive rigidity check limited to n <= {MAX_RIGID_CHECK_N}")
    identity = tuple(range(A.n))
    for p in permutations(range(A.n)):
        if p == identity:
            continue
        if graph_act(p, A) == A:
            return p
    return None


def is_rigid(A: Graph) -> bool:
    return automorphism_witness(A) is None


def are_isomorphic(A: Graph, B: Graph):
    """Exhaustive isomorphism search; returns the relabeling or None."""
    if A.n != B.n:
        return None
    if A.n > MAX_RIGID_CHECK_N:
        raise CapacityError(f"exhaustive isomorphism check limited to n <= {MAX_RIGID_CHECK_N}")
    if len(A.edges) != len(B.edges):
        return None
    for p in permutations(range(A.n)):
        if graph_act(p, A) == B:
            return p
    return None


# ---------------------------------------------------------------------------
# rigid graph survey (uncolored)


def _edge_index_map(n: int):
    pairs = list(combinations(range(n), 2))
    index = {pair: e for e, pair in enumerate(pairs)}
    return pairs, index


def rigid_survey(n: int) -> int:
    """Count labeled rigid graphs on n vertices by sweeping all edge masks."""
    if not 1 <= n <= 6:
        raise CapacityError("survey covers 1 <= n <= 6")
    pairs, index = _edge_index_map(n)
    m = len(pairs)
    masks = np.arange(1 << m, dtype=np.uint32)
    bits = (masks[:, None] >> np.arange(m, dtype=np.uint32)) & 1
    has_automorphism = np.zeros(1 << m, dtype=bool)
    identity = tuple(range(n))
    for p in permutations(range(n)):
        if p == identity:
            continue
        emap = [index[(min(p[u], p[v]), max(p[u], p[v]))] for u, v in pairs]
        has_automorphism |= (bits[:, emap] == bits).all(axis=1)
    return int((~has_automorphism).sum())


def rigid_corpus(n: int, count: int) -> list[Graph]:
    """First `count` rigid graphs on n vertices, by ascending edge mask."""
    if not 1 <= n <= 6:
        raise CapacityError("survey covers 1 <= n <= 6")
    pairs, _ = _edge_index_map(n)
    found = []
    for mask in range(1 << len(pairs)):
        edges = [pairs[e] for e in range(len(pairs)) if (mask >> e) & 1]
        A = graph(n, edges)
        if is_rigid(A):
            found.append(A)
            if len(found) == count:
                return found
    if len(found) < count:
        raise DomainError(f"only {len(found)} rigid graphs exist on {n} vertices")
    return found


# ---------------------------------------------------------------------------
# text format


def parse_graph_text(text: str) -> Graph:
    """Parse the on-disk graph format.

    First meaningful line is the vertex count; each following line is an
    edge as two 1-based vertex numbers; an optional line "colors: c1 ... cn"
    assigns vertex colors. Blank lines and lines starting with # are
    ignored.
    """
    n = None
    edges = []
    colors = None
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("#"):
            continue
        if line.lower().startswith("colors:"):
            colors = [int(tok) for tok in line.split(":", 1)[1].split()]
            continue
        if n is None:
            n = int(line)
            continue
        toks = line.split()
        if len(toks) != 2:
            raise DomainError(f"expected an edge line 'u v', got {line!r}")
        u, v = int(toks[0]), int(toks[1])
        if not (1 <= u and 1 <= v):
            raise DomainError("vertices in graph files are 1-based")
        edges.append((u - 1, v - 1))
    if n is None:
        raise DomainError("graph text must start with a vertex count")
    return graph(n, edges, colors)


def format_graph(A: Graph) -> str:
    lines = [str(A.n)]
    lines.extend(f"{u + 1} {v + 1}" for u, v in A.edges)
    if A.colors is not None:
        lines.append("colors: " + " ".join(str(c) for c in A.colors))
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# oracles


@dataclass(frozen=True)
class ShiftOraclePair:
    """Two injective functions on a group, given as value tables.

    outputs_first[g] and outputs_second[g] are the oracle values at element
    index g. The hidden-shift promise holds when the second table is a
    right translation of the first: outputs_second[g] == outputs_first[g*s].
    """

    group: Group
    outputs_first: tuple
    outputs_second: tuple


def make_shift_oracles(A: Graph, B: Graph) -> ShiftOraclePair:
    """Oracle tables g -> encoding of g applied to each graph.

    Both graphs must be rigid so the tables are injective; violating inputs
    raise DomainError naming an automorphism witness.
    """
    if A.n != B.n:
        raise DomainError("graphs must have the same number of vertices")
    if A.n > MAX_ORACLE_N:
        raise CapacityError(f"oracle construction limited to n <= {MAX_ORACLE_N}")
    for name, g0 in (("first", A), ("second", B)):
        witness = automorphism_witness(g0)
        if witness is not None:
            raise DomainError(
                f"{name} graph is not rigid: automorphism {witness} fixes it"
            )
    G = symmetric_group(A.n)
    first = []
    second = []
    for g in G.elements():
        images = G.perm(g)
        first.append(graph_act(images, A).encode())
        second.append(graph_act(images, B).encode())
    for name, table in (("first", first), ("second", second)):
        if len(set(table)) != len(table):
            raise ConsistencyError(f"{name} oracle table is not injective")
    return ShiftOraclePair(G, tuple(first), tuple(second))


def find_shift_bruteforce(pair: ShiftOraclePair):
    """Recover s with outputs_second[g] == outputs_first[g*s], scanning once.

    Returns the element index of s, or None when the two ranges are
    disjoint. Any partial overlap or disagreement between group elements
    breaks the promise and raises ConsistencyError.
    """
    G = pair.group
    position_first = {y: g for g, y in enumerate(pair.outputs_first)}
    if len(position_first) != G.order:
        raise ConsistencyError("first oracle table is not injective")
    shift = None
    hits = 0
    for g, y in enumerate(pair.outputs_second):
        h = position_first.get(y)
        if h is None:
            continue
        hits += 1
        candidate = G.compose(G.inverse(g), h)
        if shift is None:
            shift = candidate
        elif shift != candidate:
            raise ConsistencyError("oracle tables disagree about the shift")
    if hits == 0:
        return None
    if hits != G.order:
        raise ConsistencyError("oracle ranges overlap only partially")
    return shift


def states_from_oracles(pair: ShiftOraclePair, copies: int = 1) -> ShiftState:
    """Mixed state of the standard oracle preparation, averaged over values.

    Each oracle value y contributes the uniform superposition of the basis
    states (x, g) with table_x[g] == y. Isomorphic instances reproduce the
    averaged-base-point state of the shift carrying the second table onto
    the first; disjoint ranges give the maximally mixed state.
    """
    if copies < 1:
        raise DomainError("copies must be positive")
    N = pair.group.order
    dim = 2 * N
    if dim ** copies > DENSE_DIM_LIMIT:
        raise CapacityError(
            f"dense dimension {dim ** copies} exceeds the limit {DENSE_DIM_LIMIT}"
        )
    positions: dict[bytes, list[int]] = {}
    for g, y in enumerate(pair.outputs_first):
        positions.setdefault(y, []).append(g)
    for g, y in enumerate(pair.outputs_second):
        positions.setdefault(y, []).append(N + g)
    M = np.zeros((dim, dim))
    for pos in positions.values():
        M[np.ix_(pos, pos)] += 1.0
    M /= dim
    dense = M
    for _ in range(copies - 1):
        dense = np.kron(dense, M)
    state = ShiftState(
        group=pair.group,
        copies=copies,
        variant="from-oracles",
        form="dense",
        shift=None,
        dense=dense,
        blocks=None,
    )
    state.validate()
    return state
