"""Simple graphs, bipartitions, graph6 I/O, samplers and canonical keys.

Vertices are 0-indexed; a 1-indexed label ``k`` is vertex ``k - 1``.
Adjacency rows are integer bitmasks: bit ``j`` of ``adj[i]`` is the edge
``{i, j}``.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass, field
from functools import lru_cache
from pathlib import Path
from typing import Iterable, Iterator, Optional, Sequence

import numpy as np

from .errors import CapabilityError, ContractError, Graph6ParseError
from .gf2 import Gf2Matrix, Gf2Vector

CANONICAL_MAX_N = 10


@dataclass(frozen=True)
class Graph:
    n: int
    adj: tuple[int, ...]

    def __post_init__(self):
        if len(self.adj) != self.n:
            raise ContractError("adjacency must have one row per vertex")
        full = (1 << self.n) - 1
        for i, row in enumerate(self.adj):
            if row & ~full:
                raise ContractError(f"row {i} references a vertex >= n")
            if (row >> i) & 1:
                raise ContractError(f"self-loop at vertex {i}")
            for j in _bits(row):
                if not (self.adj[j] >> i) & 1:
                    raise ContractError(f"asymmetric adjacency at ({i}, {j})")

    @classmethod
    def from_edges(cls, n: int, edges: Iterable[tuple[int, int]]) -> "Graph":
        adj = [0] * n
        for i, j in edges:
            if i == j:
                raise ContractError(f"self-loop at vertex {i}")
            if not (0 <= i < n and 0 <= j < n):
                raise ContractError(f"edge ({i}, {j}) out of range for n={n}")
            adj[i] |= 1 << j
            adj[j] |= 1 << i
        return cls(n, tuple(adj))

    @classmethod
    def from_dense(cls, a) -> "Graph":
        a = np.asarray(a)
        n = a.shape[0]
        return cls(n, tuple(sum(int(a[i, j] != 0) << j for j in range(n)) for i in range(n)))

    @classmethod
    def empty(cls, n: int) -> "Graph":
        return cls(n, (0,) * n)

    def has_edge(self, i: int, j: int) -> bool:
        return bool((self.adj[i] >> j) & 1)

    def degree(self, i: int) -> int:
        return self.adj[i].bit_count()

    def edges(self) -> list[tuple[int, int]]:
        return [(i, j) for i in range(self.n) for j in _bits(self.adj[i]) if i < j]

    def to_dense(self) -> np.ndarray:
        out = np.zeros((self.n, self.n), dtype=np.uint8)
        for i, j in self.edges():
            out[i, j] = out[j, i] = 1
        return out


@dataclass(frozen=True)
class Bipartition:
    """Split of ``n`` qubits into a measured set A (``a_mask``) and its complement B."""

    n: int
    a_mask: int

    def __post_init__(self):
        if self.n < 0 or self.a_mask < 0 or self.a_mask >> self.n:
            raise ContractError(f"a_mask {self.a_mask:#b} is not a subset of range({self.n})")

    @classmethod
    def from_a(cls, n: int, a: Iterable[int]) -> "Bipartition":
        mask = 0
        for v in a:
            if not 0 <= v < n:
                raise ContractError(f"vertex {v} out of range for n={n}")
            mask |= 1 << v
        return cls(n, mask)

    @classmethod
    def from_b(cls, n: int, b: Iterable[int]) -> "Bipartition":
        comp = cls.from_a(n, b)
        return cls(n, ((1 << n) - 1) & ~comp.a_mask)

    @property
    def b_mask(self) -> int:
        return ((1 << self.n) - 1) & ~self.a_mask

    @property
    def a(self) -> tuple[int, ...]:
        return tuple(_bits(self.a_mask))

    @property
    def b(self) -> tuple[int, ...]:
        return tuple(_bits(self.b_mask))

    @property
    def n_a(self) -> int:
        return self.a_mask.bit_count()

    @property
    def n_b(self) -> int:
        return self.n - self.n_a

    def require_even_b(self) -> None:
        if self.n_b % 2:
            raise ContractError(f"|B| = {self.n_b} is odd; the n-tangle needs even |B|")


ENSEMBLE_KINDS = ("uniform", "isomorphism-class", "family")
FAMILIES = ("path", "cycle", "complete", "regular")


@dataclass(frozen=True)
class EnsembleSpec:
    """A distribution over bipartitioned graphs.

    ``n_a=None`` is only meaningful for ``isomorphism-class`` and means one
    uniformly random bipartition (nonempty A, nonempty even B) per record.
    """

    kind: str
    n: int
    n_a: Optional[int] = None
    family: Optional[str] = None
    k: Optional[int] = None
    graph6_path: Optional[str] = None
    connected_only: bool = False

    def __post_init__(self):
        if self.kind not in ENSEMBLE_KINDS:
            raise ContractError(f"unknown ensemble kind {self.kind!r}")
        if self.n < 2:
            raise ContractError("ensembles need at least two vertices")
        if self.n_a is None:
            if self.kind != "isomorphism-class":
                raise ContractError(f"{self.kind} ensemble needs n_a")
        else:
            if not 1 <= self.n_a < self.n:
                raise ContractError(f"need 1 <= n_a < n, got n_a={self.n_a}, n={self.n}")
            if (self.n - self.n_a) % 2:
                raise ContractError(f"|B| = {self.n - self.n_a} is odd")
        if self.kind == "family":
            if self.family not in FAMILIES:
                raise ContractError(f"unknown family {self.family!r}")
            _check_family(self.family, self.n, self.k)
        if self.kind == "isomorphism-class" and not self.graph6_path:
            raise ContractError("isomorphism-class ensemble needs a graph6 source")

    def as_dict(self) -> dict:
        return {
            "kind": self.kind,
            "n": self.n,
            "n_a": self.n_a,
            "family": self.family,
            "k": self.k,
            "graph6_path": self.graph6_path,
            "connected_only": self.connected_only,
        }


def _bits(mask: int) -> Iterator[int]:
    while mask:
        low = mask & -mask
        yield low.bit_length() - 1
        mask ^= low


# -- graph6 -----------------------------------------------------------------


def _pairs(n: int) -> Iterator[tuple[int, int]]:
    for j in range(1, n):
        for i in range(j):
            yield i, j


def parse_graph6(line: str) -> Graph:
    """Decode one short-form graph6 record (n < 63)."""
    s = line.rstrip("\r\n")
    if not s:
        raise Graph6ParseError("empty record", 0)
    for pos, ch in enumerate(s):
        if not 63 <= ord(ch) <= 126:
            raise Graph6ParseError(f"byte {ord(ch)} outside 63..126", pos)
    if s[0] == "~":
        raise Graph6ParseError("long-form header (n >= 63) is not supported", 0)
    n = ord(s[0]) - 63
    nbits = n * (n - 1) // 2
    need = (nbits + 5) // 6
    payload = s[1:]
    if len(payload) < need:
        raise Graph6ParseError(f"expected {need} payload bytes, got {len(payload)}", len(s))
    if len(payload) > need:
        raise Graph6ParseError("trailing bytes after payload", 1 + need)
    adj = [0] * n
    for k, (i, j) in enumerate(_pairs(n)):
        if ((ord(payload[k // 6]) - 63) >> (5 - k % 6)) & 1:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    if need and nbits % 6:
        pad = (ord(payload[-1]) - 63) & ((1 << (6 - nbits % 6)) - 1)
        if pad:
            raise Graph6ParseError("nonzero padding bits", len(s) - 1)
    return Graph(n, tuple(adj))


def to_graph6(g: Graph) -> str:
    if g.n >= 63:
        raise CapabilityError("short-form graph6 needs n < 63")
    bits = [int(g.has_edge(i, j)) for i, j in _pairs(g.n)]
    bits += [0] * (-len(bits) % 6)
    out = [chr(63 + g.n)]
    for k in range(0, len(bits), 6):
        chunk = bits[k : k + 6]
        out.append(chr(63 + sum(b << (5 - t) for t, b in enumerate(chunk))))
    return "".join(out)


def read_graph6(path) -> Iterator[Graph]:
    """Stream graphs from a newline-delimited graph6 file, skipping blank lines."""
    with open(Path(path), "r", encoding="ascii") as fh:
        for lineno, line in enumerate(fh, 1):
            if not line.strip():
                continue
            try:
                yield parse_graph6(line)
            except Graph6ParseError as exc:
                raise Graph6ParseError(f"line {lineno}: {exc}", exc.offset) from None


def write_graph6(path, graphs: Iterable[Graph]) -> None:
    with open(Path(path), "w", encoding="ascii") as fh:
        for g in graphs:
            fh.write(to_graph6(g) + "\n")


# -- matrix equation inputs -------------------------------------------------


def gamma_d_ints(adj: Sequence[int], a: Sequence[int], b: Sequence[int]) -> tuple[list[int], int]:
    """Integer form of (Gamma_BA, D): one column bitmask per B-row, D as a bitmask."""
    rows = []
    d = 0
    b_mask = 0
    for v in b:
        b_mask |= 1 << v
    for r, v in enumerate(b):
        row_bits = adj[v]
        rows.append(sum(((row_bits >> u) & 1) << c for c, u in enumerate(a)))
        if not (row_bits & b_mask).bit_count() & 1:
            d |= 1 << r
    return rows, d


def gamma_and_d(g: Graph, bp: Bipartition) -> tuple[Gf2Matrix, Gf2Vector]:
    """The |B| x |A| cross block of the adjacency and the B-degree parity vector.

    ``D[b] = 1`` iff b has even degree (zero included) inside the subgraph on B.
    A and B are ordered ascending.
    """
    if bp.n != g.n:
        raise ContractError(f"bipartition is over {bp.n} vertices, graph has {g.n}")
    a, b = bp.a, bp.b
    rows, d = gamma_d_ints(g.adj, a, b)
    return Gf2Matrix.from_row_ints(rows, len(a)), Gf2Vector.from_int(d, len(b))


# -- samplers and families ----------------------------------------------------


def sample_uniform(n: int, rng: np.random.Generator) -> Graph:
    """Each of the n(n-1)/2 possible edges independently with probability 1/2."""
    if n < 1:
        raise ContractError("need n >= 1")
    coins = rng.integers(0, 2, size=n * (n - 1) // 2)
    adj = [0] * n
    for coin, (i, j) in zip(coins, _pairs(n)):
        if coin:
            adj[i] |= 1 << j
            adj[j] |= 1 << i
    return Graph(n, tuple(adj))


def _check_family(kind: str, n: int, k: Optional[int]) -> None:
    if kind == "path" and n < 1:
        raise ContractError("path needs n >= 1")
    if kind == "cycle" and n < 3:
        raise ContractError("cycle needs n >= 3")
    if kind == "complete" and n < 1:
        raise ContractError("complete graph needs n >= 1")
    if kind == "regular":
        if k is None or not 0 <= k < n or (k * n) % 2:
            raise ContractError(f"no {k}-regular graph on {n} vertices")


def make_family(
    kind: str,
    n: int,
    rng: Optional[np.random.Generator] = None,
    k: Optional[int] = None,
    max_tries: int = 100_000,
) -> Graph:
    """Path, cycle, complete, or random k-regular (pairing model, full rejection)."""
    if kind not in FAMILIES:
        raise ContractError(f"unknown family {kind!r}")
    _check_family(kind, n, k)
    if kind == "path":
        return Graph.from_edges(n, [(i, i + 1) for i in range(n - 1)])
    if kind == "cycle":
        return Graph.from_edges(n, [(i, (i + 1) % n) for i in range(n)])
    if kind == "complete":
        return Graph.from_edges(n, itertools.combinations(range(n), 2))
    if rng is None:
        raise ContractError("random regular graphs need an rng")
    points = np.repeat(np.arange(n), k)
    for _ in range(max_tries):
        pairs = rng.permutation(points).reshape(-1, 2)
        adj = [0] * n
        ok = True
        for u, v in pairs:
            u, v = int(u), int(v)
            if u == v or (adj[u] >> v) & 1:
                ok = False
                break
            adj[u] |= 1 << v
            adj[v] |= 1 << u
        if ok:
            return Graph(n, tuple(adj))
    raise RuntimeError(f"pairing model found no simple {k}-regular graph in {max_tries} tries")


def path_graph(n: int) -> Graph:
    return make_family("path", n)


def connected(g: Graph) -> bool:
    if g.n == 0:
        return True
    seen = 1
    frontier = 1
    while frontier:
        nxt = 0
        for v in _bits(frontier):
            nxt |= g.adj[v]
        frontier = nxt & ~seen
        seen |= frontier
    return seen == (1 << g.n) - 1


def random_bipartition(
    n: int, rng: np.random.Generator, n_a: Optional[int] = None
) -> Bipartition:
    """Uniform bipartition with |A| = n_a, or (n_a=None) uniform over all
    bipartitions with nonempty A and nonempty even B."""
    if n_a is not None:
        if not 0 <= n_a <= n:
            raise ContractError(f"n_a={n_a} out of range for n={n}")
        return Bipartition.from_a(n, (int(v) for v in rng.choice(n, size=n_a, replace=False)))
    if n < 3:
        raise ContractError("need n >= 3 for a nonempty A and nonempty even B")
    full = (1 << n) - 1
    while True:
        mask = int(rng.integers(0, 1 << n))
        n_b = n - mask.bit_count()
        if mask and mask != full and n_b % 2 == 0:
            return Bipartition(n, mask)


def bipartitions(n: int, n_a: Optional[int] = None) -> Iterator[Bipartition]:
    """All bipartitions with |A| = n_a, or all with nonempty A and nonempty even B."""
    if n_a is not None:
        for a in itertools.combinations(range(n), n_a):
            yield Bipartition.from_a(n, a)
        return
    for mask in range(1, (1 << n) - 1):
        if (n - mask.bit_count()) % 2 == 0:
            yield Bipartition(n, mask)


def all_graphs(n: int) -> Iterator[Graph]:
    """Every labelled graph on n vertices; edge bit k follows graph6 pair order."""
    pairs = list(_pairs(n))
    for code in range(1 << len(pairs)):
        adj = [0] * n
        for k, (i, j) in enumerate(pairs):
            if (code >> k) & 1:
                adj[i] |= 1 << j
                adj[j] |= 1 << i
        yield Graph(n, tuple(adj))


# -- bipartition isomorphism ---------------------------------------------------


@lru_cache(maxsize=None)
def _colour_perms(n_a: int, n_b: int) -> np.ndarray:
    """All colour-preserving slot orders as rows; A slots first, then B slots."""
    perms_a = list(itertools.permutations(range(n_a)))
    perms_b = list(itertools.permutations(range(n_a, n_a + n_b)))
    pa = np.array(perms_a, dtype=np.intp).reshape(len(perms_a), n_a)
    pb = np.array(perms_b, dtype=np.intp).reshape(len(perms_b), n_b)
    rows = np.concatenate(
        [np.repeat(pa, len(pb), axis=0), np.tile(pb, (len(pa), 1))], axis=1
    )
    return rows


@lru_cache(maxsize=None)
def _block_pairs(n_a: int, n_b: int) -> tuple[np.ndarray, np.ndarray]:
    """Slot pairs for the serialization: A-block, then B-block, then cross block."""
    ia = [(i, j) for i, j in itertools.combinations(range(n_a), 2)]
    ib = [(n_a + i, n_a + j) for i, j in itertools.combinations(range(n_b), 2)]
    cross = [(i, n_a + j) for i in range(n_a) for j in range(n_b)]
    allp = ia + ib + cross
    if not allp:
        return np.zeros(0, dtype=np.intp), np.zeros(0, dtype=np.intp)
    u, v = zip(*allp)
    return np.array(u, dtype=np.intp), np.array(v, dtype=np.intp)


def canonical_bipartition_key(g: Graph, bp: Bipartition) -> bytes:
    """Equal keys iff some relabelling maps A to A, B to B and edges to edges.

    Brute force over all |A|! |B|! colour-preserving relabellings; the key is
    the lexicographically smallest serialized (A-subgraph, B-subgraph,
    cross-block) bit string.
    """
    if g.n > CANONICAL_MAX_N:
        raise CapabilityError(f"canonical keys are brute force; n={g.n} > {CANONICAL_MAX_N}")
    if bp.n != g.n:
        raise ContractError("bipartition and graph sizes differ")
    a, b = bp.a, bp.b
    verts = np.array(a + b, dtype=np.intp)
    perms = _colour_perms(len(a), len(b))
    u, v = _block_pairs(len(a), len(b))
    header = bytes([g.n, len(a)])
    if u.size == 0:
        return header
    dense = g.to_dense()
    slot_vertex = verts[perms]  # (P, n): vertex placed in each slot
    bits = dense[slot_vertex[:, u], slot_vertex[:, v]]
    packed = np.packbits(bits, axis=1)
    best = np.lexsort(packed.T[::-1])[0]
    return header + packed[best].tobytes()


__all__ = [
    "Bipartition",
    "EnsembleSpec",
    "Graph",
    "all_graphs",
    "bipartitions",
    "canonical_bipartition_key",
    "connected",
    "gamma_and_d",
    "gamma_d_ints",
    "make_family",
    "parse_graph6",
    "path_graph",
    "random_bipartition",
    "read_graph6",
    "sample_uniform",
    "to_graph6",
    "write_graph6",
]
