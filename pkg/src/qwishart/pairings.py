"""Pair-partition combinatorics on the signed index set {±1, ..., ±n}.

A pair partition is a perfect matching of the 2n points {-n, ..., -1, 1, ..., n},
drawn on two rows with 1..n on top and -1..-n below.  Internally a partition is
a dense match table indexed by *position*: point j sits at position 2(j-1) for
j > 0 and at position 2|j|-1 for j < 0, so positions read
(1, -1, 2, -2, ..., n, -n) from left to right.  Under this encoding the
identity matching (j paired with -j) is the involution p ^ 1, and crossing
numbers reduce to an interval test on positions.

The traversal of a partition walks the closed alternating paths of its diagram
overlaid with the identity matching.  It yields a permutation of {1..n} (the
order in which top-row points are visited) plus one sign per point recording
whether its vertical edge was walked upward.  Top-to-bottom partitions (every
pair joins a top point to a bottom point) are exactly the all-plus ones and
are in bijection with permutations; the Brauer product restricted to them is
permutation composition.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterator, Sequence

ENUMERATION_BOUND = 9  # 3.4e7 matchings at n = 9; beyond that require allow_large


def _pos(j: int) -> int:
    return 2 * (j - 1) if j > 0 else 2 * (-j) - 1


def _signed(p: int) -> int:
    return (p >> 1) + 1 if (p & 1) == 0 else -((p >> 1) + 1)


@dataclass(frozen=True)
class PairPartition:
    """Fixed-point-free involution of {±1, ..., ±n}, stored as a position table."""

    n: int
    table: tuple[int, ...]

    def __post_init__(self) -> None:
        if self.n < 1:
            raise ValueError("n must be positive")
        size = 2 * self.n
        if len(self.table) != size:
            raise ValueError("match table has wrong length")
        for p, q in enumerate(self.table):
            if not 0 <= q < size or q == p or self.table[q] != p:
                raise ValueError("match table is not a fixed-point-free involution")

    @classmethod
    def from_pairs(cls, pairs: Sequence[Sequence[int]], n: int | None = None) -> "PairPartition":
        flat = [j for pair in pairs for j in pair]
        if n is None:
            n = max(abs(j) for j in flat) if flat else 0
        if sorted(flat) != [j for j in range(-n, n + 1) if j != 0]:
            raise ValueError("pairs must cover {-n..-1, 1..n} exactly once")
        table = [-1] * (2 * n)
        for a, b in pairs:
            table[_pos(a)] = _pos(b)
            table[_pos(b)] = _pos(a)
        return cls(n, tuple(table))

    def match(self, j: int) -> int:
        if j == 0 or abs(j) > self.n:
            raise ValueError(f"index {j} outside ±1..±{self.n}")
        return _signed(self.table[_pos(j)])

    def pairs(self) -> tuple[tuple[int, int], ...]:
        """Pairs as signed indices, each led by its leftmost position, in position order."""
        out = []
        for p, q in enumerate(self.table):
            if p < q:
                out.append((_signed(p), _signed(q)))
        return tuple(out)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        body = ", ".join("{%d,%d}" % pair for pair in self.pairs())
        return f"PairPartition({body})"


@dataclass(frozen=True)
class SignedTraversal:
    """Traversal permutation (1-based images) and per-point signs (+1/-1)."""

    perm: tuple[int, ...]
    signs: tuple[int, ...]

    def __post_init__(self) -> None:
        n = len(self.perm)
        if sorted(self.perm) != list(range(1, n + 1)):
            raise ValueError("perm is not a bijection of 1..n")
        if len(self.signs) != n or any(s not in (1, -1) for s in self.signs):
            raise ValueError("signs must be ±1 per point")

    def cycles(self) -> tuple[tuple[int, ...], ...]:
        return canonical_cycles(self.perm)


@dataclass(frozen=True)
class Coloring:
    """Assignment of colors 1..s to the points 1..n (extended to ±j by |j|)."""

    colors: tuple[int, ...]
    s: int

    def __post_init__(self) -> None:
        if self.s < 1 or not self.colors:
            raise ValueError("need at least one point and one color")
        if any(not 1 <= c <= self.s for c in self.colors):
            raise ValueError("colors must lie in 1..s")

    @classmethod
    def from_colors(cls, colors: Sequence[int]) -> "Coloring":
        return cls(tuple(colors), max(colors))

    @property
    def n(self) -> int:
        return len(self.colors)

    def position_colors(self) -> tuple[int, ...]:
        return tuple(self.colors[p >> 1] for p in range(2 * len(self.colors)))


@dataclass(frozen=True)
class IntegerPartition:
    """Weakly decreasing cycle type; the sum of the parts is the degree."""

    parts: tuple[int, ...]

    def __post_init__(self) -> None:
        if not self.parts or any(p < 1 for p in self.parts):
            raise ValueError("parts must be positive")
        if any(a < b for a, b in zip(self.parts, self.parts[1:])):
            raise ValueError("parts must be weakly decreasing")

    @property
    def n(self) -> int:
        return sum(self.parts)


@dataclass(frozen=True)
class GenusComponent:
    cycles: tuple[int, ...]  # indices into the base traversal's cycle list
    positions: tuple[int, ...]  # 1-based points covered by the component
    genus_defect: int

    @property
    def m(self) -> int:
        return len(self.cycles)


@dataclass(frozen=True)
class GenusDecomposition:
    components: tuple[GenusComponent, ...]

    @property
    def max_defect(self) -> int:
        return max(c.genus_defect for c in self.components)

    def is_pairwise_planar(self) -> bool:
        """True when every component joins exactly two cycles at genus defect zero."""
        return all(c.m == 2 and c.genus_defect == 0 for c in self.components)


# ---------------------------------------------------------------------------
# constructors


def identity_pairing(n: int) -> PairPartition:
    """The matching that pairs j with -j; left identity for the Brauer product."""
    return PairPartition(n, tuple(p ^ 1 for p in range(2 * n)))


def block_pairing(block_sizes: Sequence[int]) -> PairPartition:
    """Top-to-bottom pairing whose traversal cycles are consecutive blocks.

    Block of length k starting at a is the cycle (a, a+1, ..., a+k-1): each j
    pairs with -(j+1) inside the block and the last point pairs with -a.
    """
    if not block_sizes or any(k < 1 for k in block_sizes):
        raise ValueError("block sizes must be positive")
    n = sum(block_sizes)
    table = [-1] * (2 * n)
    a = 1
    for k in block_sizes:
        for j in range(a, a + k - 1):
            table[_pos(j)] = _pos(-(j + 1))
            table[_pos(-(j + 1))] = _pos(j)
        table[_pos(a + k - 1)] = _pos(-a)
        table[_pos(-a)] = _pos(a + k - 1)
        a += k
    return PairPartition(n, tuple(table))


def cycle_type_pairing(cycle_type: IntegerPartition) -> PairPartition:
    return block_pairing(cycle_type.parts)


def from_permutation(perm: Sequence[int]) -> PairPartition:
    """The unique top-to-bottom pairing whose traversal permutation is ``perm``."""
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError("perm is not a bijection of 1..n")
    table = [-1] * (2 * n)
    for j in range(1, n + 1):
        table[_pos(j)] = _pos(-perm[j - 1])
        table[_pos(-perm[j - 1])] = _pos(j)
    return PairPartition(n, tuple(table))


# ---------------------------------------------------------------------------
# table-level kernels (shared by the public operations and the moment engines;
# tables are the raw position-encoded match arrays)


def _traverse_table(table: Sequence[int]) -> tuple[list[list[int]], list[int]]:
    """Ordered traversal cycles (1-based points) and per-point signs."""
    size = len(table)
    visited = bytearray(size >> 1)
    signs = [0] * (size >> 1)
    cycles: list[list[int]] = []
    for start in range(0, size, 2):
        if visited[start >> 1]:
            continue
        cyc: list[int] = []
        p = start ^ 1
        while True:
            # vertical step p -> p^1; walked upward exactly when p is the lower end
            signs[p >> 1] = 1 if (p & 1) else -1
            u = p ^ 1
            if (u & 1) == 0 and not visited[u >> 1]:
                visited[u >> 1] = 1
                cyc.append((u >> 1) + 1)
            w = table[u]
            if (w & 1) == 0 and not visited[w >> 1]:
                visited[w >> 1] = 1
                cyc.append((w >> 1) + 1)
            p = w
            if p == (start ^ 1):
                break
        cycles.append(cyc)
    return cycles, signs


def _cycle_count(table: Sequence[int]) -> int:
    """Number of traversal cycles, via the doubled walk p -> table[p ^ 1]."""
    size = len(table)
    seen = bytearray(size)
    halves = 0
    for p0 in range(size):
        if seen[p0]:
            continue
        halves += 1
        p = p0
        while not seen[p]:
            seen[p] = 1
            p = table[p ^ 1]
    assert halves % 2 == 0
    return halves >> 1


def _brauer_table(top_table: Sequence[int], table: Sequence[int]) -> list[int]:
    """Contract the stacked diagrams; ``top_table`` must be top-to-bottom.

    The four path cases guarantee a fixed-point-free involution; the public
    wrapper re-validates through the PairPartition constructor.
    """
    size = len(table)
    out = [-1] * size
    for p in range(0, size, 2):
        q = table[p]
        out[p] = q if (q & 1) == 0 else top_table[q ^ 1]
    for p in range(1, size, 2):
        r = top_table[p]
        u = table[r ^ 1]
        out[p] = u if (u & 1) == 0 else top_table[u ^ 1]
    return out


def _crossings_table(table: Sequence[int]) -> int:
    edges = [(p, q) for p, q in enumerate(table) if p < q]
    cr = 0
    for i, (a, b) in enumerate(edges):
        for c, d in edges[i + 1 :]:
            if a < c < b < d or c < a < d < b:
                cr += 1
    return cr


def _is_top_to_bottom_table(table: Sequence[int]) -> bool:
    return all((table[p] & 1) == 1 for p in range(0, len(table), 2))


def _induced_colors_table(
    top_table: Sequence[int],
    table: Sequence[int],
    pos_colors: Sequence[int],
    g: Sequence[int] | None = None,
) -> list[int]:
    """Colors inherited through the contraction, one per point 1..n.

    Every contracted edge contains exactly one edge of ``table``; the edge
    keeps that color.  Walking the contracted diagram, the single contracted
    edge crossed after visiting a top point colors that point.
    """
    size = len(table)
    if g is None:
        g = _brauer_table(top_table, table)
    edge_color: dict[int, int] = {}
    for p, q in enumerate(table):
        if p > q:
            continue
        a = p if (p & 1) == 0 else top_table[p ^ 1]
        b = q if (q & 1) == 0 else top_table[q ^ 1]
        key = min(a, b)
        assert key not in edge_color  # one source edge per contracted edge
        edge_color[key] = pos_colors[p]
    out = [0] * (size >> 1)
    visited = bytearray(size >> 1)
    for start in range(0, size, 2):
        if visited[start >> 1]:
            continue
        p = start ^ 1
        last = -1
        while True:
            u = p ^ 1
            if (u & 1) == 0 and not visited[u >> 1]:
                visited[u >> 1] = 1
                last = u >> 1
            w = g[u]
            out[last] = edge_color[min(u, w)]
            if (w & 1) == 0 and not visited[w >> 1]:
                visited[w >> 1] = 1
                last = w >> 1
            p = w
            if p == (start ^ 1):
                break
    assert all(out)
    return out


def _iter_tables(
    n: int,
    pos_colors: Sequence[int] | None = None,
    first_partner: int | None = None,
) -> Iterator[tuple[list[int], int]]:
    """Backtracking enumeration of match tables with incremental crossings.

    Matches the smallest unmatched position with each larger free position in
    ascending order, pruning color-mismatched edges as they are formed; the
    yielded list is reused in place, so copy it before storing.  Fixing
    ``first_partner`` restricts to tables pairing position 0 there, which
    splits the stream into disjoint, independently enumerable parts.
    """
    size = 2 * n
    table = [-1] * size
    stack: list[tuple[int, int, int]] = []
    cr = 0
    p, q = 0, 1
    if first_partner is not None:
        if pos_colors is not None and pos_colors[first_partner] != pos_colors[0]:
            return
        table[0] = first_partner
        table[first_partner] = 0
        stack.append((0, first_partner, 0))
        p = 1 if first_partner != 1 else 2
        q = p + 1
        if p >= size:  # the seeded edge already completes the table
            yield table, 0
            return
    while True:
        placed = False
        while q < size:
            if table[q] < 0 and (pos_colors is None or pos_colors[q] == pos_colors[p]):
                delta = 0
                for _, b, _ in stack:
                    if p < b < q:
                        delta += 1
                table[p] = q
                table[q] = p
                stack.append((p, q, delta))
                cr += delta
                nxt = p + 1
                while nxt < size and table[nxt] >= 0:
                    nxt += 1
                if nxt == size:
                    yield table, cr
                    table[p] = table[q] = -1
                    stack.pop()
                    cr -= delta
                    q += 1
                    continue
                p, q = nxt, nxt + 1
                placed = True
                break
            q += 1
        if placed:
            continue
        if len(stack) == (0 if first_partner is None else 1):
            return
        p, q, delta = stack.pop()
        table[p] = table[q] = -1
        cr -= delta
        q += 1


def _check_bound(n: int, allow_large: bool) -> None:
    if n > ENUMERATION_BOUND and not allow_large:
        raise ValueError(
            f"n={n} exceeds the enumeration bound {ENUMERATION_BOUND}; "
            "pass allow_large=True to override"
        )


# ---------------------------------------------------------------------------
# public operations


def traverse(pp: PairPartition) -> SignedTraversal:
    cycles, signs = _traverse_table(pp.table)
    perm = [0] * pp.n
    for cyc in cycles:
        for a, b in zip(cyc, cyc[1:] + cyc[:1]):
            perm[a - 1] = b
    return SignedTraversal(tuple(perm), tuple(signs))


def brauer(top: PairPartition, other: PairPartition) -> PairPartition:
    """Brauer product; the left factor must be top-to-bottom (no loops arise)."""
    if top.n != other.n:
        raise ValueError("sizes differ")
    if not _is_top_to_bottom_table(top.table):
        raise ValueError("left factor must be a top-to-bottom pairing")
    return PairPartition(top.n, tuple(_brauer_table(top.table, other.table)))


def crossings(pp: PairPartition) -> int:
    return _crossings_table(pp.table)


def is_top_to_bottom(pp: PairPartition) -> bool:
    return _is_top_to_bottom_table(pp.table)


def is_noncrossing(pp: PairPartition) -> bool:
    return _crossings_table(pp.table) == 0


def induced_coloring(top: PairPartition, other: PairPartition, coloring: Coloring) -> Coloring:
    if coloring.n != other.n or top.n != other.n:
        raise ValueError("sizes differ")
    if not _is_top_to_bottom_table(top.table):
        raise ValueError("left factor must be a top-to-bottom pairing")
    pos_colors = coloring.position_colors()
    for p, q in enumerate(other.table):
        if pos_colors[p] != pos_colors[q]:
            raise ValueError("pairing is not color-preserving for the given coloring")
    out = _induced_colors_table(top.table, other.table, pos_colors)
    return Coloring(tuple(out), coloring.s)


def canonical_cycles(perm: Sequence[int]) -> tuple[tuple[int, ...], ...]:
    """Cycles written from their smallest element, ordered by those minima."""
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError("perm is not a bijection of 1..n")
    seen = [False] * (n + 1)
    cycles = []
    for start in range(1, n + 1):
        if seen[start]:
            continue
        cyc = [start]
        seen[start] = True
        j = perm[start - 1]
        while j != start:
            cyc.append(j)
            seen[j] = True
            j = perm[j - 1]
        cycles.append(tuple(cyc))
    return tuple(cycles)


def all_pairings(n: int, *, allow_large: bool = False) -> Iterator[PairPartition]:
    """Every pair partition of {±1..±n}, in a fixed deterministic order."""
    _check_bound(n, allow_large)
    for table, _ in _iter_tables(n):
        yield PairPartition(n, tuple(table))


def color_preserving_pairings(
    coloring: Coloring, *, allow_large: bool = False
) -> Iterator[PairPartition]:
    """Pairings matching only equal-colored points, pruned during construction."""
    _check_bound(coloring.n, allow_large)
    pos_colors = coloring.position_colors()
    for table, _ in _iter_tables(coloring.n, pos_colors):
        yield PairPartition(coloring.n, tuple(table))


def connecting_pairings(
    coloring: Coloring, base: PairPartition, *, allow_large: bool = False
) -> Iterator[PairPartition]:
    """Color-preserving pairings that join every cycle of ``base`` to another one.

    A cycle is joined to another exactly when some edge leaves its point set,
    so a single-cycle base admits no such pairing at all.
    """
    if base.n != coloring.n:
        raise ValueError("sizes differ")
    if not _is_top_to_bottom_table(base.table):
        raise ValueError("base must be a top-to-bottom pairing")
    _check_bound(coloring.n, allow_large)
    pos_colors = coloring.position_colors()
    block = _position_blocks(base)
    r = max(block) + 1
    for table, _ in _iter_tables(coloring.n, pos_colors):
        external = bytearray(r)
        for p, q in enumerate(table):
            if block[p] != block[q]:
                external[block[p]] = 1
        if all(external):
            yield PairPartition(coloring.n, tuple(table))


def _position_blocks(base: PairPartition) -> list[int]:
    """Index of the base traversal cycle owning each position."""
    cycles, _ = _traverse_table(base.table)
    block = [0] * (2 * base.n)
    for k, cyc in enumerate(cycles):
        for j in cyc:
            block[_pos(j)] = k
            block[_pos(-j)] = k
    return block


def noncrossing_image(pp: PairPartition) -> tuple[frozenset[int], ...]:
    """Set partition of {1..n} into traversal cycles of a non-crossing pairing.

    This is a bijection onto the non-crossing set partitions; each traversal
    cycle is decreasing when read from its largest element.
    """
    if not is_noncrossing(pp):
        raise ValueError("pairing has crossings")
    cycles, _ = _traverse_table(pp.table)
    return tuple(frozenset(c) for c in cycles)


def components_and_genus(base: PairPartition, pp: PairPartition) -> GenusDecomposition:
    """Connected components of the overlaid diagrams and their genus defects.

    For a component with n_u points, m_u base cycles, a_u traversal cycles of
    ``pp`` and b_u cycles of the Brauer product, the defect is
    h_u = 2 - (a_u + m_u + b_u - n_u), always a nonnegative integer.
    """
    if base.n != pp.n:
        raise ValueError("sizes differ")
    if not _is_top_to_bottom_table(base.table):
        raise ValueError("base must be a top-to-bottom pairing")
    block = _position_blocks(base)
    r = max(block) + 1
    parent = list(range(r))

    def find(x: int) -> int:
        while parent[x] != x:
            parent[x] = parent[parent[x]]
            x = parent[x]
        return x

    for p, q in enumerate(pp.table):
        a, b = find(block[p]), find(block[q])
        if a != b:
            parent[a] = b
    comp_of_block = [find(k) for k in range(r)]
    comp_pos = [comp_of_block[b] for b in block]

    gamma_halves = _group_half_cycles(pp.table, comp_pos)
    g_table = _brauer_table(base.table, pp.table)
    g_halves = _group_half_cycles(g_table, comp_pos)

    roots = sorted(set(comp_of_block))
    components = []
    for root in roots:
        cyc_idx = tuple(k for k in range(r) if comp_of_block[k] == root)
        positions = tuple(
            (p >> 1) + 1 for p in range(0, 2 * pp.n, 2) if comp_pos[p] == root
        )
        n_u = len(positions)
        a_u = gamma_halves[root] >> 1
        b_u = g_halves[root] >> 1
        h = 2 - (a_u + len(cyc_idx) + b_u - n_u)
        assert h >= 0, "genus defect must be nonnegative"
        components.append(GenusComponent(cyc_idx, positions, h))
    return GenusDecomposition(tuple(components))


def _group_half_cycles(table: Sequence[int], comp_pos: Sequence[int]) -> dict[int, int]:
    """Count cycles of the doubled walk p -> table[p ^ 1] per component."""
    size = len(table)
    seen = bytearray(size)
    counts: dict[int, int] = {}
    for p0 in range(size):
        if seen[p0]:
            continue
        comp = comp_pos[p0]
        counts[comp] = counts.get(comp, 0) + 1
        p = p0
        while not seen[p]:
            assert comp_pos[p] == comp
            seen[p] = 1
            p = table[p ^ 1]
    return counts
