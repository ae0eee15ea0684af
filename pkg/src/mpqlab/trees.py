"""Comparison trees over k pivots.

A comparison tree is a binary search tree with k internal nodes carrying the
pivot indices 1..k (in inorder) and k+1 leaves carrying the group indices
0..k left to right.  Classifying an element against the pivots walks the tree
from the root; the leaf reached is the element's group, and the number of
comparisons equals the depth of that leaf.

Trees are serialized as the preorder traversal of their internal nodes,
written "[i1,i2,...,ik]".  Because the inorder sequence is fixed (1..k), the
preorder determines the shape uniquely.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Sequence

__all__ = [
    "ComparisonTree",
    "parse",
    "format",
    "depth_profile",
    "cost",
    "avg_cost",
    "enumerate_trees",
    "optimal_tree",
    "balanced_tree",
    "extremal_tree",
]

MAX_ENUMERATION_PIVOTS = 12


@dataclass(frozen=True)
class ComparisonTree:
    """Immutable comparison tree, identified by its preorder traversal."""

    pivot_count: int
    preorder: tuple[int, ...]

    def __post_init__(self) -> None:
        k = self.pivot_count
        if k < 1:
            raise ValueError("pivot_count must be positive")
        if len(self.preorder) != k or sorted(self.preorder) != list(range(1, k + 1)):
            raise ValueError(
                f"preorder must be a permutation of 1..{k}: {self.preorder!r}"
            )
        # Reject permutations that are not valid BST preorders; this also
        # precomputes the leaf depths.
        object.__setattr__(self, "_depths", _leaf_depths(self.preorder))

    @property
    def depths(self) -> tuple[int, ...]:
        """Leaf depths (comparison counts) for groups 0..k."""
        return self._depths  # type: ignore[attr-defined]

    def classify(self, pivots: Sequence, x) -> tuple[int, int]:
        """Walk the tree comparing ``x`` against ``pivots`` (ascending,
        1-indexed by pivot label).  Returns (group index, comparisons made).
        """
        lo, hi = 1, self.pivot_count
        pre = self.preorder
        pos = 0
        comparisons = 0
        while lo <= hi:
            root = pre[pos]
            comparisons += 1
            p = pivots[root - 1]
            if x == p:
                raise ValueError("element equals a pivot; keys must be distinct")
            if x < p:
                # Left subtree holds pivots lo..root-1, laid out right after
                # the root in preorder.
                pos += 1
                hi = root - 1
            else:
                # Right subtree preorder starts after the left subtree, which
                # has root-lo nodes.
                pos += 1 + (root - lo)
                lo = root + 1
        return lo - 1, comparisons

    def __str__(self) -> str:
        return format(self)


def _leaf_depths(preorder: tuple[int, ...]) -> tuple[int, ...]:
    k = len(preorder)
    depths = [0] * (k + 1)

    def walk(pos: int, lo: int, hi: int, depth: int) -> None:
        # Subtree over pivots lo..hi located at preorder[pos:].
        if lo > hi:
            # Empty pivot range: this position is the leaf for group lo-1.
            depths[lo - 1] = depth
            return
        root = preorder[pos]
        if not lo <= root <= hi:
            raise ValueError(f"not a BST preorder: {preorder!r}")
        walk(pos + 1, lo, root - 1, depth + 1)
        walk(pos + 1 + (root - lo), root + 1, hi, depth + 1)

    walk(0, 1, k, 0)
    return tuple(depths)


def parse(s: str) -> ComparisonTree:
    """Parse a preorder string like "[2,1,3]" (spaces tolerated)."""
    text = s.strip()
    if not (text.startswith("[") and text.endswith("]")):
        raise ValueError(f"preorder string must be bracketed: {s!r}")
    body = text[1:-1].strip()
    if not body:
        raise ValueError("empty preorder string")
    try:
        items = tuple(int(part.strip()) for part in body.split(","))
    except ValueError as exc:
        raise ValueError(f"malformed preorder string: {s!r}") from exc
    return ComparisonTree(len(items), items)


def format(tree: ComparisonTree) -> str:
    """Canonical serialization; round-trips through :func:`parse`."""
    return "[" + ",".join(str(i) for i in tree.preorder) + "]"


def depth_profile(tree: ComparisonTree) -> tuple[int, ...]:
    """Comparisons incurred by an element of each group 0..k."""
    return tree.depths


def cost(tree: ComparisonTree, gv: Sequence[int]) -> int:
    """Total comparisons to classify a_h elements of each group h."""
    depths = tree.depths
    if len(gv) != len(depths):
        raise ValueError(
            f"group vector of length {len(gv)} does not match k={tree.pivot_count}"
        )
    return sum(d * a for d, a in zip(depths, gv))


def avg_cost(tree: ComparisonTree, gv: Sequence[int]) -> Fraction:
    """cost / number of elements, as an exact rational."""
    total = sum(gv)
    if total <= 0:
        raise ValueError("average cost undefined for an all-zero group vector")
    return Fraction(cost(tree, gv), total)


@lru_cache(maxsize=None)
def enumerate_trees(k: int) -> tuple[ComparisonTree, ...]:
    """All Catalan(k) tree shapes, ordered by ascending preorder string."""
    if not 1 <= k <= MAX_ENUMERATION_PIVOTS:
        raise ValueError(
            f"enumerate_trees supports 1 <= k <= {MAX_ENUMERATION_PIVOTS}, got {k}"
        )

    def build(lo: int, hi: int) -> list[tuple[int, ...]]:
        if lo > hi:
            return [()]
        shapes = []
        for root in range(lo, hi + 1):
            for left in build(lo, root - 1):
                for right in build(root + 1, hi):
                    shapes.append((root,) + left + right)
        return shapes

    shapes = sorted(build(1, k))
    return tuple(ComparisonTree(k, pre) for pre in shapes)


def optimal_tree(
    gv: Sequence[int],
    candidates: Optional[Iterable[ComparisonTree]] = None,
) -> tuple[ComparisonTree, int]:
    """Minimum-cost tree for the given group sizes.

    With an explicit candidate set the minimum is exhaustive over it;
    otherwise a dynamic program over all shapes finds a global minimizer.
    Ties are broken by the lexicographically smallest preorder string.
    """
    if candidates is not None:
        trees = sorted(candidates, key=lambda t: t.preorder)
        if not trees:
            raise ValueError("empty candidate set")
        best = min(trees, key=lambda t: cost(t, gv))
        return best, cost(best, gv)
    return _optimal_tree_dp(tuple(gv))


def _optimal_tree_dp(gv: tuple[int, ...]) -> tuple[ComparisonTree, int]:
    """Optimum binary search tree with weight only on the leaves.

    States are gap intervals: E[i][j] is the minimal cost of a subtree whose
    leaves are the gaps i..j (and whose internal nodes are pivots i+1..j),
    with depths counted relative to that subtree's root.  Knuth's
    monotonicity bound on the optimal root keeps the table quadratic.
    """
    k = len(gv) - 1
    if k < 1 or any(a < 0 for a in gv):
        raise ValueError(f"invalid group vector: {gv!r}")
    # Prefix sums: weight of gaps i..j is pref[j+1]-pref[i].
    pref = [0] * (k + 2)
    for i, a in enumerate(gv):
        pref[i + 1] = pref[i] + a
    INF = float("inf")
    E = [[0] * (k + 1) for _ in range(k + 1)]
    R = [[0] * (k + 1) for _ in range(k + 1)]  # some optimal root, for bounds
    for i in range(k + 1):
        R[i][i] = i  # sentinel for the Knuth bounds below
    for span in range(1, k + 1):
        for i in range(0, k + 1 - span):
            j = i + span
            w = pref[j + 1] - pref[i]
            best = INF
            best_r = -1
            lo = max(R[i][j - 1], i + 1)
            hi = min(R[i + 1][j] if span > 1 else j, j)
            for r in range(lo, hi + 1):
                c = E[i][r - 1] + E[r][j]
                if c < best:
                    best, best_r = c, r
            E[i][j] = best + w
            R[i][j] = best_r

    def rebuild(i: int, j: int) -> tuple[int, ...]:
        if i == j:
            return ()
        w = pref[j + 1] - pref[i]
        target = E[i][j] - w
        # Smallest optimal root gives the lexicographically smallest preorder.
        for r in range(i + 1, j + 1):
            if E[i][r - 1] + E[r][j] == target:
                return (r,) + rebuild(i, r - 1) + rebuild(r, j)
        raise AssertionError("inconsistent DP table")

    pre = rebuild(0, k)
    return ComparisonTree(k, pre), E[0][k]


def balanced_tree(k: int) -> ComparisonTree:
    """Tree whose leaf depths differ by at most one.

    On odd splits the left subtree receives the extra node, i.e. the root of
    pivots lo..hi is ceil((lo+hi)/2).
    """

    def build(lo: int, hi: int) -> tuple[int, ...]:
        if lo > hi:
            return ()
        root = (lo + hi + 1) // 2
        return (root,) + build(lo, root - 1) + build(root + 1, hi)

    return ComparisonTree(k, build(1, k))


def extremal_tree(k: int) -> ComparisonTree:
    """Root at the middle pivot m = ceil((k+1)/2), pure spines below:
    the left child chain descends m-1..1, the right chain ascends m+1..k.
    """
    m = (k + 2) // 2
    pre = (m,) + tuple(range(m - 1, 0, -1)) + tuple(range(m + 1, k + 1))
    return ComparisonTree(k, pre)
