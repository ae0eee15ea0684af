"""Element classification against k pivots.

Classification of an element means locating its group A_h (p_h < x < p_{h+1})
by walking a comparison tree.  Which tree is used for which element is decided
by a strategy:

* ``FixedTree``      -- one tree for every element.
* ``OracleOptimal``  -- per element, the cheapest tree for the counts of
                        elements *not yet classified* (requires the true group
                        sizes up front).
* ``OnlineCounting`` -- per element, the cheapest tree for the counts of
                        elements *already seen* (no oracle knowledge).
* ``OracleFixed``    -- one tree, cheapest for the true group sizes.
* ``SampledFixed``   -- classify the first floor(n^(3/4)) elements with an
                        initial tree, then switch to the cheapest tree for the
                        observed counts.

Elements are always classified in array order, first to last.  Labels are
strategy-independent; only the comparison count and the tree-usage frequencies
depend on the strategy.

The oracle strategies model an observer who knows the exact partition sizes in
advance.  Under the random-permutation input model (keys plus pivots form a
permutation of 1..n) those sizes follow from the pivot values alone:
a_i = p_{i+1} - p_i - 1 with sentinels p_0 = 0 and p_{k+1} = n + 1.
``classify_sequence`` uses exactly that rank computation and rejects inputs
where it is inconsistent, rather than counting groups in a prepass.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import isqrt
from typing import Optional, Sequence, Union

import numpy as np

from . import trees
from .trees import ComparisonTree

__all__ = [
    "FixedTree",
    "OracleOptimal",
    "OnlineCounting",
    "OracleFixed",
    "SampledFixed",
    "StrategyKind",
    "ClassificationResult",
    "classify_element",
    "classify_sequence",
    "classify_labels",
    "select_tree_oracle_optimal",
    "select_tree_online",
    "sample_size",
    "usage_weighted_cost",
    "true_group_vector",
    "strategy_from_name",
]

# Rows of the (elements x trees) cost product computed per chunk, bounding the
# float64 scratch space to ~56 MB even at k=9 (4862 candidate trees).
_CHUNK_ROWS = 16384


@dataclass(frozen=True)
class FixedTree:
    """Classify every element with the same tree."""

    tree: ComparisonTree


@dataclass(frozen=True)
class OracleOptimal:
    """Per element, pick the cheapest tree for the remaining true counts.

    ``candidates`` restricts the choice; ``None`` means all trees for the
    configured k.
    """

    candidates: Optional[tuple[ComparisonTree, ...]] = None


@dataclass(frozen=True)
class OnlineCounting:
    """Per element, pick the cheapest tree for the counts seen so far."""

    candidates: Optional[tuple[ComparisonTree, ...]] = None


@dataclass(frozen=True)
class OracleFixed:
    """Pick the single cheapest tree for the true group sizes."""

    candidates: Optional[tuple[ComparisonTree, ...]] = None


@dataclass(frozen=True)
class SampledFixed:
    """Classify a floor(n^(3/4)) prefix with ``initial_tree`` (balanced by
    default), then commit to the cheapest tree for the observed counts."""

    initial_tree: Optional[ComparisonTree] = None
    candidates: Optional[tuple[ComparisonTree, ...]] = None


StrategyKind = Union[FixedTree, OracleOptimal, OnlineCounting, OracleFixed, SampledFixed]


@dataclass
class ClassificationResult:
    """Labels plus exact comparison and tree-usage accounting.

    Invariants: sum(tree_usage.values()) == len(labels); comparisons equals
    the sum over elements of the depth of its label's leaf in the tree used
    for it.  ``tree_usage`` holds only trees with nonzero usage.
    """

    labels: np.ndarray
    comparisons: int
    tree_usage: dict[ComparisonTree, int] = field(default_factory=dict)


def classify_element(tree: ComparisonTree, pivots: Sequence, x) -> tuple[int, int]:
    """Group index and comparison count for one element.

    Returns (h, c) with p_h < x < p_{h+1} and c == depth_profile(tree)[h].
    Raises ValueError when x equals a pivot (keys are assumed distinct).
    """
    return tree.classify(pivots, x)


def sample_size(n: int) -> int:
    """floor(n^(3/4)), computed in integer arithmetic.

    Two nested integer square roots of n**3 avoid float rounding for any
    n up to 2**53 and beyond.
    """
    if n < 1:
        raise ValueError("n must be positive")
    return isqrt(isqrt(n**3))


def true_group_vector(pivots: Sequence[int], n: int) -> tuple[int, ...]:
    """Group sizes implied by pivot ranks under the 1..n permutation model.

    a_i = p_{i+1} - p_i - 1 with sentinels p_0 = 0, p_{k+1} = n + 1.  Raises
    ValueError when the pivots cannot be ranks in 1..n (no rank information).
    """
    ps = [0, *map(int, pivots), n + 1]
    if any(q <= p for p, q in zip(ps, ps[1:])):
        raise ValueError(f"pivots {tuple(pivots)!r} are not ascending ranks in 1..{n}")
    return tuple(q - p - 1 for p, q in zip(ps, ps[1:]))


def select_tree_oracle_optimal(remaining, candidates=None) -> ComparisonTree:
    """Cheapest tree for the not-yet-classified counts (ties: smallest preorder)."""
    return trees.optimal_tree(remaining, candidates)[0]


def select_tree_online(seen, candidates=None) -> ComparisonTree:
    """Cheapest tree for the counts observed so far (ties: smallest preorder)."""
    return trees.optimal_tree(seen, candidates)[0]


def classify_sequence(keys, pivots, strategy: StrategyKind) -> ClassificationResult:
    """Classify ``keys`` against ``pivots`` under ``strategy``.

    Keys and pivots must together be consistent with the permutation model
    when an oracle strategy is requested (see module docstring); the other
    strategies accept arbitrary distinct keys.
    """
    pv = np.asarray(pivots)
    k = len(pv)
    if k < 1 or np.any(pv[1:] <= pv[:-1]):
        raise ValueError("pivots must be strictly ascending and nonempty")
    ks = np.asarray(keys)
    if ks.size == 0:
        return ClassificationResult(np.zeros(0, dtype=np.int64), 0, {})
    lo = np.searchsorted(pv, ks, side="left")
    hi = np.searchsorted(pv, ks, side="right")
    if np.any(lo != hi):
        raise ValueError("a key equals a pivot; keys must be distinct")
    labels = lo.astype(np.int64)

    a_true = None
    if isinstance(strategy, (OracleOptimal, OracleFixed)):
        a_true = true_group_vector(pv, len(ks) + k)
        if sum(a_true) != len(ks):
            raise ValueError(
                "pivot ranks inconsistent with the key count; "
                "oracle strategies need the permutation model"
            )
    return classify_labels(labels, k, strategy, a_true)


def classify_labels(
    labels: np.ndarray,
    k: int,
    strategy: StrategyKind,
    a_true: Optional[Sequence[int]] = None,
) -> ClassificationResult:
    """Strategy accounting on a precomputed label sequence.

    The sorter calls this directly during recursion, where the true group
    vector of a subfile is known to the engine.  For oracle strategies
    ``a_true`` must be supplied and match the labels.
    """
    n = len(labels)
    if n == 0:
        return ClassificationResult(np.asarray(labels, dtype=np.int64), 0, {})

    if isinstance(strategy, FixedTree):
        _check_tree(strategy.tree, k)
        return _fixed_result(labels, k, ((strategy.tree, 0, n),))

    if isinstance(strategy, OracleFixed):
        tree = select_tree_oracle_optimal(_require_counts(a_true, labels, k), strategy.candidates)
        return _fixed_result(labels, k, ((tree, 0, n),))

    if isinstance(strategy, SampledFixed):
        lam0 = strategy.initial_tree or trees.balanced_tree(k)
        _check_tree(lam0, k)
        s = min(sample_size(n), n)
        observed = np.bincount(labels[:s], minlength=k + 1)
        tree = select_tree_online(observed, strategy.candidates)
        return _fixed_result(labels, k, ((lam0, 0, s), (tree, s, n)))

    if isinstance(strategy, (OracleOptimal, OnlineCounting)):
        cands = strategy.candidates
        if cands is None:
            cands = trees.enumerate_trees(k)
        cands = tuple(sorted(cands, key=lambda t: t.preorder))
        for t in cands:
            _check_tree(t, k)
        if isinstance(strategy, OracleOptimal):
            counts = _require_counts(a_true, labels, k)
        else:
            counts = None
        return _adaptive_result(labels, k, cands, counts)

    raise TypeError(f"unknown strategy: {strategy!r}")


def usage_weighted_cost(result: ClassificationResult, gv) -> Fraction:
    """Sum over trees of usage * avg_cost(tree, gv), as an exact rational.

    This is the dominant term of the expected comparison count when the true
    group vector is gv; with a single tree in play it is exact.
    """
    total = Fraction(0)
    for tree, count in result.tree_usage.items():
        if count:
            total += count * trees.avg_cost(tree, gv)
    return total


def strategy_from_name(name: str, k: int, tree: Optional[ComparisonTree] = None) -> StrategyKind:
    """CLI-facing strategy constructor."""
    name = name.lower()
    if name in ("fixed", "symmetric"):
        return FixedTree(tree or trees.balanced_tree(k))
    if name in ("oracle-optimal", "oracle"):
        return OracleOptimal()
    if name == "online":
        return OnlineCounting()
    if name == "oracle-fixed":
        return OracleFixed()
    if name in ("sampled", "sampled-fixed"):
        return SampledFixed(initial_tree=tree)
    raise ValueError(f"unknown strategy name: {name!r}")


def _check_tree(tree: ComparisonTree, k: int) -> None:
    if tree.pivot_count != k:
        raise ValueError(f"tree {tree} is for k={tree.pivot_count}, expected k={k}")


def _require_counts(a_true, labels, k) -> np.ndarray:
    if a_true is None:
        raise ValueError("oracle strategy requires the true group vector")
    counts = np.asarray(a_true, dtype=np.int64)
    if counts.shape != (k + 1,) or np.any(counts < 0) or counts.sum() != len(labels):
        raise ValueError(f"group vector {a_true!r} inconsistent with the labels")
    return counts


def _fixed_result(labels, k, segments) -> ClassificationResult:
    """Accounting when the tree is constant on index ranges [start, stop)."""
    comparisons = 0
    usage: dict[ComparisonTree, int] = {}
    for tree, start, stop in segments:
        if stop <= start:
            continue
        seg_counts = np.bincount(labels[start:stop], minlength=k + 1)
        comparisons += int(seg_counts @ np.asarray(tree.depths))
        usage[tree] = usage.get(tree, 0) + (stop - start)
    return ClassificationResult(labels, comparisons, usage)


def _adaptive_result(labels, k, cands, a_true) -> ClassificationResult:
    """Vectorized per-element argmin for OracleOptimal / OnlineCounting.

    The cost of tree t at element v is a dot product of t's depth vector with
    the seen (or remaining) counts before v; computing all of them is a
    matrix product evaluated in float64, which is exact for these integer
    magnitudes.  Candidates are ordered by preorder string, so the first
    argmin realizes the lexicographic tie-break.
    """
    n = len(labels)
    depth_mat = np.array([t.depths for t in cands], dtype=np.float64)  # (T, k+1)
    one_hot = np.zeros((n, k + 1), dtype=np.float64)
    one_hot[np.arange(n), labels] = 1.0
    cum = np.cumsum(one_hot, axis=0)
    # seen counts strictly before each element
    seen = np.empty_like(cum)
    seen[0] = 0.0
    seen[1:] = cum[:-1]
    del cum, one_hot
    if a_true is not None:
        seen = np.asarray(a_true, dtype=np.float64) - seen  # remaining counts
    choice = np.empty(n, dtype=np.int64)
    for start in range(0, n, _CHUNK_ROWS):
        stop = min(start + _CHUNK_ROWS, n)
        costs = seen[start:stop] @ depth_mat.T
        choice[start:stop] = np.argmin(costs, axis=1)
    comparisons = int(depth_mat[choice, labels].sum())
    usage_counts = np.bincount(choice, minlength=len(cands))
    usage = {cands[i]: int(c) for i, c in enumerate(usage_counts) if c}
    return ClassificationResult(labels, comparisons, usage)
