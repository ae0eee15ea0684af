"""Exact and asymptotic cost formulas for multi-pivot quicksort.

Everything that is a ratio of integers is computed with exact rational
arithmetic (``fractions.Fraction``); floating point enters only through
logarithms and root finding.

Conventions used throughout:

* ``k`` pivots split the input into groups 0..k; ``m = ceil((k+1)/2)``.
* A per-partition cost ``E(P_n) = a*n + O(1)`` turns into total sorting cost
  ``a/(H_{k+1}-1) * n ln n + O(n)``, or ``a/H(t) * n ln n`` under pivot
  sampling with vector t.
* The "scanned weight" of group g is the number of cursors that travel over
  a group-g cell during partitioning: m-g for g < m and g-m+1 for g >= m.
"""

from __future__ import annotations

import itertools
import math
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import trees
from .trees import ComparisonTree

__all__ = [
    "harmonic",
    "leading_coefficient",
    "recurrence_solve_exact",
    "recurrence_solve_float",
    "partition_se",
    "partition_scanned_exact",
    "partition_writes_exact",
    "partition_rotations_exact",
    "placement_writes_exact",
    "partition_wa",
    "partition_as",
    "rotate_coefficient",
    "saved_writes_coefficient",
    "scanned_weight_vector",
    "sampling_entropy",
    "sampling_comparison_coeff",
    "sampling_scanned_coeff",
    "sampling_leading",
    "best_sampling_table",
    "entropy_tau",
    "minimize_linear_over_entropy",
    "c_tau",
    "a_tau",
    "c_tau_extremal",
    "opt_tau_scanned",
    "opt_tau_total_extremal",
    "opt_tau_total_limit",
    "brute_force_optimal_partition_cost",
    "cache_miss_estimate",
]


_HARMONIC_CACHE: list[Fraction] = [Fraction(0)]


def harmonic(n: int) -> Fraction:
    """H_n = sum_{i=1..n} 1/i, exactly."""
    if n < 0:
        raise ValueError("harmonic number undefined for negative n")
    while len(_HARMONIC_CACHE) <= n:
        i = len(_HARMONIC_CACHE)
        _HARMONIC_CACHE.append(_HARMONIC_CACHE[-1] + Fraction(1, i))
    return _HARMONIC_CACHE[n]


def leading_coefficient(k: int, a) -> float:
    """Leading sorting-cost constant a/(H_{k+1} - 1) for per-partition cost a*n."""
    return float(Fraction(a) / (harmonic(k + 1) - 1)) if isinstance(a, (int, Fraction)) \
        else a / float(harmonic(k + 1) - 1)


def _middle(k: int) -> int:
    return (k + 2) // 2  # ceil((k+1)/2)


# ---------------------------------------------------------------------------
# The k-pivot recurrence
# ---------------------------------------------------------------------------

def recurrence_solve_exact(
    k: int,
    partition_cost: Callable[[int], Fraction],
    n_max: int,
) -> list[Fraction]:
    """Exact table E(C_0..C_{n_max}) of the k-pivot recurrence

        E(C_n) = E(P_n) + (k+1)/C(n,k) * sum_{l=0}^{n-k} C(n-l-1, k-1) E(C_l)

    with cost 0 for n < k.  The binomial weight is expanded as a polynomial
    in l so that running moments sum_l l^e E(C_l) make every step O(k^2)
    rational operations instead of O(n).
    """
    if n_max > 5000:
        raise ValueError("recurrence table capped at n_max = 5000")
    table: list[Fraction] = [Fraction(0)] * (min(k, n_max + 1))
    if n_max < k:
        return table
    # moments[e] = sum_{l=0}^{upper} l^e E(C_l); upper tracks n - k.
    moments = [Fraction(0)] * k
    fact_km1 = math.factorial(k - 1)
    for n in range(k, n_max + 1):
        # Fold in l = n - k before using the moments for this n.
        l = n - k
        if l < len(table):
            e_l = table[l]
            if e_l:
                p = 1
                for e in range(k):
                    moments[e] += p * e_l
                    p *= l
        # C(n-1-l, k-1) = prod_{d=0}^{k-2} ((n-1-d) - l) / (k-1)!
        # Expand the product into coefficients of l^e.
        coeffs = [1]  # polynomial in l, ascending powers
        for d in range(k - 1):
            c = n - 1 - d
            nxt = [0] * (len(coeffs) + 1)
            for e, ce in enumerate(coeffs):
                nxt[e] += ce * c
                nxt[e + 1] -= ce
            coeffs = nxt
        s = sum(coeffs[e] * moments[e] for e in range(k))
        weighted = Fraction(k + 1) * s / (fact_km1 * math.comb(n, k))
        table.append(Fraction(partition_cost(n)) + weighted)
    return table


def _recurrence_float_loop(k: int, costs: np.ndarray, cutoff: int) -> np.ndarray:
    n_max = costs.shape[0] - 1
    table = np.zeros(n_max + 1)
    moments = np.zeros(k)
    coeffs = np.zeros(k + 1)
    fact_km1 = 1.0
    for d in range(1, k):
        fact_km1 *= d
    for n in range(k, n_max + 1):
        l = n - k
        e_l = table[l]
        if e_l != 0.0:
            p = 1.0
            for e in range(k):
                moments[e] += p * e_l
                p *= l
        if n <= cutoff:
            continue
        cnk = 1.0
        for d in range(k):
            cnk = cnk * (n - d) / (d + 1)
        for e in range(k + 1):
            coeffs[e] = 0.0
        coeffs[0] = 1.0
        deg = 0
        for d in range(k - 1):
            c = float(n - 1 - d)
            for e in range(deg + 1, 0, -1):
                coeffs[e] = c * coeffs[e] - coeffs[e - 1]
            coeffs[0] *= c
            deg += 1
        s = 0.0
        for e in range(k):
            s += coeffs[e] * moments[e]
        table[n] = costs[n] + (k + 1) * s / (fact_km1 * cnk)
    return table


try:  # the O(n k^2) moment loop is sequential; JIT it when possible
    import numba as _numba

    _recurrence_float_loop = _numba.njit(cache=True)(_recurrence_float_loop)
except ImportError:  # pragma: no cover - numba is an optional accelerator
    pass


def recurrence_solve_float(k: int, partition_cost: Callable[[int], float],
                           n_max: int, cutoff: Optional[int] = None) -> np.ndarray:
    """Float table E(C_0..C_{n_max}) of the k-pivot recurrence with a cutoff.

    Same recurrence as :func:`recurrence_solve_exact`, evaluated in float64
    with the moment-folding trick so n_max in the millions is practical.
    Subfiles of size <= cutoff cost 0 (the sorter's base case); cutoff
    defaults to k - 1, reproducing the exact solver's boundary.
    """
    if cutoff is None:
        cutoff = k - 1
    costs = np.zeros(n_max + 1)
    if callable(partition_cost):
        for n in range(max(k, cutoff + 1), n_max + 1):
            costs[n] = float(partition_cost(n))
    else:  # precomputed per-n cost vector
        src = np.asarray(partition_cost, dtype=np.float64)
        costs[max(k, cutoff + 1):] = src[max(k, cutoff + 1):n_max + 1]
    return _recurrence_float_loop(k, costs, cutoff)


# ---------------------------------------------------------------------------
# Per-partition coefficients of the rearrangement cost measures
# ---------------------------------------------------------------------------

def partition_se(k: int) -> Fraction:
    """Scanned elements per partitioning step, divided by n."""
    m = _middle(k)
    if k % 2 == 1:
        return Fraction(m + 1, 2)
    return Fraction(m * m, 2 * m - 1)


def partition_wa(k: int) -> Fraction:
    """Write accesses per partitioning step, divided by n."""
    m = _middle(k)
    if k % 2 == 1:
        return Fraction(2 * m**3 + 3 * m**2 - m - 2, 2 * m * (2 * m + 1))
    return Fraction(2 * m**3 - 2 * m - 1, 2 * m * (2 * m - 1))


def partition_as(k: int) -> Fraction:
    """Assignments per partitioning step, divided by n."""
    m = _middle(k)
    if k % 2 == 1:
        return Fraction(2 * m**3 + 6 * m**2 - m - 4, 2 * m * (2 * m + 1))
    return Fraction(2 * m**3 + 3 * m**2 - 5 * m - 2, 2 * m * (2 * m - 1))


def rotate_coefficient(k: int) -> Fraction:
    """Rotate operations per partitioning step, divided by n."""
    m = _middle(k)
    if k % 2 == 1:
        return Fraction(3 * m**2 - 2, 2 * m * (2 * m + 1))
    return Fraction(3 * m**2 - 3 * m - 1, 2 * m * (2 * m - 1))


def saved_writes_coefficient(k: int) -> Fraction:
    """Elements scanned but not written (groups m-1 / m found in place), per n."""
    m = _middle(k)
    if k % 2 == 1:
        return Fraction(m + 1, m * (2 * m + 1))
    return Fraction(2 * m + 1, 2 * m * (2 * m - 1))


def scanned_weight_vector(k: int) -> tuple[int, ...]:
    """Cursor-travel weight of one group-g element: the cell holding it is
    passed by the crossing cursor once and by every border cursor whose
    terminal region lies beyond the group."""
    m = _middle(k)
    return tuple(m - g if g < m else g - m + 1 for g in range(k + 1))


def _exchange_quadratic_forms(k: int) -> tuple[list[list[int]], list[list[int]]]:
    """Coefficient matrices (writes, rotations) with E[X | a] =
    (1/(n-k)) * sum_{g,h} c[g][h] a_g a_h for one Exchange_k run.

    Derivation: conditioned on the group sizes a, each group-g element lands
    in the left cursor range (the first L = sum_{h<m} a_h cells) with
    probability L/(n-k), so every rotation class contributes a bilinear term
    in (a_g, L) or (a_g, n-k-L).
    """
    m = _middle(k)
    cw = [[0] * (k + 1) for _ in range(k + 1)]
    cr = [[0] * (k + 1) for _ in range(k + 1)]
    for g in range(k + 1):
        for h in range(k + 1):
            if g < m - 1 and h < m:  # i-side solo rotation, length m-g
                cw[g][h] += m - g
                cr[g][h] += 1
            if g > m and h >= m:  # j-side solo rotation, length g-m+1
                cw[g][h] += g - m + 1
                cr[g][h] += 1
            if g >= m and h < m:  # crossing rotation, charged g+1 writes...
                cw[g][h] += g + 1
                cr[g][h] += 1
            if g < m and h >= m:  # ...minus g for the paired small label
                cw[g][h] -= g
    return cw, cr


def _exchange_expectation(c: Sequence[Sequence[int]], k: int, n: int) -> Fraction:
    """Fold a quadratic form over the composition moments of (a_0..a_k)."""
    np_ = n - k
    if np_ <= 0:
        return Fraction(0)
    diag = sum(c[g][g] for g in range(k + 1))
    off = sum(c[g][h] for g in range(k + 1) for h in range(k + 1) if g != h)
    e_diag = Fraction(np_ * (2 * np_ + k), (k + 1) * (k + 2))
    e_off = Fraction(np_ * (np_ - 1), (k + 1) * (k + 2))
    return (diag * e_diag + off * e_off) / np_


def partition_scanned_exact(k: int, n: int) -> Fraction:
    """E[scanned elements] of one Exchange_k run on n keys, exact."""
    return partition_se(k) * (n - k) if n > k else Fraction(0)


def partition_writes_exact(k: int, n: int) -> Fraction:
    """E[write accesses] of one Exchange_k run on n keys, exact (pivot
    placement excluded; see :func:`placement_writes_exact`)."""
    return _exchange_expectation(_exchange_quadratic_forms(k)[0], k, n)


def partition_rotations_exact(k: int, n: int) -> Fraction:
    """E[rotate operations] of one Exchange_k run on n keys, exact (pivot
    placement excluded)."""
    return _exchange_expectation(_exchange_quadratic_forms(k)[1], k, n)


def placement_writes_exact(k: int, n: int) -> Fraction:
    """E[write accesses] of the pinned pivot-placement schedule, exact.

    Pivot p_i jumps the nonempty segments below segment i (one write per
    segment plus its own); rotations are exactly k.  P(a_g > 0) = (n-k)/n
    under the uniform pivot-set model.
    """
    if n <= k:
        return Fraction(0)
    return k + Fraction(k * (k + 1), 2) * Fraction(n - k, n)


# ---------------------------------------------------------------------------
# Pivot sampling
# ---------------------------------------------------------------------------

def _kappa(t: Sequence[int]) -> int:
    return len(t) - 1 + sum(t)


def sampling_entropy(t: Sequence[int]) -> Fraction:
    """H(t) = sum (t_i+1)/(kappa+1) * (H_{kappa+1} - H_{t_i+1})."""
    kap = _kappa(t)
    h_all = harmonic(kap + 1)
    return sum(
        (Fraction(ti + 1, kap + 1) * (h_all - harmonic(ti + 1)) for ti in t),
        Fraction(0),
    )


def sampling_comparison_coeff(tree: ComparisonTree, t: Sequence[int]) -> Fraction:
    """Per-n comparison coefficient under sampling vector t and a fixed tree."""
    kap = _kappa(t)
    return sum(
        (Fraction(d * (ti + 1), kap + 1) for d, ti in zip(tree.depths, t)),
        Fraction(0),
    )


def sampling_scanned_coeff(k: int, t: Sequence[int]) -> Fraction:
    """Per-n scanned-elements coefficient under sampling vector t."""
    kap = _kappa(t)
    return sum(
        (Fraction(w * (ti + 1), kap + 1)
         for w, ti in zip(scanned_weight_vector(k), t)),
        Fraction(0),
    )


def sampling_leading(a, t: Sequence[int]) -> float:
    """Leading sorting-cost constant a/H(t)."""
    return float(Fraction(a) / sampling_entropy(t))


def _partitions(total: int, parts: int) -> list[tuple[int, ...]]:
    """Multisets: weakly decreasing tuples of `parts` nonnegative ints summing
    to `total`."""
    out: list[tuple[int, ...]] = []

    def rec(remaining: int, slots: int, cap: int, acc: tuple[int, ...]) -> None:
        if slots == 0:
            if remaining == 0:
                out.append(acc)
            return
        for v in range(min(cap, remaining), -1, -1):
            if v * slots < remaining:
                break
            rec(remaining - v, slots - 1, v, acc + (v,))

    rec(total, parts, total, ())
    return out


def _arrangement(weights: Sequence[int], values_desc: Sequence[int]) -> tuple[int, ...]:
    """Cost-minimal assignment of the value multiset to positions (large value
    on small weight), lexicographically smallest among the optima."""
    order = sorted(range(len(weights)), key=lambda g: (-weights[g], g))
    t = [0] * len(weights)
    for pos, v in zip(order, sorted(values_desc)):
        t[pos] = v
    return tuple(t)


def best_sampling_table(
    k: int, budget: int, cost_kind: str
) -> tuple[tuple[int, ...], Optional[ComparisonTree], float]:
    """Best (t, tree) for a sampling budget sum(t) == budget.

    cost_kind is "comparisons", "scanned" or "sum".  The search is
    exhaustive over compositions of the budget: since H(t) is symmetric in
    the entries of t, compositions reduce to value multisets plus the
    rearrangement-optimal assignment to groups.  Ties are broken by
    lexicographically smallest t, then smallest tree preorder.
    """
    if cost_kind not in ("comparisons", "scanned", "sum"):
        raise ValueError(f"unknown cost kind {cost_kind!r}")
    scan_w = scanned_weight_vector(k)
    if cost_kind == "scanned":
        weight_rows = [None]
        weights = [scan_w]
    else:
        all_trees = trees.enumerate_trees(k)
        weight_rows = list(all_trees)
        if cost_kind == "comparisons":
            weights = [t.depths for t in all_trees]
        else:
            weights = [tuple(d + w for d, w in zip(t.depths, scan_w))
                       for t in all_trees]

    msets = _partitions(budget, k + 1)
    kap = k + budget
    h_exact = [sampling_entropy(ms) for ms in msets]
    h = np.array([float(x) for x in h_exact])
    # Min over assignments: pair ascending weights with descending values.
    W = np.array([sorted(w) for w in weights], dtype=np.float64)
    V = np.array(msets, dtype=np.float64)  # rows already descending
    numer = W @ V.T + W.sum(axis=1)[:, None]  # sum_g w_g (t_g + 1)
    vals = numer / (kap + 1) / h[None, :]
    best_val = vals.min()
    cand = np.argwhere(vals <= best_val * (1 + 1e-9))

    best: Optional[tuple[Fraction, tuple[int, ...], tuple[int, ...]]] = None
    best_tree: Optional[ComparisonTree] = None
    for ti, mi in cand:
        wrow = weights[ti]
        ms = msets[mi]
        t_vec = _arrangement(wrow, ms)
        exact = Fraction(
            sum(w * (tv + 1) for w, tv in zip(wrow, t_vec)), kap + 1
        ) / h_exact[mi]
        tree = weight_rows[ti]
        key = (exact, t_vec, tree.preorder if tree is not None else ())
        if best is None or key < best:
            best = key
            best_tree = tree
    assert best is not None
    return best[1], best_tree, float(best[0])


# ---------------------------------------------------------------------------
# Idealized group-size vectors tau
# ---------------------------------------------------------------------------

def entropy_tau(tau: Sequence[float]) -> float:
    """Shannon entropy -sum tau_i ln tau_i (natural log)."""
    return -sum(t * math.log(t) for t in tau if t > 0)


def minimize_linear_over_entropy(
    alpha: Sequence[float],
) -> tuple[tuple[float, ...], float]:
    """Minimize (sum alpha_i tau_i) / H(tau) over the open simplex.

    The minimizer is tau_i = x^{alpha_i} where x in (0,1) solves
    1 = sum x^{alpha_i}; the minimum value is -1/ln x.  The objective
    sum x^{alpha_i} is strictly increasing in x, so plain bisection is
    unconditionally convergent.
    """
    if any(a <= 0 for a in alpha):
        raise ValueError("alpha entries must be positive")
    x = _bisect_root(lambda x: sum(x**a for a in alpha) - 1.0)
    tau = tuple(x**a for a in alpha)
    return tau, -1.0 / math.log(x)


def _bisect_root(f: Callable[[float], float], tol: float = 1e-12) -> float:
    """Root of an increasing function on (0, 1)."""
    lo, hi = 0.0, 1.0
    for _ in range(200):
        mid = (lo + hi) / 2
        v = f(mid)
        if abs(v) <= tol:
            return mid
        if v < 0:
            lo = mid
        else:
            hi = mid
    return (lo + hi) / 2


def c_tau(tree: ComparisonTree, tau: Sequence[float]) -> float:
    """Asymptotic per-partition comparisons: sum depth_g * tau_g."""
    return sum(d * t for d, t in zip(tree.depths, tau))


def a_tau(k: int, tau: Sequence[float]) -> float:
    """Asymptotic per-partition scanned elements: sum weight_g * tau_g."""
    return sum(w * t for w, t in zip(scanned_weight_vector(k), tau))


def c_tau_extremal(k: int, tau: Sequence[float]) -> float:
    """Closed form of c_tau for the extremal tree (middle root, pure spines)."""
    m = _middle(k)
    if k % 2 == 1:
        total = m * (tau[0] + tau[k])
        for i in range(1, m):
            total += (i + 1) * (tau[m - i] + tau[m + i - 1])
        return total
    total = m * (tau[0] + tau[1]) + (m - 1) * tau[k]
    for i in range(1, m - 1):
        total += (i + 1) * (tau[m - i] + tau[m + i - 1])
    return total


def opt_tau_scanned(k: int) -> tuple[tuple[float, ...], float]:
    """tau minimizing scanned elements; the value tends to 1/ln 3."""
    return minimize_linear_over_entropy(scanned_weight_vector(k))


def opt_tau_total_extremal(k: int) -> tuple[tuple[float, ...], float]:
    """tau minimizing comparisons + scanned elements under the extremal tree."""
    alpha = [d + w for d, w in zip(trees.extremal_tree(k).depths,
                                   scanned_weight_vector(k))]
    return minimize_linear_over_entropy(alpha)


def opt_tau_total_limit() -> tuple[float, float]:
    """k -> infinity limit of the extremal-tree total cost: the root of
    2x^3 + x^2 = 1 (about 0.6573) and the value -1/ln x (about 2.38)."""
    x = _bisect_root(lambda x: 2 * x**3 + x**2 - 1.0)
    return x, -1.0 / math.log(x)


# ---------------------------------------------------------------------------
# Brute-force oracles and cache heuristics
# ---------------------------------------------------------------------------

def brute_force_optimal_partition_cost(k: int, n: int) -> Fraction:
    """Average over all pivot choices of the best-tree classification cost:

        (1/C(n,k)) * sum_{a_0+...+a_k = n-k} min_tree cost(a_0..a_k).

    Exhaustive over compositions; intended for k <= 3, n <= 60.
    """
    if k > 3 or n > 60:
        raise ValueError("brute force restricted to k <= 3, n <= 60")
    if n < k:
        return Fraction(0)
    depth_rows = [t.depths for t in trees.enumerate_trees(k)]
    total = 0
    # Compositions of n-k into k+1 parts via divider positions.
    for dividers in itertools.combinations(range(n), k):
        prev = -1
        gv = []
        for d in dividers:
            gv.append(d - prev - 1)
            prev = d
        gv.append(n - 1 - prev)
        total += min(sum(d * a for d, a in zip(row, gv)) for row in depth_rows)
    return Fraction(total, math.comb(n, k))


def cache_miss_estimate(k: int, a, B: int, M: int, n: float) -> float:
    """Idealized cache misses for sorting: scanned elements divided by the
    block size B, with the in-cache tail of the recursion (subproblems below
    M elements) subtracted:  a/(B(H_{k+1}-1)) * (n ln n - n ln M).
    """
    lead = float(Fraction(a) / (harmonic(k + 1) - 1)) / B
    return lead * n * math.log(n) - lead * n * math.log(M)
