"""Full recursive k-pivot quicksort with exact aggregated cost ledgers.

A sort is configured by :class:`SortConfig`: the pivot count k, a sampling
vector t (pivots are order statistics of a sorted sample of size
kappa = k + sum(t)), a classification strategy, and a small-subarray cutoff
below which insertion sort finishes the job.  Partitioning costs (the
comparison, scanned-element, write, assignment and rotation counters) are kept
separate from base-case costs in the returned ledger.

Two engines produce identical distributions of every counter:

* ``reference`` -- the literal recursive algorithm: sort the sample prefix,
  classify, run Exchange_k, distribute the sample by rotations, recurse on
  the segments in order.  The default.
* ``vectorized`` -- processes one recursion level at a time with numpy and
  recurses on stably extracted subsequences instead of the physical layout.
  Both layouts are deterministic functions of the label sequence, so subfile
  orders stay uniform conditioned on their sizes and every cost statistic has
  the same distribution; individual runs may differ from the reference engine
  at recursion depth >= 2.  Used by the harness for large inputs.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import classify as _classify
from . import trees
from .classify import ClassificationResult, FixedTree, StrategyKind
from .rearrange import CostLedger, exchange_partition, insert_sample
from .theory import scanned_weight_vector

__all__ = [
    "SamplingVector",
    "SortConfig",
    "choose_pivots_from_sample",
    "multipivot_sort",
    "insertion_sort",
    "sample_roles",
]


@dataclass(frozen=True)
class SamplingVector:
    """t = (t_0, ..., t_k): number of unused sample keys left in each group."""

    t: tuple[int, ...]

    def __post_init__(self) -> None:
        if len(self.t) < 2 or any(x < 0 for x in self.t):
            raise ValueError(f"invalid sampling vector: {self.t!r}")

    @property
    def k(self) -> int:
        return len(self.t) - 1

    @property
    def kappa(self) -> int:
        return self.k + sum(self.t)

    @staticmethod
    def zero(k: int) -> "SamplingVector":
        return SamplingVector((0,) * (k + 1))


@dataclass(frozen=True)
class SortConfig:
    k: int
    sampling: Optional[SamplingVector] = None
    strategy: Optional[StrategyKind] = None
    cutoff: int = 64
    engine: str = "reference"
    # Plumbing: the only small sorter provided, and a marker that the whole
    # sort is a deterministic function of (input, config).
    small_sorter: str = "insertion"
    deterministic: bool = True

    def __post_init__(self) -> None:
        sampling = self.sampling if self.sampling is not None else SamplingVector.zero(self.k)
        object.__setattr__(self, "sampling", sampling)
        strategy = self.strategy if self.strategy is not None else FixedTree(trees.balanced_tree(self.k))
        object.__setattr__(self, "strategy", strategy)
        if sampling.k != self.k:
            raise ValueError("sampling vector length does not match k")
        if self.cutoff < sampling.kappa:
            raise ValueError("cutoff must be at least the sample size kappa")
        if self.engine not in ("reference", "vectorized"):
            raise ValueError(f"unknown engine {self.engine!r}")


def insertion_sort(array, lo: int, hi: int, ledger: CostLedger) -> None:
    """Sort array[lo:hi] ascending, charging the base-case counters.

    Comparisons count every key-vs-key test of the inner loop; assignments
    count the element shifts plus, when the key moved at all, saving and
    re-placing it.
    """
    for idx in range(lo + 1, hi):
        key = array[idx]
        j = idx - 1
        shifts = 0
        while j >= lo:
            ledger.base_comparisons += 1
            if array[j] > key:
                array[j + 1] = array[j]
                shifts += 1
                j -= 1
            else:
                break
        if shifts:
            array[j + 1] = key
            ledger.base_assignments += shifts + 2


def sample_roles(t) -> list:
    """Cell roles of the sorted sample prefix: group index for an unused
    sample key, the marker "pivot" for a pivot cell."""
    roles: list = []
    k = len(t) - 1
    for g in range(k + 1):
        roles.extend([g] * t[g])
        if g < k:
            roles.append("pivot")
    return roles


def choose_pivots_from_sample(array, sampling: SamplingVector, ledger: CostLedger, lo: int = 0):
    """Sort the sample prefix in place and read off the pivot order statistics.

    p_i = sample[i + t_0 + ... + t_{i-1}] (1-based); the sample sort is
    charged to the base-case counters.
    """
    kappa = sampling.kappa
    if lo + kappa > len(array):
        raise ValueError("sample larger than the array")
    insertion_sort(array, lo, lo + kappa, ledger)
    pivots = []
    pos = lo - 1
    for i in range(sampling.k):
        pos += sampling.t[i] + 1
        pivots.append(array[pos])
    return tuple(pivots)


def multipivot_sort(array, config: SortConfig) -> CostLedger:
    """Sort ``array`` (a mutable sequence of distinct keys) in place.

    Returns the aggregated ledger: partition counters summed over every
    partitioning step of the recursion, base-case counters over every
    insertion sort (including the pivot-sample sorts).
    """
    ledger = CostLedger(per_cursor_scans=[0] * (config.k + 1))
    if config.engine == "vectorized":
        out = _vectorized_sort(np.asarray(list(array)), config, ledger)
        array[:] = out.tolist()
        return ledger
    _sort_rec(array, 0, len(array), config, ledger)
    return ledger


def _sort_rec(array, lo: int, hi: int, config: SortConfig, ledger: CostLedger) -> None:
    n = hi - lo
    if n <= config.cutoff:
        insertion_sort(array, lo, hi, ledger)
        return
    k = config.k
    kappa = config.sampling.kappa
    pivots = choose_pivots_from_sample(array, config.sampling, ledger, lo)
    keys = array[lo + kappa : hi]
    labels = np.searchsorted(np.asarray(pivots), np.asarray(keys)).astype(np.int64)
    a_true = np.bincount(labels, minlength=k + 1)
    result = _classify.classify_labels(labels, k, config.strategy, a_true)

    sub = array[lo:hi]
    counts = exchange_partition(sub, k, result, ledger, lead=kappa)
    layout = insert_sample(sub, k, sample_roles(config.sampling.t), counts, ledger)
    array[lo:hi] = sub
    for h in range(k + 1):
        seg_lo, seg_hi = layout.segment(h)
        _sort_rec(array, lo + seg_lo, lo + seg_hi, config, ledger)


# ----------------------------------------------------------------------------
# Vectorized engine: one recursion level at a time.
# ----------------------------------------------------------------------------


def _insertion_costs_matrix(mat: np.ndarray) -> tuple[int, int]:
    """Exact insertion-sort comparison/assignment totals for every row of
    ``mat``, matching :func:`insertion_sort` element for element."""
    s, length = mat.shape
    if length < 2:
        return 0, 0
    # shifts[r, j] = number of earlier, larger elements in row r before col j
    gt = mat[:, :, None] > mat[:, None, :]
    tri = np.tril(np.ones((length, length), dtype=bool), -1)
    shifts = (gt & tri.T[None, :, :]).sum(axis=1)
    cols = np.arange(length)[None, :]
    # Element j costs its shift count plus one early-exit test when it did
    # not travel all the way to the front; column 0 contributes nothing
    # (0 < 0 is false), matching insertion_sort.
    comparisons = int(shifts.sum() + (shifts < cols).sum())
    assignments = int(np.where(shifts > 0, shifts + 2, 0).sum())
    return comparisons, assignments


def _vectorized_sort(keys: np.ndarray, config: SortConfig, ledger: CostLedger) -> np.ndarray:
    k = config.k
    t = config.sampling.t
    kappa = config.sampling.kappa
    cutoff = config.cutoff
    m = (k + 2) // 2
    w = np.asarray(scanned_weight_vector(k), dtype=np.int64)
    roles = sample_roles(t)
    pivot_cols = np.array([c for c, r in enumerate(roles) if r == "pivot"], dtype=np.int64)
    unused_cols = [np.array([c for c, r in enumerate(roles) if r == g], dtype=np.int64) for g in range(k + 1)]
    fixed_tree = config.strategy.tree if isinstance(config.strategy, FixedTree) else None
    if fixed_tree is not None:
        depth_vec = np.asarray(fixed_tree.depths, dtype=np.int64)

    n = len(keys)
    out = np.empty(n, dtype=keys.dtype)
    cur = keys
    starts = np.array([0, n], dtype=np.int64)
    glob = np.array([0], dtype=np.int64)

    while len(glob):
        lengths = np.diff(starts)
        small = lengths <= cutoff
        if small.any():
            _emit_small(cur, starts[:-1][small], lengths[small], glob[small], out, ledger)
        big = np.nonzero(~small)[0]
        if not len(big):
            break
        bstart, blen, bglob = starts[:-1][big], lengths[big], glob[big]
        s = len(big)

        # --- pivot sample ---------------------------------------------------
        samp = cur[bstart[:, None] + np.arange(kappa)[None, :]]
        if kappa > 1:
            c_cmp, c_asg = _insertion_costs_matrix(samp)
            ledger.base_comparisons += c_cmp
            ledger.base_assignments += c_asg
            samp = np.sort(samp, axis=1)
        pivots = samp[:, pivot_cols] if k < kappa else samp

        # --- classification -------------------------------------------------
        rest_len = blen - kappa
        r_total = int(rest_len.sum())
        seg_id = np.repeat(np.arange(s), rest_len)
        rest_first = np.concatenate([[0], np.cumsum(rest_len)[:-1]])
        rest_pos = np.arange(r_total) - rest_first[seg_id]
        rest_keys = cur[np.repeat(bstart + kappa, rest_len) + rest_pos]
        labels = (rest_keys[:, None] > pivots[seg_id]).sum(axis=1, dtype=np.int64)
        counts = np.bincount(seg_id * (k + 1) + labels, minlength=s * (k + 1)).reshape(s, k + 1)

        if fixed_tree is not None:
            ledger.comparisons += int(depth_vec[labels].sum())
        else:
            for row in range(s):
                seg_labels = labels[rest_first[row] : rest_first[row] + rest_len[row]]
                res = _classify.classify_labels(seg_labels, k, config.strategy, counts[row])
                ledger.comparisons += res.comparisons

        # --- Exchange_k counters from the labels ----------------------------
        left_cnt = counts[:, :m].sum(axis=1)
        ledger.scanned_elements += int((counts * w).sum())
        ledger.per_cursor_scans[0] += int(left_cnt.sum())
        ledger.per_cursor_scans[1] += int(r_total - left_cnt.sum())
        pref = np.cumsum(counts, axis=1)
        for h in range(1, m):
            ledger.per_cursor_scans[1 + h] += int(pref[:, h - 1].sum())
        for h in range(m, k):
            ledger.per_cursor_scans[1 + h] += int((rest_len - pref[:, h]).sum())

        in_left = rest_pos < left_cnt[seg_id]
        lab_small = labels < m
        isolo = in_left & (labels < m - 1)
        jsolo = ~in_left & (labels > m)
        big_left = in_left & ~lab_small
        small_right = ~in_left & lab_small
        x_cnt = int(big_left.sum())
        writes = int((m - labels[isolo]).sum() + (labels[jsolo] - m + 1).sum())
        writes += int(labels[big_left].sum() - labels[small_right].sum()) + x_cnt
        rots = int(isolo.sum() + jsolo.sum()) + x_cnt

        # --- sample redistribution (one rotation per sample cell) -----------
        sizes = counts.copy()
        for c in range(kappa - 1, -1, -1):
            role = roles[c]
            dest = (pivot_cols < c).sum() + 1 if role == "pivot" else role
            jumped = (sizes[:, :dest] > 0).sum(axis=1)
            writes += int(jumped.sum()) + s
            rots += s
            if role != "pivot":
                sizes[:, role] += 1
        ledger.write_accesses += writes
        ledger.rotations += rots
        ledger.assignments += writes + rots

        # --- emit pivots, build the next level ------------------------------
        full = sizes  # group sizes including the unused sample keys
        cum_full = np.cumsum(full, axis=1)
        piv_pos = bglob[:, None] + cum_full[:, :k] + np.arange(k)[None, :]
        out[piv_pos] = pivots

        new_glob = np.empty((s, k + 1), dtype=np.int64)
        new_glob[:, 0] = bglob
        new_glob[:, 1:] = bglob[:, None] + cum_full[:, :k] + np.arange(1, k + 1)[None, :]

        block_len = full.reshape(-1)
        block_start = np.concatenate([[0], np.cumsum(block_len)[:-1]])
        nxt = np.empty(int(block_len.sum()), dtype=cur.dtype)
        bs2 = block_start.reshape(s, k + 1)
        for g in range(k + 1):
            if t[g]:
                idx = bs2[:, g][:, None] + np.arange(t[g])[None, :]
                nxt[idx] = samp[:, unused_cols[g]]
        flat_sg = seg_id * (k + 1) + labels
        order = np.argsort(flat_sg, kind="stable")
        first_of_block = np.concatenate(
            [[0], np.cumsum(np.bincount(flat_sg, minlength=s * (k + 1)))[:-1]]
        )
        sg_sorted = flat_sg[order]
        within = np.arange(r_total) - first_of_block[sg_sorted]
        t_offset = np.asarray(t, dtype=np.int64)[sg_sorted % (k + 1)]
        nxt[block_start[sg_sorted] + t_offset + within] = rest_keys[order]

        cur = nxt
        starts = np.concatenate([[0], np.cumsum(block_len)])
        glob = new_glob.reshape(-1)

    return out


def _emit_small(cur, seg_starts, seg_lens, seg_glob, out, ledger: CostLedger) -> None:
    """Insertion-sort all small segments and write them to their final slots.

    Segments are batched by length so the cost accounting stays vectorized.
    """
    for length in np.unique(seg_lens):
        sel = seg_lens == length
        if length == 0:
            continue
        st = seg_starts[sel]
        mat = cur[st[:, None] + np.arange(length)[None, :]]
        if length > 1:
            c_cmp, c_asg = _insertion_costs_matrix(mat)
            ledger.base_comparisons += c_cmp
            ledger.base_assignments += c_asg
            mat = np.sort(mat, axis=1)
        out[seg_glob[sel][:, None] + np.arange(length)[None, :]] = mat
