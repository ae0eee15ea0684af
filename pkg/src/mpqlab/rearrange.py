"""The Exchange_k rearrangement step with exact cost instrumentation.

Partitioning works on an array whose first k cells hold the sorted pivots and
whose remaining cells hold keys already labelled with their group indices.
Two scanning cursors i (ascending) and j (descending) sweep the non-pivot
region; border cursors b_1..b_{k-1} delimit the segments collected so far.
All data movement happens through cyclic ``rotate`` operations, each charged
to a :class:`CostLedger`.

Cursor-scan accounting: a cursor is charged |final - start| cells (the cell it
rests on is uncharged).  The outer loop runs while i <= j so that the cell on
which the cursors meet is still classified and moved; i then always comes to
rest one past the small/large boundary and j right on it, so i is charged the
cells [k+1, i_final), j the cells [i_final, n], and the two jointly scan
exactly n - k cells on every input.

Indices in this module are 0-based; the docstrings use the customary 1-based
cell numbers where it helps readability.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional, Sequence

from .classify import ClassificationResult
from .theory import scanned_weight_vector

__all__ = [
    "CostLedger",
    "PartitionLayout",
    "rotate",
    "exchange_partition",
    "place_pivots",
    "insert_sample",
    "scanned_elements_of_layout",
    "ledger_from_labels",
]


@dataclass
class CostLedger:
    """Exact counters for one (or an aggregate of) partitioning runs.

    Invariants: assignments == write_accesses + rotations (an l-cell rotation
    makes l writes and l+1 assignments); scanned_elements == sum of
    per_cursor_scans (cursors i, j, b_1, ..., b_{k-1}).
    """

    comparisons: int = 0
    scanned_elements: int = 0
    write_accesses: int = 0
    assignments: int = 0
    rotations: int = 0
    per_cursor_scans: list[int] = field(default_factory=list)
    # Small-subarray sorting costs, kept out of the partition statistics.
    base_comparisons: int = 0
    base_assignments: int = 0

    def add(self, other: "CostLedger") -> None:
        self.comparisons += other.comparisons
        self.scanned_elements += other.scanned_elements
        self.write_accesses += other.write_accesses
        self.assignments += other.assignments
        self.rotations += other.rotations
        self.base_comparisons += other.base_comparisons
        self.base_assignments += other.base_assignments
        if len(self.per_cursor_scans) < len(other.per_cursor_scans):
            self.per_cursor_scans.extend(
                [0] * (len(other.per_cursor_scans) - len(self.per_cursor_scans))
            )
        for idx, c in enumerate(other.per_cursor_scans):
            self.per_cursor_scans[idx] += c


@dataclass(frozen=True)
class PartitionLayout:
    """k+2 ascending boundaries: segment h occupies cells
    [boundaries[h], boundaries[h+1] - 2] and cell boundaries[h+1] - 1 holds
    pivot p_{h+1} (for h < k); the last segment ends at boundaries[k+1] - 1.
    All 0-based."""

    boundaries: tuple[int, ...]

    def segment(self, h: int) -> tuple[int, int]:
        """Half-open cell range [start, stop) of segment h (pivot excluded)."""
        lo = self.boundaries[h]
        hi = self.boundaries[h + 1] - (1 if h + 2 < len(self.boundaries) else 0)
        return lo, hi


def rotate(array, indices: Sequence[int], ledger: CostLedger, labels=None) -> None:
    """Cyclic shift A[i1] <- A[i2] <- ... <- A[il] <- old A[i1].

    Charges l write accesses, l + 1 assignments and one rotation; a rotation
    of two cells is a swap, a rotation of one cell leaves the array unchanged
    but is still counted.  ``labels`` is an optional parallel sequence moved
    identically (bookkeeping only, not charged).
    """
    n = len(array)
    for idx in indices:
        if not 0 <= idx < n:
            raise IndexError(f"rotate index {idx} out of bounds for length {n}")
    tmp = array[indices[0]]
    for a, b in zip(indices, indices[1:]):
        array[a] = array[b]
    array[indices[-1]] = tmp
    if labels is not None:
        tmp_l = labels[indices[0]]
        for a, b in zip(indices, indices[1:]):
            labels[a] = labels[b]
        labels[indices[-1]] = tmp_l
    ledger.write_accesses += len(indices)
    ledger.assignments += len(indices) + 1
    ledger.rotations += 1


def exchange_partition(
    array,
    k: int,
    classification: ClassificationResult,
    ledger: CostLedger,
    lead: Optional[int] = None,
) -> list[int]:
    """Run Exchange_k on ``array`` (pivots in cells 0..k-1, 0-based).

    ``classification`` must hold the labels of array[lead:] in array order;
    its comparison count is charged to the ledger.  ``lead`` is the size of
    the reserved prefix the cursors never enter -- k by default, or kappa when
    the prefix holds a sorted pivot sample.  On return the scanned region
    holds the segments A_0..A_k in order while the prefix is untouched; the
    group-size vector is returned so the caller can finish with
    :func:`place_pivots` (or :func:`insert_sample`).

    The cursor logic follows the two-scanning-cursor pseudocode with two
    repairs: the inner scanning loops carry bounds guards so that a one-sided
    input (every element small, or every element large) stops the cursor at
    the array edge instead of running out of bounds, and the outer loop keeps
    going while i == j so the cell on which the cursors meet is classified
    and moved like any other (otherwise a small element of a low group could
    be stranded at the boundary).
    """
    n = len(array)
    if lead is None:
        lead = k
    if k < 1 or lead < k or n < lead:
        raise ValueError("need at least `lead` reserved cells with the pivots")
    if lead == k:
        for h in range(k - 1):
            if not array[h] < array[h + 1]:
                raise ValueError("pivots must be sorted ascending")
    labels = [None] * lead + list(classification.labels)
    if len(labels) != n:
        raise ValueError("classification does not cover the non-prefix cells")
    ledger.comparisons += classification.comparisons

    m = (k + 2) // 2  # ceil((k+1)/2)
    i = lead  # 0-based cell right after the reserved prefix
    j = n - 1
    # b[h] for h in 1..k-1; left borders 1..m-1 start at i, right at j.
    b = [0] * k
    for h in range(1, m):
        b[h] = i
    for h in range(m, k):
        b[h] = j
    b_start = b[:]

    while i <= j:
        while i < n and labels[i] < m:
            p = labels[i]
            if p < m - 1:
                rotate(array, [i] + [b[h] for h in range(m - 1, p, -1)], ledger, labels)
                for h in range(p + 1, m):
                    b[h] += 1
            i += 1
        while j >= lead and labels[j] >= m:
            q = labels[j]
            if q >= m + 1:
                rotate(array, [j] + [b[h] for h in range(m, q)], ledger, labels)
                for h in range(m, q):
                    b[h] -= 1
            j -= 1
        if i < j:
            p = labels[i]
            q = labels[j]
            rotate(
                array,
                [i]
                + [b[h] for h in range(m - 1, q, -1)]
                + [j]
                + [b[h] for h in range(m, p)],
                ledger,
                labels,
            )
            i += 1
            for h in range(q + 1, m):
                b[h] += 1
            j -= 1
            for h in range(m, p):
                b[h] -= 1

    # Scan accounting (see module docstring): i is charged [k, i), j the rest.
    scans = [0] * (k + 1)
    scans[0] = i - lead
    scans[1] = (n - lead) - scans[0]
    for h in range(1, k):
        scans[1 + h] = abs(b[h] - b_start[h])
    if len(ledger.per_cursor_scans) < k + 1:
        ledger.per_cursor_scans.extend([0] * (k + 1 - len(ledger.per_cursor_scans)))
    for idx, c in enumerate(scans):
        ledger.per_cursor_scans[idx] += c
    ledger.scanned_elements += sum(scans)

    counts = [0] * (k + 1)
    for lab in labels[lead:]:
        counts[lab] += 1
    return counts


def place_pivots(array, k: int, counts: Sequence[int], ledger: CostLedger) -> PartitionLayout:
    """Move the pivots from cells 0..k-1 into their slots between segments.

    ``counts`` are the group sizes of the partitioned region array[k:].
    One rotation per pivot, processed right to left; see
    :func:`insert_sample` for the shared mechanics.
    """
    return insert_sample(array, k, ["pivot"] * k, counts, ledger)


def insert_sample(
    array,
    k: int,
    roles: Sequence,
    counts: Sequence[int],
    ledger: CostLedger,
) -> PartitionLayout:
    """Distribute the sample prefix into the partitioned region.

    ``array[0:kappa]`` holds the sorted sample (kappa = len(roles)); cell c is
    pivot number i when roles[c] == "pivot" (the i-th "pivot" in order is
    p_i), otherwise roles[c] is the group index of an unused sample key.
    ``counts`` are the group sizes of the already-partitioned region
    array[kappa:].

    Cells are processed right to left.  The element of cell c jumps across
    every currently nonempty segment strictly below its destination with a
    single rotation over those segments' last cells, landing either in its
    pivot slot or at the front of its group's segment.  Every cell costs
    exactly one rotation (possibly the degenerate one-cell rotation when
    nothing intervenes).
    """
    kappa = len(roles)
    sizes = list(counts)
    if len(sizes) != k + 1 or any(s < 0 for s in sizes):
        raise ValueError("counts must be k+1 nonnegative group sizes")
    starts = [0] * (k + 1)
    acc = kappa
    for g in range(k + 1):
        starts[g] = acc
        acc += sizes[g]
    if acc != len(array):
        raise ValueError("group sizes do not cover the partitioned region")

    pivot_rank = sum(1 for r in roles if r == "pivot")
    for c in range(kappa - 1, -1, -1):
        role = roles[c]
        if role == "pivot":
            dest_seg = pivot_rank  # p_i sits between segments i-1 and i
            pivot_rank -= 1
        else:
            dest_seg = role
        jumped = [g for g in range(dest_seg) if sizes[g] > 0]
        rotate(array, [c] + [starts[g] + sizes[g] - 1 for g in jumped], ledger)
        for g in range(dest_seg):
            starts[g] -= 1
        if role != "pivot":
            starts[dest_seg] -= 1
            sizes[dest_seg] += 1
    # Boundaries: segment h starts at starts[h]; pivot p_{h+1} sits right
    # after segment h, i.e. at starts[h] + sizes[h].
    bounds = [starts[0]]
    for h in range(k):
        bounds.append(starts[h] + sizes[h] + 1)
    bounds.append(starts[k] + sizes[k])
    return PartitionLayout(tuple(bounds))


def scanned_elements_of_layout(gv: Sequence[int], k: int) -> int:
    """Deterministic scanned-element total for group sizes ``gv``.

    Equals (n - k) for the two scanning cursors plus the border-cursor
    travels, which collapses to a fixed weight per group: m - g for g < m and
    g - m + 1 for g >= m.  Matches the measured ledger of any real run with
    these group sizes, exactly.
    """
    if len(gv) != k + 1:
        raise ValueError("group vector must have k+1 entries")
    w = scanned_weight_vector(k)
    return sum(int(wg) * a for wg, a in zip(w, gv))


def ledger_from_labels(labels: Sequence[int], k: int, comparisons: int = 0) -> CostLedger:
    """Exchange_k ledger computed from the label sequence alone.

    The data movement of Exchange_k is a deterministic function of the labels:
    cursor i consumes the first L cells (L = number of labels below m) and
    cursor j the rest.  A small label p < m-1 met by i costs a rotation of
    length m - p; a large label q > m met by j costs length q - m + 1; each
    large label in i's range pairs with a small label in j's range for a
    crossing rotation of length p - q + 1.  Pivot placement is not included.

    Validated against :func:`exchange_partition` by exact equality.
    """
    m = (k + 2) // 2
    n_rest = len(labels)
    L = sum(1 for x in labels if x < m)
    left = labels[:L]
    right = labels[L:]

    writes = 0
    rotations = 0
    big_left_sum = 0
    big_left_cnt = 0
    for p in left:
        if p >= m:
            big_left_sum += p
            big_left_cnt += 1
        elif p < m - 1:
            writes += m - p
            rotations += 1
    small_right_sum = 0
    small_right_cnt = 0
    for q in right:
        if q < m:
            small_right_sum += q
            small_right_cnt += 1
        elif q > m:
            writes += q - m + 1
            rotations += 1
    # Crossing rotations: each pairs one large-in-left with one small-in-right.
    writes += big_left_sum - small_right_sum + big_left_cnt
    rotations += big_left_cnt

    counts = [0] * (k + 1)
    for x in labels:
        counts[x] += 1
    scans = [0] * (k + 1)
    scans[0] = L
    scans[1] = n_rest - L
    # Left border b_h (1 <= h <= m-1) travels past every element of groups
    # below h; right border b_h (m <= h <= k-1) past every element above h.
    pref = 0
    for h in range(1, m):
        pref += counts[h - 1]
        scans[1 + h] = pref
    suff = 0
    for h in range(k - 1, m - 1, -1):
        suff += counts[h + 1]
        scans[1 + h] = suff

    ledger = CostLedger(
        comparisons=comparisons,
        scanned_elements=sum(scans),
        write_accesses=writes,
        assignments=writes + rotations,
        rotations=rotations,
        per_cursor_scans=scans,
    )
    return ledger
