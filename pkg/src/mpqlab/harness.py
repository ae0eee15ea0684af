"""Deterministic experiment runner and command-line interface.

Input generation is pinned exactly so that identical (n, seed) gives an
identical permutation on every platform:

* Draw words: for step i (1-based), ``x = (seed + i * 0x9E3779B97F4A7C15)
  mod 2**64`` is finalized with the splitmix64 mixer (``z ^= z >> 30; z *=
  0xBF58476D1CE4E5B9; z ^= z >> 27; z *= 0x94D049BB133111EB; z ^= z >> 31``)
  followed by one xorshift64 pass (``z ^= z << 13; z ^= z >> 7; z ^= z << 17``),
  all modulo 2**64.
* Fisher-Yates: start from the identity 1..n; for i = n-1 down to 1 swap
  a[i] with a[j] where j = (word_i * (i+1)) >> 64 (Lemire's multiply-shift
  bound reduction, bias < 2**-44 for any n here).

Experiments average instrumented counters over trials; trial ``idx`` uses
seed ``seed + idx``, so results are independent of scheduling.  Trials run on
a thread pool capped by the MPQS_THREADS environment variable.  Statistics are
emitted as CSV rows with the fixed header
``experiment,k,n,trials,seed,statistic,mean,stddev,theory,rel_dev``.
"""

from __future__ import annotations

import argparse
import math
import os
import statistics
import sys
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Optional, Sequence

import numpy as np

from . import classify as _classify
from . import theory, trees
from .classify import strategy_from_name, true_group_vector
from .rearrange import CostLedger
from .sorter import SamplingVector, SortConfig, multipivot_sort

__all__ = [
    "ExperimentSpec",
    "ResultRow",
    "gen_permutation",
    "run_classification_experiment",
    "run_partition_experiment",
    "run_sort_experiment",
    "exchange_counters_from_labels",
    "emit_csv",
    "main",
]

CSV_HEADER = "experiment,k,n,trials,seed,statistic,mean,stddev,theory,rel_dev"

_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)


def _draw_words(seed: int, count: int) -> np.ndarray:
    """The pinned 64-bit mix-and-xorshift stream, words 1..count (uint64)."""
    with np.errstate(over="ignore"):
        z = np.uint64(seed & (2**64 - 1)) + np.arange(1, count + 1, dtype=np.uint64) * _GOLDEN
        z = (z ^ (z >> np.uint64(30))) * _MIX1
        z = (z ^ (z >> np.uint64(27))) * _MIX2
        z = z ^ (z >> np.uint64(31))
        z ^= z << np.uint64(13)
        z ^= z >> np.uint64(7)
        z ^= z << np.uint64(17)
    return z


def _mulhi64(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Exact high 64 bits of the 64x64 product, via 32-bit limbs."""
    m32 = np.uint64(0xFFFFFFFF)
    ah, al = a >> np.uint64(32), a & m32
    bh, bl = b >> np.uint64(32), b & m32
    with np.errstate(over="ignore"):
        ll = al * bl
        lh = al * bh
        hl = ah * bl
        mid = (ll >> np.uint64(32)) + (lh & m32) + (hl & m32)
        return ah * bh + (lh >> np.uint64(32)) + (hl >> np.uint64(32)) + (mid >> np.uint64(32))


def _apply_fisher_yates(js: np.ndarray) -> np.ndarray:
    a = np.arange(1, js.shape[0] + 1, dtype=np.int64)
    for i in range(js.shape[0] - 1, 0, -1):
        j = js[i]
        a[i], a[j] = a[j], a[i]
    return a


try:  # the swap loop is sequential and data-dependent; JIT it when possible
    import numba as _numba

    _apply_fisher_yates = _numba.njit(cache=True)(_apply_fisher_yates)
except ImportError:  # pragma: no cover - numba is an optional accelerator
    pass


def _gen_permutation_array(n: int, seed: int) -> np.ndarray:
    if n < 1:
        raise ValueError("n must be positive")
    if n == 1:
        return np.ones(1, dtype=np.int64)
    words = _draw_words(seed, n)
    # j for step i is bounded by i+1; index i of the arrays below is step i.
    bounds = np.arange(1, n + 1, dtype=np.uint64)
    return _apply_fisher_yates(_mulhi64(words, bounds).astype(np.int64))


def gen_permutation(n: int, seed: int) -> list[int]:
    """Deterministic uniform permutation of 1..n (see module docstring)."""
    return _gen_permutation_array(n, seed).tolist()


@dataclass(frozen=True)
class ExperimentSpec:
    """One experiment request (CLI plumbing)."""

    kind: str
    k: int
    n: int = 1 << 20
    n_values: Optional[tuple[int, ...]] = None
    trials: int = 200
    seed: int = 0
    strategy: str = "oracle-optimal"
    t: Optional[tuple[int, ...]] = None
    tree: Optional[str] = None
    cutoff: int = 64
    out: Optional[str] = None

    def __post_init__(self) -> None:
        if self.trials < 1:
            raise ValueError("trials must be >= 1")
        kappa = self.k + sum(self.t or ())
        for n in self.n_values or (self.n,):
            if n < kappa:
                raise ValueError("n must be at least the sample size")


@dataclass
class ResultRow:
    experiment: str
    k: int
    n: int
    trials: int
    seed: int
    statistic: str
    mean: float
    stddev: float
    theory: Optional[float] = None
    rel_dev: Optional[float] = field(default=None)

    def __post_init__(self) -> None:
        if self.rel_dev is None and self.theory:
            self.rel_dev = abs(self.mean - self.theory) / abs(self.theory)


def _thread_count() -> int:
    env = os.environ.get("MPQS_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run_trials(fn: Callable[[int], dict], trials: int, seed: int) -> list[dict]:
    """fn(trial_seed) for seeds seed..seed+trials-1, results in trial order."""
    seeds = [seed + i for i in range(trials)]
    workers = min(_thread_count(), trials)
    if workers == 1:
        return [fn(s) for s in seeds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, seeds))


def _rows_from_samples(
    experiment: str, k: int, n: int, seed: int, samples: dict[str, list[float]],
    theory_map: dict[str, float],
) -> list[ResultRow]:
    rows = []
    for stat, values in samples.items():
        mean = statistics.fmean(values)
        sd = statistics.stdev(values) if len(values) > 1 else 0.0
        rows.append(ResultRow(experiment, k, n, len(values), seed, stat, mean, sd,
                              theory_map.get(stat)))
    return rows


def _labels_for_trial(n: int, k: int, trial_seed: int):
    """Permutation -> (labels of keys[k:], pivot ranks) with t = 0."""
    perm = _gen_permutation_array(n, trial_seed)
    pivots = np.sort(perm[:k])
    keys = perm[k:]
    labels = np.searchsorted(pivots, keys).astype(np.int64)
    return labels, pivots


def run_classification_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Mean classification comparisons per element and the implied n ln n
    leading coefficient, reproducing the classification-only methodology."""
    k, n = spec.k, spec.n
    strategy = strategy_from_name(spec.strategy, k, _parse_tree_arg(spec.tree))

    def one(trial_seed: int) -> dict:
        labels, pivots = _labels_for_trial(n, k, trial_seed)
        a_true = true_group_vector(pivots, n)
        res = _classify.classify_labels(labels, k, strategy, a_true)
        return {"comparisons_per_n": res.comparisons / n}

    per_trial = _run_trials(one, spec.trials, spec.seed)
    samples = {"comparisons_per_n": [t["comparisons_per_n"] for t in per_trial]}
    rows = _rows_from_samples("classify", k, n, spec.seed, samples, {})
    a_measured = rows[0].mean
    lead = theory.leading_coefficient(k, a_measured)
    rows.append(ResultRow("classify", k, n, spec.trials, spec.seed,
                          "leading_coefficient", lead, 0.0))
    return rows


def exchange_counters_from_labels(labels: np.ndarray, k: int) -> dict[str, int]:
    """Exchange_k cost counters of one partitioning step, from the labels.

    Vectorized restatement of rearrange.ledger_from_labels (validated against
    it by exact equality); used for large-n partition experiments.
    """
    m = (k + 2) // 2
    labels = np.asarray(labels, dtype=np.int64)
    counts = np.bincount(labels, minlength=k + 1)
    L = int(counts[:m].sum())
    left, right = labels[:L], labels[L:]
    isolo = left[left < m - 1]
    jsolo = right[right > m]
    big_left = left[left >= m]
    small_right = right[right < m]
    writes = int((m - isolo).sum() + (jsolo - m + 1).sum()
                 + big_left.sum() - small_right.sum() + len(big_left))
    rotations = len(isolo) + len(jsolo) + len(big_left)
    w = np.asarray(theory.scanned_weight_vector(k), dtype=np.int64)
    scanned = int(counts @ w)
    return {
        "scanned": scanned,
        "writes": writes,
        "assignments": writes + rotations,
        "rotations": rotations,
    }


def run_partition_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Single-partition counter means per element vs. the closed forms."""
    k, n = spec.k, spec.n

    def one(trial_seed: int) -> dict:
        labels, _ = _labels_for_trial(n, k, trial_seed)
        c = exchange_counters_from_labels(labels, k)
        return {f"{name}_per_n": v / n for name, v in c.items()}

    per_trial = _run_trials(one, spec.trials, spec.seed)
    samples = {stat: [t[stat] for t in per_trial] for stat in per_trial[0]}
    theory_map = {
        "scanned_per_n": float(theory.partition_se(k)),
        "writes_per_n": float(theory.partition_wa(k)),
        "assignments_per_n": float(theory.partition_as(k)),
        "rotations_per_n": float(theory.rotate_coefficient(k)),
    }
    rows = _rows_from_samples("partition", k, n, spec.seed, samples, theory_map)
    # Idealized L1 miss prediction: scanned elements fetched in blocks of 8.
    scanned_mean = samples["scanned_per_n"]
    rows.append(ResultRow("partition", k, n, spec.trials, spec.seed,
                          "predicted_l1_misses_per_n",
                          statistics.fmean(scanned_mean) / 8,
                          (statistics.stdev(scanned_mean) / 8) if spec.trials > 1 else 0.0,
                          float(theory.partition_se(k)) / 8))
    return rows


def run_sort_experiment(spec: ExperimentSpec) -> list[ResultRow]:
    """Full-sort counter curves scaled by n ln n, one row set per n."""
    k = spec.k
    sampling = SamplingVector(spec.t) if spec.t else SamplingVector.zero(k)
    strategy = strategy_from_name(spec.strategy, k, _parse_tree_arg(spec.tree)) \
        if spec.strategy else None
    config = SortConfig(k, sampling, strategy, cutoff=max(spec.cutoff, sampling.kappa),
                        engine="vectorized")
    rows: list[ResultRow] = []
    for n in spec.n_values or (spec.n,):
        scale = n * math.log(n)

        def one(trial_seed: int, n=n, scale=scale) -> dict:
            arr = gen_permutation(n, trial_seed)
            led = multipivot_sort(arr, config)
            return {
                "comparisons_per_nlogn": led.comparisons / scale,
                "scanned_per_nlogn": led.scanned_elements / scale,
                "writes_per_nlogn": led.write_accesses / scale,
                "assignments_per_nlogn": led.assignments / scale,
                "rotations_per_nlogn": led.rotations / scale,
                "base_comparisons_per_nlogn": led.base_comparisons / scale,
            }

        per_trial = _run_trials(one, spec.trials, spec.seed)
        samples = {stat: [t[stat] for t in per_trial] for stat in per_trial[0]}
        hk = theory.harmonic(k + 1) - 1
        theory_map = {
            "scanned_per_nlogn": float(theory.partition_se(k) / hk),
            "writes_per_nlogn": float(theory.partition_wa(k) / hk),
            "assignments_per_nlogn": float(theory.partition_as(k) / hk),
            "rotations_per_nlogn": float(theory.rotate_coefficient(k) / hk),
        }
        rows.extend(_rows_from_samples("sort", k, n, spec.seed, samples, theory_map))
    return rows


def _format_number(x) -> str:
    """Shortest round-trip decimal (repr for floats, plain for ints)."""
    if x is None:
        return ""
    if isinstance(x, float):
        return repr(x)
    return str(x)


def emit_csv(rows: Sequence[ResultRow], path) -> None:
    lines = [CSV_HEADER]
    for r in rows:
        lines.append(",".join([
            r.experiment, str(r.k), str(r.n), str(r.trials), str(r.seed),
            r.statistic, _format_number(r.mean), _format_number(r.stddev),
            _format_number(r.theory), _format_number(r.rel_dev),
        ]))
    text = "\n".join(lines) + "\n"
    if hasattr(path, "write"):
        path.write(text)
    else:
        with open(path, "w", newline="") as fh:
            fh.write(text)


def _parse_tree_arg(s: Optional[str]):
    return trees.parse(s) if s else None


def _parse_t_arg(s: Optional[str]) -> Optional[tuple[int, ...]]:
    if not s:
        return None
    return tuple(int(x) for x in s.replace("(", "").replace(")", "").split(","))


# ---------------------------------------------------------------------------
# Validation: the acceptance suite, reported as pass/fail per criterion.
# ---------------------------------------------------------------------------


@dataclass
class Check:
    name: str
    ok: bool
    measured: str
    expected: str


def _validate_checks(progress: Callable[[str], None]) -> list[Check]:
    checks: list[Check] = []

    def add(name, ok, measured, expected):
        checks.append(Check(name, bool(ok), str(measured), str(expected)))
        progress(f"[{'PASS' if ok else 'FAIL'}] {name}: measured {measured}, expected {expected}")

    # 1. Exact recurrence vs classic closed form.
    table = theory.recurrence_solve_exact(1, lambda n: Fraction(n - 1), 2000)
    ok = all(table[n] == 2 * (n + 1) * theory.harmonic(n) - 4 * n for n in range(2001))
    add("1 exact recurrence k=1", ok, "rational table", "2(n+1)H_n - 4n")

    # 2. 3-pivot oracle coefficients.
    lam = {name: trees.parse(p) for name, p in
           (("l1", "[1,3,2]"), ("l2", "[2,1,3]"), ("l3", "[3,1,2]"))}
    three = tuple(lam.values())
    n, trials = 10**6, 200
    mean3, mean5, sym_exact = _oracle3_means(n, trials, 0, three)
    add("2 symmetric == 2(n-3) per run", sym_exact, "exact", "exact")
    add("2 oracle {l1,l2,l3} 17/9", abs(mean3 - 17 / 9) <= 0.01 * 17 / 9,
        f"{mean3:.5f}", f"{17/9:.5f} ±1%")
    add("2 oracle all five 133/72", abs(mean5 - 133 / 72) <= 0.01 * 133 / 72,
        f"{mean5:.5f}", f"{133/72:.5f} ±1%")

    # 3. Table 1 leading coefficients.
    targets = {2: 1.800, 3: 1.705, 4: 1.650, 5: 1.610, 6: 1.590, 7: 1.577}
    leads = table1_leading_coefficients(tuple(targets), 10**6, 200, 0)
    for k, tgt in targets.items():
        add(f"3 table1 k={k}", abs(leads[k] - tgt) <= 0.02, f"{leads[k]:.4f}", f"{tgt} ±0.02")

    # 4. Exchange_k counters vs closed forms.
    for k in (1, 2, 3, 5, 7, 9):
        rows = run_partition_experiment(ExperimentSpec("partition", k, 10**6, trials=100))
        for r in rows:
            if r.theory is None or r.statistic == "predicted_l1_misses_per_n":
                continue
            tol = 0.01 if r.statistic == "rotations_per_n" else 0.005
            add(f"4 k={k} {r.statistic}", r.rel_dev <= tol,
                f"{r.mean:.5f}", f"{r.theory:.5f} ±{tol:.1%}")

    # 5. Ledger identities (spot-checked on full sorts; exact by construction).
    ok = True
    for k, seed in ((3, 11), (5, 12)):
        arr = gen_permutation(4096, seed)
        led = multipivot_sort(arr, SortConfig(k, cutoff=64))
        ok &= led.assignments == led.write_accesses + led.rotations
        ok &= led.scanned_elements == sum(led.per_cursor_scans)
    add("5 ledger identities", ok, "exact", "exact")

    # 6. Sorting-cost curves at n = 2^20 (known to sit below the asymptotic
    # targets at this n; reported honestly).
    scan_t = {1: 2.0, 2: 1.6, 3: 1.385, 5: 1.379, 7: 1.455, 9: 1.555}
    as_t = {1: 1.0, 2: 1.6, 3: 1.569, 5: 1.658, 7: 1.746, 9: 1.843}
    for k in scan_t:
        spec = ExperimentSpec("sort", k, 1 << 20, trials=25, cutoff=k)
        rows = {r.statistic: r for r in run_sort_experiment(spec)}
        sc = rows["scanned_per_nlogn"].mean
        asg = rows["assignments_per_nlogn"].mean
        add(f"6 k={k} scanned/(n ln n)", abs(sc - scan_t[k]) <= 0.05 * scan_t[k],
            f"{sc:.4f}", f"{scan_t[k]} ±5%")
        add(f"6 k={k} assignments/(n ln n)", abs(asg - as_t[k]) <= 0.05 * as_t[k],
            f"{asg:.4f}", f"{as_t[k]} ±5%")

    # 7. Table 4 reproduction (analytic); the cited cells, exact in (t, tree)
    # and within 5e-4 in leading value.
    cells = [
        (3, 0, "comparisons", (0, 0, 0, 0), "[2,1,3]", 1.846),
        (3, 8, "scanned", (1, 3, 3, 1), None, 1.098),
        (5, 6, "sum", (0, 1, 2, 2, 1, 0), "[3,2,1,4,5]", 2.741),
        (7, 8, "sum", (0, 0, 1, 3, 3, 1, 0, 0), "[4,3,2,1,5,6,7]", 2.698),
    ]
    for k, budget, kind, want_t, want_tree, want_val in cells:
        t, tree, val = theory.best_sampling_table(k, budget, kind)
        ok = t == want_t and abs(val - want_val) <= 5e-4
        if want_tree is not None:
            ok &= tree is not None and trees.format(tree) == want_tree
        add(f"7 table4 k={k} budget={budget} {kind}", ok,
            f"t={t} tree={trees.format(tree) if tree else '-'} {val:.4f}",
            f"t={want_t} tree={want_tree or '-'} {want_val}")

    # 8. Optimal tau.
    ok8 = True
    for k in range(1, 10):
        for t in trees.enumerate_trees(k):
            _, v = theory.minimize_linear_over_entropy(t.depths)
            ok8 &= abs(v - 1 / math.log(2)) < 1e-9
    scans = {3: 0.995, 5: 0.933, 7: 0.917, 9: 0.912}
    for k, tgt in scans.items():
        _, v = theory.opt_tau_scanned(k)
        ok8 &= abs(v - tgt) <= 1e-3
    x, v = theory.opt_tau_total_limit()
    ok8 &= abs(x - 0.6573) <= 1e-4 and abs(v - 2.38) <= 0.01
    add("8 optimal tau", ok8, "roots and values", "1/ln2, 0.995/0.933/0.917/0.912, 2.38")

    # 9. Extremal-tree conjecture.
    ok9 = True
    for k in range(1, 10):
        ext = trees.extremal_tree(k)
        best = min(trees.enumerate_trees(k),
                   key=lambda t: (theory.minimize_linear_over_entropy(
                       [d + w for d, w in zip(t.depths, theory.scanned_weight_vector(k))])[1],
                       t.preorder))
        ok9 &= best == ext
    add("9 extremal tree minimizes c+a", ok9, "exhaustive k<=9", "extremal tree")

    # 10. Brute-force oracle equivalence (strict inequality in truth; the
    # literal criterion is reported as measured).
    ok10 = True
    detail = []
    for k in (1, 2, 3):
        n = k + 3
        mean = exhaustive_oracle_partition_mean(k, n)
        bf = theory.brute_force_optimal_partition_cost(k, n)
        if mean != bf:
            ok10 = False
            detail.append(f"k={k},n={n}: {mean} vs {bf}")
    add("10 oracle mean == brute force", ok10, "; ".join(detail) or "equal", "exact equality")

    # 11. Property suite (sortedness + permutation preservation).
    import random
    rng = random.Random(99)
    ok11 = True
    cases = 0
    while cases < 10000:
        k = rng.choice((1, 2, 3, 5))
        t = tuple(rng.choice((0, 1)) for _ in range(k + 1))
        sv = SamplingVector(t)
        n = rng.randint(sv.kappa, 64)
        cutoff = rng.randint(sv.kappa, 64)
        eng = rng.choice(("reference", "vectorized"))
        base = gen_permutation(n, rng.randrange(2**32))
        arr = list(base)
        multipivot_sort(arr, SortConfig(k, sv, cutoff=cutoff, engine=eng))
        ok11 &= arr == sorted(base)
        cases += 1
    add("11 property suite 10k cases", ok11, f"{cases} cases", "sorted, permutation preserved")
    return checks


def _oracle3_means(n: int, trials: int, seed: int, three) -> tuple[float, float, bool]:
    """O_3 comparisons/n means with the three-tree and five-tree candidate
    sets, plus exactness of the symmetric count, sharing one permutation and
    one per-element cost matrix per trial."""
    all_five = sorted(trees.enumerate_trees(3), key=lambda t: t.preorder)
    three_sorted = sorted(three, key=lambda t: t.preorder)
    three_cols = np.array([all_five.index(t) for t in three_sorted])
    depth_mat = np.array([t.depths for t in all_five], dtype=np.float64)

    def one(trial_seed: int) -> tuple[float, float, bool]:
        labels, pivots = _labels_for_trial(n, 3, trial_seed)
        a_true = np.asarray(true_group_vector(pivots, n), dtype=np.float64)
        one_hot = np.zeros((len(labels), 4))
        one_hot[np.arange(len(labels)), labels] = 1.0
        remaining = a_true - np.cumsum(one_hot, axis=0) + one_hot
        costs = remaining @ depth_mat.T
        c5 = depth_mat[np.argmin(costs, axis=1), labels].sum()
        pick3 = three_cols[np.argmin(costs[:, three_cols], axis=1)]
        c3 = depth_mat[pick3, labels].sum()
        return (c3 / n, c5 / n, True)  # symmetric tree is flat: 2 per element

    res = _run_trials(one, trials, seed)
    # symmetric-strategy exactness is structural (flat depth profile), but
    # verify on one real run rather than asserting it by fiat
    labels0, _ = _labels_for_trial(n, 3, seed)
    from .classify import FixedTree
    sym = _classify.classify_labels(labels0, 3, FixedTree(trees.parse("[2,1,3]")))
    res = [(a, b, ok and sym.comparisons == 2 * (n - 3)) for a, b, ok in res]
    return (statistics.fmean(r[0] for r in res),
            statistics.fmean(r[1] for r in res),
            all(r[2] for r in res))


def table1_leading_coefficients(ks: tuple[int, ...], n: int, trials: int,
                                seed: int) -> dict[int, float]:
    """Oracle-optimal classification leading coefficients, one permutation
    per trial shared across all k."""
    strategies = {k: _classify.OracleOptimal() for k in ks}

    def one(trial_seed: int) -> dict[int, float]:
        perm = gen_permutation(n, trial_seed)
        out = {}
        for k in ks:
            pivots = np.sort(np.asarray(perm[:k], dtype=np.int64))
            keys = np.asarray(perm[k:], dtype=np.int64)
            labels = np.searchsorted(pivots, keys).astype(np.int64)
            a_true = true_group_vector(pivots, n)
            res = _classify.classify_labels(labels, k, strategies[k], a_true)
            out[k] = res.comparisons / n
        return out

    res = _run_trials(one, trials, seed)
    return {k: theory.leading_coefficient(k, statistics.fmean(r[k] for r in res))
            for k in ks}


def exhaustive_oracle_partition_mean(k: int, n: int) -> Fraction:
    """Exact mean of OracleOptimal partition comparisons over all n! inputs.

    Reduced to (pivot set, label arrangement) pairs: the comparison count
    depends only on the label sequence and the true group vector.
    """
    import itertools
    total = Fraction(0)
    count = 0
    for pivset in itertools.combinations(range(1, n + 1), k):
        gv = true_group_vector(pivset, n)
        base_labels = [g for g in range(k + 1) for _ in range(gv[g])]
        # distinct label sequences are equally likely given the pivot set;
        # pivot sets are equally likely, so average per set, then over sets
        seqs = set(itertools.permutations(base_labels))
        subtotal = 0
        for seq in seqs:
            res = _classify.classify_labels(np.asarray(seq, dtype=np.int64), k,
                                            _classify.OracleOptimal(), gv)
            subtotal += res.comparisons
        total += Fraction(subtotal, len(seqs))
        count += 1
    return total / count


# ---------------------------------------------------------------------------
# CLI
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="mpqlab", description="Multi-pivot quicksort lab")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, defaults=True):
        sp.add_argument("--k", type=int, default=3)
        sp.add_argument("--n", type=int, default=1 << 20)
        sp.add_argument("--trials", type=int, default=200)
        sp.add_argument("--seed", type=int, default=0)
        sp.add_argument("--strategy", type=str, default="fixed")
        sp.add_argument("--t", type=str, default=None)
        sp.add_argument("--tree", type=str, default=None)
        sp.add_argument("--cutoff", type=int, default=64)
        sp.add_argument("--out", type=str, default=None)

    for name in ("sort", "classify", "partition"):
        common(sub.add_parser(name))
    tp = sub.add_parser("theory")
    tp.add_argument("--k", type=int, required=True)
    tp.add_argument("--tree", type=str, default=None)
    ot = sub.add_parser("opt-tau")
    ot.add_argument("--k", type=int, required=True)
    ot.add_argument("--cost", choices=("comparisons", "scanned", "total-extremal"),
                    default="scanned")
    t4 = sub.add_parser("table4")
    t4.add_argument("--k", type=int, required=True)
    t4.add_argument("--budget", type=int, required=True)
    t1 = sub.add_parser("table1")
    t1.add_argument("--n", type=int, default=10**6)
    t1.add_argument("--trials", type=int, default=200)
    t1.add_argument("--seed", type=int, default=0)
    t1.add_argument("--out", type=str, default=None)
    sub.add_parser("validate")
    return p


def _emit(rows: list[ResultRow], out: Optional[str]) -> None:
    if out:
        emit_csv(rows, out)
    else:
        emit_csv(rows, sys.stdout)


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = _build_parser().parse_args(argv)
    cmd = args.command

    if cmd in ("sort", "classify", "partition"):
        spec = ExperimentSpec(
            cmd, args.k, args.n, trials=args.trials, seed=args.seed,
            strategy=args.strategy, t=_parse_t_arg(args.t), tree=args.tree,
            cutoff=args.cutoff,
        )
        runner = {"sort": run_sort_experiment,
                  "classify": run_classification_experiment,
                  "partition": run_partition_experiment}[cmd]
        _emit(runner(spec), args.out)
        return 0

    if cmd == "theory":
        k = args.k
        tree = _parse_tree_arg(args.tree) or trees.balanced_tree(k)
        a = Fraction(sum(tree.depths), k + 1)
        lead = a / (theory.harmonic(k + 1) - 1)
        print(f"tree {trees.format(tree)} depths {tree.depths}")
        print(f"comparisons leading coefficient: {lead} = {float(lead):.6f}")
        print(f"partition scanned/n: {theory.partition_se(k)}")
        print(f"partition writes/n: {theory.partition_wa(k)}")
        print(f"partition assignments/n: {theory.partition_as(k)}")
        return 0

    if cmd == "opt-tau":
        k = args.k
        if args.cost == "comparisons":
            tau, v = theory.minimize_linear_over_entropy(trees.balanced_tree(k).depths)
        elif args.cost == "scanned":
            tau, v = theory.opt_tau_scanned(k)
        else:
            tau, v = theory.opt_tau_total_extremal(k)
        print(f"{v:.3f}")
        print("tau:", " ".join(f"{x:.6f}" for x in tau))
        return 0

    if cmd == "table4":
        for kind in ("comparisons", "scanned", "sum"):
            t, tree, val = theory.best_sampling_table(args.k, args.budget, kind)
            tree_s = trees.format(tree) if tree is not None else "-"
            print(f"{kind}: t={t} tree={tree_s} value={val:.4f}")
        return 0

    if cmd == "table1":
        ks = (2, 3, 4, 5, 6, 7)
        leads = table1_leading_coefficients(ks, args.n, args.trials, args.seed)
        rows = [ResultRow("table1", k, args.n, args.trials, args.seed,
                          "leading_coefficient", leads[k], 0.0)
                for k in ks]
        _emit(rows, args.out)
        return 0

    if cmd == "validate":
        checks = _validate_checks(print)
        failed = [c for c in checks if not c.ok]
        print(f"\n{len(checks) - len(failed)}/{len(checks)} checks passed")
        return 1 if failed else 0

    raise AssertionError(f"unhandled command {cmd!r}")


if __name__ == "__main__":
    sys.exit(main())
