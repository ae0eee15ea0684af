import math
from fractions import Fraction

import pytest
from hypothesis import given, settings, strategies as st

from mpqlab import theory, trees
from mpqlab.theory import (
    a_tau,
    best_sampling_table,
    brute_force_optimal_partition_cost,
    c_tau,
    c_tau_extremal,
    cache_miss_estimate,
    entropy_tau,
    harmonic,
    leading_coefficient,
    minimize_linear_over_entropy,
    opt_tau_scanned,
    opt_tau_total_extremal,
    opt_tau_total_limit,
    partition_as,
    partition_se,
    partition_wa,
    recurrence_solve_exact,
    rotate_coefficient,
    sampling_comparison_coeff,
    sampling_entropy,
    sampling_leading,
    sampling_scanned_coeff,
    saved_writes_coefficient,
    scanned_weight_vector,
)


class TestHarmonic:
    def test_values(self):
        assert harmonic(1) == 1
        assert harmonic(4) == Fraction(25, 12)
        assert harmonic(8) == Fraction(761, 280)


class TestLeadingCoefficient:
    def test_symmetric_three_pivot(self):
        assert abs(leading_coefficient(3, 2) - 24 / 13) < 1e-12

    def test_classic_quicksort(self):
        assert abs(leading_coefficient(1, 1) - 2.0) < 1e-12

    def test_oracle_three_pivot(self):
        assert abs(leading_coefficient(3, Fraction(133, 72)) - 133 / 78) < 1e-12


class TestRecurrence:
    def test_small_value(self):
        table = recurrence_solve_exact(1, lambda n: Fraction(n - 1), 3)
        assert table[3] == Fraction(8, 3)

    def test_base(self):
        table = recurrence_solve_exact(1, lambda n: Fraction(n - 1), 1)
        assert table[1] == 0

    def test_classic_closed_form(self):
        table = recurrence_solve_exact(1, lambda n: Fraction(n - 1), 2000)
        for n in (0, 1, 2, 17, 100, 999, 2000):
            assert table[n] == 2 * (n + 1) * harmonic(n) - 4 * n

    def test_symmetric_three_pivot_trend(self):
        # E(C_n)/(n ln n) approaches 24/13 from below; the negative linear
        # term is still large at these sizes (about -21% at n = 4000).
        table = recurrence_solve_exact(3, lambda n: Fraction(2 * (n - 3)), 4000)
        target = 24 / 13

        def ratio(n):
            return float(table[n]) / (n * math.log(n))

        assert ratio(400) < ratio(1500) < ratio(4000) < target
        assert abs(ratio(4000) - target) / target == pytest.approx(0.213, abs=0.01)

    def test_cap(self):
        with pytest.raises(ValueError):
            recurrence_solve_exact(1, lambda n: Fraction(0), 5001)


class TestPartitionCoefficients:
    def test_se_examples(self):
        assert partition_se(5) == 2
        assert partition_se(1) == 1
        assert partition_se(3) == Fraction(3, 2)

    def test_wa_k1(self):
        assert partition_wa(1) == Fraction(1, 3)
        assert abs(leading_coefficient(1, partition_wa(1)) - 2 / 3) < 1e-12

    def test_as_k9(self):
        assert partition_as(9) == Fraction(391, 110)
        assert abs(leading_coefficient(9, partition_as(9)) - 1.843) < 1e-3

    def test_rotate_examples(self):
        assert rotate_coefficient(1) == Fraction(1, 6)
        assert rotate_coefficient(2) == Fraction(5, 12)

    def test_identities_all_k(self):
        for k in range(1, 16):
            assert partition_as(k) == partition_wa(k) + rotate_coefficient(k)
            assert partition_wa(k) == partition_se(k) - saved_writes_coefficient(k)

    def test_scanned_weights_match_se(self):
        for k in range(1, 16):
            w = scanned_weight_vector(k)
            assert Fraction(sum(w), k + 1) == partition_se(k)


class TestSamplingEntropy:
    def test_zero_vector_reduces(self):
        for k in range(1, 8):
            assert sampling_entropy((0,) * (k + 1)) == harmonic(k + 1) - 1

    def test_k3_all_ones(self):
        assert sampling_entropy((1, 1, 1, 1)) == Fraction(341, 280)

    def test_k3_0220(self):
        assert abs(float(sampling_entropy((0, 2, 2, 0))) - 1.092857) < 1e-6


class TestSamplingCoefficients:
    def test_balanced_k3_median_style(self):
        lam2 = trees.parse("[2,1,3]")
        c = sampling_comparison_coeff(lam2, (1, 1, 1, 1))
        assert c == 2
        assert abs(sampling_leading(c, (1, 1, 1, 1)) - 1.642) < 1e-3

    def test_scanned_0220(self):
        c = sampling_scanned_coeff(3, (0, 2, 2, 0))
        assert c == Fraction(5, 4)
        assert abs(sampling_leading(c, (0, 2, 2, 0)) - 1.144) < 1e-3

    def test_scanned_t0_consistency(self):
        for k in range(1, 10):
            assert sampling_scanned_coeff(k, (0,) * (k + 1)) == partition_se(k)

    def test_leading_t0_consistency(self):
        assert sampling_leading(2, (0, 0, 0, 0)) == pytest.approx(leading_coefficient(3, 2))

    def test_k5_sum_table_cell(self):
        # extremal == balanced comparison structure contribution at k=5 cell
        ext = trees.extremal_tree(5)
        t = (0, 1, 2, 2, 1, 0)
        total = sampling_comparison_coeff(ext, t) + sampling_scanned_coeff(5, t)
        assert abs(sampling_leading(total, t) - 2.741) < 1e-3


class TestBestSamplingTable:
    def test_k3_budget0_comparisons(self):
        t, tree, val = best_sampling_table(3, 0, "comparisons")
        assert t == (0, 0, 0, 0)
        assert tree == trees.parse("[2,1,3]")
        assert abs(val - 24 / 13) < 5e-4

    def test_k3_budget8_scanned(self):
        t, tree, val = best_sampling_table(3, 8, "scanned")
        assert t == (1, 3, 3, 1)
        assert tree is None
        assert abs(val - 1.098) < 5e-4

    def test_k7_budget8_sum(self):
        t, tree, val = best_sampling_table(7, 8, "sum")
        assert t == (0, 0, 1, 3, 3, 1, 0, 0)
        assert tree == trees.parse("[4,3,2,1,5,6,7]")
        assert abs(val - 2.698) < 5e-4


class TestEntropyTau:
    def test_uniform(self):
        assert entropy_tau([0.25] * 4) == pytest.approx(math.log(4))

    def test_point_mass(self):
        assert entropy_tau([1.0]) == 0


class TestMinimizeLinearOverEntropy:
    def test_symmetric_pair(self):
        tau, v = minimize_linear_over_entropy((1, 1))
        assert tau[0] == pytest.approx(0.5, abs=1e-9)
        assert v == pytest.approx(1 / math.log(2), abs=1e-9)

    def test_balanced_k3_depths(self):
        tau, v = minimize_linear_over_entropy((2, 2, 2, 2))
        assert all(abs(t - 0.25) < 1e-9 for t in tau)
        assert v == pytest.approx(1 / math.log(2), abs=1e-9)

    def test_scanned_k3(self):
        tau, v = minimize_linear_over_entropy((2, 1, 1, 2))
        x = (math.sqrt(3) - 1) / 2
        assert tau[1] == pytest.approx(x, abs=1e-9)
        assert v == pytest.approx(0.99498, abs=1e-5)

    def test_optimality_against_random_simplex_points(self):
        import random
        rng = random.Random(1)
        for alpha in ((1, 2, 2), (2, 1, 1, 2), (3, 1, 4)):
            tau, v = minimize_linear_over_entropy(alpha)
            obj = sum(a * t for a, t in zip(alpha, tau)) / entropy_tau(tau)
            assert obj == pytest.approx(v, rel=1e-9)
            for _ in range(1000):
                pt = [rng.expovariate(1.0) for _ in alpha]
                s = sum(pt)
                pt = [x / s for x in pt]
                assert v <= sum(a * t for a, t in zip(alpha, pt)) / entropy_tau(pt) + 1e-9

    def test_rejects_nonpositive(self):
        with pytest.raises(ValueError):
            minimize_linear_over_entropy((1, 0))


class TestTauForms:
    def test_a_tau_uniform_matches_se(self):
        assert a_tau(3, [0.25] * 4) == pytest.approx(1.5)

    def test_c_tau_flat(self):
        assert c_tau(trees.parse("[2,1,3]"), [0.25] * 4) == pytest.approx(2.0)

    def test_extremal_closed_form_identity(self):
        for k in range(1, 12):
            ext = trees.extremal_tree(k)
            tau = [1.0 / (k + 1)] * (k + 1)
            assert c_tau_extremal(k, tau) == pytest.approx(c_tau(ext, tau))

    def test_k2_paper_point(self):
        q = math.sqrt(2) - 1
        tau = (q * q, q, q)
        val = a_tau(2, tau) / entropy_tau(tau)
        # quoted as "around 1.13"; exact evaluation gives 1.1346
        assert val == pytest.approx(1.13, abs=5e-3)


class TestOptTau:
    def test_scanned_values(self):
        for k, target in ((3, 0.995), (5, 0.933), (7, 0.917), (9, 0.912)):
            _, v = opt_tau_scanned(k)
            assert abs(v - target) <= 1e-3

    def test_scanned_limit(self):
        _, v = opt_tau_scanned(49)
        assert abs(v - 1 / math.log(3)) < 5e-3

    def test_total_limit(self):
        x, v = opt_tau_total_limit()
        assert abs(2 * x**3 + x**2 - 1) < 1e-10
        assert abs(x - 0.6573) < 1e-4
        assert abs(v - 2.38) < 0.01

    def test_total_k3_range(self):
        _, v = opt_tau_total_extremal(3)
        assert 2.38 <= v <= 2.489

    def test_extremal_minimizes_sum_cost(self):
        # exhaustive confirmation over all trees for k <= 9
        for k in range(1, 10):
            ext = trees.extremal_tree(k)
            w = scanned_weight_vector(k)

            def value(t):
                return minimize_linear_over_entropy(
                    [d + wg for d, wg in zip(t.depths, w)])[1]

            best = min(trees.enumerate_trees(k), key=lambda t: (value(t), t.preorder))
            assert best == ext


class TestBruteForce:
    def test_k1_exact(self):
        for n in (1, 2, 7, 20):
            assert brute_force_optimal_partition_cost(1, n) == n - 1

    def test_k2_against_independent_enumeration(self):
        import itertools
        n = 10
        rows = [t.depths for t in trees.enumerate_trees(2)]
        total = 0
        count = 0
        for a0 in range(n - 1):
            for a1 in range(n - 1 - a0):
                a2 = n - 2 - a0 - a1
                weight = 1  # compositions are equiprobable given uniform ranks
                total += min(sum(d * a for d, a in zip(r, (a0, a1, a2))) for r in rows)
                count += 1
        assert brute_force_optimal_partition_cost(2, n) == Fraction(total, count)

    def test_k3_trend(self):
        v20 = brute_force_optimal_partition_cost(3, 20) / 20
        v60 = brute_force_optimal_partition_cost(3, 60) / 60
        target = Fraction(133, 72)
        assert v20 < v60 < target
        assert target - v60 < (target - v20) / 2

    def test_guard(self):
        with pytest.raises(ValueError):
            brute_force_optimal_partition_cost(4, 10)


class TestCacheMissEstimate:
    def test_per_partition_coefficients(self):
        # per-partition miss coefficient is a/B
        assert float(partition_se(1)) / 8 == pytest.approx(0.125)
        assert float(partition_se(2)) / 8 == pytest.approx(0.166, abs=1e-3)
        assert float(partition_se(5)) / 8 == pytest.approx(0.25)
        assert float(partition_se(9)) / 8 == pytest.approx(0.375)

    def test_m_one_no_correction(self):
        n = 10**6
        full = cache_miss_estimate(3, Fraction(3, 2), 8, 1, n)
        assert full == pytest.approx(
            leading_coefficient(3, Fraction(3, 2)) / 8 * n * math.log(n))

    def test_subtraction(self):
        n = 10**6
        a, b = cache_miss_estimate(1, 1, 8, 3751, n), cache_miss_estimate(1, 1, 8, 1, n)
        assert a < b


class TestExactPartitionExpectations:
    def brute_means(self, k, n):
        # independent oracle: enumerate pivot sets and label arrangements
        import itertools
        from mpqlab.rearrange import ledger_from_labels

        tw = tr = Fraction(0)
        sets = 0
        for piv in itertools.combinations(range(1, n + 1), k):
            ps = [0, *piv, n + 1]
            gv = [q - p - 1 for p, q in zip(ps, ps[1:])]
            base = [g for g in range(k + 1) for _ in range(gv[g])]
            seqs = set(itertools.permutations(base))
            sw = sr = 0
            for s in seqs:
                led = ledger_from_labels(list(s), k)
                sw += led.write_accesses
                sr += led.rotations
            tw += Fraction(sw, len(seqs))
            tr += Fraction(sr, len(seqs))
            sets += 1
        return tw / sets, tr / sets

    def test_matches_exhaustive_enumeration(self):
        for k, n in ((1, 6), (2, 6), (3, 7), (4, 8)):
            bw, br = self.brute_means(k, n)
            assert theory.partition_writes_exact(k, n) == bw
            assert theory.partition_rotations_exact(k, n) == br

    def test_scanned_exact(self):
        assert theory.partition_scanned_exact(1, 11) == 10
        assert theory.partition_scanned_exact(3, 103) == 150
        assert theory.partition_scanned_exact(3, 2) == 0

    def test_asymptotics_match_displayed_coefficients(self):
        n = 10**9
        for k in range(1, 12):
            assert float(theory.partition_writes_exact(k, n) / n) == pytest.approx(
                float(theory.partition_wa(k)), rel=1e-6)
            assert float(theory.partition_rotations_exact(k, n) / n) == pytest.approx(
                float(theory.rotate_coefficient(k)), rel=1e-6)

    def test_placement_writes(self):
        # k rotations; pivot p_i jumps the nonempty segments below it
        assert theory.placement_writes_exact(1, 5) == 1 + Fraction(4, 5)
        assert theory.placement_writes_exact(3, 3) == 0
        n = 10**8
        assert float(theory.placement_writes_exact(4, n)) == pytest.approx(4 + 10, rel=1e-6)


class TestRecurrenceFloat:
    def test_matches_exact_solver(self):
        for k in (1, 2, 3, 5):
            exact = theory.recurrence_solve_exact(k, lambda n: Fraction(n - 1), 300)
            flt = theory.recurrence_solve_float(k, lambda n: float(n - 1), 300)
            for n in range(301):
                assert flt[n] == pytest.approx(float(exact[n]), rel=1e-12, abs=1e-9)

    def test_cutoff_zeroes_small_subfiles(self):
        flt = theory.recurrence_solve_float(1, lambda n: float(n - 1), 10, cutoff=3)
        assert flt[3] == 0.0
        assert flt[4] == 3.0  # all subfiles of the size-4 problem are <= 3

    def test_accepts_precomputed_cost_vector(self):
        import numpy as np

        costs = np.arange(101, dtype=float) - 1
        a = theory.recurrence_solve_float(1, lambda n: float(n - 1), 100)
        b = theory.recurrence_solve_float(1, costs, 100)
        assert a.tolist() == b.tolist()

    def test_exhaustive_sort_mean(self):
        # cross-module: exhaustive mean over all 6! inputs, cutoff 2
        import itertools
        from mpqlab.sorter import SortConfig, multipivot_sort

        flt = theory.recurrence_solve_float(1, lambda n: float(n - 1), 6, cutoff=2)
        total = 0
        for perm in itertools.permutations(range(1, 7)):
            arr = list(perm)
            total += multipivot_sort(arr, SortConfig(k=1, cutoff=2)).comparisons
        assert total / math.factorial(6) == pytest.approx(flt[6], rel=1e-12)
