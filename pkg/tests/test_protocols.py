import math
import unittest
from fractions import Fraction

from meslab.arith import Dimension, ModInt
from meslab.errors import ConfigError
from meslab.geometry import Point, lines_through_point, make_line
from meslab.hilbert import states_equal
from meslab.mes import line_state, point_state, royal_state
from meslab.mub import BasisLabel
from meslab.protocols import (
    UNDETERMINED,
    AliceOutcome,
    BasisPolicy,
    KingChoice,
    MeasurementRecord,
    Protocol,
    TrialTask,
    Verdict,
    alice_distribution,
    alice_measure,
    branch_table,
    enumerate_mkp,
    enumerate_track,
    king_branches,
    king_measure,
    mkp_deduce,
    outcome_table,
    parse_policy,
    prepared_state,
    run_mkp,
    run_track,
    run_trial,
    track_deduce,
)
from meslab.rng import cumulative_weights, integer_weights, resolve_seed, sample_cumulative, sample_index, trial_generator


def outcome(m_dd, m0, d):
    dim = Dimension(d)
    return AliceOutcome(ModInt(m_dd, dim), ModInt(m0, dim))


def basis(b, d):
    return BasisLabel.cb() if b is None else BasisLabel.standard(ModInt(b, Dimension(d)))


class TestDeduction(unittest.TestCase):
    def test_mkp_deduce(self):
        self.assertEqual(mkp_deduce(outcome(1, 0, 3), basis(1, 3)).value, 2)
        self.assertEqual(mkp_deduce(outcome(1, 0, 3), basis(None, 3)).value, 1)
        self.assertEqual(mkp_deduce(outcome(2, 1, 5), basis(0, 5)).value, 1)

    def test_track_deduce(self):
        prepared = make_line(1, 0, 3)
        self.assertEqual(track_deduce(prepared, outcome(0, 1, 3)), basis(1, 3))
        self.assertIs(track_deduce(prepared, outcome(1, 0, 3)), UNDETERMINED)
        self.assertEqual(track_deduce(prepared, outcome(1, 2, 3)), basis(None, 3))

    def test_verdict_is_computed(self):
        dim = Dimension(3)
        king = KingChoice(basis(1, 3), ModInt(2, dim))
        right = MeasurementRecord(Protocol.MKP, 0, None, king, outcome(1, 0, 3), ModInt(2, dim))
        wrong = MeasurementRecord(Protocol.MKP, 0, None, king, outcome(1, 0, 3), ModInt(1, dim))
        unknown = MeasurementRecord(Protocol.TRACK, 0, make_line(1, 0, 3), king, outcome(1, 0, 3), UNDETERMINED)
        self.assertIs(right.verdict, Verdict.CORRECT)
        self.assertIs(wrong.verdict, Verdict.ERROR)
        self.assertIs(unknown.verdict, Verdict.UNDETERMINED)
        self.assertEqual(unknown.to_json()['deduction'], "undetermined")


class TestMeasurements(unittest.TestCase):
    def test_king_on_royal(self):
        d = 5
        royal = royal_state(d, normalized=True)
        for b in (basis(None, d), basis(0, d), basis(3, d)):
            for m, p, post in king_branches(royal, b):
                self.assertEqual(p, Fraction(1, d))
                self.assertTrue(states_equal(post, point_state(Point(m, b)).ket))

    def test_king_on_line_state(self):
        psi = line_state(make_line(2, 3, 5)).ket
        for _, p, _ in king_branches(psi, basis(4, 5)):
            self.assertEqual(p, Fraction(1, 5))

    def test_alice_on_line_state(self):
        line = make_line(2, 3, 5)
        distribution = dict(alice_distribution(line_state(line).ket))
        self.assertEqual(distribution[line], 1)
        self.assertEqual(sum(distribution.values()), 1)

    def test_alice_on_point_state(self):
        point = Point(ModInt(1, Dimension(5)), basis(2, 5))
        distribution = dict(alice_distribution(point_state(point).ket))
        through = set(lines_through_point(point))
        for line, p in distribution.items():
            self.assertEqual(p, Fraction(1, 5) if line in through else 0)

    def test_sampled_measurements(self):
        rng = trial_generator(42, 0)
        royal = royal_state(3, normalized=True)
        m, post = king_measure(royal, basis(1, 3), rng)
        alice = alice_measure(post, rng)
        self.assertEqual(mkp_deduce(alice, basis(1, 3)), m)


class TestTables(unittest.TestCase):
    def test_tables_match_state_level_measurements(self):
        d = 5
        for b in (basis(None, d), basis(2, d)):
            for m, p, post in branch_table(d, None, b):
                self.assertEqual(p, Fraction(1, d))
                expected = alice_distribution(point_state(Point(m, b)).ket)
                self.assertEqual(outcome_table(d, None, b, m), expected)
                self.assertTrue(states_equal(post, point_state(Point(m, b)).ket))

    def test_run_trial_replays_state_level_draws(self):
        line = make_line(3, 1, 5)
        for protocol, prep in ((Protocol.MKP, None), (Protocol.TRACK, line)):
            task = TrialTask(protocol, 5, 1234, BasisPolicy(), prep)
            for trial in range(25):
                rng = trial_generator(1234, trial)
                b = task.policy.choose(Dimension(5), rng)
                m, post = king_measure(prepared_state(5, prep), b, rng)
                alice = alice_measure(post, rng)
                record = run_trial(task, trial)
                self.assertEqual((record.king.basis, record.king.m, record.alice), (b, m, alice))

    def test_cumulative_sampling(self):
        weights = cumulative_weights([Fraction(1, 4), Fraction(0), Fraction(3, 4)])
        self.assertEqual(weights, (1, 1, 4))
        rng = trial_generator(3, 0)
        draws = {sample_cumulative(rng, weights) for _ in range(200)}
        self.assertEqual(draws, {0, 2})
        with self.assertRaises(ValueError):
            sample_cumulative(rng, (0, 0))


class TestRng(unittest.TestCase):
    def test_streams_are_reproducible(self):
        a = [int(trial_generator(7, 3).integers(1000)) for _ in range(3)]
        b = [int(trial_generator(7, 3).integers(1000)) for _ in range(3)]
        self.assertEqual(a, b)

    def test_exact_sampling_skips_zero_weight(self):
        self.assertEqual(integer_weights([Fraction(1, 3), Fraction(2, 3), Fraction(0)]), [1, 2, 0])
        rng = trial_generator(1, 0)
        draws = {sample_index(rng, [Fraction(0), Fraction(1, 2), Fraction(1, 2)]) for _ in range(200)}
        self.assertEqual(draws, {1, 2})

    def test_resolve_seed(self):
        self.assertEqual(resolve_seed(5), 5)
        self.assertLess(resolve_seed(None), 2 ** 64)
        with self.assertRaises(ValueError):
            resolve_seed(-1)


class TestEnumeration(unittest.TestCase):
    def test_mkp_exhaustive(self):
        report = enumerate_mkp(3)
        self.assertTrue(report.passed, report.violations)
        self.assertEqual(report.details['branches'], 36)
        for cell in report.details['masses'].values():
            self.assertEqual(cell, {'correct': "1", 'undetermined': "0", 'error': "0"})

    def test_mkp_larger(self):
        for d in (5, 7):
            self.assertTrue(enumerate_mkp(d).passed)

    def test_mkp_d11(self):
        report = enumerate_mkp(11)
        self.assertTrue(report.passed, report.violations)
        self.assertEqual(report.details['branches'], 12 * 11 * 11)

    def test_track_exhaustive(self):
        report = enumerate_track(3)
        self.assertTrue(report.passed, report.violations)
        for per_basis in report.details['masses'].values():
            for cell in per_basis.values():
                self.assertEqual(cell, {'correct': "2/3", 'undetermined': "1/3", 'error': "0"})

    def test_track_single_line_d5(self):
        report = enumerate_track(5, [make_line(1, 4, 5)])
        self.assertTrue(report.passed, report.violations)
        cell = report.details['masses']['(1,4)']['2']
        self.assertEqual(cell['undetermined'], "1/5")


class TestSimulation(unittest.TestCase):
    def test_mkp_always_succeeds(self):
        report = run_mkp(5, trials=1000, seed=42)
        self.assertEqual(report.success_count, 1000)
        self.assertEqual(report.exact['correct'], "1")
        self.assertEqual(sum(sum(cell.values()) for cell in report.per_basis.values()), 1000)

    def test_mkp_d11_ten_thousand_trials(self):
        report = run_mkp(11, trials=10_000, seed=2024)
        self.assertEqual(report.success_count, 10_000)
        self.assertEqual(report.rate(report.success_count), 1.0)

    def test_outcome_cell_frequencies(self):
        d, trials = 3, 10_000
        line = make_line(1, 0, d)
        b = basis(1, d)
        report = run_track(d, line, trials=trials, seed=77, b_policy=BasisPolicy(b), transcript=True)
        observed = {}
        for row in report.transcript:
            key = (row['king']['m'], tuple(row['alice']))
            observed[key] = observed.get(key, 0) + 1
        seen = 0
        for m, p_king, _ in branch_table(d, line, b):
            for j, p_alice in outcome_table(d, line, b, m):
                key = (m.value, (j.m_dd.value, j.m0.value))
                count = observed.get(key, 0)
                p = float(p_king * p_alice)
                if p == 0:
                    self.assertEqual(count, 0, key)
                    continue
                seen += count
                tolerance = 4 * math.sqrt(p * (1 - p) / trials)
                self.assertLessEqual(abs(count / trials - p), tolerance, key)
        self.assertEqual(seen, trials)

    def test_per_basis_verdict_frequencies(self):
        d, trials = 5, 10_000
        line = make_line(2, 3, d)
        report = run_track(d, line, trials=trials, seed=31)
        self.assertTrue(report.within_tolerance())
        for cell in report.per_basis.values():
            total = sum(cell.values())
            self.assertEqual(cell['error'], 0)
            p = 1 / d
            tolerance = 4 * math.sqrt(p * (1 - p) / total)
            self.assertLessEqual(abs(cell['undetermined'] / total - p), tolerance)

    def test_track_fixed_basis(self):
        line = make_line(1, 0, 5)
        report = run_track(5, line, trials=2000, seed=11, b_policy=BasisPolicy(basis(2, 5)))
        self.assertEqual(report.error_count, 0)
        self.assertEqual(report.exact['undetermined'], "1/5")
        self.assertEqual(report.success_count + report.undetermined_count, 2000)
        self.assertTrue(report.within_tolerance())
        self.assertEqual(list(report.per_basis), ["2"])

    def test_track_cb(self):
        report = run_track(3, make_line(2, 1, 3), trials=300, seed=3, b_policy=parse_policy("ö", 3))
        self.assertEqual(report.error_count, 0)
        self.assertGreater(report.undetermined_count, 0)

    def test_deterministic(self):
        first = run_mkp(3, trials=40, seed=9, transcript=True).to_dict()
        second = run_mkp(3, trials=40, seed=9, transcript=True).to_dict()
        self.assertEqual(first, second)
        self.assertEqual(len(first['transcript']), 40)

    def test_parallel_matches_sequential(self):
        line = make_line(0, 2, 3)
        sequential = run_track(3, line, trials=60, seed=5, transcript=True).to_dict()
        parallel = run_track(3, line, trials=60, seed=5, workers=2, transcript=True).to_dict()
        self.assertEqual(sequential, parallel)

    def test_invalid_config(self):
        with self.assertRaises(ConfigError):
            run_mkp(3, trials=0, seed=1)
        with self.assertRaises(ConfigError):
            parse_policy("7", 3)
        with self.assertRaises(ConfigError):
            run_track(3, make_line(0, 0, 5), trials=10, seed=1)


if __name__ == '__main__':
    unittest.main()
