import unittest
from fractions import Fraction

from meslab.arith import Dimension, ModInt, cyc_abs2, cyc_from_int, cyc_to_fraction
from meslab.collective import relabel
from meslab.errors import DimensionMismatchError
from meslab.geometry import all_lines, all_points, contains, make_line, make_point
from meslab.hilbert import inner, is_normalized, norm2
from meslab.mes import (
    line_operator,
    line_overlap,
    line_state,
    line_state_table,
    leaky_marginal,
    operator_squares_to_identity,
    overlap_matrix,
    overlap_point_line,
    point_projector,
    point_state,
    predicted_tilde_row,
    royal_state,
    tilde_label,
    trace_product,
    unnormalized_line_state,
    verify_balance,
    verify_leaky,
    verify_line_states,
    verify_mes,
    verify_operator_identities,
    verify_overlaps,
)
from meslab.mub import BasisLabel, MubLabel, tilde


class TestStates(unittest.TestCase):
    def test_royal(self):
        self.assertEqual(norm2(royal_state(5)), cyc_from_int(5, 5))
        self.assertTrue(is_normalized(royal_state(5, normalized=True)))

    def test_point_state_normalized(self):
        for p in all_points(3):
            self.assertTrue(is_normalized(point_state(p).ket))

    def test_line_state_d3_support(self):
        # j = (1,0): support (n, 2-n) = (0,2), (1,1), (2,0), all with phase 1
        psi = line_state(make_line(1, 0, 3)).ket
        amplitude = cyc_from_int(1, 3, scale=1)
        for n1, n2 in ((0, 2), (1, 1), (2, 0)):
            self.assertEqual(psi.amp(n1, n2), amplitude)
        self.assertEqual(sum(1 for a in psi.amps if not a.is_zero()), 3)

    def test_unnormalized_is_sqrt_d_larger(self):
        line = make_line(2, 1, 5)
        self.assertEqual(norm2(unnormalized_line_state(line)), cyc_from_int(5, 5))
        self.assertTrue(line_state(line).normalized)

    def test_overlap(self):
        line = make_line(1, 0, 3)
        on = overlap_point_line(make_point(2, 1, 3), line)
        off = overlap_point_line(make_point(0, 1, 3), line)
        self.assertEqual(cyc_to_fraction(cyc_abs2(on)), Fraction(1, 3))
        self.assertTrue(off.is_zero())

    def test_line_overlap_matches_dense_inner(self):
        d = 5
        lines = all_lines(d)[::4]
        states = [point_state(p).ket for p in all_points(d)[::3]] + [line_state(j).ket for j in lines]
        for j in lines:
            bra = line_state(j).ket
            for psi in states:
                self.assertEqual(line_overlap(j, psi), inner(bra, psi))
                self.assertEqual(line_overlap(j, relabel(psi)), inner(bra, psi))
        with self.assertRaises(DimensionMismatchError):
            line_overlap(make_line(0, 0, 3), royal_state(5))

    def test_overlap_matrix(self):
        doc = overlap_matrix(3)
        self.assertEqual(len(doc['probabilities']), 12)
        self.assertEqual(len(doc['probabilities'][0]), 9)
        for p, row in zip(all_points(3), doc['probabilities']):
            for j, value in zip(all_lines(3), row):
                self.assertEqual(value, "1/3" if contains(j, p) else "0")

    def test_line_state_table(self):
        table = line_state_table(3)
        self.assertEqual(len(table), 9)
        self.assertEqual(table[3]['line'], [1, 0])
        self.assertEqual(table[3]['collective'], {'c': 1, 'r_momentum': 0})


class TestLeakyMarginal(unittest.TestCase):
    def test_weight_and_label(self):
        dim = Dimension(5)
        line = make_line(3, 2, 5)
        one_over_d = cyc_from_int(1, 5, scale=2)
        for b in (BasisLabel.cb(), BasisLabel.standard(ModInt(0, dim)), BasisLabel.standard(ModInt(3, dim))):
            for m in dim.elements():
                label = MubLabel(m, b)
                chi, weight = leaky_marginal(label, line)
                self.assertEqual(weight, one_over_d)
                self.assertEqual(tilde_label(chi, tilde(label).b), predicted_tilde_row(label, line))


class TestOperators(unittest.TestCase):
    def test_line_operator(self):
        d = 5
        ops = [line_operator(j) for j in all_lines(d)[:6]]
        for op in ops:
            self.assertTrue(operator_squares_to_identity(op))
        self.assertEqual(trace_product(ops[0].matrix, ops[0].matrix), cyc_from_int(d, d))
        self.assertTrue(trace_product(ops[0].matrix, ops[1].matrix).is_zero())

    def test_cb_projector(self):
        proj = point_projector(make_point(1, None, 3))
        self.assertEqual(proj[1][1], cyc_from_int(1, 3))
        self.assertTrue(proj[0][0].is_zero())


class TestVerification(unittest.TestCase):
    def test_line_states(self):
        for d in (3, 5, 7, 11, 13):
            report = verify_line_states(d)
            self.assertTrue(report.passed, report.violations)
            self.assertEqual(report.details['weyl_bases'], d + 1 if d <= 7 else 0)

    def test_balance(self):
        for d in (3, 5, 7):
            report = verify_balance(d)
            self.assertTrue(report.passed, report.violations)

    def test_overlaps(self):
        for d in (3, 5, 7):
            report = verify_overlaps(d)
            self.assertTrue(report.passed, report.violations)

    def test_leaky(self):
        for d in (3, 5, 7):
            report = verify_leaky(d)
            self.assertTrue(report.passed, report.violations)
            self.assertTrue(report.details['label_matches'])

    def test_operators(self):
        for d in (3, 5, 7):
            report = verify_operator_identities(d)
            self.assertTrue(report.passed, report.violations)

    def test_verify_mes(self):
        report = verify_mes(3)
        self.assertTrue(report.passed, report.violations)
        self.assertIn('mes.overlaps', report.details)

    def test_collective_form_d7(self):
        # |m_dd>_c |2 m0>_r: amplitude w**(-(n-n') m0)/sqrt(d) on n + n' = 2 m_dd
        line = make_line(2, 4, 7)
        psi = line_state(line).ket
        self.assertTrue(is_normalized(psi))
        self.assertTrue(psi.amp(0, 3).is_zero())
        self.assertFalse(psi.amp(0, 4).is_zero())


if __name__ == '__main__':
    unittest.main()
