import unittest

from meslab.arith import Dimension, ModInt, cyc_abs2, cyc_from_int, cyc_root
from meslab.collective import (
    CollectiveIndex,
    CollectiveMode,
    CollectiveOp,
    ParticleOp,
    apply_collective,
    apply_particle,
    collective_cb,
    collective_mub_pair,
    collective_mub_state,
    collective_product,
    from_collective,
    relabel,
    to_collective,
    verify_collective,
)
from meslab.errors import LabelingMismatchError
from meslab.hilbert import Labeling, inner, ket_cb, ket_from_exponents, scale_state, states_equal, tensor
from meslab.mub import BasisLabel, MubLabel, all_labels, mub_state


class TestCoordinates(unittest.TestCase):
    def test_coordinates_d5(self):
        dim = Dimension(5)
        idx = to_collective(ModInt(3, dim), ModInt(1, dim))
        # n_r = 3 * (3 - 1) = 6 = 1, n_c = 3 * (3 + 1) = 12 = 2 with 1/2 = 3
        self.assertEqual((idx.n_r.value, idx.n_c.value), (1, 2))
        self.assertEqual(from_collective(idx), (ModInt(3, dim), ModInt(1, dim)))

    def test_round_trip(self):
        dim = Dimension(7)
        for n_r in dim.elements():
            for n_c in dim.elements():
                n1, n2 = from_collective(CollectiveIndex(n_r, n_c))
                self.assertEqual(to_collective(n1, n2), CollectiveIndex(n_r, n_c))

    def test_relabel_is_an_involution(self):
        dim = Dimension(5)
        psi = tensor(ket_cb(ModInt(3, dim)), ket_cb(ModInt(1, dim)))
        collective = relabel(psi)
        self.assertIs(collective.labeling, Labeling.COLLECTIVE)
        self.assertEqual(collective.amps[1 * 5 + 2], psi.amp(3, 1))
        self.assertTrue(states_equal(relabel(collective), psi))
        self.assertEqual(inner(collective, collective_cb(ModInt(1, dim), ModInt(2, dim))), cyc_root(0, 5))


class TestOperators(unittest.TestCase):
    def setUp(self):
        self.dim = Dimension(5)
        self.state = tensor(ket_cb(ModInt(2, self.dim)), ket_cb(ModInt(4, self.dim)))

    def test_z1_factorization(self):
        lhs = apply_particle(ParticleOp.Z1, 1, self.state)
        rhs = apply_collective(CollectiveOp.Z_C, 1, apply_collective(CollectiveOp.Z_R, 1, self.state))
        self.assertTrue(states_equal(lhs, rhs))
        self.assertTrue(states_equal(lhs, scale_state(self.state, cyc_root(2, 5))))

    def test_labeling_preserved(self):
        out = apply_collective(CollectiveOp.X_R, 2, self.state)
        self.assertIs(out.labeling, Labeling.PARTICLE)
        out = apply_collective(CollectiveOp.X_R, 2, relabel(self.state))
        self.assertIs(out.labeling, Labeling.COLLECTIVE)

    def test_shift_moves_relative_coordinate(self):
        idx = to_collective(ModInt(2, self.dim), ModInt(4, self.dim))
        shifted = apply_collective(CollectiveOp.X_R, 1, relabel(self.state))
        expected = collective_cb(idx.n_r + 1, idx.n_c)
        self.assertTrue(states_equal(shifted, expected))

    def test_collective_product_checks_dimension(self):
        with self.assertRaises(LabelingMismatchError):
            collective_product(ket_cb(ModInt(0, Dimension(3))), ket_cb(ModInt(0, self.dim)))

    def test_weyl_commutation_order(self):
        omega = cyc_root(1, 5)
        for n_r in self.dim.elements():
            state = collective_cb(n_r, ModInt(3, self.dim))
            for x_op, z_op in ((CollectiveOp.X_R, CollectiveOp.Z_R), (CollectiveOp.X_C, CollectiveOp.Z_C)):
                zx = apply_collective(z_op, 1, apply_collective(x_op, 1, state))
                xz = apply_collective(x_op, 1, apply_collective(z_op, 1, state))
                self.assertTrue(states_equal(zx, scale_state(xz, omega)))
                self.assertFalse(states_equal(xz, scale_state(zx, omega)))

    def test_relative_fourier_state(self):
        # |2 m0, b=0>_r = (1/sqrt(d)) sum_n w**(-2 m0 n) |n>_r
        for m0 in self.dim.elements():
            label = MubLabel(2 * m0, BasisLabel.standard(ModInt(0, self.dim)))
            expected = ket_from_exponents(self.dim, [(-2 * m0.value * n) % 5 for n in range(5)], scale=1)
            self.assertTrue(states_equal(collective_mub_state(CollectiveMode.R, label), expected))

    def test_center_of_mass_cb_state(self):
        for m in self.dim.elements():
            ket = collective_mub_state(CollectiveMode.C, MubLabel(m, BasisLabel.cb()))
            self.assertTrue(states_equal(ket, ket_cb(m)))
        with self.assertRaises(LabelingMismatchError):
            collective_mub_state("r", MubLabel(ModInt(0, self.dim), BasisLabel.cb()))

    def test_mode_states_are_unbiased(self):
        dim = Dimension(3)
        one_over_d = cyc_from_int(1, 3, scale=2)
        for mode in CollectiveMode:
            labels = all_labels(dim)
            for u in labels:
                for v in labels:
                    if u.b == v.b:
                        continue
                    overlap = inner(collective_mub_state(mode, u), collective_mub_state(mode, v))
                    self.assertEqual(cyc_abs2(overlap), one_over_d)

    def test_mode_pair_places_each_factor(self):
        r_label = MubLabel(ModInt(4, self.dim), BasisLabel.standard(ModInt(0, self.dim)))
        c_label = MubLabel(ModInt(2, self.dim), BasisLabel.cb())
        pair = collective_mub_pair(r_label, c_label)
        self.assertIs(pair.labeling, Labeling.COLLECTIVE)
        for n_r in range(5):
            for n_c in range(5):
                expected = mub_state(r_label)[n_r] if n_c == 2 else cyc_from_int(0, 5)
                self.assertEqual(pair.amp(n_r, n_c), expected)


class TestVerification(unittest.TestCase):
    def test_verify_collective(self):
        for d in (3, 5, 7):
            report = verify_collective(d)
            self.assertTrue(report.passed, report.violations)


if __name__ == '__main__':
    unittest.main()
