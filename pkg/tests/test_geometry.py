import unittest

from meslab.arith import Dimension
from meslab.errors import ParallelError
from meslab.geometry import (
    all_lines,
    all_points,
    columns,
    contains,
    incidence_rows,
    incidence_table,
    intersection,
    line_points,
    line_through,
    lines_through_point,
    make_line,
    make_point,
    to_dot,
    verify_dapg,
)


class TestIncidence(unittest.TestCase):
    def test_points_of_line_d3(self):
        line = make_line(1, 0, 3)
        points = [(p.m.value, str(p.b)) for p in line_points(line)]
        self.assertEqual(points, [(1, "ö"), (0, "0"), (2, "1"), (1, "2")])

    def test_counts(self):
        for d in (3, 5, 7):
            self.assertEqual(len(all_lines(d)), d * d)
            self.assertEqual(len(all_points(d)), d * (d + 1))
            self.assertEqual(len(columns(d)), d + 1)

    def test_lines_through_point(self):
        point = make_point(2, 1, 3)
        through = lines_through_point(point)
        self.assertEqual(len(through), 3)
        self.assertIn(make_line(1, 0, 3), through)
        for line in through:
            self.assertTrue(contains(line, point))

    def test_line_through(self):
        self.assertEqual(line_through(make_point(1, None, 3), make_point(2, 1, 3)), make_line(1, 0, 3))
        self.assertEqual(line_through(make_point(0, 0, 3), make_point(1, 2, 3)), make_line(1, 0, 3))

    def test_same_column_is_parallel(self):
        with self.assertRaises(ParallelError):
            line_through(make_point(0, 1, 5), make_point(3, 1, 5))
        with self.assertRaises(ParallelError):
            line_through(make_point(0, None, 5), make_point(3, "ö", 5))
        with self.assertRaises(ValueError):
            line_through(make_point(0, 1, 5), make_point(0, 1, 5))

    def test_intersection(self):
        self.assertEqual(intersection(make_line(1, 0, 3), make_line(1, 2, 3)), make_point(1, None, 3))
        # m0 + b (2 m_dd - 1)/2: (1,0) and (0,1) meet at b = 1
        self.assertEqual(intersection(make_line(1, 0, 3), make_line(0, 1, 3)), make_point(2, 1, 3))
        with self.assertRaises(ValueError):
            intersection(make_line(1, 0, 3), make_line(1, 0, 3))


class TestVerification(unittest.TestCase):
    def test_verify_dapg(self):
        for d in (3, 5, 7, 11, 13):
            report = verify_dapg(d)
            self.assertTrue(report.passed, report.violations)

    def test_outputs(self):
        table = incidence_table(3)
        self.assertEqual(table['points'], 12)
        self.assertEqual(len(table['lines']), 9)
        rows = incidence_rows(3)
        self.assertEqual(rows[3], {'m_dd': 1, 'm0': 0, 'b=ö': 1, 'b=0': 0, 'b=1': 2, 'b=2': 1})
        dot = to_dot(Dimension(3))
        self.assertTrue(dot.startswith("graph dapg {"))
        self.assertEqual(dot.count(" -- "), 9 * 3)


if __name__ == '__main__':
    unittest.main()
