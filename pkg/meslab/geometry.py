"""
Dual affine plane of prime order d.

Points are alpha = (m, b): row m, column b in {ö, 0, ..., d-1}; there are
d(d+1) of them. Lines are named by j = (m_dd, m0), the line's row in column ö
and in column 0; there are d*d of them. The line through those two anchors is

    m(b) = m0 + (b/2)(2 m_dd - 1)   for b != ö,     m(ö) = m_dd.
"""

import logging
from dataclasses import dataclass
from itertools import combinations
from typing import Any, Dict, List, Tuple, Union

from meslab.arith import Dimension, ModInt, as_dimension, half
from meslab.errors import ParallelError
from meslab.mub import BasisLabel, basis_labels
from meslab.reports import VerificationReport

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Point:
    m: ModInt
    b: BasisLabel

    def to_json(self) -> List:
        return [self.m.value, self.b.to_json()]

    def __str__(self) -> str:
        return f"{self.m.value}({self.b})"


@dataclass(frozen=True)
class Line:
    m_dd: ModInt
    m0: ModInt

    @property
    def dim(self) -> Dimension:
        return self.m_dd.dim

    def to_json(self) -> List[int]:
        return [self.m_dd.value, self.m0.value]

    def __str__(self) -> str:
        return f"({self.m_dd.value},{self.m0.value})"


def make_line(m_dd: int, m0: int, d: Union[int, Dimension]) -> Line:
    dim = as_dimension(d)
    return Line(ModInt(m_dd, dim), ModInt(m0, dim))


def make_point(m: int, b: Union[int, str, None], d: Union[int, Dimension]) -> Point:
    """b=None (or 'ö') is the computational column."""
    dim = as_dimension(d)
    if b is None or b in ("ö", "o", "cb"):
        return Point(ModInt(m, dim), BasisLabel.cb())
    return Point(ModInt(m, dim), BasisLabel.standard(ModInt(int(b), dim)))


def all_points(d: Union[int, Dimension]) -> Tuple[Point, ...]:
    """Column by column, ö first."""
    dim = as_dimension(d)
    return tuple(Point(m, b) for b in basis_labels(dim) for m in dim.elements())


def all_lines(d: Union[int, Dimension]) -> Tuple[Line, ...]:
    dim = as_dimension(d)
    return tuple(Line(m_dd, m0) for m_dd in dim.elements() for m0 in dim.elements())


def row_at(line: Line, b: BasisLabel) -> ModInt:
    """m(b) of the line equation."""
    if b.is_cb:
        return line.m_dd
    return line.m0 + half(line.dim) * b.b * (2 * line.m_dd - 1)


def line_points(line: Line) -> Tuple[Point, ...]:
    """The d+1 points of line j, one per column, ö first."""
    return tuple(Point(row_at(line, b), b) for b in basis_labels(line.dim))


def contains(line: Line, point: Point) -> bool:
    return row_at(line, point.b) == point.m


def lines_through_point(point: Point) -> Tuple[Line, ...]:
    """The d lines sharing point alpha."""
    dim = point.m.dim
    if point.b.is_cb:
        return tuple(Line(point.m, m0) for m0 in dim.elements())
    h = half(dim)
    return tuple(Line(m_dd, point.m - h * point.b.b * (2 * m_dd - 1)) for m_dd in dim.elements())


def line_through(first: Point, second: Point) -> Line:
    """The unique line joining two points of different columns."""
    if first == second:
        raise ValueError(f"line_through needs two distinct points, got {first} twice")
    if first.b == second.b:
        raise ParallelError(first, second)
    dim = first.m.dim
    h = half(dim)
    if second.b.is_cb:
        first, second = second, first
    if first.b.is_cb:
        m_dd = first.m
    else:
        # m - m' = (b - b')/2 (2 m_dd - 1)
        m_dd = (first.m - second.m) / (first.b.b - second.b.b) + h
    m0 = second.m - h * second.b.b * (2 * m_dd - 1)
    return Line(m_dd, m0)


def intersection(first: Line, second: Line) -> Point:
    """The single point two distinct lines share."""
    if first == second:
        raise ValueError(f"line {first} intersects itself everywhere")
    if first.m_dd == second.m_dd:
        return Point(first.m_dd, BasisLabel.cb())
    b = (second.m0 - first.m0) / (first.m_dd - second.m_dd)
    column = BasisLabel.standard(b)
    return Point(row_at(first, column), column)


def columns(d: Union[int, Dimension]) -> Dict[BasisLabel, Tuple[Point, ...]]:
    """The d+1 parallel classes of points."""
    dim = as_dimension(d)
    return {b: tuple(Point(m, b) for m in dim.elements()) for b in basis_labels(dim)}


def verify_dapg(d: Union[int, Dimension]) -> VerificationReport:
    """Check the five incidence axioms plus the derived identities."""
    dim = as_dimension(d)
    n = dim.d
    report = VerificationReport("geometry.dapg", n)
    points = all_points(dim)
    lines = all_lines(dim)
    point_sets = {j: frozenset(line_points(j)) for j in lines}
    through = {p: frozenset(lines_through_point(p)) for p in points}

    # (a) counts
    report.check(len(lines) == n * n, f"{len(lines)} lines, expected {n * n}")
    report.check(len(set(points)) == n * (n + 1), f"{len(set(points))} points, expected {n * (n + 1)}")

    # (c) each point on d lines, each line has d+1 points, one per column
    for j in lines:
        pts = point_sets[j]
        report.check(len(pts) == n + 1, lambda: f"line {j} has {len(pts)} points")
        report.check(len({p.b for p in pts}) == n + 1, lambda: f"line {j} repeats a column")
        report.check(pts == frozenset(p for p in points if contains(j, p)), lambda: f"line {j} point set disagrees with membership")
    for p in points:
        report.check(len(through[p]) == n, lambda: f"point {p} lies on {len(through[p])} lines")
        report.check(all(p in point_sets[j] for j in through[p]), lambda: f"lines_through_point({p}) returned a line missing it")
        report.check(through[p] == frozenset(j for j in lines if p in point_sets[j]), lambda: f"lines through {p} disagree with enumeration")

    # double counting
    incidences = sum(len(s) for s in point_sets.values())
    report.check(incidences == n * n * (n + 1), f"line-side incidence count {incidences}")
    report.check(incidences == sum(len(s) for s in through.values()), "incidence double count mismatch")

    # (b) distinct lines share exactly one point, consistent with the intersection formula
    for j, k in combinations(lines, 2):
        common = point_sets[j] & point_sets[k]
        if not report.check(len(common) == 1, lambda: f"lines {j} and {k} share {len(common)} points"):
            continue
        report.check(intersection(j, k) in common, lambda: f"intersection({j},{k}) formula disagrees")

    # (b), (e) cross-column points: exactly one joining line; (d) same-column points: none
    for p, q in combinations(points, 2):
        shared = through[p] & through[q]
        if p.b == q.b:
            report.check(not shared, lambda: f"same-column points {p}, {q} share a line")
            try:
                line_through(p, q)
                report.check(False, f"line_through({p},{q}) did not signal parallel")
            except ParallelError:
                report.check(True, "")
        else:
            report.check(len(shared) == 1, lambda: f"points {p}, {q} lie on {len(shared)} common lines")
            report.check(shared == {line_through(p, q)}, lambda: f"line_through({p},{q}) is not their common line")

    # (d) d+1 disjoint classes of d points covering everything
    classes = columns(dim)
    report.check(len(classes) == n + 1, f"{len(classes)} parallel classes")
    covered = [p for members in classes.values() for p in members]
    report.check(len(covered) == len(set(covered)) == len(points), "columns do not partition the points")
    report.check(all(len(members) == n for members in classes.values()), "a column does not hold d points")

    logger.debug(f"verify_dapg d={n}: {report.checks} checks, {report.violation_count} violations")
    return report


def incidence_table(d: Union[int, Dimension]) -> Dict[str, Any]:
    dim = as_dimension(d)
    return {
        'd': dim.d,
        'points': len(all_points(dim)),
        'lines': [
            {'line': j.to_json(), 'points': [p.to_json() for p in line_points(j)]}
            for j in all_lines(dim)
        ],
    }


def incidence_rows(d: Union[int, Dimension]) -> List[Dict[str, Any]]:
    """One row per line; one column per basis label holding the row m(b)."""
    dim = as_dimension(d)
    rows = []
    for j in all_lines(dim):
        row: Dict[str, Any] = {'m_dd': j.m_dd.value, 'm0': j.m0.value}
        for p in line_points(j):
            row[f"b={p.b}"] = p.m.value
        rows.append(row)
    return rows


def incidence_text(d: Union[int, Dimension]) -> str:
    dim = as_dimension(d)
    header = "line      " + " ".join(f"{str(b):>3}" for b in basis_labels(dim))
    lines = [f"=== Incidence table, d={dim.d} ===", header]
    for j in all_lines(dim):
        lines.append(f"{str(j):<9} " + " ".join(f"{p.m.value:>3}" for p in line_points(j)))
    return "\n".join(lines) + "\n"


PALETTE = ("red", "blue", "darkgreen", "orange", "purple", "brown", "magenta",
           "cyan", "gold", "gray", "navy", "olive", "teal")


def to_dot(d: Union[int, Dimension]) -> str:
    """Points as nodes clustered by column; each line a colored path through its points."""
    dim = as_dimension(d)
    out = ["graph dapg {", "  rankdir=LR;", "  node [shape=circle, fontsize=10];"]
    for b, members in columns(dim).items():
        out.append(f'  subgraph "cluster_{b}" {{')
        out.append(f'    label="b={b}";')
        for p in members:
            out.append(f'    "{p}";')
        out.append("  }")
    for index, j in enumerate(all_lines(dim)):
        pts = line_points(j)
        color = PALETTE[index % len(PALETTE)]
        path = " -- ".join(f'"{p}"' for p in pts)
        out.append(f'  {path} [color={color}, label="{j}"];')
    out.append("}")
    return "\n".join(out) + "\n"
