"""
Maximally entangled "line" states of two particles and their geometry.

A point alpha = (m, b) underpins the product state |m,b>_1 |m~,b~>_2, and a line
j = (m_dd, m0) underpins the maximally entangled state

    |P_j> = sum_{alpha in j} |A_alpha> - |R>                           (unnormalized)
          = sqrt(d) * (1/sqrt(d)) sum_{n+n'=2 m_dd} w**(-(n-n') m0) |n>|n'>
          = sqrt(d) * |m_dd>_c |2 m0>_r

with the royal state |R> = sum_n |n>|n>. Normalized line states carry the
1/sqrt(d); the unnormalized ones are exactly sqrt(d) times larger.
"""

import logging
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Any, Dict, List, Optional, Sequence, Tuple, Union

from meslab.arith import (
    CycNum,
    Dimension,
    ModInt,
    as_dimension,
    cyc_abs2,
    cyc_add,
    cyc_conj,
    cyc_from_int,
    cyc_mul,
    cyc_root,
    cyc_to_fraction,
    cyc_zero,
)
from meslab.collective import collective_mub_pair, relabel, verify_collective
from meslab.config import WEYL_ALL_BASES_MAX_DIMENSION
from meslab.errors import ConsistencyError, DimensionMismatchError
from meslab.geometry import Line, Point, all_lines, all_points, columns, contains, line_points, lines_through_point, row_at
from meslab.hilbert import (
    Ket,
    Labeling,
    PairKet,
    add_states,
    apply_inversion,
    apply_x_pow,
    apply_z_pow,
    inner,
    ket_cb,
    norm2,
    partial_inner_1,
    scale_sqrt_d,
    scale_state,
    states_equal,
    sum_states,
    tensor,
)
from meslab.mub import BasisLabel, MubLabel, basis_labels, mub_state, tilde
from meslab.reports import VerificationReport

logger = logging.getLogger(__name__)

Matrix = Tuple[Tuple[CycNum, ...], ...]


@dataclass(frozen=True)
class PointState:
    point: Point
    ket: PairKet


@dataclass(frozen=True)
class LineState:
    """Line state; ket is normalized when the flag says so."""
    line: Line
    ket: PairKet
    normalized: bool = True

    def unnormalized(self) -> PairKet:
        return scale_sqrt_d(self.ket, 1) if self.normalized else self.ket


@dataclass(frozen=True)
class LineOperator:
    line: Line
    matrix: Matrix


def _label(point: Point) -> MubLabel:
    return MubLabel(point.m, point.b)


@lru_cache(maxsize=None)
def point_state(point: Point) -> PointState:
    """|A_alpha> = |m,b>_1 |m~,b~>_2."""
    label = _label(point)
    return PointState(point, tensor(mub_state(label), mub_state(tilde(label))))


def royal_state(d: Union[int, Dimension], normalized: bool = False) -> PairKet:
    """|R> = sum_n |n>_1 |n>_2 (norm**2 = d), or |R>/sqrt(d) when normalized."""
    dim = as_dimension(d)
    n = dim.d
    scale = 1 if normalized else 0
    amps = [cyc_zero(n)] * (n * n)
    for k in range(n):
        amps[k * n + k] = cyc_from_int(1, n, scale)
    return PairKet(dim, tuple(amps), Labeling.PARTICLE)


def _form_sum_of_points(line: Line) -> PairKet:
    """sum_{alpha in j} |A_alpha> - |R>."""
    total = sum_states([point_state(p).ket for p in line_points(line)])
    return add_states(total, scale_state(royal_state(line.dim), cyc_from_int(-1, line.dim.d)))


def _form_delta(line: Line) -> PairKet:
    """(1/sqrt(d)) sum_{n+n'=2 m_dd} w**(-(n-n') m0) |n>|n'>."""
    d = line.dim.d
    amps = [cyc_zero(d)] * (d * d)
    two_m_dd = 2 * line.m_dd.value
    for n in range(d):
        n2 = (two_m_dd - n) % d
        exponent = -(n - n2) * line.m0.value
        root = cyc_root(exponent, d)
        amps[n * d + n2] = CycNum(root.coeffs, 1)
    return PairKet(line.dim, tuple(amps), Labeling.PARTICLE)


def _form_collective(line: Line) -> PairKet:
    """|m_dd>_c |2 m0>_r, relabeled to particles."""
    r_label = MubLabel(2 * line.m0, BasisLabel.standard(ModInt(0, line.dim)))
    c_label = MubLabel(line.m_dd, BasisLabel.cb())
    return relabel(collective_mub_pair(r_label, c_label))


def _form_weyl(line: Line, basis: Optional[BasisLabel] = None) -> PairKet:
    """(w**(2 m_dd m0)/sqrt(d)) sum_m |m,b>_1 X**(2 m_dd) Z**(2 m0) I |m~,b~>_2.

    basis=None uses the computational kets |n>, |n> directly.
    """
    dim = line.dim
    two_m_dd = 2 * line.m_dd
    two_m0 = 2 * line.m0
    terms = []
    for m in dim.elements():
        if basis is None:
            first, second = ket_cb(m), ket_cb(m)
        else:
            label = MubLabel(m, basis)
            first, second = mub_state(label), mub_state(tilde(label))
        moved = apply_x_pow(two_m_dd, apply_z_pow(two_m0, apply_inversion(second)))
        terms.append(tensor(first, moved))
    prefactor = CycNum(cyc_root(two_m_dd * line.m0).coeffs, 1)
    return scale_state(sum_states(terms), prefactor)


@lru_cache(maxsize=None)
def line_state(line: Line) -> LineState:
    """Normalized line state; all three constructions must agree exactly."""
    form_points = _form_sum_of_points(line)
    form_delta = _form_delta(line)
    form_collective = _form_collective(line)
    if not states_equal(form_delta, form_collective):
        raise ConsistencyError(f"line {line}: delta form and collective product form differ")
    if not states_equal(form_points, scale_sqrt_d(form_delta, 1)):
        raise ConsistencyError(f"line {line}: sum of point states minus |R> is not sqrt(d) times the normalized line state")
    return LineState(line, form_delta, normalized=True)


def unnormalized_line_state(line: Line) -> PairKet:
    return line_state(line).unnormalized()


def _matrix_from(rows: Sequence[Sequence[CycNum]]) -> Matrix:
    return tuple(tuple(row) for row in rows)


def identity_matrix(d: int) -> Matrix:
    return _matrix_from([[cyc_from_int(1 if i == j else 0, d) for j in range(d)] for i in range(d)])


def matrix_add(a: Matrix, b: Matrix) -> Matrix:
    return _matrix_from([[cyc_add(x, y) for x, y in zip(ra, rb)] for ra, rb in zip(a, b)])


def matrix_scale(a: Matrix, factor: CycNum) -> Matrix:
    return _matrix_from([[cyc_mul(factor, x) for x in row] for row in a])


def matrix_mul(a: Matrix, b: Matrix) -> Matrix:
    d = len(a)
    out = []
    for i in range(d):
        row = []
        for j in range(d):
            total = cyc_zero(d)
            for k in range(d):
                x, y = a[i][k], b[k][j]
                if not x.is_zero() and not y.is_zero():
                    total = cyc_add(total, cyc_mul(x, y))
            row.append(total)
        out.append(row)
    return _matrix_from(out)


def matrix_equal(a: Matrix, b: Matrix) -> bool:
    return all(x == y for ra, rb in zip(a, b) for x, y in zip(ra, rb))


def trace_product(a: Matrix, b: Matrix) -> CycNum:
    """tr(a b), skipping zero entries of a."""
    d = len(a)
    total = cyc_zero(d)
    for i in range(d):
        for k in range(d):
            x = a[i][k]
            if x.is_zero():
                continue
            y = b[k][i]
            if not y.is_zero():
                total = cyc_add(total, cyc_mul(x, y))
    return total


@lru_cache(maxsize=None)
def point_projector(point: Point) -> Matrix:
    """A_alpha = |m,b><b,m| on one particle."""
    psi = mub_state(_label(point))
    return _matrix_from([[cyc_mul(x, cyc_conj(y)) for y in psi.amps] for x in psi.amps])


def _operator_formula(line: Line) -> Matrix:
    """<n|P_j|n'> = delta(n+n', 2 m_dd) w**(-(n-n') m0)."""
    d = line.dim.d
    two_m_dd = 2 * line.m_dd.value
    rows = []
    for n in range(d):
        row = []
        for n2 in range(d):
            if (n + n2 - two_m_dd) % d:
                row.append(cyc_zero(d))
            else:
                row.append(cyc_root(-(n - n2) * line.m0.value, d))
        rows.append(row)
    return _matrix_from(rows)


@lru_cache(maxsize=None)
def line_operator(line: Line) -> LineOperator:
    """P_j from the matrix formula, checked against sum_{alpha in j} A_alpha - I."""
    d = line.dim.d
    formula = _operator_formula(line)
    built = matrix_scale(identity_matrix(d), cyc_from_int(-1, d))
    for p in line_points(line):
        built = matrix_add(built, point_projector(p))
    if not matrix_equal(formula, built):
        raise ConsistencyError(f"line {line}: P_j formula differs from sum of point projectors minus I")
    return LineOperator(line, formula)


def operator_squares_to_identity(op: LineOperator) -> bool:
    return matrix_equal(matrix_mul(op.matrix, op.matrix), identity_matrix(len(op.matrix)))


def line_overlap(line: Line, big_psi: PairKet) -> CycNum:
    """<P_j|psi> for the normalized line state, summed over its support n + n' = 2 m_dd."""
    if big_psi.dim != line.dim:
        raise DimensionMismatchError(f"line in dimension {line.dim.d}, state in dimension {big_psi.d}")
    psi = big_psi if big_psi.labeling is Labeling.PARTICLE else relabel(big_psi)
    d = line.dim.d
    two_m_dd = 2 * line.m_dd.value
    m0 = line.m0.value
    total = cyc_zero(d)
    for n in range(d):
        n2 = (two_m_dd - n) % d
        a = psi.amps[n * d + n2]
        if a.is_zero():
            continue
        # conjugate of w**(-(n-n') m0) / sqrt(d)
        bra = CycNum(cyc_root((n - n2) * m0, d).coeffs, 1)
        total = cyc_add(total, cyc_mul(bra, a))
    return total


def overlap_point_line(point: Point, line: Line) -> CycNum:
    """<A_alpha|P_j> with the normalized line state: 1/sqrt(d) on the line, 0 off it."""
    return cyc_conj(line_overlap(line, point_state(point).ket))


def leaky_marginal(label: MubLabel, line: Line) -> Tuple[Ket, CycNum]:
    """Particle-2 remainder <m,b|_1 P_j> and its norm squared (always 1/d).

    The remainder must be proportional to a single state of basis b~.
    """
    chi = partial_inner_1(mub_state(label), line_state(line).ket)
    weight = norm2(chi)
    tilde_label(chi, tilde(label).b)
    return chi, weight


def tilde_label(chi: Ket, basis: BasisLabel) -> ModInt:
    """The m' with chi proportional to |m',basis>; ConsistencyError if there is none."""
    dim = chi.dim
    weight = norm2(chi)
    found = None
    for m in dim.elements():
        p = cyc_abs2(inner(mub_state(MubLabel(m, basis)), chi))
        if p.is_zero():
            continue
        if found is not None or not p == weight:
            raise ConsistencyError(f"marginal is not proportional to a single state of basis {basis}")
        found = m
    if found is None:
        raise ConsistencyError("marginal vanishes")
    return found


def predicted_tilde_row(label: MubLabel, line: Line) -> ModInt:
    """m - 2 m_bar with m_bar = m0 + (b/2)(2 m_dd - 1); for ö, 2 m_dd - n."""
    if label.b.is_cb:
        return 2 * line.m_dd - label.m
    return label.m - 2 * row_at(line, label.b)


def _fraction_text(value: Fraction) -> str:
    return str(value.numerator) if value.denominator == 1 else f"{value.numerator}/{value.denominator}"


def verify_line_states(d: Union[int, Dimension], all_weyl_bases: Optional[bool] = None) -> VerificationReport:
    """Three-form equality, the Weyl forms, Gram = I, uniform marginals.

    The Weyl form is checked in every basis when all_weyl_bases is set, which
    by default holds up to WEYL_ALL_BASES_MAX_DIMENSION.
    """
    dim = as_dimension(d)
    n = dim.d
    if all_weyl_bases is None:
        all_weyl_bases = n <= WEYL_ALL_BASES_MAX_DIMENSION
    weyl_bases = basis_labels(dim) if all_weyl_bases else ()
    report = VerificationReport("mes.line_states", n)
    report.details['weyl_bases'] = len(weyl_bases)
    one = cyc_from_int(1, n)
    one_over_d = cyc_from_int(1, n, scale=2)
    states = {}
    for j in all_lines(dim):
        try:
            states[j] = line_state(j).ket
            report.check(True, "")
        except ConsistencyError as e:
            report.check(False, str(e))
            continue
        psi = states[j]
        report.check(states_equal(_form_weyl(j), psi), lambda: f"line {j}: X^(2m)Z^(2m0)I form differs")
        for b in weyl_bases:
            report.check(states_equal(_form_weyl(j, b), psi), lambda: f"line {j}: basis-{b} Weyl form differs")
        for k in range(n):
            first, second = cyc_zero(n), cyc_zero(n)
            for other in range(n):
                a, b = psi.amp(k, other), psi.amp(other, k)
                if not a.is_zero():
                    first = cyc_add(first, cyc_abs2(a))
                if not b.is_zero():
                    second = cyc_add(second, cyc_abs2(b))
            report.check(first == one_over_d, lambda: f"line {j}: particle-1 marginal at {k} is not 1/d")
            report.check(second == one_over_d, lambda: f"line {j}: particle-2 marginal at {k} is not 1/d")
    lines = list(states)
    for i, j in enumerate(lines):
        for k in lines[i:]:
            value = line_overlap(j, states[k])
            expected_one = j == k
            report.check(value == one if expected_one else value.is_zero(), lambda: f"<P_{j}|P_{k}> wrong")
    return report


def verify_overlaps(d: Union[int, Dimension]) -> VerificationReport:
    """|<A_alpha|P_j>|**2 = 1/d iff alpha in j; each line's probabilities sum to (d+1)/d."""
    dim = as_dimension(d)
    n = dim.d
    report = VerificationReport("mes.overlaps", n)
    amplitude = cyc_from_int(1, n, scale=1)
    expected_sum = Fraction(n + 1, n)
    for j in all_lines(dim):
        total = Fraction(0)
        for p in all_points(dim):
            value = overlap_point_line(p, j)
            if contains(j, p):
                report.check(value == amplitude, lambda: f"<A_{p}|P_{j}> = {value!r}, expected 1/sqrt(d)")
            else:
                report.check(value.is_zero(), lambda: f"<A_{p}|P_{j}> nonzero off the line")
            total += cyc_to_fraction(cyc_abs2(value))
        report.check(total == expected_sum, lambda: f"line {j}: probabilities sum to {total}")
    return report


def verify_leaky(d: Union[int, Dimension]) -> VerificationReport:
    """Every single-particle projection of every line state has weight exactly 1/d."""
    dim = as_dimension(d)
    n = dim.d
    report = VerificationReport("mes.leaky", n)
    one_over_d = cyc_from_int(1, n, scale=2)
    mismatched_labels = 0
    for j in all_lines(dim):
        for b in basis_labels(dim):
            for m in dim.elements():
                label = MubLabel(m, b)
                try:
                    chi, weight = leaky_marginal(label, j)
                except ConsistencyError as e:
                    report.check(False, f"{label}, line {j}: {e}")
                    continue
                report.check(weight == one_over_d, lambda: f"{label}, line {j}: weight {weight!r}")
                observed = tilde_label(chi, tilde(label).b)
                if observed != predicted_tilde_row(label, j):
                    mismatched_labels += 1
    report.details['label_matches'] = mismatched_labels == 0
    report.details['label_mismatches'] = mismatched_labels
    return report


def verify_operator_identities(d: Union[int, Dimension]) -> VerificationReport:
    """Projector-level balance and the P_j algebra."""
    dim = as_dimension(d)
    n = dim.d
    report = VerificationReport("mes.operators", n)
    ident = identity_matrix(n)
    for b, members in columns(dim).items():
        total = matrix_scale(ident, cyc_zero(n))
        for p in members:
            total = matrix_add(total, point_projector(p))
        report.check(matrix_equal(total, ident), lambda: f"column {b} projectors do not sum to I")
    operators = {}
    for j in all_lines(dim):
        try:
            operators[j] = line_operator(j)
            report.check(True, "")
        except ConsistencyError as e:
            report.check(False, str(e))
            continue
        report.check(operator_squares_to_identity(operators[j]), lambda: f"P_{j}^2 != I")
    lines = list(operators)
    d_value = cyc_from_int(n, n)
    for i, j in enumerate(lines):
        for k in lines[i:]:
            value = trace_product(operators[j].matrix, operators[k].matrix)
            ok = value == d_value if j == k else value.is_zero()
            report.check(ok, lambda: f"tr(P_{j} P_{k}) = {value!r}")
    one_over_d = cyc_from_int(1, n, scale=2)
    for p in all_points(dim):
        through = [operators[j].matrix for j in lines_through_point(p) if j in operators]
        total = through[0]
        for m in through[1:]:
            total = matrix_add(total, m)
        report.check(matrix_equal(matrix_scale(total, one_over_d), point_projector(p)),
                     lambda: f"A_{p} != (1/d) sum of P_j through it")
    return report


def verify_balance(d: Union[int, Dimension]) -> VerificationReport:
    """Column sums, line sums and point reconstruction against |R>."""
    dim = as_dimension(d)
    n = dim.d
    report = VerificationReport("mes.balance", n)
    royal = royal_state(dim)
    for b, members in columns(dim).items():
        total = sum_states([point_state(p).ket for p in members])
        report.check(states_equal(total, royal), lambda: f"column {b} does not sum to |R>")
    lines = all_lines(dim)
    unnormalized = {j: unnormalized_line_state(j) for j in lines}
    total_lines = sum_states(list(unnormalized.values()))
    report.check(states_equal(total_lines, scale_state(royal, cyc_from_int(n, n))),
                 "(1/d) sum of all line states is not |R>")
    d_factor = cyc_from_int(n, n)
    for p in all_points(dim):
        through = sum_states([unnormalized[j] for j in lines_through_point(p)])
        report.check(states_equal(through, scale_state(point_state(p).ket, d_factor)),
                     lambda: f"point {p} is not (1/d) sum of its lines")
    everything = sum_states([point_state(p).ket for p in all_points(dim)])
    report.check(states_equal(everything, scale_state(royal, cyc_from_int(n + 1, n))),
                 "(1/(d+1)) sum of all point states is not |R>")
    return report


def verify_mes(d: Union[int, Dimension], include_operators: bool = True) -> VerificationReport:
    dim = as_dimension(d)
    report = VerificationReport("mes", dim.d)
    parts = [verify_collective(dim), verify_line_states(dim), verify_overlaps(dim), verify_leaky(dim)]
    if include_operators:
        parts.append(verify_operator_identities(dim))
    for part in parts:
        report.merge(part)
        report.details[part.name] = {'passed': part.passed, 'checks': part.checks, **part.details}
    return report


def overlap_matrix(d: Union[int, Dimension]) -> Dict[str, Any]:
    """Exact probabilities |<A_alpha|P_j>|**2, rows = points, columns = lines."""
    dim = as_dimension(d)
    lines = all_lines(dim)
    points = all_points(dim)
    rows = []
    for p in points:
        rows.append([_fraction_text(cyc_to_fraction(cyc_abs2(overlap_point_line(p, j)))) for j in lines])
    return {
        'points': [p.to_json() for p in points],
        'lines': [j.to_json() for j in lines],
        'probabilities': rows,
    }


def line_state_table(d: Union[int, Dimension]) -> List[Dict[str, Any]]:
    """Support of each normalized line state: (n1, n2) pairs with w exponents, all over sqrt(d)."""
    dim = as_dimension(d)
    n = dim.d
    table = []
    for j in all_lines(dim):
        terms = []
        for n1 in range(n):
            n2 = (2 * j.m_dd.value - n1) % n
            terms.append({'n1': n1, 'n2': n2, 'exponent': (-(n1 - n2) * j.m0.value) % n})
        table.append({
            'line': j.to_json(),
            'collective': {'c': j.m_dd.value, 'r_momentum': (2 * j.m0).value},
            'terms': terms,
        })
    return table


def mes_rows(d: Union[int, Dimension]) -> List[Dict[str, Any]]:
    """Flat CSV rows of the overlap matrix."""
    doc = overlap_matrix(d)
    rows = []
    for p, probs in zip(doc['points'], doc['probabilities']):
        for j, prob in zip(doc['lines'], probs):
            rows.append({'m': p[0], 'b': p[1], 'm_dd': j[0], 'm0': j[1], 'probability': prob})
    return rows
