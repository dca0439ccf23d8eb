"""
The d+1 mutually unbiased bases of one particle.

Basis labels run over {ö, 0, 1, ..., d-1}; ö is the computational basis and
carries no number. For b != ö,

    <n|m;b> = w**(b/2 * n(n-1) - n m) / sqrt(d),   b/2 = half(d) * b.
"""

import logging
from dataclasses import dataclass
from functools import lru_cache
from typing import Any, Dict, List, Optional, Tuple, Union

from meslab.arith import (
    CycNum,
    Dimension,
    ModInt,
    as_dimension,
    cyc_abs2,
    cyc_conj,
    cyc_from_int,
    cyc_root,
)
from meslab.hilbert import (
    Ket,
    add_states,
    apply_x_pow,
    apply_z_pow,
    inner,
    ket_cb,
    ket_from_exponents,
    scale_state,
    states_equal,
    zero_ket,
)
from meslab.reports import VerificationReport

logger = logging.getLogger(__name__)

CB_SYMBOL = "ö"
CB_ALIASES = ("ö", "o", "cb", "CB", "-1")


@dataclass(frozen=True)
class BasisLabel:
    """Column label: the computational basis (index None) or a standard basis b."""
    index: Optional[ModInt] = None

    @classmethod
    def cb(cls) -> "BasisLabel":
        return cls(None)

    @classmethod
    def standard(cls, b: ModInt) -> "BasisLabel":
        return cls(b)

    @property
    def is_cb(self) -> bool:
        return self.index is None

    @property
    def b(self) -> ModInt:
        """Numeric basis index; ö has none."""
        if self.index is None:
            raise TypeError("the computational basis label ö has no numerical value")
        return self.index

    def sort_key(self) -> int:
        return -1 if self.index is None else self.index.value

    def to_json(self) -> Union[str, int]:
        return CB_SYMBOL if self.index is None else self.index.value

    def __str__(self) -> str:
        return CB_SYMBOL if self.index is None else str(self.index.value)


@dataclass(frozen=True)
class MubLabel:
    m: ModInt
    b: BasisLabel

    def __str__(self) -> str:
        return f"({self.m.value},{self.b})"


def parse_basis(text: str, d: Union[int, Dimension]) -> BasisLabel:
    """'ö' / 'o' / 'cb' name the computational basis; integers name b."""
    dim = as_dimension(d)
    if str(text).strip() in CB_ALIASES:
        return BasisLabel.cb()
    value = int(text)
    if not 0 <= value < dim.d:
        raise ValueError(f"basis must be ö or 0..{dim.d - 1}, got {value}")
    return BasisLabel.standard(ModInt(value, dim))


def basis_labels(d: Union[int, Dimension]) -> Tuple[BasisLabel, ...]:
    """ö first, then 0..d-1."""
    dim = as_dimension(d)
    return (BasisLabel.cb(),) + tuple(BasisLabel.standard(b) for b in dim.elements())


def all_labels(d: Union[int, Dimension]) -> Tuple[MubLabel, ...]:
    dim = as_dimension(d)
    return tuple(MubLabel(m, b) for b in basis_labels(dim) for m in dim.elements())


def exponents(label: MubLabel) -> List[int]:
    """Exponent vector k_n with <n|m;b> = w**k_n / sqrt(d), b != ö."""
    return list(_exponents(label.m.value, label.b.b.value, label.m.d))


@lru_cache(maxsize=None)
def _exponents(m: int, b: int, d: int) -> Tuple[int, ...]:
    h = (d + 1) // 2
    return tuple((h * b * n * (n - 1) - n * m) % d for n in range(d))


@lru_cache(maxsize=None)
def _mub_state(m: int, b: Optional[int], d: int) -> Ket:
    dim = Dimension(d)
    if b is None:
        return ket_cb(ModInt(m, dim))
    return ket_from_exponents(dim, exponents(MubLabel(ModInt(m, dim), BasisLabel.standard(ModInt(b, dim)))), scale=1)


def mub_state(label: MubLabel) -> Ket:
    """|m;b>; |m> for b = ö."""
    b = None if label.b.is_cb else label.b.b.value
    return _mub_state(label.m.value, b, label.m.d)


def tilde(label: MubLabel) -> MubLabel:
    """Conjugation partner: (m,b) -> (-m,-b); CB labels are fixed."""
    if label.b.is_cb:
        return label
    return MubLabel(-label.m, BasisLabel.standard(-label.b.b))



def mub_overlap(u: MubLabel, v: MubLabel) -> CycNum:
    """<u|v> from the exponent vectors, without building either ket."""
    d = u.m.d
    if u.b.is_cb and v.b.is_cb:
        return cyc_from_int(1 if u.m == v.m else 0, d)
    if u.b.is_cb:
        return CycNum(cyc_root(exponents(v)[u.m.value], d).coeffs, 1)
    if v.b.is_cb:
        return CycNum(cyc_root(-exponents(u)[v.m.value], d).coeffs, 1)
    # sum_n w**(k_n(v) - k_n(u)) / d, as a histogram of exponent differences
    counts = [0] * d
    for ku, kv in zip(exponents(u), exponents(v)):
        counts[(kv - ku) % d] += 1
    return CycNum(tuple(counts), 2)

def verify_unbiased(d: Union[int, Dimension]) -> VerificationReport:
    """Orthonormality within each basis and |<u|v>|**2 = 1/d across bases."""
    dim = as_dimension(d)
    report = VerificationReport("mub.unbiased", dim.d)
    one = cyc_from_int(1, dim.d)
    one_over_d = cyc_from_int(1, dim.d, scale=2)
    labels = all_labels(dim)
    for i, u in enumerate(labels):
        for v in labels[i:]:
            overlap = mub_overlap(u, v)
            if u.b == v.b:
                expected = one if u.m == v.m else None
                if expected is None:
                    report.check(overlap.is_zero(), lambda: f"<{u}|{v}> = {overlap!r}, expected 0")
                else:
                    report.check(overlap == expected, lambda: f"<{u}|{u}> = {overlap!r}, expected 1")
            else:
                p = cyc_abs2(overlap)
                report.check(p == one_over_d, lambda: f"|<{u}|{v}>|^2 = {p!r}, expected 1/{dim.d}")
    logger.debug(f"verify_unbiased d={dim.d}: {report.checks} checks, {report.violation_count} violations")
    return report


def verify_eigen(d: Union[int, Dimension]) -> VerificationReport:
    """X Z**b |m;b> = w**m |m;b>, and Z|n> = w**n |n> for ö."""
    dim = as_dimension(d)
    report = VerificationReport("mub.eigen", dim.d)
    for label in all_labels(dim):
        psi = mub_state(label)
        if label.b.is_cb:
            lhs = apply_z_pow(1, psi)
        else:
            lhs = apply_x_pow(1, apply_z_pow(label.b.b, psi))
        rhs = scale_state(psi, cyc_root(label.m))
        report.check(states_equal(lhs, rhs), lambda: f"eigen relation fails for {label}")
    return report


def verify_completeness(d: Union[int, Dimension]) -> VerificationReport:
    """sum_m <m;b|n> |m;b> = |n> for every basis and every CB ket."""
    dim = as_dimension(d)
    report = VerificationReport("mub.completeness", dim.d)
    for b in basis_labels(dim):
        for n in dim.elements():
            e_n = ket_cb(n)
            total = zero_ket(dim)
            for m in dim.elements():
                psi = mub_state(MubLabel(m, b))
                total = add_states(total, scale_state(psi, inner(psi, e_n)))
            report.check(states_equal(total, e_n), lambda: f"basis {b} does not resolve |{n.value}>")
    return report


def verify_conjugation(d: Union[int, Dimension]) -> VerificationReport:
    """Entrywise conjugate of |m;b> equals |tilde(m;b)>, and tilde is an involution."""
    dim = as_dimension(d)
    report = VerificationReport("mub.conjugation", dim.d)
    for label in all_labels(dim):
        conj = Ket(dim, tuple(cyc_conj(a) for a in mub_state(label).amps))
        partner = tilde(label)
        report.check(states_equal(conj, mub_state(partner)), lambda: f"conj |{label}> != |{partner}>")
        report.check(tilde(partner) == label, lambda: f"tilde is not an involution at {label}")
    return report


def verify_mub(d: Union[int, Dimension]) -> VerificationReport:
    dim = as_dimension(d)
    report = VerificationReport("mub", dim.d)
    for part in (verify_unbiased(dim), verify_eigen(dim), verify_completeness(dim), verify_conjugation(dim)):
        report.merge(part)
        report.details[part.name] = {'passed': part.passed, 'checks': part.checks}
    return report


def mub_table(d: Union[int, Dimension]) -> Dict[str, Any]:
    """Exponent table of every basis. For ö the state is |m>, so no exponents are listed."""
    dim = as_dimension(d)
    bases = []
    for b in basis_labels(dim):
        states = []
        for m in dim.elements():
            label = MubLabel(m, b)
            entry: Dict[str, Any] = {'m': m.value}
            if b.is_cb:
                entry['exponents'] = None
                entry['support'] = m.value
            else:
                entry['exponents'] = exponents(label)
            states.append(entry)
        bases.append({'b': b.to_json(), 'states': states})
    return {'d': dim.d, 'bases': bases}


def mub_rows(d: Union[int, Dimension]) -> List[Dict[str, Any]]:
    """Flat CSV rows: one per (b, m, n)."""
    dim = as_dimension(d)
    rows = []
    for basis in mub_table(dim)['bases']:
        for state in basis['states']:
            if state['exponents'] is None:
                rows.append({'b': basis['b'], 'm': state['m'], 'n': state['support'], 'exponent': None})
                continue
            for n, k in enumerate(state['exponents']):
                rows.append({'b': basis['b'], 'm': state['m'], 'n': n, 'exponent': k})
    return rows
