"""
Relative (r) and center-of-mass (c) coordinates for a particle pair.

    n_r = (n1 - n2)/2,  n_c = (n1 + n2)/2   <->   n1 = n_r + n_c,  n2 = n_c - n_r

with 1/2 = half(d). Collective-labeled pair kets index (n_r major, n_c minor).
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from functools import lru_cache
from typing import Tuple, Union

from meslab.arith import Dimension, ModInt, as_dimension, cyc_mul, cyc_root, half
from meslab.errors import LabelingMismatchError
from meslab.hilbert import Ket, Labeling, PairKet, ket_cb, inner, states_equal, tensor, scale_state
from meslab.mub import MubLabel, mub_state
from meslab.reports import VerificationReport

logger = logging.getLogger(__name__)


class CollectiveMode(Enum):
    R = "r"
    C = "c"


class CollectiveOp(Enum):
    Z_R = "Z_r"
    Z_C = "Z_c"
    X_R = "X_r"
    X_C = "X_c"

    @property
    def mode(self) -> CollectiveMode:
        return CollectiveMode.R if self in (CollectiveOp.Z_R, CollectiveOp.X_R) else CollectiveMode.C

    @property
    def is_shift(self) -> bool:
        return self in (CollectiveOp.X_R, CollectiveOp.X_C)


class ParticleOp(Enum):
    Z1 = "Z1"
    Z2 = "Z2"
    X1 = "X1"
    X2 = "X2"


@dataclass(frozen=True)
class CollectiveIndex:
    n_r: ModInt
    n_c: ModInt


def to_collective(n1: ModInt, n2: ModInt) -> CollectiveIndex:
    h = half(n1.dim)
    return CollectiveIndex(h * (n1 - n2), h * (n1 + n2))


def from_collective(idx: CollectiveIndex) -> Tuple[ModInt, ModInt]:
    return idx.n_r + idx.n_c, idx.n_c - idx.n_r


@lru_cache(maxsize=None)
def _permutation(d: int) -> Tuple[int, ...]:
    """perm[particle_index] = collective_index."""
    dim = Dimension(d)
    perm = [0] * d * d
    for n1 in dim.elements():
        for n2 in dim.elements():
            idx = to_collective(n1, n2)
            perm[n1.value * d + n2.value] = idx.n_r.value * d + idx.n_c.value
    return tuple(perm)


def relabel(big_psi: PairKet) -> PairKet:
    """Switch between particle and collective labeling; the vector is unchanged."""
    d = big_psi.d
    perm = _permutation(d)
    amps = [None] * d * d
    if big_psi.labeling is Labeling.PARTICLE:
        for i, j in enumerate(perm):
            amps[j] = big_psi.amps[i]
        return PairKet(big_psi.dim, tuple(amps), Labeling.COLLECTIVE)
    for i, j in enumerate(perm):
        amps[i] = big_psi.amps[j]
    return PairKet(big_psi.dim, tuple(amps), Labeling.PARTICLE)


def as_labeling(big_psi: PairKet, labeling: Labeling) -> PairKet:
    return big_psi if big_psi.labeling is labeling else relabel(big_psi)


def _apply_indexed(big_psi: PairKet, first_phase: int, second_phase: int, first_shift: int, second_shift: int) -> PairKet:
    """Phase w**(a i + b j) then shift (i, j) -> (i + s, j + t) over the stored index pair."""
    d = big_psi.d
    amps = [None] * d * d
    for i in range(d):
        for j in range(d):
            a = big_psi.amps[i * d + j]
            phase = (first_phase * i + second_phase * j) % d
            if phase and not a.is_zero():
                a = cyc_mul(cyc_root(phase, d), a)
            amps[((i + first_shift) % d) * d + (j + second_shift) % d] = a
    return replace(big_psi, amps=tuple(amps))


def apply_collective(op: CollectiveOp, power: Union[ModInt, int], big_psi: PairKet) -> PairKet:
    """Z_s**k multiplies by w**(k n_s); X_s**k shifts n_s by k.

    A particle-labeled input is relabeled, acted on, and returned in particle labeling.
    """
    k = int(power)
    original = big_psi.labeling
    psi = as_labeling(big_psi, Labeling.COLLECTIVE)
    on_r = op.mode is CollectiveMode.R
    if op.is_shift:
        out = _apply_indexed(psi, 0, 0, k if on_r else 0, 0 if on_r else k)
    else:
        out = _apply_indexed(psi, k if on_r else 0, 0 if on_r else k, 0, 0)
    return as_labeling(out, original)


def apply_particle(op: ParticleOp, power: Union[ModInt, int], big_psi: PairKet) -> PairKet:
    """Single-particle Weyl operator acting on one factor of a pair state."""
    k = int(power)
    original = big_psi.labeling
    psi = as_labeling(big_psi, Labeling.PARTICLE)
    if op is ParticleOp.Z1:
        out = _apply_indexed(psi, k, 0, 0, 0)
    elif op is ParticleOp.Z2:
        out = _apply_indexed(psi, 0, k, 0, 0)
    elif op is ParticleOp.X1:
        out = _apply_indexed(psi, 0, 0, k, 0)
    else:
        out = _apply_indexed(psi, 0, 0, 0, k)
    return as_labeling(out, original)


def collective_mub_state(mode: CollectiveMode, label: MubLabel) -> Ket:
    """|m_s, b_s> on the d-dimensional factor of mode s.

    <n_s|m_s,b_s> = w**((b_s/2) n_s (n_s - 1) - m_s n_s) / sqrt(d), and |m_s> for ö.
    Pass the result to collective_product in the slot of its mode.
    """
    if not isinstance(mode, CollectiveMode):
        raise LabelingMismatchError(f"not a collective mode: {mode!r}")
    logger.debug(f"collective MUB state {label} in mode {mode.value}")
    return mub_state(label)


def collective_mub_pair(r_label: MubLabel, c_label: MubLabel) -> PairKet:
    """|m_r,b_r>_r |m_c,b_c>_c as a collective-labeled pair ket."""
    return collective_product(collective_mub_state(CollectiveMode.R, r_label),
                              collective_mub_state(CollectiveMode.C, c_label))


def collective_product(r_ket: Ket, c_ket: Ket) -> PairKet:
    """|r>_r |c>_c as a collective-labeled pair ket (n_r major)."""
    if r_ket.dim != c_ket.dim:
        raise LabelingMismatchError("mode factors must share a dimension")
    return replace(tensor(r_ket, c_ket), labeling=Labeling.COLLECTIVE)


def collective_cb(n_r: ModInt, n_c: ModInt) -> PairKet:
    return collective_product(ket_cb(n_r), ket_cb(n_c))


def verify_collective(d: Union[int, Dimension]) -> VerificationReport:
    """Bijection, overlap delta, operator factorization and the collective Weyl algebra."""
    dim = as_dimension(d)
    report = VerificationReport("collective", dim.d)
    elements = dim.elements()
    h = half(dim)

    for n1 in elements:
        for n2 in elements:
            idx = to_collective(n1, n2)
            report.check(from_collective(idx) == (n1, n2), lambda: f"round trip fails at ({n1.value},{n2.value})")

    # <n1,n2|n_r,n_c> = delta(n_r,(n1-n2)/2) delta(n_c,(n1+n2)/2); a collective CB ket
    # has one nonzero amplitude, so the other d*d - 1 overlaps vanish iff support is single
    for n1 in elements:
        for n2 in elements:
            particle = relabel(tensor(ket_cb(n1), ket_cb(n2)))
            idx = to_collective(n1, n2)
            value = inner(particle, collective_cb(idx.n_r, idx.n_c))
            report.check(value == cyc_root(0, dim.d), lambda: f"<{n1.value},{n2.value}|{idx.n_r.value},{idx.n_c.value}> != 1")
            support = sum(1 for a in particle.amps if not a.is_zero())
            report.check(support == 1, lambda: f"|{n1.value},{n2.value}> overlaps {support} collective CB states")

    factorizations = (
        (ParticleOp.Z1, ((CollectiveOp.Z_R, 1), (CollectiveOp.Z_C, 1))),
        (ParticleOp.Z2, ((CollectiveOp.Z_R, -1), (CollectiveOp.Z_C, 1))),
        (ParticleOp.X1, ((CollectiveOp.X_R, h.value), (CollectiveOp.X_C, h.value))),
        (ParticleOp.X2, ((CollectiveOp.X_R, (-h).value), (CollectiveOp.X_C, h.value))),
    )
    for n1 in elements:
        for n2 in elements:
            basis_state = tensor(ket_cb(n1), ket_cb(n2))
            for particle_op, factors in factorizations:
                lhs = apply_particle(particle_op, 1, basis_state)
                rhs = basis_state
                for op, k in factors:
                    rhs = apply_collective(op, k, rhs)
                report.check(states_equal(lhs, rhs), lambda: f"{particle_op.value} factorization fails on |{n1.value},{n2.value}>")
            # Both routes agree: act in particle labeling vs act in collective labeling then relabel
            for op in CollectiveOp:
                via_particle = apply_collective(op, 1, basis_state)
                via_collective = relabel(apply_collective(op, 1, relabel(basis_state)))
                report.check(states_equal(via_particle, via_collective), lambda: f"{op.value} routes disagree on |{n1.value},{n2.value}>")
                report.check(states_equal(apply_collective(op, dim.d, basis_state), basis_state),
                             lambda: f"{op.value}**d != 1")

    omega = cyc_root(1, dim.d)
    for n_r in elements:
        for n_c in elements:
            state = collective_cb(n_r, n_c)
            # Z shifts the phase after X moved the label: Z_s X_s = w X_s Z_s
            for x_op, z_op in ((CollectiveOp.X_R, CollectiveOp.Z_R), (CollectiveOp.X_C, CollectiveOp.Z_C)):
                lhs = apply_collective(z_op, 1, apply_collective(x_op, 1, state))
                rhs = scale_state(apply_collective(x_op, 1, apply_collective(z_op, 1, state)), omega)
                report.check(states_equal(lhs, rhs), lambda: f"{z_op.value}{x_op.value} != w {x_op.value}{z_op.value}")
            for x_op, z_op in ((CollectiveOp.X_R, CollectiveOp.Z_C), (CollectiveOp.X_C, CollectiveOp.Z_R)):
                lhs = apply_collective(x_op, 1, apply_collective(z_op, 1, state))
                rhs = apply_collective(z_op, 1, apply_collective(x_op, 1, state))
                report.check(states_equal(lhs, rhs), lambda: f"{x_op.value} and {z_op.value} do not commute")
    return report
