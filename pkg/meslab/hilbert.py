"""
Exact state vectors for one particle (d amplitudes) and a pair (d*d amplitudes).

Pair amplitudes are stored row-major: index n1*d + n2 in particle labeling,
n_r*d + n_c in collective labeling. Conversions between the two labelings live
in meslab.collective and are always explicit.
"""

import logging
from dataclasses import dataclass, replace
from enum import Enum
from typing import Dict, List, Sequence, Tuple, Union

import numpy as np

from meslab.arith import (
    CycNum,
    Dimension,
    ModInt,
    as_dimension,
    cyc_abs2,
    cyc_add,
    cyc_conj,
    cyc_eq,
    cyc_mul,
    cyc_mul_sqrt_d,
    cyc_neg,
    cyc_rescale,
    cyc_root,
    cyc_to_complex,
    cyc_to_fraction,
    cyc_zero,
    cyc_from_int,
)
from meslab.errors import (
    ConsistencyError,
    DimensionMismatchError,
    IncommensurableScaleError,
    LabelingMismatchError,
)

logger = logging.getLogger(__name__)


class Labeling(Enum):
    PARTICLE = "particle"
    COLLECTIVE = "collective"


def _common_scale(amps: Sequence[CycNum]) -> Tuple[CycNum, ...]:
    """Bring all amplitudes to one scale (zeros adopt any scale)."""
    nonzero = [a.scale for a in amps if not a.is_zero()]
    if not nonzero:
        return tuple(amps)
    top = max(nonzero)
    if any((top - s) % 2 for s in nonzero):
        raise IncommensurableScaleError("amplitudes of one ket must share scale parity")
    return tuple(cyc_rescale(a, top) for a in amps)


@dataclass(frozen=True)
class Ket:
    """Single-particle state in the computational basis."""
    dim: Dimension
    amps: Tuple[CycNum, ...]

    def __post_init__(self):
        object.__setattr__(self, 'dim', as_dimension(self.dim))
        if len(self.amps) != self.dim.d:
            raise DimensionMismatchError(f"ket of dimension {self.dim.d} needs {self.dim.d} amplitudes, got {len(self.amps)}")
        object.__setattr__(self, 'amps', _common_scale(self.amps))

    @property
    def d(self) -> int:
        return self.dim.d

    @property
    def scale(self) -> int:
        return max((a.scale for a in self.amps), default=0)

    def __getitem__(self, n) -> CycNum:
        return self.amps[int(n) % self.d]

    def norm2(self) -> CycNum:
        return norm2(self)

    def is_normalized(self) -> bool:
        return is_normalized(self)


@dataclass(frozen=True)
class PairKet:
    """Two-particle state; amps indexed row-major over (n1, n2) or (n_r, n_c)."""
    dim: Dimension
    amps: Tuple[CycNum, ...]
    labeling: Labeling = Labeling.PARTICLE

    def __post_init__(self):
        object.__setattr__(self, 'dim', as_dimension(self.dim))
        if len(self.amps) != self.dim.d ** 2:
            raise DimensionMismatchError(f"pair ket of dimension {self.dim.d} needs {self.dim.d ** 2} amplitudes, got {len(self.amps)}")
        object.__setattr__(self, 'amps', _common_scale(self.amps))

    @property
    def d(self) -> int:
        return self.dim.d

    @property
    def scale(self) -> int:
        return max((a.scale for a in self.amps), default=0)

    def amp(self, first, second) -> CycNum:
        d = self.d
        return self.amps[(int(first) % d) * d + int(second) % d]

    def norm2(self) -> CycNum:
        return norm2(self)

    def is_normalized(self) -> bool:
        return is_normalized(self)


State = Union[Ket, PairKet]


def _check_compatible(phi: State, psi: State) -> None:
    if type(phi) is not type(psi):
        raise DimensionMismatchError(f"cannot combine {type(phi).__name__} with {type(psi).__name__}")
    if phi.dim != psi.dim:
        raise DimensionMismatchError(f"dimension {phi.d} vs {psi.d}")
    if isinstance(phi, PairKet) and phi.labeling != psi.labeling:
        raise LabelingMismatchError(f"{phi.labeling.value} vs {psi.labeling.value} labeling")


def ket_cb(n: ModInt) -> Ket:
    """Computational basis state |n>."""
    d = n.d
    amps = [cyc_zero(d)] * d
    amps[n.value] = cyc_from_int(1, d)
    return Ket(n.dim, tuple(amps))


def ket_from_exponents(dim: Dimension, exponents: Sequence[int], scale: int = 0) -> Ket:
    """Ket with amplitude w**exponents[n] / sqrt(d)**scale at n."""
    dim = as_dimension(dim)
    amps = tuple(_scaled_root(e, dim.d, scale) for e in exponents)
    return Ket(dim, amps)


def _scaled_root(k: int, d: int, scale: int) -> CycNum:
    r = cyc_root(k, d)
    return CycNum(r.coeffs, scale)


def zero_ket(dim: Dimension) -> Ket:
    dim = as_dimension(dim)
    return Ket(dim, (cyc_zero(dim.d),) * dim.d)


def zero_pair(dim: Dimension, labeling: Labeling = Labeling.PARTICLE) -> PairKet:
    dim = as_dimension(dim)
    return PairKet(dim, (cyc_zero(dim.d),) * dim.d ** 2, labeling)


def apply_z_pow(k: Union[ModInt, int], psi: Ket) -> Ket:
    """Z**k: amplitude at n picks up w**(k n)."""
    k = int(k)
    d = psi.d
    return replace(psi, amps=tuple(cyc_mul(cyc_root(k * n, d), a) for n, a in enumerate(psi.amps)))


def apply_x_pow(k: Union[ModInt, int], psi: Ket) -> Ket:
    """X**k: |n> -> |n+k>."""
    k = int(k)
    d = psi.d
    amps = [None] * d
    for n, a in enumerate(psi.amps):
        amps[(n + k) % d] = a
    return replace(psi, amps=tuple(amps))


def apply_inversion(psi: Ket) -> Ket:
    """I|n> = |-n>."""
    d = psi.d
    return replace(psi, amps=tuple(psi.amps[(-n) % d] for n in range(d)))


def apply_tau(psi: State) -> State:
    """Antiunitary conjugation in the computational basis: tau|n> = |n>."""
    if isinstance(psi, PairKet) and psi.labeling is Labeling.COLLECTIVE:
        from meslab.collective import relabel
        psi = relabel(psi)
    return replace(psi, amps=tuple(cyc_conj(a) for a in psi.amps))


def inner(phi: State, psi: State) -> CycNum:
    """<phi|psi>, antilinear in phi."""
    _check_compatible(phi, psi)
    total = cyc_zero(phi.d)
    for x, y in zip(phi.amps, psi.amps):
        if x.is_zero() or y.is_zero():
            continue
        total = cyc_add(total, cyc_mul(cyc_conj(x), y))
    return total


def norm2(psi: State) -> CycNum:
    total = cyc_zero(psi.d)
    for a in psi.amps:
        if not a.is_zero():
            total = cyc_add(total, cyc_abs2(a))
    return total


def is_normalized(psi: State) -> bool:
    return norm2(psi) == cyc_from_int(1, psi.d)


def tensor(phi: Ket, psi: Ket) -> PairKet:
    """phi (x) psi in particle labeling."""
    if phi.dim != psi.dim:
        raise DimensionMismatchError(f"dimension {phi.d} vs {psi.d}")
    amps = tuple(cyc_mul(x, y) for x in phi.amps for y in psi.amps)
    return PairKet(phi.dim, amps, Labeling.PARTICLE)


def partial_inner_1(phi: Ket, big_psi: PairKet) -> Ket:
    """Contract particle 1 of big_psi with <phi|; returns the particle-2 ket."""
    if big_psi.labeling is not Labeling.PARTICLE:
        raise LabelingMismatchError("partial_inner_1 needs particle labeling")
    if phi.dim != big_psi.dim:
        raise DimensionMismatchError(f"dimension {phi.d} vs {big_psi.d}")
    d = phi.d
    out: List[CycNum] = []
    conj_phi = [cyc_conj(x) for x in phi.amps]
    for n2 in range(d):
        total = cyc_zero(d)
        for n1 in range(d):
            x = conj_phi[n1]
            y = big_psi.amps[n1 * d + n2]
            if x.is_zero() or y.is_zero():
                continue
            total = cyc_add(total, cyc_mul(x, y))
        out.append(total)
    return Ket(phi.dim, tuple(out))


def scale_state(psi: State, factor: CycNum) -> State:
    """factor * psi."""
    return replace(psi, amps=tuple(cyc_mul(factor, a) for a in psi.amps))


def scale_sqrt_d(psi: State, k: int) -> State:
    """sqrt(d)**k * psi, exact."""
    return replace(psi, amps=tuple(cyc_mul_sqrt_d(a, k) for a in psi.amps))


def add_states(phi: State, psi: State) -> State:
    _check_compatible(phi, psi)
    return replace(phi, amps=tuple(cyc_add(x, y) for x, y in zip(phi.amps, psi.amps)))


def sub_states(phi: State, psi: State) -> State:
    _check_compatible(phi, psi)
    return replace(phi, amps=tuple(cyc_add(x, cyc_neg(y)) for x, y in zip(phi.amps, psi.amps)))


def sum_states(states: Sequence[State]) -> State:
    states = list(states)
    if not states:
        raise ValueError("sum of no states")
    total = states[0]
    for s in states[1:]:
        total = add_states(total, s)
    return total


def normalize(psi: State) -> State:
    """Exact normalization; only possible when norm**2 is a power of 1/d."""
    value = cyc_to_fraction(norm2(psi))
    if value == 0:
        raise ConsistencyError("cannot normalize the zero vector")
    d = psi.d
    # value == d**(-k) for some integer k
    k = 0
    num, den = value.numerator, value.denominator
    while den > 1 and den % d == 0:
        den //= d
        k += 1
    while num > 1 and num % d == 0:
        num //= d
        k -= 1
    if num != 1 or den != 1:
        raise ConsistencyError(f"norm squared {value} is not a power of d; exact normalization impossible")
    return scale_sqrt_d(psi, k)


def states_equal(phi: State, psi: State) -> bool:
    _check_compatible(phi, psi)
    return all(cyc_eq(x, y) for x, y in zip(phi.amps, psi.amps))


def state_to_complex(psi: State) -> np.ndarray:
    return np.array([cyc_to_complex(a) for a in psi.amps], dtype=complex)


def state_to_json(psi: State) -> Dict:
    """{dim, scale, amps} with canonical coefficients at the common scale."""
    doc = {
        'dim': psi.d,
        'scale': psi.scale,
        'amps': [list(cyc_rescale(a, psi.scale).coeffs) if not a.is_zero() else [0] * psi.d for a in psi.amps],
    }
    if isinstance(psi, PairKet):
        doc['labeling'] = psi.labeling.value
    return doc
