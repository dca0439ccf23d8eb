"""
Exact arithmetic for meslab.

Two number systems carry every amplitude in the package:

- ModInt: integers mod an odd prime d (state labels, line coordinates and
  modular exponents).
- CycNum: elements of Z[w], w = exp(2*pi*i/d), divided by a formal power of
  sqrt(d). The value of CycNum(coeffs, s) is sum_k coeffs[k] * w**k / sqrt(d)**s.

sqrt(d) is never expanded into roots of unity. Two nonzero numbers can only be
compared or added when their scales have the same parity.
"""

import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import Iterable, Optional, Tuple, Union

import numpy as np
from sympy import isprime

from meslab.config import MAX_DIMENSION
from meslab.errors import DimensionError, IncommensurableScaleError

logger = logging.getLogger(__name__)


@dataclass(frozen=True)
class Dimension:
    """An odd prime d, checked at construction."""
    d: int

    def __post_init__(self):
        d = self.d
        if isinstance(d, Dimension):
            object.__setattr__(self, 'd', d.d)
            return
        if isinstance(d, bool) or not isinstance(d, (int, np.integer)):
            raise DimensionError(f"dimension must be an odd prime, got {d!r}")
        d = int(d)
        if d < 3 or d > MAX_DIMENSION or not isprime(d):
            raise DimensionError(f"dimension must be an odd prime (3 <= d <= {MAX_DIMENSION}), got {d}")
        object.__setattr__(self, 'd', d)

    def __int__(self) -> int:
        return self.d

    def __index__(self) -> int:
        return self.d

    def __repr__(self) -> str:
        return f"Dimension({self.d})"

    def elements(self) -> Tuple["ModInt", ...]:
        """All of Z_d in increasing order."""
        return tuple(ModInt(k, self) for k in range(self.d))


def as_dimension(d: Union[int, Dimension]) -> Dimension:
    return d if isinstance(d, Dimension) else Dimension(d)


@dataclass(frozen=True)
class ModInt:
    """Element of Z_d, always stored reduced."""
    value: int
    dim: Dimension

    def __post_init__(self):
        object.__setattr__(self, 'value', int(self.value) % self.dim.d)

    @property
    def d(self) -> int:
        return self.dim.d

    def _coerce(self, other) -> int:
        if isinstance(other, ModInt):
            if other.dim != self.dim:
                raise DimensionError(f"cannot combine Z_{self.d} with Z_{other.d}")
            return other.value
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return int(other)
        return NotImplemented

    def __add__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModInt(self.value + o, self.dim)

    __radd__ = __add__

    def __sub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModInt(self.value - o, self.dim)

    def __rsub__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModInt(o - self.value, self.dim)

    def __mul__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return ModInt(self.value * o, self.dim)

    __rmul__ = __mul__

    def __neg__(self):
        return ModInt(-self.value, self.dim)

    def __truediv__(self, other):
        o = self._coerce(other)
        if o is NotImplemented:
            return o
        return self * mod_inv(ModInt(o, self.dim))

    def __pow__(self, exponent: int):
        if exponent < 0:
            return ModInt(pow(mod_inv(self).value, -exponent, self.d), self.dim)
        return ModInt(pow(self.value, exponent, self.d), self.dim)

    def __bool__(self) -> bool:
        return self.value != 0

    def __int__(self) -> int:
        return self.value

    def __index__(self) -> int:
        return self.value

    def __repr__(self) -> str:
        return f"{self.value} (mod {self.d})"


def mod_inv(a: ModInt) -> ModInt:
    """Multiplicative inverse in Z_d."""
    if a.value == 0:
        raise ZeroDivisionError(f"0 has no inverse mod {a.d}")
    return ModInt(pow(a.value, -1, a.d), a.dim)


def half(d: Union[int, Dimension]) -> ModInt:
    """The inverse of 2 mod d, i.e. (d+1)/2."""
    dim = as_dimension(d)
    return ModInt((dim.d + 1) // 2, dim)


@lru_cache(maxsize=None)
def _checked_order(n: int) -> Dimension:
    """The coefficient count of a CycNum is its ring order d, an odd prime."""
    return Dimension(n)


@dataclass(frozen=True, eq=False)
class CycNum:
    """(sum_k coeffs[k] w**k) / sqrt(d)**scale, kept in canonical form.

    The canonical form has coeffs[d-1] == 0; it is reached by subtracting
    coeffs[d-1] from every entry (1 + w + ... + w**(d-1) = 0).
    """
    coeffs: Tuple[int, ...]
    scale: int = 0

    def __post_init__(self):
        coeffs = tuple(int(c) for c in self.coeffs)
        _checked_order(len(coeffs))
        if self.scale < 0:
            raise ValueError(f"scale must be non-negative, got {self.scale}")
        top = coeffs[-1]
        if top:
            coeffs = tuple(c - top for c in coeffs)
        object.__setattr__(self, 'coeffs', coeffs)
        object.__setattr__(self, 'scale', int(self.scale))

    @property
    def d(self) -> int:
        return len(self.coeffs)

    def is_zero(self) -> bool:
        return not any(self.coeffs)

    def __add__(self, other):
        return cyc_add(self, other)

    def __sub__(self, other):
        return cyc_add(self, cyc_neg(other))

    def __mul__(self, other):
        if isinstance(other, CycNum):
            return cyc_mul(self, other)
        if isinstance(other, (int, np.integer)) and not isinstance(other, bool):
            return CycNum(tuple(c * int(other) for c in self.coeffs), self.scale)
        return NotImplemented

    __rmul__ = __mul__

    def __neg__(self):
        return cyc_neg(self)

    def conj(self) -> "CycNum":
        return cyc_conj(self)

    def __eq__(self, other) -> bool:
        if not isinstance(other, CycNum):
            return NotImplemented
        try:
            return cyc_eq(self, other)
        except IncommensurableScaleError:
            return False

    def __hash__(self) -> int:
        if self.is_zero():
            return hash(0)
        r = cyc_reduce(self)
        return hash((r.coeffs, r.scale))

    def __complex__(self) -> complex:
        return cyc_to_complex(self)

    def __repr__(self) -> str:
        return f"CycNum({list(self.coeffs)}, scale={self.scale})"


def cyc_zero(d: Union[int, Dimension], scale: int = 0) -> CycNum:
    return CycNum((0,) * int(d), scale)


def cyc_from_int(n: int, d: Union[int, Dimension], scale: int = 0) -> CycNum:
    """The rational n / sqrt(d)**scale."""
    coeffs = [0] * int(d)
    coeffs[0] = n
    return CycNum(tuple(coeffs), scale)


def cyc_one(d: Union[int, Dimension]) -> CycNum:
    return cyc_from_int(1, d)


@lru_cache(maxsize=4096)
def _root(k: int, d: int) -> CycNum:
    coeffs = [0] * d
    coeffs[k % d] = 1
    return CycNum(tuple(coeffs), 0)


def cyc_root(k: Union[ModInt, int], d: Union[int, Dimension, None] = None) -> CycNum:
    """w**k at scale 0. A plain int exponent needs d."""
    if isinstance(k, ModInt):
        return _root(k.value, k.d)
    if d is None:
        raise ValueError("cyc_root with a plain integer exponent needs d")
    return _root(int(k) % int(d), int(d))


def _check_same_ring(a: CycNum, b: CycNum) -> None:
    if a.d != b.d:
        raise DimensionError(f"cannot combine cyclotomic numbers of order {a.d} and {b.d}")


def cyc_rescale(a: CycNum, scale: int) -> CycNum:
    """Re-express a at a higher scale of the same parity (multiply coeffs by d per step of 2)."""
    if a.is_zero():
        return CycNum(a.coeffs, scale)
    diff = scale - a.scale
    if diff < 0 or diff % 2:
        raise IncommensurableScaleError(f"cannot move scale {a.scale} to {scale}")
    if diff == 0:
        return a
    factor = a.d ** (diff // 2)
    return CycNum(tuple(c * factor for c in a.coeffs), scale)


def _common_scale(a: CycNum, b: CycNum) -> Tuple[CycNum, CycNum]:
    _check_same_ring(a, b)
    if a.is_zero():
        return CycNum(a.coeffs, b.scale), b
    if b.is_zero():
        return a, CycNum(b.coeffs, a.scale)
    if (a.scale - b.scale) % 2:
        raise IncommensurableScaleError(
            f"scales {a.scale} and {b.scale} differ in parity; sqrt(d) is kept formal")
    top = max(a.scale, b.scale)
    return cyc_rescale(a, top), cyc_rescale(b, top)


def cyc_add(a: CycNum, b: CycNum) -> CycNum:
    a, b = _common_scale(a, b)
    return CycNum(tuple(x + y for x, y in zip(a.coeffs, b.coeffs)), a.scale)


def cyc_neg(a: CycNum) -> CycNum:
    return CycNum(tuple(-c for c in a.coeffs), a.scale)


def cyc_sub(a: CycNum, b: CycNum) -> CycNum:
    return cyc_add(a, cyc_neg(b))


def _monomial(a: CycNum) -> Optional[Tuple[int, int]]:
    """(c, k) when a's numerator is c * w**k, else None.

    In canonical form c * w**(d-1) is stored as -c in every slot but the last.
    """
    coeffs = a.coeffs
    nonzero = [k for k, c in enumerate(coeffs) if c]
    if len(nonzero) == 1:
        k = nonzero[0]
        return coeffs[k], k
    if len(nonzero) == a.d - 1 and len(set(coeffs[:-1])) == 1:
        return -coeffs[0], a.d - 1
    return None


def _rotate(a: CycNum, c: int, k: int, scale: int) -> CycNum:
    d = a.d
    out = [0] * d
    for i, x in enumerate(a.coeffs):
        if x:
            out[(i + k) % d] = c * x
    return CycNum(tuple(out), scale)


def cyc_mul(a: CycNum, b: CycNum) -> CycNum:
    """Product in Z[w]/(w**d - 1); scales add."""
    _check_same_ring(a, b)
    scale = a.scale + b.scale
    if a.is_zero() or b.is_zero():
        return CycNum((0,) * a.d, scale)
    # one factor c * w**k turns the product into a rotation
    mono = _monomial(a)
    if mono is not None:
        return _rotate(b, mono[0], mono[1], scale)
    mono = _monomial(b)
    if mono is not None:
        return _rotate(a, mono[0], mono[1], scale)
    d = a.d
    out = [0] * d
    for i, x in enumerate(a.coeffs):
        if not x:
            continue
        for j, y in enumerate(b.coeffs):
            if y:
                out[(i + j) % d] += x * y
    return CycNum(tuple(out), a.scale + b.scale)


def cyc_conj(a: CycNum) -> CycNum:
    """Complex conjugate: w**k -> w**(d-k)."""
    d = a.d
    out = [0] * d
    for k, c in enumerate(a.coeffs):
        out[(-k) % d] = c
    return CycNum(tuple(out), a.scale)


def cyc_is_zero(a: CycNum) -> bool:
    return a.is_zero()


def cyc_eq(a: CycNum, b: CycNum) -> bool:
    return cyc_sub(a, b).is_zero()


def cyc_abs2(a: CycNum) -> CycNum:
    """|a|**2 = a * conj(a)."""
    return cyc_mul(a, cyc_conj(a))


def cyc_sum(values: Iterable[CycNum], d: Union[int, Dimension]) -> CycNum:
    total = cyc_zero(d)
    for v in values:
        total = cyc_add(total, v)
    return total


def cyc_reduce(a: CycNum) -> CycNum:
    """Lowest scale representation within a's parity class."""
    if a.is_zero():
        return CycNum(a.coeffs, a.scale % 2)
    coeffs, scale, d = a.coeffs, a.scale, a.d
    while scale >= 2 and all(c % d == 0 for c in coeffs):
        coeffs = tuple(c // d for c in coeffs)
        scale -= 2
    return CycNum(coeffs, scale)


def cyc_mul_sqrt_d(a: CycNum, k: int) -> CycNum:
    """a * sqrt(d)**k, exactly (k may be negative)."""
    scale = a.scale - k
    coeffs = a.coeffs
    if scale < 0:
        steps = (-scale + 1) // 2
        coeffs = tuple(c * a.d ** steps for c in coeffs)
        scale += 2 * steps
    return CycNum(coeffs, scale)


def cyc_to_fraction(a: CycNum) -> Fraction:
    """Exact rational value; ValueError if a is not a rational number."""
    r = cyc_reduce(a)
    if r.is_zero():
        return Fraction(0)
    if r.scale % 2 or any(r.coeffs[1:]):
        raise ValueError(f"{a!r} is not rational")
    return Fraction(r.coeffs[0], r.d ** (r.scale // 2))


@lru_cache(maxsize=64)
def _roots_complex(d: int) -> np.ndarray:
    return np.exp(2j * np.pi * np.arange(d) / d)


def cyc_to_complex(a: CycNum) -> complex:
    """Floating evaluation of a."""
    value = np.dot(np.asarray(a.coeffs, dtype=float), _roots_complex(a.d))
    return complex(value / math.sqrt(a.d) ** a.scale)
