"""Root-of-unity parameters and exact arithmetic on the group of N rays.

The multiplicative group handled here is the union of N equally spaced rays
in the complex plane.  Points are stored as (phase index k, log-modulus x),
never as raw complex numbers, so that the mod-N phase arithmetic stays exact
and downstream parity branches never depend on ``arg()`` round-off.  Zero is
a distinguished absorbing value, not x = -inf.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from typing import NamedTuple, Optional

from .errors import DomainError

CLASSIFY_TOL = 1e-12


@dataclass(frozen=True)
class GroupParams:
    """Even root-of-unity data: q = exp(2*pi*i/N), hbar = 2*pi/N.

    N must be even and at least 6; the smaller even orders are legal only for
    the plain Gauss-sum routines, which take N directly.
    """

    N: int

    def __post_init__(self) -> None:
        if not isinstance(self.N, int):
            raise DomainError(f"N must be an integer, got {self.N!r}")
        if self.N % 2 != 0:
            raise DomainError(f"N must be even, got {self.N}")
        if self.N < 6:
            raise DomainError(f"N must be >= 6, got {self.N}")

    @property
    def q(self) -> complex:
        return cmath.exp(2j * math.pi / self.N)

    @property
    def hbar(self) -> float:
        return 2.0 * math.pi / self.N

    def q_pow(self, k: int) -> complex:
        """q**k with the exponent reduced mod N (so q**N == 1 exactly)."""
        return cmath.exp(2j * math.pi * (k % self.N) / self.N)

    def q_half_pow(self, j: int) -> complex:
        """exp(i*pi/N)**j reduced mod 2N; the principal square root of q."""
        return cmath.exp(1j * math.pi * (j % (2 * self.N)) / self.N)


@dataclass(frozen=True)
class GammaPoint:
    """A point q^k * e^x of the N-ray group, or the distinguished zero."""

    N: int
    k: int = 0
    x: float = 0.0
    is_zero: bool = False

    def __post_init__(self) -> None:
        if self.N < 2 or self.N % 2 != 0:
            raise DomainError(f"GammaPoint needs even N >= 2, got {self.N}")
        if self.is_zero:
            object.__setattr__(self, "k", 0)
            object.__setattr__(self, "x", 0.0)
        else:
            object.__setattr__(self, "k", self.k % self.N)
            object.__setattr__(self, "x", float(self.x))

    @classmethod
    def zero(cls, N: int) -> "GammaPoint":
        return cls(N=N, is_zero=True)

    @property
    def r(self) -> float:
        """Modulus e^x (zero point has modulus 0)."""
        return 0.0 if self.is_zero else math.exp(self.x)


def gamma_mul(a: GammaPoint, b: GammaPoint) -> GammaPoint:
    """Group law: phases add mod N, log-moduli add; zero absorbs."""
    if a.N != b.N:
        raise DomainError(f"mixed orders N={a.N} and N={b.N}")
    if a.is_zero or b.is_zero:
        return GammaPoint.zero(a.N)
    return GammaPoint(N=a.N, k=a.k + b.k, x=a.x + b.x)


def gamma_inv(a: GammaPoint) -> GammaPoint:
    """Group inverse; the zero point has none."""
    if a.is_zero:
        raise DomainError("zero has no inverse in the ray group")
    return GammaPoint(N=a.N, k=-a.k, x=-a.x)


def to_complex(a: GammaPoint, p: GroupParams) -> complex:
    if a.N != p.N:
        raise DomainError(f"point order N={a.N} does not match params N={p.N}")
    if a.is_zero:
        return 0.0 + 0.0j
    return p.q_pow(a.k) * math.exp(a.x)


class Region(NamedTuple):
    """Classification tag: kind is 'ray', 'sector', 'zero' or 'off'."""

    kind: str
    index: Optional[int]


def classify_complex(z: complex, p: GroupParams, tol: float = CLASSIFY_TOL) -> Region:
    """Locate z relative to the rays: on ray k, in open sector k, at 0, or off.

    A point within ``tol`` radians of ray k is tagged as on that ray;
    otherwise it lies strictly inside the open sector between rays k and k+1.
    'off' is reserved for non-finite input.
    """
    if tol < 0:
        raise DomainError("tol must be >= 0")
    if z == 0:
        return Region("zero", None)
    if not (math.isfinite(z.real) and math.isfinite(z.imag)):
        return Region("off", None)
    theta = cmath.phase(z) % (2.0 * math.pi)
    steps = theta / p.hbar
    nearest = round(steps)
    if abs(theta - nearest * p.hbar) <= tol:
        return Region("ray", nearest % p.N)
    return Region("sector", math.floor(steps) % p.N)


def gamma_from_complex(z: complex, p: GroupParams, tol: float = 1e-9) -> GammaPoint:
    """Inverse of to_complex for points on (or within tol of) a ray."""
    tag = classify_complex(z, p, tol=tol)
    if tag.kind == "zero":
        return GammaPoint.zero(p.N)
    if tag.kind != "ray":
        raise DomainError(f"{z!r} is not within {tol} of any ray")
    return GammaPoint(N=p.N, k=tag.index, x=math.log(abs(z)))
