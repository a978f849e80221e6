"""Projective points over Q and their Fubini-Study heights."""
import logging
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import reduce
from typing import Iterator, Sequence, Tuple, Union

from detcover.errors import ZeroVectorError

logger = logging.getLogger(__name__)

Rational = Union[int, float, str, Fraction]


def as_rational(value: Rational) -> Fraction:
    """Exact rational from an int, a Fraction or decimal text; floats are read by their repr."""
    if isinstance(value, float):
        if not math.isfinite(value):
            raise ValueError(f"bound {value} is not finite")
        return Fraction(repr(value))
    return Fraction(value)


def log_rational(value: Rational) -> float:
    """Natural log of a positive rational without converting it to a float first."""
    q = as_rational(value)
    if q <= 0:
        raise ValueError(f"log of non-positive value {q}")
    return math.log(q.numerator) - math.log(q.denominator)


@dataclass(frozen=True, order=True)
class ProjectivePoint:
    coords: Tuple[int, ...]

    def __post_init__(self):
        object.__setattr__(self, "coords", tuple(self.coords))
        if not any(self.coords):
            raise ZeroVectorError("projective point with all coordinates zero")
        if reduce(math.gcd, self.coords) != 1:
            raise ValueError(f"coordinates {self.coords} are not primitive")
        if next(c for c in self.coords if c) < 0:
            raise ValueError(f"coordinates {self.coords} are not in canonical sign")

    @property
    def dim(self) -> int:
        return len(self.coords) - 1

    def __iter__(self) -> Iterator[int]:
        return iter(self.coords)

    def __len__(self) -> int:
        return len(self.coords)

    def __getitem__(self, i: int) -> int:
        return self.coords[i]

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords) + ")"


def canonicalize(raw: Sequence[Rational]) -> ProjectivePoint:
    values = [as_rational(x) for x in raw]
    if not any(values):
        raise ZeroVectorError("cannot canonicalize the zero vector")
    den = math.lcm(*(v.denominator for v in values))
    ints = [int(v * den) for v in values]
    g = reduce(math.gcd, ints)
    if next(c for c in ints if c) < 0:
        g = -g
    return ProjectivePoint(tuple(c // g for c in ints))


@dataclass(frozen=True)
class Height:
    squared: int
    value: float
    log: float


def height_squared(P: ProjectivePoint) -> int:
    return sum(c * c for c in P.coords)


def height(P: ProjectivePoint) -> Height:
    """H(P) = sqrt(sum x_i^2) for a primitive integer representative."""
    sq = height_squared(P)
    return Height(squared=sq, value=math.sqrt(sq), log=0.5 * math.log(sq))


def log_height(P: ProjectivePoint) -> float:
    return 0.5 * math.log(height_squared(P))


def height_le(P: ProjectivePoint, B: Rational) -> bool:
    bound = as_rational(B)
    if bound <= 0:
        raise ValueError("height bound must be positive")
    return height_squared(P) <= bound * bound


def arakelov_degree_height(P: ProjectivePoint) -> float:
    """
    h(P) as the Arakelov degree of the pulled-back Fubini-Study line bundle.

    Uses the coordinate section x_j for the first nonzero x_j: the finite places
    contribute log|x_j| (the index of the section in the integral lattice) and the
    archimedean place contributes -log of its Fubini-Study norm |x_j| / sqrt(sum x_i^2).
    """
    j = next(i for i, c in enumerate(P.coords) if c)
    finite = math.log(abs(P.coords[j]))
    norm = abs(P.coords[j]) / math.sqrt(math.fsum(float(c) * c for c in P.coords))
    return finite - math.log(norm)
