"""
The determinant method on a hypersurface: the monomial basis of F_D, evaluation
matrices, p-adic divisibility of their minors, and auxiliary hypersurfaces.
"""
import itertools
import logging
import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import List, Optional, Sequence, Tuple, Union

from joblib import Parallel, delayed

from detcover.errors import (ClassMismatchError, PointNotOnVarietyError, SingularClassError,
                             UnsupportedVarietyError)
from detcover.exactla import IntMatrix, determinant, kernel_basis, p_valuation
from detcover.heights import ProjectivePoint
from detcover.polyform import Exponent, Form, divides, eval_monomial, monomials
from detcover.residue import Q_value, ResidueClass, reduce_point
from detcover.variety import AMBIENT, HYPERSURFACE, Variety, contains_point

logger = logging.getLogger(__name__)

DEFAULT_MAX_MINORS = 200


def hypersurface_rank(M: int, d: int, D: int) -> int:
    """r1(D) of a degree-d hypersurface in P^M."""
    full = math.comb(D + M, M)
    return full - math.comb(D - d + M, M) if D >= d else full


def hilbert_function(X: Variety, D: int) -> int:
    if X.kind == AMBIENT:
        return math.comb(D + X.ambient_dim, X.ambient_dim)
    if X.kind != HYPERSURFACE:
        raise UnsupportedVarietyError("Hilbert function is only available for hypersurfaces")
    return hypersurface_rank(X.ambient_dim, X.degree, D)


def sombra_lower_bound(d: int, n: int, D: int) -> Fraction:
    return Fraction(d * (D - d + 2) ** n, math.factorial(n))


def chardin_upper_bound(d: int, n: int, D: int) -> int:
    return d * math.comb(D + n, n)


@dataclass(frozen=True)
class SectionBasis:
    variety: Variety = field(repr=False, compare=False)
    D: int
    monomials: Tuple[Exponent, ...]

    @property
    def r1(self) -> int:
        return len(self.monomials)

    def sombra(self) -> Optional[Fraction]:
        """Lower bound on r1, meaningful once D > d - 2."""
        X = self.variety
        if self.D <= X.degree - 2:
            return None
        return sombra_lower_bound(X.degree, X.dim, self.D)

    def chardin(self) -> int:
        return chardin_upper_bound(self.variety.degree, self.variety.dim, self.D)


def fd_basis(X: Variety, D: int) -> SectionBasis:
    """Degree-D monomials not divisible by the leading monomial of the generator."""
    if X.kind not in (HYPERSURFACE, AMBIENT):
        raise UnsupportedVarietyError(f"F_D bases are not available for {X.kind} varieties")
    if D < 1:
        raise ValueError("degree D must be positive")
    candidates = monomials(X.num_vars, D)
    if X.kind == HYPERSURFACE:
        lm = X.generators[0].leading_monomial()
        candidates = (m for m in candidates if not divides(lm, m))
    basis = SectionBasis(variety=X, D=D, monomials=tuple(candidates))
    expected = hilbert_function(X, D)
    if basis.r1 != expected:
        raise AssertionError(f"basis of size {basis.r1} disagrees with r1({D}) = {expected}")
    return basis


def minimal_degree_for(X: Variety, mu: int) -> int:
    """Smallest D >= 1 with r1(D) >= mu."""
    D = 1
    while hilbert_function(X, D) < mu:
        D += 1
    return D


def evaluation_matrix(basis: SectionBasis, points: Sequence[ProjectivePoint]) -> IntMatrix:
    """Rows are basis monomials, columns are points."""
    for P in points:
        if not contains_point(basis.variety, P):
            raise PointNotOnVarietyError(f"point {P} is not on {basis.variety}")
    rows = [[eval_monomial(m, P.coords) for P in points] for m in basis.monomials]
    return IntMatrix.from_rows(rows, cols=len(points))


@dataclass
class MinorRecord:
    rows: Tuple[int, ...]
    cols: Tuple[int, ...]
    determinant: int
    valuation: Union[int, float]
    passed: bool

    def to_dict(self) -> dict:
        zero = self.valuation == math.inf
        return {
            "rows": list(self.rows),
            "cols": list(self.cols),
            "determinant": str(self.determinant),
            "valuation": None if zero else self.valuation,
            "zero_determinant": zero,
            "passed": self.passed,
        }


@dataclass
class CertReport:
    p: int
    a: int
    mu: int
    D: int
    r1: int
    n: int
    residue_class: ResidueClass
    bound: int
    exhaustive: bool
    minors: List[MinorRecord]

    @property
    def passed(self) -> bool:
        return all(m.passed for m in self.minors)

    @property
    def failures(self) -> int:
        return sum(1 for m in self.minors if not m.passed)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "a": self.a,
            "mu": self.mu,
            "D": self.D,
            "r1": self.r1,
            "n": self.n,
            "class": list(self.residue_class.coords),
            "bound": self.bound,
            "exhaustive": self.exhaustive,
            "checked": len(self.minors),
            "failures": self.failures,
            "passed": self.passed,
            "minors": [m.to_dict() for m in self.minors],
        }


def _minor_pairs(r1: int, npoints: int, mu: int, max_minors: int,
                 seed: int) -> Tuple[List[Tuple[Tuple[int, ...], Tuple[int, ...]]], bool]:
    total = math.comb(r1, mu) * math.comb(npoints, mu)
    if total <= max_minors:
        pairs = list(itertools.product(itertools.combinations(range(r1), mu),
                                       itertools.combinations(range(npoints), mu)))
        return pairs, True
    rng = random.Random(seed)
    chosen = set()
    while len(chosen) < max_minors:
        rows = tuple(sorted(rng.sample(range(r1), mu)))
        cols = tuple(sorted(rng.sample(range(npoints), mu)))
        chosen.add((rows, cols))
    return sorted(chosen), False


def _check_minor(matrix: IntMatrix, rows, cols, p: int, bound: int) -> MinorRecord:
    det = determinant(matrix.submatrix(rows, cols))
    val = p_valuation(det, p)
    return MinorRecord(rows=tuple(rows), cols=tuple(cols), determinant=det, valuation=val, passed=val >= bound)


def certify_padic_divisibility(X: Variety, p: int, a: int, points: Sequence[ProjectivePoint], mu: int,
                               D: Optional[int] = None, max_minors: int = DEFAULT_MAX_MINORS,
                               seed: int = 0, enforce_common_class: bool = True,
                               n_jobs: int = 1) -> CertReport:
    """
    Check that every sampled mu x mu minor of the evaluation matrix has p-adic
    valuation at least a * Q(mu).

    With enforce_common_class=False the class preconditions are only logged, which
    is how negative controls with points from several classes are run.
    """
    if not points:
        raise ValueError("certification needs at least one point")
    if not 1 <= mu <= len(points):
        raise ValueError(f"mu={mu} must lie between 1 and the number of points {len(points)}")
    classes = sorted({reduce_point(P, p, a, X) for P in points})
    residue_class = reduce_point(points[0], p, a, X)
    if len(classes) > 1:
        if enforce_common_class:
            raise ClassMismatchError(f"points fall into {len(classes)} residue classes mod {p}^{a}")
        logger.info("certifying across %d classes mod %d^%d", len(classes), p, a)
    if not residue_class.regular:
        if enforce_common_class:
            raise SingularClassError(f"class {residue_class} is singular")
        logger.info("certifying on singular class %s", residue_class)

    if D is None:
        D = minimal_degree_for(X, mu)
    basis = fd_basis(X, D)
    if basis.r1 < mu:
        raise ValueError(f"r1({D}) = {basis.r1} is smaller than mu={mu}")
    matrix = evaluation_matrix(basis, points)
    bound = a * Q_value(X.dim, mu)
    pairs, exhaustive = _minor_pairs(basis.r1, len(points), mu, max_minors, seed)
    minors = Parallel(n_jobs=n_jobs)(delayed(_check_minor)(matrix, rows, cols, p, bound) for rows, cols in pairs)
    report = CertReport(p=p, a=a, mu=mu, D=D, r1=basis.r1, n=X.dim, residue_class=residue_class,
                        bound=bound, exhaustive=exhaustive, minors=list(minors))
    logger.debug("certification mod %d^%d, mu=%d: %d minors, %d failures",
                 p, a, mu, len(report.minors), report.failures)
    return report


def find_hypersurface(X: Variety, D: int, points: Sequence[ProjectivePoint]) -> Optional[Form]:
    """
    A degree-D form supported on the F_D basis vanishing at every point, or None
    when the points impose independent conditions on F_D.
    """
    basis = fd_basis(X, D)
    system = evaluation_matrix(basis, points).transpose()
    kernel = kernel_basis(system)
    if not kernel:
        return None
    coeffs = {m: c for m, c in zip(basis.monomials, kernel[0]) if c}
    return Form.from_dict(X.num_vars, D, coeffs).primitive()
