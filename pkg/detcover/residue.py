"""
Residue classes of rational points modulo p^a and the Hilbert-Samuel sequences
attached to a regular reduction.
"""
import itertools
import logging
import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Dict, Iterable, Iterator, List, Optional, Tuple

import sympy
from joblib import Parallel, delayed

from detcover.heights import ProjectivePoint
from detcover.polyform import Form, eval_form, reduce_form
from detcover.variety import Variety, is_regular_mod_p, projective_space

logger = logging.getLogger(__name__)


@dataclass(frozen=True, order=True)
class ResidueClass:
    p: int
    a: int
    coords: Tuple[int, ...]
    regular: bool = field(default=True, compare=False)

    @property
    def modulus(self) -> int:
        return self.p ** self.a

    def reduction(self) -> Tuple[int, ...]:
        """The mod-p point xi under this class."""
        return tuple(c % self.p for c in self.coords)

    def to_dict(self) -> dict:
        return {"p": self.p, "a": self.a, "coords": list(self.coords), "regular": self.regular}

    def __str__(self) -> str:
        return "(" + ":".join(str(c) for c in self.coords) + f") mod {self.p}^{self.a}"


def _check_prime_power(p: int, a: int) -> None:
    if not sympy.isprime(p):
        raise ValueError(f"{p} is not prime")
    if a < 1:
        raise ValueError("power a must be positive")


def canonical_class_coords(coords: Iterable[int], p: int, a: int) -> Tuple[int, ...]:
    q = p ** a
    coords = [int(c) % q for c in coords]
    unit = next((c for c in coords if c % p), None)
    if unit is None:
        raise ValueError(f"{tuple(coords)} has no unit coordinate mod {p}")
    inv = pow(unit, -1, q)
    return tuple(c * inv % q for c in coords)


def reduce_point(P: ProjectivePoint, p: int, a: int = 1, variety: Optional[Variety] = None) -> ResidueClass:
    """Class of P in X(Z/p^a); with no variety the point is read on P^M."""
    _check_prime_power(p, a)
    X = variety if variety is not None else projective_space(P.dim)
    coords = canonical_class_coords(P.coords, p, a)
    return ResidueClass(p=p, a=a, coords=coords, regular=is_regular_mod_p(X, coords, p))


def class_of(points: Iterable[ProjectivePoint], p: int, a: int = 1,
             variety: Optional[Variety] = None) -> Dict[ResidueClass, List[ProjectivePoint]]:
    """Group points by residue class, classes and members in sorted order."""
    groups: Dict[ResidueClass, List[ProjectivePoint]] = defaultdict(list)
    for P in points:
        groups[reduce_point(P, p, a, variety)].append(P)
    return {cls: sorted(groups[cls]) for cls in sorted(groups)}


def gl02_bound(d: int, n: int, p: int, a: int = 1) -> int:
    """d * sum_{k=0}^{n} p^{a k}, the bound on the number of points over Z/p^a."""
    return d * sum(p ** (a * k) for k in range(n + 1))


def gl02_relaxed_bound(d: int, n: int, p: int, a: int = 1) -> int:
    return d * n * p ** (a * n)


@dataclass
class ClassReport:
    p: int
    a: int
    classes: List[ResidueClass]
    gl02_bound: int
    bad_reduction: bool
    gl02_checked: bool
    gl02_holds: Optional[bool]

    @property
    def count(self) -> int:
        return len(self.classes)

    @property
    def regular_count(self) -> int:
        return sum(1 for c in self.classes if c.regular)

    def __len__(self) -> int:
        return len(self.classes)

    def __iter__(self) -> Iterator[ResidueClass]:
        return iter(self.classes)

    def to_dict(self) -> dict:
        return {
            "p": self.p,
            "a": self.a,
            "count": self.count,
            "regular_count": self.regular_count,
            "classes": [{"coords": list(c.coords), "regular": c.regular} for c in self.classes],
            "gl02_bound": self.gl02_bound,
            "gl02_checked": self.gl02_checked,
            "gl02_holds": self.gl02_holds,
            "bad_reduction": self.bad_reduction,
        }


def _classes_with_first_unit(X: Variety, reduced: List[Form], p: int, a: int, i: int) -> List[ResidueClass]:
    q = p ** a
    before = [range(0, q, p)] * i
    after = [range(q)] * (X.ambient_dim - i)
    found = []
    for head in itertools.product(*before):
        for tail in itertools.product(*after):
            coords = head + (1,) + tail
            if all(eval_form(g, coords) == 0 for g in reduced):
                found.append(ResidueClass(p=p, a=a, coords=coords, regular=is_regular_mod_p(X, coords, p)))
    return found


def residue_classes(X: Variety, p: int, a: int = 1, n_jobs: int = 1) -> ClassReport:
    """Every class of X(Z/p^a), found by brute force over canonical representatives."""
    _check_prime_power(p, a)
    reduced = [reduce_form(g, p, a) for g in X.generators]
    bad = any(g.is_zero for g in reduced)
    if bad:
        logger.warning("bad reduction of %s at p=%d: a generator vanishes identically", X, p)
    chunks = Parallel(n_jobs=n_jobs)(
        delayed(_classes_with_first_unit)(X, reduced, p, a, i) for i in range(X.num_vars))
    classes = sorted(itertools.chain.from_iterable(chunks))
    bound = gl02_bound(X.degree, X.dim, p, a)
    checked = a == 1 and not bad
    holds = len(classes) <= bound if checked else None
    if checked and not holds:
        logger.warning("%d classes mod %d exceed the GL02 bound %d", len(classes), p, bound)
    logger.debug("%d classes of %s mod %d^%d", len(classes), X, p, a)
    return ClassReport(p=p, a=a, classes=classes, gl02_bound=bound, bad_reduction=bad,
                       gl02_checked=checked, gl02_holds=holds)


def hs_function(n: int, k: int) -> int:
    """Hilbert-Samuel function of a regular local ring of dimension n."""
    if n < 1:
        raise ValueError("local dimension n must be at least 1")
    if k < 0:
        raise ValueError("k must be non-negative")
    return math.comb(k + n - 1, n - 1)


def q_value(n: int, m: int) -> int:
    """m-th entry of the sequence in which k appears hs_function(n, k) times."""
    if m < 1:
        raise ValueError("m must be at least 1")
    k, seen = 0, 0
    while True:
        seen += hs_function(n, k)
        if m <= seen:
            return k
        k += 1


def Q_value(n: int, m: int) -> int:
    """Partial sum q(1) + ... + q(m), computed blockwise."""
    if m < 1:
        raise ValueError("m must be at least 1")
    total, k, remaining = 0, 0, m
    while remaining > 0:
        take = min(hs_function(n, k), remaining)
        total += k * take
        remaining -= take
        k += 1
    return total


def chen_q_lower_bound(n: int, mu: int, D: int) -> float:
    """Lower bound for Q(mu) / (D mu) used to balance the local and archimedean estimates."""
    return (math.factorial(n) ** (1.0 / n) * n / (n + 1) * mu ** (1.0 / n) / D
            - (n + 3) / (2 * n + 2) * n / D)
