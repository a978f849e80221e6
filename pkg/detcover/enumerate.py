"""Exhaustive search for rational points of bounded Fubini-Study height."""
import logging
import math
from fractions import Fraction
from typing import List, Tuple

from joblib import Parallel, delayed
from tqdm import tqdm

from detcover.errors import BudgetExceededError
from detcover.heights import ProjectivePoint, Rational, as_rational
from detcover.polyform import eval_form
from detcover.variety import Variety, is_regular_point

logger = logging.getLogger(__name__)

DEFAULT_WORK_LIMIT = 10 ** 9


def search_space_size(M: int, B: Rational) -> int:
    return (2 * math.floor(as_rational(B)) + 1) ** (M + 1)


def _points_with_leading(X: Variety, lead: int, bound: int, limit: Fraction) -> List[ProjectivePoint]:
    """All canonical points of X with x0 = lead and sum of squares <= limit."""
    found: List[ProjectivePoint] = []
    coords = [lead] + [0] * X.ambient_dim

    def extend(i: int, budget: Fraction, signed: bool) -> None:
        if i == X.num_vars:
            if not signed or math.gcd(*coords) != 1:
                return
            if all(eval_form(g, coords) == 0 for g in X.generators):
                found.append(ProjectivePoint(tuple(coords)))
            return
        reach = min(bound, math.isqrt(math.floor(budget)))
        for x in range(-reach, reach + 1):
            if x < 0 and not signed:
                continue
            coords[i] = x
            extend(i + 1, budget - x * x, signed or x != 0)
        coords[i] = 0

    extend(1, limit - lead * lead, lead != 0)
    return found


def enumerate_points(X: Variety, B: Rational, work_limit: int = DEFAULT_WORK_LIMIT,
                     n_jobs: int = 1, progress: bool = False) -> List[ProjectivePoint]:
    """S(X, B): canonical points of X with H(P) <= B, sorted lexicographically."""
    bound_q = as_rational(B)
    if bound_q < 1:
        raise ValueError(f"height bound {bound_q} is below 1")
    size = search_space_size(X.ambient_dim, bound_q)
    if size > work_limit:
        raise BudgetExceededError(f"box search over {size} tuples exceeds the work limit {work_limit}")
    bound = math.floor(bound_q)
    limit = bound_q * bound_q
    leads = range(0, bound + 1)
    chunks = Parallel(n_jobs=n_jobs)(
        delayed(_points_with_leading)(X, lead, bound, limit)
        for lead in tqdm(leads, desc="leading coordinate", disable=not progress))
    points = sorted(P for chunk in chunks for P in chunk)
    logger.debug("S(X, %s) has %d points", bound_q, len(points))
    return points


def regular_points(X: Variety, B: Rational, work_limit: int = DEFAULT_WORK_LIMIT,
                   n_jobs: int = 1, progress: bool = False) -> List[ProjectivePoint]:
    return [P for P in enumerate_points(X, B, work_limit, n_jobs, progress) if is_regular_point(X, P)]


def split_regular(X: Variety, points: List[ProjectivePoint]) -> Tuple[List[ProjectivePoint], List[ProjectivePoint]]:
    regular, singular = [], []
    for P in points:
        (regular if is_regular_point(X, P) else singular).append(P)
    return regular, singular
