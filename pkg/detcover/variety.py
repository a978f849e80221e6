"""
Projective varieties X in P^M over Q, cut out by primitive integer forms.

Three kinds are supported: a hypersurface (one generator), a complete
intersection (several generators, dimension M - #generators) and the whole
ambient space P^M (no generators).
"""
import json
import logging
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Dict, List, Sequence, Tuple, Union

from detcover.errors import (InvalidVarietyError, LengthMismatchError, PointNotOnVarietyError,
                             UndecidableError)
from detcover.exactla import IntMatrix, rank, rank_mod_p
from detcover.heights import ProjectivePoint
from detcover.polyform import Form, divides, eval_form, grlex_key, parse_form, print_form

logger = logging.getLogger(__name__)

HYPERSURFACE = "hypersurface"
COMPLETE_INTERSECTION = "complete-intersection"
AMBIENT = "ambient"
KINDS = (HYPERSURFACE, COMPLETE_INTERSECTION, AMBIENT)


@dataclass(frozen=True)
class Variety:
    ambient_dim: int
    generators: Tuple[Form, ...]
    dim: int
    degree: int
    kind: str

    @property
    def num_vars(self) -> int:
        return self.ambient_dim + 1

    @property
    def codim(self) -> int:
        return self.ambient_dim - self.dim

    def __str__(self) -> str:
        if self.kind == AMBIENT:
            return f"P^{self.ambient_dim}"
        return f"V({', '.join(print_form(g) for g in self.generators)}) in P^{self.ambient_dim}"


def _squarefree_trial(f: Form) -> None:
    try:
        sqf = f.to_sympy().is_sqf
    except Exception as e:  # advisory only
        logger.debug("square-freeness trial skipped: %s", e)
        return
    if not sqf:
        logger.warning("generator %s is not square-free; irreducibility assertion is doubtful", print_form(f))


def make_variety(generators: Sequence[Union[Form, str]], M: int, kind: str = HYPERSURFACE) -> Variety:
    if kind not in KINDS:
        raise InvalidVarietyError(f"unknown variety kind {kind!r}, expected one of {KINDS}")
    if M < 1:
        raise InvalidVarietyError("ambient dimension M must be at least 1")
    forms: List[Form] = []
    for g in generators:
        f = parse_form(g, M + 1) if isinstance(g, str) else g
        if f.num_vars != M + 1:
            raise InvalidVarietyError(f"generator {print_form(f)} has {f.num_vars} variables, expected {M + 1}")
        if f.modulus is not None:
            raise InvalidVarietyError("generators must have rational coefficients")
        if f.is_zero:
            raise InvalidVarietyError("zero generator")
        forms.append(f.primitive())

    if kind == AMBIENT:
        if forms:
            raise InvalidVarietyError("the ambient space takes no generators")
        return Variety(ambient_dim=M, generators=(), dim=M, degree=1, kind=AMBIENT)
    if not forms:
        raise InvalidVarietyError("empty generator list")
    if kind == HYPERSURFACE:
        if len(forms) != 1:
            raise InvalidVarietyError(f"a hypersurface has exactly one generator, got {len(forms)}")
        if forms[0].degree < 1:
            raise InvalidVarietyError("generator of degree 0 defines the empty set")
        _squarefree_trial(forms[0])
        return Variety(ambient_dim=M, generators=tuple(forms), dim=M - 1, degree=forms[0].degree, kind=kind)
    if len(forms) > M:
        raise InvalidVarietyError(f"{len(forms)} generators cannot cut a complete intersection in P^{M}")
    degree = math.prod(f.degree for f in forms)
    return Variety(ambient_dim=M, generators=tuple(forms), dim=M - len(forms), degree=degree, kind=kind)


def projective_space(M: int) -> Variety:
    return make_variety([], M, AMBIENT)


def _coords(X: Variety, P: Union[ProjectivePoint, Sequence[int]]) -> Tuple[int, ...]:
    coords = tuple(P)
    if len(coords) != X.num_vars:
        raise LengthMismatchError(f"point with {len(coords)} coordinates on a variety in P^{X.ambient_dim}")
    return coords


def contains_point(X: Variety, P: Union[ProjectivePoint, Sequence[int]]) -> bool:
    coords = _coords(X, P)
    return all(eval_form(g, coords) == 0 for g in X.generators)


def jacobian_matrix(X: Variety, P: Union[ProjectivePoint, Sequence[int]]) -> IntMatrix:
    coords = _coords(X, P)
    rows = [[int(eval_form(g.derivative(i), coords)) for i in range(X.num_vars)] for g in X.generators]
    return IntMatrix.from_rows(rows, cols=X.num_vars)


def is_regular_point(X: Variety, P: Union[ProjectivePoint, Sequence[int]]) -> bool:
    """True iff the Jacobian of the generators has rank M - n at P."""
    if not contains_point(X, P):
        raise PointNotOnVarietyError(f"point {tuple(P)} is not on {X}")
    return rank(jacobian_matrix(X, P)) == X.codim


def is_regular_mod_p(X: Variety, coords: Sequence[int], p: int) -> bool:
    """Smoothness of the mod-p fiber at the reduction of coords."""
    reduced = tuple(int(c) % p for c in _coords(X, coords))
    return rank_mod_p(jacobian_matrix(X, reduced), p) == X.codim


def _division_remainder(g: Form, f: Form) -> Dict[Tuple[int, ...], object]:
    lm, lc = f.leading_monomial(), f.leading_coefficient()
    rest = g.coefficients
    remainder = {}
    while rest:
        mono = max(rest, key=grlex_key)
        c = rest.pop(mono)
        if not divides(lm, mono):
            remainder[mono] = c
            continue
        shift = tuple(a - b for a, b in zip(mono, lm))
        factor = c / lc
        for exponent, fc in f.terms:
            if exponent == lm:
                continue
            target = tuple(a + b for a, b in zip(exponent, shift))
            value = rest.get(target, 0) - factor * fc
            if value:
                rest[target] = value
            else:
                rest.pop(target, None)
    return remainder


def ideal_contains(X: Variety, g: Form) -> bool:
    """Whether g vanishes on X as a polynomial identity (division by the generator)."""
    if X.kind == COMPLETE_INTERSECTION:
        raise UndecidableError("ideal membership for complete intersections is undecidable at desk scale")
    if g.num_vars != X.num_vars:
        raise LengthMismatchError(f"form in {g.num_vars} variables against P^{X.ambient_dim}")
    if g.is_zero:
        return True
    if X.kind == AMBIENT:
        return False
    f = X.generators[0]
    if g.degree < f.degree:
        return False
    return not _division_remainder(g, f)


def variety_to_dict(X: Variety) -> dict:
    return {
        "M": X.ambient_dim,
        "kind": X.kind,
        "generators": [print_form(g) for g in X.generators],
        "n": X.dim,
        "d": X.degree,
    }


def variety_from_dict(data: dict) -> Variety:
    try:
        M = int(data["M"])
    except (KeyError, TypeError, ValueError):
        raise InvalidVarietyError("variety description needs an integer 'M'")
    kind = data.get("kind", HYPERSURFACE)
    return make_variety(list(data.get("generators", [])), M, kind)


def load_variety(path: Union[str, Path]) -> Variety:
    with open(path, "r") as f:
        data = json.load(f)
    X = variety_from_dict(data)
    logger.info("Loaded %s (n=%d, d=%d) from %s", X, X.dim, X.degree, path)
    return X
