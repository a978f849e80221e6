import math

import pytest

from detcover.detmethod import (certify_padic_divisibility, chardin_upper_bound, evaluation_matrix, fd_basis,
                                find_hypersurface, hilbert_function, minimal_degree_for, sombra_lower_bound)
from detcover.enumerate import enumerate_points
from detcover.errors import (ClassMismatchError, PointNotOnVarietyError, SingularClassError,
                             UnsupportedVarietyError)
from detcover.exactla import rank
from detcover.heights import ProjectivePoint, canonicalize
from detcover.polyform import eval_form, print_form
from detcover.residue import class_of
from detcover.variety import ideal_contains, make_variety


def pts(*coords):
    return [ProjectivePoint(c) for c in coords]


def test_fd_basis_examples(conic, fermat_cubic):
    basis = fd_basis(conic, 3)
    assert basis.r1 == 7
    assert basis.sombra() <= basis.r1 <= basis.chardin()
    assert (basis.sombra(), basis.chardin()) == (6, 8)
    basis = fd_basis(fermat_cubic, 5)
    assert basis.r1 == 15
    assert (basis.sombra(), basis.chardin()) == (12, 18)
    assert fd_basis(fermat_cubic, 2).r1 == 6


def test_fd_basis_excludes_leading_monomial(conic):
    basis = fd_basis(conic, 2)
    assert basis.monomials == ((1, 1, 0), (1, 0, 1), (0, 2, 0), (0, 1, 1), (0, 0, 2))


def test_fd_basis_complete_intersection_unsupported():
    ci = make_variety(["x0^2 - x1*x2", "x3"], 3, "complete-intersection")
    with pytest.raises(UnsupportedVarietyError):
        fd_basis(ci, 2)


def parametrized_points(curve, limit=6):
    """Distinct canonical points (u, v) -> curve(u, v) for coprime u, v."""
    found = set()
    for u in range(-limit, limit + 1):
        for v in range(-limit, limit + 1):
            if math.gcd(u, v) == 1:
                found.add(canonicalize(curve(u, v)))
    return sorted(found)


CONIC_PARAM = lambda u, v: (v * v - u * u, 2 * u * v, v * v + u * u)
CUSP_PARAM = lambda u, v: (u * u * v, u ** 3, v ** 3)
QUARTIC_PARAM = lambda u, v: (u ** 3 * v, u ** 4, v ** 4)


def test_r1_sandwich_sweep():
    for M in range(2, 5):
        for d in range(1, 7):
            X = make_variety([f"x0^{d} - x1^{d - 1}*x{M}" if d > 1 else "x0 - x1"], M)
            for D in range(max(1, d - 1), 41):
                r1 = hilbert_function(X, D)
                assert sombra_lower_bound(d, X.dim, D) <= r1 <= chardin_upper_bound(d, X.dim, D), (M, d, D)
                if D <= 8:
                    assert fd_basis(X, D).r1 == r1


def test_r1_matches_rank_at_many_points(conic, cuspidal_cubic, quartic, p1):
    cases = [(conic, CONIC_PARAM, 2), (conic, CONIC_PARAM, 5), (conic, CONIC_PARAM, 8),
             (cuspidal_cubic, CUSP_PARAM, 2), (cuspidal_cubic, CUSP_PARAM, 4), (cuspidal_cubic, CUSP_PARAM, 6),
             (quartic, QUARTIC_PARAM, 3), (quartic, QUARTIC_PARAM, 5),
             (p1, lambda u, v: (u, v), 4), (p1, lambda u, v: (u, v), 9)]
    for X, curve, D in cases:
        basis = fd_basis(X, D)
        points = parametrized_points(curve)
        assert len(points) >= basis.r1
        assert rank(evaluation_matrix(basis, points)) == basis.r1, (X, D)


def test_minimal_degree_for(conic, p1):
    assert minimal_degree_for(conic, 3) == 1
    assert minimal_degree_for(conic, 4) == 2
    assert minimal_degree_for(conic, 5) == 2
    assert minimal_degree_for(p1, 2) == 1


def test_evaluation_matrix_examples(conic, p1):
    basis = fd_basis(p1, 1)
    assert evaluation_matrix(basis, pts((1, 2), (3, 1))).to_lists() == [[1, 3], [2, 1]]
    assert evaluation_matrix(fd_basis(conic, 2), []).shape == (5, 0)
    assert evaluation_matrix(fd_basis(conic, 1), pts((1, 0, 1), (0, 1, 1))).to_lists() == [[1, 0], [0, 1], [1, 1]]
    with pytest.raises(PointNotOnVarietyError):
        evaluation_matrix(fd_basis(conic, 1), pts((1, 1, 1)))


def test_certify_p1_example(p1):
    report = certify_padic_divisibility(p1, 5, 1, pts((1, 2), (3, 1)), 2, D=1)
    assert report.bound == 1
    assert [m.determinant for m in report.minors] == [-5]
    assert [m.valuation for m in report.minors] == [1]
    assert report.passed
    assert report.exhaustive


def test_certify_mu_one_is_trivial(conic):
    report = certify_padic_divisibility(conic, 7, 1, pts((3, 4, 5)), 1)
    assert report.bound == 0
    assert report.passed


def test_certify_conic_triple(conic):
    points = pts((0, 1, -1), (3, 4, 5), (3, -4, -5))
    report = certify_padic_divisibility(conic, 3, 1, points, 3, D=2)
    assert report.r1 == 5
    assert report.bound == 3
    assert len(report.minors) == math.comb(5, 3)
    assert report.passed
    dets = {m.rows: m.determinant for m in report.minors}
    assert dets[(0, 2, 3)] == -864
    assert dets[(1, 3, 4)] == 1350


def test_certify_preconditions(conic, cuspidal_cubic):
    with pytest.raises(ClassMismatchError):
        certify_padic_divisibility(conic, 3, 1, pts((1, 0, 1), (3, 4, 5)), 2)
    with pytest.raises(SingularClassError):
        certify_padic_divisibility(cuspidal_cubic, 5, 1, pts((0, 0, 1)), 1)
    with pytest.raises(ValueError):
        certify_padic_divisibility(conic, 3, 1, pts((3, 4, 5)), 2)


def test_certify_negative_control(conic):
    points = pts((1, 0, 1), (0, 1, 1))
    report = certify_padic_divisibility(conic, 3, 1, points, 2, D=1, enforce_common_class=False)
    assert report.bound == 1
    assert not report.passed


def test_certify_sampling_is_seeded(conic):
    groups = class_of(enumerate_points(conic, 65), 5, 1, conic)
    points = max(groups.values(), key=len)
    assert len(points) >= 4
    report_a = certify_padic_divisibility(conic, 5, 1, points, 3, max_minors=20, seed=3)
    report_b = certify_padic_divisibility(conic, 5, 1, points, 3, max_minors=20, seed=3)
    assert not report_a.exhaustive
    assert len(report_a.minors) == 20
    assert [m.to_dict() for m in report_a.minors] == [m.to_dict() for m in report_b.minors]
    assert report_a.passed


def test_find_hypersurface_line_through_two_points(conic):
    g = find_hypersurface(conic, 1, pts((1, 0, 1), (0, 1, 1)))
    assert print_form(g) == "x0 + x1 - x2"
    assert not ideal_contains(conic, g)


def test_find_hypersurface_empty_and_full(conic, p1):
    g = find_hypersurface(conic, 1, [])
    assert print_form(g) == "x0"
    assert find_hypersurface(p1, 1, pts((1, 0), (0, 1), (1, 1))) is None


def test_find_hypersurface_vanishes_and_is_proper(conic, cuspidal_cubic):
    for X, B, D in [(conic, 20, 6), (cuspidal_cubic, 30, 5)]:
        points = enumerate_points(X, B)
        subset = points[: fd_basis(X, D).r1 - 1]
        g = find_hypersurface(X, D, subset)
        assert g is not None
        assert g.degree == D
        assert all(eval_form(g, P.coords) == 0 for P in subset)
        assert not ideal_contains(X, g)
