import pytest

from detcover.config import RunConfig
from detcover import planner
from detcover.coverctl import run_cover, verify_cover
from detcover.errors import PlannerError, UnsupportedVarietyError
from detcover.planner import PlanConfig
from detcover.polyform import parse_form, print_form
from detcover.residue import residue_classes
from detcover.variety import COMPLETE_INTERSECTION, make_variety


@pytest.mark.parametrize("B, D, first_prime, points", [(5, 4, 5, 4), (8, 5, 11, 12), (20, 6, 23, 20)])
def test_conic_adaptive(conic, B, D, first_prime, points):
    report = run_cover(conic, B)
    assert report.D == D
    assert report.primes == [first_prime]
    assert report.regular == report.points == points
    assert report.verdicts.all
    assert report.regime_failures == 0
    assert all(f.degree == D for f in report.hypersurfaces)
    assert report.plan is not None
    assert any("empirical" in note for note in report.notes)


def test_fermat_cubic_skips_singular_reduction(fermat_cubic):
    report = run_cover(fermat_cubic, 5)
    assert report.D == 5
    assert report.primes == [3, 5]
    assert all(r.prime == 5 for r in report.records)
    assert report.regular == 3
    assert report.verdicts.all


def test_fermat_cubic_b10(fermat_cubic):
    report = run_cover(fermat_cubic, 10)
    assert report.D == 7
    assert report.primes == [5]
    assert report.verdicts.all


def test_cuspidal_cubic_reports_singular_points(cuspidal_cubic):
    report = run_cover(cuspidal_cubic, 10)
    assert report.points == report.regular + 1
    assert report.verdicts.all
    assert any("singular" in note for note in report.notes)


def test_p1_at_height_one(p1):
    report = run_cover(p1, 1)
    assert report.D == 1
    assert report.primes == [2]
    assert [print_form(f) for f in report.hypersurfaces] == ["x0", "x1"]
    assert report.plan is None
    assert report.class_bound == 3
    assert report.verdicts.all


def test_no_real_points(no_real_points):
    report = run_cover(no_real_points, 10)
    assert report.points == 0
    assert report.primes == []
    assert report.n_actual == 0
    assert report.verdicts.all


def test_theorem_mode_conic(conic):
    report = run_cover(conic, 5, mode="theorem")
    assert report.primes == report.plan.primes
    assert len(report.primes) == report.plan.r == 10
    assert report.verdicts.all
    assert not any("empirical" in note for note in report.notes)


def test_theorem_mode_needs_b_above_one(conic):
    with pytest.raises(PlannerError):
        run_cover(conic, 1, mode="theorem")


def test_bad_mode_and_unsupported_kind(conic):
    with pytest.raises(ValueError):
        run_cover(conic, 5, mode="greedy")
    ci = make_variety(["x0*x2 - x1^2", "x1*x3 - x2^2"], 3, COMPLETE_INTERSECTION)
    with pytest.raises(UnsupportedVarietyError):
        run_cover(ci, 5)


def test_power_override(conic):
    report = run_cover(conic, 5, run_config=RunConfig(power=2))
    assert report.power == {5: 2}
    assert all(r.residue_class.modulus == 25 for r in report.records)
    assert report.verdicts.all


def test_max_primes_caps_adaptive_loop(conic):
    report = run_cover(conic, 20, run_config=RunConfig(max_primes=1))
    assert len(report.primes) == 1


def test_verify_round_trip(conic):
    report = run_cover(conic, 8)
    result = verify_cover(conic, 8, report.hypersurfaces)
    assert result.verdicts.all
    assert result.degree == 5
    assert result.regular_points == 12


def test_verify_detects_failures(conic):
    result = verify_cover(conic, 8, [])
    assert not result.verdicts.covered
    assert len(result.uncovered) == 12
    generator = parse_form("x0^2 + x1^2 - x2^2", 3)
    result = verify_cover(conic, 8, [generator])
    assert result.verdicts.covered
    assert not result.verdicts.proper
    assert not result.verdicts.degree_uniform
    assert result.to_dict()["improper"] == ["x0^2 + x1^2 - x2^2"]


def test_records_frame_and_report_dict(conic):
    report = run_cover(conic, 8)
    frame = report.records_frame()
    assert list(frame.columns) == ["p", "a", "class", "num_points", "status", "form"]
    assert frame["num_points"].sum() == 12
    assert set(frame["status"]) == {"hypersurface"}
    out = report.to_dict()
    assert out == run_cover(conic, 8).to_dict()
    assert "elapsed_seconds" not in out
    assert "elapsed_seconds" in report.to_dict(with_timing=True)
    assert out["counts"]["N_actual"] == len(out["hypersurfaces"]) == report.n_actual
    assert out["B"] == "8"


def test_adaptive_cover_without_a_plan(conic, monkeypatch):
    monkeypatch.setattr(planner, "D0_SEARCH_CAP", 1000)
    cfg = PlanConfig(M=2, n=1, d=2, c1=1e6)
    report = run_cover(conic, 5, plan_config=cfg)
    assert report.plan is None
    assert report.primes == [5]
    assert report.verdicts.all
    assert any("plan unavailable" in note for note in report.notes)
    assert report.to_dict()["plan"] is None
    with pytest.raises(PlannerError):
        run_cover(conic, 5, mode="theorem", plan_config=cfg)


@pytest.mark.parametrize("generator, B", [("x0^2 + x1^2 - x2^2", 8), ("x0^3 + x1^3 - x2^3", 5)])
def test_hypersurface_count_within_class_bounds(generator, B):
    X = make_variety([generator], 2)
    report = run_cover(X, B)
    regular_classes = sum(residue_classes(X, p, report.power[p]).regular_count for p in report.primes)
    assert report.n_actual <= regular_classes <= report.class_bound
