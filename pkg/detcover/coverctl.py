"""
Covering S_1(X, B) by auxiliary hypersurfaces, one per regular residue class,
and the independent verification of a cover.
"""
import logging
import time
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Sequence

import pandas as pd
import sympy
from joblib import Parallel, delayed
from tqdm import tqdm

from detcover.config import RunConfig
from detcover.detmethod import find_hypersurface, hilbert_function
from detcover.enumerate import enumerate_points, split_regular
from detcover.errors import PlannerError, UnsupportedVarietyError
from detcover.heights import ProjectivePoint, Rational, as_rational
from detcover.planner import (CoverPlan, PlanConfig, cover_degree, delta_star, first_prime_from_log, log_n0,
                              make_plan)
from detcover.polyform import Form, eval_form, print_form
from detcover.residue import ResidueClass, class_of, gl02_bound
from detcover.variety import (COMPLETE_INTERSECTION, HYPERSURFACE, Variety, ideal_contains, is_regular_point,
                              variety_to_dict)

logger = logging.getLogger(__name__)

THEOREM = "theorem"
ADAPTIVE = "adaptive"
MODES = (THEOREM, ADAPTIVE)

HYPERSURFACE_FOUND = "hypersurface"
RANK_FULL = "rank-full"


@dataclass
class ClassRecord:
    prime: int
    power: int
    residue_class: ResidueClass
    points: List[ProjectivePoint]
    form: Optional[Form]

    @property
    def status(self) -> str:
        return HYPERSURFACE_FOUND if self.form is not None else RANK_FULL

    def to_dict(self) -> dict:
        return {
            "p": self.prime,
            "a": self.power,
            "class": list(self.residue_class.coords),
            "points": [list(P.coords) for P in self.points],
            "status": self.status,
            "form": None if self.form is None else print_form(self.form),
        }


@dataclass
class Verdicts:
    covered: bool
    proper: bool
    degree_uniform: bool

    @property
    def all(self) -> bool:
        return self.covered and self.proper and self.degree_uniform

    def to_dict(self) -> dict:
        return {"covered": self.covered, "proper": self.proper, "degree_uniform": self.degree_uniform,
                "all": self.all}


@dataclass
class VerifyResult:
    verdicts: Verdicts
    degree: int
    regular_points: int
    uncovered: List[ProjectivePoint]
    improper: List[Form]
    off_degree: List[Form]

    def to_dict(self) -> dict:
        return {
            "verdicts": self.verdicts.to_dict(),
            "degree": self.degree,
            "regular_points": self.regular_points,
            "uncovered": [list(P.coords) for P in self.uncovered],
            "improper": [print_form(f) for f in self.improper],
            "off_degree": [print_form(f) for f in self.off_degree],
        }


@dataclass
class CoverReport:
    variety: Variety
    B: Fraction
    D: int
    delta: float
    mode: str
    r1: int
    primes: List[int]
    power: Dict[int, int]
    records: List[ClassRecord]
    verdicts: Verdicts
    points: int
    regular: int
    uncovered: List[ProjectivePoint]
    class_bound: int
    plan: Optional[CoverPlan]
    plan_config: PlanConfig
    run_config: RunConfig
    notes: List[str] = field(default_factory=list)
    elapsed: float = 0.0

    @property
    def hypersurfaces(self) -> List[Form]:
        return [r.form for r in self.records if r.form is not None]

    @property
    def n_actual(self) -> int:
        return len(self.hypersurfaces)

    @property
    def regime_failures(self) -> int:
        return sum(1 for r in self.records if r.form is None)

    def records_frame(self) -> pd.DataFrame:
        rows = [{
            "p": r.prime,
            "a": r.power,
            "class": " ".join(str(c) for c in r.residue_class.coords),
            "num_points": len(r.points),
            "status": r.status,
            "form": "" if r.form is None else print_form(r.form),
        } for r in self.records]
        return pd.DataFrame(rows, columns=["p", "a", "class", "num_points", "status", "form"])

    def to_dict(self, with_timing: bool = False) -> dict:
        out = {
            "variety": variety_to_dict(self.variety),
            "B": str(self.B),
            "D": self.D,
            "delta": self.delta,
            "mode": self.mode,
            "r1": self.r1,
            "primes": self.primes,
            "powers": [self.power[p] for p in self.primes],
            "records": [r.to_dict() for r in self.records],
            "hypersurfaces": [print_form(f) for f in self.hypersurfaces],
            "verdicts": self.verdicts.to_dict(),
            "counts": {
                "points": self.points,
                "regular_points": self.regular,
                "N_actual": self.n_actual,
                "N_predicted_log": None if self.plan is None else self.plan.bound.log_n,
                "class_bound": self.class_bound,
                "regime_failures": self.regime_failures,
            },
            "uncovered": [list(P.coords) for P in self.uncovered],
            "plan": None if self.plan is None else self.plan.to_dict(),
            "plan_config": self.plan_config.to_dict(),
            "run_config": self.run_config.to_dict(),
            "notes": self.notes,
        }
        if with_timing:
            out["elapsed_seconds"] = self.elapsed
        return out


def compute_verdicts(X: Variety, D: int, regular: Sequence[ProjectivePoint], forms: Sequence[Form]):
    uncovered = [P for P in regular if not any(eval_form(f, P.coords) == 0 for f in forms)]
    improper = [f for f in forms if ideal_contains(X, f)]
    off_degree = [f for f in forms if f.degree != D]
    verdicts = Verdicts(covered=not uncovered, proper=not improper, degree_uniform=not off_degree)
    return verdicts, uncovered, improper, off_degree


def _cover_one_prime(X: Variety, D: int, regular: Sequence[ProjectivePoint], p: int, a: int,
                     n_jobs: int) -> List[ClassRecord]:
    groups = class_of(regular, p, a, X)
    usable = [(cls, pts) for cls, pts in groups.items() if cls.regular]
    skipped = len(groups) - len(usable)
    if skipped:
        logger.debug("p=%d: skipping %d singular classes", p, skipped)
    forms = Parallel(n_jobs=n_jobs)(delayed(find_hypersurface)(X, D, pts) for _, pts in usable)
    records = [ClassRecord(prime=p, power=a, residue_class=cls, points=pts, form=form)
               for (cls, pts), form in zip(usable, forms)]
    for r in records:
        if r.form is None:
            logger.warning("class %s holds %d points and is rank-full at D=%d", r.residue_class, len(r.points), D)
    return records


def run_cover(X: Variety, B: Rational, mode: str = ADAPTIVE, plan_config: Optional[PlanConfig] = None,
              run_config: Optional[RunConfig] = None) -> CoverReport:
    """Build degree-D hypersurfaces covering the regular points of height <= B."""
    if X.kind == COMPLETE_INTERSECTION:
        raise UnsupportedVarietyError("covers are built for hypersurfaces only")
    if mode not in MODES:
        raise ValueError(f"unknown mode {mode!r}, expected one of {MODES}")
    bound = as_rational(B)
    if mode == THEOREM and bound <= 1:
        raise PlannerError("theorem mode needs B > 1")
    cfg = plan_config or PlanConfig.for_variety(X)
    run = run_config or RunConfig()
    start = time.time()

    D = cover_degree(X.degree, bound)
    delta = delta_star(X.degree, X.dim, cfg.deg_k)
    logger.info("***** Running cover (%s mode) *****", mode)
    logger.info("  variety = %s", X)
    logger.info("  B = %s, D = %d", bound, D)

    points = enumerate_points(X, bound, run.work_limit, run.jobs, run.progress)
    regular, singular = split_regular(X, points)
    logger.info("  Num points = %d (%d regular)", len(points), len(regular))

    notes: List[str] = []
    plan = None
    if mode == THEOREM:
        plan = make_plan(bound, cfg)
    elif X.kind == HYPERSURFACE and bound > 1:
        try:
            plan = make_plan(bound, cfg)
        except PlannerError as e:
            logger.warning("no cover plan for this configuration: %s", e)
            notes.append(f"cover plan unavailable: {e}")
    records: List[ClassRecord] = []
    primes: List[int] = []
    power: Dict[int, int] = {}
    covered = set()

    if mode == THEOREM:
        schedule = list(zip(plan.primes, plan.exponents))
    else:
        first = first_prime_from_log(log_n0(bound, cfg)) if bound > 1 else 2
        schedule = None

    bar = tqdm(total=len(schedule) if schedule else run.max_primes, desc="primes", disable=not run.progress)
    p = None
    while True:
        if schedule is not None:
            if len(primes) == len(schedule):
                break
            p, a = schedule[len(primes)]
        else:
            if len(covered) == len(regular) or len(primes) == run.max_primes:
                break
            p = first if p is None else int(sympy.nextprime(p))
            a = cfg.v
        if run.power is not None:
            a = run.power
        prime_records = _cover_one_prime(X, D, regular, p, a, run.jobs)
        records.extend(prime_records)
        primes.append(p)
        power[p] = a
        for r in prime_records:
            if r.form is not None:
                covered.update(r.points)
        logger.debug("p=%d: %d classes, %d/%d points covered", p, len(prime_records), len(covered), len(regular))
        bar.update(1)
    bar.close()

    forms = [r.form for r in records if r.form is not None]
    verdicts, uncovered, _, _ = compute_verdicts(X, D, regular, forms)
    if mode == ADAPTIVE and not verdicts.covered:
        logger.warning("adaptive mode stopped after %d primes with %d points uncovered", len(primes), len(uncovered))
    if mode == ADAPTIVE and plan is not None:
        notes.append("adaptive-mode success below B0 is an empirical observation, not a consequence of the theorem")
    if singular:
        notes.append(f"{len(singular)} singular points of height <= B are outside S_1 and not covered")

    report = CoverReport(variety=X, B=bound, D=D, delta=delta, mode=mode, r1=hilbert_function(X, D),
                         primes=primes, power=power, records=records, verdicts=verdicts, points=len(points),
                         regular=len(regular), uncovered=uncovered,
                         class_bound=sum(gl02_bound(X.degree, X.dim, q, power[q]) for q in primes),
                         plan=plan, plan_config=cfg, run_config=run, notes=notes, elapsed=time.time() - start)
    logger.info("  N_actual = %d over %d primes, verdicts = %s", report.n_actual, len(primes), verdicts.to_dict())
    return report


def verify_cover(X: Variety, B: Rational, forms: Sequence[Form], work_limit: int = 10 ** 9,
                 n_jobs: int = 1) -> VerifyResult:
    """Recompute the cover verdicts from scratch for an arbitrary list of forms."""
    D = cover_degree(X.degree, B)
    regular = [P for P in enumerate_points(X, B, work_limit, n_jobs) if is_regular_point(X, P)]
    uncovered = []
    for P in regular:
        if all(eval_form(f, P.coords) != 0 for f in forms):
            uncovered.append(P)
    improper = [f for f in forms if ideal_contains(X, f)]
    off_degree = [f for f in forms if f.degree != D]
    verdicts = Verdicts(covered=len(uncovered) == 0, proper=len(improper) == 0, degree_uniform=len(off_degree) == 0)
    logger.info("***** Verified %d forms against %d regular points *****", len(forms), len(regular))
    return VerifyResult(verdicts=verdicts, degree=D, regular_points=len(regular), uncovered=uncovered,
                        improper=improper, off_degree=off_degree)
