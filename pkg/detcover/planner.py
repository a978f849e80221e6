"""
Evaluators for the explicit constants and thresholds of the covering theorem.

Everything that can overflow (N0, N, B0, the prime-gap regime) is carried in
log space. The constants c1, c2, c_sym, h_x and the polynomial exponents are not
known explicitly; they are configuration placeholders and every plan reports them.
"""
import logging
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

import sympy

from detcover.detmethod import chardin_upper_bound, hypersurface_rank
from detcover.errors import PlannerError
from detcover.heights import Rational, as_rational, log_rational
from detcover.variety import Variety

logger = logging.getLogger(__name__)

DUDEK_EXPONENT = 33.3
D0_WINDOW = 50
D0_SEARCH_CAP = 10 ** 6
MAX_LOG_N0 = 700.0


@dataclass(frozen=True)
class PlanConfig:
    M: int
    n: int
    d: int
    deg_k: int = 1
    c1: float = 1.0
    c2: float = 1.0
    c_sym: float = 1.0
    h_x: float = 0.0
    poly_a_exp: Optional[float] = None
    poly_b_exp: Optional[float] = None

    def __post_init__(self):
        if self.M < 1 or self.n < 1 or self.d < 1 or self.deg_k < 1:
            raise PlannerError(f"M, n, d and deg_k must be positive (got {self.M}, {self.n}, {self.d}, {self.deg_k})")
        if self.n > self.M:
            raise PlannerError(f"dimension n={self.n} exceeds ambient dimension M={self.M}")
        if self.c1 <= 0:
            raise PlannerError("c1 must be positive")
        if self.c_sym < 0 or self.h_x < 0:
            raise PlannerError("c_sym and h_x must be non-negative")

    @classmethod
    def for_variety(cls, X: Variety, **overrides) -> "PlanConfig":
        return cls(M=X.ambient_dim, n=X.dim, d=X.degree, **overrides)

    @property
    def v(self) -> int:
        return math.lcm(*range(1, self.deg_k + 1))

    @property
    def poly_a_exponent(self) -> float:
        return 2 * self.M if self.poly_a_exp is None else self.poly_a_exp

    @property
    def poly_b_exponent(self) -> float:
        return 2 * self.M if self.poly_b_exp is None else self.poly_b_exp

    def to_dict(self) -> dict:
        out = asdict(self)
        out.update(v=self.v, poly_a_exp=self.poly_a_exponent, poly_b_exp=self.poly_b_exponent,
                   placeholders=["c1", "c2", "c_sym", "h_x", "poly_a_exp", "poly_b_exp"])
        return out


def e_constant(m: int) -> float:
    """E_m = m/(m+1) (m!)^{1/m}."""
    if m < 1:
        raise ValueError("m must be at least 1")
    return m / (m + 1) * math.exp(math.lgamma(m + 1) / m)


def _fact_root(n: int) -> float:
    return math.exp(math.lgamma(n + 1) / n)


def delta_star(d: int, n: int, deg_k: int = 1) -> float:
    numerator = -4 * (d - 2) - 2 * (n + 3) * d ** (-1.0 / n) - 2 * d * deg_k * (2 + math.log(n + 1))
    denominator = d * deg_k * d ** (1.0 / n) / _fact_root(n)
    return min(0.25, math.exp(numerator / denominator))


def delta_inverse_cap(n: int, deg_k: int = 1) -> float:
    """Upper bound for 1/delta that does not depend on d."""
    exponent = (4 + 2 * (n + 3) + 2 * deg_k * (2 + math.log(n + 1))) / (deg_k / _fact_root(n))
    return max(4.0, math.exp(exponent))


def slope_lower_bound(n: int) -> float:
    return -0.5 * math.log(n + 1)


@dataclass(frozen=True)
class DConditions:
    positivity: bool
    bounded: bool
    another: bool

    @property
    def all(self) -> bool:
        return self.positivity and self.bounded and self.another

    def to_dict(self) -> dict:
        return {"positivity": self.positivity, "bounded": self.bounded, "another": self.another, "all": self.all}


def d_conditions(D: int, cfg: PlanConfig) -> DConditions:
    if D <= cfg.d - 2:
        raise PlannerError(f"D={D} must exceed d-2={cfg.d - 2}")
    n, d = cfg.n, cfg.d
    positivity = True
    for m in range(1, n + 1):
        em = e_constant(m)
        ratio = d ** (1.0 / n) / _fact_root(n)
        rhs = 0.5 * em * ratio
        lhs = em * ratio * (D - d + 2) / D - cfg.c2 / D
        positivity = positivity and lhs > rhs > 0
    bounded = cfg.c1 * math.log(d * (D + n) ** n / math.factorial(n)) / D < 1
    another = d ** (1.0 / n) * n / (n + 1) * (1 - (d - 2) / D) - (n + 3) / (2 * n + 2) * n / D > 0
    return DConditions(positivity=positivity, bounded=bounded, another=another)


def d0_search(cfg: PlanConfig, window: int = D0_WINDOW, cap: Optional[int] = None) -> int:
    """Smallest D0 > d-2 with every D in [D0, D0 + window] satisfying all conditions."""
    cap = D0_SEARCH_CAP if cap is None else cap
    start = max(1, cfg.d - 1)
    run_start = None
    D = start
    while D <= cap + window:
        if d_conditions(D, cfg).all:
            if run_start is None:
                run_start = D
            if D - run_start >= window:
                return run_start
        else:
            run_start = None
            if D > cap:
                break
        D += 1
    raise PlannerError(f"no D0 found below the search cap {cap}")


def cover_degree(d: int, B: Rational) -> int:
    """D = ceil(d ln B), floored at 1."""
    log_b = log_rational(B)
    return max(1, math.ceil(d * log_b))


def log_n0(B: Rational, cfg: PlanConfig) -> float:
    return cfg.d ** (-1.0 / cfg.n) * (cfg.n + 1) / (cfg.n * cfg.v) * log_rational(B)


def first_prime_at_least(x: float) -> int:
    """Smallest prime >= x; values within 1e-9 of an integer count as that integer."""
    if x <= 2:
        return 2
    return int(sympy.nextprime(math.ceil(x - 1e-9) - 1))


def primes_from(x: float, count: int) -> List[int]:
    primes: List[int] = []
    if count <= 0:
        return primes
    p = first_prime_at_least(x)
    while len(primes) < count:
        primes.append(p)
        p = int(sympy.nextprime(p))
    return primes


def first_prime_from_log(log_x: float) -> int:
    """Smallest prime >= exp(log_x), for log_x within the range a float can hold."""
    if log_x > MAX_LOG_N0:
        raise PlannerError(f"N0 = exp({log_x:.6g}) is beyond the prime search range exp({MAX_LOG_N0:g})")
    return first_prime_at_least(math.exp(log_x))


def dudek_regime(log_n0_value: float) -> bool:
    """N0^{1/3} > exp(e^{33.3}), compared in log space."""
    return log_n0_value / 3 > math.exp(DUDEK_EXPONENT)


@dataclass
class PrimeSelection:
    log_n0: float
    n0: float
    primes: List[int]
    exponents: List[int]
    dudek_regime: bool
    log_window_upper: float

    @property
    def within_window(self) -> bool:
        return all(math.log(p) <= self.log_window_upper + 1e-12 for p in self.primes)


def n0_and_primes(B: Rational, cfg: PlanConfig, r: int) -> PrimeSelection:
    """The first r primes >= N0; exponents a_i = v for split primes."""
    if as_rational(B) <= 1:
        raise PlannerError("prime selection needs B > 1")
    ln0 = log_n0(B, cfg)
    primes = primes_from(first_prime_from_log(ln0), r)
    n0 = math.exp(ln0)
    window = 3 * math.log(math.exp(ln0 / 3) + r)
    return PrimeSelection(log_n0=ln0, n0=n0, primes=primes, exponents=[cfg.v] * len(primes),
                          dudek_regime=dudek_regime(ln0), log_window_upper=window)


@dataclass(frozen=True)
class CConstants:
    C1: float
    C2: float
    C3: float


def constants_C(cfg: PlanConfig) -> CConstants:
    M, n, d = cfg.M, cfg.n, cfg.d
    codim = M - n
    if codim <= 0:
        raise PlannerError("M = n: the variety would be all of P^M")
    log_rank = math.log(math.comb(d + M, M))
    c1 = ((n + 2) * cfg.c_sym * d + 0.5 * (n + 2) * log_rank
          + d / 2 * math.log((n + 2) * codim) + d / 2 * (n + 1) * math.log(M + 1))
    c2 = (codim / 2 * log_rank + 0.5 * math.log(math.comb(M + 1, codim))
          + 0.5 * math.lgamma(codim + 1) + codim * math.log(d))
    return CConstants(C1=c1, C2=c2, C3=codim * c1 + c2)


@dataclass(frozen=True)
class REstimate:
    r: int
    A1: float
    A2: float
    A3: float
    log_n0: float

    @property
    def r_below_a3(self) -> bool:
        return self.r < self.A3


def r_estimate(B: Rational, cfg: PlanConfig, constants: Optional[CConstants] = None) -> REstimate:
    log_b = log_rational(B)
    ln0 = log_n0(B, cfg)
    if ln0 <= 0:
        raise PlannerError(f"ln N0 = {ln0} is not positive; the bound B must exceed 1")
    constants = constants or constants_C(cfg)
    M, n, d, codim = cfg.M, cfg.n, cfg.d, cfg.M - cfg.n
    r = math.floor((codim * (d - 1) * log_b + (codim * cfg.h_x + constants.C3) * cfg.deg_k) / ln0 + 1)
    weight = (2 * n + 2) ** (n + 1) / math.factorial(n)
    a1 = codim * (d - 1) + weight * codim * d
    a2 = cfg.deg_k * (constants.C3 + weight * d * (1.5 * math.log(M + 1) + 2 ** n))
    a3 = cfg.v * (a1 + d * a2) / (d ** (-1.0 / n) * (n + 1) / n) + 1
    estimate = REstimate(r=r, A1=a1, A2=a2, A3=a3, log_n0=ln0)
    if not estimate.r_below_a3:
        logger.warning("r=%d is not below A3=%.3f; the configuration is outside the proof's regime", r, a3)
    return estimate


def height_threshold(B: Rational, cfg: PlanConfig) -> Tuple[float, str]:
    """The case split on log B / [K:Q]; returns the threshold and the branch taken."""
    n, d = cfg.n, cfg.d
    threshold = (math.factorial(n) / (d * (2 * n + 2) ** (n + 1)) * cfg.h_x
                 - 1.5 * math.log(cfg.M + 1) - 2 ** n)
    branch = "single-hypersurface" if log_rational(B) / cfg.deg_k <= threshold else "prime-covering"
    return threshold, branch


def prime_condition(p: int, a: int, B: Rational, cfg: PlanConfig) -> bool:
    """a log p * n/(n+1) * d^{1/n} >= log B for a single chosen prime."""
    lhs = a * math.log(p) * cfg.n / (cfg.n + 1) * cfg.d ** (1.0 / cfg.n)
    return lhs >= log_rational(B) - 1e-12


def archimedean_log_bound(mu: int, m: int, delta: float, c1: float, c2: float) -> float:
    """log of mu^{c1 mu} delta^{E_m mu^{1+1/m} - c2 mu}."""
    return c1 * mu * math.log(mu) + (e_constant(m) * mu ** (1 + 1.0 / m) - c2 * mu) * math.log(delta)


def delta_power_log(delta: float, n: int, deg_k: int = 1) -> float:
    """log of delta^{-2 n [K:Q]}."""
    return -2 * n * deg_k * math.log(delta)


def log_cell_cover_size(cfg: PlanConfig, delta: float, mu: int) -> float:
    """log of (M+1) poly_A(d) poly_B(mu log(1/delta)) delta^{-2n}."""
    return (math.log(cfg.M + 1) + cfg.poly_a_exponent * math.log(cfg.d)
            + cfg.poly_b_exponent * math.log(mu * math.log(1 / delta)) + delta_power_log(delta, cfg.n))


def log_b0(cfg: PlanConfig, d0: Optional[int] = None) -> float:
    """log B0 = (1/d) max{D0, 2(M-n)(d-1)+n+2, d^{1+1/n} n v/(n+1) 3 e^{33.3}}."""
    d0 = d0_search(cfg) if d0 is None else d0
    n, d = cfg.n, cfg.d
    dudek_term = d ** (1 + 1.0 / n) * n * cfg.v / (n + 1) * 3 * math.exp(DUDEK_EXPONENT)
    return max(d0, 2 * (cfg.M - n) * (d - 1) + n + 2, dudek_term) / d


@dataclass
class CoverBound:
    log_n: float
    log_cell_cover_size: float
    log_b0: float
    archimedean: Dict[int, float]

    @property
    def log10_b0(self) -> float:
        return self.log_b0 / math.log(10)

    def to_dict(self) -> dict:
        return {
            "log_N": self.log_n,
            "log_cell_cover_size": self.log_cell_cover_size,
            "log_B0": self.log_b0,
            "log10_B0": self.log10_b0,
            "archimedean_log_bound": {str(m): v for m, v in self.archimedean.items()},
        }


def predicted_cover_bound(B: Rational, cfg: PlanConfig, delta: float, mu: int, r: Optional[int] = None,
                          d0: Optional[int] = None) -> CoverBound:
    ln0 = log_n0(B, cfg)
    if r is None:
        r = r_estimate(B, cfg).r
    n, d = cfg.n, cfg.d
    cell = log_cell_cover_size(cfg, delta, mu)
    log_n = (math.log(r) + math.log(d) + math.log(n)
             + 3 * cfg.v * n * math.log(math.exp(ln0 / 3) + r)
             + cfg.deg_k * math.log(cfg.M + 1) + cfg.poly_a_exponent * math.log(d)
             + cfg.poly_b_exponent * math.log(mu * math.log(1 / delta)) + delta_power_log(delta, n, cfg.deg_k))
    archimedean = {m: archimedean_log_bound(mu, m, delta, cfg.c1, cfg.c2) for m in range(1, n + 1)}
    return CoverBound(log_n=log_n, log_cell_cover_size=cell, log_b0=log_b0(cfg, d0), archimedean=archimedean)


def default_mu(cfg: PlanConfig, D: int) -> int:
    """r1(D): exact for hypersurfaces, the Chardin bound otherwise."""
    if cfg.M - cfg.n == 1:
        return hypersurface_rank(cfg.M, cfg.d, D)
    return chardin_upper_bound(cfg.d, cfg.n, D)


@dataclass
class CoverPlan:
    B: Fraction
    D: int
    delta: float
    D0: int
    conditions_at_D: Optional[DConditions]
    log_n0: float
    N0: float
    primes: List[int]
    exponents: List[int]
    r: int
    A1: float
    A2: float
    A3: float
    constants: CConstants
    bound: CoverBound
    mu: int
    dudek_regime: bool
    threshold: float
    branch: str
    prime_conditions: List[bool]
    config: PlanConfig
    notes: List[str] = field(default_factory=list)

    @property
    def r_below_a3(self) -> bool:
        return self.r < self.A3

    def to_dict(self) -> dict:
        return {
            "B": str(self.B),
            "D": self.D,
            "delta": self.delta,
            "D0": self.D0,
            "conditions_at_D": None if self.conditions_at_D is None else self.conditions_at_D.to_dict(),
            "log_N0": self.log_n0,
            "N0": self.N0,
            "primes": self.primes,
            "exponents": self.exponents,
            "r": self.r,
            "A1": self.A1,
            "A2": self.A2,
            "A3": self.A3,
            "r_below_A3": self.r_below_a3,
            "C1": self.constants.C1,
            "C2": self.constants.C2,
            "C3": self.constants.C3,
            "mu": self.mu,
            "predicted": self.bound.to_dict(),
            "dudek_regime": self.dudek_regime,
            "height_threshold": self.threshold,
            "branch": self.branch,
            "prime_conditions": self.prime_conditions,
            "config": self.config.to_dict(),
            "substitutions": ["mu_max(S^d E) replaced by its upper bound c_sym * d",
                              "primes from a sieve instead of the prime-gap theorem"],
            "notes": self.notes,
        }


def make_plan(B: Rational, cfg: PlanConfig, mu: Optional[int] = None, r_override: Optional[int] = None) -> CoverPlan:
    bound = as_rational(B)
    if bound <= 1:
        raise PlannerError("a cover plan needs B > 1")
    D = cover_degree(cfg.d, bound)
    delta = delta_star(cfg.d, cfg.n, cfg.deg_k)
    d0 = d0_search(cfg)
    conditions = d_conditions(D, cfg) if D > cfg.d - 2 else None
    constants = constants_C(cfg)
    estimate = r_estimate(bound, cfg, constants)
    r = estimate.r if r_override is None else r_override
    selection = n0_and_primes(bound, cfg, r)
    mu = default_mu(cfg, D) if mu is None else mu
    predicted = predicted_cover_bound(bound, cfg, delta, mu, r=r, d0=d0)
    threshold, branch = height_threshold(bound, cfg)
    notes = []
    if conditions is not None and not conditions.all:
        notes.append(f"D={D} is below D0={d0}: the auxiliary hypersurface lemma does not apply at this B")
    if not selection.dudek_regime:
        notes.append("N0 is outside the prime-gap regime; the theorem's guarantee starts at B0")
    plan = CoverPlan(B=bound, D=D, delta=delta, D0=d0, conditions_at_D=conditions, log_n0=selection.log_n0,
                     N0=selection.n0, primes=selection.primes, exponents=selection.exponents, r=r,
                     A1=estimate.A1, A2=estimate.A2, A3=estimate.A3, constants=constants, bound=predicted,
                     mu=mu, dudek_regime=selection.dudek_regime, threshold=threshold, branch=branch,
                     prime_conditions=[prime_condition(p, a, bound, cfg)
                                       for p, a in zip(selection.primes, selection.exponents)],
                     config=cfg, notes=notes)
    logger.info("  D = %d, D0 = %d, delta = %.6g, r = %d, N0 = %.4g", D, d0, delta, r, selection.n0)
    return plan
