"""Run configuration and plan-config files (YAML or JSON)."""
import logging
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Optional, Tuple, Union

import yaml

from detcover.errors import ConfigError
from detcover.planner import PlanConfig
from detcover.variety import Variety

logger = logging.getLogger(__name__)

PLAN_KEYS = ("deg_k", "c1", "c2", "c_sym", "h_x", "poly_a_exp", "poly_b_exp")
PLAN_ALIASES = {"degK": "deg_k", "c1M": "c1", "c2M": "c2", "cSym": "c_sym", "hX": "h_x"}
RUN_KEYS = ("work_limit", "jobs", "max_primes", "power", "max_minors", "seed")


@dataclass(frozen=True)
class RunConfig:
    work_limit: int = 10 ** 9
    jobs: int = 1
    max_primes: int = 50
    power: Optional[int] = None
    max_minors: int = 200
    seed: int = 42
    progress: bool = False

    def __post_init__(self):
        if self.work_limit < 1:
            raise ConfigError("work_limit must be positive")
        if self.jobs == 0:
            raise ConfigError("jobs must be nonzero (use -1 for all cores)")
        if self.max_primes < 1:
            raise ConfigError("max_primes must be at least 1")
        if self.power is not None and self.power < 1:
            raise ConfigError("power must be at least 1")
        if self.max_minors < 1:
            raise ConfigError("max_minors must be at least 1")

    def to_dict(self) -> dict:
        out = asdict(self)
        out.pop("progress")
        return out


def split_config(raw: Dict[str, Any]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    """Separate plan keys (aliases resolved) from run keys; unknown keys are an error."""
    plan, run = {}, {}
    for key, value in raw.items():
        name = PLAN_ALIASES.get(key, key)
        if name in PLAN_KEYS:
            if name in plan:
                raise ConfigError(f"plan key {name!r} given twice")
            plan[name] = value
        elif name in RUN_KEYS:
            run[name] = value
        else:
            raise ConfigError(f"unknown config key {key!r}")
    return plan, run


def load_config(path: Optional[Union[str, Path]]) -> Tuple[Dict[str, Any], Dict[str, Any]]:
    if path is None:
        return {}, {}
    with open(path, "r") as f:
        raw = yaml.safe_load(f) or {}
    if not isinstance(raw, dict):
        raise ConfigError(f"{path}: expected a mapping at the top level")
    plan, run = split_config(raw)
    logger.info("Loaded config %s (%d plan keys, %d run keys)", path, len(plan), len(run))
    return plan, run


def plan_config_for(X: Variety, overrides: Dict[str, Any]) -> PlanConfig:
    try:
        return PlanConfig.for_variety(X, **overrides)
    except TypeError as e:
        raise ConfigError(str(e))


def run_config_from(run: Dict[str, Any], **cli) -> RunConfig:
    """CLI values that are not None take precedence over the file."""
    merged = dict(run)
    merged.update({k: v for k, v in cli.items() if v is not None})
    try:
        return RunConfig(**merged)
    except TypeError as e:
        raise ConfigError(str(e))
