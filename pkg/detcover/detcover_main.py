"""Command line entry point: enumerate, reduce, detmat, plan, cover and verify."""
import argparse
import json
import logging
import random
import sys
from pathlib import Path
from typing import List, Optional

import numpy as np
import yaml

from detcover.config import RunConfig, load_config, plan_config_for, run_config_from
from detcover.coverctl import MODES, run_cover, verify_cover
from detcover.detmethod import certify_padic_divisibility, evaluation_matrix, fd_basis
from detcover.enumerate import enumerate_points, regular_points
from detcover.errors import ConfigError, DetCoverError
from detcover.heights import canonicalize
from detcover.planner import make_plan
from detcover.polyform import forms_from_strings
from detcover.residue import residue_classes
from detcover.variety import load_variety

logger = logging.getLogger(__name__)

EXIT_OK = 0
EXIT_ERROR = 1
EXIT_VERDICT_FALSE = 2


def set_seed(args):
    seed = RunConfig.seed if args.seed is None else args.seed
    random.seed(seed)
    np.random.seed(seed)


def write_json(payload, output: Optional[str]) -> None:
    text = json.dumps(payload, indent=2, sort_keys=True) + "\n"
    if output is None or output == "-":
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)
        logger.info("Saved %s", output)


def read_json(path: str):
    if path == "-":
        return json.load(sys.stdin)
    with open(path, "r") as f:
        return json.load(f)


def _run_config(args, run_keys):
    return run_config_from(run_keys, work_limit=args.work_limit, jobs=args.jobs, seed=args.seed,
                           progress=args.progress or None,
                           max_primes=getattr(args, "max_primes", None), power=getattr(args, "power", None),
                           max_minors=getattr(args, "max_minors", None))


def cmd_enumerate(args) -> int:
    X = load_variety(args.variety)
    _, run_keys = load_config(args.config)
    run = _run_config(args, run_keys)
    search = regular_points if args.regular_only else enumerate_points
    points = search(X, args.bound, run.work_limit, run.jobs, run.progress)
    logger.info("  Num points = %d", len(points))
    write_json([list(P.coords) for P in points], args.output)
    return EXIT_OK


def cmd_reduce(args) -> int:
    X = load_variety(args.variety)
    _, run_keys = load_config(args.config)
    run = _run_config(args, run_keys)
    report = residue_classes(X, args.prime, args.power, n_jobs=run.jobs)
    logger.info("  Num classes = %d (bound %d)", report.count, report.gl02_bound)
    write_json(report.to_dict(), args.output)
    return EXIT_OK if report.gl02_holds is not False else EXIT_VERDICT_FALSE


def cmd_detmat(args) -> int:
    X = load_variety(args.variety)
    _, run_keys = load_config(args.config)
    run = _run_config(args, run_keys)
    points = [canonicalize(raw) for raw in read_json(args.points)]
    basis = fd_basis(X, args.degree)
    matrix = evaluation_matrix(basis, points)
    sombra = basis.sombra()
    payload = {
        "D": basis.D,
        "r1": basis.r1,
        "rows": matrix.rows,
        "cols": matrix.cols,
        "sombra": None if sombra is None else str(sombra),
        "chardin": basis.chardin(),
        "matrix": [[str(x) for x in row] for row in matrix.to_lists()],
    }
    status = EXIT_OK
    if args.prime is not None:
        mu = args.mu if args.mu is not None else len(points)
        report = certify_padic_divisibility(X, args.prime, args.power, points, mu, D=args.degree,
                                            max_minors=run.max_minors, seed=run.seed, n_jobs=run.jobs)
        payload["certification"] = report.to_dict()
        if not report.passed:
            status = EXIT_VERDICT_FALSE
    write_json(payload, args.output)
    return status


def cmd_plan(args) -> int:
    X = load_variety(args.variety)
    plan_keys, _ = load_config(args.config)
    cfg = plan_config_for(X, plan_keys)
    logger.info("***** Running plan *****")
    plan = make_plan(args.bound, cfg, mu=args.mu)
    write_json(plan.to_dict(), args.output)
    return EXIT_OK


def cmd_cover(args) -> int:
    X = load_variety(args.variety)
    plan_keys, run_keys = load_config(args.config)
    cfg = plan_config_for(X, plan_keys)
    run = _run_config(args, run_keys)
    report = run_cover(X, args.bound, args.mode, cfg, run)
    write_json(report.to_dict(with_timing=args.with_timing), args.output)
    if args.records_csv:
        report.records_frame().to_csv(args.records_csv, index=False)
        logger.info("Saved %s", args.records_csv)
    return EXIT_OK if report.verdicts.all else EXIT_VERDICT_FALSE


def cmd_verify(args) -> int:
    X = load_variety(args.variety)
    _, run_keys = load_config(args.config)
    run = _run_config(args, run_keys)
    data = read_json(args.forms)
    texts = data["hypersurfaces"] if isinstance(data, dict) else data
    if not isinstance(texts, list):
        raise ConfigError(f"{args.forms}: expected a list of forms or a cover report")
    forms = forms_from_strings(texts, X.num_vars)
    result = verify_cover(X, args.bound, forms, work_limit=run.work_limit, n_jobs=run.jobs)
    write_json(result.to_dict(), args.output)
    return EXIT_OK if result.verdicts.all else EXIT_VERDICT_FALSE


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--seed", type=int, default=None,
                        help="random seed for minor sampling (default 42)")
    common.add_argument("--jobs", type=int, default=None,
                        help="number of joblib workers (-1 for all cores, default 1)")
    common.add_argument("--work-limit", type=int, default=None,
                        help="maximum number of tuples the box search may visit")
    common.add_argument("--verbose", action="store_true",
                        help="log at DEBUG level")
    common.add_argument("--progress", action="store_true",
                        help="show tqdm progress bars")
    common.add_argument("--output", default=None, type=str,
                        help="output JSON file (default: stdout)")
    common.add_argument("--config", default=None, type=str,
                        help="plan/run config file (YAML or JSON)")

    parser = argparse.ArgumentParser(prog="detcover", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("enumerate", parents=[common], help="list points of height <= B")
    p.add_argument("--variety", required=True, type=str, help="variety JSON file")
    p.add_argument("--bound", required=True, type=str, help="height bound B (integer, decimal or p/q)")
    p.add_argument("--regular-only", action="store_true", help="keep only regular points")
    p.set_defaults(func=cmd_enumerate)

    p = sub.add_parser("reduce", parents=[common], help="residue classes of X mod p^a")
    p.add_argument("--variety", required=True, type=str, help="variety JSON file")
    p.add_argument("--prime", required=True, type=int, help="prime p")
    p.add_argument("--power", default=1, type=int, help="exponent a")
    p.set_defaults(func=cmd_reduce)

    p = sub.add_parser("detmat", parents=[common], help="evaluation matrix and p-adic certification")
    p.add_argument("--variety", required=True, type=str, help="variety JSON file")
    p.add_argument("--degree", required=True, type=int, help="degree D of the section space")
    p.add_argument("--points", required=True, type=str, help="JSON list of coordinate vectors")
    p.add_argument("--prime", default=None, type=int, help="certify divisibility at this prime")
    p.add_argument("--power", default=1, type=int, help="exponent a for the certification")
    p.add_argument("--mu", default=None, type=int, help="minor size (default: number of points)")
    p.add_argument("--max-minors", default=None, type=int, help="sampled minors above this count")
    p.set_defaults(func=cmd_detmat)

    p = sub.add_parser("plan", parents=[common], help="evaluate every constant of the cover plan")
    p.add_argument("--variety", required=True, type=str, help="variety JSON file")
    p.add_argument("--bound", required=True, type=str, help="height bound B > 1")
    p.add_argument("--mu", default=None, type=int, help="override mu (default: r1(D))")
    p.set_defaults(func=cmd_plan)

    p = sub.add_parser("cover", parents=[common], help="cover S_1(X, B) by hypersurfaces of degree D")
    p.add_argument("--variety", required=True, type=str, help="variety JSON file")
    p.add_argument("--bound", required=True, type=str, help="height bound B")
    p.add_argument("--mode", default="adaptive", choices=MODES, help="prime schedule")
    p.add_argument("--max-primes", default=None, type=int, help="adaptive mode prime cap")
    p.add_argument("--power", default=None, type=int, help="override the exponent a for every prime")
    p.add_argument("--records-csv", default=None, type=str, help="also write per-class records as CSV")
    p.add_argument("--with-timing", action="store_true", help="include elapsed time in the report")
    p.set_defaults(func=cmd_cover)

    p = sub.add_parser("verify", parents=[common], help="check a list of forms against S_1(X, B)")
    p.add_argument("--variety", required=True, type=str, help="variety JSON file")
    p.add_argument("--bound", required=True, type=str, help="height bound B")
    p.add_argument("--forms", required=True, type=str, help="JSON list of forms or a cover report")
    p.set_defaults(func=cmd_verify)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(format='%(asctime)s - %(levelname)s - %(name)s -   %(message)s',
                        datefmt='%m/%d/%Y %H:%M:%S',
                        level=logging.DEBUG if args.verbose else logging.INFO)
    set_seed(args)
    try:
        return args.func(args)
    except (DetCoverError, ValueError, OverflowError, OSError, yaml.YAMLError) as e:
        logger.error("%s: %s", type(e).__name__, e)
        return EXIT_ERROR


if __name__ == "__main__":
    sys.exit(main())
