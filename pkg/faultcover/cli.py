# Copyright (c) 2022 Google LLC
#
# Permission is hereby granted, free of charge, to any person obtaining a copy of
# this software and associated documentation files (the "Software"), to deal in
# the Software without restriction, including without limitation the rights to
# use, copy, modify, merge, publish, distribute, sublicense, and/or sell copies of
# the Software, and to permit persons to whom the Software is furnished to do so,
# subject to the following conditions:
#
# The above copyright notice and this permission notice shall be included in all
# copies or substantial portions of the Software.
#
# THE SOFTWARE IS PROVIDED "AS IS", WITHOUT WARRANTY OF ANY KIND, EXPRESS OR
# IMPLIED, INCLUDING BUT NOT LIMITED TO THE WARRANTIES OF MERCHANTABILITY, FITNESS
# FOR A PARTICULAR PURPOSE AND NONINFRINGEMENT. IN NO EVENT SHALL THE AUTHORS OR
# COPYRIGHT HOLDERS BE LIABLE FOR ANY CLAIM, DAMAGES OR OTHER LIABILITY, WHETHER
# IN AN ACTION OF CONTRACT, TORT OR OTHERWISE, ARISING FROM, OUT OF OR IN
# CONNECTION WITH THE SOFTWARE OR THE USE OR OTHER DEALINGS IN THE SOFTWARE.

import argparse
import logging
import os
import sys
from typing import List, Optional

from . import __version__
from .benchmark import load_specs, run_benchmark, save_bench
from .coverage import detection_value, greedy_msc, lazy_greedy_msc, max_coverage
from .influence import (
    build_influence_matrix,
    detection_sets,
    InfluenceMatrix,
    read_influence_matrix,
    save_influence_matrix,
)
from .metrics import save_scores, score_curve, score_report
from .network import event_locations, load_network
from .oracle import exact_msc, exact_mtc
from .placement import from_selection, load_placement, PlacementResult, save_placement
from .testcover import augmented_greedy, identification_value, tlg_solve
from .transient import load_scenario, save_trace, simulate


logger = logging.getLogger(__name__)

ALGORITHMS = {
    "msc": ("greedy", "lazy", "exact"),
    "mtc": ("tlg", "ag", "exact"),
}


def _prefix_gains(values: List[int]) -> List[int]:
    return [b - a for a, b in zip([0] + values[:-1], values)]


def solve_placement(
    M: InfluenceMatrix, problem: str, algorithm: str, budget: Optional[int] = None
) -> PlacementResult:
    """Dispatch to a solver by problem and algorithm name.

    `budget` caps the number of sensors: maximum coverage for `greedy`, a capped
    lazy greedy for `lazy`, and `max_sensors` for `tlg`/`ag`.
    """
    if algorithm not in ALGORITHMS.get(problem, ()):
        raise ValueError(
            f"algorithm {algorithm!r} does not solve problem {problem!r}; choose one "
            f"of {', '.join(ALGORITHMS.get(problem, ()))}"
        )
    if budget is not None and budget < 0:
        raise ValueError(f"budget must be non-negative, got {budget}")
    if problem == "msc":
        C = detection_sets(M)
        if algorithm == "exact":
            if budget is not None:
                raise ValueError("the exact solver does not take a budget")
            witness = exact_msc(C)
            values = [detection_value(C, witness[: i + 1]) for i in range(len(witness))]
            return from_selection("msc", "exact", M.sensors, witness, _prefix_gains(values), M.n)
        if algorithm == "lazy":
            trace = lazy_greedy_msc(C, budget)
        elif budget is not None:
            trace = max_coverage(C, budget)
        else:
            trace = greedy_msc(C)
        return from_selection(
            "msc",
            algorithm,
            M.sensors,
            trace.selected,
            trace.gains,
            M.n,
            evaluation_count=trace.evaluation_count,
        )
    if algorithm == "exact":
        if budget is not None:
            raise ValueError("the exact solver does not take a budget")
        witness = exact_mtc(M)
        values = [identification_value(M, witness[: i + 1]) for i in range(len(witness))]
        return from_selection(
            "mtc", "exact", M.sensors, witness, _prefix_gains(values), M.n * (M.n - 1) // 2
        )
    if algorithm == "tlg":
        return tlg_solve(M, max_sensors=budget)
    return augmented_greedy(M, max_sensors=budget)


def _infer_problem(problem: Optional[str], algorithm: str) -> str:
    if problem is not None:
        return problem
    matches = [p for p, algorithms in ALGORITHMS.items() if algorithm in algorithms]
    if len(matches) != 1:
        raise ValueError(f"--problem is required with --algo {algorithm}")
    return matches[0]


def _parse_ids(text: str) -> List[str]:
    return [part.strip() for part in text.split(",") if part.strip()]


def _parse_sensors(M: InfluenceMatrix, text: str) -> List[int]:
    if os.path.isfile(text):
        with open(text, "r", encoding="utf-8") as f:
            ids = load_placement(f.read())
    else:
        ids = _parse_ids(text)
    return M.sensor_indices(ids)


def _write(path: str, text: str) -> None:
    if path == "-":
        sys.stdout.write(text)
    else:
        with open(path, "w", encoding="utf-8", newline="") as f:
            f.write(text)
        logger.info("Wrote %s", path)


def _build_influence(args) -> None:
    net = load_network(args.network)
    sensors = _parse_ids(args.sensors) if args.sensors is not None else None
    events = event_locations(net, _parse_ids(args.links)) if args.links is not None else None
    M = build_influence_matrix(net, sensor_nodes=sensors, epsilon_m=args.epsilon, events=events)
    _write(args.output, save_influence_matrix(M))


def _solve(args) -> None:
    M = read_influence_matrix(args.matrix)
    problem = _infer_problem(args.problem, args.algo)
    result = solve_placement(M, problem, args.algo, args.budget)
    logger.info(
        "%s/%s placed %d sensors: %s",
        problem,
        args.algo,
        len(result.selected),
        ",".join(result.sensor_ids),
    )
    _write(args.output, save_placement(result))


def _metrics(args) -> None:
    M = read_influence_matrix(args.matrix)
    S = _parse_sensors(M, args.sensors)
    report = score_report(M, S, exclude_undetected=args.exclude_undetected)
    _write(args.output, save_scores([report]))


def _curve(args) -> None:
    M = read_influence_matrix(args.matrix)
    problem = _infer_problem(args.problem, args.algo)
    result = solve_placement(M, problem, args.algo, args.budget)
    curve = score_curve(M, result.selected, exclude_undetected=args.exclude_undetected)
    _write(args.output, save_scores(curve))


def _benchmark(args) -> None:
    with open(args.spec, "r", encoding="utf-8") as f:
        specs = load_specs(f.read())
    records = run_benchmark(specs, pairwise_limit=args.pairwise_limit)
    _write(args.output, save_bench(records, timings=not args.no_timings))


def _simulate(args) -> None:
    with open(args.scenario, "r", encoding="utf-8") as f:
        scenario = load_scenario(f.read())
    _write(args.output, save_trace(simulate(scenario)))


def _add_output(parser: argparse.ArgumentParser) -> None:
    parser.add_argument(
        "-o", "--output", default="-", help="Output CSV path, or - for stdout."
    )


def _add_algorithm(parser: argparse.ArgumentParser, default: Optional[str]) -> None:
    parser.add_argument(
        "--problem",
        choices=sorted(ALGORITHMS),
        help="msc (detection) or mtc (identification). Inferred from --algo if omitted.",
    )
    parser.add_argument(
        "--algo",
        choices=["greedy", "lazy", "tlg", "ag", "exact"],
        default=default,
        required=default is None,
        help="Solver to use.",
    )
    parser.add_argument(
        "--budget", type=int, help="Stop after at most this many sensors."
    )


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="faultcover",
        description="Sensor placement for detecting and identifying pipe failures.",
    )
    parser.add_argument(
        "-v",
        "--verbose",
        action="count",
        default=0,
        help="Log progress to stderr; repeat for debug output.",
    )
    parser.add_argument(
        "--version", action="version", version=f"%(prog)s {__version__}"
    )
    subparsers = parser.add_subparsers(dest="command", required=True)

    p = subparsers.add_parser(
        "build-influence", help="Build an influence matrix from a network."
    )
    p.add_argument("network", help="Network JSON file.")
    p.add_argument(
        "--epsilon", type=float, default=1000.0, help="Detection radius in metres."
    )
    p.add_argument("--sensors", help="Comma-separated candidate sensor node ids.")
    p.add_argument("--links", help="Comma-separated ids of the links that may fail.")
    _add_output(p)
    p.set_defaults(func=_build_influence)

    p = subparsers.add_parser("solve", help="Place sensors.")
    p.add_argument("matrix", help="Influence matrix CSV file.")
    _add_algorithm(p, default=None)
    _add_output(p)
    p.set_defaults(func=_solve)

    p = subparsers.add_parser("metrics", help="Score a sensor placement.")
    p.add_argument("matrix", help="Influence matrix CSV file.")
    p.add_argument(
        "--sensors",
        required=True,
        help="Comma-separated sensor ids, or a placement CSV file.",
    )
    p.add_argument(
        "--exclude-undetected",
        action="store_true",
        help="Leave events no sensor detects out of the localization groups.",
    )
    _add_output(p)
    p.set_defaults(func=_metrics)

    p = subparsers.add_parser(
        "curve", help="Scores against sensor count along a placement."
    )
    p.add_argument("matrix", help="Influence matrix CSV file.")
    _add_algorithm(p, default="ag")
    p.add_argument("--exclude-undetected", action="store_true")
    _add_output(p)
    p.set_defaults(func=_curve)

    p = subparsers.add_parser(
        "benchmark", help="Compare the identification solvers on generated instances."
    )
    p.add_argument("--spec", required=True, help="Benchmark JSON file.")
    p.add_argument(
        "--pairwise-limit",
        type=int,
        help="Largest pairwise instance to run the transformed solver on.",
    )
    p.add_argument(
        "--no-timings",
        action="store_true",
        help="Leave the wall-clock columns out so repeated runs give identical output.",
    )
    _add_output(p)
    p.set_defaults(func=_benchmark)

    p = subparsers.add_parser("simulate", help="Run a transient burst scenario.")
    p.add_argument("scenario", help="Scenario JSON file.")
    _add_output(p)
    p.set_defaults(func=_simulate)
    return parser


def main(argv: Optional[List[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    level = {0: logging.WARNING, 1: logging.INFO}.get(args.verbose, logging.DEBUG)
    logging.basicConfig(
        level=level, format="%(levelname)s %(name)s: %(message)s", stream=sys.stderr
    )
    try:
        args.func(args)
    except (ValueError, RuntimeError, IndexError, OSError) as e:
        print(f"faultcover: error: {e}", file=sys.stderr)
        return 1
    return 0
