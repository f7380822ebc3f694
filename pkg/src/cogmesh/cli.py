"""cogmesh command line.

Exit codes: 0 success, 1 input validation failed, 2 runtime failure,
64 usage error.  Diagnostics go to stderr as ``cogmesh: error: ...``;
set COGMESH_LOG=error|info|debug for progress logging on stderr.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import os
import sys
from pathlib import Path

from . import config, engine, l2conf, markov
from .errors import CogmeshError, InputDomainError, UndefinedMetricError, ValidationError

PROG = "cogmesh"
EX_USAGE = 64

log = logging.getLogger(PROG)


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EX_USAGE, f"{PROG}: error: {message}\n")


def _build_parser() -> _Parser:
    parser = _Parser(prog=PROG, description="autonomic cognitive-radio simulator and analyzer")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p_run = sub.add_parser("run", help="simulate a scenario and write trace, metrics and figures")
    p_run.add_argument("--config", required=True, help="scenario JSON file")
    p_run.add_argument("--seed", type=int, default=None, help="override the scenario seed")
    p_run.add_argument("--duration", type=float, default=None, help="override duration in seconds")
    p_run.add_argument("--out", required=True, help="output directory")
    p_run.add_argument("--no-figures", action="store_true", help="skip PNG rendering")
    p_run.add_argument("--dump-kb", default=None, metavar="PATH", help="also write the knowledge base as JSON")

    p_an = sub.add_parser("analyze", help="solve the occupancy chain for blocking and non-completion")
    p_an.add_argument("--config", required=True, help="scenario JSON file with a markov block")
    p_an.add_argument("--method", choices=["auto", "dense", "power"], default="auto")

    p_l2 = sub.add_parser("l2sim", help="run TDMA neighbour discovery over a topology")
    p_l2.add_argument("--topology", required=True, help="topology JSON file")
    p_l2.add_argument("--out", default=None, help="write the discovery report here instead of stdout")

    p_cmp = sub.add_parser("compare-learning", help="paired runs with knowledge ranking on vs off")
    p_cmp.add_argument("--config", required=True, help="scenario JSON file")
    p_cmp.add_argument("--seeds", type=int, required=True, help="number of paired seeds")
    p_cmp.add_argument("--base-seed", type=int, default=None, help="first seed (default: scenario seed)")
    p_cmp.add_argument("--out", default=None, help="output directory for CSV and figure")
    p_cmp.add_argument("--no-figures", action="store_true", help="skip PNG rendering")

    p_val = sub.add_parser("validate", help="check a scenario file and exit")
    p_val.add_argument("--config", required=True, help="scenario JSON file")
    return parser


def _write_metrics_files(metrics: engine.RunMetrics, outdir: Path) -> None:
    flat = metrics.to_flat_dict()
    with open(outdir / "metrics.json", "w", encoding="utf-8") as f:
        json.dump(flat, f, indent=2, sort_keys=True)
        f.write("\n")
    with open(outdir / "metrics.csv", "w", encoding="utf-8", newline="") as f:
        writer = csv.writer(f)
        keys = sorted(flat)
        writer.writerow(keys)
        writer.writerow(["" if flat[k] is None else flat[k] for k in keys])


def _cmd_run(args) -> int:
    scenario = config.load_scenario(args.config)
    if args.duration is not None and args.duration <= 0:
        raise InputDomainError("--duration must be positive")
    result = engine.run(scenario, seed=args.seed, duration_s=args.duration)
    outdir = Path(args.out)
    outdir.mkdir(parents=True, exist_ok=True)
    engine.write_trace(outdir / "trace.jsonl", result.events, result.seed, result.duration_s)
    log.info("wrote %s", outdir / "trace.jsonl")
    _write_metrics_files(result.metrics, outdir)
    log.info("wrote %s and %s", outdir / "metrics.json", outdir / "metrics.csv")
    if args.dump_kb:
        result.knowledge.dump(args.dump_kb)
        log.info("wrote %s", args.dump_kb)
    if not args.no_figures:
        from . import report

        for path in report.render_run_figures(result.events, result.metrics, result.duration_s, outdir / "figures"):
            log.info("wrote %s", path)
    for key, value in sorted(result.metrics.to_flat_dict().items()):
        print(f"{key}={'' if value is None else value}")
    return 0


def _cmd_analyze(args) -> int:
    scenario = config.load_scenario(args.config)
    if scenario.markov is None:
        raise ValidationError(["markov: block is required for analyze"])
    dist = markov.stationary(scenario.markov, method=args.method)
    print(f"states={scenario.markov.n_states}")
    print(f"blocking={markov.blocking_probability(dist):.9f}")
    try:
        print(f"noncompletion={markov.noncompletion_probability(dist):.9f}")
    except UndefinedMetricError:
        print("noncompletion=undefined")
    return 0


def _cmd_l2sim(args) -> int:
    nodes, layout = config.load_topology(args.topology)
    common = l2conf.discover(nodes, layout)
    doc = {
        "schema": "cogmesh-discovery/1",
        "n_nodes": layout.n_nodes,
        "m_channels": layout.m_channels,
        "round_length_phase1": l2conf.round_length(layout),
        "common_channels": {
            str(node): {str(nb): sorted(chs) for nb, chs in sorted(heard.items())}
            for node, heard in sorted(common.items())
        },
    }
    text = json.dumps(doc, indent=2, sort_keys=True) + "\n"
    if args.out:
        Path(args.out).parent.mkdir(parents=True, exist_ok=True)
        Path(args.out).write_text(text, encoding="utf-8")
        log.info("wrote %s", args.out)
    else:
        sys.stdout.write(text)
    return 0


def _cmd_compare_learning(args) -> int:
    scenario = config.load_scenario(args.config)
    if args.seeds < 1:
        raise InputDomainError("--seeds must be at least 1")
    base = scenario.seed if args.base_seed is None else args.base_seed
    seeds = range(base, base + args.seeds)
    comparison = engine.compare_learning(scenario, seeds)
    if args.out:
        outdir = Path(args.out)
        outdir.mkdir(parents=True, exist_ok=True)
        with open(outdir / "compare_learning.csv", "w", encoding="utf-8", newline="") as f:
            writer = csv.writer(f)
            writer.writerow(["seed", "failure_rate_on", "failure_rate_off", "paired_difference"])
            for seed, on, off in zip(comparison.seeds, comparison.failure_rate_on, comparison.failure_rate_off):
                writer.writerow([seed, on, off, off - on])
        log.info("wrote %s", outdir / "compare_learning.csv")
        if not args.no_figures:
            from . import report

            path = report.render_comparison_figure(comparison, outdir / "figures" / "compare_learning.png")
            log.info("wrote %s", path)
    print(f"seeds={len(comparison.seeds)}")
    print(f"failure_rate_on_mean={comparison.mean_on:.9f}")
    print(f"failure_rate_off_mean={comparison.mean_off:.9f}")
    print(f"paired_difference_mean={comparison.mean_paired_difference:.9f}")
    return 0


def _cmd_validate(args) -> int:
    config.load_scenario(args.config)
    print("ok")
    return 0


_COMMANDS = {
    "run": _cmd_run,
    "analyze": _cmd_analyze,
    "l2sim": _cmd_l2sim,
    "compare-learning": _cmd_compare_learning,
    "validate": _cmd_validate,
}


def _configure_logging() -> None:
    level = {"error": logging.ERROR, "info": logging.INFO, "debug": logging.DEBUG}.get(
        os.environ.get("COGMESH_LOG", "error").lower(), logging.ERROR
    )
    logging.basicConfig(stream=sys.stderr, level=level, format="%(levelname)s %(name)s: %(message)s")


def main(argv=None) -> int:
    _configure_logging()
    args = _build_parser().parse_args(argv)
    try:
        return _COMMANDS[args.command](args)
    except ValidationError as e:
        for violation in e.violations:
            print(f"{PROG}: error: {violation}", file=sys.stderr)
        return 1
    except InputDomainError as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return 1
    except (CogmeshError, OSError) as e:
        print(f"{PROG}: error: {e}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
