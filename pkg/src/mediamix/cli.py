"""Command-line entry points.

Subcommands: synth, fit, factor, optimize, dag, report, serve. Without
--config the bundled example runs. Exit codes: 0 success, 1 configuration
error, 2 data error, 3 numerical failure.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import pipeline
from .causal import export_dot
from .errors import ConfigError, DataError, MediaMixError, NumericalError, PipelineStageError
from .example import example_config


class _Parser(argparse.ArgumentParser):
    # usage problems are configuration errors, not data errors
    def error(self, message):
        raise ConfigError(message)


def _build_parser() -> _Parser:
    parser = _Parser(prog="mediamix", description="marketing-mix modeling toolkit")
    parser.add_argument("--config", help="pipeline config JSON (default: bundled example)")
    parser.add_argument("--seed", type=int, help="override the config seed")
    parser.add_argument("--out", help="override the output directory")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("synth", "generate the synthetic dataset and its summary table"),
        ("fit", "run the full and stepwise regressions"),
        ("factor", "extract, rotate, and score the components"),
        ("optimize", "compose the objective and solve the allocation LP"),
        ("dag", "run the causal structure search and write DOT"),
        ("report", "run everything and write report, graph, and bundle"),
    ):
        sub.add_parser(name, help=text)
    serve = sub.add_parser("serve", help="serve the scenario API over HTTP")
    serve.add_argument("--host", default="127.0.0.1")
    serve.add_argument("--port", type=int, default=8000)
    serve.add_argument("--bundle", help="serve a previously saved bundle.json")
    return parser


def _load_config(args) -> pipeline.PipelineConfig:
    cfg = pipeline.parse_config(args.config) if args.config else example_config()
    return cfg.with_overrides(seed=args.seed, output_dir=args.out)


def _write(out: Path, name: str, payload: dict) -> None:
    out.mkdir(parents=True, exist_ok=True)
    path = out / name
    path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n")
    print(f"wrote {path}")


def _dispatch(args) -> int:
    if args.command == "serve":
        if args.bundle:
            bundle = pipeline.load_bundle(args.bundle)
        else:
            bundle, _ = pipeline.run_pipeline(_load_config(args))
        from .service import serve

        serve(bundle, host=args.host, port=args.port)
        return 0

    config = _load_config(args)
    out = Path(config.output_dir)

    if args.command == "report":
        bundle, paths = pipeline.run_pipeline(config)
        for path in paths.values():
            print(f"wrote {path}")
        return 0

    through = {
        "synth": "summary",
        "fit": "regression_stepwise",
        "factor": "factor",
        "optimize": "allocation",
        "dag": "causal",
    }[args.command]
    run = pipeline.execute(config, through=through)

    if args.command == "synth":
        out.mkdir(parents=True, exist_ok=True)
        csv_path = out / "dataset.csv"
        run.dataset.to_csv(csv_path)
        print(f"wrote {csv_path}")
        _write(out, "summary_statistics.json", run.tables["summary_statistics"])
    elif args.command == "fit":
        _write(out, "regression_full.json", run.tables["regression_full"])
        _write(out, "regression_stepwise.json", run.tables["regression_stepwise"])
    elif args.command == "factor":
        _write(out, "variance_explained.json", run.tables["variance_explained"])
        _write(out, "rotated_loadings.json", run.tables["rotated_loadings"])
        _write(out, "score_coefficients.json", run.tables["score_coefficients"])
    elif args.command == "optimize":
        _write(out, "optimization.json", run.tables["optimization"])
    elif args.command == "dag":
        out.mkdir(parents=True, exist_ok=True)
        dot_path = out / "graph.dot"
        dot_path.write_text(export_dot(run.graph))
        print(f"wrote {dot_path}")
        _write(out, "causal.json", pipeline._graph_to_dict(run.graph))
    return 0


def main(argv=None) -> int:
    parser = _build_parser()
    try:
        args = parser.parse_args(argv)
        return _dispatch(args)
    except PipelineStageError as err:
        print(f"error: {err}", file=sys.stderr)
        original = err.original
        if isinstance(original, DataError):
            return 2
        if isinstance(original, NumericalError):
            return 3
        return 1
    except ConfigError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1
    except DataError as err:
        print(f"error: {err}", file=sys.stderr)
        return 2
    except NumericalError as err:
        print(f"error: {err}", file=sys.stderr)
        return 3
    except MediaMixError as err:
        print(f"error: {err}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
