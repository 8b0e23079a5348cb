"""
Command-line front end.

    uoi lasso    --x X.csv --y y.csv [--reps 100] [--out result.json]
    uoi logistic --x X.csv --y y.csv
    uoi cur      --x A.csv --ranks 1,2,3 --cols-per-rank 10
    uoi synth    --n 1200 --p 300 --k 100 --out data/
    uoi sweep    --param b1 --values 1,5,10,20 --n 400 --p 100 --k 33

A ``--config FILE`` of ``key = value`` lines supplies defaults for any flag
(keys use the flag name, with or without dashes); flags given on the command
line win. Exit status: 0 success, 1 usage or configuration error, 2 data
error, 3 every repetition failed.
"""

from __future__ import annotations

import argparse
import logging
import sys
from pathlib import Path
from typing import Optional, Sequence

from .core import UoIConfig
from .exceptions import DataError, InvalidArgumentError
from .experiment import SWEEP_PARAMETERS, ExperimentConfig, NumericalFailure, run_experiment
from .parallel import default_workers
from .resampling import SeedSpec
from .synthetic import GeneratorSpec

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERICAL = 0, 1, 2, 3

log = logging.getLogger("uoi")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _int_list(text: str) -> list[int]:
    try:
        return [int(t) for t in str(text).split(",") if t.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}") from None


def _value_list(text: str) -> list:
    out = []
    for token in (t.strip() for t in str(text).split(",")):
        if not token:
            continue
        for cast in (int, float):
            try:
                out.append(cast(token))
                break
            except ValueError:
                continue
        else:
            out.append(token)
    return out


def _add_uoi_flags(p: argparse.ArgumentParser):
    g = p.add_argument_group("UoI")
    g.add_argument("--b1", type=int, help="selection bootstraps (default 20)")
    g.add_argument("--b2", type=int, help="estimation bootstraps (default 10)")
    g.add_argument("--grid-size", type=int, help="number of penalty values (default 48)")
    g.add_argument("--grid-ratio", type=float, help="smallest / largest penalty (default 1e-3)")
    g.add_argument("--variant", choices=("bolasso", "stability"), help="selection variant (default bolasso)")


def _add_common(p: argparse.ArgumentParser, data_flags=True):
    p.add_argument("--config", help="key = value file supplying flag defaults")
    if data_flags:
        p.add_argument("--x", help="feature matrix CSV")
        p.add_argument("--y", help="response vector CSV")
    p.add_argument("--seed", type=int, help="master seed (default 0)")
    p.add_argument("--workers", type=int, help="worker threads (default $UOI_WORKERS or 1)")
    p.add_argument("--reps", type=int, help="80-10-10 repetitions (default 100)")
    p.add_argument("--out", help="output JSON path (default stdout)")
    p.add_argument("--csv-out", help="per-repetition metric table")
    p.add_argument("--no-baselines", action="store_true", default=None, help="skip the single-fit baselines")
    p.add_argument("-v", "--verbose", action="store_true", default=None)


def _add_generator(p: argparse.ArgumentParser):
    g = p.add_argument_group("synthetic generator")
    g.add_argument("--n", type=int)
    g.add_argument("--p", type=int)
    g.add_argument("--k", type=int)
    g.add_argument("--distribution")
    g.add_argument("--noise-multiplier", type=float)
    g.add_argument("--beta-min", type=float)
    g.add_argument("--beta-max", type=float)
    g.add_argument("--correlation", type=float)


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="uoi", description="Union of Intersections model selection and estimation")
    sub = parser.add_subparsers(dest="command", parser_class=_Parser)
    sub.required = True

    for name, helptext in (("lasso", "sparse linear regression"), ("logistic", "sparse binary classification")):
        p = sub.add_parser(name, help=helptext)
        _add_common(p)
        _add_uoi_flags(p)

    p = sub.add_parser("cur", help="column subset selection")
    _add_common(p)
    p.add_argument("--ranks", type=_int_list, help="comma-separated ranks (default 1,2,3,4,5)")
    p.add_argument("--cols-per-rank", type=int, help="columns sampled per rank and bootstrap (default 15)")
    p.add_argument("--b1", type=int, help="row bootstraps (default 20)")

    p = sub.add_parser("synth", help="write a synthetic regression problem")
    p.add_argument("--config")
    p.add_argument("--seed", type=int)
    p.add_argument("--out", help="output directory (default .)")
    p.add_argument("-v", "--verbose", action="store_true", default=None)
    _add_generator(p)

    p = sub.add_parser("sweep", help="repeat the regression protocol over a parameter")
    _add_common(p, data_flags=False)
    _add_uoi_flags(p)
    _add_generator(p)
    p.add_argument("--param", choices=SWEEP_PARAMETERS)
    p.add_argument("--values", type=_value_list, help="comma-separated values")
    return parser


def read_config_file(path) -> dict:
    """Parse ``key = value`` lines; ``#`` starts a comment."""
    out = {}
    try:
        lines = Path(path).read_text(encoding="utf-8").splitlines()
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc.strerror}") from None
    for lineno, raw in enumerate(lines, 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise UsageError(f"{path}:{lineno}: expected 'key = value'")
        key, value = (part.strip() for part in line.split("=", 1))
        out[key.lstrip("-").replace("-", "_")] = value
    return out


def _merge(args: argparse.Namespace, parser: argparse.ArgumentParser) -> argparse.Namespace:
    """Fill unset flags from the config file, converting with each flag's own type."""
    if not getattr(args, "config", None):
        return args
    sub = parser._subparsers._group_actions[0].choices[args.command]
    actions = {a.dest: a for a in sub._actions}
    for key, text in read_config_file(args.config).items():
        action = actions.get(key)
        if action is None or key in ("config", "help"):
            raise UsageError(f"{args.config}: unknown key {key!r} for '{args.command}'")
        if getattr(args, key) is not None:
            continue
        if isinstance(action, argparse._StoreTrueAction):
            value = text.lower() in ("1", "true", "yes", "on")
        elif action.type is not None:
            try:
                value = action.type(text)
            except (ValueError, argparse.ArgumentTypeError):
                raise UsageError(f"{args.config}: bad value for {key!r}: {text!r}") from None
        else:
            value = text
        if action.choices is not None and value not in action.choices:
            raise UsageError(f"{args.config}: {key} must be one of {list(action.choices)}")
        setattr(args, key, value)
    return args


def _pick(args, name, default):
    value = getattr(args, name, None)
    return default if value is None else value


def _uoi_config(args) -> UoIConfig:
    return UoIConfig(
        b1=_pick(args, "b1", 20),
        b2=_pick(args, "b2", 10),
        n_lambdas=_pick(args, "grid_size", 48),
        lambda_ratio=_pick(args, "grid_ratio", 1e-3),
        selection_variant=_pick(args, "variant", "bolasso"),
        seed=SeedSpec(_pick(args, "seed", 0)),
    )


def _generator(args) -> GeneratorSpec:
    base = GeneratorSpec()
    fields = ("n", "p", "k", "distribution", "noise_multiplier", "beta_min", "beta_max", "correlation")
    kwargs = {f: _pick(args, f, getattr(base, f)) for f in fields}
    return GeneratorSpec(seed=SeedSpec(_pick(args, "seed", 0)), **kwargs)


def experiment_config(args) -> ExperimentConfig:
    cmd = args.command
    workers = _pick(args, "workers", default_workers())
    common = dict(
        task=cmd,
        uoi=_uoi_config(args),
        out=getattr(args, "out", None),
        csv_out=getattr(args, "csv_out", None),
        repetitions=_pick(args, "reps", 100),
        workers=workers,
        baselines=not _pick(args, "no_baselines", False),
    )
    if cmd in ("lasso", "logistic"):
        return ExperimentConfig(x_path=args.x, y_path=args.y, **common)
    if cmd == "cur":
        return ExperimentConfig(
            x_path=args.x,
            ranks=_pick(args, "ranks", [1, 2, 3, 4, 5]),
            cols_per_rank=_pick(args, "cols_per_rank", 15),
            **common,
        )
    if cmd == "synth":
        common["out"] = _pick(args, "out", ".")
        return ExperimentConfig(generator=_generator(args), **common)
    if args.param is None or not args.values:
        raise UsageError("sweep needs --param and --values")
    return ExperimentConfig(
        generator=_generator(args), sweep_parameter=args.param, sweep_values=args.values, **common
    )


def main(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = _merge(parser.parse_args(argv), parser)
        logging.basicConfig(
            level=logging.INFO if getattr(args, "verbose", None) else logging.WARNING,
            format="%(levelname)s %(message)s",
        )
        config = experiment_config(args)
        record = run_experiment(config)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except DataError as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except InvalidArgumentError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except NumericalFailure as exc:
        print(f"numerical failure: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    if config.task == "synth":
        for path in record.files:
            log.info("wrote %s", path)
    elif not config.out:
        sys.stdout.write(record.to_json())
    if record.n_failed:
        log.warning("%d repetition(s) failed and were excluded from aggregates", record.n_failed)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
