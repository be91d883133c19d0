"""Command line entry point ``wavepacket-lab``.

Usage::

    wavepacket-lab <experiment> [--config PATH] [--seed N] [--out PATH]
                                [--workers N] [--check]
    wavepacket-lab defaults [experiment]

Exit codes: 0 on success, 2 on a configuration or precondition failure, 3 on
a failed acceptance check when ``--check`` is given.
"""

import argparse
import sys
from pathlib import Path

import yaml

from .config import EXPERIMENTS, ConfigError, defaults, load_config, make_config

EXIT_OK, EXIT_PRECONDITION, EXIT_CHECK = 0, 2, 3


def _parser():
    parser = argparse.ArgumentParser(
        prog="wavepacket-lab",
        description="Run radial wave-packet and radial wave-solver scaling experiments.")
    sub = parser.add_subparsers(dest="command", required=True)
    d = sub.add_parser("defaults", help="print default settings as YAML")
    d.add_argument("experiment", nargs="?", choices=EXPERIMENTS)
    for name in EXPERIMENTS:
        p = sub.add_parser(name, help=f"run the {name} experiment")
        p.add_argument("--config", help="YAML file of settings overriding the defaults")
        p.add_argument("--seed", type=int, help="override the seed")
        p.add_argument("--out", help="CSV output path; the JSON summary goes next to it "
                                     "(default: <experiment>.csv)")
        p.add_argument("--workers", type=int, default=1, help="worker processes")
        p.add_argument("--check", action="store_true",
                       help="exit with status 3 if any acceptance check fails")
    return parser


def main(argv=None):
    args = _parser().parse_args(argv)
    if args.command == "defaults":
        names = [args.experiment] if args.experiment else list(EXPERIMENTS)
        out = {n: defaults(n) for n in names}
        sys.stdout.write(yaml.safe_dump(out[names[0]] if args.experiment else out,
                                        sort_keys=True))
        return EXIT_OK

    from .experiments import run

    try:
        cfg = load_config(args.config, args.command) if args.config else make_config(args.command)
        if args.seed is not None:
            if "seed" not in cfg.settings:
                raise ConfigError(f"seed: {args.command} is not randomized")
            cfg.settings["seed"] = args.seed
        report = run(cfg, workers=args.workers)
    except (ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_PRECONDITION

    csv_path = Path(args.out or f"{args.command}.csv")
    if csv_path.parent and not csv_path.parent.exists():
        csv_path.parent.mkdir(parents=True)
    json_path = csv_path.with_suffix(".json")
    report.write(csv_path, json_path, cfg.as_dict())
    status = "passed" if report.passed else "FAILED"
    print(f"{args.command}: {len(report.rows)} rows -> {csv_path}; checks {status}")
    for name, ok in sorted(report.checks.items()):
        print(f"  {'ok  ' if ok else 'FAIL'} {name}")
    if args.check and not report.passed:
        return EXIT_CHECK
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
