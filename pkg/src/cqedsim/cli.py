"""Command-line entry point: ``cqedsim {baseline,chevron,readout,spectrum} --config FILE``.

Exit codes: 0 success, 2 configuration error, 3 numerical-contract error.
"""

from __future__ import annotations

import argparse
import logging
import sys

from . import experiments
from .config import load_config
from .errors import ConfigError, ContractError, CQEDError

log = logging.getLogger("cqedsim")

EXIT_OK, EXIT_CONFIG, EXIT_NUMERICAL = 0, 2, 3


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="cqedsim", description="Transmon-resonator simulations")
    parser.add_argument("-v", "--verbose", action="store_true")
    sub = parser.add_subparsers(dest="command", required=True)
    for name, text in (
        ("baseline", "coupled / uncoupled / dissipative single-photon exchange"),
        ("chevron", "vacuum Rabi chevron over a detuning sweep"),
        ("readout", "dispersive reflection sweep and conditioned cavity trajectories"),
        ("spectrum", "charge-basis transmon frequencies over an E_J/E_C sweep"),
    ):
        p = sub.add_parser(name, help=text)
        p.add_argument("--config", required=True, help="experiment configuration file")
        p.add_argument("--out", default=None, help="output directory (default: output.directory, else ./out)")
        p.add_argument("--format", choices=("csv", "json"), default=None)
        p.add_argument("--threads", type=int, default=None, help="worker threads for sweeps (default: all)")
    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(message)s")
    try:
        cfg = load_config(args.config)
        out = args.out or cfg.output.directory
        fmt = args.format or cfg.output.format
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be >= 1")
        if args.command == "baseline":
            experiments.run_baseline(cfg, out, fmt)
        elif args.command == "chevron":
            experiments.run_chevron(cfg, out, fmt, args.threads)
        elif args.command == "readout":
            experiments.run_readout(cfg, out, fmt)
        else:
            experiments.run_transmon_spectrum(cfg, out, fmt)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ContractError, CQEDError) as exc:
        print(f"numerical contract error: {exc}", file=sys.stderr)
        return EXIT_NUMERICAL
    log.info("wrote %s output to %s", args.command, out)
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
