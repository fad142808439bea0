"""Command-line entry point: ``anharm-om <scenario> [--config FILE] [--set k=v] [--out DIR] [--workers N]``.

Exit codes: 0 success, 1 at least one grid point (or validation check)
failed, 2 invalid configuration.
"""

from __future__ import annotations

import argparse
import logging
import os
import sys

from .config import SCENARIOS, ConfigError, load_config
from .output import json_text, write_atomic
from .scenarios import run_scenario

log = logging.getLogger("anharm_om")

EXIT_OK, EXIT_PARTIAL, EXIT_CONFIG = 0, 1, 2


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="anharm-om",
        description="Anharmonic molecular optomechanics: rate-ladder sweeps, lasing maps and oracle checks.",
    )
    p.add_argument("scenario", choices=SCENARIOS)
    p.add_argument("--config", metavar="PATH", help="INI file with [morse], [optics], [drive], [bath], [sweep], [lasing]")
    p.add_argument(
        "--set",
        dest="overrides",
        action="append",
        default=[],
        metavar="SECTION.KEY=VALUE",
        help="override one config field (repeatable)",
    )
    p.add_argument("--out", default=".", metavar="DIR", help="output directory (default: current)")
    p.add_argument("--workers", type=int, default=None, help="worker processes (default: $ANHARM_OM_WORKERS or 1)")
    p.add_argument("-v", "--verbose", action="store_true")
    return p


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING, format="%(levelname)s: %(message)s")
    try:
        cfg = load_config(args.scenario, args.config, args.overrides, args.out, args.workers)
    except ConfigError as exc:
        for line in exc.problems:
            print(f"config error: {line}", file=sys.stderr)
        return EXIT_CONFIG

    log.info("running %s with %d worker(s)", cfg.name, cfg.workers)
    out = run_scenario(cfg)
    stem = cfg.name.replace("-", "_")
    for name, text in sorted(out.files.items()):
        write_atomic(os.path.join(cfg.out_dir, name), text)
    write_atomic(os.path.join(cfg.out_dir, f"{stem}_summary.json"), json_text(out.summary))
    if out.report:
        print(out.report)
    if out.failures:
        print(f"{cfg.name}: {out.failures} failed point(s); see {stem}_summary.json", file=sys.stderr)
        return EXIT_PARTIAL
    return EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
