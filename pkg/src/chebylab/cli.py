"""Command-line runner for the registered experiments.

Usage::

    chebylab list
    chebylab run golden-faber --output-dir out
    chebylab run config.json --seed 3 --threads 2

Exit codes: 0 all assertions passed, 1 an assertion failed, 2 bad config,
3 internal fault.
"""
from __future__ import annotations

import argparse
import json
import os
import platform
import sys
import time
import traceback
from pathlib import Path

import numpy as np
import scipy
from threadpoolctl import threadpool_limits

from . import __version__
from .experiments import ConfigError, ExperimentConfig, list_experiments, names, run_experiment

EXIT_OK, EXIT_ASSERT, EXIT_CONFIG, EXIT_FAULT = 0, 1, 2, 3
THREADS_ENV = "CHEBYLAB_THREADS"


def load_config(target):
    """A registered name or the path of a JSON config file."""
    if target in names():
        return ExperimentConfig.from_dict({"experiment": target})
    path = Path(target)
    if not path.is_file():
        raise ConfigError(f"{target!r} is neither a config file nor a registered experiment; registered: {', '.join(names())}")
    try:
        data = json.loads(path.read_text())
    except json.JSONDecodeError as exc:
        raise ConfigError(f"cannot parse {target}: {exc}") from exc
    return ExperimentConfig.from_dict(data)


def resolve_threads(flag):
    """The ``--threads`` flag wins over the environment; ``None`` means no limit."""
    if flag is not None:
        return flag
    env = os.environ.get(THREADS_ENV)
    if env is None or env == "":
        return None
    try:
        val = int(env)
    except ValueError as exc:
        raise ConfigError(f"{THREADS_ENV} must be an integer, got {env!r}") from exc
    if val < 1:
        raise ConfigError(f"{THREADS_ENV} must be positive")
    return val


def write_outputs(out_dir, result, manifest):
    # single writer: every file goes through here, in sorted order
    out_dir.mkdir(parents=True, exist_ok=True)
    for name in sorted(result.tables):
        with open(out_dir / name, "w", newline="", encoding="utf-8") as fh:
            fh.write(result.tables[name])
    with open(out_dir / "manifest.json", "w", encoding="utf-8") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def run(cfg, threads=None, stream=None):
    """Execute one experiment and write its artifacts; returns the exit code."""
    stream = stream or sys.stdout
    out_dir = Path(cfg.output_dir)
    t0 = time.perf_counter()
    with threadpool_limits(limits=threads):
        result = run_experiment(cfg)
    wall = time.perf_counter() - t0
    failed = [a for a in result.assertions if not a["passed"]]
    manifest = {
        "config": cfg.to_dict(),
        "versions": {
            "chebylab": __version__,
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "python": platform.python_version(),
        },
        "threads": threads,
        "wall_time_s": wall,
        "outputs": sorted(result.tables),
        "assertions": result.assertions,
        "cells": result.cells,
        "passed": not failed,
    }
    write_outputs(out_dir, result, manifest)
    n_ok = len(result.assertions) - len(failed)
    print(f"{cfg.experiment}: {n_ok}/{len(result.assertions)} assertions passed, {len(result.tables)} files in {out_dir}", file=stream)
    for a in failed:
        print(f"  FAIL {a['name']} {a['detail']}", file=stream)
    return EXIT_ASSERT if failed else EXIT_OK


def build_parser():
    p = argparse.ArgumentParser(prog="chebylab", description="Chebyshev polynomial experiments")
    sub = p.add_subparsers(dest="command", required=True)
    r = sub.add_parser("run", help="run an experiment by name or JSON config")
    r.add_argument("config", help="config path or registered experiment name")
    r.add_argument("--output-dir", help="override the config output_dir")
    r.add_argument("--seed", type=int, help="override the config seed")
    r.add_argument("--threads", type=int, help=f"BLAS thread limit (overrides ${THREADS_ENV})")
    sub.add_parser("list", help="list registered experiments")
    return p


def main(argv=None):
    args = build_parser().parse_args(argv)
    if args.command == "list":
        width = max(len(n) for n in names())
        for name, desc in list_experiments():
            print(f"{name:<{width}}  {desc}")
        return EXIT_OK
    try:
        cfg = load_config(args.config)
        if args.output_dir is not None:
            cfg.output_dir = args.output_dir
        if args.seed is not None:
            cfg.seed = args.seed
        if args.threads is not None and args.threads < 1:
            raise ConfigError("--threads must be positive")
        threads = resolve_threads(args.threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    try:
        return run(cfg, threads)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except Exception:
        traceback.print_exc()
        return EXIT_FAULT


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
