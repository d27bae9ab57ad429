"""Shared plumbing for the figure scripts: argument parsing and CSV output."""

import argparse
from pathlib import Path

from ecsqkd.cli import write_csv


def parser(description, step=25.0):
    p = argparse.ArgumentParser(description=description)
    p.add_argument("--out-dir", default="results", help="directory for the CSV files")
    p.add_argument("--L-stop", type=float, default=1100.0)
    p.add_argument("--L-step", type=float, default=step)
    return p


def distances(args):
    n = int(args.L_stop // args.L_step) + 1
    return [i * args.L_step for i in range(n)]


def save(points, out_dir, name):
    path = Path(out_dir)
    path.mkdir(parents=True, exist_ok=True)
    target = path / name
    write_csv(points, str(target), None)
    reach = max((p.L_km for p in points if p.R > 0), default=None)
    print(f"{target}: {len(points)} rows, last positive rate at L = {reach} km")
