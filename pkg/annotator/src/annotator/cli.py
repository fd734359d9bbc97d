"""Standalone annotation executable: ``iolkit-annotate <job.cfg>``."""

from __future__ import annotations

import argparse
import sys

from .annotate import run_job
from .job import JobError, parse_job_file


def main(argv=None) -> int:
    parser = argparse.ArgumentParser(
        prog="iolkit-annotate",
        description="Label a post dump with transformer-based topics or veracity classes",
    )
    parser.add_argument("job", help="job config file (flat key = value)")
    args = parser.parse_args(argv)
    try:
        job = parse_job_file(args.job)
        output = run_job(job)
    except JobError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    print(f"wrote {output}")
    return 0


if __name__ == "__main__":
    raise SystemExit(main())
