"""Transformer-backed labeling adapter for the iolkit interchange formats."""

__version__ = "0.1.0"

from .annotate import annotate_topics, annotate_veracity, run_job  # noqa: F401
from .job import AnnotationJob, JobError, parse_job_file  # noqa: F401
