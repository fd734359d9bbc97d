"""Batch analytics for information overload in time-binned document streams."""

__version__ = "0.1.0"

from .ingest import (  # noqa: F401
    BinSeries,
    Post,
    WeekKey,
    bin_weekly,
    community_census,
    filter_communities,
    parse_post_line,
    read_posts,
)
from .metrics import (  # noqa: F401
    GiniResult,
    OverloadSeries,
    gini,
    gini_bias_corrected,
    gini_degenerate_approx,
    gini_rewritten,
    overload_series,
    shannon_entropy,
)
from .topics import (  # noqa: F401
    TopicAssignment,
    TopicHistogram,
    fit_topics,
    load_topic_labels,
    reduce_outliers,
    topic_histogram,
    vectorize,
)
from .veracity import (  # noqa: F401
    ClassReport,
    VeracityAssignment,
    classification_report,
    classify,
    fake_fraction,
    load_veracity_labels,
    train_baseline,
)
from .correlate import CorrelationResult, p_value, pearson, run_scheme  # noqa: F401
from .synth import SynthConfig, gen_stream, gen_topic_counts, plant_correlation  # noqa: F401
