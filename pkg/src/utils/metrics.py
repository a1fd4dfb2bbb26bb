from prometheus_client import REGISTRY, Counter, Histogram, write_to_textfile

# Harness Metrics
TRIALS_TOTAL = Counter(
    "regulus_trials_total",
    "Total number of Monte Carlo trials executed",
    ["experiment"],  # tail, simple, audit, sandwich, second_moment
)

TRIAL_SUCCESSES = Counter(
    "regulus_trial_successes_total",
    "Trials whose event of interest occurred",
    ["experiment"],
)

SIMPLE_REJECTIONS = Counter(
    "regulus_simple_rejections_total",
    "Matchings discarded while conditioning on simplicity",
)

EXPERIMENT_DURATION = Histogram(
    "regulus_experiment_duration_seconds",
    "Wall time of a complete experiment",
    ["experiment"],
    buckets=[0.1, 0.5, 1.0, 5.0, 30.0, 120.0, 600.0, 3600.0],
)

TRIAL_BATCH_DURATION = Histogram(
    "regulus_trial_batch_duration_seconds",
    "Wall time of one worker chunk of trials",
    buckets=[0.01, 0.05, 0.1, 0.5, 1.0, 5.0, 30.0],
)

# Exploration Metrics
EXPLORATION_STEPS = Counter(
    "regulus_exploration_steps_total",
    "Step-type (a) transitions performed by traced explorations",
    ["mode"],  # lazy, fixed
)

# Verification Metrics
AUDIT_OUTCOMES = Counter(
    "regulus_audit_outcomes_total",
    "Event audit verdicts",
    ["audit", "status"],  # status: PASS, FAIL, VACUOUS
)

CHECK_VIOLATIONS = Counter(
    "regulus_check_violations_total",
    "Pathwise identity or coupling violations found",
    ["check"],
)


def export_textfile(path: str) -> None:
    """Write the default registry in the Prometheus text format."""
    write_to_textfile(path, REGISTRY)
