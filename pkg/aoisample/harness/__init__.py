from .ExperimentConfig import ExperimentConfig, OUTPUT_FILES, read_config
from .Experiment import ExperimentResult, run_experiment, run_replication
from .Experiment import oracle_reference, replication_seeds, aggregate
from .Experiment import windowed_average_age, write_results, write_traces
