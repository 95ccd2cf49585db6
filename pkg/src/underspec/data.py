"""Published run-to-run standard deviations of reported metrics."""
from typing import NamedTuple, Optional

from .tasks import Task

# one value used for both methods when nothing better is known
DEFAULT_SEED_SD = 0.01
OBSERVED_RANGE = (0.002, 0.024)


class SeedVarianceRecord(NamedTuple):
    task_kind: Task
    name: str
    n_train: int
    n_test: int
    sigma_indiv: float
    sigma_ensemble: Optional[float]


SEED_VARIANCE_RECORDS = (
    SeedVarianceRecord(Task.SEGMENTATION, "brain tumor", 387, 97, 0.01, None),
    SeedVarianceRecord(Task.SEGMENTATION, "prostate", 32, 16, 0.017, 0.006),
    SeedVarianceRecord(Task.SEGMENTATION, "pancreas", 281, 82, 0.002, 0.001),
    SeedVarianceRecord(Task.CLASSIFICATION, "prostate cancer", 417, 157, 0.010, 0.008),
    SeedVarianceRecord(Task.CLASSIFICATION, "pancreatic cancer", 537, 188, 0.022, 0.012),
    SeedVarianceRecord(Task.CLASSIFICATION, "lymph node 2D", 274, 91, 0.024, 0.005),
    SeedVarianceRecord(Task.CLASSIFICATION, "lymph node 3D", 274, 91, 0.012, 0.005),
)
