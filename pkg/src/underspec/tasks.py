from enum import Enum

from .errors import UsageError

_ALIASES = {"seg": "segmentation", "clf": "classification"}


class Task(str, Enum):
    SEGMENTATION = "segmentation"
    CLASSIFICATION = "classification"

    @classmethod
    def parse(cls, name):
        if isinstance(name, cls):
            return name
        key = str(name).strip().lower()
        try:
            return cls(_ALIASES.get(key, key))
        except ValueError:
            raise UsageError(f"unknown task {name!r}; expected seg or clf") from None

    @property
    def short(self):
        return "seg" if self is Task.SEGMENTATION else "clf"
