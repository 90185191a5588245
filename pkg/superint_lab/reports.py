"""
Machine-readable experiment reports ("superint-report/1").
"""
import csv
import hashlib
import json
import math
import time
from contextlib import contextmanager
from dataclasses import dataclass, field
from fractions import Fraction
from pathlib import Path
from typing import Any, Optional

import numpy as np

from django.core.serializers.json import DjangoJSONEncoder

from superint_lab.utils import REPORT_SCHEMA, format_float

CHECKS_CSV_HEADER = ("name", "kind", "value", "tolerance", "pass", "informational")


class ReportEncoder(DjangoJSONEncoder):
    """DjangoJSONEncoder that also knows numpy scalars/arrays and fractions."""

    def default(self, o):
        if isinstance(o, np.integer):
            return int(o)
        if isinstance(o, np.floating):
            return float(o)
        if isinstance(o, np.bool_):
            return bool(o)
        if isinstance(o, np.ndarray):
            return o.tolist()
        if isinstance(o, Fraction):
            return "%s/%s" % (o.numerator, o.denominator)
        return super().default(o)


def _finite_or_none(value):
    if isinstance(value, float) and not math.isfinite(value):
        return None
    return value


@dataclass
class Check:
    """
    One verified claim. `informational` checks are reported but do not
    affect the exit status.
    """

    name: str
    value: Any
    passed: bool
    tolerance: Optional[float] = None
    kind: str = "residual"
    informational: bool = False
    details: dict = field(default_factory=dict)

    def as_dict(self):
        return {
            "name": self.name,
            "kind": self.kind,
            "value": _finite_or_none(self.value),
            "tolerance": self.tolerance,
            "pass": bool(self.passed),
            "informational": self.informational,
            "details": self.details,
        }


def below(name, value, tolerance, **kwargs):
    """A check that passes when ``value < tolerance``."""
    value = float(value)
    passed = math.isfinite(value) and value < tolerance
    return Check(name=name, value=value, passed=passed, tolerance=tolerance, **kwargs)


def above(name, value, threshold, **kwargs):
    """A check that passes when ``value > threshold`` (negative controls)."""
    value = float(value)
    return Check(name=name, value=value, passed=value > threshold, tolerance=threshold, **kwargs)


class Report:
    def __init__(self, experiment, config):
        self.experiment = experiment
        self.config = config
        self.checks = []
        self.data = {}
        self.artifacts = []
        self.timings = {}

    def __repr__(self):
        return "<Report %s passed=%s checks=%s>" % (self.experiment, self.passed, len(self.checks))

    def add(self, check):
        self.checks.append(check)
        return check

    @contextmanager
    def timer(self, name):
        start = time.perf_counter()
        try:
            yield
        finally:
            self.timings[name] = time.perf_counter() - start

    @property
    def passed(self):
        return all(check.passed for check in self.checks if not check.informational)

    @property
    def failed_checks(self):
        return [check for check in self.checks if not check.informational and not check.passed]

    def as_dict(self, timings=True):
        result = {
            "schema": REPORT_SCHEMA,
            "experiment": self.experiment,
            "config": self.config,
            "checks": [check.as_dict() for check in self.checks],
            "data": self.data,
            "artifacts": list(self.artifacts),
            "passed": self.passed,
        }
        if timings:
            result["timings"] = self.timings
        return result

    def canonical_json(self):
        """Sorted-key JSON without timing fields; the input of `digest`."""
        return json.dumps(self.as_dict(timings=False), cls=ReportEncoder, sort_keys=True, separators=(",", ":"))

    def digest(self):
        return hashlib.sha256(self.canonical_json().encode("utf-8")).hexdigest()

    def to_json(self):
        result = self.as_dict()
        result["digest"] = self.digest()
        return json.dumps(result, cls=ReportEncoder, sort_keys=True, indent=2)

    def write(self, directory, name=None):
        directory = Path(directory)
        directory.mkdir(parents=True, exist_ok=True)
        path = directory / ("%s.json" % (name or self.experiment))
        path.write_text(self.to_json() + "\n", encoding="utf-8")
        return path

    def write_checks_csv(self, directory):
        """The checks as one CSV row each; registered as an artifact."""
        name = "%s_checks.csv" % self.experiment
        rows = [
            (c.name, c.kind, _finite_or_none(c.value), c.tolerance, bool(c.passed), c.informational)
            for c in self.checks
        ]
        write_csv(Path(directory) / name, CHECKS_CSV_HEADER, rows)
        self.artifacts.append(name)
        return name


def write_csv(path, header, rows):
    """
    CSV with a header row; floats use 17 significant digits and '.' as the
    decimal separator, integers and strings are written as-is.
    """
    path = Path(path)
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", newline="", encoding="utf-8") as handle:
        writer = csv.writer(handle, lineterminator="\n")
        writer.writerow(header)
        for row in rows:
            writer.writerow([format_float(v) if isinstance(v, (float, np.floating)) else v for v in row])
    return path
