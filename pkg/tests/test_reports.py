import json
import math
from fractions import Fraction

import numpy as np

from superint_lab.reports import Check, Report, ReportEncoder, above, below, write_csv


def make_report():
    report = Report("verify", {"system": {"family": "ttw", "params": {"n": 1, "k": 1.0}}})
    report.add(below("bracket[H1]", 1e-14, 1e-10))
    report.add(below("candidate[I3]", 0.3, 1e-10, informational=True))
    report.data["pairwise"] = np.array([[0.0, 1.5], [1.5, 0.0]])
    return report


def test_encoder_handles_numpy_and_fractions():
    encoded = json.dumps(
        {"i": np.int64(3), "f": np.float64(0.5), "b": np.bool_(True), "a": np.arange(3), "q": Fraction(-1, 27)},
        cls=ReportEncoder,
        sort_keys=True,
    )
    assert json.loads(encoded) == {"a": [0, 1, 2], "b": True, "f": 0.5, "i": 3, "q": "-1/27"}


def test_checks():
    assert below("x", 0.5, 1.0).passed
    assert not below("x", 1.0, 1.0).passed
    assert not below("x", math.nan, 1.0).passed
    assert above("x", 0.5, 1e-2).passed
    check = Check(name="x", value=math.inf, passed=False)
    assert check.as_dict()["value"] is None
    assert check.as_dict()["pass"] is False


def test_informational_checks_do_not_fail_the_report():
    report = make_report()
    assert report.passed
    report.add(below("bracket[H3]", 1.0, 1e-10))
    assert not report.passed
    assert [check.name for check in report.failed_checks] == ["bracket[H3]"]


def test_digest_ignores_timings():
    first, second = make_report(), make_report()
    with first.timer("brackets"):
        sum(range(1000))
    second.timings["brackets"] = 123.0
    assert first.timings["brackets"] >= 0.0
    assert first.digest() == second.digest()
    assert "timings" not in first.canonical_json()
    second.add(below("rank", 0.0, 1.0))
    assert first.digest() != second.digest()


def test_write(tmp_path):
    report = make_report()
    path = report.write(tmp_path / "out")
    assert path.name == "verify.json"
    content = json.loads(path.read_text())
    assert content["schema"] == "superint-report/1"
    assert content["digest"] == report.digest()
    assert content["passed"] is True
    assert content["checks"][1]["informational"] is True
    assert content["data"]["pairwise"] == [[0.0, 1.5], [1.5, 0.0]]


def test_write_csv(tmp_path):
    path = write_csv(tmp_path / "table.csv", ["sigma", "value"], [(0, 0.1), (1, np.float64(1 / 3))])
    assert path.read_text().splitlines() == [
        "sigma,value",
        "0,0.10000000000000001",
        "1,0.33333333333333331",
    ]
