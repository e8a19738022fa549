import csv
import json
import math
import pickle
from fractions import Fraction
import numpy as np
import pytest
from app.errors import BadParams, BsError, HypothesisViolated, UndefinedAction
from app.processing.report_builder import build_report, pack_archive, plain, run_name, unpack_archive
from app.task_processing_manager import make_batches, run_batches


def square_sizes(batch):
    index, first, size = batch
    return index, sum(trial * trial for trial in range(first, first + size))


def fail_on_second(batch):
    if batch[0] == 1:
        raise ValueError("boom")
    return batch[2]


def reject_from_third(batch):
    if batch[0] >= 2:
        raise BadParams(f"batch {batch[0]} rejected")
    return batch[2]


def test_make_batches():
    assert make_batches(10, 4) == [(0, 0, 4), (1, 4, 4), (2, 8, 2)]
    assert make_batches(0, 4) == []
    assert sum(size for _, _, size in make_batches(1001, 200)) == 1001


@pytest.mark.parametrize("workers", [1, 3])
def test_run_batches_keeps_batch_order(workers):
    results = run_batches(square_sizes, make_batches(50, 7), workers=workers)
    assert [index for index, _ in results] == list(range(8))
    assert sum(total for _, total in results) == sum(t * t for t in range(50))


def test_run_batches_fails_the_run_on_any_failed_batch():
    with pytest.raises(ValueError, match="boom"):
        run_batches(fail_on_second, make_batches(30, 10))


@pytest.mark.parametrize("workers", [1, 2])
def test_run_batches_reraises_the_lowest_failed_batch(workers):
    with pytest.raises(BadParams, match="batch 2 rejected"):
        run_batches(reject_from_third, make_batches(50, 10), workers=workers)


def test_plain_values():
    assert plain({1: Fraction(7, 20)}) == {"1": "7/20"}
    assert plain((np.int64(3), np.float64(0.5), math.inf, np.bool_(True))) == [3, 0.5, "inf", True]
    assert plain(np.array([1, 2])) == [1, 2]
    assert plain(float("nan")) is None


def test_run_name_depends_only_on_the_seed():
    assert run_name(7) == run_name(7)
    assert len(run_name(7).split("-")) >= 3


def test_build_report(tmp_path):
    config = {"seed": 7, "m": 4, "n": 2, "p_plus": Fraction(7, 20)}
    summary = {"never_return_hat": 0.21, "bound": math.inf}
    rows = [(500, "never_return_hat", 0.21), (500, "bound", 0.2)]
    paths = build_report(str(tmp_path / "out"), "nonmixing", config, summary, rows, archive=True)

    with open(paths["csv"]) as handle:
        read = list(csv.reader(handle))
    assert read[0] == ["k", "statistic", "value"]
    assert read[1] == ["500", "never_return_hat", "0.21"]

    with open(paths["json"]) as handle:
        text = handle.read()
    payload = json.loads(text)
    assert payload["scenario"] == "nonmixing"
    assert payload["config"]["p_plus"] == "7/20"
    assert payload["summary"]["bound"] == "inf"
    assert payload["run_name"] == run_name(7)
    assert text == json.dumps(payload, sort_keys=True, indent=2) + "\n"

    with open(paths["archive"], "rb") as handle:
        archived = unpack_archive(handle.read())
    assert archived["summary"] == payload["summary"]
    assert archived["rows"] == [[500, "never_return_hat", 0.21], [500, "bound", 0.2]]


def test_positional_errors_survive_worker_processes():
    undefined = pickle.loads(pickle.dumps(UndefinedAction(3)))
    assert undefined.prefix_length == 3
    assert str(undefined) == "undefined after prefix of length 3"
    violated = pickle.loads(pickle.dumps(HypothesisViolated(2, "label left the range")))
    assert (violated.index, violated.reason) == (2, "label left the range")


def test_unserializable_archive_is_an_error():
    with pytest.raises(BsError, match="not serializable"):
        pack_archive({"summary": object()})


def test_reports_are_byte_identical_for_equal_inputs(tmp_path):
    first = build_report(str(tmp_path / "a"), "escape", {"seed": 1}, {"x": 0.5}, [(0, "occupancy", 1.0)])
    second = build_report(str(tmp_path / "b"), "escape", {"seed": 1}, {"x": 0.5}, [(0, "occupancy", 1.0)])
    for kind in ("csv", "json"):
        with open(first[kind], "rb") as a, open(second[kind], "rb") as b:
            assert a.read() == b.read()
    assert "archive" not in first
