import json

import pytest

from centralab.errors import BatchConfigError
from centralab.experiments import (
    BatchConfig,
    batch_run,
    enumerate_instances,
    expected_containment,
)
from centralab.io import emit_report, write_matrix
from centralab.numlin import ToleranceConfig


class TestConfig:
    def test_type_m_needs_m(self):
        with pytest.raises(BatchConfigError, match="requires m"):
            BatchConfig(family="random-type-m", sizes=(3,))

    def test_type_m_size_floor(self):
        with pytest.raises(BatchConfigError, match="n ≥ m\\+1"):
            BatchConfig(family="random-type-m", sizes=(2, 4), m=2)

    def test_empty_sizes(self):
        with pytest.raises(BatchConfigError):
            BatchConfig(family="random-generic", sizes=())

    def test_empty_grid(self):
        with pytest.raises(BatchConfigError):
            BatchConfig(family="random-generic", sizes=(2,), kl_grid=())

    @pytest.mark.parametrize("grid", [((0, 1),), ((1,),), ((1, 2, 3),)])
    def test_bad_grid(self, grid):
        with pytest.raises(BatchConfigError):
            BatchConfig(family="random-generic", sizes=(2,), kl_grid=grid)

    def test_unknown_family(self):
        with pytest.raises(BatchConfigError, match="family"):
            BatchConfig(family="random-unitary", sizes=(2,))

    def test_from_dict(self, tmp_path):
        doc = {"family": "random-normal", "sizes": [2, 3], "kl_grid": [[1, 2]], "seeds": [4],
               "tolerances": {"containment_tol": 1e-6}}
        cfg = BatchConfig.from_dict(doc)
        assert cfg.kl_grid == ((1, 2),)
        assert cfg.tolerances == ToleranceConfig(containment_tol=1e-6)

    def test_from_dict_rejects_unknown_fields(self):
        with pytest.raises(BatchConfigError, match="unknown"):
            BatchConfig.from_dict({"family": "random-normal", "sizes": [2], "colour": "red"})

    def test_load_errors(self, tmp_path):
        with pytest.raises(BatchConfigError):
            BatchConfig.load(tmp_path / "none.json")
        (tmp_path / "bad.json").write_text("{")
        with pytest.raises(BatchConfigError):
            BatchConfig.load(tmp_path / "bad.json")

    def test_echo_omits_scheduling(self):
        cfg = BatchConfig(family="random-generic", sizes=(2,), threads=4, output_path="x.json")
        assert "threads" not in cfg.echo() and "output_path" not in cfg.echo()


class TestLabels:
    def test_type_m_threshold(self):
        assert expected_containment("random-type-m", 1, 3, 3) == "smiley"
        assert expected_containment("random-type-m", 1, 1, 3) == "smiley"
        assert expected_containment("random-type-m", 1, 2, 2) == "exploratory"
        assert expected_containment("random-type-m", 2, 5, 5) == "smiley"
        assert expected_containment("random-type-m", 2, 3, 3) == "exploratory"

    def test_classical(self):
        assert expected_containment("random-generic", None, 2, 2) == "proper"
        assert expected_containment("shift-truncation", None, 1, 3) == "proper"
        assert expected_containment("random-normal", None, 3, 2) == "exploratory"


def test_enumeration_order():
    cfg = BatchConfig(family="random-generic", sizes=(2, 3), kl_grid=((1, 1), (2, 2)),
                      seeds=(7, 8))
    got = [(i.index, i.n, i.seed, i.k) for i in enumerate_instances(cfg)]
    assert got == [(0, 2, 7, 1), (1, 2, 7, 2), (2, 2, 8, 1), (3, 2, 8, 2),
                   (4, 3, 7, 1), (5, 3, 7, 2), (6, 3, 8, 1), (7, 3, 8, 2)]


def test_shift_family_ignores_seeds():
    cfg = BatchConfig(family="shift-truncation", sizes=(3, 4), seeds=(1, 2, 3))
    assert len(enumerate_instances(cfg)) == 2


def test_empty_instance_list():
    report = batch_run(BatchConfig(family="explicit-files", inputs=()))
    assert report.instances == []
    assert all(v == 0 for v in report.aggregate.values())


def test_type_m_family_all_smiley():
    cfg = BatchConfig(family="random-type-m", sizes=(2, 3, 4, 5, 6), m=1,
                      kl_grid=((3, 3), (1, 3), (2, 3)), seeds=(0, 1))
    report = batch_run(cfg)
    assert report.aggregate["asserted"] == report.aggregate["total"] == 30
    assert report.aggregate["asserted_failed"] == 0
    assert all(r["verdicts"]["is_smiley"] for r in report.instances)


def test_type_m_two():
    cfg = BatchConfig(family="random-type-m", sizes=(3, 5), m=2, kl_grid=((5, 5),), seeds=(0,))
    assert batch_run(cfg).aggregate["asserted_passed"] == 2


def test_explicit_files(tmp_path):
    import numpy as np
    write_matrix(np.diag([1.0, 2.0]), tmp_path / "d.json")
    write_matrix(np.array([[0, 0], [1, 0]]), tmp_path / "j.json")
    (tmp_path / "cfg.json").write_text(json.dumps({
        "family": "explicit-files", "inputs": ["d.json", "j.json", "missing.json"],
        "kl_grid": [[1, 1]]}))
    cfg = BatchConfig.load(tmp_path / "cfg.json")
    report = batch_run(cfg)
    rows = report.instances
    assert [r["n"] for r in rows] == [2, 2, None]
    assert rows[2]["error"].startswith("MissingMatrixFileError")
    assert report.aggregate["errors"] == 1
    assert report.aggregate["asserted_passed"] == 2


def test_per_instance_errors_do_not_abort(tmp_path):
    cfg = BatchConfig(family="random-generic", sizes=(2,), kl_grid=((1, 1), (7, 7)), seeds=(0,))
    report = batch_run(cfg)
    assert len(report.instances) == 2
    assert report.aggregate["errors"] == 0


@pytest.mark.parametrize("threads", [2, 3, 8])
def test_thread_count_does_not_change_bytes(threads):
    cfg = BatchConfig(family="random-type-m", sizes=(3, 4), m=1,
                      kl_grid=((1, 1), (3, 3), (3, 1)), seeds=(0, 1, 2))
    assert emit_report(batch_run(cfg, threads=1)) == emit_report(batch_run(cfg, threads=threads))


def test_timing_is_off_by_default():
    cfg = BatchConfig(family="random-normal", sizes=(2,), seeds=(0,))
    report = batch_run(cfg)
    assert report.runtime_ms is None
    assert "runtime_ms" not in report.instances[0]
