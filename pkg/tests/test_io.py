import json
from importlib import resources

import jsonschema
import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra.numpy import arrays

from centralab.errors import (
    MalformedMatrixFileError,
    MatrixFileError,
    MissingMatrixFileError,
    NonFiniteMatrixError,
    RaggedMatrixError,
)
from centralab.experiments import BatchConfig, ExperimentReport, batch_run
from centralab.io import canonical_dumps, emit_report, parse_matrix, write_matrix


def _write(tmp_path, doc, name="m.json"):
    p = tmp_path / name
    p.write_text(doc if isinstance(doc, str) else json.dumps(doc))
    return p


@pytest.fixture(scope="module")
def schema():
    text = resources.files("centralab").joinpath("schemas/report.schema.json").read_text()
    return json.loads(text)


class TestParse:
    def test_jordan(self, tmp_path):
        p = _write(tmp_path, {"n": 2, "re": [[0, 0], [1, 0]], "im": [[0, 0], [0, 0]]})
        assert np.array_equal(parse_matrix(p), [[0, 0], [1, 0]])

    def test_scalar(self, tmp_path):
        A = parse_matrix(_write(tmp_path, {"n": 1, "re": [[5]], "im": [[0]]}))
        assert A.shape == (1, 1) and A[0, 0] == 5 and A.dtype == np.complex128

    def test_complex(self, tmp_path):
        A = parse_matrix(_write(tmp_path, {"n": 1, "re": [[1.5]], "im": [[-2]]}))
        assert A[0, 0] == 1.5 - 2j

    def test_ragged(self, tmp_path):
        p = _write(tmp_path, {"n": 2, "re": [[0]], "im": [[0, 0], [0, 0]]})
        with pytest.raises(RaggedMatrixError, match="row lengths"):
            parse_matrix(p)

    def test_missing(self, tmp_path):
        with pytest.raises(MissingMatrixFileError, match="no such matrix file"):
            parse_matrix(tmp_path / "absent.json")

    @pytest.mark.parametrize("doc", [
        "not json",
        "[1, 2]",
        {"n": 2, "re": [[1, 0], [0, 1]]},
        {"n": 0, "re": [], "im": []},
        {"n": "2", "re": [[1, 0], [0, 1]], "im": [[0, 0], [0, 0]]},
        {"n": 1, "re": [["a"]], "im": [[0]]},
        {"n": 1, "re": 5, "im": [[0]]},
    ])
    def test_malformed(self, tmp_path, doc):
        with pytest.raises(MalformedMatrixFileError):
            parse_matrix(_write(tmp_path, doc))

    @pytest.mark.parametrize("token", ["NaN", "Infinity", "-Infinity", "1e400"])
    def test_non_finite(self, tmp_path, token):
        p = _write(tmp_path, '{"n": 1, "re": [[%s]], "im": [[0]]}' % token)
        with pytest.raises(NonFiniteMatrixError, match="non-finite"):
            parse_matrix(p)

    def test_error_messages_are_distinct(self, tmp_path):
        docs = [
            tmp_path / "absent.json",
            _write(tmp_path, "{", "a.json"),
            _write(tmp_path, {"n": 2, "re": [[0]], "im": [[0]]}, "b.json"),
            _write(tmp_path, '{"n": 1, "re": [[NaN]], "im": [[0]]}', "c.json"),
        ]
        kinds = set()
        for p in docs:
            with pytest.raises(MatrixFileError) as info:
                parse_matrix(p)
            kinds.add(type(info.value))
        assert len(kinds) == 4


finite = st.floats(allow_nan=False, allow_infinity=False, width=64)


@settings(max_examples=50, deadline=None)
@given(arrays(np.float64, st.tuples(st.integers(1, 4)).map(lambda t: (t[0], t[0])), elements=finite),
       st.data())
def test_write_parse_round_trip_is_bit_exact(tmp_path_factory, re, data):
    im = data.draw(arrays(np.float64, re.shape, elements=finite))
    A = np.empty(re.shape, dtype=np.complex128)
    A.real, A.imag = re, im
    p = tmp_path_factory.mktemp("rt") / "a.json"
    write_matrix(A, p)
    B = parse_matrix(p)
    assert B.tobytes() == A.tobytes()


@pytest.mark.parametrize("re,im", [(-0.0, 0.0), (0.0, -0.0), (-0.0, -0.0)])
def test_signed_zeros_survive(tmp_path, re, im):
    A = np.empty((1, 1), dtype=np.complex128)
    A.real, A.imag = re, im
    write_matrix(A, tmp_path / "z.json")
    assert parse_matrix(tmp_path / "z.json").tobytes() == A.tobytes()


def test_write_rejects_non_finite(tmp_path):
    with pytest.raises(ValueError):
        write_matrix(np.array([[np.nan]]), tmp_path / "x.json")


class TestCanonical:
    def test_sorted_keys_and_precision(self):
        assert canonical_dumps({"b": 0.1, "a": [1, True, None]}) == \
            '{"a":[1,true,null],"b":0.10000000000000001}'

    def test_numpy_scalars(self):
        assert canonical_dumps([np.float64(0.5), np.int64(3), np.bool_(False)]) == "[0.5,3,false]"

    def test_non_finite_rejected(self):
        with pytest.raises(ValueError):
            canonical_dumps({"x": float("inf")})

    def test_unknown_type(self):
        with pytest.raises(TypeError):
            canonical_dumps({"x": object()})

    @settings(max_examples=100, deadline=None)
    @given(finite)
    def test_float_round_trip(self, x):
        assert json.loads(canonical_dumps(x)) == x


class TestEmit:
    def test_empty_report(self, schema):
        doc = json.loads(emit_report(ExperimentReport.empty()))
        assert doc["instances"] == []
        assert all(v == 0 for v in doc["aggregate"].values())
        jsonschema.validate(doc, schema)

    def test_identical_bytes(self, tmp_path):
        cfg = BatchConfig(family="random-generic", sizes=(2,), kl_grid=((1, 1),), seeds=(0,))
        report = batch_run(cfg)
        emit_report(report, path=tmp_path / "a.json")
        emit_report(report, path=tmp_path / "b.json")
        assert (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()

    def test_schema_valid_with_certificate(self, schema):
        cfg = BatchConfig(family="random-type-m", sizes=(3,), m=1, kl_grid=((3, 3), (1, 1)),
                          seeds=(2,), record_timing=True)
        doc = json.loads(emit_report(batch_run(cfg)))
        jsonschema.validate(doc, schema)
        assert doc["runtime_ms"] is not None

    def test_schema_rejects_garbage(self, schema):
        with pytest.raises(jsonschema.ValidationError):
            jsonschema.validate({"version": "0.1.0"}, schema)
