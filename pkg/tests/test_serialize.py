import json
import math

import numpy as np
from hypothesis import given
from hypothesis import strategies as st

from biwarp.serialize import csv_text, dumps


def test_special_values():
    text = dumps({"a": -0.0, "b": math.nan, "c": math.inf, "d": np.float64(0.1), "e": np.int64(3), "f": True})
    assert json.loads(text) == {"a": 0, "b": None, "c": None, "d": 0.1, "e": 3, "f": True}
    assert '"a": 0,' in text


def test_arrays_and_nesting():
    obj = {"m": np.eye(2), "rows": [{"x": 1.5}], "empty": [], "none": None, "tuple": (1, 2)}
    assert json.loads(dumps(obj)) == {"m": [[1, 0], [0, 1]], "rows": [{"x": 1.5}], "empty": [], "none": None,
                                      "tuple": [1, 2]}  # fmt: skip


JSONISH = st.recursive(
    st.one_of(st.none(), st.booleans(), st.integers(-(10**9), 10**9), st.floats(allow_nan=False, allow_infinity=False),
              st.text(max_size=8)),
    lambda kids: st.one_of(st.lists(kids, max_size=4), st.dictionaries(st.text(max_size=5), kids, max_size=4)),
    max_leaves=15,
)  # fmt: skip


@given(JSONISH)
def test_round_trip_exact(obj):
    text = dumps(obj)
    assert json.loads(text) == json.loads(json.dumps(obj))
    assert dumps(json.loads(text)) == text


def test_csv_round_trip():
    body = csv_text(["u", "lhs"], [(1.0, 0.1 + 0.2), (2.0, 1 / 3)])
    lines = body.splitlines()
    assert lines[0] == "u,lhs"
    assert float(lines[1].split(",")[1]) == 0.1 + 0.2
    assert float(lines[2].split(",")[1]) == 1 / 3
