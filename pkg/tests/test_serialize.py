import json

import numpy as np
import pytest

from relureach import PolyUnion, Polytope
from relureach.serialize import (dumps, fmt_float, polytope_from_dict, polytope_to_dict, union_from_dict,
                                 union_to_dict, write_atomic)
from relureach.svg import render


def test_float_formatting():
    assert fmt_float(-0.0) == "0"
    assert fmt_float(0.1) == "0.10000000000000001"
    assert float(fmt_float(1 / 3)) == 1 / 3
    assert dumps({"a": [1.0, -0.0], "b": None, "c": True, "d": "x"}) == (
        '{\n  "a": [1, 0],\n  "b": null,\n  "c": true,\n  "d": "x"\n}')


def test_dumps_is_valid_json_for_nested_arrays():
    obj = {"m": np.array([[1.5, 2.0], [3.0, -4.25]]), "v": np.float64(2.5), "e": []}
    assert json.loads(dumps(obj)) == {"m": [[1.5, 2.0], [3.0, -4.25]], "v": 2.5, "e": []}


def test_polytope_round_trip_keeps_rows_and_vertices():
    P = Polytope([[1.0, 1.0], [-1.0, 0.0], [0.0, -1.0]], [1.0, 0.0, 0.0])
    Q = polytope_from_dict(json.loads(dumps(polytope_to_dict(P))))
    assert np.array_equal(Q.H, P.H) and np.array_equal(Q.b, P.b)
    assert np.array_equal(Q.vertices, P.vertices)
    U = PolyUnion([P, Polytope.box([3, 3], 1)])
    assert dumps(union_to_dict(union_from_dict(json.loads(dumps(union_to_dict(U)))))) == dumps(union_to_dict(U))


def test_write_atomic_leaves_no_temp_file_on_error(tmp_path):
    target = tmp_path / "out.txt"
    write_atomic(target, "first")

    with pytest.raises(TypeError):
        write_atomic(target, 12345)
    assert target.read_text() == "first"
    assert [p.name for p in tmp_path.iterdir()] == ["out.txt"]


def test_svg_render_contract():
    text = render([Polytope.box([0, 0], 1)], [Polytope.box([4, 4], 1)], np.zeros((1, 2, 2)), title="a < b")
    assert text.startswith('<?xml version="1.0"')
    assert "<title>a &lt; b</title>" in text
    assert 'data-xmin="-1.6000000000000001"' in text
    with pytest.raises(ValueError, match="2D plotting only"):
        render([Polytope.box([0, 0, 0], 1)])
