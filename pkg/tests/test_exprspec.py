import numpy as np
import pytest

from cauchys3.exprspec import ParseError, parse_field_spec, parse_poly_expr
from cauchys3.frame import random_points


def test_parse_constants_and_coordinates():
    p = parse_poly_expr("3")
    assert p(np.array([0.0, 0, 0, 1])) == 3.0
    p = parse_poly_expr("a1")
    assert p(np.array([0.25, 0, 0, 0])) == 0.25
    p = parse_poly_expr("a4^2")
    assert p(np.array([0.0, 0, 0, 0.5])) == 0.25


def test_parse_arithmetic():
    pts = random_points(20, seed=3)
    p = parse_poly_expr("a1^2 + a2^2 - a3^2 - a4^2")
    expected = pts[:, 0] ** 2 + pts[:, 1] ** 2 - pts[:, 2] ** 2 - pts[:, 3] ** 2
    assert np.max(np.abs(p(pts) - expected)) < 1e-15
    p = parse_poly_expr("-2*(a1 + a2)*(a1 - a2) + 1.5")
    expected = -2 * (pts[:, 0] ** 2 - pts[:, 1] ** 2) + 1.5
    assert np.max(np.abs(p(pts) - expected)) < 1e-14


def test_parse_errors():
    for bad in ("a5", "diag(1,2)", "sym(1,2,3)", "1 +* 2", "foo(1,2,3)", "diag(2,,2)", "(1"):
        with pytest.raises(ParseError):
            if bad.startswith(("diag", "sym", "foo")):
                parse_field_spec(bad)
            else:
                parse_poly_expr(bad)


def test_parse_field_specs():
    pts = random_points(10, seed=1)
    A = parse_field_spec("diag(2, 2, 2)")
    assert np.allclose(A.matrix(pts), 2 * np.eye(3))
    A = parse_field_spec("builtin:left-133")
    assert np.allclose(A.matrix(pts[:1])[0], np.diag([1.0, -3.0, -3.0]))
    A = parse_field_spec("sym(a1, 0, 0, a2, 0, a3)")
    M = A.matrix(pts)
    assert np.allclose(M[:, 0, 0], pts[:, 0])
    assert np.allclose(M[:, 1, 1], pts[:, 1])
    assert np.allclose(M[:, 2, 2], pts[:, 2])
    assert np.max(np.abs(M - np.swapaxes(M, 1, 2))) == 0.0
    with pytest.raises(ParseError):
        parse_field_spec("builtin:unknown")
