import io

import numpy as np
import pytest

from localhom.pointio import PointFormatError, format_points, parse_points, read_points, write_points


def test_comma_and_whitespace():
    a = parse_points("1,2\n3,4\n")
    b = parse_points("1 2\n3\t4\n")
    assert np.array_equal(a.points, b.points)
    assert a.points.tolist() == [[1, 2], [3, 4]]


def test_header_skipped():
    assert parse_points("x,y\n1,2\n", header=True).n == 1


def test_comments_and_blank_lines():
    assert parse_points("# generated\n\n1 2\n\n3 4\n").n == 2


@pytest.mark.parametrize("text,msg", [
    ("", "no points"),
    ("x,y\n", "no points"),
    ("1,2\n3\n", "expected 2"),
    ("1,nan\n", "non-finite"),
    ("1,inf\n", "non-finite"),
    ("1,abc\n", "row 1"),
])
def test_rejects(text, msg):
    header = text.startswith("x")
    with pytest.raises(PointFormatError, match=msg):
        parse_points(text, header=header)


def test_round_trip_is_exact(rng, tmp_path):
    pts = rng.normal(size=(20, 5))
    path = tmp_path / "p.csv"
    write_points(pts, path)
    assert np.array_equal(read_points(path).points, pts)
    buf = io.StringIO(format_points(pts))
    assert np.array_equal(read_points(buf).points, pts)
