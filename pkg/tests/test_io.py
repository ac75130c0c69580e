import json

import numpy as np
import pytest

from juliatwin.errors import MapFormatError
from juliatwin.io import (load_map, map_from_json, map_to_json, read_cloud_csv, write_cloud_csv,
                          write_ppm)
from juliatwin.julia import PointCloud
from juliatwin.ratmap import parse_map


def test_map_json_roundtrip(tmp_path):
    f = parse_map("(z^2 + 1/3 i)/(2z - 1)")
    path = tmp_path / "f.json"
    path.write_text(json.dumps(map_to_json(f)))
    assert load_map(str(path)) == f


def test_map_from_json_forms():
    assert map_from_json({"num": [-1, 0, 2]}) == parse_map("2z^2-1")
    assert map_from_json({"num": [[0, 1], 0, 1], "den": [1]}) == parse_map("z^2+i")
    assert map_from_json({"num": ["1/4", 0, 1]}) == parse_map("z^2+1/4")
    assert map_from_json({"expr": "z^3"}) == parse_map("z^3")
    assert not map_from_json({"num": [0.1, 0, 1], "mode": "float"}).exact
    # decimals are read at face value in exact mode
    assert map_from_json({"num": [0.1, 0, 1]}) == parse_map("z^2 + 1/10")


def test_bare_expression_file(tmp_path):
    path = tmp_path / "f.txt"
    path.write_text("z^2 - 2\n")
    assert load_map(str(path)) == parse_map("z^2-2")


@pytest.mark.parametrize("obj", [
    {"num": [1], "den": [0]},
    {"num": [[1, 2, 3]]},
    {"num": ["x"]},
    {"den": [1]},
    {"num": [1], "mode": "fuzzy"},
    [1, 2],
])
def test_malformed_maps(obj):
    with pytest.raises(MapFormatError):
        map_from_json(obj)


def test_missing_file():
    with pytest.raises(MapFormatError):
        load_map("/nonexistent/map.json")


def test_cloud_csv_roundtrip(tmp_path):
    z = np.array([0.5 + 0.25j, -1e-17 + 3j, np.inf])
    cloud = PointCloud.from_affine(z)
    path = tmp_path / "c.csv"
    write_cloud_csv(cloud, str(path))
    assert path.read_text().splitlines()[0] == "re,im,is_infinite"
    back = read_cloud_csv(str(path)).affine()
    assert np.allclose(back[:2], z[:2], rtol=1e-15, atol=0) and not np.isfinite(back[2])


def test_ppm(tmp_path):
    cloud = PointCloud.from_affine(np.exp(1j * np.linspace(0, 6, 500)))
    path = tmp_path / "c.ppm"
    write_ppm(cloud, str(path), width=64)
    data = path.read_bytes()
    header = data.split(b"\n", 3)
    assert header[0] == b"P6" and header[1] == b"64 64"
    pixels = np.frombuffer(header[3], dtype=np.uint8)
    assert pixels.size == 64 * 64 * 3 and (pixels == 0).any() and (pixels == 255).any()
