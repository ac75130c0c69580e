import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from juliatwin.julia import (PointCloud, fingerprint, forward_invariance, grid_cover_sample,
                             hausdorff_distance, inverse_iteration_sample, merge_clouds, preimages,
                             same_julia_test)
from juliatwin.ratmap import chebyshev, example_pair, parse_map, power_map


def circle(n, r=1.0, phase=0.0):
    return PointCloud.from_affine(r * np.exp(1j * (np.linspace(0, 2 * np.pi, n, endpoint=False) + phase)))


def chordal(a, b):
    return 2 * abs(a - b) / np.sqrt((1 + abs(a) ** 2) * (1 + abs(b) ** 2))


@pytest.fixture(scope="module")
def z2_cloud():
    return inverse_iteration_sample(parse_map("z^2"), 20000, seed=7)


def test_power_map_cloud_on_unit_circle(z2_cloud):
    z = z2_cloud.affine()
    assert len(z2_cloud) == 20000
    assert np.max(np.abs(np.abs(z) - 1)) < 1e-6


@pytest.mark.parametrize("lam", [1j, np.exp(0.3j)])
def test_rotated_power_map_cloud(lam):
    z = inverse_iteration_sample(power_map(lam, 3), 3000, seed=2).affine()
    assert np.max(np.abs(np.abs(z) - 1)) < 1e-6


def test_chebyshev_cloud_on_segment():
    z = inverse_iteration_sample(chebyshev(2), 5000, seed=3).affine()
    assert np.max(np.abs(z.imag)) < 1e-6
    assert np.all(np.abs(z.real) <= 1 + 1e-6)


def test_basilica_neighbour_segment():
    z = inverse_iteration_sample(parse_map("z^2-2"), 5000, seed=3).affine()
    assert np.max(np.abs(z.imag)) < 1e-6
    assert np.all(np.abs(z.real) <= 2 + 1e-6)


def test_seed_determinism():
    f = parse_map("z^2+i")
    a = inverse_iteration_sample(f, 3000, seed=11)
    b = inverse_iteration_sample(f, 3000, seed=11)
    c = inverse_iteration_sample(f, 3000, seed=12)
    assert np.array_equal(a.z0, b.z0) and np.array_equal(a.z1, b.z1)
    assert not np.array_equal(a.z0, c.z0)
    assert a.meta["seed"] == 11 and a.meta["map"] == fingerprint(f)


def test_cloud_is_read_only(z2_cloud):
    with pytest.raises(ValueError):
        z2_cloud.z0[0] = 0


def test_points_are_normalized(z2_cloud):
    m = np.maximum(np.abs(z2_cloud.z0), np.abs(z2_cloud.z1))
    assert np.allclose(m, 1)


@pytest.mark.parametrize("text", ["z^2", "z^2+i", "(z^2+1)/(z-2)", "4z^3-3z"])
def test_forward_invariance(text):
    f = parse_map(text)
    assert forward_invariance(f, inverse_iteration_sample(f, 6000, seed=5)) >= 0.999


def test_preimages_map_back():
    f = parse_map("(z^2+1)/(z-2)")
    targets = np.array([0.3 + 0.1j, -2, 5j])
    w0, w1 = preimages(f.to_float(), targets, np.ones(3))
    assert w0.shape == (3, 2)
    w = w0 / w1
    assert np.allclose(f.to_float()(w), targets[:, None])


def test_hausdorff_examples():
    a = circle(4000)
    assert hausdorff_distance(a, a) == 0
    d = hausdorff_distance(a, circle(4000, 1.01))
    assert d == pytest.approx(chordal(1, 1.01), rel=1e-3)


@given(st.integers(0, 10 ** 6))
def test_hausdorff_symmetric_and_triangle(seed):
    rng = np.random.default_rng(seed)
    a, b, c = (PointCloud.from_affine(rng.normal(size=40) + 1j * rng.normal(size=40)) for _ in range(3))
    ab, bc, ac = hausdorff_distance(a, b), hausdorff_distance(b, c), hausdorff_distance(a, c)
    assert ab == pytest.approx(hausdorff_distance(b, a), abs=1e-15)
    assert ac <= ab + bc + 1e-12


def test_same_julia_examples():
    assert same_julia_test(parse_map("z^2"), parse_map("z^3"), 5000, seed=7)["verdict"]
    f, g = example_pair(parse_map("z^2+1"), 2, -1)
    assert same_julia_test(f, g, 5000, seed=7)["verdict"]
    res = same_julia_test(parse_map("z^2"), parse_map("z^2-2"), 5000, seed=7)
    assert not res["verdict"] and res["distance"] > 0.5


def test_grid_cover_resolution():
    f = parse_map("z^2")
    cloud = grid_cover_sample(f, cell=1e-3)
    assert cloud.meta["method"] == "grid_cover" and not cloud.meta["truncated"]
    assert hausdorff_distance(cloud, circle(20000)) < 3e-3


def test_merge_keeps_all_points(z2_cloud):
    m = merge_clouds(z2_cloud, circle(10))
    assert len(m) == len(z2_cloud) + 10


def test_rejects_degree_one():
    with pytest.raises(ValueError):
        inverse_iteration_sample(parse_map("2z"), 100)
