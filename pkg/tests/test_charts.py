import numpy as np
import pytest

from bitension.charts import ChartDomain, DomainError, RiemannianMetric


def test_sample_stays_in_shrunk_box():
    dom = ChartDomain(("a", "b"), ((0.0, 1.0), (-2.0, 2.0)))
    pts = dom.sample(200, seed=7)
    assert pts.shape == (200, 2)
    assert np.all(pts[:, 0] > 0.05 - 1e-12) and np.all(pts[:, 0] < 0.95 + 1e-12)
    assert np.all(pts[:, 1] > -1.8 - 1e-12) and np.all(pts[:, 1] < 1.8 + 1e-12)
    assert np.all(dom.contains(pts))


def test_sample_avoids_excluded_hyperplane():
    dom = ChartDomain(("rho", "z"), ((-1.0, 1.0), (0.0, 1.0)),
                      excluded=((0, 0.0),))
    pts = dom.sample(300, seed=3)
    assert np.all(np.abs(pts[:, 0]) > 1e-3)


def test_sample_fills_every_axis():
    # regression: the Halton digit loop once clobbered its index array in
    # place, freezing every axis after the first at the box corner
    dom = ChartDomain(tuple("abcdef"), ((0.0, 1.0),) * 6)
    pts = dom.sample(40, seed=9)
    assert np.all(np.ptp(pts, axis=0) > 0.5)
    assert not np.allclose(pts[:, 1], pts[0, 1])


def test_sample_is_deterministic_per_seed():
    dom = ChartDomain(("a", "b", "c"), ((0.0, 1.0),) * 3)
    one = dom.sample(50, seed=11)
    two = dom.sample(50, seed=11)
    other = dom.sample(50, seed=12)
    assert np.array_equal(one, two)
    assert not np.array_equal(one, other)


def test_require_rejects_outside_point():
    dom = ChartDomain(("a", "b"), ((0.0, 1.0), (0.0, 1.0)))
    dom.require(np.array([0.5, 0.5]))
    with pytest.raises(DomainError):
        dom.require(np.array([0.5, 1.5]))
    with pytest.raises(DomainError):
        dom.require(np.array([[0.2, 0.2], [-0.1, 0.5]]))


def test_bad_box_and_shape_are_rejected():
    with pytest.raises(ValueError):
        ChartDomain(("a",), ((1.0, 1.0),))
    with pytest.raises(ValueError):
        ChartDomain(("a", "b"), ((0.0, 1.0),))
    dom = ChartDomain(("a", "b"), ((0.0, 1.0), (0.0, 1.0)))
    with pytest.raises(ValueError):
        RiemannianMetric.from_components(dom, [["1", "0"], ["0"]])
