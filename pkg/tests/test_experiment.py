import json

import numpy as np
import pytest

from models.certificates import audit_certificate
from models.errors import DomainError
from models.experiment import (
    base_map,
    derive_sample,
    probe_iterates,
    random_iterate,
    run_ball_experiment,
    summarize,
)
from models.map_dsl import Iterate, Perturb, Pow, Susp, parse, symbolic_degree
from utils.visualizer import plot_experiment


@pytest.fixture(scope="module")
def circle_run():
    """m=1, count=100, ε_max=0.9, seed=1"""
    return list(run_ball_experiment(1, 100, 0.9, 1, resolution=1024))


@pytest.fixture(scope="module")
def sphere_run():
    return list(run_ball_experiment(2, 25, 0.8, 1, resolution=128))


# ==========================================
# 공 실험
# ==========================================
def test_circle_experiment_certifies_every_sample(circle_run):
    assert len(circle_run) == 100
    assert summarize(circle_run) == {"issued": 100, "refused": 0, "errors": 0}
    for s in circle_run:
        assert s.payload["kind"] == "certificate"
        assert s.payload["degree"]["value"] == 2
        assert s.payload["ball"]["consistency_degree"] == 2
        assert s.payload["ball"]["sampled_distance"] < 1
        assert 0 <= s.epsilon <= 0.9


def test_sphere_experiment_certifies_every_sample(sphere_run):
    assert summarize(sphere_run) == {"issued": 25, "refused": 0, "errors": 0}
    assert all(s.payload["ball"]["consistency_degree"] == 2 for s in sphere_run)
    assert all(s.payload["dim"] == 2 for s in sphere_run)


def test_emitted_certificates_pass_audit(circle_run):
    objs = [json.loads(json.dumps(s.payload)) for s in circle_run]
    assert len(objs) == 100
    assert all(audit_certificate(obj) for obj in objs)


def test_samples_are_in_input_order(circle_run):
    assert [s.index for s in circle_run] == list(range(1, 101))
    first = circle_run[0]
    assert parse(first.expr) == Perturb(first.seed, first.epsilon, Pow(2))


def test_zero_epsilon_gives_the_base_map():
    (s,) = run_ball_experiment(1, 1, 0.0, 1, resolution=1024)
    assert s.outcome == "ok"
    assert s.epsilon == 0.0
    assert s.payload["ball"]["sampled_distance"] == 0


def test_perfect_power_base_is_refused():
    samples = list(run_ball_experiment(1, 5, 0.5, 3, resolution=512, base_degree=4))
    assert summarize(samples) == {"issued": 0, "refused": 5, "errors": 0}
    assert all(s.payload["witness"] == {"base": 2, "exp": 2} for s in samples)


def test_other_base_degrees_are_certified():
    samples = list(run_ball_experiment(1, 5, 0.5, 3, resolution=512, base_degree=-3))
    assert summarize(samples)["issued"] == 5
    assert all(s.payload["degree"]["value"] == -3 for s in samples)


@pytest.mark.parametrize(
    "kwargs",
    [dict(dim=3, count=1, epsilon_max=0.5), dict(dim=1, count=0, epsilon_max=0.5), dict(dim=1, count=1, epsilon_max=1.0)],
)
def test_experiment_rejects_bad_settings(kwargs):
    with pytest.raises(DomainError):
        list(run_ball_experiment(master_seed=1, **kwargs))


def test_derive_sample_is_deterministic():
    assert derive_sample(1, 7, 0.9) == derive_sample(1, 7, 0.9)
    assert derive_sample(1, 7, 0.9) != derive_sample(1, 8, 0.9)
    assert derive_sample(1, 7, 0.9) != derive_sample(2, 7, 0.9)
    seed, eps = derive_sample(5, 1, 0.3)
    assert 0 <= seed < 2**63 and 0 <= eps <= 0.3


def test_experiment_is_reproducible():
    a = [(s.expr, s.outcome, s.payload) for s in run_ball_experiment(1, 3, 0.7, 9, resolution=512)]
    b = [(s.expr, s.outcome, s.payload) for s in run_ball_experiment(1, 3, 0.7, 9, resolution=512)]
    assert a == b


def test_base_map():
    assert base_map(1) == Pow(2)
    assert base_map(2, 5) == Susp(Pow(5))


# ==========================================
# 반복사상 탐침
# ==========================================
@pytest.mark.parametrize("dim, resolution", [(1, 1024), (2, 32)])
def test_iterates_lie_outside_the_ball(dim, resolution):
    samples = list(probe_iterates(dim, 8, 1, resolution=resolution))
    assert summarize(samples) == {"issued": 8, "refused": 0, "errors": 0}
    for s in samples:
        assert s.payload["witness"] is not None
        assert s.payload["outside_ball"]


def test_random_iterate_shape():
    rng = np.random.default_rng(0)
    for _ in range(20):
        h = random_iterate(rng, 2, max_exponent=3)
        assert isinstance(h, Iterate)
        assert 2 <= h.n <= 3
        assert h.dim == 2
        assert symbolic_degree(h) == symbolic_degree(h.f) ** h.n


def test_probe_rejects_perfect_power_base():
    with pytest.raises(DomainError):
        list(probe_iterates(1, 1, 1, base_degree=9))


# ==========================================
# 그래프
# ==========================================
def test_plot_experiment_writes_png(tmp_path):
    samples = list(run_ball_experiment(1, 4, 0.5, 2, resolution=256))
    path = tmp_path / "ball.png"
    plot_experiment(samples, str(path))
    assert path.exists()
    assert path.read_bytes()[:8] == b"\x89PNG\r\n\x1a\n"
