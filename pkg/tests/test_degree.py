import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import models.degree as degree_module
from models.degree import (
    DegreeParams,
    DegreeResult,
    degree,
    degree_numeric,
    degree_quadrature,
    degree_winding,
    sup_distance,
)
from models.errors import (
    DimensionMismatch,
    DomainError,
    InvalidBlend,
    InvalidResolution,
    ResolutionExceeded,
    SymbolicNumericMismatch,
)
from models.map_dsl import (
    Antipode,
    Blend,
    Compose,
    Conj,
    Id,
    Iterate,
    Perturb,
    Pow,
    Rot,
    Rot3,
    Susp,
    symbolic_degree,
)


# ==========================================
# winding (S^1)
# ==========================================
def test_winding_examples():
    res = degree_winding(Pow(3))
    assert res.value == 3
    assert res.residual < 1e-9
    assert res.method == "winding"
    assert degree_winding(Id(1)).value == 1
    assert degree_winding(Compose(Conj(), Pow(2))).value == -2


@pytest.mark.parametrize("k", range(-5, 6))
def test_winding_of_powers(k):
    assert degree_winding(Pow(k)).value == k


def test_winding_rejects_s2_maps():
    with pytest.raises(DimensionMismatch):
        degree_winding(Id(2))


def test_winding_invariant_under_start_angle():
    e = Compose(Perturb(12, 0.7, Pow(-3)), Rot(0.4))
    assert degree_winding(e, offset=0.0).value == degree_winding(e, offset=0.37).value == -3


def test_steep_maps_trigger_refinement():
    res = degree_winding(Iterate(4, Pow(3)))
    assert res.value == 81
    assert res.resolution > 256


def test_resolution_exceeded_is_reported():
    with pytest.raises(ResolutionExceeded):
        degree_winding(Pow(5000), DegreeParams(initial_resolution=256, max_resolution=1024))


@pytest.mark.parametrize(
    "e",
    [Pow(4), Compose(Pow(-3), Perturb(2, 0.8, Pow(2))), Iterate(3, Pow(3)), Perturb(1, 0.8, Susp(Pow(2)))],
    ids=lambda e: e.render(),
)
def test_accepted_resolution_is_stable(e):
    res = degree_numeric(e)
    again = degree_numeric(e, DegreeParams(initial_resolution=2 * res.resolution))
    assert again.value == res.value


def test_large_initial_resolution_on_circle():
    p = DegreeParams(initial_resolution=10000)
    assert p.max_for(1) == 20000
    res = degree_winding(Id(1), p)
    assert (res.value, res.resolution) == (1, 10000)


def test_large_initial_resolution_on_sphere(monkeypatch):
    # 기본 상한보다 큰 초기 해상도도 N, 2N 두 단계를 돌 수 있어야 한다
    monkeypatch.setitem(degree_module.DEFAULT_MAX_RESOLUTION, 2, 64)
    res = degree_quadrature(Id(2), DegreeParams(initial_resolution=48))
    assert (res.value, res.resolution) == (1, 48)
    assert degree(Antipode(2), DegreeParams(initial_resolution=48)).value == -1


def test_resolution_pair_validation():
    with pytest.raises(InvalidResolution):
        DegreeParams(initial_resolution=600, max_resolution=1024)
    with pytest.raises(InvalidResolution):
        DegreeParams(max_resolution=8)
    p = DegreeParams(max_resolution=200)
    assert (p.initial_for(1), p.initial_for(2)) == (100, 100)
    assert degree_winding(Pow(3), p).value == 3


# ==========================================
# quadrature (S^2)
# ==========================================
def test_quadrature_examples():
    res = degree_quadrature(Id(2))
    assert res.value == 1
    assert res.residual < 0.05
    assert res.method == "quadrature"
    assert degree_quadrature(Antipode(2)).value == -1
    assert degree_quadrature(Susp(Pow(2))).value == 2


def test_quadrature_rejects_s1_maps():
    with pytest.raises(DimensionMismatch):
        degree_quadrature(Pow(2))


# ==========================================
# dispatch
# ==========================================
def test_degree_examples():
    res = degree(Iterate(2, Susp(Pow(2))))
    assert res.value == 4
    assert res.method == "symbolic"

    res = degree(Blend(0.5, Pow(2), Perturb(9, 0.3, Pow(2))))
    assert res.value == 2
    assert res.method == "winding"

    with pytest.raises(InvalidBlend):
        degree(Blend(0.5, Pow(1), Compose(Antipode(1), Pow(1))))


def test_nested_invalid_blend_is_found():
    with pytest.raises(InvalidBlend):
        degree(Susp(Compose(Pow(2), Blend(0.5, Id(1), Antipode(1)))))


def test_blend_vanishing_between_nodes_is_not_given_a_degree():
    # 분모의 영점이 격자 노드 사이에 있으면 InvalidBlend 가 아니라 수렴 실패로 보고된다
    with pytest.raises(ResolutionExceeded):
        degree(Blend(0.5, Pow(1), Compose(Rot(3.1), Conj())))


def test_symbolic_numeric_disagreement_is_an_error(monkeypatch):
    monkeypatch.setattr(degree_module, "degree_numeric", lambda e, p=None: DegreeResult(7, 0.0, "winding", 256))
    with pytest.raises(SymbolicNumericMismatch):
        degree(Pow(2))


def test_params_validation():
    with pytest.raises(InvalidResolution):
        DegreeParams(initial_resolution=4)
    with pytest.raises(DomainError):
        DegreeParams(tolerance=0.6)
    with pytest.raises(DomainError):
        DegreeParams(step_angle_cap=4.0)
    p = DegreeParams()
    assert (p.initial_for(1), p.max_for(1), p.initial_for(2), p.max_for(2)) == (256, 16384, 128, 1024)


# ==========================================
# 곱셈성 / 반복 법칙 / 코퍼스
# ==========================================
def _random_leaf(rng):
    kind = rng.integers(0, 3)
    if kind == 0:
        return Pow(int(rng.integers(-5, 6)))
    if kind == 1:
        return Rot(float(rng.uniform(-np.pi, np.pi)))
    return Conj()


def _random_s1_expr(rng):
    """깊이 <= 2, Compose(f, g) 가 깊이 <= 3 이 되도록"""
    if rng.random() < 0.5:
        return _random_leaf(rng)
    return Compose(_random_leaf(rng), _random_leaf(rng))


def test_multiplicativity_suite():
    rng = np.random.default_rng(20240601)
    failures = []
    for _ in range(200):
        f, g = _random_s1_expr(rng), _random_s1_expr(rng)
        df, dg = degree_winding(f).value, degree_winding(g).value
        dfg = degree_winding(Compose(f, g)).value
        if dfg != df * dg:
            failures.append((f.render(), g.render(), df, dg, dfg))
    assert failures == []


SYMBOLIC_CORPUS = [
    Id(1),
    Id(2),
    Antipode(1),
    Antipode(2),
    Conj(),
    Pow(-5),
    Pow(-2),
    Pow(0),
    Pow(3),
    Pow(5),
    Rot3((0, 0, 1), 0.7),
    Compose(Rot3((1, 0, 0), 1.2), Susp(Conj())),
    Susp(Pow(-3)),
    Susp(Pow(0)),
    Susp(Pow(2)),
    Susp(Pow(5)),
    Compose(Pow(2), Pow(-3)),
    Compose(Susp(Pow(2)), Antipode(2)),
    Iterate(4, Pow(2)),
    Iterate(3, Compose(Conj(), Pow(2))),
    Iterate(2, Susp(Pow(-2))),
    Perturb(7, 0.5, Susp(Pow(2))),
]


@pytest.mark.parametrize("e", SYMBOLIC_CORPUS, ids=lambda e: e.render())
def test_numeric_matches_symbolic(e):
    res = degree_winding(e) if e.dim == 1 else degree_quadrature(e)
    assert res.value == symbolic_degree(e)
    if e.dim == 2:
        assert res.residual < 0.1
        assert res.resolution <= 512


@pytest.mark.parametrize("n", [2, 3, 4])
@pytest.mark.parametrize("f", [Pow(2), Pow(-2), Pow(3), Susp(Pow(2))], ids=lambda f: f.render())
def test_iterate_law(f, n):
    assert degree(Iterate(n, f)).value == degree(f).value ** n


# ==========================================
# 호모토피 불변성
# ==========================================
@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**64 - 1), st.floats(0.0, 0.9))
def test_perturbation_keeps_degree_on_circle(seed, eps):
    assert degree_winding(Perturb(seed, eps, Pow(2))).value == 2


@pytest.mark.parametrize("seed", [1, 2, 3])
def test_perturbation_keeps_degree_on_sphere(seed):
    assert degree_quadrature(Perturb(seed, 0.9, Susp(Pow(2)))).value == 2


# ==========================================
# sup 거리
# ==========================================
def test_sup_distance_examples():
    assert sup_distance(Pow(2), Pow(2), 1024).sampled_max == 0
    assert sup_distance(Id(1), Antipode(1), 1024).sampled_max == pytest.approx(2.0)
    assert sup_distance(Pow(2), Perturb(5, 0.4, Pow(2)), 1024).sampled_max < 1


def test_sup_distance_on_sphere():
    est = sup_distance(Susp(Pow(2)), Perturb(5, 0.4, Susp(Pow(2))), 64)
    assert 0 < est.sampled_max < 1
    assert est.resolution == 64
    assert est.rigorous is None


def test_rigorous_bound_needs_lipschitz_constants():
    est = sup_distance(Pow(2), Rot(0.1), 512, lipschitz=(2.0, 1.0))
    assert est.rigorous >= est.sampled_max
    assert est.rigorous == pytest.approx(min(est.sampled_max + 3.0 * est.mesh, 2.0))
    # 원 위 z^2 와 회전의 차는 정확히 계산 가능: max |z^2 - e^{i0.1} z| = 2
    assert est.sampled_max <= 2.0


def test_sup_distance_dimension_mismatch():
    with pytest.raises(DimensionMismatch):
        sup_distance(Pow(2), Id(2), 64)


def test_distance_is_a_lower_bound_that_grows():
    coarse = sup_distance(Pow(2), Perturb(5, 0.4, Pow(2)), 64).sampled_max
    fine = sup_distance(Pow(2), Perturb(5, 0.4, Pow(2)), 4096).sampled_max
    assert math.isfinite(coarse) and fine >= coarse - 1e-3
