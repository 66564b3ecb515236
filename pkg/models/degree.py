# models/degree.py
"""
Brouwer 차수의 수치 계산.

  - S^1: 감긴 횟수(winding number). 인접 샘플 간 각 증분을 (-π, π] 로 접어 합산.
  - S^2: 면적형식의 당김(pullback) 적분. f · (∂1 f x ∂2 f) 를 격자 위에서 구적.

해상도는 두 단계(N, 2N)의 결과가 일치할 때까지 두 배씩 늘린다.
정수로 반올림하기 전 잔차가 허용치를 넘으면 반올림하지 않고 실패한다.
"""
import logging
import math
from dataclasses import dataclass
from typing import Optional

import numpy as np

from models.errors import (
    DimensionMismatch,
    DomainError,
    InvalidBlend,
    InvalidResolution,
    ResolutionExceeded,
    SymbolicNumericMismatch,
)
from models.map_dsl import Blend, evaluate_many, symbolic_degree, walk
from models.sphere import MIN_RESOLUTION, make_grid, normalize_rows, tangent_frames

logger = logging.getLogger(__name__)

DEFAULT_INITIAL_RESOLUTION = {1: 256, 2: 128}
DEFAULT_MAX_RESOLUTION = {1: 16384, 2: 1024}
BLEND_MIN_NORM = 1e-6
FD_MAX_STEP = 1e-4


@dataclass(frozen=True)
class DegreeParams:
    """
    initial_resolution / max_resolution 가 None 이면 차원별 기본값
    (S^1: 256 / 16384 샘플, S^2: 128 / 1024 위도 밴드)을 쓴다.
    """

    initial_resolution: Optional[int] = None
    max_resolution: Optional[int] = None
    tolerance: float = 0.1
    step_angle_cap: float = math.pi / 2

    def __post_init__(self):
        if self.initial_resolution is not None and self.initial_resolution < MIN_RESOLUTION:
            raise InvalidResolution(f"initial resolution must be >= {MIN_RESOLUTION}")
        if self.max_resolution is not None and self.max_resolution < 2 * MIN_RESOLUTION:
            raise InvalidResolution(f"max resolution must be >= {2 * MIN_RESOLUTION}")
        if self.initial_resolution is not None and self.max_resolution is not None:
            # N 과 2N 두 단계를 비교해야 하므로
            if 2 * self.initial_resolution > self.max_resolution:
                raise InvalidResolution(
                    f"max resolution {self.max_resolution} must be >= 2 x initial {self.initial_resolution}"
                )
        if not 0.0 < self.tolerance < 0.5:
            raise DomainError(f"tolerance must lie in (0, 0.5), got {self.tolerance}")
        if not 0.0 < self.step_angle_cap < math.pi:
            raise DomainError(f"step angle cap must lie in (0, π), got {self.step_angle_cap}")

    @classmethod
    def from_config(cls, cfg):
        return cls(
            initial_resolution=cfg.initial_resolution,
            max_resolution=cfg.max_resolution,
            tolerance=cfg.tolerance,
            step_angle_cap=cfg.step_angle_cap,
        )

    def initial_for(self, dim):
        if self.initial_resolution is not None:
            return self.initial_resolution
        n = DEFAULT_INITIAL_RESOLUTION[dim]
        if self.max_resolution is not None:
            n = min(n, self.max_resolution // 2)
        return n

    def max_for(self, dim):
        """상한을 주지 않았으면 기본값과 2 x 초기 해상도 중 큰 쪽"""
        if self.max_resolution is not None:
            return self.max_resolution
        return max(DEFAULT_MAX_RESOLUTION[dim], 2 * self.initial_for(dim))


@dataclass(frozen=True)
class DegreeResult:
    value: int
    residual: float
    method: str  # winding | quadrature | symbolic
    resolution: int

    def to_dict(self):
        return {
            "value": self.value,
            "method": self.method,
            "residual": self.residual,
            "resolution": self.resolution,
        }


@dataclass(frozen=True)
class DistanceEstimate:
    sampled_max: float
    resolution: int
    mesh: float
    rigorous: Optional[float] = None

    def to_dict(self):
        return {
            "sampled_max": self.sampled_max,
            "resolution": self.resolution,
            "mesh": self.mesh,
            "rigorous": self.rigorous,
        }


# ==========================================
# 1. 원시 추정값 (반올림 전)
# ==========================================
def winding_raw(e, n, offset=0.0):
    """샘플 n 개로 잰 감긴 횟수: (raw, 최대 |Δ_i|)"""
    grid = make_grid(1, n, offset)
    img = evaluate_many(e, grid.nodes)
    alpha = np.arctan2(img[:, 1], img[:, 0])
    delta = np.diff(np.append(alpha, alpha[0]))
    # (-π, π] 로 접기
    delta = np.pi - np.mod(np.pi - delta, 2 * np.pi)
    return math.fsum(delta) / (2 * np.pi), float(np.max(np.abs(delta)))


def quadrature_raw(e, n):
    """
    deg f = (1/4π) ∫ f(x) · (∂1 f x ∂2 f) dA.
    편미분은 접기저 방향 중심차분, 이동한 점은 다시 구면으로 사영.
    """
    grid = make_grid(2, n)
    X = grid.nodes
    E1, E2 = tangent_frames(X)
    h = min(FD_MAX_STEP, grid.mesh / 8)

    fx = evaluate_many(e, X)
    d1 = (evaluate_many(e, normalize_rows(X + h * E1)) - evaluate_many(e, normalize_rows(X - h * E1))) / (2 * h)
    d2 = (evaluate_many(e, normalize_rows(X + h * E2)) - evaluate_many(e, normalize_rows(X - h * E2))) / (2 * h)
    integrand = np.einsum("ij,ij->i", fx, np.cross(d1, d2))
    return math.fsum(grid.weights * integrand) / (4 * np.pi)


# ==========================================
# 2. 적응형 해상도 루프
# ==========================================
def _adaptive(raw_at, n0, n_max, p, method):
    """
    raw_at(n) -> (raw, steep). N 과 2N 의 결과가 허용치 이내로 일치하고
    같은 정수로 반올림되며 steep 이 아니면 N 에서 수용.
    """
    n = n0
    raw, steep = raw_at(n)
    while True:
        if 2 * n > n_max:
            raise ResolutionExceeded(
                f"{method}: no two-level agreement up to resolution {n_max} (last raw {raw:.6f} at N={n})"
            )
        raw2, steep2 = raw_at(2 * n)
        value = round(raw)
        residual = abs(raw - value)
        if not steep and residual < p.tolerance and abs(raw - raw2) <= p.tolerance and round(raw2) == value:
            return DegreeResult(int(value), residual, method, n)
        logger.debug(f"{method}: N={n} raw={raw:.6f}, N={2 * n} raw={raw2:.6f} -> doubling")
        n, raw, steep = 2 * n, raw2, steep2


def degree_winding(e, p=None, offset=0.0):
    p = p or DegreeParams()
    if e.dim != 1:
        raise DimensionMismatch(f"winding number needs an S^1 map, got S^{e.dim}")

    def raw_at(n):
        raw, max_step = winding_raw(e, n, offset)
        return raw, max_step > p.step_angle_cap

    return _adaptive(raw_at, p.initial_for(1), p.max_for(1), p, "winding")


def degree_quadrature(e, p=None):
    p = p or DegreeParams()
    if e.dim != 2:
        raise DimensionMismatch(f"area-form quadrature needs an S^2 map, got S^{e.dim}")
    return _adaptive(lambda n: (quadrature_raw(e, n), False), p.initial_for(2), p.max_for(2), p, "quadrature")


def degree_numeric(e, p=None):
    return degree_winding(e, p) if e.dim == 1 else degree_quadrature(e, p)


# ==========================================
# 3. 디스패치
# ==========================================
def check_blends(e, resolution, min_norm=BLEND_MIN_NORM):
    """
    e 안의 모든 Blend 노드에 대해 정규화 전 분모 |(1-t) f(x) + t g(x)| 의
    격자 최솟값을 확인. min_norm 이하이면 InvalidBlend.
    """
    for node in walk(e):
        if not isinstance(node, Blend):
            continue
        grid = make_grid(node.dim, resolution)
        norms = np.linalg.norm(node.raw(grid.nodes), axis=1)
        i = int(np.argmin(norms))
        if norms[i] <= min_norm:
            raise InvalidBlend(
                f"{node.render()}: denominator {norms[i]:.3e} at x={tuple(np.round(grid.nodes[i], 6))}"
            )


def degree(e, p=None):
    """
    symbolic_degree 가 알려져 있으면 수치 방법으로 한 번 확인한 뒤 symbolic 으로 반환.
    Blend 가 섞여 있으면 Blend 유효성 검사 후 수치 결과를 반환.
    """
    p = p or DegreeParams()
    sym = symbolic_degree(e)
    if sym is None:
        check_blends(e, p.initial_for(e.dim))
        return degree_numeric(e, p)

    numeric = degree_numeric(e, p)
    if numeric.value != sym:
        raise SymbolicNumericMismatch(
            f"{e.render()}: symbolic degree {sym} but {numeric.method} gives {numeric.value} "
            f"(residual {numeric.residual:.3e}, N={numeric.resolution})"
        )
    return DegreeResult(sym, numeric.residual, "symbolic", numeric.resolution)


def sup_distance(f, g, resolution, lipschitz=None):
    """
    격자 위 max |f(x) - g(x)|_2. Lipschitz 상수 (L_f, L_g) 가 주어지면
    sampled_max + (L_f + L_g) * mesh 를 엄밀 상한으로 함께 기록 (2 로 잘라냄).
    """
    if f.dim != g.dim:
        raise DimensionMismatch(f"sup distance between S^{f.dim} and S^{g.dim} maps")
    grid = make_grid(f.dim, resolution)
    diff = np.linalg.norm(evaluate_many(f, grid.nodes) - evaluate_many(g, grid.nodes), axis=1)
    sampled = min(float(diff.max()), 2.0)
    rigorous = None
    if lipschitz is not None:
        lf, lg = lipschitz
        rigorous = min(sampled + (lf + lg) * grid.mesh, 2.0)
    return DistanceEstimate(sampled, grid.resolution, grid.mesh, rigorous)
