# models/sphere.py
"""
단위 구면 S^1 ⊂ R^2, S^2 ⊂ R^3 의 기하 도구.

점(SpherePoint), 정규화, 현(chordal) 거리, 샘플 격자와 구적 가중치,
S^2 의 접평면 기저(TangentFrame)를 제공한다. 모든 타입은 불변 값이다.
"""
import math
from dataclasses import dataclass

import numpy as np

from models.errors import DimensionMismatch, InvalidResolution, NearZeroVector

EPS_NORMALIZE = 1e-9
NORM_TOLERANCE = 1e-12
MIN_RESOLUTION = 8
SUPPORTED_DIMS = (1, 2)


def _check_dim(dim):
    if dim not in SUPPORTED_DIMS:
        raise DimensionMismatch(f"only S^1 and S^2 are supported, got m={dim}")


@dataclass(frozen=True)
class SpherePoint:
    dim: int
    coords: tuple

    def __post_init__(self):
        _check_dim(self.dim)
        if len(self.coords) != self.dim + 1:
            raise DimensionMismatch(
                f"S^{self.dim} point needs {self.dim + 1} coordinates, got {len(self.coords)}"
            )
        object.__setattr__(self, "coords", tuple(float(c) for c in self.coords))
        norm = math.sqrt(math.fsum(c * c for c in self.coords))
        if abs(norm - 1.0) > NORM_TOLERANCE:
            raise ValueError(f"point is off the sphere: |x| = {norm!r}")

    @property
    def array(self):
        return np.array(self.coords)

    @classmethod
    def from_angle(cls, phi):
        """S^1 위의 점 (cos φ, sin φ)"""
        return cls(1, (math.cos(phi), math.sin(phi)))

    @classmethod
    def from_spherical(cls, theta, phi):
        """S^2 위의 점 (sin θ cos φ, sin θ sin φ, cos θ), θ 는 북극에서 잰 각"""
        s = math.sin(theta)
        return cls(2, (s * math.cos(phi), s * math.sin(phi), math.cos(theta)))


def normalize(v, eps=EPS_NORMALIZE):
    """v / |v|_2 를 SpherePoint 로 반환. |v| <= eps 이면 NearZeroVector."""
    arr = np.asarray(v, dtype=float).ravel()
    if arr.size - 1 not in SUPPORTED_DIMS:
        raise DimensionMismatch(f"cannot normalize a vector of length {arr.size}")
    norm = float(np.linalg.norm(arr))
    if norm <= eps:
        raise NearZeroVector(norm, eps)
    return SpherePoint(arr.size - 1, tuple(arr / norm))


def normalize_rows(V, eps=EPS_NORMALIZE):
    """행 단위 정규화 (n, m+1) -> (n, m+1). 한 행이라도 |v| <= eps 면 NearZeroVector."""
    norms = np.linalg.norm(V, axis=1)
    if norms.size and norms.min() <= eps:
        raise NearZeroVector(norms.min(), eps)
    return V / norms[:, None]


def chordal_dist(p, q):
    if p.dim != q.dim:
        raise DimensionMismatch(f"S^{p.dim} vs S^{q.dim}")
    d = math.sqrt(math.fsum((a - b) ** 2 for a, b in zip(p.coords, q.coords)))
    return min(d, 2.0)


@dataclass(frozen=True, eq=False)
class SampleGrid:
    """
    S^m 의 이산화.
    nodes: (n, m+1) 배열, weights: (n,) 구적 가중치, mesh: 대표 노드 간격(현 길이)
    """

    dim: int
    nodes: np.ndarray
    weights: np.ndarray
    mesh: float
    resolution: int

    def __len__(self):
        return len(self.weights)

    def points(self):
        return [SpherePoint(self.dim, tuple(row)) for row in self.nodes]


def make_grid(dim, resolution, offset=0.0):
    """
    m=1: 등간격 각도 φ_i = 2πi/N (+offset), 가중치 2π/N.
    m=2: 위도 N 밴드 x 경도 2N 의 셀 중심 노드. 가중치는 셀의 정확한 면적
         Δφ (cos θ_j - cos θ_{j+1}) 로 두어 합이 4π 가 되도록 한다.
    """
    _check_dim(dim)
    if int(resolution) != resolution or resolution < MIN_RESOLUTION:
        raise InvalidResolution(f"resolution must be an integer >= {MIN_RESOLUTION}, got {resolution}")
    n = int(resolution)

    if dim == 1:
        phi = 2 * np.pi * np.arange(n) / n + offset
        nodes = np.column_stack([np.cos(phi), np.sin(phi)])
        weights = np.full(n, 2 * np.pi / n)
        mesh = 2 * math.sin(math.pi / n)
        return SampleGrid(1, nodes, weights, mesh, n)

    # 1. 위도 밴드 경계와 중심 (극점 sin θ = 0 은 노드가 되지 않음)
    edges = np.pi * np.arange(n + 1) / n
    theta = 0.5 * (edges[:-1] + edges[1:])
    band_height = np.cos(edges[:-1]) - np.cos(edges[1:])

    # 2. 경도 2N 개, 간격 Δφ = π/N
    d_phi = np.pi / n
    phi = d_phi * (np.arange(2 * n) + 0.5) + offset

    th, ph = np.meshgrid(theta, phi, indexing="ij")
    s = np.sin(th)
    nodes = np.column_stack([(s * np.cos(ph)).ravel(), (s * np.sin(ph)).ravel(), np.cos(th).ravel()])
    weights = np.repeat(band_height * d_phi, 2 * n)
    mesh = 2 * math.sin(math.pi / (2 * n))
    return SampleGrid(2, nodes, weights, mesh, n)


@dataclass(frozen=True)
class TangentFrame:
    base: SpherePoint
    e1: tuple
    e2: tuple


def tangent_frames(X):
    """
    (n, 3) 노드 배열에 대한 정규직교 접기저 (E1, E2).
    e1 = normalize(a x p), a = (0,0,1) (|p_z| < 0.9) 아니면 (1,0,0); e2 = p x e1.
    """
    X = np.asarray(X, dtype=float)
    axis = np.where((np.abs(X[:, 2]) < 0.9)[:, None], [0.0, 0.0, 1.0], [1.0, 0.0, 0.0])
    E1 = np.cross(axis, X)
    E1 /= np.linalg.norm(E1, axis=1)[:, None]
    E2 = np.cross(X, E1)
    return E1, E2


def tangent_frame(p):
    if p.dim != 2:
        raise DimensionMismatch("tangent frames are defined for S^2 points only")
    E1, E2 = tangent_frames(p.array[None, :])
    return TangentFrame(p, tuple(E1[0]), tuple(E2[0]))
