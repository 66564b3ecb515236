# models/certificates.py
"""
반복사상(iterated map) 배제 논리.

deg(f ∘ g) = deg(f) deg(g) 이므로 f^n 의 차수는 항상 k^n 꼴이다.
따라서 차수가 완전거듭제곱(perfect power)이 아닌 사상은 어떤 연속사상의
n 번째 반복(n >= 2)도 아니다. 또 f0 와의 sup 거리가 1 미만인 g 는
직선 호모토피 H_g 로 f0 와 이어지므로 같은 차수를 가진다 (공 인증서).

Refusal 은 "장애물이 침묵한다"는 뜻일 뿐, 대상이 반복사상이라는 주장이 아니다.
"""
import logging
from dataclasses import dataclass
from typing import Optional

import numpy as np

from models.degree import DegreeParams, DegreeResult, degree, sup_distance
from models.errors import DegreeInconsistency, DimensionMismatch, DistanceTooLarge, DomainError, HomotopyInvalid
from models.map_dsl import evaluate_many
from models.sphere import make_grid

logger = logging.getLogger(__name__)

BALL_RADIUS = 1.0
HOMOTOPY_MIN_NORM = 1e-6
DEFAULT_T_STEPS = 16


# ==========================================
# 1. 완전거듭제곱 판정
# ==========================================
@dataclass(frozen=True)
class PowerWitness:
    base: int
    exp: int

    def __post_init__(self):
        if self.exp < 2:
            raise ValueError(f"power witness needs exponent >= 2, got {self.exp}")

    @property
    def value(self):
        return self.base**self.exp

    def to_dict(self):
        return {"base": self.base, "exp": self.exp}


def integer_root(a, n):
    """floor(a^(1/n)), a >= 0. 정수 Newton 반복"""
    if a < 0 or n < 1:
        raise ValueError("integer_root needs a >= 0 and n >= 1")
    if a < 2 or n == 1:
        return a
    x = 1 << (a.bit_length() // n + 1)  # 항상 참값 이상에서 출발
    while True:
        y = ((n - 1) * x + a // x ** (n - 1)) // n
        if y >= x:
            return x
        x = y


def checked_exponents(d):
    """|d| >= 2 에서 검사하는 지수 범위 2..max(2, floor(log2 |d|)), 음수면 홀수만"""
    top = max(2, abs(d).bit_length() - 1)
    return [n for n in range(2, top + 1) if d >= 0 or n % 2 == 1]


def is_perfect_power(d):
    """
    d = k^n (n >= 2) 인 가장 작은 n 의 증인을 반환, 없으면 None.
    관례: 0 = 0^2, 1 = 1^2, -1 = (-1)^3.
    """
    d = int(d)
    if d == 0:
        return PowerWitness(0, 2)
    if d == 1:
        return PowerWitness(1, 2)
    if d == -1:
        return PowerWitness(-1, 3)

    a = abs(d)
    # |k| >= 2 이면 |k|^n >= 2^n 이므로 n <= log2 |d|
    for n in range(2, a.bit_length()):
        if d < 0 and n % 2 == 0:
            continue
        r = integer_root(a, n)
        if r**n == a:
            return PowerWitness(-r if d < 0 else r, n)
    return None


# ==========================================
# 2. 호모토피 H_g 유효성
# ==========================================
@dataclass(frozen=True)
class HomotopyReport:
    valid: bool
    min_norm: float
    argmin_x: tuple
    argmin_t: float
    resolution: int
    t_steps: int

    def to_dict(self):
        return {
            "valid": self.valid,
            "min_norm": self.min_norm,
            "argmin": {"x": list(self.argmin_x), "t": self.argmin_t},
            "resolution": self.resolution,
            "t_steps": self.t_steps,
        }


def homotopy_check(f0, g, resolution, t_steps=DEFAULT_T_STEPS):
    """
    H_g(x, t) = ((1-t) f0(x) + t g(x)) / |...|_2 의 분모를
    t ∈ {0, 1/T, ..., 1} x 격자 노드에서 조사한다.
    """
    if f0.dim != g.dim:
        raise DimensionMismatch(f"homotopy between S^{f0.dim} and S^{g.dim} maps")
    if t_steps < 16:
        raise DomainError(f"t_steps must be >= 16, got {t_steps}")

    grid = make_grid(f0.dim, resolution)
    F = evaluate_many(f0, grid.nodes)
    G = evaluate_many(g, grid.nodes)
    ts = np.arange(t_steps + 1) / t_steps

    # (T+1, n) 분모 노름
    norms = np.linalg.norm((1 - ts)[:, None, None] * F[None] + ts[:, None, None] * G[None], axis=2)
    ti, xi = np.unravel_index(int(np.argmin(norms)), norms.shape)
    min_norm = float(norms[ti, xi])
    return HomotopyReport(
        valid=min_norm > HOMOTOPY_MIN_NORM,
        min_norm=min_norm,
        argmin_x=tuple(float(c) for c in grid.nodes[xi]),
        argmin_t=float(ts[ti]),
        resolution=grid.resolution,
        t_steps=t_steps,
    )


# ==========================================
# 3. 인증서
# ==========================================
@dataclass(frozen=True)
class BallProvenance:
    base: str
    distance: object  # DistanceEstimate
    radius: float
    consistency_degree: Optional[int] = None

    def to_dict(self):
        return {
            "base": self.base,
            "sampled_distance": self.distance.sampled_max,
            "radius": self.radius,
            "rigorous": self.distance.rigorous,
            "resolution": self.distance.resolution,
            "consistency_degree": self.consistency_degree,
        }


@dataclass(frozen=True)
class NonIterateCertificate:
    subject: str
    dim: int
    degree: DegreeResult
    checked: tuple
    ball: Optional[BallProvenance] = None

    def __post_init__(self):
        if is_perfect_power(self.degree.value) is not None:
            raise ValueError(f"degree {self.degree.value} is a perfect power, no certificate")
        if self.ball is not None and not self.ball.distance.sampled_max < self.ball.radius:
            raise ValueError("ball provenance with distance >= radius")

    @property
    def statement(self):
        return f"no (k, n >= 2) with k^n = {self.degree.value}"

    def to_dict(self):
        return {
            "kind": "certificate",
            "subject": self.subject,
            "dim": self.dim,
            "degree": self.degree.to_dict(),
            "power_check": {"statement": self.statement, "checked_exponents": list(self.checked)},
            "ball": None if self.ball is None else self.ball.to_dict(),
        }


@dataclass(frozen=True)
class Refusal:
    subject: str
    dim: int
    degree: DegreeResult
    witness: PowerWitness
    reason: str

    def to_dict(self):
        return {
            "kind": "refusal",
            "subject": self.subject,
            "dim": self.dim,
            "degree": self.degree.to_dict(),
            "witness": self.witness.to_dict(),
            "reason": self.reason,
        }


def certify_not_iterate(e, p=None):
    p = p or DegreeParams()
    deg = degree(e, p)
    witness = is_perfect_power(deg.value)
    if witness is not None:
        return Refusal(
            e.render(),
            e.dim,
            deg,
            witness,
            f"degree {deg.value} = ({witness.base})^{witness.exp}; the degree obstruction is silent",
        )
    return NonIterateCertificate(e.render(), e.dim, deg, tuple(checked_exponents(deg.value)))


def ball_certificate(
    f0,
    g,
    p=None,
    resolution=None,
    lipschitz=None,
    t_steps=DEFAULT_T_STEPS,
    base_degree=None,
    radius=BALL_RADIUS,
):
    """
    g ∈ B_1(f0) 이고 deg f0 가 완전거듭제곱이 아니면 g 는 반복사상이 아니다.
    (i) f0 의 차수 확인 (ii) sup 거리 < 1 (iii) H_g 분모가 0 이 아님.
    인증서의 차수는 f0 의 것이며, deg g 는 일관성 확인용으로만 계산한다.
    base_degree 에 미리 계산한 DegreeResult 를 넘기면 f0 차수 계산을 생략.
    """
    p = p or DegreeParams()
    if f0.dim != g.dim:
        raise DimensionMismatch(f"ball certificate: S^{f0.dim} base vs S^{g.dim} map")
    resolution = resolution or p.initial_for(f0.dim)

    # (i) 기준 사상의 차수
    deg0 = base_degree or degree(f0, p)
    witness = is_perfect_power(deg0.value)
    if witness is not None:
        return Refusal(
            g.render(),
            g.dim,
            deg0,
            witness,
            f"base degree {deg0.value} = ({witness.base})^{witness.exp}; ball argument does not apply",
        )

    # (ii) 공 B_1(f0) 안에 있는가
    dist = sup_distance(f0, g, resolution, lipschitz)
    if dist.sampled_max >= radius:
        raise DistanceTooLarge(f"sampled sup distance {dist.sampled_max:.6f} >= radius {radius}")
    if lipschitz is not None and dist.rigorous >= radius:
        raise DistanceTooLarge(f"rigorous sup bound {dist.rigorous:.6f} >= radius {radius}")

    # (iii) 직선 호모토피
    report = homotopy_check(f0, g, resolution, t_steps)
    if not report.valid:
        raise HomotopyInvalid(f"H_g denominator {report.min_norm:.3e} at t={report.argmin_t}")

    # 호모토피 불변성의 수치 확인
    deg_g = degree(g, p)
    if deg_g.value != deg0.value:
        raise DegreeInconsistency(f"deg(g) = {deg_g.value} but deg(f0) = {deg0.value} inside the unit ball")

    ball = BallProvenance(f0.render(), dist, radius, deg_g.value)
    return NonIterateCertificate(g.render(), g.dim, deg0, tuple(checked_exponents(deg0.value)), ball)


def audit_certificate(obj):
    """직렬화된 인증서를 자기 필드만으로 재검증"""
    if obj.get("kind") != "certificate":
        return False
    value = obj["degree"]["value"]
    if is_perfect_power(value) is not None:
        return False
    if obj["power_check"]["checked_exponents"] != checked_exponents(value):
        return False
    ball = obj.get("ball")
    if ball is not None:
        if not ball["sampled_distance"] < ball["radius"]:
            return False
        if ball["rigorous"] is not None and not ball["rigorous"] < ball["radius"]:
            return False
        if ball["consistency_degree"] is not None and ball["consistency_degree"] != value:
            return False
    return True
