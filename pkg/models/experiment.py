# models/experiment.py
"""
공 B_1(f0) 실험.

  - run_ball_experiment: f0 = z^l (S^1) 또는 susp(z^l) (S^2) 주변의 교란 사상
    g_i = perturb(seed_i, ε_i, f0) 마다 공 인증서를 발급.
  - probe_iterates: 무작위 반복사상 f^n 을 만들어 B_1(f0) 밖에 있는지 확인.

표본 i 의 난수는 numpy.random.default_rng([master_seed, i]) 에서
ε_i = uniform(0, ε_max), seed_i = integers(0, 2^63) 순서로 뽑는다.
"""
import logging
import time
from dataclasses import dataclass, field

import numpy as np

from models.certificates import BALL_RADIUS, DEFAULT_T_STEPS, ball_certificate, is_perfect_power
from models.degree import DegreeParams, degree, sup_distance
from models.errors import DomainError, SphereDegreeError
from models.map_dsl import Compose, Conj, Iterate, Perturb, Pow, Rot, Susp

logger = logging.getLogger(__name__)


@dataclass
class SampleOutcome:
    index: int
    seed: int
    epsilon: float
    expr: str
    outcome: str  # ok | refused | <error kind>
    payload: dict = field(default_factory=dict)
    wall_ms: float = 0.0


def base_map(dim, base_degree=2):
    """deg = l 인 기준 사상: S^1 은 z^l, S^2 는 그 현수"""
    f = Pow(base_degree)
    return f if dim == 1 else Susp(f)


def derive_sample(master_seed, index, epsilon_max):
    rng = np.random.default_rng([int(master_seed), int(index)])
    eps = float(rng.uniform(0.0, epsilon_max)) if epsilon_max > 0 else 0.0
    seed = int(rng.integers(0, 2**63))
    return seed, eps


def run_ball_experiment(
    dim,
    count,
    epsilon_max,
    master_seed,
    params=None,
    resolution=None,
    t_steps=DEFAULT_T_STEPS,
    base_degree=2,
    radius=BALL_RADIUS,
):
    """표본마다 SampleOutcome 을 생성 (입력 순서 보존)"""
    if dim not in (1, 2):
        raise DomainError(f"experiment dimension must be 1 or 2, got {dim}")
    if count < 1:
        raise DomainError(f"count must be >= 1, got {count}")
    if not 0.0 <= epsilon_max < 1.0:
        raise DomainError(f"epsilon-max must lie in [0, 1), got {epsilon_max}")

    params = params or DegreeParams()
    f0 = base_map(dim, base_degree)
    deg0 = degree(f0, params)
    logger.info(f"--- Ball experiment started: f0={f0.render()}, deg={deg0.value}, {count} samples ---")

    for i in range(1, count + 1):
        seed, eps = derive_sample(master_seed, i, epsilon_max)
        g = Perturb(seed, eps, f0)
        start = time.perf_counter()
        try:
            result = ball_certificate(
                f0, g, params, resolution, t_steps=t_steps, base_degree=deg0, radius=radius
            )
            outcome = "ok" if result.to_dict()["kind"] == "certificate" else "refused"
            payload = result.to_dict()
        except SphereDegreeError as exc:
            outcome, payload = exc.kind, {"message": str(exc)}
            logger.warning(f"Sample {i}: eps={eps:.4f} -> {exc.kind} ({exc})")
        wall_ms = (time.perf_counter() - start) * 1000
        yield SampleOutcome(i, seed, eps, g.render(), outcome, payload, wall_ms)


# ==========================================
# 반복사상 탐침
# ==========================================
def random_iterate(rng, dim, max_exponent=3):
    """
    시드 난수로 만든 연속사상 f 와 n ∈ [2, max_exponent] 의 f^n.
    S^2 에서는 차수가 과도하게 커지지 않도록 |k| <= 2.
    """
    k_max = 3 if dim == 1 else 2
    kind = int(rng.integers(0, 4))
    k = int(rng.integers(-k_max, k_max + 1))
    if kind == 0:
        f = Pow(k)
    elif kind == 1:
        f = Compose(Rot(float(rng.uniform(0, 2 * np.pi))), Pow(k))
    elif kind == 2:
        f = Compose(Conj(), Pow(k))
    else:
        f = Perturb(int(rng.integers(0, 2**63)), float(rng.uniform(0, 0.5)), Pow(k))
    if dim == 2:
        f = Susp(f)
    n = int(rng.integers(2, max_exponent + 1))
    return Iterate(n, f)


def probe_iterates(
    dim,
    count,
    master_seed,
    params=None,
    resolution=None,
    base_degree=2,
    max_exponent=3,
    radius=BALL_RADIUS,
):
    """
    반복사상 f^n 은 차수가 k^n 이므로 deg f0 = l (완전거듭제곱 아님) 과 다르고,
    차수가 다른 두 사상은 어딘가에서 서로 대척점을 취하므로 sup 거리는 2 이다.
    각 표본이 완전거듭제곱 증인을 갖고 표본 거리 >= radius 이면 ok.
    """
    if is_perfect_power(base_degree) is not None:
        raise DomainError(f"probe base degree {base_degree} is a perfect power")
    params = params or DegreeParams()
    f0 = base_map(dim, base_degree)
    resolution = resolution or params.initial_for(dim)
    logger.info(f"--- Iterate probe started: f0={f0.render()}, {count} samples ---")

    for i in range(1, count + 1):
        rng = np.random.default_rng([int(master_seed), int(i)])
        h = random_iterate(rng, dim, max_exponent)
        start = time.perf_counter()
        try:
            deg = degree(h, params)
            witness = is_perfect_power(deg.value)
            dist = sup_distance(f0, h, resolution)
            outside = dist.sampled_max >= radius
            outcome = "ok" if witness is not None and outside else "violation"
            payload = {
                "degree": deg.to_dict(),
                "witness": None if witness is None else witness.to_dict(),
                "distance": dist.to_dict(),
                "outside_ball": outside,
            }
            if outcome != "ok":
                logger.warning(f"Sample {i}: {h.render()} degree={deg.value} distance={dist.sampled_max:.4f}")
        except SphereDegreeError as exc:
            outcome, payload = exc.kind, {"message": str(exc)}
            logger.warning(f"Sample {i}: {h.render()} -> {exc.kind} ({exc})")
        wall_ms = (time.perf_counter() - start) * 1000
        yield SampleOutcome(i, 0, 0.0, h.render(), outcome, payload, wall_ms)


def summarize(samples):
    issued = sum(1 for s in samples if s.outcome == "ok")
    refused = sum(1 for s in samples if s.outcome in ("refused", "violation"))
    return {"issued": issued, "refused": refused, "errors": len(samples) - issued - refused}
