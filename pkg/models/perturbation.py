# models/perturbation.py
"""
시드로 결정되는 매끄러운 유계 벡터장 V: S^m -> R^{m+1}, |V(x)|_2 <= 1.

각 성분은 좌표에 대한 저차 삼각다항식
    V_c(x) = sum_j a_{c,j} cos(w_j . x + b_{c,j}) / S
이고 S = sqrt(sum_c (sum_j |a_{c,j}|)^2) 는 계수 l1 합으로 만든 상한이다.
"""
from dataclasses import dataclass
from functools import lru_cache

import numpy as np

N_TERMS = 6
MAX_FREQUENCY = 2


@dataclass(frozen=True, eq=False)
class PerturbationField:
    seed: int
    dim: int
    frequencies: np.ndarray  # (N_TERMS, m+1) 정수 진동수
    amplitudes: np.ndarray  # (m+1, N_TERMS)
    phases: np.ndarray  # (m+1, N_TERMS)
    scale: float

    def __call__(self, X):
        X = np.atleast_2d(np.asarray(X, dtype=float))
        arg = X @ self.frequencies.T  # (n, N_TERMS)
        out = np.empty_like(X)
        for c in range(self.dim + 1):
            out[:, c] = np.cos(arg + self.phases[c]) @ self.amplitudes[c]
        return out / self.scale

    def bound(self):
        """계수로부터 얻는 sup |V| 의 상한 (정의상 1)"""
        return float(np.sqrt(np.sum(np.abs(self.amplitudes).sum(axis=1) ** 2)) / self.scale)


@lru_cache(maxsize=256)
def perturbation_field(seed, dim):
    rng = np.random.default_rng(int(seed))
    size = dim + 1

    # 0 벡터가 아닌 진동수만 사용 (상수항은 f(x) 를 한 방향으로 밀기만 함)
    freqs = rng.integers(-MAX_FREQUENCY, MAX_FREQUENCY + 1, size=(N_TERMS, size))
    for j in range(N_TERMS):
        while not freqs[j].any():
            freqs[j] = rng.integers(-MAX_FREQUENCY, MAX_FREQUENCY + 1, size=size)

    amps = rng.uniform(-1.0, 1.0, size=(size, N_TERMS))
    phases = rng.uniform(0.0, 2 * np.pi, size=(size, N_TERMS))
    scale = float(np.sqrt(np.sum(np.abs(amps).sum(axis=1) ** 2)))
    return PerturbationField(int(seed), dim, freqs.astype(float), amps, phases, scale)
