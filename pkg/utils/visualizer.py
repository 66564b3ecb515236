# utils/visualizer.py
import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402


def plot_experiment(samples, save_path, radius=1.0, title=None):
    """
    공 실험 결과 그래프.
    위: ε_i 대비 표본 sup 거리 (인증 / 실패 색 구분, 반지름 기준선)
    아래: 표본별 일관성 차수
    """
    eps = np.array([s.epsilon for s in samples])
    dist = np.array([_distance(s) for s in samples])
    ok = np.array([s.outcome == "ok" for s in samples])

    plt.figure(figsize=(12, 10))

    # 1. 거리 vs 교란 크기
    plt.subplot(2, 1, 1)
    plt.scatter(eps[ok], dist[ok], c="b", s=30, alpha=0.8, label="Certificate issued")
    if (~ok).any():
        plt.scatter(eps[~ok], dist[~ok], c="r", marker="x", s=60, label="Refused / error")
    plt.axhline(y=radius, color="r", linestyle="--", label=f"Ball radius ({radius:g})")
    plt.title(title or "Perturbations of f0: sampled sup distance", fontsize=14)
    plt.xlabel("Perturbation size ε", fontsize=12)
    plt.ylabel("Sampled sup distance", fontsize=12)
    plt.ylim(0, 2.05)
    plt.grid(True)
    plt.legend(loc="upper left")

    # 2. 일관성 차수 (호모토피 불변성)
    plt.subplot(2, 1, 2)
    idx = np.array([s.index for s in samples])
    degs = np.array([_consistency_degree(s) for s in samples], dtype=float)
    plt.plot(idx, degs, "go", markersize=5, label="deg(g)")
    plt.title("Consistency degree per sample", fontsize=14)
    plt.xlabel("Sample index", fontsize=12)
    plt.ylabel("Degree", fontsize=12)
    plt.grid(True)
    plt.legend()

    plt.tight_layout()
    plt.savefig(save_path, dpi=150)
    plt.close()
    return save_path


def _distance(sample):
    ball = sample.payload.get("ball") or {}
    return ball.get("sampled_distance", np.nan)


def _consistency_degree(sample):
    ball = sample.payload.get("ball") or {}
    value = ball.get("consistency_degree")
    return np.nan if value is None else value
