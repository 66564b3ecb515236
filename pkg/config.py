# config.py
import numpy as np


class Config:
    def __init__(self):
        # --- 차수 계산 (None 이면 차원별 기본값: S^1 256/16384, S^2 128/1024) ---
        self.initial_resolution = None
        self.max_resolution = None
        self.tolerance = 0.1  # 반올림 전 허용 잔차
        self.step_angle_cap = np.pi / 2  # winding 인접 샘플 간 최대 각 증분

        # --- sup 거리 / 호모토피 H_g ---
        self.distance_resolution = {1: 1024, 2: 128}
        self.t_steps = 16
        self.ball_radius = 1.0  # B_1(f0)

        # --- 공 실험: f0 = z^l 주변 교란 ---
        self.dim = 1
        self.count = 100
        self.epsilon_max = 0.9
        self.seed = 1
        self.base_degree = 2  # 완전거듭제곱이 아닌 임의의 정수 가능

        # --- 반복사상 탐침 ---
        self.probe_count = 20
        self.max_exponent = 3

    def grid_resolution(self, dim):
        """거리/호모토피 격자: --resolution 이 주어지면 그것을 사용"""
        return self.initial_resolution or self.distance_resolution[dim]
