# models/map_dsl.py
"""
S^1 / S^2 자기사상(self-map)을 기술하는 s-expression 언어.

    expr := (id DIM) | (antipode DIM) | (conj) | (pow INT) | (rot FLOAT)
          | (rot3 X Y Z ANGLE) | (susp expr) | (compose expr expr)
          | (iterate UINT expr) | (blend FLOAT expr expr)
          | (perturb UINT64 FLOAT expr)

노드는 불변 dataclass 이며, 생성 시점에 차원과 정의역을 검사하므로
만들어진 MapExpr 는 항상 well-formed 이다.
평가는 (n, m+1) 점 배열 단위로 벡터화되어 있다.
"""
import math
import re
from dataclasses import dataclass, field

import numpy as np
from scipy.spatial.transform import Rotation

from models.errors import DimensionMismatch, DomainError, MapSyntaxError
from models.perturbation import perturbation_field
from models.sphere import EPS_NORMALIZE, NORM_TOLERANCE, SpherePoint, normalize_rows

UINT64_MAX = 2**64 - 1


class MapExpr:
    """모든 사상 노드의 공통 부모"""

    dim = None

    def children(self):
        return ()

    def _apply(self, X):
        raise NotImplementedError

    def _symbolic(self):
        raise NotImplementedError

    def render(self):
        raise NotImplementedError

    def __str__(self):
        return self.render()


def _same_dim(f, g, what):
    if f.dim != g.dim:
        raise DimensionMismatch(f"{what}: S^{f.dim} map vs S^{g.dim} map")


def _fmt(x):
    return repr(float(x))


@dataclass(frozen=True)
class Id(MapExpr):
    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"id: dimension must be 1 or 2, got {self.dim}")

    def _apply(self, X):
        return X

    def _symbolic(self):
        return 1

    def render(self):
        return f"(id {self.dim})"


@dataclass(frozen=True)
class Antipode(MapExpr):
    dim: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise DomainError(f"antipode: dimension must be 1 or 2, got {self.dim}")

    def _apply(self, X):
        return -X

    def _symbolic(self):
        # S^1 에서는 π 회전, S^2 에서는 방향 반전
        return 1 if self.dim == 1 else -1

    def render(self):
        return f"(antipode {self.dim})"


@dataclass(frozen=True)
class Conj(MapExpr):
    dim = 1

    def _apply(self, X):
        return X * np.array([1.0, -1.0])

    def _symbolic(self):
        return -1

    def render(self):
        return "(conj)"


@dataclass(frozen=True)
class Pow(MapExpr):
    k: int
    dim = 1

    def _apply(self, X):
        phi = np.arctan2(X[:, 1], X[:, 0]) * self.k
        return np.column_stack([np.cos(phi), np.sin(phi)])

    def _symbolic(self):
        return self.k

    def render(self):
        return f"(pow {self.k})"


@dataclass(frozen=True)
class Rot(MapExpr):
    alpha: float
    dim = 1

    def _apply(self, X):
        c, s = math.cos(self.alpha), math.sin(self.alpha)
        return X @ np.array([[c, s], [-s, c]])

    def _symbolic(self):
        return 1

    def render(self):
        return f"(rot {_fmt(self.alpha)})"


@dataclass(frozen=True)
class Rot3(MapExpr):
    axis: tuple
    alpha: float
    dim = 2
    _rotation: object = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        axis = np.asarray(self.axis, dtype=float)
        if axis.shape != (3,):
            raise DomainError("rot3: axis needs three components")
        if not np.isfinite(axis).all():
            raise DomainError("rot3: axis must be finite")
        # 1e308 급 성분: max|a_i| 로 나눈 뒤 노름
        scale = float(np.abs(axis).max())
        if scale == 0.0:
            raise DomainError("rot3: axis must be nonzero")
        unit_norm = float(np.linalg.norm(axis / scale))
        if scale * unit_norm <= EPS_NORMALIZE:
            raise DomainError("rot3: axis must be nonzero")
        # 단위 축은 그대로 보존: parse(render(e)) == e
        if abs(scale * unit_norm - 1.0) > NORM_TOLERANCE:
            axis = (axis / scale) / unit_norm
        object.__setattr__(self, "axis", tuple(float(a) for a in axis))
        object.__setattr__(self, "_rotation", Rotation.from_rotvec(axis * self.alpha))

    def _apply(self, X):
        return self._rotation.apply(X)

    def _symbolic(self):
        return 1

    def render(self):
        x, y, z = self.axis
        return f"(rot3 {_fmt(x)} {_fmt(y)} {_fmt(z)} {_fmt(self.alpha)})"


@dataclass(frozen=True)
class Susp(MapExpr):
    """
    S^1 사상 f 의 현수(suspension).
    (sin θ ω, cos θ) -> (sin θ f(ω), cos θ), 극점은 고정점.
    """

    inner: MapExpr
    dim = 2

    def __post_init__(self):
        if self.inner.dim != 1:
            raise DimensionMismatch(f"susp: inner map must act on S^1, got S^{self.inner.dim}")

    def children(self):
        return (self.inner,)

    def _apply(self, X):
        r = np.hypot(X[:, 0], X[:, 1])
        # 극점에서는 ω 가 정의되지 않지만 sin θ = 0 이 곱해지므로 아무 값이나 무방
        at_pole = r < 1e-300
        safe_r = np.where(at_pole, 1.0, r)
        omega = np.where(at_pole[:, None], [1.0, 0.0], X[:, :2] / safe_r[:, None])
        W = self.inner._apply(omega)
        return np.column_stack([r[:, None] * W, X[:, 2]])

    def _symbolic(self):
        return self.inner._symbolic()

    def render(self):
        return f"(susp {self.inner.render()})"


@dataclass(frozen=True)
class Compose(MapExpr):
    """f ∘ g"""

    f: MapExpr
    g: MapExpr

    def __post_init__(self):
        _same_dim(self.f, self.g, "compose")

    @property
    def dim(self):
        return self.f.dim

    def children(self):
        return (self.f, self.g)

    def _apply(self, X):
        return self.f._apply(self.g._apply(X))

    def _symbolic(self):
        a, b = self.f._symbolic(), self.g._symbolic()
        if a is None or b is None:
            return None
        return a * b

    def render(self):
        return f"(compose {self.f.render()} {self.g.render()})"


@dataclass(frozen=True)
class Iterate(MapExpr):
    """f^n = f ∘ f^{n-1}, f^0 = id"""

    n: int
    f: MapExpr

    def __post_init__(self):
        if self.n < 0:
            raise DomainError(f"iterate: exponent must be >= 0, got {self.n}")

    @property
    def dim(self):
        return self.f.dim

    def children(self):
        return (self.f,)

    def _apply(self, X):
        for _ in range(self.n):
            X = self.f._apply(X)
        return X

    def _symbolic(self):
        if self.n == 0:
            return 1
        d = self.f._symbolic()
        return None if d is None else d**self.n

    def render(self):
        return f"(iterate {self.n} {self.f.render()})"


@dataclass(frozen=True)
class Blend(MapExpr):
    """x -> normalize((1-t) f(x) + t g(x)), 직선 호모토피의 t 단면"""

    t: float
    f: MapExpr
    g: MapExpr

    def __post_init__(self):
        if not 0.0 <= self.t <= 1.0:
            raise DomainError(f"blend: t must lie in [0, 1], got {self.t}")
        _same_dim(self.f, self.g, "blend")

    @property
    def dim(self):
        return self.f.dim

    def children(self):
        return (self.f, self.g)

    def raw(self, X):
        """정규화 전 (1-t) f(x) + t g(x)"""
        return (1.0 - self.t) * self.f._apply(X) + self.t * self.g._apply(X)

    def _apply(self, X):
        # 끝점은 정확히 f, g 와 일치
        if self.t == 0.0:
            return self.f._apply(X)
        if self.t == 1.0:
            return self.g._apply(X)
        return normalize_rows(self.raw(X))

    def _symbolic(self):
        # 분모가 0 이 되지 않는지는 전역 조건이라 AST 만으로 알 수 없음
        return None

    def render(self):
        return f"(blend {_fmt(self.t)} {self.f.render()} {self.g.render()})"


@dataclass(frozen=True)
class Perturb(MapExpr):
    """x -> normalize(f(x) + ε V_seed(x)), |V| <= 1, ε < 1"""

    seed: int
    eps: float
    f: MapExpr

    def __post_init__(self):
        if not 0 <= self.seed <= UINT64_MAX:
            raise DomainError(f"perturb: seed must be a 64-bit unsigned integer, got {self.seed}")
        if not 0.0 <= self.eps < 1.0:
            raise DomainError(f"perturb: epsilon must lie in [0, 1), got {self.eps}")

    @property
    def dim(self):
        return self.f.dim

    def children(self):
        return (self.f,)

    def field(self):
        return perturbation_field(self.seed, self.dim)

    def _apply(self, X):
        if self.eps == 0.0:
            return self.f._apply(X)
        return normalize_rows(self.f._apply(X) + self.eps * self.field()(X))

    def _symbolic(self):
        # |f + sεV| >= 1 - ε > 0 이므로 f 와 호모토픽
        return self.f._symbolic()

    def render(self):
        return f"(perturb {self.seed} {_fmt(self.eps)} {self.f.render()})"


# ==========================================
# 공개 연산
# ==========================================
def dimension(e):
    return e.dim


def symbolic_degree(e):
    """알려진 경우 정수 차수, Blend 가 섞여 있으면 None (Unknown)"""
    return e._symbolic()


def render(e):
    return e.render()


def evaluate_many(e, X):
    X = np.atleast_2d(np.asarray(X, dtype=float))
    if X.shape[1] != e.dim + 1:
        raise DimensionMismatch(f"S^{e.dim} map evaluated on points of R^{X.shape[1]}")
    return e._apply(X)


def evaluate(e, x):
    if x.dim != e.dim:
        raise DimensionMismatch(f"S^{e.dim} map evaluated at an S^{x.dim} point")
    y = e._apply(x.array[None, :])[0]
    return SpherePoint(e.dim, tuple(y))


def walk(e):
    """전위 순회로 모든 노드를 생성"""
    yield e
    for child in e.children():
        yield from walk(child)


# ==========================================
# 파서
# ==========================================
_TOKEN_RE = re.compile(r"\(|\)|[^\s()]+")
_INT_RE = re.compile(r"[+-]?\d+$")
_UINT_RE = re.compile(r"\+?\d+$")


class _Parser:
    def __init__(self, text):
        self.text = text
        self.tokens = [(m.group(), m.start() + 1) for m in _TOKEN_RE.finditer(text)]
        self.pos = 0

    def _peek(self):
        if self.pos < len(self.tokens):
            return self.tokens[self.pos]
        return (None, len(self.text) + 1)

    def _next(self, what):
        tok, col = self._peek()
        if tok is None:
            raise MapSyntaxError(f"unexpected end of input, expected {what}", col)
        self.pos += 1
        return tok, col

    def _expect(self, literal):
        tok, col = self._next(f"'{literal}'")
        if tok != literal:
            raise MapSyntaxError(f"expected '{literal}', got '{tok}'", col)

    def _atom(self, what):
        tok, col = self._next(what)
        if tok in ("(", ")"):
            raise MapSyntaxError(f"expected {what}, got '{tok}'", col)
        return tok, col

    def _int(self):
        tok, col = self._atom("integer")
        if not _INT_RE.match(tok):
            raise MapSyntaxError(f"invalid integer '{tok}'", col)
        return int(tok)

    def _uint(self, what="unsigned integer"):
        tok, col = self._atom(what)
        if not _UINT_RE.match(tok):
            raise MapSyntaxError(f"invalid {what} '{tok}'", col)
        return int(tok)

    def _float(self):
        tok, col = self._atom("number")
        try:
            value = float(tok)
        except ValueError:
            raise MapSyntaxError(f"invalid number '{tok}'", col) from None
        if not math.isfinite(value):
            raise MapSyntaxError(f"number must be finite, got '{tok}'", col)
        return value

    def _dim(self):
        tok, col = self._atom("dimension")
        if tok not in ("1", "2"):
            raise MapSyntaxError(f"dimension must be 1 or 2, got '{tok}'", col)
        return int(tok)

    def parse(self):
        expr = self.expr()
        tok, col = self._peek()
        if tok is not None:
            raise MapSyntaxError(f"trailing input '{tok}'", col)
        return expr

    def expr(self):
        self._expect("(")
        head, col = self._atom("constructor name")
        builder = self._BUILDERS.get(head)
        if builder is None:
            raise MapSyntaxError(f"unknown constructor '{head}'", col)
        node = builder(self)
        self._expect(")")
        return node

    _BUILDERS = {
        "id": lambda p: Id(p._dim()),
        "antipode": lambda p: Antipode(p._dim()),
        "conj": lambda p: Conj(),
        "pow": lambda p: Pow(p._int()),
        "rot": lambda p: Rot(p._float()),
        "rot3": lambda p: Rot3((p._float(), p._float(), p._float()), p._float()),
        "susp": lambda p: Susp(p.expr()),
        "compose": lambda p: Compose(p.expr(), p.expr()),
        "iterate": lambda p: Iterate(p._uint(), p.expr()),
        "blend": lambda p: Blend(p._float(), p.expr(), p.expr()),
        "perturb": lambda p: Perturb(p._uint("seed"), p._float(), p.expr()),
    }


def parse(text):
    """
    s-expression 한 개를 MapExpr 로 변환.
    문법 오류는 MapSyntaxError, 차원 불일치는 DimensionMismatch,
    정의역 위반(ε >= 1, t ∉ [0,1], 64비트 초과 seed 등)은 DomainError.
    """
    return _Parser(text).parse()


def read_expressions(path):
    """배치 파일: 한 줄에 식 하나, '#' 주석과 빈 줄은 건너뜀. (줄 번호, 원문) 을 반환"""
    entries = []
    with open(path, encoding="utf-8") as fh:
        for line_no, line in enumerate(fh, start=1):
            text = line.strip()
            if not text or text.startswith("#"):
                continue
            entries.append((line_no, text))
    return entries
