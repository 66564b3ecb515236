# models/errors.py
"""
차수 계산 / 인증서 발급 과정의 예외 모음.

각 클래스의 `kind` 는 CLI 출력의 outcome 필드에 그대로 기록된다.
"""


class SphereDegreeError(Exception):
    kind = "Error"


class NearZeroVector(SphereDegreeError, ValueError):
    kind = "NearZeroVector"

    def __init__(self, norm, threshold):
        self.norm = float(norm)
        self.threshold = float(threshold)
        super().__init__(
            f"vector norm {self.norm:.3e} <= {self.threshold:.1e}, cannot project to sphere"
        )


class DimensionMismatch(SphereDegreeError, ValueError):
    kind = "DimensionMismatch"


class InvalidResolution(SphereDegreeError, ValueError):
    kind = "InvalidResolution"


class MapSyntaxError(SphereDegreeError, ValueError):
    kind = "SyntaxError"

    def __init__(self, message, position):
        self.message = message
        self.position = position
        super().__init__(f"col {position}: {message}")


class DomainError(SphereDegreeError, ValueError):
    kind = "DomainError"


class ResolutionExceeded(SphereDegreeError, RuntimeError):
    kind = "ResolutionExceeded"


class SymbolicNumericMismatch(SphereDegreeError, RuntimeError):
    kind = "SymbolicNumericMismatch"


class InvalidBlend(SphereDegreeError, ValueError):
    kind = "InvalidBlend"


class DistanceTooLarge(SphereDegreeError):
    kind = "DistanceTooLarge"


class HomotopyInvalid(SphereDegreeError):
    kind = "HomotopyInvalid"


class DegreeInconsistency(SphereDegreeError, RuntimeError):
    kind = "DegreeInconsistency"
