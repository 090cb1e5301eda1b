from __future__ import annotations


class DslError(Exception): ...


class DomainError(DslError, ValueError): ...


class ContractError(DslError, ValueError): ...


class NumericalError(DslError, ArithmeticError): ...


class QuadratureError(NumericalError): ...


class FactorizationError(NumericalError):
    def __init__(self, pivot: int, message: str | None = None):
        self.pivot = pivot
        super().__init__(message or f"Cholesky factorization failed at leading minor {pivot}")


class EmbeddingError(NumericalError):
    def __init__(self, eigenvalue: float, message: str | None = None):
        self.eigenvalue = eigenvalue
        super().__init__(message or f"Circulant embedding has negative eigenvalue {eigenvalue:.3e}")


class SingularPointError(DomainError):
    def __init__(self, message: str = "integrand is singular at this point (lambda*rho - mu^2 <= 0)"):
        super().__init__(message)
