"""Domain errors. Each carries the witnessing data named in its message."""


class DomainError(Exception):
    """Base for every error a computation can raise on well-formed input."""

    code = "DomainError"

    def __init__(self, message, **witness):
        super().__init__(message)
        self.witness = witness

    def __str__(self):
        return f"{self.code}: {self.args[0]}"


class ParseError(DomainError):
    code = "ParseError"


class TriangleViolation(DomainError):
    code = "TriangleViolation"


class AsymmetricMatrix(DomainError):
    code = "AsymmetricMatrix"


class NonzeroDiagonal(DomainError):
    code = "NonzeroDiagonal"


class NonPositiveDistance(DomainError):
    code = "NonPositiveDistance"


class NormOverflow(DomainError):
    code = "NormOverflow"


class VocabularyMismatch(DomainError):
    code = "VocabularyMismatch"


class UnsupportedVocabulary(DomainError):
    code = "UnsupportedVocabulary"


class UnboundVariable(DomainError):
    code = "UnboundVariable"


class SemanticsMismatch(DomainError):
    code = "SemanticsMismatch"


class StateSpaceTooLarge(DomainError):
    code = "StateSpaceTooLarge"


class MenuEmpty(DomainError):
    code = "MenuEmpty"


class IllegalMove(DomainError):
    code = "IllegalMove"


class Abort(DomainError):
    code = "Abort"


class NotFullCorrespondence(DomainError):
    code = "NotFullCorrespondence"


class DistortionTooLarge(DomainError):
    code = "DistortionTooLarge"


class EmptySet(DomainError):
    code = "EmptySet"


class UnknownSuite(DomainError):
    code = "UnknownSuite"
