"""Exception taxonomy shared by all modules.

Three coarse families matter for the CLI exit-code contract:
usage problems (bad input text, bad flags), semantic failures
(a computation is genuinely undefined in the clopen algebra),
and validation failures (a model or backend does not satisfy
the modal-space requirements).
"""


class ClopenMuError(Exception):
    """Base class for all package errors."""


class UsageError(ClopenMuError):
    """Malformed input: formula text, model files, CLI arguments."""


class SemanticError(ClopenMuError):
    """Evaluation-level failure; the requested value does not exist or
    cannot be certified within the configured budgets."""


class ValidationError(ClopenMuError):
    """Model or backend violates a structural requirement."""


# -- usage ------------------------------------------------------------------

class FormulaSyntaxError(UsageError):
    def __init__(self, message, position):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class NegativeBoundVar(UsageError):
    def __init__(self, var):
        super().__init__(f"bound variable {var!r} occurs under a negation")
        self.var = var


class ModelFormatError(UsageError):
    pass


# -- semantic ---------------------------------------------------------------

class CarrierMismatch(SemanticError):
    pass


class NotClean(SemanticError):
    pass


class UnboundVariable(SemanticError):
    def __init__(self, var):
        super().__init__(f"variable {var!r} is neither bound nor valued")
        self.var = var


class NoLeastClopenSuperset(SemanticError):
    pass


class NotMonotone(SemanticError):
    pass


class JoinUndefined(SemanticError):
    """The union of the chain has no least clopen upper bound."""


class PatternUndetected(SemanticError):
    """Budget exhausted and the stage increments follow no eventual
    translation pattern."""


class NotRepresentable(SemanticError):
    """The plain (powerset) limit leaves the descriptor class."""


class BudgetExhausted(SemanticError):
    pass


class MonotonicityViolation(SemanticError):
    pass


class PointOutsideLfp(SemanticError):
    pass


class PointOutsideGfp(SemanticError):
    pass


class NotWinningAt(SemanticError):
    def __init__(self, position):
        super().__init__(f"exists has no winning strategy at {position}")
        self.position = position


class UndefinedStrategyAt(SemanticError):
    def __init__(self, position):
        super().__init__(f"strategy is undefined at position {position}")
        self.position = position


# -- validation -------------------------------------------------------------

class InfiniteEnumeration(ValidationError):
    pass


class SymbolicNotSupported(ValidationError):
    pass


class ModalSpaceViolation(ValidationError):
    """A diamond application broke clopenness at runtime; the relation
    presentation does not describe a modal space."""
