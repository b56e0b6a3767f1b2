"""Exception hierarchy. Every domain failure derives from :class:`AslError`."""

from __future__ import annotations


class AslError(Exception):
    """Base class for errors raised by the pipeline."""


# logic core
class LogicError(AslError):
    pass


class NonGroundComparison(LogicError):
    """Standard order was asked to compare terms containing variables."""


class UnknownPredicate(LogicError):
    pass


class UnboundArithmetic(LogicError):
    pass


class ArithmeticFault(LogicError):
    pass


class InstantiationError(LogicError):
    pass


class RetractMissing(LogicError):
    pass


# parsing
class AslSyntaxError(AslError):
    def __init__(self, message: str, file: str = "<string>", line: int = 0, column: int = 0):
        super().__init__(f"{file}:{line}:{column}: {message}")
        self.file, self.line, self.column = file, line, column
        self.message = message


class OperatorError(AslSyntaxError):
    pass


class InvalidDescription(AslError):
    def __init__(self, diagnostics):
        self.diagnostics = list(diagnostics)
        lines = "\n".join(str(d) for d in self.diagnostics)
        super().__init__(f"invalid description:\n{lines}")


# interpretation
class RuleActivationError(AslError):
    """A logic-core error raised while activating a rule, with the rule attached."""

    def __init__(self, rule_label: str, cause: Exception):
        super().__init__(f"rule {rule_label}: {cause}")
        self.rule_label = rule_label
        self.cause = cause


class JointActionViolation(AslError):
    pass


class DegenerateDistribution(AslError):
    pass


# building
class NoParticipants(AslError):
    pass


class NoMovers(AslError):
    pass


class NodeBudgetExceeded(AslError):
    pass


# game model / solving
class UnsupportedFormat(AslError):
    pass


class MissingPayoff(AslError):
    pass


class AmbiguousPayoff(AslError):
    pass


class UnsupportedShape(AslError):
    pass


