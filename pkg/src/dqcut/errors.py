"""Exception types shared across the toolkit."""


class DqcutError(Exception):
    """Base class for all toolkit errors."""


class QasmError(DqcutError):
    """Raised on malformed or unsupported OpenQASM input."""

    def __init__(self, message: str, line: int | None = None, column: int | None = None):
        self.line = line
        self.column = column
        loc = ""
        if line is not None:
            loc = f" (line {line}" + (f", col {column}" if column is not None else "") + ")"
        super().__init__(message + loc)


class TopologyError(DqcutError):
    """Invalid DQC topology description."""


class CutInfeasibleError(DqcutError):
    """No cutting solution exists for the given circuit and topology."""


class BudgetExhaustedError(DqcutError):
    """Search budget ran out before any goal solution was found."""


class VariantLimitError(DqcutError):
    """Variant enumeration would exceed the configured cap."""


class SimLimitError(DqcutError):
    """Simulation request exceeds the configured qubit or branch limits."""


class MappingError(DqcutError):
    """Circuit cannot be placed or routed on the topology."""
