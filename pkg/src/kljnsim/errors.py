"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """A noise spec, scheme, session, or experiment config violates an invariant."""


class UnphysicalSchemeError(ValueError):
    """A resistor quadruple admits no physical (positive) noise-level solution."""

    def __init__(self, branches, message=None):
        self.branches = tuple(branches)
        if message is None:
            message = "unphysical solution: non-positive mean-square voltage for branch(es) %s" % (
                ", ".join(self.branches)
            )
        super().__init__(message)


class CalibrationError(RuntimeError):
    """Eavesdropper calibration could not produce usable statistics."""
