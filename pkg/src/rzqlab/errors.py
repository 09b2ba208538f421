"""Exception types shared across the package."""


class ConfigurationError(ValueError):
    """Inconsistent grids, array lengths, or run configuration."""


class DomainError(ValueError):
    """An argument is outside the domain an operation supports."""


class DegenerateInputError(ValueError):
    """Input is zero or otherwise carries no usable information."""


class ResolutionError(ValueError):
    """Requested frequency content does not fit on the grid."""


class StabilityError(RuntimeError):
    """Time step exceeds the advective stability ceiling."""

    def __init__(self, dt: float, ceiling: float, t: float):
        super().__init__(
            f"dt={dt:g} exceeds stability ceiling {ceiling:g} at t={t:g}"
        )
        self.dt = dt
        self.ceiling = ceiling
        self.t = t


class SurrogateInvalidError(RuntimeError):
    """Large-box real-line surrogate leaked mass to the boundary."""

    def __init__(self, tail: float, threshold: float):
        super().__init__(
            f"boundary tail {tail:.3e} exceeds threshold {threshold:.3e}; "
            "enlarge the box"
        )
        self.tail = tail
        self.threshold = threshold


class BlowUpError(RuntimeError):
    """Solution norm exploded or became non-finite during time stepping.

    Blow-up is a reported outcome, not a crash: callers are expected to
    catch this and record the event.  Carries the time of failure and the
    last valid state / partial trajectory when available.
    """

    def __init__(self, t: float, last_state=None, trajectory=None):
        super().__init__(f"blow-up signal at t={t:g}")
        self.t = t
        self.last_state = last_state
        self.trajectory = trajectory


class ResolutionWarning(UserWarning):
    """High-frequency spectral content is marginally resolved."""


class BoundaryLeakWarning(UserWarning):
    """Peakon tails are not negligible at the box boundary."""


class NearCollisionWarning(UserWarning):
    """Two peakon positions nearly coincide."""
