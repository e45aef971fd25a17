"""Exception types shared across the package."""


class CorrDynError(Exception):
    """Base class for all errors raised by corrdyn."""


class NoConvergence(CorrDynError):
    """Newton iteration failed to reach the requested tolerance."""


class NotMinimal(CorrDynError):
    """Preperiod or period admits a smaller value for the same parameter."""


class NotStrictlyPreperiodic(CorrDynError):
    """Critical orbit is periodic (or lands on a critical cycle)."""


class UniquenessFailed(CorrDynError):
    """Orbit-engine found a number of surviving branches different from one."""


class ResidualTooLarge(CorrDynError):
    """Input parameter does not satisfy the closing condition it claims."""


class NotRepelling(CorrDynError):
    """Cycle multiplier has modulus <= 1."""


class BranchJump(CorrDynError):
    """Branch continuation became ambiguous (two images near the target)."""


class PatternMismatch(CorrDynError):
    """Engine-detected orbit type or sign pattern differs from the requested one."""


class NoClosure(CorrDynError):
    """No orbit recurrence detected within the allowed horizon."""


class EmptyCloud(CorrDynError):
    """A point-cloud operation received or produced no points."""


class DivergedFromDomain(CorrDynError):
    """A point left the region where the linearizer is evaluable."""


class ResolutionTooCoarse(CorrDynError):
    """Cloud resolution is insufficient for the requested magnification."""
