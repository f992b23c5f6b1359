"""Exception types shared across the package."""

from __future__ import annotations


class FluxlabError(Exception):
    """Base class for all package-specific failures."""


class DimensionTooSmall(FluxlabError):
    """Lattice dimension below the admitted minimum."""


class SizeExceedsCap(FluxlabError):
    """Requested lattice needs more fermionic modes than the configured cap."""


class NotBlockDiagonal(FluxlabError):
    """Operator leaks between particle-number sectors beyond tolerance."""


class InvalidPath(FluxlabError):
    """Site sequence contains a step that is not a nearest-neighbor bond."""


class UnknownLabel(FluxlabError):
    """Unitary or identity label outside the supported set."""


class DegenerateToleranceAmbiguity(FluxlabError):
    """Ground-space size changes when the degeneracy tolerance is halved."""


class ConfigError(FluxlabError):
    """One or more configuration problems, each naming the offending key."""

    def __init__(self, problems: list[str]):
        self.problems = list(problems)
        super().__init__("; ".join(self.problems))
