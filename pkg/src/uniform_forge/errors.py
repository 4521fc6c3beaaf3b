"""Exception types shared across the package."""

from __future__ import annotations


class UniformForgeError(Exception):
    """Base class for all package errors."""


class WindowTooSmall(UniformForgeError):
    """No index of the system has height at most the requested t."""


class SuccessorNotFound(UniformForgeError):
    def __init__(self, budget: int, detail: str = ""):
        super().__init__(f"no successor slice within {budget} shells{': ' + detail if detail else ''}")
        self.budget = budget


class NotAligned(UniformForgeError):
    """The slice cannot produce an index of the requested system."""


class ShrinkStalled(UniformForgeError):
    """No sub-box meeting the avoidance and distance conditions was found."""


class ResonantInput(UniformForgeError):
    """The input enclosure admits an exact resonance (psi_inf reached 0)."""


class GapFound(UniformForgeError):
    def __init__(self, t, detail: str = ""):
        super().__init__(f"certificate gap at t={t}{': ' + detail if detail else ''}")
        self.t = t
        self.detail = detail


class InexactRoot(UniformForgeError):
    """An exact-mode computation needed an irrational root."""


class NotFound(UniformForgeError):
    """Exhaustive dual-point search found nothing."""

    def __init__(self, message: str, instance: dict | None = None):
        super().__init__(message)
        self.instance = instance or {}


class ConfigError(UniformForgeError):
    """Invalid descriptor or command-line configuration."""
