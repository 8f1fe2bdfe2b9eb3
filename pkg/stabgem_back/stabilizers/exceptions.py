"""
Error hierarchy for the stabilizers app.

Every error carries the process exit code the management command should
return for it: 3 for certificate failures, 2 for everything else.
"""

from __future__ import annotations

from typing import Any


class StabGemError(Exception):
    """Base class for all domain errors."""

    exit_code = 2


class InputError(StabGemError, ValueError):
    """Malformed or inconsistent input (lengths, paths, overlapping regions)."""


class ConfigurationError(StabGemError):
    """Parameters that cannot describe a valid lattice, mesh or code."""


class CodeValidationError(InputError):
    """A code or circuit file failed validation."""

    def __init__(self, message: str, detail: Any = None):
        super().__init__(message)
        self.detail = detail


class UnsupportedGateError(InputError):
    """Gate outside the Clifford set handled by the exact engine."""


class MembershipError(StabGemError):
    """Operator expected to be a stabilizer group element is not one."""


class NoLogicalOperatorsError(StabGemError):
    """The code encodes no logical qubits (k = 0)."""


class CleaningFailure(StabGemError):
    """A region could not be cleaned because it supports a logical operator."""

    def __init__(self, message: str, witness: Any = None):
        super().__init__(message)
        self.witness = witness


class FeasibilityError(StabGemError):
    """A construction's geometric preconditions are not met."""

    def __init__(self, message: str, constraint: str | None = None):
        super().__init__(message)
        self.constraint = constraint


class ConstructionError(StabGemError):
    """A synthesis pipeline step failed its verification."""

    def __init__(self, message: str, step: str | None = None):
        super().__init__(message)
        self.step = step


class DeformationInfeasible(StabGemError):
    """No stabilizer-equivalent string avoids the forbidden region."""


class AlgebraError(StabGemError):
    """Internal contradiction between two exact computations."""


class CapabilityError(StabGemError):
    """The instance is outside what the requested engine can handle."""


class PreconditionError(StabGemError):
    """An operation was called on inputs violating its documented precondition."""


class CertificateFailure(StabGemError):
    """A certificate could not be completed for some patch."""

    exit_code = 3

    def __init__(self, message: str, patch: Any = None):
        super().__init__(message)
        self.patch = patch
