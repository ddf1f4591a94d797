"""Enumeration budgets.

Budgets can be overridden per call, or globally through the environment
variables ``QLEAK_BUDGET_SUBSPACES``, ``QLEAK_BUDGET_CODEWORDS`` and
``QLEAK_BUDGET_GROUP``.
"""

import os

DEFAULT_SUBSPACE_BUDGET = 10**6
DEFAULT_CODEWORD_BUDGET = 2**20
DEFAULT_GROUP_BUDGET = 10**6


def _env_int(name, default):
    raw = os.environ.get(name)
    if raw is None or raw == "":
        return default
    value = int(raw)
    if value <= 0:
        raise ValueError(f"{name} must be positive, got {value}")
    return value


def subspace_budget(override=None):
    if override is not None:
        return override
    return _env_int("QLEAK_BUDGET_SUBSPACES", DEFAULT_SUBSPACE_BUDGET)


def codeword_budget(override=None):
    if override is not None:
        return override
    return _env_int("QLEAK_BUDGET_CODEWORDS", DEFAULT_CODEWORD_BUDGET)


def group_budget(override=None):
    if override is not None:
        return override
    return _env_int("QLEAK_BUDGET_GROUP", DEFAULT_GROUP_BUDGET)
