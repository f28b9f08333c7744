"""Typed failures raised by the harness itself.

Pipeline runs never raise these: conversion failures are data, recorded as
stage outcomes in the manifest.  These exceptions cover the harness's own
contracts (generation budgets, dump dtypes).
"""

from __future__ import annotations


class HarnessError(Exception):
    """Base class for harness failures."""


class GenerationFailure(HarnessError):
    """No valid model (or family) could be produced within the retry budget."""

    def __init__(self, seed: int, message: str):
        super().__init__(message)
        self.seed = seed


class UnsupportedDtype(HarnessError):
    def __init__(self, dtype: str):
        super().__init__(f"unsupported tensor dtype {dtype!r}")
        self.dtype = dtype
