"""Signed log-domain scalars and arrays.

Values that grow like ``exp(r)`` (the eigenfunction and everything built on
it) overflow doubles near ``r ~ 709``; carrying ``(log|x|, sign)`` keeps them
representable.  Only reporting code should ever call :attr:`LogValue.value`.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np


@dataclass(frozen=True)
class LogValue:
    """A real number stored as ``sign * exp(log_magnitude)``.

    ``sign`` is +1, 0 or -1.  When ``sign == 0`` the magnitude is ignored.
    Both fields may be numpy arrays of the same shape.
    """

    log_magnitude: float | np.ndarray
    sign: int | np.ndarray = 1

    @classmethod
    def from_value(cls, x) -> "LogValue":
        x = np.asarray(x, dtype=float)
        sign = np.sign(x).astype(int)
        with np.errstate(divide="ignore"):
            logm = np.where(sign == 0, -np.inf, np.log(np.abs(x)))
        if logm.ndim == 0:
            return cls(float(logm), int(sign))
        return cls(logm, sign)

    @classmethod
    def zero(cls) -> "LogValue":
        return cls(-np.inf, 0)

    @property
    def value(self):
        """Linear-scale value (may overflow to inf; meant for reporting)."""
        with np.errstate(over="ignore"):
            out = np.where(np.asarray(self.sign) == 0, 0.0,
                           np.asarray(self.sign) * np.exp(self.log_magnitude))
        return float(out) if out.ndim == 0 else out

    def __mul__(self, other):
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        return _make(np.add(self.log_magnitude, other.log_magnitude),
                     np.multiply(self.sign, other.sign))

    __rmul__ = __mul__

    def __truediv__(self, other):
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        if np.any(np.asarray(other.sign) == 0):
            raise ZeroDivisionError("division by a zero LogValue")
        return _make(np.subtract(self.log_magnitude, other.log_magnitude),
                     np.multiply(self.sign, other.sign))

    def __pow__(self, exponent: float):
        if np.any(np.asarray(self.sign) < 0):
            raise ValueError("real power of a negative LogValue")
        return _make(np.multiply(self.log_magnitude, exponent), self.sign)

    def __neg__(self):
        return _make(self.log_magnitude, np.negative(self.sign))

    def __add__(self, other):
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        return _signed_logaddexp(self, other)

    __radd__ = __add__

    def __sub__(self, other):
        if not isinstance(other, LogValue):
            other = LogValue.from_value(other)
        return _signed_logaddexp(self, -other)

    def log(self):
        """Natural log of a positive value, as a plain float/array."""
        if np.any(np.asarray(self.sign) <= 0):
            raise ValueError("log of a nonpositive LogValue")
        return self.log_magnitude


def _make(logm, sign) -> LogValue:
    logm = np.asarray(logm, dtype=float)
    sign = np.asarray(sign).astype(int)
    if logm.ndim == 0 and sign.ndim == 0:
        return LogValue(float(logm), int(sign))
    logm, sign = np.broadcast_arrays(logm, sign)
    return LogValue(logm.copy(), sign.copy())


def _signed_logaddexp(a: LogValue, b: LogValue) -> LogValue:
    la, lb = np.broadcast_arrays(np.asarray(a.log_magnitude, dtype=float),
                                 np.asarray(b.log_magnitude, dtype=float))
    sa, sb = np.broadcast_arrays(np.asarray(a.sign), np.asarray(b.sign))
    la = np.where(sa == 0, -np.inf, la)
    lb = np.where(sb == 0, -np.inf, lb)
    hi = np.maximum(la, lb)
    lo = np.minimum(la, lb)
    s_hi = np.where(la >= lb, sa, sb)
    s_lo = np.where(la >= lb, sb, sa)
    with np.errstate(invalid="ignore", divide="ignore"):
        d = np.where(np.isfinite(hi), lo - hi, -np.inf)
        same = s_hi * s_lo >= 0
        mag = np.where(same, hi + np.log1p(np.exp(d)), hi + np.log1p(-np.exp(d)))
    sign = np.where(s_hi == 0, s_lo, s_hi)
    sign = np.where(np.isneginf(mag) | np.isnan(mag), 0, sign)
    mag = np.where(sign == 0, -np.inf, mag)
    return _make(mag, sign)
