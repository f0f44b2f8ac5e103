"""Compensated, order-deterministic reductions.

The Gamma-sums mix terms across twenty orders of magnitude, so every
reduction in the package goes through the error-free two-sum below and a
fixed pairwise tree. The tree shape depends only on the number of terms,
which keeps results bit-stable however the terms were produced.
"""
import numpy as np

__all__ = [
    "Accumulator",
    "two_sum",
    "pairwise_sum",
    "compensated_sum",
    "block_sum",
]


class Accumulator:
    """Running compensated sum, like math.fsum but incremental (complex-safe)"""

    def __init__(self, y=0.0):
        self._s = complex(y)
        self._t = 0j

    @staticmethod
    def sum(u, v):
        # Error free transformation: u + v = s + t exactly
        s = u + v
        up = s - v
        vpp = s - up
        up -= u
        vpp -= v
        t = -(up + vpp)
        return s, t

    def add(self, y):
        y, u = Accumulator.sum(complex(y), self._t)
        self._s, self._t = Accumulator.sum(y, self._s)
        if self._s == 0:
            self._s = u
        else:
            self._t += u
        return self

    def total(self):
        return self._s + self._t


def two_sum(a, b):
    """Vectorized error-free transformation, returns (a + b, rounding error)"""
    s = a + b
    bp = s - a
    err = (a - (s - bp)) + (b - bp)
    return s, err


def pairwise_sum(terms, axis=-1):
    """Pairwise tree reduction with the rounding errors carried along"""
    values = np.moveaxis(np.asarray(terms), axis, -1)
    if values.shape[-1] == 0:
        return np.zeros(values.shape[:-1], dtype=values.dtype)
    comp = np.zeros_like(values)
    while values.shape[-1] > 1:
        if values.shape[-1] % 2:
            pad = [(0, 0)] * (values.ndim - 1) + [(0, 1)]
            values = np.pad(values, pad)
            comp = np.pad(comp, pad)
        values, err = two_sum(values[..., 0::2], values[..., 1::2])
        comp = comp[..., 0::2] + comp[..., 1::2] + err
    return values[..., 0] + comp[..., 0]


def compensated_sum(terms, axis=-1, order="descending"):
    """Sort terms by modulus, then reduce with pairwise_sum

    order is "descending", "ascending" or None (keep the given order).
    """
    values = np.moveaxis(np.asarray(terms), axis, -1)
    if order is not None and values.shape[-1] > 1:
        keys = np.abs(values)
        if order == "descending":
            keys = -keys
        idx = np.argsort(keys, axis=-1, kind="stable")
        values = np.take_along_axis(values, idx, axis=-1)
    return pairwise_sum(values, axis=-1)


def block_sum(partials):
    """Reduce a sequence of equally shaped partial results in block order"""
    partials = list(partials)
    if not partials:
        raise ValueError("block_sum needs at least one partial result")
    return pairwise_sum(np.stack(partials, axis=-1), axis=-1)
