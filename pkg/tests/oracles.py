"""Independent reference computations used by the tests.

Nothing here imports backoffsim; each function rebuilds its quantity straight
from the definitions with exact or high-precision arithmetic.
"""

import itertools
from fractions import Fraction

import mpmath

mpmath.mp.dps = 60


def _lg(x):
    return mpmath.log(x, 2)


def monotone_sequence(kind, count, w0=4):
    """Window sizes of BEB/LB/LLB with 60-digit arithmetic."""
    w = mpmath.mpf(w0)
    out = []
    for _ in range(count):
        out.append(int(w))
        if kind == "beb":
            f = mpmath.mpf(1)
        elif kind == "lb":
            f = 1 / _lg(w)
        else:
            f = 1 / _lg(_lg(w))
        w = mpmath.ceil((1 + f) * w)
    return out


def sawtooth_sequence(count, w0=4, floor=4):
    out = []
    lead = w0
    while len(out) < count:
        w = lead
        while w >= floor:
            out.append(w)
            w //= 2
        lead *= 2
    return out[:count]


def truncated_sawtooth_sequence(count, c=1.0, w0=4):
    out = []
    lead = w0
    while len(out) < count:
        lgl = _lg(lead)
        windows = max(int(mpmath.ceil(_lg(c * lgl))), 1)
        full = int(_lg(lead)) - 1  # STB run length for powers of two >= 4
        windows = min(windows, full)
        low = min(max(int(mpmath.floor(lead / (c * lgl))), 4), lead)
        for k in range(windows):
            out.append(max(lead // 2**k, low))
        lead *= 2
    return out[:count]


def starred_sequence(kind, count, w0=4):
    out = []
    w = w0
    while len(out) < count:
        if kind == "llb_star":
            reps = int(mpmath.ceil(_lg(_lg(w)) / 2))
        else:
            reps = int(mpmath.ceil(_lg(w) / 2))
        out.extend([w] * max(reps, 1))
        w *= 2
    return out[:count]


def collision_probability_two_stations(w):
    """P(two stations share a slot) by enumerating the w*w slot pairs."""
    hits = sum(1 for a, b in itertools.product(range(w), repeat=2) if a == b)
    return Fraction(hits, w * w)


def collision_slot_moments(n, w):
    """Mean and variance of the collision-slot count over all w**n outcomes."""
    total = Fraction(0)
    total_sq = Fraction(0)
    outcomes = w**n
    for choice in itertools.product(range(w), repeat=n):
        counts = [choice.count(s) for s in range(w)]
        c = sum(1 for k in counts if k >= 2)
        total += c
        total_sq += c * c
    mean = total / outcomes
    return mean, total_sq / outcomes - mean * mean


def quartiles_linear(values):
    """Q1/Q3 by hand: interpolate at 0.25*(k-1) and 0.75*(k-1)."""
    xs = sorted(values)
    k = len(xs)

    def at(pos):
        lo = int(pos)
        frac = pos - lo
        if lo + 1 < k:
            return xs[lo] + frac * (xs[lo + 1] - xs[lo])
        return xs[lo]

    return at(0.25 * (k - 1)), at(0.75 * (k - 1))
