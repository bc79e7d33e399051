"""Exact random variate generation for the two-piece families.

A draw from either family is a fold of symmetric base draws: a uniform U
picks the branch via sign(U - alpha), and two independent base variates
(one per branch) are rescaled by the branch weights.  The fold transforms
are pure functions of their inputs, so they can be pinned against
hand-evaluated values; the ``sample_*`` entry points wire them to a
deterministic counter-based random stream.
"""

from __future__ import annotations

import hashlib

import numpy as np

from .distributions import Family, TwoPieceParams

__all__ = [
    "RngStream",
    "derive_seed",
    "sample_gamma",
    "sample_beta",
    "sample_bb",
    "sample_sepd",
    "sample_sgld",
    "sepd_transform",
    "sgld_transform",
    "sample_family",
]

_MASK64 = (1 << 64) - 1
# Clamp for Beta draws before the logit: lower end per the numerical-guard
# contract; upper end is the largest double below 1 (1 - 1e-300 rounds to
# 1.0, which would put an infinity through log1p).
_BETA_LO = 1e-300
_BETA_HI = float(np.nextafter(1.0, 0.0))


class RngStream:
    """Deterministic random stream backed by the counter-based Philox engine.

    The 128-bit Philox key is (seed, stream), so streams with the same seed
    and different stream indices are independent and reproducible across
    runs and platforms.  A stream is single-owner: use ``substream`` to
    derive per-thread or per-task streams instead of sharing one.
    """

    def __init__(self, seed: int, stream: int = 0):
        if isinstance(seed, bool) or not isinstance(seed, (int, np.integer)):
            raise ValueError(f"seed must be an integer, got {seed!r}")
        if isinstance(stream, bool) or not isinstance(stream, (int, np.integer)):
            raise ValueError(f"stream must be an integer, got {stream!r}")
        self.seed = int(seed) & _MASK64
        self.stream = int(stream) & _MASK64
        key = np.array([self.seed, self.stream], dtype=np.uint64)
        self._gen = np.random.Generator(np.random.Philox(key=key))

    def substream(self, index: int) -> "RngStream":
        """A fresh independent stream derived from this one.

        The child seed hashes (seed, stream, index), so nested splitting
        never collides between siblings or across levels.
        """
        return RngStream(derive_seed(self.seed, self.stream, int(index)), 0)

    def uniform(self, size=None):
        return self._gen.uniform(size=size)

    def normal(self, size=None):
        return self._gen.standard_normal(size=size)

    def gamma(self, shape, size=None):
        """Gamma(shape, 1) draws via numpy's exact rejection samplers.

        ``shape`` may be an array (one draw per element when size matches),
        which the predictive-sampling code uses to draw with per-posterior-
        draw shape parameters in one call.
        """
        if not np.all(np.asarray(shape) > 0.0):
            raise ValueError(f"gamma shape must be > 0, got {shape!r}")
        return self._gen.standard_gamma(shape, size=size)

    def __repr__(self) -> str:  # pragma: no cover - debugging aid
        return f"RngStream(seed={self.seed}, stream={self.stream})"


def derive_seed(*parts) -> int:
    """Stable 63-bit seed from heterogeneous labels.

    Hashes a canonical text rendering of the parts (ints, floats, strings)
    with BLAKE2b, so per-cell seeds in experiment grids depend only on the
    cell's labels, not on grid order or platform.
    """
    if not parts:
        raise ValueError("derive_seed needs at least one part")
    pieces = []
    for part in parts:
        if isinstance(part, bool):
            raise TypeError("bool seed parts are ambiguous; use int or str")
        if isinstance(part, (int, np.integer)):
            pieces.append(f"i:{int(part)}")
        elif isinstance(part, (float, np.floating)):
            pieces.append(f"f:{float(part)!r}")
        elif isinstance(part, str):
            pieces.append(f"s:{part}")
        else:
            raise TypeError(f"unsupported seed part type: {type(part).__name__}")
    digest = hashlib.blake2b("|".join(pieces).encode(), digest_size=8).digest()
    return int.from_bytes(digest, "little") & ((1 << 63) - 1)


def _scalar_out(value, size):
    return float(value) if size is None else value


def sample_gamma(stream: RngStream, shape: float, size=None):
    """Gamma(shape, 1) variate(s); exact for all shape > 0, including < 1."""
    return _scalar_out(stream.gamma(shape, size=size), size)


def sample_beta(stream: RngStream, a: float, b: float, size=None):
    """Beta(a, b) variate(s) via the ratio of two gamma draws.

    Consumes exactly two gamma draws (X ~ Ga(a,1) then Y ~ Ga(b,1)) and
    returns X / (X + Y); this construction is part of the reproducibility
    contract for downstream samplers.
    """
    if not (np.all(np.asarray(a) > 0.0) and np.all(np.asarray(b) > 0.0)):
        raise ValueError(f"beta shapes must be > 0, got a={a!r}, b={b!r}")
    x = stream.gamma(a, size=size)
    y = stream.gamma(b, size=size)
    return _scalar_out(x / (x + y), size)


def _check_bb_p(p) -> int:
    if isinstance(p, bool) or not isinstance(p, (int, np.integer)):
        raise ValueError(f"p must be an integer, got {p!r}")
    if p < 1:
        raise ValueError(f"p must be >= 1, got {p}")
    return int(p)


def sample_bb(stream: RngStream, p: int, mu: float = 0.0, sigma: float = 1.0, size=None):
    """Beta-logistic (type-III generalized logistic) variate(s).

    Draws T ~ Beta(p, p) and returns mu + sigma * log(T / (1 - T)); the
    logit of a symmetric Beta is exactly the Beta(p,p)-transform density
    the SGLD is built on.  T is clamped away from {0, 1} so astronomically
    rare underflow cannot emit infinities.
    """
    p = _check_bb_p(p)
    if not float(sigma) > 0.0:
        raise ValueError(f"sigma must be > 0, got {sigma}")
    t = np.clip(sample_beta(stream, p, p, size=size), _BETA_LO, _BETA_HI)
    return _scalar_out(mu + sigma * (np.log(t) - np.log1p(-t)), size)


def sepd_transform(u, w1, w2, alpha, p):
    """Fold uniform + gamma draws into a standardized SEPD draw.

    With s = sign(u - alpha), the left branch activates when s = -1 and
    contributes -2*alpha*(p*w1)**(1/p); the right branch symmetrically.
    The p**(1/p) factor is 1 / (2 K(p) Gamma(1+1/p)).  All arguments
    broadcast, so posterior-predictive code can fold one draw per posterior
    sample with per-sample (alpha, p) in a single call.
    """
    alpha = np.asarray(alpha, dtype=float)
    p = np.asarray(p, dtype=float)
    s = np.sign(np.asarray(u, dtype=float) - alpha)
    c = p ** (1.0 / p)
    inv_p = 1.0 / p
    left = alpha * np.asarray(w1, dtype=float) ** inv_p * (s - 1.0)
    right = (1.0 - alpha) * np.asarray(w2, dtype=float) ** inv_p * (s + 1.0)
    return (left + right) * c


def sgld_transform(u, w1, w2, alpha: float):
    """Fold uniform + beta-logistic draws into a standardized SGLD draw.

    The measure-zero event u == alpha takes sign(0) = 0, which averages the
    two branch contributions instead of picking one.
    """
    s = np.sign(np.asarray(u, dtype=float) - alpha)
    left = alpha * np.abs(np.asarray(w1, dtype=float)) * (s - 1.0)
    right = (1.0 - alpha) * np.abs(np.asarray(w2, dtype=float)) * (s + 1.0)
    return left + right


def sample_sepd(stream: RngStream, params: TwoPieceParams, size=None):
    """SEPD variate(s): draw U, then W1, W2 ~ Ga(1/p, 1), fold, and shift.

    Draw order (U, W1, W2) is a reproducibility contract; with an array
    ``size`` each of the three is drawn as one block in that order.
    """
    if not isinstance(params, TwoPieceParams):
        raise TypeError(f"params must be TwoPieceParams, got {type(params).__name__}")
    u = stream.uniform(size=size)
    inv_p = 1.0 / params.p
    w1 = stream.gamma(inv_p, size=size)
    w2 = stream.gamma(inv_p, size=size)
    z = sepd_transform(u, w1, w2, params.alpha, float(params.p))
    return _scalar_out(params.mu + params.sigma * z, size)


def sample_sgld(stream: RngStream, params: TwoPieceParams, size=None):
    """SGLD variate(s): draw U, then W1, W2 beta-logistic, fold, and shift."""
    if not isinstance(params, TwoPieceParams):
        raise TypeError(f"params must be TwoPieceParams, got {type(params).__name__}")
    u = stream.uniform(size=size)
    w1 = sample_bb(stream, params.p, 0.0, 1.0, size=size)
    w2 = sample_bb(stream, params.p, 0.0, 1.0, size=size)
    z = sgld_transform(u, w1, w2, params.alpha)
    return _scalar_out(params.mu + params.sigma * z, size)


def sample_family(stream: RngStream, family: Family, params: TwoPieceParams, size=None):
    """Dispatch to the family's sampler (SEPD or SGLD)."""
    if family == Family.SEPD:
        return sample_sepd(stream, params, size=size)
    if family == Family.SGLD:
        return sample_sgld(stream, params, size=size)
    raise ValueError(f"no two-piece sampler for family {family!r}")
