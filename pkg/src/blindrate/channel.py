"""BPSK over AWGN, hard decisions, and blind noise-variance estimation."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy.special import erfc

from .errors import FrameParseError

#: Floor for the variance estimate; sample variance can dip below 1 at high SNR.
SIGMA2_FLOOR = 1e-9

_SQRT2 = math.sqrt(2.0)


def q_function(x):
    """Standard normal upper tail probability."""
    return 0.5 * erfc(np.asarray(x, dtype=float) / _SQRT2)[()]


def phi(x):
    """Standard normal CDF."""
    return 0.5 * erfc(-np.asarray(x, dtype=float) / _SQRT2)[()]


def bpsk(bits):
    """Map bits to symbols with 0 -> +1 and 1 -> -1."""
    return 1.0 - 2.0 * np.asarray(bits, dtype=float)


def hard_decision(symbols):
    return (np.asarray(symbols) < 0).astype(np.uint8)


@dataclass(frozen=True, eq=False)
class LlrFrame:
    """One received frame ``r`` together with its hard decisions ``y``."""

    symbols: np.ndarray
    hard_bits: np.ndarray

    def __post_init__(self):
        if self.symbols.shape != self.hard_bits.shape or self.symbols.ndim != 1:
            raise ValueError("symbols and hard_bits must be 1-D of equal length")
        if not np.array_equal(self.hard_bits, hard_decision(self.symbols)):
            raise ValueError("hard_bits must equal (symbols < 0)")

    @classmethod
    def from_symbols(cls, symbols):
        symbols = np.array(symbols, dtype=float).reshape(-1)
        symbols.flags.writeable = False
        bits = hard_decision(symbols)
        bits.flags.writeable = False
        return cls(symbols, bits)

    def __len__(self):
        return self.symbols.size


def sigma2_from_snr_db(snr_db):
    return 10.0 ** (-snr_db / 10.0)


@dataclass(frozen=True)
class ChannelParams:
    sigma2: float
    snr_linear: float
    snr_db: float
    n0: float
    p_e: float

    @classmethod
    def from_sigma2(cls, sigma2):
        if not sigma2 > 0:
            raise ValueError(f"sigma2 must be positive, got {sigma2}")
        snr = 1.0 / sigma2
        return cls(
            sigma2=sigma2,
            snr_linear=snr,
            snr_db=10.0 * math.log10(snr),
            n0=2.0 * sigma2,
            p_e=float(q_function(math.sqrt(snr))),
        )

    @classmethod
    def from_snr_db(cls, snr_db):
        return cls.from_sigma2(sigma2_from_snr_db(snr_db))

    @property
    def sigma(self):
        return math.sqrt(self.sigma2)


def frame_rng(seed, index):
    """Generator for one frame; any frame can be regenerated in isolation."""
    return np.random.default_rng(np.random.SeedSequence([seed, index]))


def transmit(codewords, sigma2, seed):
    """Send each row of ``codewords`` through BPSK + AWGN with variance ``sigma2``."""
    if not sigma2 > 0:
        raise ValueError(f"sigma2 must be positive, got {sigma2}")
    codewords = np.asarray(codewords, dtype=np.uint8)
    if codewords.ndim == 1:
        codewords = codewords.reshape(1, -1)
    sigma = math.sqrt(sigma2)
    n = codewords.shape[1]
    frames = []
    for i, c in enumerate(codewords):
        noise = frame_rng(seed, i).normal(0.0, sigma, size=n)
        frames.append(LlrFrame.from_symbols(bpsk(c) + noise))
    return frames


def estimate_channel(frames):
    """Estimate sigma^2 from ``mean(Var(r_i)) = 1 + sigma^2`` over the frames."""
    if len(frames) == 0:
        raise ValueError("need at least one frame")
    variances = []
    for f in frames:
        r = f.symbols if isinstance(f, LlrFrame) else np.asarray(f, dtype=float)
        if r.size < 2:
            raise ValueError("frames must have at least 2 symbols")
        variances.append(np.var(r, ddof=1))
    sigma2 = max(SIGMA2_FLOOR, float(np.mean(variances)) - 1.0)
    return ChannelParams.from_sigma2(sigma2)


def format_frames(frames):
    """Render frames in the one-frame-per-line text format."""
    return "".join(
        " ".join(repr(float(v)) for v in f.symbols) + "\n" for f in frames
    )


def write_frames(path, frames):
    with open(path, "w") as fh:
        fh.write(format_frames(frames))


def parse_frames(text, n=None):
    """Parse the frame text format; every line must hold ``n`` floats."""
    frames = []
    for no, line in enumerate(text.splitlines(), start=1):
        if not line.strip():
            continue
        try:
            values = [float(tok) for tok in line.split()]
        except ValueError:
            raise FrameParseError("non-numeric symbol", no) from None
        if not all(math.isfinite(v) for v in values):
            raise FrameParseError("non-finite symbol", no)
        if n is None:
            n = len(values)
        if len(values) != n:
            raise FrameParseError(f"expected {n} symbols, got {len(values)}", no)
        frames.append(LlrFrame.from_symbols(values))
    return frames


def read_frames(path, n=None):
    with open(path) as fh:
        return parse_frames(fh.read(), n)
