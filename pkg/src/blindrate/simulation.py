"""Monte Carlo harness: full recovery trials and the rank-increase toy model."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .channel import sigma2_from_snr_db, transmit
from .codes import encode_many
from .estimator import AUTO, recover
from .filtering import FilterParams
from .theory import TheoryInputs, ToyModelParams, expected_columns_in_error, rank_increase_bound

SIMULATE_COLUMNS = (
    "snr_db", "trial", "k_prime", "e_c_theory", "c_observed",
    "rho_naive", "rho_corrected", "frames_consumed",
)


def trial_seed(base_seed, *indices):
    """Derive an independent 63-bit seed from a base seed and index path."""
    state = np.random.SeedSequence([base_seed, *indices]).generate_state(2, np.uint32)
    return (int(state[0]) << 31) ^ int(state[1])


@dataclass(frozen=True)
class TrialResult:
    snr_db: float
    trial: int
    k_prime: int
    e_c_theory: float
    c_observed: int
    rho_naive: float
    rho_corrected: float
    frames_consumed: int
    report: object = None
    frames: list = None

    def csv_row(self):
        return [
            f"{self.snr_db:g}", str(self.trial), str(self.k_prime), repr(self.e_c_theory),
            str(self.c_observed), repr(self.rho_naive), repr(self.rho_corrected),
            str(self.frames_consumed),
        ]


def run_trial(code, snr_db, messages, params, seed, *, trial=0, m_s=None,
              sigma2=None, e_c_mode="exact", keep_frames=False):
    """Encode ``messages`` random words, send them at ``snr_db`` and recover.

    ``sigma2`` overrides the SNR-derived noise variance (used for the
    noiseless limit). ``e_c_theory`` is computed from the true channel.
    """
    rng = np.random.default_rng(trial_seed(seed, 0))
    msgs = rng.integers(0, 2, size=(messages, code.k), dtype=np.uint8)
    words = encode_many(code, msgs)
    s2 = sigma2_from_snr_db(snr_db) if sigma2 is None else sigma2
    frames = transmit(words, s2, trial_seed(seed, 1))
    report = recover(frames, code.n, params, m_s=m_s, e_c_mode=e_c_mode)

    sent = words[np.asarray(report.selected_indices, dtype=np.intp)]
    received = np.vstack([frames[i].hard_bits for i in report.selected_indices])
    c_obs = int(np.count_nonzero((received != sent).any(axis=0)))
    e_c_theory, _ = expected_columns_in_error(
        TheoryInputs(
            n=code.n, m_s=report.m_s, sigma=math.sqrt(s2),
            t1=report.params.t1, t2=report.params.t2,
        )
    )
    return TrialResult(
        snr_db=snr_db,
        trial=trial,
        k_prime=report.k_prime,
        e_c_theory=e_c_theory,
        c_observed=c_obs,
        rho_naive=report.rho_naive,
        rho_corrected=report.rho_corrected,
        frames_consumed=report.frames_consumed,
        report=report,
        frames=frames if keep_frames else None,
    )


def resolve_params(t1, t2, n, auto=False):
    """Turn CLI-style threshold values into FilterParams or AUTO.

    ``t2`` may be an int or a string like ``"n/2"``.
    """
    if auto:
        return AUTO
    return FilterParams(t1=float(t1), t2=parse_count(t2, n))


def parse_count(value, n):
    """Parse an integer or an ``n/<d>`` / ``n`` expression."""
    if isinstance(value, (int, np.integer)):
        return int(value)
    text = str(value).strip().replace(" ", "")
    if text == "n":
        return n
    if text.startswith("n/"):
        return n // int(text[2:])
    return int(text)


def _pack_column(bits):
    return int.from_bytes(np.packbits(bits).tobytes(), "big")


def _rank_of_ints(vectors):
    basis = []  # kept in decreasing order so leading bits are eliminated top-down
    for v in vectors:
        for b in basis:
            v = min(v, v ^ b)
        if v:
            basis.append(v)
            basis.sort(reverse=True)
    return len(basis)


@dataclass(frozen=True)
class RankIncreaseReport:
    d: int
    m_s: int
    p_e_prime: float
    trials: int
    conditioned_trials: int
    rank_increases: int
    observed: float | None
    standard_error: float | None
    bound: float
    passed: bool | None

    def to_text(self):
        rows = {
            "d": self.d, "m_s": self.m_s, "p_e_prime": self.p_e_prime,
            "trials": self.trials, "conditioned_trials": self.conditioned_trials,
            "rank_increases": self.rank_increases,
            "observed": "none" if self.observed is None else repr(self.observed),
            "standard_error": "none" if self.standard_error is None else repr(self.standard_error),
            "bound": repr(self.bound),
            "verdict": {True: "pass", False: "fail", None: "no-error-events"}[self.passed],
        }
        return "".join(f"{k}={v}\n" for k, v in rows.items())


def simulate_rank_increase(d, m_s, p_e_prime, trials, seed):
    """Estimate P[rank grows by one | at least one bit error] in the toy model.

    Each trial draws ``d`` independent random columns of length ``m_s`` and
    appends their XOR, then flips every bit independently with probability
    ``p_e_prime``. Trials without any flipped bit are excluded.
    """
    rng = np.random.default_rng(seed)
    conditioned = 0
    increases = 0
    for _ in range(trials):
        while True:
            cols = rng.integers(0, 2, size=(d, m_s), dtype=np.uint8)
            packed = [_pack_column(c) for c in cols]
            if _rank_of_ints(packed) == d:
                break
        parity = np.bitwise_xor.reduce(cols, axis=0)
        clean = np.vstack([cols, parity])
        errors = (rng.random(clean.shape) < p_e_prime).astype(np.uint8)
        if not errors.any():
            continue
        conditioned += 1
        noisy = [_pack_column(c) for c in clean ^ errors]
        if _rank_of_ints(noisy) == d + 1:
            increases += 1

    if p_e_prime > 0:
        bound = rank_increase_bound(ToyModelParams(d=d, m_s=m_s, p_e_prime=p_e_prime))
    else:
        bound = 1.0
    if conditioned == 0:
        return RankIncreaseReport(d, m_s, p_e_prime, trials, 0, 0, None, None, bound, None)
    freq = increases / conditioned
    se = math.sqrt(freq * (1 - freq) / conditioned)
    return RankIncreaseReport(
        d, m_s, p_e_prime, trials, conditioned, increases, freq, se, bound,
        passed=freq >= bound - 3 * se,
    )
