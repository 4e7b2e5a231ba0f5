"""Probabilistic neuron core: tunable activation and two entropy sources.

The activation is the standard logistic p-bit transfer function
sigma(beta * (V_IN - V_REF)); V_REF sets the no-event minimum sampling rate.
Two interchangeable entropy sources are provided: a 16-bit maximal-length
LFSR whose output words act as i.i.d. uniforms, and a two-state random
telegraph model of a stochastic MTJ with mean retention time tau. The drive
biases the telegraph dwell asymmetry (tau_on/tau_off = p/(1-p)) while the
retention time anchors the overall flip timescale, so the stationary
occupancy of the ON state equals the activation probability.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np
from scipy.special import expit

# x^16 + x^15 + x^13 + x^4 + 1 (maximal length): s[n+16] = s[n+15]^s[n+13]^s[n+4]^s[n].
LFSR_TAP_MASK = 0xA011
LFSR_PERIOD = 65535
LFSR_WORD_BITS = 16

# Saturation clamp for telegraph dwell computation: keeps dwell times finite
# when the drive pins the activation at 0 or 1.
P_CLAMP = 1e-6

# Discretized dwell statistics are trusted only when a mean dwell spans at
# least this many steps.
DT_RESOLUTION_FACTOR = 10

DEFAULT_BETA = 10.0
DEFAULT_MIN_RATE = 0.04
DEFAULT_TAU_S = 500e-6


def v_ref_for_min_rate(x_min: float, beta: float) -> float:
    """Reference voltage giving no-event rate x_min: sigma(-beta*v_ref) = x_min."""
    if not 0 < x_min < 1:
        raise ValueError(f"x_min must lie in (0, 1), got {x_min}")
    return float(np.log(1.0 / x_min - 1.0) / beta)


DEFAULT_V_REF = v_ref_for_min_rate(DEFAULT_MIN_RATE, DEFAULT_BETA)

SOURCES = ("digital_iid", "smtj_telegraph")


@dataclass(frozen=True)
class PNeuronConfig:
    beta: float = DEFAULT_BETA
    v_ref_v: float = DEFAULT_V_REF
    source: str = "smtj_telegraph"
    tau_s: float = DEFAULT_TAU_S
    seed: int = 0

    def __post_init__(self):
        if not (self.beta > 0 and np.isfinite(self.beta)):
            raise ValueError(f"beta must be positive, got {self.beta}")
        if not np.isfinite(self.v_ref_v):
            raise ValueError(f"v_ref_v must be finite, got {self.v_ref_v}")
        if not (self.tau_s > 0 and np.isfinite(self.tau_s)):
            raise ValueError(f"tau_s must be positive, got {self.tau_s}")
        if self.source not in SOURCES:
            raise ValueError(f"source must be one of {SOURCES}, got {self.source!r}")

    @property
    def min_rate(self) -> float:
        """Activation probability at zero drive (the minimum sampling rate X)."""
        return float(expit(-self.beta * self.v_ref_v))


def activation_probability(v_in_v, cfg: PNeuronConfig):
    """Logistic activation sigma(beta * (v_in - v_ref)); accepts scalars or arrays."""
    v = np.asarray(v_in_v, dtype=np.float64)
    if not np.all(np.isfinite(v)):
        raise ValueError("v_in_v must be finite")
    p = expit(cfg.beta * (v - cfg.v_ref_v))
    return float(p) if np.isscalar(v_in_v) else p


# --------------------------------------------------------------------------
# Digital entropy source: 16-bit Fibonacci LFSR
# --------------------------------------------------------------------------

@dataclass(frozen=True)
class LfsrState:
    register: int

    def __post_init__(self):
        if not 1 <= self.register <= 0xFFFF:
            raise ValueError(f"register must be a nonzero 16-bit value, got {self.register}")


def lfsr_from_seed(seed: int) -> LfsrState:
    """Map an arbitrary integer seed onto a valid (nonzero) register."""
    return LfsrState(seed % LFSR_PERIOD + 1)


def lfsr_next(s: LfsrState) -> tuple[int, LfsrState]:
    """Emit one output bit (register LSB) and shift with taps 16,15,13,4."""
    reg = s.register
    bit = reg & 1
    fb = bin(reg & LFSR_TAP_MASK).count("1") & 1
    return bit, LfsrState((reg >> 1) | (fb << 15))


class _LfsrCycle:
    """Lazily built full-period tables for vectorized word generation.

    The LFSR state sequence is one cycle through all 65535 nonzero registers,
    so any stream is a rotation of the canonical cycle; words are read out of
    the cached bit array instead of stepping bit by bit.
    """

    def __init__(self):
        self.bits: np.ndarray | None = None
        self.index: np.ndarray | None = None  # register value -> cycle position
        self.registers: np.ndarray | None = None

    def build(self):
        bits = np.empty(LFSR_PERIOD, dtype=np.uint8)
        regs = np.empty(LFSR_PERIOD, dtype=np.uint32)
        index = np.zeros(0x10000, dtype=np.int64)
        s = LfsrState(1)
        for i in range(LFSR_PERIOD):
            regs[i] = s.register
            index[s.register] = i
            bits[i], s = lfsr_next(s)
        assert s.register == 1, "LFSR cycle did not close"
        self.bits, self.index, self.registers = bits, index, regs


_CYCLE = _LfsrCycle()


def lfsr_word_uniforms(s: LfsrState, n: int) -> tuple[np.ndarray, LfsrState]:
    """Draw n uniforms in (0, 1), one 16-bit word (LSB-first) per draw.

    Equivalent to packing 16 successive `lfsr_next` bits per word; the
    all-zero word never occurs, so the uniforms are strictly positive and
    strictly below 1.
    """
    if _CYCLE.bits is None:
        _CYCLE.build()
    start = int(_CYCLE.index[s.register])
    pos = (start + np.arange(n, dtype=np.int64)[:, None] * LFSR_WORD_BITS
           + np.arange(LFSR_WORD_BITS, dtype=np.int64)[None, :]) % LFSR_PERIOD
    words = (_CYCLE.bits[pos].astype(np.uint32)
             << np.arange(LFSR_WORD_BITS, dtype=np.uint32)).sum(axis=1)
    u = words.astype(np.float64) / 65536.0
    end = (start + n * LFSR_WORD_BITS) % LFSR_PERIOD
    return u, LfsrState(int(_CYCLE.registers[end]))


def pbit_decide_iid(p: float, s: LfsrState) -> tuple[int, LfsrState]:
    """One Bernoulli(p) decision from the LFSR word stream."""
    if not 0.0 <= p <= 1.0:
        raise ValueError(f"p must lie in [0, 1], got {p}")
    u, s = lfsr_word_uniforms(s, 1)
    return int(u[0] < p), s


def iid_decisions(p, s: LfsrState) -> tuple[np.ndarray, LfsrState]:
    """Vectorized `pbit_decide_iid` for an array of per-decision probabilities."""
    p = np.asarray(p, dtype=np.float64)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("probabilities must lie in [0, 1]")
    u, s = lfsr_word_uniforms(s, p.size)
    return (u < p).astype(np.uint8), s


# --------------------------------------------------------------------------
# Spintronic entropy source: two-state random telegraph with retention time
# --------------------------------------------------------------------------

@dataclass(eq=False)
class TelegraphState:
    state: int
    time_in_state_s: float = 0.0
    rng: np.random.Generator = field(default_factory=np.random.default_rng)

    def __post_init__(self):
        if self.state not in (0, 1):
            raise ValueError(f"state must be 0 or 1, got {self.state}")


def telegraph_init(cfg: PNeuronConfig, p0: float = 0.5) -> TelegraphState:
    """Fresh telegraph state seeded from cfg, started from stationarity at p0."""
    rng = np.random.default_rng(cfg.seed)
    state = 1 if rng.random() < p0 else 0
    return TelegraphState(state=state, time_in_state_s=0.0, rng=rng)


def _flip_probs(p, tau_s: float, dt_s: float, cap: bool):
    """Per-step flip probabilities (q_off_to_on, q_on_to_off).

    Dwell means are tau_on = 2*tau*p and tau_off = 2*tau*(1-p), so the
    stationary ON fraction is exactly p and the mean dwell at p=0.5 is tau.
    With cap=True probabilities saturate at 1 (dwell floor of one step).
    """
    p = np.clip(p, P_CLAMP, 1.0 - P_CLAMP)
    q01 = dt_s / (2.0 * tau_s * (1.0 - p))
    q10 = dt_s / (2.0 * tau_s * p)
    if cap:
        q01 = np.minimum(q01, 1.0)
        q10 = np.minimum(q10, 1.0)
    return q01, q10


def telegraph_step(ts: TelegraphState, p: float, dt_s: float, cfg: PNeuronConfig) -> TelegraphState:
    """Advance the telegraph by one step of dt_s at drive probability p.

    dt_s must resolve both dwell times (dt <= min dwell / 10); too-coarse
    steps raise instead of silently distorting the dwell statistics.
    """
    if dt_s <= 0:
        raise ValueError(f"dt_s must be positive, got {dt_s}")
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    pc = min(max(p, P_CLAMP), 1.0 - P_CLAMP)
    min_dwell = 2.0 * cfg.tau_s * min(pc, 1.0 - pc)
    if dt_s > min_dwell / DT_RESOLUTION_FACTOR:
        raise ValueError(
            f"dt too coarse: {dt_s:.3g} s exceeds min dwell {min_dwell:.3g} s / "
            f"{DT_RESOLUTION_FACTOR}"
        )
    q01, q10 = _flip_probs(pc, cfg.tau_s, dt_s, cap=False)
    q = q10 if ts.state == 1 else q01
    if ts.rng.random() < q:
        return TelegraphState(state=1 - ts.state, time_in_state_s=0.0, rng=ts.rng)
    return TelegraphState(state=ts.state, time_in_state_s=ts.time_in_state_s + dt_s, rng=ts.rng)


def telegraph_run(
    p_steps: np.ndarray,
    dt_s: float,
    cfg: PNeuronConfig,
    rng: np.random.Generator,
    initial_state: int | None = None,
) -> np.ndarray:
    """Evolve the telegraph over a per-step drive-probability array.

    Returns the state after each step (uint8), matching a loop of
    `telegraph_step` calls on the same generator. Unlike the single-step
    contract this engine accepts saturated drives: flip probabilities are
    capped at 1, i.e. a dwell floor of one step, so the base retention
    time only needs dt_s <= tau_s / 10.
    """
    if dt_s <= 0:
        raise ValueError(f"dt_s must be positive, got {dt_s}")
    if dt_s > cfg.tau_s / DT_RESOLUTION_FACTOR:
        raise ValueError(
            f"dt too coarse: {dt_s:.3g} s cannot resolve tau_s = {cfg.tau_s:.3g} s"
        )
    p_steps = np.asarray(p_steps, dtype=np.float64)
    n = p_steps.size
    if initial_state is None:
        s = 1 if rng.random() < p_steps[0] else 0
    else:
        s = int(initial_state)
    q01, q10 = _flip_probs(p_steps, cfg.tau_s, dt_s, cap=True)
    u = rng.random(n)
    flip0 = u < q01
    flip1 = u < q10
    out = np.empty(n, dtype=np.uint8)
    block = 4096
    i = 0
    while i < n:
        fl = flip1 if s else flip0
        j = i
        flipped = False
        while j < n:
            hi = min(j + block, n)
            k = int(np.argmax(fl[j:hi]))
            if fl[j + k]:
                out[i:j + k] = s
                s ^= 1
                out[j + k] = s
                i = j + k + 1
                flipped = True
                break
            j = hi
        if not flipped:
            out[i:] = s
            break
    return out


def telegraph_tick_states(
    p: float,
    dt_s: float,
    cfg: PNeuronConfig,
    steps_per_tick: int,
    n_ticks: int,
    rng: np.random.Generator,
) -> np.ndarray:
    """Telegraph state read at every steps_per_tick-th step, constant drive.

    Dwell-sampled: run lengths are drawn geometrically instead of stepping,
    which is distribution-identical to `telegraph_run` at constant p and
    O(number of dwells). Used for long constant-drive characterization runs.
    """
    if not 0.0 < p < 1.0:
        raise ValueError(f"p must lie strictly inside (0, 1), got {p}")
    q01, q10 = _flip_probs(p, cfg.tau_s, dt_s, cap=True)
    s0 = 1 if rng.random() < p else 0
    total = n_ticks * steps_per_tick + 1
    q_even = q10 if s0 else q01  # dwells at even index are spent in state s0
    q_odd = q01 if s0 else q10
    chunks = []
    acc = 0
    # expected dwells needed, padded; loop tops up in the rare shortfall case
    est = max(64, int(1.2 * total * (q_even + q_odd) / 2) + 64)
    while acc < total:
        m = min(est, 1 << 20)
        pair = np.empty(2 * m, dtype=np.int64)
        pair[0::2] = rng.geometric(q_even, size=m)
        pair[1::2] = rng.geometric(q_odd, size=m)
        chunks.append(pair)
        acc += int(pair.sum())
    dwell = np.concatenate(chunks) if len(chunks) > 1 else chunks[0]
    boundaries = np.cumsum(dwell)
    ticks = np.arange(n_ticks, dtype=np.int64) * steps_per_tick
    k = np.searchsorted(boundaries, ticks, side="right")
    return ((s0 + k) % 2).astype(np.uint8)


def estimate_retention(bits, dt_s: float) -> float:
    """Mean dwell time across both states: mean run length times dt_s."""
    if dt_s <= 0:
        raise ValueError(f"dt_s must be positive, got {dt_s}")
    b = np.asarray(bits)
    if b.size < 2:
        raise ValueError("need at least two samples")
    edges = np.flatnonzero(np.diff(b) != 0)
    if edges.size == 0:
        raise ValueError("constant sequence: no transitions to estimate retention from")
    bounds = np.concatenate([[-1], edges, [b.size - 1]])
    runs = np.diff(bounds)
    return float(runs.mean() * dt_s)
