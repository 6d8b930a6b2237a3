"""Amplitude estimation via phase estimation over the Grover iterate.

A single run prepares the compiled forecasting state, runs textbook phase
estimation of Q = D V on a ``log2 t``-qubit phase register (controlled
powers Q^(2^m), then an inverse Fourier transform), measures the register,
and maps the integer outcome ``k`` to the estimate ``sin^2(pi k / t)``.
Outcomes therefore live on a fixed grid of ``t/2 + 1`` values; the estimate
is within ``2 pi sqrt(beta (1 - beta)) / t + pi^2 / t^2`` of the true
normalized forecast with probability at least ``8 / pi^2``.  Median boosting
over an odd number of independent runs drives the failure probability below
any requested ``delta``.

The pre-measurement state is a deterministic function of (forest, input, t),
so it is memoized; repetitions stay independent through their measurement
seeds and draw from exactly the distribution a fresh simulation would give.

Counting conventions (exposed through the result object): one preparation of
the forecasting operator per run plus one forward and one inverse application
inside each of the ``t - 1`` controlled Grover powers; each application walks
``height`` levels, i.e. does ``height`` classical input queries.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, replace

import numpy as np

from . import gates as g
from .compiler import CompiledCircuit, compile_forest_op, grover_iterate
from .model import InputObject, RandomForest, beta_to_R
from .statevector import Register, StateVector

# Median-boost repetition count: with single-run failure <= 1 - 8/pi^2 < 0.19,
# Hoeffding needs r >= 5.2 ln(1/delta) for the median to fail with
# probability <= delta; 12 leaves generous slack.
_BOOST_CONSTANT = 12.0

_ENGINE_CACHE: dict[tuple, "PhaseEstimation"] = {}
_ENGINE_CACHE_CAP = 128


def repetitions_for_delta(delta: float) -> int:
    """Smallest odd repetition count >= 12 ln(1/delta)."""
    if not 0.0 < delta < 0.5:
        raise ValueError("delta must lie in (0, 0.5)")
    r = max(1, math.ceil(_BOOST_CONSTANT * math.log(1.0 / delta)))
    return r if r % 2 else r + 1


@dataclass(frozen=True)
class QaeConfig:
    """Estimation parameters.

    ``t`` is the phase-grid size (a power of two; log2 t phase qubits).
    Give either ``repetitions`` (odd) or ``delta``; with neither, one
    repetition is run.  ``target`` selects whether the result also carries
    the forecast mapped back to the raw leaf-label scale ('r') or just the
    normalized estimate ('beta').
    """

    t: int
    repetitions: int | None = None
    delta: float | None = None
    target: str = "beta"
    seed: int | None = None

    def __post_init__(self):
        if self.t < 2 or self.t & (self.t - 1):
            raise ValueError("t must be a power of two >= 2")
        if self.repetitions is not None and self.delta is not None:
            raise ValueError("give repetitions or delta, not both")
        if self.repetitions is not None and (self.repetitions < 1 or self.repetitions % 2 == 0):
            raise ValueError("repetitions must be an odd integer >= 1")
        if self.delta is not None and not 0.0 < self.delta < 0.5:
            raise ValueError("delta must lie in (0, 0.5)")
        if self.target not in ("beta", "r"):
            raise ValueError("target must be 'beta' or 'r'")

    @property
    def resolved_repetitions(self) -> int:
        if self.repetitions is not None:
            return self.repetitions
        if self.delta is not None:
            return repetitions_for_delta(self.delta)
        return 1


@dataclass(frozen=True)
class EstimationResult:
    """One boosted estimate plus its bookkeeping.

    ``grover_calls`` counts applications of Q = D V (equivalently of D, or of
    V); ``u_invocations`` counts runs of the forecasting operator or its
    inverse, including the per-repetition state preparation.
    """

    beta_estimate: float
    r_estimate: float | None
    error_bound: float
    raw_estimates: tuple[float, ...]
    repetitions: int
    t: int
    grover_calls: int
    u_invocations: int
    height: int


def error_bound(beta_estimate: float, t: int) -> float:
    """Single-run confidence radius 2 pi sqrt(b(1-b))/t + pi^2/t^2."""
    b = min(1.0, max(0.0, beta_estimate))
    return 2.0 * math.pi * math.sqrt(b * (1.0 - b)) / t + math.pi**2 / t**2


def error_bound_relaxed(t: int) -> float:
    """Estimate-free relaxation 2 pi / t + pi^2 / t^2."""
    return 2.0 * math.pi / t + math.pi**2 / t**2


def reconstruct_R(beta_estimate: float, y_min: float, y_max: float) -> float:
    """Map a normalized estimate back to the leaf-label scale; the absolute
    error scales by (y_max - y_min)."""
    return beta_to_R(beta_estimate, y_min, y_max)


class PhaseEstimation:
    """Deterministic pre-measurement QPE state for one (circuit, t) pair."""

    def __init__(self, circuit: CompiledCircuit, t: int):
        if t < 2 or t & (t - 1):
            raise ValueError("t must be a power of two >= 2")
        self.circuit = circuit
        self.t = t
        phase_size = t.bit_length() - 1
        self.phase = Register("phase", circuit.num_qubits, phase_size)
        sv = StateVector(circuit.num_qubits + phase_size)
        sv.apply_all(circuit.gates)
        for q in self.phase.qubits:
            sv.apply(g.h(q))
        iterate = grover_iterate(circuit)
        for pos, q in enumerate(self.phase.qubits):
            controlled_iterate = [g.controlled(gate, q) for gate in iterate]
            for _ in range(1 << (phase_size - 1 - pos)):
                sv.apply_all(controlled_iterate)
        # Inverse Fourier transform on the (trailing) phase register.
        mat = sv.amplitudes.reshape(-1, t)
        grid = np.arange(t)
        f_inv = np.exp(-2j * np.pi * np.outer(grid, grid) / t) / np.sqrt(t)
        final = (mat @ f_inv.T).reshape(-1)
        self._distribution = np.abs(final.reshape(-1, t)) ** 2
        self._distribution = self._distribution.sum(axis=0)
        self._cumulative = np.cumsum(self._distribution)

    def distribution(self) -> np.ndarray:
        """Exact outcome probabilities over phase values 0 .. t-1."""
        return self._distribution.copy()

    def sample_outcome(self, rng: np.random.Generator) -> int:
        r = rng.random() * self._cumulative[-1]
        k = int(np.searchsorted(self._cumulative, r, side="right"))
        return min(k, self.t - 1)

    def estimate_of(self, outcome: int) -> float:
        return math.sin(math.pi * outcome / self.t) ** 2

    def sample_estimate(self, rng: np.random.Generator) -> float:
        return self.estimate_of(self.sample_outcome(rng))


def _engine(circuit: CompiledCircuit, t: int) -> PhaseEstimation:
    key = (circuit.forest_hash, circuit.input_hash, hash(circuit.gates), t)
    engine = _ENGINE_CACHE.get(key)
    if engine is None:
        if len(_ENGINE_CACHE) >= _ENGINE_CACHE_CAP:
            _ENGINE_CACHE.clear()
        engine = PhaseEstimation(circuit, t)
        _ENGINE_CACHE[key] = engine
    return engine


def estimate_amplitude_once(circuit: CompiledCircuit, config: QaeConfig) -> float:
    """One phase-estimation run; returns an estimate on the sin^2(pi k/t) grid.

    Seeded like the first repetition of a boosted run, so boosting with one
    repetition reproduces this exactly.
    """
    seed = np.random.SeedSequence(config.seed).spawn(1)[0]
    return _engine(circuit, config.t).sample_estimate(np.random.default_rng(seed))


def estimate_with_boosting(circuit: CompiledCircuit, config: QaeConfig) -> EstimationResult:
    """Median of independent runs (sub-seeded from config.seed)."""
    r = config.resolved_repetitions
    engine = _engine(circuit, config.t)
    seeds = np.random.SeedSequence(config.seed).spawn(r)
    raw = tuple(engine.sample_estimate(np.random.default_rng(s)) for s in seeds)
    beta = sorted(raw)[r // 2]
    return EstimationResult(
        beta_estimate=beta,
        r_estimate=None,
        error_bound=error_bound(beta, config.t),
        raw_estimates=raw,
        repetitions=r,
        t=config.t,
        grover_calls=r * (config.t - 1),
        u_invocations=r * (2 * config.t - 1),
        height=circuit.height,
    )


def query_count(result: EstimationResult) -> int:
    """Classical input queries consumed: ``height`` per forecasting-operator
    application, over all preparations and Grover powers."""
    return result.height * result.u_invocations


def run_forecast(forest: RandomForest, x: InputObject, config: QaeConfig) -> EstimationResult:
    """Compile and estimate; fills the raw-scale forecast when target is 'r'."""
    circuit = compile_forest_op(forest, x)
    result = estimate_with_boosting(circuit, config)
    if config.target == "r":
        result = replace(
            result, r_estimate=reconstruct_R(result.beta_estimate, forest.y_min, forest.y_max)
        )
    return result
