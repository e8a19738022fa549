import logging
import math
from dataclasses import dataclass, field
from fractions import Fraction
from functools import partial
from typing import NamedTuple, Optional
import numpy as np
from sympy import isprime
from app.dictionary.word_syntax import B, B_INV, T, T_INV
from app.dynamics.kernel import perfect_kernel_member
from app.dynamics.pasting import MergeInput, check_merge_hypotheses, paste
from app.errors import BadParams, HypothesesNotMet, InvalidGraph
from app.group.graphs import graph_phenotype, rooted_ball, validate
from app.group.labels import format_label, is_infinite, valuation
from app.group.preactions import Preaction, SaturationBuilder, apply_word, realize
from app.group.words import Params, product
from app.task_processing_manager import make_batches, run_batches
from app.walks.lazy_walk import DEFAULT_BATCH_SIZE, lazy_walk_stats
from app.walks.measures import StepMeasure, check_support
from app.walks.sampling import sample_walk, seed_sequence

logger = logging.getLogger("Dynamics")

# Seed streams, so different parts of one experiment never share trial seeds
AUDIT_STREAM = 1
CALIBRATION_STREAM = 2
WITNESS_STREAM = 3

QUANTILES = (0.5, 0.9, 0.99)


@dataclass(frozen=True)
class ExperimentConfig:
    params: Params
    measure: StepMeasure
    trials: int = 1000
    horizon: int = 500
    seed: int = 0
    prime: Optional[int] = None
    start_label: Optional[int] = None
    target_label: Optional[int] = None
    radius: int = 2
    epsilon: float = 0.02
    ks: tuple = (50, 200, 800)
    calibration_walks: int = 200
    neighborhood: int = 0
    audit_trials: int = 100
    audit_horizon: int = 400
    batch_size: int = DEFAULT_BATCH_SIZE
    smoothing_window: int = 50
    p_plus: Optional[Fraction] = None
    p_minus: Optional[Fraction] = None
    extra: dict = field(default_factory=dict)

    def __post_init__(self):
        if self.trials < 1 or self.horizon < 1:
            raise BadParams("trials and horizon must be at least 1")
        if self.batch_size < 1:
            raise BadParams("batch_size must be at least 1")
        if not 0 < self.epsilon < 1:
            raise BadParams("epsilon must lie in (0, 1)")

    def as_dict(self):
        """The resolved configuration, as embedded in every report."""
        return {
            "m": self.params.m,
            "n": self.params.n,
            "measure": self.measure.to_config(),
            "trials": self.trials,
            "horizon": self.horizon,
            "seed": self.seed,
            "prime": self.prime,
            "start_label": self.start_label,
            "target_label": self.target_label,
            "radius": self.radius,
            "epsilon": self.epsilon,
            "ks": list(self.ks),
            "calibration_walks": self.calibration_walks,
            "neighborhood": self.neighborhood,
            "audit_trials": self.audit_trials,
            "audit_horizon": self.audit_horizon,
            "batch_size": self.batch_size,
            "smoothing_window": self.smoothing_window,
            "p_plus": self.p_plus,
            "p_minus": self.p_minus,
            **self.extra,
        }


def _require_perfect_kernel_core(params, g):
    if not perfect_kernel_member(params, g):
        raise BadParams("core is saturated: the walk has no exit")


def _require_walk_measure(params, measure):
    support = check_support(params, measure)
    if not support.symmetric:
        raise BadParams("step measure support is not symmetric")
    if support.generating != "yes":
        raise BadParams("step measure support is not known to generate")
    return support


# Escape from a finite core

class EscapeReport(NamedTuple):
    occupancy: tuple
    last_visit_quantiles: dict
    censored_fraction: float
    decay_factor: Optional[float]
    smoothed_nonincreasing: bool
    trials: int
    horizon: int


def escape_batch(params, core, measure, horizon, seed, batch):
    """Core occupancy counts per step and last-visit times for one batch of trials."""
    _, first, size = batch
    occupancy = np.zeros(horizon + 1, dtype=np.int64)
    last_visits = []
    for trial in range(first, first + size):
        trace = sample_walk(measure, horizon, seed_sequence(seed, trial))
        builder = SaturationBuilder(params, core)
        point = core.basepoint
        occupancy[0] += 1
        last = 0
        for step, increment in enumerate(trace.increments, start=1):
            point = apply_word(builder, point, increment)
            if builder.depth(point.orbit) == 0:
                occupancy[step] += 1
                last = step
        last_visits.append(last)
    return occupancy, last_visits


def _envelope_decay(occupancy, start):
    """Per-step factor of a geometric fit to the positive tail of the occupancy."""
    steps = np.arange(len(occupancy))
    mask = (steps >= start) & (occupancy > 0)
    if mask.sum() < 2:
        return None
    slope, _ = np.polyfit(steps[mask], np.log(occupancy[mask]), 1)
    return float(math.exp(slope))


def _smoothed_nonincreasing(occupancy, window, trials):
    """Block means over `window` steps never rise by more than 3 sigma."""
    blocks = len(occupancy) // window
    if blocks < 2:
        return True
    means = occupancy[:blocks * window].reshape(blocks, window).mean(axis=1)
    for previous, current in zip(means, means[1:]):
        sigma = math.sqrt(max(previous * (1 - previous), 0.0) / (trials * window))
        if current > previous + 3 * sigma + 1.0 / trials:
            return False
    return True


def escape_experiment(cfg, g, workers=1, log_interval=60):
    """Fraction of walks sitting in the finite core K at each step, and when they leave it for good."""
    params = cfg.params
    _require_perfect_kernel_core(params, g)
    _require_walk_measure(params, cfg.measure)
    core = realize(params, g)

    action = partial(escape_batch, params, core, cfg.measure, cfg.horizon, cfg.seed)
    results = run_batches(action, make_batches(cfg.trials, cfg.batch_size), workers, log_interval)

    counts = sum(r[0] for r in results)
    last_visits = np.array([v for r in results for v in r[1]])
    occupancy = counts / cfg.trials
    quantiles = {
        str(q): int(np.quantile(last_visits, q, method="higher")) for q in QUANTILES
    }
    report = EscapeReport(
        occupancy=tuple(float(x) for x in occupancy),
        last_visit_quantiles=quantiles,
        censored_fraction=float(occupancy[-1]),
        decay_factor=_envelope_decay(occupancy, cfg.smoothing_window),
        smoothed_nonincreasing=_smoothed_nonincreasing(occupancy, cfg.smoothing_window, cfg.trials),
        trials=cfg.trials,
        horizon=cfg.horizon,
    )
    logger.info(f"Escape: occupancy at horizon {report.censored_fraction:.4f}, quantiles {quantiles}")
    return report


# Non-mixing certificate

class NonmixingReport(NamedTuple):
    never_return_hat: float
    drift_hat: float
    bound_check: bool
    walk_drift_hat: float
    expected_drift: float
    bound: float
    sigma: float
    ci: tuple
    undecided_fraction: float
    truncation_bound: float
    swapped: bool
    audit_trials: int
    audit_exceeded: int
    audit_certificates_fired: int
    audit_failures: int


def _oriented(params, measure, prime):
    """
    Params and measure with v_q(m) > v_q(n), exchanging m and n (and t with
    t^-1) when needed; BS(m,n) and BS(n,m) are isomorphic through t -> t^-1.
    """
    v_m = valuation(params.m, prime)
    v_n = valuation(params.n, prime)
    if v_m == v_n:
        raise BadParams(f"v_{prime}(m) = v_{prime}(n): valuations do not drift")
    if v_m > v_n:
        return params, measure, False
    swap = {T: T_INV, T_INV: T, B: B, B_INV: B_INV}
    weights = measure.generator_weights(params)
    swapped = StepMeasure.from_mapping({swap[letter]: w for letter, w in weights.items()})
    return Params(params.n, params.m), swapped, True


def audit_batch(params, measure, prime, start_label, target_label, horizon, seed, batch):
    """
    Walks the lazily saturated one-orbit preaction labeled N and checks
    the exact labels: the closed-form valuation while h+ >= h-, and N_k != M
    whenever v_q(N_k) > v_q(M).
    """
    _, first, size = batch
    v_m = valuation(params.m, prime)
    v_n = valuation(params.n, prime)
    v_start = valuation(start_label, prime)
    v_target = valuation(target_label, prime)
    one_orbit = Preaction(labels=(start_label,))
    exceeded = fired = failures = 0
    for trial in range(first, first + size):
        trace = sample_walk(measure, horizon, seed_sequence(seed, AUDIT_STREAM, trial))
        builder = SaturationBuilder(params, one_orbit)
        point = one_orbit.basepoint
        plus = minus = 0
        positive = True
        trial_exceeded = trial_fired = False
        for letter in trace.increments:
            point = apply_word(builder, point, letter)
            plus += letter == T
            minus += letter == T_INV
            positive = positive and plus >= minus
            label = builder.label(point.orbit)
            current = valuation(label, prime)
            if positive and current != (plus - minus) * (v_m - v_n) + v_start:
                failures += 1
            if current > v_target:
                trial_exceeded = True
                if label != target_label:
                    trial_fired = True
                else:
                    failures += 1
        exceeded += trial_exceeded
        fired += trial_fired
    return exceeded, fired, failures


def nonmixing_experiment(cfg, workers=1, log_interval=60):
    params = cfg.params
    if params.unimodular:
        raise BadParams("|m| = |n|: no valuation drift")
    prime = cfg.prime
    if prime is None or not isprime(prime):
        raise BadParams("a prime q is required")
    weights = cfg.measure.generator_weights(params)
    if weights is None or not all(weights.values()):
        raise BadParams("support must be {b, B, t, T}")
    oriented, measure, swapped = _oriented(params, cfg.measure, prime)
    oriented_weights = measure.generator_weights(oriented)
    p_plus = oriented_weights[T]
    p_minus = oriented_weights[T_INV]
    if not p_plus > p_minus:
        raise BadParams("bias required")
    start = cfg.start_label
    v_m = valuation(oriented.m, prime)
    v_n = valuation(oriented.n, prime)
    if start is None or valuation(start, prime) <= v_m:
        raise BadParams(f"start label N needs v_{prime}(N) > {v_m}")
    target = cfg.target_label if cfg.target_label is not None else start

    stats = lazy_walk_stats(p_plus, p_minus, cfg.trials, cfg.horizon, cfg.seed,
                            workers=workers, batch_size=cfg.batch_size, log_interval=log_interval)
    bound = float(p_plus - p_minus)

    audit_trials = min(cfg.audit_trials, cfg.trials)
    audit = [(0, 0, 0)]
    if audit_trials:
        action = partial(audit_batch, oriented, measure, prime, start, target,
                         min(cfg.audit_horizon, cfg.horizon), cfg.seed)
        audit = run_batches(action, make_batches(audit_trials, cfg.batch_size), workers, log_interval)

    report = NonmixingReport(
        never_return_hat=stats.never_return_hat,
        drift_hat=stats.drift_hat * (v_m - v_n),
        bound_check=stats.never_return_hat >= bound - 3 * stats.sigma,
        walk_drift_hat=stats.drift_hat,
        expected_drift=bound * (v_m - v_n),
        bound=bound,
        sigma=stats.sigma,
        ci=stats.ci,
        undecided_fraction=stats.undecided_fraction,
        truncation_bound=stats.truncation_bound,
        swapped=swapped,
        audit_trials=audit_trials,
        audit_exceeded=sum(a[0] for a in audit),
        audit_certificates_fired=sum(a[1] for a in audit),
        audit_failures=sum(a[2] for a in audit),
    )
    logger.info(f"Non-mixing: never_return={report.never_return_hat:.4f} bound={bound:.4f} check={report.bound_check}")
    return report


# Mixing witness

class MixingReport(NamedTuple):
    success_by_k: dict
    check_rate_by_k: dict
    paste_failures_by_k: dict
    k0: int
    phenotype: str


def _ball_preaction(params, g, radius):
    root = g.root if g.root is not None else g.vertices[0]
    return realize(params, rooted_ball(g, root, radius))


def last_core_visit(params, core, trace, neighborhood):
    """Last step whose increment passes within `neighborhood` of the core, letter by letter."""
    builder = SaturationBuilder(params, core)
    point = core.basepoint
    last = 0
    for step, increment in enumerate(trace.increments, start=1):
        for letter in increment:
            point = builder.apply(point, letter)
            if builder.depth(point.orbit) <= neighborhood:
                last = step
    return last


def calibrate_k0(params, cores, measure, length, walks, epsilon, neighborhood, seed):
    """
    Smallest k0 such that a (1 - epsilon) share of calibration walks from
    every basepoint never come back near the core after step k0.
    """
    k0 = 0
    for index, core in enumerate(cores):
        last = [
            last_core_visit(params, core, sample_walk(measure, length, seed_sequence(seed, CALIBRATION_STREAM, index, walk)), neighborhood)
            for walk in range(walks)
        ]
        k0 = max(k0, int(np.quantile(np.array(last), 1 - epsilon, method="higher")) + 1)
    return k0


def witness_batch(params, pre1, pre2, measure, k, k_index, k0, seed, batch):
    """(hypotheses held, pasted, pasting failures) for one batch of walks of length k."""
    _, first, size = batch
    held = pasted = failed = 0
    if k < 2 * k0 + 2:
        return held, pasted, failed
    for trial in range(first, first + size):
        increments = sample_walk(measure, k, seed_sequence(seed, WITNESS_STREAM, k_index, trial)).increments
        merge = MergeInput(
            pre1, pre2,
            product(params, increments[:k0]),
            product(params, increments[k0:k - k0]),
            product(params, increments[k - k0:]),
        )
        check = check_merge_hypotheses(params, merge)
        if not check.holds:
            continue
        held += 1
        try:
            paste(params, merge, check=check)
            pasted += 1
        except HypothesesNotMet as e:
            logger.debug(f"Pasting failed for trial {trial} at k={k}: {e}")
            failed += 1
    return held, pasted, failed


def mixing_witness_experiment(cfg, core1, core2, radius=None, workers=1, log_interval=60):
    """
    For walks (G_1, ..., G_k) split as head, middle and tail of k0, k - 2k0, k0
    increments, how often the R-ball preactions of the two cores can be pasted.
    """
    params = cfg.params
    radius = cfg.radius if radius is None else radius
    for core in (core1, core2):
        if not validate(params, core).valid:
            raise InvalidGraph("core violates degree caps or the Transfer Equation")
        _require_perfect_kernel_core(params, core)
    ph1 = graph_phenotype(params, core1)
    ph2 = graph_phenotype(params, core2)
    if ph1 != ph2:
        raise BadParams(f"phenotype mismatch: {format_label(ph1)} != {format_label(ph2)}")
    if not is_infinite(ph1) and not params.unimodular:
        raise BadParams("finite phenotype needs |m| = |n|")
    _require_walk_measure(params, cfg.measure)
    if not cfg.measure.is_weight_symmetric(params):
        raise BadParams("step measure weights are not symmetric")

    pre1 = _ball_preaction(params, core1, radius)
    pre2 = _ball_preaction(params, core2, radius)
    # The reversed walk of a weight-symmetric measure has the same law
    k0 = calibrate_k0(params, (pre1, pre2), cfg.measure, max(cfg.ks), cfg.calibration_walks,
                      cfg.epsilon, cfg.neighborhood, cfg.seed)
    logger.info(f"Mixing witness: calibrated k0={k0}")

    success, check_rate, failures = {}, {}, {}
    for k_index, k in enumerate(cfg.ks):
        action = partial(witness_batch, params, pre1, pre2, cfg.measure, k, k_index, k0, cfg.seed)
        results = run_batches(action, make_batches(cfg.trials, cfg.batch_size), workers, log_interval)
        held = sum(r[0] for r in results)
        pasted = sum(r[1] for r in results)
        success[k] = pasted / cfg.trials
        check_rate[k] = held / cfg.trials
        failures[k] = sum(r[2] for r in results)
        logger.info(f"Mixing witness k={k}: success={success[k]:.4f}")

    return MixingReport(success, check_rate, failures, k0, format_label(ph1))
