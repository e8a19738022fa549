import logging
import math
from functools import partial
from typing import NamedTuple
import numpy as np
from app.errors import BadParams
from app.task_processing_manager import make_batches, run_batches
from app.walks.sampling import seed_sequence

logger = logging.getLogger("Walks")

DEFAULT_BATCH_SIZE = 200


class LazyWalkStats(NamedTuple):
    """
    Estimates for the walk Z with steps +1, -1, 0 of probabilities p+, p-, rest.

    A walk counts as never returning when Z_n > 0 for every n up to the
    horizon and Z_horizon > drift*horizon/2. Walks positive throughout but
    under that guard are `undecided` and counted as returning.
    """
    never_return_hat: float
    drift_hat: float
    ci: tuple
    sigma: float
    undecided_fraction: float
    truncation_bound: float
    trials: int
    horizon: int


def lazy_walk_batch(p_plus, p_minus, horizon, seed, batch):
    """Counts for one batch: (never returned, undecided, sum of Z_horizon)."""
    index, _, size = batch
    rng = np.random.default_rng(seed_sequence(seed, index))
    steps = rng.choice(
        np.array([1, -1, 0], dtype=np.int8),
        size=(size, horizon),
        p=[p_plus, p_minus, 1.0 - p_plus - p_minus],
    )
    positions = np.cumsum(steps, axis=1, dtype=np.int32)
    stayed_positive = positions.min(axis=1) > 0
    guard = (p_plus - p_minus) * horizon / 2
    escaped = stayed_positive & (positions[:, -1] > guard)
    return (
        int(escaped.sum()),
        int((stayed_positive & ~escaped).sum()),
        int(positions[:, -1].sum(dtype=np.int64)),
    )


def check_lazy_walk_params(p_plus, p_minus, trials, horizon):
    if not p_plus > p_minus >= 0:
        raise BadParams("bias required: need p+ > p- >= 0")
    if p_plus + p_minus > 1:
        raise BadParams("p+ + p- exceeds 1")
    if trials < 1 or horizon < 1:
        raise BadParams("trials and horizon must be at least 1")


def lazy_walk_stats(p_plus, p_minus, trials, horizon, seed, workers=1,
                    batch_size=DEFAULT_BATCH_SIZE, log_interval=60):
    """Monte Carlo estimate of P(Z_n > 0 for all n >= 1) = p+ - p- and of the drift p+ - p-."""
    p_plus = float(p_plus)
    p_minus = float(p_minus)
    check_lazy_walk_params(p_plus, p_minus, trials, horizon)

    action = partial(lazy_walk_batch, p_plus, p_minus, horizon, seed)
    results = run_batches(action, make_batches(trials, batch_size), workers, log_interval)

    escaped = sum(r[0] for r in results)
    undecided = sum(r[1] for r in results)
    final_sum = sum(r[2] for r in results)

    never_return_hat = escaped / trials
    sigma = math.sqrt(never_return_hat * (1 - never_return_hat) / trials)
    drift = p_plus - p_minus
    z_guard = math.ceil(drift * horizon / 2)
    # Gambler's ruin: a walk at height z returns to 0 with probability (p-/p+)^z
    truncation_bound = (p_minus / p_plus) ** z_guard

    stats = LazyWalkStats(
        never_return_hat=never_return_hat,
        drift_hat=final_sum / (trials * horizon),
        ci=(never_return_hat - 3 * sigma, never_return_hat + 3 * sigma),
        sigma=sigma,
        undecided_fraction=undecided / trials,
        truncation_bound=truncation_bound,
        trials=trials,
        horizon=horizon,
    )
    logger.info(f"Lazy walk p+={p_plus} p-={p_minus}: never_return={never_return_hat:.4f} drift={stats.drift_hat:.4f}")
    return stats
