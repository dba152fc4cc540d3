# SG-MCMC on the probability simplex.
"""Minibatch SG-MCMC for a simplex-valued parameter under a multinomial likelihood.

The chain state is ``phi`` on the simplex plus a running estimate ``M`` of
the expected total count. Each step draws from a Gaussian centred at a
preconditioned gradient step, truncated to the simplex:

* :func:`sgmcmc_step_fast` draws the Gaussian on the hyperplane
  ``1^T phi = 1`` with the ``O(V)`` simplex projection, then clips and
  renormalizes if the draw leaves the positive orthant.
* :func:`sgmcmc_step_gibbs` samples the same Gaussian in reduced coordinates
  (first ``V - 1`` entries) truncated exactly to the simplex, one coordinate
  at a time.

Corpus helpers build a synthetic multinomial corpus, its exact batch
posterior mean under a symmetric Dirichlet prior, and reproducible minibatch
schedules.
"""

from __future__ import annotations

import numpy as np
import structlog
from numpy.typing import ArrayLike, NDArray

from core.models.covariance import FloatArray, as_vector
from core.models.exceptions import DimensionMismatchError, InvalidArgumentError
from core.models.sgmcmc_models import MinibatchCounts, SgmcmcConfig, SimplexState
from core.samplers.hyperplane import sample_simplex_diag
from core.samplers.rng import RngState
from core.samplers.truncated_normal import truncated_normal_from_uniform

log = structlog.get_logger()

CountMatrix = NDArray[np.int64]


def generate_synthetic_corpus(
    v: int,
    n_docs: int,
    n_spike: int,
    spike_value: float,
    poisson_mean: float,
    rng: RngState,
) -> tuple[FloatArray, CountMatrix]:
    """Sample a true ``phi`` and an ``n_docs x v`` matrix of document counts.

    ``phi`` is ``f / sum(f)`` with ``f ~ Uniform(0, 1)^v`` and ``n_spike``
    random coordinates reset to ``spike_value``. Document ``j`` has
    ``n_j ~ Poisson(poisson_mean)`` words drawn ``Multinomial(n_j, phi)``.
    """

    if v < 2:
        raise InvalidArgumentError(f"vocabulary needs at least two words, got {v}")
    if n_docs < 1:
        raise InvalidArgumentError("corpus needs at least one document")
    if not 0 <= n_spike < v:
        raise InvalidArgumentError(f"n_spike must lie in [0, {v}), got {n_spike}")
    if n_spike and spike_value <= 0:
        raise InvalidArgumentError("spike_value must be positive")
    if poisson_mean <= 0:
        raise InvalidArgumentError("poisson_mean must be positive")

    generator = rng.generator
    weights = generator.uniform(0.0, 1.0, v)
    if n_spike:
        weights[generator.choice(v, size=n_spike, replace=False)] = spike_value
    true_phi = weights / weights.sum()
    lengths = generator.poisson(poisson_mean, size=n_docs)
    docs = generator.multinomial(lengths, true_phi).astype(np.int64)
    log.info(
        "sgmcmc.corpus_generated",
        v=v,
        n_docs=n_docs,
        n_words=int(lengths.sum()),
        n_spike=n_spike,
    )
    return true_phi, docs


def _as_counts(docs: ArrayLike) -> CountMatrix:
    counts = np.asarray(docs)
    if counts.ndim == 1:
        counts = counts.reshape(1, -1)
    if counts.ndim != 2 or counts.shape[0] == 0:
        raise InvalidArgumentError("docs must be a nonempty 2-D count matrix")
    if np.any(counts < 0):
        raise InvalidArgumentError("document counts must be nonnegative")
    return counts.astype(np.int64)


def batch_posterior_mean(docs: ArrayLike, eta: float) -> FloatArray:
    """``(sum_j n_j + eta) / (sum_j n_.j + eta V)``.

    Examples
    --------
    >>> batch_posterior_mean([[1, 0]], eta=1.0)
    array([0.66666667, 0.33333333])
    """

    counts = _as_counts(docs)
    if eta <= 0:
        raise InvalidArgumentError(f"eta must be positive, got {eta}")
    per_word = counts.sum(axis=0)
    v = counts.shape[1]
    return (per_word + eta) / (float(per_word.sum()) + eta * v)


def minibatch_schedule(
    n_docs: int, minibatch_size: int, n_minibatches: int, rng: RngState
) -> list[NDArray[np.int64]]:
    """Document indices for ``n_minibatches`` consecutive minibatches.

    Each epoch visits the documents in a fresh permutation drawn from
    ``rng.spawn(epoch)``; a short final minibatch closes the epoch.
    """

    if minibatch_size < 1 or n_docs < 1:
        raise InvalidArgumentError("n_docs and minibatch_size must be positive")
    size = min(minibatch_size, n_docs)
    batches: list[NDArray[np.int64]] = []
    epoch = 0
    while len(batches) < n_minibatches:
        order = rng.spawn(epoch).permutation(n_docs)
        for start in range(0, n_docs, size):
            if len(batches) == n_minibatches:
                break
            batches.append(order[start : start + size])
        epoch += 1
    return batches


def minibatch_counts(docs: ArrayLike, indices: NDArray[np.int64]) -> MinibatchCounts:
    """Sum the selected documents; ``rho`` is corpus size over minibatch size."""

    counts = _as_counts(docs)
    if len(indices) == 0:
        raise InvalidArgumentError("minibatch is empty")
    return MinibatchCounts.from_counts(
        counts[indices].sum(axis=0), rho=counts.shape[0] / len(indices)
    )


def step_size(t: int, exponent: float) -> float:
    if t < 1:
        raise InvalidArgumentError(f"step index starts at 1, got {t}")
    return float(t) ** -exponent


def update_m_estimate(
    m_estimate: float, epsilon: float, batch: MinibatchCounts
) -> float:
    """Convex combination ``(1 - eps) M + eps rho n_..``."""

    updated = (1.0 - epsilon) * m_estimate + epsilon * batch.rho * batch.n_total
    if updated <= 0:
        raise InvalidArgumentError("M estimate is zero; minibatch has no words")
    return updated


def _check_batch(state: SimplexState, batch: MinibatchCounts) -> None:
    if batch.n_colon.shape[0] != state.v:
        raise DimensionMismatchError(
            f"minibatch has {batch.n_colon.shape[0]} words, state has V={state.v}"
        )


def proposal_mean(
    phi: FloatArray,
    batch: MinibatchCounts,
    cfg: SgmcmcConfig,
    epsilon: float,
    m_estimate: float,
) -> FloatArray:
    """``phi + (eps / M) [(rho n + eta) - (rho n_.. + eta V) phi]``."""

    v = phi.shape[0]
    gradient = (batch.rho * batch.n_colon + cfg.eta) - (
        batch.rho * batch.n_total + cfg.eta * v
    ) * phi
    return phi + (epsilon / m_estimate) * gradient


def _step_parameters(
    state: SimplexState, batch: MinibatchCounts, cfg: SgmcmcConfig
) -> tuple[float, float]:
    """Step size and updated ``M`` for the step after ``state``."""

    _check_batch(state, batch)
    epsilon = step_size(state.step_index + 1, cfg.step_exponent)
    return epsilon, update_m_estimate(state.m_estimate, epsilon, batch)


def _projected_draw(
    state: SimplexState,
    batch: MinibatchCounts,
    cfg: SgmcmcConfig,
    epsilon: float,
    m_estimate: float,
    rng: RngState,
    size: int | None,
) -> FloatArray:
    mean = proposal_mean(state.phi, batch, cfg, epsilon, m_estimate)
    return sample_simplex_diag(mean, 2.0 * epsilon / m_estimate, state.phi, rng, size)


def fast_proposal(
    state: SimplexState,
    batch: MinibatchCounts,
    cfg: SgmcmcConfig,
    rng: RngState,
    size: int | None = None,
) -> FloatArray:
    """Projected Gaussian draw of the next step, before any clipping.

    Every returned row sums to one.
    """

    epsilon, m_estimate = _step_parameters(state, batch, cfg)
    return _projected_draw(state, batch, cfg, epsilon, m_estimate, rng, size)


def _clip_to_simplex(values: FloatArray, floor: float) -> FloatArray:
    clipped = np.maximum(values, max(floor, np.finfo(np.float64).tiny))
    return clipped / clipped.sum()


def sgmcmc_step_fast(
    state: SimplexState,
    batch: MinibatchCounts,
    cfg: SgmcmcConfig,
    rng: RngState,
) -> SimplexState:
    """One ``O(V)`` SG-MCMC step with the simplex projection.

    A projected draw with all entries positive is returned unchanged;
    otherwise entries are floored at ``cfg.epsilon_floor`` and renormalized.
    """

    epsilon, m_estimate = _step_parameters(state, batch, cfg)
    z = _projected_draw(state, batch, cfg, epsilon, m_estimate, rng, None)
    phi = z if np.all(z > 0) else _clip_to_simplex(z, cfg.epsilon_floor)
    return SimplexState(phi, m_estimate=m_estimate, step_index=state.step_index + 1)


def sgmcmc_step_gibbs(
    state: SimplexState,
    batch: MinibatchCounts,
    cfg: SgmcmcConfig,
    n_gibbs_iters: int,
    rng: RngState,
) -> SimplexState:
    """One SG-MCMC step that samples the truncated Gaussian by single-site Gibbs.

    Works on the reduced vector ``x`` (first ``V - 1`` entries) with mean
    ``m`` from :func:`proposal_mean` and covariance ``s [diag(p) - p p^T]``,
    ``s = 2 eps / M`` and ``p`` the reduced current point. Its precision is
    ``(1/s) [diag(1/p) + 1 1^T / p_V]``, so coordinate ``v`` given the rest
    is normal with variance ``s p_v p_V / (p_v + p_V)`` and mean
    ``m_v - p_v / (p_v + p_V) * sum_{j != v} (x_j - m_j)``, truncated to
    ``[0, 1 - sum_{j != v} x_j]``. Coordinates are visited in ascending order,
    starting from the current point.
    """

    if n_gibbs_iters < 1:
        raise InvalidArgumentError("n_gibbs_iters must be at least 1")
    epsilon, m_estimate = _step_parameters(state, batch, cfg)
    scale = 2.0 * epsilon / m_estimate

    reduced = state.reduced
    last = float(state.phi[-1])
    mean = proposal_mean(state.phi, batch, cfg, epsilon, m_estimate)[:-1]
    weight = reduced / (reduced + last)
    sd = np.sqrt(scale * reduced * last / (reduced + last))
    zero_noise = rng.noise_scale == 0.0
    gap = np.finfo(np.float64).tiny

    x = reduced.copy()
    total = float(x.sum())
    deviation = float((x - mean).sum())
    for _ in range(n_gibbs_iters):
        uniforms = (
            np.zeros(x.shape[0]) if zero_noise else rng.uniform(0.0, 1.0, x.shape[0])
        )
        for v in range(x.shape[0]):
            rest = total - x[v]
            others = deviation - (x[v] - mean[v])
            centre = mean[v] - weight[v] * others
            upper = max(1.0 - rest, gap)
            if zero_noise:
                draw = min(max(centre, 0.0), upper)
            else:
                draw = truncated_normal_from_uniform(
                    centre, sd[v], 0.0, upper, uniforms[v]
                )
            total = rest + draw
            deviation = others + (draw - mean[v])
            x[v] = draw

    phi = np.append(x, 1.0 - x.sum())
    if not np.all(phi > 0):
        phi = _clip_to_simplex(phi, cfg.epsilon_floor)
    return SimplexState(phi, m_estimate=m_estimate, step_index=state.step_index + 1)


def fisher_information(phi: ArrayLike, m_estimate: float) -> FloatArray:
    """Multinomial Fisher information ``M [diag(1/p) + 1 1^T / p_V]`` (reduced).

    ``phi`` is the full simplex point; the result is ``(V - 1) x (V - 1)``.
    """

    point = as_vector(phi, "phi")
    reduced = point[:-1]
    last = 1.0 - reduced.sum()
    if np.any(reduced <= 0) or last <= 0:
        raise InvalidArgumentError("phi must lie in the interior of the simplex")
    size = reduced.shape[0]
    return m_estimate * (np.diag(1.0 / reduced) + np.full((size, size), 1.0 / last))


def residual_error(phi_est: ArrayLike, phi_ref: ArrayLike) -> float:
    estimate = as_vector(phi_est, "phi_est")
    reference = as_vector(phi_ref, "phi_ref")
    if estimate.shape != reference.shape:
        raise DimensionMismatchError(
            f"cannot compare vectors of length {estimate.shape[0]} "
            f"and {reference.shape[0]}"
        )
    return float(np.linalg.norm(estimate - reference))


__all__ = [
    "batch_posterior_mean",
    "fast_proposal",
    "fisher_information",
    "generate_synthetic_corpus",
    "minibatch_counts",
    "minibatch_schedule",
    "proposal_mean",
    "residual_error",
    "sgmcmc_step_fast",
    "sgmcmc_step_gibbs",
    "step_size",
    "update_m_estimate",
]
