"""One-step evolution engines.

Three recursions share the per-agent sample stream:

  distributed   phi_k = sum_l a1_lk w_l
                psi_k = sum_l a0_lk phi_l - mu_k shat_k(phi_k)
                w_k+  = sum_l a2_lk psi_l
  centralized   w+ = w - mu_max sum_k p_k shat_k(w)
  reference     w+ = w - mu_max sum_k p_k s_k(w)      (deterministic)

The stochastic gradient is always evaluated at the first-stage combine
phi_k.  Step functions are pure given (state, rng); one network sample
(every agent, agents in index order) is consumed per call.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ContractError
from .policy import CombinationPolicy, PerronData


@dataclass(frozen=True)
class NetworkState:
    """Stacked per-agent iterates, shape (N, M)."""

    w: np.ndarray
    iter: int = 0


@dataclass(frozen=True)
class CentralState:
    """Single shared iterate of the centralized recursion."""

    w_cent: np.ndarray
    iter: int = 0


@dataclass(frozen=True)
class ReferenceState:
    """Iterate of the deterministic reference recursion."""

    w_bar: np.ndarray
    iter: int = 0


def transposed_combiners(policy: CombinationPolicy):
    """(c1, c0, c2): transposed factors, or None where a factor is identity.

    With a transposed factor C, the combine step for stacked rows W is the
    plain matrix product C @ W.
    """
    eye = np.eye(policy.a.shape[0])
    return tuple(
        None if np.array_equal(mat, eye) else np.ascontiguousarray(mat.T)
        for mat in (policy.a1, policy.a0, policy.a2)
    )


def distributed_update(w, combiners, mus, model, u, d):
    """Shared kernel for one distributed step; batched over leading axes.

    ``w`` has shape (..., N, M); ``u``/``d`` are matching fresh samples.
    """
    c1, c0, c2 = combiners
    phi = w if c1 is None else c1 @ w
    grad = model.stochastic_gradient_network(phi, u, d)
    psi = (phi if c0 is None else c0 @ phi) - mus[:, None] * grad
    return psi if c2 is None else c2 @ psi


def step_distributed(state: NetworkState, policy: CombinationPolicy,
                     perron: PerronData, model, rng) -> NetworkState:
    """Advance every agent by one combine/adapt/combine round."""
    w = np.asarray(state.w, dtype=float)
    if w.shape != (model.n_agents, model.m):
        raise ContractError(
            f"state shape {w.shape} does not match the model "
            f"({model.n_agents} agents, dimension {model.m})"
        )
    u, d = model.sample_network(rng)
    w_next = distributed_update(w, transposed_combiners(policy),
                                perron.mus, model, u, d)
    return NetworkState(w=w_next, iter=state.iter + 1)


def step_centralized(state: CentralState, perron: PerronData, model,
                     rng) -> CentralState:
    """One step of the fusion-center recursion on all agents' fresh data."""
    w = np.asarray(state.w_cent, dtype=float)
    if w.shape != (model.m,):
        raise ContractError(f"state shape {w.shape} does not match dimension {model.m}")
    u, d = model.sample_network(rng)
    grad = model.stochastic_gradient_network(w[None, :], u, d)
    w_next = w - perron.mu_max * np.einsum("k,km->m", perron.p, grad)
    return CentralState(w_cent=w_next, iter=state.iter + 1)


def step_reference(state: ReferenceState, perron: PerronData,
                   model) -> ReferenceState:
    """One deterministic step along the weighted true gradients."""
    w = np.asarray(state.w_bar, dtype=float)
    grad = np.einsum("k,km->m", perron.p, model.true_gradient_all(w))
    return ReferenceState(w_bar=w - perron.mu_max * grad, iter=state.iter + 1)


def reference_init(w0_per_agent, theta) -> ReferenceState:
    """Reference start: the Perron-weighted average of the agents' starts."""
    w0 = np.asarray(w0_per_agent, dtype=float)
    theta = np.asarray(theta, dtype=float)
    if w0.shape[0] != theta.shape[0]:
        raise ContractError("one initial iterate per agent is required")
    return ReferenceState(w_bar=theta @ w0, iter=0)
