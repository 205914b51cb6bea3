"""Combination policies: left-stochastic weight matrices over a topology.

A policy is the triple (A1, A0, A2) of N x N left-stochastic matrices
applied around the gradient step.  The presets combine a single matrix A:

    consensus  -> (I, A, I)
    atc        -> (I, I, A)      adapt-then-combine
    cta        -> (A, I, I)      combine-then-adapt

All three give the same product A1 A0 A2 = A, whose Perron eigenvector
determines the network's limit point and steady-state error.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import ConnectivityError, IterationLimitError, StructureError
from .topology import Topology

_COL_TOL = 1e-12

PRESETS = ("consensus", "atc", "cta")


@dataclass
class CombinationPolicy:
    """Immutable triple of left-stochastic matrices plus their product."""

    kind: str
    a1: np.ndarray
    a0: np.ndarray
    a2: np.ndarray
    a: np.ndarray
    support: Topology

    def __post_init__(self):
        for m in (self.a1, self.a0, self.a2, self.a):
            m.setflags(write=False)


@dataclass(frozen=True)
class PerronData:
    """Perron eigenvector of A and the step-size-weighted p vector.

    p_k = (mu_k / mu_max) * pi_k with pi = A2 theta.
    """

    theta: np.ndarray
    pi: np.ndarray
    p: np.ndarray
    mus: np.ndarray
    mu_max: float


def is_primitive(a: np.ndarray, j_max: int | None = None) -> bool:
    """True iff some power A^j, j <= j_max, is entrywise positive.

    Default ``j_max`` is the Wielandt bound N^2 - 2N + 2, sufficient for
    every primitive matrix.  Works on the sparsity pattern so repeated
    powers cannot underflow.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError("matrix must be square")
    if (a < 0).any():
        raise ValueError("matrix must be nonnegative")
    n = a.shape[0]
    if j_max is None:
        j_max = n * n - 2 * n + 2
    pattern = (a > 0).astype(float)
    power = pattern.copy()
    for _ in range(max(j_max, 1)):
        if (power > 0).all():
            return True
        power = ((power @ pattern) > 0).astype(float)
    return bool((power > 0).all())


def perron_vector(a: np.ndarray, tol: float = 1e-12,
                  max_iter: int = 100_000) -> np.ndarray:
    """Positive unit-sum right eigenvector of a primitive matrix at eigenvalue 1.

    Power iteration with sum normalization at every step; converges at the
    rate of the second eigenvalue magnitude.  Raises ``StructureError`` for
    non-primitive input and ``IterationLimitError`` (carrying the final
    residual) when the residual ||A theta - theta||_inf stays above ``tol``.
    """
    a = np.asarray(a, dtype=float)
    if tol <= 0:
        raise ValueError("tol must be positive")
    if not is_primitive(a):
        raise StructureError("matrix is not primitive")
    n = a.shape[0]
    theta = np.full(n, 1.0 / n)
    residual = np.inf
    for _ in range(max_iter):
        nxt = a @ theta
        nxt /= nxt.sum()
        residual = np.abs(a @ nxt - nxt).max()
        theta = nxt
        if residual <= tol:
            return theta
    raise IterationLimitError(
        f"power iteration did not reach tol={tol} in {max_iter} steps "
        f"(residual {residual:.3e})",
        residual=residual,
    )


def second_eigenvalue_magnitude(a: np.ndarray) -> float:
    """|lambda_2(A)|: second largest eigenvalue magnitude; 0 for 1x1 input."""
    a = np.asarray(a, dtype=float)
    if a.shape[0] == 1:
        return 0.0
    mags = np.sort(np.abs(np.linalg.eigvals(a)))[::-1]
    return float(mags[1])


def compute_p(a2: np.ndarray, theta: np.ndarray, mus) -> PerronData:
    """Step-size-weighted network weights p_k = (mu_k/mu_max) (A2 theta)_k."""
    theta = np.asarray(theta, dtype=float)
    mus = np.broadcast_to(np.asarray(mus, dtype=float), theta.shape).copy()
    if (mus < 0).any():
        raise ValueError("step sizes must be nonnegative")
    mu_max = float(mus.max())
    if mu_max == 0.0:
        raise ValueError("at least one step size must be positive")
    pi = np.asarray(a2, dtype=float) @ theta
    p = (mus / mu_max) * pi
    return PerronData(theta=theta, pi=pi, p=p, mus=mus, mu_max=mu_max)


def build_perron(policy: CombinationPolicy, mus,
                 tol: float = 1e-12) -> PerronData:
    """Perron data for an assembled policy and a step-size profile."""
    return compute_p(policy.a2, perron_vector(policy.a, tol=tol), mus)


def build_hastings(topology: Topology, target) -> np.ndarray:
    """Left-stochastic matrix on the graph with prescribed Perron vector.

    Off-diagonal weights for l in N_k, l != k:

        a_lk = target_k^-1 / max(|N_k| target_k^-1, |N_l| target_l^-1)

    and the diagonal takes the column remainder.  The result satisfies
    detailed balance target_k a_lk = target_l a_kl, hence A target = target.
    """
    target = np.asarray(target, dtype=float)
    if target.shape != (topology.n,):
        raise ValueError("target length must equal the agent count")
    if (target <= 0).any():
        raise ValueError("target entries must be positive")
    if not topology.is_connected():
        raise ConnectivityError("Hastings weights need a connected topology")
    n = topology.n
    a = np.zeros((n, n))
    deg = np.array([topology.degree(k) for k in range(n)], dtype=float)
    for k in range(n):
        for l in topology.neighbors[k]:
            if l != k:
                # target_k^-1 / max(|N_k| target_k^-1, |N_l| target_l^-1),
                # written through the target ratio so a uniform target
                # collapses to the Metropolis weights exactly
                a[l, k] = 1.0 / max(deg[k], deg[l] * (target[k] / target[l]))
        a[k, k] = 1.0 - a[:, k].sum()
    return a


def build_metropolis(topology: Topology) -> np.ndarray:
    """Uniform-target specialization: a_lk = 1 / max(|N_k|, |N_l|) off-diagonal."""
    n = topology.n
    a = np.zeros((n, n))
    for k in range(n):
        for l in topology.neighbors[k]:
            if l != k:
                a[l, k] = 1.0 / max(topology.degree(k), topology.degree(l))
        a[k, k] = 1.0 - a[:, k].sum()
    return a


def build_uniform_averaging(topology: Topology) -> np.ndarray:
    """a_lk = 1/|N_k| for l in N_k: left-stochastic, generally not doubly."""
    n = topology.n
    a = np.zeros((n, n))
    for k in range(n):
        a[list(topology.neighbors[k]), k] = 1.0 / topology.degree(k)
    return a


def _validated_factor(m: np.ndarray, topology: Topology, name: str) -> np.ndarray:
    m = np.array(m, dtype=float)
    n = topology.n
    if m.shape != (n, n):
        raise StructureError(f"{name} must be {n}x{n}")
    if (m < -_COL_TOL).any():
        raise StructureError(f"{name} has negative entries")
    m = np.clip(m, 0.0, None)
    cols = m.sum(axis=0)
    if np.abs(cols - 1.0).max() > _COL_TOL:
        raise StructureError(
            f"{name} is not left-stochastic (max column-sum error "
            f"{np.abs(cols - 1.0).max():.3e})"
        )
    for k in range(n):
        off = [l for l in range(n) if l not in topology.neighbors[k]]
        if off and np.abs(m[off, k]).max() > 0.0:
            raise StructureError(f"{name} assigns weight outside neighborhoods")
    return m / cols  # exact column renormalization


def assemble(kind: str, a: np.ndarray | None = None, *,
             support: Topology,
             a1: np.ndarray | None = None,
             a0: np.ndarray | None = None,
             a2: np.ndarray | None = None) -> CombinationPolicy:
    """Build a policy from a preset (consensus/atc/cta) or a custom triple.

    Presets place the single matrix ``a`` per the table in the module
    docstring.  The product A1 A0 A2 must be primitive on the support.
    """
    eye = np.eye(support.n)
    if kind in PRESETS:
        if a is None:
            raise ValueError(f"preset {kind!r} needs the combination matrix a")
        a = _validated_factor(a, support, "a")
        triple = {
            "consensus": (eye, a, eye),
            "atc": (eye, eye, a),
            "cta": (a, eye, eye),
        }[kind]
    elif kind == "custom":
        if a1 is None or a0 is None or a2 is None:
            raise ValueError("custom policies need all of a1, a0, a2")
        triple = tuple(
            _validated_factor(m, support, name)
            for m, name in ((a1, "a1"), (a0, "a0"), (a2, "a2"))
        )
    else:
        raise ValueError(f"unknown strategy kind {kind!r}")
    product = triple[0] @ triple[1] @ triple[2]
    if not is_primitive(product):
        raise StructureError("product A1 A0 A2 is not primitive")
    return CombinationPolicy(kind=kind, a1=triple[0], a0=triple[1],
                             a2=triple[2], a=product, support=support)


def policy_to_json(policy: CombinationPolicy, perron: PerronData) -> dict:
    """JSON form {"kind", "A" (row-major), "theta", "p"}."""
    return {
        "kind": policy.kind,
        "A": policy.a.tolist(),
        "theta": perron.theta.tolist(),
        "p": perron.p.tolist(),
    }
