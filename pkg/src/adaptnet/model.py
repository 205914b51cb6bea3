"""Streaming-data models for distributed least-mean-squares estimation.

Every agent observes scalar measurements d = u w* + n with its own
regressor covariance R_u,k and noise power sigma_n,k^2; all agents share
the unknown parameter vector w*.  The model exposes everything the
strategy and theory layers need: samples, stochastic and true gradients,
gradient-noise covariance, Hessians, the constants appearing in the
step-size bound, and the network limit point.

The interface is pluggable: any object providing the same methods
(``sample_network``, ``stochastic_gradient_network``, ``true_gradient``,
``hessian``, ``rv_blocks``, ``stream_width``) can drive the simulator.
Only the Gaussian linear model ships.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .errors import ModelError, ObservabilityError

_SYM_TOL = 1e-12


@dataclass(frozen=True)
class AssumptionConstants:
    """Constants of the standard stochastic-gradient regularity conditions.

    lambda_l  strong-monotonicity constant of the weighted gradient sum
    lambda_u  Lipschitz constant of the individual gradients
    alpha     relative gradient-noise coefficient (conservative bound)
    sigma_v2  absolute gradient-noise floor
    """

    lambda_l: float
    lambda_u: float
    alpha: float
    sigma_v2: float

    def __post_init__(self):
        if self.lambda_l > self.lambda_u + 1e-12:
            raise ValueError("lambda_l cannot exceed lambda_u")


def noise_profile(n: int, seed: int, lo: float = 1e-3, hi: float = 1e-1,
                  anchor: bool = True) -> np.ndarray:
    """Heterogeneous noise variances, log-uniform in [lo, hi].

    With ``anchor`` (default) the draw is affinely rescaled in log-space so
    its extremes sit exactly at ``lo`` and ``hi``, pinning the dynamic range
    of the profile (10 log10(hi/lo) dB) independent of the seed.
    """
    if n < 1:
        raise ValueError("need at least one agent")
    if not 0 < lo <= hi:
        raise ValueError("need 0 < lo <= hi")
    rng = np.random.default_rng(seed)
    x = rng.random(n)
    if anchor and n > 1 and x.max() > x.min():
        x = (x - x.min()) / (x.max() - x.min())
    return 10.0 ** (np.log10(lo) + x * (np.log10(hi) - np.log10(lo)))


def _covariance_factor(r: np.ndarray) -> np.ndarray:
    """Square root F with F F^T = R; tolerates PSD-singular covariances."""
    try:
        return np.linalg.cholesky(r)
    except np.linalg.LinAlgError:
        vals, vecs = np.linalg.eigh(r)
        if vals.min() < -_SYM_TOL * max(1.0, vals.max(), 1.0):
            raise ModelError(
                f"covariance is indefinite (min eigenvalue {vals.min():.3e})"
            )
        return vecs * np.sqrt(np.clip(vals, 0.0, None))


@dataclass
class LinearModel:
    """Per-agent Gaussian linear regression sharing one parameter vector.

    w_star    (M,) shared parameter
    r_u       (N, M, M) per-agent regressor covariances, symmetric PSD
    sigma_n2  (N,) per-agent noise variances, nonnegative
    """

    w_star: np.ndarray
    r_u: np.ndarray
    sigma_n2: np.ndarray
    _factors: np.ndarray = field(init=False, repr=False)
    _identity_factors: bool = field(init=False, repr=False)

    def __post_init__(self):
        self.w_star = np.asarray(self.w_star, dtype=float)
        self.r_u = np.asarray(self.r_u, dtype=float)
        self.sigma_n2 = np.asarray(self.sigma_n2, dtype=float)
        if self.w_star.ndim != 1:
            raise ModelError("w_star must be one-dimensional")
        m = self.w_star.size
        if self.r_u.ndim != 3 or self.r_u.shape[1:] != (m, m):
            raise ModelError("r_u must have shape (N, M, M)")
        n = self.r_u.shape[0]
        if self.sigma_n2.shape != (n,):
            raise ModelError("sigma_n2 must have one entry per agent")
        if (self.sigma_n2 < 0).any():
            raise ModelError("noise variances must be nonnegative")
        for k in range(n):
            r = self.r_u[k]
            scale = max(1.0, np.abs(r).max())
            if np.abs(r - r.T).max() > _SYM_TOL * scale:
                raise ModelError(f"r_u[{k}] is not symmetric")
        self._factors = np.stack(
            [_covariance_factor(self.r_u[k]) for k in range(n)]
        )
        eye = np.eye(m)
        self._identity_factors = all(
            np.array_equal(self._factors[k], eye) for k in range(n)
        )

    # --- basic geometry -------------------------------------------------
    @property
    def n_agents(self) -> int:
        return self.r_u.shape[0]

    @property
    def m(self) -> int:
        return self.w_star.size

    @property
    def stream_width(self) -> int:
        """Standard normals consumed per network sample: N*M + N."""
        return self.n_agents * (self.m + 1)

    # --- sampling --------------------------------------------------------
    def sample(self, k: int, rng) -> tuple[np.ndarray, float]:
        """One (regressor, measurement) pair for agent k."""
        u = self._factors[k] @ rng.standard_normal(self.m)
        d = float(u @ self.w_star
                  + np.sqrt(self.sigma_n2[k]) * rng.standard_normal())
        return u, d

    def regressors_from_raw(self, raw: np.ndarray):
        """Map raw standard normals (..., N*M + N) to (u, d).

        Per network sample the stream is laid out regressors-first:
        N*M values for the regressors, then N for the measurement noise.
        """
        n, m = self.n_agents, self.m
        z = raw[..., : n * m].reshape(raw.shape[:-1] + (n, m))
        noise = raw[..., n * m:]
        if self._identity_factors:
            u = z
        else:
            u = np.einsum("kij,...kj->...ki", self._factors, z)
        d = np.einsum("...km,m->...k", u, self.w_star) \
            + noise * np.sqrt(self.sigma_n2)
        return u, d

    def sample_network(self, rng, size: tuple = ()):
        """Fresh samples for every agent: u (*size, N, M), d (*size, N)."""
        raw = rng.standard_normal(tuple(size) + (self.stream_width,))
        return self.regressors_from_raw(raw)

    # --- gradients -------------------------------------------------------
    def stochastic_gradient(self, k: int, w: np.ndarray, sample) -> np.ndarray:
        """Instantaneous gradient -2 u^T (d - u w) from one sample."""
        u, d = sample
        return -2.0 * u * (d - u @ np.asarray(w, dtype=float))

    def stochastic_gradient_network(self, x, u, d) -> np.ndarray:
        """Per-agent instantaneous gradients, batched.

        ``x`` holds the evaluation points, broadcastable to u's shape
        (..., N, M); a shared iterate can be passed as (..., 1, M).
        """
        resid = d - np.einsum("...km,...km->...k", u, np.broadcast_to(x, u.shape))
        return u * (-2.0 * resid)[..., None]

    def true_gradient(self, k: int, w) -> np.ndarray:
        """Exact gradient 2 R_u,k (w - w*)."""
        return 2.0 * self.r_u[k] @ (np.asarray(w, dtype=float) - self.w_star)

    def true_gradient_all(self, w) -> np.ndarray:
        """Stacked exact gradients, shape (N, M)."""
        delta = np.asarray(w, dtype=float) - self.w_star
        return 2.0 * np.einsum("kij,j->ki", self.r_u, delta)

    # --- second-order quantities ------------------------------------------
    def gradient_noise_covariance(self, k: int) -> np.ndarray:
        """Covariance of the gradient noise at w*: 4 sigma_n,k^2 R_u,k."""
        return 4.0 * self.sigma_n2[k] * self.r_u[k]

    def rv_blocks(self) -> np.ndarray:
        """Block-diagonal network gradient-noise covariance, as (N, M, M)."""
        return 4.0 * self.sigma_n2[:, None, None] * self.r_u

    def hessian(self, k: int) -> np.ndarray:
        """Gradient Jacobian at the limit point: 2 R_u,k."""
        return 2.0 * self.r_u[k]

    # --- serialization -----------------------------------------------------
    def to_json(self) -> dict:
        return {
            "M": self.m,
            "w_star": self.w_star.tolist(),
            "agents": [
                {"R_u": self.r_u[k].tolist(), "sigma_n2": float(self.sigma_n2[k])}
                for k in range(self.n_agents)
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "LinearModel":
        agents = obj["agents"]
        return cls(
            w_star=np.asarray(obj["w_star"], dtype=float),
            r_u=np.stack([np.asarray(a["R_u"], dtype=float) for a in agents]),
            sigma_n2=np.asarray([a["sigma_n2"] for a in agents], dtype=float),
        )


def network_hessian(model, p) -> np.ndarray:
    """Weighted gradient-Jacobian sum sum_k p_k H_k at the limit point."""
    p = np.asarray(p, dtype=float)
    h = np.stack([model.hessian(k) for k in range(model.n_agents)])
    return np.einsum("k,kij->ij", p, h)


def check_network_observability(model, p) -> tuple[bool, float]:
    """Whether sum_k p_k R_u,k is positive definite, plus its min eigenvalue.

    Individual agents may be unidentifiable (singular R_u,k); the network
    can still determine the common parameter when the weighted sum is PD.
    If it holds for one positive weight vector it holds for all.
    """
    p = np.asarray(p, dtype=float)
    s = np.einsum("k,kij->ij", p, model.r_u)
    lam_min = float(np.linalg.eigvalsh(0.5 * (s + s.T)).min())
    return lam_min > 1e-10, lam_min


def assumption_constants(model, p) -> AssumptionConstants:
    """Regularity constants for the Gaussian linear model.

    lambda_u: 2 max_k lambda_max(R_u,k).
    lambda_l: minimum eigenvalue of the symmetrized network Hessian.
    alpha:    4 max_k (Tr(R)^2 + Tr(R^2)), the Gaussian fourth-moment bound
              on E||R - u^T u||^2 (conservative; feeds the step-size bound).
    sigma_v2: 4 max_k sigma_n,k^2 Tr(R_u,k) = max_k E||2 u^T n||^2.
    """
    lam_max = max(
        float(np.linalg.eigvalsh(model.r_u[k]).max())
        for k in range(model.n_agents)
    )
    hc = network_hessian(model, p)
    lam_l = float(np.linalg.eigvalsh(0.5 * (hc + hc.T)).min())
    if lam_l <= 1e-10:
        raise ObservabilityError(
            f"weighted Hessian sum is singular (min eigenvalue {lam_l:.3e}); "
            "the model is not jointly observable"
        )
    traces = np.einsum("kii->k", model.r_u)
    sq_traces = np.einsum("kij,kji->k", model.r_u, model.r_u)
    alpha = 4.0 * float((traces ** 2 + sq_traces).max())
    sigma_v2 = 4.0 * float((model.sigma_n2 * traces).max())
    return AssumptionConstants(lambda_l=lam_l, lambda_u=2.0 * lam_max,
                               alpha=alpha, sigma_v2=sigma_v2)


def limit_point(model, p, tol: float = 1e-10, max_iter: int = 50) -> np.ndarray:
    """Solve sum_k p_k s_k(w) = 0 for the network limit point.

    Damped Newton on the weighted gradient sum, using the network Hessian
    as the (constant, for quadratic costs) Jacobian; the linear model
    converges in one exact step to the shared parameter vector.
    """
    p = np.asarray(p, dtype=float)
    hc = network_hessian(model, p)
    lam_l = float(np.linalg.eigvalsh(0.5 * (hc + hc.T)).min())
    if lam_l <= 1e-10:
        raise ObservabilityError(
            f"weighted Hessian sum is singular (min eigenvalue {lam_l:.3e})"
        )
    w = np.zeros(model.m)

    def weighted_gradient(x):
        return np.einsum(
            "k,ki->i", p,
            np.stack([model.true_gradient(k, x) for k in range(model.n_agents)]),
        )

    g = weighted_gradient(w)
    scale = max(1.0, float(np.linalg.norm(model.w_star)))
    for _ in range(max_iter):
        if np.linalg.norm(g) <= tol * scale:
            return w
        step = np.linalg.solve(hc, g)
        size = 1.0
        for _ in range(30):  # backtracking; a no-op for quadratic costs
            cand = w - size * step
            g_cand = weighted_gradient(cand)
            if np.linalg.norm(g_cand) <= np.linalg.norm(g):
                w, g = cand, g_cand
                break
            size *= 0.5
        else:
            break
    if np.linalg.norm(g) > tol * scale:
        raise ObservabilityError("Newton iteration failed to locate the limit point")
    return w
