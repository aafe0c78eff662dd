"""Shared test oracles, coded independently of the library internals."""

from itertools import combinations

import numpy as np

from batchdesign import (
    CriterionSpec,
    Measure,
    SampleSet,
    build_info_state,
    measure_of_sample,
    project_capped_simplex,
)
from batchdesign.errors import SingularInformation


def gaussian_pool(rng, N, k, intercept=True):
    X = rng.standard_normal((N, k))
    if intercept:
        X[:, 0] = 1.0
    return X


def random_feasible(rng, N, eps, measure=True):
    """Uniformly-ish random point of the capped simplex via projection."""
    w = project_capped_simplex(rng.random(N), eps, 1.0)
    return Measure(w, eps) if measure else w


def phi_of_subset(atoms, idx, spec):
    w = measure_of_sample(SampleSet(tuple(int(i) for i in idx)), len(atoms))
    try:
        return build_info_state(atoms, w, spec).phi_value
    except SingularInformation:
        return np.inf


def enumerate_subsets(atoms, n, spec):
    """All size-n subsets with their criterion values (inf when singular)."""
    out = {}
    for combo in combinations(range(len(atoms)), n):
        out[combo] = phi_of_subset(atoms, combo, spec)
    return out


def best_subset(atoms, n, spec):
    table = enumerate_subsets(atoms, n, spec)
    combo = min(table, key=table.get)
    return combo, table[combo], table


def phi_direct(M, p, G=None):
    """Criterion value computed the straightforward way (naive oracle)."""
    M_inv = np.linalg.inv(M)
    Sigma = M_inv if G is None else G @ M_inv @ G.T
    q = Sigma.shape[0]
    lam = np.linalg.eigvalsh(0.5 * (Sigma + Sigma.T))
    if p == 0:
        return float(np.prod(lam) ** (1.0 / q))
    return float((np.sum(lam**p) / q) ** (1.0 / p))


def blend_phi(atoms, w_a, w_b, alpha, spec):
    wts = (1.0 - alpha) * np.asarray(w_a.weights) + alpha * np.asarray(w_b.weights)
    return build_info_state(atoms, wts, spec).phi_value


def sigmoid(t):
    return 1.0 / (1.0 + np.exp(-np.clip(t, -700, 700)))


def cumlink_pi(z, beta, theta):
    """Category probabilities of the proportional-odds model, coded directly."""
    t = np.asarray(theta, dtype=float) - float(np.dot(z, beta))
    gamma = np.concatenate([[0.0], sigmoid(t), [1.0]])
    return np.diff(gamma)


def cumlink_info_fd(z, beta, theta, h=1e-4):
    """Fisher information as the negated finite-difference Hessian of the
    exact expected log-likelihood (expectation over the J categories)."""
    z = np.asarray(z, dtype=float)
    beta = np.asarray(beta, dtype=float)
    theta = np.asarray(theta, dtype=float)
    d, J1 = beta.shape[0], theta.shape[0]
    k = d + J1
    p_true = cumlink_pi(z, beta, theta)

    def ell(params):
        pj = cumlink_pi(z, params[:d], params[d:])
        return float(p_true @ np.log(pj))

    base = np.concatenate([beta, theta])
    H = np.zeros((k, k))
    for a in range(k):
        for b in range(a, k):
            ea, eb = np.zeros(k), np.zeros(k)
            ea[a] = h
            eb[b] = h
            val = (
                ell(base + ea + eb)
                - ell(base + ea - eb)
                - ell(base - ea + eb)
                + ell(base - ea - eb)
            ) / (4.0 * h * h)
            H[a, b] = H[b, a] = val
    return -H


def sample_cumlink(rng, Z, beta, theta):
    """Draw ordinal responses 0..J-1 from the proportional-odds model."""
    t = np.asarray(theta)[None, :] - (Z @ beta)[:, None]
    gamma = np.hstack([np.zeros((Z.shape[0], 1)), sigmoid(t), np.ones((Z.shape[0], 1))])
    pi = np.diff(gamma, axis=1)
    u = rng.random(Z.shape[0])
    return (u[:, None] > np.cumsum(pi, axis=1)).sum(axis=1).astype(float)


def spd_criterion(p):
    return CriterionSpec(p=float(p))
