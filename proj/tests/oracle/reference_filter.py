#!/usr/bin/env python3
"""Independent numpy reference for the stochastic attitude filter.

Shares no code with the C++ library. It integrates the same continuous-time
laws with the same discretisation choices (exponential-map Euler on SO(3),
explicit Euler for the bias and covariance-bound estimates, 1+Upsilon floored
at 1e-3) but vectorised over trials and driven by numpy's own generator.

The steady-state mean it prints is frozen into the acceptance suite as the
reference level for the Monte Carlo convergence criterion.

    python3 tests/oracle/reference_filter.py --trials 100 --seed 2024
"""

import argparse
import json
import sys

import numpy as np


def hat(v):
    out = np.zeros(v.shape[:-1] + (3, 3))
    out[..., 0, 1] = -v[..., 2]
    out[..., 0, 2] = v[..., 1]
    out[..., 1, 0] = v[..., 2]
    out[..., 1, 2] = -v[..., 0]
    out[..., 2, 0] = -v[..., 1]
    out[..., 2, 1] = v[..., 0]
    return out


def expm_so3(w):
    # Rodrigues' rotation formula, batched; series for tiny angles.
    theta = np.linalg.norm(w, axis=-1)
    small = theta < 1e-8
    safe = np.where(small, 1.0, theta)
    a = np.where(small, 1.0 - theta**2 / 6.0, np.sin(safe) / safe)
    b = np.where(small, 0.5 - theta**2 / 24.0, (1.0 - np.cos(safe)) / safe**2)
    K = hat(w)
    return np.eye(3) + a[..., None, None] * K + b[..., None, None] * (K @ K)


def polar(m):
    # Nearest rotation through the SVD polar factor.
    u, _, vt = np.linalg.svd(m)
    return u @ vt


def angle_axis(alpha, axis):
    u = np.asarray(axis, dtype=float)
    u = u / np.linalg.norm(u)
    K = hat(u)
    return np.eye(3) + np.sin(alpha) * K + (1.0 - np.cos(alpha)) * (K @ K)


def simulate(trials, seed, duration=10.0, dt=1e-3, floor=1e-3):
    rng = np.random.default_rng(seed)
    steps = int(round(duration / dt))

    gyro_bias = 0.2 * np.array([1.0, -1.0, 1.0])
    q = 0.2 * np.ones(3)
    v_inertial = np.array([np.array([1.0, -1.0, 1.0]) / np.sqrt(3.0), [0.0, 0.0, 1.0]])
    body_bias = np.array([0.1 * np.array([-1.0, 1.0, 0.5]), 0.1 * np.array([0.0, 0.0, 1.0])])
    body_std = 0.2
    k_w, k_b, k_s, gamma, eps = 5.0, 0.5, 0.5, 1.0, 0.5

    ui = v_inertial / np.linalg.norm(v_inertial, axis=1)[:, None]
    c = np.cross(ui[0], ui[1])
    ui = np.vstack([ui, c / np.linalg.norm(c)])
    s = np.ones(3)
    m_i = np.einsum("k,ki,kj->ij", s, ui, ui)
    m_bar = np.trace(m_i) * np.eye(3) - m_i
    lam = np.linalg.svd(m_bar, compute_uv=False).min()
    m_i_inv = np.linalg.inv(m_i)

    r = np.tile(np.eye(3), (trials, 1, 1))
    r_hat = np.tile(angle_axis(np.deg2rad(179.0), [1.0, 5.0, 3.0]), (trials, 1, 1))
    b_hat = np.zeros((trials, 3))
    s_hat = np.zeros((trials, 3))

    dist = np.empty((steps + 1, trials))
    dist[0] = 0.25 * (3.0 - np.trace(r @ np.swapaxes(r_hat, 1, 2), axis1=1, axis2=2))

    for k in range(steps):
        t = k * dt
        omega = np.array([np.sin(0.7 * t), 0.7 * np.sin(0.5 * t + np.pi), 0.5 * np.sin(0.3 * t + np.pi / 3.0)])

        # Body observations v_B = R^T v_I + b_B + noise, normalised, third by cross product.
        vb = np.einsum("nji,kj->nki", r, v_inertial) + body_bias[None] + body_std * rng.standard_normal((trials, 2, 3))
        ub = vb / np.linalg.norm(vb, axis=2)[..., None]
        c = np.cross(ub[:, 0], ub[:, 1])
        ub = np.concatenate([ub, (c / np.linalg.norm(c, axis=1)[:, None])[:, None]], axis=1)

        omega_m = omega + gyro_bias + q * rng.standard_normal((trials, 3)) / np.sqrt(dt)

        uhb = np.einsum("nji,kj->nki", r_hat, ui)
        phi = np.einsum("nij,nj->ni", r_hat, 0.5 * np.einsum("k,nki->ni", s, np.cross(ub, uhb)))
        inner = r_hat @ np.einsum("k,nki,nkj->nij", s, uhb, ub) @ np.swapaxes(r_hat, 1, 2)
        err_i = 0.75 - 0.25 * np.trace(inner, axis1=1, axis2=2)
        one_ups = np.maximum(1.0 + np.trace(m_i_inv @ inner, axis1=1, axis2=2), floor)

        rt_phi = np.einsum("nji,nj->ni", r_hat, phi)
        w = (k_w / (eps * lam)) * (((one_ups * lam) ** 2 + 1.0) / one_ups)[:, None] * phi
        w += np.einsum("nij,nj->ni", r_hat, rt_phi * s_hat) / (lam * one_ups)[:, None]
        b_dot = -gamma * err_i[:, None] * rt_phi - gamma * k_b * b_hat
        s_dot = (gamma * err_i / (lam * one_ups))[:, None] * rt_phi * rt_phi - gamma * k_s * s_hat

        r_hat = polar(expm_so3(w * dt) @ r_hat @ expm_so3((omega_m - b_hat) * dt))
        b_hat = b_hat + b_dot * dt
        s_hat = s_hat + s_dot * dt
        r = polar(r @ expm_so3(np.tile(omega * dt, (trials, 1))))

        dist[k + 1] = 0.25 * (3.0 - np.trace(r @ np.swapaxes(r_hat, 1, 2), axis1=1, axis2=2))

    return np.arange(steps + 1) * dt, dist


def main(argv=None):
    ap = argparse.ArgumentParser(description=__doc__.splitlines()[0])
    ap.add_argument("--trials", type=int, default=100)
    ap.add_argument("--seed", type=int, default=2024)
    ap.add_argument("--duration", type=float, default=10.0)
    ap.add_argument("--dt", type=float, default=1e-3)
    ap.add_argument("--window", type=float, default=2.0, help="steady-state window length [s]")
    args = ap.parse_args(argv)

    t, dist = simulate(args.trials, args.seed, args.duration, args.dt)
    window = t >= args.duration - args.window - 1e-12
    per_trial = dist[window].mean(axis=0)
    report = {
        "trials": args.trials,
        "seed": args.seed,
        "initial_dist": float(dist[0, 0]),
        "steady_state_mean": float(per_trial.mean()),
        "steady_state_sem": float(per_trial.std(ddof=1) / np.sqrt(args.trials)) if args.trials > 1 else 0.0,
        "max_trial_min_dist": float(dist.min(axis=0).max()),
    }
    json.dump(report, sys.stdout, indent=2)
    sys.stdout.write("\n")


if __name__ == "__main__":
    main()
