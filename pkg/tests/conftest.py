"""Shared test oracles, independent of the library implementations.

Everything here is computed by a different route than the code under test:
RK4 on the quaternion kinematic ODE instead of closed-form increments, the
classical closed-form right Jacobian instead of its inverse, rotation
matrix traces instead of quaternion logs.
"""

import numpy as np


def rk4_quat_reference(q0, omega_fn, t0, t1, h):
    """Integrate qdot = 0.5 * q * (0, w(t)) with classical RK4.

    Renormalizes every step; with a fine h this is an independent
    reference for the rotation-increment integrators.
    """

    def qdot(q, t):
        w = omega_fn(t)
        return 0.5 * np.array([
            -q[1] * w[0] - q[2] * w[1] - q[3] * w[2],
            q[0] * w[0] + q[2] * w[2] - q[3] * w[1],
            q[0] * w[1] - q[1] * w[2] + q[3] * w[0],
            q[0] * w[2] + q[1] * w[1] - q[2] * w[0],
        ])

    q = np.asarray(q0, dtype=float).copy()
    n = int(round((t1 - t0) / h))
    for i in range(n):
        t = t0 + i * h
        k1 = qdot(q, t)
        k2 = qdot(q + 0.5 * h * k1, t + 0.5 * h)
        k3 = qdot(q + 0.5 * h * k2, t + 0.5 * h)
        k4 = qdot(q + h * k3, t + h)
        q = q + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4)
        q = q / np.linalg.norm(q)
    return q


def right_jacobian_closed_form(theta):
    """J_r(theta) = I - (1-cos a)/a^2 [theta]x + (a - sin a)/a^3 [theta]x^2."""
    theta = np.asarray(theta, dtype=float)
    a = np.linalg.norm(theta)
    S = np.array([
        [0.0, -theta[2], theta[1]],
        [theta[2], 0.0, -theta[0]],
        [-theta[1], theta[0], 0.0],
    ])
    if a < 1e-6:
        return np.eye(3) - 0.5 * S + (S @ S) / 6.0
    return (np.eye(3)
            - ((1.0 - np.cos(a)) / (a * a)) * S
            + ((a - np.sin(a)) / (a ** 3)) * (S @ S))


def matrix_angle(R):
    """Rotation angle of a rotation matrix via its trace."""
    c = (np.trace(R) - 1.0) / 2.0
    return float(np.arccos(np.clip(c, -1.0, 1.0)))


def lz_lambdas_bruteforce(symbols):
    """Shortest-novel-window lengths by literal exhaustive substring search.

    For each position t (0-based), lambda_t is the length of the shortest
    window starting at t that does not occur starting at any earlier
    position (overlap with position t allowed). When every window through
    the end of the sequence has been seen, lambda_t saturates at T so the
    position contributes zero surprise.
    """
    s = list(symbols)
    T = len(s)
    if T < 2:
        raise ValueError("need at least 2 symbols")
    lams = []
    for t in range(T):
        lam = None
        for L in range(1, T - t + 1):
            cand = s[t:t + L]
            found = False
            for j in range(t):
                if s[j:j + L] == cand:
                    found = True
                    break
            if not found:
                lam = L
                break
        if lam is None:
            lam = T
        lams.append(lam)
    return lams


def lz_entropy_bruteforce(symbols):
    """Match-length entropy from the brute-force lambdas.

    The reduction is written exactly as the library writes it so that
    equality of the two routes is exact, not approximate; the independent
    part of this oracle is the lambda search itself.
    """
    lam = np.array(lz_lambdas_bruteforce(symbols), dtype=float)
    T = len(lam)
    return float(np.mean(np.log2(T / lam)))
