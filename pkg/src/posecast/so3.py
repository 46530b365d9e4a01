"""Quaternion and rotation-vector algebra for pose filtering.

Conventions, used by every module in this package:

- Quaternions are length-4 float ndarrays [w, x, y, z], scalar first,
  composed with the Hamilton product. Unit quaternions represent rotations;
  q and -q are the same rotation.
- Rotation vectors are axis * angle in radians. quat_exp maps a rotation
  vector to a unit quaternion, quat_log inverts it onto angles in [0, pi].
- Operations that return a quaternion canonicalize the sign so w >= 0.
- Incremental orientation updates multiply on the right: q <- q * zed(phi).
"""

import math

import numpy as np


def quat_normalize(q):
    """Scale q to unit norm."""
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q)


def quat_canonical(q):
    """Flip sign so the scalar part is non-negative."""
    q = np.asarray(q, dtype=float)
    return -q if q[0] < 0.0 else q


def quat_multiply(p, q):
    """Hamilton product p * q."""
    pw, px, py, pz = p.tolist() if isinstance(p, np.ndarray) else p
    qw, qx, qy, qz = q.tolist() if isinstance(q, np.ndarray) else q
    return np.array([
        pw * qw - px * qx - py * qy - pz * qz,
        pw * qx + px * qw + py * qz - pz * qy,
        pw * qy - px * qz + py * qw + pz * qx,
        pw * qz + px * qy - py * qx + pz * qw,
    ])


def quat_conjugate(q):
    """Conjugate [w, -x, -y, -z]; the inverse for unit quaternions."""
    q = np.asarray(q, dtype=float)
    return np.array([q[0], -q[1], -q[2], -q[3]])


def skew(v):
    """Cross-product matrix [v]x with [v]x @ u = v x u."""
    return np.array([
        [0.0, -v[2], v[1]],
        [v[2], 0.0, -v[0]],
        [-v[1], v[0], 0.0],
    ])


def quat_exp(v):
    """Exponential map: rotation vector -> unit quaternion.

    Returns [cos(|v|/2), sin(|v|/2) * v/|v|] with a series guard below
    1e-8 rad so the map is smooth through zero.
    """
    x, y, z = np.asarray(v, dtype=float).tolist()
    angle = math.sqrt(x * x + y * y + z * z)
    if angle < 1e-8:
        # sin(angle/2)/angle = 1/2 - angle^2/48 + O(angle^4)
        k = 0.5 - angle * angle / 48.0
    else:
        k = math.sin(0.5 * angle) / angle
    w = math.cos(0.5 * angle)
    if w < 0.0:
        w, k = -w, -k
    return np.array([w, k * x, k * y, k * z])


def quat_log(q):
    """Log map: unit quaternion -> rotation vector with angle in [0, pi].

    Raises ValueError when the input norm deviates from 1 by more than
    1e-6; smaller deviations are renormalized away.
    """
    q = np.asarray(q, dtype=float)
    n = math.sqrt(q[0] * q[0] + q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if abs(n - 1.0) > 1e-6:
        raise ValueError(f"quaternion norm {n:.9g} is not within 1e-6 of unit")
    q = q / n
    if q[0] < 0.0:
        q = -q
    s = math.sqrt(q[1] * q[1] + q[2] * q[2] + q[3] * q[3])
    if s < 1e-9:
        # angle/sin(angle/2) -> 2/w as s -> 0
        return (2.0 / q[0]) * q[1:]
    angle = 2.0 * math.atan2(s, q[0])
    return (angle / s) * q[1:]


def quat_to_matrix(q):
    """Rotation matrix of a unit quaternion."""
    w, x, y, z = q
    return np.array([
        [1.0 - 2.0 * (y * y + z * z), 2.0 * (x * y - w * z), 2.0 * (x * z + w * y)],
        [2.0 * (x * y + w * z), 1.0 - 2.0 * (x * x + z * z), 2.0 * (y * z - w * x)],
        [2.0 * (x * z - w * y), 2.0 * (y * z + w * x), 1.0 - 2.0 * (x * x + y * y)],
    ])


def rotvec_to_matrix(v):
    """Rodrigues formula: rotation vector -> rotation matrix."""
    v = np.asarray(v, dtype=float)
    angle = np.linalg.norm(v)
    S = skew(v)
    if angle < 1e-8:
        return np.eye(3) + S + 0.5 * (S @ S)
    a = np.sin(angle) / angle
    b = (1.0 - np.cos(angle)) / (angle * angle)
    return np.eye(3) + a * S + b * (S @ S)


def geodesic_distance(q_pred, q_true):
    """Rotation angle, in radians, taking q_true to q_pred.

    Computed as |quat_log(q_pred * q_true^-1)| folded into [0, pi]; sign
    flips of either argument do not change the result.
    """
    d = np.linalg.norm(quat_log(quat_multiply(q_pred, quat_conjugate(q_true))))
    return min(d, 2.0 * np.pi - d)


def zed(phi):
    """Rotation-vector increment as a unit quaternion (exact exponential)."""
    return quat_exp(phi)


def zed12_step(q, w0, w1, h):
    """Second-order orientation step over [0, h].

    w0 is the angular rate at the start of the step, w1 its slope. The
    integrated increment w0*h + w1*h^2/2 is applied on the right.
    """
    if h <= 0.0:
        raise ValueError("step size h must be positive")
    a0, a1, a2 = np.asarray(w0, dtype=float).tolist()
    b0, b1, b2 = np.asarray(w1, dtype=float).tolist()
    k2 = 0.5 * h * h
    phi = np.array([a0 * h + b0 * k2, a1 * h + b1 * k2, a2 * h + b2 * k2])
    return quat_canonical(quat_multiply(q, zed(phi)))


def zed23_step(q, w0, w1, w2, h):
    """Third-order orientation step over [0, h].

    w0, w1, w2 are polynomial coefficients of the angular rate,
    w(t) = w0 + w1 t + w2 t^2 (so a caller tracking angular jerk passes
    w2 = jerk/2). The increment adds the cubic term and the commutator
    correction (w0 x w1) h^3/12 that makes the step third-order accurate
    for non-commuting rotations.
    """
    if h <= 0.0:
        raise ValueError("step size h must be positive")
    a0, a1, a2 = np.asarray(w0, dtype=float).tolist()
    b0, b1, b2 = np.asarray(w1, dtype=float).tolist()
    c0, c1, c2 = np.asarray(w2, dtype=float).tolist()
    h2 = h * h
    k2 = 0.5 * h2
    k3 = h2 * h / 3.0
    kc = h2 * h / 12.0
    phi = np.array([
        a0 * h + b0 * k2 + c0 * k3 + (a1 * b2 - a2 * b1) * kc,
        a1 * h + b1 * k2 + c1 * k3 + (a2 * b0 - a0 * b2) * kc,
        a2 * h + b2 * k2 + c2 * k3 + (a0 * b1 - a1 * b0) * kc,
    ])
    return quat_canonical(quat_multiply(q, zed(phi)))


def right_jacobian_inv(theta):
    """Inverse right Jacobian of SO(3) at rotation vector theta.

    Closed form I + [theta]x/2 + c(|theta|) [theta]x^2 with
    c(a) = 1/a^2 - (1 + cos a)/(2 a sin a); below 1e-4 rad the series
    I + [theta]x/2 + [theta]x^2/12 is used. Angles at or beyond pi are
    rejected, the Jacobian is singular there.
    """
    theta = np.asarray(theta, dtype=float)
    angle = np.linalg.norm(theta)
    if angle >= np.pi:
        raise ValueError(f"rotation angle {angle:.9g} rad is outside [0, pi)")
    S = skew(theta)
    if angle < 1e-4:
        return np.eye(3) + 0.5 * S + (S @ S) / 12.0
    c = 1.0 / (angle * angle) - (1.0 + np.cos(angle)) / (2.0 * angle * np.sin(angle))
    return np.eye(3) + 0.5 * S + c * (S @ S)
