"""Independent reference computations used by the tests.

Nothing here calls into the simulator, model or estimator code under test.
"""
import math

import numpy as np

_H = np.array([[1, 1], [1, -1]]) / np.sqrt(2)
# qubit 0 is the high bit
_CNOT_01 = np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]])
_CNOT_10 = np.array([[1, 0, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0], [0, 1, 0, 0]])


def _rot(kind, a):
    c, s = np.cos(a / 2), np.sin(a / 2)
    if kind == "RX":
        return np.array([[c, -1j * s], [-1j * s, c]])
    if kind == "RY":
        return np.array([[c, -s], [s, c]], dtype=complex)
    return np.diag([np.exp(-1j * a / 2), np.exp(1j * a / 2)])


def two_qubit_ed_quadrature(with_h, enc, ent, var, gamma, n, grid=48, nodes=24, h=1e-5):
    """Effective dimension of a 2-qubit, 1-layer parity-readout circuit by quadrature.

    The Fisher matrix is the exact expectation over x ~ N(0, I) (Gauss-Hermite
    nodes) and y ~ p(y|x), with finite-difference derivatives of dense 4x4
    unitaries; the theta integral is a periodic trapezoid rule.
    """
    z, w = np.polynomial.hermite_e.hermegauss(nodes)
    w = w / w.sum()
    X = [(a, b) for a in z for b in z]
    W = np.array([a * b for a in w for b in w])
    pre = np.kron(_H, _H) if with_h else np.eye(4)
    zero = np.array([1, 0, 0, 0], dtype=complex)
    psis = np.array([np.kron(_rot(enc, a), _rot(enc, b)) @ pre @ zero for a, b in X])
    ent_u = _CNOT_01 if ent == "Chain" else _CNOT_10 @ _CNOT_01
    even = np.array([True, False, False, True])

    def probs(t0, t1):
        amp = psis @ (np.kron(_rot(var, t0), _rot(var, t1)) @ ent_u).T
        p_even = (np.abs(amp[:, even]) ** 2).sum(axis=1)
        return np.stack([p_even, 1 - p_even], axis=1)

    thetas = np.arange(grid) * 2 * np.pi / grid
    fishers = []
    for t0 in thetas:
        for t1 in thetas:
            p = probs(t0, t1)
            g = np.stack([(probs(t0 + h, t1) - probs(t0 - h, t1)) / (2 * h),
                          (probs(t0, t1 + h) - probs(t0, t1 - h)) / (2 * h)], axis=-1)
            safe = np.where(p > 1e-14, p, np.inf)
            fishers.append(np.einsum("x,xyi,xyj->ij", W, g / safe[..., None], g))
    fishers = np.array(fishers)
    fishers *= 2 / np.mean(np.trace(fishers, axis1=1, axis2=2))
    kap = gamma * n / (2 * math.pi * math.log(n))
    half = np.array([0.5 * math.log(np.linalg.det(np.eye(2) + kap * F)) for F in fishers])
    top = half.max()
    return 2 * (top + math.log(np.mean(np.exp(half - top)))) / math.log(kap)


def charpoly_eigenvalues(A):
    """Eigenvalues from characteristic-polynomial roots, Newton-polished, ascending."""
    A = np.asarray(A, dtype=np.float64)
    n = A.shape[0]
    # Faddeev-LeVerrier recursion for det(lambda I - A)
    coeffs = [1.0]
    M = np.zeros_like(A)
    for k in range(1, n + 1):
        M = A @ M + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ M) / k)
    poly = np.array(coeffs)
    dpoly = np.polyder(poly)
    roots = np.sort(np.roots(poly).real)
    for _ in range(5):
        roots = roots - np.polyval(poly, roots) / np.polyval(dpoly, roots)
    return np.sort(roots)


def identity_fisher_ed(d, gamma, n):
    kap = gamma * n / (2 * math.pi * math.log(n))
    return d * math.log1p(kap) / math.log(kap)
