"""Group elements, irrep bookkeeping and Haar quadratures for U(1) and SU(2).

SU(2) elements are stored as unit quaternions q = (w, x, y, z) corresponding
to the matrix w*1 - i(x sig_x + y sig_y + z sig_z); Euler angles are derived
on demand (gamma = 0 branch at the poles). The Lie algebra carries the
orthonormal basis tau_k = -i sig_k/2, so exp(h n tau) has rotation angle h
with period 4pi and -1 sits at h = 2pi.

Haar measure is normalized to total mass 1 everywhere (vol(G) = 1
convention); the Riemannian volumes 2*pi and 16*pi^2 are exposed as
constants for the places that need the unnormalized measure.
"""

import csv
import math
from dataclasses import dataclass, field

import numpy as np

from .wigner import wigner_D_euler_grid, wigner_d_grid

U1 = "U1"
SU2 = "SU2"

VOL_U1 = 2 * math.pi
VOL_SU2 = 16 * math.pi ** 2

MAX_QUAD_NODES = 4_000_000


class QuadratureResourceError(RuntimeError):
    pass


def dim(group, label):
    if group == U1:
        return 1
    if label < 1:
        raise ValueError("SU(2) label must be >= 1")
    return label


def casimir(group, label):
    """Positive Laplace eigenvalue: j^2 for U(1), (n^2-1)/4 for SU(2)."""
    if group == U1:
        return float(label) ** 2
    return (label ** 2 - 1) / 4.0


def irrep_labels(group, band):
    if group == U1:
        return list(range(-band, band + 1))
    return list(range(1, band + 1))


def verma_norm_sq(lam, k):
    """prod_{l=1..k} l*(lam+1-l); 1 at k=0; null vector at k = lam+1."""
    if k < 0:
        raise ValueError("k must be >= 0")
    out = 1.0
    for l in range(1, k + 1):
        out *= l * (lam + 1 - l)
    return out


# ---------------------------------------------------------------------------
# quaternions (N,4) arrays; scalar inputs accepted everywhere
# ---------------------------------------------------------------------------

def quat_identity():
    return np.array([1.0, 0.0, 0.0, 0.0])


def quat_mul(a, b):
    a = np.asarray(a, dtype=float)
    b = np.asarray(b, dtype=float)
    w1, x1, y1, z1 = np.moveaxis(a, -1, 0)
    w2, x2, y2, z2 = np.moveaxis(b, -1, 0)
    return np.stack([
        w1 * w2 - x1 * x2 - y1 * y2 - z1 * z2,
        w1 * x2 + x1 * w2 + y1 * z2 - z1 * y2,
        w1 * y2 - x1 * z2 + y1 * w2 + z1 * x2,
        w1 * z2 + x1 * y2 - y1 * x2 + z1 * w2,
    ], axis=-1)


def quat_inv(q):
    q = np.asarray(q, dtype=float)
    return q * np.array([1.0, -1.0, -1.0, -1.0])


def quat_normalize(q):
    q = np.asarray(q, dtype=float)
    return q / np.linalg.norm(q, axis=-1, keepdims=True)


def quat_exp(X):
    """exp of X = (X1, X2, X3) in the tau basis; rotation angle |X|."""
    X = np.asarray(X, dtype=float)
    h = np.linalg.norm(X, axis=-1)
    half = h / 2.0
    w = np.cos(half)
    s = np.where(h > 1e-12, np.sin(half) / np.where(h > 1e-12, h, 1.0), 0.5)
    return np.stack([w, s * X[..., 0], s * X[..., 1], s * X[..., 2]], axis=-1)


def quat_log(q):
    """Inverse of quat_exp with |X| in [0, 2pi); X at -1 is ill-defined."""
    q = np.asarray(q, dtype=float)
    w = np.clip(q[..., 0], -1.0, 1.0)
    v = q[..., 1:]
    vn = np.linalg.norm(v, axis=-1)
    half = np.arctan2(vn, w)  # in [0, pi]
    scale = np.where(vn > 1e-14, 2.0 * half / np.where(vn > 1e-14, vn, 1.0), 2.0)
    return scale[..., None] * v


def quat_to_su2(q):
    q = np.asarray(q, dtype=float)
    a = q[..., 0] - 1j * q[..., 3]
    b = -q[..., 2] - 1j * q[..., 1]
    m = np.empty(q.shape[:-1] + (2, 2), dtype=complex)
    m[..., 0, 0] = a
    m[..., 0, 1] = b
    m[..., 1, 0] = -np.conj(b)
    m[..., 1, 1] = np.conj(a)
    return m


def quat_to_euler(q):
    """ZYZ Euler angles with gamma = 0 on the beta in {0, pi} branch."""
    q = np.atleast_2d(np.asarray(q, dtype=float))
    a = q[:, 0] - 1j * q[:, 3]
    b = -q[:, 2] - 1j * q[:, 1]
    beta = 2.0 * np.arctan2(np.abs(b), np.abs(a))
    regular = (np.abs(a) > 1e-13) & (np.abs(b) > 1e-13)
    apg = np.where(np.abs(a) > 1e-13, -2.0 * np.angle(a), 0.0)
    amg = np.where(np.abs(b) > 1e-13, -2.0 * np.angle(-b), 0.0)
    alpha = np.where(regular, 0.5 * (apg + amg), apg + amg)
    gamma = np.where(regular, 0.5 * (apg - amg), 0.0)
    return alpha, beta, gamma


def euler_to_quat(alpha, beta, gamma):
    alpha, beta, gamma = np.broadcast_arrays(
        np.asarray(alpha, float), np.asarray(beta, float), np.asarray(gamma, float))
    zero = np.zeros_like(alpha)
    za = np.stack([np.cos(alpha / 2), zero, zero, np.sin(alpha / 2)], axis=-1)
    yb = np.stack([np.cos(beta / 2), zero, np.sin(beta / 2), zero], axis=-1)
    zg = np.stack([np.cos(gamma / 2), zero, zero, np.sin(gamma / 2)], axis=-1)
    return quat_mul(quat_mul(za, yb), zg)


# ---------------------------------------------------------------------------
# group elements (thin wrapper; internals stay vectorized)
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class GroupElement:
    group: str
    angle: float = 0.0                      # U(1)
    quat: tuple = (1.0, 0.0, 0.0, 0.0)      # SU(2)

    @staticmethod
    def u1(phi):
        return GroupElement(U1, angle=float(phi) % (2 * math.pi))

    @staticmethod
    def su2(q):
        q = np.asarray(q, dtype=float)
        nrm = np.linalg.norm(q)
        if abs(nrm - 1.0) > 1e-12:
            if abs(nrm - 1.0) > 1e-6:
                raise ValueError("quaternion norm deviates from 1: %g" % nrm)
            q = q / nrm
        return GroupElement(SU2, quat=tuple(q))


def rep_matrix(group, label, g):
    """Unitary irrep matrix; U(1): [e^{i j phi}], SU(2): Wigner D."""
    if group == U1:
        phi = g.angle if isinstance(g, GroupElement) else float(g)
        return np.array([[np.exp(1j * label * phi)]])
    q = np.asarray(g.quat if isinstance(g, GroupElement) else g, dtype=float)
    alpha, beta, gamma = quat_to_euler(q)
    return wigner_D_euler_grid(label - 1, alpha, beta, gamma)[0]


def character(group, label, g):
    if group == U1:
        return rep_matrix(group, label, g)[0, 0]
    return np.trace(rep_matrix(group, label, g))


def character_c(group, label, arg):
    """Analytically continued character.

    U(1): arg is the complex angle zeta, chi_j = e^{i j zeta}.
    SU(2): arg is the complex torus parameter mu with eigenvalues e^{+-mu};
    chi_n = sinh(n mu)/sinh(mu), with the removable limit at mu -> 0.
    """
    if group == U1:
        return np.exp(1j * label * arg)
    mu = complex(arg)
    n = label
    if abs(mu) < 1e-6:
        return n * (1.0 + (n * n - 1) * mu * mu / 6.0
                    + (n * n - 1) * (3 * n * n - 7) * mu ** 4 / 360.0)
    return np.sinh(n * mu) / np.sinh(mu)


# ---------------------------------------------------------------------------
# Haar quadratures
# ---------------------------------------------------------------------------

@dataclass
class Quadrature:
    """Haar quadrature with sum(weights) = 1 (vol(G) = 1 convention)."""
    group: str
    exactness_degree: int
    weights: np.ndarray
    angles: np.ndarray = None     # U(1): node angles
    quats: np.ndarray = None      # SU(2): node quaternions (N,4)
    euler: tuple = None           # SU(2): (alpha, beta, gamma) arrays
    _rep_cache: dict = field(default_factory=dict, repr=False)

    @property
    def n_nodes(self):
        return len(self.weights)

    def rep_grid(self, label):
        """Irrep matrices at all nodes, shape (N, d, d); cached."""
        if label in self._rep_cache:
            return self._rep_cache[label]
        if self.group == U1:
            out = np.exp(1j * label * self.angles)[:, None, None]
        else:
            out = wigner_D_euler_grid(label - 1, *self.euler)
        self._rep_cache[label] = out
        return out

    def export_csv(self, path):
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            if self.group == U1:
                w.writerow(["phi", "weight"])
                for phi, wt in zip(self.angles, self.weights):
                    w.writerow([repr(float(phi)), repr(float(wt))])
            else:
                w.writerow(["alpha", "beta", "gamma", "weight"])
                for a, b, c, wt in zip(*self.euler, self.weights):
                    w.writerow([repr(float(a)), repr(float(b)),
                                repr(float(c)), repr(float(wt))])


def u1_quadrature(degree):
    """Uniform grid, exact for Schur pairs with |j|, |j'| <= degree."""
    n = 2 * degree + 1
    if n > MAX_QUAD_NODES:
        raise QuadratureResourceError("U(1) grid of %d nodes exceeds cap" % n)
    phi = 2 * math.pi * np.arange(n) / n
    return Quadrature(U1, degree, np.full(n, 1.0 / n), angles=phi)


def su2_quadrature(degree):
    """Product rule exact for Schur pairs of irreps with n, n' <= degree.

    Gauss-Legendre in cos(beta), uniform alpha and gamma on [0, 4pi)
    (covering SU(2) twice; the weight normalization absorbs the factor 2).
    Exact for all Peter-Weyl modes with 2j <= 2*(degree-1).
    """
    k = max(2 * (degree - 1), 1)
    n_ang = k + 1
    n_beta = (k + 2) // 2 + 1
    total = n_ang * n_ang * n_beta
    if total > MAX_QUAD_NODES:
        raise QuadratureResourceError(
            "SU(2) grid of %d nodes exceeds cap; lower the degree" % total)
    x, wx = np.polynomial.legendre.leggauss(n_beta)
    beta = np.arccos(x)
    ang = 4 * math.pi * np.arange(n_ang) / n_ang
    A, B, C = np.meshgrid(ang, beta, ang, indexing="ij")
    WA, WB, WC = np.meshgrid(np.full(n_ang, 1.0 / n_ang), wx / 2.0,
                             np.full(n_ang, 1.0 / n_ang), indexing="ij")
    alpha = A.ravel()
    betas = B.ravel()
    gamma = C.ravel()
    weights = (WA * WB * WC).ravel()
    quats = euler_to_quat(alpha, betas, gamma)
    return Quadrature(SU2, degree, weights, quats=quats,
                      euler=(alpha, betas, gamma))


def group_quadrature(group, exactness_degree):
    if exactness_degree < 1:
        raise ValueError("exactness degree must be >= 1")
    if group == U1:
        return u1_quadrature(exactness_degree)
    return su2_quadrature(exactness_degree)


def schur_orthogonality_residual(quad, max_label):
    """Worst deviation from Schur orthogonality over irreps <= max_label."""
    labels = irrep_labels(quad.group, max_label)
    worst = 0.0
    for la in labels:
        da = dim(quad.group, la)
        Da = quad.rep_grid(la)
        for lb in labels:
            Db = quad.rep_grid(lb)
            gram = np.einsum("k,kmn,kpq->mnpq", quad.weights, Da, Db.conj())
            if la == lb:
                d = da
                expect = np.einsum("mp,nq->mnpq",
                                   np.eye(d), np.eye(d)) / d
                worst = max(worst, np.abs(gram - expect).max())
            else:
                worst = max(worst, np.abs(gram).max())
    return worst
