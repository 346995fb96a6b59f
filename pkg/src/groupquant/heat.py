"""Heat kernels, coherent-state overlaps and resolution-of-unity integrals.

Complexified points are handled through the right polar decomposition
z = g e^{iX}; for SU(2) the factor e^{iX} is the positive Hermitian matrix
exp(|X| (Xhat . sigma)/2). Overlaps reduce to the analytically continued
heat kernel rho_{2t}(z'^{-1} zbar), whose SU(2) characters are
sinh(n mu)/sinh(mu) in the complex torus parameter mu.

All group integrals use the probability Haar measure. The resolution-of-
unity constants are stated in that convention: the U(1) phase-space
constant satisfies C_t^{-1} = t, and the SU(2) integral I(t, n) follows the
t^3 n / 8 law.
"""

import math
from dataclasses import dataclass

import numpy as np

from . import groups as G
from ._kernels import itn_denominator, su2_norm_series
from .theta import theta3, theta3_dz
from .wigner import wigner_D_euler_grid

_SERIES_TAIL = 1e-16


class QuadratureConvergenceError(RuntimeError):
    def __init__(self, message, achieved):
        super().__init__(message)
        self.achieved = achieved


@dataclass(frozen=True)
class HeatParams:
    group: str
    t: float
    truncation: int = 0

    def __post_init__(self):
        if self.t <= 0:
            raise ValueError("heat time must be positive")
        if self.truncation == 0:
            object.__setattr__(self, "truncation",
                               heat_truncation(self.group, self.t))


def heat_truncation(group, t, growth=0.0):
    """Smallest band with d_L e^{-t lam_L/2 + growth*L} (L+1) < tail."""
    lab = 1
    while True:
        lab += 1
        d = G.dim(group, lab)
        val = d * math.exp(-t * G.casimir(group, lab) / 2.0 + growth * lab)
        if val * (lab + 1) < _SERIES_TAIL and growth * 1.0 < t * lab / 2.0:
            return lab
        if lab > 100000:
            raise RuntimeError("heat series truncation did not close")


@dataclass(frozen=True)
class PolarPoint:
    """Point Phi(g, X) = g e^{iX} of the complexified group."""
    group: str
    g: object = None          # GroupElement
    X: object = None          # float (U1) or 3-vector (SU2)

    @staticmethod
    def u1(phi, l):
        return PolarPoint(G.U1, G.GroupElement.u1(phi), float(l))

    @staticmethod
    def su2(q, X):
        return PolarPoint(G.SU2, G.GroupElement.su2(q), np.asarray(X, float))


def heat_kernel(params, g):
    """rho_t(g) = sum_pi d_pi e^{-t lam_pi / 2} chi_pi(g)."""
    t = params.t
    if params.group == G.U1:
        phi = g.angle if isinstance(g, G.GroupElement) else float(g)
        js = np.arange(1, params.truncation + 1)
        return 1.0 + 2.0 * np.sum(np.exp(-t * js ** 2 / 2.0) * np.cos(js * phi))
    q = np.asarray(g.quat if isinstance(g, G.GroupElement) else g, float)
    w = np.clip(q[0], -1.0, 1.0)
    ang = 2.0 * math.acos(w)  # rotation angle in [0, 2pi]
    total = 0.0
    for n in range(1, params.truncation + 1):
        lam = G.casimir(G.SU2, n)
        if abs(math.sin(ang / 2.0)) < 1e-9:
            chi = n * math.cos((n - 1) * ang / 2.0)  # limit at the center
            if abs(ang) > 1.0:  # g near -1: chi_n(-1) = n (-1)^{n-1}
                chi = n * (-1.0) ** (n - 1)
        else:
            chi = math.sin(n * ang / 2.0) / math.sin(ang / 2.0)
        total += n * math.exp(-t * lam / 2.0) * chi
    return total


def _su2_complex_point(p):
    """2x2 matrix of z = g e^{iX}."""
    U = G.quat_to_su2(np.asarray(p.g.quat, float))
    X = np.asarray(p.X, float)
    h = float(np.linalg.norm(X))
    if h < 1e-300:
        H = np.eye(2, dtype=complex)
    else:
        sig = np.array([[[0, 1], [1, 0]], [[0, -1j], [1j, 0]],
                        [[1, 0], [0, -1]]], dtype=complex)
        nd = np.einsum("k,kab->ab", X / h, sig)
        H = math.cosh(h / 2.0) * np.eye(2) + math.sinh(h / 2.0) * nd
    return U @ H


def _torus_parameter(w):
    """mu with eigenvalues e^{+-mu} for w in SL(2, C)."""
    ev = np.linalg.eigvals(w)
    lam = ev[np.argmax(np.abs(ev))]
    return np.log(lam)


def coherent_overlap(params, z, zp):
    """(Psi_z, Psi_z') = rho_{2t}((z^dag z')^{-1}), analytically continued.

    The bar in the heat-kernel identity is the antiholomorphic extension of
    the identity map of G, so z'^{-1} zbar = (z^dag z')^{-1} with the plain
    matrix adjoint; at z = z' this is e^{-2iX} and the norm series results.
    """
    t = params.t
    if params.group == G.U1:
        phi, l = z.g.angle, float(z.X)
        phip, lp = zp.g.angle, float(zp.X)
        # sum_j e^{-t j^2} e^{i j (phi' - phi)} e^{-j (l + l')}
        zz = ((phip - phi) + 1j * (l + lp)) / (2 * math.pi)
        return theta3(zz, 1j * t / math.pi)
    zmat = _su2_complex_point(z)
    w = np.linalg.inv(np.conj(zmat.T) @ _su2_complex_point(zp))
    mu = _torus_parameter(w)
    growth = abs(mu.real)
    nmax = heat_truncation(G.SU2, t, growth=growth)
    total = 0.0 + 0.0j
    for n in range(1, nmax + 1):
        total += n * math.exp(-t * G.casimir(G.SU2, n)) \
            * G.character_c(G.SU2, n, mu)
    return total


def su2_overlap_norm(t, h, nmax=None):
    """|Psi_{Phi(g, X)}|^2 for |X| = h: sum_n n e^{-t(n^2-1)/4} sinh(nh)/sinh(h)."""
    if nmax is None:
        nmax = int(math.ceil(2 * abs(h) / t + 28.0 / math.sqrt(t))) + 10
    return float(su2_norm_series(np.array([abs(h)]), t, nmax)[0])


# ---------------------------------------------------------------------------
# U(1) resolution constant
# ---------------------------------------------------------------------------

def _theta3_real_ratio_frame(x, t):
    """theta3(x | i pi / t) for real x, vectorized."""
    x = np.asarray(x, float)
    out = np.ones_like(x)
    n = 1
    while True:
        term = 2.0 * math.exp(-math.pi ** 2 * n * n / t)
        if term < 1e-18:
            break
        out = out + term * np.cos(2 * math.pi * n * x)
        n += 1
    return out


def _panel_gl(f, a, b, n_panels, order=24):
    x, w = np.polynomial.legendre.leggauss(order)
    edges = np.linspace(a, b, n_panels + 1)
    total = 0.0
    for lo, hi in zip(edges[:-1], edges[1:]):
        mid, half = (lo + hi) / 2.0, (hi - lo) / 2.0
        total += half * np.sum(w * f(mid + half * x))
    return total


def resolution_constant_u1(t, tol=1e-8):
    """C_t^{-1} = sqrt(t/pi) int e^{-l^2/t} / theta3(l/t | i pi/t) dl.

    Numerically C_t^{-1} = t. Adaptive panel refinement; raises
    QuadratureConvergenceError with the achieved tolerance on failure.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    width = 9.0 * math.sqrt(t)

    def f(l):
        return np.exp(-l * l / t) / _theta3_real_ratio_frame(l / t, t)

    prev = None
    for n_panels in (8, 16, 32, 64, 128):
        val = math.sqrt(t / math.pi) * _panel_gl(f, -width, width, n_panels)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            return val
        prev = val
    raise QuadratureConvergenceError(
        "resolution constant quadrature did not converge",
        abs(val - prev))


# ---------------------------------------------------------------------------
# SU(2) resolution integral I(t, n)
# ---------------------------------------------------------------------------

def itn_theta_integrand(p, t, n):
    """Complex integrand of I(t, n) through the theta'-denominator.

    Normalized so the integral reproduces the tabulated values t^3 n / 8:
    with the standard theta3 convention, e^{-p^2/t} theta3'(p/(2 pi i) |
    i t/(4 pi)) = 2 pi i sum_m m e^{-(p - t m/2)^2 / t}, so the prefactor
    is 2 pi i rather than the 2i of a convention that scales z by pi.
    """
    num = 2j * math.pi * p * p * math.exp(-(p - t * n / 2.0) ** 2 / t)
    den = theta3_dz(p / (2j * math.pi), 1j * t / (4 * math.pi)) \
        * math.exp(-p * p / t)
    return num / den


def resolution_integral_su2(t, n, tol=1e-9, return_imag_residual=False,
                            n_panels=None):
    """I(t, n) = int p^2 e^{-(p - tn/2)^2/t} / sum_m m e^{-(p - tm/2)^2/t} dp.

    Matches the tabulated t^3 n / 8 values. The real form of the integrand
    is the fast path; the imaginary residual is measured from the complex
    theta3' form on a sample of nodes. A fixed n_panels skips the adaptive
    refinement (coarse-quadrature escape hatch for the CLI).
    """
    if t <= 0 or n < 1:
        raise ValueError("require t > 0 and n >= 1")
    center = t * n / 2.0
    width = 13.0 * math.sqrt(t)
    lo, hi = center - width, center + width
    pmax = max(abs(lo), abs(hi))
    mmax = int(math.ceil(2 * pmax / t + 26.0 / math.sqrt(t))) + 8

    def f(p):
        den = itn_denominator(p, t, mmax)
        return p * p * np.exp(-(p - center) ** 2 / t) / den

    # keep p = 0 a panel edge: the integrand has a removable point there
    prev = None
    val = None
    adaptive = n_panels is None
    schedule = (16, 32, 64, 128) if adaptive else (n_panels,)
    for npan in schedule:
        if lo < 0.0 < hi:
            k = max(1, int(round(npan * (0.0 - lo) / (hi - lo))))
            val = (_panel_gl(f, lo, 0.0, k) +
                   _panel_gl(f, 0.0, hi, npan - k + 1))
        else:
            val = _panel_gl(f, lo, hi, npan)
        if prev is not None and abs(val - prev) <= tol * max(1.0, abs(val)):
            break
        prev = val
    else:
        if adaptive:
            raise QuadratureConvergenceError(
                "I(t,n) quadrature did not converge", abs(val - prev))
    if not return_imag_residual:
        return val
    sample = np.linspace(center - 2 * math.sqrt(t), center + 2 * math.sqrt(t), 7)
    vals = [itn_theta_integrand(float(p), t, n) for p in sample
            if abs(p) > 1e-6 * math.sqrt(t)]
    resid = max(abs(v.imag) for v in vals) / max(abs(v.real) for v in vals)
    return val, resid


# ---------------------------------------------------------------------------
# Schur property of the phase-space resolution operator (SU(2))
# ---------------------------------------------------------------------------

def sphere_grid(l_exact):
    """(theta, phi) product grid integrating spherical harmonics l <= l_exact
    exactly; returns (theta, phi, weights) with sum(weights) = 4 pi."""
    n_theta = l_exact // 2 + 1
    n_phi = l_exact + 1
    x, wx = np.polynomial.legendre.leggauss(n_theta)
    theta = np.arccos(x)
    phi = 2 * math.pi * np.arange(n_phi) / n_phi
    T, P = np.meshgrid(theta, phi, indexing="ij")
    W = np.repeat(wx[:, None], n_phi, axis=1) * (2 * math.pi / n_phi)
    return T.ravel(), P.ravel(), W.ravel()


def schur_residual_su2(t, n, n_radial=80, l_margin=4):
    """Numerically integrated resolution operator on the irrep n and its
    deviation from a multiple of the identity.

    A = int_g dX rho_{2t}(e^{-2iX})^{-1} pi_n(e^{2iX}) evaluated in spherical
    coordinates (Weyl integration on the Lie algebra); returns (A, residual)
    with residual = ||A - (tr A / n) 1||_F / |tr A|.
    """
    twoj = n - 1
    j = twoj / 2.0
    theta, phi, wsph = sphere_grid(2 * twoj + l_margin)
    D = wigner_D_euler_grid(twoj, phi, theta, np.zeros_like(phi))
    h_max = t * (2 * j + 1) / 2.0 + 12.0 * math.sqrt(t) + 2.0
    x, wx = np.polynomial.legendre.leggauss(n_radial)
    h = (x + 1.0) * h_max / 2.0
    wh = wx * h_max / 2.0
    norm = su2_norm_series(h, t, int(math.ceil(2 * h_max / t
                                               + 28 / math.sqrt(t))) + 10)
    m = np.arange(twoj, -twoj - 1, -2) / 2.0
    # radial x sphere assembly: D diag(e^{2 h m}) D^dagger
    rad = (h * h * wh / norm)[:, None] * np.exp(2.0 * np.outer(h, m))
    ang = np.einsum("s,sma,sna->amn", wsph, D, D.conj())
    A = np.einsum("ra,amn->mn", rad, ang)
    tr = np.trace(A)
    resid = np.linalg.norm(A - (tr / n) * np.eye(n)) / abs(tr)
    return A, float(resid)


# ---------------------------------------------------------------------------
# Measure equivalence on SU(2) phase space
# ---------------------------------------------------------------------------

def measure_equiv_ratio(t, X):
    """(2 pi t)^3 |Psi_{Phi(g,X)}|^2 nu_t sigma / vol; tends to 1 as t -> 0.

    Uses the polar density e^{-t/4} e^{-|X|^2/t} (pi t)^{-3/2} sinh|X|/|X|
    (the normalization pinned so the product of all factors is asymptotically
    the scaled Liouville density) and the overlap norm series.
    """
    if t <= 0:
        raise ValueError("t must be positive")
    h = float(np.linalg.norm(np.asarray(X, float)))
    norm = su2_overlap_norm(t, h)
    if h < 1e-12:
        eta = 1.0 + h * h / 6.0
    else:
        eta = math.sinh(h) / h
    dens = (math.pi * t) ** -1.5 * math.exp(-t / 4.0) * math.exp(-h * h / t)
    return (2 * math.pi * t) ** 3 * norm * dens * eta / G.VOL_SU2
