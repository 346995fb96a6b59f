"""Global Kohn-Nirenberg and Weyl matrix-symbol calculus on U(1) and SU(2).

A matrix symbol assigns to every irrep label pi (up to a band) a matrix-
valued function of g, sampled on a Haar quadrature grid and band-limited in
g. Operators act on a truncated Peter-Weyl space. The quantization is

    (A Psi)(g) = sum_pi d_pi tr( pi(g)^* sigma(pi, g) Psihat(pi) ),
    Psihat(pi) = int Psi(g) pi(g) dg,

the symbol of an operator is sigma_A(pi, g) = (pi A pi^*)(g), and the Weyl
deformation twists the left convolution kernel by the group square root,
F^W(h, g) = F^R(h, sqrt(h)^{-1} g). Square roots are taken through the
exponential with rotation angle in (-pi, pi); kernels carrying mass at the
branch locus (angle pi) are rejected.
"""

import json
import math
from dataclasses import dataclass, field

import numpy as np

from . import groups as G
from .peterweyl import PWSpace


class BranchLocusError(ValueError):
    def __init__(self, mass, tol):
        super().__init__(
            "kernel mass %.3e at the square-root branch locus exceeds %.1e"
            % (mass, tol))
        self.mass = mass


@dataclass
class MatrixSymbol:
    """sigma(pi, g) for labels up to pi_band, on the grid of g_pw.quad."""
    group: str
    pi_band: int
    g_pw: PWSpace
    values: dict = field(default_factory=dict)  # label -> (N, d, d)

    @property
    def labels(self):
        return G.irrep_labels(self.group, self.pi_band)

    @property
    def quad(self):
        return self.g_pw.quad

    def copy_map(self, fn):
        return MatrixSymbol(self.group, self.pi_band, self.g_pw,
                            {lab: fn(lab, v) for lab, v in self.values.items()})

    def adjoint(self):
        """sigma^*(pi, g) = sigma(pi, g)^dagger pointwise."""
        return self.copy_map(lambda lab, v: np.conj(np.swapaxes(v, 1, 2)))

    def coefficients(self, lab):
        """g-band-limited PW coefficients of sigma(lab, .)_{mn}: (dim_g, d, d)."""
        return self.g_pw.analysis(self.values[lab])

    def values_at_quad(self, lab, quad):
        """Re-evaluate sigma(lab, .) on another quadrature's nodes."""
        coef = self.coefficients(lab)
        pts = quad.angles if self.group == G.U1 else quad.quats
        E = self.g_pw.eval_basis(pts)
        return np.tensordot(E, coef, axes=(1, 0))

    def max_abs_diff(self, other):
        return max(np.abs(self.values[lab] - other.values[lab]).max()
                   for lab in self.values)


def make_g_space(group, g_band, quad_degree=None):
    return PWSpace(group, g_band, quad_degree=quad_degree)


def identity_symbol(group, pi_band, g_pw):
    vals = {}
    n = g_pw.quad.n_nodes
    for lab in G.irrep_labels(group, pi_band):
        d = G.dim(group, lab)
        vals[lab] = np.broadcast_to(np.eye(d, dtype=complex),
                                    (n, d, d)).copy()
    return MatrixSymbol(group, pi_band, g_pw, vals)


def function_symbol(group, pi_band, g_pw, f_grid):
    """sigma_f(pi, g) = f(g) 1."""
    vals = {}
    for lab in G.irrep_labels(group, pi_band):
        d = G.dim(group, lab)
        vals[lab] = f_grid[:, None, None] * np.eye(d, dtype=complex)
    return MatrixSymbol(group, pi_band, g_pw, vals)


def momentum_symbol(group, pi_band, g_pw, eps, direction=0):
    """sigma_{P_X}(pi, g) = i eps dpi(X), X = tau_direction (or 1 for U(1))."""
    from .wigner import su2_generator
    vals = {}
    n = g_pw.quad.n_nodes
    for lab in G.irrep_labels(group, pi_band):
        if group == G.U1:
            blk = np.array([[1j * lab]], dtype=complex)
        else:
            blk = su2_generator(lab - 1, direction)
        vals[lab] = np.broadcast_to(1j * eps * blk,
                                    (n,) + blk.shape).copy()
    return MatrixSymbol(group, pi_band, g_pw, vals)


def random_symbol(group, pi_band, g_pw, rng, hermitian=False, scale=1.0):
    """Band-limited random symbol (g-band = g_pw.band)."""
    vals = {}
    for lab in G.irrep_labels(group, pi_band):
        d = G.dim(group, lab)
        coef = scale * (rng.standard_normal((g_pw.dim, d, d))
                        + 1j * rng.standard_normal((g_pw.dim, d, d)))
        v = g_pw.synthesis(coef)
        if hermitian:
            v = (v + np.conj(np.swapaxes(v, 1, 2))) / 2.0
        vals[lab] = v
    return MatrixSymbol(group, pi_band, g_pw, vals)


@dataclass
class TruncatedOperator:
    pw: PWSpace
    matrix: np.ndarray
    truncation_error: float = 0.0


@dataclass
class ConvolutionKernel:
    """Left kernel F(h, g) in double Fourier form: K[pi](g)_{mn} with
    F(h, g) = sum_pi d_pi tr(pi(h)^* K[pi](g))."""
    group: str
    h_band: int
    g_quad: object
    K: dict = field(default_factory=dict)  # label -> (N_g, d, d)


# ---------------------------------------------------------------------------
# quantization / dequantization
# ---------------------------------------------------------------------------

def kn_quantize(sym, pw):
    """Matrix of the Kohn-Nirenberg operator on the truncated PW space."""
    quad = pw.quad
    w = quad.weights
    # Psihat_i(pi) = sum_k w_k E[k, i] D[pi][k]
    out_vals = np.zeros((pw.dim, quad.n_nodes), dtype=complex)
    for lab in sym.labels:
        d = G.dim(sym.group, lab)
        D = quad.rep_grid(lab)
        psihat = np.einsum("k,ki,kmn->imn", w, pw.E, D)
        sig = sym.values_at_quad(lab, quad)
        out_vals += d * np.einsum("knm,knp,ipm->ik", D.conj(), sig, psihat,
                                  optimize=True)
    coeffs = pw.analysis(out_vals.T)          # (dim, basis)
    resid = np.abs(out_vals.T - pw.synthesis(coeffs)).max()
    scale = max(np.abs(out_vals).max(), 1e-300)
    return TruncatedOperator(pw, coeffs, truncation_error=resid / scale)


def kn_symbol(op, pi_band, g_pw):
    """sigma_A(pi, g) = (pi A pi^*)(g), projected onto the g_pw band.

    The projection residual (mass outside the g-band) is attached to the
    returned symbol as .projection_residual; it vanishes for operators in
    the band-limited calculus.
    """
    pw = op.pw
    quad = pw.quad
    pts = quad.angles if pw.group == G.U1 else quad.quats
    E_small = g_pw.eval_basis(pts)
    EW_small = (E_small.conj() * quad.weights[:, None]).T
    vals = {}
    worst = 0.0
    for lab in G.irrep_labels(pw.group, pi_band):
        if lab not in pw.labels:
            raise ValueError("operator band too small for label %r" % lab)
        d = G.dim(pw.group, lab)
        D = quad.rep_grid(lab)
        # columns of pi^*: (pi^*)_{mn}(g) = conj(D_{nm}(g))
        F = np.conj(np.swapaxes(D, 1, 2)).reshape(quad.n_nodes, d * d)
        C = pw.analysis(F)                    # (dim_pw, d*d)
        W = pw.synthesis(op.matrix @ C)       # (N, d*d)
        sig = np.einsum("kmn,knp->kmp", D, W.reshape(quad.n_nodes, d, d))
        coef = EW_small @ sig.reshape(quad.n_nodes, d * d)
        proj = (E_small @ coef).reshape(quad.n_nodes, d, d)
        worst = max(worst, np.abs(proj - sig).max()
                    / max(np.abs(sig).max(), 1e-300))
        vals[lab] = (g_pw.E @ coef).reshape(g_pw.quad.n_nodes, d, d)
    sym = MatrixSymbol(pw.group, pi_band, g_pw, vals)
    sym.projection_residual = worst
    return sym


def kn_compose(sa, sb, h_quad, h_chunk=64):
    """Direct composition integral
    sigma_{AB}(pi, g) = int dh F_A(h, g) pi(h) sigma_B(pi, h^{-1} g).

    Independent of the operator-product route; h_quad must be exact for the
    combined h-band (A's pi-band + target pi + B's g-band).
    """
    if sa.group != sb.group:
        raise ValueError("group mismatch")
    group = sa.group
    gq = sa.quad
    pts_h = h_quad.angles if group == G.U1 else h_quad.quats
    wh = h_quad.weights
    N_h, N_g = h_quad.n_nodes, gq.n_nodes

    # F_A on the (h, g) double grid
    FA = np.zeros((N_h, N_g), dtype=complex)
    for lab in sa.labels:
        d = G.dim(group, lab)
        Dh = h_quad.rep_grid(lab)
        FA += d * np.einsum("hnm,gnm->hg", Dh.conj(), sa.values[lab],
                            optimize=True)

    out = {}
    pi_band = min(sa.pi_band, sb.pi_band)
    for lab in G.irrep_labels(group, pi_band):
        d = G.dim(group, lab)
        Dh = h_quad.rep_grid(lab)
        CB = sb.coefficients(lab)             # (dim_g, d, d)
        acc = np.zeros((N_g, d, d), dtype=complex)
        for start in range(0, N_h, h_chunk):
            sl = slice(start, min(start + h_chunk, N_h))
            shift = _eval_left_shifted(sb.g_pw, CB, h_quad, sl, gq)
            acc += np.einsum("h,hg,hmn,hgnp->gmp", wh[sl], FA[sl],
                             Dh[sl], shift, optimize=True)
        out[lab] = acc
    return MatrixSymbol(group, pi_band, sa.g_pw, out)


def _eval_left_shifted(g_pw, coef, h_quad, h_slice, gq):
    """Values f(h^{-1} g) for PW coefficient data f, over (h in slice, g grid).

    coef has shape (dim_g, d, d); returns (n_h, N_g, d, d).
    """
    group = g_pw.group
    n_h = h_slice.stop - h_slice.start
    out = np.zeros((n_h, gq.n_nodes) + coef.shape[1:], dtype=complex)
    for lab2 in g_pw.labels:
        d2 = G.dim(group, lab2)
        o = g_pw.offsets[lab2]
        c = coef[o:o + d2 * d2].reshape((d2, d2) + coef.shape[1:])
        Dh2 = h_quad.rep_grid(lab2)[h_slice]
        Dg2 = gq.rep_grid(lab2)
        out += math.sqrt(d2) * np.einsum("hca,gcb,ab...->hg...",
                                         Dh2.conj(), Dg2, c, optimize=True)
    return out


# ---------------------------------------------------------------------------
# square roots and the Weyl deformation
# ---------------------------------------------------------------------------

def sqrt_elements(group, quad):
    """Pointwise square roots of the quadrature nodes, angle in (-pi, pi)."""
    if group == G.U1:
        phi = np.where(quad.angles > math.pi, quad.angles - 2 * math.pi,
                       quad.angles)
        return phi / 2.0  # angles of sqrt(h)
    X = G.quat_log(quad.quats)
    return G.quat_exp(X / 2.0)


def branch_mass(group, quad, F_hg, margin=0.2):
    """Relative kernel mass within `margin` of the branch locus (angle pi)."""
    w = quad.weights
    m_h = np.einsum("hg,hg->h", np.abs(F_hg) ** 2,
                    np.broadcast_to(1.0, F_hg.shape))
    if group == G.U1:
        ang = np.abs(np.where(quad.angles > math.pi,
                              quad.angles - 2 * math.pi, quad.angles))
        near = ang > math.pi - margin
    else:
        ang = np.linalg.norm(G.quat_log(quad.quats), axis=1)
        near = ang > 2 * math.pi - 2 * margin
    total = float(np.sum(w * m_h))
    if total == 0.0:
        return 0.0
    return float(np.sum(w[near] * m_h[near])) / total


def kernel_values(sym, h_quad, shift_sqrt=False):
    """F(h, g) on the double grid; with shift_sqrt, F^R(h, sqrt(h)^{-1} g)."""
    group = sym.group
    gq = sym.quad
    N_h, N_g = h_quad.n_nodes, gq.n_nodes
    out = np.zeros((N_h, N_g), dtype=complex)
    if shift_sqrt:
        roots = sqrt_elements(group, h_quad)
    for lab in sym.labels:
        d = G.dim(group, lab)
        Dh = h_quad.rep_grid(lab)
        if not shift_sqrt:
            out += d * np.einsum("hnm,gnm->hg", Dh.conj(), sym.values[lab],
                                 optimize=True)
            continue
        coef = sym.coefficients(lab)
        # sigma(lab, sqrt(h)^{-1} g) via the PW split of e_mu(v g)
        shift = np.zeros((N_h, N_g, d, d), dtype=complex)
        for lab2 in sym.g_pw.labels:
            d2 = G.dim(group, lab2)
            o = sym.g_pw.offsets[lab2]
            c = coef[o:o + d2 * d2].reshape(d2, d2, d, d)
            if group == G.U1:
                Dv = np.exp(-1j * lab2 * roots)[:, None, None]
            else:
                from .wigner import wigner_D_euler_grid
                Dv = wigner_D_euler_grid(
                    lab2 - 1, *G.quat_to_euler(G.quat_inv(roots)))
            Dg2 = gq.rep_grid(lab2)
            shift += math.sqrt(d2) * np.einsum(
                "hac,gcb,abmn->hgmn", Dv, Dg2, c, optimize=True)
        out += d * np.einsum("hnm,hgnm->hg", Dh.conj(), shift, optimize=True)
    return out


def weyl_deform(sym, h_quad, branch_tol=1e-12):
    """Weyl kernel F^W(h, g) = F^R(h, sqrt(h)^{-1} g) in double Fourier form.

    Rejects symbols whose right kernel carries more than branch_tol relative
    mass near the square-root branch locus.
    """
    FR = kernel_values(sym, h_quad, shift_sqrt=False)
    mass = branch_mass(sym.group, h_quad, FR)
    if mass > branch_tol:
        raise BranchLocusError(mass, branch_tol)
    FW = kernel_values(sym, h_quad, shift_sqrt=True)
    K = {}
    for lab in sym.labels:
        Dh = h_quad.rep_grid(lab)
        K[lab] = np.einsum("h,hg,hmn->gmn", h_quad.weights, FW, Dh,
                           optimize=True)
    return ConvolutionKernel(sym.group, sym.pi_band, sym.quad, K)


def kernel_quantize(kernel, pw, h_quad, h_chunk=64):
    """rho_L(F): (A Psi)(g) = int dh F(h, g) Psi(h^{-1} g) on the PW space."""
    group = kernel.group
    gq = kernel.g_quad
    N_h = h_quad.n_nodes
    F = np.zeros((N_h, gq.n_nodes), dtype=complex)
    for lab, Kv in kernel.K.items():
        d = G.dim(group, lab)
        Dh = h_quad.rep_grid(lab)
        F += d * np.einsum("hnm,gnm->hg", Dh.conj(), Kv, optimize=True)
    out_vals = np.zeros((gq.n_nodes, pw.dim), dtype=complex)
    eye = np.eye(pw.dim, dtype=complex)
    for start in range(0, N_h, h_chunk):
        sl = slice(start, min(start + h_chunk, N_h))
        shift = _eval_left_shifted(pw, eye, h_quad, sl, gq)  # (nh, Ng, dim)
        out_vals += np.einsum("h,hg,hgi->gi", h_quad.weights[sl], F[sl],
                              shift, optimize=True)
    # analysis on the kernel's g-grid with the operator-space basis
    pts = gq.angles if group == G.U1 else gq.quats
    E = pw.eval_basis(pts)
    EW = (E.conj() * gq.weights[:, None]).T
    coeffs = EW @ out_vals
    resid = np.abs(out_vals - E @ coeffs).max() / max(np.abs(out_vals).max(),
                                                      1e-300)
    return TruncatedOperator(pw, coeffs, truncation_error=resid)


def weyl_quantize(sym, pw, h_quad, branch_tol=1e-12):
    return kernel_quantize(weyl_deform(sym, h_quad, branch_tol), pw, h_quad)


def weyl_symbol(op, pi_band, g_pw, h_quad, branch_tol=1e-12, h_chunk=64):
    """sigma^W_A(pi, g) = int dh F_A(h, sqrt(h) g) pi(h) through the operator
    Schwartz kernel; F_A(h, sqrt(h) g) = K_A(sqrt(h)^{-1} g, sqrt(h) g)."""
    pw = op.pw
    group = pw.group
    gq = g_pw.quad
    roots = sqrt_elements(group, h_quad)
    # branch check on F_A(h, g) = K_A(h^{-1} g, g)
    FA = _operator_left_kernel(op, h_quad, gq)
    mass = branch_mass(group, h_quad, FA)
    if mass > branch_tol:
        raise BranchLocusError(mass, branch_tol)
    N_h = h_quad.n_nodes
    vals_shift = np.zeros((N_h, gq.n_nodes), dtype=complex)
    for start in range(0, N_h, h_chunk):
        sl = slice(start, min(start + h_chunk, N_h))
        if group == G.U1:
            x_ang = -roots[sl][:, None] + gq.angles[None, :]
            y_ang = roots[sl][:, None] + gq.angles[None, :]
            Ex = pw.eval_basis(x_ang.ravel())
            Ey = pw.eval_basis(y_ang.ravel())
        else:
            r = roots[sl]
            x_q = G.quat_mul(G.quat_inv(r)[:, None, :], gq.quats[None, :, :])
            y_q = G.quat_mul(r[:, None, :], gq.quats[None, :, :])
            Ex = pw.eval_basis(x_q.reshape(-1, 4))
            Ey = pw.eval_basis(y_q.reshape(-1, 4))
        kv = np.einsum("pi,ij,pj->p", Ey, op.matrix, Ex.conj(),
                       optimize=True)
        vals_shift[sl] = kv.reshape(sl.stop - sl.start, gq.n_nodes)
    out = {}
    for lab in G.irrep_labels(group, pi_band):
        Dh = h_quad.rep_grid(lab)
        out[lab] = np.einsum("h,hg,hmn->gmn", h_quad.weights, vals_shift, Dh,
                             optimize=True)
    return MatrixSymbol(group, pi_band, g_pw, out)


def _operator_left_kernel(op, h_quad, gq):
    """F_A(h, g) = K_A(h^{-1} g, g) on the double grid."""
    pw = op.pw
    group = pw.group
    if group == G.U1:
        x_ang = (-h_quad.angles[:, None] + gq.angles[None, :])
        Ex = pw.eval_basis(x_ang.ravel())
    else:
        x_q = G.quat_mul(G.quat_inv(h_quad.quats)[:, None, :],
                         gq.quats[None, :, :])
        Ex = pw.eval_basis(x_q.reshape(-1, 4))
    pts = gq.angles if group == G.U1 else gq.quats
    Eg = pw.eval_basis(pts)
    Exr = Ex.conj().reshape(h_quad.n_nodes, gq.n_nodes, pw.dim)
    tmp = np.einsum("ij,hgj->hgi", op.matrix, Exr, optimize=True)
    return np.einsum("gi,hgi->hg", Eg, tmp, optimize=True)


# ---------------------------------------------------------------------------
# serialization (bit-exact roundtrip via repr floats)
# ---------------------------------------------------------------------------

def symbol_to_json(sym):
    payload = {
        "group": sym.group,
        "pi_band": sym.pi_band,
        "g_band": sym.g_pw.band,
        "grid_degree": sym.quad.exactness_degree,
        "values": {},
    }
    for lab, v in sym.values.items():
        inter = np.empty(v.shape + (2,))
        inter[..., 0] = v.real
        inter[..., 1] = v.imag
        payload["values"][str(lab)] = {
            "shape": list(v.shape),
            "data": [repr(x) for x in inter.ravel().tolist()],
        }
    return json.dumps(payload)


def symbol_from_json(text):
    payload = json.loads(text)
    g_pw = PWSpace(payload["group"], payload["g_band"],
                   quad_degree=payload["grid_degree"])
    vals = {}
    for lab_s, rec in payload["values"].items():
        flat = np.array([float(x) for x in rec["data"]])
        inter = flat.reshape(tuple(rec["shape"]) + (2,))
        vals[int(lab_s)] = inter[..., 0] + 1j * inter[..., 1]
    return MatrixSymbol(payload["group"], payload["pi_band"], g_pw, vals)
