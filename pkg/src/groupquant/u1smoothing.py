"""U(1)-equivariant Berezin and Kohn-Nirenberg smoothing identities.

Works on the twisted Hilbert space with basis |j + j0>, j in Z, truncated
to |j| <= J. Coherent vectors at the phase-space point (phi, l) have
coefficients

    c_j(phi, l) = e^{j l} e^{-i j phi} e^{-t j j0} e^{-t j^2 / 2},

the annihilation operator is X_t = e^{-t/2} U(1) e^{-t J} with
X_t |xi, j0> = xi |xi, j0>, xi = e^{-l + i phi}, and the Berezin
quantization of a phase-space Fourier mode e^{i m phi} e^{i kappa l} has
the closed-form matrix

    (Q^B)_{j1, j1 - m} = exp(-t (j1^2 + j2^2)/2 + t (j1 + j2 + i kappa)^2/4
                             + i j0 t kappa),   j2 = j1 - m.

Its lower symbol is the heat-evolved mode e^{-t(m^2 + kappa^2)/2} f, and on
Laurent modes xi^a xibar^b the Wick multiplier e^{2 t a b} appears instead.
"""

import math

import numpy as np

from .theta import theta3


class TwistedSpace:
    def __init__(self, t, j0=0.0, J=None):
        if t <= 0:
            raise ValueError("t must be positive")
        self.t = t
        self.j0 = j0 % 1.0
        if J is None:
            J = int(math.ceil(math.sqrt(80.0 / t))) + 8
        self.J = J
        self.js = np.arange(-J, J + 1)

    @property
    def dim(self):
        return 2 * self.J + 1

    def coherent_coeffs(self, phi, l):
        j, t, j0 = self.js, self.t, self.j0
        return np.exp(j * l - 1j * j * phi - t * j * j0 - t * j * j / 2.0)

    def coherent_norm_sq(self, l):
        """<xi|xi> = theta3(i (l - t j0)/pi | i t/pi)."""
        return theta3(1j * (l - self.t * self.j0) / math.pi,
                      1j * self.t / math.pi).real

    def annihilation(self):
        """X_t = e^{-t/2} U(1) e^{-tJ}: shifts |j+j0> up with weight."""
        X = np.zeros((self.dim, self.dim), dtype=complex)
        for idx, j in enumerate(self.js[:-1]):
            X[idx + 1, idx] = math.exp(-self.t / 2.0
                                       - self.t * (j + self.j0))
        return X

    def annihilation_residual(self, phi, l):
        c = self.coherent_coeffs(phi, l)
        xi = np.exp(-l + 1j * phi)
        resid = self.annihilation() @ c - xi * c
        return np.abs(resid).max() / np.abs(c).max()

    def lower_symbol(self, A, phi, l):
        c = self.coherent_coeffs(phi, l)
        return np.vdot(c, A @ c) / np.vdot(c, c)

    # -- Berezin quantization -------------------------------------------------

    def berezin_mode(self, m, kappa):
        """Closed-form Q^B of f(phi', l') = e^{i m phi'} e^{i kappa l'}."""
        t, j0 = self.t, self.j0
        A = np.zeros((self.dim, self.dim), dtype=complex)
        for i1, j1 in enumerate(self.js):
            j2 = j1 - m
            if abs(j2) > self.J:
                continue
            i2 = i1 - m
            expo = (-t * (j1 * j1 + j2 * j2) / 2.0
                    + t * (j1 + j2 + 1j * kappa) ** 2 / 4.0
                    + 1j * j0 * t * kappa)
            A[i1, i2] = np.exp(expo)
        return A

    def berezin_mode_quadrature(self, m, kappa, n_phi=None, n_l=220):
        """Q^B of the same mode by explicit (phi', l') quadrature.

        Independent route for the closed form: uniform angle grid times
        Gauss-Legendre on a 24-sigma momentum window with the twisted
        Gaussian weight e^{-(l' - j0 t)^2/t} / sqrt(pi t).
        """
        t, j0 = self.t, self.j0
        if n_phi is None:
            n_phi = 4 * self.J + abs(m) + 8
        phis = 2 * math.pi * np.arange(n_phi) / n_phi
        half = 12.0 * math.sqrt(t) + abs(self.js).max() * t
        x, w = np.polynomial.legendre.leggauss(n_l)
        ls = j0 * t + half * x
        wl = w * half * np.exp(-(ls - j0 * t) ** 2 / t) / math.sqrt(math.pi * t)
        cj = np.exp(np.outer(self.js, ls) - t * self.js[:, None] * j0
                    - t * self.js[:, None] ** 2 / 2.0)
        ph = np.exp(-1j * np.outer(self.js, phis))
        fphi = np.exp(1j * m * phis) / n_phi
        fl = np.exp(1j * kappa * ls) * wl
        # A = sum_{phi', l'} f |c><c|
        Aphi = np.einsum("p,ap,bp->ab", fphi, ph, ph.conj())
        return np.einsum("l,al,bl,ab->ab", fl, cj, cj, Aphi)

    def heat_multiplier_residual(self, m, kappa, samples):
        """max | L_{Q^B(mode)} - e^{-t(m^2+kappa^2)/2} mode | over samples."""
        A = self.berezin_mode(m, kappa)
        mult = math.exp(-self.t * (m * m + kappa * kappa) / 2.0)
        worst = 0.0
        for phi, l in samples:
            lhs = self.lower_symbol(A, phi, l)
            rhs = mult * np.exp(1j * m * phi + 1j * kappa * l)
            worst = max(worst, abs(lhs - rhs))
        return worst

    # -- Wick / anti-Wick relation -------------------------------------------

    def berezin_laurent(self, a, b):
        """Closed-form Q^B of xi^a xibar^b (x-frequency m = a - b)."""
        t, j0 = self.t, self.j0
        m = a - b
        A = np.zeros((self.dim, self.dim), dtype=complex)
        for i1, j1 in enumerate(self.js):
            j2 = j1 - m
            if abs(j2) > self.J:
                continue
            s = j1 + j2 - (a + b)
            expo = (-t * (j1 * j1 + j2 * j2) / 2.0 + t * s * s / 4.0
                    - t * j0 * (a + b))
            A[i1, i1 - m] = np.exp(expo)
        return A

    def wick_residuals(self, a, b, samples):
        """(anti-Wick identification, Wick multiplier) residuals.

        Checks Q^B(xi^a xibar^b) == X^a (X*)^b and the lower-symbol
        relation L = e^{2 t a b} xi^a xibar^b.
        """
        A = self.berezin_laurent(a, b)
        X = self.annihilation()
        B = np.linalg.matrix_power(X, a) @ np.linalg.matrix_power(
            X.conj().T, b)
        # interior block (power chains truncate at the edges), entrywise
        # relative: the entries span many orders of magnitude
        pad = a + b
        sl = slice(pad, self.dim - pad)
        num = np.abs(A - B)[sl, sl]
        den = np.abs(A)[sl, sl] + np.abs(B)[sl, sl] + 1e-300
        r1 = (num / den).max()
        r2 = 0.0
        for phi, l in samples:
            xi = np.exp(-l + 1j * phi)
            lhs = self.lower_symbol(A, phi, l)
            rhs = math.exp(2 * self.t * a * b) * xi ** a * np.conj(xi) ** b
            r2 = max(r2, abs(lhs - rhs) / max(abs(rhs), 1e-300))
        return r1, r2

    # -- Kohn-Nirenberg smoothing ---------------------------------------------

    def kn_operator(self, modes):
        """A_{sigma,t} for sigma_t(phi, k) = sum s e^{i m phi}
        e^{i kappa t (k + j0)}: matrix <j+m| A |j> = sum s e^{i kappa t (j+j0)}."""
        A = np.zeros((self.dim, self.dim), dtype=complex)
        for (m, kappa, s) in modes:
            for i1, j in enumerate(self.js):
                i2 = i1 + m
                if 0 <= i2 < self.dim:
                    A[i2, i1] += s * np.exp(1j * kappa * self.t
                                            * (j + self.j0))
        return A

    def kn_lower_symbol_formula(self, modes, phi, l):
        """Gaussian-sum formula for L^t_{A_{sigma,t}} at (phi, l):

        sqrt(2)/(2 pi theta3) sum_k int dphi' sigma_t(phi',k)
          e^{-((l - t(k+j0))^2 + (phi-phi')^2)/(2t)}
          e^{i (phi - phi')(l - t(k+j0))/t},

        with the phi'-integral done in closed form per mode.
        """
        t, j0 = self.t, self.j0
        th = theta3((l / t - j0), 1j * math.pi / t).real
        total = 0.0 + 0.0j
        kwin = int(math.ceil((abs(l) + 14 * math.sqrt(t)) / t)) + 2
        for (m, kappa, s) in modes:
            for k in range(-kwin, kwin + 1):
                mom = l - t * (k + j0)
                gphi = math.sqrt(2 * math.pi * t) * np.exp(
                    1j * m * phi - t * (m - mom / t) ** 2 / 2.0)
                total += (s * np.exp(1j * kappa * t * (k + j0))
                          * math.exp(-mom * mom / (2 * t)) * gphi)
        return math.sqrt(2.0) / (2 * math.pi * th) * total
