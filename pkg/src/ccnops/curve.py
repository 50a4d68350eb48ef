"""Multiprecision kernel: theta functions, theta factorials, elliptic Gamma symbols.

Everything is built on the single exponential primitive e(x) = exp(2*pi*i*x).
The odd theta function is defined by its product formula

    theta(z) = (e(z/2)-e(-z/2)) prod_{j>=1} (1-e(j*tau+z))(1-e(j*tau-z))
               / prod_{j>=1} (1-e(j*tau))^2

and evaluated through the equivalent lacunary sum formula (both are exposed,
and their agreement is part of the identity suite).  The elliptic Gamma
symbol is the meromorphic solution

    gamma_q(q+z) = theta(z) gamma_q(z)

normalized by an explicit exponential prefactor whose branch is the principal
logarithm, fixed once per tau.
"""

from __future__ import annotations

import threading
from dataclasses import dataclass

from mpmath import mp, mpc, mpf


class ModulusError(ValueError):
    """Im(tau) or Im(q) below the convergence threshold."""


class PrecisionError(ValueError):
    """Requested precision outside the supported range."""


class PoleProximityError(ArithmeticError):
    """Evaluation point too close to a zero divisor of a denominator."""


class TorsionError(ValueError):
    """q is (numerically) torsion where a non-torsion q is required."""


#: minimal imaginary part of tau (and of q for Gamma symbols)
MIN_IM = mpf("0.3")

#: lattice-reduced distance below which a point counts as sitting on a divisor
POLE_THRESHOLD = mpf("1e-3")

#: retries for rejection sampling away from poles
MAX_RETRIES = 64

#: truncation guard bits on top of the working precision
GUARD_BITS = 16


def _key(z):
    z = mpc(z)
    return (z.real._mpf_, z.imag._mpf_)


class CurveContext:
    """Evaluation context for a fixed modulus tau and working precision.

    Caches the nome power tables and memoizes theta values; all methods are
    pure and the caches are lock-protected, so a context can be shared
    between worker threads.
    """

    def __init__(self, tau, prec=256):
        if prec < 64:
            raise PrecisionError("need at least 64 bits of precision")
        self.prec = int(prec)
        self._wp = self.prec + GUARD_BITS
        with mp.workprec(self._wp):
            self.tau = mpc(tau)
            if self.tau.imag < MIN_IM:
                raise ModulusError("Im(tau) = %s below threshold %s" % (self.tau.imag, MIN_IM))
            self.two_pi_i = mpc(0, 2) * mp.pi
            self._cutoff = mpf(2) ** (-self.prec - GUARD_BITS)
            # theta sum formula tables: k = j+1/2, weight (-1)^j e(k^2 tau/2)
            self._e_tau8 = self.e(self.tau / 8)
            self._p_half = self.e(self.tau / 2)
            self._sum_weights = self._build_sum_weights()
            self._theta_denom = self._build_denominator()
            self.dtheta0 = self.two_pi_i  # theta'(0) from the product formula
        self._theta_cache = {}
        self._gamma_cache = {}
        self._pochhammer_cache = {}
        self._log_c_cache = {}
        self._lock = threading.Lock()

    # -- primitives -------------------------------------------------------

    def e(self, x):
        """The exponential primitive e(x) = exp(2*pi*i*x)."""
        with mp.workprec(self._wp):
            return mp.exp(self.two_pi_i * mpc(x))

    def _build_sum_weights(self):
        # w_j = (-1)^j e((j+1/2)^2 tau/2) = (-1)^j e(tau/8) p_half^(j^2+j)
        weights = []
        w = self._e_tau8
        j = 0
        # |p_half| < 1 strictly; terms decay like |p_half|^(j^2)
        while abs(w) > self._cutoff * mpf("1e-10") or j < 4:
            weights.append(w if j % 2 == 0 else -w)
            j += 1
            w = self._e_tau8 * self._p_half ** (j * j + j)
            if j > 4000:
                raise PrecisionError("theta series did not converge")
        return weights

    def _build_denominator(self):
        total = mpc(0)
        for j, w in enumerate(self._sum_weights):
            total += (2 * j + 1) * w
        return total

    # -- lattice ----------------------------------------------------------

    def lattice_reduce(self, z):
        """Reduce z modulo <1, tau>; returns (z0, m, n) with z = z0 + m + n*tau."""
        with mp.workprec(self._wp):
            z = mpc(z)
            n = int(mp.nint(z.imag / self.tau.imag))
            w = z - n * self.tau
            m = int(mp.nint(w.real))
            return w - m, m, n

    def dist_to_lattice(self, z):
        """Distance from z to the nearest point of <1, tau>."""
        z0, _, _ = self.lattice_reduce(z)
        with mp.workprec(self._wp):
            best = abs(z0)
            for dm in (-1, 0, 1):
                for dn in (-1, 0, 1):
                    best = min(best, abs(z0 + dm + dn * self.tau))
            return best

    def assert_off_divisor(self, z, what="theta argument"):
        if self.dist_to_lattice(z) < POLE_THRESHOLD:
            raise PoleProximityError("%s within %s of a lattice point" % (what, POLE_THRESHOLD))

    # -- theta ------------------------------------------------------------

    def theta(self, z):
        """theta(z; tau) via the lacunary sum formula, with memoization."""
        k = _key(z)
        hit = self._theta_cache.get(k)
        if hit is not None:
            return hit
        with mp.workprec(self._wp):
            z0, m, n = self.lattice_reduce(z)
            val = self._theta_reduced(z0)
            if m or n:
                # theta(z0 + m + n*tau) = (-1)^(m+n) e(-n*z0 - n^2*tau/2) theta(z0)
                mult = self.e(-n * z0 - n * n * self.tau / 2)
                if (m + n) % 2:
                    mult = -mult
                val = mult * val
        with self._lock:
            self._theta_cache[k] = val
        return val

    def _theta_reduced(self, z0):
        xh = self.e(z0 / 2)
        x = xh * xh
        num = mpc(0)
        pk = xh  # x^(j+1/2)
        inv_x = 1 / x
        ipk = 1 / xh
        for w in self._sum_weights:
            term = w * (pk - ipk)
            num += term
            pk *= x
            ipk *= inv_x
        return num / self._theta_denom

    def theta_product(self, z, reduce=True):
        """theta(z; tau) via the defining product formula (reference path)."""
        with mp.workprec(self._wp):
            z = mpc(z)
            mult = mpc(1)
            if reduce:
                z0, m, n = self.lattice_reduce(z)
                if m or n:
                    mult = self.e(-n * z0 - n * n * self.tau / 2)
                    if (m + n) % 2:
                        mult = -mult
                z = z0
            xh = self.e(z / 2)
            x = xh * xh
            val = xh - 1 / xh
            denom = mpc(1)
            p = self.e(self.tau)
            pj = p
            j = 1
            while True:
                f = (1 - pj * x) * (1 - pj / x)
                val *= f
                denom *= (1 - pj) ** 2
                if abs(pj) * (abs(x) + 1 / abs(x) + 2) < self._cutoff:
                    break
                pj *= p
                j += 1
                if j > 20000:
                    raise PrecisionError("theta product did not converge")
            return mult * val / denom

    def theta_deriv_at_lattice(self, m, n):
        """d/deps theta(m + n*tau + eps) at eps = 0."""
        with mp.workprec(self._wp):
            val = self.e(-n * n * self.tau / 2) * self.dtheta0
            if (m + n) % 2:
                val = -val
            return val

    # -- theta shifted factorial -------------------------------------------

    def theta_pochhammer(self, z, k, q):
        """theta(z; q)_k: prod_{0<=i<k} theta(i*q+z), reciprocal product for k<0."""
        with mp.workprec(self._wp):
            z = mpc(z)
            q = mpc(q)
            val = mpc(1)
            if k >= 0:
                for i in range(k):
                    val *= self.theta(i * q + z)
            else:
                for i in range(1, -k + 1):
                    f = self.theta(-i * q + z)
                    if self.dist_to_lattice(-i * q + z) < POLE_THRESHOLD:
                        raise PoleProximityError("theta factorial hit a pole at step %d" % i)
                    val /= f
            return val

    # -- the quadratic character on 2-torsion -------------------------------

    def frak_q(self, x, tol=mpf("1e-9")):
        """+1 at 0, -1 at the three nontrivial 2-torsion points."""
        with mp.workprec(self._wp):
            z0, _, _ = self.lattice_reduce(mpc(2) * mpc(x))
            if abs(z0) > tol and self.dist_to_lattice(2 * mpc(x)) > tol:
                raise ValueError("not a 2-torsion point within tolerance")
            # recover the parity of the representative of 2x in the lattice
            two_x = 2 * mpc(x)
            n = int(mp.nint(two_x.imag / self.tau.imag))
            m = int(mp.nint((two_x - n * self.tau).real))
            return 1 if (m % 2 == 0 and n % 2 == 0) else -1

    # -- elliptic Gamma -----------------------------------------------------

    def _log_c(self):
        """Principal log of C = -prod_{j>=1}(1-e(j tau))^2, cached per context."""
        hit = self._log_c_cache.get("logc")
        if hit is not None:
            return hit
        with mp.workprec(self._wp):
            p = self.e(self.tau)
            prod = mpc(1)
            pj = p
            while abs(pj) > self._cutoff:
                prod *= (1 - pj) ** 2
                pj *= p
            val = mp.log(-prod)
            self._log_c_cache["logc"] = val
            self._log_c_cache["pp2"] = prod  # (p;p)_inf^2
            return val

    def _pp2(self):
        self._log_c()
        return self._log_c_cache["pp2"]

    def gamma(self, z, q):
        """The elliptic Gamma symbol gamma_q(z; tau) (principal-branch prefactor).

        Satisfies gamma(q+z) = theta(z) gamma(z).  Requires Im(q) above the
        modulus threshold.
        """
        k = (_key(z), _key(q))
        hit = self._gamma_cache.get(k)
        if hit is not None:
            return hit
        with mp.workprec(self._wp):
            z = mpc(z)
            q = mpc(q)
            if q.imag < MIN_IM:
                raise ModulusError("Im(q) = %s below threshold %s" % (q.imag, MIN_IM))
            logc = self._log_c()
            pref = mp.exp(-(z / q) * logc) * self.e(-z * (z - q) / (4 * q))
            val = pref * self._gamma_std(z, q)
        with self._lock:
            self._gamma_cache[k] = val
        return val

    def _gamma_std(self, z, q):
        """prod_{j,k>=0} (1-e((j+1)tau+(k+1)q-z)) / (1-e(j tau+k q+z)).

        Computed by shifting z along q into the annulus where the standard
        log-series converges fast, then correcting with theta factors.
        """
        im_target = (self.tau.imag + q.imag) / 2
        k = int(mp.nint((z.imag - im_target) / q.imag))
        z0 = z - k * q
        val = self._gamma_std_series(z0, q)
        pp2 = self._pp2()
        if k > 0:
            for j in range(k):
                arg = z0 + j * q
                val *= -self.e(arg / 2) * pp2 * self.theta(arg)
        elif k < 0:
            for j in range(k, 0):
                arg = z0 + j * q
                val /= -self.e(arg / 2) * pp2 * self.theta(arg)
        return val

    def _gamma_std_series(self, z, q):
        # log Gamma_std = sum_{m>=1} (x^m - (pQ/x)^m) / (m (1-p^m)(1-Q^m))
        x = self.e(z)
        p = self.e(self.tau)
        Q = self.e(q)
        y = p * Q / x
        total = mpc(0)
        xm, ym, pm, Qm = x, y, p, Q
        m = 1
        while True:
            term = (xm - ym) / (m * (1 - pm) * (1 - Qm))
            total += term
            if (abs(xm) + abs(ym)) < self._cutoff:
                break
            m += 1
            xm *= x
            ym *= y
            pm *= p
            Qm *= Q
            if m > 50000:
                raise PrecisionError("Gamma series did not converge")
        return mp.exp(total)

    def gamma_double_product(self, z, q, max_terms=400):
        """Reference evaluation of the Gamma symbol by its raw double product."""
        with mp.workprec(self._wp):
            z = mpc(z)
            q = mpc(q)
            if q.imag < MIN_IM:
                raise ModulusError("Im(q) below threshold")
            logc = self._log_c()
            pref = mp.exp(-(z / q) * logc) * self.e(-z * (z - q) / (4 * q))
            p = self.e(self.tau)
            Q = self.e(q)
            x = self.e(z)
            val = mpc(1)
            for j in range(max_terms):
                pj = p ** j
                row = mpc(1)
                done_row = False
                for kk in range(max_terms):
                    Qk = Q ** kk
                    numer = 1 - pj * p * Qk * Q / x
                    denom = 1 - pj * Qk * x
                    row *= numer / denom
                    if abs(pj * Qk) * (abs(x) + 1 / abs(x)) < self._cutoff:
                        done_row = kk > 0
                        break
                val *= row
                if done_row and abs(pj) * (abs(x) + 1 / abs(x)) < self._cutoff:
                    break
            return pref * val


@dataclass(frozen=True)
class CurvePoint:
    """A point z on the analytic curve C/<1, tau>."""

    tau: object
    value: object

    def __post_init__(self):
        if mpc(self.tau).imag < MIN_IM:
            raise ModulusError("Im(tau) below threshold")

    def reduced(self, ctx=None):
        ctx = ctx or CurveContext(self.tau, 64)
        z0, _, _ = ctx.lattice_reduce(self.value)
        return CurvePoint(self.tau, z0)
