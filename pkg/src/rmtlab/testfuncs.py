"""Test functions for linear eigenvalue statistics.

Real-valued Laurent polynomials sum c_{a,b} z^a conj(z)^b with Hermitian
coefficient symmetry, and C^2 radial bump/window profiles built from the
quintic smoothstep, with analytic derivatives and Laplacians.
"""

import math

import numpy as np
from scipy.integrate import quad

__all__ = [
    "LaurentPolynomial",
    "RadialBump",
    "RadialWindow",
    "re_power",
    "im_power",
    "abs_power",
]

_SYMMETRY_TOL = 1e-12


class LaurentPolynomial:
    """f(z) = sum over (a, b) of c_{a,b} z^a conj(z)^b, real-valued on C.

    Reality is enforced through the Hermitian symmetry
    c_{b,a} = conj(c_{a,b}) at construction time.

    Parameters
    ----------
    terms : dict
        Map from (a, b) exponent pairs (nonnegative ints) to complex
        coefficients.  Exact-zero coefficients are dropped.
    """

    def __init__(self, terms):
        if isinstance(terms, LaurentPolynomial):
            terms = terms.terms
        clean = {}
        for key, c in dict(terms).items():
            a, b = key
            a, b = int(a), int(b)
            if a < 0 or b < 0:
                raise ValueError("exponents must be nonnegative")
            c = complex(c)
            if c != 0:
                clean[(a, b)] = clean.get((a, b), 0.0) + c
        for (a, b), c in clean.items():
            mirror = clean.get((b, a), 0.0)
            scale = max(1.0, abs(c))
            if abs(mirror - c.conjugate()) > _SYMMETRY_TOL * scale:
                raise ValueError(
                    f"coefficients break Hermitian symmetry at {(a, b)}: "
                    f"{c} vs {mirror}"
                )
        self.terms = clean

    @property
    def degree(self):
        """Largest total exponent a + b (0 for the zero polynomial)."""
        return max((a + b for a, b in self.terms), default=0)

    def evaluate(self, z):
        """Value at z (scalar or array); returns the real value."""
        z = np.asarray(z, dtype=np.complex128)
        out = np.zeros(z.shape, dtype=np.complex128)
        zc = np.conj(z)
        for (a, b), c in self.terms.items():
            out += c * z ** a * zc ** b
        re = out.real
        return float(re) if re.ndim == 0 else re

    def __mul__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        prod = {}
        for (a1, b1), c1 in self.terms.items():
            for (a2, b2), c2 in other.terms.items():
                key = (a1 + a2, b1 + b2)
                prod[key] = prod.get(key, 0.0) + c1 * c2
        return LaurentPolynomial(prod)

    def __add__(self, other):
        if not isinstance(other, LaurentPolynomial):
            return NotImplemented
        tot = dict(self.terms)
        for key, c in other.terms.items():
            tot[key] = tot.get(key, 0.0) + c
        return LaurentPolynomial(tot)

    def scaled(self, factor):
        """Polynomial with every coefficient multiplied by a real factor."""
        factor = float(factor)
        return LaurentPolynomial(
            {key: factor * c for key, c in self.terms.items()}
        )

    def power(self, p):
        """p-th pointwise power (p >= 1)."""
        p = int(p)
        if p < 1:
            raise ValueError("power must be >= 1")
        out = self
        for _ in range(p - 1):
            out = out * self
        return out

    def __repr__(self):
        inner = ", ".join(
            f"({a},{b}): {c:.6g}" for (a, b), c in sorted(self.terms.items())
        )
        return f"LaurentPolynomial({{{inner}}})"


def re_power(p, coeff=1.0):
    """coeff * Re z^p as a LaurentPolynomial."""
    p = int(p)
    if p == 0:
        return LaurentPolynomial({(0, 0): coeff})
    return LaurentPolynomial({(p, 0): 0.5 * coeff, (0, p): 0.5 * coeff})


def im_power(p, coeff=1.0):
    """coeff * Im z^p as a LaurentPolynomial."""
    p = int(p)
    if p == 0:
        return LaurentPolynomial({})
    return LaurentPolynomial({(p, 0): -0.5j * coeff, (0, p): 0.5j * coeff})


def abs_power(big_l, coeff=1.0):
    """coeff * |z|^{2L} as a LaurentPolynomial."""
    big_l = int(big_l)
    return LaurentPolynomial({(big_l, big_l): coeff})


def _smoothstep(u):
    return u * u * u * (10.0 + u * (-15.0 + 6.0 * u))


def _smoothstep_d1(u):
    return 30.0 * u * u * (u - 1.0) ** 2


def _smoothstep_d2(u):
    return 60.0 * u * (2.0 * u - 1.0) * (u - 1.0)


class RadialBump:
    """C^2 radial plateau bump supported on the annulus r1 <= |z| <= r2.

    The profile rises from 0 to 1 over [r1, r1+w] through the quintic
    smoothstep, stays at 1 on the plateau, and falls back over [r2-w, r2].
    First and second radial derivatives are analytic, so the Laplacian
    g'' + g'/r is exact.

    Parameters
    ----------
    r1, r2 : float
        Inner and outer support radii, 0 < r1 < r2.
    width : float, optional
        Transition width w on each side; defaults to (r2-r1)/3 and must
        leave a nonempty plateau (w <= (r2-r1)/2).
    """

    def __init__(self, r1, r2, width=None):
        r1, r2 = float(r1), float(r2)
        if not (0.0 < r1 < r2):
            raise ValueError("need 0 < r1 < r2")
        if width is None:
            width = (r2 - r1) / 3.0
        width = float(width)
        if not (0.0 < width <= (r2 - r1) / 2.0):
            raise ValueError("width must lie in (0, (r2-r1)/2]")
        self.r1, self.r2, self.width = r1, r2, width

    @property
    def support(self):
        return (self.r1, self.r2)

    def _piecewise(self, r, rise_fn, fall_fn, plateau_value):
        arr = np.asarray(r, dtype=np.float64)
        shape = arr.shape
        flat = np.atleast_1d(arr).ravel()
        out = np.zeros_like(flat)
        rising = (flat >= self.r1) & (flat < self.r1 + self.width)
        falling = (flat > self.r2 - self.width) & (flat <= self.r2)
        plateau = ((flat >= self.r1 + self.width)
                   & (flat <= self.r2 - self.width))
        out[rising] = rise_fn((flat[rising] - self.r1) / self.width)
        out[falling] = fall_fn((self.r2 - flat[falling]) / self.width)
        out[plateau] = plateau_value
        return out.reshape(shape)

    def profile(self, r):
        return self._piecewise(r, _smoothstep, _smoothstep, 1.0)

    def profile_d1(self, r):
        w = self.width
        return self._piecewise(
            r,
            lambda u: _smoothstep_d1(u) / w,
            lambda v: -_smoothstep_d1(v) / w,
            0.0,
        )

    def profile_d2(self, r):
        w2 = self.width ** 2
        return self._piecewise(
            r,
            lambda u: _smoothstep_d2(u) / w2,
            lambda v: _smoothstep_d2(v) / w2,
            0.0,
        )

    def evaluate(self, z):
        out = self.profile(np.abs(np.asarray(z, dtype=np.complex128)))
        return float(out) if out.ndim == 0 else out

    def laplacian(self, z):
        """Exact Laplacian g''(r) + g'(r)/r at r = |z| (zero off support)."""
        r = np.abs(np.asarray(z, dtype=np.complex128))
        out = self.profile_d2(r)
        mask = out != 0.0
        d1 = self.profile_d1(r)
        mask = mask | (d1 != 0.0)
        # r > 0 wherever the bump is nonzero because r1 > 0
        with np.errstate(divide="ignore", invalid="ignore"):
            contrib = np.where(mask, d1 / np.where(r > 0, r, 1.0), 0.0)
        out = out + contrib
        return float(out) if out.ndim == 0 else out

    def laplacian_abs_integral(self):
        """L1 norm of the Laplacian, 2 pi int |g'' + g'/r| r dr."""
        breaks = [self.r1, self.r1 + self.width,
                  self.r2 - self.width, self.r2]

        def integrand(r):
            d1 = float(self.profile_d1(r))
            d2 = float(self.profile_d2(r))
            return abs(d2 + d1 / r) * r

        val, _ = quad(integrand, self.r1, self.r2,
                      points=breaks, limit=200)
        return 2.0 * math.pi * val


class RadialWindow:
    """C^2 radial window: 1 near the origin, quintic falloff, 0 outside.

    The profile is 1 on [0, plateau_fraction * radius] and descends to 0
    at |z| = radius.  Used for smoothed counting statistics, where only
    values and the total mass are needed.
    """

    def __init__(self, radius, plateau_fraction=0.5):
        radius = float(radius)
        if radius <= 0:
            raise ValueError("radius must be positive")
        if not (0.0 <= plateau_fraction < 1.0):
            raise ValueError("plateau_fraction must lie in [0, 1)")
        self.radius = radius
        self.inner = plateau_fraction * radius

    def profile(self, r):
        arr = np.asarray(r, dtype=np.float64)
        shape = arr.shape
        flat = np.atleast_1d(arr).ravel()
        out = np.zeros_like(flat)
        out[flat <= self.inner] = 1.0
        fall = (flat > self.inner) & (flat < self.radius)
        v = (self.radius - flat[fall]) / (self.radius - self.inner)
        out[fall] = _smoothstep(v)
        return out.reshape(shape)

    def evaluate(self, z):
        out = self.profile(np.abs(np.asarray(z, dtype=np.complex128)))
        return float(out) if out.ndim == 0 else out

    def mass(self):
        """Total integral over the plane, 2 pi int_0^R g(r) r dr."""
        val, _ = quad(
            lambda r: float(self.profile(r)) * r,
            0.0, self.radius, points=[self.inner], limit=200,
        )
        return 2.0 * math.pi * val
