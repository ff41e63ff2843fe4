"""Truncated power series ("jets") around a fixed expansion point.

A jet holds the scaled derivatives f^(n)(center)/n!, which are exactly the
Taylor coefficients of f at the center. The same container supports a
finite number of negative powers (a truncated Laurent series), which is
what expanding an expression at a pole produces. Elementary functions
refuse arguments with a genuine principal part, so essential singularities
are rejected instead of silently mangled.

Window semantics: a jet knows the coefficients of (w - center)**e for
e = val .. val + len(c) - 1 and is exactly zero below val. Multiplication
and division shorten the window to what both operands support, so callers
needing K coefficients should create variables with some slack (see
``Jet.variable``).
"""

from __future__ import annotations

import numbers

import numpy as np

from .errors import DomainError

# relative threshold below which leading denominator coefficients count as zero
_TRIM_REL = 1e-12
# relative threshold below which principal-part residue counts as cancellation dust
_DUST_REL = 1e-9


class WindowError(RuntimeError):
    """Coefficient window exhausted; re-expand with more slack."""


class Jet:
    """Truncated (Laurent) series  sum_k c[k] * (w - center)**(val + k)."""

    __slots__ = ("center", "val", "c")

    def __init__(self, center, coeffs, val: int = 0):
        c = np.array(coeffs, dtype=complex)
        if c.ndim != 1 or c.size == 0:
            raise ValueError("a jet needs at least one coefficient")
        c.setflags(write=False)
        self.center = complex(center)
        self.val = int(val)
        self.c = c

    @classmethod
    def variable(cls, center, order: int) -> "Jet":
        """The identity function w, carrying order+1 coefficients."""
        c = np.zeros(order + 1, dtype=complex)
        c[0] = center
        if order >= 1:
            c[1] = 1.0
        return cls(center, c)

    # -- inspection ---------------------------------------------------------

    @property
    def high(self) -> int:
        """First exponent beyond the known window (exclusive)."""
        return self.val + len(self.c)

    @property
    def coeffs(self) -> np.ndarray:
        """Taylor coefficients c_0..c_K; only valid for val == 0 jets."""
        if self.val != 0:
            raise DomainError("jet has a shifted valuation; use coeff()")
        return self.c

    @property
    def order(self) -> int:
        return self.high - 1

    def coeff(self, e: int) -> complex:
        """Coefficient of (w - center)**e; exponents below val are zero."""
        if e < self.val:
            return 0j
        i = e - self.val
        if i >= len(self.c):
            raise WindowError(f"exponent {e} beyond window [{self.val}, {self.high})")
        return complex(self.c[i])

    def significant_val(self, rel: float = _DUST_REL):
        """Exponent of the first coefficient above the dust threshold, or None."""
        scale = float(np.max(np.abs(self.c)))
        if scale == 0.0:
            return None
        for i, x in enumerate(self.c):
            if abs(x) > rel * scale:
                return self.val + i
        return None

    def taylor_coeffs(self, upto: int) -> np.ndarray:
        """Coefficients for exponents 0..upto; rejects a significant principal part."""
        sig = self.significant_val()
        if sig is not None and sig < 0:
            raise DomainError("series has a principal part; not analytic at the center")
        if upto >= self.high:
            raise WindowError(f"need exponent {upto}, window ends at {self.high}")
        return np.array([self.coeff(e) for e in range(upto + 1)], dtype=complex)

    def eval_at(self, z) -> complex:
        dz = z - self.center
        acc = 0j
        for k in range(len(self.c) - 1, -1, -1):
            acc = acc * dz + self.c[k]
        return acc * dz ** self.val

    def __repr__(self):
        return f"Jet(center={self.center}, val={self.val}, c={self.c.tolist()})"

    # -- ring operations ----------------------------------------------------

    def _check_center(self, other: "Jet"):
        if other.center != self.center:
            raise ValueError("jets expanded at different centers")

    def __add__(self, other):
        if isinstance(other, Jet):
            self._check_center(other)
            v = min(self.val, other.val)
            h = min(self.high, other.high)
            if h <= v:
                raise WindowError("disjoint coefficient windows in addition")
            c = np.zeros(h - v, dtype=complex)
            for jet in (self, other):
                start = jet.val - v
                take = min(len(jet.c), h - jet.val)
                if take > 0:
                    c[start:start + take] += jet.c[:take]
            return Jet(self.center, c, v)
        if isinstance(other, numbers.Number):
            if other == 0:
                return self
            v = min(self.val, 0)
            h = self.high
            if h <= 0:
                raise WindowError("window too short to add a constant")
            c = np.zeros(h - v, dtype=complex)
            c[self.val - v:] += self.c
            c[-v] += complex(other)
            return Jet(self.center, c, v)
        return NotImplemented

    __radd__ = __add__

    def __neg__(self):
        return Jet(self.center, -self.c, self.val)

    def __sub__(self, other):
        return self + (-other if isinstance(other, Jet) else -complex(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, Jet):
            self._check_center(other)
            n = min(len(self.c), len(other.c))
            c = np.convolve(self.c, other.c)[:n]
            return Jet(self.center, c, self.val + other.val)
        if isinstance(other, numbers.Number):
            return Jet(self.center, self.c * complex(other), self.val)
        return NotImplemented

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, Jet):
            self._check_center(other)
            scale = float(np.max(np.abs(other.c)))
            if scale == 0.0:
                raise DomainError("division by an identically zero series")
            d = 0
            while abs(other.c[d]) <= _TRIM_REL * scale:
                d += 1
            den = other.c[d:]
            n = min(len(self.c), len(den))
            if n <= 0:
                raise WindowError("window exhausted in series division")
            q = np.zeros(n, dtype=complex)
            for k in range(n):
                acc = self.c[k]
                for i in range(k):
                    acc -= q[i] * den[k - i]
                q[k] = acc / den[0]
            return Jet(self.center, q, self.val - other.val - d)
        if isinstance(other, numbers.Number):
            return Jet(self.center, self.c / complex(other), self.val)
        return NotImplemented

    def __rtruediv__(self, other):
        # a scalar numerator is known at every exponent; give it a window
        # wide enough not to constrain the quotient
        num = np.zeros(len(self.c), dtype=complex)
        num[0] = complex(other)
        return Jet(self.center, num) / self

    def __pow__(self, e):
        if isinstance(e, numbers.Real) and float(e).is_integer():
            e = int(e)
            if e == 0:
                c = np.zeros(len(self.c), dtype=complex)
                c[0] = 1.0
                return Jet(self.center, c)
            base = self if e > 0 else 1.0 / self
            k, acc = abs(e), None
            while k:
                if k & 1:
                    acc = base if acc is None else acc * base
                base, k = (base * base, k >> 1) if k > 1 else (base, 0)
            return acc
        # fractional real exponent through the principal branch
        return (self.log() * complex(e)).exp()

    # -- elementary functions -----------------------------------------------

    def _taylor_part(self) -> np.ndarray:
        """Coefficient array from exponent 0, rejecting significant negative terms."""
        if self.val > 0:
            return np.concatenate([np.zeros(self.val, dtype=complex), self.c])
        if self.val == 0:
            return self.c.copy()
        head = self.c[: -self.val]
        scale = float(np.max(np.abs(self.c)))
        if scale and np.max(np.abs(head)) > _DUST_REL * scale:
            raise DomainError("series has a pole at the center; not analytic there")
        return self.c[-self.val:].copy()

    def exp(self):
        g = self._taylor_part()
        n = len(g)
        h = np.zeros(n, dtype=complex)
        h[0] = np.exp(g[0])
        for k in range(1, n):
            acc = 0j
            for i in range(1, k + 1):
                acc += i * g[i] * h[k - i]
            h[k] = acc / k
        return Jet(self.center, h)

    def log(self):
        g = self._taylor_part()
        scale = float(np.max(np.abs(g)))
        if scale == 0.0 or abs(g[0]) <= _DUST_REL * scale:
            raise DomainError("log of a series vanishing at the center (branch point)")
        n = len(g)
        h = np.zeros(n, dtype=complex)
        h[0] = np.log(g[0] + 0j)
        for k in range(1, n):
            acc = k * g[k]
            for i in range(1, k):
                acc -= i * h[i] * g[k - i]
            h[k] = acc / (k * g[0])
        return Jet(self.center, h)

    def sqrt(self):
        g = self._taylor_part()
        scale = float(np.max(np.abs(g)))
        if scale == 0.0 or abs(g[0]) <= _DUST_REL * scale:
            raise DomainError("sqrt of a series vanishing at the center (branch point)")
        n = len(g)
        h = np.zeros(n, dtype=complex)
        h[0] = np.sqrt(g[0] + 0j)
        for k in range(1, n):
            acc = g[k]
            for i in range(1, k):
                acc -= h[i] * h[k - i]
            h[k] = acc / (2.0 * h[0])
        return Jet(self.center, h)

    def _sincos(self):
        g = self._taylor_part()
        n = len(g)
        s = np.zeros(n, dtype=complex)
        c = np.zeros(n, dtype=complex)
        s[0], c[0] = np.sin(g[0] + 0j), np.cos(g[0] + 0j)
        for k in range(1, n):
            sa = ca = 0j
            for i in range(1, k + 1):
                sa += i * g[i] * c[k - i]
                ca += i * g[i] * s[k - i]
            s[k] = sa / k
            c[k] = -ca / k
        return Jet(self.center, s), Jet(self.center, c)

    def sin(self):
        return self._sincos()[0]

    def cos(self):
        return self._sincos()[1]
