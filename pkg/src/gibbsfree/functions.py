"""Piecewise-smooth test functions, jump sets and Fourier coefficients.

Functions are 2*pi periodic and described on the canonical interval
(-pi, pi] as a sorted list of pieces. Each piece lives on a half-open
interval (a, b] and is a sum of elementary terms whose products with
exp(-ikx) have closed-form antiderivatives:

========  ==========================================  =====================
kind      value                                        parameters
========  ==========================================  =====================
poly      c0 + c1 x + c2 x**2 + ...                    coeffs (ascending)
exp       scale * exp(rate * x)                        scale, rate
sin       amplitude * sin(freq * x + phase)            amplitude, freq, phase
zero      0
========  ==========================================  =====================

Two independent routes to the coefficients are provided:
:func:`fourier_coeffs_exact` (closed form) and
:func:`fourier_coeffs_quadrature` (per-piece Gauss-Legendre).
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial import polynomial as P
from scipy.special import j1

from .errors import InsufficientNodes, ShapeOutOfDomain, UnsupportedPiece

PI = np.pi
TWO_PI = 2.0 * np.pi

# relative tolerance under which two one-sided limits count as equal
JUMP_TOL = 1e-12


def wrap(x):
    """Map ``x`` onto the canonical period (-pi, pi]."""
    x = np.asarray(x, dtype=float)
    return x - TWO_PI * np.ceil((x - PI) / TWO_PI)


def circular_distance(x, y):
    d = np.abs(wrap(np.asarray(x, dtype=float) - np.asarray(y, dtype=float)))
    return d


# ---------------------------------------------------------------------------
# elementary terms
# ---------------------------------------------------------------------------

_KINDS = ("poly", "exp", "sin", "zero")


@dataclass(frozen=True)
class Term:
    """One elementary summand of a piece."""

    kind: str
    params: tuple = ()

    def __post_init__(self):
        if self.kind not in _KINDS:
            raise UnsupportedPiece(f"unknown piece kind {self.kind!r}")
        object.__setattr__(self, "params", tuple(float(p) for p in self.params))
        expected = {"exp": 2, "sin": 3, "zero": 0}
        if self.kind in expected and len(self.params) != expected[self.kind]:
            raise UnsupportedPiece(f"{self.kind} term takes {expected[self.kind]} parameters")

    @classmethod
    def poly(cls, *coeffs):
        return cls("poly", tuple(coeffs) or (0.0,))

    @classmethod
    def exp(cls, scale, rate):
        return cls("exp", (scale, rate))

    @classmethod
    def sin(cls, amplitude, freq, phase=0.0):
        return cls("sin", (amplitude, freq, phase))

    @classmethod
    def zero(cls):
        return cls("zero")

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        if self.kind == "poly":
            return P.polyval(x, self.params)
        if self.kind == "exp":
            scale, rate = self.params
            return scale * np.exp(rate * x)
        if self.kind == "sin":
            amp, freq, phase = self.params
            return amp * np.sin(freq * x + phase)
        return np.zeros_like(x)

    def integral(self, a, b, k):
        """Return ``int_a^b term(x) exp(-i k x) dx`` for integer array ``k``."""
        k = np.asarray(k, dtype=float)
        if self.kind == "zero":
            return np.zeros(k.shape, dtype=complex)
        if self.kind == "exp":
            scale, rate = self.params
            return scale * _int_exp(rate - 1j * k, a, b)
        if self.kind == "sin":
            amp, freq, phase = self.params
            up = np.exp(1j * phase) * _int_exp(1j * (freq - k), a, b)
            down = np.exp(-1j * phase) * _int_exp(-1j * (freq + k), a, b)
            return amp * (up - down) / 2j
        return _int_poly(np.asarray(self.params), a, b, k)

    def to_json(self):
        if self.kind == "poly":
            return {"kind": "poly", "coeffs": list(self.params)}
        if self.kind == "exp":
            return {"kind": "exp", "scale": self.params[0], "rate": self.params[1]}
        if self.kind == "sin":
            amp, freq, phase = self.params
            return {"kind": "sin", "amplitude": amp, "freq": freq, "phase": phase}
        return {"kind": "zero"}

    @classmethod
    def from_json(cls, doc):
        kind = doc.get("kind")
        if kind == "poly":
            return cls.poly(*doc["coeffs"])
        if kind == "exp":
            return cls.exp(doc["scale"], doc["rate"])
        if kind == "sin":
            return cls.sin(doc["amplitude"], doc["freq"], doc.get("phase", 0.0))
        if kind == "zero":
            return cls.zero()
        raise UnsupportedPiece(f"unknown piece kind {kind!r}")


def _int_exp(z, a, b):
    """``int_a^b exp(z x) dx`` for complex array ``z``, stable near z = 0."""
    z = np.asarray(z, dtype=complex)
    half = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    u = z * half
    small = np.abs(u) < 1e-4
    safe = np.where(small, 1.0, u)
    shc = np.where(small, 1.0 + u * u / 6.0, np.sinh(safe) / safe)
    return np.exp(z * mid) * (b - a) * shc


def _int_poly(c, a, b, k):
    # integration by parts until the polynomial is exhausted:
    # int p e^{-ikx} = -e^{-ikx} sum_m p^(m)(x) / (ik)^(m+1)
    out = np.empty(k.shape, dtype=complex)
    zero = k == 0
    if np.any(zero):
        anti = P.polyint(c)
        out[zero] = P.polyval(b, anti) - P.polyval(a, anti)
    kk = k[~zero]
    if kk.size:
        ik = 1j * kk
        acc_b = np.zeros(kk.shape, dtype=complex)
        acc_a = np.zeros(kk.shape, dtype=complex)
        deriv = c
        power = ik
        while deriv.size and np.any(deriv != 0):
            acc_b += P.polyval(b, deriv) / power
            acc_a += P.polyval(a, deriv) / power
            deriv = P.polyder(deriv)
            power = power * ik
        out[~zero] = -(np.exp(-ik * b) * acc_b - np.exp(-ik * a) * acc_a)
    return out


# ---------------------------------------------------------------------------
# piecewise functions
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Piece:
    a: float
    b: float
    terms: tuple = (Term.zero(),)

    def __post_init__(self):
        object.__setattr__(self, "a", float(self.a))
        object.__setattr__(self, "b", float(self.b))
        object.__setattr__(self, "terms", tuple(self.terms))

    def __call__(self, x):
        x = np.asarray(x, dtype=float)
        out = np.zeros_like(x)
        for t in self.terms:
            out = out + t(x)
        return out

    def integral(self, k):
        k = np.asarray(k)
        out = np.zeros(k.shape, dtype=complex)
        for t in self.terms:
            out += t.integral(self.a, self.b, k)
        return out

    def to_json(self):
        doc = {"interval": [self.a, self.b]}
        if len(self.terms) == 1:
            doc.update(self.terms[0].to_json())
        else:
            doc["kind"] = "sum"
            doc["terms"] = [t.to_json() for t in self.terms]
        return doc

    @classmethod
    def from_json(cls, doc):
        a, b = doc["interval"]
        if doc.get("kind") == "sum":
            terms = tuple(Term.from_json(t) for t in doc["terms"])
        else:
            terms = (Term.from_json(doc),)
        return cls(a, b, terms)


@dataclass(frozen=True)
class PiecewiseFnSpec:
    """A 2*pi-periodic piecewise-smooth function on (-pi, pi].

    Parameters
    ----------
    pieces : sequence of Piece
        Sorted, contiguous pieces whose union is (-pi, pi].
    name : str, optional
        Label used in tables and plots.
    """

    pieces: tuple
    name: str = ""

    def __post_init__(self):
        pieces = tuple(self.pieces)
        if not pieces:
            raise ValueError("a function needs at least one piece")
        if not np.isclose(pieces[0].a, -PI, rtol=0, atol=1e-14):
            raise ValueError("first piece must start at -pi")
        if not np.isclose(pieces[-1].b, PI, rtol=0, atol=1e-14):
            raise ValueError("last piece must end at pi")
        for left, right in zip(pieces, pieces[1:]):
            if left.b != right.a:
                raise ValueError("pieces must be contiguous")
        for p in pieces:
            if not p.a < p.b:
                raise ValueError("piece intervals must be non-empty")
        object.__setattr__(self, "pieces", pieces)

    @property
    def breakpoints(self):
        """Right ends of all pieces; the last one is pi."""
        return np.array([p.b for p in self.pieces])

    def __call__(self, x, side="average"):
        return eval_piecewise(self, x, side)

    def to_json(self):
        return json.dumps({"pieces": [p.to_json() for p in self.pieces]})

    @classmethod
    def from_json(cls, text, name=""):
        doc = json.loads(text)
        return cls(tuple(Piece.from_json(p) for p in doc["pieces"]), name=name)


def eval_piecewise(spec, x, side="average"):
    """Evaluate a piecewise function with an explicit convention at breakpoints.

    Parameters
    ----------
    spec : PiecewiseFnSpec
    x : float or array_like
        Points in radians; wrapped onto (-pi, pi] first.
    side : {"left", "right", "average"}
        Which one-sided limit to return. ``"average"`` gives
        ``(f(x-) + f(x+)) / 2``, the limit of the Fourier partial sums.

    Returns
    -------
    float or ndarray
    """
    if side not in ("left", "right", "average"):
        raise ValueError(f"unknown side {side!r}")
    scalar = np.ndim(x) == 0
    xw = np.atleast_1d(wrap(x))
    if side == "average":
        out = 0.5 * (_eval_side(spec, xw, "left") + _eval_side(spec, xw, "right"))
    else:
        out = _eval_side(spec, xw, side)
    return float(out[0]) if scalar else out


def _eval_side(spec, x, side):
    breaks = spec.breakpoints
    n = len(spec.pieces)
    if side == "right":
        idx = np.searchsorted(breaks, x, side="right")
        x = np.where(idx == n, -PI, x)
        idx = np.where(idx == n, 0, idx)
    else:
        idx = np.minimum(np.searchsorted(breaks, x, side="left"), n - 1)
    out = np.empty_like(x)
    for i, piece in enumerate(spec.pieces):
        sel = idx == i
        if np.any(sel):
            out[sel] = piece(x[sel])
    return out


# ---------------------------------------------------------------------------
# jump sets
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class JumpSet:
    """Jump locations in (-pi, pi] with their (nonzero) heights, sorted."""

    locations: np.ndarray = field(default_factory=lambda: np.zeros(0))
    heights: np.ndarray = field(default_factory=lambda: np.zeros(0))

    def __post_init__(self):
        loc = np.array(self.locations, dtype=float).reshape(-1)
        hgt = np.array(self.heights, dtype=float).reshape(-1)
        if loc.shape != hgt.shape:
            raise ValueError("locations and heights differ in length")
        loc = wrap(loc)
        order = np.argsort(loc, kind="stable")
        loc, hgt = loc[order], hgt[order]
        if loc.size > 1 and np.any(np.diff(loc) <= 0):
            raise ValueError("jump locations must be distinct")
        if np.any(hgt == 0):
            raise ValueError("jump heights must be nonzero")
        loc.flags.writeable = False
        hgt.flags.writeable = False
        object.__setattr__(self, "locations", loc)
        object.__setattr__(self, "heights", hgt)

    @classmethod
    def from_pairs(cls, pairs):
        pairs = list(pairs)
        if not pairs:
            return cls()
        loc, hgt = zip(*pairs)
        return cls(np.array(loc), np.array(hgt))

    def __len__(self):
        return self.locations.size

    def __iter__(self):
        return iter(zip(self.locations.tolist(), self.heights.tolist()))

    def __eq__(self, other):
        if not isinstance(other, JumpSet):
            return NotImplemented
        return np.array_equal(self.locations, other.locations) and np.array_equal(
            self.heights, other.heights
        )

    def __repr__(self):
        body = ", ".join(f"({x:.6g}, {a:.6g})" for x, a in self)
        return f"JumpSet([{body}])"

    def shifted(self, s):
        return JumpSet(self.locations + s, self.heights)

    def scaled(self, lam):
        return JumpSet(self.locations, lam * self.heights)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["location", "height"])
        for x, a in self:
            w.writerow([repr(x), repr(a)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        return cls.from_pairs((float(r["location"]), float(r["height"])) for r in rows)


def jump_set_of(spec):
    """Return the jumps ``f(x+) - f(x-)`` of ``spec`` at its breakpoints.

    Breakpoints where both one-sided limits agree are dropped. A mismatch
    between ``f(pi-)`` and ``f(-pi+)`` is reported as a jump at pi.
    """
    pairs = []
    pieces = spec.pieces
    for i, piece in enumerate(pieces):
        left = float(piece(piece.b))
        if i + 1 < len(pieces):
            right = float(pieces[i + 1](piece.b))
        else:
            right = float(pieces[0](-PI))
        height = right - left
        if abs(height) > JUMP_TOL * (1.0 + abs(left) + abs(right)):
            pairs.append((piece.b, height))
    return JumpSet.from_pairs(pairs)


def ramp_sum_spec(jumps, name="ramp-sum"):
    """Build the piecewise-linear function ``sum_j a_j r_j(x)`` for a jump set.

    On the piece between consecutive jumps the value is
    ``(sum_{x_i < x} a_i - sum_{x_i > x} a_i) / 2 - x * sum(a) / (2 pi)``.
    """
    loc = jumps.locations
    hgt = jumps.heights
    total = float(hgt.sum())
    slope = -total / TWO_PI
    breaks = [x for x in loc.tolist() if x < PI] + [PI]
    pieces = []
    a = -PI
    for m, b in enumerate(breaks):
        # jumps strictly left of this piece are the first m entries
        const = 0.5 * (hgt[:m].sum() - hgt[m:].sum())
        pieces.append(Piece(a, b, (Term.poly(const, slope),)))
        a = b
    return PiecewiseFnSpec(tuple(pieces), name=name)


# ---------------------------------------------------------------------------
# spectra
# ---------------------------------------------------------------------------


@dataclass(frozen=True, eq=False)
class Spectrum1D:
    """Fourier coefficients ``c_k`` for ``k = -N..N`` stored densely at ``k + N``.

    ``noisy`` marks spectra carrying measurement noise; reconstructions then
    downgrade the realness guard to a warning.
    """

    coeffs: np.ndarray
    noisy: bool = False

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex).reshape(-1)
        if c.size % 2 != 1 or c.size < 3:
            raise ValueError("a spectrum needs 2N+1 coefficients with N >= 1")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @classmethod
    def zeros(cls, N):
        return cls(np.zeros(2 * N + 1, dtype=complex))

    @property
    def N(self):
        return (self.coeffs.size - 1) // 2

    @property
    def k(self):
        return np.arange(-self.N, self.N + 1)

    def coeff(self, k):
        k = np.asarray(k)
        if np.any(np.abs(k) > self.N):
            raise IndexError("index outside the band")
        return self.coeffs[k + self.N]

    def positive(self):
        """Coefficients for ``k = 1..N``."""
        return self.coeffs[self.N + 1 :]

    def truncated(self, N):
        if N > self.N:
            raise ValueError("cannot extend a spectrum by truncation")
        return Spectrum1D(self.coeffs[self.N - N : self.N + N + 1], noisy=self.noisy)

    def shifted(self, s):
        """Spectrum of ``x -> f(x - s)``."""
        return Spectrum1D(self.coeffs * np.exp(-1j * self.k * s), noisy=self.noisy)

    def __add__(self, other):
        if not isinstance(other, Spectrum1D) or other.N != self.N:
            return NotImplemented
        return Spectrum1D(self.coeffs + other.coeffs, noisy=self.noisy or other.noisy)

    def __sub__(self, other):
        if not isinstance(other, Spectrum1D) or other.N != self.N:
            return NotImplemented
        return Spectrum1D(self.coeffs - other.coeffs, noisy=self.noisy or other.noisy)

    def __mul__(self, lam):
        return Spectrum1D(self.coeffs * lam, noisy=self.noisy)

    __rmul__ = __mul__

    def symmetry_defect(self):
        """Largest relative violation of ``c_{-k} = conj(c_k)``."""
        c = self.coeffs
        scale = max(np.max(np.abs(c)), np.finfo(float).tiny)
        return float(np.max(np.abs(c[::-1] - np.conj(c))) / scale)

    def is_conjugate_symmetric(self, rtol=1e-12):
        return self.symmetry_defect() <= rtol

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "re", "im"])
        for k, c in zip(self.k.tolist(), self.coeffs.tolist()):
            w.writerow([k, repr(c.real), repr(c.imag)])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        ks = np.array([int(r["k"]) for r in rows])
        if ks.size == 0 or not np.array_equal(ks, np.arange(ks[0], ks[0] + ks.size)) or ks[0] != -ks[-1]:
            raise ValueError("spectrum CSV must list k = -N..N ascending")
        vals = np.array([complex(float(r["re"]), float(r["im"])) for r in rows])
        return cls(vals)


def fourier_coeffs_exact(spec, N):
    """Closed-form coefficients ``(1/2pi) int f(x) exp(-ikx) dx`` for ``|k| <= N``."""
    if N < 1:
        raise ValueError("band limit must be positive")
    k = np.arange(-N, N + 1)
    total = np.zeros(k.shape, dtype=complex)
    for piece in spec.pieces:
        total += piece.integral(k)
    return Spectrum1D(total / TWO_PI)


def fourier_coeffs_quadrature(spec, N, nodes_per_piece=256):
    """Coefficients by Gauss-Legendre quadrature on each piece separately.

    Raises
    ------
    InsufficientNodes
        If ``nodes_per_piece`` is below 32 or below ``4N/pi``.
    """
    if N < 1:
        raise ValueError("band limit must be positive")
    if nodes_per_piece < 32 or nodes_per_piece < 4 * N / PI:
        raise InsufficientNodes(
            f"{nodes_per_piece} nodes per piece cannot resolve band limit {N}"
        )
    t, w = np.polynomial.legendre.leggauss(int(nodes_per_piece))
    k = np.arange(-N, N + 1)
    total = np.zeros(k.shape, dtype=complex)
    for piece in spec.pieces:
        half = 0.5 * (piece.b - piece.a)
        x = piece.a + half * (t + 1.0)
        fx = piece(x) * (w * half)
        total += np.exp(-1j * np.outer(k, x)) @ fx
    return Spectrum1D(total / TWO_PI)


def ramp_spectrum(jumps, N, include_mean=True):
    """Coefficients of the ramp sum ``sum_j a_j r_j``.

    ``sum_j a_j exp(-ikx_j) / (2 pi i k)`` for ``k != 0``. The ramp with its
    jump at ``x_j`` has mean ``-x_j / (2 pi)``, so the exact ``k = 0`` entry is
    ``-sum_j a_j x_j / (2 pi)``; ``include_mean=False`` zeroes it instead.
    """
    k = np.arange(-N, N + 1)
    c = np.zeros(k.shape, dtype=complex)
    nz = k != 0
    if len(jumps):
        phase = np.exp(-1j * np.outer(k[nz], jumps.locations))
        c[nz] = (phase @ jumps.heights) / (TWO_PI * 1j * k[nz])
        if include_mean:
            c[N] = -float(jumps.heights @ jumps.locations) / TWO_PI
    return Spectrum1D(c)


# ---------------------------------------------------------------------------
# corpus
# ---------------------------------------------------------------------------


def function_h():
    """Six-jump test function: two flat steps, a sloped sinusoid and a ramp."""
    pieces = (
        Piece(-PI, -3 * PI / 4),
        Piece(-3 * PI / 4, -PI / 2, (Term.poly(1.5),)),
        Piece(-PI / 2, -PI / 4),
        Piece(-PI / 4, PI / 8, (Term.poly(7 / 4, -1 / 2), Term.sin(1.0, 1.0, -1 / 4))),
        Piece(PI / 8, 3 * PI / 8),
        Piece(3 * PI / 8, 3 * PI / 4, (Term.poly(-5.0, 11 / 4),)),
        Piece(3 * PI / 4, PI),
    )
    return PiecewiseFnSpec(pieces, name="h")


def function_s():
    """Three-jump test function ``x^2 | exp(x+3) | e^4 x`` with a jump at pi."""
    pieces = (
        Piece(-PI, -PI / 2, (Term.poly(0.0, 0.0, 1.0),)),
        Piece(-PI / 2, PI / 2, (Term.exp(np.exp(3.0), 1.0),)),
        Piece(PI / 2, PI, (Term.poly(0.0, np.exp(4.0)),)),
    )
    return PiecewiseFnSpec(pieces, name="s")


def zero_function():
    return PiecewiseFnSpec((Piece(-PI, PI),), name="zero")


def smooth_function():
    """``sin(x) + cos(2x)`` on a single piece, a continuous periodic function."""
    return PiecewiseFnSpec(
        (Piece(-PI, PI, (Term.sin(1.0, 1.0), Term.sin(1.0, 2.0, PI / 2))),), name="smooth"
    )


CORPUS = {
    "h": function_h,
    "s": function_s,
    "zero": zero_function,
    "smooth": smooth_function,
}


def get_function(name):
    try:
        return CORPUS[name]()
    except KeyError:
        raise KeyError(f"unknown function {name!r}; choose from {sorted(CORPUS)}") from None


# ---------------------------------------------------------------------------
# two-dimensional shapes
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class Box:
    """Weighted indicator of ``[x0, x1] x [y0, y1]``."""

    x0: float
    x1: float
    y0: float
    y1: float
    weight: float = 1.0

    def check(self):
        for lo, hi in ((self.x0, self.x1), (self.y0, self.y1)):
            if not (-PI < lo < hi <= PI):
                raise ShapeOutOfDomain(f"box {self} leaves (-pi, pi]^2")

    def __call__(self, x, y):
        return self.weight * _edge_indicator(x, self.x0, self.x1) * _edge_indicator(
            y, self.y0, self.y1
        )


@dataclass(frozen=True)
class Disc:
    """Weighted indicator of the closed disc of radius ``R`` about ``(a, b)``."""

    a: float
    b: float
    R: float
    weight: float = 1.0

    def check(self):
        if self.R <= 0:
            raise ShapeOutOfDomain("disc radius must be positive")
        for c in (self.a, self.b):
            if not (-PI < c - self.R and c + self.R < PI):
                raise ShapeOutOfDomain(f"disc {self} leaves (-pi, pi)^2")

    def __call__(self, x, y):
        r2 = (np.asarray(x) - self.a) ** 2 + (np.asarray(y) - self.b) ** 2
        R2 = self.R**2
        return self.weight * np.where(r2 < R2, 1.0, np.where(r2 == R2, 0.5, 0.0))


def _edge_indicator(t, lo, hi):
    t = np.asarray(t, dtype=float)
    inside = (t > lo) & (t < hi)
    edge = (t == lo) | (t == hi)
    return np.where(inside, 1.0, np.where(edge, 0.5, 0.0))


@dataclass(frozen=True)
class Composite:
    """Sum of weighted boxes and discs."""

    shapes: tuple

    def check(self):
        for s in self.shapes:
            s.check()

    def __call__(self, x, y):
        return sum(s(x, y) for s in self.shapes)


def function_f1():
    return Box(-1.0, 1.0, -1.0, 1.0)


def function_f2():
    return Composite(
        (
            Box(-9 / 4, -1 / 4, -5 / 2, -1 / 2, 0.75),
            Disc(1 / 2, 1.0, 1.0, 0.50),
            Disc(5 / 4, -5 / 4, 1 / 2, 0.35),
        )
    )


SHAPES_2D = {"f1": function_f1, "f2": function_f2}


@dataclass(frozen=True, eq=False)
class Spectrum2D:
    """Coefficients ``c[k + N, l + N]`` for ``|k|, |l| <= N``; ``k`` pairs with x."""

    coeffs: np.ndarray

    def __post_init__(self):
        c = np.array(self.coeffs, dtype=complex)
        if c.ndim != 2 or c.shape[0] != c.shape[1] or c.shape[0] % 2 != 1:
            raise ValueError("2D spectrum must be (2N+1, 2N+1)")
        c.flags.writeable = False
        object.__setattr__(self, "coeffs", c)

    @property
    def N(self):
        return (self.coeffs.shape[0] - 1) // 2

    @property
    def k(self):
        return np.arange(-self.N, self.N + 1)

    def coeff(self, k, l):
        return self.coeffs[k + self.N, l + self.N]

    def symmetry_defect(self):
        c = self.coeffs
        scale = max(np.max(np.abs(c)), np.finfo(float).tiny)
        return float(np.max(np.abs(c[::-1, ::-1] - np.conj(c))) / scale)

    def to_csv(self):
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["k", "l", "re", "im"])
        ks = self.k.tolist()
        for i, k in enumerate(ks):
            for j, l in enumerate(ks):
                c = self.coeffs[i, j]
                w.writerow([k, l, repr(float(c.real)), repr(float(c.imag))])
        return buf.getvalue()

    @classmethod
    def from_csv(cls, text):
        rows = list(csv.DictReader(io.StringIO(text)))
        n = int(round(np.sqrt(len(rows))))
        if n * n != len(rows) or n % 2 != 1:
            raise ValueError("2D spectrum CSV must hold (2N+1)^2 rows")
        N = (n - 1) // 2
        c = np.zeros((n, n), dtype=complex)
        for r in rows:
            c[int(r["k"]) + N, int(r["l"]) + N] = complex(float(r["re"]), float(r["im"]))
        return cls(c)


def _box_factor(lo, hi, k):
    # (1/2pi) int_lo^hi exp(-ikt) dt
    return _int_exp(-1j * np.asarray(k, dtype=float), lo, hi) / TWO_PI


def fourier_coeffs_2d_exact(shape, N):
    """Closed-form 2D coefficients of a box, disc or composite of them.

    A box factorizes into two 1D integrals. A disc of radius ``R`` centred at
    ``(a, b)`` has ``exp(-i(ka + lb)) R J1(qR) / (2 pi q)`` with
    ``q = sqrt(k^2 + l^2)`` and ``R^2 / (4 pi)`` at ``q = 0``.
    """
    shape.check()
    if isinstance(shape, Composite):
        total = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        for s in shape.shapes:
            total += fourier_coeffs_2d_exact(s, N).coeffs
        return Spectrum2D(total)
    k = np.arange(-N, N + 1)
    if isinstance(shape, Box):
        c = np.outer(_box_factor(shape.x0, shape.x1, k), _box_factor(shape.y0, shape.y1, k))
        return Spectrum2D(shape.weight * c)
    if isinstance(shape, Disc):
        K, L = np.meshgrid(k, k, indexing="ij")
        q = np.hypot(K, L)
        qs = np.where(q == 0, 1.0, q)
        radial = np.where(q == 0, shape.R**2 / (4 * PI), shape.R * j1(qs * shape.R) / (TWO_PI * qs))
        phase = np.exp(-1j * (K * shape.a + L * shape.b))
        return Spectrum2D(shape.weight * phase * radial)
    raise TypeError(f"unsupported shape {shape!r}")


def fourier_coeffs_2d_quadrature(shape, N, nodes=128):
    """Quadrature route to the 2D coefficients, independent of the Bessel formula.

    Boxes use a tensor Gauss-Legendre rule on the box itself. Discs integrate
    the chord analytically in y and use Gauss-Legendre in the angle
    ``x = a + R sin(theta)``, which removes the square-root endpoint behaviour.
    """
    shape.check()
    if isinstance(shape, Composite):
        total = np.zeros((2 * N + 1, 2 * N + 1), dtype=complex)
        for s in shape.shapes:
            total += fourier_coeffs_2d_quadrature(s, N, nodes).coeffs
        return Spectrum2D(total)
    t, w = np.polynomial.legendre.leggauss(nodes)
    k = np.arange(-N, N + 1)
    if isinstance(shape, Box):
        hx = 0.5 * (shape.x1 - shape.x0)
        hy = 0.5 * (shape.y1 - shape.y0)
        x = shape.x0 + hx * (t + 1)
        y = shape.y0 + hy * (t + 1)
        ex = np.exp(-1j * np.outer(k, x)) @ (w * hx)
        ey = np.exp(-1j * np.outer(k, y)) @ (w * hy)
        return Spectrum2D(shape.weight * np.outer(ex, ey) / (4 * PI**2))
    if isinstance(shape, Disc):
        theta = 0.5 * PI * t
        wt = 0.5 * PI * w
        x = shape.a + shape.R * np.sin(theta)
        half = shape.R * np.cos(theta)
        jac = shape.R * np.cos(theta) * wt
        ex = np.exp(-1j * np.outer(k, x)) * jac  # (k, node)
        # int_{b-h}^{b+h} exp(-ily) dy for every (l, node)
        ly = np.empty((k.size, x.size), dtype=complex)
        for j, l in enumerate(k):
            ly[j] = np.exp(-1j * l * shape.b) * 2.0 * half * np.sinc(l * half / PI)
        c = ex @ ly.T
        return Spectrum2D(shape.weight * c / (4 * PI**2))
    raise TypeError(f"unsupported shape {shape!r}")
