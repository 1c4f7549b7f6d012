"""Gamma and zeta functions, Planck-weighted integrals and adaptive quadrature.

The closed forms (``gamma_fn``, ``zeta_fn``, ``bose_integral``) and the
quadrature routines are deliberately independent code paths so that one can
be used to check the other.
"""
from __future__ import annotations

import enum
import heapq
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .constants import thermal_frequency
from .errors import ConvergenceError, DomainError


class BoseWeight(enum.Enum):
    OCCUPATION = "n"
    OCCUPATION_SQ_PLUS = "n2+n"
    OCCUPATION_DERIVATIVE = "dn/domega"


@dataclass(frozen=True)
class QuadratureResult:
    value: float
    abs_error_estimate: float
    evaluations: int


# ---------------------------------------------------------------------------
# Gamma: Lanczos approximation, g = 7, nine coefficients.
_LANCZOS_G = 7
_LANCZOS_COEF = (
    0.99999999999980993,
    676.5203681218851,
    -1259.1392167224028,
    771.32342877765313,
    -176.61502916214059,
    12.507343278686905,
    -0.13857109526572012,
    9.9843695780195716e-6,
    1.5056327351493116e-7,
)


def gamma_fn(s: float) -> float:
    """Gamma function for real s > 0.

    Positive integers up to 171 return (s-1)! exactly rounded; other
    arguments use the Lanczos series (about 15 significant digits).
    """
    if not s > 0:
        raise DomainError(f"gamma_fn requires s > 0, got {s}")
    if float(s).is_integer() and s <= 171:
        return float(math.factorial(int(s) - 1))
    if s < 0.5:
        # reflection keeps the series in its accurate range
        return math.pi / (math.sin(math.pi * s) * gamma_fn(1.0 - s))
    z = s - 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, _LANCZOS_G + 2):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    half = t ** (0.5 * (z + 0.5))  # split so the power does not overflow before exp(-t) applies
    return math.sqrt(2.0 * math.pi) * half * (half * math.exp(-t)) * acc


# ---------------------------------------------------------------------------
# Zeta: direct sum to N-1 plus an Euler-Maclaurin tail.
_BERNOULLI_2K = (
    Fraction(1, 6), Fraction(-1, 30), Fraction(1, 42), Fraction(-1, 30),
    Fraction(5, 66), Fraction(-691, 2730), Fraction(7, 6), Fraction(-3617, 510),
)
_EM_TERMS = tuple(float(b / math.factorial(2 * k + 2)) for k, b in enumerate(_BERNOULLI_2K))
_ZETA_N = 12


def zeta_fn(s: float) -> float:
    """Riemann zeta for real s > 1, accurate to roughly machine precision."""
    if not s > 1:
        raise DomainError(f"zeta_fn requires s > 1 (series diverges), got {s}")
    N = _ZETA_N
    head = math.fsum(n ** -s for n in range(1, N))
    tail = N ** (1.0 - s) / (s - 1.0) + 0.5 * N ** -s
    # rising factorial s(s+1)...(s+2k-2) times N^(-s-2k+1)
    rising = s
    power = N ** (-s - 1.0)
    for k, coef in enumerate(_EM_TERMS):
        term = coef * rising * power
        tail += term
        rising *= (s + 2 * k + 1) * (s + 2 * k + 2)
        power /= N * N
    return head + tail


# ---------------------------------------------------------------------------
# Bose-Einstein weights in the reduced variable x = hbar*omega/(k_B T).
_X_CUTOFF = 700.0


def occupation(x):
    """Mean photon number 1/(e^x - 1); zero beyond the double-precision cutoff."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    live = (x > 0) & (x <= _X_CUTOFF)
    out[live] = 1.0 / np.expm1(x[live])
    out[x == 0] = np.inf
    return out if out.ndim else float(out)


def occupation_sq_plus(x):
    """n^2 + n = e^x/(e^x - 1)^2, written as 1/(4 sinh^2(x/2)) to avoid cancellation."""
    x = np.asarray(x, dtype=float)
    out = np.zeros_like(x)
    live = (x > 0) & (x <= _X_CUTOFF)
    out[live] = 0.25 / np.sinh(0.5 * x[live]) ** 2
    out[x == 0] = np.inf
    return out if out.ndim else float(out)


def _weight_fn(weight: BoseWeight):
    if weight is BoseWeight.OCCUPATION:
        return occupation
    if weight is BoseWeight.OCCUPATION_SQ_PLUS:
        return occupation_sq_plus
    # dn/dx = -(n^2 + n)
    return lambda x: -occupation_sq_plus(x)


def _check_moment(p, weight):
    if int(p) != p or p < 1:
        raise DomainError(f"moment order p must be an integer >= 1, got {p}")
    if p == 1 and weight is not BoseWeight.OCCUPATION:
        raise DomainError("p = 1 diverges for this weight (zeta(1))")


def bose_reduced(p: int, weight: BoseWeight) -> float:
    """Closed form of the dimensionless integral of x^p times the weight over [0, inf)."""
    _check_moment(p, weight)
    if weight is BoseWeight.OCCUPATION:
        return gamma_fn(p + 1) * zeta_fn(p + 1)
    value = gamma_fn(p + 1) * zeta_fn(p)
    return value if weight is BoseWeight.OCCUPATION_SQ_PLUS else -value


def _omega_power(p, weight):
    # the derivative weight carries one fewer power of k_B T/hbar
    return p if weight is BoseWeight.OCCUPATION_DERIVATIVE else p + 1


def bose_integral(p: int, weight: BoseWeight, T: float) -> float:
    """Integral of omega^p times a Bose-Einstein weight over omega in [0, inf).

    Parameters
    ----------
    p : int
        Power of omega, >= 1 (>= 2 for the n^2+n and derivative weights).
    weight : BoseWeight
        ``OCCUPATION`` gives Gamma(p+1) zeta(p+1) (k_B T/hbar)^(p+1);
        ``OCCUPATION_SQ_PLUS`` gives Gamma(p+1) zeta(p) (k_B T/hbar)^(p+1);
        ``OCCUPATION_DERIVATIVE`` (dn/domega) gives -Gamma(p+1) zeta(p) (k_B T/hbar)^p.
    T : float
        Bath temperature in K.
    """
    return bose_reduced(p, weight) * thermal_frequency(T) ** _omega_power(p, weight)


def bose_integral_quadrature(p: int, weight: BoseWeight, T: float, rtol: float = 1e-12) -> QuadratureResult:
    """Same integral as :func:`bose_integral`, evaluated by adaptive quadrature."""
    _check_moment(p, weight)
    w = _weight_fn(weight)
    res = integrate_semiinfinite(lambda x: x**p * w(x), tol=0.0, rtol=rtol, scale=float(p))
    scale = thermal_frequency(T) ** _omega_power(p, weight)
    return QuadratureResult(res.value * scale, res.abs_error_estimate * abs(scale), res.evaluations)


# ---------------------------------------------------------------------------
# Adaptive Gauss-Legendre quadrature.
_GL_ORDER = 15
_GL_NODES, _GL_WEIGHTS = np.polynomial.legendre.leggauss(_GL_ORDER)
_EPS = np.finfo(float).eps


def _as_vectorized(f):
    probe = np.array([0.25, 0.5])
    try:
        out = np.asarray(f(probe), dtype=float)
        if out.shape == probe.shape:
            return f
    except (TypeError, ValueError):
        pass
    return np.vectorize(f, otypes=[float])


class _Panel:
    __slots__ = ("a", "b", "value", "error")

    def __init__(self, a, b, value, error):
        self.a, self.b, self.value, self.error = a, b, value, error

    def __lt__(self, other):
        return self.error > other.error


def integrate_interval(f, a, b, tol=1e-10, rtol=0.0, max_evals=400_000) -> QuadratureResult:
    """Globally adaptive Gauss-Legendre quadrature of f over the finite interval [a, b].

    Each panel is scored by the difference between a 15-point rule on the
    whole panel and on its two halves; the worst panel is bisected until the
    summed estimate falls below ``max(tol, rtol*|I|)``.  ``f`` should accept
    numpy arrays; scalar functions are vectorized automatically.
    """
    if not (tol >= 0 and rtol >= 0) or (tol == 0 and rtol == 0):
        raise ValueError("need tol > 0 or rtol > 0")
    f = _as_vectorized(f)
    evals = 0

    def rule(lo, hi):
        half = 0.5 * (hi - lo)
        mid = 0.5 * (hi + lo)
        return half * float(np.dot(_GL_WEIGHTS, f(mid + half * _GL_NODES)))

    def panel(lo, hi, whole=None):
        nonlocal evals
        if whole is None:
            whole = rule(lo, hi)
            evals += _GL_ORDER
        m = 0.5 * (lo + hi)
        left, right = rule(lo, m), rule(m, hi)
        evals += 2 * _GL_ORDER
        fine = left + right
        err = abs(fine - whole)
        # below roundoff the estimate is meaningless
        if err <= 50 * _EPS * abs(fine):
            err = 0.0
        return _Panel(lo, hi, fine, err), left, right

    first, left, right = panel(a, b)
    heap = [first]
    halves = {(a, b): (left, right)}
    while True:
        total = math.fsum(p.value for p in heap)
        err = math.fsum(p.error for p in heap)
        target = max(tol, rtol * abs(total))
        if err <= target:
            return QuadratureResult(total, err, evals)
        if evals >= max_evals:
            raise ConvergenceError(
                f"adaptive quadrature did not converge in {evals} evaluations "
                f"(estimate {total:.6e}, error {err:.2e})",
                QuadratureResult(total, err, evals),
            )
        worst = heapq.heappop(heap)
        m = 0.5 * (worst.a + worst.b)
        lw, rw = halves.pop((worst.a, worst.b))
        for lo, hi, whole in ((worst.a, m, lw), (m, worst.b, rw)):
            p, l2, r2 = panel(lo, hi, whole)
            halves[(lo, hi)] = (l2, r2)
            heapq.heappush(heap, p)


def integrate_semiinfinite(integrand, tol=1e-10, rtol=0.0, scale=1.0, max_evals=400_000) -> QuadratureResult:
    """Integrate an exponentially decaying function over [0, inf).

    The head [0, 40*scale] is integrated directly; the tail uses the
    exponential map x = L - scale*ln(u), u in (0, 1], which turns an
    e^{-x/scale} decay into a bounded integrand.
    """
    f = _as_vectorized(integrand)
    L = 40.0 * scale
    head = integrate_interval(f, 0.0, L, tol=0.5 * tol, rtol=rtol, max_evals=max_evals)

    def tail_fn(u):
        return f(L - scale * np.log(u)) * scale / u

    # the head error budget is already spent; the tail gets an absolute target
    tail_tol = max(0.5 * tol, 0.5 * rtol * abs(head.value), 1e-300)
    tail = integrate_interval(tail_fn, 0.0, 1.0, tol=tail_tol,
                              max_evals=max(max_evals - head.evaluations, 1000))
    return QuadratureResult(
        head.value + tail.value,
        head.abs_error_estimate + tail.abs_error_estimate,
        head.evaluations + tail.evaluations,
    )


# ---------------------------------------------------------------------------
# Double solid-angle integrals of functions of k.k'.

def sphere_pair_cubature(g, tol=1e-12) -> float:
    """Double solid-angle integral of g(k.k') over two unit vectors.

    By isotropy this equals 8 pi^2 times the integral of g(u) over [-1, 1].
    ``tol`` is relative to the result.
    """
    res = integrate_interval(g, -1.0, 1.0, tol=1e-300, rtol=tol)
    return 8.0 * math.pi**2 * res.value


def random_unit_vectors(rng: np.random.Generator, n: int) -> np.ndarray:
    v = rng.standard_normal((n, 3))
    return v / np.linalg.norm(v, axis=1, keepdims=True)


def sphere_pair_monte_carlo(g, n_samples=1_000_000, seed=0):
    """Brute-force estimate of the same double solid-angle integral.

    Samples both directions independently and uniformly.  Returns the
    estimate and its standard error.
    """
    rng = np.random.Generator(np.random.Philox(seed))
    k1 = random_unit_vectors(rng, n_samples)
    k2 = random_unit_vectors(rng, n_samples)
    vals = np.asarray(g(np.einsum("ij,ij->i", k1, k2)), dtype=float)
    area2 = (4.0 * math.pi) ** 2
    return area2 * vals.mean(), area2 * vals.std(ddof=1) / math.sqrt(n_samples)
