"""Log-gamma and digamma for positive real arguments.

Both are needed by the Morse matrix elements, where arguments of order
2N ~ 1e2..1e8 appear and raw Gamma values overflow.
"""

import math

__all__ = ["log_gamma", "digamma", "log_gamma_ratio"]

# Lanczos approximation, g = 7, n = 9.
_LANCZOS_G = 7.0
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
_HALF_LOG_2PI = 0.5 * math.log(2.0 * math.pi)

# Bernoulli numbers B_2k / (2k) for the digamma asymptotic series.
_DIGAMMA_ASYMPTOTIC = (
    1.0 / 12.0,
    -1.0 / 120.0,
    1.0 / 252.0,
    -1.0 / 240.0,
    1.0 / 132.0,
    -691.0 / 32760.0,
    1.0 / 12.0,
)
_DIGAMMA_SHIFT = 10.0


def _check_domain(z, name):
    if not z > 0.0 or math.isinf(z):
        raise ValueError(f"{name}: argument must be a finite positive real, got {z!r}")


def log_gamma(z: float) -> float:
    """Natural log of Gamma(z) for z > 0."""
    z = float(z)
    _check_domain(z, "log_gamma")
    if z < 0.5:
        # Gamma(z) = Gamma(z + 1) / z keeps the Lanczos sum in its accurate range.
        return log_gamma(z + 1.0) - math.log(z)
    z -= 1.0
    acc = _LANCZOS_COEF[0]
    for i in range(1, len(_LANCZOS_COEF)):
        acc += _LANCZOS_COEF[i] / (z + i)
    t = z + _LANCZOS_G + 0.5
    return _HALF_LOG_2PI + (z + 0.5) * math.log(t) - t + math.log(acc)


def digamma(z: float) -> float:
    """Psi(z) = d/dz ln Gamma(z) for z > 0.

    Upward recurrence Psi(z) = Psi(z + 1) - 1/z until z >= 10, then the
    asymptotic series ln z - 1/(2z) - sum B_2k / (2k z^2k).
    """
    z = float(z)
    _check_domain(z, "digamma")
    shift = 0.0
    while z < _DIGAMMA_SHIFT:
        shift -= 1.0 / z
        z += 1.0
    inv2 = 1.0 / (z * z)
    series = 0.0
    for c in reversed(_DIGAMMA_ASYMPTOTIC):
        series = series * inv2 + c
    return shift + math.log(z) - 0.5 / z - series * inv2


def log_gamma_ratio(a: float, b: float) -> float:
    """ln(Gamma(a) / Gamma(b)).

    When a - b is a small integer the ratio is a finite product, summed as
    logs so that huge arguments (a ~ 1e8) cancel exactly instead of through
    two nearly equal log-gamma values.
    """
    d = a - b
    n = round(d)
    if abs(d - n) < 1e-12 and abs(n) <= 64:
        if n >= 0:
            return math.fsum(math.log(b + j) for j in range(n))
        return -math.fsum(math.log(a + j) for j in range(-n))
    return log_gamma(a) - log_gamma(b)
