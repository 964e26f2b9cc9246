"""Plain-list power series helpers used as independent oracles (no package code)."""
from fractions import Fraction


def binom_coeffs(a, n):
    """(1 + x)^a through x^(n-1)."""
    out, c = [], Fraction(1)
    for j in range(n):
        out.append(c)
        c = c * (Fraction(a) - j) / (j + 1)
    return out


def mul(a, b, n):
    return [sum(a[i] * b[k - i] for i in range(k + 1) if i < len(a) and k - i < len(b)) for k in range(n)]


def inv(a, n):
    out = [Fraction(1) / a[0]]
    for k in range(1, n):
        out.append(-sum(a[i] * out[k - i] for i in range(1, k + 1) if i < len(a)) / a[0])
    return out


def power(a, e, n):
    out = [Fraction(1)] + [Fraction(0)] * (n - 1)
    for _ in range(e):
        out = mul(out, a, n)
    return out


def laurent_inv(a, n):
    """1/a for a power series a with a zero of order v at 0; returns {exponent: coeff} for exponents < n - v."""
    v = next(i for i, x in enumerate(a) if x)
    body = inv(a[v:], n)
    return {j - v: c for j, c in enumerate(body) if c}


def exp_coeffs(n):
    from math import factorial
    return [Fraction(1, factorial(j)) for j in range(n)]
