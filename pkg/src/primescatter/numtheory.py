"""
Arithmetic functions of prime-counting theory.

Everything here is exact integer work on top of a deterministic sieve, except
``log_integral`` and ``riemann_R`` which are real-valued and computed by
adaptive quadrature.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np
from scipy import integrate

from .errors import DomainError, EmptyRequestError

__all__ = [
    "PrimeSeq",
    "sieve",
    "primes_first",
    "prime_count",
    "is_prime",
    "factorize",
    "mobius",
    "von_mangoldt",
    "log_integral",
    "RSeries",
    "riemann_R",
    "chebyshev_psi",
    "shift_position",
]


@dataclass(frozen=True)
class PrimeSeq:
    """Ascending run of consecutive primes starting at 2."""

    values: np.ndarray

    def __post_init__(self):
        vals = np.asarray(self.values, dtype=np.int64)
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    def __len__(self) -> int:
        return int(self.values.size)

    def __getitem__(self, i):
        return self.values[i]

    def __iter__(self):
        return iter(self.values.tolist())

    @property
    def last(self) -> int:
        return int(self.values[-1])


def sieve(limit: int) -> np.ndarray:
    """All primes ``<= limit`` (Eratosthenes over odd numbers only)."""
    limit = int(limit)
    if limit < 2:
        return np.empty(0, dtype=np.int64)
    if limit == 2:
        return np.array([2], dtype=np.int64)
    # index i of `odd` stands for 2*i + 1
    odd = np.ones((limit + 1) // 2, dtype=bool)
    odd[0] = False
    for i in range(1, (math.isqrt(limit) - 1) // 2 + 1):
        if odd[i]:
            p = 2 * i + 1
            odd[p * p // 2 :: p] = False
    primes = 2 * np.flatnonzero(odd).astype(np.int64) + 1
    return np.concatenate(([2], primes)).astype(np.int64)


def _nth_prime_bound(n: int) -> int:
    # p_n < n (log n + log log n) for n >= 6 (Rosser), padded by 20%
    if n < 6:
        return 15
    ln = math.log(n)
    return int(1.2 * n * (ln + math.log(ln))) + 1


def primes_first(count: int) -> PrimeSeq:
    """The first ``count`` primes."""
    if count < 0:
        raise DomainError(f"count must be positive, got {count}")
    if count == 0:
        raise EmptyRequestError("requested zero primes")
    bound = _nth_prime_bound(count)
    primes = sieve(bound)
    while primes.size < count:  # pragma: no cover - the bound is proven
        bound *= 2
        primes = sieve(bound)
    return PrimeSeq(primes[:count])


def prime_count(x: float) -> int:
    """pi(x): the number of primes ``<= x``."""
    if not math.isfinite(x):
        raise DomainError(f"x must be finite, got {x}")
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    return int(sieve(math.floor(x)).size)


def is_prime(n: int) -> bool:
    n = int(n)
    if n < 2:
        return False
    if n % 2 == 0:
        return n == 2
    for d in range(3, math.isqrt(n) + 1, 2):
        if n % d == 0:
            return False
    return True


def factorize(n: int) -> dict[int, int]:
    """Prime factorization ``{p: exponent}`` by trial division."""
    n = int(n)
    if n < 1:
        raise DomainError(f"n must be a positive integer, got {n}")
    out: dict[int, int] = {}
    d = 2
    while d * d <= n:
        while n % d == 0:
            out[d] = out.get(d, 0) + 1
            n //= d
        d += 1 if d == 2 else 2
    if n > 1:
        out[n] = out.get(n, 0) + 1
    return out


def mobius(n: int) -> int:
    if n < 1:
        raise DomainError(f"mobius is defined for n >= 1, got {n}")
    f = factorize(n)
    if any(e > 1 for e in f.values()):
        return 0
    return -1 if len(f) % 2 else 1


def von_mangoldt(n: int) -> float:
    if n < 1:
        raise DomainError(f"von_mangoldt is defined for n >= 1, got {n}")
    f = factorize(n)
    if len(f) != 1:
        return 0.0
    (p,) = f
    return math.log(p)


def _e1(y: float) -> float:
    # exponential integral E1(y) = int_y^inf e^-u / u du, y > 0
    val, _ = integrate.quad(lambda u: math.exp(-u) / u, y, math.inf, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def _shi2(y: float) -> float:
    # int_0^y 2 sinh(u) / u du; the even combination of the principal value
    def f(u):
        return 2.0 if u == 0.0 else 2.0 * math.sinh(u) / u

    val, _ = integrate.quad(f, 0.0, y, epsabs=1e-13, epsrel=1e-13, limit=200)
    return val


def log_integral(x: float) -> float:
    """Principal-value logarithmic integral li(x).

    With t = e^u the integrand becomes e^u / u; the principal value around
    u = 0 is taken over the symmetric interval [-y, y], which folds into the
    regular integrand 2 sinh(u)/u, and the remaining tail is -E1(y).
    """
    if not (x > 0) or not math.isfinite(x):
        raise DomainError(f"log_integral requires finite x > 0, got {x}")
    if x == 1:
        raise DomainError("log_integral is singular at x = 1")
    y = math.log(x)
    if y < 0:
        return -_e1(-y)
    return _shi2(y) - _e1(y)


class RSeries(NamedTuple):
    value: float
    last_term: float
    terms_used: int


def riemann_R(x: float, terms: int) -> RSeries:
    """Truncated Riemann R(x) = sum mu(n)/n li(x^(1/n)).

    Stops after ``terms`` terms, or earlier once a nonzero term drops below
    1e-12 in magnitude or x^(1/n) falls under 1 + 1e-6.
    """
    if not (x > 1) or not math.isfinite(x):
        raise DomainError(f"riemann_R requires finite x > 1, got {x}")
    if terms < 1:
        raise DomainError(f"terms must be positive, got {terms}")
    logx = math.log(x)
    parts: list[float] = []
    last = 0.0
    used = 0
    for n in range(1, terms + 1):
        root = math.exp(logx / n)
        if root < 1 + 1e-6:
            break
        used = n
        mu = mobius(n)
        if mu == 0:
            continue
        term = mu / n * log_integral(root)
        parts.append(term)
        last = term
        if abs(term) < 1e-12:
            break
    return RSeries(math.fsum(parts), last, used)


def chebyshev_psi(x: float) -> float:
    """psi(x) = sum of log p over prime powers p^k <= x."""
    if not (x >= 1) or not math.isfinite(x):
        raise DomainError(f"chebyshev_psi requires finite x >= 1, got {x}")
    n = math.floor(x)
    terms = []
    for p in sieve(n).tolist():
        k = 0
        q = p
        while q <= n:
            k += 1
            q *= p
        terms.append(k * math.log(p))
    return math.fsum(terms)


def shift_position(x_n: int) -> float:
    """x_n / pi(x_n) for a prime x_n; close to log(x_n) for large x_n."""
    if int(x_n) != x_n or not is_prime(int(x_n)):
        raise DomainError(f"shift_position is defined at primes only, got {x_n}")
    x_n = int(x_n)
    return x_n / prime_count(x_n)
