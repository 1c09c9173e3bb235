"""Miller-Rabin testing and random prime generation."""
import random

MR_ROUNDS = 40

_SMALL_PRIMES = [q for q in range(3, 1000) if all(q % d for d in range(2, int(q ** 0.5) + 1))]


def is_probable_prime(n: int, rounds: int = MR_ROUNDS) -> bool:
    """Return True if ``n`` passes trial division and ``rounds`` Miller-Rabin rounds.

    Witnesses are drawn from a generator seeded with ``n`` itself, so the
    verdict for a given integer never depends on caller randomness.
    """
    if n < 2:
        return False
    if n == 2:
        return True
    if n % 2 == 0:
        return False
    for q in _SMALL_PRIMES:
        if n == q:
            return True
        if n % q == 0:
            return False
    if n < 1000 * 1000:
        return True

    d, s = n - 1, 0
    while d % 2 == 0:
        d //= 2
        s += 1
    witnesses = random.Random(n)
    for _ in range(rounds):
        a = witnesses.randrange(2, n - 1)
        x = pow(a, d, n)
        if x == 1 or x == n - 1:
            continue
        for _ in range(s - 1):
            x = x * x % n
            if x == n - 1:
                break
        else:
            return False
    return True


def random_prime(bits: int, rng: random.Random) -> int:
    """Uniform-ish random prime with exactly ``bits`` bits (top bit set)."""
    if bits < 2:
        raise ValueError("bits must be >= 2")
    if bits == 2:
        return rng.choice((2, 3))
    while True:
        candidate = rng.getrandbits(bits) | (1 << (bits - 1)) | 1
        if is_probable_prime(candidate):
            return candidate


def distinct_primes(bits: int, rng: random.Random) -> tuple:
    q1 = random_prime(bits, rng)
    while True:
        q2 = random_prime(bits, rng)
        if q2 != q1:
            return q1, q2
