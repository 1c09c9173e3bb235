import random

import pytest

from bpmatch.primes import distinct_primes, is_probable_prime, random_prime


def sieve(n):
    flags = [True] * n
    flags[0] = flags[1] = False
    for i in range(2, int(n ** 0.5) + 1):
        if flags[i]:
            flags[i * i::i] = [False] * len(flags[i * i::i])
    return flags


def test_matches_sieve_below_20000():
    flags = sieve(20000)
    assert [is_probable_prime(k) for k in range(20000)] == flags


@pytest.mark.parametrize("n", [2 ** 61 - 1, 2 ** 127 - 1, 2 ** 255 - 19])
def test_known_primes(n):
    assert is_probable_prime(n)


@pytest.mark.parametrize("n", [561, 1105, 3215031751, 2 ** 64 + 1, (2 ** 61 - 1) * (2 ** 31 - 1)])
def test_composites(n):
    assert not is_probable_prime(n)


@pytest.mark.parametrize("bits", [2, 8, 16, 64, 128])
def test_random_prime_bits(bits):
    rng = random.Random(bits)
    q = random_prime(bits, rng)
    assert q.bit_length() == bits and is_probable_prime(q)


def test_distinct():
    q1, q2 = distinct_primes(8, random.Random(0))
    assert q1 != q2
