import json
import random
from collections import Counter

import pytest
from hypothesis import given, strategies as st
from scipy.stats import chi2

from bpmatch.bgn import PlaintextWindow
from bpmatch.bp import (
    BpConfig,
    Channel,
    KeyHolder,
    Permutation,
    Permuter,
    ShareVector,
    additive_split,
    bp_full_run,
    bp_half_run,
    recombine,
)
from bpmatch.errors import ProtocolAbort, ShareOutOfRange


def plaintext_half_run(s_a, s_b, perm, blinding):
    """Steps 1-4 evaluated directly on plaintexts."""
    v_a = perm.apply([s - r for s, r in zip(s_a, blinding)])
    v_b = perm.apply([s + r for s, r in zip(s_b, blinding)])
    return v_a, v_b


class TestSplit:
    def test_forced(self):
        a, b = additive_split([3, 1], random.Random(0), forced_b=[1, 1])
        assert a.values == (2, 0) and b.values == (1, 1)
        assert (a.owner, b.owner) == ("A", "B")

    def test_zero(self):
        a, b = additive_split([0] * 5, random.Random(0))
        assert a.values == tuple(-x for x in b.values)

    def test_bounds(self):
        rng = random.Random(1)
        S = [rng.randint(-2 ** 15, 2 ** 15) for _ in range(500)]
        a, b = additive_split(S, rng)
        assert recombine(a, b) == tuple(S)
        assert all(-2 ** 15 <= x <= 2 ** 15 for x in b.values)
        assert all(abs(x) <= 2 ** 16 for x in a.values)
        with pytest.raises(ShareOutOfRange):
            additive_split([2 ** 15 + 1], rng)

    @given(st.lists(st.integers(-2 ** 15, 2 ** 15), max_size=30), st.integers(0, 2 ** 32))
    def test_recombine_property(self, S, seed):
        a, b = additive_split(S, random.Random(seed))
        assert recombine(a, b) == tuple(S)


class TestPermutation:
    def test_rejects_non_bijection(self):
        with pytest.raises(ValueError):
            Permutation((0, 0, 1))

    @given(st.permutations(range(7)), st.permutations(range(7)))
    def test_composition_and_inverse(self, p, q):
        P, Q = Permutation(p), Permutation(q)
        seq = list("abcdefg")
        assert P.after(Q).apply(seq) == P.apply(Q.apply(seq))
        assert P.inverse().apply(P.apply(seq)) == seq
        assert P.after(P.inverse()) == Permutation.identity(7)


class TestHalfRun:
    def test_worked_example(self, bgn16):
        perm, blinding = Permutation((1, 0)), (5, 7)
        res = bp_half_run(bgn16, ShareVector((2, 0), "A"), ShareVector((1, 1), "B"), random.Random(0),
                          permutation=perm, blinding=blinding)
        assert res.keyholder_shares.values == (-7, -3)
        assert res.permuter_shares.values == (8, 6)
        assert list(recombine(res.keyholder_shares, res.permuter_shares)) == perm.apply([3, 1])
        assert (list(res.keyholder_shares.values), list(res.permuter_shares.values)) == \
            plaintext_half_run((2, 0), (1, 1), perm, blinding)

    def test_noop(self, bgn16):
        res = bp_half_run(bgn16, ShareVector((4, -9, 2), "A"), ShareVector((1, 2, 3), "B"), random.Random(0),
                          permutation=Permutation.identity(3), blinding=(0, 0, 0))
        assert res.keyholder_shares.values == (4, -9, 2)
        assert res.permuter_shares.values == (1, 2, 3)

    def test_single_element(self, bgn16):
        res = bp_half_run(bgn16, ShareVector((10,), "A"), ShareVector((-4,), "B"), random.Random(3))
        (r,) = res.blinding
        assert res.keyholder_shares.values == (10 - r,)
        assert res.permuter_shares.values == (-4 + r,)

    @pytest.mark.parametrize("backend", ["bgn", "paillier"])
    def test_against_plaintext_evaluation(self, backend, bgn24_pair, paillier_pair):
        key = bgn24_pair[0] if backend == "bgn" else paillier_pair[0]
        rng = random.Random(4)
        for _ in range(10):
            ell = rng.randint(1, 6)
            s_a = [rng.randint(-2 ** 16, 2 ** 16) for _ in range(ell)]
            s_b = [rng.randint(-2 ** 16, 2 ** 16) for _ in range(ell)]
            res = bp_half_run(key, ShareVector(s_a, "A"), ShareVector(s_b, "B"), rng, config=BpConfig())
            v_a, v_b = plaintext_half_run(s_a, s_b, res.permutation, res.blinding)
            assert list(res.keyholder_shares.values) == v_a
            assert list(res.permuter_shares.values) == v_b

    @pytest.mark.parametrize("ell", [1, 8, 64])
    def test_linear_counts(self, ell, paillier_pair):
        res = bp_half_run(paillier_pair[0], ShareVector([1] * ell, "A"), ShareVector([2] * ell, "B"),
                          random.Random(ell))
        ops = res.transcript.half_ops(1)
        assert {op: ops[op] for op in ("encrypt", "encode", "hom_neg", "hom_add", "decrypt")} == \
            dict.fromkeys(("encrypt", "encode", "hom_neg", "hom_add", "decrypt"), ell)
        assert [(m.direction, m.step) for m in res.transcript.messages] == [("A->B", 1), ("B->A", 3)]

    def test_share_bound_checked(self, bgn16):
        config = BpConfig.for_capacity(bgn16.capacity)
        with pytest.raises(ShareOutOfRange):
            bp_half_run(bgn16, ShareVector((config.share_bound + config.blind_bound + 1,), "A"),
                        ShareVector((0,), "B"), random.Random(0), config=config)
        with pytest.raises(ShareOutOfRange):
            bp_half_run(bgn16, ShareVector((0,), "A"), ShareVector((0,), "B"), random.Random(0),
                        config=config, blinding=(config.blind_bound,))

    def test_config_too_wide_for_key(self, bgn16):
        with pytest.raises(ValueError):
            bp_half_run(bgn16, ShareVector((0,), "A"), ShareVector((0,), "B"), random.Random(0),
                        config=BpConfig())


class TestConfig:
    def test_default_window(self):
        assert BpConfig().window == PlaintextWindow(-2 ** 17, 2 ** 17)
        assert BpConfig().window.width < 2 ** 21

    def test_for_capacity(self, bgn16):
        c = BpConfig.for_capacity(bgn16.capacity)
        assert c.fits(bgn16.capacity)
        assert not BpConfig(c.share_bound * 2, c.blind_bound * 2).fits(bgn16.capacity)
        assert BpConfig.for_capacity(2 ** 40) == BpConfig()
        with pytest.raises(ValueError):
            BpConfig.for_capacity(3)


class TestFullRun:
    @pytest.mark.parametrize("backend", ["bgn", "paillier"])
    def test_multiset(self, backend, bgn24_pair, paillier_pair):
        a, b = bgn24_pair if backend == "bgn" else paillier_pair
        rng = random.Random(5)
        for _ in range(20):
            S = [rng.randint(-2 ** 15, 2 ** 15) for _ in range(8)]
            sa, sb = additive_split(S, rng)
            res = bp_full_run(a, b, sa, sb, rng, BpConfig())
            out = res.recombined()
            assert sorted(out) == sorted(S)
            assert list(out) == res.composed.apply(S)
            assert (res.shares_a.owner, res.shares_b.owner) == ("A", "B")

    def test_identity_permutations(self, paillier_pair):
        a, b = paillier_pair
        S = [5, -3, 0, 12]
        sa, sb = additive_split(S, random.Random(0))
        res = bp_full_run(a, b, sa, sb, random.Random(1), pi_b=Permutation.identity(4),
                          pi_a=Permutation.identity(4))
        assert res.recombined() == tuple(S)

    def test_cross_backend(self, bgn24_pair, paillier_pair):
        rng = random.Random(6)
        for _ in range(5):
            S = [rng.randint(-2 ** 15, 2 ** 15) for _ in range(8)]
            sa, sb = additive_split(S, rng)
            seed = rng.getrandbits(64)
            r1 = bp_full_run(*bgn24_pair, sa, sb, random.Random(seed), BpConfig())
            r2 = bp_full_run(*paillier_pair, sa, sb, random.Random(seed), BpConfig())
            assert r1.recombined() == r2.recombined()
            assert r1.composed == r2.composed

    def test_transcript(self, paillier_pair):
        a, b = paillier_pair
        sa, sb = additive_split([1, 2, 3], random.Random(0))
        res = bp_full_run(a, b, sa, sb, random.Random(2))
        msgs = res.transcript.messages
        assert [(m.half, m.direction, m.step) for m in msgs] == [
            (1, "A->B", 1), (1, "B->A", 3), (2, "B->A", 1), (2, "A->B", 3)]
        for m in msgs:
            assert m.bytes == len(m.message)
            body = json.loads(m.message)
            assert body["kind"] == "cipher_vector" and body["backend"] == "paillier"
            assert len(json.dumps(body["payload"], separators=(",", ":"))) == m.payload_bytes
        lines = res.transcript.to_jsonl().splitlines()
        assert len(lines) == 4
        assert [json.loads(l)["bytes"] for l in lines] == [m.bytes for m in msgs]
        assert res.transcript.summary()["messages"] == 4


class TestIsolation:
    def test_party_fields(self, bgn16):
        holder = KeyHolder("A", bgn16, ShareVector((1,), "A"), PlaintextWindow(-10, 10), random.Random(0))
        permuter = Permuter("B", bgn16.public(), ShareVector((1,), "B"), 4, random.Random(0), random.Random(0))
        assert not {"permutation", "blinding"} & set(vars(holder))
        assert permuter.peer_backend.sk is None
        assert all(getattr(v, "sk", None) is None for v in vars(permuter).values())
        with pytest.raises(ValueError):
            Permuter("B", bgn16, ShareVector((1,), "B"), 4, random.Random(0), random.Random(0))
        with pytest.raises(ValueError):
            KeyHolder("A", bgn16.public(), ShareVector((1,), "A"), PlaintextWindow(-10, 10), random.Random(0))


class TamperChannel(Channel):
    def __init__(self, tamper):
        super().__init__()
        self.tamper = tamper

    def receive(self, dst):
        return self.tamper(super().receive(dst))


class TestAborts:
    def test_garbage(self, paillier_pair):
        ch = TamperChannel(lambda data: b"{not json")
        with pytest.raises(ProtocolAbort) as exc:
            bp_half_run(paillier_pair[0], ShareVector((1,), "A"), ShareVector((1,), "B"), random.Random(0),
                        channel=ch)
        assert exc.value.reason == "Codec"

    def test_wrong_length(self, bgn16):
        def drop_one(data):
            msg = json.loads(data)
            msg["payload"] = msg["payload"][:-1]
            return json.dumps(msg).encode()

        with pytest.raises(ProtocolAbort) as exc:
            bp_half_run(bgn16, ShareVector((1, 2), "A"), ShareVector((1, 2), "B"), random.Random(0),
                        channel=TamperChannel(drop_one))
        assert exc.value.reason == "Codec"

    def test_off_curve_point(self, bgn16):
        def corrupt(data):
            msg = json.loads(data)
            msg["payload"][0] = {"x": "1", "y": "1"}
            return json.dumps(msg).encode()

        with pytest.raises(ProtocolAbort) as exc:
            bp_half_run(bgn16, ShareVector((1,), "A"), ShareVector((1,), "B"), random.Random(0),
                        channel=TamperChannel(corrupt))
        assert exc.value.reason == "Codec"

    def test_out_of_window(self, paillier_pair):
        key = paillier_pair[0]
        rng = random.Random(0)

        def swap_step3(data):
            msg = json.loads(data)
            if msg["step"] == 3:
                msg["payload"] = [key.ciphertext_to_json(key.encrypt(10 ** 7, rng))]
            return json.dumps(msg).encode()

        with pytest.raises(ProtocolAbort) as exc:
            bp_half_run(key, ShareVector((1,), "A"), ShareVector((1,), "B"), rng, channel=TamperChannel(swap_step3))
        assert exc.value.reason == "PlaintextOutOfWindow"


def test_blinding_hides_values_chi_square(paillier_pair):
    """For fixed S', each decrypted coordinate is uniform over its blinding range."""
    key = paillier_pair[0]
    config = BpConfig(share_bound=2 ** 10, blind_bound=2 ** 10)
    rng = random.Random(11)
    s_a = (100, -100)
    bins = 16
    counts = Counter()
    n_runs = 10_000
    for _ in range(n_runs):
        res = bp_half_run(key, ShareVector(s_a, "A"), ShareVector((0, 0), "B"), rng, config=config)
        assert sorted(res.keyholder_shares.values) == sorted(
            res.permutation.apply([s - r for s, r in zip(s_a, res.blinding)]))
        for value, src in zip(res.keyholder_shares.values, res.permutation.mapping):
            r = s_a[src] - value
            counts[r * bins // config.blind_bound] += 1
    expected = 2 * n_runs / bins
    stat = sum((counts[i] - expected) ** 2 / expected for i in range(bins))
    assert stat < chi2.ppf(0.999, bins - 1)


def test_payload_linearity(paillier_pair):
    a, b = paillier_pair
    sizes = {}
    for ell in (8, 16):
        sa, sb = additive_split([0] * ell, random.Random(ell))
        res = bp_full_run(a, b, sa, sb, random.Random(0))
        sizes[ell] = res.transcript.messages
    for m8, m16 in zip(sizes[8], sizes[16]):
        assert abs(m16.payload_bytes - 2 * m8.payload_bytes) <= 1
        assert m16.bytes - m16.payload_bytes == m8.bytes - m8.payload_bytes
