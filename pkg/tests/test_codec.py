"""Codebook construction, encoding, decoding, and Monte Carlo simulation."""

import numpy as np
import pytest

from bcsl.codec_sim import (CodeConfig, batch_typical, build_codebook, encode,
                            message_size, simulate, typical, wilson_interval)
from bcsl.errors import (CapabilityError, ConfigError, EncodingError,
                         GenerationError, UsageError, ValidationError)
from bcsl.regions import AuxJoint

from conftest import (bsc, noiseless_identical_channel, product_channel,
                      uniform_binary_input_aux)


@pytest.fixture(scope="module")
def aux():
    return uniform_binary_input_aux()


@pytest.fixture(scope="module")
def bsc_third():
    m = bsc(1 / 3)
    return product_channel(m, m, m)


class TestCodeConfig:
    def test_message_size(self):
        assert message_size(4, 0.0) == 1
        assert message_size(4, 0.5) == 4
        assert message_size(10, 0.1) == 2

    def test_field_validation(self):
        with pytest.raises(ValidationError):
            CodeConfig(n=0)
        with pytest.raises(ValidationError):
            CodeConfig(n=4, eps=0.0)
        with pytest.raises(ValidationError):
            CodeConfig(n=4, r1e=-0.1)

    def test_pairing_condition_named(self, aux):
        cfg = CodeConfig(n=4, r1e=0.5, r1p=0.5, q2=0.5)
        with pytest.raises(ConfigError, match="r1e \\+ r1p \\+ r1dag"):
            cfg.validate_against(aux)

    def test_dict_roundtrip(self):
        cfg = CodeConfig(n=6, r1e=0.1, q2=0.2, eps=0.5, seed=3)
        assert CodeConfig.from_dict(cfg.to_dict()) == cfg
        with pytest.raises(ValidationError):
            CodeConfig.from_dict({"n": 4, "bogus": 1})


class TestTypicality:
    def test_exact_type_is_typical(self):
        pmf = np.array([0.5, 0.5])
        assert typical(np.array([2, 2]), 4, pmf, 0.1)

    def test_forbidden_symbol(self):
        pmf = np.array([1.0, 0.0])
        assert not typical(np.array([3, 1]), 4, pmf, 0.9)
        assert typical(np.array([4, 0]), 4, pmf, 0.1)

    def test_batch_matches_scalar(self, rng):
        pmf = np.array([0.3, 0.7])
        seqs = rng.integers(0, 2, size=(40, 8))
        got = batch_typical(seqs, 8, pmf, 0.4)
        for row, ok in zip(seqs, got):
            counts = np.bincount(row, minlength=2)
            assert ok == typical(counts, 8, pmf, 0.4)


class TestBuildCodebook:
    def test_trivial_all_zero_rates(self, aux):
        ch = noiseless_identical_channel(2)
        cfg = CodeConfig(n=2, eps=1.0)
        cb = build_codebook(cfg, aux, ch)
        assert cb.x.shape == (1, 1, 1, 1, 1, 1, 2)
        assert cb.pairing_failure_fraction == 0.0

    def test_codeword_cap(self, aux, bsc_third):
        cfg = CodeConfig(n=6, r1e=0.5, q2=0.5, eps=0.5)
        with pytest.raises(CapabilityError):
            build_codebook(cfg, aux, bsc_third, codeword_cap=1)

    def test_generation_cap(self, bsc_third):
        # X ~ (0.9, 0.1) at n=3 admits no strongly typical sequence at
        # eps = 0.01, so rejection sampling must give up with a clear error
        p = np.zeros((1, 2, 1, 2))
        p[0, 0, 0, 0] = 0.9
        p[0, 1, 0, 1] = 0.1
        skewed = AuxJoint(1, 2, 1, 2, p)
        cfg = CodeConfig(n=3, eps=0.01)
        with pytest.raises(GenerationError):
            build_codebook(cfg, skewed, bsc_third, retry_cap=50)

    def test_deterministic_in_seed(self, aux, bsc_third):
        cfg = CodeConfig(n=6, r1e=0.1, q2=0.2, eps=0.5, seed=7)
        a = build_codebook(cfg, aux, bsc_third)
        b = build_codebook(cfg, aux, bsc_third)
        assert np.array_equal(a.x, b.x)
        assert np.array_equal(a.u2, b.u2)


@pytest.fixture(scope="module")
def cb(aux, bsc_third):
    cfg = CodeConfig(n=6, r1e=0.1, r1p=0.2, q2=0.4, eps=0.5, seed=1)
    return build_codebook(cfg, aux, bsc_third)


class TestEncode:

    def test_deterministic_per_nonce(self, cb):
        a = encode(cb, 0, 0, 0, nonce=5)
        b = encode(cb, 0, 0, 0, nonce=5)
        assert np.array_equal(a, b)

    def test_out_of_range(self, cb):
        with pytest.raises(UsageError):
            encode(cb, 9, 0, 0)

    def test_randomization_uniform(self, cb):
        # the randomization index w1' over fresh nonces must be uniform:
        # chi-square over 10^4 encodings at the 1% level
        from scipy.stats import chisquare
        s = cb.sizes
        assert s["r1p"] >= 2
        rng_draws = []
        for nonce in range(10_000):
            r = np.random.default_rng([cb.cfg.seed, 1, nonce])
            rng_draws.append(int(r.integers(0, s["r1p"])))
        counts = np.bincount(rng_draws, minlength=s["r1p"])
        assert chisquare(counts).pvalue > 0.01

    def test_unpaired_bin_raises(self, cb):
        pair = cb.pair.copy()
        cb.pair[...] = -1
        try:
            with pytest.raises(EncodingError):
                encode(cb, 0, 0, 0, nonce=0)
        finally:
            cb.pair[...] = pair


class TestSimulate:
    def test_noiseless_zero_error(self, aux):
        ch = noiseless_identical_channel(2)
        cfg = CodeConfig(n=2, eps=1.0)
        rep = simulate(cfg, aux, ch, trials=200, seed=0)
        assert rep.rate(1) == 0.0
        assert rep.rate(2) == 0.0
        assert rep.rate(3) == 0.0
        assert rep.encode_failures == 0

    def test_thread_count_invariant(self, aux, bsc_third):
        cfg = CodeConfig(n=6, r1e=0.1, q2=0.2, eps=0.5, seed=2)
        cb = build_codebook(cfg, aux, bsc_third)
        a = simulate(cfg, aux, bsc_third, trials=100, seed=11, threads=1,
                     codebook=cb)
        b = simulate(cfg, aux, bsc_third, trials=100, seed=11, threads=4,
                     codebook=cb)
        da, db = a.to_dict(), b.to_dict()
        da.pop("wall_seconds"), db.pop("wall_seconds")
        assert da == db

    def test_report_shape(self, aux, bsc_third):
        cfg = CodeConfig(n=6, r1e=0.1, q2=0.2, eps=0.5, seed=2)
        rep = simulate(cfg, aux, bsc_third, trials=50, seed=3)
        d = rep.to_dict()
        for key in ("pe_y1", "pe_y2", "pe_y3", "pe_y1_ci95", "trials",
                    "pairing_failure_fraction"):
            assert key in d
        lo, hi = d["pe_y1_ci95"]
        assert lo <= d["pe_y1"] <= hi


class TestWilson:
    def test_contains_point_estimate(self):
        for k, m in ((0, 10), (5, 10), (10, 10), (3, 7)):
            lo, hi = wilson_interval(k, m)
            assert lo <= k / m <= hi
            assert 0.0 <= lo and hi <= 1.0

    def test_empty(self):
        assert wilson_interval(0, 0) == (0.0, 1.0)
