import numpy as np
import pytest

from ldpcbench.codec import DecodeParams, decode_batch
from ldpcbench.errors import InputError
from ldpcbench.phychain import (
    BIT_PATTERNS,
    CONSTELLATION,
    ChannelConfig,
    awgn,
    build_llr_batch,
    demap_16qam,
    load_llr_batch,
    map_16qam,
    save_llr_batch,
    transmit,
)

INV_SQRT10 = 1.0 / np.sqrt(10.0)


def oracle_demap(y: complex, n0: float) -> list[float]:
    """Brute-force max-log demap over the 16 hypotheses (independent of the
    production path: dict of symbols built directly from the formula)."""
    syms = {}
    for b0 in (0, 1):
        for b1 in (0, 1):
            for b2 in (0, 1):
                for b3 in (0, 1):
                    re = (1 - 2 * b0) * (2 - (1 - 2 * b2))
                    im = (1 - 2 * b1) * (2 - (1 - 2 * b3))
                    syms[(b0, b1, b2, b3)] = (re + 1j * im) * INV_SQRT10
    out = []
    for b in range(4):
        d1 = min(abs(y - s) ** 2 for p, s in syms.items() if p[b] == 1)
        d0 = min(abs(y - s) ** 2 for p, s in syms.items() if p[b] == 0)
        out.append((d1 - d0) / n0)
    return out


class TestMapper:
    def test_all_zero_group(self):
        sym = map_16qam(np.array([0, 0, 0, 0], dtype=np.uint8))
        assert np.allclose(sym[0], (1 + 1j) * INV_SQRT10)

    def test_all_one_group(self):
        sym = map_16qam(np.array([1, 1, 1, 1], dtype=np.uint8))
        assert np.allclose(sym[0], (-3 - 3j) * INV_SQRT10)

    def test_unit_average_energy(self):
        # brute force over all 16 patterns
        assert abs(np.mean(np.abs(CONSTELLATION) ** 2) - 1.0) < 1e-6

    def test_length_must_be_multiple_of_four(self):
        with pytest.raises(InputError):
            map_16qam(np.array([0, 1, 0], dtype=np.uint8))

    def test_gray_property(self):
        # horizontally or vertically adjacent points differ in exactly 1 bit
        pts = {
            (round(s.real / INV_SQRT10), round(s.imag / INV_SQRT10)): tuple(p)
            for p, s in zip(BIT_PATTERNS, CONSTELLATION)
        }
        levels = (-3, -1, 1, 3)
        checked = 0
        for re in levels:
            for im in levels:
                for dre, dim in ((2, 0), (0, 2)):
                    if (re + dre, im + dim) in pts:
                        a, b = pts[(re, im)], pts[(re + dre, im + dim)]
                        assert sum(x != y for x, y in zip(a, b)) == 1
                        checked += 1
        assert checked == 24  # 12 horizontal + 12 vertical adjacencies


class TestAwgn:
    def test_noiseless_is_exact_passthrough(self):
        x = map_16qam(np.arange(64) % 2)
        y = awgn(x, ChannelConfig(seed=1, noiseless=True))
        assert np.array_equal(x, y)

    def test_fixed_seed_reproducible(self):
        x = map_16qam(np.zeros(256, dtype=np.uint8))
        chan = ChannelConfig(es_over_n0_db=8.0, seed=42)
        assert np.array_equal(awgn(x, chan, 5), awgn(x, chan, 5))

    def test_codeword_index_decorrelates(self):
        x = map_16qam(np.zeros(256, dtype=np.uint8))
        chan = ChannelConfig(es_over_n0_db=8.0, seed=42)
        assert not np.array_equal(awgn(x, chan, 0), awgn(x, chan, 1))

    def test_noise_variance_matches_n0(self):
        chan = ChannelConfig(es_over_n0_db=7.0, seed=9)
        x = np.zeros(1_000_000, dtype=np.complex64)
        w = awgn(x, chan)
        var = float(np.mean(np.abs(w) ** 2))
        assert abs(var - chan.n0) / chan.n0 < 0.01

    def test_n0_from_db(self):
        assert abs(ChannelConfig(es_over_n0_db=10.0).n0 - 0.1) < 1e-12
        assert ChannelConfig(es_over_n0_db=0.0).n0 == 1.0


class TestDemapper:
    def test_on_constellation_point_all_positive(self):
        y = np.array([(1 + 1j) * INV_SQRT10], dtype=np.complex64)
        llr = demap_16qam(y, 1.0)
        assert (llr > 0).all()

    def test_origin_is_ambiguous_for_sign_bits(self):
        llr = demap_16qam(np.array([0j], dtype=np.complex64), 1.0)
        assert llr[0] == 0.0 and llr[1] == 0.0

    def test_frozen_oracle_point(self):
        # brute-force over the 16 symbol distances: all four LLRs are 0.8
        y = complex((1 + 1j) * INV_SQRT10)
        expect = oracle_demap(y, 0.5)
        assert np.allclose(expect, [0.8, 0.8, 0.8, 0.8])
        got = demap_16qam(np.array([y], dtype=np.complex64), 0.5)
        assert np.allclose(got, expect, atol=1e-6)

    def test_random_points_match_oracle(self):
        rng = np.random.default_rng(11)
        ys = (rng.standard_normal(64) + 1j * rng.standard_normal(64)).astype(np.complex64)
        got = demap_16qam(ys, 0.37).reshape(64, 4)
        for i in range(64):
            assert np.allclose(got[i], oracle_demap(complex(ys[i]), 0.37), atol=1e-4)

    def test_maxlog_and_exact_agree_in_sign(self):
        # max-log shifts each decision boundary by an approximation error
        # that scales with N0 (measured band: |exact| <= 0.29*N0), so sign
        # agreement is asserted above a noise-scaled threshold
        rng = np.random.default_rng(12)
        ys = (rng.standard_normal(10_000) + 1j * rng.standard_normal(10_000)).astype(np.complex64)
        for n0 in (1.0, 0.5, 0.1):
            a = demap_16qam(ys, n0, "maxlog")
            b = demap_16qam(ys, n0, "exact")
            mask = np.abs(b) > 0.4 * n0
            assert np.array_equal(np.sign(a[mask]), np.sign(b[mask]))
            disagree = np.sign(a) != np.sign(b)
            assert disagree.mean() < 0.07  # boundary band only

    def test_magnitude_grows_as_noise_shrinks(self):
        y = np.array([(0.9 + 1.1j) * INV_SQRT10], dtype=np.complex64)
        mags = [np.abs(demap_16qam(y, n0)) for n0 in (1.0, 0.5, 0.1, 0.01)]
        for lo, hi in zip(mags, mags[1:]):
            assert (hi >= lo).all()

    def test_bad_method_and_n0(self):
        y = np.array([0j], dtype=np.complex64)
        with pytest.raises(InputError):
            demap_16qam(y, 0.5, "fancy")
        with pytest.raises(InputError):
            demap_16qam(y, 0.0)


class TestTransmit:
    def test_block_shapes(self):
        blk = transmit(np.zeros(1024, dtype=np.uint8), ChannelConfig(seed=3))
        assert blk.symbols.shape == (256,)
        assert blk.received.shape == (256,)


class TestLlrBatch:
    def test_paper_shape(self, paper_code):
        cfg, pcm = paper_code.config, paper_code.pcm
        batch = build_llr_batch(5, cfg, pcm, ChannelConfig(seed=21))
        assert batch.llrs.shape == (5, 1024)
        assert batch.truth_info.shape == (5, 512)
        assert batch.llrs.dtype == np.float32

    def test_identical_config_identical_hash(self, paper_code):
        cfg, pcm = paper_code.config, paper_code.pcm
        chan = ChannelConfig(es_over_n0_db=9.0, seed=77)
        a = build_llr_batch(4, cfg, pcm, chan)
        b = build_llr_batch(4, cfg, pcm, chan)
        assert a.fingerprint == b.fingerprint
        assert np.array_equal(a.llrs, b.llrs)

    def test_seed_changes_hash(self, paper_code):
        cfg, pcm = paper_code.config, paper_code.pcm
        a = build_llr_batch(4, cfg, pcm, ChannelConfig(seed=1))
        b = build_llr_batch(4, cfg, pcm, ChannelConfig(seed=2))
        assert a.fingerprint != b.fingerprint

    def test_prefix_stability_from_keyed_prng(self, paper_code):
        # per-codeword keying: a larger batch extends a smaller one
        cfg, pcm = paper_code.config, paper_code.pcm
        chan = ChannelConfig(es_over_n0_db=8.0, seed=5)
        small = build_llr_batch(3, cfg, pcm, chan)
        big = build_llr_batch(6, cfg, pcm, chan)
        assert np.array_equal(big.llrs[:3], small.llrs)
        assert np.array_equal(big.truth_info[:3], small.truth_info)

    def test_frozen_tensor_is_readonly(self, paper_code):
        cfg, pcm = paper_code.config, paper_code.pcm
        batch = build_llr_batch(2, cfg, pcm, ChannelConfig(seed=4))
        with pytest.raises(ValueError):
            batch.llrs[0, 0] = 1.0
        assert batch.verify()

    def test_noiseless_end_to_end_recovery(self, paper_code):
        cfg, pcm = paper_code.config, paper_code.pcm
        batch = build_llr_batch(20, cfg, pcm, ChannelConfig(seed=6, noiseless=True))
        out = decode_batch(batch, DecodeParams(iterations=4), cfg, pcm)
        assert np.array_equal(out.info_bits, batch.truth_info)

    def test_file_round_trip(self, paper_code, tmp_path):
        cfg, pcm = paper_code.config, paper_code.pcm
        batch = build_llr_batch(7, cfg, pcm, ChannelConfig(es_over_n0_db=6.5, seed=8))
        path = tmp_path / "batch.llrb"
        save_llr_batch(batch, path)
        loaded = load_llr_batch(path)
        assert loaded.fingerprint == batch.fingerprint
        assert np.array_equal(loaded.llrs, batch.llrs)
        assert np.array_equal(loaded.truth_info, batch.truth_info)
        assert loaded.header == batch.header

    def test_corrupt_file_rejected(self, paper_code, tmp_path):
        cfg, pcm = paper_code.config, paper_code.pcm
        batch = build_llr_batch(2, cfg, pcm, ChannelConfig(seed=9))
        path = tmp_path / "batch.llrb"
        save_llr_batch(batch, path)
        raw = bytearray(path.read_bytes())
        raw[-1] ^= 0xFF
        path.write_bytes(raw)
        with pytest.raises(InputError, match="hash"):
            load_llr_batch(path)

    def test_bad_magic_rejected(self, tmp_path):
        path = tmp_path / "junk.llrb"
        path.write_bytes(b"NOPE" + b"\x00" * 64)
        with pytest.raises(InputError, match="LLRB"):
            load_llr_batch(path)
