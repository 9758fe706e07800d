from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given, strategies as st

import oracles
from dmcss.baselines import (
    DCRK,
    DMCSS,
    EPSK,
    GCSS,
    LORA,
    SSK_ICS,
    BaselineSymbol,
    Scheme,
    SchemeId,
    SskVariant,
    UnsupportedSchemeError,
    bit_fields,
    candidate_waveforms,
    dcrk_rates,
    deinterleave,
    detect_bits,
    detect_dcrk,
    detect_gcss,
    detect_gcss_batch,
    detect_lora,
    detect_ssk_ics,
    interleave,
    interleaver_shape,
    modulate_bits,
    modulate_dcrk,
    modulate_epsk,
    modulate_gcss,
    modulate_lora,
    modulate_ssk_ics,
    scheme_bits_per_symbol,
    spectral_efficiency,
)
from dmcss.channels import apply_awgn, sigma_for_ebn0
from dmcss.css_core import inner_product, pack_bits, symbol_energy, unpack_bits, up_chirp
from dmcss.detectors import correlation_detect, correlation_metrics

DETECTABLE = [LORA, DMCSS, SSK_ICS, GCSS, DCRK]


def all_words(scheme, lam):
    width = scheme_bits_per_symbol(scheme, lam)
    return unpack_bits(np.arange(1 << width), width)


# --- registry --------------------------------------------------------------


def test_scheme_parse():
    assert SchemeId.parse("DM-CSS") == DMCSS
    assert SchemeId.parse("ssk-ics-lora") == SSK_ICS
    assert SchemeId.parse("dcrk_css").tag is Scheme.DCRK
    with pytest.raises(ValueError):
        SchemeId.parse("fsk")
    with pytest.raises(ValueError):
        SchemeId(Scheme.DCRK, Mc=6)


@pytest.mark.parametrize(
    "scheme, lam, bits",
    [(DMCSS, 9, 19), (GCSS, 6, 10), (DCRK, 6, 9), (LORA, 7, 7), (SSK_ICS, 7, 9), (EPSK, 7, 10)],
)
def test_bits_per_symbol(scheme, lam, bits):
    assert scheme_bits_per_symbol(scheme, lam) == bits


@pytest.mark.parametrize("lam", range(6, 13))
def test_se_table(lam):
    n = 2 ** lam
    assert spectral_efficiency(LORA, lam) == Fraction(lam, n)
    assert spectral_efficiency(DMCSS, lam) == Fraction(2 * lam + 1, n)
    assert spectral_efficiency(EPSK, lam) == Fraction(lam - 1 + 2 * 2, n)
    assert spectral_efficiency(SSK_ICS, lam) == Fraction(lam + 2, n)
    assert spectral_efficiency(GCSS, lam) == Fraction(2 * (lam - 1), n)
    assert spectral_efficiency(DCRK, lam) == Fraction(lam + 3, n)


@pytest.mark.parametrize("scheme", DETECTABLE + [EPSK])
def test_bit_fields_cover_word(scheme):
    fields = bit_fields(scheme, 6)
    covered = sorted(i for s in fields.values() for i in range(s.start, s.stop))
    assert covered == list(range(scheme_bits_per_symbol(scheme, 6)))


def test_epsk_has_no_detector():
    with pytest.raises(UnsupportedSchemeError):
        detect_bits(EPSK, np.ones((1, 16)), 4)


# --- roundtrips and oracle equivalence, all schemes --------------------------


@pytest.mark.parametrize("scheme", DETECTABLE)
@pytest.mark.parametrize("lam", [4, 5, 6])
def test_noiseless_roundtrip_exhaustive(scheme, lam):
    words = all_words(scheme, lam)
    assert np.array_equal(detect_bits(scheme, modulate_bits(scheme, words, lam), lam), words)


@pytest.mark.parametrize("scheme", [LORA, SSK_ICS, GCSS, DCRK])
def test_fast_detector_matches_correlation_noiseless(scheme):
    cands = candidate_waveforms(scheme, 4)
    fast = pack_bits(detect_bits(scheme, cands, 4))
    assert np.array_equal(fast, correlation_detect(cands, cands))
    assert np.array_equal(fast, np.arange(len(cands)))


@pytest.mark.parametrize("scheme", [LORA, SSK_ICS, DCRK])
def test_exact_ml_detectors_match_correlation_in_awgn(scheme, rng):
    # for these schemes the fast detector evaluates exactly |<r, candidate>|
    lam, trials = 4, 10_000
    nb = scheme_bits_per_symbol(scheme, lam)
    bits = rng.integers(0, 2, (trials, nb), dtype=np.uint8)
    r = apply_awgn(modulate_bits(scheme, bits, lam), sigma_for_ebn0(3.0, 16, nb), rng)
    fast = pack_bits(detect_bits(scheme, r, lam))
    corr = correlation_detect(r, candidate_waveforms(scheme, lam))
    m = correlation_metrics(r, candidate_waveforms(scheme, lam))
    rows = np.arange(trials)
    dis = fast != corr
    assert dis.mean() <= 1e-3
    assert np.all(np.abs(m[rows, fast] - m[rows, corr])[dis] <= 1e-6 * m[rows, corr][dis])


def test_candidate_table_readonly():
    with pytest.raises(ValueError):
        candidate_waveforms(LORA, 4)[0, 0] = 0


# --- LoRa --------------------------------------------------------------------


def test_lora_examples():
    np.testing.assert_allclose(modulate_lora(0, 5), up_chirp(5), atol=1e-15)
    np.testing.assert_allclose(modulate_lora(3, 3), oracles.lora(8, 3), atol=1e-13)
    with pytest.raises(ValueError):
        modulate_lora(8, 3)


@given(st.integers(2, 12), st.data())
def test_lora_unit_energy(lam, data):
    k = data.draw(st.integers(0, 2**lam - 1))
    assert abs(symbol_energy(modulate_lora(k, lam)) - 1.0) <= 1e-12


def test_lora_detect_exhaustive_lambda8():
    n = 256
    assert all(detect_lora(modulate_lora(k, 8), 8) == k for k in range(n))


def test_lora_orthogonal():
    cands = candidate_waveforms(LORA, 6)
    gram = np.abs(cands @ cands.conj().T)
    off = gram - np.diag(np.diag(gram))
    assert off.max() <= 1e-9 * 64


# --- SSK-ICS-LoRa --------------------------------------------------------------


def test_ssk_up_is_chirp():
    sym = BaselineSymbol(SSK_ICS, 0, variant=SskVariant.UP)
    np.testing.assert_allclose(modulate_ssk_ics(sym, 6), up_chirp(6), atol=1e-15)


@pytest.mark.parametrize("lam", [2, 3, 4, 7, 10])
def test_interleaver_is_invertible_permutation(lam, rng):
    x = rng.standard_normal(1 << lam)
    y = interleave(x, lam)
    assert sorted(y) == sorted(x)
    np.testing.assert_array_equal(deinterleave(y, lam), x)
    np.testing.assert_array_equal(interleave(deinterleave(x, lam), lam), x)


def test_interleaver_shape_odd_lambda():
    assert interleaver_shape(5) == (8, 4)
    assert interleaver_shape(6) == (8, 8)


def test_ssk_interleaved_down_oracle():
    sym = BaselineSymbol(SSK_ICS, 5, variant=SskVariant.INTERLEAVED_DOWN)
    expected = oracles.block_interleave(oracles.lora(16, 5, up=False), 4, 4)
    np.testing.assert_allclose(modulate_ssk_ics(sym, 4), expected, atol=1e-13)


def test_ssk_correlation_magnitudes():
    cands = candidate_waveforms(SSK_ICS, 6)
    s = modulate_ssk_ics(BaselineSymbol(SSK_ICS, 9, variant=SskVariant.UP), 6)
    m = correlation_metrics(s, cands)
    assert m[9] == pytest.approx(64)
    same_variant = np.delete(m[:64], 9)
    assert same_variant.max() <= 1e-9


def test_ssk_scalar_detect():
    sym = BaselineSymbol(SSK_ICS, 17, variant=SskVariant.INTERLEAVED_UP)
    assert detect_ssk_ics(modulate_ssk_ics(sym, 6), 6) == sym


# --- GCSS ------------------------------------------------------------------------


def test_gcss_examples():
    s = modulate_gcss(BaselineSymbol(GCSS, 0, bins=(0, 8)), 4)
    assert s[0] == pytest.approx(2)
    expected = [a + b for a, b in zip(oracles.lora(8, 1), oracles.lora(8, 6))]
    np.testing.assert_allclose(modulate_gcss(BaselineSymbol(GCSS, 1, bins=(1, 6)), 3), expected, atol=1e-13)
    with pytest.raises(ValueError):
        modulate_gcss(BaselineSymbol(GCSS, 1, bins=(1, 3)), 3)


@given(st.integers(2, 10), st.data())
def test_gcss_energy(lam, data):
    n = 1 << lam
    k1 = data.draw(st.integers(0, n // 2 - 1))
    k2 = data.draw(st.integers(n // 2, n - 1))
    s = modulate_gcss(BaselineSymbol(GCSS, k1, bins=(k1, k2)), lam)
    assert abs(symbol_energy(s) - 2.0) <= 1e-12


@given(st.integers(0, 2**32 - 1))
def test_gcss_respects_group_boundaries(seed):
    rng = np.random.default_rng(seed)
    r = rng.standard_normal((8, 64)) + 1j * rng.standard_normal((8, 64))
    bins = detect_gcss_batch(r, 6)
    assert np.all(bins[:, 0] < 32) and np.all(bins[:, 1] >= 32)


def test_gcss_scalar_detect():
    sym = BaselineSymbol(GCSS, 3, bins=(3, 50))
    assert detect_gcss(modulate_gcss(sym, 6), 6) == sym


# --- DCRK-CSS ------------------------------------------------------------------


def test_dcrk_rate_set_contains_plain_chirp():
    assert list(dcrk_rates(8)) == [1, 2, 3, 4, 5, 6, 7, 8]
    np.testing.assert_allclose(
        modulate_dcrk(BaselineSymbol(DCRK, 0, rate=1), 6), up_chirp(6), atol=1e-14
    )


@pytest.mark.parametrize("m", range(8))
def test_dcrk_oracle(m):
    got = modulate_dcrk(BaselineSymbol(DCRK, 3, rate=m), 3)
    np.testing.assert_allclose(got, oracles.dcrk(8, 3, m + 1), atol=1e-13)
    assert abs(symbol_energy(got) - 1.0) <= 1e-12


def test_dcrk_range_checks():
    with pytest.raises(ValueError):
        modulate_dcrk(BaselineSymbol(DCRK, 0, rate=8), 4)
    with pytest.raises(ValueError):
        modulate_dcrk(BaselineSymbol(DCRK, 16, rate=0), 4)


@given(st.integers(0, 63), st.integers(0, 7), st.floats(1e-3, 1e3), st.integers(0, 2**32 - 1))
def test_dcrk_scale_invariance(k, m, c, seed):
    rng = np.random.default_rng(seed)
    r = modulate_dcrk(BaselineSymbol(DCRK, k, rate=m), 6) + 0.5 * (
        rng.standard_normal(64) + 1j * rng.standard_normal(64)
    )
    assert detect_dcrk(r, 6) == detect_dcrk(c * r, 6)


def test_dcrk_noiseless_peak_is_n():
    from dmcss.baselines import _rate_chirps
    from dmcss.spectral import dft_fast

    s = modulate_dcrk(BaselineSymbol(DCRK, 21, rate=5), 6)
    spec = np.abs(dft_fast(s[None, :] * _rate_chirps(64, 8).conj()))
    assert spec[5, 21] == pytest.approx(64)
    spec[5, 21] = 0
    assert spec.max() < 64


# --- ePSK-LoRa -------------------------------------------------------------------


def test_epsk_degenerate_is_lora():
    scheme = SchemeId(Scheme.EPSK, Nb=1)
    s = modulate_epsk(BaselineSymbol(scheme, 5, phases=(0,)), 4)
    np.testing.assert_allclose(s, modulate_lora(5, 4), atol=1e-13)


def test_epsk_oracle():
    got = modulate_epsk(BaselineSymbol(EPSK, 1, phases=(1, 3)), 3)
    np.testing.assert_allclose(got, oracles.epsk(8, 1, (1, 3), 2, 4), atol=1e-12)


def test_epsk_energy_n16():
    for k in range(8):
        for p in [(0, 0), (1, 2), (3, 3)]:
            s = modulate_epsk(BaselineSymbol(EPSK, k, phases=p), 4)
            assert abs(symbol_energy(s) - 2.0) <= 1e-12


def test_epsk_range_checks():
    with pytest.raises(ValueError):
        modulate_epsk(BaselineSymbol(EPSK, 8, phases=(0, 0)), 4)
    with pytest.raises(ValueError):
        modulate_epsk(BaselineSymbol(EPSK, 0, phases=(0, 4)), 4)


def test_epsk_bits_roundtrip_through_modulator():
    words = all_words(EPSK, 4)
    s = modulate_bits(EPSK, words, 4)
    # every word gives a distinct waveform
    assert len({tuple(np.round(row, 9)) for row in s}) == len(words)
