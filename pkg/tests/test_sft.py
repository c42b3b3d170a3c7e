import numpy as np
import pytest

from thcover.spectrum import Spectrum
from thcover.sft import (
    SftSpec,
    SftSystem,
    check_primitive,
    sft_extremes,
    sft_predict,
    sft_pressure,
    sft_spectrum,
    transfer_level,
)
from thcover.symbolic import Word
from thcover.thermo import (
    DegenerateSpectrumError,
    Potential,
    cylinder_measure,
    gibbs_chain,
    normalize,
    pressure,
)

GOLDEN = SftSpec.golden_mean()
CONST = Potential(1, [-1.0, -1.0], normalized=True)
BERN = Potential.bernoulli(0.25)
LOG_PHI = np.log2((1 + np.sqrt(5)) / 2)
L43 = np.log2(4.0 / 3.0)


def random_normalized(seed, max_memory=4):
    rng = np.random.default_rng(seed)
    m = int(rng.integers(1, max_memory + 1))
    return normalize(Potential(m, rng.uniform(-3.0, 0.0, size=1 << m)))


def test_golden_mean_pressure_and_dimension():
    assert sft_pressure(GOLDEN, CONST, 1.0) == pytest.approx(LOG_PHI - 1, abs=1e-9)
    sys_ = SftSystem(GOLDEN, CONST)
    assert sys_.dim == pytest.approx(LOG_PHI, abs=1e-9)


def test_golden_mean_degenerate_spectrum():
    t_min, t_peak, t_max, h_r, dim = sft_extremes(GOLDEN, CONST)
    assert (t_min, t_peak, t_max) == pytest.approx((1, 1, 1), abs=1e-10)
    assert h_r == pytest.approx(LOG_PHI, abs=1e-9)
    assert sft_spectrum(GOLDEN, CONST, 1.0) == pytest.approx(LOG_PHI, abs=1e-9)
    assert np.isnan(sft_spectrum(GOLDEN, CONST, 1.3))


def test_golden_mean_bernoulli_extremes_cycle_oracle():
    # allowed cycles on the 2-state graph minus the 1->1 edge: the 0-loop and
    # the 01-cycle; the all-ones local entropy is excluded
    t_min, t_peak, t_max, h_r, dim = sft_extremes(GOLDEN, BERN)
    assert t_max == pytest.approx(2.0, abs=1e-12)
    assert t_min == pytest.approx((2 + L43) / 2, abs=1e-12)


def test_full_shift_mask_reduces_exactly():
    full = SftSpec.full_shift()
    for pot in (BERN, normalize(Potential.from_entries({"00": 0.0, "01": -2.0, "10": -1.0, "11": 0.0}))):
        sys_ = SftSystem(full, pot)
        sp = Spectrum(pot)
        assert transfer_level(full, pot) == pot.memory
        for q in (-4.0, 0.0, 1.0, 3.5):
            assert sys_.pressure(q) == sp.pressure(q)
        e1, e2 = sys_.spectrum.extremes(), sp.extremes()
        assert (e1.t_min, e1.t_max) == (e2.t_min, e2.t_max)
        for t in (0.9, 1.1):
            assert sys_.entropy(t) == sp.entropy(t)


def test_masked_pressure_below_full():
    for seed in range(6):
        pot = random_normalized(seed)
        sys_ = SftSystem(GOLDEN, pot)
        sp = Spectrum(pot)
        for q in np.linspace(-4, 4, 9):
            assert sys_.pressure(q) <= sp.pressure(q) + 1e-10
        assert sys_.pressure_at_one <= 1e-10


def test_restricted_spectrum_below_full():
    sys_ = SftSystem(GOLDEN, BERN)
    sp = Spectrum(BERN)
    ext = sys_.spectrum.extremes()
    for t in np.linspace(ext.t_min + 1e-3, ext.t_max - 1e-3, 9):
        ea = sys_.entropy(t)
        e = sp.entropy(t)
        assert ea <= e + 1e-9


def test_local_entropy_shift_identity():
    # mu_A(w) * 2^{(windows) P_A} / mu(w) depends only on the boundary states
    sys_ = SftSystem(GOLDEN, BERN)
    chain_full = gibbs_chain(sys_.pot)
    chain_a = sys_.chain()
    P_A = sys_.pressure_at_one
    M = sys_.level
    groups: dict[tuple[int, int], set] = {}
    for n in range(M, 13):
        for code in range(1 << n):
            w = Word.from_code(code, n)
            if not sys_.sft.word_admissible(w):
                continue
            mu_a = cylinder_measure(chain_a, w)
            mu = cylinder_measure(chain_full, w)
            ratio = np.log2(mu_a) - np.log2(mu) + (n - M + 1) * P_A
            key = (code & ((1 << (M - 1)) - 1), code >> (n - M + 1))
            groups.setdefault(key, set()).add(round(ratio, 9))
    assert groups
    for key, vals in groups.items():
        assert len(vals) == 1, (key, vals)


def test_predictions_golden_mean():
    pred = sft_predict(GOLDEN, CONST, 1 / 0.2)
    assert pred.covered_empty and pred.dim_covered == 0.0
    pred = sft_predict(GOLDEN, CONST, 1 / 1.2)
    assert pred.escape_empty and pred.dim_escape == 0.0
    pred = sft_predict(GOLDEN, CONST, 1 / 0.5)
    assert pred.dim_covered == pytest.approx(0.5 + LOG_PHI - 1, abs=1e-9)
    assert not pred.covered_empty
    # emptiness flag flips exactly across -P_A
    P_A = LOG_PHI - 1
    assert sft_predict(GOLDEN, CONST, 1 / (-P_A - 1e-6)).covered_empty
    assert not sft_predict(GOLDEN, CONST, 1 / (-P_A + 1e-6)).covered_empty


def test_nonprimitive_rejected():
    with pytest.raises(DegenerateSpectrumError):
        SftSystem(SftSpec.from_strings(["01", "10"]), BERN)
    with pytest.raises(DegenerateSpectrumError):
        SftSystem(SftSpec.from_strings(["0", "1"]), BERN)
    # period-2 graph: forbid 00 and 11, leaving the alternating 2-cycle
    with pytest.raises(DegenerateSpectrumError):
        check_primitive(SftSpec.from_strings(["00", "11"]), 2)


def test_admissibility_masks():
    spec = SftSpec.from_strings(["11", "000"])
    for n in range(1, 10):
        mask = spec.admissible_mask(n)
        for code in range(1 << n):
            w = Word.from_code(code, n)
            s = str(w)
            want = "11" not in s and "000" not in s
            assert bool(mask[code]) == want


def test_sft_file_roundtrip(tmp_path):
    spec = SftSpec.from_strings(["11", "1001"])
    path = tmp_path / "x.sft"
    spec.write(path)
    back = SftSpec.read(path)
    assert back == spec
    bad = tmp_path / "bad.sft"
    bad.write_text("allow = 01\n")
    with pytest.raises(ValueError, match="forbid"):
        SftSpec.read(bad)


def test_predictions_respect_band_structure():
    sys_ = SftSystem(GOLDEN, BERN)
    prof = sys_.summary
    # inside the linear band the covered dimension is s + P_A
    s = (-prof.P_A + prof.covered_band_top) / 2
    pred = sft_predict(GOLDEN, BERN, 1 / s, system=sys_)
    assert pred.dim_covered == pytest.approx(s + prof.P_A, abs=1e-10)
    # far above the peak both dimensions hit the subshift dimension
    pred_top = sft_predict(GOLDEN, BERN, 1 / (prof.t_peak + 1e-3), system=sys_)
    assert pred_top.dim_covered == pytest.approx(sys_.dim, abs=1e-9)
