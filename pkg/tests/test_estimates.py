import json
from pathlib import Path

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from dkglab import estimates as E
from dkglab.baselines import regenerate
from dkglab.spectral import ComplexScalarField, make_grid

BASELINES = Path(__file__).resolve().parents[1] / "baselines" / "v1"


# --- ensembles and reports ------------------------------------------------------------

def test_ensemble_streams_are_keyed():
    ens = E.EnsembleSpec(seed=4)
    a = ens.rng(1, 64, 0).standard_normal(3)
    assert np.array_equal(a, ens.rng(1, 64, 0).standard_normal(3))
    assert not np.array_equal(a, ens.rng(1, 64, 1).standard_normal(3))
    assert ens.band(64) == 16 and E.EnsembleSpec(bandwidth=5).band(64) == 5
    with pytest.raises(ValueError):
        E.EnsembleSpec(count=0)
    with pytest.raises(ValueError):
        E.EnsembleSpec(distribution="uniform")


def test_report_growth_and_json():
    rep = E.RatioReport("x", 3.0, {64: 1.0, 128: 2.0, 256: 3.0}, label="y", metadata={"a": np.float64(1.5)})
    assert rep.growth == [2.0, 1.5] and rep.max_growth == 2.0 and rep.growing()
    back = E.RatioReport.from_dict(json.loads(rep.to_json()))
    assert back.per_resolution == rep.per_resolution and back.metadata == {"a": 1.5}
    assert not E.RatioReport("z", per_resolution={64: 2.0, 128: 1.0}).growing()
    assert E.RatioReport("z").max_growth == 1.0


reports = st.builds(
    E.RatioReport, st.just("r"), st.floats(0, 10),
    st.dictionaries(st.sampled_from([64, 128, 256]), st.floats(0, 10)),
    st.integers(0, 3), st.booleans())


@given(reports, reports, reports)
def test_merge_is_associative(a, b, c):
    left = a.merge(b).merge(c)
    right = a.merge(b.merge(c))
    assert left.sup_ratio == right.sup_ratio and left.violations == right.violations
    assert left.per_resolution == right.per_resolution and left.exact == right.exact


# --- exact checks ----------------------------------------------------------------------

def test_algebra_small():
    rep = E.check_algebra(E.EnsembleSpec(count=2000))
    assert rep.exact and rep.violations == 0 and rep.sup_ratio <= 1e-15
    assert len(rep.metadata["residuals"]) == 10


def test_null_structure_small():
    rep = E.check_null_structure(E.EnsembleSpec(count=50), n=16)
    assert rep.violations == 0 and rep.sup_ratio < 1e-12
    assert rep.metadata["max_sum_residual"] < 1e-12


def test_lemma_terms_by_hand():
    lhs, rhs = E.lemma21_terms(1.0, 0.0, 2.0, 0.0, 1)
    assert lhs == 1.0 and rhs == 0.5 * (3 + 1 + 2)
    # the inequality is tight here: xi1 = -xi2 on the characteristics
    lhs, rhs = E.lemma21_terms(3.0, -3.0, -3.0, -3.0, -1)
    assert lhs == rhs == 3.0


def test_lemma21_exhaustive_and_random():
    rep = E.check_lemma21(exhaustive=4)
    assert rep.violations == 0 and rep.sup_ratio == 1.0
    assert rep.metadata["evaluations"] == 2 * 9 ** 4
    rep = E.check_lemma21(E.EnsembleSpec(seed=1, count=20_000))
    assert rep.violations == 0 and rep.sup_ratio <= 1.0 + 1e-12


@settings(max_examples=200)
@given(*[st.floats(-1e3, 1e3)] * 4, st.sampled_from([1, -1]))
def test_lemma21_inequality(x1, t1, x2, t2, sign):
    lhs, rhs = E.lemma21_terms(x1, t1, x2, t2, sign)
    assert lhs <= rhs + 1e-9 * (abs(x1) + abs(t1) + abs(x2) + abs(t2) + 1)


def test_free_wave_product_identity():
    grid = make_grid(64, 2 * np.pi)
    rng = np.random.default_rng(3)
    f, g = E.random_band_limited(grid, rng), E.random_band_limited(grid, rng)
    rep = E.check_free_wave_product(f, g)
    assert rep.max_rel_error < 1e-10 and rep.ratio == pytest.approx(1.0, rel=1e-10)
    rep = E.check_free_wave_product(f, g, p=1.5, T_w=4 * np.pi)
    assert rep.max_rel_error < 1e-10
    assert rep.ratio == pytest.approx(2 ** (1 / 1.5), rel=1e-10) and rep.expected_ratio == pytest.approx(rep.ratio)


def test_free_wave_product_single_modes_by_hand():
    # f = e^{2ix}, g = e^{ix}: uv = e^{3ix + it} sits at xi = 3, tau = 1 with m = 1
    grid = make_grid(16, 2 * np.pi)
    f = ComplexScalarField.from_physical(grid, np.exp(2j * grid.x))
    g = ComplexScalarField.from_physical(grid, np.exp(1j * grid.x))
    assert E.check_free_wave_product(f, g).max_rel_error < 1e-12


def test_free_wave_product_rejects_bad_input():
    grid = make_grid(32, 2 * np.pi)
    f = E.random_band_limited(grid, np.random.default_rng(0))
    with pytest.raises(ValueError, match="whole number"):
        E.check_free_wave_product(f, f, T_w=3.0)
    wide = ComplexScalarField(grid, np.ones(32))
    with pytest.raises(ValueError, match="vanish"):
        E.check_free_wave_product(wide, f)


# --- random fields and ratio sweeps ----------------------------------------------------

def test_random_field_envelope_and_band():
    lat = E.Lattice(32)
    ens = E.EnsembleSpec(distribution="band-limited")
    c = E.random_field(lat, ens.rng(0), ens, "line", -1)
    mod = lat.tau[None, :] - lat.xi[:, None]
    assert c.shape == (2, 32, 32)
    assert np.all(c[:, (np.abs(mod) > 8)] == 0)
    single = E.random_field(lat, ens.rng(0), E.EnsembleSpec(distribution="single-mode"))
    assert np.count_nonzero(single) == 2


def test_padding_keeps_samples():
    lat = E.Lattice(16)
    c = E.random_field(lat, np.random.default_rng(1), E.EnsembleSpec(), components=1)[0]
    vals = E.padded_samples(c, lat)
    back = E.spectrum_of(vals, lat.padded())
    np.testing.assert_allclose(E.pad_lattice(c, 32), back, atol=1e-12)


def test_bilinear_terms():
    bp = E.BilinearParams(0.0, 0.5, 2.0, 0.6, 0.6)
    t = E.bilinear_terms("**2", bp)
    assert (t["a"], t["b"]) == (-1, 1)
    assert t["lhs"] == pytest.approx((-0.5, -0.39, 2.0))
    assert E.bilinear_terms("*1", bp)["psi_prime"] == pytest.approx((-1, -0.0, 0.39, 2.0))
    with pytest.raises(ValueError):
        E.bilinear_terms("*3", bp)


def test_bilinear_sweep_deterministic_and_labelled():
    bp = E.BilinearParams(0.0, 0.5, 2.0, 0.6, 0.6)
    ens = E.EnsembleSpec(seed=2, count=2)
    a = E.estimate_bilinear_constant("*1", bp, ens, (16, 32))
    b = E.estimate_bilinear_constant("*1", bp, ens, (16, 32))
    assert a.to_json() == b.to_json() and a.label == "admissible"
    assert set(a.per_resolution) == {16, 32} and np.isfinite(a.sup_ratio)
    bad = E.BilinearParams(-0.4, 0.5, 2.0, 0.6, 0.6)
    rep = E.estimate_bilinear_constant("**1", bad, ens, (16,))
    assert rep.label == "outside admissible region"
    assert "s>-1/2+1/(2p)" in rep.metadata["failed_conditions"]
    with pytest.raises(ValueError, match="outside"):
        E.estimate_bilinear_constant("**1", bad, ens, (16,), strict=True)


def test_bilinear_ratio_both_signs_dominate_each():
    bp = E.BilinearParams(0.0, 0.5, 2.0, 0.6, 0.6)
    lat = E.Lattice(16)
    rng = np.random.default_rng(0)
    ens = E.EnsembleSpec()
    psi, psi_p = E.random_field(lat, rng, ens, sign=1), E.random_field(lat, rng, ens, sign=-1)
    both = E.bilinear_ratio("*1", bp, psi, psi_p, lat)
    plus = E.bilinear_ratio("*1", bp, psi, psi_p, lat, y_signs=(1,))
    minus = E.bilinear_ratio("*1", bp, psi, psi_p, lat, y_signs=(-1,))
    assert both == max(plus, minus)


def test_corollary_free_wave_factor():
    lat = E.Lattice(32)
    grid = lat.grid
    rng = np.random.default_rng(7)
    f = E.random_band_limited(grid, rng).coeffs
    g = E.random_band_limited(grid, rng).coeffs
    u, v = E.free_wave_field(f, lat, 1), E.free_wave_field(g, lat, -1)
    for p in (2.0, 1.5):
        got = E.corollary_ratio(u, v, lat, 0.9, p)
        assert got == pytest.approx(E.free_wave_factor(2 * np.pi, 1.0, p), rel=1e-10)


def test_corollary_rejects_low_sigma():
    with pytest.raises(ValueError):
        E.check_corollary21(0.5, 2.0)
    rep = E.check_corollary21(0.6, 2.0, E.EnsembleSpec(count=2), (16, 32))
    assert rep.name == "corollary21" and rep.sup_ratio > 0


def test_product_law_labels():
    ok = E.ProductLawParams(0.3, 0.3, 0.0, 0.6, 0.6, 0.0)
    assert all(ok.hypotheses().values())
    rep = E.check_product_law(ok, E.EnsembleSpec(count=2), (16, 32), out_sign=-1)
    assert rep.label == "admissible" and rep.metadata["out_sign"] == -1
    bad = E.ProductLawParams(0.1, 0.1, 0.0, 0.6, 0.6, 0.0)
    assert E.check_product_law(bad, E.EnsembleSpec(count=1), (16,)).label == "outside hypotheses"


def test_embedding_specs():
    sp = E.embedding_specs(2.0, 0.01)
    assert set(sp) == {"2.1", "2.2", "2.3", "2.4"}
    (l, b, idx), (px, qt) = sp["2.4"]
    assert (px, qt) == pytest.approx((4.0, 4.0)) and idx == 2.0
    with pytest.raises(ValueError):
        E.embedding_specs(2.0, 0.01, w=(1.0, 3.0, 2.0))


def test_embeddings_report_reference():
    reps = E.check_embeddings(2.0, E.EnsembleSpec(count=2), 0.01, (16, 32))
    assert len(reps) == 4
    for rep in reps.values():
        assert rep.label.startswith(("bounded", "growing"))
        assert rep.metadata["reference_eps"] == 0.1
        assert len(rep.metadata["excess_growth"]) == 1
    with pytest.raises(ValueError):
        E.check_embeddings(1.0)


# --- versioned baselines ----------------------------------------------------------------

@pytest.mark.parametrize("path", sorted(BASELINES.glob("*.json")), ids=lambda p: p.stem)
def test_baselines_reproduce(path):
    stored = json.loads(path.read_text())
    assert E.RatioReport.from_dict(stored["report"]).sup_ratio > 0
    # regenerate from the recorded recipe; must be bit-identical
    fresh = regenerate(stored["recipe"])
    assert json.loads(fresh.to_json()) == stored["report"]
