import numpy as np
import pytest

from dkglab import fieldio
from dkglab.dkg import HalfWaveState, SpinorField
from dkglab.spectral import ComplexScalarField, make_grid

GRID = make_grid(16, 3.5)


@pytest.fixture
def rng():
    return np.random.default_rng(11)


def rand(rng, shape):
    return rng.standard_normal(shape) + 1j * rng.standard_normal(shape)


def test_scalar_csv_round_trip(rng):
    f = ComplexScalarField(GRID, rand(rng, GRID.N))
    text = fieldio.scalar_to_csv(f)
    assert text.splitlines()[0] == "k,xi,re,im"
    assert text.splitlines()[1].startswith("-8,")
    back = fieldio.scalar_from_csv(text)
    assert back.grid.N == GRID.N and back.grid.L == pytest.approx(GRID.L, rel=1e-15)
    np.testing.assert_array_equal(back.coeffs, f.coeffs)


def test_scalar_json_round_trip(rng):
    f = ComplexScalarField(GRID, rand(rng, GRID.N))
    back = fieldio.scalar_from_json(fieldio.scalar_to_json(f))
    assert back.grid == GRID
    np.testing.assert_array_equal(back.coeffs, f.coeffs)


def test_spinor_round_trips(rng):
    psi = SpinorField.from_array(GRID, rand(rng, (2, GRID.N)))
    text = fieldio.spinor_to_csv(psi)
    assert text.splitlines()[0] == "component,k,xi,re,im"
    np.testing.assert_array_equal(fieldio.spinor_from_csv(text).coeffs, psi.coeffs)
    np.testing.assert_array_equal(fieldio.spinor_from_json(fieldio.spinor_to_json(psi)).coeffs,
                                  psi.coeffs)


def test_snapshot_round_trips(rng):
    st = HalfWaveState.unpack(0.25, GRID, rand(rng, (6, GRID.N)))
    back = fieldio.snapshot_from_binary(fieldio.snapshot_to_binary(st))
    assert back.t == 0.25 and back.grid == GRID
    np.testing.assert_array_equal(back.pack(), st.pack())
    back = fieldio.snapshot_from_csv(fieldio.snapshot_to_csv(st), t=0.25)
    np.testing.assert_array_equal(back.pack(), st.pack())


def test_binary_layout(rng):
    c = rand(rng, GRID.N)
    blob = fieldio.pack_binary(GRID, {"u": c}, t=1.5)
    assert blob[:8] == b"DKGFLD01"
    assert len(blob) == 8 + 4 + 8 + 8 + 4 + 2 + 1 + 16 * GRID.N
    assert np.frombuffer(blob[-16 * GRID.N:], dtype="<c16").tolist() == c.tolist()


def test_binary_rejects_bad_input(rng):
    blob = fieldio.pack_binary(GRID, {"u": rand(rng, GRID.N)})
    with pytest.raises(ValueError, match="magic"):
        fieldio.unpack_binary(b"XXXXXXXX" + blob[8:])
    with pytest.raises(ValueError, match="truncated"):
        fieldio.unpack_binary(blob[:-1])
    with pytest.raises(ValueError):
        fieldio.pack_binary(GRID, {"u": np.zeros(3)})
    with pytest.raises(ValueError, match="lacks"):
        fieldio.snapshot_from_binary(blob)


def test_atomic_write_and_read_snapshot(tmp_path, rng):
    st = HalfWaveState.unpack(0.0, GRID, rand(rng, (6, GRID.N)))
    p = fieldio.atomic_write(tmp_path / "sub" / "s.bin", fieldio.snapshot_to_binary(st))
    np.testing.assert_array_equal(fieldio.read_snapshot(p).pack(), st.pack())
    p = fieldio.atomic_write(tmp_path / "s.csv", fieldio.snapshot_to_csv(st))
    np.testing.assert_array_equal(fieldio.read_snapshot(p).pack(), st.pack())
    assert sorted(x.name for x in tmp_path.iterdir()) == ["s.csv", "sub"]


def test_fmt_round_trips():
    for x in (0.1, 1 / 3, np.pi * 1e-300, -2.5e17):
        assert float(fieldio.fmt(x)) == x
