"""Chain geometry, schedule, and Hamiltonian construction."""

import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from magchain import ChainSpec, basis_state, build_hamiltonian, schedule, site_labels
from magchain.model import SiteIndex, SiteKind


class TestChainSpec:
    def test_dim_counts_both_sublattices(self):
        assert ChainSpec(n_cells=1).dim == 3
        assert ChainSpec(n_cells=10).dim == 21

    def test_defaults(self):
        spec = ChainSpec(n_cells=2)
        assert spec.g0 == 1.0 and spec.g0_prime == 1.0 and spec.j_hop == 0.0

    @pytest.mark.parametrize("kwargs", [
        dict(n_cells=0),
        dict(n_cells=-3),
        dict(n_cells=2.0),
        dict(n_cells=True),
        dict(n_cells=2, g0=-0.1),
        dict(n_cells=2, g0_prime=0.0),
        dict(n_cells=2, g0_prime=-1.0),
        dict(n_cells=2, j_hop=-0.5),
        dict(n_cells=2, g0=math.inf),
        dict(n_cells=2, j_hop=math.nan),
    ])
    def test_rejects_bad_parameters(self, kwargs):
        with pytest.raises(ValueError):
            ChainSpec(**kwargs)

    def test_numpy_integer_cell_count_accepted(self):
        assert ChainSpec(n_cells=np.int64(3)).dim == 7


class TestSiteIndex:
    def test_flat_layout_alternates_sublattices(self):
        # a1 m1 a2 m2 a3 -> 0 1 2 3 4
        assert SiteIndex(SiteKind.CAVITY, 1).flat_index == 0
        assert SiteIndex(SiteKind.MAGNON, 1).flat_index == 1
        assert SiteIndex(SiteKind.CAVITY, 2).flat_index == 2
        assert SiteIndex(SiteKind.MAGNON, 2).flat_index == 3
        assert SiteIndex(SiteKind.CAVITY, 3).flat_index == 4

    def test_label_roundtrip(self):
        for label in ("a1", "m1", "a11", "m10"):
            assert SiteIndex.from_label(label).label == label

    def test_from_label_normalizes_case_and_space(self):
        assert SiteIndex.from_label(" A3 ") == SiteIndex(SiteKind.CAVITY, 3)

    @pytest.mark.parametrize("text", ["", "b2", "a", "m0x", "a-1", "3a", "a 1"])
    def test_from_label_rejects_garbage(self, text):
        with pytest.raises(ValueError):
            SiteIndex.from_label(text)

    def test_ordinal_must_be_positive(self):
        with pytest.raises(ValueError):
            SiteIndex(SiteKind.CAVITY, 0)

    def test_in_range_allows_one_extra_cavity(self):
        spec = ChainSpec(n_cells=2)
        assert SiteIndex.from_label("a3").in_range(spec)
        assert not SiteIndex.from_label("a4").in_range(spec)
        assert SiteIndex.from_label("m2").in_range(spec)
        assert not SiteIndex.from_label("m3").in_range(spec)

    @given(st.integers(min_value=1, max_value=999),
           st.sampled_from([SiteKind.CAVITY, SiteKind.MAGNON]))
    @settings(max_examples=50, deadline=None)
    def test_label_roundtrip_property(self, ordinal, kind):
        site = SiteIndex(kind, ordinal)
        assert SiteIndex.from_label(site.label) == site


def test_site_labels_order():
    assert site_labels(ChainSpec(n_cells=2)) == ["a1", "m1", "a2", "m2", "a3"]


class TestSchedule:
    def test_quarter_turn_balances_couplings(self):
        spec = ChainSpec(n_cells=2, g0=3.0, g0_prime=2.0, j_hop=0.5)
        point = schedule(spec, math.pi / 2)
        assert point.g == pytest.approx(3.0, abs=1e-15)
        assert point.g_prime == pytest.approx(2.0, abs=1e-15)
        assert point.j_hop == 0.5

    def test_endpoints_are_exact(self):
        spec = ChainSpec(n_cells=2, g0=1.0, g0_prime=1.0)
        start = schedule(spec, 0.0)
        assert start.g == 0.0 and start.g_prime == 2.0
        # cos(pi) is exactly -1.0 in IEEE double, so the end is exact too
        end = schedule(spec, math.pi)
        assert end.g == 2.0 and end.g_prime == 0.0

    @given(st.floats(min_value=-10.0, max_value=10.0),
           st.floats(min_value=0.0, max_value=5.0),
           st.floats(min_value=1e-3, max_value=5.0))
    @settings(max_examples=50, deadline=None)
    def test_couplings_never_negative(self, theta, g0, g0_prime):
        point = schedule(ChainSpec(n_cells=1, g0=g0, g0_prime=g0_prime), theta)
        assert point.g >= 0.0
        assert point.g_prime >= 0.0

    @given(st.floats(min_value=-6.0, max_value=6.0))
    @settings(max_examples=50, deadline=None)
    def test_schedule_is_periodic(self, theta):
        spec = ChainSpec(n_cells=1, g0=1.5, g0_prime=0.7)
        a = schedule(spec, theta)
        b = schedule(spec, theta + 2.0 * math.pi)
        assert a.g == pytest.approx(b.g, abs=1e-9)
        assert a.g_prime == pytest.approx(b.g_prime, abs=1e-9)


class TestBuildHamiltonian:
    def test_small_chain_matches_hand_matrix(self):
        spec = ChainSpec(n_cells=2, g0=1.0, g0_prime=1.0, j_hop=0.25)
        point = schedule(spec, 1.0)
        g, gp, j = point.g, point.g_prime, 0.25
        expected = np.array([
            [0, g, j, 0, 0],
            [g, 0, gp, 0, 0],
            [j, gp, 0, g, j],
            [0, 0, g, 0, gp],
            [0, 0, j, gp, 0],
        ])
        assert np.array_equal(build_hamiltonian(spec, 1.0), expected)

    def test_zero_diagonal_by_default(self):
        h = build_hamiltonian(ChainSpec(n_cells=3), 0.8)
        assert np.array_equal(np.diag(h), np.zeros(7))

    def test_detuning_fills_diagonal(self):
        h = build_hamiltonian(ChainSpec(n_cells=2), 0.8, detuning=0.3)
        assert np.allclose(np.diag(h), 0.3)

    def test_start_angle_decouples_first_cavity(self):
        # at theta=0 the intracell coupling vanishes exactly, so with
        # J=0 the first cavity is an isolated zero-energy site
        h = build_hamiltonian(ChainSpec(n_cells=4), 0.0)
        assert np.array_equal(h[0], np.zeros(9))
        assert np.array_equal(h[:, 0], np.zeros(9))

    def test_real_dtype(self):
        h = build_hamiltonian(ChainSpec(n_cells=2), 0.7)
        assert h.dtype == np.float64

    @given(st.integers(min_value=1, max_value=12),
           st.floats(min_value=-7.0, max_value=7.0),
           st.floats(min_value=0.0, max_value=4.0),
           st.floats(min_value=1e-3, max_value=4.0),
           st.floats(min_value=0.0, max_value=4.0))
    @settings(max_examples=50, deadline=None)
    def test_symmetric_bitwise(self, n, theta, g0, g0_prime, j_hop):
        spec = ChainSpec(n_cells=n, g0=g0, g0_prime=g0_prime, j_hop=j_hop)
        h = build_hamiltonian(spec, theta)
        assert np.array_equal(h, h.T)
        assert h.shape == (spec.dim, spec.dim)

    def test_couplings_only_on_expected_bands(self):
        h = build_hamiltonian(ChainSpec(n_cells=3, j_hop=0.4), 0.9)
        for i in range(7):
            for k in range(7):
                if abs(i - k) not in (1, 2):
                    assert h[i, k] == (0.0 if i != k else h[i, i])
        # second superdiagonal connects cavities only
        assert h[1, 3] == 0.0 and h[3, 5] == 0.0
        assert h[0, 2] == 0.4 and h[2, 4] == 0.4 and h[4, 6] == 0.4


class TestBasisState:
    def test_one_hot_complex(self):
        spec = ChainSpec(n_cells=2)
        state = basis_state(spec, SiteIndex.from_label("m2"))
        assert state.dtype == np.complex128
        assert state[3] == 1.0
        assert np.linalg.norm(state) == 1.0

    def test_out_of_range_site_raises(self):
        spec = ChainSpec(n_cells=2)
        with pytest.raises(IndexError):
            basis_state(spec, SiteIndex.from_label("m3"))
