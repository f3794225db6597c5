"""Cluster-grid assembly and frame checks."""

import numpy as np
import pytest

from qdiode import eom
from qdiode.hierarchy import (
    CONSTANT_FRAME,
    RAW_FRAME,
    HierarchyState,
    band_clusters,
    build_hierarchy,
    conjugate_pair_residual,
    residual_time_dependence,
)
from qdiode.model import DeviceParams, InputState, PulseSpec

PARAMS = DeviceParams(gamma=1.0, delta=0.1, theta=0.6)
PULSE = PulseSpec(omega=0.01)


def test_band_clusters_small_cases():
    assert band_clusters(0) == [(0, 0)]
    assert band_clusters(1) == [(0, 0), (0, 1), (1, 0), (1, 1)]
    # |p - q| > 2 never appears
    for p, q in band_clusters(6):
        assert abs(p - q) <= 2


def test_band_clusters_level_ordering():
    cl = band_clusters(4)
    levels = [p + q for p, q in cl]
    assert levels == sorted(levels)
    assert len(cl) == len(set(cl))
    # count: the diagonal plus two off-diagonals of a 5x5 grid, minus nothing
    assert len(cl) == 5 + 2 * 4 + 2 * 3


def test_ground_state():
    st = HierarchyState.ground(2)
    v = eom.vacuum_values()
    for p in range(3):
        for q in range(3):
            expect = v if p == q else np.zeros(9)
            assert np.array_equal(st.values[p, q], expect)
    assert st.element(1, 1, "sz1") == -1.0
    assert np.array_equal(st.diagonal(eom.SZ2), [-1.0, -1.0, -1.0])


def test_build_validation():
    with pytest.raises(ValueError):
        build_hierarchy(PARAMS, InputState.coherent(1.0), PULSE)
    with pytest.raises(ValueError):
        build_hierarchy(PARAMS, InputState.fock(2), PULSE, n_max=1)
    with pytest.raises(ValueError):
        build_hierarchy(PARAMS, InputState.fock(1), PULSE, frame="lab")


def test_build_shapes_and_sources():
    hier = build_hierarchy(PARAMS, InputState.fock(2), PULSE)
    assert hier.n_max == 2
    assert len(hier) == 5  # levels s = 0..4
    for level in hier:
        assert level.block.shape == (18, 18)
        k = len(level.clusters)
        assert level.matrix.shape == (18 * k, 18 * k)
        src = level.source
        for i, (p, q) in enumerate(level.clusters):
            chunk = src[18 * i : 18 * (i + 1)]
            if p == q:
                assert np.abs(chunk).max() > 0.0
            else:
                assert np.abs(chunk).max() == 0.0


def test_superposition_sets_truncation():
    state = InputState.superposition([0.6, 0.0, 0.8])
    hier = build_hierarchy(PARAMS, state, PULSE)
    assert hier.n_max == 2


def test_constant_frame_has_no_time_dependence():
    hier = build_hierarchy(PARAMS, InputState.fock(1), PULSE)
    assert residual_time_dependence(hier) < 1e-14


def test_raw_frame_drifts_when_detuned():
    hier = build_hierarchy(PARAMS, InputState.fock(1), PULSE, frame=RAW_FRAME)
    assert residual_time_dependence(hier) > 1e-2
    # with no detuning the raw frame is constant too
    still = build_hierarchy(
        DeviceParams(gamma=1.0, delta=0.0, theta=0.6),
        InputState.fock(1),
        PULSE,
        frame=RAW_FRAME,
    )
    assert residual_time_dependence(still) < 1e-14


def test_conjugate_pair_residual_flags_mismatch():
    u = np.arange(18, dtype=complex)
    v = np.concatenate([u[9:].conj(), u[:9].conj()])
    assert conjugate_pair_residual({(0, 1): u, (1, 0): v}) == 0.0
    v_bad = v.copy()
    v_bad[0] += 1.0j
    assert conjugate_pair_residual({(0, 1): u, (1, 0): v_bad}) == pytest.approx(1.0)
