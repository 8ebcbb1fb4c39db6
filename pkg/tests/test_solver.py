"""Tests for loading paths, the error metric and the basic scheme."""

import numpy as np
import pytest

from src.handlers.error_handler import ConfigError, ConvergenceError
from src.mechanics.material import assemble_stiffness, elastic_stress
from src.microstructure.geometry import VoxelGrid, gen_laminate
from src.solver.basic_scheme import (
    BasicScheme,
    FieldState,
    SolverConfig,
    predictor,
    reference_medium,
)
from src.solver.loading import LoadingPath, tensor_from_components, triangle_wave
from src.solver.metrics import error_metric, field_error


def _shear_path(steps: int = 4, dt: float = 0.05, rate: float = 1.0) -> LoadingPath:
    return LoadingPath.from_rates(
        tensor_from_components({"E12": rate}, "E"),
        tensor_from_components({"G13": 0.5 * rate}, "G"),
        dt=dt,
        steps=steps,
    )


class TestLoading:
    """Test loading path construction."""

    def test_components(self) -> None:
        """Test component names map to 1-based indices."""
        e = tensor_from_components({"E12": 2.0, "E33": -1.0}, "E")
        assert e[0, 1] == 2.0
        assert e[2, 2] == -1.0
        assert np.count_nonzero(e) == 2
        for bad in ("E4", "E14", "G12", "E1x"):
            with pytest.raises(ConfigError):
                tensor_from_components({bad: 1.0}, "E")

    def test_monotonic_path(self) -> None:
        """Test node count, times and linear growth."""
        path = _shear_path(steps=4, dt=0.05)
        assert path.n_steps == 4
        assert np.allclose(path.times, [0.0, 0.05, 0.1, 0.15, 0.2])
        assert path.strain[4, 0, 1] == pytest.approx(0.2)
        assert path.curvature[2, 0, 2] == pytest.approx(0.05)
        assert path.description == "monotonic"

    def test_cyclic_path(self) -> None:
        """Test the triangle wave rises for half a period and falls back."""
        times = np.array([0.0, 0.25, 0.5, 0.75, 1.0])
        assert np.allclose(triangle_wave(times, 1.0), [0.0, 0.25, 0.5, 0.25, 0.0])
        path = LoadingPath.from_rates(
            tensor_from_components({"E12": 1.0}, "E"),
            np.zeros((3, 3)),
            dt=0.25,
            steps=8,
            period=1.0,
        )
        assert np.allclose(
            path.strain[:, 0, 1], [0, 0.25, 0.5, 0.25, 0, 0.25, 0.5, 0.25, 0]
        )

    def test_invalid_paths(self) -> None:
        """Test rejected loading tables."""
        zeros = np.zeros((2, 3, 3))
        with pytest.raises(ConfigError, match="increasing"):
            LoadingPath.from_table(np.array([0.0, 0.0]), zeros, zeros)
        with pytest.raises(ConfigError, match="zero strain"):
            LoadingPath.from_table(np.array([0.0]), np.ones((1, 3, 3)), zeros[:1])
        with pytest.raises(ConfigError):
            LoadingPath.from_rates(np.eye(3), np.zeros((3, 3)), dt=0.0, steps=3)
        with pytest.raises(ConfigError):
            LoadingPath.from_rates(
                np.eye(3), np.zeros((3, 3)), dt=0.1, steps=3, period=-1.0
            )


class TestMetrics:
    """Test the normalized field change."""

    def test_average_and_local(self) -> None:
        """Test mean and maximum voxel change relative to the mean norm."""
        previous = np.zeros((4, 3, 3))
        previous[:, 0, 0] = 1.0
        current = previous.copy()
        current[0, 0, 0] = 1.4
        current[1, 0, 0] = 0.6
        assert field_error(previous, current, "local") == pytest.approx(0.4)
        assert field_error(previous, current, "average") == pytest.approx(0.2)

    def test_zero_mean_fallback(self) -> None:
        """Test zero-mean fields are normalized by their largest voxel norm."""
        previous = np.zeros((2, 3, 3))
        current = np.zeros((2, 3, 3))
        current[0, 1, 1] = 2.0
        current[1, 1, 1] = -2.0
        assert field_error(previous, current, "local") == pytest.approx(1.0)
        assert field_error(previous, previous, "local") == 0.0

    def test_error_metric_takes_maximum(self) -> None:
        """Test the combined metric is the largest field error."""
        same = np.ones((2, 3, 3))
        moved = same.copy()
        moved[0] *= 2.0
        assert error_metric((same, same), (same, moved), "local") == pytest.approx(
            field_error(same, moved, "local")
        )
        with pytest.raises(ValueError):
            field_error(same, same, "median")


class TestSolverConfig:
    """Test iteration control validation."""

    @pytest.mark.parametrize(
        "kwargs",
        [
            {"epsilon": 0.0},
            {"metric": "median"},
            {"max_iterations": 0},
            {"reference": "voigt"},
            {"workers": 0},
        ],
    )
    def test_rejected(self, kwargs: dict) -> None:
        """Test invalid controls raise ConfigError."""
        with pytest.raises(ConfigError):
            SolverConfig(**kwargs)


def test_reference_medium_is_volume_average(laminate, contrast_table) -> None:
    """Test A0 and B0 average the phase stiffnesses."""
    a0, b0 = reference_medium(laminate, contrast_table)
    stiff = [assemble_stiffness(phase) for phase in contrast_table.phases]
    assert np.allclose(a0, 0.5 * (stiff[0][0] + stiff[1][0]))
    assert np.allclose(b0, 0.5 * (stiff[0][1] + stiff[1][1]))


def test_predictor_extrapolates() -> None:
    """Test the first step uses the targets and later steps extrapolate."""
    state = FieldState.natural((1, 1, 2))
    target = np.full((3, 3), 0.1)
    strain, curvature = predictor(state, 0.1, target, np.zeros((3, 3)))
    assert np.allclose(strain, 0.1)
    assert np.allclose(curvature, 0.0)

    accepted = state.current.copy()
    accepted.strain[...] = 0.1
    later = state.advance(accepted, 0.1)
    strain, _ = predictor(later, 0.3, target, np.zeros((3, 3)))
    assert np.allclose(strain, 0.3)


def test_homogeneous_cell_is_uniform(contrast_table) -> None:
    """Test a single-phase cell converges in one iteration to the local law."""
    grid = VoxelGrid(np.zeros((2, 2, 2), dtype=np.int64))
    scheme = BasicScheme(grid, contrast_table, SolverConfig(epsilon=1e-12))
    e = 0.1 * np.eye(3)
    e[0, 1] = 0.05
    path = LoadingPath.from_table(
        np.array([0.0, 1.0]), np.stack([np.zeros((3, 3)), e]), np.zeros((2, 3, 3))
    )
    report = scheme.run(path)
    expected, _ = elastic_stress(contrast_table[0], e, np.zeros((3, 3)))
    assert report.steps[1].iterations == 1
    assert np.allclose(report.steps[1].stress, expected)


def test_laminate_traction_continuity(elastic_table) -> None:
    """Test stress rows on the lamination normal are uniform across layers."""
    laminate = gen_laminate((5, 3, 3), 0.4)
    scheme = BasicScheme(laminate, elastic_table, SolverConfig(epsilon=1e-11))
    path = _shear_path(steps=1, dt=1.0)
    state, row = scheme.step(
        FieldState.natural(laminate.dims),
        1.0,
        path.strain[1],
        path.curvature[1],
    )
    traction = state.current.stress[:, :, :, 0, :]
    assert np.allclose(traction, traction[0, 0, 0], atol=1e-8)
    assert np.allclose(state.current.strain.mean(axis=(0, 1, 2)), path.strain[1])
    assert row.iterations > 1


def test_elastic_work_equals_stored_energy(elastic_table) -> None:
    """Test macroscopic work matches the stored energy for elastic loading."""
    laminate = gen_laminate((5, 3, 3), 0.4)
    scheme = BasicScheme(laminate, elastic_table, SolverConfig(epsilon=1e-11))
    report = scheme.run(_shear_path(steps=3, dt=0.1))
    assert report.total_dissipation == 0.0
    assert report.total_work == pytest.approx(report.steps[-1].stored_energy, rel=1e-6)


def test_plastic_run_history(laminate, contrast_table) -> None:
    """Test yielding, non-negative dissipation and snapshots."""
    scheme = BasicScheme(laminate, contrast_table, SolverConfig(epsilon=1e-8))
    seen = []
    report = scheme.run(
        _shear_path(steps=6, dt=0.1),
        snapshot_steps=[0, 6],
        on_step=lambda state, row: seen.append(row.step),
    )
    assert seen == [1, 2, 3, 4, 5, 6]
    assert len(report.steps) == 7
    assert report.steps[-1].p > 0.0
    assert np.all(report.column("dissipation") >= -1e-12)
    assert report.total_dissipation > 0.0
    assert set(report.snapshots) == {0, 6}
    assert report.component("strain", 1, 2)[-1] == pytest.approx(0.6)
    assert report.snapshots[6].p.shape == laminate.dims


def test_zero_loading_stays_natural(laminate, contrast_table) -> None:
    """Test zero averages keep every field at zero."""
    scheme = BasicScheme(laminate, contrast_table)
    path = LoadingPath.from_rates(np.zeros((3, 3)), np.zeros((3, 3)), dt=0.1, steps=2)
    report = scheme.run(path)
    assert np.all(report.column("stress") == 0.0)
    assert np.all(report.column("p") == 0.0)


def test_iteration_cap_raises(laminate, contrast_table) -> None:
    """Test a single allowed iteration is not enough on a heterogeneous cell."""
    scheme = BasicScheme(
        laminate, contrast_table, SolverConfig(epsilon=1e-12, max_iterations=1)
    )
    with pytest.raises(ConvergenceError) as info:
        scheme.run(_shear_path(steps=2))
    assert info.value.step == 1
    assert info.value.iterations == 1
    assert info.value.error > 1e-12


def test_greens_must_match_grid(laminate, contrast_table) -> None:
    """Test a Green operator from another grid is rejected."""
    other = BasicScheme(gen_laminate((2, 2, 2), 0.5), contrast_table)
    with pytest.raises(ConfigError, match="different grid"):
        BasicScheme(laminate, contrast_table, greens=other.greens)
