"""Named material tables and experiment configurations."""

import copy
from collections.abc import Sequence
from typing import Any

from ..handlers.error_handler import ConfigError
from ..mechanics.material import MaterialTable, PhaseParams


def _phase(
    lam: float,
    mu: float,
    kappa: float,
    alpha: float,
    beta: float,
    gamma: float,
    t_y: float,
    t_h: float,
    m_y: float,
    m_h: float,
    a1: float = 1.5,
    b1: float = 1.5,
) -> dict[str, float]:
    return {
        "lam": lam,
        "mu": mu,
        "kappa": kappa,
        "alpha": alpha,
        "beta": beta,
        "gamma": gamma,
        "t_y": t_y,
        "t_h": t_h,
        "m_y": m_y,
        "m_h": m_h,
        "a1": a1,
        "b1": b1,
    }


MATERIAL_PRESETS: dict[str, list[dict[str, float]]] = {
    # stiff/soft pair with hardening on both levels, and its classical limit
    "table1": [
        _phase(1.0, 1.0, 1.0, 0.0, 0.0, 1.0, 0.5, 0.125, 0.5, 0.125),
        _phase(2.0, 2.0, 2.0, 0.0, 0.0, 2.0, 0.75, 0.25, 0.75, 0.25),
    ],
    "table1.cauchy": [
        _phase(1.0, 1.0, 1e-4, 0.0, 0.0, 1e-4, 0.5, 0.125, 1000.0, 0.0, b1=1000.0),
        _phase(2.0, 2.0, 1e-4, 0.0, 0.0, 1e-4, 0.75, 0.25, 1000.0, 0.0, b1=1000.0),
    ],
    "table2": [
        _phase(1.0, 1.0, 1.0, 0.0, 1.0, 2.0, 2.5, 0.0, 0.005, 0.0025),
        _phase(2.0, 2.0, 2.0, 0.0, 2.0, 4.0, 2.5, 0.0, 0.005, 0.0025),
    ],
    "table4": [
        _phase(1.0, 1.0, 1.0, 0.0, 0.5, 1.0, 0.5, 0.125, 0.5, 0.125),
        _phase(2.0, 2.0, 2.0, 0.0, 1.0, 2.0, 0.75, 0.25, 0.75, 0.25),
    ],
    "appendixD.codeverif": [
        _phase(1.0, 1.0, 0.5, 0.0, 0.5, 1.0, 4.0, 0.0, 4.0, 0.0),
        _phase(1.5, 1.5, 0.75, 0.0, 0.25, 1.5, 4.5, 0.0, 4.5, 0.0),
    ],
    "appendixD.convergence": [
        _phase(1.0, 1.0, 0.5, 0.0, 0.5, 1.0, 1.0, 0.0, 1.0, 0.0),
        _phase(1.5, 1.5, 0.75, 0.0, 0.25, 1.5, 1.5, 0.0, 1.5, 0.0),
    ],
}

# plastic constants (t_y, t_h, m_y, m_h) of the length-scale phases
LENGTH_SCALE_PHASES = (
    (1.0, (0.5, 0.125, 0.5, 0.125)),
    (2.0, (0.75, 0.25, 0.75, 0.25)),
)
LENGTH_SCALE_B1 = 1.5


def hardening_sweep_phases(x: float) -> list[dict[str, float]]:
    """Soft hardening phase next to a phase with hardening moduli ``x``."""
    return [
        _phase(1.0, 1.0, 1.0, 0.0, 0.05, 0.1, 0.5, 0.1, 0.5, 0.1),
        _phase(1.0, 1.0, 1.0, 0.0, 0.5, 1.0, 0.5, x, 0.5, x),
    ]


def length_scale_table(l_e: float, l_p: float) -> MaterialTable:
    """Two phases sharing the elastic and plastic internal lengths."""
    return MaterialTable(
        tuple(
            PhaseParams.from_length_scales(
                l_e, l_p, gamma, LENGTH_SCALE_B1, *plastic
            )
            for gamma, plastic in LENGTH_SCALE_PHASES
        )
    )


# descriptive names accepted next to the table names
MATERIAL_ALIASES = {
    "contrast": "table1",
    "contrast-cauchy": "table1.cauchy",
    "ratchet": "table2",
    "timing": "table4",
    "mnms": "appendixD.codeverif",
    "mesh-convergence": "appendixD.convergence",
    "length-scale": "table3",
    "hardening-sweep": "table5",
}

DEFAULT_LENGTHS = (0.5, 0.5)


def _arguments(name: str, value: str, count: int) -> list[float]:
    try:
        numbers = [float(v) for v in value.split(",")]
    except ValueError as e:
        raise ConfigError(f"Bad preset arguments in '{name}'") from e
    if len(numbers) != count:
        raise ConfigError(f"Preset '{name}' takes {count} comma-separated values")
    return numbers


def material_phases(name: str) -> list[dict[str, float]]:
    """Parameter mappings of a named material preset.

    ``table3:<l_e>,<l_p>`` builds the length-scale pair and ``table5:<x>``
    the hardening contrast; without arguments they use ``DEFAULT_LENGTHS``
    and ``x = 0``.

    Raises:
        ConfigError: For unknown names or bad arguments.
    """
    base, _, value = name.partition(":")
    base = MATERIAL_ALIASES.get(base, base)
    if base == "table3":
        l_e, l_p = _arguments(name, value, 2) if value else DEFAULT_LENGTHS
        return [phase.as_dict() for phase in length_scale_table(l_e, l_p).phases]
    if base == "table5":
        (x,) = _arguments(name, value, 1) if value else (0.0,)
        return hardening_sweep_phases(x)
    if value or base not in MATERIAL_PRESETS:
        raise ConfigError(
            f"Unknown material preset '{name}', expected one of "
            f"{sorted(MATERIAL_PRESETS) + ['table3:<l_e>,<l_p>', 'table5:<x>']}"
        )
    return copy.deepcopy(MATERIAL_PRESETS[base])


def material_table(name: str) -> MaterialTable:
    """Material table of a named preset."""
    return MaterialTable.from_sequence(material_phases(name))


_MONOTONIC = {"dt": 0.01, "steps": 100}
_ELASTIC_CONTROL = {"all": {"t_y": 1e6, "m_y": 1e6}}

EXPERIMENT_PRESETS: dict[str, dict[str, Any]] = {
    "fig1.circle": {
        "provenance": "section 3.1, Table 1: off-center circular inclusion, monotonic shear",
        "geometry": {
            "generator": "spheres",
            "dims": [32, 32, 1],
            "inclusions": [{"center": [0.6, 0.4, 0.5], "radius": 0.2}],
        },
        "materials": {"preset": "table1"},
        "loading": {**_MONOTONIC, "strain_rate": {"E12": 1.0}},
        "solver": {"epsilon": 1e-6, "metric": "local"},
    },
    "fig1.circle.cauchy": {
        "provenance": "section 3.1, Table 1 Cauchy limit: off-center circular inclusion",
        "geometry": {
            "generator": "spheres",
            "dims": [32, 32, 1],
            "inclusions": [{"center": [0.6, 0.4, 0.5], "radius": 0.2}],
        },
        "materials": {"preset": "table1.cauchy"},
        "loading": {**_MONOTONIC, "strain_rate": {"E12": 1.0, "E21": 1.0}},
        "solver": {"epsilon": 1e-6, "metric": "local"},
    },
    "inclusions-5": {
        "provenance": "section 3.1, Table 1: five seeded random inclusions",
        "geometry": {
            "generator": "random_spheres",
            "dims": [32, 32, 1],
            "count": 5,
            "radius": 0.1,
            "seed": 5,
            "gap": 0.02,
        },
        "materials": {"preset": "table1"},
        "loading": {**_MONOTONIC, "strain_rate": {"E12": 1.0}},
        "solver": {"epsilon": 1e-6, "metric": "local"},
    },
    "inclusions-10": {
        "provenance": "section 3.1, Table 1: ten seeded random inclusions",
        "geometry": {
            "generator": "random_spheres",
            "dims": [32, 32, 1],
            "count": 10,
            "radius": 0.08,
            "seed": 10,
            "gap": 0.02,
        },
        "materials": {"preset": "table1"},
        "loading": {**_MONOTONIC, "strain_rate": {"E12": 1.0}},
        "solver": {"epsilon": 1e-6, "metric": "local"},
    },
    "fig3.ratchet": {
        "provenance": "section 3.2, Table 2: laminate under ten shear cycles",
        "geometry": {
            "generator": "laminate",
            "dims": [4, 4, 4],
            "volume_fraction": 0.5,
        },
        "materials": {"preset": "table2"},
        "loading": {
            "dt": 0.01,
            "steps": 1000,
            "period": 1.0,
            "strain_rate": {"E12": 1.0},
        },
        "solver": {"epsilon": 1e-5, "metric": "local"},
    },
    "ratchet-elastic": {
        "provenance": "section 3.2, Table 2 with both levels kept elastic",
        "geometry": {
            "generator": "laminate",
            "dims": [4, 4, 4],
            "volume_fraction": 0.5,
        },
        "materials": {"preset": "table2", "overrides": _ELASTIC_CONTROL},
        "loading": {
            "dt": 0.01,
            "steps": 1000,
            "period": 1.0,
            "strain_rate": {"E12": 1.0},
        },
        "solver": {"epsilon": 1e-5, "metric": "local"},
    },
    "fatigue": {
        "provenance": "section 3.2, Table 2 with t_Y = 1.9, m_H = 0, fifty cycles",
        "geometry": {
            "generator": "laminate",
            "dims": [4, 4, 4],
            "volume_fraction": 0.5,
        },
        "materials": {
            "preset": "table2",
            "overrides": {"all": {"t_y": 1.9, "m_h": 0.0}},
        },
        "loading": {
            "dt": 0.01,
            "steps": 5000,
            "period": 1.0,
            "strain_rate": {"E12": 1.0},
        },
        "solver": {"epsilon": 1e-5, "metric": "local"},
    },
    "fatigue-hardening": {
        "provenance": "section 3.2, Table 2 with t_Y = 1.9, m_H = 0.0025, fifty cycles",
        "geometry": {
            "generator": "laminate",
            "dims": [4, 4, 4],
            "volume_fraction": 0.5,
        },
        "materials": {
            "preset": "table2",
            "overrides": {"all": {"t_y": 1.9, "m_h": 0.0025}},
        },
        "loading": {
            "dt": 0.01,
            "steps": 5000,
            "period": 1.0,
            "strain_rate": {"E12": 1.0},
        },
        "solver": {"epsilon": 1e-5, "metric": "local"},
    },
    "length-scan": {
        "provenance": "section 3.3, Table 3: four-sphere cell over elastic and plastic lengths",
        "geometry": {
            "generator": "four_spheres",
            "dims": [16, 16, 16],
            "volume_fraction": 0.2,
        },
        "loading": {
            **_MONOTONIC,
            "strain_rate": {"E32": 1.0},
            "curvature_rate": {"G11": 1.0},
        },
        "solver": {"epsilon": 1e-5, "metric": "local"},
        "scan": {"l_e": [0.1, 0.25, 0.5, 1.0], "l_p": [0.1, 0.25, 0.5, 1.0]},
    },
    "bench": {
        "provenance": "section 3.4, Table 4: laminate timed over grid resolutions",
        "geometry": {
            "generator": "laminate",
            "dims": [8, 8, 8],
            "volume_fraction": 0.5,
        },
        "materials": {"preset": "table4"},
        "loading": {
            "dt": 0.01,
            "steps": 100,
            "strain_rate": {"E13": 1.0},
            "curvature_rate": {"G32": 1.0},
        },
        "solver": {"epsilon": 1e-5, "metric": "local"},
        "bench": {
            "dims": [
                [1, 1, 1],
                [2, 2, 2],
                [4, 4, 4],
                [8, 8, 8],
                [16, 16, 16],
                [32, 32, 32],
            ],
            "repeats": 10,
        },
    },
    "iterations": {
        "provenance": "section 3.4, Table 5 (phase-1 beta = gamma/2): iterations versus hardening",
        "geometry": {
            "generator": "laminate",
            "dims": [8, 8, 8],
            "volume_fraction": 0.5,
        },
        "loading": {
            **_MONOTONIC,
            "strain_rate": {"E13": 1.0},
            "curvature_rate": {"G32": 1.0},
        },
        "solver": {"epsilon": 1e-8, "metric": "local"},
        "iterations": {"hardening": [0.0, 0.001, 0.005, 0.01, 0.05, 0.1]},
    },
    "appendixD.codeverif": {
        "provenance": "appendix D: manufactured solution on a centered-cube composite",
        "geometry": {
            "generator": "centered_cube",
            "dims": [4, 4, 4],
            "inner_extent": 2,
        },
        "materials": {"preset": "appendixD.codeverif"},
        "loading": {"dt": 0.01, "steps": 100},
        "solver": {"epsilon": 1e-9, "metric": "local"},
        "mnms": {"amplitude": 1.0},
    },
    "appendixD.convergence": {
        "provenance": "appendix D: refinement study on a half-filled laminate",
        "materials": {"preset": "appendixD.convergence"},
        "solver": {"epsilon": 1e-4, "metric": "average"},
        "convergence": {
            "kind": "laminate50",
            "space_levels": [4, 8, 16, 32],
            "time_levels": [10, 20, 40, 80],
        },
    },
    "appendixD.convergence.sphere": {
        "provenance": "appendix D: refinement study on a centered sphere of radius L/4",
        "materials": {"preset": "appendixD.convergence"},
        "solver": {"epsilon": 1e-4, "metric": "average"},
        "convergence": {
            "kind": "centered_sphere_rL4",
            "space_levels": [4, 8, 16, 32],
            "time_levels": [10, 20, 40, 80],
        },
    },
}


EXPERIMENT_ALIASES = {
    "inclusion": "fig1.circle",
    "inclusion-cauchy": "fig1.circle.cauchy",
    "ratchet": "fig3.ratchet",
    "mnms": "appendixD.codeverif",
    "convergence-laminate": "appendixD.convergence",
    "convergence-sphere": "appendixD.convergence.sphere",
}


def canonical_preset(name: str) -> str:
    """Registered name of an experiment preset or one of its aliases.

    Raises:
        ConfigError: For unknown names.
    """
    canonical = EXPERIMENT_ALIASES.get(name, name)
    if canonical not in EXPERIMENT_PRESETS:
        raise ConfigError(
            f"Unknown preset '{name}', expected one of {sorted(EXPERIMENT_PRESETS)}"
        )
    return canonical


def experiment_preset(name: str) -> dict[str, Any]:
    """Deep copy of a named experiment configuration.

    Raises:
        ConfigError: For unknown names.
    """
    return copy.deepcopy(EXPERIMENT_PRESETS[canonical_preset(name)])


def preset_names() -> Sequence[str]:
    """Names of every experiment preset."""
    return sorted(EXPERIMENT_PRESETS)
