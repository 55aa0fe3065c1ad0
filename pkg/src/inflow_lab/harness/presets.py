"""Named experiment presets.

Each preset fixes the module it runs under and default parameters; the
``params`` of an experiment config override the defaults key by key.
"""

from dataclasses import dataclass, field
from typing import Any, Optional

from ..config import ModuleName
from ..errors import ConfigurationError


@dataclass(frozen=True)
class Preset:
    name: str
    module: ModuleName
    params: dict[str, Any] = field(default_factory=dict)
    description: str = ""


PRESETS: dict[str, Preset] = {p.name: p for p in [
    # transport1d
    Preset("translation", ModuleName.TRANSPORT1D,
           {"case": "translation", "speed": 1.0, "t": 0.5, "grid": 256, "tol": 1e-8, "random_times": 5},
           "sin(pi x) carried at unit speed against the closed-form shift"),
    Preset("flush-test", ModuleName.TRANSPORT1D,
           {"case": "flush", "speed": 1.0, "grid": 256, "samples": 50, "alpha": 1.0},
           "weighted decay and finite flush time with zero inflow and forcing"),
    Preset("forcing-saturation", ModuleName.TRANSPORT1D,
           {"case": "saturation", "speed": 1.0, "forcing": 1.0, "grid": 256, "horizon": 4.0, "samples": 50,
            "alpha": 1.0},
           "unit forcing from rest, f = min(t, x + 1), with the weighted sup estimate"),
    Preset("affine-decay", ModuleName.TRANSPORT1D,
           {"case": "flush", "speed": {"kind": "affine", "a": 1.0, "b": 0.25}, "grid": 256, "samples": 50},
           "decay and flush for a position-dependent speed"),

    # hyp1d
    Preset("zero", ModuleName.HYP1D,
           {"case": "stability", "system": "burgers", "amplitude": 0.0, "grid": 64, "horizon": 1.0}),
    Preset("burgers-small", ModuleName.HYP1D,
           {"case": "stability", "system": "burgers", "amplitude": 1e-2, "grid": 256, "horizon": 50.0,
            "contraction_limit": 0.6, "refine_grid": 512},
           "Burgers inflow problem with W^{1,inf} data size 1e-2"),
    Preset("linear2-small", ModuleName.HYP1D,
           {"case": "stability", "system": "linear2", "amplitude": 1e-2, "grid": 256, "horizon": 10.0,
            "contraction_limit": 0.6}),
    Preset("psystem-small", ModuleName.HYP1D,
           {"case": "stability", "system": "psystem", "amplitude": 1e-2, "grid": 256, "horizon": 10.0,
            "contraction_limit": 0.6}),
    Preset("burgers-shock", ModuleName.HYP1D,
           {"case": "shock", "amplitude": 0.05, "mode": 1, "grid": 256},
           "periodic shock time against the inflow gradient growth"),

    # pipe3d
    Preset("pipe-zero", ModuleName.PIPE3D,
           {"case": "euler", "profile": "plug", "boundary": "zero", "grid": 16, "horizon": 1.0}),
    Preset("pipe-plug-pulse", ModuleName.PIPE3D,
           {"case": "euler", "profile": "plug", "boundary": {"kind": "pulse", "amplitude": 1e-3},
            "grid": 16, "horizon": 2.0}),
    Preset("pipe-stability", ModuleName.PIPE3D,
           {"case": "euler", "profile": {"kind": "product-cosine", "c": 2.0, "amplitude": 1.0},
            "boundary": {"kind": "pulse", "amplitude": 1e-3}, "grid": 32, "horizon": 10.0,
            "contraction_limit": 0.6, "refine_grid": 16, "epsilon_check": True},
           "coupled stability around U = 2 + cos(pi x2) cos(pi x3), checked against 16^3 and eps/2"),
    Preset("pipe-weak-shear", ModuleName.PIPE3D,
           {"case": "euler", "profile": {"kind": "product-cosine", "c": 2.0, "amplitude": 0.02},
            "boundary": {"kind": "pulse", "amplitude": 1e-3}, "grid": 32, "horizon": 10.0,
            "contraction_limit": 0.6},
           "coupled stability around a weak product-cosine shear"),
    Preset("pipe-cosine-shear", ModuleName.PIPE3D,
           {"case": "euler", "profile": {"kind": "cosine-shear", "c": 2.0, "amplitude": 0.02},
            "boundary": {"kind": "lateral-swirl", "amplitude": 1e-3}, "grid": 16, "horizon": 2.0}),
    Preset("pipe-lateral", ModuleName.PIPE3D,
           {"case": "lateral", "horizon": 10.0, "samples": 7, "tol": 1e-8},
           "paths started on the lateral faces stay on them"),
    Preset("compat-vectors", ModuleName.PIPE3D,
           {"case": "compat", "grid": 16},
           "hand-built pass/fail vectors of the compatibility checker"),

    # divcurl
    Preset("divcurl-manufactured", ModuleName.DIVCURL,
           {"grids": [16, 32], "p": 4.0, "order_range": [1.7, 2.3], "residual_factor": 5.0},
           "manufactured div-curl solution and observed order"),

    # trace
    Preset("trace-affine", ModuleName.TRACE,
           {"speed": {"kind": "affine", "a": 1.0, "b": 0.25}, "t": 1.0, "x": 1.0, "samples": 101}),
    Preset("trace-constant", ModuleName.TRACE,
           {"speed": 1.0, "t": 3.0, "x": 1.0, "samples": 101}),
]}

SUITE = (
    "translation",
    "flush-test",
    "forcing-saturation",
    "burgers-small",
    "burgers-shock",
    "pipe-lateral",
    "divcurl-manufactured",
    "pipe-stability",
    "compat-vectors",
)

# Presets that may be requested under another module name.
MODULE_ALIASES = {
    ModuleName.DIVCURL: {ModuleName.DIVCURL, ModuleName.PIPE3D},
}


def get_preset(name: str) -> Preset:
    try:
        return PRESETS[name]
    except KeyError:
        raise ConfigurationError(f"unknown preset '{name}'", details={"available": sorted(PRESETS)}) from None


def list_presets(module: Optional[ModuleName] = None) -> list[str]:
    if module is None:
        return sorted(PRESETS)
    module = ModuleName(module)
    return sorted(name for name, p in PRESETS.items()
                  if module in MODULE_ALIASES.get(p.module, {p.module}))
