"""Near-field back-projection with amplitude-corrected focusing operators."""

from ._core import (
    Error,
    bundled_scenarios,
    f0,
    f1,
    f2,
    fd_oracle,
    mip,
    phase_only,
    read_volume,
    run,
    spectral_oracle,
    validate,
    wavenumber,
)

__all__ = [
    "Error",
    "bundled_scenarios",
    "f0",
    "f1",
    "f2",
    "fd_oracle",
    "mip",
    "phase_only",
    "read_volume",
    "run",
    "spectral_oracle",
    "validate",
    "wavenumber",
]
