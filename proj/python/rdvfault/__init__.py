"""Two-agent rendezvous on anonymous port-labeled graphs under delay faults."""

import os
from pathlib import Path

_shipped = Path(__file__).with_name("uxs")
if _shipped.is_dir():
    os.environ.setdefault("RDV_UXS_DIR", str(_shipped))

from ._core import (  # noqa: E402
    RdvError,
    dance_script,
    modified_label,
    monte_carlo,
    run,
    sweep,
    trees,
    uxs_dir,
    uxs_terms,
    verify_uxs,
    worst_case,
)

__all__ = [
    "RdvError",
    "dance_script",
    "modified_label",
    "monte_carlo",
    "run",
    "sweep",
    "trees",
    "uxs_dir",
    "uxs_terms",
    "verify_uxs",
    "worst_case",
]
