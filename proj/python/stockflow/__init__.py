"""Multiperiod reallocation planning for hospital equipment.

Thin Python face over the C++ core. All numeric results cross the boundary
as exact strings ("3", "-1/3", "0.5"); nothing is rounded on the way out.
"""

from stockflow._core import (
    Instance,
    evaluate,
    even_split,
    export_lp,
    generate_scenarios,
    load_manifest,
    solve,
    validate,
)

__all__ = [
    "Instance",
    "evaluate",
    "even_split",
    "export_lp",
    "generate_scenarios",
    "load_manifest",
    "solve",
    "validate",
]
