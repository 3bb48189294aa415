"""Numerical calculus on the half-line hypergroup and its ax+b extension.

Subpackages cover: special functions and quadrature (`specfun`), the
transform/translation/convolution calculus on the half-line (`hankel`) and
its signed-line extension (`dunkl`), the solvable extension geometry
(`gnu_space`), covering-set decompositions (`cz`), heat kernels (`heat`),
first-order singular kernels (`riesz`), plus a FastAPI service (`service`)
and a CLI (`cli`).
"""

from __future__ import annotations

import os

__version__ = "0.1.0"


def thread_count() -> int:
    """Worker-thread cap, from HYPERCALC_THREADS (default: min(4, cpu_count))."""
    raw = os.environ.get("HYPERCALC_THREADS", "")
    if raw:
        try:
            n = int(raw)
        except ValueError as exc:
            raise ValueError(f"HYPERCALC_THREADS must be an integer, got {raw!r}") from exc
        if n < 1:
            raise ValueError("HYPERCALC_THREADS must be >= 1")
        return n
    return min(4, os.cpu_count() or 1)
