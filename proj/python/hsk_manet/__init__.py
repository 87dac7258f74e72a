"""Spanning-tree based group key agreement protocols for MANETs.

Python bindings over the C++ core: topology snapshots, time-variant edge
weights, extended-Kruskal tree repair, secure-link stores and the scenario
harness. See the repository README for the scenario grammar and examples.
"""

try:
    from hsk_manet._core import *  # noqa: F401,F403  (installed layout)
except ImportError:
    # In-tree layout: the freshly built module sits on sys.path directly
    # (e.g. PYTHONPATH=python:build/bindings after a plain CMake build).
    from _core import *  # noqa: F401,F403
