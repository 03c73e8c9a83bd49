"""Python interface to the csplab core."""

import json

from . import _csplab
from ._csplab import CsplabError, gamma

__all__ = [
    "CsplabError",
    "azuma_check",
    "count",
    "count_dimacs",
    "estimate_psi",
    "estimate_qn",
    "export_dimacs",
    "gamma",
    "locate_threshold",
    "run_cli",
    "sample",
    "scan_predicates",
]


def _decoded(fn):
    def wrapper(*args, **kwargs):
        return json.loads(fn(*args, **kwargs))

    wrapper.__name__ = fn.__name__
    wrapper.__doc__ = fn.__doc__
    return wrapper


sample = _decoded(_csplab.sample)
count = _decoded(_csplab.count)
count_dimacs = _decoded(_csplab.count_dimacs)
estimate_psi = _decoded(_csplab.estimate_psi)
estimate_qn = _decoded(_csplab.estimate_qn)
locate_threshold = _decoded(_csplab.locate_threshold)
scan_predicates = _decoded(_csplab.scan_predicates)
azuma_check = _decoded(_csplab.azuma_check)
export_dimacs = _csplab.export_dimacs


def run_cli(args):
    """Runs the command-line tool in-process; returns (exit_code, stdout, stderr)."""
    return _csplab.run_cli([str(a) for a in args])
