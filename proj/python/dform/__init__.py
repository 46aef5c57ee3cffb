"""Differential forms on the plane: build, transform and plot 0-, 1- and 2-forms."""

import json as _json

from ._dform import (  # noqa: F401
    Error,
    KindError,
    Object,
    ParseError,
    __version__,
    differentiate,
    evaluate,
    from_json,
    make,
    parse,
    parse_offset,
)
from . import _dform


def form0(phi, xrange=(-5.0, 5.0), yrange=None, n=31):
    return make("form0", [phi], xrange, yrange, n)


def form1(a, b, xrange=(-5.0, 5.0), yrange=None, n=31):
    return make("form1", [a, b], xrange, yrange, n)


def form2(w, xrange=(-5.0, 5.0), yrange=None, n=31):
    return make("form2", [w], xrange, yrange, n)


def vector_field(u, v, xrange=(-5.0, 5.0), yrange=None, n=31):
    return make("vf", [u, v], xrange, yrange, n)


def typecheck(kind, chain):
    return _dform.typecheck(kind, _json.dumps(chain))


def run_job(job, format="scene-json"):
    """Run a JobSpec dict. JSON formats come back parsed; SVG as text."""
    out = _dform.run_job(_json.dumps(job), format)
    return out if format == "svg" else _json.loads(out)
