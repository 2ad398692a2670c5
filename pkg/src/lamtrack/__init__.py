"""Hyperbolic pants decompositions, train tracks, and measured curves."""

from . import cover, errors, hyp_trig, measures, surface, traintrack

__all__ = ["cover", "errors", "hyp_trig", "measures", "surface",
           "traintrack"]
