"""Numerical Moebius geometry on R^n u {inf} and the Heisenberg group with the Koranyi gauge."""

from .core import (
    INF,
    CrossRatioTriple,
    ExtendedPoint,
    MetricEvaluator,
    MoebiusMap,
    PtolemyClass,
    PtolemyTag,
    ScanReport,
    as_point,
    circle_residual,
    classify_triple,
    compose,
    cross_ratio,
    is_admissible,
    m_invert,
    moebius_residual,
    ptolemy_scan,
    pullback,
)
from .euclidean import Circle, EuclideanModel, chordal_metric, circle_through, euclid_inversion, euclidean_metric, euclidean_model
from .heisenberg import (
    HeisElement,
    HeisModel,
    c_circle_through,
    commutator,
    conj_flip,
    dilation,
    heis_model,
    horizontal_line,
    inversion_at,
    koranyi_dist,
    koranyi_gauge,
    koranyi_inversion,
    koranyi_metric,
    r_circle_through,
    space_inversion,
    translation,
    unit_r_circle,
    unitary,
)
from .verify import SuiteConfig, SuiteReport, list_suites, run_all, run_suite

__all__ = [
    "INF",
    "CrossRatioTriple",
    "ExtendedPoint",
    "MetricEvaluator",
    "MoebiusMap",
    "PtolemyClass",
    "PtolemyTag",
    "ScanReport",
    "as_point",
    "circle_residual",
    "classify_triple",
    "compose",
    "cross_ratio",
    "is_admissible",
    "m_invert",
    "moebius_residual",
    "ptolemy_scan",
    "pullback",
    "Circle",
    "EuclideanModel",
    "chordal_metric",
    "circle_through",
    "euclid_inversion",
    "euclidean_metric",
    "euclidean_model",
    "HeisElement",
    "HeisModel",
    "c_circle_through",
    "commutator",
    "conj_flip",
    "dilation",
    "heis_model",
    "horizontal_line",
    "inversion_at",
    "koranyi_dist",
    "koranyi_gauge",
    "koranyi_inversion",
    "koranyi_metric",
    "r_circle_through",
    "space_inversion",
    "translation",
    "unit_r_circle",
    "unitary",
    "SuiteConfig",
    "SuiteReport",
    "list_suites",
    "run_all",
    "run_suite",
]
