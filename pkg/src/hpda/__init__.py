"""Placement delivery arrays from combinatorial designs, their two-layer
extension for mirror/user networks, a delivery simulator, comparison
calculators and table/figure data emitters."""

__version__ = "0.1.0"
