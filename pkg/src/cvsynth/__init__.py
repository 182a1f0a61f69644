"""Exact and numerical tools for synthesizing GKP states and compiling CV gate sets.

Modules
-------
weyl        exact polynomial algebra in q and p
symplectic  gates, symplectic matrices and Gaussian decompositions
kerrplan    product-formula compilation of the cross-Kerr interaction
comb        analytic Gaussian-comb model of GKP synthesis
gridsim     position-grid wavefunction simulation and homodyne binning
ftcalc      fault-tolerance budgets and gate-parameter tables
sampler     seeded random circuits and binned output distributions
cli         command-line entry point
"""

from importlib import resources

__version__ = "0.1.0"


def report_schema() -> dict:
    """The JSON schema that CLI reports follow."""
    import json

    return json.loads(resources.files(__package__).joinpath("report.schema.json").read_text())
