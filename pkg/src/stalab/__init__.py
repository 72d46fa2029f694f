"""stalab: transitionless driven quantum gates and analog search, with
energetic-cost accounting and complexity sweeps."""

from . import ce_gates, cli, cost, dynamics, grover, optimizer, qcore, reports  # noqa: F401

__version__ = "0.1.0"
