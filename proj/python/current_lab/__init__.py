"""Random currents, FK clusters, GFF, loop soups and the jump process."""

import json

from . import _core
from ._core import (
    CapacityError,
    ContractError,
    InvariantError,
    LabError,
    ValidationError,
    coupled_fk_sample,
    coupling_tv,
    exact_measure,
    green_matrix,
    partition_functions,
    reconstruct_trace_law,
    run_vrjp,
    sample_configuration,
    sample_field,
    sample_soup_fields,
    sign_assignment_count,
    two_point,
)

__version__ = _core.version


def network(spec):
    """Builds a network from a dict or a JSON string in the network file format."""
    return _core.Network(spec if isinstance(spec, str) else json.dumps(spec))


def load_network(path):
    with open(path) as f:
        return _core.Network(f.read())


def run_suite(net, suite, **config):
    """Runs one verification suite and returns the report as a dict."""
    config["suite"] = suite
    return json.loads(_core.run_suite(net, json.dumps(config)))


__all__ = [
    "CapacityError",
    "ContractError",
    "InvariantError",
    "LabError",
    "ValidationError",
    "coupled_fk_sample",
    "coupling_tv",
    "exact_measure",
    "green_matrix",
    "load_network",
    "network",
    "partition_functions",
    "reconstruct_trace_law",
    "run_suite",
    "run_vrjp",
    "sample_configuration",
    "sample_field",
    "sample_soup_fields",
    "sign_assignment_count",
    "two_point",
]
