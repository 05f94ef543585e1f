"""Python front end for the ppqkd C++ simulator."""

import json as _json

from ._ppqkd import (  # noqa: F401
    Basis,
    ConfigError,
    DensityMatrix,
    KrausChannel,
    NoPivotError,
    PauliWord,
    PureState,
    apply_channel,
    apply_pauli,
    bob_resolve,
    density_from_rows,
    derive_v1,
    derive_v2,
    derive_v3,
    deserialize_frame,
    encode_bit,
    flip_probability,
    measure_in_basis,
    outcome_probability,
    resolve_erasures,
    serialize_frame,
    to_density,
    verify,
)
from . import _ppqkd


def run_session(config):
    """Run repetition 0 of the base cell and return its transcript as a dict."""
    return _json.loads(_ppqkd._run_session_json(_json.dumps(config)))


def run_experiment(config):
    """Run every sweep cell and return the structured summary as a dict."""
    return _json.loads(_ppqkd._run_experiment_json(_json.dumps(config)))


def results_csv(config):
    """Run every sweep cell and return the tabular output."""
    return _ppqkd._results_csv(_json.dumps(config))
