"""Shared fixtures: small hand-computed instances used across test modules."""

import pytest

import districtvote as dv


@pytest.fixture
def worked():
    """Two districts on a line; every cost below is checked by hand.

    Agents 0 and 1 (district 0) sit at 0.0 and 1.0; agent 2 (district 1) at
    2.0. Alternative 0 is at 0.5, alternative 1 at 1.8. Distances:

        agent 0: 0.5, 1.8      agent 1: 0.5, 0.8      agent 2: 1.5, 0.2
    """
    return dv.build_line_instance([[0.0, 1.0], [2.0]], [0.5, 1.8])


@pytest.fixture
def euclid_small():
    """One district of two agents in the plane, two alternatives."""
    return dv.build_euclidean_instance(
        [[[0.0, 0.0], [3.0, 4.0]]], [[0.0, 0.0], [6.0, 8.0]])
