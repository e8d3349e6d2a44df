"""Shared desk-scale data for the perturbation and verification tests.

A sparse iid source (one 1 per thousand symbols) over 2**21 symbols is
long enough to hold about 65 complete r1-spans of the plan below, and
sparse enough that the branded marker blocks dominate the long blocks.
"""

import pytest

from rareseries.perturb import PerturbationPlan, PerturbResult, perturb
from rareseries.processes import ProcessSpec, generate
from rareseries.symbols import SymbolSequence

N_DESK_LENGTH = 1 << 21


@pytest.fixture(scope="session")
def planDesk() -> PerturbationPlan:
    # K = 8 sectors of M = 4000, so r1 = 32000; N defaults to 2 r + 2 = 82.

    return PerturbationPlan(gEpsilon=0.5, gDelta=0.6, nL=11, r=40, nM=4000, seed=5)


@pytest.fixture(scope="session")
def seqDeskBase() -> SymbolSequence:
    return generate(ProcessSpec("iid", seed=17, lGProb=(0.999, 0.001)), N_DESK_LENGTH)


@pytest.fixture(scope="session")
def resultDesk(seqDeskBase: SymbolSequence, planDesk: PerturbationPlan) -> PerturbResult:
    return perturb(seqDeskBase, planDesk)
