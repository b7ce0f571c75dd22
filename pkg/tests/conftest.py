import numpy as np
import pytest

from pwinterp import (FamilySpec, build_generating_function, integer_lattice,
                      make_family)


@pytest.fixture(scope="session")
def gf_lattice_100k():
    return build_generating_function(integer_lattice(100_000))


@pytest.fixture(scope="session")
def gf_lattice_8k():
    return build_generating_function(integer_lattice(8192))


@pytest.fixture(scope="session")
def gf_signed_quarter_out():
    # K = 2^16 keeps the exponent-fit range [32, 4096] within K/10
    seq = make_family(FamilySpec("signed", 0.25), 1 << 16)
    return build_generating_function(seq)


@pytest.fixture(scope="session")
def gf_signed_quarter_in():
    seq = make_family(FamilySpec("signed", -0.25), 1 << 16)
    return build_generating_function(seq)


@pytest.fixture()
def rng():
    return np.random.default_rng(20260808)
