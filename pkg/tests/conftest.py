import numpy as np
import pytest

from trimer_machines.spin_model import (
    BondExchange,
    CompoundParams,
    DMVector,
    GTensor,
    preset,
    zero_params,
)


def isotropic_triangle(j=4.0, g=2.0):
    return CompoundParams(
        name="iso",
        bonds=(BondExchange(j, j, j),) * 3,
        dm=(DMVector(0, 0, 0),) * 3,
        g=(GTensor(g, g, g),) * 3,
    )


def random_params(rng, scale=5.0):
    """Arbitrary anisotropic parameter set (general J, DM vectors, g-tensors)."""
    return CompoundParams(
        name="random",
        bonds=tuple(BondExchange(*rng.uniform(-scale, scale, 3)) for _ in range(3)),
        dm=tuple(DMVector(*rng.uniform(-1.0, 1.0, 3)) for _ in range(3)),
        g=tuple(GTensor(*rng.uniform(1.5, 2.5, 3)) for _ in range(3)),
    )


def random_hermitian(rng, n=8, scale=None):
    scale = rng.uniform(0.01, 50.0) if scale is None else scale
    a = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * (a + a.conj().T) / 2


@pytest.fixture
def cu3_as():
    return preset("cu3-as")


@pytest.fixture
def zero():
    return zero_params()


@pytest.fixture
def rng():
    return np.random.default_rng(20241016)


_ACCEPTANCE_LINES = []


@pytest.fixture
def report():
    """Record and print one PASS/FAIL line for an acceptance criterion."""

    def _report(number, title, ok, detail=""):
        line = f"criterion {number:>2} {'PASS' if ok else 'FAIL'}  {title}"
        if detail:
            line += f"  [{detail}]"
        _ACCEPTANCE_LINES.append(line)
        print("\n" + line)
        return ok

    return _report


def pytest_terminal_summary(terminalreporter):
    if _ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(_ACCEPTANCE_LINES, key=lambda s: int(s.split()[1])):
            terminalreporter.write_line(line)
