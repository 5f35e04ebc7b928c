import numpy as np
import pytest
import sympy as sp


@pytest.fixture
def rng():
    return np.random.default_rng(20261016)


S = sp.Symbol("s", real=True)


def sympy_profile(kind, param):
    """Symbolic h(s) used as an independent oracle."""
    if kind == "exponential":
        eps = sp.nsimplify(param)
        rate = (1 - sp.sqrt(1 + 4 / eps)) / 2
        return sp.exp(rate * S)
    b = sp.nsimplify(param)
    return sp.exp(-1 / (b**2 - S**2))


def sympy_derivs(expr, s_values, order=3):
    funcs = [sp.lambdify(S, sp.diff(expr, S, k), "numpy") for k in range(order + 1)]
    s_values = np.asarray(s_values, dtype=float)
    return np.stack([np.broadcast_to(f(s_values), s_values.shape) for f in funcs])


# one line per acceptance criterion, filled in by test_acceptance.py
ACCEPTANCE_LINES = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
