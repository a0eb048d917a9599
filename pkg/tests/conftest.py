import numpy as np
import pytest

from spps.problem import Problem


def example1(M=800, N=20, mode="full", rule="quintic"):
    return Problem.from_expressions(0, np.pi, M, "1", "0", ["-1", "-1"], N=N, mode=mode,
                                    seed=("1", "0"), rule=rule)


def example2(M=100, N=12, mode="full"):
    return Problem.from_expressions(0, np.pi, M, "1", "cos(x)", ["cos(x^2)", "cos(x)"], N=N, mode=mode)


@pytest.fixture(scope="session")
def ex1_full():
    return example1().build_series()


@pytest.fixture(scope="session")
def ex2_problem():
    return example2()


# smooth fixtures shared by the property tests: (name, problem)
SMOOTH = {
    "constant": lambda N=6, M=200: Problem.from_expressions(
        0, 1, M, "1", "0", ["1", "1"], N=N, seed=("1", "0")),
    "graded": lambda N=6, M=200: Problem.from_expressions(
        0, 1.5, M, "1+x^2/4", "sin(x)", ["cos(x)", "1+x/2"], N=N),
    "three": lambda N=4, M=200: Problem.from_expressions(
        -0.5, 1, M, "exp(x/3)", "0.5*x", ["1", "x", "cos(2*x)"], N=N, i0=50),
}
