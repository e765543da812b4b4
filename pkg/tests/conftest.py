import math

import numpy as np
import pytest

from qwmarkov import _backend

HADAMARD = math.pi / 4
ANGLES = [math.pi / 6, math.pi / 4, math.pi / 3]


@pytest.fixture(params=_backend.available())
def backend(request, monkeypatch):
    """Run the test once per importable kernel backend."""
    monkeypatch.setattr(_backend, "kernels", _backend.get(request.param))
    return request.param


@pytest.fixture
def rng():
    return np.random.default_rng(20240607)


def random_spinor(rng, n, origin=0, time=0):
    from qwmarkov import SpinorField

    a = rng.normal(size=n) + 1j * rng.normal(size=n)
    b = rng.normal(size=n) + 1j * rng.normal(size=n)
    norm = math.sqrt(np.sum(np.abs(a) ** 2 + np.abs(b) ** 2))
    return SpinorField(origin, a / norm, b / norm, time)


def dense_walk_operator(theta, n_sites):
    """U(theta) = (T- (x) |L><L| + T+ (x) |R><R|)(I (x) sigma_z exp(i theta sigma_y)) as a matrix.

    Basis index 2*k + c for lattice slot k and chirality c (0 = L, 1 = R).
    """
    sy = np.array([[0, -1j], [1j, 0]])
    sz = np.diag([1.0, -1.0])
    coin = sz @ (math.cos(theta) * np.eye(2) + 1j * math.sin(theta) * sy)
    t_minus = np.eye(n_sites, k=1)   # |m-1><m|
    t_plus = np.eye(n_sites, k=-1)   # |m+1><m|
    pl = np.diag([1.0, 0.0])
    pr = np.diag([0.0, 1.0])
    shift = np.kron(t_minus, pl) + np.kron(t_plus, pr)
    return shift @ np.kron(np.eye(n_sites), coin)


ACCEPTANCE = []


def record_criterion(number, ok, detail):
    """Log one acceptance verdict; the terminal summary lists them all."""
    line = f"{'PASS' if ok else 'FAIL'} criterion {number}: {detail}"
    ACCEPTANCE.append(line)
    print(line)
    return ok


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE:
            terminalreporter.write_line(line)
