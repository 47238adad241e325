import numpy as np
import pytest

from sparse_expsum.core import ExponentialSum

# ten-term complex model with four printed decimals
EX1_Z = np.array([
    -0.0159 + 0.3739j, -0.0770 + 0.0394j, -0.0639 - 0.1791j, -0.2324 + 0.5268j,
    0.0102 + 0.4511j, 0.0129 + 0.0602j, 0.3812 + 0.1470j, 0.3538 + 0.1045j,
    0.1732 - 0.3507j, -0.1457 - 0.2385j,
])
EX1_A = np.array([
    0.4709 + 0.4302j, 0.2305 + 0.1848j, 0.8443 + 0.9049j, 0.1948 + 0.9797j,
    0.2259 + 0.4389j, 0.1707 + 0.1111j, 0.2277 + 0.2581j, 0.4357 + 0.4087j,
    0.3111 + 0.5949j, 0.9234 + 0.2622j,
])

# eleven-term real model of 1/x on x = 1 + 0.49 k, k = 0..100
EX2_Z = np.array([0.9959, 0.9781, 0.9443, 0.8919, 0.8178, 0.7198, 0.5981, 0.4568, 0.3060, 0.1634, 0.0533])
EX2_A = np.array([0.0214, 0.0507, 0.0818, 0.1137, 0.1422, 0.1597, 0.1585, 0.1339, 0.0895, 0.0405, 0.0082])
EX2_STEP = 0.49
EX2_M = 100

EX1_SIGMA = [4.4340e-01, 5.5171e-02, 1.8185e-02, 8.1149e-03, 7.8571e-05,
             4.3647e-06, 2.6711e-07, 6.2531e-08, 1.4512e-10]
EX1_ERROR = [4.4142e-01, 5.3850e-02, 1.8096e-02, 8.1145e-03, 7.8571e-05,
             4.3647e-06, 2.6711e-07, 6.2531e-08, 1.4512e-10]

EX2_SIGMA = [1.5789, 4.3137e-01, 9.9203e-02, 1.9627e-02, 3.3233e-03,
             4.7360e-04, 5.5123e-05, 4.9665e-06, 3.1299e-07, 1.0840e-08]
EX2_ERROR = [1.0479, 3.7340e-01, 9.4372e-02, 1.9207e-02, 3.2870e-03,
             4.6840e-04, 5.4309e-05, 4.8884e-06, 3.1581e-07, 4.5328e-08]

# reduced nodes and weights for n = 1..10, ascending node order
EX2_NODES = {
    1: [0.9804],
    2: [0.8725, 0.9933],
    3: [0.6982, 0.9545, 0.9953],
    4: [0.5254, 0.8706, 0.9710, 0.9958],
    5: [0.3856, 0.7544, 0.9187, 0.9760, 0.9959],
    6: [0.2816, 0.6279, 0.8386, 0.9358, 0.9776, 0.9959],
    7: [0.2063, 0.5079, 0.7391, 0.8731, 0.9421, 0.9780, 0.9959],
    8: [0.1516, 0.4022, 0.6309, 0.7901, 0.8869, 0.9439, 0.9780, 0.9959],
    9: [0.1112, 0.3123, 0.5220, 0.6917, 0.8113, 0.8911, 0.9443, 0.9781, 0.9959],
    10: [0.0802, 0.2355, 0.4157, 0.5814, 0.7154, 0.8171, 0.8919, 0.9443, 0.9781, 0.9959],
}
EX2_WEIGHTS = {
    1: [0.2419],
    2: [0.6728, 0.0434],
    3: [0.7437, 0.1717, 0.0290],
    4: [0.5561, 0.3228, 0.0921, 0.0225],
    5: [0.3499, 0.3886, 0.1756, 0.0637, 0.0217],
    6: [0.2045, 0.3592, 0.2434, 0.1173, 0.0542, 0.0215],
    7: [0.1158, 0.2832, 0.2669, 0.1685, 0.0929, 0.0514, 0.0214],
    8: [0.0645, 0.2011, 0.2474, 0.1988, 0.1318, 0.0841, 0.0508, 0.0214],
    9: [0.0354, 0.1320, 0.2014, 0.2001, 0.1597, 0.1172, 0.0821, 0.0507, 0.0214],
    10: [0.0186, 0.0797, 0.1455, 0.1753, 0.1686, 0.1444, 0.1140, 0.0818, 0.0507, 0.0214],
}

SUITE_SEED = 20240611
SUITE_SIZE = 50


def random_sum(rng, N, rmax=0.9, min_sep=0.05):
    """Random N-term sum, |z| <= rmax, pairwise node distance >= min_sep."""
    while True:
        r = rmax * np.sqrt(rng.uniform(0.0025, 1.0, N))
        z = r * np.exp(2j * np.pi * rng.uniform(size=N))
        d = np.abs(z[:, None] - z[None, :])
        d[np.diag_indices(N)] = np.inf
        if N < 2 or d.min() >= min_sep:
            break
    a = rng.normal(size=N) + 1j * rng.normal(size=N)
    return ExponentialSum(a, z)


def make_suite(seed=SUITE_SEED, size=SUITE_SIZE, max_order=8):
    rng = np.random.default_rng(seed)
    return [random_sum(rng, int(rng.integers(1, max_order + 1))) for _ in range(size)]


def match_terms(found: ExponentialSum, ref: ExponentialSum):
    """Reorder ``found`` to the nearest node of each ``ref`` node."""
    idx = [int(np.argmin(np.abs(found.nodes - z))) for z in ref.nodes]
    return found.nodes[idx], found.weights[idx]


@pytest.fixture(scope="session")
def ex1():
    return ExponentialSum(EX1_A, EX1_Z)


@pytest.fixture(scope="session")
def ex2():
    return ExponentialSum(EX2_A, EX2_Z)


@pytest.fixture(scope="session")
def suite():
    return make_suite()


@pytest.fixture
def rng():
    return np.random.default_rng(7)


# criterion number -> (passed, detail); filled by test_acceptance.py
ACCEPTANCE: dict[int, tuple[bool, str]] = {}


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
