import numpy as np
import pytest

from eirlab import PredictionMatrix


def random_prediction_matrix(rng: np.random.Generator, max_M=6, max_m=30, max_K=4) -> PredictionMatrix:
    """Random ensemble with a mix of accurate, mediocre and adversarial members.

    A third of the draws use uniform weights so that exact vote ties occur.
    """
    M = int(rng.integers(1, max_M + 1))
    m = int(rng.integers(1, max_m + 1))
    K = int(rng.integers(2, max_K + 1))
    labels = rng.integers(0, K, size=m)
    accuracy = rng.uniform(0.0, 1.0, size=M) ** rng.choice([0.25, 1.0])
    correct = rng.random((M, m)) < accuracy[:, None]
    shift = rng.integers(1, K, size=(M, m))
    preds = np.where(correct, labels[None, :], (labels[None, :] + shift) % K)
    if rng.random() < 1 / 3:
        weights = None
    else:
        weights = rng.dirichlet(np.full(M, rng.choice([0.3, 1.0, 5.0])))
        weights = weights / weights.sum()
    return PredictionMatrix(preds, labels, K, weights)


def make_corpus(n: int, seed: int = 2024) -> list[PredictionMatrix]:
    rng = np.random.default_rng(seed)
    return [random_prediction_matrix(rng) for _ in range(n)]


@pytest.fixture
def e1() -> PredictionMatrix:
    return PredictionMatrix(
        preds=np.array([[0, 0, 1, 0], [0, 1, 1, 1], [1, 0, 1, 1]]),
        labels=np.array([0, 0, 1, 1]),
        num_classes=2,
    )


@pytest.fixture
def perfect() -> PredictionMatrix:
    labels = np.array([0, 1, 1, 0, 1])
    return PredictionMatrix(np.tile(labels, (3, 1)), labels, 2)


@pytest.fixture
def rng() -> np.random.Generator:
    return np.random.default_rng(7)


def pytest_terminal_summary(terminalreporter):
    mod = __import__("sys").modules.get("test_acceptance")
    lines = getattr(mod, "RESULTS", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in lines:
            terminalreporter.write_line(line)
