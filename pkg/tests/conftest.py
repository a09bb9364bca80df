import numpy as np
import pytest

from gausset import LabeledDataset, PriorHyper, accumulate, posterior


@pytest.fixture
def worked_dataset():
    """1-D dataset: class 'a' holds {1, 3}, class 'b' holds {2}."""
    return LabeledDataset(np.array([[1.0], [3.0], [2.0]]),
                          np.array([0, 0, 1]), ("a", "b"))


@pytest.fixture
def worked_stats(worked_dataset):
    return accumulate(worked_dataset)


@pytest.fixture
def worked_posterior(worked_stats):
    """Posterior at r = 1 under the non-informative prior.

    Hand values: M* = [4/3, 1], diag R* = (3, 2), a* = 3,
    B* = 14 - 16/3 - 4/2 = 20/3.
    """
    return posterior(worked_stats, PriorHyper.noninformative(1.0))


def random_spd(rng, n, jitter=1e-3):
    g = rng.normal(size=(n, n))
    return g @ g.T + jitter * np.eye(n)
