import numpy as np
import pytest

from dipole_kakeya.settings import configure_settings, get_settings, reset_settings

# Configure default test settings BEFORE importing anything that uses settings
TEST_SETTINGS = {
    "seed": 20240417,
    "log_level": "WARNING",
    "point_cap": 5_000_000,
    "arc_cap": 5_000_000,
    "coverage_samples_per_arc": 512,
}
configure_settings(**TEST_SETTINGS)

# Now import modules that depend on settings
from dipole_kakeya.services import construction_quadruple as quad  # noqa: E402
from dipole_kakeya.services import construction_transfer as transfer  # noqa: E402
from dipole_kakeya.utils.logging import configure_logging  # noqa: E402

configure_logging("WARNING")


@pytest.fixture(autouse=True)
def test_settings(tmp_path):
    """Fresh settings per test, with relative outputs landing in tmp_path."""
    reset_settings()
    configure_settings(**TEST_SETTINGS, output_dir=str(tmp_path))
    yield get_settings()
    reset_settings()
    configure_settings(**TEST_SETTINGS)


@pytest.fixture
def rng():
    """Seeded numpy generator."""
    return np.random.default_rng(20240417)


@pytest.fixture(scope="session")
def schedule():
    """delta_k = 2^-(k^2 + 2): 2^-3, 2^-6, 2^-11, 2^-18."""
    return transfer.polynomial_schedule(4, 1.0, 0.0, 2.0)


@pytest.fixture(scope="session")
def state_a(schedule):
    """Transfer construction through stage 3 (a few thousand points)."""
    return transfer.build_construction_a(schedule, 3)


@pytest.fixture(scope="session")
def state_b():
    """Splitting construction through level 5."""
    return quad.build_construction_b(5)


def random_unit_pairs(rng, m, centres=None, jitter=0.0):
    """m unit pairs with uniform directions; first endpoints near the given centres."""
    if centres is None:
        first = rng.uniform(0.0, 1.0, size=(m, 2))
    else:
        centres = np.asarray(centres, dtype=np.float64)
        first = centres[rng.integers(0, centres.shape[0], size=m)]
        first = first + rng.uniform(-jitter, jitter, size=(m, 2))
    theta = rng.uniform(0.0, 2 * np.pi, size=m)
    second = first + np.column_stack((np.cos(theta), np.sin(theta)))
    return first, second


@pytest.fixture
def dense_pairs(rng):
    """10^4 unit pairs with dense directions, first endpoints in the unit square."""
    return random_unit_pairs(rng, 10_000)


@pytest.fixture
def clustered_pairs(rng):
    """Unit pairs whose first endpoints crowd into a few small clusters."""
    return random_unit_pairs(rng, 4_000, centres=[[0.1, 0.1], [0.55, 0.55]], jitter=0.003)
