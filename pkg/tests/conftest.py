import numpy as np
import pytest

import clearnet as cn

# (r, m) grid used by the ensemble checks
R_VALUES = (0.1, 0.3, 0.5, 0.7, 0.9)
M_VALUES = (0.1, 0.3, 0.5, 0.7, 0.9)
ENSEMBLE_SIZE = 200


def ensemble_system(i: int) -> cn.FinancialSystem:
    """Seeded system i of the test ensemble: 2-49 banks, density 0.2-0.8."""
    n_banks = 2 + (i % 48)
    density = 0.2 + 0.6 * ((i * 0.37) % 1.0)
    return cn.generate_random_system(seed=i, n_banks=n_banks, density=density)


def partial_default_variant(system: cn.FinancialSystem, seed: int) -> cn.FinancialSystem:
    """Shock a random subset of banks so only part of the system defaults."""
    rng = np.random.default_rng(10_000 + seed)
    n = system.n_banks
    hit = rng.choice(n, size=int(rng.integers(1, n + 1)), replace=False)
    a = system.external_assets.copy()
    a[hit] = a[hit] * rng.uniform(0.0, 0.5, size=hit.size)
    return system.with_external_assets(a)


@pytest.fixture
def sys_a() -> cn.FinancialSystem:
    """Two banks owing each other and the sink; solvent at full payment."""
    return cn.build_system([[0, 2, 8], [3, 0, 7], [0, 0, 0]], [8.0, 9.0, 1.0])


@pytest.fixture
def sys_0() -> cn.FinancialSystem:
    """Two banks owing only the sink; bank 2 is undercapitalized."""
    return cn.build_system([[0, 0, 10], [0, 0, 8], [0, 0, 0]], [12.0, 4.0, 1.0])


@pytest.fixture(scope="session")
def ensemble() -> list:
    return [ensemble_system(i) for i in range(ENSEMBLE_SIZE)]
