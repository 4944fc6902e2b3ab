import numpy as np
import pytest

from biplotmotion.data import Dataset, ingest_csv
from biplotmotion.synthetic import climate_like, gapminder_like, write_csv


@pytest.fixture
def rng():
    return np.random.default_rng(20240611)


@pytest.fixture(scope="session")
def data_dir(tmp_path_factory):
    d = tmp_path_factory.mktemp("data")
    write_csv(gapminder_like(), d / "gapminder.csv")
    write_csv(climate_like(), d / "climate.csv")
    target = [r for r in climate_like(seed=7, levels=(1989,))]
    write_csv(target, d / "climate_target.csv")
    return d


@pytest.fixture(scope="session")
def gapminder(data_dir) -> Dataset:
    return ingest_csv(data_dir / "gapminder.csv", "year", "continent")


@pytest.fixture(scope="session")
def climate(data_dir) -> Dataset:
    return ingest_csv(data_dir / "climate.csv", "Year", "Region")


def stationary_fixture(rng, levels=8, groups=10, per_group=4, p=5, anomaly=None, sigma=0.5):
    """The same base table repeated at every level; optionally one level gets noise."""
    latent = rng.normal(size=(groups * per_group, 2)) @ rng.normal(size=(2, p)) * 2.0
    base = latent + 0.3 * rng.normal(size=(groups * per_group, p))
    X, times, grp = [], [], []
    for t in range(levels):
        block = base.copy()
        if anomaly == t:
            block = block + rng.normal(scale=sigma, size=block.shape)
        X.append(block)
        times += [str(2000 + t)] * len(block)
        grp += [f"G{g}" for g in range(groups) for _ in range(per_group)]
    return Dataset.from_arrays(np.vstack(X), times, grp, [f"x{j}" for j in range(p)])


_CRITERIA: dict[int, tuple[str, str]] = {}


def pytest_runtest_logreport(report):
    name = report.nodeid.rsplit("::", 1)[-1]
    if "test_acceptance.py" not in report.nodeid or not name.startswith("test_criterion_"):
        return
    n = int(name.split("_")[2])
    if report.when == "call" or report.outcome != "passed":
        verdict = {"passed": "PASS", "failed": "FAIL", "skipped": "SKIPPED"}[report.outcome]
        detail = ""
        if report.skipped and isinstance(report.longrepr, tuple):
            detail = report.longrepr[2]
        elif report.failed:
            detail = str(report.longrepr).strip().splitlines()[-1]
        _CRITERIA[n] = (verdict, detail)


def pytest_terminal_summary(terminalreporter):
    if not _CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(_CRITERIA):
        verdict, detail = _CRITERIA[n]
        terminalreporter.write_line(f"CRITERION {n}: {verdict}" + (f" ({detail})" if detail else ""))
