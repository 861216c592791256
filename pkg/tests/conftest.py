import numpy as np
import pytest

from polsynth import benchmark
from polsynth.dataset import split
from polsynth.policy import extract_rules
from polsynth.sensitivity import classify_attributes, privacy_bands
from polsynth.synth import fit


def benchmark_tag_keywords():
    return {"PII": ["personal data", "data originator"],
            "public": ["public weather", "market information", "farm classification"]}


@pytest.fixture(scope="session")
def bench_table():
    return benchmark.generate(1)


@pytest.fixture(scope="session")
def bench_split(bench_table):
    return split(bench_table, 0.2, 7)


@pytest.fixture(scope="session")
def bench_map(bench_table):
    rules = extract_rules(benchmark.POLICY_TEXT)
    return classify_attributes(bench_table.schema, rules, benchmark_tag_keywords(), {})


@pytest.fixture(scope="session")
def bench_bands(bench_map):
    return privacy_bands(bench_map)


@pytest.fixture(scope="session")
def full_model(bench_table):
    return fit(bench_table, seed=0)


@pytest.fixture(scope="session")
def train_model(bench_split):
    return fit(bench_split[0], seed=0)


@pytest.fixture
def rng():
    return np.random.default_rng(12345)


CRITERIA: dict = {}


@pytest.fixture(scope="session")
def record_criterion():
    def record(number: int, passed: bool, detail: str):
        CRITERIA[number] = (passed, detail)
    return record


def pytest_terminal_summary(terminalreporter):
    if not CRITERIA:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(CRITERIA):
        passed, detail = CRITERIA[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if passed else 'FAIL'}  {detail}")
