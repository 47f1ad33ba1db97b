import os

# keep BLAS single-threaded so timings and results match a one-core run
for _var in ("OPENBLAS_NUM_THREADS", "OMP_NUM_THREADS", "MKL_NUM_THREADS"):
    os.environ.setdefault(_var, "1")

import pytest  # noqa: E402

from helpers import DATA, GRAMMAR_NAMES  # noqa: E402
from semparse.grammars import load_bundled  # noqa: E402


@pytest.fixture(scope="session")
def grammars():
    return {name: load_bundled(name) for name in GRAMMAR_NAMES}


@pytest.fixture(scope="session")
def data_dir():
    return DATA


def pytest_terminal_summary(terminalreporter):
    from helpers import ACCEPTANCE

    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n}: {'PASS' if ok else 'FAIL'}  {detail}")
