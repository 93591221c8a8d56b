import csv
import math
import time
from contextlib import contextmanager
from pathlib import Path

import numpy as np
import pytest

DATA = Path(__file__).parent / "data"


def dense_rows():
    """Two sequences, an anchor and one test config, QP 22..37, non-cubic curves."""
    rows = []
    for seq, base, tilt in (("Cactus", 4.4, 0.0), ("Kimono", 4.1, 0.004)):
        for config, offset, dq in (("anchor", 0.0, 0.0), ("test", -0.035, 0.05)):
            for qp in range(22, 38):
                t = qp - 22
                psnr = 41.5 - 0.52 * t + 0.004 * t**2 + dq + tilt * t
                logr = base + offset - 0.062 * t + 0.0007 * t**2 + 0.012 * math.sin(0.9 * t) + 0.0004 * t * (config == "test")
                rows.append((seq, config, qp, round(psnr, 4), round(10.0**logr, 3)))
    return rows


@pytest.fixture
def data_dir():
    return DATA


@pytest.fixture
def dense_csv(tmp_path):
    path = tmp_path / "dense16.csv"
    with path.open("w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["sequence", "config", "param", "psnr", "bitrate"])
        w.writerows(dense_rows())
    return path


@pytest.fixture
def rng():
    return np.random.default_rng(20231210)


# criterion number -> (title, passed, seconds), filled by the acceptance suite
ACCEPTANCE = {}


@pytest.fixture
def criterion():
    """Context manager that times one acceptance criterion and records the outcome."""

    @contextmanager
    def run(number, title, limit=None):
        start = time.perf_counter()
        passed = False
        try:
            yield
            elapsed = time.perf_counter() - start
            if limit is not None:
                assert elapsed < limit, f"took {elapsed:.3f} s, limit {limit} s"
            passed = True
        finally:
            ACCEPTANCE[number] = (title, passed, time.perf_counter() - start)

    return run


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for n in sorted(ACCEPTANCE):
        title, passed, secs = ACCEPTANCE[n]
        terminalreporter.write_line(f"criterion {n:2d}: {'PASS' if passed else 'FAIL'}  {title}  [{secs:.3f} s]")
