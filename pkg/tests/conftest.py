import pytest
from hypothesis import HealthCheck, settings

from radialquant import geometry, potentials

settings.register_profile(
    "default", deadline=None, max_examples=40,
    suppress_health_check=[HealthCheck.too_slow],
)
settings.load_profile("default")

# (potential, n, r) grid on which the exact curvature is checked against the oracle
ORACLE_RADII = (0.5, 1.0, 2.0)
ORACLE_DIMS = (2, 3, 4)

# criterion number -> (passed, detail); filled by test_acceptance
ACCEPTANCE = {}

POTENTIALS = {
    "flat": potentials.flat,
    "simanca": potentials.simanca,
    "eguchi-hanson": potentials.eguchi_hanson,
}


@pytest.fixture(scope="session")
def curvature_pairs():
    """Exact and oracle curvature reports, computed once per session."""
    cache = {}

    def get(name, n, r):
        key = (name, n, r)
        if key not in cache:
            p = POTENTIALS[name]()
            cache[key] = (geometry.curvature_invariants_at(p, n, r),
                          geometry.curvature_fd_oracle(p, n, r))
        return cache[key]

    return get


def pytest_terminal_summary(terminalreporter):
    if not ACCEPTANCE:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(ACCEPTANCE):
        ok, detail = ACCEPTANCE[number]
        terminalreporter.write_line(f"criterion {number:2d}: {'PASS' if ok else 'FAIL'}  {detail}")
