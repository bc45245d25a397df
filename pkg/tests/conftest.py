import pytest


RAW_Z = {"class": "Z", "A": [["2", "0"], ["3", "0"]], "alpha": ["-1/2", "-1/2"]}

RAW_Z2 = {
    "class": "Z2",
    "A": [["1.2", "0.8"], ["1.2", "-0.8"]],
    "alpha": ["1/2", "1/2"],
    "B": [["1.1", "1.1"], ["1.1", "-1.1"]],
    "beta": ["-1/2", "-1/2"],
    "intervals": [["-3", "-2"], ["2", "3"]],
}


@pytest.fixture(scope="session")
def spec_z():
    from hplab.funcspec import validate_spec

    return validate_spec(RAW_Z)


@pytest.fixture(scope="session")
def spec_z2():
    from hplab.funcspec import validate_spec

    return validate_spec(RAW_Z2)


@pytest.fixture(scope="session")
def qd_p1():
    """Extremal quadratic differential for the p=1 real case (images 1/2, 1/3)."""
    from hplab.scurve import chebotarev_solve

    return chebotarev_solve([1 / 3, 1 / 2])


@pytest.fixture(scope="session")
def compact_p1(qd_p1):
    from hplab.scurve import trace_compact

    return trace_compact(qd_p1)
