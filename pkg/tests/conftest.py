import sys

import numpy as np
from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

from ricalc.stepfn import StepFunction

settings.register_profile("default", max_examples=60, deadline=None, suppress_health_check=[HealthCheck.too_slow])
settings.load_profile("default")


@st.composite
def step_functions(draw, max_pieces=6, allow_zero=True):
    k = draw(st.integers(min_value=0 if allow_zero else 1, max_value=max_pieces))
    lens = draw(st.lists(st.floats(0.05, 5.0), min_size=k, max_size=k))
    vals = draw(st.lists(st.sampled_from([0.0, 0.5, 1.0, 2.0, 3.0]) | st.floats(0.0, 5.0), min_size=k, max_size=k))
    if not allow_zero:
        vals[draw(st.integers(0, k - 1))] = draw(st.floats(0.1, 5.0))
    return StepFunction(np.cumsum(lens).tolist(), vals)


@st.composite
def nonincreasing_step(draw, max_pieces=6):
    f = draw(step_functions(max_pieces, allow_zero=False))
    from ricalc.stepfn import rearrange

    return rearrange(f)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    lines = getattr(mod, "ACCEPTANCE", None)
    if lines:
        terminalreporter.section("acceptance criteria")
        for line in sorted(lines, key=lambda s: int(s.split("criterion ")[1].split(":")[0])):
            terminalreporter.write_line(line)
