import numpy as np
from hypothesis import strategies as st

from susy_interp import continuum_families as cf
from susy_interp import discrete_families as df

CONTINUUM_IDS = list(cf.CONTINUUM_FAMILIES)
DISCRETE_IDS = list(df.DISCRETE_FAMILIES)

seeds = st.integers(0, 2**32 - 1)
s_values = st.floats(0.0, 1.0)


@st.composite
def continuum_case(draw, ids=CONTINUUM_IDS):
    """(family, lam) with lam drawn from the sampling ranges."""
    fam = cf.get_family(draw(st.sampled_from(ids)))
    return fam, cf.sample_parameters(fam, np.random.default_rng(draw(seeds)))


@st.composite
def discrete_case(draw, ids=DISCRETE_IDS, q=0.5):
    fam = df.get_family(draw(st.sampled_from(ids)), q=q)
    return fam, df.sample_parameters(fam, np.random.default_rng(draw(seeds)))


# one line per acceptance criterion, echoed in the terminal summary
ACCEPTANCE_LINES: list = []


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in sorted(ACCEPTANCE_LINES):
            terminalreporter.write_line(line)
