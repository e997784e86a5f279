from fractions import Fraction

import numpy as np
import pytest
from hypothesis import strategies as st

from regdet.freealg import NCPoly

ACCEPTANCE_LINES: list[str] = []

words = st.text(alphabet="ab", max_size=4)
coeffs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


@st.composite
def ncpolys(draw, max_terms=5):
    terms = draw(st.dictionaries(words, coeffs, max_size=max_terms))
    return NCPoly(terms)


@pytest.fixture
def rng():
    return np.random.default_rng(20240601)


def pytest_terminal_summary(terminalreporter):
    if ACCEPTANCE_LINES:
        terminalreporter.section("acceptance criteria")
        for line in ACCEPTANCE_LINES:
            terminalreporter.write_line(line)
