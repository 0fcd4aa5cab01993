import sys
from pathlib import Path

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))

from helpers import make_layout, dwell_stream  # noqa: E402

from gazeread import linguistics as ling


@pytest.fixture(scope="session")
def lexicons():
    return ling.load_fixture_lexicons()


@pytest.fixture()
def simple_layout():
    return make_layout("doc-simple", ["The cat sat.", "The quick brown fox jumped over the lazy dog.",
                                      "Water is blue."])


@pytest.fixture()
def rng():
    return np.random.default_rng(20240817)
