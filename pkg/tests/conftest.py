import os
import sys
from pathlib import Path

# allow up to 8 numba workers even on smaller CI boxes (threads timeshare);
# must be set before numba is first imported
os.environ.setdefault("NUMBA_NUM_THREADS", "8")

import numpy as np
import pytest

sys.path.insert(0, str(Path(__file__).parent))


@pytest.fixture
def rng():
    return np.random.default_rng(1234)
