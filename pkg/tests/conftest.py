import warnings

import pytest

from credalmc import ConvergenceCaveatWarning


@pytest.fixture(autouse=True)
def _silence_limit_caveat():
    # The closed-convexity caveat is asserted explicitly where it matters;
    # everywhere else it is just noise.
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", ConvergenceCaveatWarning)
        yield
