import logging

import pytest

@pytest.fixture
def logger():
    # The test functions take the logger that run_test_functions normally passes in
    return logging.getLogger('pytest')
