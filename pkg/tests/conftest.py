from __future__ import annotations

import pytest

from ovalis.corpus import load_corpus


@pytest.fixture(scope="session")
def corpus():
    return load_corpus()
