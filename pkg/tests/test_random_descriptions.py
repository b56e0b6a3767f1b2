from __future__ import annotations

import pytest

from invariants import check_random_description


@pytest.mark.parametrize("seed", range(200))
def test_random_description(seed):
    assert check_random_description(seed) in ("solved", "unsupported")
