from __future__ import annotations

import pytest

from golden import GOLDEN, golden_path, render_golden


@pytest.mark.parametrize("name", sorted(GOLDEN))
def test_matches_golden_file(name):
    assert golden_path(name).read_text(encoding="utf-8") == render_golden(name)


def test_fishers_default_fixture_reports_discrepancy():
    text = golden_path("fishers/expected/default.txt").read_text(encoding="utf-8")
    assert "discrepancy" in text and "Published p:" in text
