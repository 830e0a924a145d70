from __future__ import annotations

import pytest

from hierkey.hierarchy import Hierarchy


@pytest.fixture
def five_class_hierarchy() -> Hierarchy:
    """Five classes with strict-predecessor counts 0, 1, 1, 2, 3.

    u1 sits on top; u4 is reachable through u2, u5 through both u2 and
    u3.  Removing u3 costs u5 exactly one predecessor, and inserting a
    class between u1 and u4 touches only u4's filter.
    """
    return Hierarchy.build(
        ["u1", "u2", "u3", "u4", "u5"],
        [("u1", "u2"), ("u1", "u3"), ("u2", "u4"), ("u2", "u5"), ("u3", "u5")],
    )
