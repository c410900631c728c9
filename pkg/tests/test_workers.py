"""Ordered fan-out with per-point error isolation."""

from __future__ import annotations

import math

import pytest

from pairlab.workers import parallel_map


@pytest.mark.parametrize("workers", [1, 2])
def test_parallel_map_keeps_order_and_isolates_errors(workers):
    results = parallel_map(math.sqrt, [4.0, -1.0, 9.0], workers=workers)
    assert results[0] == (True, 2.0)
    assert results[2] == (True, 3.0)
    ok, message = results[1]
    assert not ok
    assert message.startswith("ValueError")


def test_parallel_map_empty():
    assert parallel_map(math.sqrt, [], workers=4) == []
