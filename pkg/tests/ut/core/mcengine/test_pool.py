import pytest

from tesslab.core.errors import InvalidParameterError
from tesslab.core.mcengine.pool import ReplicationPool


@pytest.mark.ut
def test_serial_map_keeps_order():
    assert ReplicationPool().map(abs, [-3, -1, 2]) == [3, 1, 2]


@pytest.mark.ut
def test_process_map_keeps_order():
    with ReplicationPool(2) as pool:
        assert pool.map(abs, range(-20, 0)) == list(range(20, 0, -1))
        assert pool.threads == 2


@pytest.mark.ut
def test_threads_must_be_positive():
    with pytest.raises(InvalidParameterError):
        ReplicationPool(0)
