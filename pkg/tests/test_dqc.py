"""Topology model and preset tests."""
import json

import pytest

from dqcut.dqc import CHIPS, DqcTopology, load_topology, make_qpu, preset
from dqcut.errors import TopologyError


def test_manila_preset_capacity():
    topo = preset("manila-x20")
    assert len(topo.qpus) == 20
    assert topo.data_capacity() == {i: 3 for i in range(20)}


def test_washington_capacity():
    topo = preset("washington-x1")
    assert topo.data_capacity()[0] == 125


@pytest.mark.parametrize(
    "chip,data",
    [("manila", 3), ("nairobi", 5), ("melbourne", 13), ("toronto", 25), ("manhattan", 63), ("washington", 125)],
)
def test_table_capacities(chip, data):
    topo = preset(f"{chip}-x1")
    assert topo.data_capacity()[0] == data


def test_toronto_preset_count():
    topo = preset("toronto-x20")
    assert len(topo.qpus) == 20
    assert topo.max_data_capacity == 25


def test_default_preset_count_is_twenty():
    assert len(preset("manila").qpus) == 20


def test_degenerate_qpu_rejected():
    with pytest.raises(TopologyError, match="no data qubits"):
        make_qpu(0, 2, [(0, 1)], comm=(0, 1))


def test_comm_choice_keeps_data_connected():
    for chip, (n, coupling) in CHIPS.items():
        qpu = make_qpu(0, n, coupling)
        assert len(qpu.comm) == 2
        assert len(qpu.data_qubits) == n - 2


def test_single_comm_qubit_json():
    data = {"qpus": [{"id": 0, "coupling": [[0, 1], [1, 2]], "comm": [0]}], "chain": True}
    topo = load_topology(data)
    assert topo.data_capacity()[0] == 2


def test_json_round_trip_text_and_path(tmp_path):
    data = {"qpus": [{"id": 0, "coupling": [[0, 1], [1, 2], [2, 3]], "comm": [0, 3]}]}
    topo = load_topology(json.dumps(data))
    assert topo.data_capacity()[0] == 2
    p = tmp_path / "topo.json"
    p.write_text(json.dumps(data))
    topo2 = load_topology(str(p))
    assert topo2.data_capacity() == topo.data_capacity()


def test_json_validation_names_field():
    with pytest.raises(TopologyError, match="coupling"):
        load_topology({"qpus": [{"id": 0}]})
    with pytest.raises(TopologyError, match="qpus"):
        load_topology({"qpus": []})


def test_disconnected_coupling_rejected():
    with pytest.raises(TopologyError, match="not connected"):
        make_qpu(0, 4, [(0, 1), (2, 3)], comm=(0,))


def test_error_rates_validated():
    with pytest.raises(TopologyError, match="cnot_error"):
        make_qpu(0, 3, [(0, 1), (1, 2)], comm=(0,), cnot_error={"1-2": 1.5})


def test_hops_chain_distance():
    topo = preset("manila-x4")
    assert topo.hops(0, 3) == 3
    assert topo.hops(2, 2) == 0


def test_capacity_sums():
    topo = preset("nairobi-x3")
    assert topo.total_data_capacity == 15


def test_manila_comm_are_line_endpoints():
    qpu = preset("manila-x1").qpus[0]
    assert qpu.comm == (0, 4)
    assert qpu.data_qubits == [1, 2, 3]
    # center of the data line has the highest data degree
    assert max(qpu.data_degree, key=lambda q: (qpu.data_degree[q], -q)) == 2


def test_path_reliability_uniform_errors():
    qpu = preset("manila-x1").qpus[0]
    rel = qpu.path_reliability
    assert rel[1][2] == pytest.approx(0.99)
    assert rel[1][3] == pytest.approx(0.99**2)


def test_unknown_preset():
    with pytest.raises(TopologyError, match="unknown chip"):
        preset("bogus-x3")
