import math

import pytest

cl = pytest.importorskip("current_lab")

EDGE = {"vertices": 2, "edges": [[0, 1]], "beta": [1.0], "pinning": {"vertex": 0, "conductance": 2.0}}
TRIANGLE = {"vertices": 3, "edges": [[0, 1], [1, 2], [2, 0]], "beta": 0.5,
            "pinning": {"vertex": 0, "conductance": 2.0}}


def sourceless_on_triangle(n):
    # edges (0,1), (1,2), (2,0)
    return all((n[a] + n[b]) % 2 == 0 for a, b in [(0, 2), (0, 1), (1, 2)])


def test_single_edge_closed_forms():
    net = cl.network(EDGE)
    z = cl.partition_functions(net)
    assert z["ising"] == pytest.approx(4 * math.cosh(1.0), rel=1e-12)
    assert z["current"] == pytest.approx(math.cosh(1.0), rel=1e-12)
    fk = cl.exact_measure(net, "fk")
    assert fk["probabilities"][1] == pytest.approx(math.tanh(1.0), abs=1e-12)
    assert cl.two_point(net, 0, 1) == pytest.approx(math.tanh(1.0), abs=1e-12)


def test_identities_on_triangle():
    net = cl.network(TRIANGLE)
    assert cl.coupling_tv(net) <= 1e-12
    rec = cl.reconstruct_trace_law(net)["probabilities"]
    trace = cl.exact_measure(net, "current-trace")["probabilities"]
    assert max(abs(a - b) for a, b in zip(rec, trace)) <= 1e-10
    assert cl.sign_assignment_count(net, [1, 1, 1]) == 2


def test_samplers_are_deterministic_and_sourceless():
    net = cl.network(TRIANGLE)
    assert cl.sample_configuration(net, "ising", 3) == cl.sample_configuration(net, "ising", 3)
    s = cl.coupled_fk_sample(net, 1, 2)
    assert s["superposed"] == [max(a > 0, b) for a, b in zip(s["current"], s["bernoulli"])]
    for seed in range(20):
        n = cl.run_vrjp(net, [2, 0, 1], seed)
        assert sourceless_on_triangle(n)
        assert sourceless_on_triangle(cl.sample_soup_fields(net, 0.5, 120, seed)["crossings"])
    f = cl.sample_soup_fields(net, 0.5, 120, 5)
    assert all(x >= 0 for x in f["occupation"])


def test_green_matrix_and_field():
    net = cl.network(EDGE)
    g = cl.green_matrix(net)
    assert g.shape == (2, 2)
    assert g[0, 0] == pytest.approx(0.5)
    assert g[1, 1] == pytest.approx(1.5)
    assert len(cl.sample_field(net, 1)) == 2


def test_errors_are_typed():
    with pytest.raises(cl.ValidationError):
        cl.network({"vertices": 2, "edges": [[0, 1]], "beta": [-1.0]})
    with pytest.raises(cl.ValidationError):
        cl.network("{not json")
    with pytest.raises(cl.LabError):
        cl.run_vrjp(cl.network(TRIANGLE), [0, 0, 1], 1)


def test_run_suite_report():
    report = cl.run_suite(cl.network(EDGE), "verify-coupling", replicas=2000, seed=4)
    assert report["verdict"] == "pass"
    assert {c["name"] for c in report["checks"]} >= {"coupling_lemma", "partition_identity"}
