import io
import socket
import threading
from concurrent.futures import ThreadPoolExecutor

import numpy as np
import pytest

from sparsecut.graph import WeightedGraph, generate_instance
from sparsecut.qubo import compile_qubo, qubo_objective
from sparsecut.remote import (
    ObjectiveMismatch,
    ProtocolError,
    RemoteConnectionError,
    RemoteServerError,
    RemoteTimeout,
    encode_request,
    read_request,
    running_server,
    submit,
)
from sparsecut.resistance import effective_resistances
from sparsecut.sparsifier import SparsifyConfig, resolve_q, sparsify


@pytest.fixture(scope="module")
def server():
    with running_server(solver="tabu", seed=0, record=True) as srv:
        yield srv


def raw_exchange(address, payload: bytes) -> bytes:
    host, port = address.split(":")
    with socket.create_connection((host, int(port)), timeout=10) as sock:
        sock.sendall(payload)
        sock.shutdown(socket.SHUT_WR)
        chunks = []
        while chunk := sock.recv(4096):
            chunks.append(chunk)
    return b"".join(chunks)


def test_triangle_round_trip(server, triangle):
    q = compile_qubo(triangle)
    rep = submit(server.address, q, budget_iters=100)
    assert rep.server_objective == 2.0
    assert rep.triplet_count == 6
    assert rep.request_bytes >= rep.triplet_count
    assert qubo_objective(q, rep.assignment) == 2.0


def test_single_edge(server):
    rep = submit(server.address, compile_qubo(WeightedGraph.from_edges(2, [(0, 1, 3.0)])), 50)
    assert rep.triplet_count == 3
    assert rep.server_objective == 3.0


def test_edgeless_instance(server):
    rep = submit(server.address, compile_qubo(WeightedGraph.from_edges(4, [])), 50)
    assert rep.triplet_count == 0
    assert rep.server_objective == 0.0
    assert len(rep.bitstring()) == 4


def test_request_layout(triangle):
    data = encode_request(compile_qubo(triangle), 77).decode()
    lines = data.split("\n")
    assert lines[0] == "QUBO 3 6 77"
    assert lines[-2] == "END" and lines[-1] == ""
    assert lines[1] == "0 0 2.0000000000000000e+00"
    assert encode_request(compile_qubo(triangle), 77, "shortest").decode().split("\n")[1] == "0 0 2.0"


@pytest.mark.parametrize("fmt", ["fixed", "shortest"])
def test_round_trip_integrity(server, fmt):
    g = generate_instance("weighted-style", 30, 0.4, seed=8).scaled(1 / 3)
    sparse = sparsify(g, effective_resistances(g), SparsifyConfig(q=90, seed=2))
    q = compile_qubo(sparse)
    before = len(server.received)
    submit(server.address, q, 500, value_format=fmt)
    assert server.received[before] == q
    # the parser alone reconstructs the same instance too
    parsed, budget = read_request(io.BytesIO(encode_request(q, 500, fmt)))
    assert parsed == q and budget == 500


def test_nnz_mismatch_gets_err(server):
    short = b"QUBO 3 6 10\n0 0 2.0\n0 1 -1.0\nEND\n"
    assert raw_exchange(server.address, short).startswith(b"ERR ")
    long = b"QUBO 2 1 10\n0 0 1.0\n1 1 1.0\nEND\n"
    assert raw_exchange(server.address, long).startswith(b"ERR ")


@pytest.mark.parametrize(
    "payload",
    [b"HELLO\n", b"QUBO 2 1\n", b"QUBO 2 1 5\n0 5 1.0\nEND\n", b"QUBO 2 1 5\n0 1 abc\nEND\n",
     b"QUBO 2 1 5\n1 0 1.0\nEND\n", b""],
)
def test_malformed_requests(server, payload):
    resp = raw_exchange(server.address, payload)
    assert resp.startswith(b"ERR ") and resp.endswith(b"\n") and resp.count(b"\n") == 1


def test_err_surfaces_as_server_error():
    q = compile_qubo(generate_instance("g05-style", 30, 0.5, seed=0))
    with running_server(solver="exact") as srv:
        with pytest.raises(RemoteServerError, match="dimension"):
            submit(srv.address, q, 10)


def test_connection_refused():
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    port = sock.getsockname()[1]
    sock.close()
    with pytest.raises(RemoteConnectionError):
        submit(f"127.0.0.1:{port}", compile_qubo(WeightedGraph.from_edges(2, [(0, 1, 1.0)])), 5)


def _fake_server(reply: bytes | None):
    sock = socket.socket()
    sock.bind(("127.0.0.1", 0))
    sock.listen(1)
    stop = threading.Event()

    def run():
        conn, _ = sock.accept()
        with conn:
            while not conn.recv(65536).endswith(b"END\n"):
                pass
            if reply is None:
                stop.wait(5)
            else:
                conn.sendall(reply)

    threading.Thread(target=run, daemon=True).start()
    return sock, stop


def test_timeout():
    sock, stop = _fake_server(None)
    try:
        with pytest.raises(RemoteTimeout):
            submit("127.0.0.1:%d" % sock.getsockname()[1],
                   compile_qubo(WeightedGraph.from_edges(2, [(0, 1, 1.0)])), 5, timeout=0.3)
    finally:
        stop.set()
        sock.close()


def test_objective_mismatch_detected():
    sock, stop = _fake_server(b"SOLUTION 99.0\n10\nEND\n")
    try:
        with pytest.raises(ObjectiveMismatch):
            submit("127.0.0.1:%d" % sock.getsockname()[1],
                   compile_qubo(WeightedGraph.from_edges(2, [(0, 1, 1.0)])), 5)
    finally:
        sock.close()


def test_malformed_response_detected():
    sock, stop = _fake_server(b"SOLUTION 1.0\n1\nEND\n")
    try:
        with pytest.raises(ProtocolError):
            submit("127.0.0.1:%d" % sock.getsockname()[1],
                   compile_qubo(WeightedGraph.from_edges(2, [(0, 1, 1.0)])), 5)
    finally:
        sock.close()


def test_concurrent_clients(server):
    graphs = [generate_instance("weighted-style", 25, 0.5, seed=s) for s in range(8)]
    with ThreadPoolExecutor(4) as pool:
        reports = list(pool.map(lambda g: submit(server.address, compile_qubo(g), 2000), graphs))
    for g, rep in zip(graphs, reports):
        assert rep.server_objective == qubo_objective(compile_qubo(g), rep.assignment)


def test_sparsified_request_is_small(server):
    g = generate_instance("g05-style", 100, 0.5, seed=1)
    s = sparsify(g, effective_resistances(g), SparsifyConfig(q=500, seed=1))
    full = submit(server.address, compile_qubo(g), 1000)
    small = submit(server.address, compile_qubo(s), 1000)
    assert small.request_bytes <= 0.35 * full.request_bytes


def test_weighted_dense_byte_reduction_tracks_edges(server):
    g = generate_instance("weighted-style", 120, 0.3, 100, seed=4)
    q_draws = resolve_q("five_n", g)
    s = sparsify(g, effective_resistances(g), SparsifyConfig(q=q_draws, seed=0))
    full = submit(server.address, compile_qubo(g), 1000)
    small = submit(server.address, compile_qubo(s), 1000)
    byte_red = 1 - small.request_bytes / full.request_bytes
    edge_red = 1 - s.edge_count / g.edge_count
    assert abs(byte_red - edge_red) <= 0.1
    assert np.isfinite(small.server_objective)
