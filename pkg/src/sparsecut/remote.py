"""Mock cloud QUBO service and its client.

Wire protocol (ASCII, every line ``\\n``-terminated)::

    request:   QUBO <dimension> <nnz> <budget_iters>
               <u> <v> <value>          (nnz lines, 0-indexed)
               END
    response:  SOLUTION <objective>
               <dimension characters over {0,1}>
               END
    error:     ERR <message>

Values are written as fixed-width 17-significant-digit scientific
decimals by default, which round-trip exactly and keep every triplet
line about the same length, so request size tracks the triplet count.
``value_format="shortest"`` switches to the shortest round-trip repr.
The server parses either.
"""
from __future__ import annotations

import logging
import socket
import socketserver
import threading
from contextlib import contextmanager
from dataclasses import dataclass

import numpy as np

from .qubo import QuboInstance, qubo_objective
from .solvers import DEFAULT_BUDGET_ITERS, solve

log = logging.getLogger(__name__)

VALUE_FORMATS = ("fixed", "shortest")
MAX_LINE = 1 << 16


class RemoteError(Exception):
    pass


class RemoteConnectionError(RemoteError):
    pass


class RemoteTimeout(RemoteError):
    pass


class RemoteServerError(RemoteError):
    """The server answered ``ERR <message>``."""


class ProtocolError(RemoteError):
    pass


class ObjectiveMismatch(RemoteError):
    pass


@dataclass(frozen=True)
class TransferReport:
    request_bytes: int
    response_bytes: int
    triplet_count: int
    server_objective: float
    assignment: np.ndarray

    def bitstring(self) -> str:
        return "".join("1" if b else "0" for b in self.assignment)


def format_value(x: float, value_format: str = "fixed") -> str:
    if value_format == "fixed":
        return format(x, ".16e")
    if value_format == "shortest":
        return repr(float(x))
    raise ValueError(f"unknown value format {value_format!r}")


def encode_request(q: QuboInstance, budget_iters: int, value_format: str = "fixed") -> bytes:
    lines = [f"QUBO {q.dimension} {q.nnz} {int(budget_iters)}"]
    lines.extend(f"{a} {b} {format_value(x, value_format)}" for a, b, x in q.triplets)
    lines.append("END")
    return ("\n".join(lines) + "\n").encode("ascii")


def encode_response(objective: float, bits) -> bytes:
    s = "".join("1" if b else "0" for b in bits)
    return f"SOLUTION {float(objective)!r}\n{s}\nEND\n".encode("ascii")


def encode_error(message: str) -> bytes:
    return ("ERR " + " ".join(str(message).split()) + "\n").encode("ascii")


def _readline(rfile) -> str | None:
    raw = rfile.readline(MAX_LINE + 1)
    if not raw:
        return None
    if len(raw) > MAX_LINE or not raw.endswith(b"\n"):
        raise ProtocolError("line too long or not newline-terminated")
    try:
        return raw[:-1].decode("ascii")
    except UnicodeDecodeError:
        raise ProtocolError("non-ASCII request") from None


def read_request(rfile) -> tuple[QuboInstance, int]:
    """Parse one request from a binary line-oriented stream."""
    header = _readline(rfile)
    if header is None:
        raise ProtocolError("empty request")
    parts = header.split(" ")
    if len(parts) != 4 or parts[0] != "QUBO":
        raise ProtocolError(f"bad header {header!r}")
    try:
        dim, nnz, budget = int(parts[1]), int(parts[2]), int(parts[3])
    except ValueError:
        raise ProtocolError(f"bad header {header!r}") from None
    if dim < 1 or nnz < 0 or budget < 0:
        raise ProtocolError(f"bad header {header!r}")
    trip = []
    for i in range(nnz):
        line = _readline(rfile)
        if line is None or line == "END":
            raise ProtocolError(f"nnz mismatch: header says {nnz}, got {i} triplet lines")
        fields = line.split(" ")
        if len(fields) != 3:
            raise ProtocolError(f"bad triplet line {line!r}")
        try:
            trip.append((int(fields[0]), int(fields[1]), float(fields[2])))
        except ValueError:
            raise ProtocolError(f"bad triplet line {line!r}") from None
    tail = _readline(rfile)
    if tail != "END":
        raise ProtocolError(f"nnz mismatch: expected END after {nnz} triplet lines")
    try:
        q = QuboInstance.from_triplets(dim, trip)
    except ValueError as exc:
        raise ProtocolError(str(exc)) from None
    return q, budget


class _Handler(socketserver.StreamRequestHandler):
    def handle(self):
        server: QuboServer = self.server
        try:
            q, budget = read_request(self.rfile)
        except ProtocolError as exc:
            self.wfile.write(encode_error(exc))
            return
        if server.record:
            with server.lock:
                server.received.append(q)
        try:
            kwargs = {}
            if server.solver == "tabu":
                kwargs = {"budget_iters": budget or server.default_budget, "seed": server.seed}
            result = solve(q, server.solver, **kwargs)
        except ValueError as exc:
            self.wfile.write(encode_error(exc))
            return
        self.wfile.write(encode_response(result.objective, result.assignment))


class QuboServer(socketserver.ThreadingTCPServer):
    """One request per connection; each connection solves independently.

    With ``record=True`` every parsed instance is appended to
    ``received``, which lets tests check round-trip integrity.
    """

    daemon_threads = True
    allow_reuse_address = True

    def __init__(self, address, solver: str = "tabu", seed: int = 0,
                 default_budget: int = DEFAULT_BUDGET_ITERS, record: bool = False):
        if solver not in ("exact", "tabu"):
            raise ValueError(f"server solver must be 'exact' or 'tabu', got {solver!r}")
        self.solver = solver
        self.seed = seed
        self.default_budget = default_budget
        self.record = record
        self.received: list[QuboInstance] = []
        self.lock = threading.Lock()
        super().__init__(address, _Handler)

    @property
    def address(self) -> str:
        host, port = self.server_address[:2]
        return f"{host}:{port}"


def parse_address(addr) -> tuple[str, int]:
    if isinstance(addr, tuple):
        return addr[0], int(addr[1])
    host, _, port = str(addr).rpartition(":")
    if not host or not port:
        raise ValueError(f"address must look like HOST:PORT, got {addr!r}")
    return host, int(port)


def serve(address, solver: str = "tabu", seed: int = 0, **kwargs) -> None:
    """Serve until interrupted."""
    with QuboServer(parse_address(address), solver, seed, **kwargs) as server:
        log.info("serving %s solver on %s", solver, server.address)
        try:
            server.serve_forever()
        except KeyboardInterrupt:
            pass


@contextmanager
def running_server(address=("127.0.0.1", 0), **kwargs):
    """Run a :class:`QuboServer` on a background thread for the block's duration."""
    server = QuboServer(parse_address(address), **kwargs)
    thread = threading.Thread(target=server.serve_forever, daemon=True)
    thread.start()
    try:
        yield server
    finally:
        server.shutdown()
        server.server_close()
        thread.join()


def _parse_response(data: bytes, dimension: int) -> tuple[float, np.ndarray]:
    try:
        text = data.decode("ascii")
    except UnicodeDecodeError:
        raise ProtocolError("non-ASCII response") from None
    if text.startswith("ERR"):
        raise RemoteServerError(text[4:].rstrip("\n"))
    lines = text.split("\n")
    if len(lines) != 4 or lines[2] != "END" or lines[3] != "":
        raise ProtocolError(f"malformed response {text[:80]!r}")
    head = lines[0].split(" ")
    if len(head) != 2 or head[0] != "SOLUTION":
        raise ProtocolError(f"malformed response header {lines[0]!r}")
    try:
        objective = float(head[1])
    except ValueError:
        raise ProtocolError(f"malformed objective {head[1]!r}") from None
    bits = lines[1]
    if len(bits) != dimension or set(bits) - {"0", "1"}:
        raise ProtocolError(f"assignment must be {dimension} characters over {{0,1}}")
    return objective, np.frombuffer(bits.encode("ascii"), dtype=np.uint8) - ord("0")


def submit(address, q: QuboInstance, budget_iters: int = DEFAULT_BUDGET_ITERS,
           timeout: float = 60.0, value_format: str = "fixed") -> TransferReport:
    """Send ``q`` to a server, wait for the answer and cross-check it locally."""
    payload = encode_request(q, budget_iters, value_format)
    chunks = []
    try:
        with socket.create_connection(parse_address(address), timeout=timeout) as sock:
            sock.sendall(payload)
            sock.shutdown(socket.SHUT_WR)
            while True:
                chunk = sock.recv(65536)
                if not chunk:
                    break
                chunks.append(chunk)
    except socket.timeout as exc:
        raise RemoteTimeout(f"no complete answer from {address} within {timeout}s") from exc
    except OSError as exc:
        raise RemoteConnectionError(f"cannot talk to {address}: {exc}") from exc
    data = b"".join(chunks)
    objective, bits = _parse_response(data, q.dimension)
    local = qubo_objective(q, bits)
    if local != objective:
        raise ObjectiveMismatch(f"server reported {objective!r}, local recomputation {local!r}")
    return TransferReport(len(payload), len(data), q.nnz, objective, bits.astype(np.int8))
