"""Identification sessions over a byte transport.

Both peers start with a hello exchange pinning (scheme, backend, p, n, q);
any disagreement aborts before group elements flow.  The verifier is the
client: it sends hello, the prover echoes it, then the protocol messages run
inside commitment/challenge/response frames and the verifier closes with a
one-byte decision frame.

A prover that cannot answer the challenge it was dealt (the inversion-based
three-message scheme has one unanswerable challenge per commitment) sends an
error frame with payload b"restart" and both sides silently rerun the whole
exchange with fresh randomness.
"""

from __future__ import annotations

import socket
import struct
import threading
from dataclasses import dataclass
from random import Random

from .algebra import GroupSuite
from .schemes import (
    SCHEMES,
    ProtocolViolation,
    ProverMachine,
    SchemeId,
    SchemeParams,
    Transcript,
    VerifierMachine,
    ZeroExponent,
    default_scheme_params,
)
from .signatures import DegenerateSuite
from .wire import (
    TAG_CHALLENGE,
    TAG_COMMITMENT,
    TAG_DECISION,
    TAG_ERROR,
    TAG_HELLO,
    TAG_NAMES,
    TAG_RESPONSE,
    LengthMismatch,
    decode_payload,
    encode_payload,
    frame_decode,
    frame_encode,
)

RESTART = b"restart"
MAX_RESTARTS = 100


class TransportClosed(Exception):
    """Peer went away mid-frame."""


class SocketTransport:
    def __init__(self, sock: socket.socket):
        self.sock = sock

    def write(self, data: bytes):
        self.sock.sendall(data)

    def read_exact(self, nbytes: int) -> bytes:
        buf = b""
        while len(buf) < nbytes:
            chunk = self.sock.recv(nbytes - len(buf))
            if not chunk:
                raise TransportClosed("connection closed mid-frame")
            buf += chunk
        return buf

    def close(self):
        self.sock.close()


class StdioTransport:
    """Frames over a pair of binary file objects."""

    def __init__(self, infile, outfile):
        self.infile = infile
        self.outfile = outfile

    def write(self, data: bytes):
        self.outfile.write(data)
        self.outfile.flush()

    def read_exact(self, nbytes: int) -> bytes:
        buf = b""
        while len(buf) < nbytes:
            chunk = self.infile.read(nbytes - len(buf))
            if not chunk:
                raise TransportClosed("input ended mid-frame")
            buf += chunk
        return buf

    def close(self):
        pass


def send_frame(transport, tag: int, payload: bytes):
    transport.write(frame_encode(tag, payload))


def recv_frame(transport) -> tuple[int, bytes]:
    header = transport.read_exact(4)
    length = int.from_bytes(header, "big")
    if length < 1:
        raise LengthMismatch("length field must cover at least the tag byte")
    return frame_decode(header + transport.read_exact(length))


_HELLO = struct.Struct(">BBQHQ")
_SCHEME_CODE = {scheme: i for i, scheme in enumerate(SchemeId, start=1)}
_BACKEND_CODE = {"transparent": 0, "tate": 1}


def hello_payload(scheme: SchemeId, suite: GroupSuite, params: SchemeParams) -> bytes:
    q = getattr(suite.backend, "q", 0) if suite.backend.name == "tate" else 0
    return _HELLO.pack(
        _SCHEME_CODE[SchemeId(scheme)],
        _BACKEND_CODE[suite.backend.name],
        suite.p,
        params.n,
        q,
    )


@dataclass
class SessionResult:
    decision: bool
    transcript: Transcript
    restarts: int = 0


def _count(suite: GroupSuite, fields: tuple, n: int):
    if suite.counter is None:
        return
    for kind in fields:
        suite.counter.add_sent(kind, suite.width(kind, n))


def _expect(transport, tag: int, got_tag: int, payload: bytes):
    if got_tag == TAG_ERROR:
        raise ProtocolViolation(f"peer error: {payload.decode('ascii', 'replace')}")
    if got_tag != tag:
        raise ProtocolViolation(f"expected a {TAG_NAMES[tag]} frame, got {TAG_NAMES[got_tag]}")


def serve_prover(
    scheme: SchemeId,
    kp,
    transport,
    seed=0,
    params: SchemeParams | None = None,
) -> SessionResult:
    scheme = SchemeId(scheme)
    ops = SCHEMES[scheme]
    suite: GroupSuite = kp.suite
    params = params if params is not None else default_scheme_params(suite)
    expected = hello_payload(scheme, suite, params)

    tag, payload = recv_frame(transport)
    if tag != TAG_HELLO or payload != expected:
        send_frame(transport, TAG_ERROR, b"hello mismatch")
        raise ProtocolViolation("peer hello does not match this key's parameters")
    send_frame(transport, TAG_HELLO, expected)

    rng = Random(f"{seed}:prover")
    restarts = 0
    while True:
        machine = ProverMachine(scheme, kp, params, rng)
        commitment = ()
        try:
            if ops.three_message:
                commitment = machine.start()
                send_frame(transport, TAG_COMMITMENT, encode_payload(ops.commitment_fields, commitment, suite, params.n))
                _count(suite, ops.commitment_fields, params.n)
            else:
                machine.start()
            tag, payload = recv_frame(transport)
            _expect(transport, TAG_CHALLENGE, tag, payload)
            challenge = decode_payload(ops.challenge_fields, payload, suite, params.n)
            _count(suite, ops.challenge_fields, params.n)
            response = machine.on_challenge(challenge)
        except ZeroExponent:
            restarts += 1
            if restarts > MAX_RESTARTS:
                raise DegenerateSuite("restart limit hit")
            if suite.counter is not None:
                suite.counter.reset(keep_redraws=True)
                suite.counter.redraws += 1
            send_frame(transport, TAG_ERROR, RESTART)
            continue
        send_frame(transport, TAG_RESPONSE, encode_payload(ops.response_fields, response, suite, params.n))
        _count(suite, ops.response_fields, params.n)
        tag, payload = recv_frame(transport)
        _expect(transport, TAG_DECISION, tag, payload)
        if payload not in (b"\x00", b"\x01"):
            raise ProtocolViolation("decision payload must be one byte, 0 or 1")
        decision = payload == b"\x01"
        return SessionResult(
            decision=decision,
            transcript=Transcript(
                scheme=scheme,
                commitment=commitment,
                challenge=challenge,
                response=response,
                decision=decision,
                rng_seed=seed,
                restarts=restarts,
            ),
            restarts=restarts,
        )


def run_verifier(
    scheme: SchemeId,
    pk,
    transport,
    seed=0,
    params: SchemeParams | None = None,
) -> SessionResult:
    scheme = SchemeId(scheme)
    ops = SCHEMES[scheme]
    suite: GroupSuite = pk.suite
    params = params if params is not None else default_scheme_params(suite)
    expected = hello_payload(scheme, suite, params)

    send_frame(transport, TAG_HELLO, expected)
    tag, payload = recv_frame(transport)
    if tag == TAG_ERROR:
        raise ProtocolViolation(f"peer error: {payload.decode('ascii', 'replace')}")
    if tag != TAG_HELLO or payload != expected:
        raise ProtocolViolation("peer hello does not match these parameters")

    rng = Random(f"{seed}:verifier")
    restarts = 0
    while True:
        machine = VerifierMachine(scheme, pk, params, rng)
        commitment = ()
        if ops.three_message:
            tag, payload = recv_frame(transport)
            if tag == TAG_ERROR and payload == RESTART:
                restarts += 1
                if restarts > MAX_RESTARTS:
                    raise ProtocolViolation("peer restarted too many times")
                continue
            _expect(transport, TAG_COMMITMENT, tag, payload)
            commitment = decode_payload(ops.commitment_fields, payload, suite, params.n)
            _count(suite, ops.commitment_fields, params.n)
            challenge = machine.on_commitment(commitment)
        else:
            challenge = machine.start()
        send_frame(transport, TAG_CHALLENGE, encode_payload(ops.challenge_fields, challenge, suite, params.n))
        _count(suite, ops.challenge_fields, params.n)
        tag, payload = recv_frame(transport)
        if tag == TAG_ERROR and payload == RESTART:
            # Counter cleanup is the prover's job: in a loopback both ends
            # share one counter and the prover may already be inside the
            # fresh round when this frame arrives.
            restarts += 1
            if restarts > MAX_RESTARTS:
                raise ProtocolViolation("peer restarted too many times")
            continue
        _expect(transport, TAG_RESPONSE, tag, payload)
        response = decode_payload(ops.response_fields, payload, suite, params.n)
        _count(suite, ops.response_fields, params.n)
        decision = machine.on_response(response)
        send_frame(transport, TAG_DECISION, b"\x01" if decision else b"\x00")
        return SessionResult(
            decision=decision,
            transcript=Transcript(
                scheme=scheme,
                commitment=commitment,
                challenge=challenge,
                response=response,
                decision=decision,
                rng_seed=seed,
                restarts=restarts,
            ),
            restarts=restarts,
        )


def loopback_session(
    scheme: SchemeId,
    kp,
    seed=0,
    params: SchemeParams | None = None,
) -> tuple[SessionResult, SessionResult]:
    """Run prover and verifier over a socketpair; returns both results.

    Both endpoints share the keypair's suite, so with a counted suite every
    protocol message is charged twice (once per endpoint).
    """
    left, right = socket.socketpair()
    outcome: dict = {}

    def prover_side():
        try:
            outcome["prover"] = serve_prover(scheme, kp, SocketTransport(left), seed, params)
        except Exception as exc:  # surfaced after join
            outcome["error"] = exc

    worker = threading.Thread(target=prover_side)
    worker.start()
    try:
        verifier = run_verifier(scheme, kp.public(), SocketTransport(right), seed, params)
    finally:
        worker.join()
        left.close()
        right.close()
    if "error" in outcome:
        raise outcome["error"]
    return outcome["prover"], verifier
