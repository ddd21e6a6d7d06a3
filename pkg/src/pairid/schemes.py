"""Six pairing-based identification protocols behind one uniform interface.

Three protocols are two-message (the verifier opens with a random challenge,
the prover answers, the verifier decides) and three are canonical
three-message commit/challenge/respond protocols.  Each scheme is described
by a SchemeOps record holding its keygen, message shapes, and the four core
callables; ProverMachine and VerifierMachine drive any of them through the
same state machine, enforcing message order and charging group operations
to the right role.

Scheme summary, with g the suite generator and e the pairing:

  blsid   pk v = g^x.  Challenge: random n-bit string M.  Response
          sigma = H(M)^x.  Accept iff e(g, sigma) = e(v, H(M)).
  cdhid   pk v = g^x.  Challenge: random non-identity h in G1.  Response
          sigma = h^x.  Accept iff e(g, sigma) = e(v, h).
  sdhid   pk u = g^x, v = g^y, z = e(g, g).  Challenge: scalar m.
          Response (sigma, r) with sigma = g^(1/(x + m + y r)).  Accept iff
          e(sigma, u g^m v^r) = z.
  owfid   pk P, y, v = (e(P, Q) y^s)^-1 for secret (Q, s).  Commit
          x = e(P, R) y^r.  Response T = R Q^m, a = r + m s.  Accept iff
          e(P, T) y^a v^m = x.
  scl     pk base g', v = g'^x, z = e(g', g').  Commit tau = g'^w.
          Response sigma = g'^(1/(x r + w)).  Accept iff
          e(sigma, tau v^r) = z.
  hls     pk P, z = e(P, P), v = e(P, Q) for secret Q.  Commit w = z^r
          (only w is sent).  Response sigma = P^r Q^c.  Accept iff
          e(P, sigma) = w v^c.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from random import Random

from .algebra import (
    KIND_BITS,
    KIND_G1,
    KIND_G2,
    KIND_ZP,
    G1Element,
    G2Element,
    GroupSuite,
    Scalar,
)
from .signatures import (
    BbKeyPair,
    DegenerateSuite,
    ExpKeyPair,
    HashSpec,
    bb_keygen,
    bb_sign,
    bb_verify,
    bls_keygen,
    bls_sign,
    bls_verify,
    default_hash_spec,
)


class IdentityChallenge(Exception):
    """Group-element challenge was the identity."""


class BadChallengeLength(Exception):
    """Bit-string challenge does not have the configured length."""


class ZeroChallenge(Exception):
    """Scalar challenge was zero; challenges are drawn from Z_p^*."""


class ZeroExponent(Exception):
    """The response exponent denominator vanished for this (commitment, challenge)."""


class ProtocolViolation(Exception):
    """Message arrived out of order or with the wrong shape."""


class SchemeId(str, Enum):
    BLSID = "blsid"
    CDHID = "cdhid"
    SDHID = "sdhid"
    OWFID = "owfid"
    SCL = "scl"
    HLS = "hls"


@dataclass(frozen=True)
class SchemeParams:
    """Per-session knobs: challenge bit length and the hash for blsid."""

    n: int
    hash_spec: HashSpec


def default_scheme_params(suite: GroupSuite) -> SchemeParams:
    # n-bit challenges cover Z_p when n is the bit length of p - 1.
    return SchemeParams(n=(suite.p - 1).bit_length(), hash_spec=default_hash_spec(suite))


# -- key material --------------------------------------------------------------


@dataclass
class OwfidKeyPair:
    suite: GroupSuite
    P: G1Element
    y: G2Element
    Q: G1Element | None
    s: Scalar | None
    v: G2Element

    def public(self) -> "OwfidKeyPair":
        return OwfidKeyPair(self.suite, self.P, self.y, None, None, self.v)


@dataclass
class SclKeyPair:
    suite: GroupSuite
    g: G1Element
    x: Scalar | None
    v: G1Element
    z: G2Element

    def public(self) -> "SclKeyPair":
        return SclKeyPair(self.suite, self.g, None, self.v, self.z)


@dataclass
class HlsKeyPair:
    suite: GroupSuite
    P: G1Element
    Q: G1Element | None
    z: G2Element
    v: G2Element

    def public(self) -> "HlsKeyPair":
        return HlsKeyPair(self.suite, self.P, None, self.z, self.v)


def _nonidentity_g1(suite: GroupSuite, rng: Random) -> G1Element:
    for _ in range(100):
        e = suite.random_g1(rng)
        if not e.is_identity:
            return e
    raise DegenerateSuite("could not sample a non-identity G1 element")


def _nonidentity_g2(suite: GroupSuite, rng: Random) -> G2Element:
    for _ in range(100):
        e = suite.random_g2(rng)
        if not e.is_identity:
            return e
    raise DegenerateSuite("could not sample a non-identity G2 element")


def owfid_keygen(suite: GroupSuite, rng: Random) -> OwfidKeyPair:
    P = _nonidentity_g1(suite, rng)
    y = _nonidentity_g2(suite, rng)
    Q = suite.random_g1(rng)
    s = suite.random_scalar(rng)
    v = (suite.pairing(P, Q) * y**s).inverse()
    return OwfidKeyPair(suite, P, y, Q, s, v)


def scl_keygen(suite: GroupSuite, rng: Random) -> SclKeyPair:
    g = _nonidentity_g1(suite, rng)
    x = suite.random_scalar(rng)
    return SclKeyPair(suite, g, x, g**x, suite.pairing(g, g))


def hls_keygen(suite: GroupSuite, rng: Random) -> HlsKeyPair:
    P = _nonidentity_g1(suite, rng)
    Q = suite.random_g1(rng)
    return HlsKeyPair(suite, P, Q, suite.pairing(P, P), suite.pairing(P, Q))


def keygen(scheme: SchemeId, suite: GroupSuite, rng: Random):
    scheme = SchemeId(scheme)
    if scheme in (SchemeId.BLSID, SchemeId.CDHID):
        return bls_keygen(suite, rng)
    if scheme == SchemeId.SDHID:
        return bb_keygen(suite, rng)
    if scheme == SchemeId.OWFID:
        return owfid_keygen(suite, rng)
    if scheme == SchemeId.SCL:
        return scl_keygen(suite, rng)
    return hls_keygen(suite, rng)


# -- per-scheme operations -----------------------------------------------------


def _check_bits(message: bytes, n: int):
    if len(message) != (n + 7) // 8:
        raise BadChallengeLength(f"expected {(n + 7) // 8} bytes for {n} bits")
    if int.from_bytes(message, "big") >> n:
        raise BadChallengeLength(f"value does not fit in {n} bits")


def _check_nonzero(m: Scalar):
    if m.value == 0:
        raise ZeroChallenge("scalar challenges are drawn from Z_p^*")


def blsid_respond(kp: ExpKeyPair, message: bytes, params: SchemeParams) -> G1Element:
    _check_bits(message, params.n)
    return bls_sign(kp, message, params.hash_spec)


def blsid_verify(pk: ExpKeyPair, message: bytes, sig: G1Element, params: SchemeParams) -> bool:
    _check_bits(message, params.n)
    return bls_verify(pk, message, sig, params.hash_spec)


def blsid_verify_point(pk: ExpKeyPair, h: G1Element, sig: G1Element) -> bool:
    # Same equation with the hashed challenge supplied directly.
    suite = pk.suite
    return suite.pairing(suite.g1, sig) == suite.pairing(pk.v, h)


def cdhid_respond(kp: ExpKeyPair, h: G1Element) -> G1Element:
    if h.is_identity:
        raise IdentityChallenge("challenge must be a non-identity element")
    return h ** kp.x


def cdhid_verify(pk: ExpKeyPair, h: G1Element, sig: G1Element) -> bool:
    if h.is_identity:
        raise IdentityChallenge("challenge must be a non-identity element")
    suite = pk.suite
    return suite.pairing(suite.g1, sig) == suite.pairing(pk.v, h)


def sdhid_respond(kp: BbKeyPair, m: Scalar, rng: Random, counter=None) -> tuple[G1Element, Scalar]:
    _check_nonzero(m)
    return bb_sign(kp, m, rng, counter)


def sdhid_verify(pk: BbKeyPair, m: Scalar, sig: G1Element, r: Scalar) -> bool:
    _check_nonzero(m)
    return bb_verify(pk, m, sig, r)


def owfid_commit(kp: OwfidKeyPair, rng: Random):
    suite = kp.suite
    R = suite.random_g1(rng)
    r = suite.random_scalar(rng)
    x = suite.pairing(kp.P, R) * kp.y**r
    return (R, r), x


def owfid_respond(kp: OwfidKeyPair, state, m: Scalar) -> tuple[G1Element, Scalar]:
    _check_nonzero(m)
    R, r = state
    return R * kp.Q**m, r + m * kp.s


def owfid_verify(pk: OwfidKeyPair, x: G2Element, m: Scalar, T: G1Element, a: Scalar) -> bool:
    _check_nonzero(m)
    suite = pk.suite
    return suite.pairing(pk.P, T) * pk.y**a * pk.v**m == x


def scl_commit(kp: SclKeyPair, rng: Random):
    w = kp.suite.random_scalar(rng)
    return w, kp.g**w


def scl_respond(kp: SclKeyPair, w: Scalar, r: Scalar) -> G1Element:
    _check_nonzero(r)
    denom = kp.x * r + w
    if denom.value == 0:
        # No response exists for this (commitment, challenge) pair; the
        # session layer restarts with a fresh commitment.
        raise ZeroExponent("x*r + w = 0")
    return kp.g ** denom.inv()


def scl_verify(pk: SclKeyPair, tau: G1Element, r: Scalar, sigma: G1Element) -> bool:
    _check_nonzero(r)
    suite = pk.suite
    return suite.pairing(sigma, tau * pk.v**r) == pk.z


def hls_commit(kp: HlsKeyPair, rng: Random):
    r = kp.suite.random_scalar(rng)
    return r, kp.z**r


def hls_respond(kp: HlsKeyPair, r: Scalar, c: Scalar) -> G1Element:
    _check_nonzero(c)
    return kp.P**r * kp.Q**c


def hls_verify(pk: HlsKeyPair, w: G2Element, c: Scalar, sigma: G1Element) -> bool:
    _check_nonzero(c)
    suite = pk.suite
    return suite.pairing(pk.P, sigma) == w * pk.v**c


# -- uniform interface ---------------------------------------------------------


@dataclass(frozen=True)
class SchemeOps:
    """Everything a session driver needs to run one scheme."""

    scheme: SchemeId
    three_message: bool
    commitment_fields: tuple
    challenge_fields: tuple
    response_fields: tuple
    keygen: callable
    commit: callable  # (kp, params, rng) -> (state, commitment tuple); None for 2-message
    sample_challenge: callable  # (suite, params, rng) -> challenge tuple
    respond: callable  # (kp, state, challenge tuple, params, rng, counter) -> response tuple
    verify: callable  # (pk, commitment tuple, challenge tuple, response tuple, params) -> bool


def _wrap_commit(fn):
    # Flat commit helpers return (secret state, single message value).
    def commit(kp, params, rng):
        state, value = fn(kp, rng)
        return state, (value,)

    return commit


def _bits_challenge(suite, params, rng):
    width = (params.n + 7) // 8
    return (rng.getrandbits(params.n).to_bytes(width, "big"),)


def _g1_challenge(suite, params, rng):
    return (suite.random_g1(rng, nonidentity=True),)


def _scalar_challenge(suite, params, rng):
    return (suite.random_scalar(rng, nonzero=True),)


SCHEMES: dict[SchemeId, SchemeOps] = {
    SchemeId.BLSID: SchemeOps(
        scheme=SchemeId.BLSID,
        three_message=False,
        commitment_fields=(),
        challenge_fields=(KIND_BITS,),
        response_fields=(KIND_G1,),
        keygen=bls_keygen,
        commit=None,
        sample_challenge=_bits_challenge,
        respond=lambda kp, st, ch, params, rng, counter: (blsid_respond(kp, ch[0], params),),
        verify=lambda pk, co, ch, re, params: blsid_verify(pk, ch[0], re[0], params),
    ),
    SchemeId.CDHID: SchemeOps(
        scheme=SchemeId.CDHID,
        three_message=False,
        commitment_fields=(),
        challenge_fields=(KIND_G1,),
        response_fields=(KIND_G1,),
        keygen=bls_keygen,
        commit=None,
        sample_challenge=_g1_challenge,
        respond=lambda kp, st, ch, params, rng, counter: (cdhid_respond(kp, ch[0]),),
        verify=lambda pk, co, ch, re, params: cdhid_verify(pk, ch[0], re[0]),
    ),
    SchemeId.SDHID: SchemeOps(
        scheme=SchemeId.SDHID,
        three_message=False,
        commitment_fields=(),
        challenge_fields=(KIND_ZP,),
        response_fields=(KIND_G1, KIND_ZP),
        keygen=bb_keygen,
        commit=None,
        sample_challenge=_scalar_challenge,
        respond=lambda kp, st, ch, params, rng, counter: sdhid_respond(kp, ch[0], rng, counter),
        verify=lambda pk, co, ch, re, params: sdhid_verify(pk, ch[0], re[0], re[1]),
    ),
    SchemeId.OWFID: SchemeOps(
        scheme=SchemeId.OWFID,
        three_message=True,
        commitment_fields=(KIND_G2,),
        challenge_fields=(KIND_ZP,),
        response_fields=(KIND_G1, KIND_ZP),
        keygen=owfid_keygen,
        commit=_wrap_commit(owfid_commit),
        sample_challenge=_scalar_challenge,
        respond=lambda kp, st, ch, params, rng, counter: owfid_respond(kp, st, ch[0]),
        verify=lambda pk, co, ch, re, params: owfid_verify(pk, co[0], ch[0], re[0], re[1]),
    ),
    SchemeId.SCL: SchemeOps(
        scheme=SchemeId.SCL,
        three_message=True,
        commitment_fields=(KIND_G1,),
        challenge_fields=(KIND_ZP,),
        response_fields=(KIND_G1,),
        keygen=scl_keygen,
        commit=_wrap_commit(scl_commit),
        sample_challenge=_scalar_challenge,
        respond=lambda kp, st, ch, params, rng, counter: (scl_respond(kp, st, ch[0]),),
        verify=lambda pk, co, ch, re, params: scl_verify(pk, co[0], ch[0], re[0]),
    ),
    SchemeId.HLS: SchemeOps(
        scheme=SchemeId.HLS,
        three_message=True,
        commitment_fields=(KIND_G2,),
        challenge_fields=(KIND_ZP,),
        response_fields=(KIND_G1,),
        keygen=hls_keygen,
        commit=_wrap_commit(hls_commit),
        sample_challenge=_scalar_challenge,
        respond=lambda kp, st, ch, params, rng, counter: (hls_respond(kp, st, ch[0]),),
        verify=lambda pk, co, ch, re, params: hls_verify(pk, co[0], ch[0], re[0]),
    ),
}


# -- session machinery ---------------------------------------------------------


@dataclass
class Transcript:
    """One full exchange: message tuples plus the verifier's decision."""

    scheme: SchemeId
    commitment: tuple
    challenge: tuple
    response: tuple
    decision: bool
    rng_seed: object = None
    restarts: int = 0


class ProverMachine:
    """Prover side of one exchange, with strict message ordering."""

    def __init__(self, scheme: SchemeId, kp, params: SchemeParams | None = None, rng: Random | None = None):
        self.ops = SCHEMES[SchemeId(scheme)]
        self.kp = kp
        self.suite: GroupSuite = kp.suite
        self.params = params if params is not None else default_scheme_params(self.suite)
        self.rng = rng if rng is not None else Random()
        self.state = "init"
        self.commitment: tuple = ()
        self._secret_state = None

    def _expect(self, state: str):
        if self.state != state:
            raise ProtocolViolation(f"prover is in state {self.state!r}, not {state!r}")

    def start(self) -> tuple | None:
        """Produce the commitment (three-message schemes) or arm the prover."""
        self._expect("init")
        if self.ops.three_message:
            with self.suite.role("prover"):
                self._secret_state, self.commitment = self.ops.commit(self.kp, self.params, self.rng)
            self.state = "committed"
            return self.commitment
        self.state = "committed"
        return None

    def on_challenge(self, challenge: tuple) -> tuple:
        self._expect("committed")
        if len(challenge) != len(self.ops.challenge_fields):
            raise ProtocolViolation("challenge has the wrong number of fields")
        counter = self.suite.counter
        with self.suite.role("prover"):
            response = self.ops.respond(self.kp, self._secret_state, challenge, self.params, self.rng, counter)
        self.state = "done"
        return response


class VerifierMachine:
    """Verifier side of one exchange; can be forced onto a fixed challenge."""

    def __init__(
        self,
        scheme: SchemeId,
        pk,
        params: SchemeParams | None = None,
        rng: Random | None = None,
        forced_challenge: tuple | None = None,
    ):
        self.ops = SCHEMES[SchemeId(scheme)]
        self.pk = pk
        self.suite: GroupSuite = pk.suite
        self.params = params if params is not None else default_scheme_params(self.suite)
        self.rng = rng if rng is not None else Random()
        self.forced_challenge = forced_challenge
        self.state = "init"
        self.commitment: tuple = ()
        self.challenge: tuple = ()

    def _expect(self, state: str):
        if self.state != state:
            raise ProtocolViolation(f"verifier is in state {self.state!r}, not {state!r}")

    def _pick_challenge(self) -> tuple:
        if self.forced_challenge is not None:
            ch = self.forced_challenge
        else:
            ch = self.ops.sample_challenge(self.suite, self.params, self.rng)
        if len(ch) != len(self.ops.challenge_fields):
            raise ProtocolViolation("challenge has the wrong number of fields")
        self.challenge = ch
        self.state = "challenged"
        return ch

    def start(self) -> tuple:
        """Open a two-message exchange by issuing the challenge."""
        self._expect("init")
        if self.ops.three_message:
            raise ProtocolViolation("three-message schemes wait for a commitment")
        return self._pick_challenge()

    def on_commitment(self, commitment: tuple) -> tuple:
        self._expect("init")
        if not self.ops.three_message:
            raise ProtocolViolation("two-message schemes have no commitment")
        if len(commitment) != len(self.ops.commitment_fields):
            raise ProtocolViolation("commitment has the wrong number of fields")
        self.commitment = commitment
        return self._pick_challenge()

    def on_response(self, response: tuple) -> bool:
        self._expect("challenged")
        if len(response) != len(self.ops.response_fields):
            raise ProtocolViolation("response has the wrong number of fields")
        with self.suite.role("verifier"):
            decision = self.ops.verify(self.pk, self.commitment, self.challenge, response, self.params)
        self.state = "done"
        return bool(decision)


def _count_message(suite: GroupSuite, fields: tuple, n: int):
    if suite.counter is None:
        return
    for kind in fields:
        suite.counter.add_sent(kind, suite.width(kind, n))


def run_session(
    scheme: SchemeId,
    kp,
    suite: GroupSuite,
    seed=0,
    params: SchemeParams | None = None,
) -> Transcript:
    """Run one honest in-process exchange and return its transcript.

    If the prover hits an unanswerable (commitment, challenge) pair, the
    whole exchange restarts with fresh randomness; operation counts are
    reset so the recorded costs describe the completed run only.
    """
    scheme = SchemeId(scheme)
    ops = SCHEMES[scheme]
    params = params if params is not None else default_scheme_params(suite)
    rng_p = Random(f"{seed}:prover")
    rng_v = Random(f"{seed}:verifier")
    restarts = 0
    while True:
        prover = ProverMachine(scheme, kp, params, rng_p)
        verifier = VerifierMachine(scheme, kp.public(), params, rng_v)
        try:
            if ops.three_message:
                commitment = prover.start()
                _count_message(suite, ops.commitment_fields, params.n)
                challenge = verifier.on_commitment(commitment)
            else:
                prover.start()
                commitment = ()
                challenge = verifier.start()
            _count_message(suite, ops.challenge_fields, params.n)
            response = prover.on_challenge(challenge)
            _count_message(suite, ops.response_fields, params.n)
        except ZeroExponent:
            restarts += 1
            if restarts > 100:
                raise DegenerateSuite("session restart limit hit")
            if suite.counter is not None:
                suite.counter.reset(keep_redraws=True)
                suite.counter.redraws += 1
            continue
        decision = verifier.on_response(response)
        return Transcript(
            scheme=scheme,
            commitment=commitment,
            challenge=challenge,
            response=response,
            decision=decision,
            rng_seed=seed,
            restarts=restarts,
        )


def replay_decision(t: Transcript, pk, params: SchemeParams | None = None) -> bool:
    """Re-run the verification equation over a stored transcript."""
    ops = SCHEMES[SchemeId(t.scheme)]
    params = params if params is not None else default_scheme_params(pk.suite)
    return bool(ops.verify(pk, t.commitment, t.challenge, t.response, params))
