"""Supersingular-curve backend with a reduced Tate pairing.

The curve is y^2 = x^3 + x over F_q with q prime, q = 3 (mod 4).  It is
supersingular, so it has exactly N = q + 1 points and embedding degree 2.
The distortion map phi(x, y) = (-x, i*y) sends the order-p subgroup into an
independent subgroup over F_{q^2} = F_q(i) with i^2 = -1, which turns the
Tate pairing into a symmetric pairing on G1 x G1.

The pairing itself is a plain double-and-add Miller loop over the order p of
the working subgroup, followed by the final exponentiation to (q^2 - 1)/p.
Because the second argument goes through the distortion map, its x-coordinate
is in -x + F_q*i form: vertical-line factors evaluate inside F_q and are
killed by the final exponentiation (u^(q-1) = 1 for u in F_q*), so the Miller
loop only tracks the sloped line through each addition step.  With that
shape the line value has imaginary part -y_Q, which is nonzero for any
distorted point off the x-axis, so for honest subgroup inputs the loop can
never hit a zero.  A zero can still arise for adversarial off-subgroup
inputs; the loop raises DegeneratePairing and the public entry point retries
on deterministic offsets of the second argument.

Everything here is desk-scale: q stays below 10^4 so subgroups can be
validated by exhaustive point counting and discrete logs by brute force.
"""

from __future__ import annotations

from dataclasses import dataclass
from random import Random

from sympy import factorint, isprime

from .algebra import KIND_G1, GroupSuite, MalformedEncoding


class NotOnCurve(Exception):
    """Point fails the curve equation or the subgroup check."""


class DegeneratePairing(Exception):
    """Miller loop hit a zero line value for these inputs."""


class ValidationFailed(Exception):
    """Curve or subgroup parameters failed a sanity check."""


class Fq2:
    """F_q(i) with i^2 = -1, valid whenever q = 3 (mod 4)."""

    __slots__ = ("a", "b", "q")

    def __init__(self, a: int, b: int, q: int):
        self.a = a % q
        self.b = b % q
        self.q = q

    def __add__(self, other: "Fq2") -> "Fq2":
        return Fq2(self.a + other.a, self.b + other.b, self.q)

    def __sub__(self, other: "Fq2") -> "Fq2":
        return Fq2(self.a - other.a, self.b - other.b, self.q)

    def __mul__(self, other: "Fq2") -> "Fq2":
        q = self.q
        return Fq2(
            self.a * other.a - self.b * other.b,
            self.a * other.b + self.b * other.a,
            q,
        )

    def inv(self) -> "Fq2":
        # (a + bi)^-1 = (a - bi) / (a^2 + b^2)
        n = (self.a * self.a + self.b * self.b) % self.q
        if n == 0:
            raise ZeroDivisionError("inverse of zero in F_q^2")
        ninv = pow(n, -1, self.q)
        return Fq2(self.a * ninv, -self.b * ninv, self.q)

    def __pow__(self, e: int) -> "Fq2":
        if e < 0:
            return self.inv() ** (-e)
        out = Fq2(1, 0, self.q)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    @property
    def is_zero(self) -> bool:
        return self.a == 0 and self.b == 0

    def __eq__(self, other):
        if not isinstance(other, Fq2):
            return NotImplemented
        return self.q == other.q and self.a == other.a and self.b == other.b

    def __hash__(self):
        return hash((self.a, self.b, self.q))

    def __repr__(self):
        return f"Fq2({self.a} + {self.b}i mod {self.q})"


# Affine points are (x, y) tuples over F_q; None is the point at infinity.
Point = tuple[int, int] | None


def on_curve(pt: Point, q: int) -> bool:
    if pt is None:
        return True
    x, y = pt
    return (y * y - (x * x * x + x)) % q == 0


def _add(a: Point, b: Point, q: int) -> Point:
    # Raw chord-and-tangent group law; callers validate inputs.
    if a is None:
        return b
    if b is None:
        return a
    x1, y1 = a
    x2, y2 = b
    if x1 == x2 and (y1 + y2) % q == 0:
        return None
    if a == b:
        lam = (3 * x1 * x1 + 1) * pow(2 * y1, -1, q) % q
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, q) % q
    x3 = (lam * lam - x1 - x2) % q
    y3 = (lam * (x1 - x3) - y1) % q
    return (x3, y3)


def point_add(a: Point, b: Point, q: int) -> Point:
    if not on_curve(a, q) or not on_curve(b, q):
        raise NotOnCurve("point_add input is off the curve")
    return _add(a, b, q)


def point_mul(k: int, pt: Point, q: int) -> Point:
    if not on_curve(pt, q):
        raise NotOnCurve("point_mul input is off the curve")
    if pt is None:
        return None
    k = int(k)
    if k < 0:
        x, y = pt
        return point_mul(-k, (x, (-y) % q), q)
    out: Point = None
    base = pt
    while k:
        if k & 1:
            out = _add(out, base, q)
        base = _add(base, base, q)
        k >>= 1
    return out


def point_neg(pt: Point, q: int) -> Point:
    if pt is None:
        return None
    x, y = pt
    return (x, (-y) % q)


@dataclass(frozen=True)
class CurveParams:
    q: int
    p: int
    h: int
    gen: tuple[int, int]


@dataclass(frozen=True)
class CurveValidation:
    params: CurveParams
    n_points: int
    factors: dict


def enumerate_and_validate(q: int, p: int | None = None, rng: Random | None = None) -> CurveValidation:
    """Count points exhaustively, pick/verify the subgroup order, find a generator.

    The point count per x is 1 + chi(x^3 + x) with chi the Euler criterion
    (quadratic character), plus the point at infinity.  For a supersingular
    curve the total must land exactly on q + 1; anything else is a hard fail.
    """
    q = int(q)
    if q > 10_000:
        raise ValidationFailed("exhaustive validation is capped at q <= 10^4")
    if not isprime(q):
        raise ValidationFailed(f"{q} is not prime")
    if q % 4 != 3:
        raise ValidationFailed(f"{q} != 3 (mod 4), so i^2 = -1 has a root in F_q")

    count = 1  # infinity
    for x in range(q):
        rhs = (x * x * x + x) % q
        if rhs == 0:
            count += 1
        elif pow(rhs, (q - 1) // 2, q) == 1:
            count += 2
    n = q + 1
    if count != n:
        raise ValidationFailed(f"point count {count} != q + 1 = {n}")

    factors = {int(f): int(m) for f, m in factorint(n).items()}
    if p is None:
        p = max(factors)
    p = int(p)
    if not isprime(p) or p < 5:
        raise ValidationFailed(f"subgroup order {p} must be a prime >= 5")
    if n % p != 0:
        raise ValidationFailed(f"{p} does not divide the group order {n}")
    if n % (p * p) == 0:
        raise ValidationFailed(f"{p}^2 divides the group order; subgroup is not unique")
    h = n // p

    rng = rng if rng is not None else Random(q)
    gen = None
    for _ in range(1000):
        x = rng.randrange(q)
        rhs = (x * x * x + x) % q
        if rhs != 0 and pow(rhs, (q - 1) // 2, q) != 1:
            continue
        y = pow(rhs, (q + 1) // 4, q)
        if (y * y - rhs) % q != 0:
            continue
        cand = point_mul(h, (x, y), q)
        if cand is not None:
            gen = cand
            break
    if gen is None:
        raise ValidationFailed("no order-p generator found (cofactor sweep exhausted)")
    if point_mul(p, gen, q) is not None:
        raise ValidationFailed("candidate generator does not have order p")
    return CurveValidation(CurveParams(q=q, p=p, h=h, gen=gen), n_points=n, factors=factors)


def _line(a: Point, b: Point, xq_im: int, yq_im: int, q: int) -> Fq2:
    """Sloped line through a and b, evaluated at the distorted point.

    The evaluation point is phi(Q) = (-x_Q, i*y_Q), passed here as the F_q
    parts (xq_im = -x_Q mod q, yq_im = y_Q mod q) of its coordinates.
    Vertical lines are skipped (returned as 1): their value lies in F_q and
    the final exponentiation erases it.
    """
    if a is None or b is None:
        return Fq2(1, 0, q)
    x1, y1 = a
    x2, y2 = b
    if x1 == x2 and (y1 + y2) % q == 0:
        return Fq2(1, 0, q)
    if a == b:
        lam = (3 * x1 * x1 + 1) * pow(2 * y1, -1, q) % q
    else:
        lam = (y2 - y1) * pow(x2 - x1, -1, q) % q
    # l(X, Y) = Y - y1 - lam*(X - x1) at X = xq_im (real), Y = yq_im * i.
    real = (-(y1 + lam * (xq_im - x1))) % q
    val = Fq2(real, yq_im, q)
    if val.is_zero:
        raise DegeneratePairing("line through Miller-loop accumulator vanished")
    return val


def _miller(pt: Point, other: Point, n: int, q: int) -> Fq2:
    """Accumulate the Miller function f_{n,pt} evaluated at phi(other)."""
    xq_im = (-other[0]) % q
    yq_im = other[1] % q
    f = Fq2(1, 0, q)
    r = pt
    for bit in bin(n)[3:]:
        f = f * f * _line(r, r, xq_im, yq_im, q)
        r = _add(r, r, q)
        if bit == "1":
            f = f * _line(r, pt, xq_im, yq_im, q)
            r = _add(r, pt, q)
    return f


def tate_pairing(a: Point, b: Point, params: CurveParams) -> Fq2:
    """Reduced Tate pairing e(a, phi(b)) with deterministic retry on zeros."""
    q, p = params.q, params.p
    one = Fq2(1, 0, q)
    if not on_curve(a, q) or not on_curve(b, q):
        raise NotOnCurve("pairing input is off the curve")
    if a is None or b is None:
        return one

    def reduced(x: Fq2) -> Fq2:
        return x ** ((q * q - 1) // p)

    try:
        return reduced(_miller(a, b, p, q))
    except DegeneratePairing:
        pass
    # Bilinearity rescue: e(a, b) = e(a, b + s) / e(a, s) for any offset s.
    for k in range(1, 5):
        s = point_mul(k, params.gen, q)
        bs = _add(b, s, q)
        try:
            f1 = one if bs is None else _miller(a, bs, p, q)
            f2 = _miller(a, s, p, q)
            return reduced(f1 * f2.inv())
        except DegeneratePairing:
            continue
    raise DegeneratePairing("all retry offsets exhausted")


class TateBackend:
    """Curve-point payloads for G1, F_{q^2} payloads for G2."""

    name = "tate"

    def __init__(self, params: CurveParams):
        self.params = params
        self.p = params.p
        self.q = params.q
        self._fqw = max(2, (params.q.bit_length() + 7) // 8)
        self._gen = params.gen
        self._g2gen = tate_pairing(self._gen, self._gen, params)
        if self._g2gen == Fq2(1, 0, params.q):
            raise ValidationFailed("pairing is degenerate on the chosen generator")

    def combine(self, kind, a, b):
        if kind == KIND_G1:
            return _add(a, b, self.q)
        return a * b

    def power(self, kind, a, k):
        if kind == KIND_G1:
            return point_mul(k, a, self.q)
        return a ** int(k)

    def invert(self, kind, a):
        if kind == KIND_G1:
            return point_neg(a, self.q)
        return a.inv()

    def identity(self, kind):
        if kind == KIND_G1:
            return None
        return Fq2(1, 0, self.q)

    def from_int(self, kind, k):
        if kind == KIND_G1:
            return point_mul(k, self._gen, self.q)
        return self._g2gen ** int(k)

    def log(self, kind, a):
        # Brute force against the generator; fine at desk scale only.
        if self.p > 200_000:
            raise ValueError("discrete log table would be too large")
        acc = self.identity(kind)
        step = self._gen if kind == KIND_G1 else self._g2gen
        for k in range(self.p):
            if acc == a:
                return k
            acc = self.combine(kind, acc, step)
        raise ValueError("element is outside the working subgroup")

    def pair(self, a, b):
        return tate_pairing(a, b, self.params)

    def width(self, kind):
        if kind == KIND_G1:
            return 1 + self._fqw
        return 2 * self._fqw

    def encode(self, kind, payload) -> bytes:
        w = self._fqw
        if kind == KIND_G1:
            if payload is None:
                return b"\x00" + bytes(w)
            x, y = payload
            flag = 0x02 if y % 2 == 0 else 0x03
            return bytes([flag]) + x.to_bytes(w, "big")
        return payload.a.to_bytes(w, "big") + payload.b.to_bytes(w, "big")

    def decode(self, kind, data: bytes):
        w = self._fqw
        if kind == KIND_G1:
            if len(data) != 1 + w:
                raise MalformedEncoding(f"expected {1 + w} bytes, got {len(data)}")
            flag, xb = data[0], data[1:]
            if flag == 0x00:
                if any(xb):
                    raise MalformedEncoding("infinity encoding must be zero-padded")
                return None
            if flag not in (0x02, 0x03):
                raise MalformedEncoding(f"unknown point flag {flag:#04x}")
            x = int.from_bytes(xb, "big")
            if x >= self.q:
                raise MalformedEncoding(f"x = {x} is not reduced mod {self.q}")
            rhs = (x * x * x + x) % self.q
            y = pow(rhs, (self.q + 1) // 4, self.q)
            if (y * y - rhs) % self.q != 0:
                raise MalformedEncoding("x-coordinate has no square root on the curve")
            if y % 2 != flag - 0x02:
                y = (-y) % self.q
            pt = (x, y)
            if point_mul(self.p, pt, self.q) is not None:
                raise MalformedEncoding("point is outside the order-p subgroup")
            return pt
        if len(data) != 2 * w:
            raise MalformedEncoding(f"expected {2 * w} bytes, got {len(data)}")
        a = int.from_bytes(data[:w], "big")
        b = int.from_bytes(data[w:], "big")
        if a >= self.q or b >= self.q:
            raise MalformedEncoding("coordinate is not reduced mod q")
        val = Fq2(a, b, self.q)
        if val ** self.p != Fq2(1, 0, self.q):
            raise MalformedEncoding("value is outside the order-p subgroup")
        return val

    def describe(self) -> dict:
        return {
            "backend": self.name,
            "p": str(self.p),
            "q": str(self.q),
            "h": str(self.params.h),
            "gen": f"{self._gen[0]},{self._gen[1]}",
        }


def tate_suite(q: int = 523, p: int | None = None, counted: bool = False) -> GroupSuite:
    """Validate the curve over F_q and wrap it in a GroupSuite."""
    report = enumerate_and_validate(q, p)
    return GroupSuite(TateBackend(report.params), counted=counted)


def suite_from_curve_params(q: int, p: int, h: int, gen: tuple[int, int], counted: bool = False) -> GroupSuite:
    """Rebuild a suite from stored parameters, re-checking cheap invariants."""
    if not on_curve(gen, q):
        raise ValidationFailed("stored generator is off the curve")
    if point_mul(p, gen, q) is not None:
        raise ValidationFailed("stored generator does not have order p")
    if p * h != q + 1:
        raise ValidationFailed("stored cofactor does not match q + 1")
    return GroupSuite(TateBackend(CurveParams(q=q, p=p, h=h, gen=gen)), counted=counted)
