"""Exact arithmetic in F_q, F_q[t], F_q(t) and F_q((pi)) with pi = 1/t.

Field elements are plain ints in range(q) internally; for q = p^e with e > 1 the
int is the base-p digit encoding of a polynomial residue mod a fixed irreducible.
Polynomials are tuples of ints, lowest degree first, with no trailing zeros.
The small wrapper classes at the bottom give a friendlier public surface.
"""
from __future__ import annotations

from fractions import Fraction
from functools import lru_cache
from itertools import product

from .errors import InsufficientPrecision

# smallest monic irreducible of degree e over F_p, coefficients low -> high
_IRREDUCIBLE = {
    (2, 2): (1, 1, 1),
    (2, 3): (1, 1, 0, 1),
    (3, 2): (1, 0, 1),
    (3, 3): (1, 2, 0, 1),
    (5, 2): (2, 0, 1),
    (7, 2): (1, 0, 1),
}


def _factor_prime_power(q):
    if q < 2:
        raise ValueError("q must be a prime power")
    p = 2
    while q % p:
        p += 1
    e, r = 0, q
    while r % p == 0:
        r //= p
        e += 1
    if r != 1:
        raise ValueError(f"{q} is not a prime power")
    return p, e


def _search_irreducible(p, e):
    for tail in product(range(p), repeat=e):
        cand = tuple(tail) + (1,)
        if cand[0] == 0:
            continue
        # no root-free check is enough only for e <= 3; do a full trial division
        ok = True
        for d in range(1, e // 2 + 1):
            for low in product(range(p), repeat=d):
                div = tuple(low) + (1,)
                if _modp_rem(cand, div, p) == ():
                    ok = False
                    break
            if not ok:
                break
        if ok:
            return cand
    raise ValueError("no irreducible found")


def _modp_rem(a, b, p):
    a = list(a)
    inv_lead = pow(b[-1], p - 2, p)
    while len(a) >= len(b):
        c = a[-1] * inv_lead % p
        shift = len(a) - len(b)
        for i, bc in enumerate(b):
            a[shift + i] = (a[shift + i] - c * bc) % p
        while a and a[-1] == 0:
            a.pop()
    return tuple(a)


class GF:
    """The finite field with q elements; instances are cached per q."""

    _cache: dict = {}

    def __new__(cls, q):
        if q in cls._cache:
            return cls._cache[q]
        self = super().__new__(cls)
        self._setup(q)
        cls._cache[q] = self
        return self

    def _setup(self, q):
        p, e = _factor_prime_power(q)
        self.q, self.p, self.e = q, p, e
        if e == 1:
            self.add = [[(a + b) % p for b in range(q)] for a in range(q)]
            self.mul = [[(a * b) % p for b in range(q)] for a in range(q)]
            self.modulus = None
        else:
            mod = _IRREDUCIBLE.get((p, e)) or _search_irreducible(p, e)
            self.modulus = mod

            def digits(x):
                return [(x // p ** i) % p for i in range(e)]

            def undigits(ds):
                return sum(d * p ** i for i, d in enumerate(ds))

            self.add = [[undigits([(x + y) % p for x, y in zip(digits(a), digits(b))])
                         for b in range(q)] for a in range(q)]
            mul = [[0] * q for _ in range(q)]
            for a in range(q):
                da = digits(a)
                for b in range(q):
                    db = digits(b)
                    prod = [0] * (2 * e - 1)
                    for i, x in enumerate(da):
                        for j, y in enumerate(db):
                            prod[i + j] = (prod[i + j] + x * y) % p
                    while prod and prod[-1] == 0:
                        prod.pop()
                    r = list(_modp_rem(prod, mod, p)) if len(prod) >= len(mod) else prod
                    mul[a][b] = undigits(r + [0] * (e - len(r)))
            self.mul = mul
        self.neg = [next(b for b in range(q) if self.add[a][b] == 0) for a in range(q)]
        self.inv = [0] + [next(b for b in range(1, q) if self.mul[a][b] == 1) for a in range(1, q)]
        self.sub = [[self.add[a][self.neg[b]] for b in range(q)] for a in range(q)]

    def __repr__(self):
        return f"GF({self.q})"

    def __reduce__(self):
        return (GF, (self.q,))

    def elements(self):
        return range(self.q)

    def units(self):
        return range(1, self.q)

    def __call__(self, value):
        return FiniteFieldElement(self, value)


# ---------------------------------------------------------------------------
# polynomial helpers on coefficient tuples (low -> high)

def p_trim(a):
    a = list(a)
    while a and a[-1] == 0:
        a.pop()
    return tuple(a)


def p_deg(a):
    return len(a) - 1  # -1 for the zero polynomial


def p_add(F, a, b):
    if len(a) < len(b):
        a, b = b, a
    add = F.add
    out = list(a)
    for i, y in enumerate(b):
        out[i] = add[out[i]][y]
    return p_trim(out)


def p_neg(F, a):
    neg = F.neg
    return tuple(neg[x] for x in a)


def p_sub(F, a, b):
    return p_add(F, a, p_neg(F, b))


def p_scale(F, c, a):
    if c == 0:
        return ()
    m = F.mul[c]
    return tuple(m[x] for x in a)


def p_shift(a, k):
    return (0,) * k + tuple(a) if a else ()


def p_mul(F, a, b):
    if not a or not b:
        return ()
    add, mul = F.add, F.mul
    out = [0] * (len(a) + len(b) - 1)
    for i, x in enumerate(a):
        if x == 0:
            continue
        mx = mul[x]
        for j, y in enumerate(b):
            if y:
                out[i + j] = add[out[i + j]][mx[y]]
    return p_trim(out)


def p_divmod(F, a, b):
    if not b:
        raise ZeroDivisionError("polynomial division by zero")
    a = list(p_trim(a))
    inv_lead = F.inv[b[-1]]
    quot = [0] * max(0, len(a) - len(b) + 1)
    add, mul, neg = F.add, F.mul, F.neg
    while len(a) >= len(b) and a:
        c = mul[a[-1]][inv_lead]
        shift = len(a) - len(b)
        quot[shift] = c
        nc = neg[c]
        for i, y in enumerate(b):
            a[shift + i] = add[a[shift + i]][mul[nc][y]]
        while a and a[-1] == 0:
            a.pop()
    return p_trim(quot), tuple(a)


def p_mod(F, a, b):
    return p_divmod(F, a, b)[1]


def p_monic(F, a):
    if not a:
        return a
    return p_scale(F, F.inv[a[-1]], a)


def p_gcd(F, a, b):
    while b:
        a, b = b, p_mod(F, a, b)
    return p_monic(F, a)


def p_pow(F, a, k):
    out = (1,)
    for _ in range(k):
        out = p_mul(F, out, a)
    return out


def p_eval(F, a, x):
    acc = 0
    for c in reversed(a):
        acc = F.add[F.mul[acc][x]][c]
    return acc


def all_polys(F, max_deg):
    """Every polynomial of degree <= max_deg (including zero)."""
    for coeffs in product(range(F.q), repeat=max_deg + 1):
        yield p_trim(coeffs)


def monic_irreducibles(F, deg):
    out = []
    for tail in product(range(F.q), repeat=deg):
        cand = tuple(tail) + (1,)
        if deg > 1 and cand[0] == 0:
            continue
        ok = True
        for d in range(1, deg // 2 + 1):
            for low in product(range(F.q), repeat=d):
                if not p_mod(F, cand, tuple(low) + (1,)):
                    ok = False
                    break
            if not ok:
                break
        if ok:
            out.append(cand)
    return out


# ---------------------------------------------------------------------------
# power series mod pi^N on lists of length N

def ser_mul(F, a, b, N):
    add, mul = F.add, F.mul
    out = [0] * N
    for i in range(min(N, len(a))):
        x = a[i]
        if x == 0:
            continue
        mx = mul[x]
        for j in range(min(N - i, len(b))):
            y = b[j]
            if y:
                out[i + j] = add[out[i + j]][mx[y]]
    return out


def ser_inv(F, a, N):
    """Inverse of a unit power series (a[0] != 0) modulo pi^N."""
    if not a or a[0] == 0:
        raise ZeroDivisionError("series is not a unit")
    add, mul, neg = F.add, F.mul, F.neg
    inv0 = F.inv[a[0]]
    out = [0] * N
    out[0] = inv0
    for k in range(1, N):
        acc = 0
        for i in range(1, min(k, len(a) - 1) + 1):
            if a[i] and out[k - i]:
                acc = add[acc][mul[a[i]][out[k - i]]]
        out[k] = mul[neg[acc]][inv0]
    return out


# ---------------------------------------------------------------------------
# linear algebra over F_q on lists of rows

def gf_rref(F, rows, ncols):
    """Reduced row echelon form; returns (nonzero rows, pivot columns)."""
    m = [list(r) for r in rows]
    add, mul, neg, inv = F.add, F.mul, F.neg, F.inv
    pivots = []
    r = 0
    for c in range(ncols):
        piv = next((i for i in range(r, len(m)) if m[i][c]), None)
        if piv is None:
            continue
        m[r], m[piv] = m[piv], m[r]
        s = inv[m[r][c]]
        m[r] = [mul[s][x] for x in m[r]]
        for i in range(len(m)):
            if i != r and m[i][c]:
                f = neg[m[i][c]]
                m[i] = [add[x][mul[f][y]] for x, y in zip(m[i], m[r])]
        pivots.append(c)
        r += 1
        if r == len(m):
            break
    return [tuple(x) for x in m[:r]], pivots


def gf_kernel(F, rows, ncols):
    """Basis of {x : sum_j rows[i][j] x_j = 0 for all i}."""
    red, pivots = gf_rref(F, rows, ncols)
    free = [c for c in range(ncols) if c not in pivots]
    basis = []
    for fcol in free:
        v = [0] * ncols
        v[fcol] = 1
        for row, pc in zip(red, pivots):
            v[pc] = F.neg[row[fcol]]
        basis.append(tuple(v))
    return basis


def gf_det(F, mat):
    m = [list(r) for r in mat]
    n = len(m)
    det = 1
    for c in range(n):
        piv = next((i for i in range(c, n) if m[i][c]), None)
        if piv is None:
            return 0
        if piv != c:
            m[c], m[piv] = m[piv], m[c]
            det = F.neg[det]
        det = F.mul[det][m[c][c]]
        s = F.inv[m[c][c]]
        for i in range(c + 1, n):
            if m[i][c]:
                f = F.neg[F.mul[m[i][c]][s]]
                m[i] = [F.add[x][F.mul[f][y]] for x, y in zip(m[i], m[c])]
    return det


def gf_matmul(F, a, b):
    add, mul = F.add, F.mul
    out = []
    for row in a:
        new = []
        for j in range(len(b[0])):
            acc = 0
            for k, x in enumerate(row):
                if x and b[k][j]:
                    acc = add[acc][mul[x][b[k][j]]]
            new.append(acc)
        out.append(tuple(new))
    return tuple(out)


def gf_inverse(F, mat):
    n = len(mat)
    aug = [list(r) + [1 if i == j else 0 for j in range(n)] for i, r in enumerate(mat)]
    red, piv = gf_rref(F, aug, 2 * n)
    if piv[:n] != list(range(n)):
        raise ZeroDivisionError("singular matrix")
    return tuple(tuple(r[n:]) for r in red)


@lru_cache(maxsize=None)
def subspaces(q, dim):
    """All proper nonzero subspaces of F_q^dim, as tuples of RREF rows."""
    F = GF(q)
    found = set()
    vecs = [v for v in product(range(q), repeat=dim) if any(v)]
    for k in range(1, dim):
        for combo in product(vecs, repeat=k):
            red, piv = gf_rref(F, combo, dim)
            if len(red) == k:
                found.add(tuple(red))
    return tuple(sorted(found, key=lambda s: (len(s), s)))


def gaussian_binomial(n, k, q):
    num = den = 1
    for i in range(k):
        num *= q ** (n - i) - 1
        den *= q ** (i + 1) - 1
    return num // den


# ---------------------------------------------------------------------------
# public wrapper classes

class FiniteFieldElement:
    __slots__ = ("field", "value")

    def __init__(self, field, value):
        if isinstance(field, int):
            field = GF(field)
        if not 0 <= value < field.q:
            raise ValueError("value out of range")
        self.field = field
        self.value = value

    def _coerce(self, other):
        if isinstance(other, FiniteFieldElement):
            if other.field is not self.field:
                raise ValueError("field mismatch")
            return other.value
        return other % self.field.p if self.field.e == 1 else int(other)

    def __add__(self, other):
        return FiniteFieldElement(self.field, self.field.add[self.value][self._coerce(other)])

    __radd__ = __add__

    def __neg__(self):
        return FiniteFieldElement(self.field, self.field.neg[self.value])

    def __sub__(self, other):
        return FiniteFieldElement(self.field, self.field.sub[self.value][self._coerce(other)])

    def __mul__(self, other):
        return FiniteFieldElement(self.field, self.field.mul[self.value][self._coerce(other)])

    __rmul__ = __mul__

    def inverse(self):
        if self.value == 0:
            raise ZeroDivisionError("inverse of zero in F_q")
        return FiniteFieldElement(self.field, self.field.inv[self.value])

    def __truediv__(self, other):
        return self * FiniteFieldElement(self.field, self._coerce(other)).inverse()

    def __eq__(self, other):
        if isinstance(other, FiniteFieldElement):
            return self.field is other.field and self.value == other.value
        if isinstance(other, int):
            return self.value == other
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.value))

    def __repr__(self):
        return f"F{self.field.q}({self.value})"


class Polynomial:
    """Polynomial in t over F_q."""

    __slots__ = ("field", "coeffs")

    def __init__(self, field, coeffs):
        if isinstance(field, int):
            field = GF(field)
        self.field = field
        self.coeffs = p_trim(c.value if isinstance(c, FiniteFieldElement) else c for c in coeffs)

    @classmethod
    def t(cls, field):
        return cls(field, (0, 1))

    @classmethod
    def const(cls, field, c):
        return cls(field, (c,))

    @property
    def degree(self):
        return p_deg(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def _lift(self, other):
        if isinstance(other, Polynomial):
            return other.coeffs
        return p_trim((other,))

    def __add__(self, other):
        return Polynomial(self.field, p_add(self.field, self.coeffs, self._lift(other)))

    __radd__ = __add__

    def __neg__(self):
        return Polynomial(self.field, p_neg(self.field, self.coeffs))

    def __sub__(self, other):
        return Polynomial(self.field, p_sub(self.field, self.coeffs, self._lift(other)))

    def __rsub__(self, other):
        return Polynomial(self.field, p_sub(self.field, self._lift(other), self.coeffs))

    def __mul__(self, other):
        return Polynomial(self.field, p_mul(self.field, self.coeffs, self._lift(other)))

    __rmul__ = __mul__

    def __pow__(self, k):
        return Polynomial(self.field, p_pow(self.field, self.coeffs, k))

    def __divmod__(self, other):
        qq, r = p_divmod(self.field, self.coeffs, self._lift(other))
        return Polynomial(self.field, qq), Polynomial(self.field, r)

    def __mod__(self, other):
        return divmod(self, other)[1]

    def __floordiv__(self, other):
        return divmod(self, other)[0]

    def __truediv__(self, other):
        return RationalFunction(self, other if isinstance(other, Polynomial)
                                else Polynomial(self.field, (other,)))

    def __eq__(self, other):
        if isinstance(other, Polynomial):
            return self.field is other.field and self.coeffs == other.coeffs
        if isinstance(other, int):
            return self.coeffs == p_trim((other,))
        return NotImplemented

    def __hash__(self):
        return hash((self.field.q, self.coeffs))

    def __call__(self, x):
        return p_eval(self.field, self.coeffs, x)

    def __repr__(self):
        if not self.coeffs:
            return "0"
        terms = []
        for i, c in enumerate(self.coeffs):
            if c:
                mono = "" if i == 0 else ("t" if i == 1 else f"t^{i}")
                coef = str(c) if (c != 1 or i == 0) else ""
                terms.append(coef + ("*" if coef and mono else "") + mono)
        return " + ".join(reversed(terms))


class RationalFunction:
    """Element of F_q(t), kept reduced with a monic denominator."""

    __slots__ = ("num", "den")

    def __init__(self, num, den=None):
        F = num.field
        if den is None:
            den = Polynomial(F, (1,))
        if den.is_zero():
            raise ZeroDivisionError("zero denominator")
        g = p_gcd(F, num.coeffs, den.coeffs)
        nc, dc = num.coeffs, den.coeffs
        if g != (1,):
            nc = p_divmod(F, nc, g)[0]
            dc = p_divmod(F, dc, g)[0]
        lead_inv = F.inv[dc[-1]]
        self.num = Polynomial(F, p_scale(F, lead_inv, nc))
        self.den = Polynomial(F, p_scale(F, lead_inv, dc))

    @property
    def field(self):
        return self.num.field

    def is_zero(self):
        return self.num.is_zero()

    @staticmethod
    def _lift(x, F):
        if isinstance(x, RationalFunction):
            return x
        if isinstance(x, Polynomial):
            return RationalFunction(x)
        return RationalFunction(Polynomial(F, (x,)))

    def __add__(self, other):
        o = self._lift(other, self.field)
        return RationalFunction(self.num * o.den + o.num * self.den, self.den * o.den)

    __radd__ = __add__

    def __neg__(self):
        return RationalFunction(-self.num, self.den)

    def __sub__(self, other):
        return self + (-self._lift(other, self.field))

    def __rsub__(self, other):
        return self._lift(other, self.field) - self

    def __mul__(self, other):
        o = self._lift(other, self.field)
        return RationalFunction(self.num * o.num, self.den * o.den)

    __rmul__ = __mul__

    def __truediv__(self, other):
        o = self._lift(other, self.field)
        if o.is_zero():
            raise ZeroDivisionError("division by zero rational function")
        return RationalFunction(self.num * o.den, self.den * o.num)

    def __rtruediv__(self, other):
        return self._lift(other, self.field) / self

    def __eq__(self, other):
        if not isinstance(other, RationalFunction):
            other = self._lift(other, self.field)
        return self.num == other.num and self.den == other.den

    def __hash__(self):
        return hash((self.num, self.den))

    def __repr__(self):
        return f"({self.num})/({self.den})"


class TruncatedLaurentSeries:
    """sum_k coeffs[k] * pi^(valuation + k), known up to pi^(valuation + precision).

    The zero series has no coefficients; its valuation field then records the
    absolute precision to which it is known to vanish.
    """

    __slots__ = ("field", "valuation", "coeffs")

    def __init__(self, field, valuation, coeffs):
        if isinstance(field, int):
            field = GF(field)
        coeffs = [c.value if isinstance(c, FiniteFieldElement) else c for c in coeffs]
        k = 0
        while k < len(coeffs) and coeffs[k] == 0:
            k += 1
        self.field = field
        self.valuation = valuation + k
        self.coeffs = tuple(coeffs[k:])

    @property
    def precision(self):
        return len(self.coeffs)

    @property
    def absolute_precision(self):
        return self.valuation + len(self.coeffs)

    def is_zero(self):
        return not self.coeffs

    def coefficient(self, k):
        """Coefficient of pi^k (must be inside the known range)."""
        if k >= self.absolute_precision:
            raise InsufficientPrecision(f"coefficient of pi^{k} is beyond the known precision")
        if k < self.valuation:
            return 0
        return self.coeffs[k - self.valuation]

    def __add__(self, other):
        F = self.field
        top = min(self.absolute_precision, other.absolute_precision)
        lo = min(self.valuation, other.valuation)
        if top <= lo:
            return TruncatedLaurentSeries(F, top, ())
        out = []
        for k in range(lo, top):
            a = self.coefficient(k) if k >= self.valuation else 0
            b = other.coefficient(k) if k >= other.valuation else 0
            out.append(F.add[a][b])
        res = TruncatedLaurentSeries(F, lo, out)
        if res.is_zero():
            return TruncatedLaurentSeries(F, top, ())
        return res

    def __neg__(self):
        return TruncatedLaurentSeries(self.field, self.valuation, [self.field.neg[c] for c in self.coeffs])

    def __sub__(self, other):
        return self + (-other)

    def __mul__(self, other):
        F = self.field
        if self.is_zero() or other.is_zero():
            bound = self.valuation + other.valuation
            return TruncatedLaurentSeries(F, bound, ())
        N = min(self.precision, other.precision)
        return TruncatedLaurentSeries(F, self.valuation + other.valuation,
                                      ser_mul(F, list(self.coeffs), list(other.coeffs), N))

    def inverse(self):
        if self.is_zero():
            raise InsufficientPrecision("inversion of a series that is zero to the known precision")
        return TruncatedLaurentSeries(self.field, -self.valuation,
                                      ser_inv(self.field, list(self.coeffs), self.precision))

    def __truediv__(self, other):
        return self * other.inverse()

    def __eq__(self, other):
        if not isinstance(other, TruncatedLaurentSeries):
            return NotImplemented
        return (self.field is other.field and self.valuation == other.valuation
                and self.coeffs == other.coeffs)

    def __hash__(self):
        return hash((self.field.q, self.valuation, self.coeffs))

    def __repr__(self):
        return f"TLS(q={self.field.q}, v={self.valuation}, {self.coeffs})"


def series_arith(a, b, op):
    """Dispatch helper: op in {'add', 'mul', 'inv'} (inv ignores b)."""
    if op == "add":
        return a + b
    if op == "mul":
        return a * b
    if op == "inv":
        return a.inverse()
    raise ValueError(f"unknown op {op!r}")


# ---------------------------------------------------------------------------
# valuations at infinity

def val_infty(f):
    if isinstance(f, Polynomial):
        f = RationalFunction(f)
    if f.is_zero():
        raise ValueError("valuation of zero undefined")
    return f.den.degree - f.num.degree


def abs_infty(f):
    if isinstance(f, Polynomial):
        f = RationalFunction(f)
    if f.is_zero():
        return Fraction(0)
    return Fraction(f.field.q) ** (-val_infty(f))


def laurent_expand(f, precision):
    """Expansion of f in pi = 1/t with `precision` significant coefficients."""
    if isinstance(f, Polynomial):
        f = RationalFunction(f)
    if precision < 1:
        raise ValueError("precision must be positive")
    F = f.field
    if f.is_zero():
        return TruncatedLaurentSeries(F, precision, ())
    num_rev = list(reversed(f.num.coeffs))  # N(t) = pi^{-deg N} * num_rev(pi)
    den_rev = list(reversed(f.den.coeffs))
    inv_den = ser_inv(F, den_rev, precision)
    coeffs = ser_mul(F, num_rev + [0] * precision, inv_den, precision)
    return TruncatedLaurentSeries(F, f.den.degree - f.num.degree, coeffs)


def rational_reconstruct(s, degree_bound):
    """Find N/D with deg N, deg D <= degree_bound whose expansion matches s.

    Solves the linear system saying that s * D(t) has no positive powers of pi
    in the known range; returns None if no such function exists.
    """
    F = s.field
    top = s.absolute_precision
    if s.is_zero():
        return RationalFunction(Polynomial(F, ()))
    d = degree_bound
    # coefficient of pi^k in s * sum_j D_j pi^{-j} is sum_j D_j s_{k+j}
    rows = []
    for k in range(1, top - d):
        rows.append([s.coefficient(k + j) if k + j < top else 0 for j in range(d + 1)])
    if not rows:
        raise InsufficientPrecision("series too short for reconstruction")
    kernel = gf_kernel(F, rows, d + 1)
    if not kernel:
        return None
    # prefer the denominator of smallest degree: RREF on reversed columns
    red, _ = gf_rref(F, [tuple(reversed(v)) for v in kernel], d + 1)
    best = tuple(reversed(red[-1]))
    D = Polynomial(F, best)
    # numerator = polynomial part (nonpositive pi-powers) of s * D
    num = []
    for j in range(0, d + 1):
        # coefficient of t^j = pi^{-j}
        acc = 0
        for i, dc in enumerate(D.coeffs):
            k = -j + i
            if dc and s.valuation <= k < top:
                acc = F.add[acc][F.mul[dc][s.coefficient(k)]]
        num.append(acc)
    f = RationalFunction(Polynomial(F, num), D)
    if f.is_zero() or val_infty(f) != s.valuation:
        return None
    if laurent_expand(f, s.precision).coeffs != s.coeffs:
        return None
    return f


def val_place(f, prime):
    """Valuation of f at the finite place given by a monic irreducible polynomial."""
    if isinstance(f, Polynomial):
        f = RationalFunction(f)
    if f.is_zero():
        raise ValueError("valuation of zero undefined")
    F = f.field

    def count(a):
        k = 0
        while True:
            qq, r = p_divmod(F, a, prime.coeffs)
            if r:
                return k
            a, k = qq, k + 1

    return count(f.num.coeffs) - count(f.den.coeffs)


def abs_place(f, prime):
    q = prime.field.q
    if f.is_zero():
        return Fraction(0)
    return Fraction(q) ** (-prime.degree * val_place(f, prime))
