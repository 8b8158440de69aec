"""Hall algebras of a quiver over a finite field, with exact Q(sqrt q)
coefficients.

Elements are G-invariant functions on representation points, stored as
finitely supported coefficient maps over (dimension vector, orbit id). The
product is the push-pull convolution evaluated through stable graded
subspaces, twisted by q^{-m/2}; restriction sums over block-triangular
extensions, twisted by q^{-m*/2}. A contraction site equips the algebra with
the heart subspace (contraction edges invertible), the transport maps to and
from the contracted quiver's Hall algebra, and the verification routines for
the embedding, the PBW transport, and the split short exact sequence.
"""

from __future__ import annotations

import itertools

from .cache import OrbitCache
from .ffalg import DEFAULT_MAX_POINTS, EnumerationBoundError, Field
from .quiver import (Quiver, cartan_of, check_contraction_assumptions,
                     contract_quiver, identity_automorphism, make_orbit_pair)
from .repspace import (RepSpace, act, contract_point, enumerate_group,
                       extensions_over, is_heart, orbits, quotient_point,
                       stable_subspaces, sub_point)
from .scalars import SqrtQScalar


class HallContext:
    """Shared machinery for one (quiver, q): interned representation spaces,
    orbit tables, and memoized structure constants."""

    def __init__(self, quiver: Quiver, q: int, cache: OrbitCache | None = None,
                 sweep_bound: int = 10_000, max_points: int = DEFAULT_MAX_POINTS,
                 oracle_bound: int = 10_000):
        self.quiver = quiver
        self.field = Field(q)
        self.cache = cache
        self.sweep_bound = sweep_bound
        self.max_points = max_points
        self.oracle_bound = oracle_bound
        self.cartan = cartan_of(quiver, identity_automorphism(quiver))
        self._spaces: dict = {}
        self._tables: dict = {}
        self._flag_tables: dict = {}
        self._ext_tables: dict = {}

    @property
    def q(self) -> int:
        return self.field.q

    def dims_key(self, dims) -> tuple:
        if isinstance(dims, dict):
            if set(dims) != set(self.quiver.vertices):
                raise ValueError("dimension vector must cover exactly the vertices")
            return tuple(dims[v] for v in self.quiver.vertices)
        key = tuple(dims)
        if len(key) != len(self.quiver.vertices):
            raise ValueError("dimension vector length mismatch")
        return key

    def dims_dict(self, key) -> dict:
        return dict(zip(self.quiver.vertices, key))

    @property
    def zero_key(self) -> tuple:
        return (0,) * len(self.quiver.vertices)

    def space(self, dims) -> RepSpace:
        key = self.dims_key(dims)
        if key not in self._spaces:
            self._spaces[key] = RepSpace(self.quiver, self.field,
                                         self.dims_dict(key))
        return self._spaces[key]

    def table(self, dims):
        key = self.dims_key(dims)
        if key not in self._tables:
            self._tables[key] = orbits(self.space(key),
                                       sweep_bound=self.sweep_bound,
                                       max_points=self.max_points,
                                       cache=self.cache)
        return self._tables[key]

    def sym_pairing(self, d1, d2) -> int:
        """The symmetric form of the attached Cartan datum on dim vectors."""
        k1, k2 = self.dims_key(d1), self.dims_key(d2)
        return sum(k1[i] * k2[j] * self.cartan.form[i][j]
                   for i in range(len(k1)) for j in range(len(k2)))

    def scalar(self, a=0, b=0) -> SqrtQScalar:
        return SqrtQScalar(self.q, a, b)


def m_omega(quiver: Quiver, tau: dict, omega: dict) -> int:
    vertex_part = sum(tau[v] * omega[v] for v in quiver.vertices)
    edge_part = sum(tau[e.source] * omega[e.target] for e in quiver.edges)
    return vertex_part + edge_part


def m_star_omega(quiver: Quiver, tau: dict, omega: dict) -> int:
    vertex_part = sum(tau[v] * omega[v] for v in quiver.vertices)
    edge_part = sum(tau[e.source] * omega[e.target] for e in quiver.edges)
    return -vertex_part + edge_part


def _accum(terms: dict, key, value) -> None:
    if key in terms:
        terms[key] = terms[key] + value
    else:
        terms[key] = value


def _prune(terms: dict) -> dict:
    return {k: v for k, v in terms.items() if not v.is_zero()}


class HallElement:
    """Finitely supported coefficient map (dims key, orbit ordinal) -> scalar."""

    def __init__(self, ctx: HallContext, terms: dict):
        self.ctx = ctx
        self.terms = _prune(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, HallElement) and self.ctx is other.ctx
                and self.terms == other.terms)

    def __add__(self, other):
        _same_ctx(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            _accum(terms, k, v)
        return HallElement(self.ctx, terms)

    def __sub__(self, other):
        _same_ctx(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            _accum(terms, k, -v)
        return HallElement(self.ctx, terms)

    def __neg__(self):
        return HallElement(self.ctx, {k: -v for k, v in self.terms.items()})

    def scale(self, c) -> "HallElement":
        if not isinstance(c, SqrtQScalar):
            c = SqrtQScalar(self.ctx.q, c)
        return HallElement(self.ctx, {k: v * c for k, v in self.terms.items()})

    def homogeneous(self) -> dict:
        """Grade -> sub-element, grouping the terms by dims key."""
        parts: dict = {}
        for (key, o), c in self.terms.items():
            parts.setdefault(key, {})[(key, o)] = c
        return {key: HallElement(self.ctx, t) for key, t in parts.items()}

    def grades(self) -> list[tuple]:
        return sorted({key for key, _ in self.terms})

    def value_at(self, dims, x) -> SqrtQScalar:
        """Evaluate at a point: the coefficient of the orbit containing x."""
        key = self.ctx.dims_key(dims)
        ordinal = self.ctx.table(key).ordinal_of(x)
        return self.terms.get((key, ordinal), SqrtQScalar.zero(self.ctx.q))

    def support_ids(self) -> list[dict]:
        out = []
        for key, o in sorted(self.terms):
            out.append({"dim": self.ctx.dims_dict(key), "orbit": f"o{o}"})
        return out

    def to_json(self) -> dict:
        terms = []
        for (key, o) in sorted(self.terms):
            terms.append({"dim": self.ctx.dims_dict(key), "orbit": f"o{o}",
                          "coeff": self.terms[(key, o)].to_json()})
        return {"q": self.ctx.q, "quiver": self.ctx.quiver.content_hash(),
                "terms": terms}

    @classmethod
    def from_json(cls, ctx: HallContext, payload: dict) -> "HallElement":
        if payload.get("q") != ctx.q:
            raise ValueError(f"element is over q={payload.get('q')}, "
                             f"context has q={ctx.q}")
        if payload.get("quiver") != ctx.quiver.content_hash():
            raise ValueError("element belongs to a different graph")
        terms: dict = {}
        for t in payload["terms"]:
            key = ctx.dims_key(t["dim"])
            ordinal = ctx.table(key).ordinal_of_id(t["orbit"])
            _accum(terms, (key, ordinal), SqrtQScalar.from_json(ctx.q, t["coeff"]))
        return cls(ctx, terms)

    def __repr__(self):
        if not self.terms:
            return "HallElement(0)"
        bits = [f"{c}*P[{key},o{o}]" for (key, o), c in sorted(self.terms.items())]
        return "HallElement(" + " + ".join(bits) + ")"


def _same_ctx(f1, f2) -> None:
    if f1.ctx is not f2.ctx:
        raise ValueError("context mismatch")


def zero_element(ctx: HallContext) -> HallElement:
    return HallElement(ctx, {})


def char_function(ctx: HallContext, dims, orbit) -> HallElement:
    """The basis vector P_O: coefficient 1 on one orbit."""
    key = ctx.dims_key(dims)
    table = ctx.table(key)
    ordinal = table.ordinal_of_id(orbit) if isinstance(orbit, str) else orbit
    if not 0 <= ordinal < table.count:
        raise KeyError(f"no orbit {orbit!r} at dims {key}")
    return HallElement(ctx, {(key, ordinal): SqrtQScalar.one(ctx.q)})


def unit(ctx: HallContext) -> HallElement:
    return char_function(ctx, ctx.zero_key, 0)


def _flag_table(ctx: HallContext, tkey: tuple, wkey: tuple) -> dict:
    """(t, w) -> {big orbit -> number of stable graded U in its representative
    with dim U = wkey, quotient in orbit t, restriction in orbit w}."""
    memo_key = (tkey, wkey)
    if memo_key in ctx._flag_tables:
        return ctx._flag_tables[memo_key]
    nkey = tuple(a + b for a, b in zip(tkey, wkey))
    big_space, big_table = ctx.space(nkey), ctx.table(nkey)
    ttable, wtable = ctx.table(tkey), ctx.table(wkey)
    omega = ctx.dims_dict(wkey)
    out: dict = {}
    for big in range(big_table.count):
        y = big_table.representative(big)
        for U in stable_subspaces(big_space, y, omega, ctx.max_points):
            t = ttable.ordinal_of(quotient_point(big_space, y, U))
            w = wtable.ordinal_of(sub_point(big_space, y, U))
            bucket = out.setdefault((t, w), {})
            bucket[big] = bucket.get(big, 0) + 1
    ctx._flag_tables[memo_key] = out
    return out


def star(f1: HallElement, f2: HallElement) -> HallElement:
    """The untwisted convolution: (f1 * f2)(y) = sum over y-stable graded U
    with dim U = grade(f2) of f1(y^{V/U}) f2(y^U)."""
    _same_ctx(f1, f2)
    ctx = f1.ctx
    terms: dict = {}
    for (tk, t), c1 in f1.terms.items():
        for (wk, w), c2 in f2.terms.items():
            nk = tuple(a + b for a, b in zip(tk, wk))
            bucket = _flag_table(ctx, tk, wk).get((t, w))
            if not bucket:
                continue
            c = c1 * c2
            for big, count in bucket.items():
                _accum(terms, (nk, big), c * count)
    return HallElement(ctx, terms)


def circ(f1: HallElement, f2: HallElement) -> HallElement:
    """The Hall product: q^{-m/2} times the convolution, per homogeneous pair."""
    _same_ctx(f1, f2)
    ctx = f1.ctx
    terms: dict = {}
    for (tk, t), c1 in f1.terms.items():
        for (wk, w), c2 in f2.terms.items():
            nk = tuple(a + b for a, b in zip(tk, wk))
            bucket = _flag_table(ctx, tk, wk).get((t, w))
            if not bucket:
                continue
            m = m_omega(ctx.quiver, ctx.dims_dict(tk), ctx.dims_dict(wk))
            c = c1 * c2 * SqrtQScalar.half_power(ctx.q, -m)
            for big, count in bucket.items():
                _accum(terms, (nk, big), c * count)
    return HallElement(ctx, terms)


def diagram_star_oracle(f1: HallElement, f2: HallElement,
                        max_flags: int | None = None) -> HallElement:
    """The convolution computed the long way round: enumerate every stable
    graded subspace together with every pair of graded isomorphisms onto the
    standard quotient and sub spaces, and divide by the two group orders.

    Shares nothing with the structure-constant route except the orbit tables,
    so exact agreement with star() is a real consistency check.
    """
    _same_ctx(f1, f2)
    ctx = f1.ctx
    if max_flags is None:
        max_flags = ctx.oracle_bound
    terms: dict = {}
    for tk in sorted({k for k, _ in f1.terms}):
        for wk in sorted({k for k, _ in f2.terms}):
            tspace, wspace = ctx.space(tk), ctx.space(wk)
            gt = [(g, tuple(m.inverse() for m in g))
                  for g in enumerate_group(tspace, max_flags)]
            gw = [(g, tuple(m.inverse() for m in g))
                  for g in enumerate_group(wspace, max_flags)]
            if len(gt) * len(gw) > max_flags:
                raise EnumerationBoundError(
                    f"{len(gt)}*{len(gw)} flag isomorphisms exceed the bound "
                    f"{max_flags}")
            nk = tuple(a + b for a, b in zip(tk, wk))
            big_space, big_table = ctx.space(nk), ctx.table(nk)
            omega = ctx.dims_dict(wk)
            zero = SqrtQScalar.zero(ctx.q)
            for big in range(big_table.count):
                y = big_table.representative(big)
                total = zero
                for U in stable_subspaces(big_space, y, omega, ctx.max_points):
                    quot = quotient_point(big_space, y, U)
                    sub = sub_point(big_space, y, U)
                    s1 = zero
                    for g, ginv in gt:
                        s1 = s1 + f1.value_at(tk, act(tspace, g, quot, ginv))
                    s2 = zero
                    for g, ginv in gw:
                        s2 = s2 + f2.value_at(wk, act(wspace, g, sub, ginv))
                    total = total + s1 * s2
                if not total.is_zero():
                    _accum(terms, (nk, big), total / (len(gt) * len(gw)))
    return HallElement(ctx, terms)


class TensorElement:
    """Finitely supported map ((dims, orbit), (dims, orbit)) -> scalar."""

    def __init__(self, ctx: HallContext, terms: dict):
        self.ctx = ctx
        self.terms = _prune(terms)

    def is_zero(self) -> bool:
        return not self.terms

    def __eq__(self, other):
        return (isinstance(other, TensorElement) and self.ctx is other.ctx
                and self.terms == other.terms)

    def __add__(self, other):
        _same_ctx(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            _accum(terms, k, v)
        return TensorElement(self.ctx, terms)

    def __sub__(self, other):
        _same_ctx(self, other)
        terms = dict(self.terms)
        for k, v in other.terms.items():
            _accum(terms, k, -v)
        return TensorElement(self.ctx, terms)

    def scale(self, c) -> "TensorElement":
        if not isinstance(c, SqrtQScalar):
            c = SqrtQScalar(self.ctx.q, c)
        return TensorElement(self.ctx, {k: v * c for k, v in self.terms.items()})

    def to_json(self) -> dict:
        terms = []
        for ((tk, t), (wk, w)) in sorted(self.terms):
            terms.append({
                "left": {"dim": self.ctx.dims_dict(tk), "orbit": f"o{t}"},
                "right": {"dim": self.ctx.dims_dict(wk), "orbit": f"o{w}"},
                "coeff": self.terms[((tk, t), (wk, w))].to_json()})
        return {"q": self.ctx.q, "quiver": self.ctx.quiver.content_hash(),
                "terms": terms}

    def __repr__(self):
        if not self.terms:
            return "TensorElement(0)"
        bits = [f"{c}*P[{tk},o{t}]⊗P[{wk},o{w}]"
                for ((tk, t), (wk, w)), c in sorted(self.terms.items())]
        return "TensorElement(" + " + ".join(bits) + ")"


def tensor(f1: HallElement, f2: HallElement) -> TensorElement:
    _same_ctx(f1, f2)
    terms: dict = {}
    for k1, c1 in f1.terms.items():
        for k2, c2 in f2.terms.items():
            _accum(terms, (k1, k2), c1 * c2)
    return TensorElement(f1.ctx, terms)


def _ext_table(ctx: HallContext, tkey: tuple, wkey: tuple) -> dict:
    """(t, w) -> {big orbit -> number of block-triangular extensions of the
    representative pair landing in it}."""
    memo_key = (tkey, wkey)
    if memo_key in ctx._ext_tables:
        return ctx._ext_tables[memo_key]
    nkey = tuple(a + b for a, b in zip(tkey, wkey))
    tspace, ttable = ctx.space(tkey), ctx.table(tkey)
    wspace, wtable = ctx.space(wkey), ctx.table(wkey)
    big_space, big_table = ctx.space(nkey), ctx.table(nkey)
    out: dict = {}
    for t in range(ttable.count):
        xt = ttable.representative(t)
        for w in range(wtable.count):
            xw = wtable.representative(w)
            counter: dict = {}
            for y in extensions_over(tspace, wspace, xt, xw, big_space,
                                     ctx.max_points):
                big = big_table.ordinal_of(y)
                counter[big] = counter.get(big, 0) + 1
            out[(t, w)] = counter
    ctx._ext_tables[memo_key] = out
    return out


def res(f: HallElement, tau, omega) -> TensorElement:
    """Restriction to a split of the grade: coefficient at (t, w) is
    q^{-m*/2} times the sum of f over all extensions of the representatives."""
    ctx = f.ctx
    tk, wk = ctx.dims_key(tau), ctx.dims_key(omega)
    nk = tuple(a + b for a, b in zip(tk, wk))
    part = {o: c for (key, o), c in f.terms.items() if key == nk}
    if not part:
        if f.terms:
            raise ValueError("restriction dims do not sum to a grade of the element")
        return TensorElement(ctx, {})
    mult = SqrtQScalar.half_power(
        ctx.q, -m_star_omega(ctx.quiver, ctx.dims_dict(tk), ctx.dims_dict(wk)))
    table = _ext_table(ctx, tk, wk)
    terms: dict = {}
    for (t, w), counter in table.items():
        total = SqrtQScalar.zero(ctx.q)
        for big, count in counter.items():
            if big in part:
                total = total + part[big] * count
        if not total.is_zero():
            terms[((tk, t), (wk, w))] = total * mult
    return TensorElement(ctx, terms)


def coproduct(f: HallElement) -> TensorElement:
    """Sum of res over every splitting of every grade of f."""
    ctx = f.ctx
    out = TensorElement(ctx, {})
    for nk, part in f.homogeneous().items():
        for tk in itertools.product(*(range(n + 1) for n in nk)):
            wk = tuple(n - t for n, t in zip(nk, tk))
            out = out + res(part, tk, wk)
    return out


def tensor_mult(t1: TensorElement, t2: TensorElement) -> TensorElement:
    """Componentwise product with the crossing twist q^{(d2.e1)/2}, where d2
    is the grade of the first element's right factor, e1 of the second
    element's left factor, paired by the symmetric Cartan form."""
    _same_ctx(t1, t2)
    ctx = t1.ctx
    out = TensorElement(ctx, {})
    products: dict = {}

    def _char_circ(k1, o1, k2, o2):
        key = (k1, o1, k2, o2)
        if key not in products:
            products[key] = circ(char_function(ctx, k1, o1),
                                 char_function(ctx, k2, o2))
        return products[key]

    for ((ak, ao), (bk, bo)), c1 in t1.terms.items():
        for ((ck, co), (dk, do)), c2 in t2.terms.items():
            twist = SqrtQScalar.half_power(ctx.q, ctx.sym_pairing(bk, ck))
            left = _char_circ(ak, ao, ck, co)
            right = _char_circ(bk, bo, dk, do)
            coeff = c1 * c2 * twist
            terms: dict = {}
            for lk, lc in left.terms.items():
                for rk, rc in right.terms.items():
                    _accum(terms, (lk, rk), coeff * lc * rc)
            out = out + TensorElement(ctx, terms)
    return out


class HeartContext:
    """A contraction site on a quiver with identity automorphism: the
    contracted quiver's Hall context, the heart orbits (contraction edge
    invertible), and the orbit correspondence between the two sides."""

    def __init__(self, ctx: HallContext, plus: str, minus: str,
                 edge: str | None = None):
        self.ctx = ctx
        autom = identity_automorphism(ctx.quiver)
        pair = make_orbit_pair(ctx.quiver, autom, plus, minus, edge)
        problems = check_contraction_assumptions(ctx.quiver, autom, pair)
        if problems:
            raise ValueError("contraction assumptions fail: " + "; ".join(problems))
        self.pair = pair
        self.con = contract_quiver(ctx.quiver, autom, pair)
        self.plus_vertex = pair.plus_orbit[0]
        self.minus_vertex = pair.minus_orbit[0]
        self.orbit_size = len(pair.minus_orbit)
        self.hat = HallContext(self.con.quiver, ctx.q, cache=ctx.cache,
                               sweep_bound=ctx.sweep_bound,
                               max_points=ctx.max_points,
                               oracle_bound=ctx.oracle_bound)
        self._maps: dict = {}

    def is_balanced(self, big_key: tuple) -> bool:
        dims = self.ctx.dims_dict(big_key)
        return dims[self.plus_vertex] == dims[self.minus_vertex]

    def minus_dim(self, big_key: tuple) -> int:
        return self.ctx.dims_dict(big_key)[self.minus_vertex]

    def lift_key(self, hat_key: tuple) -> tuple:
        hat_dims = self.hat.dims_dict(hat_key)
        dims = dict(hat_dims)
        dims[self.minus_vertex] = hat_dims[self.plus_vertex]
        return self.ctx.dims_key(dims)

    def drop_key(self, big_key: tuple) -> tuple:
        if not self.is_balanced(big_key):
            raise ValueError("dimension vector is not balanced at the contraction")
        dims = self.ctx.dims_dict(big_key)
        return self.hat.dims_key({v: dims[v] for v in self.con.quiver.vertices})

    def orbit_maps(self, big_key: tuple) -> tuple[dict, dict]:
        """(heart orbit -> contracted orbit, inverse). Built from the orbit
        representatives; the bijectivity is checked, not assumed."""
        if big_key in self._maps:
            return self._maps[big_key]
        if not self.is_balanced(big_key):
            raise ValueError("dimension vector is not balanced at the contraction")
        space = self.ctx.space(big_key)
        table = self.ctx.table(big_key)
        hat_key = self.drop_key(big_key)
        hat_space = self.hat.space(hat_key)
        hat_table = self.hat.table(hat_key)
        to_hat: dict = {}
        for k in range(table.count):
            rep = table.representative(k)
            if is_heart(space, self.con, rep):
                to_hat[k] = hat_table.ordinal_of(
                    contract_point(space, self.con, rep, hat_space))
        values = sorted(to_hat.values())
        if values != list(range(hat_table.count)):
            raise AssertionError(
                f"heart orbits at {big_key} do not biject onto the contracted "
                f"orbits: got {values}, expected 0..{hat_table.count - 1}")
        from_hat = {v: k for k, v in to_hat.items()}
        self._maps[big_key] = (to_hat, from_hat)
        return self._maps[big_key]

    def heart_ordinals(self, big_key: tuple) -> set:
        return set(self.orbit_maps(big_key)[0])


def mu_star(hc: HeartContext, fhat: HallElement, twisted: bool = True) -> HallElement:
    """Pull back along the contraction map: the coefficient moves to the
    matching heart orbit, scaled by q^{-n^2 s/2} where n is the merged-vertex
    dimension and s the contracted orbit size (1 at this layer)."""
    if fhat.ctx is not hc.hat:
        raise ValueError("context mismatch")
    terms: dict = {}
    for (hk, o), c in fhat.terms.items():
        bk = hc.lift_key(hk)
        _, from_hat = hc.orbit_maps(bk)
        if twisted:
            n = hc.minus_dim(bk)
            c = c * SqrtQScalar.half_power(hc.ctx.q, -n * n * hc.orbit_size)
        _accum(terms, (bk, from_hat[o]), c)
    return HallElement(hc.ctx, terms)


def mu_lower_star(hc: HeartContext, f: HallElement) -> HallElement:
    """The inverse of mu_star on heart-supported elements: push one fiber
    point down and undo the twist (the fiber sum divided by #GL gives the
    same value, since the fiber is a single gauge orbit)."""
    if f.ctx is not hc.ctx:
        raise ValueError("context mismatch")
    terms: dict = {}
    for (bk, o), c in f.terms.items():
        to_hat, _ = hc.orbit_maps(bk)
        if o not in to_hat:
            raise ValueError("element is not supported on the heart")
        n = hc.minus_dim(bk)
        c = c * SqrtQScalar.half_power(hc.ctx.q, n * n * hc.orbit_size)
        _accum(terms, (hc.drop_key(bk), to_hat[o]), c)
    return HallElement(hc.hat, terms)


def j_shriek(hc: HeartContext, f: HallElement) -> HallElement:
    """Extension by zero off the heart. Heart elements are already stored as
    functions on the whole space supported on heart orbits, so this validates
    the support and returns the element unchanged."""
    if f.ctx is not hc.ctx:
        raise ValueError("context mismatch")
    for (bk, o), _ in f.terms.items():
        if o not in hc.heart_ordinals(bk):
            raise ValueError("element is not supported on the heart")
    return f


def j_star(hc: HeartContext, f: HallElement) -> HallElement:
    """Restriction to the heart: drop every non-heart term."""
    if f.ctx is not hc.ctx:
        raise ValueError("context mismatch")
    terms = {}
    for (bk, o), c in f.terms.items():
        if not hc.is_balanced(bk):
            raise ValueError("dimension vector is not balanced at the contraction")
        if o in hc.heart_ordinals(bk):
            terms[(bk, o)] = c
    return HallElement(hc.ctx, terms)


def psi(hc: HeartContext, fhat: HallElement) -> HallElement:
    """The embedding: twisted pullback followed by extension by zero."""
    return j_shriek(hc, mu_star(hc, fhat, twisted=True))


def complement_split(hc: HeartContext, f: HallElement) -> tuple[HallElement, HallElement]:
    """f = (heart part) + (complement part), split along the orbit partition."""
    heart = j_star(hc, f)
    return heart, f - heart


def _half_power_exponent(value: SqrtQScalar, q: int, span: int = 64):
    """n with value = q^{n/2}, if one exists in the scanned range."""
    for n in range(-span, span + 1):
        if value == SqrtQScalar.half_power(q, n):
            return n
    return None


def _check(name: str, check_id: str, passed: bool, witness=None) -> dict:
    entry = {"name": name, "check_id": check_id,
             "status": "pass" if passed else "fail"}
    if not passed and witness is not None:
        entry["witness"] = witness
    return entry


def _finish_report(command: str, config: dict, checks: list[dict]) -> dict:
    failures = sum(1 for c in checks if c["status"] == "fail")
    return {"command": command, "config": config, "checks": checks,
            "failures": failures,
            "status": "pass" if failures == 0 else "fail"}


def _key_pairs_upto(nvertices: int, max_dim: int):
    """All (tau, omega) key pairs with componentwise tau + omega <= max_dim."""
    rng = range(max_dim + 1)
    for tk in itertools.product(rng, repeat=nvertices):
        for wk in itertools.product(*(range(max_dim - t + 1) for t in tk)):
            yield tk, wk


def _keys_upto(nvertices: int, max_dim: int):
    return list(itertools.product(range(max_dim + 1), repeat=nvertices))


def verify_embedding(hc: HeartContext, max_dim: int = 2) -> dict:
    """Multiplicativity and injectivity of the transport into the big algebra,
    plus the twist bookkeeping identity, exhaustively over basis pairs."""
    ctx, hat = hc.ctx, hc.hat
    nhat = len(hat.quiver.vertices)
    checks = []
    phi1 = hc.orbit_size
    for tk, wk in _key_pairs_upto(nhat, max_dim):
        t_big = ctx.dims_dict(hc.lift_key(tk))
        w_big = ctx.dims_dict(hc.lift_key(wk))
        lhs_m = m_omega(hat.quiver, hat.dims_dict(tk), hat.dims_dict(wk))
        rhs_m = m_omega(ctx.quiver, t_big, w_big)
        predicted = -2 * t_big[hc.minus_vertex] * w_big[hc.minus_vertex] * phi1
        checks.append(_check(
            f"twist identity at {tk}+{wk}", "contraction-twist-exponent",
            lhs_m - rhs_m == predicted,
            witness={"m_contracted": lhs_m, "m_original": rhs_m,
                     "predicted_difference": predicted}))
        for o1 in range(hat.table(tk).count):
            f = char_function(hat, tk, o1)
            for o2 in range(hat.table(wk).count):
                g = char_function(hat, wk, o2)
                lhs = psi(hc, circ(f, g))
                rhs = circ(psi(hc, f), psi(hc, g))
                checks.append(_check(
                    f"psi multiplicative on P[{tk},o{o1}]*P[{wk},o{o2}]",
                    "embedding-multiplicative", lhs == rhs,
                    witness={"f": f.to_json(), "g": g.to_json(),
                             "psi_of_product": lhs.to_json(),
                             "product_of_psi": rhs.to_json()}))
    for nk in _keys_upto(nhat, max_dim):
        for o in range(hat.table(nk).count):
            f = char_function(hat, nk, o)
            back = mu_lower_star(hc, j_star(hc, psi(hc, f)))
            checks.append(_check(
                f"round trip on P[{nk},o{o}]", "embedding-injective-roundtrip",
                back == f,
                witness={"f": f.to_json(), "back": back.to_json()}))
    config = {"q": ctx.q, "quiver": ctx.quiver.content_hash(),
              "contracted_quiver": hat.quiver.content_hash(),
              "plus": hc.plus_vertex, "minus": hc.minus_vertex,
              "edge": hc.pair.edge, "max_dim": max_dim}
    return _finish_report("verify embedding", config, checks)


def verify_pbw(hc: HeartContext, max_dim: int = 2) -> dict:
    """Untwisted transport sends each contracted basis vector to the matching
    heart basis vector; the twisted transport differs by exactly q^{-n^2/2}."""
    ctx, hat = hc.ctx, hc.hat
    checks = []
    for nk in _keys_upto(len(hat.quiver.vertices), max_dim):
        bk = hc.lift_key(nk)
        _, from_hat = hc.orbit_maps(bk)
        n = hc.minus_dim(bk)
        twist = SqrtQScalar.half_power(ctx.q, -n * n * hc.orbit_size)
        for o in range(hat.table(nk).count):
            f = char_function(hat, nk, o)
            plain = j_shriek(hc, mu_star(hc, f, twisted=False))
            expected = char_function(ctx, bk, from_hat[o])
            checks.append(_check(
                f"untwisted transport of P[{nk},o{o}]", "pbw-transport-untwisted",
                plain == expected,
                witness={"transported": plain.to_json(),
                         "expected": expected.to_json()}))
            twisted = psi(hc, f)
            checks.append(_check(
                f"twisted transport of P[{nk},o{o}]", "pbw-transport-twisted",
                twisted == expected.scale(twist),
                witness={"transported": twisted.to_json()}))
    config = {"q": ctx.q, "quiver": ctx.quiver.content_hash(),
              "plus": hc.plus_vertex, "minus": hc.minus_vertex,
              "edge": hc.pair.edge, "max_dim": max_dim}
    return _finish_report("verify pbw", config, checks)


def verify_ideal(hc: HeartContext, max_dim: int = 2) -> dict:
    """Products of a non-heart basis vector with anything (either side) stay
    outside the heart, over all balanced grades in range."""
    ctx, hat = hc.ctx, hc.hat
    checks = []
    for tk_hat, wk_hat in _key_pairs_upto(len(hat.quiver.vertices), max_dim):
        tk, wk = hc.lift_key(tk_hat), hc.lift_key(wk_hat)
        t_heart = hc.heart_ordinals(tk)
        for o1 in range(ctx.table(tk).count):
            if o1 in t_heart:
                continue
            f = char_function(ctx, tk, o1)
            for o2 in range(ctx.table(wk).count):
                g = char_function(ctx, wk, o2)
                for tag, prod in (("left", circ(f, g)), ("right", circ(g, f))):
                    heart_part, _ = complement_split(hc, prod)
                    checks.append(_check(
                        f"{tag} product of non-heart P[{tk},o{o1}] "
                        f"with P[{wk},o{o2}] avoids the heart",
                        "complement-two-sided-ideal", heart_part.is_zero(),
                        witness={"product": prod.to_json(),
                                 "heart_component": heart_part.to_json()}))
    config = {"q": ctx.q, "quiver": ctx.quiver.content_hash(),
              "plus": hc.plus_vertex, "minus": hc.minus_vertex,
              "edge": hc.pair.edge, "max_dim": max_dim}
    return _finish_report("verify ideal", config, checks)


def verify_ses(hc: HeartContext, max_dim: int = 2) -> dict:
    """The split exact sequence: restriction after extension is the identity,
    the kernel of restriction is exactly the non-heart span, the projection
    to the contracted algebra is multiplicative, and heart products never
    leak into the complement (so the sequence splits)."""
    ctx, hat = hc.ctx, hc.hat
    checks = []
    nhat = len(hat.quiver.vertices)
    for nk_hat in _keys_upto(nhat, max_dim):
        bk = hc.lift_key(nk_hat)
        heart = hc.heart_ordinals(bk)
        for o in range(ctx.table(bk).count):
            f = char_function(ctx, bk, o)
            if o in heart:
                checks.append(_check(
                    f"j* after j_! fixes P[{bk},o{o}]", "restrict-after-extend",
                    j_star(hc, j_shriek(hc, f)) == f,
                    witness={"f": f.to_json()}))
                checks.append(_check(
                    f"j* keeps heart P[{bk},o{o}]", "restriction-kernel",
                    not j_star(hc, f).is_zero(), witness={"f": f.to_json()}))
            else:
                checks.append(_check(
                    f"j* kills non-heart P[{bk},o{o}]", "restriction-kernel",
                    j_star(hc, f).is_zero(),
                    witness={"f": f.to_json(),
                             "restriction": j_star(hc, f).to_json()}))

    def project(f):
        return mu_lower_star(hc, j_star(hc, f))

    for tk_hat, wk_hat in _key_pairs_upto(nhat, max_dim):
        tk, wk = hc.lift_key(tk_hat), hc.lift_key(wk_hat)
        t_heart, w_heart = hc.heart_ordinals(tk), hc.heart_ordinals(wk)
        for o1 in range(ctx.table(tk).count):
            f = char_function(ctx, tk, o1)
            for o2 in range(ctx.table(wk).count):
                g = char_function(ctx, wk, o2)
                prod = circ(f, g)
                lhs = project(prod)
                rhs = circ(project(f), project(g))
                checks.append(_check(
                    f"projection multiplicative on P[{tk},o{o1}]*P[{wk},o{o2}]",
                    "quotient-algebra-map", lhs == rhs,
                    witness={"projected_product": lhs.to_json(),
                             "product_of_projections": rhs.to_json()}))
                if o1 in t_heart and o2 in w_heart:
                    _, leak = complement_split(hc, prod)
                    checks.append(_check(
                        f"heart product P[{tk},o{o1}]*P[{wk},o{o2}] stays in "
                        f"the heart", "heart-subalgebra-split", leak.is_zero(),
                        witness={"product": prod.to_json(),
                                 "complement_component": leak.to_json()}))
    config = {"q": ctx.q, "quiver": ctx.quiver.content_hash(),
              "plus": hc.plus_vertex, "minus": hc.minus_vertex,
              "edge": hc.pair.edge, "max_dim": max_dim}
    return _finish_report("verify ses", config, checks)


def verify_bialgebra(ctx: HallContext, max_dim: int = 2) -> dict:
    """Coproduct is an algebra map for the twisted tensor product, and is
    coassociative, over all basis pairs in range."""
    checks = []
    nvert = len(ctx.quiver.vertices)
    for tk in _keys_upto(nvert, max_dim):
        for wk in _keys_upto(nvert, max_dim):
            for o1 in range(ctx.table(tk).count):
                f = char_function(ctx, tk, o1)
                for o2 in range(ctx.table(wk).count):
                    g = char_function(ctx, wk, o2)
                    lhs = coproduct(circ(f, g))
                    rhs = tensor_mult(coproduct(f), coproduct(g))
                    checks.append(_check(
                        f"coproduct multiplicative on P[{tk},o{o1}]*P[{wk},o{o2}]",
                        "coproduct-algebra-map", lhs == rhs,
                        witness={"coproduct_of_product": lhs.to_json(),
                                 "product_of_coproducts": rhs.to_json()}))
    for nk in _keys_upto(nvert, max_dim):
        for o in range(ctx.table(nk).count):
            f = char_function(ctx, nk, o)
            left, right = _coassociativity_sides(ctx, f)
            checks.append(_check(
                f"coassociativity on P[{nk},o{o}]", "coproduct-coassociative",
                left == right, witness={"f": f.to_json()}))
    config = {"q": ctx.q, "quiver": ctx.quiver.content_hash(),
              "max_dim": max_dim}
    return _finish_report("verify bialgebra", config, checks)


def _coassociativity_sides(ctx: HallContext, f: HallElement) -> tuple[dict, dict]:
    """Triple-tensor expansions of (coproduct x id) and (id x coproduct)
    applied to coproduct(f), as pruned coefficient dicts."""
    d = coproduct(f)
    left: dict = {}
    right: dict = {}
    for ((ak, ao), (bk, bo)), c in d.terms.items():
        for ((xk, xo), (yk, yo)), c2 in coproduct(
                char_function(ctx, ak, ao)).terms.items():
            _accum(left, ((xk, xo), (yk, yo), (bk, bo)), c * c2)
        for ((xk, xo), (yk, yo)), c2 in coproduct(
                char_function(ctx, bk, bo)).terms.items():
            _accum(right, ((ak, ao), (xk, xo), (yk, yo)), c * c2)
    return _prune(left), _prune(right)


def comult_compat(hc: HeartContext, max_dim: int = 1) -> dict:
    """Experiment, not an assertion: compare the big coproduct of psi(P)
    against psi applied in both tensor factors of the contracted coproduct.
    Records which components agree, the q^{1/2}-power ratio where both sides
    are nonzero, and the components only one side has."""
    ctx, hat = hc.ctx, hc.hat
    cases = []
    for nk in _keys_upto(len(hat.quiver.vertices), max_dim):
        for o in range(hat.table(nk).count):
            f = char_function(hat, nk, o)
            big_side = coproduct(psi(hc, f))
            hat_side = coproduct(f)
            transported: dict = {}
            for ((ak, ao), (bk, bo)), c in hat_side.terms.items():
                fa = psi(hc, char_function(hat, ak, ao))
                fb = psi(hc, char_function(hat, bk, bo))
                for ka, ca in fa.terms.items():
                    for kb, cb in fb.terms.items():
                        _accum(transported, (ka, kb), c * ca * cb)
            transported = _prune(transported)
            exponents = set()
            mismatches = []
            only_big = []
            only_hat = []
            for key in sorted(set(big_side.terms) | set(transported)):
                (ak, ao), (bk, bo) = key
                label = {"left": {"dim": ctx.dims_dict(ak), "orbit": f"o{ao}"},
                         "right": {"dim": ctx.dims_dict(bk), "orbit": f"o{bo}"}}
                in_big = key in big_side.terms
                in_hat = key in transported
                if in_big and in_hat:
                    ratio = big_side.terms[key] / transported[key]
                    n = _half_power_exponent(ratio, ctx.q)
                    if n is None:
                        mismatches.append({"component": label,
                                           "ratio": str(ratio)})
                    else:
                        exponents.add(n)
                elif in_big:
                    only_big.append({"component": label,
                                     "value": big_side.terms[key].to_json()})
                else:
                    only_hat.append({"component": label,
                                     "value": transported[key].to_json()})
            cases.append({
                "element": f.to_json(),
                "shared_component_exponents": sorted(exponents),
                "non_power_ratios": mismatches,
                "components_only_in_big_coproduct": only_big,
                "components_only_in_transported_coproduct": only_hat,
            })
    config = {"q": ctx.q, "quiver": ctx.quiver.content_hash(),
              "plus": hc.plus_vertex, "minus": hc.minus_vertex,
              "edge": hc.pair.edge, "max_dim": max_dim}
    return {"command": "verify comult-compat", "config": config,
            "status": "observed", "cases": cases}
