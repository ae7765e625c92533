"""Questions (A) and (A-circ) for an abelian CM field L at a prime p.

(A) asks whether T(Q) K_p = T(Q_p) for T = T_{L/L+}, with K_p the maximal
compact subgroup; (A-circ) asks the same with the Kottwitz kernel K_p°.
"""

from __future__ import annotations

from dataclasses import dataclass, field as dc_field

from sympy import isprime

from .errors import PreconditionUnmet
from .fields import (
    CyclotomicFieldDescriptor,
    _require_cm,
    decomposition_data,
    fixed_field,
    is_global_norm,
    is_local_norm,
    ramified_primes,
    s_set,
    two_part_subfield,
)
from .groups import Subgroup
from .local import LocalExtensionDescriptor, decide_R_circ, decide_R_oracle
from .verdict import Question, QuestionVerdict, affirmative, negative, out_of_scope


def completion_descriptor(field: CyclotomicFieldDescriptor, p: int) -> LocalExtensionDescriptor:
    """The local data of L (x) Q_p over L+ (x) Q_p.

    L (x) Q_p is a product of [Gal:D_p] copies of one field F with group
    D_p.  If complex conjugation lies in D_p each factor is quadratic over
    its real part; otherwise the places of L+ split and the algebra is
    F+ x F+ with [Gal:D_p]/2 factors.
    """
    _require_cm(field)
    D, I, frob = decomposition_data(field, p)
    pres = D.structure
    G = pres.group
    c = field.conjugation
    index = D.index
    if D.contains(c):
        h_plus = G.subgroup([pres.from_ambient(c)])
        r = index
    else:
        h_plus = None
        r = index // 2
    inertia = pres.subgroup_from_ambient(I)
    sigma = pres.from_ambient(frob)
    return LocalExtensionDescriptor(G, h_plus, inertia, sigma, r, p)


def _plus_ramification_index(field: CyclotomicFieldDescriptor, p: int) -> int:
    _, I, _ = decomposition_data(field, p)
    return I.order // I.intersect(field.conj_subgroup()).order


def sufficient_conditions(field: CyclotomicFieldDescriptor, p: int) -> list[str]:
    """Names of the sufficient conditions for affirmative (A) and (A-circ)
    that hold for (L, p)."""
    _require_cm(field)
    D, _, _ = decomposition_data(field, p)
    d = field.degree
    out = []
    if not D.contains(field.conjugation):
        out.append("split-at-p")
    if _plus_ramification_index(field, p) % 2:
        out.append("odd-ramification-index")
    if p > 2 and d % 32:
        out.append("degree-not-in-32Z")
    if p == 2 and d % 8:
        out.append("degree-not-in-8Z")
    return out


def has_ramified_quadratic_subfield(field: CyclotomicFieldDescriptor, p: int) -> bool:
    """Some quadratic subfield ramifies at p, i.e. I_p is not inside 2 Gal."""
    _, I, _ = decomposition_data(field, p)
    return not I.is_subgroup_of(field.gal.whole().multiple(2))


# ---------------------------------------------------------------------------
# the negativity criterion


@dataclass
class NormCriterionReport:
    """Outcome of the four-part norm criterion for one auxiliary prime ell0."""

    field: CyclotomicFieldDescriptor
    p: int
    ell0: int
    conditions: dict = dc_field(default_factory=dict)
    details: dict = dc_field(default_factory=dict)

    @property
    def holds(self) -> bool:
        return len(self.conditions) == 4 and all(self.conditions.values())

    def __bool__(self) -> bool:
        return self.holds

    def text(self) -> str:
        parts = [f"ell0={self.ell0}"]
        for k in ("i", "ii", "iii", "iv"):
            if k in self.conditions:
                parts.append(f"{k}={'ok' if self.conditions[k] else 'fail'}")
        for k, v in self.details.items():
            parts.append(f"{k}={v}")
        return " ".join(parts)


def _complements(G, I: Subgroup, max_exponent: int):
    """Subgroups H with H + I = G, H & I = 0 and exponent dividing max_exponent."""
    from .local import _subgroups

    target = G.order // I.order
    for H in _subgroups(G):
        if H.order != target or max_exponent % H.exponent:
            continue
        if H.intersect(I).is_trivial():
            yield H


def check_ngax(field: CyclotomicFieldDescriptor, p: int, ell0: int) -> NormCriterionReport:
    """Check the norm criterion that forces (A) and (A-circ) to be negative.

    (i)   Gal = Z/2^m x H with m >= 2, exp(H) | 2^(m-1), complex conjugation
          equal to (2^(m-1), 0) and D = I at ell0 equal to Z/2^m x 0;
    (ii)  the fixed field of <2> x H is Q(sqrt(ell0));
    (iii) every ramified ell other than p and ell0 is a global norm from L;
    (iv)  p is a local norm at p and not a local norm at ell0.
    """
    _require_cm(field)
    if not isprime(ell0) or ell0 % 4 != 1:
        raise PreconditionUnmet(f"ell0={ell0} must be a prime congruent to 1 mod 4")
    rep = NormCriterionReport(field, p, ell0)
    G = field.gal
    D, I, _ = decomposition_data(field, ell0)
    c = field.conjugation
    m = (I.order.bit_length() - 1) if I.order & (I.order - 1) == 0 else None
    ok_i = (
        G.is_p_group(2)
        and D == I
        and I.is_cyclic()
        and m is not None
        and m >= 2
        and I.contains(c)
        and G.exponent == 2**m
    )
    complement = None
    if ok_i:
        complement = next(iter(_complements(G, I, 2 ** (m - 1))), None)
        ok_i = complement is not None
    rep.conditions["i"] = ok_i
    if not ok_i:
        rep.details["reason"] = "no Z/2^m x H decomposition matching ell0"
        return rep
    rep.details["m"] = m
    # (ii) may depend on the choice of complement, so try all of them
    ok_ii = False
    for H in _complements(G, I, 2 ** (m - 1)):
        K = I.multiple(2).join(H)
        sub = fixed_field(field, K)
        if sub.m == ell0 and sub.degree == 2:
            ok_ii = True
            complement = H
            break
    rep.conditions["ii"] = ok_ii
    rep.details["H"] = ";".join(",".join(map(str, g)) for g in complement.canonical_generators()) or "trivial"
    others = sorted(ramified_primes(field) - {p, ell0})
    bad = [ell for ell in others if not is_global_norm(field, ell)]
    rep.conditions["iii"] = not bad
    if bad:
        rep.details["non_norms"] = ",".join(map(str, bad))
    local_p = is_local_norm(field, p, p)
    local_ell0 = is_local_norm(field, ell0, p)
    rep.conditions["iv"] = local_p and not local_ell0
    rep.details["p_norm_at_p"] = local_p
    rep.details["p_norm_at_ell0"] = local_ell0
    return rep


def find_norm_certificate(field: CyclotomicFieldDescriptor, p: int) -> NormCriterionReport | None:
    """The first ell0 in S(L/L+) with ell0 = 1 mod 4 passing the criterion."""
    for ell0 in sorted(s_set(field)):
        if ell0 % 4 != 1:
            continue
        rep = check_ngax(field, p, ell0)
        if rep.holds:
            return rep
    return None


# ---------------------------------------------------------------------------
# deciders


def _reduce(field: CyclotomicFieldDescriptor) -> CyclotomicFieldDescriptor:
    """The 2-power degree subfield; (A) is insensitive to odd degree steps."""
    return field if field.degree & (field.degree - 1) == 0 else two_part_subfield(field)


def decide_A(field: CyclotomicFieldDescriptor, p: int) -> QuestionVerdict:
    return _decide(field, p, Question.A)


def decide_A_circ(field: CyclotomicFieldDescriptor, p: int) -> QuestionVerdict:
    return _decide(field, p, Question.ACIRC)


def _decide(field: CyclotomicFieldDescriptor, p: int, q: Question) -> QuestionVerdict:
    _require_cm(field)
    if not isprime(p):
        raise ValueError(f"{p} is not prime")
    ramified = decomposition_data(field, p)[1].contains(field.conjugation)
    trace = "ramified-at-p" if ramified else "unramified-at-p"
    conds = sufficient_conditions(field, p)
    if conds:
        return affirmative(q, trace, conds[0], witness={"conditions": conds})

    diag: dict = {}
    desc = completion_descriptor(field, p)
    diag["completion"] = desc.describe()
    L1 = _reduce(field)
    if q is Question.A:
        if L1 != field:
            v = decide_R_oracle(completion_descriptor(L1, p))
            diag["R_two_part"] = str(v.status)
            if v.affirmative:
                return affirmative(q, trace, "odd-degree-reduction", "local-R-affirmative", witness=v.witness)
        v = decide_R_oracle(desc)
        diag["R"] = str(v.status)
        if v.affirmative:
            return affirmative(q, trace, "local-R-affirmative", witness=v.witness)
        if p > 2 and has_ramified_quadratic_subfield(field, p):
            return affirmative(q, trace, "ramified-quadratic-subfield")
    v = decide_R_circ(desc)
    diag["Rcirc"] = str(v.status)
    if v.affirmative:
        return affirmative(q, trace, "local-Rcirc-affirmative")

    cert = find_norm_certificate(L1, p)
    if cert is not None:
        reason = [trace, "norm-obstruction"]
        if L1 != field:
            reason.insert(1, "odd-degree-reduction")
        return negative(q, *reason, witness={"ell0": cert.ell0, "certificate": cert.text()}, certificate=cert)
    diag["s_set"] = sorted(s_set(L1))
    return out_of_scope(q, trace, "no-certificate", witness=None, **diag)
