import math
import random
from fractions import Fraction

import pytest
from sympy import kronecker_symbol, n_order, primerange

from cmtorus.arith import hilbert_symbol, is_sum_of_two_squares
from cmtorus.errors import NotQuadratic, NotUnits
from cmtorus.fields import (
    artin_local,
    compositum,
    cyclic_subfield,
    decomposition_data,
    decomposition_group,
    fields_with_conductor,
    fixed_field,
    frobenius,
    inertia_group,
    is_global_norm,
    is_local_norm,
    make_field,
    other_cyclic_quartic,
    parse_field,
    quadratic_field,
    ramified_primes,
    real_subfield,
    s_set,
    subfields_of_degree,
    two_part_subfield,
    unit_group,
    units_all_local_norms,
    units_congruent_one,
)

PRIMES = list(primerange(2, 200))


def test_unit_group_log_exp_round_trip():
    for m in (1, 2, 8, 12, 16, 45, 60, 97, 240):
        U = unit_group(m)
        units = [a for a in range(m) if math.gcd(a, m) == 1] if m > 1 else []
        assert U.order == max(len(units), 1)
        for a in units:
            assert U.exp(U.log(a)) == a % m


def test_units_congruent_one():
    assert sorted(units_congruent_one(20, 4)) and all(x % 4 == 1 for x in units_congruent_one(20, 4))


def test_make_field_gaussian():
    L = make_field(4, [])
    assert L.degree == 2 and L.is_cm and L.m == 4


def test_make_field_real_quadratic():
    L = make_field(5, [4])
    assert L.degree == 2 and not L.is_cm


def test_make_field_normalizes_conductor():
    L = make_field(12, [5])
    assert L.m == 4 and L.degree == 2 and L.warnings


def test_make_field_rejects_non_units():
    with pytest.raises(NotUnits):
        make_field(6, [3])


def test_cyclic_subfield_of_prime_conductor():
    L = cyclic_subfield(17, 16)
    assert L.m == 17 and L.degree == 16 and L.gal.is_cyclic() and L.is_cm
    # -1 is an 8th power mod 17
    assert not cyclic_subfield(17, 8).is_cm
    assert cyclic_subfield(13, 4).is_cm


def test_parse_round_trip():
    for L in (make_field(4), cyclic_subfield(13, 4), make_field(20, [9]), quadratic_field(-15)):
        assert parse_field(L.text()) == L
    assert parse_field("m=4;H=") == make_field(4)
    with pytest.raises(ValueError):
        parse_field("garbage")


def test_decomposition_gaussian():
    L = make_field(4)
    assert decomposition_group(L, 5).is_trivial()
    D, I, _ = decomposition_data(L, 2)
    assert D.is_whole() and I.is_whole()
    assert ramified_primes(L) == {2}


def test_decomposition_zeta5_at_two():
    L = make_field(5)
    assert decomposition_group(L, 2).order == 4
    assert inertia_group(L, 2).is_trivial()


def test_quadratic_field_splitting_matches_kronecker():
    for D in (-1, 2, -2, 3, -3, 5, -5, 6, -7, 10, -11, 13, -15, 21, -30, 33):
        L = quadratic_field(D)
        disc = D if D % 4 == 1 else 4 * D
        assert L.m == abs(disc) and L.degree == 2
        assert L.is_cm == (D < 0)
        for ell in PRIMES:
            k = kronecker_symbol(disc, ell)
            _, I, _ = decomposition_data(L, ell)
            if k == 0:
                assert not I.is_trivial()
            else:
                assert I.is_trivial()
                assert (not any(frobenius(L, ell))) == (k == 1)


def test_quadratic_field_rejects_non_squarefree():
    with pytest.raises(ValueError):
        quadratic_field(12)


@pytest.mark.parametrize("q,d", [(13, 4), (17, 8), (41, 8), (97, 16), (31, 3)])
def test_cyclic_subfield_splitting_matches_power_residues(q, d):
    L = cyclic_subfield(q, d)
    for ell in PRIMES:
        if ell == q:
            continue
        residue_order = decomposition_group(L, ell).order
        # the residue degree is the order of ell in (Z/q)^x / d-th powers
        assert residue_order == n_order(pow(ell, (q - 1) // d, q), q)


def random_fields(rng, count):
    out = []
    while len(out) < count:
        m = rng.choice([4, 5, 7, 8, 12, 13, 15, 16, 20, 21, 24, 28, 29, 35, 39, 40, 52, 60, 65])
        gens = [rng.randrange(1, m) for _ in range(rng.randint(0, 2))]
        gens = [g for g in gens if math.gcd(g, m) == 1]
        out.append(make_field(m, gens))
    return out


def test_frobenius_consistency_random():
    rng = random.Random(7)
    fields = random_fields(rng, 100)
    checked = 0
    for L in fields:
        for ell in rng.sample(PRIMES, 10):
            if L.m % ell == 0:
                continue
            assert artin_local(L, ell, ell) == frobenius(L, ell) == L.element(ell)
            assert decomposition_group(L, ell).order == L.gal.element_order(frobenius(L, ell))
            checked += 1
    assert checked >= 900


def test_artin_local_examples():
    L = make_field(4)
    assert any(artin_local(L, 2, -1))
    assert not any(artin_local(L, 2, 1))
    assert not any(artin_local(L, 7, 1))


def test_gaussian_global_norms_vs_two_squares():
    L = make_field(4)
    for x in range(-500, 501):
        if x == 0:
            continue
        assert is_global_norm(L, x) == is_sum_of_two_squares(x), x


@pytest.mark.parametrize("D", [-1, -2, -3, -5, -6, -7, -15, -30])
def test_local_norms_vs_hilbert_symbol(D):
    L = quadratic_field(D)
    for ell in (2, 3, 5, 7, 11, 13):
        for x in (-6, -3, -2, -1, 2, 3, 5, 7, 10, 13, Fraction(3, 5), Fraction(-7, 2)):
            assert is_local_norm(L, ell, x) == (hilbert_symbol(D, x, ell) == 1), (D, ell, x)


def test_squares_are_norms():
    for L in (make_field(4), cyclic_subfield(13, 4), make_field(20, [9])):
        for y in (2, 3, Fraction(5, 7), 12):
            assert is_global_norm(L, y * y)
            assert all(is_local_norm(L, ell, y * y) for ell in (2, 3, 5, 7, 13))


def test_gaussian_norm_examples():
    L = make_field(4)
    assert is_global_norm(L, 2)
    assert not is_global_norm(L, 3)


def test_norm_coherence():
    rng = random.Random(11)
    for L in [f for f in random_fields(rng, 40) if f.is_cm]:
        for x in (2, 3, 5, 6, 7, 13, 17, 29, 65):
            if is_global_norm(L, x):
                assert all(is_local_norm(L, ell, x) for ell in PRIMES[:20])


def test_norm_needs_cm():
    with pytest.raises(NotQuadratic):
        is_local_norm(make_field(5, [4]), 5, 2)


def test_s_set_examples():
    assert s_set(make_field(4)) == {2}
    assert s_set(make_field(5)) == {5}
    assert s_set(compositum(make_field(4), quadratic_field(5))) == set()


def test_s_set_matches_unit_norm_failures():
    rng = random.Random(3)
    fields = [f for f in random_fields(rng, 80) if f.is_cm]
    fields += [cyclic_subfield(13, 4), make_field(8), quadratic_field(-15)]
    for L in fields:
        failures = {ell for ell in ramified_primes(L) if not units_all_local_norms(L, ell)}
        assert s_set(L) == failures, L.text()


def test_compositum_and_subfields():
    K = compositum(make_field(4), quadratic_field(5))
    assert K.m == 20 and K.degree == 4 and K.is_cm
    assert compositum(make_field(4), make_field(4)) == make_field(4)
    assert quadratic_field(-1) == make_field(4)
    subs = subfields_of_degree(make_field(20), 2)
    assert {s.m for s in subs} == {4, 5, 20}
    assert fields_with_conductor(20, 4, cm=True) == [K]


def test_real_and_two_part_subfields():
    L = compositum(cyclic_subfield(13, 4), cyclic_subfield(7, 3))
    assert L.degree == 12
    L2 = two_part_subfield(L)
    assert L2 == cyclic_subfield(13, 4)
    R = real_subfield(L)
    assert R.degree == 6 and not R.is_cm


def test_other_cyclic_quartic():
    L0 = cyclic_subfield(13, 4)
    big = compositum(L0, quadratic_field(-3))
    other = other_cyclic_quartic(big, L0)
    assert other.degree == 4 and other.gal.is_cyclic() and other != L0
    assert compositum(big, other) == big
    with pytest.raises(ValueError):
        other_cyclic_quartic(L0, L0)


def test_fixed_field_of_trivial_and_whole():
    L = make_field(20, [9])
    assert fixed_field(L, L.gal.trivial()) == L
    assert fixed_field(L, L.gal.whole()).degree == 1
