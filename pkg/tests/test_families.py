import pytest

from cmtorus.errors import InvalidDescriptor, SearchExhausted
from cmtorus.families import VARIANTS, FamilySpec, certify, generate_family, normalize_variant
from cmtorus.fields import decomposition_data, parse_field


def test_variant_names():
    assert normalize_variant("odd-main") == "odd_p_main"
    assert normalize_variant("Two-Adic-Ramified") == "two_adic_ramified"
    for v in VARIANTS:
        assert normalize_variant(v) == v
    with pytest.raises(InvalidDescriptor):
        normalize_variant("other")


@pytest.mark.parametrize(
    "args",
    [
        (4, 32, "odd_p_main"),
        (2, 32, "odd_p_main"),
        (3, 16, "odd_p_main"),
        (3, 32, "odd_p_unramified"),
        (3, 8, "two_adic_unramified"),
        (2, 12, "two_adic_ramified"),
    ],
)
def test_spec_validation(args):
    with pytest.raises(InvalidDescriptor):
        FamilySpec(*args)


def test_spec_count_positive():
    with pytest.raises(InvalidDescriptor):
        FamilySpec(3, 32, "odd_p_main", count=0)


def test_spec_parts():
    s = FamilySpec(3, 96, "odd_p_main")
    assert (s.two_exponent, s.odd_part) == (5, 3)


def test_odd_main_members(odd_main_p3):
    assert len({m.field.m for m in odd_main_p3}) == len(odd_main_p3) == 2
    conductors = [m.field.m for m in odd_main_p3]
    assert conductors == sorted(conductors)
    for m in odd_main_p3:
        assert m.field.degree == 32 and m.field.is_cm
        assert m.certificate.holds and certify(m.field, 3, m.ell0).holds


def test_odd_main_unramified_at_p(odd_main_p3):
    for m in odd_main_p3:
        _, I, _ = decomposition_data(m.field, 3)
        assert not I.contains(m.field.conjugation)


def test_odd_unramified_variant_ramified_at_p():
    (m,) = generate_family(FamilySpec(5, 32, "odd_p_unramified"))
    assert m.field.degree == 32 and m.certificate.holds
    _, I, _ = decomposition_data(m.field, 5)
    assert I.contains(m.field.conjugation)


def test_two_adic_ramified():
    (m,) = generate_family(FamilySpec(2, 8, "two_adic_ramified"))
    assert m.field.degree == 8 and m.certificate.holds


def test_larger_two_adic_degree():
    (m,) = generate_family(FamilySpec(2, 16, "two_adic_unramified"))
    assert m.field.degree == 16 and m.certificate.holds


def test_odd_degree_cofactor():
    (m,) = generate_family(FamilySpec(3, 96, "odd_p_main"))
    assert m.field.degree == 96 and certify(m.field, 3, m.ell0).holds


def test_line_round_trip(odd_main_p3):
    m = odd_main_p3[0]
    text, meta, cert = [x.strip() for x in m.line().split("|")]
    assert parse_field(text) == m.field
    assert f"ell0={m.ell0}" in meta and "variant=odd_p_main" in meta
    assert cert == m.certificate.text()


def test_search_exhausted_keeps_partial():
    with pytest.raises(SearchExhausted) as info:
        generate_family(FamilySpec(3, 32, "odd_p_main", count=5, search_bound=60))
    assert isinstance(info.value.partial, list)
    assert len(info.value.partial) < 5
