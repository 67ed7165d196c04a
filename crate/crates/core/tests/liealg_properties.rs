use fracsym::liealg::{canonical_basis, commutator, decompose, Poly, PolyVectorField};
use num_bigint::BigInt;
use num_rational::BigRational;
use proptest::prelude::*;

fn q(n: i64, d: i64) -> BigRational {
    BigRational::new(BigInt::from(n), BigInt::from(d))
}

fn rat() -> impl Strategy<Value = BigRational> {
    (-9i64..=9, 1i64..=6).prop_map(|(n, d)| q(n, d))
}

fn alpha() -> impl Strategy<Value = BigRational> {
    (1i64..=12, 1i64..=4).prop_map(|(n, d)| q(n, d))
}

fn poly() -> impl Strategy<Value = Poly> {
    let term = (rat(), 0u32..=1, 0u32..=1, 0u32..=1, 0u32..=1);
    proptest::collection::vec(term, 0..3).prop_map(|ts| {
        ts.into_iter().fold(Poly::zero(), |p, (c, a, b, u, v)| {
            p.add(&Poly::monomial(c, [a, b, u, v]))
        })
    })
}

/// Random polynomial field with multilinear components.
fn field() -> impl Strategy<Value = PolyVectorField> {
    [poly(), poly(), poly(), poly()].prop_map(PolyVectorField::new)
}

fn span_element() -> impl Strategy<Value = (BigRational, Vec<BigRational>)> {
    (alpha(), proptest::collection::vec(rat(), 4))
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn jacobi_identity(a in field(), b in field(), c in field()) {
        let s = commutator(&a, &commutator(&b, &c))
            .add(&commutator(&b, &commutator(&c, &a)))
            .add(&commutator(&c, &commutator(&a, &b)));
        prop_assert!(s.is_zero());
    }

    #[test]
    fn antisymmetry(a in field(), b in field()) {
        prop_assert_eq!(commutator(&a, &b), commutator(&b, &a).scale(&q(-1, 1)));
    }

    #[test]
    fn bilinearity(a in field(), b in field(), c in field(), x in rat(), y in rat()) {
        let lhs = commutator(&a.scale(&x).add(&b.scale(&y)), &c);
        let rhs = commutator(&a, &c).scale(&x).add(&commutator(&b, &c).scale(&y));
        prop_assert_eq!(lhs, rhs);
    }

    #[test]
    fn basis_span_is_closed((al, x) in span_element(), y in proptest::collection::vec(rat(), 4)) {
        let v = canonical_basis(&al);
        let a = PolyVectorField::combination(&x, &v);
        let b = PolyVectorField::combination(&y, &v);
        let c = decompose(&commutator(&a, &b), &v);
        prop_assert!(c.is_some());
        // only V₂ can appear: [Σxᵢ Vᵢ, Σyⱼ Vⱼ] = (x₁y₂ − x₂y₁) V₂
        let c = c.unwrap();
        let k = &x[0] * &y[1] - &x[1] * &y[0];
        prop_assert_eq!(c, vec![q(0, 1), k, q(0, 1), q(0, 1)]);
    }
}
