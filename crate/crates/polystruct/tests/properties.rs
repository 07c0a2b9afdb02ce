//! Property tests for the exact arithmetic layer and the bracket axioms.

use proptest::prelude::*;

use polystruct::double::{courant_t, dorfman, heisenberg, pairing, GenVector};
use polystruct::scalars::{partial_fractions, Poly, Scalar};

fn scalar_strategy() -> impl Strategy<Value = Scalar> {
    (-12i64..=12, 1i64..=9, -12i64..=12, 1i64..=9).prop_map(|(rn, rd, im_n, im_d)| {
        Scalar::new(
            num_rational::BigRational::new(rn.into(), rd.into()),
            num_rational::BigRational::new(im_n.into(), im_d.into()),
        )
    })
}

fn poly_strategy(max_deg: usize) -> impl Strategy<Value = Poly> {
    prop::collection::vec(scalar_strategy(), 1..=max_deg + 1).prop_map(Poly::new)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn scalar_field_axioms(a in scalar_strategy(), b in scalar_strategy(), c in scalar_strategy()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
        if !a.is_zero() {
            prop_assert_eq!(&a / &a, Scalar::one());
            prop_assert_eq!(&a * &a.inv().unwrap(), Scalar::one());
        }
    }

    #[test]
    fn scalar_print_parse_round_trip(a in scalar_strategy()) {
        prop_assert_eq!(Scalar::parse(&a.to_string()).unwrap(), a);
    }

    #[test]
    fn poly_divrem_reconstructs(a in poly_strategy(6), b in poly_strategy(3)) {
        prop_assume!(!b.is_zero());
        let (q, r) = a.divrem(&b).unwrap();
        prop_assert_eq!(&(&q * &b) + &r, a);
        prop_assert!(r.degree().map_or(true, |d| d < b.degree().unwrap()));
    }

    #[test]
    fn partial_fraction_recombination(mults in prop::collection::vec(1usize..=2, 1..=3)) {
        // distinct small roots closed nowhere in particular; recombination
        // of a_{lambda,i} Q_{lambda,i} must give the constant one exactly
        let pool = [Scalar::zero(), Scalar::one(), Scalar::from_int(-2), Scalar::i()];
        let roots: Vec<(Scalar, usize)> = mults
            .iter()
            .enumerate()
            .map(|(k, m)| (pool[k].clone(), *m))
            .collect();
        let p = Poly::from_roots(&roots);
        let pf = partial_fractions(&p, &roots).unwrap();
        let mut total = Poly::zero();
        for (lambda, coeffs) in &pf {
            for (idx, a) in coeffs.iter().enumerate() {
                let (q, rem) = p.divrem(&Poly::linear(lambda).pow(idx + 1)).unwrap();
                prop_assert!(rem.is_zero());
                total = &total + &q.scale(a);
            }
        }
        prop_assert_eq!(total, Poly::one());
    }

    #[test]
    fn bracket_bilinearity_and_antisymmetry(
        xs in prop::collection::vec(-3i64..=3, 6),
        ys in prop::collection::vec(-3i64..=3, 6),
    ) {
        let h = heisenberg();
        let coords = |v: &[i64]| {
            GenVector::from_coords(&v.iter().map(|k| Scalar::from_int(*k)).collect::<Vec<_>>())
        };
        let x = coords(&xs);
        let y = coords(&ys);
        prop_assert!(dorfman(&h, &x, &y).add(&dorfman(&h, &y, &x)).is_zero());
        // invariance of the pairing under the bracket, on random sections
        let z = GenVector::basis_vec(3, 2).add(&GenVector::basis_cov(3, 0));
        let lhs = courant_t(&h, &x, &y, &z) + pairing(&y, &dorfman(&h, &x, &z));
        prop_assert!(lhs.is_zero());
    }
}
