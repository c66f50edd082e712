mod common;

use common::*;
use num_traits::{Signed, Zero};
use parasusy_core::verifier::{
    check_relation, check_relation_on, safe_window, variant_relations, Bindings,
};
use parasusy_core::{
    build, build_fock, closed_form_energy, parse_expression, reduction_unitary, sector_operators,
    Coefficients, StructureSpec, VariantConfig, VariantKind, VerifyError,
};
use proptest::prelude::*;

fn kind() -> impl Strategy<Value = VariantKind> {
    prop_oneof![
        Just(VariantKind::Rsk),
        Just(VariantKind::Bd),
        Just(VariantKind::Ossqm)
    ]
}

fn coefficients(kind: VariantKind, p: usize, rng: &mut rand_chacha::ChaCha8Rng) -> Coefficients {
    let e = |s: &str| parse_expression(s).unwrap();
    match kind {
        VariantKind::Rsk => Coefficients::Rsk {
            f: (0..p).map(|_| e(pick(rng, POLY).0)).collect(),
        },
        VariantKind::Bd => Coefficients::Bd {
            g: e(pick(rng, INCREASING).0),
            signs: vec![],
        },
        VariantKind::Ossqm => Coefficients::Ossqm {
            f_p: e(pick(rng, INCREASING).0),
            signs: vec![],
        },
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn display_round_trips(g in gen_expr()) {
        let e = parse_expression(&g.render()).unwrap();
        prop_assert_eq!(parse_expression(&e.to_string()).unwrap(), e);
    }

    #[test]
    fn evaluation_is_additive_and_multiplicative(a in gen_expr(), b in gen_expr(), n in -4i64..=4) {
        let (ta, tb) = (a.render(), b.render());
        let sum = parse_expression(&format!("{ta} + {tb}")).unwrap();
        let prod = parse_expression(&format!("({ta}) * ({tb})")).unwrap();
        if let (Some(x), Some(y)) = (a.value(n), b.value(n)) {
            prop_assert_eq!(sum.eval(n).unwrap(), &x + &y);
            prop_assert_eq!(prod.eval(n).unwrap(), x * y);
        }
    }

    #[test]
    fn random_alpha_is_admissible(seed: u64, lambda in 2usize..=6) {
        let alpha = random_alpha(&mut rng(seed), lambda);
        prop_assert!(alpha.iter().sum::<Q>().is_zero());
        let spec = StructureSpec::clambda(lambda, alpha.clone()).unwrap();
        prop_assert!(spec.check_fock_conditions(100).is_ok());
        for n in -5i64..40 {
            let f = spec.value(n).unwrap();
            prop_assert_eq!(&f, &oracle_f(&alpha, n));
            // F(n + λ) = F(n) + λ.
            prop_assert_eq!(spec.value(n + lambda as i64).unwrap(), f + Q::from_integer((lambda as i64).into()));
        }
    }

    #[test]
    fn grade_shifts_under_ladder(seed: u64, lambda in 2usize..=5) {
        let alpha = random_alpha(&mut rng(seed), lambda);
        let rep = build_fock(&StructureSpec::clambda(lambda, alpha).unwrap(), 24, lambda).unwrap();
        for n in 0..23 {
            prop_assert_eq!(rep.grade(n + 1), (rep.grade(n) + 1) % lambda);
            prop_assert!(rep.raise()[(n + 1, n)] > 0.0);
        }
    }

    #[test]
    fn window_is_dimension_minus_weight(k in kind(), p in 2usize..=4, dim in 1usize..40) {
        for rel in variant_relations(k, p) {
            let w = rel.weight();
            match safe_window(&rel, dim) {
                Ok(range) => prop_assert_eq!(range, 0..dim - w),
                Err(e) => {
                    prop_assert!(dim <= w);
                    prop_assert_eq!(e, VerifyError::WindowEmpty { dim, weight: w });
                }
            }
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 24, ..ProptestConfig::default() })]

    #[test]
    fn sectors_match_closed_forms(seed: u64, k in kind(), p in 2usize..=4) {
        let mut rng = rng(seed);
        let alpha = random_alpha(&mut rng, p + 1);
        let coeffs = coefficients(k, p, &mut rng);
        let cfg = VariantConfig::new(p, StructureSpec::clambda(p + 1, alpha).unwrap(), coeffs, 20).unwrap();
        let r = build(&cfg).unwrap();
        for mu in 0..=p {
            let s = sector_operators(&r, mu).unwrap();
            for (n, e) in s.energies.iter().enumerate() {
                prop_assert_eq!(&closed_form_energy(&r, mu, n).unwrap(), e);
                if k != VariantKind::Rsk {
                    prop_assert!(!e.is_negative());
                }
            }
        }
    }

    #[test]
    fn reduction_unitary_is_a_permutation(seed: u64, k in kind(), p in 2usize..=4) {
        let alpha = random_alpha(&mut rng(seed), p + 1);
        let rep = build_fock(&StructureSpec::clambda(p + 1, alpha).unwrap(), 12, p + 1).unwrap();
        let u = reduction_unitary(k.reduction(), p, &rep).to_dense();
        for row in u.row_iter() {
            prop_assert_eq!(row.iter().filter(|&&x| x == 1.0).count(), 1);
            prop_assert_eq!(row.iter().filter(|&&x| x != 0.0).count(), 1);
        }
        prop_assert_eq!(&u * u.transpose(), parasusy_core::Matrix::identity(u.nrows(), u.nrows()));
    }

    #[test]
    fn enlarging_dimension_never_raises_residuals(seed: u64, k in kind(), p in 2usize..=3, extra in 1usize..6) {
        let mut rng = rng(seed);
        let alpha = random_alpha(&mut rng, p + 1);
        let coeffs = coefficients(k, p, &mut rng);
        let at = |dim: usize| {
            let spec = StructureSpec::clambda(p + 1, alpha.clone()).unwrap();
            build(&VariantConfig::new(p, spec, coeffs.clone(), dim).unwrap()).unwrap()
        };
        let (small, large) = (at(16), at(16 + extra));
        let (ops_small, ops_large) = (Bindings::for_realization(&small).unwrap(), Bindings::for_realization(&large).unwrap());
        for rel in variant_relations(k, p) {
            let base = check_relation(&rel, &ops_small, 1e-9).unwrap();
            let grown = check_relation_on(&rel, &ops_large, base.window.clone(), 1e-9).unwrap();
            prop_assert!(grown.residual <= base.residual, "{}: {} > {}", rel.name, grown.residual, base.residual);
        }
    }
}
