mod common;

use std::collections::BTreeMap;

use proptest::prelude::*;

use flatlin::symbolic::*;

use common::{config, expr, point, vars};

proptest! {
    #![proptest_config(config(500))]

    #[test]
    fn derivative_is_linear(a in expr(), b in expr(), c1 in -5i64..=5, c2 in -5i64..=5, i in 0usize..3) {
        let v = &vars()[i];
        let lhs = partial(&(Expr::int(c1) * a.clone() + Expr::int(c2) * b.clone()), v);
        let rhs = Expr::int(c1) * partial(&a, v) + Expr::int(c2) * partial(&b, v);
        prop_assert!(is_zero(&(lhs - rhs)));
    }

    #[test]
    fn product_rule(a in expr(), b in expr(), i in 0usize..3) {
        let v = &vars()[i];
        let lhs = partial(&(a.clone() * b.clone()), v);
        let rhs = partial(&a, v) * b.clone() + a * partial(&b, v);
        prop_assert!(is_zero(&(lhs - rhs)));
    }

    #[test]
    fn matches_finite_differences(e in expr(), p in point(), i in 0usize..3) {
        let v = vars()[i].clone();
        let d = evaluate(&partial(&e, &v), &p).unwrap();
        let x = p[&v];
        let h = 1e-5 * x.abs().max(1.0);
        let at = |t: f64| {
            let mut q = p.clone();
            q.insert(v.clone(), t);
            evaluate(&e, &q).unwrap()
        };
        let fd = (at(x + h) - at(x - h)) / (2.0 * h);
        let scale = 1.0f64.max(d.abs()).max(at(x).abs());
        prop_assert!((fd - d).abs() <= 1e-5 * scale, "d = {d}, fd = {fd}, e = {e}");
    }

    #[test]
    fn normalize_is_idempotent(e in expr()) {
        let once = normalize(&e);
        prop_assert_eq!(normalize(&once), once);
    }

    #[test]
    fn parse_print_round_trip(e in expr()) {
        let table: SymbolTable = vars().into_iter().collect();
        let n = normalize(&e);
        let text = n.to_string();
        let back = parse_expression(&text, &table).unwrap();
        prop_assert_eq!(back, n, "printed as {}", text);
    }

    #[test]
    fn normal_form_preserves_value(e in expr(), p in point()) {
        let a = evaluate(&e, &p).unwrap();
        let b = evaluate(&normalize(&e), &p).unwrap();
        prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
    }
}

proptest! {
    #![proptest_config(config(128))]

    #[test]
    fn substitution_composes_with_evaluation(e in expr(), s in expr(), p in point()) {
        let v = vars()[0].clone();
        // Bindings must be acyclic, so x1 is replaced by an expression in x2, x3.
        let shift: BTreeMap<VariableId, Expr> = [(v.clone(), Expr::var(&vars()[1]) + Expr::var(&vars()[2]))].into();
        let s = substitute(&s, &shift).unwrap();
        let bound: BTreeMap<VariableId, Expr> = [(v.clone(), s.clone())].into();
        let direct = evaluate(&substitute(&e, &bound).unwrap(), &p).unwrap();
        let mut q = p.clone();
        q.insert(v, evaluate(&s, &p).unwrap());
        let staged = evaluate(&e, &q).unwrap();
        prop_assert!((direct - staged).abs() <= 1e-8 * staged.abs().max(1.0));
    }

    #[test]
    fn self_reference_is_cyclic(e in expr()) {
        let v = vars()[0].clone();
        let bound: BTreeMap<VariableId, Expr> = [(v.clone(), Expr::var(&v) + Expr::one())].into();
        let r = substitute(&e, &bound);
        prop_assert!(matches!(r, Err(SymbolicError::CyclicSubstitution(_))));
    }

    #[test]
    fn sampling_is_deterministic(seed in any::<u64>(), idx in 0u64..1000) {
        let a = sample_point(&vars(), seed, idx);
        let b = sample_point(&vars(), seed, idx);
        prop_assert_eq!(&a, &b);
        for v in a.values() {
            prop_assert!((0.5..=2.0).contains(&v.abs()));
        }
    }
}
