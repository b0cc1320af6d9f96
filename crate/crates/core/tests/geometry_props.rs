use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use flatlin::geometry::{jacobian_rank, numeric_rank, span_inclusion, span_included, SamplePlan};
use flatlin::symbolic::{Expr, Func, VariableId};

fn vars() -> Vec<VariableId> {
    (1..=4).map(|i| VariableId::state(i, &format!("x{i}"))).collect()
}

fn config() -> Config {
    Config { cases: 96, rng_seed: RngSeed::Fixed(0xF1A7), failure_persistence: None, ..Config::default() }
}

/// Sums of monomials and a few transcendental terms in four variables.
fn expr() -> impl Strategy<Value = Expr> {
    let term = (0usize..4, 0usize..4, -3i64..=3, 0usize..3).prop_map(|(i, j, c, f)| {
        let v = vars();
        let base = Expr::var(&v[i]) * Expr::var(&v[j]);
        let t = match f {
            0 => base,
            1 => Expr::func(Func::Sin, base),
            _ => Expr::var(&v[i]),
        };
        Expr::int(c) * t
    });
    prop::collection::vec(term, 1..4).prop_map(Expr::sum)
}

fn exprs(max: usize) -> impl Strategy<Value = Vec<Expr>> {
    prop::collection::vec(expr(), 1..=max)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn rank_is_monotone(a in exprs(3), b in exprs(3)) {
        let plan = SamplePlan::default();
        let ra = jacobian_rank(&a, &vars(), &plan).unwrap().rank;
        let ab: Vec<Expr> = a.iter().chain(&b).cloned().collect();
        let rab = jacobian_rank(&ab, &vars(), &plan).unwrap().rank;
        prop_assert!(ra <= rab);
        prop_assert!(rab <= ra + b.len());
        prop_assert!(rab <= vars().len());
    }

    #[test]
    fn rank_is_deterministic(a in exprs(4), seed in any::<u64>()) {
        let plan = SamplePlan::with_seed(seed);
        let r1 = jacobian_rank(&a, &vars(), &plan).unwrap();
        let r2 = jacobian_rank(&a, &vars(), &plan).unwrap();
        prop_assert_eq!(r1.rank, r2.rank);
        prop_assert_eq!(r1.witness, r2.witness);
    }

    #[test]
    fn span_is_reflexive(a in exprs(4), b in exprs(2)) {
        let plan = SamplePlan::default();
        prop_assert!(span_included(&a, &a, &vars(), &plan).unwrap());
        let ab: Vec<Expr> = a.iter().chain(&b).cloned().collect();
        prop_assert!(span_included(&a, &ab, &vars(), &plan).unwrap());
        let ev = span_inclusion(&a, &ab, &vars(), &plan).unwrap();
        prop_assert_eq!(ev.rank_b, ev.rank_ab);
    }

    #[test]
    fn scaled_rows_do_not_add_rank(a in exprs(3), c in 2i64..9) {
        let plan = SamplePlan::default();
        let mut b = a.clone();
        b.push(Expr::int(c) * a[0].clone());
        let ra = jacobian_rank(&a, &vars(), &plan).unwrap().rank;
        prop_assert_eq!(jacobian_rank(&b, &vars(), &plan).unwrap().rank, ra);
    }

    #[test]
    fn numeric_rank_of_diagonal(d in prop::collection::vec(prop_oneof![Just(0.0), 0.5f64..3.0], 1..6)) {
        let n = d.len();
        let m: Vec<Vec<f64>> = (0..n).map(|i| (0..n).map(|j| if i == j { d[i] } else { 0.0 }).collect()).collect();
        let expected = d.iter().filter(|v| **v != 0.0).count();
        prop_assert_eq!(numeric_rank(&m, 1e-8), expected);
    }
}
