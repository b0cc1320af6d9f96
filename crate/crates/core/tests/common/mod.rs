#![allow(dead_code)]

use std::path::PathBuf;

use proptest::prelude::*;
use proptest::test_runner::{Config, RngSeed};

use flatlin::symbolic::{Expr, Func, Point, VariableId};

pub fn fixture_path(name: &str) -> String {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("fixtures").join(name).display().to_string()
}

pub fn vars() -> Vec<VariableId> {
    (1..=3).map(|i| VariableId::state(i, &format!("x{i}"))).collect()
}

pub fn config(cases: u32) -> Config {
    Config { cases, rng_seed: RngSeed::Fixed(0x5EED), failure_persistence: None, ..Config::default() }
}

/// Expressions that stay finite on the sampling domain: division only by
/// `b^2 + 1`, exponentials only of bounded arguments.
pub fn expr() -> impl Strategy<Value = Expr> {
    let leaf = prop_oneof![
        (0usize..3).prop_map(|i| Expr::var(&vars()[i])),
        (-4i64..=4).prop_map(Expr::int),
        (1i64..=5, 2i64..=4).prop_map(|(p, q)| Expr::ratio(p, q)),
    ];
    leaf.prop_recursive(4, 24, 2, |inner| {
        prop_oneof![
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a + b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a - b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a * b),
            (inner.clone(), inner.clone()).prop_map(|(a, b)| a / (Expr::pow(b, 2) + Expr::one())),
            (inner.clone(), 2i64..=3).prop_map(|(a, k)| Expr::pow(a, k)),
            inner.clone().prop_map(|a| Expr::func(Func::Sin, a)),
            inner.clone().prop_map(|a| Expr::func(Func::Cos, a)),
            inner.prop_map(|a| Expr::func(Func::Exp, Expr::func(Func::Sin, a))),
        ]
    })
}

pub fn coordinate() -> impl Strategy<Value = f64> {
    (any::<bool>(), 0.5f64..2.0).prop_map(|(neg, v)| if neg { -v } else { v })
}

pub fn point() -> impl Strategy<Value = Point> {
    (coordinate(), coordinate(), coordinate()).prop_map(|(a, b, c)| vars().into_iter().zip([a, b, c]).collect())
}
