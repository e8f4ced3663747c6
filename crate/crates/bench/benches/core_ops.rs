//! Throughput of the hot paths: joint distributions, exact term
//! evaluation, sum expansion, parsing/printing, and the bounded search.

use criterion::{criterion_group, criterion_main, BatchSize, Criterion};
use pchsat_bench::{
    counterfactual_query, example_ctx, example_model, nested_sum_formula, pinning_formula,
};
use pchsat_core::eval::{eval_formula, term_value, EvalOptions};
use pchsat_core::lang::{parse_formula, LangContext};
use pchsat_core::model::Domain;
use pchsat_core::solve::{solve_sat, SolveConfig};
use pchsat_core::transform::expand_sums;
use pchsat_core::Scm;
use std::hint::black_box;

fn bench_joint_distribution(c: &mut Criterion) {
    let example = example_model();
    let random = Scm::random(11, 3, 2, 8, None);
    let mut group = c.benchmark_group("joint_distribution");
    group.bench_function("example", |b| {
        b.iter(|| black_box(&example).joint_distribution())
    });
    group.bench_function("random_n3_p8", |b| {
        b.iter(|| black_box(&random).joint_distribution())
    });
    group.finish();
}

fn bench_eval(c: &mut Criterion) {
    let scm = example_model();
    let opts = EvalOptions::default();
    let query = counterfactual_query();
    let sums = nested_sum_formula();
    let mut group = c.benchmark_group("eval");
    group.bench_function("counterfactual_conditional", |b| {
        b.iter(|| term_value(black_box(&scm), black_box(&query), &opts).unwrap())
    });
    group.bench_function("three_nested_sums", |b| {
        b.iter(|| eval_formula(black_box(&scm), black_box(&sums), &opts).unwrap())
    });
    group.finish();
}

fn bench_parse_print(c: &mut Criterion) {
    let ctx = example_ctx();
    let text = "sum x . P([X=1](Y=1) && [](X=x)) * P(X=0) = 0 AND NOT P(Z=1 | Y=0) > 1/3";
    let parsed = parse_formula(text, &ctx).unwrap();
    let mut group = c.benchmark_group("syntax");
    group.bench_function("parse", |b| {
        b.iter(|| parse_formula(black_box(text), &ctx).unwrap())
    });
    group.bench_function("print", |b| b.iter(|| black_box(&parsed).to_string()));
    group.finish();
}

fn bench_expand_sums(c: &mut Criterion) {
    let f = nested_sum_formula();
    c.bench_function("expand_sums_depth3", |b| {
        b.iter(|| expand_sums(black_box(&f), Domain::binary(), 1_000_000).unwrap())
    });
}

fn bench_solve(c: &mut Criterion) {
    let ctx = LangContext::new(vec!["X".into(), "Y".into()], Domain::binary()).unwrap();
    let pinning = pinning_formula(&ctx);
    let interventional = parse_formula("P([X=1](Y=1)) = 1 AND P([X=0](Y=1)) = 0", &ctx).unwrap();
    let mut group = c.benchmark_group("solve");
    group.sample_size(20);
    group.bench_function("pinning_p1", |b| {
        b.iter_batched(
            || SolveConfig::new(ctx.vars().to_vec(), Domain::binary(), 1),
            |cfg| solve_sat(black_box(&pinning), &cfg).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.bench_function("copy_response_p2", |b| {
        b.iter_batched(
            || SolveConfig::new(ctx.vars().to_vec(), Domain::binary(), 2),
            |cfg| solve_sat(black_box(&interventional), &cfg).unwrap(),
            BatchSize::SmallInput,
        )
    });
    group.finish();
}

criterion_group!(
    benches,
    bench_joint_distribution,
    bench_eval,
    bench_parse_print,
    bench_expand_sums,
    bench_solve
);
criterion_main!(benches);
