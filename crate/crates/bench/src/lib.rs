//! Benchmark fixtures shared by the criterion targets.

use criterion::Criterion;
use gfactor_core::*;
use std::hint::black_box;

pub fn inp_matched_problem(window: [f64; 2]) -> DesignProblem {
    DesignProblem::new(
        "InGaAsP".parse().unwrap(),
        Substrate::Compound("InP".into()),
        0.0,
        0.1,
        window,
    )
}

pub fn benchmarks(c: &mut Criterion) {
    let db = default_database();
    let quaternary = parse_composition("Ga0.19In0.81As0.4P0.6").unwrap();
    let path = lattice_matched_path(&"InGaAsP".parse().unwrap(), 5.86, &db).unwrap();

    c.bench_function("roth_g", |b| {
        b.iter(|| roth_g(black_box(0.8), black_box(0.36), black_box(25.0)))
    });
    c.bench_function("alloy_params quaternary", |b| {
        b.iter(|| alloy_params(black_box(&quaternary), &db))
    });
    c.bench_function("electron_g quaternary", |b| {
        b.iter(|| electron_g(black_box(&quaternary), &db))
    });
    c.bench_function("sweep InGaAsP/InP 1001", |b| {
        b.iter(|| sweep_path(black_box(&path), 1001, &db))
    });
    for (name, window) in [("infeasible", [0.75, 0.85]), ("feasible", [0.75, 1.45])] {
        let problem = inp_matched_problem(window);
        c.bench_function(&format!("solve_design {name}"), |b| {
            b.iter(|| solve_design(black_box(&problem), &db))
        });
    }
}
