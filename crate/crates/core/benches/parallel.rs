//! Sequential vs parallel execution of each data-parallel workload.

use std::hint::black_box;
use std::path::Path;

use coldopt::analysis::{mc_shortage_with, sweep_with, Parameter, SweepSpec};
use coldopt::cli::{load_scenario, ScenarioFile};
use coldopt::quality::generate_dataset_with;
use coldopt::solver::{grid_oracle_with, solve_with, OracleConfig};
use coldopt::Execution;
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

const MODES: [(&str, Execution); 2] = [("sequential", Execution::Sequential), ("parallel", Execution::Parallel)];

fn baseline() -> ScenarioFile {
    load_scenario(&Path::new(env!("CARGO_MANIFEST_DIR")).join("scenarios/baseline.toml")).unwrap()
}

fn solve(c: &mut Criterion) {
    let s = baseline();
    let mut g = c.benchmark_group("solve");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| solve_with(black_box(&s.params), &s.model, exec).unwrap())
        });
    }
    g.finish();
}

fn oracle(c: &mut Criterion) {
    let s = baseline();
    let mut g = c.benchmark_group("grid_oracle");
    g.sample_size(10);
    for (mode, config) in [("2d", OracleConfig::decomposed()), ("4d", OracleConfig::full())] {
        for (name, exec) in MODES {
            g.bench_function(BenchmarkId::new(mode, name), |b| {
                b.iter(|| grid_oracle_with(black_box(&s.params), &s.model, config, exec).unwrap())
            });
        }
    }
    g.finish();
}

fn monte_carlo(c: &mut Criterion) {
    let demand = baseline().params.lead_time_demand;
    let mut g = c.benchmark_group("mc_shortage_1e6");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| mc_shortage_with(black_box(150.0), &demand, 1_000_000, 7, exec).unwrap())
        });
    }
    g.finish();
}

fn sweep(c: &mut Criterion) {
    let s = baseline();
    let spec = SweepSpec { parameter: Parameter::HoldingCost, from: 12.0, to: 24.0, steps: 64 };
    let mut g = c.benchmark_group("sweep_h_64");
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| sweep_with(black_box(&s.params), &s.model, &spec, exec).unwrap())
        });
    }
    g.finish();
}

fn dataset(c: &mut Criterion) {
    let spec = baseline().generator_spec();
    let mut g = c.benchmark_group("generate_dataset_1e5");
    g.sample_size(10);
    for (name, exec) in MODES {
        g.bench_function(BenchmarkId::from_parameter(name), |b| {
            b.iter(|| generate_dataset_with(black_box(&spec), 100_000, exec).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, solve, oracle, monte_carlo, sweep, dataset);
criterion_main!(benches);
