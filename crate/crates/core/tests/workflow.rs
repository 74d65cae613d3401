use std::fs;

use fracwave::config::RawConfig;
use fracwave::groundstate::{self, PetviashviliOptions, ShootOptions};
use fracwave::{exec, runner, sampling, spectral, Execution, Field, GridSpec, ModelParams};

#[test]
fn snapshot_round_trip_is_bit_exact() {
    let dir = tempfile::tempdir().unwrap();
    let g = GridSpec::new(2, 32, 12.0).unwrap();
    let u = sampling::random_field(g, &sampling::BumpSpec::default(), &mut sampling::rng(5));
    let path = dir.path().join("u.frw");
    u.save(&path).unwrap();
    assert_eq!(Field::load(&path).unwrap(), u);
    assert_eq!(fs::metadata(&path).unwrap().len(), 28 + 16 * 32 * 32);
}

#[test]
fn sequential_and_parallel_batches_agree() {
    let params = ModelParams::new(0.75, 0.5, 6.0, 1).unwrap();
    let grid = GridSpec::new(1, 512, 60.0).unwrap();
    let lambdas = [0.5, 1.0, 2.0, 4.0];
    let solve = |&lam: &f64| {
        groundstate::solve_mixed_fixed_lambda(
            &params,
            lam,
            grid,
            None,
            &PetviashviliOptions::default(),
        )
        .unwrap()
        .field
    };
    let a = exec::map(Execution::Sequential, &lambdas, solve);
    let b = exec::map(Execution::Parallel, &lambdas, solve);
    assert_eq!(a, b);
}

#[test]
fn shooting_hits_the_target_mass() {
    let params = ModelParams::new(1.0, 0.5, 6.0, 1).unwrap();
    let rec = groundstate::mass_shoot(
        &params,
        3.5,
        GridSpec::new(1, 1024, 80.0).unwrap(),
        &ShootOptions::default(),
    )
    .unwrap();
    assert!((rec.mass - 3.5).abs() <= 1e-6 * 3.5);
    assert!((spectral::mass(&rec.field) - rec.mass).abs() < 1e-10);
    assert!(rec.lambda > 0.0);
}

#[test]
fn evolve_task_is_reproducible() {
    let dir = tempfile::tempdir().unwrap();
    let init = dir.path().join("init.frw");
    let g = GridSpec::new(1, 256, 40.0).unwrap();
    Field::from_real_fn(g, |x| (-x[0] * x[0] / 2.0).exp())
        .unwrap()
        .save(&init)
        .unwrap();
    let cfg = |out: &str| {
        RawConfig {
            task: Some("evolve".into()),
            s1: Some(0.75),
            s2: Some(0.6),
            p: Some(4.0),
            t_final: Some(0.5),
            init: Some(init.clone()),
            out: Some(dir.path().join(out)),
            ..Default::default()
        }
        .resolve()
        .unwrap()
    };
    let a = runner::run(&cfg("a")).unwrap();
    let b = runner::run(&cfg("b")).unwrap();
    let read = |d: &str, f: &str| fs::read(dir.path().join(d).join(f)).unwrap();
    assert_eq!(read("a", "traj.csv"), read("b", "traj.csv"));
    assert_eq!(read("a", "trajectory.json"), read("b", "trajectory.json"));
    assert_eq!(a.report["verdict"], "CompletedHorizon");
    assert!(b.report["max_mass_drift"].as_f64().unwrap() < 1e-10);
}
