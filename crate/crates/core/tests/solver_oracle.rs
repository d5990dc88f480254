//! Solver checks against dense direct solves and the PDE's structural properties.

mod common;

use common::{dense_solve, max_diff, random_grid, random_mask};
use pdeinpaint::image::laplacian;
use pdeinpaint::solver::{
    run_parabolic, solve_denoise_step, solve_parabolic_step, solve_stationary, step_energy, MaskSchedule, SolveSpec,
};
use pdeinpaint::{ImageGrid, Mask};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn tight(alpha: f64, dt: f64) -> SolveSpec {
    SolveSpec {
        alpha,
        dt,
        tol: 1e-12,
        max_iter: None,
    }
}

#[test]
fn stationary_center_pixel_3x3() {
    let mut f = ImageGrid::zeros(3, 3).unwrap();
    f.set(1, 1, 1.0);
    let mask = Mask::from_indices(3, 3, [4]);
    let u = solve_stationary(&f, &mask, &tight(1.0, 0.1)).unwrap();
    let zero = ImageGrid::zeros(3, 3).unwrap();
    let oracle = dense_solve(1.0, 1.0, &mask, &zero, &f);
    assert!(max_diff(&u, &oracle) < 1e-10);
    assert_eq!(u.get(1, 1), 1.0);
    for (x, y) in [(0, 0), (2, 0), (0, 2), (2, 2)] {
        assert!(u.get(x, y) > 0.0 && u.get(x, y) < 1.0);
    }
}

#[test]
fn parabolic_corner_4x4() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let u_prev = random_grid(&mut rng, 4, 4);
    let f = random_grid(&mut rng, 4, 4);
    let mask = Mask::from_indices(4, 4, [0]);
    let spec = tight(2.0, 0.1);
    let u = solve_parabolic_step(&u_prev, &f, &mask, &spec).unwrap();
    let oracle = dense_solve(1.0, 0.2, &mask, &u_prev, &f);
    assert!(max_diff(&u, &oracle) < 1e-10);
}

#[test]
fn denoise_two_pixels_4x4() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    let u_prev = random_grid(&mut rng, 4, 4);
    let mask = Mask::from_indices(4, 4, [5, 14]);
    let spec = tight(3.0, 0.1);
    let u = solve_denoise_step(&u_prev, &mask, &spec).unwrap();
    let oracle = dense_solve(1.0, 0.3, &mask, &u_prev, &u_prev);
    assert!(max_diff(&u, &oracle) < 1e-10);
    assert_eq!(u.data()[5], u_prev.data()[5]);
    assert_eq!(u.data()[14], u_prev.data()[14]);
}

#[test]
fn random_small_grids_match_dense_solves() {
    let mut rng = ChaCha8Rng::seed_from_u64(2024);
    for trial in 0..10 {
        let (w, h) = (rng.gen_range(1..=8), rng.gen_range(1..=8));
        let f = random_grid(&mut rng, w, h);
        let u_prev = random_grid(&mut rng, w, h);
        let mask = random_mask(&mut rng, w, h, 0.3);
        let alpha = rng.gen_range(0.5..20.0);
        let spec = SolveSpec::with_alpha(alpha);
        let zero = ImageGrid::zeros(w, h).unwrap();

        let u = solve_stationary(&f, &mask, &spec).unwrap();
        let d = max_diff(&u, &dense_solve(1.0, alpha, &mask, &zero, &f));
        assert!(d < 1e-8, "stationary trial {trial} ({w}x{h}): {d:e}");

        let u = solve_parabolic_step(&u_prev, &f, &mask, &spec).unwrap();
        let d = max_diff(&u, &dense_solve(1.0, alpha * spec.dt, &mask, &u_prev, &f));
        assert!(d < 1e-8, "parabolic trial {trial} ({w}x{h}): {d:e}");
    }
}

#[test]
fn a_priori_bound_and_alpha_trend() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let f = ImageGrid::from_fn(24, 24, |x, y| {
        0.5 + 0.3 * (0.3 * x as f64).sin() * (0.2 * y as f64).cos() + 0.05 * rng.gen::<f64>()
    })
    .unwrap();
    let mask = Mask::from_bits(24, 24, (0..576).map(|i| i % 7 == 0).collect()).unwrap();
    let mut prev = f64::INFINITY;
    for alpha in [0.5, 2.0, 8.0, 32.0] {
        let u = solve_stationary(&f, &mask, &SolveSpec::with_alpha(alpha)).unwrap();
        let v = u.zip_map(&f, |a, b| a - b).unwrap();
        let lap = laplacian(&f);
        let g = f.zip_map(&lap, |fv, l| -fv + alpha * l).unwrap();
        assert!(v.norm() <= g.norm(), "alpha {alpha}: {} > {}", v.norm(), g.norm());
        assert!(v.norm() < prev, "error should shrink with alpha");
        prev = v.norm();
    }
}

#[test]
fn parabolic_iteration_settles() {
    let mut rng = ChaCha8Rng::seed_from_u64(16);
    let f = random_grid(&mut rng, 16, 16);
    let u0 = ImageGrid::zeros(16, 16).unwrap();
    let mask = random_mask(&mut rng, 16, 16, 0.15);
    let spec = SolveSpec::with_alpha(4.0);
    let its = run_parabolic(&u0, &f, MaskSchedule::Fixed(&mask), &spec, 60).unwrap();
    let diffs: Vec<f64> = its.windows(2).map(|p| max_diff(&p[1], &p[0])).collect();
    for (n, d) in diffs.iter().enumerate().skip(5).take(diffs.len() - 6) {
        assert!(diffs[n + 1] <= d * (1.0 + 1e-9), "step {n}: {} > {}", diffs[n + 1], d);
    }
    assert!(*diffs.last().unwrap() < 1e-2 * diffs[0]);
    let mut prev = &u0;
    for u in &its {
        assert!(step_energy(u, prev, &spec).unwrap().is_finite());
        prev = u;
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(100))]

    #[test]
    fn maximum_principle_and_dirichlet_exactness(
        seed in any::<u64>(),
        w in 1usize..12,
        h in 1usize..12,
        alpha in 0.1f64..50.0,
        p in 0.05f64..0.9,
    ) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = ImageGrid::from_fn(w, h, |_, _| rng.gen_range(-1.0..1.0)).unwrap();
        let mask = random_mask(&mut rng, w, h, p);
        let u = solve_stationary(&f, &mask, &SolveSpec::with_alpha(alpha)).unwrap();
        let (mut lo, mut hi) = (0.0f64, 0.0f64);
        for i in mask.indices() {
            lo = lo.min(f.data()[i]);
            hi = hi.max(f.data()[i]);
            prop_assert_eq!(u.data()[i].to_bits(), f.data()[i].to_bits());
        }
        for &v in u.data() {
            prop_assert!(v >= lo - 1e-8 && v <= hi + 1e-8, "{} outside [{}, {}]", v, lo, hi);
        }
    }

    #[test]
    fn parabolic_step_stays_in_data_range(seed in any::<u64>(), w in 1usize..10, h in 1usize..10) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let f = random_grid(&mut rng, w, h);
        let u_prev = random_grid(&mut rng, w, h);
        let mask = random_mask(&mut rng, w, h, 0.3);
        let u = solve_parabolic_step(&u_prev, &f, &mask, &SolveSpec::with_alpha(5.0)).unwrap();
        for i in mask.indices() {
            prop_assert_eq!(u.data()[i].to_bits(), f.data()[i].to_bits());
        }
        for &v in u.data() {
            prop_assert!((-1e-8..=1.0 + 1e-8).contains(&v));
        }
    }
}
