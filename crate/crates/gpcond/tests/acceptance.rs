//! Acceptance suite: one test per criterion, each printing a pass/fail line
//! with the measured quantities (run with `--nocapture` to see them).
//!
//! Every tolerance is pinned in code next to the quantity it bounds.

use std::sync::OnceLock;
use std::time::{Duration, Instant};

use gpcond::{
    condition, contraction_experiment, interpolation_check, nested_design, pinv_psd, sample_paths,
    standard_normals, ConvergenceReport, Domain, GpPrior, Kernel, MeanFunction, ObservationSet,
    Point, RefineOptions, RefinementSchedule, Rng, SymMatrix,
};

fn pt(x: f64) -> Point {
    Point::scalar(x)
}

fn zero_mean_prior(kernel: Kernel) -> GpPrior {
    GpPrior::new(Domain::unit_interval(), MeanFunction::Zero, kernel).unwrap()
}

#[test]
fn criterion_1_brownian_bridge_closed_form() {
    let start = Instant::now();
    let prior = zero_mean_prior(Kernel::brownian());
    let obs = ObservationSet::points(&[pt(1.0)], &[0.0], 0.0).unwrap();
    let post = condition(&prior, &obs).unwrap();

    let grid = prior.domain().uniform_grid(101);
    let mut max_mean_err = 0.0f64;
    let mut max_cov_err = 0.0f64;
    for s in &grid {
        max_mean_err = max_mean_err.max(post.posterior_mean(s).abs());
        for t in &grid {
            let want = s.x().min(t.x()) - s.x() * t.x();
            max_cov_err = max_cov_err.max((post.posterior_cov(s, t) - want).abs());
        }
    }
    let elapsed = start.elapsed();
    assert!(max_mean_err <= 1e-10, "mean error {max_mean_err:e}");
    assert!(max_cov_err <= 1e-10, "covariance error {max_cov_err:e}");
    assert!(elapsed < Duration::from_millis(100), "took {elapsed:?}");
    println!(
        "criterion 1 (Brownian bridge closed form): PASS — max mean err {max_mean_err:.2e}, max cov err {max_cov_err:.2e}, {elapsed:?}"
    );
}

fn dense_pinv(a: &SymMatrix) -> SymMatrix {
    let factor = pinv_psd(a, 1e-10).unwrap();
    let half = factor.half_rows();
    SymMatrix::from_fn(a.n(), |i, j| {
        half.iter().map(|row| row[i] * row[j]).sum()
    })
}

fn mat_mul(a: &SymMatrix, b: &SymMatrix) -> Vec<f64> {
    let n = a.n();
    let mut out = vec![0.0; n * n];
    for i in 0..n {
        for l in 0..n {
            let ail = a.get(i, l);
            if ail != 0.0 {
                for j in 0..n {
                    out[i * n + j] += ail * b.get(l, j);
                }
            }
        }
    }
    out
}

#[test]
fn criterion_2_moore_penrose_identity_suite() {
    let start = Instant::now();
    let mut rng = Rng::new(0x4d50); // seed for the whole suite
    let mut worst_apa = 0.0f64;
    let mut worst_pap = 0.0f64;
    let mut worst_sym = 0.0f64;
    for trial in 0..50 {
        let n = 5 + (trial * 7) % 46; // sizes 5..=50
        let r = 1 + trial % (n - 1); // genuinely rank-deficient
        let g = standard_normals(&mut rng, n * r);
        let a = SymMatrix::from_fn(n, |i, j| {
            (0..r).map(|l| g[i * r + l] * g[j * r + l]).sum()
        });
        let p = dense_pinv(&a);
        let lmax = gpcond::operator_norm(&a).unwrap();
        let pnorm = gpcond::operator_norm(&p).unwrap();

        let ap = mat_mul(&a, &p);
        let pa = mat_mul(&p, &a);
        for i in 0..n {
            for j in 0..n {
                let apa: f64 = (0..n).map(|l| ap[i * n + l] * a.get(l, j)).sum();
                worst_apa = worst_apa.max((apa - a.get(i, j)).abs() / lmax);
                let pap: f64 = (0..n).map(|l| pa[i * n + l] * p.get(l, j)).sum();
                worst_pap = worst_pap.max((pap - p.get(i, j)).abs() / pnorm);
                // AP and PA are orthogonal projections: unit scale.
                worst_sym = worst_sym.max((ap[i * n + j] - ap[j * n + i]).abs());
                worst_sym = worst_sym.max((pa[i * n + j] - pa[j * n + i]).abs());
            }
        }
    }
    let elapsed = start.elapsed();
    assert!(worst_apa <= 1e-8, "A A+ A = A relative error {worst_apa:e}");
    assert!(worst_pap <= 1e-8, "A+ A A+ = A+ relative error {worst_pap:e}");
    assert!(worst_sym <= 1e-8, "projection symmetry error {worst_sym:e}");
    assert!(elapsed < Duration::from_secs(2), "took {elapsed:?}");
    println!(
        "criterion 2 (Moore–Penrose identities, 50 matrices): PASS — rel errs APA {worst_apa:.2e}, PAP {worst_pap:.2e}, sym {worst_sym:.2e}, {elapsed:?}"
    );
}

#[test]
fn criterion_3_interpolation_at_observed_points() {
    let start = Instant::now();
    let prior = zero_mean_prior(Kernel::matern32(0.3, 1.0).unwrap());
    let mut rng = Rng::new(20);
    let points: Vec<Point> = (0..20).map(|_| pt(rng.next_f64())).collect();
    for i in 0..points.len() {
        for j in 0..i {
            assert_ne!(points[i], points[j], "seeded points must be distinct");
        }
    }
    let values = standard_normals(&mut rng, 20);
    let obs = ObservationSet::points(&points, &values, 0.0).unwrap();
    let post = condition(&prior, &obs).unwrap();
    let report = interpolation_check(&post, 1e-6).unwrap();
    let elapsed = start.elapsed();
    assert!(
        report.max_mean_error <= 1e-6,
        "mean error {:e}",
        report.max_mean_error
    );
    assert!(
        report.max_variance <= 1e-6,
        "variance {:e}",
        report.max_variance
    );
    assert!(report.pass);
    assert!(elapsed < Duration::from_millis(500), "took {elapsed:?}");
    println!(
        "criterion 3 (noise-free interpolation, Matérn-3/2 on 20 points): PASS — mean err {:.2e}, var {:.2e}, {elapsed:?}",
        report.max_mean_error, report.max_variance
    );
}

#[test]
fn criterion_4_variance_monotonicity_under_nesting() {
    let start = Instant::now();
    let prior = zero_mean_prior(Kernel::rbf(0.2, 1.0).unwrap());
    let test_points = prior.domain().uniform_grid(50);
    let mut previous: Option<Vec<f64>> = None;
    let mut worst_increase = f64::NEG_INFINITY;
    for n in [4usize, 8, 16, 32, 64] {
        let design = nested_design(prior.domain(), n).unwrap();
        let obs = ObservationSet::points(design.points(), &vec![0.0; n], 0.0).unwrap();
        let post = condition(&prior, &obs).unwrap();
        let vars: Vec<f64> = test_points.iter().map(|t| post.posterior_var(t)).collect();
        if let Some(prev) = &previous {
            for (new, old) in vars.iter().zip(prev) {
                worst_increase = worst_increase.max(new - old);
                assert!(
                    new <= &(old + 1e-9),
                    "variance grew by {:e} at n = {n}",
                    new - old
                );
            }
        }
        previous = Some(vars);
    }
    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(2), "took {elapsed:?}");
    println!(
        "criterion 4 (posterior variance monotone in nested designs): PASS — worst increase {worst_increase:.2e}, {elapsed:?}"
    );
}

struct ContractionRun {
    report: ConvergenceReport,
    prior_trace: f64,
    elapsed: Duration,
}

fn contraction_run() -> &'static ContractionRun {
    static RUN: OnceLock<ContractionRun> = OnceLock::new();
    RUN.get_or_init(|| {
        let start = Instant::now();
        let prior = zero_mean_prior(Kernel::rbf(0.2, 1.0).unwrap());
        let fine_grid = prior.domain().uniform_grid(257);
        let schedule = RefinementSchedule::new(vec![3, 5, 9, 17, 33, 65]).unwrap();
        let report = contraction_experiment(
            &prior,
            2024,
            &schedule,
            &fine_grid,
            &RefineOptions::default(),
        )
        .unwrap();
        let prior_trace: f64 = fine_grid
            .iter()
            .map(|t| prior.kernel().eval(t, t))
            .sum();
        ContractionRun {
            report,
            prior_trace,
            elapsed: start.elapsed(),
        }
    })
}

#[test]
fn criterion_5_contraction_on_full_observation() {
    let run = contraction_run();
    let levels = &run.report.levels;
    let initial_err = levels[0].sup_mean_err_vs_truth.unwrap();
    let final_err = levels.last().unwrap().sup_mean_err_vs_truth.unwrap();
    assert!(
        final_err <= 1e-2 * initial_err,
        "sup mean error fell only from {initial_err:e} to {final_err:e}"
    );
    let final_trace = levels.last().unwrap().posterior_trace;
    assert!(
        final_trace <= 1e-3 * run.prior_trace,
        "posterior trace {final_trace:e} vs prior trace {:e}",
        run.prior_trace
    );
    for w in levels.windows(2) {
        assert!(
            w[1].posterior_trace <= w[0].posterior_trace + 1e-9,
            "posterior trace increased: {} -> {}",
            w[0].posterior_trace,
            w[1].posterior_trace
        );
    }
    assert!(run.elapsed < Duration::from_secs(10), "took {:?}", run.elapsed);
    println!(
        "criterion 5 (contraction, S = T): PASS — sup err {initial_err:.3e} -> {final_err:.3e} (ratio {:.2e}), trace ratio {:.2e}, {:?}",
        final_err / initial_err,
        final_trace / run.prior_trace,
        run.elapsed
    );
}

#[test]
fn criterion_6_partial_observation_dichotomy() {
    let start = Instant::now();
    let prior = zero_mean_prior(Kernel::rbf(0.05, 1.0).unwrap());
    let region = Domain::interval(0.0, 0.5).unwrap();
    let design = nested_design(&region, 65).unwrap();
    let obs = ObservationSet::points(design.points(), &vec![0.0; 65], 0.0).unwrap();
    let post = condition(&prior, &obs).unwrap();

    let mut max_var_inside = 0.0f64;
    for t in region.uniform_grid(65) {
        max_var_inside = max_var_inside.max(post.posterior_var(&t));
    }
    let far_var = post.posterior_var(&pt(1.0));
    let prior_var = prior.kernel().eval(&pt(1.0), &pt(1.0));
    let elapsed = start.elapsed();
    assert!(max_var_inside <= 1e-4, "variance inside S {max_var_inside:e}");
    assert!(
        far_var >= 0.5 * prior_var,
        "far-field variance {far_var} vs prior {prior_var}"
    );
    assert!(elapsed < Duration::from_secs(2), "took {elapsed:?}");
    println!(
        "criterion 6 (partial observation, S = [0, 0.5]): PASS — max var in S {max_var_inside:.2e}, var at 1.0 = {far_var:.4}, {elapsed:?}"
    );
}

#[test]
fn criterion_7_characteristic_functional_convergence() {
    let run = contraction_run();
    for level in &run.report.levels {
        for phi in &level.char_values {
            assert!(
                phi.norm() <= 1.0 + 1e-12,
                "|phi| = {} above 1 at n = {}",
                phi.norm(),
                level.n
            );
        }
    }
    let final_delta = run
        .report
        .final_level()
        .max_char_delta()
        .expect("multi-level run has deltas");
    assert!(final_delta <= 1e-3, "final char delta {final_delta:e}");
    println!(
        "criterion 7 (characteristic-functional proxy): PASS — final max delta {final_delta:.2e}, |phi| <= 1 on all levels (shared run with criterion 5)"
    );
}

#[test]
fn criterion_8_sampling_moment_recovery_and_determinism() {
    let start = Instant::now();
    let prior = zero_mean_prior(Kernel::rbf(0.4, 1.0).unwrap());
    let grid = prior.domain().uniform_grid(10);
    let true_gram = gpcond::gram(prior.kernel(), &grid);

    let sample = sample_paths(&prior, &grid, 4000, 888).unwrap();
    let m = sample.sample_count() as f64;
    let means: Vec<f64> = (0..10)
        .map(|i| sample.values().iter().map(|row| row[i]).sum::<f64>() / m)
        .collect();
    let mut worst = 0.0f64;
    for i in 0..10 {
        for j in 0..10 {
            let cov: f64 = sample
                .values()
                .iter()
                .map(|row| (row[i] - means[i]) * (row[j] - means[j]))
                .sum::<f64>()
                / (m - 1.0);
            worst = worst.max((cov - true_gram.get(i, j)).abs());
        }
    }
    assert!(worst <= 0.15, "empirical covariance off by {worst}");

    // Identical seed, byte-identical CSV.
    let dir = tempfile::tempdir().unwrap();
    let csv_a = gpcond::cli::paths_csv(&sample_paths(&prior, &grid, 4000, 888).unwrap());
    let csv_b = gpcond::cli::paths_csv(&sample_paths(&prior, &grid, 4000, 888).unwrap());
    let path_a = dir.path().join("a.csv");
    let path_b = dir.path().join("b.csv");
    std::fs::write(&path_a, &csv_a).unwrap();
    std::fs::write(&path_b, &csv_b).unwrap();
    let bytes_a = std::fs::read(&path_a).unwrap();
    let bytes_b = std::fs::read(&path_b).unwrap();
    assert_eq!(bytes_a, bytes_b, "same seed must give identical CSV bytes");

    let elapsed = start.elapsed();
    assert!(elapsed < Duration::from_secs(3), "took {elapsed:?}");
    println!(
        "criterion 8 (sampling moments + determinism): PASS — max covariance error {worst:.3}, identical CSV bytes, {elapsed:?}"
    );
}
