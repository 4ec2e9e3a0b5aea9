//! Refinement driver: condition on a growing nested design S₁ ⊂ S₂ ⊂ … over
//! an observation region, and monitor how the posterior settles down —
//! sup-norm deltas of the mean on a test grid, nuclear-norm deltas of the
//! covariance Gram, and deltas of characteristic-functional probes. The
//! contraction experiment is the special case where the whole domain is
//! observed on a sampled truth path, so the posterior should collapse onto
//! that path.
//!
//! Convergence is certified numerically from successive deltas only; the
//! underlying guarantee is asymptotic, so the report flags divergence
//! heuristically (three consecutive growing deltas) instead of claiming a
//! proof either way.

use num_complex::Complex64;

use crate::conditioning::{condition_with_tol, ObservationSet, PosteriorGp};
use crate::domain::{nested_design, Domain, Point};
use crate::error::{GpError, Result};
use crate::kernels::GpPrior;
use crate::linalg::{trace_norm, SymMatrix, DEFAULT_PINV_TOL};
use crate::sampling::sample_paths;

/// Strictly increasing design sizes at which the posterior is evaluated.
#[derive(Debug, Clone)]
pub struct RefinementSchedule {
    sizes: Vec<usize>,
}

impl RefinementSchedule {
    pub fn new(sizes: Vec<usize>) -> Result<Self> {
        if sizes.is_empty() {
            return Err(GpError::InvalidArgument(
                "refinement schedule must be non-empty".into(),
            ));
        }
        if sizes[0] == 0 {
            return Err(GpError::InvalidArgument(
                "refinement schedule sizes must be >= 1".into(),
            ));
        }
        if sizes.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GpError::InvalidArgument(format!(
                "refinement schedule must be strictly increasing, got {sizes:?}"
            )));
        }
        Ok(RefinementSchedule { sizes })
    }

    pub fn sizes(&self) -> &[usize] {
        &self.sizes
    }

    pub fn final_size(&self) -> usize {
        *self.sizes.last().expect("schedule is non-empty")
    }
}

/// The observed function `g` on the observation region.
#[derive(Clone)]
pub enum PathObservable {
    /// A path tabulated on a sorted 1-D grid, linearly interpolated between
    /// tabulation points and clamped outside them.
    Sampled { xs: Vec<f64>, values: Vec<f64> },
    /// A closed-form function.
    Analytic(std::sync::Arc<dyn Fn(&Point) -> f64 + Send + Sync>),
}

impl std::fmt::Debug for PathObservable {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            PathObservable::Sampled { xs, .. } => {
                write!(f, "Sampled({} tabulation points)", xs.len())
            }
            PathObservable::Analytic(_) => write!(f, "Analytic(..)"),
        }
    }
}

impl PathObservable {
    /// Tabulated path on a sorted 1-D grid.
    pub fn sampled(xs: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if xs.len() != values.len() {
            return Err(GpError::InvalidArgument(format!(
                "{} tabulation points but {} values",
                xs.len(),
                values.len()
            )));
        }
        if xs.is_empty() {
            return Err(GpError::InvalidArgument(
                "sampled path needs at least one tabulation point".into(),
            ));
        }
        if xs.windows(2).any(|w| w[0] >= w[1]) {
            return Err(GpError::InvalidArgument(
                "sampled path tabulation grid must be strictly increasing".into(),
            ));
        }
        if values.iter().any(|v| !v.is_finite()) {
            return Err(GpError::InvalidArgument(
                "sampled path values must be finite".into(),
            ));
        }
        Ok(PathObservable::Sampled { xs, values })
    }

    pub fn analytic(f: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        PathObservable::Analytic(std::sync::Arc::new(f))
    }

    pub fn eval(&self, t: &Point) -> f64 {
        match self {
            PathObservable::Sampled { xs, values } => {
                let x = t.x();
                match xs.binary_search_by(|probe| probe.total_cmp(&x)) {
                    Ok(i) => values[i],
                    Err(0) => values[0],
                    Err(i) if i == xs.len() => values[xs.len() - 1],
                    Err(i) => {
                        let w = (x - xs[i - 1]) / (xs[i] - xs[i - 1]);
                        values[i - 1] + w * (values[i] - values[i - 1])
                    }
                }
            }
            PathObservable::Analytic(f) => f(t),
        }
    }
}

/// A probe functional `x′ = Σⱼ wⱼ δ_{tⱼ}` for characteristic-functional
/// diagnostics.
#[derive(Debug, Clone)]
pub struct CharProbe {
    points: Vec<Point>,
    weights: Vec<f64>,
}

impl CharProbe {
    pub fn new(points: Vec<Point>, weights: Vec<f64>) -> Result<Self> {
        if points.len() != weights.len() {
            return Err(GpError::InvalidArgument(format!(
                "{} probe points but {} weights",
                points.len(),
                weights.len()
            )));
        }
        if points.is_empty() || weights.iter().all(|w| *w == 0.0) {
            return Err(GpError::InvalidArgument(
                "probe must have at least one non-zero weight".into(),
            ));
        }
        Ok(CharProbe { points, weights })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// The default probe family on a domain: a single unit weight at the
    /// center, alternating ±1 weights on 5 equispaced points, and all-ones
    /// on 3 equispaced points. Finite weighted combinations of point
    /// evaluations like these are dense enough in the dual to make their
    /// deltas a meaningful weak-convergence proxy.
    pub fn default_family(domain: &Domain) -> Vec<CharProbe> {
        let center = CharProbe::new(vec![domain.center()], vec![1.0]).expect("valid probe");
        let alternating = CharProbe::new(
            domain.uniform_grid(5),
            (0..5).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect(),
        )
        .expect("valid probe");
        let ones = CharProbe::new(domain.uniform_grid(3), vec![1.0; 3]).expect("valid probe");
        vec![center, alternating, ones]
    }
}

/// Characteristic functional of the posterior at a probe:
/// `φ = exp(i·⟨w, μ⟩ − ½·wᵀCw)` with `μ` the posterior mean at the probe
/// points and `C` the posterior Gram over them. The quadratic form is
/// mathematically non-negative; round-off negatives are clamped so that
/// `|φ| ≤ 1` holds unconditionally.
pub fn char_functional(post: &PosteriorGp, probe: &CharProbe) -> Complex64 {
    let mu: Vec<f64> = probe.points().iter().map(|t| post.posterior_mean(t)).collect();
    let gram = post.posterior_gram(probe.points());
    let w = probe.weights();
    let phase: f64 = w.iter().zip(&mu).map(|(a, b)| a * b).sum();
    let quad: f64 = gram.matvec(w).iter().zip(w).map(|(a, b)| a * b).sum();
    Complex64::new(0.0, phase).exp() * (-0.5 * quad.max(0.0)).exp()
}

/// One refinement level of a [`ConvergenceReport`].
#[derive(Debug, Clone)]
pub struct LevelRecord {
    /// Design size at this level.
    pub n: usize,
    /// `sup_grid |mₙ − m_prev|`; absent at the first level.
    pub sup_mean_delta: Option<f64>,
    /// Nuclear norm of `Gram_prev − Gramₙ` on the test grid; absent at the
    /// first level.
    pub trace_cov_delta: Option<f64>,
    /// Trace of the posterior Gram on the test grid.
    pub posterior_trace: f64,
    /// Characteristic-functional values at the probes.
    pub char_values: Vec<Complex64>,
    /// Per-probe `|φₙ − φ_prev|`; absent at the first level.
    pub char_deltas: Option<Vec<f64>>,
    /// `sup_grid |mₙ − truth|` when a truth path is known (contraction runs).
    pub sup_mean_err_vs_truth: Option<f64>,
}

impl LevelRecord {
    pub fn max_char_delta(&self) -> Option<f64> {
        self.char_deltas
            .as_ref()
            .map(|d| d.iter().fold(0.0f64, |m, v| m.max(*v)))
    }
}

/// Per-level diagnostics of a refinement run.
#[derive(Debug, Clone)]
pub struct ConvergenceReport {
    pub levels: Vec<LevelRecord>,
    /// True iff the final level's mean and covariance deltas are within the
    /// tolerances. A single-level run cannot converge (no deltas to compare).
    pub converged: bool,
    /// True iff the mean or covariance deltas grew across the last three
    /// levels.
    pub diverging: bool,
    pub mean_tol: f64,
    pub cov_tol: f64,
}

impl ConvergenceReport {
    pub fn final_level(&self) -> &LevelRecord {
        self.levels.last().expect("report has at least one level")
    }
}

/// Knobs of [`refine_and_monitor`] beyond the data itself.
#[derive(Debug, Clone)]
pub struct RefineOptions {
    /// Observation noise variance σ².
    pub noise_variance: f64,
    /// Convergence tolerance on the final sup-norm mean delta.
    pub mean_tol: f64,
    /// Convergence tolerance on the final nuclear-norm covariance delta.
    pub cov_tol: f64,
    /// Relative eigenvalue cutoff of the pseudoinverse.
    pub pinv_tol: f64,
    /// When set, design points are snapped onto this grid: each point is
    /// replaced by the nearest grid point not already claimed by an earlier
    /// design point, which preserves both nesting and distinctness. The
    /// contraction experiment uses this to keep the sampled truth path
    /// exactly observable.
    pub snap_grid: Option<Vec<Point>>,
}

impl Default for RefineOptions {
    fn default() -> Self {
        RefineOptions {
            noise_variance: 0.0,
            mean_tol: 1e-6,
            cov_tol: 1e-6,
            pinv_tol: DEFAULT_PINV_TOL,
            snap_grid: None,
        }
    }
}

fn snap_design(points: &[Point], grid: &[Point]) -> Result<Vec<Point>> {
    if points.len() > grid.len() {
        return Err(GpError::InvalidArgument(format!(
            "cannot snap {} design points onto a grid of {}",
            points.len(),
            grid.len()
        )));
    }
    let mut taken = vec![false; grid.len()];
    let mut snapped = Vec::with_capacity(points.len());
    for p in points {
        let mut best: Option<(usize, f64)> = None;
        for (i, g) in grid.iter().enumerate() {
            if taken[i] {
                continue;
            }
            let d = p.euclidean_distance(g);
            if best.is_none_or(|(_, bd)| d < bd) {
                best = Some((i, d));
            }
        }
        let (i, _) = best.expect("grid has a free slot since points <= grid");
        taken[i] = true;
        snapped.push(grid[i].clone());
    }
    Ok(snapped)
}

/// Condition on each nested design of the schedule and record convergence
/// diagnostics level by level.
///
/// For each size `n` the design is the first `n` points of the fixed dense
/// enumeration of `region`, observations are `yⱼ = g(sⱼ)` (plus the noise
/// model if σ² > 0 — the values themselves are noiseless; σ² enters the
/// factorization), and the posterior mean and Gram are evaluated on
/// `test_grid`.
pub fn refine_and_monitor(
    prior: &GpPrior,
    region: &Domain,
    g: &PathObservable,
    schedule: &RefinementSchedule,
    test_grid: &[Point],
    probes: &[CharProbe],
    options: &RefineOptions,
) -> Result<ConvergenceReport> {
    refine_with_truth(prior, region, g, schedule, test_grid, probes, options, None)
}

#[allow(clippy::too_many_arguments)]
fn refine_with_truth(
    prior: &GpPrior,
    region: &Domain,
    g: &PathObservable,
    schedule: &RefinementSchedule,
    test_grid: &[Point],
    probes: &[CharProbe],
    options: &RefineOptions,
    truth_on_test_grid: Option<&[f64]>,
) -> Result<ConvergenceReport> {
    if test_grid.is_empty() {
        return Err(GpError::InvalidArgument(
            "refinement requires a non-empty test grid".into(),
        ));
    }
    if !prior.domain().contains_domain(region) {
        return Err(GpError::InvalidArgument(
            "observation region must lie within the prior domain".into(),
        ));
    }
    if let Some(truth) = truth_on_test_grid {
        if truth.len() != test_grid.len() {
            return Err(GpError::InvalidArgument(
                "truth values must match the test grid".into(),
            ));
        }
    }

    let full_design = nested_design(region, schedule.final_size())?;
    let design_points = match &options.snap_grid {
        Some(grid) => snap_design(full_design.points(), grid)?,
        None => full_design.points().to_vec(),
    };

    let mut levels: Vec<LevelRecord> = Vec::with_capacity(schedule.sizes().len());
    let mut prev_mean: Option<Vec<f64>> = None;
    let mut prev_gram: Option<SymMatrix> = None;
    let mut prev_char: Option<Vec<Complex64>> = None;

    for &n in schedule.sizes() {
        let points = &design_points[..n];
        let values: Vec<f64> = points.iter().map(|p| g.eval(p)).collect();
        let obs = ObservationSet::points(points, &values, options.noise_variance)?;
        let post = condition_with_tol(prior, &obs, options.pinv_tol)?;

        let mean: Vec<f64> = test_grid.iter().map(|t| post.posterior_mean(t)).collect();
        let gram = post.posterior_gram(test_grid);
        let char_values: Vec<Complex64> =
            probes.iter().map(|p| char_functional(&post, p)).collect();

        let sup_mean_delta = prev_mean.as_ref().map(|prev| {
            mean.iter()
                .zip(prev)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        });
        let trace_cov_delta = match &prev_gram {
            Some(prev) => Some(trace_norm(&prev.sub(&gram)?)?),
            None => None,
        };
        let char_deltas = prev_char.as_ref().map(|prev| {
            char_values
                .iter()
                .zip(prev)
                .map(|(a, b)| (a - b).norm())
                .collect()
        });
        let sup_mean_err_vs_truth = truth_on_test_grid.map(|truth| {
            mean.iter()
                .zip(truth)
                .fold(0.0f64, |m, (a, b)| m.max((a - b).abs()))
        });

        levels.push(LevelRecord {
            n,
            sup_mean_delta,
            trace_cov_delta,
            posterior_trace: gram.trace(),
            char_values,
            char_deltas,
            sup_mean_err_vs_truth,
        });
        prev_mean = Some(mean);
        prev_gram = Some(gram);
        prev_char = Some(levels.last().expect("just pushed").char_values.clone());
    }

    let converged = match levels.last() {
        Some(LevelRecord {
            sup_mean_delta: Some(md),
            trace_cov_delta: Some(cd),
            ..
        }) => *md <= options.mean_tol && *cd <= options.cov_tol,
        _ => false,
    };
    let growing_tail = |extract: fn(&LevelRecord) -> Option<f64>| {
        let deltas: Vec<f64> = levels.iter().filter_map(extract).collect();
        deltas.len() >= 3 && deltas.windows(2).rev().take(2).all(|w| w[1] > w[0])
    };
    let diverging =
        growing_tail(|l| l.sup_mean_delta) || growing_tail(|l| l.trace_cov_delta);

    Ok(ConvergenceReport {
        levels,
        converged,
        diverging,
        mean_tol: options.mean_tol,
        cov_tol: options.cov_tol,
    })
}

/// Full-domain contraction experiment: sample one prior path on `fine_grid`,
/// observe it on growing designs snapped onto the grid, and track how fast
/// the posterior collapses onto the sampled path.
///
/// On top of the usual refinement diagnostics, each level records the
/// sup-norm error of the posterior mean against the sampled truth over the
/// fine grid.
pub fn contraction_experiment(
    prior: &GpPrior,
    seed: u64,
    schedule: &RefinementSchedule,
    fine_grid: &[Point],
    options: &RefineOptions,
) -> Result<ConvergenceReport> {
    if prior.domain().dim() != 1 {
        return Err(GpError::InvalidArgument(
            "the contraction experiment tabulates its truth path on a 1-D grid".into(),
        ));
    }
    if fine_grid.is_empty() {
        return Err(GpError::InvalidArgument(
            "contraction requires a non-empty fine grid".into(),
        ));
    }
    if schedule.final_size() > fine_grid.len() {
        return Err(GpError::InvalidArgument(format!(
            "schedule reaches {} design points but the fine grid has only {}",
            schedule.final_size(),
            fine_grid.len()
        )));
    }
    let sample = sample_paths(prior, fine_grid, 1, seed)?;
    let truth = sample.values()[0].clone();
    let xs: Vec<f64> = fine_grid.iter().map(|p| p.x()).collect();
    let g = PathObservable::sampled(xs, truth.clone())?;
    let mut opts = options.clone();
    opts.snap_grid = Some(fine_grid.to_vec());
    let probes = CharProbe::default_family(prior.domain());
    refine_with_truth(
        prior,
        prior.domain(),
        &g,
        schedule,
        fine_grid,
        &probes,
        &opts,
        Some(&truth),
    )
}
