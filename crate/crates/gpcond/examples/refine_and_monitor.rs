//! Refine an observation design level by level and watch the posterior
//! settle: sup-norm mean deltas, nuclear-norm covariance deltas, and
//! characteristic-functional probes.
//!
//! ```bash
//! cargo run --release --example refine_and_monitor
//! ```

use gpcond::{
    refine_and_monitor, CharProbe, Domain, GpPrior, Kernel, MeanFunction, PathObservable,
    RefineOptions, RefinementSchedule,
};

fn main() -> gpcond::Result<()> {
    let prior = GpPrior::new(
        Domain::unit_interval(),
        MeanFunction::Zero,
        Kernel::matern52(0.25, 1.0)?,
    )?;

    // Observe a smooth function on a design that becomes dense in [0,1].
    let g = PathObservable::analytic(|t| (3.0 * t.x()).sin() * (-t.x()).exp());
    let schedule = RefinementSchedule::new(vec![4, 8, 16, 32, 64, 128])?;
    let test_grid = prior.domain().uniform_grid(257);
    let probes = CharProbe::default_family(prior.domain());
    let options = RefineOptions {
        mean_tol: 1e-3,
        cov_tol: 1e-3,
        ..RefineOptions::default()
    };

    let report = refine_and_monitor(
        &prior,
        prior.domain(),
        &g,
        &schedule,
        &test_grid,
        &probes,
        &options,
    )?;

    println!("refining a Matérn-5/2 posterior on g(t) = sin(3t)·exp(−t)");
    println!();
    println!(
        "{:>5} {:>16} {:>16} {:>16} {:>14}",
        "n", "sup mean delta", "trace cov delta", "posterior trace", "char delta"
    );
    for level in &report.levels {
        let fmt = |v: Option<f64>| match v {
            Some(x) => format!("{x:.6e}"),
            None => "-".to_string(),
        };
        println!(
            "{:>5} {:>16} {:>16} {:>16.6e} {:>14}",
            level.n,
            fmt(level.sup_mean_delta),
            fmt(level.trace_cov_delta),
            level.posterior_trace,
            fmt(level.max_char_delta()),
        );
    }
    println!();
    println!(
        "converged = {} (mean tol {:.0e}, cov tol {:.0e}), diverging = {}",
        report.converged, report.mean_tol, report.cov_tol, report.diverging
    );
    Ok(())
}
