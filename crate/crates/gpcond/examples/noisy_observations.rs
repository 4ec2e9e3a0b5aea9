//! Noisy observations: with `σ² > 0` the shifted Gram matrix is positive
//! definite, conditioning runs through a Cholesky solve, and the posterior
//! regresses towards the data instead of interpolating it.
//!
//! ```bash
//! cargo run --release --example noisy_observations
//! ```

use gpcond::{condition, Domain, GpPrior, Kernel, MeanFunction, ObservationSet, Point};

fn main() -> gpcond::Result<()> {
    let prior = GpPrior::new(
        Domain::unit_interval(),
        MeanFunction::Zero,
        Kernel::matern52(0.3, 1.0)?,
    )?;
    let points: Vec<Point> = [0.1, 0.35, 0.6, 0.85]
        .iter()
        .map(|&x| Point::scalar(x))
        .collect();
    let values = [0.8, -0.3, 0.5, -0.9];

    println!("Matérn-5/2 prior conditioned on 4 observations at varying noise levels");
    println!();
    println!(
        "{:>10} {:>16} {:>16}",
        "sigma^2", "max |m(s)-y|", "max var at s"
    );
    for sigma2 in [0.0, 1e-6, 1e-3, 1e-1] {
        let obs = ObservationSet::points(&points, &values, sigma2)?;
        let post = condition(&prior, &obs)?;
        let mut worst_fit = 0.0f64;
        let mut worst_var = 0.0f64;
        for (p, &y) in points.iter().zip(&values) {
            worst_fit = worst_fit.max((post.posterior_mean(p) - y).abs());
            worst_var = worst_var.max(post.posterior_var(p));
        }
        println!("{sigma2:>10.0e} {worst_fit:>16.3e} {worst_var:>16.3e}");
    }
    println!();
    println!("zero noise interpolates; growing noise shrinks the fit towards the prior mean");
    Ok(())
}
