//! Condition on values *and* slopes. Derivative functionals are exact for
//! smooth kernels (RBF, Matérn-3/2, Matérn-5/2, linear) through closed-form
//! kernel derivatives; rough kernels reject them.
//!
//! ```bash
//! cargo run --release --example derivative_observations
//! ```

use gpcond::{
    condition, Domain, GpPrior, Kernel, MeanFunction, ObservationFunctional, ObservationSet,
    Point,
};

fn main() -> gpcond::Result<()> {
    let prior = GpPrior::new(
        Domain::unit_interval(),
        MeanFunction::Zero,
        Kernel::rbf(0.4, 1.0)?,
    )?;

    // A value at 0.25, a vanishing slope at 0.25 (a local extremum), and a
    // value at 0.75.
    let obs = ObservationSet::new(
        vec![
            ObservationFunctional::point(0.25),
            ObservationFunctional::deriv(0.25),
            ObservationFunctional::point(0.75),
        ],
        vec![1.0, 0.0, -0.5],
        0.0,
    )?;
    let post = condition(&prior, &obs)?;

    println!("RBF prior conditioned on f(0.25) = 1, f'(0.25) = 0, f(0.75) = -0.5");
    println!();
    println!("{:>6} {:>12} {:>12}", "t", "mean", "variance");
    for i in 0..=10 {
        let t = Point::scalar(i as f64 / 10.0);
        println!(
            "{:>6.2} {:>12.6} {:>12.6}",
            t.x(),
            post.posterior_mean(&t),
            post.posterior_var(&t)
        );
    }

    // The slope constraint holds: finite differences of the posterior mean
    // at 0.25 vanish.
    let h = 1e-6;
    let slope = (post.posterior_mean(&Point::scalar(0.25 + h))
        - post.posterior_mean(&Point::scalar(0.25 - h)))
        / (2.0 * h);
    println!();
    println!("posterior mean slope at 0.25: {slope:.3e} (constrained to 0)");

    // Brownian paths have no derivatives; asking is an error, not an
    // approximation.
    let rough = GpPrior::new(
        Domain::unit_interval(),
        MeanFunction::Zero,
        Kernel::brownian(),
    )?;
    let bad = ObservationSet::new(
        vec![ObservationFunctional::deriv(0.5)],
        vec![0.0],
        0.0,
    )?;
    match condition(&rough, &bad) {
        Err(e) => println!("derivative of a Brownian prior rejected: {e}"),
        Ok(_) => unreachable!(),
    }
    Ok(())
}
