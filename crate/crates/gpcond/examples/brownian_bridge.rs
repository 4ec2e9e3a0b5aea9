//! Condition Brownian motion on its endpoint and recover the Brownian
//! bridge: mean interpolates linearly to the pinned value and the covariance
//! collapses to `min(s,t) − s·t`.
//!
//! ```bash
//! cargo run --release --example brownian_bridge
//! ```

use gpcond::{condition, Domain, GpPrior, Kernel, MeanFunction, ObservationSet, Point};

fn main() -> gpcond::Result<()> {
    let prior = GpPrior::new(
        Domain::unit_interval(),
        MeanFunction::Zero,
        Kernel::brownian(),
    )?;

    // Pin the path at t = 1 to the value 2.
    let obs = ObservationSet::points(&[Point::scalar(1.0)], &[2.0], 0.0)?;
    let post = condition(&prior, &obs)?;

    println!("Brownian motion on [0,1], conditioned on X(1) = 2");
    println!();
    println!("{:>6} {:>14} {:>14} {:>14}", "t", "mean", "variance", "bridge var");
    for i in 0..=10 {
        let t = i as f64 / 10.0;
        let p = Point::scalar(t);
        let mean = post.posterior_mean(&p);
        let var = post.posterior_var(&p);
        let closed_form = t.min(1.0) - t * t; // min(t,t) - t^2 against obs at 1
        println!("{t:>6.2} {mean:>14.6} {var:>14.6} {closed_form:>14.6}");
    }

    // The conditioned process vanishes at the observation: the posterior
    // variance at t = 1 is exactly zero and the mean matches the datum.
    let end = Point::scalar(1.0);
    println!();
    println!(
        "at the observed point: mean = {}, variance = {}",
        post.posterior_mean(&end),
        post.posterior_var(&end)
    );
    Ok(())
}
