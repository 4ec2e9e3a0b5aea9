//! Observe only half of the domain. Inside the observed region the posterior
//! interpolates with vanishing variance; far away it keeps the prior's
//! uncertainty — conditioning is local information, not global certainty.
//!
//! ```bash
//! cargo run --release --example partial_observation
//! ```

use gpcond::{condition, nested_design, Domain, GpPrior, Kernel, MeanFunction, ObservationSet, Point};

fn main() -> gpcond::Result<()> {
    let prior = GpPrior::new(
        Domain::unit_interval(),
        MeanFunction::Zero,
        Kernel::rbf(0.05, 1.0)?,
    )?;

    // A dense design on S = [0, 0.5] only.
    let region = Domain::interval(0.0, 0.5)?;
    let design = nested_design(&region, 65)?;
    let g = |t: &Point| (8.0 * t.x()).sin();
    let values: Vec<f64> = design.points().iter().map(g).collect();
    let obs = ObservationSet::points(design.points(), &values, 0.0)?;
    let post = condition(&prior, &obs)?;

    println!("RBF(0.05) prior observed on 65 points of S = [0, 0.5] only");
    println!();
    println!("{:>6} {:>12} {:>12} {:>10}", "t", "mean", "variance", "in S?");
    for i in 0..=10 {
        let t = Point::scalar(i as f64 / 10.0);
        println!(
            "{:>6.2} {:>12.6} {:>12.6} {:>10}",
            t.x(),
            post.posterior_mean(&t),
            post.posterior_var(&t),
            if t.x() <= 0.5 { "yes" } else { "no" }
        );
    }

    let inside = post.posterior_var(&Point::scalar(0.25));
    let outside = post.posterior_var(&Point::scalar(1.0));
    println!();
    println!("variance at 0.25 (observed region): {inside:.3e}");
    println!("variance at 1.00 (ten lengthscales away): {outside:.6}");
    Ok(())
}
