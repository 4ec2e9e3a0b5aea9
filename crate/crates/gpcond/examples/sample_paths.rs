//! Draw prior and posterior sample paths on a grid. Sampling factors the
//! Gram matrix spectrally, so it handles the exactly singular covariances
//! that noise-free conditioning produces (zero variance at observed points).
//!
//! ```bash
//! cargo run --release --example sample_paths
//! ```

use gpcond::{
    condition, sample_paths, Domain, GpPrior, Kernel, MeanFunction, ObservationSet, Point,
};

fn main() -> gpcond::Result<()> {
    let prior = GpPrior::new(
        Domain::unit_interval(),
        MeanFunction::Zero,
        Kernel::matern32(0.3, 1.0)?,
    )?;
    let grid = prior.domain().uniform_grid(11);

    let prior_sample = sample_paths(&prior, &grid, 3, 7)?;
    println!("three prior paths (Matérn-3/2, lengthscale 0.3), seed 7:");
    print_paths(&grid, prior_sample.values());

    // Condition on two pinned values and sample again: every path passes
    // through the observations.
    let obs = ObservationSet::points(
        &[Point::scalar(0.2), Point::scalar(0.8)],
        &[1.0, -1.0],
        0.0,
    )?;
    let post = condition(&prior, &obs)?;
    let post_sample = sample_paths(&post, &grid, 3, 7)?;
    println!();
    println!("three posterior paths through f(0.2) = 1, f(0.8) = -1:");
    print_paths(&grid, post_sample.values());

    println!();
    println!(
        "every posterior path hits the observations: column t = 0.2 is pinned at 1, t = 0.8 at -1"
    );
    Ok(())
}

fn print_paths(grid: &[Point], rows: &[Vec<f64>]) {
    print!("  t:   ");
    for p in grid {
        print!("{:>7.2}", p.x());
    }
    println!();
    for (i, row) in rows.iter().enumerate() {
        print!("  p{i}:  ");
        for v in row {
            print!("{v:>7.2}");
        }
        println!();
    }
}
