//! Nested low-discrepancy designs: the prefix property, fill-distance decay,
//! and distances measured in the kernel pseudo-metric.
//!
//! ```bash
//! cargo run --release --example nested_designs
//! ```

use gpcond::{fill_distance, kernel_metric, nested_design, Domain, FillMetric, Kernel, Point};

fn main() -> gpcond::Result<()> {
    let domain = Domain::unit_interval();

    let design8 = nested_design(&domain, 8)?;
    println!("first 8 design points on [0,1] (radical-inverse enumeration):");
    for p in design8.points() {
        print!("  {:.4}", p.x());
    }
    println!();

    // Growing the design only appends points.
    let design4 = nested_design(&domain, 4)?;
    assert_eq!(design4.points(), &design8.points()[..4]);
    println!("prefix property: the 4-point design is the first half of the 8-point design");
    println!();

    // Fill distance against a fine probe grid decays as the design grows.
    let probe = domain.uniform_grid(1001);
    println!("{:>6} {:>14}", "n", "fill distance");
    for n in [2usize, 4, 8, 16, 32, 64, 128] {
        let design = nested_design(&domain, n)?;
        let fill = fill_distance(&design, &probe, FillMetric::Euclidean)?;
        println!("{n:>6} {fill:>14.6}");
    }
    println!();

    // The kernel metric warps distances by the prior's smoothness: under a
    // short lengthscale, moderately separated points are already almost
    // maximally far apart.
    let rbf_long = Kernel::rbf(1.0, 1.0)?;
    let rbf_short = Kernel::rbf(0.1, 1.0)?;
    let (a, b) = (Point::scalar(0.4), Point::scalar(0.6));
    println!("kernel metric between t = 0.4 and t = 0.6:");
    println!("  euclidean          {:.6}", a.euclidean_distance(&b));
    println!("  rbf, lengthscale 1 {:.6}", kernel_metric(&rbf_long, &a, &b));
    println!("  rbf, lengthscale .1 {:.6}", kernel_metric(&rbf_short, &a, &b));
    println!("  saturation bound   {:.6}", 2.0f64.sqrt());

    // Fill distance can be measured in the kernel metric as well.
    let design = nested_design(&domain, 16)?;
    let fill_k = fill_distance(&design, &probe, FillMetric::Kernel(&rbf_short))?;
    println!();
    println!("fill distance of the 16-point design in the rbf(0.1) metric: {fill_k:.6}");
    Ok(())
}
