//! The truncated spectral pseudoinverse on a rank-deficient Gram matrix —
//! the engine behind noise-free conditioning when observation points repeat
//! information.
//!
//! ```bash
//! cargo run --release --example spectral_pseudoinverse
//! ```

use gpcond::{eigh_sym, pinv_psd, Point, PsdFactor, SymMatrix};

fn main() -> gpcond::Result<()> {
    // Three observation functionals, two of them identical: the Gram matrix
    // has rank 2 and no ordinary inverse.
    let kernel = gpcond::Kernel::rbf(0.5, 1.0)?;
    let points = [Point::scalar(0.2), Point::scalar(0.2), Point::scalar(0.8)];
    let a = gpcond::gram(&kernel, &points);

    let dec = eigh_sym(&a)?;
    println!("gram matrix of observations at (0.2, 0.2, 0.8):");
    for i in 0..3 {
        println!(
            "  [{:>9.6} {:>9.6} {:>9.6}]",
            a.get(i, 0),
            a.get(i, 1),
            a.get(i, 2)
        );
    }
    println!("eigenvalues: {:?}", dec.eigenvalues());
    println!();

    let factor = pinv_psd(&a, 1e-10)?;
    if let PsdFactor::Pinv { rank, cutoff, .. } = &factor {
        println!("pseudoinverse: rank {rank}, eigenvalue cutoff {cutoff:.3e}");
    }

    // Moore-Penrose identities: A A+ A = A and A+ A A+ = A+.
    let half = factor.half_rows();
    let pinv = SymMatrix::from_fn(3, |i, j| half.iter().map(|row| row[i] * row[j]).sum());
    let mut worst = 0.0f64;
    for i in 0..3 {
        for j in 0..3 {
            let apa: f64 = (0..3)
                .map(|l| {
                    (0..3)
                        .map(|m| a.get(i, l) * pinv.get(l, m) * a.get(m, j))
                        .sum::<f64>()
                })
                .sum();
            worst = worst.max((apa - a.get(i, j)).abs());
        }
    }
    println!("max |(A A+ A) - A| entry: {worst:.3e}");
    println!();

    // Duplicated observations collapse onto one effective datum: applying
    // the pseudoinverse to consistent values spreads the weight evenly.
    let alpha = factor.apply(&[1.0, 1.0, -0.5]);
    println!("weights for duplicate-consistent data [1, 1, -0.5]: {alpha:?}");
    println!("(the two copies of the 0.2 observation share their weight)");
    Ok(())
}
