//! Prior specification: covariance functions, mean functions, observation
//! functionals, and the cross-covariances between functionals that populate
//! the Gram matrices and cross-covariance vectors of the posterior update.
//!
//! Observation functionals are bounded linear functionals applied to paths.
//! Three kinds are supported: point evaluation `f ↦ f(t)`, finite weighted
//! sums of point evaluations, and derivative evaluation `f ↦ f′(t)` on 1-D
//! domains. Cross-covariances extend the kernel bilinearly:
//!
//! ```text
//! cov(δ_s, δ_t) = k(s,t)      cov(∂_s, δ_t) = ∂₁k(s,t)      cov(∂_s, ∂_t) = ∂₁∂₂k(s,t)
//! ```
//!
//! Kernel derivatives are closed-form per family; no numerical
//! differentiation is used.

use std::fmt;
use std::sync::Arc;

use crate::domain::{Domain, Point};
use crate::error::{GpError, Result};
use crate::linalg::SymMatrix;

/// Covariance function of the prior process.
#[derive(Debug, Clone, PartialEq)]
pub enum Kernel {
    /// `k(s,t) = min(s,t)` on 1-D domains within `[0, ∞)`.
    Brownian,
    /// Squared exponential `σ²·exp(−‖s−t‖² / (2ℓ²))`.
    Rbf { lengthscale: f64, variance: f64 },
    /// Matérn ν=1/2 (exponential): `σ²·exp(−r/ℓ)`.
    Matern12 { lengthscale: f64, variance: f64 },
    /// Matérn ν=3/2: `σ²·(1 + √3·r/ℓ)·exp(−√3·r/ℓ)`.
    Matern32 { lengthscale: f64, variance: f64 },
    /// Matérn ν=5/2: `σ²·(1 + √5·r/ℓ + 5r²/(3ℓ²))·exp(−√5·r/ℓ)`.
    Matern52 { lengthscale: f64, variance: f64 },
    /// `σ²·⟨s, t⟩`.
    Linear { variance: f64 },
}

fn check_positive(name: &str, value: f64) -> Result<f64> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(GpError::InvalidArgument(format!(
            "{name} must be positive and finite, got {value}"
        )))
    }
}

impl Kernel {
    pub fn brownian() -> Self {
        Kernel::Brownian
    }

    pub fn rbf(lengthscale: f64, variance: f64) -> Result<Self> {
        Ok(Kernel::Rbf {
            lengthscale: check_positive("lengthscale", lengthscale)?,
            variance: check_positive("variance", variance)?,
        })
    }

    pub fn matern12(lengthscale: f64, variance: f64) -> Result<Self> {
        Ok(Kernel::Matern12 {
            lengthscale: check_positive("lengthscale", lengthscale)?,
            variance: check_positive("variance", variance)?,
        })
    }

    pub fn matern32(lengthscale: f64, variance: f64) -> Result<Self> {
        Ok(Kernel::Matern32 {
            lengthscale: check_positive("lengthscale", lengthscale)?,
            variance: check_positive("variance", variance)?,
        })
    }

    pub fn matern52(lengthscale: f64, variance: f64) -> Result<Self> {
        Ok(Kernel::Matern52 {
            lengthscale: check_positive("lengthscale", lengthscale)?,
            variance: check_positive("variance", variance)?,
        })
    }

    pub fn linear(variance: f64) -> Result<Self> {
        Ok(Kernel::Linear {
            variance: check_positive("variance", variance)?,
        })
    }

    /// Whether sample paths are differentiable, i.e. whether derivative
    /// functionals are defined for this kernel. Brownian and Matérn-1/2
    /// paths are continuous but nowhere differentiable.
    pub fn differentiable(&self) -> bool {
        !matches!(self, Kernel::Brownian | Kernel::Matern12 { .. })
    }

    /// `k(t₁, t₂)`.
    pub fn eval(&self, t1: &Point, t2: &Point) -> f64 {
        match *self {
            Kernel::Brownian => t1.x().min(t2.x()),
            Kernel::Rbf {
                lengthscale,
                variance,
            } => {
                let d2: f64 = t1
                    .coords()
                    .iter()
                    .zip(t2.coords())
                    .map(|(a, b)| (a - b) * (a - b))
                    .sum();
                variance * (-d2 / (2.0 * lengthscale * lengthscale)).exp()
            }
            Kernel::Matern12 {
                lengthscale,
                variance,
            } => {
                let r = t1.euclidean_distance(t2);
                variance * (-r / lengthscale).exp()
            }
            Kernel::Matern32 {
                lengthscale,
                variance,
            } => {
                let s = 3f64.sqrt() * t1.euclidean_distance(t2) / lengthscale;
                variance * (1.0 + s) * (-s).exp()
            }
            Kernel::Matern52 {
                lengthscale,
                variance,
            } => {
                let s = 5f64.sqrt() * t1.euclidean_distance(t2) / lengthscale;
                variance * (1.0 + s + s * s / 3.0) * (-s).exp()
            }
            Kernel::Linear { variance } => {
                variance
                    * t1.coords()
                        .iter()
                        .zip(t2.coords())
                        .map(|(a, b)| a * b)
                        .sum::<f64>()
            }
        }
    }

    /// `∂k(s,t)/∂s` for 1-D points. Only defined for differentiable families.
    fn d1(&self, s: f64, t: f64) -> f64 {
        let u = s - t;
        let r = u.abs();
        match *self {
            Kernel::Rbf {
                lengthscale,
                variance,
            } => {
                let l2 = lengthscale * lengthscale;
                -variance * u / l2 * (-u * u / (2.0 * l2)).exp()
            }
            Kernel::Matern32 {
                lengthscale,
                variance,
            } => {
                let a = 3f64.sqrt() / lengthscale;
                -variance * a * a * u * (-a * r).exp()
            }
            Kernel::Matern52 {
                lengthscale,
                variance,
            } => {
                let a = 5f64.sqrt() / lengthscale;
                -variance * a * a * u / 3.0 * (1.0 + a * r) * (-a * r).exp()
            }
            Kernel::Linear { variance } => variance * t,
            Kernel::Brownian | Kernel::Matern12 { .. } => {
                unreachable!("derivative of non-differentiable kernel")
            }
        }
    }

    /// `∂²k(s,t)/∂s∂t` for 1-D points. Only defined for differentiable families.
    fn d1d2(&self, s: f64, t: f64) -> f64 {
        let u = s - t;
        let r = u.abs();
        match *self {
            Kernel::Rbf {
                lengthscale,
                variance,
            } => {
                let l2 = lengthscale * lengthscale;
                variance / l2 * (1.0 - u * u / l2) * (-u * u / (2.0 * l2)).exp()
            }
            Kernel::Matern32 {
                lengthscale,
                variance,
            } => {
                let a = 3f64.sqrt() / lengthscale;
                variance * a * a * (1.0 - a * r) * (-a * r).exp()
            }
            Kernel::Matern52 {
                lengthscale,
                variance,
            } => {
                let a = 5f64.sqrt() / lengthscale;
                variance * a * a / 3.0 * (1.0 + a * r - a * a * u * u) * (-a * r).exp()
            }
            Kernel::Linear { variance } => variance,
            Kernel::Brownian | Kernel::Matern12 { .. } => {
                unreachable!("derivative of non-differentiable kernel")
            }
        }
    }
}

/// Mean function of the prior process.
#[derive(Clone)]
pub enum MeanFunction {
    Zero,
    Constant(f64),
    /// Arbitrary callable mean, evaluated pointwise. Treated as
    /// non-differentiable: derivative functionals are rejected.
    Custom(Arc<dyn Fn(&Point) -> f64 + Send + Sync>),
}

impl fmt::Debug for MeanFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            MeanFunction::Zero => write!(f, "Zero"),
            MeanFunction::Constant(c) => write!(f, "Constant({c})"),
            MeanFunction::Custom(_) => write!(f, "Custom(..)"),
        }
    }
}

impl MeanFunction {
    pub fn eval(&self, t: &Point) -> f64 {
        match self {
            MeanFunction::Zero => 0.0,
            MeanFunction::Constant(c) => *c,
            MeanFunction::Custom(f) => f(t),
        }
    }
}

/// A bounded linear functional applied to paths.
#[derive(Debug, Clone)]
pub enum ObservationFunctional {
    /// `f ↦ f(t)`.
    PointEval(Point),
    /// `f ↦ Σᵢ wᵢ·f(tᵢ)`.
    WeightedSum(Vec<(f64, Point)>),
    /// `f ↦ f′(t)`; 1-D domains and differentiable kernels only.
    DerivEval(Point),
}

impl ObservationFunctional {
    pub fn point(t: impl Into<Point>) -> Self {
        ObservationFunctional::PointEval(t.into())
    }

    pub fn deriv(t: impl Into<Point>) -> Self {
        ObservationFunctional::DerivEval(t.into())
    }

    pub fn weighted_sum(terms: Vec<(f64, Point)>) -> Result<Self> {
        if terms.is_empty() {
            return Err(GpError::InvalidArgument(
                "weighted sum needs at least one term".into(),
            ));
        }
        if terms.iter().any(|(w, _)| !w.is_finite()) {
            return Err(GpError::InvalidArgument(
                "weighted sum weights must be finite".into(),
            ));
        }
        Ok(ObservationFunctional::WeightedSum(terms))
    }

    /// Check that this functional can be paired with the given kernel.
    pub fn validate_for(&self, kernel: &Kernel) -> Result<()> {
        if let ObservationFunctional::DerivEval(t) = self {
            if t.dim() != 1 {
                return Err(GpError::UnsupportedFunctional(
                    "derivative evaluation is only defined on 1-D domains".into(),
                ));
            }
            if !kernel.differentiable() {
                return Err(GpError::UnsupportedFunctional(format!(
                    "derivative evaluation requires a differentiable kernel, got {kernel:?}"
                )));
            }
        }
        Ok(())
    }
}

/// Cross-covariance of two observation functionals under the kernel.
///
/// Bilinear extension of `k`; derivative pairings use the closed-form kernel
/// derivatives. Symmetric in its functional arguments.
pub fn cross_cov(
    kernel: &Kernel,
    a: &ObservationFunctional,
    b: &ObservationFunctional,
) -> Result<f64> {
    use ObservationFunctional::*;
    a.validate_for(kernel)?;
    b.validate_for(kernel)?;
    let v = match (a, b) {
        (PointEval(s), PointEval(t)) => kernel.eval(s, t),
        (DerivEval(s), PointEval(t)) => kernel.d1(s.x(), t.x()),
        (PointEval(s), DerivEval(t)) => kernel.d1(t.x(), s.x()),
        (DerivEval(s), DerivEval(t)) => kernel.d1d2(s.x(), t.x()),
        (WeightedSum(terms), other) => {
            let mut acc = 0.0;
            for (w, t) in terms {
                acc += w * cross_cov(kernel, &PointEval(t.clone()), other)?;
            }
            acc
        }
        (other, WeightedSum(terms)) => {
            let mut acc = 0.0;
            for (w, t) in terms {
                acc += w * cross_cov(kernel, other, &PointEval(t.clone()))?;
            }
            acc
        }
    };
    Ok(v)
}

/// Apply an observation functional to the mean function (`E a(X) = a(m)`).
///
/// Derivative functionals are exact for `Zero`/`Constant` means (both have
/// derivative zero) and rejected for `Custom` means.
pub fn mean_apply(mean: &MeanFunction, a: &ObservationFunctional) -> Result<f64> {
    use ObservationFunctional::*;
    let v = match (mean, a) {
        (_, PointEval(t)) => mean.eval(t),
        (_, WeightedSum(terms)) => terms.iter().map(|(w, t)| w * mean.eval(t)).sum(),
        (MeanFunction::Zero | MeanFunction::Constant(_), DerivEval(_)) => 0.0,
        (MeanFunction::Custom(_), DerivEval(_)) => {
            return Err(GpError::UnsupportedFunctional(
                "derivative evaluation of a custom mean function is not defined".into(),
            ))
        }
    };
    Ok(v)
}

/// Gram matrix `(k(pᵢ, pⱼ))ᵢⱼ` over a point set.
///
/// The upper triangle is evaluated and mirrored, so the result is symmetric
/// bit-for-bit.
pub fn gram(kernel: &Kernel, points: &[Point]) -> SymMatrix {
    SymMatrix::from_fn(points.len(), |i, j| kernel.eval(&points[i], &points[j]))
}

/// Gram matrix of observation functionals: `(cov(aᵢ, aⱼ))ᵢⱼ`.
pub fn gram_functionals(
    kernel: &Kernel,
    functionals: &[ObservationFunctional],
) -> Result<SymMatrix> {
    let n = functionals.len();
    let mut entries = vec![0.0; n * n];
    for i in 0..n {
        for j in i..n {
            let v = cross_cov(kernel, &functionals[i], &functionals[j])?;
            entries[i * n + j] = v;
            entries[j * n + i] = v;
        }
    }
    SymMatrix::from_rows(n, entries)
}

/// The prior Gaussian process: domain, mean function, covariance function.
#[derive(Debug, Clone)]
pub struct GpPrior {
    domain: Domain,
    mean: MeanFunction,
    kernel: Kernel,
}

impl GpPrior {
    pub fn new(domain: Domain, mean: MeanFunction, kernel: Kernel) -> Result<Self> {
        if let Kernel::Brownian = kernel {
            if domain.dim() != 1 || domain.bounds()[0].0 < 0.0 {
                return Err(GpError::InvalidArgument(
                    "the Brownian kernel is defined on 1-D domains within [0, inf)".into(),
                ));
            }
        }
        Ok(GpPrior {
            domain,
            mean,
            kernel,
        })
    }

    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn mean(&self) -> &MeanFunction {
        &self.mean
    }

    pub fn kernel(&self) -> &Kernel {
        &self.kernel
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg;

    fn pt(x: f64) -> Point {
        Point::scalar(x)
    }

    #[test]
    fn kernel_eval_hand_values() {
        let rbf = Kernel::rbf(1.0, 1.0).unwrap();
        assert_eq!(rbf.eval(&pt(0.3), &pt(0.3)), 1.0);
        assert!((rbf.eval(&pt(0.0), &pt(1.0)) - (-0.5f64).exp()).abs() < 1e-16);

        let brownian = Kernel::brownian();
        assert_eq!(brownian.eval(&pt(0.3), &pt(0.7)), 0.3);

        let linear = Kernel::linear(2.0).unwrap();
        assert_eq!(linear.eval(&pt(3.0), &pt(4.0)), 24.0);
    }

    #[test]
    fn kernel_parameter_validation() {
        assert!(Kernel::rbf(0.0, 1.0).is_err());
        assert!(Kernel::rbf(1.0, -1.0).is_err());
        assert!(Kernel::matern32(f64::NAN, 1.0).is_err());
    }

    #[test]
    fn gram_hand_values() {
        let brownian = Kernel::brownian();
        let g = gram(&brownian, &[pt(0.5), pt(1.0)]);
        assert_eq!(g.get(0, 0), 0.5);
        assert_eq!(g.get(0, 1), 0.5);
        assert_eq!(g.get(1, 0), 0.5);
        assert_eq!(g.get(1, 1), 1.0);

        let empty = gram(&brownian, &[]);
        assert_eq!(empty.n(), 0);

        let rbf = Kernel::rbf(0.5, 2.5).unwrap();
        let g = gram(&rbf, &[pt(0.1), pt(0.4), pt(0.9)]);
        for i in 0..3 {
            assert_eq!(g.get(i, i), 2.5);
        }
    }

    #[test]
    fn gram_psd_all_families() {
        // Gram eigenvalues must stay above -1e-10 * lambda_max on pseudo-random sets.
        let kernels = [
            Kernel::brownian(),
            Kernel::rbf(0.2, 1.0).unwrap(),
            Kernel::matern12(0.3, 2.0).unwrap(),
            Kernel::matern32(0.3, 1.5).unwrap(),
            Kernel::matern52(0.5, 0.5).unwrap(),
            Kernel::linear(1.0).unwrap(),
        ];
        let mut state = 0xdeadbeefu64;
        let mut next = || {
            state ^= state << 13;
            state ^= state >> 7;
            state ^= state << 17;
            (state >> 11) as f64 / (1u64 << 53) as f64
        };
        for k in &kernels {
            for &n in &[5usize, 17, 40] {
                let pts: Vec<Point> = (0..n).map(|_| pt(next())).collect();
                let g = gram(k, &pts);
                let dec = linalg::eigh_sym(&g).unwrap();
                let lmax = dec.eigenvalues().last().copied().unwrap_or(0.0).max(0.0);
                let lmin = dec.eigenvalues()[0];
                assert!(
                    lmin >= -1e-10 * lmax.max(1e-300),
                    "kernel {k:?} gram has eigenvalue {lmin:e} (lmax {lmax:e})"
                );
            }
        }
    }

    #[test]
    fn cross_cov_matches_kernel_on_point_evals() {
        let k = Kernel::matern52(0.4, 1.3).unwrap();
        let (s, t) = (pt(0.2), pt(0.9));
        let via_cc = cross_cov(
            &k,
            &ObservationFunctional::point(0.2),
            &ObservationFunctional::point(0.9),
        )
        .unwrap();
        assert_eq!(via_cc.to_bits(), k.eval(&s, &t).to_bits());
    }

    #[test]
    fn cross_cov_derivative_hand_values() {
        // RBF: d1 at coincident points vanishes; d1d2 at zero lag is sigma^2/l^2.
        let rbf = Kernel::rbf(0.5, 2.0).unwrap();
        let d = ObservationFunctional::deriv(0.3);
        let p = ObservationFunctional::point(0.3);
        assert_eq!(cross_cov(&rbf, &d, &p).unwrap(), 0.0);
        let dd = cross_cov(&rbf, &d, &d).unwrap();
        assert!((dd - 2.0 / 0.25).abs() < 1e-12);
    }

    #[test]
    fn cross_cov_derivative_finite_difference() {
        // Central differences against the closed forms, h = 1e-5, tol 1e-6.
        let kernels = [
            Kernel::rbf(0.7, 1.2).unwrap(),
            Kernel::matern52(0.6, 0.9).unwrap(),
        ];
        let h = 1e-5;
        for k in &kernels {
            for (s, t) in [(0.2, 0.8), (0.5, 0.45), (0.9, 0.1)] {
                let dp = cross_cov(
                    &k.clone(),
                    &ObservationFunctional::deriv(s),
                    &ObservationFunctional::point(t),
                )
                .unwrap();
                let fd = (k.eval(&pt(s + h), &pt(t)) - k.eval(&pt(s - h), &pt(t))) / (2.0 * h);
                assert!(
                    (dp - fd).abs() < 1e-6,
                    "d1 mismatch for {k:?} at ({s},{t}): {dp} vs {fd}"
                );
                // Mixed second derivative via nested central differences.
                let dd = cross_cov(
                    &k.clone(),
                    &ObservationFunctional::deriv(s),
                    &ObservationFunctional::deriv(t),
                )
                .unwrap();
                let fd2 = (k.eval(&pt(s + h), &pt(t + h)) - k.eval(&pt(s + h), &pt(t - h))
                    - k.eval(&pt(s - h), &pt(t + h))
                    + k.eval(&pt(s - h), &pt(t - h)))
                    / (4.0 * h * h);
                assert!(
                    (dd - fd2).abs() < 1e-5,
                    "d1d2 mismatch for {k:?} at ({s},{t}): {dd} vs {fd2}"
                );
            }
        }
    }

    #[test]
    fn cross_cov_symmetry() {
        let k = Kernel::rbf(0.5, 1.0).unwrap();
        let funs = [
            ObservationFunctional::point(0.2),
            ObservationFunctional::deriv(0.7),
            ObservationFunctional::weighted_sum(vec![(2.0, pt(0.1)), (-1.5, pt(0.8))]).unwrap(),
        ];
        for a in &funs {
            for b in &funs {
                let ab = cross_cov(&k, a, b).unwrap();
                let ba = cross_cov(&k, b, a).unwrap();
                assert!((ab - ba).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cross_cov_weighted_sum_linearity() {
        let k = Kernel::matern32(0.3, 1.0).unwrap();
        let b = ObservationFunctional::point(0.6);
        let ws =
            ObservationFunctional::weighted_sum(vec![(2.0, pt(0.1)), (0.5, pt(0.9))]).unwrap();
        let direct = cross_cov(&k, &ws, &b).unwrap();
        let by_hand = 2.0 * k.eval(&pt(0.1), &pt(0.6)) + 0.5 * k.eval(&pt(0.9), &pt(0.6));
        assert!((direct - by_hand).abs() < 1e-12);

        // Single-term sum: scaling only.
        let w2 = ObservationFunctional::weighted_sum(vec![(2.0, pt(0.3))]).unwrap();
        let got = cross_cov(&k, &w2, &b).unwrap();
        assert!((got - 2.0 * k.eval(&pt(0.3), &pt(0.6))).abs() < 1e-15);
    }

    #[test]
    fn cross_cov_rejects_derivatives_of_rough_kernels() {
        for k in [Kernel::brownian(), Kernel::matern12(0.5, 1.0).unwrap()] {
            let err = cross_cov(
                &k,
                &ObservationFunctional::deriv(0.5),
                &ObservationFunctional::point(0.5),
            );
            assert!(matches!(err, Err(GpError::UnsupportedFunctional(_))));
        }
    }

    #[test]
    fn mean_apply_variants() {
        let d = ObservationFunctional::deriv(0.2);
        let p = ObservationFunctional::point(0.2);
        assert_eq!(mean_apply(&MeanFunction::Zero, &p).unwrap(), 0.0);
        assert_eq!(mean_apply(&MeanFunction::Constant(3.0), &p).unwrap(), 3.0);
        assert_eq!(mean_apply(&MeanFunction::Constant(3.0), &d).unwrap(), 0.0);
        let ws = ObservationFunctional::weighted_sum(vec![(2.0, pt(0.0)), (1.0, pt(1.0))]).unwrap();
        assert_eq!(mean_apply(&MeanFunction::Constant(3.0), &ws).unwrap(), 9.0);
        let custom = MeanFunction::Custom(Arc::new(|t: &Point| t.x() * t.x()));
        assert_eq!(mean_apply(&custom, &p).unwrap(), 0.04000000000000001);
        assert!(matches!(
            mean_apply(&custom, &d),
            Err(GpError::UnsupportedFunctional(_))
        ));
    }

    #[test]
    fn prior_rejects_brownian_off_halfline() {
        let d = Domain::interval(-1.0, 1.0).unwrap();
        assert!(GpPrior::new(d, MeanFunction::Zero, Kernel::brownian()).is_err());
        let ok = Domain::interval(0.0, 1.0).unwrap();
        assert!(GpPrior::new(ok, MeanFunction::Zero, Kernel::brownian()).is_ok());
    }
}
