//! Index-set geometry: points of a box domain in `ℝᵈ`, deterministic nested
//! point designs that become dense as they grow, the pseudo-metric induced by
//! a kernel, and fill-distance diagnostics.
//!
//! The designs are Halton point sets (van der Corput radical inverses in the
//! first `d` prime bases, affinely mapped onto the box). The sequence is
//! deterministic and nested by construction: the first `n` points of a longer
//! design are exactly the `n`-point design.

use crate::error::{GpError, Result};
use crate::kernels::Kernel;

/// A point of the index set `T ⊂ ℝᵈ`.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    coords: Vec<f64>,
}

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Point { coords }
    }

    /// One-dimensional point.
    pub fn scalar(x: f64) -> Self {
        Point { coords: vec![x] }
    }

    pub fn coords(&self) -> &[f64] {
        &self.coords
    }

    pub fn dim(&self) -> usize {
        self.coords.len()
    }

    /// Coordinate of a 1-D point; panics on higher dimensions.
    pub fn x(&self) -> f64 {
        assert_eq!(self.coords.len(), 1, "Point::x requires a 1-D point");
        self.coords[0]
    }

    pub fn is_finite(&self) -> bool {
        self.coords.iter().all(|c| c.is_finite())
    }

    /// Euclidean distance to another point of the same dimension.
    pub fn euclidean_distance(&self, other: &Point) -> f64 {
        self.coords
            .iter()
            .zip(&other.coords)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }
}

impl From<f64> for Point {
    fn from(x: f64) -> Self {
        Point::scalar(x)
    }
}

/// An axis-aligned box `[a₁,b₁] × … × [a_d,b_d]`.
#[derive(Debug, Clone, PartialEq)]
pub struct Domain {
    bounds: Vec<(f64, f64)>,
}

impl Domain {
    pub fn new(bounds: Vec<(f64, f64)>) -> Result<Self> {
        if bounds.is_empty() {
            return Err(GpError::InvalidArgument(
                "domain must have at least one dimension".into(),
            ));
        }
        for (i, (a, b)) in bounds.iter().enumerate() {
            if !a.is_finite() || !b.is_finite() {
                return Err(GpError::InvalidArgument(format!(
                    "domain bounds must be finite (dimension {i})"
                )));
            }
            if a > b {
                return Err(GpError::InvalidArgument(format!(
                    "domain bounds must satisfy a <= b (dimension {i}: [{a}, {b}])"
                )));
            }
        }
        Ok(Domain { bounds })
    }

    /// The 1-D interval `[a, b]`.
    pub fn interval(a: f64, b: f64) -> Result<Self> {
        Domain::new(vec![(a, b)])
    }

    /// The unit interval `[0, 1]`.
    pub fn unit_interval() -> Self {
        Domain {
            bounds: vec![(0.0, 1.0)],
        }
    }

    pub fn dim(&self) -> usize {
        self.bounds.len()
    }

    pub fn bounds(&self) -> &[(f64, f64)] {
        &self.bounds
    }

    pub fn contains(&self, p: &Point) -> bool {
        p.dim() == self.dim()
            && p.coords()
                .iter()
                .zip(&self.bounds)
                .all(|(x, (a, b))| x.is_finite() && *a <= *x && *x <= *b)
    }

    /// True if every point of `other` lies in `self`.
    pub fn contains_domain(&self, other: &Domain) -> bool {
        self.dim() == other.dim()
            && other
                .bounds
                .iter()
                .zip(&self.bounds)
                .all(|((oa, ob), (a, b))| a <= oa && ob <= b)
    }

    pub fn center(&self) -> Point {
        Point::new(self.bounds.iter().map(|(a, b)| 0.5 * (a + b)).collect())
    }

    /// `size` points equispaced along the box diagonal (the uniform grid in 1-D).
    pub fn uniform_grid(&self, size: usize) -> Vec<Point> {
        if size == 1 {
            return vec![self.center()];
        }
        (0..size)
            .map(|i| {
                let f = i as f64 / (size - 1) as f64;
                Point::new(self.bounds.iter().map(|(a, b)| a + f * (b - a)).collect())
            })
            .collect()
    }
}

/// A finite prefix of the fixed dense enumeration of a domain.
///
/// `NestedDesign` values of different sizes over the same domain agree on
/// their common prefix, so growing the design only appends points.
#[derive(Debug, Clone, PartialEq)]
pub struct NestedDesign {
    domain: Domain,
    points: Vec<Point>,
}

impl NestedDesign {
    pub fn domain(&self) -> &Domain {
        &self.domain
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

/// Radical inverse of `index` in the given base.
///
/// Writing `index = d₀ + d₁·base + d₂·base² + …`, the radical inverse is
/// `d₀/base + d₁/base² + …` — digit reversal across the radix point. For a
/// fixed base the sequence over `index = 0, 1, 2, …` is dense in `[0, 1)`,
/// and prefixes of length `baseᵏ` are exactly the grids `{ j·base⁻ᵏ }`.
pub fn van_der_corput(index: u64, base: u64) -> Result<f64> {
    if base < 2 {
        return Err(GpError::InvalidArgument(format!(
            "van der Corput base must be >= 2, got {base}"
        )));
    }
    let mut i = index;
    let mut x = 0.0;
    let mut denom = 1.0;
    while i > 0 {
        denom *= base as f64;
        x += (i % base) as f64 / denom;
        i /= base;
    }
    Ok(x)
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n.is_multiple_of(d) {
            return false;
        }
        d += 1;
    }
    true
}

/// The `i`-th prime (0-based): 2, 3, 5, 7, …
fn nth_prime(i: usize) -> u64 {
    let mut count = 0;
    let mut n = 1;
    loop {
        n += 1;
        if is_prime(n) {
            if count == i {
                return n;
            }
            count += 1;
        }
    }
}

/// First `n` points of the fixed dense enumeration of `domain`.
///
/// Coordinate `i` runs the van der Corput sequence in the `i`-th prime base
/// (the Halton construction), affinely mapped onto `[aᵢ, bᵢ]`. The enumeration
/// starts at index 0, so the first point is always the lower corner of the
/// box. Distinctness of the points follows from the injectivity of the
/// radical inverse in the base-2 coordinate.
pub fn nested_design(domain: &Domain, n: usize) -> Result<NestedDesign> {
    if n == 0 {
        return Err(GpError::InvalidArgument(
            "nested design size must be >= 1".into(),
        ));
    }
    let bases: Vec<u64> = (0..domain.dim()).map(nth_prime).collect();
    let mut points = Vec::with_capacity(n);
    for index in 0..n as u64 {
        let coords = domain
            .bounds()
            .iter()
            .zip(&bases)
            .map(|((a, b), &base)| {
                let u = van_der_corput(index, base).expect("prime base is >= 2");
                a + (b - a) * u
            })
            .collect();
        points.push(Point::new(coords));
    }
    Ok(NestedDesign {
        domain: domain.clone(),
        points,
    })
}

/// Pseudo-metric induced by a kernel:
/// `d_k(t₁,t₂) = sqrt(k(t₁,t₁) − 2·k(t₁,t₂) + k(t₂,t₂))`.
///
/// The radicand is non-negative for positive semi-definite kernels; round-off
/// can push it slightly below zero, so it is clamped before the square root.
/// The diagonal terms are summed before the cross term is subtracted, which
/// makes the result exactly invariant under swapping the arguments.
pub fn kernel_metric(kernel: &Kernel, t1: &Point, t2: &Point) -> f64 {
    let d2 = (kernel.eval(t1, t1) + kernel.eval(t2, t2)) - 2.0 * kernel.eval(t1, t2);
    d2.max(0.0).sqrt()
}

/// Distance notion used by [`fill_distance`].
#[derive(Debug, Clone, Copy)]
pub enum FillMetric<'a> {
    Euclidean,
    Kernel(&'a Kernel),
}

impl FillMetric<'_> {
    fn distance(&self, a: &Point, b: &Point) -> f64 {
        match self {
            FillMetric::Euclidean => a.euclidean_distance(b),
            FillMetric::Kernel(k) => kernel_metric(k, a, b),
        }
    }
}

/// Largest distance from any probe point to its nearest design point.
///
/// A density diagnostic: for designs that become dense in the probe region,
/// the fill distance over a fixed fine probe grid decreases towards zero.
pub fn fill_distance(design: &NestedDesign, probe_grid: &[Point], metric: FillMetric) -> Result<f64> {
    if design.is_empty() {
        return Err(GpError::InvalidArgument(
            "fill distance requires a non-empty design".into(),
        ));
    }
    if probe_grid.is_empty() {
        return Err(GpError::InvalidArgument(
            "fill distance requires a non-empty probe grid".into(),
        ));
    }
    let mut worst = 0.0f64;
    for probe in probe_grid {
        let nearest = design
            .points()
            .iter()
            .map(|p| metric.distance(probe, p))
            .fold(f64::INFINITY, f64::min);
        worst = worst.max(nearest);
    }
    Ok(worst)
}
