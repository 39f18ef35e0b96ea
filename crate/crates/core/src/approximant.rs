//! The semi-algebraic approximant `f(x) = min argmin_{y in Y} q(x, y)`.
//!
//! For fixed `x` the kernel restricts to a univariate polynomial in `y`,
//! which is minimized by a certified branch and bound: every cell of a
//! subdivision of `Y` gets a lower bound from its Taylor expansion at the
//! centre, and cells that cannot beat the incumbent by `epsilon / 2` are
//! discarded. A second left-first pass then returns the smallest `y` whose
//! value is within the tie threshold of the minimum.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use rayon::prelude::*;

use crate::cdkernel::CDKernel;
use crate::error::{Error, Result};
use crate::poly::{affine_compose, horner, taylor_shift};

/// Grid cells are never made finer than this in the normalized variable.
const MIN_HALF_WIDTH: f64 = 1e-13;
const MAX_DEPTH: u32 = 60;
const MIN_GRID: usize = 16;
const MAX_GRID: usize = 1024;
/// Points sampled to estimate the scale of `q` for relative precision.
const SCALE_PROBES: usize = 65;

/// How the minimization tolerance `epsilon` is fixed, in units of `q`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum Precision {
    /// `epsilon = rel * min_y q(x, y)` (estimated on a probe grid).
    Relative(f64),
    Absolute(f64),
    /// `epsilon = gamma / 2`.
    HalfGamma(f64),
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ApproxConfig {
    pub y_interval: (f64, f64),
    pub precision: Precision,
    /// Relative slack under which two values of `q` count as tied.
    pub tie_tol: f64,
}

impl Default for ApproxConfig {
    fn default() -> Self {
        ApproxConfig {
            y_interval: (-1.0, 1.0),
            precision: Precision::Relative(1e-6),
            tie_tol: 1e-9,
        }
    }
}

impl ApproxConfig {
    pub fn with_interval(mut self, lo: f64, hi: f64) -> Self {
        self.y_interval = (lo, hi);
        self
    }

    pub fn with_precision(mut self, precision: Precision) -> Self {
        self.precision = precision;
        self
    }

    pub fn validate(&self) -> Result<()> {
        let (lo, hi) = self.y_interval;
        if !(lo < hi && lo.is_finite() && hi.is_finite()) {
            return Err(Error::InvalidParameter(format!("empty y interval [{lo}, {hi}]")));
        }
        let eps = match self.precision {
            Precision::Relative(v) | Precision::Absolute(v) | Precision::HalfGamma(v) => v,
        };
        if !(eps > 0.0) {
            return Err(Error::InvalidParameter(format!("precision must be positive, got {eps}")));
        }
        if !(self.tie_tol >= 0.0) {
            return Err(Error::InvalidParameter("tie tolerance must be non-negative".into()));
        }
        Ok(())
    }
}

/// `sum_k k |c_k|`, a bound on the derivative of `sum_k c_k t^k` over [-1, 1].
pub fn derivative_bound(c: &[f64]) -> f64 {
    c.iter().enumerate().map(|(k, v)| k as f64 * v.abs()).sum()
}

/// Lower bound of the polynomial on `[center - r, center + r]`, plus its
/// value at the centre.
fn cell_bound(c: &[f64], center: f64, r: f64) -> (f64, f64) {
    let a = taylor_shift(c, center);
    let mut spread = 0.0;
    let mut rk = 1.0;
    for ak in &a[1..] {
        rk *= r;
        spread += ak.abs() * rk;
    }
    (a[0] - spread, a[0])
}

#[derive(Debug, Clone, Copy)]
struct Cell {
    lower: f64,
    center: f64,
    half: f64,
    depth: u32,
}

impl PartialEq for Cell {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}

impl Eq for Cell {}

impl PartialOrd for Cell {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Cell {
    // Max-heap on -lower, ties broken towards the left.
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .lower
            .total_cmp(&self.lower)
            .then_with(|| other.center.total_cmp(&self.center))
    }
}

/// Minimizes `sum_k c_k y^k` over `[lo, hi]`, returning the smallest `y`
/// (to about 1e-12 relative to the interval) with
/// `q(y) <= min q + epsilon + tie_tol |min q|`, and `q(y)`.
pub fn partial_argmin(c: &[f64], interval: (f64, f64), epsilon: f64, tie_tol: f64) -> Result<(f64, f64)> {
    let (lo, hi) = interval;
    if !(epsilon > 0.0) || !(lo < hi) {
        return Err(Error::InvalidParameter(format!(
            "partial_argmin needs epsilon > 0 and lo < hi (got {epsilon}, [{lo}, {hi}])"
        )));
    }
    if let Some(&bad) = c.iter().find(|v| !v.is_finite()) {
        return Err(Error::NonFinite {
            value: bad,
            location: c.to_vec(),
        });
    }
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let ct = if c.is_empty() { vec![0.0] } else { affine_compose(c, mid, half) };
    let to_y = |t: f64| (mid + half * t).clamp(lo, hi);

    let k = ((2.0 * derivative_bound(&ct) / epsilon).ceil() as usize).clamp(MIN_GRID, MAX_GRID);
    let h = 1.0 / k as f64;

    // Incumbent over the grid nodes, leftmost on ties.
    let mut best_t = -1.0;
    let mut best = horner(&ct, -1.0);
    for j in 1..=2 * k {
        let t = -1.0 + j as f64 * h;
        let v = horner(&ct, t);
        if v < best {
            best = v;
            best_t = t;
        }
    }

    let mut heap = BinaryHeap::with_capacity(2 * k);
    for j in 0..k {
        let center = -1.0 + (2 * j + 1) as f64 * h;
        let (lower, _) = cell_bound(&ct, center, h);
        heap.push(Cell {
            lower,
            center,
            half: h,
            depth: 0,
        });
    }
    while let Some(cell) = heap.pop() {
        if cell.lower >= best - 0.5 * epsilon {
            break;
        }
        let (_, at_center) = cell_bound(&ct, cell.center, 0.0);
        if at_center < best || (at_center == best && cell.center < best_t) {
            best = at_center;
            best_t = cell.center;
        }
        if cell.depth >= MAX_DEPTH || cell.half <= MIN_HALF_WIDTH {
            continue;
        }
        let half = 0.5 * cell.half;
        for center in [cell.center - half, cell.center + half] {
            let (lower, value) = cell_bound(&ct, center, half);
            if value < best {
                best = value;
                best_t = center;
            }
            if lower < best - 0.5 * epsilon {
                heap.push(Cell {
                    lower,
                    center,
                    half,
                    depth: cell.depth + 1,
                });
            }
        }
    }

    let threshold = best + 0.5 * epsilon + tie_tol * best.abs();
    let t = leftmost_below(&ct, threshold, h, k).unwrap_or(best_t).min(best_t);
    let y = to_y(t);
    Ok((y, horner(c, y)))
}

/// Smallest `t` in [-1, 1] with `q(t) <= threshold`, found by a left-first
/// descent through the initial grid cells.
fn leftmost_below(ct: &[f64], threshold: f64, h: f64, k: usize) -> Option<f64> {
    fn descend(ct: &[f64], threshold: f64, center: f64, half: f64, depth: u32) -> Option<f64> {
        let (lower, _) = cell_bound(ct, center, half);
        if lower > threshold {
            return None;
        }
        let left = center - half;
        if horner(ct, left) <= threshold {
            return Some(left);
        }
        if depth >= MAX_DEPTH || half <= MIN_HALF_WIDTH {
            return [center, center + half].into_iter().find(|&t| horner(ct, t) <= threshold);
        }
        let q = 0.5 * half;
        descend(ct, threshold, center - q, q, depth + 1).or_else(|| descend(ct, threshold, center + q, q, depth + 1))
    }
    (0..k).find_map(|j| descend(ct, threshold, -1.0 + (2 * j + 1) as f64 * h, h, 0))
}

/// Absolute tolerance for the polynomial `c` on `interval`.
fn resolve_epsilon(c: &[f64], interval: (f64, f64), precision: Precision) -> f64 {
    match precision {
        Precision::Absolute(e) => e,
        Precision::HalfGamma(g) => 0.5 * g,
        Precision::Relative(rel) => {
            let (lo, hi) = interval;
            let min = (0..SCALE_PROBES)
                .map(|j| horner(c, lo + (hi - lo) * j as f64 / (SCALE_PROBES - 1) as f64))
                .fold(f64::INFINITY, f64::min);
            let scale = if min.is_finite() && min > 0.0 {
                min
            } else {
                c.iter().fold(0.0f64, |a, v| a.max(v.abs()))
            };
            (rel * scale).max(f64::MIN_POSITIVE)
        }
    }
}

/// `f(x) = min argmin_{y in Y} q(x, y)`.
pub fn evaluate(kernel: &CDKernel, x: &[f64], cfg: &ApproxConfig) -> Result<f64> {
    cfg.validate()?;
    let c = kernel.specialize(x)?;
    let eps = resolve_epsilon(&c, cfg.y_interval, cfg.precision);
    let (y, _) = partial_argmin(&c, cfg.y_interval, eps, cfg.tie_tol)?;
    Ok(y)
}

/// [`evaluate`] over many points in parallel; output order follows input
/// order and the first failing point is reported by index.
pub fn evaluate_batch(kernel: &CDKernel, points: &[Vec<f64>], cfg: &ApproxConfig) -> Result<Vec<f64>> {
    cfg.validate()?;
    let results: Vec<Result<f64>> = points.par_iter().map(|x| evaluate(kernel, x, cfg)).collect();
    results
        .into_iter()
        .enumerate()
        .map(|(index, r)| {
            r.map_err(|e| Error::AtPoint {
                index,
                source: Box::new(e),
            })
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::basis::BasisSpec;
    use crate::cdkernel::{build_kernel, Filter};
    use crate::moments::{analytic_moment_matrix, AnalyticGraph};

    /// `4 - 3xy - 4y^2 + xy^3 + 2y^4` as a polynomial in `y`.
    fn p1(x: f64) -> Vec<f64> {
        vec![4.0, -3.0 * x, -4.0, x, 2.0]
    }

    /// `11 - 12x^4 y - 6x^2 y^2 + 4x^2 y^3 + 3y^4`.
    fn p2(x: f64) -> Vec<f64> {
        let x2 = x * x;
        vec![11.0, -12.0 * x2 * x2, -6.0 * x2, 4.0 * x2, 3.0]
    }

    #[test]
    fn derivative_bounds() {
        assert_eq!(derivative_bound(&[4.0, 0.0, -4.0, 0.0, 2.0]), 16.0);
        assert_eq!(derivative_bound(&[3.5]), 0.0);
        assert_eq!(derivative_bound(&[0.0, 1.0]), 1.0);
    }

    #[test]
    fn example_polynomials() {
        let (y, _) = partial_argmin(&p1(0.5), (-1.0, 1.0), 1e-9, 1e-9).unwrap();
        assert!((y - 1.0).abs() < 1e-3, "{y}");
        let (y, _) = partial_argmin(&p1(-0.5), (-1.0, 1.0), 1e-9, 1e-9).unwrap();
        assert!((y + 1.0).abs() < 1e-3, "{y}");
        let (y, _) = partial_argmin(&p1(0.0), (-1.0, 1.0), 1e-9, 1e-9).unwrap();
        assert_eq!(y, -1.0);
        let (y, _) = partial_argmin(&p2(0.7), (-1.0, 1.0), 1e-9, 1e-9).unwrap();
        assert!((y - 0.7).abs() < 2e-3, "{y}");
    }

    #[test]
    fn epsilon_optimal_against_dense_grid() {
        let c = [0.3, -1.2, 0.1, 2.0, -0.4, -1.1, 0.9];
        let eps = 1e-7;
        let (y, q) = partial_argmin(&c, (-1.0, 1.0), eps, 0.0).unwrap();
        let brute = (0..=100_000).map(|j| horner(&c, -1.0 + 2.0 * j as f64 / 1e5)).fold(f64::INFINITY, f64::min);
        assert!(q <= brute + eps);
        assert!((-1.0..=1.0).contains(&y));
    }

    #[test]
    fn flat_polynomial_returns_left_end() {
        let (y, q) = partial_argmin(&[2.0], (-0.5, 3.0), 1e-6, 0.0).unwrap();
        assert_eq!((y, q), (-0.5, 2.0));
    }

    #[test]
    fn shifted_interval() {
        // (y - 2.5)^2 on [1, 4]
        let (y, _) = partial_argmin(&[6.25, -5.0, 1.0], (1.0, 4.0), 1e-12, 0.0).unwrap();
        assert!((y - 2.5).abs() < 1e-5);
    }

    #[test]
    fn rejects_bad_input() {
        assert!(partial_argmin(&[1.0, f64::NAN], (-1.0, 1.0), 1e-6, 0.0).is_err());
        assert!(partial_argmin(&[1.0], (-1.0, 1.0), 0.0, 0.0).is_err());
        assert!(partial_argmin(&[1.0], (1.0, -1.0), 1e-3, 0.0).is_err());
    }

    fn sign_kernel(d: usize) -> CDKernel {
        let m = analytic_moment_matrix(&AnalyticGraph::Sign, &BasisSpec::monomial(2, d).unwrap()).unwrap();
        build_kernel(&m, 1e-8, Filter::Tikhonov).unwrap()
    }

    #[test]
    fn sign_kernel_recovers_sign() {
        let k = sign_kernel(2);
        let cfg = ApproxConfig::default();
        assert!((evaluate(&k, &[0.5], &cfg).unwrap() - 1.0).abs() < 0.01);
        assert!((evaluate(&k, &[-0.5], &cfg).unwrap() + 1.0).abs() < 0.01);
        assert!(evaluate(&k, &[0.5, 0.1], &cfg).is_err());
    }

    #[test]
    fn batch_matches_single_points() {
        let k = sign_kernel(2);
        let cfg = ApproxConfig::default();
        assert!(evaluate_batch(&k, &[], &cfg).unwrap().is_empty());
        let pts: Vec<Vec<f64>> = (0..50).map(|j| vec![-0.98 + 0.04 * j as f64]).collect();
        let batch = evaluate_batch(&k, &pts, &cfg).unwrap();
        for (x, y) in pts.iter().zip(&batch) {
            assert_eq!(evaluate(&k, x, &cfg).unwrap().to_bits(), y.to_bits());
        }
        let mut bad = pts.clone();
        bad[7] = vec![0.0, 0.0];
        match evaluate_batch(&k, &bad, &cfg) {
            Err(Error::AtPoint { index, .. }) => assert_eq!(index, 7),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn config_validation() {
        assert!(ApproxConfig::default().validate().is_ok());
        assert!(ApproxConfig::default().with_interval(1.0, 1.0).validate().is_err());
        assert!(ApproxConfig::default().with_precision(Precision::Absolute(0.0)).validate().is_err());
        let cfg = ApproxConfig {
            tie_tol: -1.0,
            ..Default::default()
        };
        assert!(cfg.validate().is_err());
    }
}
