//! Error measures, the L2 Legendre projection baseline and closed-form
//! convergence-rate bounds.

use serde::{Deserialize, Serialize};

use crate::cdkernel::ThresholdParams;
use crate::error::{Error, Result};
use crate::graph::{Discontinuities, GraphFunction};
use crate::poly::legendre_values;
use crate::quadrature::GaussLegendre;
use crate::support::ln_outside_mass_bound;

/// Default radius of the jump neighbourhoods excluded from sup errors.
pub const JUMP_RADIUS: f64 = 0.05;

/// `sum_k w_k |a_k - r_k|`.
pub fn l1_error(approx: &[f64], reference: &[f64], weights: &[f64]) -> Result<f64> {
    if approx.len() != reference.len() || approx.len() != weights.len() {
        return Err(Error::DimensionMismatch {
            expected: approx.len(),
            got: if approx.len() != reference.len() { reference.len() } else { weights.len() },
            context: "l1 error inputs",
        });
    }
    Ok(approx.iter().zip(reference).zip(weights).map(|((a, r), w)| w * (a - r).abs()).sum())
}

/// `max(0, max_k |v_k| - bound)`.
pub fn overshoot(values: &[f64], bound: f64) -> f64 {
    values.iter().map(|v| v.abs() - bound).fold(0.0, f64::max)
}

/// Largest `|a_k - f(x_k)|` over points farther than `radius` from the
/// declared discontinuities of `f`.
pub fn max_error_away_from_jumps(points: &[Vec<f64>], approx: &[f64], f: &GraphFunction, radius: f64) -> f64 {
    points
        .iter()
        .zip(approx)
        .filter(|(x, _)| f.discontinuities().distance(x) > radius)
        .map(|(x, a)| (a - f.eval(x)).abs())
        .fold(0.0, f64::max)
}

/// Coefficients of a series in the orthonormal Legendre basis of `[a, b]`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LegendreSeries {
    pub interval: (f64, f64),
    pub coeffs: Vec<f64>,
}

impl LegendreSeries {
    pub fn eval(&self, x: f64) -> f64 {
        let (a, b) = self.interval;
        let w = b - a;
        let n = self.coeffs.len();
        if n == 0 {
            return 0.0;
        }
        let mut v = vec![0.0; n];
        legendre_values(n - 1, (2.0 * x - a - b) / w, &mut v);
        self.coeffs
            .iter()
            .zip(&v)
            .enumerate()
            .map(|(k, (c, p))| c * p * ((2 * k + 1) as f64 / w).sqrt())
            .sum()
    }
}

/// Orthogonal projection of a univariate `f` onto polynomials of degree
/// `d`, integrating each smooth piece with `4d + 8` Gauss nodes.
pub fn l2_projection(f: &GraphFunction, d: usize) -> Result<LegendreSeries> {
    if f.input_dim() != 1 {
        return Err(Error::Unsupported("L2 projection is implemented for univariate functions".into()));
    }
    let (a, b) = f.domain()[0];
    let w = b - a;
    let mut edges = vec![a];
    if let Discontinuities::Points(jumps) = f.discontinuities() {
        let mut inner: Vec<f64> = jumps.iter().copied().filter(|&t| a < t && t < b).collect();
        inner.sort_by(f64::total_cmp);
        edges.extend(inner);
    }
    edges.push(b);
    let rule = GaussLegendre::new(4 * d + 8);
    let mut coeffs = vec![0.0; d + 1];
    let mut v = vec![0.0; d + 1];
    for piece in edges.windows(2) {
        let (xs, ws) = rule.on_interval(piece[0], piece[1]);
        for (x, wx) in xs.iter().zip(&ws) {
            let fx = f.eval(&[*x]);
            legendre_values(d, (2.0 * x - a - b) / w, &mut v);
            for (k, c) in coeffs.iter_mut().enumerate() {
                *c += wx * fx * v[k] * ((2 * k + 1) as f64 / w).sqrt();
            }
        }
    }
    Ok(LegendreSeries {
        interval: (a, b),
        coeffs,
    })
}

fn check_rate_args(d: usize, tp: &ThresholdParams) -> Result<()> {
    if d <= 1 {
        return Err(Error::InvalidParameter(format!("rate bounds need d > 1, got {d}")));
    }
    tp.validate()
}

/// L1 bound for an `L`-Lipschitz `f`:
/// `vol(X) delta0 / (sqrt(d) - 1) (1 + L) + diam(Y) * mass bound`.
pub fn lipschitz_rate_bound(d: usize, lipschitz: f64, tp: &ThresholdParams, vol_x: f64, diam_y: f64) -> Result<f64> {
    check_rate_args(d, tp)?;
    let df = d as f64;
    let first = vol_x * tp.delta0 / (df.sqrt() - 1.0) * (1.0 + lipschitz);
    Ok(first + diam_y * ln_outside_mass_bound(df, tp).exp())
}

/// L1 bound for a univariate `f` of total variation `V` (needs `p = 2`, `r > 2`).
pub fn bv_rate_bound(d: usize, variation: f64, tp: &ThresholdParams, vol_x: f64, diam_y: f64) -> Result<f64> {
    check_rate_args(d, tp)?;
    if tp.p != 2 {
        return Err(Error::Unsupported(format!("bounded-variation rate needs p = 2, got {}", tp.p)));
    }
    let df = d as f64;
    let r = tp.r;
    let gap = df.sqrt() - 1.0;
    let ln_mass = ((1.0 + tp.alpha) / (1.0 - tp.alpha)).ln()
        + (8.0 * (tp.mass_m + tp.mass_m0)).ln()
        + 2.0 * r * (3.0 * r).ln()
        + 4.0 / df
        - 4f64.ln()
        - (2.0 * r - 2.0)
        - (r - 2.0) * df.ln();
    let first = vol_x * (2.0 * tp.delta0 / gap + df.powf(-0.25));
    let last = 4.0 * df.powf(0.25) * variation * tp.delta0 / gap;
    Ok(first + diam_y * (ln_mass.exp() + last))
}

/// Errors of one approximant on a quadrature grid of `X`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ErrorReport {
    pub d: usize,
    pub l1_error: f64,
    pub max_error_away_from_jumps: f64,
    pub overshoot: f64,
    pub n_quad: usize,
    pub jump_radius: f64,
}

impl ErrorReport {
    /// Compares approximant values on the midpoint grid of `X` with `f`; the
    /// grid must come from [`GraphFunction::grid`] so weights are uniform.
    pub fn on_grid(f: &GraphFunction, points: &[Vec<f64>], values: &[f64], d: usize, jump_radius: f64) -> Result<Self> {
        let reference: Vec<f64> = points.iter().map(|x| f.eval(x)).collect();
        let w = f.domain_volume() / points.len().max(1) as f64;
        let weights = vec![w; points.len()];
        let (ylo, yhi) = f.range();
        Ok(ErrorReport {
            d,
            l1_error: l1_error(values, &reference, &weights)?,
            max_error_away_from_jumps: max_error_away_from_jumps(points, values, f, jump_radius),
            overshoot: overshoot(values, ylo.abs().max(yhi.abs())),
            n_quad: points.len(),
            jump_radius,
        })
    }
}
