//! Functions whose graphs carry the measures we take moments of.

use std::fmt;
use std::sync::atomic::{AtomicBool, Ordering};
use std::sync::Arc;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Evaluator = dyn Fn(&[f64]) -> f64 + Send + Sync;

/// Known discontinuity locus of a benchmark function, used to exclude
/// jump neighbourhoods from pointwise error measurements.
#[derive(Debug, Clone, PartialEq)]
pub enum Discontinuities {
    None,
    /// Jump abscissae of a univariate function.
    Points(Vec<f64>),
    /// Circles `(cx, cy, radius)` of a bivariate function.
    Circles(Vec<(f64, f64, f64)>),
}

impl Discontinuities {
    /// Distance from `x` to the discontinuity locus (`+inf` when there is none).
    pub fn distance(&self, x: &[f64]) -> f64 {
        match self {
            Discontinuities::None => f64::INFINITY,
            Discontinuities::Points(pts) => pts.iter().map(|&t| (x[0] - t).abs()).fold(f64::INFINITY, f64::min),
            Discontinuities::Circles(circles) => circles
                .iter()
                .map(|&(cx, cy, r)| ((x[0] - cx).hypot(x[1] - cy) - r).abs())
                .fold(f64::INFINITY, f64::min),
        }
    }
}

/// A bounded function `f: X -> Y` on a box `X` with values in an interval `Y`.
#[derive(Clone)]
pub struct GraphFunction {
    name: String,
    domain: Vec<(f64, f64)>,
    range: (f64, f64),
    evaluator: Arc<Evaluator>,
    discontinuities: Discontinuities,
    warned: Arc<AtomicBool>,
}

impl fmt::Debug for GraphFunction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("GraphFunction")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("range", &self.range)
            .field("discontinuities", &self.discontinuities)
            .finish()
    }
}

impl GraphFunction {
    pub fn new(
        name: impl Into<String>,
        domain: Vec<(f64, f64)>,
        range: (f64, f64),
        evaluator: impl Fn(&[f64]) -> f64 + Send + Sync + 'static,
    ) -> Self {
        GraphFunction {
            name: name.into(),
            domain,
            range,
            evaluator: Arc::new(evaluator),
            discontinuities: Discontinuities::None,
            warned: Arc::new(AtomicBool::new(false)),
        }
    }

    pub fn with_discontinuities(mut self, discontinuities: Discontinuities) -> Self {
        self.discontinuities = discontinuities;
        self
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn range(&self) -> (f64, f64) {
        self.range
    }

    pub fn discontinuities(&self) -> &Discontinuities {
        &self.discontinuities
    }

    /// Dimension of `X`, i.e. `p - 1`.
    pub fn input_dim(&self) -> usize {
        self.domain.len()
    }

    pub fn domain_volume(&self) -> f64 {
        self.domain.iter().map(|(a, b)| b - a).product()
    }

    /// `f(x)`, clamped to `Y`.
    pub fn eval(&self, x: &[f64]) -> f64 {
        let v = (self.evaluator)(x);
        let (lo, hi) = self.range;
        if v.is_finite() && (v < lo || v > hi) {
            if !self.warned.swap(true, Ordering::Relaxed) {
                log::warn!("{}: value {v} at {x:?} outside [{lo}, {hi}], clamping", self.name);
            }
            return v.clamp(lo, hi);
        }
        v
    }

    /// Midpoint grid with `n` points per axis of `X`, last axis fastest.
    pub fn grid(&self, n: usize) -> Vec<Vec<f64>> {
        let axes: Vec<Vec<f64>> = self
            .domain
            .iter()
            .map(|&(a, b)| (0..n).map(|k| a + (b - a) * (k as f64 + 0.5) / n as f64).collect())
            .collect();
        cartesian(&axes)
    }

    /// `n` points of `X` drawn uniformly at random.
    pub fn random_points(&self, n: usize, seed: u64) -> Vec<Vec<f64>> {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        (0..n)
            .map(|_| self.domain.iter().map(|&(a, b)| rng.gen_range(a..b)).collect())
            .collect()
    }

    /// Pairs `(x, f(x))`.
    pub fn sample(&self, points: &[Vec<f64>]) -> Vec<(Vec<f64>, f64)> {
        points.iter().map(|x| (x.clone(), self.eval(x))).collect()
    }
}

/// Cartesian product of per-axis coordinate lists, last axis fastest.
pub fn cartesian(axes: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let mut out: Vec<Vec<f64>> = vec![Vec::new()];
    for axis in axes {
        out = out
            .into_iter()
            .flat_map(|prefix| {
                axis.iter().map(move |&t| {
                    let mut p = prefix.clone();
                    p.push(t);
                    p
                })
            })
            .collect();
    }
    out
}

/// `n` equispaced points on `[a, b]` including both ends.
pub fn linspace(a: f64, b: f64, n: usize) -> Vec<f64> {
    match n {
        0 => Vec::new(),
        1 => vec![a],
        _ => (0..n).map(|k| a + (b - a) * k as f64 / (n - 1) as f64).collect(),
    }
}
