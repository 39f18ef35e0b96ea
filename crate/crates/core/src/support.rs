//! Monte-Carlo checks of the support estimates: how much of the graph
//! measure falls outside the sublevel set `S_d = {q < gamma_d}`, and how far
//! points of `S_d` lie from the graph.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::cdkernel::{gamma_threshold, CDKernel, ThresholdParams};
use crate::error::{Error, Result};
use crate::graph::GraphFunction;

pub const MIN_SAMPLES: usize = 1000;
/// Graph discretization size used for distance queries.
pub const GRAPH_POINTS: usize = 10_000;

/// `ln` of the bound on `mu(R^p \ S_d)`:
/// `(1+a)/(1-a) * 8(m+m0) (3r)^(2r) e^(p^2/d) / (p^p e^(2r-p) d^(r-p))`.
pub fn ln_outside_mass_bound(d: f64, tp: &ThresholdParams) -> f64 {
    let p = tp.p as f64;
    let r = tp.r;
    ((1.0 + tp.alpha) / (1.0 - tp.alpha)).ln() + (8.0 * (tp.mass_m + tp.mass_m0)).ln() + 2.0 * r * (3.0 * r).ln()
        + p * p / d
        - p * p.ln()
        - (2.0 * r - p)
        - (r - p) * d.ln()
}

pub fn outside_mass_bound(d: usize, tp: &ThresholdParams) -> Result<f64> {
    check_degree(d)?;
    tp.validate()?;
    Ok(ln_outside_mass_bound(d as f64, tp).exp())
}

/// `delta0 / (sqrt(d) - 1)`.
pub fn distance_bound(d: usize, tp: &ThresholdParams) -> Result<f64> {
    check_degree(d)?;
    Ok(tp.delta0 / ((d as f64).sqrt() - 1.0))
}

fn check_degree(d: usize) -> Result<()> {
    if d <= 1 {
        return Err(Error::InvalidParameter(format!("support bounds need d > 1, got {d}")));
    }
    Ok(())
}

fn check_samples(n: usize) -> Result<()> {
    if n < MIN_SAMPLES {
        return Err(Error::InvalidParameter(format!("need at least {MIN_SAMPLES} samples, got {n}")));
    }
    Ok(())
}

/// Estimate of `mu({q >= gamma})` with its standard error.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MassEstimate {
    pub value: f64,
    pub std_err: f64,
    /// Fraction of samples outside `S_d`.
    pub fraction: f64,
}

/// Samples `x ~ U(X)` and counts `q(x, f(x)) >= gamma`, scaled by `vol(X)`.
pub fn outside_mass_estimate(
    kernel: &CDKernel,
    f: &GraphFunction,
    gamma: f64,
    n_samples: usize,
    seed: u64,
) -> Result<MassEstimate> {
    check_samples(n_samples)?;
    let xs = f.random_points(n_samples, seed);
    let flags: Vec<Result<bool>> = xs
        .par_iter()
        .map(|x| {
            let mut z = x.clone();
            z.push(f.eval(x));
            Ok(kernel.eval_q(&z)? >= gamma)
        })
        .collect();
    let mut outside = 0usize;
    for flag in flags {
        if flag? {
            outside += 1;
        }
    }
    let frac = outside as f64 / n_samples as f64;
    let vol = f.domain_volume();
    Ok(MassEstimate {
        value: vol * frac,
        std_err: vol * (frac * (1.0 - frac) / n_samples as f64).sqrt(),
        fraction: frac,
    })
}

pub fn outside_mass(kernel: &CDKernel, f: &GraphFunction, gamma: f64, n_samples: usize, seed: u64) -> Result<f64> {
    Ok(outside_mass_estimate(kernel, f, gamma, n_samples, seed)?.value)
}

/// Points of the graph of `f` on a regular grid of about `n` points, sorted
/// by first coordinate, with the mesh slack (half the grid-cell diagonal).
pub struct GraphCloud {
    points: Vec<Vec<f64>>,
    pub slack: f64,
}

impl GraphCloud {
    pub fn new(f: &GraphFunction, n: usize) -> Self {
        let dim = f.input_dim();
        let per_axis = ((n as f64).powf(1.0 / dim as f64).round() as usize).max(2);
        let spacing: f64 = f
            .domain()
            .iter()
            .map(|(a, b)| ((b - a) / per_axis as f64).powi(2))
            .sum::<f64>()
            .sqrt();
        let mut points: Vec<Vec<f64>> = f
            .grid(per_axis)
            .into_iter()
            .map(|x| {
                let y = f.eval(&x);
                let mut z = x;
                z.push(y);
                z
            })
            .collect();
        points.sort_by(|a, b| a[0].total_cmp(&b[0]));
        GraphCloud {
            points,
            slack: 0.5 * spacing,
        }
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Distance from `z` to the nearest cloud point.
    pub fn distance(&self, z: &[f64]) -> f64 {
        let dist2 = |p: &[f64]| p.iter().zip(z).map(|(a, b)| (a - b) * (a - b)).sum::<f64>();
        let start = self.points.partition_point(|p| p[0] < z[0]);
        let mut best = f64::INFINITY;
        for p in self.points[start..].iter() {
            let dx = p[0] - z[0];
            if dx * dx >= best {
                break;
            }
            best = best.min(dist2(p));
        }
        for p in self.points[..start].iter().rev() {
            let dx = z[0] - p[0];
            if dx * dx >= best {
                break;
            }
            best = best.min(dist2(p));
        }
        best.sqrt()
    }
}

/// Result of probing `S_d` with uniform points of `X x Y`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProbeResult {
    pub max_distance: f64,
    pub hits: usize,
    pub slack: f64,
}

pub fn probe_sublevel(
    kernel: &CDKernel,
    f: &GraphFunction,
    gamma: f64,
    n_probe: usize,
    seed: u64,
) -> Result<ProbeResult> {
    check_samples(n_probe)?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let (ylo, yhi) = f.range();
    let probes: Vec<Vec<f64>> = (0..n_probe)
        .map(|_| {
            let mut z: Vec<f64> = f.domain().iter().map(|&(a, b)| rng.gen_range(a..=b)).collect();
            z.push(rng.gen_range(ylo..=yhi));
            z
        })
        .collect();
    let inside: Vec<Result<bool>> = probes.par_iter().map(|z| Ok(kernel.eval_q(z)? < gamma)).collect();
    let mut hits = Vec::new();
    for (z, flag) in probes.iter().zip(inside) {
        if flag? {
            hits.push(z);
        }
    }
    let cloud = GraphCloud::new(f, GRAPH_POINTS);
    let max_distance = hits.par_iter().map(|z| cloud.distance(z)).reduce(|| 0.0, f64::max);
    Ok(ProbeResult {
        max_distance,
        hits: hits.len(),
        slack: cloud.slack,
    })
}

/// Largest distance from a probe in `S_d` to the discretized graph, 0 when
/// no probe lands in `S_d`.
pub fn max_distance_in_sublevel(
    kernel: &CDKernel,
    f: &GraphFunction,
    gamma: f64,
    n_probe: usize,
    seed: u64,
) -> Result<f64> {
    Ok(probe_sublevel(kernel, f, gamma, n_probe, seed)?.max_distance)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct SupportConfig {
    pub n_samples: usize,
    pub n_probe: usize,
    pub seed: u64,
}

impl Default for SupportConfig {
    fn default() -> Self {
        SupportConfig {
            n_samples: 100_000,
            n_probe: 100_000,
            seed: 0,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SupportReport {
    pub d: usize,
    pub gamma: f64,
    pub outside_mass: f64,
    pub outside_mass_fraction: f64,
    pub outside_mass_sigma: f64,
    pub max_dist_in_sd: f64,
    pub probe_hits: usize,
    pub mesh_slack: f64,
    pub theorem_bound_i: f64,
    pub theorem_bound_ii: f64,
    pub n_samples: usize,
    pub seed: u64,
}

impl SupportReport {
    /// Mass bound exceeded beyond a 3-sigma Monte-Carlo band.
    pub fn mass_violated(&self) -> bool {
        self.outside_mass - 3.0 * self.outside_mass_sigma > self.theorem_bound_i
    }

    /// Distance bound exceeded beyond the graph mesh slack.
    pub fn distance_violated(&self) -> bool {
        self.max_dist_in_sd > self.theorem_bound_ii + self.mesh_slack
    }

    pub fn violated(&self) -> bool {
        self.mass_violated() || self.distance_violated()
    }
}

/// Runs both checks at the kernel's degree; `gamma` defaults to `gamma_d`.
pub fn support_report(
    kernel: &CDKernel,
    f: &GraphFunction,
    tp: &ThresholdParams,
    gamma: Option<f64>,
    cfg: &SupportConfig,
) -> Result<SupportReport> {
    let d = kernel.spec().d();
    let gamma = match gamma {
        Some(g) => g,
        None => gamma_threshold(d, tp)?,
    };
    let mass = outside_mass_estimate(kernel, f, gamma, cfg.n_samples, cfg.seed)?;
    let probe = probe_sublevel(kernel, f, gamma, cfg.n_probe, cfg.seed.wrapping_add(1))?;
    Ok(SupportReport {
        d,
        gamma,
        outside_mass: mass.value,
        outside_mass_fraction: mass.fraction,
        outside_mass_sigma: mass.std_err,
        max_dist_in_sd: probe.max_distance,
        probe_hits: probe.hits,
        mesh_slack: probe.slack,
        theorem_bound_i: outside_mass_bound(d, tp)?,
        theorem_bound_ii: distance_bound(d, tp)?,
        n_samples: cfg.n_samples,
        seed: cfg.seed,
    })
}
