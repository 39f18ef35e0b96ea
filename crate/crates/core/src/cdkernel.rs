//! Regularized Christoffel–Darboux kernels built from moment matrices.

use std::fmt;
use std::str::FromStr;

use nalgebra::{Cholesky, DMatrix, DVector, SymmetricEigen};
use serde::{Deserialize, Serialize};

use crate::basis::BasisSpec;
use crate::error::{Error, Result};
use crate::moments::{MomentMatrix, PSD_CLIP_TOL, SYMMETRY_TOL};
use crate::poly;

/// Default Tikhonov parameter for direct use.
pub const DEFAULT_BETA: f64 = 1e-8;

/// Spectral filter `g_beta` replacing `1/s` on the eigenvalues of `M`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Filter {
    /// `1 / (beta + s)`
    #[default]
    Tikhonov,
    /// `1 / beta` for `s <= beta`, else `1 / s`
    SpectralCutoff,
    /// `1 / beta` for `s <= beta`, else `0`
    IdealLowPass,
}

impl Filter {
    pub fn weight(self, s: f64, beta: f64) -> f64 {
        match self {
            Filter::Tikhonov => 1.0 / (beta + s),
            Filter::SpectralCutoff => {
                if s <= beta {
                    1.0 / beta
                } else {
                    1.0 / s
                }
            }
            Filter::IdealLowPass => {
                if s <= beta {
                    1.0 / beta
                } else {
                    0.0
                }
            }
        }
    }
}

impl fmt::Display for Filter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Filter::Tikhonov => "tikhonov",
            Filter::SpectralCutoff => "spectral-cutoff",
            Filter::IdealLowPass => "ideal-low-pass",
        })
    }
}

impl FromStr for Filter {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "tikhonov" => Ok(Filter::Tikhonov),
            "spectral-cutoff" | "cutoff" => Ok(Filter::SpectralCutoff),
            "ideal-low-pass" | "lowpass" => Ok(Filter::IdealLowPass),
            other => Err(Error::InvalidParameter(format!("unknown filter `{other}`"))),
        }
    }
}

/// `beta_d = 2^(3 - sqrt(d))`.
pub fn beta_schedule(d: usize) -> f64 {
    (3.0 - (d as f64).sqrt()).exp2()
}

/// Eigendecomposition `M = P diag(e) P^T` (ascending `e`, clipped at zero)
/// together with a filter; evaluates `q(z) = sum_i g(e_i) (p_i . b(z))^2`.
#[derive(Debug, Clone)]
pub struct CDKernel {
    spec: BasisSpec,
    eigvecs: DMatrix<f64>,
    eigvals: DVector<f64>,
    beta: f64,
    filter: Filter,
    mass_m: f64,
    mass_m0: f64,
    /// Row `i` is `sqrt(g(e_i)) p_i^T`.
    sos: DMatrix<f64>,
}

pub fn build_kernel(m: &MomentMatrix, beta: f64, filter: Filter) -> Result<CDKernel> {
    if !(beta > 0.0 && beta.is_finite()) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let skew = m.relative_skew();
    if skew > SYMMETRY_TOL {
        return Err(Error::Asymmetric(skew));
    }
    if m.entries.iter().any(|v| !v.is_finite()) {
        return Err(Error::InvalidParameter("moment matrix has non-finite entries".into()));
    }
    let n = m.n();
    let eig = SymmetricEigen::new(m.entries.clone());
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| eig.eigenvalues[a].total_cmp(&eig.eigenvalues[b]));
    let lmax = order.last().map_or(0.0, |&i| eig.eigenvalues[i]).max(0.0);
    let tol = PSD_CLIP_TOL * lmax;
    let mut eigvals = DVector::zeros(n);
    let mut eigvecs = DMatrix::zeros(n, n);
    for (k, &i) in order.iter().enumerate() {
        let e = rayleigh_quotient(&m.entries, eig.eigenvectors.column(i).as_slice());
        if e < -tol {
            return Err(Error::Indefinite {
                eigenvalue: e,
                tolerance: -tol,
            });
        }
        eigvals[k] = e.max(0.0);
        eigvecs.set_column(k, &eig.eigenvectors.column(i));
    }
    let mut sos = eigvecs.transpose();
    for (k, mut row) in sos.row_iter_mut().enumerate() {
        row *= filter.weight(eigvals[k], beta).sqrt();
    }
    Ok(CDKernel {
        spec: m.spec.clone(),
        eigvecs,
        eigvals,
        beta,
        filter,
        mass_m: m.mass,
        mass_m0: m.spec.domain_volume(),
        sos,
    })
}

/// `v^T M v / v^T v` accumulated in double-double arithmetic. The quotient
/// is quadratically accurate in the eigenvector error, which pins
/// near-zero eigenvalues far below `eps * lambda_max`.
fn rayleigh_quotient(m: &DMatrix<f64>, v: &[f64]) -> f64 {
    let n = v.len();
    let mut num = Dd::default();
    let mut den = Dd::default();
    for i in 0..n {
        let mut row = Dd::default();
        for (j, &vj) in v.iter().enumerate() {
            row.add_product(m[(i, j)], vj);
        }
        num.add_product(row.hi, v[i]);
        num.add_product(row.lo, v[i]);
        den.add_product(v[i], v[i]);
    }
    (num.hi + num.lo) / (den.hi + den.lo)
}

#[derive(Debug, Default, Clone, Copy)]
struct Dd {
    hi: f64,
    lo: f64,
}

impl Dd {
    fn add_product(&mut self, a: f64, b: f64) {
        let p = a * b;
        let perr = a.mul_add(b, -p);
        let s = self.hi + p;
        let bb = s - self.hi;
        let serr = (self.hi - (s - bb)) + (p - bb);
        self.hi = s;
        self.lo += serr + perr;
    }
}

impl CDKernel {
    pub fn spec(&self) -> &BasisSpec {
        &self.spec
    }

    pub fn eigvecs(&self) -> &DMatrix<f64> {
        &self.eigvecs
    }

    pub fn eigvals(&self) -> &DVector<f64> {
        &self.eigvals
    }

    pub fn beta(&self) -> f64 {
        self.beta
    }

    pub fn filter(&self) -> Filter {
        self.filter
    }

    pub fn mass_m(&self) -> f64 {
        self.mass_m
    }

    pub fn mass_m0(&self) -> f64 {
        self.mass_m0
    }

    /// Filtered weights `g(e_i)`.
    pub fn weights(&self) -> Vec<f64> {
        self.eigvals.iter().map(|&e| self.filter.weight(e, self.beta)).collect()
    }

    /// `q(z)`.
    pub fn eval_q(&self, z: &[f64]) -> Result<f64> {
        let b = DVector::from_vec(self.spec.eval(z)?);
        Ok((&self.sos * b).norm_squared())
    }

    /// Rows are eigen-polynomials scaled by `sqrt(g(e_i))` in ascending
    /// eigenvalue order; the sum of their squares is `q`.
    pub fn sos_decomposition(&self) -> &DMatrix<f64> {
        &self.sos
    }

    /// Power coefficients in `y` of `y -> q(x, y)` (length `2d + 1`).
    pub fn specialize(&self, x: &[f64]) -> Result<Vec<f64>> {
        let spec = &self.spec;
        let d = spec.d();
        let lead = spec.leading_factors(x)?;
        let last: Vec<usize> = spec.last_exponents().collect();
        let h = spec.last_axis_coeffs();
        let mut out = vec![0.0; 2 * d + 1];
        let mut by_last = vec![0.0; d + 1];
        let mut u = vec![0.0; d + 1];
        for row in self.sos.row_iter() {
            by_last.iter_mut().for_each(|v| *v = 0.0);
            for (i, &s) in row.iter().enumerate() {
                by_last[last[i]] += s * lead[i];
            }
            u.iter_mut().for_each(|v| *v = 0.0);
            for (m, &v) in by_last.iter().enumerate() {
                if v != 0.0 {
                    for (k, &c) in h[m].iter().enumerate() {
                        u[k] += v * c;
                    }
                }
            }
            poly::add_weighted_product(&mut out, &u, &u, 1.0);
        }
        Ok(out)
    }

    /// `sum_i e_i / (e_i + beta)`, the integral of `q` against the measure.
    pub fn markov_mass(&self) -> Result<f64> {
        if self.filter != Filter::Tikhonov {
            return Err(Error::Unsupported(format!("markov mass needs the Tikhonov filter, not {}", self.filter)));
        }
        Ok(self.eigvals.iter().map(|&e| e / (e + self.beta)).sum())
    }

    /// `q(z) < gamma`.
    pub fn sublevel_membership(&self, z: &[f64], gamma: f64) -> Result<bool> {
        Ok(self.eval_q(z)? < gamma)
    }

    /// Default threshold parameters for this kernel's basis and mass.
    pub fn threshold_params(&self) -> ThresholdParams {
        ThresholdParams::defaults(&self.spec, self.mass_m)
    }
}

/// Constants entering `gamma_d` and the support and rate bounds.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ThresholdParams {
    /// Ambient dimension.
    pub p: usize,
    pub r: f64,
    pub alpha: f64,
    /// Diameter of the support of `mu + mu0`.
    pub delta0: f64,
    pub mass_m: f64,
    pub mass_m0: f64,
}

impl ThresholdParams {
    /// `r = p + 1/2`, `alpha = 0`, `m0` the box volume, `delta0` the box diagonal.
    pub fn defaults(spec: &BasisSpec, mass_m: f64) -> Self {
        ThresholdParams {
            p: spec.p(),
            r: spec.p() as f64 + 0.5,
            alpha: 0.0,
            delta0: spec.domain_diameter(),
            mass_m,
            mass_m0: spec.domain_volume(),
        }
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.r > self.p as f64) {
            return Err(Error::InvalidParameter(format!("r = {} must exceed p = {}", self.r, self.p)));
        }
        if !(0.0..1.0).contains(&self.alpha) {
            return Err(Error::InvalidParameter(format!("alpha = {} must lie in [0, 1)", self.alpha)));
        }
        if !(self.delta0 > 0.0) {
            return Err(Error::InvalidParameter("delta0 must be positive".into()));
        }
        if !(self.mass_m >= 0.0 && self.mass_m0 > 0.0) {
            return Err(Error::InvalidParameter("masses must be non-negative with m0 > 0".into()));
        }
        Ok(())
    }

    /// `ln gamma_d` without checking preconditions.
    pub fn ln_gamma(&self, d: f64) -> f64 {
        let r = self.r;
        (1.0 - self.alpha).ln() - (8.0 * (self.mass_m + self.mass_m0)).ln() + 2.0 * r + r * d.ln()
            - 2.0 * r * (3.0 * r).ln()
    }
}

/// `gamma_d = (1 - alpha) / (8 (m + m0)) * e^(2r) d^r / (3r)^(2r)`.
pub fn gamma_threshold(d: usize, tp: &ThresholdParams) -> Result<f64> {
    if d <= 1 {
        return Err(Error::InvalidParameter(format!("gamma_d needs d > 1, got {d}")));
    }
    tp.validate()?;
    Ok(tp.ln_gamma(d as f64).exp())
}

/// `|| I - A^(1/2) B^(-1) A^(1/2) ||_2` with `A = M_exact + beta I` and
/// `B = M_approx + beta I`; bounds `|1 - q_approx / q_exact|` uniformly.
pub fn perturbation_alpha(approx: &MomentMatrix, exact: &MomentMatrix, beta: f64) -> Result<f64> {
    if approx.n() != exact.n() || approx.spec != exact.spec {
        return Err(Error::DimensionMismatch {
            expected: exact.n(),
            got: approx.n(),
            context: "perturbed moment matrix",
        });
    }
    if !(beta > 0.0) {
        return Err(Error::InvalidParameter(format!("beta must be positive, got {beta}")));
    }
    let n = exact.n();
    let shift = DMatrix::<f64>::identity(n, n) * beta;
    let a = &exact.entries + &shift;
    let eig = SymmetricEigen::new(a);
    let mut sqrt_vals = eig.eigenvalues.clone();
    for v in sqrt_vals.iter_mut() {
        if *v <= 0.0 {
            return Err(Error::NotPositiveDefinite);
        }
        *v = v.sqrt();
    }
    let a_half = &eig.eigenvectors * DMatrix::from_diagonal(&sqrt_vals) * eig.eigenvectors.transpose();
    let b = &approx.entries + &shift;
    let chol = Cholesky::new(b).ok_or_else(|| {
        let (min, _) = approx.eigen_range();
        Error::Indefinite {
            eigenvalue: min + beta,
            tolerance: 0.0,
        }
    })?;
    let mut c = &a_half * chol.solve(&a_half);
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (c[(i, j)] + c[(j, i)]);
            c[(i, j)] = v;
            c[(j, i)] = v;
        }
    }
    let ev = SymmetricEigen::new(c).eigenvalues;
    Ok(ev.iter().map(|&l| (1.0 - l).abs()).fold(0.0, f64::max))
}
