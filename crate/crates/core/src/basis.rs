//! Multivariate polynomial bases of total degree at most `d` in `p` variables.
//!
//! Basis functions are indexed by exponent vectors in graded reverse
//! lexicographic order: ascending total degree, and inside a degree block the
//! largest monomial in grevlex comes first (for `p = 2`: `x^2, xy, y^2`).
//!
//! Two families are provided. [`BasisFamily::MonomialGrevlex`] is the plain
//! monomial vector. [`BasisFamily::LegendreOrthonormal`] takes tensor products
//! of Legendre polynomials rescaled to the domain box, so that the Gram matrix
//! with respect to Lebesgue measure on the box is the identity.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::poly;

/// Exponent vector of a monomial.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct MultiIndex(pub Vec<usize>);

impl MultiIndex {
    pub fn total_degree(&self) -> usize {
        self.0.iter().sum()
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum BasisFamily {
    #[serde(rename = "monomial-grevlex")]
    MonomialGrevlex,
    #[serde(rename = "legendre-orthonormal")]
    LegendreOrthonormal,
}

impl fmt::Display for BasisFamily {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BasisFamily::MonomialGrevlex => f.write_str("monomial-grevlex"),
            BasisFamily::LegendreOrthonormal => f.write_str("legendre-orthonormal"),
        }
    }
}

impl FromStr for BasisFamily {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "monomial-grevlex" | "monomial" => Ok(BasisFamily::MonomialGrevlex),
            "legendre-orthonormal" | "legendre" => Ok(BasisFamily::LegendreOrthonormal),
            other => Err(Error::InvalidParameter(format!("unknown basis family `{other}`"))),
        }
    }
}

/// `C(p + d, d)`, the number of monomials of degree at most `d` in `p` variables.
pub fn basis_size(p: usize, d: usize) -> Result<usize> {
    if p == 0 {
        return Err(Error::InvalidParameter("dimension p must be positive".into()));
    }
    let overflow = || Error::Overflow { n: p.saturating_add(d), k: d };
    let n = p.checked_add(d).ok_or_else(overflow)?;
    let k = d.min(p);
    let mut acc: u128 = 1;
    for i in 1..=k {
        // acc * (n - k + i) / i stays integral at every step
        acc = acc
            .checked_mul((n - k + i) as u128)
            .ok_or_else(overflow)?
            / i as u128;
    }
    usize::try_from(acc).map_err(|_| overflow())
}

/// All exponent vectors of total degree `<= d` in `p` variables, grevlex ordered.
pub fn enumerate_indices(p: usize, d: usize) -> Vec<MultiIndex> {
    let mut out = Vec::new();
    for t in 0..=d {
        let mut block = Vec::new();
        let mut current = vec![0usize; p];
        compositions(t, 0, &mut current, &mut block);
        // Grevlex: the monomial with the smaller last exponent is larger; ties
        // are broken on the next-to-last exponent and so on.
        block.sort_by(|a: &Vec<usize>, b: &Vec<usize>| a.iter().rev().cmp(b.iter().rev()));
        out.extend(block.into_iter().map(MultiIndex));
    }
    out
}

fn compositions(rest: usize, axis: usize, current: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
    let p = current.len();
    if axis + 1 == p {
        current[axis] = rest;
        out.push(current.clone());
        return;
    }
    for k in 0..=rest {
        current[axis] = k;
        compositions(rest - k, axis + 1, current, out);
    }
}

/// A polynomial basis: dimension, degree, family, domain box and the cached
/// index list.
#[derive(Debug, Clone, PartialEq)]
pub struct BasisSpec {
    p: usize,
    d: usize,
    family: BasisFamily,
    domain: Vec<(f64, f64)>,
    indices: Vec<MultiIndex>,
    /// Power coefficients of each univariate factor of the last variable.
    last_axis_coeffs: Vec<Vec<f64>>,
}

impl BasisSpec {
    /// Basis on the default box `[-1, 1]^p`.
    pub fn new(p: usize, d: usize, family: BasisFamily) -> Result<Self> {
        Self::with_domain(p, d, family, vec![(-1.0, 1.0); p])
    }

    pub fn monomial(p: usize, d: usize) -> Result<Self> {
        Self::new(p, d, BasisFamily::MonomialGrevlex)
    }

    pub fn legendre(p: usize, d: usize) -> Result<Self> {
        Self::new(p, d, BasisFamily::LegendreOrthonormal)
    }

    pub fn with_domain(p: usize, d: usize, family: BasisFamily, domain: Vec<(f64, f64)>) -> Result<Self> {
        basis_size(p, d)?;
        if domain.len() != p {
            return Err(Error::DimensionMismatch {
                expected: p,
                got: domain.len(),
                context: "domain box axes",
            });
        }
        if let Some(&(a, b)) = domain.iter().find(|(a, b)| !(a.is_finite() && b.is_finite() && a < b)) {
            return Err(Error::InvalidParameter(format!("degenerate domain axis [{a}, {b}]")));
        }
        let indices = enumerate_indices(p, d);
        let (a, b) = domain[p - 1];
        let last_axis_coeffs = univariate_power_coeffs(family, d, a, b);
        Ok(BasisSpec {
            p,
            d,
            family,
            domain,
            indices,
            last_axis_coeffs,
        })
    }

    pub fn p(&self) -> usize {
        self.p
    }

    pub fn d(&self) -> usize {
        self.d
    }

    pub fn family(&self) -> BasisFamily {
        self.family
    }

    pub fn domain(&self) -> &[(f64, f64)] {
        &self.domain
    }

    pub fn indices(&self) -> &[MultiIndex] {
        &self.indices
    }

    /// Number of basis functions, `n_d`.
    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    /// Same family and domain at another degree.
    pub fn with_degree(&self, d: usize) -> Result<Self> {
        Self::with_domain(self.p, d, self.family, self.domain.clone())
    }

    /// Lebesgue volume of the domain box.
    pub fn domain_volume(&self) -> f64 {
        self.domain.iter().map(|(a, b)| b - a).product()
    }

    pub fn domain_diameter(&self) -> f64 {
        self.domain.iter().map(|(a, b)| (b - a) * (b - a)).sum::<f64>().sqrt()
    }

    pub fn contains(&self, z: &[f64]) -> bool {
        z.len() == self.p && z.iter().zip(&self.domain).all(|(&t, &(a, b))| t >= a && t <= b)
    }

    /// Values of the univariate factors `0..=d` along `axis` at `t`.
    fn axis_values(&self, axis: usize, t: f64, out: &mut [f64]) {
        match self.family {
            BasisFamily::MonomialGrevlex => {
                out[0] = 1.0;
                for k in 1..=self.d {
                    out[k] = out[k - 1] * t;
                }
            }
            BasisFamily::LegendreOrthonormal => {
                let (a, b) = self.domain[axis];
                let w = b - a;
                let s = (2.0 * t - a - b) / w;
                poly::legendre_values(self.d, s, out);
                for (k, v) in out.iter_mut().enumerate().take(self.d + 1) {
                    *v *= ((2 * k + 1) as f64 / w).sqrt();
                }
            }
        }
    }

    fn axis_table(&self, z: &[f64]) -> Vec<Vec<f64>> {
        z.iter()
            .enumerate()
            .map(|(axis, &t)| {
                let mut v = vec![0.0; self.d + 1];
                self.axis_values(axis, t, &mut v);
                v
            })
            .collect()
    }

    /// The basis vector `b(z)`.
    pub fn eval(&self, z: &[f64]) -> Result<Vec<f64>> {
        if z.len() != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p,
                got: z.len(),
                context: "evaluation point",
            });
        }
        if self.family == BasisFamily::LegendreOrthonormal && !self.contains(z) {
            log::debug!("evaluating orthonormal basis outside its domain box at {z:?}");
        }
        let table = self.axis_table(z);
        Ok(self
            .indices
            .iter()
            .map(|idx| idx.0.iter().enumerate().map(|(j, &k)| table[j][k]).product())
            .collect())
    }

    /// Factorization of the basis at fixed leading coordinates `x`:
    /// `b_i(x, y) = lead[i] * h_{last[i]}(y)`, where `h_m` has power
    /// coefficients [`Self::last_axis_coeffs`]`[m]`.
    pub fn leading_factors(&self, x: &[f64]) -> Result<Vec<f64>> {
        if x.len() + 1 != self.p {
            return Err(Error::DimensionMismatch {
                expected: self.p - 1,
                got: x.len(),
                context: "leading coordinates",
            });
        }
        let table = self.axis_table(x);
        Ok(self
            .indices
            .iter()
            .map(|idx| idx.0[..self.p - 1].iter().enumerate().map(|(j, &k)| table[j][k]).product())
            .collect())
    }

    /// Exponent of the last variable for every basis element.
    pub fn last_exponents(&self) -> impl Iterator<Item = usize> + '_ {
        self.indices.iter().map(|idx| idx.0[self.p - 1])
    }

    /// Power coefficients in the last variable of the univariate factors.
    pub fn last_axis_coeffs(&self) -> &[Vec<f64>] {
        &self.last_axis_coeffs
    }

    /// Restricts the polynomial `coeffs . b(x, y)` to the line through `x`,
    /// returning power coefficients in `y` (length `d + 1`).
    pub fn specialize_last_variable(&self, coeffs: &[f64], x: &[f64]) -> Result<Vec<f64>> {
        if coeffs.len() != self.len() {
            return Err(Error::DimensionMismatch {
                expected: self.len(),
                got: coeffs.len(),
                context: "coefficient vector",
            });
        }
        let lead = self.leading_factors(x)?;
        let mut by_last = vec![0.0; self.d + 1];
        for ((c, l), m) in coeffs.iter().zip(&lead).zip(self.last_exponents()) {
            by_last[m] += c * l;
        }
        let mut out = vec![0.0; self.d + 1];
        for (m, v) in by_last.iter().enumerate() {
            for (k, c) in self.last_axis_coeffs[m].iter().enumerate() {
                out[k] += v * c;
            }
        }
        Ok(out)
    }

    /// Matrix `T` with `b(z) = T m(z)`, where `m` is the monomial basis of the
    /// same dimension and degree (rows index `self`, columns monomials).
    pub fn from_monomial_transform(&self) -> Vec<Vec<f64>> {
        let n = self.len();
        match self.family {
            BasisFamily::MonomialGrevlex => (0..n)
                .map(|i| (0..n).map(|j| if i == j { 1.0 } else { 0.0 }).collect())
                .collect(),
            BasisFamily::LegendreOrthonormal => {
                let per_axis: Vec<Vec<Vec<f64>>> = self
                    .domain
                    .iter()
                    .map(|&(a, b)| univariate_power_coeffs(self.family, self.d, a, b))
                    .collect();
                self.indices
                    .iter()
                    .map(|alpha| {
                        self.indices
                            .iter()
                            .map(|beta| {
                                alpha
                                    .0
                                    .iter()
                                    .zip(&beta.0)
                                    .enumerate()
                                    .map(|(j, (&a, &b))| per_axis[j][a].get(b).copied().unwrap_or(0.0))
                                    .product()
                            })
                            .collect()
                    })
                    .collect()
            }
        }
    }
}

/// Power coefficients (in the raw variable) of the univariate factors `0..=d`
/// on `[a, b]`.
fn univariate_power_coeffs(family: BasisFamily, d: usize, a: f64, b: f64) -> Vec<Vec<f64>> {
    match family {
        BasisFamily::MonomialGrevlex => (0..=d)
            .map(|m| {
                let mut c = vec![0.0; m + 1];
                c[m] = 1.0;
                c
            })
            .collect(),
        BasisFamily::LegendreOrthonormal => {
            let w = b - a;
            // s = (2t - a - b) / w = offset + scale * t
            let offset = -(a + b) / w;
            let scale = 2.0 / w;
            poly::legendre_power_coeffs(d)
                .into_iter()
                .enumerate()
                .map(|(k, c)| {
                    let norm = ((2 * k + 1) as f64 / w).sqrt();
                    poly::affine_compose(&c, offset, scale).into_iter().map(|v| v * norm).collect()
                })
                .collect()
        }
    }
}
