//! Moment matrices of graph measures `dmu = 1_X(x) dx delta_{f(x)}(dy)`.
//!
//! Builders produce the matrix analytically (piecewise closed forms in the
//! monomial basis, then a change of basis), by tensor Gauss–Legendre
//! quadrature, or empirically from samples. Analytic and quadrature matrices
//! integrate against `dx`; empirical matrices average over samples, so their
//! mass is 1. The mass is carried alongside the entries.

use std::f64::consts::PI;
use std::fmt;
use std::fs;
use std::path::Path;
use std::str::FromStr;

use nalgebra::{DMatrix, SymmetricEigen};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::basis::{BasisFamily, BasisSpec, MultiIndex};
use crate::benchmarks::StepFamily;
use crate::error::{Error, Result};
use crate::graph::GraphFunction;
use crate::quadrature::tensor_rule;

/// Relative asymmetry accepted without comment.
pub const SYMMETRY_TOL: f64 = 1e-12;
/// Relative asymmetry that is repaired (with a warning) on load; above it the
/// file is rejected.
pub const SKEW_REPAIR_TOL: f64 = 1e-6;
/// Eigenvalues in `[-PSD_CLIP_TOL * lambda_max, 0)` are treated as zero.
pub const PSD_CLIP_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Provenance {
    Analytic,
    Quadrature,
    Empirical,
    File,
}

impl fmt::Display for Provenance {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Provenance::Analytic => "analytic",
            Provenance::Quadrature => "quadrature",
            Provenance::Empirical => "empirical",
            Provenance::File => "file",
        })
    }
}

impl FromStr for Provenance {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "analytic" => Ok(Provenance::Analytic),
            "quadrature" => Ok(Provenance::Quadrature),
            "empirical" => Ok(Provenance::Empirical),
            "file" => Ok(Provenance::File),
            other => Err(Error::InvalidParameter(format!("unknown provenance `{other}`"))),
        }
    }
}

/// Moment matrix `M_{mu,d}` together with its basis and mass.
#[derive(Debug, Clone, PartialEq)]
pub struct MomentMatrix {
    pub spec: BasisSpec,
    pub entries: DMatrix<f64>,
    pub provenance: Provenance,
    /// Total mass `mu(R^p)`.
    pub mass: f64,
    pub note: String,
}

impl MomentMatrix {
    pub fn new(spec: BasisSpec, entries: DMatrix<f64>, provenance: Provenance, mass: f64) -> Result<Self> {
        let n = spec.len();
        if entries.nrows() != n || entries.ncols() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                got: entries.nrows(),
                context: "moment matrix rows",
            });
        }
        Ok(MomentMatrix {
            spec,
            entries,
            provenance,
            mass,
            note: String::new(),
        })
    }

    pub fn with_note(mut self, note: impl Into<String>) -> Self {
        self.note = note.into();
        self
    }

    pub fn n(&self) -> usize {
        self.entries.nrows()
    }

    /// Largest `|a_ij - a_ji|` relative to the largest entry.
    pub fn relative_skew(&self) -> f64 {
        relative_skew(&self.entries)
    }

    /// Smallest and largest eigenvalue.
    pub fn eigen_range(&self) -> (f64, f64) {
        let eig = SymmetricEigen::new(self.entries.clone());
        let min = eig.eigenvalues.iter().copied().fold(f64::INFINITY, f64::min);
        let max = eig.eigenvalues.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        (min, max)
    }

    /// Checks symmetry and positive semidefiniteness up to [`PSD_CLIP_TOL`].
    pub fn validate(&self) -> Result<()> {
        let skew = self.relative_skew();
        if skew > SYMMETRY_TOL {
            return Err(Error::Asymmetric(skew));
        }
        let (min, max) = self.eigen_range();
        let tol = PSD_CLIP_TOL * max.max(0.0);
        if min < -tol {
            return Err(Error::Indefinite {
                eigenvalue: min,
                tolerance: -tol,
            });
        }
        Ok(())
    }

    /// Leading principal submatrix for degree `d`, which in graded order is
    /// the moment matrix of the same measure at the lower degree.
    pub fn truncate(&self, d: usize) -> Result<Self> {
        if d > self.spec.d() {
            return Err(Error::InvalidParameter(format!(
                "cannot truncate degree {} matrix to degree {d}",
                self.spec.d()
            )));
        }
        let spec = self.spec.with_degree(d)?;
        let n = spec.len();
        let entries = self.entries.view((0, 0), (n, n)).into_owned();
        Ok(MomentMatrix {
            spec,
            entries,
            provenance: self.provenance,
            mass: self.mass,
            note: self.note.clone(),
        })
    }

    /// Re-expresses the matrix of a monomial-basis measure in `target`
    /// (same `p` and `d`): `M' = T M T^T` with `b' = T m`.
    pub fn change_basis(&self, target: &BasisSpec) -> Result<Self> {
        if self.spec.family() != BasisFamily::MonomialGrevlex {
            return Err(Error::Unsupported("change of basis starts from a monomial matrix".into()));
        }
        if target.p() != self.spec.p() || target.d() != self.spec.d() {
            return Err(Error::DimensionMismatch {
                expected: self.n(),
                got: target.len(),
                context: "target basis",
            });
        }
        let n = self.n();
        let t = target.from_monomial_transform();
        let t = DMatrix::from_fn(n, n, |i, j| t[i][j]);
        let mut entries = &t * &self.entries * t.transpose();
        symmetrize(&mut entries);
        Ok(MomentMatrix {
            spec: target.clone(),
            entries,
            provenance: self.provenance,
            mass: self.mass,
            note: self.note.clone(),
        })
    }
}

fn relative_skew(m: &DMatrix<f64>) -> f64 {
    let scale = m.iter().fold(0.0f64, |a, &v| a.max(v.abs()));
    if scale == 0.0 {
        return 0.0;
    }
    let n = m.nrows();
    let mut worst = 0.0f64;
    for i in 0..n {
        for j in 0..i {
            worst = worst.max((m[(i, j)] - m[(j, i)]).abs());
        }
    }
    worst / scale
}

fn symmetrize(m: &mut DMatrix<f64>) {
    let n = m.nrows();
    for i in 0..n {
        for j in 0..i {
            let v = 0.5 * (m[(i, j)] + m[(j, i)]);
            m[(i, j)] = v;
            m[(j, i)] = v;
        }
    }
}

/// `int_{-1}^{1} x^a1 sign(x)^a2 dx`, with `0^0 = 1`.
pub fn sign_moment(a1: u32, a2: u32) -> f64 {
    let zero_pow = if a1 + 1 == 0 { 1.0 } else { 0.0f64.powi(a1 as i32 + 1) };
    let neg1 = |k: u32| if k.is_multiple_of(2) { 1.0 } else { -1.0 };
    (neg1(a2) * (zero_pow - neg1(a1 + 1)) + 1.0 - zero_pow) / (a1 + 1) as f64
}

/// `int_{-1}^{1} x^a1 |x|^a2 dx`.
pub fn abs_moment(a1: u32, a2: u32) -> f64 {
    let even = if a1.is_multiple_of(2) { 2.0 } else { 0.0 };
    even / (a1 + a2 + 1) as f64
}

/// `int_{-1}^{1} x^k dx`.
fn interval_moment(k: u32) -> f64 {
    if k.is_multiple_of(2) {
        2.0 / (k + 1) as f64
    } else {
        0.0
    }
}

/// `int_{|x| <= r} x1^a x2^b dx` over a centered disk.
pub fn disk_moment(a: u32, b: u32, radius: f64) -> f64 {
    if a % 2 == 1 || b % 2 == 1 {
        return 0.0;
    }
    // int_0^{2pi} cos^a sin^b = 2pi (a-1)!! (b-1)!! / (a+b)!!
    let dfact = |n: i64| -> f64 {
        let mut acc = 1.0;
        let mut k = n;
        while k > 1 {
            acc *= k as f64;
            k -= 2;
        }
        acc
    };
    let angular = 2.0 * PI * dfact(a as i64 - 1) * dfact(b as i64 - 1) / dfact((a + b) as i64);
    let s = a + b + 2;
    angular * radius.powi(s as i32) / s as f64
}

/// Graph measures with closed-form moments, all on `X = [-1, 1]^(p-1)`.
#[derive(Debug, Clone, PartialEq)]
pub enum AnalyticGraph {
    Sign,
    Abs,
    Step(StepFamily),
    /// Indicator of the centered disk of the given radius (`p = 3`).
    Disk { radius: f64 },
}

impl AnalyticGraph {
    pub fn p(&self) -> usize {
        match self {
            AnalyticGraph::Disk { .. } => 3,
            _ => 2,
        }
    }

    /// `mu(R^p) = vol(X)`.
    pub fn mass(&self) -> f64 {
        match self {
            AnalyticGraph::Disk { .. } => 4.0,
            _ => 2.0,
        }
    }

    /// `int_X x^a f(x)^b dx` for the monomial exponent `(a.., b)`.
    pub fn monomial_moment(&self, alpha: &[usize]) -> f64 {
        let e: Vec<u32> = alpha.iter().map(|&k| k as u32).collect();
        match self {
            AnalyticGraph::Sign => sign_moment(e[0], e[1]),
            AnalyticGraph::Abs => abs_moment(e[0], e[1]),
            AnalyticGraph::Step(step) => step
                .pieces()
                .iter()
                .map(|&(a, b, c)| {
                    let k = e[0] as i32 + 1;
                    c.powi(e[1] as i32) * (b.powi(k) - a.powi(k)) / k as f64
                })
                .sum(),
            AnalyticGraph::Disk { radius } => {
                if e[2] == 0 {
                    interval_moment(e[0]) * interval_moment(e[1])
                } else {
                    disk_moment(e[0], e[1], *radius)
                }
            }
        }
    }
}

/// Exact moment matrix of an analytic graph measure in `spec`'s basis.
pub fn analytic_moment_matrix(graph: &AnalyticGraph, spec: &BasisSpec) -> Result<MomentMatrix> {
    if graph.p() != spec.p() {
        return Err(Error::Unsupported(format!("{graph:?} requires p = {}, got p = {}", graph.p(), spec.p())));
    }
    let mono = BasisSpec::with_domain(spec.p(), spec.d(), BasisFamily::MonomialGrevlex, spec.domain().to_vec())?;
    let idx: &[MultiIndex] = mono.indices();
    let n = idx.len();
    let entries = DMatrix::from_fn(n, n, |i, j| {
        let alpha: Vec<usize> = idx[i].0.iter().zip(&idx[j].0).map(|(a, b)| a + b).collect();
        graph.monomial_moment(&alpha)
    });
    let m = MomentMatrix::new(mono, entries, Provenance::Analytic, graph.mass())?.with_note(format!("{graph:?}"));
    match spec.family() {
        BasisFamily::MonomialGrevlex => Ok(m),
        BasisFamily::LegendreOrthonormal => m.change_basis(spec),
    }
}

/// Sums `w b(z) b(z)^T` over `(z, w)` with a fixed-order chunked reduction.
fn accumulate(spec: &BasisSpec, points: &[(Vec<f64>, f64)]) -> Result<DMatrix<f64>> {
    const CHUNK: usize = 256;
    let n = spec.len();
    let partials: Vec<Result<DMatrix<f64>>> = points
        .par_chunks(CHUNK)
        .map(|chunk| {
            let mut acc = DMatrix::<f64>::zeros(n, n);
            for (z, w) in chunk {
                let b = nalgebra::DVector::from_vec(spec.eval(z)?);
                acc.syger(*w, &b, &b, 1.0);
            }
            Ok(acc)
        })
        .collect();
    let mut total = DMatrix::<f64>::zeros(n, n);
    for part in partials {
        total += part?;
    }
    // syger fills the lower triangle only
    for i in 0..n {
        for j in 0..i {
            total[(j, i)] = total[(i, j)];
        }
    }
    Ok(total)
}

/// Tensor Gauss–Legendre approximation of `int_X b(x, f(x)) b(x, f(x))^T dx`.
pub fn quadrature_moment_matrix(f: &GraphFunction, spec: &BasisSpec, nodes_per_axis: usize) -> Result<MomentMatrix> {
    if nodes_per_axis < 2 {
        return Err(Error::InvalidParameter("quadrature needs at least 2 nodes per axis".into()));
    }
    if f.input_dim() + 1 != spec.p() {
        return Err(Error::DimensionMismatch {
            expected: spec.p() - 1,
            got: f.input_dim(),
            context: "function input dimension",
        });
    }
    let rule = tensor_rule(f.domain(), nodes_per_axis);
    let mut points = Vec::with_capacity(rule.len());
    let mut mass = 0.0;
    for (x, w) in rule {
        let y = f.eval(&x);
        if !y.is_finite() {
            return Err(Error::NonFinite { value: y, location: x });
        }
        let mut z = x;
        z.push(y);
        mass += w;
        points.push((z, w));
    }
    let entries = accumulate(spec, &points)?;
    Ok(MomentMatrix::new(spec.clone(), entries, Provenance::Quadrature, mass)?
        .with_note(format!("{} gauss-legendre {nodes_per_axis}/axis", f.name())))
}

/// `(1/N) sum_k b(x_k, y_k) b(x_k, y_k)^T`.
pub fn empirical_moment_matrix(samples: &[(Vec<f64>, f64)], spec: &BasisSpec) -> Result<MomentMatrix> {
    if samples.is_empty() {
        return Err(Error::EmptySamples);
    }
    let w = 1.0 / samples.len() as f64;
    let mut outside = 0usize;
    let points: Vec<(Vec<f64>, f64)> = samples
        .iter()
        .map(|(x, y)| {
            let mut z = x.clone();
            z.push(*y);
            if !spec.contains(&z) {
                outside += 1;
            }
            (z, w)
        })
        .collect();
    if outside > 0 {
        log::warn!("{outside} of {} samples lie outside the basis domain box", samples.len());
    }
    let entries = accumulate(spec, &points)?;
    Ok(MomentMatrix::new(spec.clone(), entries, Provenance::Empirical, 1.0)?
        .with_note(format!("{} samples", samples.len())))
}

/// Moment matrix of the reference measure (Lebesgue on the whole domain box).
pub fn reference_moment_matrix(spec: &BasisSpec, nodes_per_axis: usize) -> Result<MomentMatrix> {
    let rule = tensor_rule(spec.domain(), nodes_per_axis);
    let mass = rule.iter().map(|(_, w)| w).sum();
    let entries = accumulate(spec, &rule)?;
    MomentMatrix::new(spec.clone(), entries, Provenance::Quadrature, mass)
}

// ---------------------------------------------------------------------------
// File formats

const TEXT_MAGIC: &str = "cdapprox-moments";
const SOS_MAGIC: &str = "cdapprox-sos";
const FORMAT_VERSION: u32 = 1;

#[derive(Debug, Serialize, Deserialize)]
struct JsonMatrix {
    version: u32,
    p: usize,
    d: usize,
    family: BasisFamily,
    ordering: String,
    domain: Vec<(f64, f64)>,
    mass: f64,
    provenance: Provenance,
    #[serde(default)]
    note: String,
    entries: Vec<Vec<f64>>,
}

fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

fn write_header(out: &mut String, magic: &str, spec: &BasisSpec) {
    out.push_str(&format!("{magic} {FORMAT_VERSION}\n"));
    out.push_str(&format!("p {}\n", spec.p()));
    out.push_str(&format!("d {}\n", spec.d()));
    out.push_str(&format!("family {}\n", spec.family()));
    out.push_str("ordering grevlex\n");
    let dom: Vec<String> = spec.domain().iter().flat_map(|&(a, b)| [fmt17(a), fmt17(b)]).collect();
    out.push_str(&format!("domain {}\n", dom.join(" ")));
}

/// Text form: header lines, then the lower triangle row by row.
pub fn to_text(m: &MomentMatrix) -> String {
    let mut out = String::new();
    write_header(&mut out, TEXT_MAGIC, &m.spec);
    out.push_str(&format!("mass {}\n", fmt17(m.mass)));
    out.push_str(&format!("provenance {}\n", m.provenance));
    out.push_str("layout lower\n");
    if !m.note.is_empty() {
        out.push_str(&format!("note {}\n", m.note.replace('\n', " ")));
    }
    out.push_str("data\n");
    for i in 0..m.n() {
        let row: Vec<String> = (0..=i).map(|j| fmt17(m.entries[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn to_json(m: &MomentMatrix) -> Result<String> {
    let n = m.n();
    let file = JsonMatrix {
        version: FORMAT_VERSION,
        p: m.spec.p(),
        d: m.spec.d(),
        family: m.spec.family(),
        ordering: "grevlex".into(),
        domain: m.spec.domain().to_vec(),
        mass: m.mass,
        provenance: m.provenance,
        note: m.note.clone(),
        entries: (0..n).map(|i| (0..n).map(|j| m.entries[(i, j)]).collect()).collect(),
    };
    Ok(serde_json::to_string_pretty(&file)?)
}

struct Header {
    spec: BasisSpec,
    mass: Option<f64>,
    provenance: Option<Provenance>,
    layout: String,
    note: String,
    data_line: usize,
}

fn parse_num<T: FromStr>(line: usize, key: &str, v: &str) -> Result<T> {
    v.parse().map_err(|_| Error::format(line, format!("bad value `{v}` for `{key}`")))
}

fn parse_header<'a>(lines: &mut impl Iterator<Item = (usize, &'a str)>, magic: &str) -> Result<Header> {
    let (lno, first) = lines.next().ok_or_else(|| Error::format(1, "empty file"))?;
    let mut it = first.split_whitespace();
    if it.next() != Some(magic) {
        return Err(Error::format(lno, format!("expected `{magic}` header")));
    }
    let version: u32 = parse_num(lno, "version", it.next().unwrap_or(""))?;
    if version != FORMAT_VERSION {
        return Err(Error::format(lno, format!("unsupported version {version}")));
    }
    let (mut p, mut d, mut family, mut domain) = (None, None, None, None);
    let (mut mass, mut provenance, mut layout, mut note) = (None, None, "lower".to_string(), String::new());
    for (lno, raw) in lines.by_ref() {
        let line = raw.trim();
        if line.is_empty() || line.starts_with('#') {
            continue;
        }
        if line == "data" {
            let p: usize = p.ok_or_else(|| Error::format(lno, "missing `p`"))?;
            let d: usize = d.ok_or_else(|| Error::format(lno, "missing `d`"))?;
            let family = family.ok_or_else(|| Error::format(lno, "missing `family`"))?;
            let domain = domain.unwrap_or_else(|| vec![(-1.0, 1.0); p]);
            let spec = BasisSpec::with_domain(p, d, family, domain)?;
            return Ok(Header {
                spec,
                mass,
                provenance,
                layout,
                note,
                data_line: lno,
            });
        }
        let (key, value) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
        let value = value.trim();
        match key {
            "p" => p = Some(parse_num(lno, key, value)?),
            "d" => d = Some(parse_num(lno, key, value)?),
            "family" => family = Some(value.parse::<BasisFamily>().map_err(|e| Error::format(lno, e.to_string()))?),
            "ordering" => {
                if value != "grevlex" {
                    return Err(Error::format(lno, format!("unsupported ordering `{value}`")));
                }
            }
            "domain" => {
                let vals: Vec<f64> = value
                    .split_whitespace()
                    .map(|t| parse_num(lno, key, t))
                    .collect::<Result<_>>()?;
                if !vals.len().is_multiple_of(2) {
                    return Err(Error::format(lno, "domain needs an even number of bounds"));
                }
                domain = Some(vals.chunks(2).map(|c| (c[0], c[1])).collect());
            }
            "mass" => mass = Some(parse_num(lno, key, value)?),
            "provenance" => provenance = Some(value.parse().map_err(|e: Error| Error::format(lno, e.to_string()))?),
            "layout" => layout = value.to_string(),
            "note" => note = value.to_string(),
            other => return Err(Error::format(lno, format!("unknown header key `{other}`"))),
        }
    }
    Err(Error::format(0, "missing `data` section"))
}

fn parse_tokens<'a>(lines: impl Iterator<Item = (usize, &'a str)>) -> Result<Vec<f64>> {
    let mut vals = Vec::new();
    for (lno, line) in lines {
        for tok in line.split_whitespace() {
            vals.push(parse_num(lno, "entry", tok)?);
        }
    }
    Ok(vals)
}

/// Accepts small asymmetry (repairs it), rejects large.
fn check_symmetry(entries: &mut DMatrix<f64>) -> Result<()> {
    let skew = relative_skew(entries);
    if skew > SKEW_REPAIR_TOL {
        return Err(Error::Asymmetric(skew));
    }
    if skew > SYMMETRY_TOL {
        log::warn!("moment matrix skew {skew:e} repaired by symmetrization");
    }
    symmetrize(entries);
    Ok(())
}

pub fn from_text(text: &str) -> Result<MomentMatrix> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = parse_header(&mut lines, TEXT_MAGIC)?;
    let vals = parse_tokens(lines)?;
    let n = header.spec.len();
    let mut entries = DMatrix::<f64>::zeros(n, n);
    match header.layout.as_str() {
        "lower" => {
            if vals.len() != n * (n + 1) / 2 {
                return Err(Error::DimensionMismatch {
                    expected: n * (n + 1) / 2,
                    got: vals.len(),
                    context: "lower-triangle entries",
                });
            }
            let mut k = 0;
            for i in 0..n {
                for j in 0..=i {
                    entries[(i, j)] = vals[k];
                    entries[(j, i)] = vals[k];
                    k += 1;
                }
            }
        }
        "full" => {
            if vals.len() != n * n {
                return Err(Error::DimensionMismatch {
                    expected: n * n,
                    got: vals.len(),
                    context: "full-matrix entries",
                });
            }
            entries = DMatrix::from_row_slice(n, n, &vals);
            check_symmetry(&mut entries)?;
        }
        other => return Err(Error::format(header.data_line, format!("unknown layout `{other}`"))),
    }
    let mass = header.mass.unwrap_or(entries[(0, 0)]);
    Ok(MomentMatrix {
        spec: header.spec,
        entries,
        provenance: header.provenance.unwrap_or(Provenance::File),
        mass,
        note: header.note,
    })
}

pub fn from_json(text: &str) -> Result<MomentMatrix> {
    let file: JsonMatrix = serde_json::from_str(text)?;
    if file.version != FORMAT_VERSION {
        return Err(Error::format(1, format!("unsupported version {}", file.version)));
    }
    if file.ordering != "grevlex" {
        return Err(Error::format(1, format!("unsupported ordering `{}`", file.ordering)));
    }
    let spec = BasisSpec::with_domain(file.p, file.d, file.family, file.domain)?;
    let n = spec.len();
    if file.entries.len() != n || file.entries.iter().any(|r| r.len() != n) {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: file.entries.len(),
            context: "matrix rows",
        });
    }
    let mut entries = DMatrix::from_fn(n, n, |i, j| file.entries[i][j]);
    check_symmetry(&mut entries)?;
    Ok(MomentMatrix {
        spec,
        entries,
        provenance: file.provenance,
        mass: file.mass,
        note: file.note,
    })
}

fn is_json(path: &Path) -> bool {
    path.extension().and_then(|e| e.to_str()) == Some("json")
}

/// Writes text, or JSON when the extension is `.json`.
pub fn save_matrix(m: &MomentMatrix, path: impl AsRef<Path>) -> Result<()> {
    let path = path.as_ref();
    let body = if is_json(path) { to_json(m)? } else { to_text(m) };
    fs::write(path, body)?;
    Ok(())
}

pub fn load_matrix(path: impl AsRef<Path>) -> Result<MomentMatrix> {
    let path = path.as_ref();
    let text = fs::read_to_string(path)?;
    if is_json(path) {
        from_json(&text)
    } else {
        from_text(&text)
    }
}

/// Rows of polynomial coefficients (one polynomial per line) with the basis header.
pub fn sos_to_text(spec: &BasisSpec, rows: &DMatrix<f64>) -> String {
    let mut out = String::new();
    write_header(&mut out, SOS_MAGIC, spec);
    out.push_str("layout rows\n");
    out.push_str("data\n");
    for i in 0..rows.nrows() {
        let row: Vec<String> = (0..rows.ncols()).map(|j| fmt17(rows[(i, j)])).collect();
        out.push_str(&row.join(" "));
        out.push('\n');
    }
    out
}

pub fn sos_from_text(text: &str) -> Result<(BasisSpec, DMatrix<f64>)> {
    let mut lines = text.lines().enumerate().map(|(i, l)| (i + 1, l));
    let header = parse_header(&mut lines, SOS_MAGIC)?;
    let n = header.spec.len();
    let vals = parse_tokens(lines)?;
    if vals.len() % n != 0 {
        return Err(Error::DimensionMismatch {
            expected: n,
            got: vals.len() % n,
            context: "coefficients per row",
        });
    }
    let rows = DMatrix::from_row_slice(vals.len() / n, n, &vals);
    Ok((header.spec, rows))
}
