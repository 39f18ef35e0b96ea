//! Gauss–Legendre rules and their tensor products over axis-aligned boxes.

use std::f64::consts::PI;

/// An `n`-point Gauss–Legendre rule on [-1, 1].
#[derive(Debug, Clone)]
pub struct GaussLegendre {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

impl GaussLegendre {
    /// Newton iteration on `P_n` from Chebyshev-like initial guesses.
    pub fn new(n: usize) -> Self {
        assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
        let mut nodes = vec![0.0; n];
        let mut weights = vec![0.0; n];
        let m = n.div_ceil(2);
        for i in 0..m {
            let mut x = (PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
            let mut dp = 1.0;
            for _ in 0..100 {
                let (p, d) = legendre_with_derivative(n, x);
                dp = d;
                let dx = p / d;
                x -= dx;
                if dx.abs() <= 1e-16 * x.abs().max(1.0) {
                    break;
                }
            }
            let (_, d) = legendre_with_derivative(n, x);
            dp = if d != 0.0 { d } else { dp };
            let w = 2.0 / ((1.0 - x * x) * dp * dp);
            nodes[i] = -x;
            nodes[n - 1 - i] = x;
            weights[i] = w;
            weights[n - 1 - i] = w;
        }
        if n % 2 == 1 {
            nodes[n / 2] = 0.0;
        }
        GaussLegendre { nodes, weights }
    }

    /// Nodes and weights mapped to `[a, b]`.
    pub fn on_interval(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let x = self.nodes.iter().map(|t| mid + half * t).collect();
        let w = self.weights.iter().map(|w| half * w).collect();
        (x, w)
    }

    pub fn integrate(&self, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
        let (x, w) = self.on_interval(a, b);
        x.iter().zip(&w).map(|(&xi, &wi)| wi * f(xi)).sum()
    }
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 1..n {
        let p2 = ((2 * k + 1) as f64 * x * p1 - k as f64 * p0) / (k + 1) as f64;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// Tensor-product rule over a box, one `(point, weight)` per node, last axis fastest.
pub fn tensor_rule(boxes: &[(f64, f64)], nodes_per_axis: usize) -> Vec<(Vec<f64>, f64)> {
    let rule = GaussLegendre::new(nodes_per_axis);
    let axes: Vec<(Vec<f64>, Vec<f64>)> = boxes.iter().map(|&(a, b)| rule.on_interval(a, b)).collect();
    let total: usize = axes.iter().map(|(x, _)| x.len()).product();
    let mut out = Vec::with_capacity(total);
    let dim = boxes.len();
    let mut counter = vec![0usize; dim];
    for _ in 0..total {
        let point: Vec<f64> = (0..dim).map(|j| axes[j].0[counter[j]]).collect();
        let weight: f64 = (0..dim).map(|j| axes[j].1[counter[j]]).product();
        out.push((point, weight));
        for j in (0..dim).rev() {
            counter[j] += 1;
            if counter[j] < nodes_per_axis {
                break;
            }
            counter[j] = 0;
        }
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn exact_for_degree_2n_minus_1() {
        for n in 1..12 {
            let rule = GaussLegendre::new(n);
            for k in 0..(2 * n) {
                let exact = if k % 2 == 0 { 2.0 / (k as f64 + 1.0) } else { 0.0 };
                let got = rule.integrate(-1.0, 1.0, |x| x.powi(k as i32));
                assert_relative_eq!(got, exact, epsilon = 1e-13);
            }
        }
    }

    #[test]
    fn weights_sum_to_length() {
        let rule = GaussLegendre::new(200);
        let s: f64 = rule.weights.iter().sum();
        assert_relative_eq!(s, 2.0, epsilon = 1e-12);
    }

    #[test]
    fn tensor_rule_integrates_box_monomials() {
        let rule = tensor_rule(&[(-1.0, 1.0), (0.0, 2.0)], 4);
        assert_eq!(rule.len(), 16);
        let got: f64 = rule.iter().map(|(z, w)| w * z[0] * z[0] * z[1]).sum();
        // (2/3) * 2
        assert_relative_eq!(got, 4.0 / 3.0, epsilon = 1e-13);
    }
}
