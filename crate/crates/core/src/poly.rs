//! Dense univariate polynomials in the power basis, lowest degree first.

/// Horner evaluation of `sum c[k] t^k`.
pub fn horner(c: &[f64], t: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &ck| acc * t + ck)
}

/// Coefficients of `s -> p(center + s)`.
pub fn taylor_shift(c: &[f64], center: f64) -> Vec<f64> {
    let mut a = c.to_vec();
    let n = a.len();
    // Repeated synthetic division by (t - center).
    for i in 0..n {
        for k in (i..n.saturating_sub(1)).rev() {
            a[k] += center * a[k + 1];
        }
    }
    a
}

/// Coefficients of `t -> p(scale * t)`.
pub fn scale_argument(c: &[f64], scale: f64) -> Vec<f64> {
    let mut f = 1.0;
    c.iter()
        .map(|&ck| {
            let v = ck * f;
            f *= scale;
            v
        })
        .collect()
}

/// Coefficients of `t -> p(offset + scale * t)`.
pub fn affine_compose(c: &[f64], offset: f64, scale: f64) -> Vec<f64> {
    scale_argument(&taylor_shift(c, offset), scale)
}

/// Adds `weight * a * b` into `out`, which must hold `a.len() + b.len() - 1` entries.
pub fn add_weighted_product(out: &mut [f64], a: &[f64], b: &[f64], weight: f64) {
    for (i, &ai) in a.iter().enumerate() {
        if ai == 0.0 {
            continue;
        }
        let wai = weight * ai;
        for (j, &bj) in b.iter().enumerate() {
            out[i + j] += wai * bj;
        }
    }
}

/// Power-basis coefficients of the Legendre polynomials `P_0..=P_n` on [-1, 1].
pub fn legendre_power_coeffs(n: usize) -> Vec<Vec<f64>> {
    let mut rows: Vec<Vec<f64>> = Vec::with_capacity(n + 1);
    rows.push(vec![1.0]);
    if n >= 1 {
        rows.push(vec![0.0, 1.0]);
    }
    for k in 1..n {
        // (k+1) P_{k+1} = (2k+1) t P_k - k P_{k-1}
        let mut next = vec![0.0; k + 2];
        for (j, &c) in rows[k].iter().enumerate() {
            next[j + 1] += (2 * k + 1) as f64 * c;
        }
        for (j, &c) in rows[k - 1].iter().enumerate() {
            next[j] -= k as f64 * c;
        }
        for c in next.iter_mut() {
            *c /= (k + 1) as f64;
        }
        rows.push(next);
    }
    rows
}

/// Values `P_0(t)..=P_n(t)` by the three-term recurrence.
pub fn legendre_values(n: usize, t: f64, out: &mut [f64]) {
    out[0] = 1.0;
    if n == 0 {
        return;
    }
    out[1] = t;
    for k in 1..n {
        out[k + 1] = ((2 * k + 1) as f64 * t * out[k] - k as f64 * out[k - 1]) / (k + 1) as f64;
    }
}
