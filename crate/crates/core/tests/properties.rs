use cdapprox::basis::enumerate_indices;
use cdapprox::metrics::{l2_projection, LegendreSeries};
use cdapprox::moments::{from_text, to_text};
use cdapprox::poly::legendre_values;
use cdapprox::support::max_distance_in_sublevel;
use cdapprox::{
    basis_size, build_kernel, empirical_moment_matrix, partial_argmin, BasisSpec, Benchmark, Filter, GraphFunction,
    MomentMatrix,
};
use nalgebra::{DMatrix, DVector};
use proptest::prelude::*;

fn samples_strategy(max: usize) -> impl Strategy<Value = Vec<(Vec<f64>, f64)>> {
    prop::collection::vec((-1.0f64..1.0, -1.0f64..1.0), 3..max).prop_map(|v| v.into_iter().map(|(x, y)| (vec![x], y)).collect())
}

fn empirical(samples: &[(Vec<f64>, f64)], d: usize) -> MomentMatrix {
    empirical_moment_matrix(samples, &BasisSpec::monomial(2, d).unwrap()).unwrap()
}

fn dense_q(m: &MomentMatrix, beta: f64, z: &[f64]) -> f64 {
    let n = m.n();
    let a = &m.entries + DMatrix::<f64>::identity(n, n) * beta;
    let b = DVector::from_vec(m.spec.eval(z).unwrap());
    let sol = a.lu().solve(&b).unwrap();
    b.dot(&sol)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn grevlex_blocks(p in 1usize..5, d in 0usize..7) {
        let idx = enumerate_indices(p, d);
        prop_assert_eq!(idx.len(), basis_size(p, d).unwrap());
        for w in idx.windows(2) {
            let (a, b) = (&w[0], &w[1]);
            prop_assert!(a.total_degree() <= b.total_degree());
            if a.total_degree() == b.total_degree() {
                // Within a block the last exponent never decreases.
                prop_assert!(a.0.iter().rev().cmp(b.0.iter().rev()) == std::cmp::Ordering::Less);
            }
        }
    }

    #[test]
    fn empirical_matrix_is_psd(samples in samples_strategy(40), d in 1usize..4) {
        let m = empirical(&samples, d);
        let (lo, hi) = m.eigen_range();
        prop_assert!(lo >= -1e-10 * hi.max(1.0), "{} {}", lo, hi);
        prop_assert_eq!(m.relative_skew(), 0.0);
    }

    #[test]
    fn kernel_matches_dense_solve(samples in samples_strategy(60), d in 1usize..4, x in -1.0f64..1.0, y in -1.0f64..1.0) {
        let m = empirical(&samples, d);
        let beta = 1e-3;
        let k = build_kernel(&m, beta, Filter::Tikhonov).unwrap();
        let q = k.eval_q(&[x, y]).unwrap();
        let want = dense_q(&m, beta, &[x, y]);
        prop_assert!((q - want).abs() <= 1e-8 * want, "{} vs {}", q, want);
    }

    #[test]
    fn markov_mass_below_dimension(samples in samples_strategy(60), d in 1usize..5, beta in 1e-8f64..10.0) {
        let m = empirical(&samples, d);
        let k = build_kernel(&m, beta, Filter::Tikhonov).unwrap();
        let mass = k.markov_mass().unwrap();
        prop_assert!(mass >= 0.0 && mass <= m.n() as f64 + 1e-12);
    }

    #[test]
    fn q_decreases_in_beta(samples in samples_strategy(30), x in -1.0f64..1.0, y in -1.0f64..1.0, b1 in 1e-6f64..1.0, f in 1.01f64..100.0) {
        let m = empirical(&samples, 2);
        let small = build_kernel(&m, b1, Filter::Tikhonov).unwrap().eval_q(&[x, y]).unwrap();
        let large = build_kernel(&m, b1 * f, Filter::Tikhonov).unwrap().eval_q(&[x, y]).unwrap();
        prop_assert!(large <= small * (1.0 + 1e-12));
    }

    #[test]
    fn argmin_is_epsilon_optimal(roots in prop::collection::vec(-1.5f64..1.5, 1..4), shift in 0.0f64..1.0, eps in 1e-6f64..1e-2) {
        // sum of squared linear factors plus a constant: non-negative, degree 2k
        let mut c = vec![shift];
        for r in &roots {
            let mut next = vec![0.0; c.len() + 2];
            for (i, ci) in c.iter().enumerate() {
                next[i] += ci * r * r;
                next[i + 1] -= 2.0 * ci * r;
                next[i + 2] += ci;
            }
            c = next;
            c[0] += 0.1;
        }
        let val = |y: f64| c.iter().rev().fold(0.0, |acc, ck| acc * y + ck);
        let (ys, qs) = partial_argmin(&c, (-1.0, 1.0), eps, 0.0).unwrap();
        prop_assert!((-1.0..=1.0).contains(&ys));
        prop_assert!((qs - val(ys)).abs() <= 1e-12 * qs.abs().max(1.0));
        let grid_min = (0..=20_000).map(|j| val(-1.0 + j as f64 / 10_000.0)).fold(f64::INFINITY, f64::min);
        prop_assert!(qs <= grid_min + eps + 1e-12 * grid_min.abs());
    }

    #[test]
    fn argmin_scale_invariant(a in -1.0f64..1.0, b in -1.0f64..1.0, k in -20i32..20) {
        let c = vec![1.0 + a * a, -2.0 * a, 1.0, 0.3 * b, 0.5];
        let s = 2f64.powi(k);
        let scaled: Vec<f64> = c.iter().map(|v| v * s).collect();
        let (y1, q1) = partial_argmin(&c, (-1.0, 1.0), 1e-6, 1e-9).unwrap();
        let (y2, q2) = partial_argmin(&scaled, (-1.0, 1.0), 1e-6 * s, 1e-9).unwrap();
        prop_assert_eq!(y1, y2);
        prop_assert_eq!(q1 * s, q2);
    }

    #[test]
    fn projection_reproduces_polynomials(coeffs in prop::collection::vec(-2.0f64..2.0, 1..6), extra in 0usize..4) {
        let k = coeffs.len() - 1;
        let series = LegendreSeries { interval: (-1.0, 1.0), coeffs: coeffs.clone() };
        let f = GraphFunction::new("poly", vec![(-1.0, 1.0)], (-100.0, 100.0), move |x| series.eval(x[0]));
        let s = l2_projection(&f, k + extra).unwrap();
        for (j, c) in s.coeffs.iter().enumerate() {
            let want = coeffs.get(j).copied().unwrap_or(0.0);
            prop_assert!((c - want).abs() < 1e-12, "{} {} {}", j, c, want);
        }
        let again = LegendreSeries { interval: (-1.0, 1.0), coeffs: s.coeffs.clone() };
        let f2 = GraphFunction::new("again", vec![(-1.0, 1.0)], (-100.0, 100.0), move |x| again.eval(x[0]));
        let s2 = l2_projection(&f2, k + extra).unwrap();
        for (u, v) in s.coeffs.iter().zip(&s2.coeffs) {
            prop_assert!((u - v).abs() < 1e-12);
        }
    }

    #[test]
    fn text_format_round_trips(samples in samples_strategy(20), d in 0usize..4) {
        let m = empirical(&samples, d);
        let back = from_text(&to_text(&m)).unwrap();
        prop_assert_eq!(back.entries, m.entries);
        prop_assert_eq!(back.spec, m.spec);
    }

    #[test]
    fn truncation_is_leading_block(samples in samples_strategy(20), d in 1usize..4) {
        let m = empirical(&samples, d);
        let t = m.truncate(d - 1).unwrap();
        let n = t.n();
        prop_assert_eq!(t.entries, m.entries.view((0, 0), (n, n)).into_owned());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(6))]

    #[test]
    fn max_distance_monotone_in_gamma(g1 in 0.5f64..3.0, f in 1.0f64..4.0, seed in 0u64..100) {
        let bench = Benchmark::Sign;
        let m = cdapprox::analytic_moment_matrix(&bench.analytic().unwrap(), &BasisSpec::monomial(2, 4).unwrap()).unwrap();
        let k = build_kernel(&m, 1e-3, Filter::Tikhonov).unwrap();
        let func = bench.function();
        let near = max_distance_in_sublevel(&k, &func, g1, 2000, seed).unwrap();
        let far = max_distance_in_sublevel(&k, &func, g1 * f, 2000, seed).unwrap();
        prop_assert!(near <= far);
    }
}

#[test]
fn legendre_values_are_classical() {
    let mut v = vec![0.0; 4];
    legendre_values(3, 0.5, &mut v);
    assert_eq!(v, vec![1.0, 0.5, -0.125, -0.4375]);
}
