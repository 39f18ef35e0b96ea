//! Closed-form values checked against high-precision reference evaluations.

use approx::assert_relative_eq;
use cdapprox::cdkernel::beta_schedule;
use cdapprox::metrics::{bv_rate_bound, lipschitz_rate_bound};
use cdapprox::support::{distance_bound, outside_mass_bound};
use cdapprox::{gamma_threshold, ThresholdParams};

fn tp(r: f64) -> ThresholdParams {
    ThresholdParams {
        p: 2,
        r,
        alpha: 0.0,
        delta0: 8f64.sqrt(),
        mass_m: 2.0,
        mass_m0: 4.0,
    }
}

// From 40-digit arithmetic, rounded to double.
const GAMMA_R3_D10: f64 = 0.015_815_051_023_723_513;
const GAMMA_R25_D4: f64 = 0.004_169_412_206_338_503;
const MASS_R25_D8: f64 = 8_264.305_532_834_346;
const DIST_D8: f64 = 1.546_918_160_678_027_2;
const LIP_R25_D64: f64 = 3_774.622_550_325_813;
const BV_R25: [(usize, f64); 4] = [
    (2, 148_311.113_249_018_26),
    (4, 38_615.564_437_487_395),
    (6, 22_604.914_719_983_964),
    (8, 16_577.613_479_378_568),
];
const BV_R3_D16: f64 = 18_782.382_688_691_96;

#[test]
fn gamma_values() {
    assert_relative_eq!(gamma_threshold(10, &tp(3.0)).unwrap(), GAMMA_R3_D10, max_relative = 1e-13);
    assert_relative_eq!(gamma_threshold(4, &tp(2.5)).unwrap(), GAMMA_R25_D4, max_relative = 1e-13);
}

#[test]
fn gamma_scaling() {
    let base = gamma_threshold(10, &tp(3.0)).unwrap();
    let doubled = ThresholdParams {
        mass_m: 4.0,
        mass_m0: 8.0,
        ..tp(3.0)
    };
    assert_relative_eq!(gamma_threshold(10, &doubled).unwrap(), base / 2.0, max_relative = 1e-14);
    let half = ThresholdParams { alpha: 0.5, ..tp(3.0) };
    assert_relative_eq!(gamma_threshold(10, &half).unwrap(), base / 2.0, max_relative = 1e-14);
    assert!(gamma_threshold(1, &tp(3.0)).is_err());
    assert!(gamma_threshold(10, &tp(2.0)).is_err());
}

#[test]
fn gamma_huge_degree_stays_finite() {
    let g = gamma_threshold(1_000_000, &tp(3.0)).unwrap();
    assert!(g.is_finite() && g > 0.0);
}

#[test]
fn support_bounds() {
    assert_relative_eq!(outside_mass_bound(8, &tp(2.5)).unwrap(), MASS_R25_D8, max_relative = 1e-13);
    assert_relative_eq!(distance_bound(8, &tp(2.5)).unwrap(), DIST_D8, max_relative = 1e-15);
    assert!(outside_mass_bound(1, &tp(2.5)).is_err());
    assert!(distance_bound(1, &tp(2.5)).is_err());
}

#[test]
fn rate_bounds() {
    assert_relative_eq!(
        lipschitz_rate_bound(64, 1.0, &tp(2.5), 2.0, 2.0).unwrap(),
        LIP_R25_D64,
        max_relative = 1e-13
    );
    for (d, v) in BV_R25 {
        assert_relative_eq!(bv_rate_bound(d, 2.0, &tp(2.5), 2.0, 2.0).unwrap(), v, max_relative = 1e-13);
    }
    assert_relative_eq!(bv_rate_bound(16, 2.0, &tp(3.0), 2.0, 2.0).unwrap(), BV_R3_D16, max_relative = 1e-13);
}

#[test]
fn beta_schedule_values() {
    assert_eq!(beta_schedule(1), 4.0);
    assert_eq!(beta_schedule(4), 2.0);
    assert_eq!(beta_schedule(9), 1.0);
    assert_eq!(beta_schedule(16), 0.5);
    assert_relative_eq!(beta_schedule(2), 2f64.powf(3.0 - 2f64.sqrt()), max_relative = 1e-15);
}
