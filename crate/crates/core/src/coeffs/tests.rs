use super::*;
use proptest::prelude::*;

fn seq(s: &str) -> CoefficientSequence {
    s.parse().unwrap()
}

/// Plain summation oracle, no log space and no majorant.
fn direct_norm_sq(a: &CoefficientSequence, r: f64, terms: u64) -> f64 {
    (0..terms).map(|n| a.coeff(n).powi(2) * r.powi(2 * n as i32)).sum()
}

#[test]
fn descriptors_roundtrip() {
    for s in [
        "basis",
        "unit",
        "geom:rho=0.8",
        "fock:p=2,alpha=1",
        "fock:p=2,alpha=1,b=2",
        "focklog:p=2,alpha=1,c=2",
        "dyadic:alpha=0,p=1",
        "explicit:1,0,2.5",
        "unit;shift=3",
    ] {
        assert_eq!(seq(s).to_string(), s);
    }
    for bad in ["geom:rho=0", "fock:p=2", "unit;shift=-1", "explicit:", "explicit:1,-1", "poly"] {
        assert!(bad.parse::<CoefficientSequence>().is_err(), "{bad}");
    }
}

#[test]
fn coeff_examples() {
    let b = seq("basis");
    assert_eq!(b.coeff(0), 1.0);
    assert_eq!(b.coeff(3), 0.0);
    assert!((seq("fock:p=2,alpha=1").coeff(2) - 0.5f64.sqrt()).abs() < 1e-14);
    let d = seq("dyadic:alpha=0.5,p=1.5");
    let expected = 2f64.powf(4.0 * 1.5 / 1.5) * 2f64.powf(-2.0 / 1.5);
    assert!((d.coeff(4).powi(2) - expected).abs() < 1e-12 * expected);
    assert_eq!(d.coeff(3), 0.0);
    assert_eq!(d.coeff(0), 0.0);
    assert_eq!(d.coeff(1), 0.0);
    // log n → log 2 at n ∈ {0, 1}
    let fl = seq("focklog:p=2,alpha=1,c=2");
    let l2 = 2f64.ln();
    assert!((fl.coeff(0).powi(2) - 1.0 / (1.0 * l2 * l2)).abs() < 1e-14);
    assert!((fl.coeff(1).powi(2) - 1.0 / (1.0 * l2 * l2)).abs() < 1e-14);
    let shifted = seq("unit;shift=2");
    assert_eq!(shifted.coeff(1), 0.0);
    assert_eq!(shifted.coeff(2), 1.0);
}

#[test]
fn norm_examples() {
    assert_eq!(seq("basis").weighted_l2_norm(0.7).unwrap(), 1.0);
    assert!((seq("unit").weighted_l2_norm(0.5).unwrap() - 2.0 / 3f64.sqrt()).abs() < 1e-14);
    // aₙ² = αⁿ/n! is the b = 1 member of the fock family
    let f = seq("fock:p=2,alpha=1.5,b=1");
    for r in [0.3, 1.0, 2.5, 7.0] {
        let v = f.weighted_l2_norm(r).unwrap();
        assert!((v / (1.5 * r * r / 2.0).exp() - 1.0).abs() < 1e-13, "r={r}");
    }
    assert!(matches!(
        seq("unit").weighted_l2_norm(1.0),
        Err(Error::OutsideConvergence { .. })
    ));
}

#[test]
fn series_match_direct_summation() {
    for s in ["fock:p=2,alpha=1", "focklog:p=1,alpha=2,c=4", "dyadic:alpha=0,p=2", "explicit:1,2,0,3", "geom:rho=0.5;shift=2"] {
        let a = seq(s);
        for r in [0.0, 0.2, 0.6, 0.9] {
            let got = a.ln_norm_sq(r).unwrap().exp();
            let oracle = direct_norm_sq(&a, r, 400);
            assert!((got - oracle).abs() <= 1e-13 * oracle, "{s} r={r}: {got} vs {oracle}");
        }
    }
}

#[test]
fn negative_shift_drops_leading_zeros() {
    let d = seq("dyadic:alpha=0,p=1").with_leading_zeros_removed();
    assert_eq!(d.shift, -2);
    assert!(d.coeff(0) > 0.0);
    let u = seq("unit").with_shift(-3);
    // Σ_{n≥0} r^{2n} with the first three terms dropped, divided by r⁶
    let r: f64 = 0.7;
    let expected = 1.0 / (1.0 - r * r);
    assert!((u.ln_norm_sq(r).unwrap().exp() - expected).abs() < 1e-12);
}

#[test]
fn truncation_examples() {
    assert_eq!(seq("basis").truncation_degree(0.9, 1e-8).unwrap(), 0);
    let n = seq("unit").truncation_degree(0.5, 1e-6).unwrap();
    // 4^{-N}/3 ≤ 10^{-12}·4/3
    let closed = ((1.0f64 / (4.0 * 1e-12)).ln() / 4f64.ln()).ceil() as usize;
    assert_eq!(n, closed);
    assert_eq!(n, 19);
    assert!(4f64.powi(-(n as i32)) / 3.0 <= 1e-12 * 4.0 / 3.0);
    assert!(4f64.powi(-(n as i32 - 1)) / 3.0 > 1e-12 * 4.0 / 3.0);
    // fock(2,1) at s = 2: direct tail oracle
    let f = seq("fock:p=2,alpha=1");
    let n = f.truncation_degree(2.0, 1e-8).unwrap() as u64;
    let total = direct_norm_sq(&f, 2.0, 200);
    let tail: f64 = (n + 1..200).map(|k| f.coeff(k).powi(2) * 4f64.powi(k as i32)).sum();
    assert!(tail <= 1e-16 * total);
    assert!(4.0 / (n as f64 + 1.0) < 0.5);
}

#[test]
fn lp_radial_norm_examples() {
    let disk = RadialMeasure::disk();
    let v = seq("basis").lp_radial_norm(&disk, 2.0, 1.0).unwrap();
    assert!((v.value - 1.0).abs() < 1e-12);
    assert!(seq("unit").lp_radial_norm(&disk, 2.0, 1.0).unwrap().diverged);
    // unit, p = 1: ∫ 2r (1-r²)^{-1/2} dr = 2
    let v = seq("unit").lp_radial_norm(&disk, 1.0, 1.0).unwrap();
    assert!((v.value - 2.0).abs() < 1e-6, "{v:?}");
    // corrected fock family b = 1 + 2/p: ‖a^(r)‖² ~ e^{αr²} r^{-2·2/p}
    let fock_q = |q: f64| RadialMeasure::fock(q, 1.0).unwrap();
    let corrected = seq("fock:p=2,alpha=1,b=2");
    assert!(corrected.lp_radial_norm(&fock_q(2.0), 2.0, f64::INFINITY).unwrap().diverged);
    assert!(!corrected.lp_radial_norm(&fock_q(4.0), 4.0, f64::INFINITY).unwrap().diverged);
    assert!(seq("geom:rho=2").lp_radial_norm(&disk, 1.0, 0.9).unwrap().diverged);
}

#[test]
fn shift_preserves_divergence_verdict() {
    let disk = RadialMeasure::disk();
    for (s, p) in [("unit", 2.0), ("unit", 1.0), ("geom:rho=0.9", 2.0)] {
        let a = seq(s);
        let b = a.clone().with_shift(1);
        let va = a.lp_radial_norm(&disk, p, 1.0).unwrap();
        let vb = b.lp_radial_norm(&disk, p, 1.0).unwrap();
        assert_eq!(va.diverged, vb.diverged, "{s}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn norm_nondecreasing_in_r(r1 in 0.0f64..0.98, dr in 0.0f64..0.5, which in 0usize..4) {
        let a = [seq("unit"), seq("geom:rho=0.7"), seq("fock:p=1,alpha=2"), seq("dyadic:alpha=1,p=2")][which].clone();
        let r2 = (r1 + dr).min(0.99);
        prop_assert!(a.weighted_l2_norm(r2).unwrap() >= a.weighted_l2_norm(r1).unwrap() * (1.0 - 1e-14));
    }

    #[test]
    fn pure_shift_multiplies_by_r(r in 0.01f64..0.99, k in 1i64..6) {
        let a = seq("geom:rho=0.8");
        let b = a.clone().with_shift(k);
        let ratio = b.weighted_l2_norm(r).unwrap() / a.weighted_l2_norm(r).unwrap();
        prop_assert!((ratio / r.powi(k as i32) - 1.0).abs() < 1e-12);
    }

    #[test]
    fn lp_norm_nondecreasing_in_s(s1 in 0.05f64..0.95, ds in 0.0f64..0.2, p in 0.5f64..4.0) {
        let a = seq("unit");
        let disk = RadialMeasure::disk();
        let s2 = (s1 + ds).min(0.99);
        let v1 = a.lp_radial_norm(&disk, p, s1).unwrap().value;
        let v2 = a.lp_radial_norm(&disk, p, s2).unwrap().value;
        prop_assert!(v2 >= v1 * (1.0 - 1e-12));
    }
}
