//! Independent re-computations of derived quantities, with the values they produced frozen.

// frozen values keep every digit the oracle printed
#![allow(clippy::excessive_precision)]

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use schwarz_core::cardioid::{riemann_map, schwarz_sigma, sigma_dbar_magnitude};
use schwarz_core::cnc::{build_cnc, depth};
use schwarz_core::symbolic::{conjugacy_e, question_mark, TriangleGroup};
use std::f64::consts::PI;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

/// `?(p/q)` by descending the Stern–Brocot tree, averaging the values of the
/// bracketing fractions at every mediant.
fn question_mark_by_mediants(p: i64, q: i64) -> BigRational {
    let target = ratio(p, q);
    let (mut lo, mut hi) = ((0i64, 1i64), (1i64, 1i64));
    let (mut vlo, mut vhi) = (ratio(0, 1), ratio(1, 1));
    if target == ratio(0, 1) {
        return vlo;
    }
    if target == ratio(1, 1) {
        return vhi;
    }
    loop {
        let mid = (lo.0 + hi.0, lo.1 + hi.1);
        let vmid = (&vlo + &vhi) / ratio(2, 1);
        let m = ratio(mid.0, mid.1);
        if m == target {
            return vmid;
        }
        if target < m {
            hi = mid;
            vhi = vmid;
        } else {
            lo = mid;
            vlo = vmid;
        }
    }
}

#[test]
fn question_mark_agrees_with_mediant_recursion() {
    for q in 1..=40i64 {
        for p in 0..=q {
            assert_eq!(question_mark(p as u64, q as u64).unwrap(), question_mark_by_mediants(p, q), "{p}/{q}");
        }
    }
}

#[test]
fn question_mark_known_values() {
    assert_eq!(question_mark(1, 3).unwrap(), ratio(1, 4));
    assert_eq!(question_mark(1, 2).unwrap(), ratio(1, 2));
    assert_eq!(question_mark(2, 5).unwrap(), ratio(3, 8));
    assert_eq!(question_mark(2, 3).unwrap(), ratio(3, 4));
    assert!(question_mark(3, 2).is_err());
}

/// Circumradius and tangency point by dense sampling of `∂♡` and golden-section refinement.
fn circumcircle_by_sampling(a: Complex64) -> (f64, Complex64) {
    let n = 1_000_000;
    let f = |t: f64| (riemann_map(Complex64::from_polar(1.0, t)) - a).norm();
    let step = 2.0 * PI / n as f64;
    let best = (0..n).max_by(|&i, &j| f(i as f64 * step).total_cmp(&f(j as f64 * step))).unwrap();
    let (mut lo, mut hi) = ((best as f64 - 1.0) * step, (best as f64 + 1.0) * step);
    let g = (5f64.sqrt() - 1.0) / 2.0;
    for _ in 0..200 {
        let x1 = hi - g * (hi - lo);
        let x2 = lo + g * (hi - lo);
        if f(x1) < f(x2) {
            lo = x1;
        } else {
            hi = x2;
        }
    }
    let t = 0.5 * (lo + hi);
    (f(t), riemann_map(Complex64::from_polar(1.0, t)))
}

#[test]
fn circumcircle_matches_sampling() {
    for a in [c(0.0, 0.25), c(0.1, 0.3), c(-0.05, -0.2), c(0.7, -0.4), c(-0.3, 0.05), c(2.0, 1.0)] {
        let m = build_cnc(a).unwrap();
        let (r, alpha) = circumcircle_by_sampling(a);
        assert!((m.r_a - r).abs() < 1e-12, "{a}: {} vs {r}", m.r_a);
        assert!((m.alpha_a - alpha).norm() < 1e-6, "{a}: {} vs {alpha}", m.alpha_a);
    }
}

#[test]
fn circumcircle_frozen_values() {
    let cases = [
        (c(0.0, 0.25), 0.923_879_532_511_286_76, c(-0.353_553_390_593_273_76, -0.603_553_390_593_273_76)),
        (c(0.1, 0.3), 1.015_208_537_337_813_8, c(-0.457_048_750_442_385_01, -0.548_731_443_929_209_39)),
        (c(-0.05, -0.2), 0.860_036_394_010_840_13, c(-0.290_779_528_262_551_8, 0.625_643_880_733_595_74)),
    ];
    for (a, r, alpha) in cases {
        let m = build_cnc(a).unwrap();
        assert!((m.r_a - r).abs() < 1e-12, "{a}");
        assert!((m.alpha_a - alpha).norm() < 1e-9, "{a}");
    }
    let m = build_cnc(c(0.0, 0.25)).unwrap();
    assert!((m.tangency_angle - 5.0 * PI / 4.0).abs() < 1e-9);
}

/// Depth of `a` by iterating the explicit formulas from `∞` without the library's classifier.
fn depth_by_iteration(a: Complex64, r: f64, alpha: Complex64, budget: usize) -> Option<usize> {
    let inner = |z: Complex64| {
        let d = (1.0 - 4.0 * z).sqrt();
        let (l1, l2) = (1.0 - d, 1.0 + d);
        if l1.norm() <= l2.norm() {
            l1
        } else {
            l2
        }
    };
    let mut z: Option<Complex64> = None;
    for n in 1..=budget {
        z = match z {
            None => Some(a),
            Some(w) => {
                let lam = inner(w);
                if lam.norm() < 1.0 - 1e-9 {
                    if lam.norm() == 0.0 {
                        None
                    } else {
                        let mu = 1.0 / lam.conj();
                        Some(mu / 2.0 - mu * mu / 4.0)
                    }
                } else {
                    Some(a + r * r / (w - a).conj())
                }
            }
        };
        if let Some(w) = z {
            let in_tile = inner(w).norm() >= 1.0 - 1e-9
                && (w - a).norm() <= r
                && (w - 0.25).norm() > 1e-10
                && (w - alpha).norm() > 1e-10;
            if in_tile {
                return Some(n);
            }
        }
    }
    None
}

#[test]
fn depth_matches_direct_iteration() {
    for re in (-8..=12).map(|j| j as f64 * 0.1) {
        for im in (1..=10).map(|j| j as f64 * 0.1) {
            let a = c(re, im);
            let m = build_cnc(a).unwrap();
            assert_eq!(depth(&m), depth_by_iteration(a, m.r_a, m.alpha_a, 10_000), "{a}");
        }
    }
}

#[test]
fn depth_frozen_values() {
    for (a, n) in [(c(0.24, 0.1), 2), (c(1.0, 0.0), 1), (c(0.3, 0.0), 1), (c(0.5, 0.5), 1), (c(-0.2, 0.3), 3)] {
        assert_eq!(depth(&build_cnc(a).unwrap()), Some(n), "{a}");
    }
}

#[test]
fn sigma_dbar_matches_finite_differences() {
    let h = 1e-6;
    for (s, t) in [(0.3, 0.4), (0.6, 2.0), (0.8, -1.3), (0.95, 3.0), (0.5, 0.0)] {
        let w = riemann_map(Complex64::from_polar(s, t));
        let sig = |p: Complex64| schwarz_sigma(p).unwrap().finite().unwrap();
        let dx = (sig(w + c(h, 0.0)) - sig(w - c(h, 0.0))) / (2.0 * h);
        let dy = (sig(w + c(0.0, h)) - sig(w - c(0.0, h))) / (2.0 * h);
        let fd = ((dx + c(0.0, 1.0) * dy) / 2.0).norm();
        let exact = sigma_dbar_magnitude(w).unwrap();
        assert!((fd - exact).abs() <= 1e-5 * exact.max(1.0), "{w}: {fd} vs {exact}");
    }
}

#[test]
fn conjugacy_e_fixes_cusps() {
    for k in 0..3u8 {
        let e = conjugacy_e(TriangleGroup::cusp(k), 10);
        assert_eq!(e.exact, Some(ratio(k as i64, 3)));
        assert_eq!(e.error, 0.0);
    }
}
