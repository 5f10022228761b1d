//! End-to-end acceptance checks. Each criterion prints one PASS/FAIL line with its
//! measurements to stderr; the test fails if any criterion fails.

use num_bigint::BigInt;
use num_complex::Complex64;
use num_rational::BigRational;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use schwarz_cli::output::encode_ppm;
use schwarz_cli::{render, GridSpec, Palette, PixelClass, RenderJob, RenderKind};
use schwarz_core::cardioid::{riemann_map, schwarz_sigma};
use schwarz_core::cnc::{
    apply_f, build_cnc, classify_orbit, depth, in_connectedness_locus, CycleKind, Connectedness, OrbitVerdict,
};
use schwarz_core::deltoid::{deltoid_map, schwarz_deltoid, tile_count};
use schwarz_core::rays::{trace_ray, DEFAULT_RAY_DEPTH};
use schwarz_core::symbolic::{
    admissible_words, anti_double, circular_distance, conjugacy_e, question_mark, RationalAngle, TriangleGroup,
};
use schwarz_core::{chordal_distance, ComplexPoint};
use std::f64::consts::PI;
use std::io::Write;
use std::time::{Duration, Instant};

const SIGMA_TOL: f64 = 1e-10;
const ORBIT_STEP_TOL: f64 = 1e-9;
const ORBIT_BUDGET: Duration = Duration::from_millis(1);
const REAL_SLICE_SAMPLES: usize = 2000;
const REAL_SLICE_MAX_ITER: usize = 5000;
const REAL_SLICE_RESOLUTION: f64 = 5e-3;
const REAL_SLICE_BUDGET: Duration = Duration::from_secs(10);
const CIRCUM_TOL: f64 = 1e-8;
const CIRCUM_ORACLE_SAMPLES: usize = 1_000_000;
const CIRCUM_BUDGET: Duration = Duration::from_secs(5);
const DELTOID_TOL: f64 = 1e-10;
const DELTOID_FD_TOL: f64 = 1e-5;
const DELTOID_FD_STEP: f64 = 1e-6;
const DELTOID_BUDGET: Duration = Duration::from_secs(1);
const CONJ_DEPTH: usize = 24;
const CONJ_SAMPLES: usize = 1000;
const CONJ_BUDGET: Duration = Duration::from_secs(5);
const RAY_TOL: f64 = 1e-6;
const RAY_BUDGET: Duration = Duration::from_secs(1);
const CHEBYSHEV_MAX_ITER: usize = 500;
const CHEBYSHEV_BUDGET: Duration = Duration::from_secs(30);
const CANTOR_PX: u32 = 400;
const CANTOR_MAX_ITER: usize = 2000;
const CANTOR_FRACTION: f64 = 0.02;
const CANTOR_BUDGET: Duration = Duration::from_secs(20);
const SEED: u64 = 0x5eed;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

fn ratio(p: i64, q: i64) -> BigRational {
    BigRational::new(BigInt::from(p), BigInt::from(q))
}

type Check = Box<dyn Fn() -> Outcome>;

struct Outcome {
    pass: bool,
    detail: String,
}

fn outcome(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn timed(budget: Duration, f: impl FnOnce() -> Outcome) -> Outcome {
    let start = Instant::now();
    let mut o = f();
    let elapsed = start.elapsed();
    o.pass &= elapsed <= budget;
    o.detail = format!("{} [{:.3?} of {:?}]", o.detail, elapsed, budget);
    o
}

fn exact_orbit_values() -> Outcome {
    let s0 = schwarz_sigma(c(0.0, 0.0)).unwrap();
    let s1 = schwarz_sigma(c(3.0 / 16.0, 0.0)).unwrap().finite().unwrap();
    let s2 = schwarz_sigma(c(5.0 / 36.0, 0.0)).unwrap().finite().unwrap();
    let (e1, e2) = (s1.norm(), (s2 - c(-0.75, 0.0)).norm());
    outcome(
        s0.is_infinite() && e1 <= SIGMA_TOL && e2 <= SIGMA_TOL,
        format!("sigma(0)={s0} |sigma(3/16)|={e1:.1e} |sigma(5/36)+3/4|={e2:.1e}"),
    )
}

fn named_critical_orbits() -> Outcome {
    let inf = ComplexPoint::Infinity;
    let fin = |re: f64| ComplexPoint::Finite(c(re, 0.0));
    // (a, expected orbit of 0, cycle period, cycle kind)
    let cases = [
        (0.0, vec![fin(0.0), inf, fin(0.0)], 2, CycleKind::Superattracting),
        (3.0 / 16.0, vec![fin(0.0), inf, fin(3.0 / 16.0), fin(0.0)], 3, CycleKind::Superattracting),
        (5.0 / 36.0, vec![fin(0.0), inf, fin(5.0 / 36.0), fin(-0.75), fin(-0.75)], 1, CycleKind::SingularFixed),
        (0.25, vec![fin(0.0), inf, fin(0.25), fin(0.25)], 1, CycleKind::SingularFixed),
    ];
    let mut pass = true;
    let mut notes = Vec::new();
    for (a, expected, period, kind) in cases {
        let start = Instant::now();
        let map = build_cnc(c(a, 0.0)).unwrap();
        let mut z = expected[0];
        let mut worst = 0.0f64;
        for want in &expected[1..] {
            z = apply_f(&map, z).unwrap();
            worst = worst.max(chordal_distance(z, *want));
        }
        let verdict = classify_orbit(&map, expected[0], 200);
        let elapsed = start.elapsed();
        let cycle_ok = matches!(verdict, OrbitVerdict::NonEscaping { cycle: Some(info) } if info.period == period && info.kind == kind);
        let ok = worst <= ORBIT_STEP_TOL && cycle_ok && elapsed <= ORBIT_BUDGET;
        pass &= ok;
        notes.push(format!("a={a}: step error {worst:.1e}, cycle {}, {elapsed:.1?}", if cycle_ok { "ok" } else { "wrong" }));
    }
    outcome(pass, notes.join("; "))
}

fn real_slice() -> Outcome {
    let (lo, hi) = (-0.12, 0.30);
    let (left, right) = (-1.0 / 12.0, 0.25);
    let (mut inn, mut out, mut undetermined, mut bad) = (0usize, 0usize, 0usize, Vec::new());
    let mut inside = 0usize;
    for j in 0..REAL_SLICE_SAMPLES {
        let a = lo + (hi - lo) * j as f64 / (REAL_SLICE_SAMPLES - 1) as f64;
        let verdict = match build_cnc(c(a, 0.0)) {
            Ok(map) => in_connectedness_locus(&map, REAL_SLICE_MAX_ITER),
            // parameters on the slit have disconnected limit sets by convention
            Err(_) => Connectedness::Out { depth: 0 },
        };
        let well_inside = a > left + REAL_SLICE_RESOLUTION && a < right - REAL_SLICE_RESOLUTION;
        let well_outside = a < left - REAL_SLICE_RESOLUTION || a > right + REAL_SLICE_RESOLUTION;
        inside += usize::from(well_inside);
        match verdict {
            Connectedness::In => {
                inn += 1;
                if well_outside {
                    bad.push(a);
                }
            }
            Connectedness::Out { .. } => {
                out += 1;
                if well_inside {
                    bad.push(a);
                }
            }
            Connectedness::Undetermined => undetermined += 1,
        }
    }
    outcome(
        bad.is_empty() && inn > 0,
        format!(
            "IN {inn}, OUT {out}, UNDETERMINED {undetermined}; IN covers {:.1}% of the interior samples; inconsistent {:?}",
            100.0 * inn as f64 / inside.max(1) as f64,
            &bad[..bad.len().min(5)]
        ),
    )
}

/// Brute-force maximum of `|φ(e^{it}) − a|` over equally spaced `t`, polished by
/// bisection on the sign of the derivative between the neighbouring samples.
/// (Comparing function values cannot locate a flat maximum better than about `√ε`.)
fn circumcircle_oracle(a: Complex64) -> (f64, Complex64) {
    let n = CIRCUM_ORACLE_SAMPLES;
    let step = 2.0 * PI / n as f64;
    let f = |t: f64| (riemann_map(Complex64::from_polar(1.0, t)) - a).norm();
    let slope = |t: f64| {
        let e = Complex64::from_polar(1.0, t);
        let tangent = c(0.0, 0.5) * (e - e * e);
        ((riemann_map(e) - a).conj() * tangent).re
    };
    let mut best = (0usize, f64::NEG_INFINITY);
    for j in 0..n {
        let v = f(j as f64 * step);
        if v > best.1 {
            best = (j, v);
        }
    }
    let (mut x0, mut x1) = ((best.0 as f64 - 1.0) * step, (best.0 as f64 + 1.0) * step);
    for _ in 0..100 {
        let mid = 0.5 * (x0 + x1);
        if slope(mid) > 0.0 {
            x0 = mid;
        } else {
            x1 = mid;
        }
    }
    let t = 0.5 * (x0 + x1);
    (f(t), riemann_map(Complex64::from_polar(1.0, t)))
}

fn circumcircle() -> Outcome {
    let mut worst_real = 0.0f64;
    for j in 1..=100 {
        let a = -1.0 / 12.0 + (0.5 + 1.0 / 12.0) * j as f64 / 100.0;
        let m = build_cnc(c(a, 0.0)).unwrap();
        worst_real = worst_real.max((m.r_a - (a + 0.75)).abs()).max((m.alpha_a - c(-0.75, 0.0)).norm());
    }
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut worst_r, mut worst_alpha) = (0.0f64, 0.0f64);
    for _ in 0..20 {
        let a = c(rng.random_range(-0.5..1.0), rng.random_range(0.05..0.8) * if rng.random_bool(0.5) { 1.0 } else { -1.0 });
        let m = build_cnc(a).unwrap();
        let (r, alpha) = circumcircle_oracle(a);
        worst_r = worst_r.max((m.r_a - r).abs());
        worst_alpha = worst_alpha.max((m.alpha_a - alpha).norm());
    }
    outcome(
        worst_real <= CIRCUM_TOL && worst_r <= CIRCUM_TOL && worst_alpha <= CIRCUM_TOL,
        format!("real slice error {worst_real:.1e}; against the sampling oracle: radius {worst_r:.1e}, tangency point {worst_alpha:.1e}"),
    )
}

fn deltoid_identities() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 5);
    let sig = |z: Complex64| schwarz_deltoid(z).unwrap().finite().unwrap();
    let mut worst_value = 0.0f64;
    for _ in 0..100 {
        let x: f64 = rng.random_range(1.0..5.0);
        let got = sig(c(x + 1.0 / (2.0 * x * x), 0.0));
        worst_value = worst_value.max((got - c(1.0 / x + x * x / 2.0, 0.0)).norm());
    }
    let mut worst_fd = 0.0f64;
    let h = DELTOID_FD_STEP;
    for _ in 0..100 {
        let w = Complex64::from_polar(rng.random_range(1.0..3.0), rng.random_range(0.0..2.0 * PI));
        let z = deltoid_map(w).unwrap();
        let dx = (sig(z + c(h, 0.0)) - sig(z - c(h, 0.0))) / (2.0 * h);
        let dy = (sig(z + c(0.0, h)) - sig(z - c(0.0, h))) / (2.0 * h);
        let dbar = ((dx + c(0.0, 1.0) * dy) / 2.0).norm();
        worst_fd = worst_fd.max((dbar - w.norm()).abs() / w.norm());
    }
    outcome(
        worst_value <= DELTOID_TOL && worst_fd <= DELTOID_FD_TOL,
        format!("reflection identity error {worst_value:.1e}, multiplier relative error {worst_fd:.1e}"),
    )
}

fn tile_combinatorics() -> Outcome {
    let mismatches: Vec<usize> =
        (1..=12).filter(|&n| admissible_words(n).len() as u64 != tile_count(n as u32)).collect();
    outcome(mismatches.is_empty(), format!("ranks 1..12, mismatched ranks {mismatches:?}"))
}

fn question_mark_values() -> Outcome {
    let exact = question_mark(1, 2).unwrap() == ratio(1, 2)
        && question_mark(1, 3).unwrap() == ratio(1, 4)
        && question_mark(2, 3).unwrap() == ratio(3, 4);
    let mut fracs: Vec<(u64, u64)> =
        (1..=64u64).flat_map(|q| (0..=q).map(move |p| (p, q))).filter(|&(p, q)| num_integer::gcd(p, q) == 1).collect();
    fracs.sort_by(|x, y| (x.0 * y.1).cmp(&(y.0 * x.1)));
    let values: Vec<BigRational> = fracs.iter().map(|&(p, q)| question_mark(p, q).unwrap()).collect();
    let monotone = values.windows(2).all(|w| w[0] < w[1]);
    outcome(exact && monotone, format!("exact values {exact}, strictly increasing on {} Farey fractions {monotone}", fracs.len()))
}

fn conjugacy() -> Outcome {
    let g = TriangleGroup::standard();
    let mut rng = ChaCha8Rng::seed_from_u64(SEED + 8);
    let mut violations = 0;
    let mut worst_ratio = 0.0f64;
    for _ in 0..CONJ_SAMPLES {
        let zeta = Complex64::from_polar(1.0, rng.random_range(0.0..2.0 * PI));
        let e = conjugacy_e(zeta, CONJ_DEPTH);
        let k = g.region(zeta).expect("unit circle points lie in a region");
        let image = g.reflect(k, zeta);
        let e2 = conjugacy_e(image / image.norm(), CONJ_DEPTH);
        let residual = circular_distance(anti_double(e.angle), e2.angle);
        if residual > e.error {
            violations += 1;
        }
        if e.error > 0.0 {
            worst_ratio = worst_ratio.max(residual / e.error);
        }
    }
    let cusps_fixed = (0..3u8).all(|k| {
        let e = conjugacy_e(TriangleGroup::cusp(k), CONJ_DEPTH);
        e.exact == Some(ratio(k as i64, 3)) && e.error == 0.0
    });
    outcome(
        violations == 0 && cusps_fixed,
        format!("{violations} residuals above the interval width, worst residual/width {worst_ratio:.2}, cusps fixed {cusps_fixed}"),
    )
}

fn ray_landing() -> Outcome {
    let map = build_cnc(c(0.0, 0.0)).unwrap();
    let mut pass = true;
    let mut notes = Vec::new();
    for (p, q, target) in [(0, 1, c(0.25, 0.0)), (1, 3, c(-0.75, 0.0)), (2, 3, c(-0.75, 0.0))] {
        let ray = trace_ray(&map, RationalAngle::new(p, q).unwrap(), DEFAULT_RAY_DEPTH).unwrap();
        let err = ray.landing.map_or(f64::INFINITY, |l| (l - target).norm());
        pass &= err <= RAY_TOL;
        notes.push(format!("{p}/{q}: {err:.1e}"));
    }
    outcome(pass, format!("landing errors {}", notes.join(", ")))
}

fn chebyshev_job() -> RenderJob {
    RenderJob {
        kind: RenderKind::CncDynamical(c(0.25, 0.0)),
        grid: GridSpec::new(c(-1.0, -1.0), 4.0, 800, 800).unwrap(),
        max_iter: CHEBYSHEV_MAX_ITER,
        palette: Palette::Classic,
    }
}

fn chebyshev_geometry() -> Outcome {
    let job = chebyshev_job();
    let r = render(&job).unwrap();
    let g = job.grid;
    let h = g.pixel_width();
    let mut stray = 0;
    for row in 0..g.pixels_y {
        for col in 0..g.pixels_x {
            if r.class_at(col, row) == PixelClass::NonEscaping {
                let z = g.pixel_center(col, row);
                let dist = if z.re <= 0.25 { z.im.abs() } else { (z - c(0.25, 0.0)).norm() };
                stray += usize::from(dist > h);
            }
        }
    }
    let s = r.stats;
    outcome(
        stray == 0,
        format!(
            "NON_ESCAPING {}, of which {stray} off the ray; ESCAPED {}, UNDETERMINED {}",
            s.non_escaping, s.escaped, s.undetermined
        ),
    )
}

fn cantor_regime() -> Outcome {
    let map = build_cnc(c(1.0, 0.0)).unwrap();
    let d = depth(&map);
    let job = RenderJob {
        kind: RenderKind::CncDynamical(c(1.0, 0.0)),
        grid: GridSpec::new(c(1.0, 0.0), 6.0, CANTOR_PX, CANTOR_PX).unwrap(),
        max_iter: CANTOR_MAX_ITER,
        palette: Palette::Classic,
    };
    let s = render(&job).unwrap().stats;
    let fraction = s.non_escaping as f64 / s.total() as f64;
    outcome(
        d == Some(1) && fraction < CANTOR_FRACTION,
        format!("depth {d:?}, NON_ESCAPING fraction {fraction:.4}, UNDETERMINED {}", s.undetermined),
    )
}

fn determinism() -> Outcome {
    let first = encode_ppm(&render(&chebyshev_job()).unwrap());
    let second = encode_ppm(&render(&chebyshev_job()).unwrap());
    outcome(first == second, format!("{} bytes, identical {}", first.len(), first == second))
}

#[test]
fn acceptance_criteria() {
    let criteria: Vec<(&str, Check)> = vec![
        ("exact orbit values", Box::new(exact_orbit_values)),
        ("named critical orbits", Box::new(named_critical_orbits)),
        ("real slice of the connectedness locus", Box::new(|| timed(REAL_SLICE_BUDGET, real_slice))),
        ("circumcircle", Box::new(|| timed(CIRCUM_BUDGET, circumcircle))),
        ("deltoid identities", Box::new(|| timed(DELTOID_BUDGET, deltoid_identities))),
        ("tile combinatorics", Box::new(tile_combinatorics)),
        ("question-mark function", Box::new(question_mark_values)),
        ("conjugacy E", Box::new(|| timed(CONJ_BUDGET, conjugacy))),
        ("ray landing at a = 0", Box::new(|| timed(RAY_BUDGET, ray_landing))),
        ("Chebyshev geometry at a = 1/4", Box::new(|| timed(CHEBYSHEV_BUDGET, chebyshev_geometry))),
        ("Cantor regime at a = 1", Box::new(|| timed(CANTOR_BUDGET, cantor_regime))),
        ("determinism", Box::new(determinism)),
    ];
    let mut failed = Vec::new();
    for (k, (name, check)) in criteria.iter().enumerate() {
        let o = check();
        // written to the raw stream so the lines show up without --nocapture
        let line = format!("criterion {:>2} {}: {name}: {}\n", k + 1, if o.pass { "PASS" } else { "FAIL" }, o.detail);
        std::io::stderr().write_all(line.as_bytes()).unwrap();
        if !o.pass {
            failed.push(k + 1);
        }
    }
    assert!(failed.is_empty(), "failed criteria: {failed:?}");
}
