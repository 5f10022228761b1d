//! The circle-and-cardioid family `F_a`.
//!
//! `F_a` is the cardioid reflection `σ` on `♡̄` and the reflection `σ_a` in the
//! circumcircle `∂B(a, r_a)` outside that disk. The droplet `T_a = B̄(a, r_a) \ ♡`
//! minus the singular points `α_a` and `1/4` is the fundamental tile `T_a⁰`; orbits
//! entering it have escaped.

use crate::cardioid::{self, invert_riemann_map, riemann_map, Location, DEFAULT_BOUNDARY_TOL};
use crate::plane::{chordal_distance, reflect_in_circle, Circle, ComplexPoint};
use crate::symbolic::ItineraryWord;
use crate::{Error, Result};
use num_complex::Complex64;
use std::f64::consts::PI;
use std::sync::OnceLock;

/// Left end of the admissible real parameters; `(−∞, −1/12)` is excluded.
pub const SLIT_END: f64 = -1.0 / 12.0;
pub const SLIT_TOL: f64 = 1e-9;
pub const CYCLE_TOL: f64 = 1e-9;
pub const SINGULAR_TOL: f64 = 1e-10;
pub const NEAR_SINGULAR_TOL: f64 = 1e-6;
pub const DEFAULT_DEPTH_BUDGET: usize = 10_000;

const CIRCUM_SAMPLES: usize = 2048;
const CIRCUM_UNIQUENESS_GAP: f64 = 1e-10;
const CIRCUM_MIN_CURVATURE: f64 = 1e-6;
/// Orbits creeping into `α_a` are captured when, within this distance, the distance
/// to `α_a` has decreased along both parities for `CAPTURE_WINDOW` steps.
const CAPTURE_RADIUS: f64 = 0.25;
const CAPTURE_WINDOW: usize = 256;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CncMap {
    pub a: Complex64,
    pub r_a: f64,
    pub alpha_a: Complex64,
    /// `θ ∈ [0, 2π)` with `φ(e^{iθ}) = α_a`.
    pub tangency_angle: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CycleKind {
    Superattracting,
    Attracting,
    Indifferent,
    Repelling,
    SingularFixed,
}

impl CycleKind {
    pub fn from_multiplier(m: f64) -> Self {
        if m < 1e-8 {
            CycleKind::Superattracting
        } else if m < 1.0 - 1e-6 {
            CycleKind::Attracting
        } else if m <= 1.0 + 1e-6 {
            CycleKind::Indifferent
        } else {
            CycleKind::Repelling
        }
    }

    pub fn name(&self) -> &'static str {
        match self {
            CycleKind::Superattracting => "SUPERATTRACTING",
            CycleKind::Attracting => "ATTRACTING",
            CycleKind::Indifferent => "INDIFFERENT",
            CycleKind::Repelling => "REPELLING",
            CycleKind::SingularFixed => "SINGULAR_FIXED",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CycleInfo {
    pub period: usize,
    pub representative: Complex64,
    pub multiplier_magnitude: f64,
    pub kind: CycleKind,
}

#[derive(Debug, Clone, PartialEq)]
pub enum OrbitVerdict {
    /// `F^rank(z) ∈ T_a⁰`; `word` holds one symbol per applied branch.
    Escaped { rank: usize, word: ItineraryWord },
    NonEscaping { cycle: Option<CycleInfo> },
    Undetermined,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Connectedness {
    In,
    Out { depth: usize },
    Undetermined,
}

fn boundary_samples() -> &'static [Complex64] {
    static SAMPLES: OnceLock<Vec<Complex64>> = OnceLock::new();
    SAMPLES.get_or_init(|| {
        (0..CIRCUM_SAMPLES)
            .map(|j| riemann_map(Complex64::from_polar(1.0, 2.0 * PI * j as f64 / CIRCUM_SAMPLES as f64)))
            .collect()
    })
}

/// `f(θ) = |φ(e^{iθ}) − a|²` and its first two derivatives.
fn circum_objective(a: Complex64, theta: f64) -> (f64, f64, f64) {
    let e = Complex64::from_polar(1.0, theta);
    let e2 = e * e;
    let z = e / 2.0 - e2 / 4.0;
    let dz = Complex64::new(0.0, 0.5) * (e - e2);
    let ddz = -0.5 * (e - 2.0 * e2);
    let d = z - a;
    let f = d.norm_sqr();
    let f1 = 2.0 * (d.conj() * dz).re;
    let f2 = 2.0 * (dz.norm_sqr() + (d.conj() * ddz).re);
    (f, f1, f2)
}

/// Safeguarded Newton iteration on `f′` inside a bracket around a sampled maximum.
/// Bisection on the sign of `f′` takes over wherever the curvature is too small.
fn refine_maximum(a: Complex64, theta0: f64, half_width: f64) -> (f64, f64) {
    let mut h = half_width;
    let (mut lo, mut hi) = (theta0 - h, theta0 + h);
    for _ in 0..8 {
        if circum_objective(a, lo).1 > 0.0 && circum_objective(a, hi).1 < 0.0 {
            break;
        }
        h *= 2.0;
        lo = theta0 - h;
        hi = theta0 + h;
    }
    if !(circum_objective(a, lo).1 > 0.0 && circum_objective(a, hi).1 < 0.0) {
        return (theta0, circum_objective(a, theta0).0);
    }
    let mut x = theta0;
    for _ in 0..200 {
        let (_, g, c) = circum_objective(a, x);
        if g == 0.0 {
            break;
        }
        if g > 0.0 {
            lo = x;
        } else {
            hi = x;
        }
        let newton = x - g / c;
        let next = if c < -CIRCUM_MIN_CURVATURE && newton > lo && newton < hi { newton } else { 0.5 * (lo + hi) };
        if (next - x).abs() <= 1e-16 * (1.0 + x.abs()) || hi - lo <= 1e-15 {
            x = next;
            break;
        }
        x = next;
    }
    (x, circum_objective(a, x).0)
}

/// Builds `F_a`: the circumcircle of `♡` centered at `a` and its tangency point.
pub fn build_cnc(a: Complex64) -> Result<CncMap> {
    if !(a.re.is_finite() && a.im.is_finite()) {
        return Err(Error::Domain("parameter must be finite".into()));
    }
    if a.im.abs() <= SLIT_TOL && a.re < SLIT_END {
        return Err(Error::Slit { re: a.re, im: a.im });
    }
    let samples = boundary_samples();
    let n = samples.len();
    let values: Vec<f64> = samples.iter().map(|z| (z - a).norm_sqr()).collect();
    let step = 2.0 * PI / n as f64;
    let mut maxima: Vec<(f64, f64)> = (0..n)
        .filter(|&j| values[j] >= values[(j + n - 1) % n] && values[j] > values[(j + 1) % n])
        .map(|j| refine_maximum(a, j as f64 * step, step))
        .collect();
    maxima.sort_by(|x, y| y.1.total_cmp(&x.1));
    let (theta, f) = *maxima.first().ok_or(Error::TangencyAmbiguous)?;
    let r = f.sqrt();
    let degenerate = (a - Complex64::new(SLIT_END, 0.0)).norm() <= SLIT_TOL;
    if !degenerate {
        let separated = |t: f64| {
            let d = (t - theta).rem_euclid(2.0 * PI);
            d.min(2.0 * PI - d) > 1e-3
        };
        if let Some(&(_, f2)) = maxima.iter().skip(1).find(|m| separated(m.0)) {
            if r - f2.sqrt() <= CIRCUM_UNIQUENESS_GAP {
                return Err(Error::TangencyAmbiguous);
            }
        }
    }
    let theta = theta.rem_euclid(2.0 * PI);
    Ok(CncMap { a, r_a: r, alpha_a: riemann_map(Complex64::from_polar(1.0, theta)), tangency_angle: theta })
}

/// Result of one step of `F_a` used by the classifier.
enum Step {
    Escaped,
    Singular(Complex64),
    Next(ComplexPoint, u8),
}

impl CncMap {
    pub fn circle(&self) -> Circle {
        Circle { center: self.a, radius: self.r_a }
    }

    /// The singular point (`1/4` or `α_a`) within `tol` of `z`, if any.
    pub fn singular_point_near(&self, z: Complex64, tol: f64) -> Option<Complex64> {
        let cusp = Complex64::new(cardioid::CUSP, 0.0);
        if (z - cusp).norm() <= tol {
            Some(cusp)
        } else if (z - self.alpha_a).norm() <= tol {
            Some(self.alpha_a)
        } else {
            None
        }
    }

    /// Whether `z` lies in the fundamental tile `T_a⁰`.
    pub fn in_fundamental_tile(&self, z: ComplexPoint) -> bool {
        match z {
            ComplexPoint::Infinity => false,
            ComplexPoint::Finite(w) => {
                self.singular_point_near(w, SINGULAR_TOL).is_none()
                    && invert_riemann_map(w, DEFAULT_BOUNDARY_TOL).location != Location::Interior
                    && (w - self.a).norm() <= self.r_a
            }
        }
    }

    fn step(&self, z: ComplexPoint, previous: Option<u8>) -> Step {
        let w = match z {
            ComplexPoint::Infinity => return Step::Next(ComplexPoint::Finite(self.a), 2),
            ComplexPoint::Finite(w) => w,
        };
        if let Some(s) = self.singular_point_near(w, SINGULAR_TOL) {
            return Step::Singular(s);
        }
        let inv = invert_riemann_map(w, DEFAULT_BOUNDARY_TOL);
        if inv.location == Location::Interior {
            let lam = inv.inner_root;
            // on the real axis the symbol alternates, starting with 1
            let symbol = if lam.im > 0.0 {
                1
            } else if lam.im < 0.0 || previous == Some(1) {
                3
            } else {
                1
            };
            return Step::Next(cardioid::sigma_from_inversion(w, &inv), symbol);
        }
        if (w - self.a).norm() <= self.r_a {
            return Step::Escaped;
        }
        Step::Next(reflect_in_circle(&self.circle(), z), 2)
    }

    /// Complex `∂F/∂w̄` at a finite point where `F` is defined and smooth.
    fn dbar(&self, w: Complex64) -> Result<Complex64> {
        let inv = invert_riemann_map(w, DEFAULT_BOUNDARY_TOL);
        if inv.location != Location::Exterior {
            if inv.inner_root.norm() == 0.0 {
                return Err(Error::Domain("pole of sigma".into()));
            }
            return Ok(cardioid::sigma_dbar(inv.inner_root));
        }
        let d = w - self.a;
        if d.norm() >= self.r_a {
            return Ok(-self.r_a * self.r_a / (d.conj() * d.conj()));
        }
        Err(Error::InDroplet)
    }
}

/// One application of `F_a`.
pub fn apply_f(map: &CncMap, w: ComplexPoint) -> Result<ComplexPoint> {
    let z = match w {
        ComplexPoint::Infinity => return Ok(ComplexPoint::Finite(map.a)),
        ComplexPoint::Finite(z) => z,
    };
    let inv = invert_riemann_map(z, DEFAULT_BOUNDARY_TOL);
    if inv.location != Location::Exterior {
        return Ok(cardioid::sigma_from_inversion(z, &inv));
    }
    if (z - map.a).norm() >= map.r_a {
        return Ok(reflect_in_circle(&map.circle(), w));
    }
    Err(Error::InDroplet)
}

/// `F_a^n(z)`, or `None` if the orbit enters the fundamental tile first.
pub fn iterate(map: &CncMap, z: ComplexPoint, n: usize) -> Option<ComplexPoint> {
    let mut z = z;
    for _ in 0..n {
        z = apply_f(map, z).ok()?;
    }
    Some(z)
}

/// Smallest `p ≤ max_period` with `F^p(z)` within `tol` of `z` in the chordal metric.
pub fn detect_cycle(map: &CncMap, z: ComplexPoint, max_period: usize, tol: f64) -> Option<usize> {
    let mut w = z;
    for p in 1..=max_period {
        w = apply_f(map, w).ok()?;
        if chordal_distance(w, z) < tol {
            return Some(p);
        }
    }
    None
}

/// Newton's method on the holomorphic `F^{2p}(z) − z`, started at `z0`.
///
/// Converges linearly to parabolic cycles, where the root is double.
pub fn refine_cycle(map: &CncMap, z0: Complex64, period: usize) -> Result<Complex64> {
    let eval = |z: Complex64| -> Result<(Complex64, Complex64)> {
        let mut w = ComplexPoint::Finite(z);
        let mut d = Complex64::new(1.0, 0.0);
        for _ in 0..2 * period {
            let x = w.finite().ok_or_else(|| Error::Domain("cycle passes through infinity".into()))?;
            d = map.dbar(x)? * d.conj();
            w = apply_f(map, w)?;
        }
        let image = w.finite().ok_or_else(|| Error::Domain("cycle passes through infinity".into()))?;
        Ok((image - z, d - 1.0))
    };
    let mut z = z0;
    let (mut best, mut best_res) = (z0, eval(z0)?.0.norm());
    let mut stalled = 0;
    for _ in 0..300 {
        let Ok((h, dh)) = eval(z) else { break };
        if h.norm() < best_res {
            best = z;
            best_res = h.norm();
            stalled = 0;
        } else {
            stalled += 1;
            if stalled > 10 {
                break;
            }
        }
        if best_res <= 1e-15 * (1.0 + z.norm()) || dh.norm() == 0.0 {
            break;
        }
        z -= h / dh;
    }
    Ok(best)
}

/// Product of `|∂F/∂w̄|` along the cycle through `representative`.
///
/// Cycles through the critical point `0` (equivalently through `∞`) have multiplier `0`.
pub fn multiplier_of_cycle(map: &CncMap, representative: Complex64, period: usize) -> Result<f64> {
    let mut w = ComplexPoint::Finite(representative);
    let mut product = 1.0;
    for _ in 0..period.max(1) {
        let z = match w {
            ComplexPoint::Infinity => return Ok(0.0),
            ComplexPoint::Finite(z) => z,
        };
        if map.singular_point_near(z, NEAR_SINGULAR_TOL).is_some() {
            return Err(Error::NearSingular);
        }
        if z.norm() == 0.0 {
            return Ok(0.0);
        }
        product *= map.dbar(z)?.norm();
        w = apply_f(map, w)?;
    }
    if chordal_distance(w, ComplexPoint::Finite(representative)) > NEAR_SINGULAR_TOL {
        return Err(Error::Domain(format!("{representative} does not return after {period} steps")));
    }
    Ok(product)
}

fn divisors(n: usize) -> impl Iterator<Item = usize> {
    (1..=n).filter(move |d| n.is_multiple_of(*d))
}

fn cycle_info(map: &CncMap, z: ComplexPoint, lag: usize) -> CycleInfo {
    let mut points = vec![z];
    for _ in 0..lag {
        match apply_f(map, *points.last().expect("nonempty")) {
            Ok(w) => points.push(w),
            Err(_) => break,
        }
    }
    let period = divisors(lag)
        .find(|&d| d < points.len() && chordal_distance(points[d], z) < CYCLE_TOL)
        .unwrap_or(lag);
    let cycle = &points[..period.min(points.len())];
    let representative = cycle.iter().find_map(|p| p.finite()).unwrap_or(map.a);
    let origin = ComplexPoint::Finite(Complex64::new(0.0, 0.0));
    let through_critical = cycle
        .iter()
        .any(|p| chordal_distance(*p, ComplexPoint::Infinity) < CYCLE_TOL || chordal_distance(*p, origin) < CYCLE_TOL);
    let multiplier = if through_critical {
        0.0
    } else {
        multiplier_of_cycle(map, representative, period).unwrap_or(1.0)
    };
    CycleInfo { period, representative, multiplier_magnitude: multiplier, kind: CycleKind::from_multiplier(multiplier) }
}

fn singular_cycle(point: Complex64) -> CycleInfo {
    CycleInfo { period: 1, representative: point, multiplier_magnitude: 1.0, kind: CycleKind::SingularFixed }
}

/// Classifies the orbit of `z` under `F_a` within `max_iter` applications of `F_a`.
pub fn classify_orbit(map: &CncMap, z: ComplexPoint, max_iter: usize) -> OrbitVerdict {
    classify_orbit_traced(map, z, max_iter, None)
}

/// As [`classify_orbit`], optionally recording every visited point.
pub fn classify_orbit_traced(
    map: &CncMap,
    z: ComplexPoint,
    max_iter: usize,
    mut trace: Option<&mut Vec<ComplexPoint>>,
) -> OrbitVerdict {
    let transient = 64.max(max_iter / 4).min(max_iter / 2);
    let mut z = z;
    let mut word: Vec<u8> = Vec::new();
    let (mut tortoise, mut power, mut lag) = (z, 1usize, 0usize);
    let mut dist_history = [f64::INFINITY; 2];
    let mut decreasing = 0usize;
    for k in 0..=max_iter {
        if let Some(t) = trace.as_deref_mut() {
            t.push(z);
        }
        if k == transient {
            tortoise = z;
            power = 1;
            lag = 0;
        } else if k > transient {
            lag += 1;
            if chordal_distance(z, tortoise) < CYCLE_TOL {
                return OrbitVerdict::NonEscaping { cycle: Some(cycle_info(map, z, lag)) };
            }
            if lag == power {
                tortoise = z;
                power *= 2;
                lag = 0;
            }
            if let ComplexPoint::Finite(w) = z {
                let d = (w - map.alpha_a).norm();
                let slot = k % 2;
                if d < dist_history[slot] {
                    decreasing += 1;
                } else {
                    decreasing = 0;
                }
                dist_history[slot] = d;
                if decreasing >= CAPTURE_WINDOW && d < CAPTURE_RADIUS {
                    return OrbitVerdict::NonEscaping { cycle: Some(singular_cycle(map.alpha_a)) };
                }
            } else {
                decreasing = 0;
            }
        }
        if k == max_iter {
            break;
        }
        match map.step(z, word.last().copied()) {
            Step::Escaped => return OrbitVerdict::Escaped { rank: k, word: ItineraryWord::from_trusted(word) },
            Step::Singular(s) => return OrbitVerdict::NonEscaping { cycle: Some(singular_cycle(s)) },
            Step::Next(next, symbol) => {
                word.push(symbol);
                z = next;
            }
        }
    }
    // the last point was recorded but not tested
    if let ComplexPoint::Finite(w) = z {
        if map.singular_point_near(w, SINGULAR_TOL).is_some() {
            return OrbitVerdict::NonEscaping { cycle: Some(singular_cycle(w)) };
        }
        if map.in_fundamental_tile(z) {
            word.truncate(max_iter);
            return OrbitVerdict::Escaped { rank: max_iter, word: ItineraryWord::from_trusted(word) };
        }
    }
    OrbitVerdict::Undetermined
}

/// Connectedness of the limit set, decided by the critical orbit `0 → ∞ → a → …`.
pub fn in_connectedness_locus(map: &CncMap, max_iter: usize) -> Connectedness {
    match classify_orbit(map, ComplexPoint::Finite(Complex64::new(0.0, 0.0)), max_iter) {
        OrbitVerdict::Escaped { rank, .. } => Connectedness::Out { depth: rank.saturating_sub(1) },
        OrbitVerdict::NonEscaping { .. } => Connectedness::In,
        OrbitVerdict::Undetermined => Connectedness::Undetermined,
    }
}

/// Smallest `n ≥ 1` with `F^n(∞) ∈ T_a⁰`, searched within the default budget.
pub fn depth(map: &CncMap) -> Option<usize> {
    depth_with_budget(map, DEFAULT_DEPTH_BUDGET)
}

pub fn depth_with_budget(map: &CncMap, budget: usize) -> Option<usize> {
    match classify_orbit(map, ComplexPoint::Infinity, budget) {
        OrbitVerdict::Escaped { rank, .. } => Some(rank),
        _ => None,
    }
}

/// All solutions `w` of `F_a(w) = z`.
pub fn preimages_f(map: &CncMap, z: ComplexPoint) -> Vec<ComplexPoint> {
    let mut out: Vec<ComplexPoint> =
        cardioid::sigma_preimages(z).into_iter().map(ComplexPoint::Finite).collect();
    if let ComplexPoint::Finite(w) = z {
        if (w - map.a).norm() <= map.r_a {
            out.push(reflect_in_circle(&map.circle(), z));
        }
    }
    out
}
