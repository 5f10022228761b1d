//! Rays of the ideal triangle group and dynamical rays of `F_a` at pre-periodic angles.

use crate::cardioid::sigma_preimages_with_roots;
use crate::cnc::CncMap;
use crate::plane::{chordal_distance, reflect_in_circle, AntiMobius, ComplexPoint};
use crate::symbolic::{itinerary_of_angle, EventuallyPeriodicWord, RationalAngle, Side, TriangleGroup};
use crate::{Error, Result};
use num_complex::Complex64;

/// Period-block repetitions used when no depth is given.
pub const DEFAULT_RAY_DEPTH: usize = 65_536;
/// Spherical tolerance on the last increment for `converged`.
pub const LAND_TOL: f64 = 1e-10;
/// Chordal distance to the critical value `∞` at which a pullback is refused.
pub const BIFURCATION_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq)]
pub struct RayApprox {
    pub angle: RationalAngle,
    pub word: EventuallyPeriodicWord,
    /// Pullback trajectory: `F_a(points[k + 1]) = points[k]`.
    pub points: Vec<Complex64>,
    /// Extrapolated landing point.
    pub landing: Option<Complex64>,
    /// Difference between two successive extrapolations.
    pub landing_error: f64,
    /// Last chordal increment is at most [`LAND_TOL`].
    pub converged: bool,
}

/// Group orbit points `0, ρ_{i1}(0), ρ_{i1}∘ρ_{i2}(0), …` for the first
/// `preperiod + depth·period` symbols of `word`.
pub fn g_ray(word: &EventuallyPeriodicWord, depth: usize) -> Vec<Complex64> {
    let g = TriangleGroup::standard();
    let n = word.preperiod.len() + depth * word.period.len();
    let mut map = AntiMobius::identity();
    let mut points = vec![Complex64::new(0.0, 0.0)];
    for s in word.prefix(n) {
        map = map.compose(&AntiMobius::reflection(g.circle(s)));
        points.push(map.apply(ComplexPoint::Finite(Complex64::new(0.0, 0.0))).finite().unwrap_or(Complex64::new(0.0, 0.0)));
    }
    points
}

/// Interior base point of `T_a⁰`: halfway between the far side of the circumcircle
/// and the first point of `∂♡` met when walking from there towards `α_a`.
pub fn ray_base_point(map: &CncMap) -> Complex64 {
    let dir = map.alpha_a - map.a;
    let unit = if dir.norm() > 0.0 { dir / dir.norm() } else { Complex64::new(1.0, 0.0) };
    let far = map.a - map.r_a * unit;
    let inside = |t: f64| crate::cardioid::locate(far + t * (map.alpha_a - far)) != crate::cardioid::Location::Exterior;
    let (mut lo, mut hi) = (0.0, 1.0);
    // first crossing: scan, then bisect
    let steps = 512;
    for j in 1..=steps {
        let t = j as f64 / steps as f64;
        if inside(t) {
            hi = t;
            lo = (j - 1) as f64 / steps as f64;
            break;
        }
    }
    for _ in 0..60 {
        let mid = 0.5 * (lo + hi);
        if inside(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let crossing = far + lo * (map.alpha_a - far);
    0.5 * (crossing + far)
}

/// Inverse branch of `F_a` selected by a symbol: `2` is the circle reflection,
/// `1` and `3` are the cardioid preimages with `Im λ ≥ 0` and `Im λ < 0`.
fn inverse_branch(map: &CncMap, symbol: u8, z: Complex64, step: usize) -> Result<Complex64> {
    if chordal_distance(ComplexPoint::Finite(z), ComplexPoint::Infinity) <= BIFURCATION_TOL {
        return Err(Error::BifurcatedRay(step));
    }
    if symbol == 2 {
        if (z - map.a).norm() > map.r_a {
            return Err(Error::Domain(format!("{z} has no preimage outside the circumcircle")));
        }
        return reflect_in_circle(&map.circle(), ComplexPoint::Finite(z))
            .finite()
            .ok_or(Error::BifurcatedRay(step));
    }
    sigma_preimages_with_roots(ComplexPoint::Finite(z))
        .into_iter()
        .find(|(_, lam)| if symbol == 1 { lam.im >= 0.0 } else { lam.im < 0.0 })
        .map(|(w, _)| w)
        .ok_or(Error::BifurcatedRay(step))
}

fn extrapolate(x1: Complex64, x2: Complex64, x4: Complex64) -> Complex64 {
    let d = x4 - x2;
    if d.norm() < 1e-15 {
        return x4;
    }
    let q = (x2 - x1) / d;
    if (q - 1.0).norm() < 1e-3 || !(q.re.is_finite() && q.im.is_finite()) {
        return x4;
    }
    x4 + d / (q - 1.0)
}

/// Traces the dynamical ray of angle `theta` by pulling back a base point along the
/// `m₋₂`-itinerary of `theta` (`Ccw` side at partition endpoints).
///
/// The landing point is extrapolated from the approximants after `depth/4`,
/// `depth/2` and `depth` period blocks, which removes the leading power-law error
/// of parabolic landing.
pub fn trace_ray(map: &CncMap, theta: RationalAngle, depth: usize) -> Result<RayApprox> {
    let word = itinerary_of_angle(theta, Some(Side::Ccw))?;
    if word.period.is_empty() {
        return Err(Error::NotPreperiodic(theta.to_string()));
    }
    let depth = depth.max(8);
    let mut points = vec![ray_base_point(map)];
    let mut z = points[0];
    let mut samples: Vec<(usize, Complex64)> = Vec::new();
    let marks = [depth / 8, depth / 4, depth / 2, depth];
    let mut step = 0;
    for n in 1..=depth {
        for &s in word.period.iter().rev() {
            z = inverse_branch(map, s, z, step)?;
            step += 1;
            points.push(z);
        }
        if marks.contains(&n) {
            samples.push((n, z));
        }
    }
    let apply_pre = |mut w: Complex64| -> Result<Complex64> {
        for &s in word.preperiod.iter().rev() {
            w = inverse_branch(map, s, w, 0)?;
        }
        Ok(w)
    };
    for &s in word.preperiod.iter().rev() {
        z = inverse_branch(map, s, z, step)?;
        step += 1;
        points.push(z);
    }
    let x: Vec<Complex64> = samples.iter().map(|&(_, w)| apply_pre(w)).collect::<Result<_>>()?;
    let landing = extrapolate(x[1], x[2], x[3]);
    let previous = extrapolate(x[0], x[1], x[2]);
    let n = points.len();
    let converged = chordal_distance(ComplexPoint::Finite(points[n - 1]), ComplexPoint::Finite(points[n - 2])) <= LAND_TOL;
    Ok(RayApprox {
        angle: theta,
        word,
        points,
        landing: (landing.re.is_finite() && landing.im.is_finite()).then_some(landing),
        landing_error: (landing - previous).norm(),
        converged,
    })
}
