//! Points of the Riemann sphere, low degree root solvers and circle reflection.

use num_complex::Complex64;
use std::fmt;

/// A point of the extended plane.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ComplexPoint {
    Finite(Complex64),
    Infinity,
}

impl ComplexPoint {
    pub fn new(re: f64, im: f64) -> Self {
        Self::from_complex(Complex64::new(re, im))
    }

    /// Non-finite inputs (overflow, division by zero) collapse to `Infinity`.
    pub fn from_complex(z: Complex64) -> Self {
        if z.re.is_finite() && z.im.is_finite() {
            ComplexPoint::Finite(z)
        } else {
            ComplexPoint::Infinity
        }
    }

    pub fn finite(&self) -> Option<Complex64> {
        match *self {
            ComplexPoint::Finite(z) => Some(z),
            ComplexPoint::Infinity => None,
        }
    }

    pub fn is_infinite(&self) -> bool {
        matches!(self, ComplexPoint::Infinity)
    }
}

impl From<Complex64> for ComplexPoint {
    fn from(z: Complex64) -> Self {
        Self::from_complex(z)
    }
}

impl fmt::Display for ComplexPoint {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ComplexPoint::Finite(z) => write!(f, "{},{}", z.re, z.im),
            ComplexPoint::Infinity => write!(f, "inf"),
        }
    }
}

/// Chordal distance on the sphere of diameter 2; `Infinity` is a regular point.
pub fn chordal_distance(z: ComplexPoint, w: ComplexPoint) -> f64 {
    match (z, w) {
        (ComplexPoint::Infinity, ComplexPoint::Infinity) => 0.0,
        (ComplexPoint::Finite(a), ComplexPoint::Infinity) | (ComplexPoint::Infinity, ComplexPoint::Finite(a)) => {
            2.0 / (1.0 + a.norm_sqr()).sqrt()
        }
        (ComplexPoint::Finite(a), ComplexPoint::Finite(b)) => {
            2.0 * (a - b).norm() / ((1.0 + a.norm_sqr()) * (1.0 + b.norm_sqr())).sqrt()
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Circle {
    pub center: Complex64,
    pub radius: f64,
}

impl Circle {
    /// Returns `None` unless the radius is positive and everything is finite.
    pub fn new(center: Complex64, radius: f64) -> Option<Self> {
        let ok = radius > 0.0 && radius.is_finite() && center.re.is_finite() && center.im.is_finite();
        ok.then_some(Circle { center, radius })
    }

    pub fn contains(&self, z: Complex64) -> bool {
        (z - self.center).norm() <= self.radius
    }
}

/// `c + r²/conj(z − c)`, swapping the center with infinity.
pub fn reflect_in_circle(circle: &Circle, z: ComplexPoint) -> ComplexPoint {
    match z {
        ComplexPoint::Infinity => ComplexPoint::Finite(circle.center),
        ComplexPoint::Finite(z) => {
            let d = z - circle.center;
            if d == Complex64::new(0.0, 0.0) {
                ComplexPoint::Infinity
            } else {
                ComplexPoint::from_complex(circle.center + circle.radius * circle.radius / d.conj())
            }
        }
    }
}

/// Roots of a monic polynomial listed with multiplicity.
#[derive(Debug, Clone, PartialEq)]
pub struct RootSet {
    pub roots: Vec<Complex64>,
}

impl RootSet {
    fn sorted(mut roots: Vec<Complex64>) -> Self {
        let key = |z: &Complex64| ((z.re * 1e12).round(), (z.im * 1e12).round());
        roots.sort_by(|a, b| key(a).partial_cmp(&key(b)).unwrap_or(std::cmp::Ordering::Equal));
        RootSet { roots }
    }

    pub fn len(&self) -> usize {
        self.roots.len()
    }

    pub fn is_empty(&self) -> bool {
        self.roots.is_empty()
    }

    /// Number of listed roots within `tol` of `z`.
    pub fn multiplicity(&self, z: Complex64, tol: f64) -> usize {
        self.roots.iter().filter(|r| (**r - z).norm() <= tol).count()
    }
}

/// Roots of `z² + bz + c`.
pub fn solve_quadratic(b: Complex64, c: Complex64) -> RootSet {
    let d = (b * b - 4.0 * c).sqrt();
    let q = if (b + d).norm() >= (b - d).norm() { -(b + d) / 2.0 } else { -(b - d) / 2.0 };
    if q.norm() == 0.0 {
        return RootSet::sorted(vec![q, q]);
    }
    RootSet::sorted(vec![q, c / q])
}

/// Roots of `w³ + a2·w² + a1·w + a0` by Cardano's formula and one Newton step per root.
pub fn solve_cubic_monic(a2: Complex64, a1: Complex64, a0: Complex64) -> RootSet {
    let shift = a2 / 3.0;
    let p = a1 - a2 * a2 / 3.0;
    let q = 2.0 * a2 * a2 * a2 / 27.0 - a2 * a1 / 3.0 + a0;
    let s = (q * q / 4.0 + p * p * p / 27.0).sqrt();
    let u3 = if (-q / 2.0 + s).norm() >= (-q / 2.0 - s).norm() { -q / 2.0 + s } else { -q / 2.0 - s };
    let omega = Complex64::new(-0.5, 3f64.sqrt() / 2.0);
    let mut roots = Vec::with_capacity(3);
    if u3.norm() == 0.0 {
        roots.extend([-shift; 3]);
    } else {
        let u = u3.powf(1.0 / 3.0);
        let mut uk = u;
        for _ in 0..3 {
            roots.push(uk - p / (3.0 * uk) - shift);
            uk *= omega;
        }
    }
    let f = |w: Complex64| ((w + a2) * w + a1) * w + a0;
    let df = |w: Complex64| (3.0 * w + 2.0 * a2) * w + a1;
    for r in roots.iter_mut() {
        let fr = f(*r);
        let d = df(*r);
        if d.norm() > 0.0 {
            let cand = *r - fr / d;
            if f(cand).norm() < fr.norm() {
                *r = cand;
            }
        }
    }
    RootSet::sorted(roots)
}

/// A Möbius map, optionally precomposed with complex conjugation:
/// `z ↦ (m00·u + m01)/(m10·u + m11)` where `u` is `conj z` when `anti` is set.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AntiMobius {
    pub m: [[Complex64; 2]; 2],
    pub anti: bool,
}

impl AntiMobius {
    pub fn identity() -> Self {
        let one = Complex64::new(1.0, 0.0);
        let zero = Complex64::new(0.0, 0.0);
        AntiMobius { m: [[one, zero], [zero, one]], anti: false }
    }

    pub fn reflection(circle: &Circle) -> Self {
        let c = circle.center;
        let one = Complex64::new(1.0, 0.0);
        AntiMobius { m: [[c, Complex64::new(circle.radius * circle.radius - c.norm_sqr(), 0.0)], [one, -c.conj()]], anti: true }
    }

    /// `self ∘ other`.
    pub fn compose(&self, other: &AntiMobius) -> AntiMobius {
        let b = if self.anti { other.m.map(|row| row.map(|x| x.conj())) } else { other.m };
        let a = self.m;
        let mut m = [[Complex64::new(0.0, 0.0); 2]; 2];
        for (i, row) in m.iter_mut().enumerate() {
            for (j, entry) in row.iter_mut().enumerate() {
                *entry = a[i][0] * b[0][j] + a[i][1] * b[1][j];
            }
        }
        let scale = m.iter().flatten().map(|x| x.norm()).fold(0.0, f64::max);
        if scale > 0.0 && scale.is_finite() {
            for x in m.iter_mut().flatten() {
                *x /= scale;
            }
        }
        AntiMobius { m, anti: self.anti != other.anti }
    }

    pub fn apply(&self, z: ComplexPoint) -> ComplexPoint {
        let [[a, b], [c, d]] = self.m;
        match z {
            ComplexPoint::Infinity => {
                if c.norm() == 0.0 {
                    ComplexPoint::Infinity
                } else {
                    ComplexPoint::from_complex(a / c)
                }
            }
            ComplexPoint::Finite(z) => {
                let u = if self.anti { z.conj() } else { z };
                let den = c * u + d;
                if den.norm() == 0.0 {
                    ComplexPoint::Infinity
                } else {
                    ComplexPoint::from_complex((a * u + b) / den)
                }
            }
        }
    }
}
