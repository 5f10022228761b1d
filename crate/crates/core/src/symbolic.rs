//! The ideal triangle reflection group, its coding by admissible words, the circle
//! conjugacy `E` between the reflection map `ρ` and the anti-doubling map
//! `m₋₂: θ ↦ −2θ`, and the Minkowski question-mark function.
//!
//! Partition of the circle (angles in turns): `I1 = [0, 1/3]`, `I2 = [1/3, 2/3]`,
//! `I3 = [2/3, 1]`. On the `ρ` side arc `k` is the unit-circle arc inside the
//! circle `C_k`, so both partitions share the cusps `1, ω, ω²`.

use crate::plane::{reflect_in_circle, AntiMobius, Circle, ComplexPoint};
use crate::{Error, Result};
use num_bigint::BigInt;
use num_complex::Complex64;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use std::collections::HashMap;
use std::f64::consts::PI;
use std::fmt;
use std::str::FromStr;

/// Tolerance, in turns, for recognising a cusp while coding a circle point.
pub const CUSP_ANGLE_TOL: f64 = 1e-13;

fn check_symbols(symbols: &[u8]) -> Result<()> {
    if let Some(s) = symbols.iter().find(|s| !(1..=3).contains(*s)) {
        return Err(Error::InadmissibleWord(format!("symbol {s} is not in 1..=3")));
    }
    if let Some(w) = symbols.windows(2).find(|w| w[0] == w[1]) {
        return Err(Error::InadmissibleWord(format!("repeated symbol {}", w[0])));
    }
    Ok(())
}

fn join(symbols: &[u8]) -> String {
    symbols.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(",")
}

/// A finite word over `{1, 2, 3}` with no symbol repeated consecutively.
#[derive(Debug, Clone, PartialEq, Eq, Hash, Default)]
pub struct ItineraryWord {
    symbols: Vec<u8>,
}

impl ItineraryWord {
    pub fn new(symbols: Vec<u8>) -> Result<Self> {
        check_symbols(&symbols)?;
        Ok(ItineraryWord { symbols })
    }

    pub(crate) fn from_trusted(symbols: Vec<u8>) -> Self {
        debug_assert!(check_symbols(&symbols).is_ok());
        ItineraryWord { symbols }
    }

    pub fn empty() -> Self {
        ItineraryWord::default()
    }

    pub fn symbols(&self) -> &[u8] {
        &self.symbols
    }

    pub fn len(&self) -> usize {
        self.symbols.len()
    }

    pub fn is_empty(&self) -> bool {
        self.symbols.is_empty()
    }
}

impl fmt::Display for ItineraryWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})", join(&self.symbols))
    }
}

/// `preperiod · period^∞`. An empty period denotes a finite word.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct EventuallyPeriodicWord {
    pub preperiod: Vec<u8>,
    pub period: Vec<u8>,
}

impl EventuallyPeriodicWord {
    pub fn new(preperiod: Vec<u8>, period: Vec<u8>) -> Result<Self> {
        let mut unrolled = preperiod.clone();
        unrolled.extend_from_slice(&period);
        if let Some(&first) = period.first() {
            unrolled.push(first);
        }
        check_symbols(&unrolled)?;
        Ok(EventuallyPeriodicWord { preperiod, period })
    }

    pub fn is_finite(&self) -> bool {
        self.period.is_empty()
    }

    pub fn symbol(&self, n: usize) -> Option<u8> {
        if n < self.preperiod.len() {
            Some(self.preperiod[n])
        } else if self.period.is_empty() {
            None
        } else {
            Some(self.period[(n - self.preperiod.len()) % self.period.len()])
        }
    }

    /// The first `n` symbols, or fewer for a finite word.
    pub fn prefix(&self, n: usize) -> Vec<u8> {
        (0..n).map_while(|i| self.symbol(i)).collect()
    }

    /// Smallest period, then shortest preperiod.
    fn canonical(mut self) -> Self {
        let p = self.period.len();
        if let Some(d) = (1..=p).find(|d| p.is_multiple_of(*d) && (0..p).all(|i| self.period[i] == self.period[i % d])) {
            self.period.truncate(d);
        }
        while !self.period.is_empty() && self.preperiod.last() == self.period.last() {
            self.preperiod.pop();
            self.period.rotate_right(1);
        }
        self
    }
}

impl fmt::Display for EventuallyPeriodicWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({})({})^inf", join(&self.preperiod), join(&self.period))
    }
}

/// All admissible words of length `n`, in lexicographic order.
pub fn admissible_words(n: usize) -> Vec<ItineraryWord> {
    let mut words: Vec<Vec<u8>> = vec![vec![]];
    for _ in 0..n {
        words = words
            .into_iter()
            .flat_map(|w| {
                let last = w.last().copied();
                (1..=3u8).filter(move |s| Some(*s) != last).map(move |s| {
                    let mut next = w.clone();
                    next.push(s);
                    next
                })
            })
            .collect();
    }
    words.into_iter().map(ItineraryWord::from_trusted).collect()
}

/// Side of a partition endpoint whose interval is meant.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Side {
    /// The interval that starts at the endpoint.
    Ccw,
    /// The interval that ends at the endpoint.
    Cw,
}

impl Side {
    fn flip(self) -> Self {
        match self {
            Side::Ccw => Side::Cw,
            Side::Cw => Side::Ccw,
        }
    }
}

/// An exact element of `ℚ/ℤ`, stored reduced with `0 ≤ num < den`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct RationalAngle {
    num: u64,
    den: u64,
}

impl RationalAngle {
    /// `p/q` reduced modulo 1. Returns `None` for `q = 0`.
    pub fn new(p: i64, q: u64) -> Option<Self> {
        if q == 0 {
            return None;
        }
        let r = (p as i128).rem_euclid(q as i128) as u64;
        let g = r.gcd(&q);
        Some(RationalAngle { num: r / g, den: q / g })
    }

    pub fn numerator(&self) -> u64 {
        self.num
    }

    pub fn denominator(&self) -> u64 {
        self.den
    }

    pub fn to_f64(&self) -> f64 {
        self.num as f64 / self.den as f64
    }

    pub fn to_big(&self) -> BigRational {
        BigRational::new(BigInt::from(self.num), BigInt::from(self.den))
    }

    /// `m₋₂(θ) = −2θ mod 1`.
    pub fn anti_double(&self) -> Self {
        let twice = ((2 * self.num as u128) % self.den as u128) as u64;
        let r = if twice == 0 { 0 } else { self.den - twice };
        let g = r.gcd(&self.den);
        RationalAngle { num: r / g, den: self.den / g }
    }

    /// `Some(k)` when the angle is the cusp `k/3`.
    pub fn endpoint_index(&self) -> Option<u8> {
        match self.den {
            1 => Some(0),
            3 => Some(self.num as u8),
            _ => None,
        }
    }

    fn interval(&self, side: Side) -> u8 {
        match (self.endpoint_index(), side) {
            (Some(k), Side::Ccw) => k + 1,
            (Some(0), Side::Cw) => 3,
            (Some(k), Side::Cw) => k,
            (None, _) => {
                let three = 3 * self.num as u128;
                if three < self.den as u128 {
                    1
                } else if three < 2 * self.den as u128 {
                    2
                } else {
                    3
                }
            }
        }
    }
}

impl fmt::Display for RationalAngle {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.num, self.den)
    }
}

impl FromStr for RationalAngle {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, Self::Err> {
        let (p, q) = match s.split_once('/') {
            Some((p, q)) => (p.trim(), q.trim()),
            None => (s.trim(), "1"),
        };
        let p: i64 = p.parse().map_err(|_| format!("bad numerator in {s:?}"))?;
        let q: u64 = q.parse().map_err(|_| format!("bad denominator in {s:?}"))?;
        RationalAngle::new(p, q).ok_or_else(|| format!("zero denominator in {s:?}"))
    }
}

const MAX_ITINERARY_STEPS: usize = 1 << 22;

/// The `m₋₂`-itinerary of `θ` through `I1, I2, I3`.
///
/// At a partition endpoint the `side` picks the interval; the side flips at every
/// step because `m₋₂` reverses orientation. Without a side, an angle that is itself
/// an endpoint is rejected and any later endpoint is approached from the `Ccw` side
/// of the starting point.
pub fn itinerary_of_angle(theta: RationalAngle, side: Option<Side>) -> Result<EventuallyPeriodicWord> {
    if side.is_none() && theta.endpoint_index().is_some() {
        return Err(Error::AmbiguousEndpoint(theta.to_string()));
    }
    let mut side = side.unwrap_or(Side::Ccw);
    let mut t = theta;
    let mut seen: HashMap<(RationalAngle, Option<Side>), usize> = HashMap::new();
    let mut symbols = Vec::new();
    while symbols.len() < MAX_ITINERARY_STEPS {
        let key = (t, t.endpoint_index().map(|_| side));
        if let Some(&i) = seen.get(&key) {
            let period = symbols.split_off(i);
            return Ok(EventuallyPeriodicWord { preperiod: symbols, period }.canonical());
        }
        seen.insert(key, symbols.len());
        symbols.push(t.interval(side));
        t = t.anti_double();
        side = side.flip();
    }
    Err(Error::NotPreperiodic(theta.to_string()))
}

/// `m₋₂` on floating point angles.
pub fn anti_double(t: f64) -> f64 {
    (-2.0 * t).rem_euclid(1.0)
}

/// Distance in `ℝ/ℤ`.
pub fn circular_distance(s: f64, t: f64) -> f64 {
    let d = (s - t).rem_euclid(1.0);
    d.min(1.0 - d)
}

/// The circles `C1, C2, C3` of radius `√3` bounding the ideal triangle `Π`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct TriangleGroup {
    pub circles: [Circle; 3],
}

impl Default for TriangleGroup {
    fn default() -> Self {
        TriangleGroup::standard()
    }
}

impl TriangleGroup {
    pub fn standard() -> Self {
        let s = 3f64.sqrt();
        let mk = |re: f64, im: f64| Circle { center: Complex64::new(re, im), radius: s };
        TriangleGroup { circles: [mk(1.0, s), mk(-2.0, 0.0), mk(1.0, -s)] }
    }

    pub fn circle(&self, k: u8) -> &Circle {
        &self.circles[(k - 1) as usize]
    }

    /// Reflection `ρ_k` in the circle `C_k`.
    pub fn reflect(&self, k: u8, z: Complex64) -> Complex64 {
        match reflect_in_circle(self.circle(k), ComplexPoint::Finite(z)) {
            ComplexPoint::Finite(w) => w,
            ComplexPoint::Infinity => Complex64::new(f64::INFINITY, f64::INFINITY),
        }
    }

    /// Index `k` of the region `D_k` (closed, intersected with the closed disk) containing `z`.
    pub fn region(&self, z: Complex64) -> Option<u8> {
        if z.norm() > 1.0 + 1e-12 {
            return None;
        }
        let (k, excess) = (1..=3u8)
            .map(|k| (k, (z - self.circle(k).center).norm() - self.circle(k).radius))
            .min_by(|a, b| a.1.total_cmp(&b.1))
            .expect("three circles");
        (excess <= 1e-12).then_some(k)
    }

    /// The cusp `ω^k` of the tessellation on the unit circle.
    pub fn cusp(k: u8) -> Complex64 {
        Complex64::from_polar(1.0, 2.0 * PI * (k % 3) as f64 / 3.0)
    }
}

/// The reflection map `ρ` of the ideal triangle group on `D̄ \ int Π`.
pub fn rho(z: Complex64) -> Result<Complex64> {
    let g = TriangleGroup::standard();
    match g.region(z) {
        Some(k) => Ok(g.reflect(k, z)),
        None => Err(Error::Domain(format!("{z} lies inside the fundamental triangle or outside the disk"))),
    }
}

/// The endpoints of arc `k` of the unit circle, counterclockwise.
fn arc_endpoints(k: u8) -> (Complex64, Complex64) {
    (TriangleGroup::cusp(k - 1), TriangleGroup::cusp(k))
}

/// Polygonal boundary of the tile `ρ_{i1} ∘ … ∘ ρ_{ik}(Π)`, `3·resolution` vertices.
pub fn tile(word: &ItineraryWord, resolution: usize) -> Result<Vec<Complex64>> {
    let g = TriangleGroup::standard();
    let resolution = resolution.max(1);
    let mut boundary = Vec::with_capacity(3 * resolution);
    for k in 1..=3u8 {
        let c = g.circle(k).center;
        let (p, q) = arc_endpoints(k);
        let a0 = (p - c).arg();
        let mut sweep = (q - c).arg() - a0;
        if sweep > PI {
            sweep -= 2.0 * PI;
        } else if sweep < -PI {
            sweep += 2.0 * PI;
        }
        for j in 0..resolution {
            let t = a0 + sweep * j as f64 / resolution as f64;
            boundary.push(c + Complex64::from_polar(g.circle(k).radius, t));
        }
    }
    let mut map = AntiMobius::identity();
    for &s in word.symbols() {
        map = map.compose(&AntiMobius::reflection(g.circle(s)));
    }
    Ok(boundary
        .into_iter()
        .map(|z| map.apply(ComplexPoint::Finite(z)).finite().unwrap_or(z))
        .collect())
}

fn turns(z: Complex64) -> f64 {
    (z.arg() / (2.0 * PI)).rem_euclid(1.0)
}

fn arc_of_turns(t: f64) -> u8 {
    if t < 1.0 / 3.0 {
        1
    } else if t < 2.0 / 3.0 {
        2
    } else {
        3
    }
}

fn cusp_of_turns(t: f64) -> Option<u8> {
    (0..3u8).find(|&k| circular_distance(t, k as f64 / 3.0) <= CUSP_ANGLE_TOL)
}

fn big(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

fn frac(x: BigRational) -> BigRational {
    let f = x.floor();
    x - f
}

fn in_closed_interval(k: u8, t: &BigRational) -> bool {
    let third = BigRational::new(BigInt::one(), BigInt::from(3));
    let two_thirds = &third * big(2);
    match k {
        1 => *t <= third,
        2 => *t >= third && *t <= two_thirds,
        _ => *t >= two_thirds || t.is_zero(),
    }
}

/// The `m₋₂`-preimage of `phi` lying in `I_k`.
fn pull_back_point(phi: &BigRational, k: u8) -> BigRational {
    let half = BigRational::new(BigInt::one(), BigInt::from(2));
    let first = frac(-phi * &half);
    if in_closed_interval(k, &first) {
        first
    } else {
        frac(first + half)
    }
}

/// The closed interval of angles whose itinerary begins with `symbols`.
fn nested_interval(symbols: &[u8]) -> (BigRational, BigRational) {
    let third = |n: i64| BigRational::new(BigInt::from(n), BigInt::from(3));
    let last = *symbols.last().expect("nonempty itinerary");
    let (mut lo, mut hi) = (third(last as i64 - 1), third(last as i64));
    for pair in symbols.windows(2).rev() {
        let (k, m) = (pair[0], pair[1]);
        let j = match (k, m) {
            (1, _) => 1,
            (3, _) => 2,
            (_, 1) => 1,
            _ => 2,
        };
        let two = big(2);
        let (nlo, nhi) = ((big(j) - &hi) / &two, (big(j) - &lo) / &two);
        lo = nlo;
        hi = nhi;
    }
    (lo, hi)
}

/// An angle with an error bar; `exact` is set when the value is known exactly.
#[derive(Debug, Clone, PartialEq)]
pub struct AngleEstimate {
    pub angle: f64,
    pub error: f64,
    pub exact: Option<BigRational>,
}

/// A point of the unit circle with an error bar (Euclidean).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CirclePointEstimate {
    pub point: Complex64,
    pub error: f64,
}

/// Finite-depth evaluation of the conjugacy `E` from `ρ` on the unit circle to `m₋₂`.
///
/// The `ρ`-itinerary of `ζ` is read for `depth` symbols and the nested `m₋₂`
/// interval with the same itinerary is returned as midpoint and width. If the orbit
/// lands on a cusp the value is exact.
pub fn conjugacy_e(zeta: Complex64, depth: usize) -> AngleEstimate {
    let g = TriangleGroup::standard();
    let mut z = zeta / zeta.norm();
    let mut symbols: Vec<u8> = Vec::with_capacity(depth);
    for _ in 0..depth.max(1) {
        let t = turns(z);
        if let Some(c) = cusp_of_turns(t) {
            let mut phi = BigRational::new(BigInt::from(c), BigInt::from(3));
            for &s in symbols.iter().rev() {
                phi = pull_back_point(&phi, s);
            }
            return AngleEstimate { angle: phi.to_f64().unwrap_or(f64::NAN), error: 0.0, exact: Some(phi) };
        }
        let k = arc_of_turns(t);
        if symbols.last() == Some(&k) {
            break;
        }
        symbols.push(k);
        z = g.reflect(k, z);
        z /= z.norm();
    }
    let (lo, hi) = nested_interval(&symbols);
    let mid = (&lo + &hi) / big(2);
    let width = (&hi - &lo).to_f64().unwrap_or(f64::NAN);
    AngleEstimate { angle: mid.to_f64().unwrap_or(f64::NAN).rem_euclid(1.0), error: width, exact: None }
}

/// Finite-depth evaluation of `E⁻¹`: the nested arc of the unit circle whose
/// `ρ`-itinerary matches the `m₋₂`-itinerary of `θ`.
pub fn conjugacy_e_inverse(theta: RationalAngle, depth: usize) -> CirclePointEstimate {
    let g = TriangleGroup::standard();
    let depth = depth.max(1);
    let mut side = Side::Ccw;
    let mut t = theta;
    let mut map = AntiMobius::identity();
    for step in 0..depth {
        if let Some(c) = t.endpoint_index() {
            let p = map.apply(ComplexPoint::Finite(TriangleGroup::cusp(c))).finite().expect("finite cusp image");
            return CirclePointEstimate { point: p / p.norm(), error: 0.0 };
        }
        let k = t.interval(side);
        if step + 1 == depth {
            let (p, q) = arc_endpoints(k);
            let mid_arc = Complex64::from_polar(1.0, 2.0 * PI * (k as f64 - 0.5) / 3.0);
            let img = |z: Complex64| map.apply(ComplexPoint::Finite(z)).finite().unwrap_or(z);
            let (ip, iq, im) = (img(p), img(q), img(mid_arc));
            let point = im / im.norm();
            return CirclePointEstimate { point, error: (point - ip).norm().max((point - iq).norm()) };
        }
        map = map.compose(&AntiMobius::reflection(g.circle(k)));
        t = t.anti_double();
        side = side.flip();
    }
    unreachable!("loop returns at the last step")
}

/// Minkowski's question-mark function at `p/q ∈ [0, 1]`, exactly.
///
/// Uses the continued fraction `[0; a1, a2, …]` of `p/q`, whose partial quotients
/// are the run lengths of the Stern–Brocot path.
pub fn question_mark(p: u64, q: u64) -> Result<BigRational> {
    if q == 0 || p > q {
        return Err(Error::Domain(format!("{p}/{q} is not in [0, 1]")));
    }
    if p == q {
        return Ok(BigRational::one());
    }
    let (mut num, mut den) = (p, q);
    let mut exponent: u64 = 0;
    let mut sign = 1i64;
    let mut acc = BigRational::zero();
    while num != 0 {
        let a = den / num;
        let r = den % num;
        exponent += a;
        let term = BigRational::new(BigInt::from(2 * sign), BigInt::one() << exponent);
        acc += term;
        sign = -sign;
        den = num;
        num = r;
    }
    Ok(acc)
}
