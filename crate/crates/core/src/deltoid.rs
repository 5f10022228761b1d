//! The deltoid droplet `T` and the Schwarz reflection of its exterior `Ω = φ_Δ(Ĉ \ D̄)`,
//! where `φ_Δ(w) = w + 1/(2w²)`.

use crate::plane::{solve_cubic_monic, ComplexPoint};
use crate::{Error, Result};
use num_complex::Complex64;

pub const DEFAULT_TOL: f64 = 1e-9;
pub const DEFAULT_ESCAPE_RADIUS: f64 = 4.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltoidTag {
    Droplet,
    Exterior,
    Cusp,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct DeltoidLocation {
    pub tag: DeltoidTag,
    /// The preimage under `φ_Δ` outside the closed unit disk; present iff `tag` is `Exterior`.
    pub outer_root: Option<Complex64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum DeltoidVerdict {
    /// The orbit first enters the droplet at iterate `rank`.
    Tiling { rank: usize },
    BasinInfinity { first_exit_iter: usize },
    Undetermined,
}

/// The three cusps `(3/2)·ω^k`.
pub fn cusps() -> [Complex64; 3] {
    let mut out = [Complex64::new(0.0, 0.0); 3];
    for (k, z) in out.iter_mut().enumerate() {
        *z = Complex64::from_polar(1.5, 2.0 * std::f64::consts::PI * k as f64 / 3.0);
    }
    out
}

pub fn deltoid_map(w: Complex64) -> Result<Complex64> {
    if w.norm() == 0.0 {
        return Err(Error::Domain("deltoid map has its pole at 0".into()));
    }
    Ok(w + 1.0 / (2.0 * w * w))
}

pub fn locate_deltoid(z: Complex64) -> DeltoidLocation {
    locate_deltoid_with_tol(z, DEFAULT_TOL)
}

/// Inverts `φ_Δ` through `w³ − z·w² + 1/2 = 0`.
pub fn locate_deltoid_with_tol(z: Complex64, tol: f64) -> DeltoidLocation {
    if cusps().iter().any(|c| (z - c).norm() <= tol) {
        return DeltoidLocation { tag: DeltoidTag::Cusp, outer_root: None };
    }
    let zero = Complex64::new(0.0, 0.0);
    let roots = solve_cubic_monic(-z, zero, Complex64::new(0.5, 0.0)).roots;
    let mut outside = roots.iter().filter(|w| w.norm() > 1.0 + tol);
    match (outside.next(), outside.next()) {
        (Some(&w), None) => {
            // Cardano loses digits for large |z|; φ_Δ is close to the identity there.
            let mut w = w;
            for _ in 0..3 {
                let f = w + 1.0 / (2.0 * w * w) - z;
                let df = 1.0 - 1.0 / (w * w * w);
                let step = f / df;
                if !(step.re.is_finite() && step.im.is_finite()) {
                    break;
                }
                w -= step;
            }
            DeltoidLocation { tag: DeltoidTag::Exterior, outer_root: Some(w) }
        }
        _ => DeltoidLocation { tag: DeltoidTag::Droplet, outer_root: None },
    }
}

/// `σ_Δ(φ_Δ(w)) = φ_Δ(1/conj w)` on the exterior of the droplet.
pub fn schwarz_deltoid(z: Complex64) -> Result<ComplexPoint> {
    match locate_deltoid(z) {
        DeltoidLocation { tag: DeltoidTag::Exterior, outer_root: Some(w) } => {
            let u = 1.0 / w.conj();
            Ok(ComplexPoint::from_complex(u + 1.0 / (2.0 * u * u)))
        }
        DeltoidLocation { tag: DeltoidTag::Cusp, .. } => Err(Error::Domain(format!("{z} is a cusp of the deltoid"))),
        _ => Err(Error::Domain(format!("{z} lies in the deltoid droplet"))),
    }
}

/// Iterates `σ_Δ` until the orbit enters the droplet or leaves the disk of radius `escape_radius`.
///
/// A cusp is neither: the verdict is `Undetermined`.
pub fn classify_deltoid_orbit(z: Complex64, max_iter: usize, escape_radius: f64) -> DeltoidVerdict {
    let mut z = z;
    for k in 0..=max_iter {
        if z.norm() > escape_radius {
            return DeltoidVerdict::BasinInfinity { first_exit_iter: k };
        }
        let loc = locate_deltoid(z);
        match loc.tag {
            DeltoidTag::Droplet => return DeltoidVerdict::Tiling { rank: k },
            DeltoidTag::Cusp => return DeltoidVerdict::Undetermined,
            DeltoidTag::Exterior => {}
        }
        if k == max_iter {
            break;
        }
        let w = loc.outer_root.expect("exterior point has an outer root");
        let u = 1.0 / w.conj();
        z = u + 1.0 / (2.0 * u * u);
        if !(z.re.is_finite() && z.im.is_finite()) {
            return DeltoidVerdict::BasinInfinity { first_exit_iter: k + 1 };
        }
    }
    DeltoidVerdict::Undetermined
}

/// Number of tiles of rank `n ≥ 1`: `3·2^(n−1)`.
pub fn tile_count(n: u32) -> u64 {
    if n == 0 {
        1
    } else {
        3u64 << (n - 1)
    }
}
