//! The cardioid `♡ = φ(D)` with `φ(λ) = λ/2 − λ²/4` and its Schwarz reflection `σ`.
//!
//! `σ` is realized through the Riemann map: `σ(φ(λ)) = φ(1/conj λ)` for `|λ| ≤ 1`.

use crate::plane::{solve_quadratic, ComplexPoint};
use crate::{Error, Result};
use num_complex::Complex64;

pub const DEFAULT_BOUNDARY_TOL: f64 = 1e-9;

/// The cusp of `∂♡`, fixed by `σ`.
pub const CUSP: f64 = 0.25;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Location {
    Interior,
    Boundary,
    Exterior,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CardioidInversion {
    /// Root of `φ(λ) = w` of smaller modulus.
    pub inner_root: Complex64,
    /// The companion root `2 − inner_root`.
    pub outer_root: Complex64,
    pub location: Location,
}

pub fn riemann_map(lambda: Complex64) -> Complex64 {
    lambda / 2.0 - lambda * lambda / 4.0
}

/// `φ′(λ) = (1 − λ)/2`.
pub fn riemann_map_derivative(lambda: Complex64) -> Complex64 {
    (1.0 - lambda) / 2.0
}

/// Solves `λ² − 2λ + 4w = 0` and locates `w` relative to `♡`.
pub fn invert_riemann_map(w: Complex64, tol_boundary: f64) -> CardioidInversion {
    let roots = solve_quadratic(Complex64::new(-2.0, 0.0), 4.0 * w).roots;
    let (inner, outer) = if roots[0].norm() <= roots[1].norm() { (roots[0], roots[1]) } else { (roots[1], roots[0]) };
    let m = inner.norm();
    let location = if m < 1.0 - tol_boundary {
        Location::Interior
    } else if m <= 1.0 + tol_boundary {
        Location::Boundary
    } else {
        Location::Exterior
    };
    CardioidInversion { inner_root: inner, outer_root: outer, location }
}

pub fn locate(w: Complex64) -> Location {
    invert_riemann_map(w, DEFAULT_BOUNDARY_TOL).location
}

/// `σ` from a precomputed inversion; boundary points are returned unchanged.
pub(crate) fn sigma_from_inversion(w: Complex64, inv: &CardioidInversion) -> ComplexPoint {
    match inv.location {
        Location::Boundary | Location::Exterior => ComplexPoint::Finite(w),
        Location::Interior => {
            let lam = inv.inner_root;
            if lam.norm() == 0.0 {
                ComplexPoint::Infinity
            } else {
                ComplexPoint::from_complex(riemann_map(1.0 / lam.conj()))
            }
        }
    }
}

/// Schwarz reflection of `♡`, defined on the closed cardioid.
pub fn schwarz_sigma(w: Complex64) -> Result<ComplexPoint> {
    let inv = invert_riemann_map(w, DEFAULT_BOUNDARY_TOL);
    if inv.location == Location::Exterior {
        return Err(Error::Domain(format!("{w} lies outside the closed cardioid")));
    }
    Ok(sigma_from_inversion(w, &inv))
}

/// All `w` in the closed cardioid with `σ(w) = z`, each paired with its inner root `λ`.
pub fn sigma_preimages_with_roots(z: ComplexPoint) -> Vec<(Complex64, Complex64)> {
    let z = match z {
        ComplexPoint::Infinity => return vec![(Complex64::new(0.0, 0.0), Complex64::new(0.0, 0.0))],
        ComplexPoint::Finite(z) => z,
    };
    let roots = solve_quadratic(Complex64::new(-2.0, 0.0), 4.0 * z).roots;
    let mut out = Vec::with_capacity(2);
    for (i, mu) in roots.iter().enumerate() {
        if i == 1 && roots[1] == roots[0] {
            break;
        }
        if mu.norm() >= 1.0 - 1e-12 {
            let lam = 1.0 / mu.conj();
            out.push((riemann_map(lam), lam));
        }
    }
    out
}

/// All `w` in the closed cardioid with `σ(w) = z`: zero, one or two points.
pub fn sigma_preimages(z: ComplexPoint) -> Vec<Complex64> {
    sigma_preimages_with_roots(z).into_iter().map(|(w, _)| w).collect()
}

/// Complex anti-derivative `∂σ/∂w̄` at an interior point with inner root `λ ≠ 0`.
pub(crate) fn sigma_dbar(lambda: Complex64) -> Complex64 {
    let lc = lambda.conj();
    -riemann_map_derivative(1.0 / lc) / (lc * lc * riemann_map_derivative(lambda).conj())
}

/// `|∂σ/∂w̄|` at an interior point `w ≠ 0`.
pub fn sigma_dbar_magnitude(w: Complex64) -> Result<f64> {
    let inv = invert_riemann_map(w, DEFAULT_BOUNDARY_TOL);
    if inv.location != Location::Interior {
        return Err(Error::Domain(format!("{w} is not interior to the cardioid")));
    }
    let lam = inv.inner_root;
    if lam.norm() == 0.0 {
        return Err(Error::Domain("sigma has its pole at 0".into()));
    }
    Ok(riemann_map_derivative(1.0 / lam.conj()).norm() / (lam.norm_sqr() * riemann_map_derivative(lam).norm()))
}
