//! Per-pixel classification of the deltoid plane, the dynamical planes of `F_a`
//! and the parameter plane, evaluated in horizontal bands.

use crate::grid::GridSpec;
use num_complex::Complex64;
use rayon::prelude::*;
use schwarz_core::cnc::{build_cnc, classify_orbit, in_connectedness_locus, CncMap, Connectedness, OrbitVerdict};
use schwarz_core::deltoid::{classify_deltoid_orbit, DeltoidVerdict, DEFAULT_ESCAPE_RADIUS};
use schwarz_core::{ComplexPoint, Error};
use std::str::FromStr;

const BAND_ROWS: usize = 8;

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum RenderKind {
    Deltoid,
    CncDynamical(Complex64),
    CncParameter,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Palette {
    #[default]
    Classic,
    Gray,
}

impl FromStr for Palette {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "classic" => Ok(Palette::Classic),
            "gray" | "grey" => Ok(Palette::Gray),
            _ => Err(format!("unknown palette {s:?} (expected classic or gray)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RenderJob {
    pub kind: RenderKind,
    pub grid: GridSpec,
    pub max_iter: usize,
    pub palette: Palette,
}

/// Verdict of one pixel.
///
/// `Rank(n)` is the escape rank for the dynamical planes, the tiling rank in the
/// deltoid plane and the depth in the parameter plane. `NonEscaping` marks the
/// non-escaping set, or the connectedness locus in the parameter plane.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum PixelClass {
    Rank(u32),
    Basin,
    NonEscaping,
    Undetermined,
    Slit,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct RenderStats {
    pub escaped: usize,
    pub basin: usize,
    pub non_escaping: usize,
    pub undetermined: usize,
    pub slit: usize,
}

impl RenderStats {
    fn add(&mut self, class: PixelClass) {
        match class {
            PixelClass::Rank(_) => self.escaped += 1,
            PixelClass::Basin => self.basin += 1,
            PixelClass::NonEscaping => self.non_escaping += 1,
            PixelClass::Undetermined => self.undetermined += 1,
            PixelClass::Slit => self.slit += 1,
        }
    }

    pub fn total(&self) -> usize {
        self.escaped + self.basin + self.non_escaping + self.undetermined + self.slit
    }

    pub fn undetermined_fraction(&self) -> f64 {
        self.undetermined as f64 / self.total().max(1) as f64
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Render {
    pub grid: GridSpec,
    /// Row-major, row 0 at the top.
    pub classes: Vec<PixelClass>,
    /// Packed 8-bit RGB, same order as `classes`.
    pub rgb: Vec<u8>,
    pub stats: RenderStats,
}

impl Render {
    pub fn class_at(&self, col: u32, row: u32) -> PixelClass {
        self.classes[row as usize * self.grid.pixels_x as usize + col as usize]
    }
}

pub fn classify_dynamical(map: &CncMap, z: Complex64, max_iter: usize) -> PixelClass {
    match classify_orbit(map, ComplexPoint::Finite(z), max_iter) {
        OrbitVerdict::Escaped { rank, .. } => PixelClass::Rank(rank as u32),
        OrbitVerdict::NonEscaping { .. } => PixelClass::NonEscaping,
        OrbitVerdict::Undetermined => PixelClass::Undetermined,
    }
}

pub fn classify_parameter(a: Complex64, max_iter: usize) -> PixelClass {
    match build_cnc(a) {
        Err(Error::Slit { .. }) => PixelClass::Slit,
        Err(_) => PixelClass::Undetermined,
        Ok(map) => match in_connectedness_locus(&map, max_iter) {
            Connectedness::In => PixelClass::NonEscaping,
            Connectedness::Out { depth } => PixelClass::Rank(depth as u32),
            Connectedness::Undetermined => PixelClass::Undetermined,
        },
    }
}

pub fn classify_deltoid(z: Complex64, max_iter: usize) -> PixelClass {
    match classify_deltoid_orbit(z, max_iter, DEFAULT_ESCAPE_RADIUS) {
        DeltoidVerdict::Tiling { rank } => PixelClass::Rank(rank as u32),
        DeltoidVerdict::BasinInfinity { .. } => PixelClass::Basin,
        DeltoidVerdict::Undetermined => PixelClass::Undetermined,
    }
}

pub fn color(palette: Palette, class: PixelClass) -> [u8; 3] {
    match (palette, class) {
        (_, PixelClass::Slit) => [200, 0, 0],
        (_, PixelClass::NonEscaping) => [0, 0, 0],
        (Palette::Classic, PixelClass::Undetermined) => [128, 128, 128],
        (Palette::Classic, PixelClass::Basin) => [20, 30, 90],
        (Palette::Classic, PixelClass::Rank(n)) => {
            const BANDS: [[u8; 3]; 6] =
                [[255, 244, 214], [250, 204, 120], [236, 150, 70], [200, 96, 60], [140, 60, 90], [80, 50, 120]];
            BANDS[(n as usize) % BANDS.len()]
        }
        (Palette::Gray, PixelClass::Undetermined) => [96, 96, 96],
        (Palette::Gray, PixelClass::Basin) => [32, 32, 32],
        (Palette::Gray, PixelClass::Rank(n)) => {
            let v = 255 - (n.min(12) * 12) as u8;
            [v, v, v]
        }
    }
}

/// Evaluates every pixel of the job.
///
/// Rows are split into bands that are evaluated concurrently and write to disjoint
/// parts of the class buffer, so the output does not depend on the thread count.
pub fn render(job: &RenderJob) -> Result<Render, Error> {
    let map = match job.kind {
        RenderKind::CncDynamical(a) => Some(build_cnc(a)?),
        _ => None,
    };
    let grid = job.grid;
    let max_iter = job.max_iter.max(1);
    let cols = grid.pixels_x as usize;
    let mut classes = vec![PixelClass::Undetermined; grid.len()];
    classes.par_chunks_mut(cols * BAND_ROWS).enumerate().for_each(|(band, chunk)| {
        for (k, slot) in chunk.iter_mut().enumerate() {
            let row = (band * BAND_ROWS + k / cols) as u32;
            let z = grid.pixel_center((k % cols) as u32, row);
            *slot = match (job.kind, &map) {
                (RenderKind::Deltoid, _) => classify_deltoid(z, max_iter),
                (RenderKind::CncDynamical(_), Some(m)) => classify_dynamical(m, z, max_iter),
                (RenderKind::CncParameter, _) => classify_parameter(z, max_iter),
                (RenderKind::CncDynamical(_), None) => unreachable!("map is built above"),
            };
        }
    });
    let mut stats = RenderStats::default();
    let mut rgb = Vec::with_capacity(3 * classes.len());
    for &class in &classes {
        stats.add(class);
        rgb.extend_from_slice(&color(job.palette, class));
    }
    Ok(Render { grid, classes, rgb, stats })
}
