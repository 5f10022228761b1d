use num_complex::Complex64;

pub const MIN_PIXELS: u32 = 16;

/// A rectangle of the plane sampled on a grid of square pixels.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridSpec {
    pub center: Complex64,
    /// Horizontal extent; the vertical extent follows from the pixel counts.
    pub width: f64,
    pub pixels_x: u32,
    pub pixels_y: u32,
}

impl GridSpec {
    pub fn new(center: Complex64, width: f64, pixels_x: u32, pixels_y: u32) -> Result<Self, String> {
        if !(center.re.is_finite() && center.im.is_finite()) {
            return Err("grid center must be finite".into());
        }
        if !(width.is_finite() && width > 0.0) {
            return Err(format!("grid width must be positive, got {width}"));
        }
        if pixels_x < MIN_PIXELS || pixels_y < MIN_PIXELS {
            return Err(format!("grid needs at least {MIN_PIXELS} pixels per side, got {pixels_x}x{pixels_y}"));
        }
        Ok(GridSpec { center, width, pixels_x, pixels_y })
    }

    pub fn pixel_width(&self) -> f64 {
        self.width / self.pixels_x as f64
    }

    pub fn height(&self) -> f64 {
        self.pixel_width() * self.pixels_y as f64
    }

    pub fn len(&self) -> usize {
        self.pixels_x as usize * self.pixels_y as usize
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Center of pixel `(col, row)`, row 0 at the top.
    pub fn pixel_center(&self, col: u32, row: u32) -> Complex64 {
        let h = self.pixel_width();
        Complex64::new(
            self.center.re - 0.5 * self.width + (col as f64 + 0.5) * h,
            self.center.im + 0.5 * self.height() - (row as f64 + 0.5) * h,
        )
    }

    /// Pixel containing `z`, if it lies in the grid.
    pub fn pixel_of(&self, z: Complex64) -> Option<(u32, u32)> {
        let h = self.pixel_width();
        let col = ((z.re - (self.center.re - 0.5 * self.width)) / h).floor();
        let row = (((self.center.im + 0.5 * self.height()) - z.im) / h).floor();
        let inside = col >= 0.0 && row >= 0.0 && col < self.pixels_x as f64 && row < self.pixels_y as f64;
        inside.then_some((col as u32, row as u32))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rejects_small_or_degenerate_grids() {
        let z = Complex64::new(0.0, 0.0);
        assert!(GridSpec::new(z, 1.0, 15, 100).is_err());
        assert!(GridSpec::new(z, 0.0, 100, 100).is_err());
        assert!(GridSpec::new(z, f64::NAN, 100, 100).is_err());
        assert!(GridSpec::new(z, 1.0, 16, 16).is_ok());
    }

    #[test]
    fn pixel_centers_round_trip() {
        let g = GridSpec::new(Complex64::new(-1.0, 0.5), 4.0, 40, 20).unwrap();
        assert_eq!(g.height(), 2.0);
        let p = g.pixel_center(0, 0);
        assert!((p - Complex64::new(-2.95, 1.45)).norm() < 1e-12);
        for (c, r) in [(0, 0), (39, 19), (17, 3)] {
            assert_eq!(g.pixel_of(g.pixel_center(c, r)), Some((c, r)));
        }
        assert_eq!(g.pixel_of(Complex64::new(5.0, 0.0)), None);
    }
}
