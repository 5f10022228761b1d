use crate::render::Render;
use image::{ImageBuffer, ImageFormat, Rgb};
use serde_json::{json, Value};
use std::io::Cursor;

/// Binary 8-bit PPM (`P6`); the canonical byte-exact encoding of a render.
pub fn encode_ppm(render: &Render) -> Vec<u8> {
    let mut out = format!("P6\n{} {}\n255\n", render.grid.pixels_x, render.grid.pixels_y).into_bytes();
    out.extend_from_slice(&render.rgb);
    out
}

pub fn encode_png(render: &Render) -> Result<Vec<u8>, String> {
    let img: ImageBuffer<Rgb<u8>, _> =
        ImageBuffer::from_raw(render.grid.pixels_x, render.grid.pixels_y, render.rgb.clone())
            .ok_or("pixel buffer does not match the grid")?;
    let mut out = Cursor::new(Vec::new());
    img.write_to(&mut out, ImageFormat::Png).map_err(|e| e.to_string())?;
    Ok(out.into_inner())
}

pub fn stats_json(render: &Render) -> Value {
    let s = render.stats;
    let g = render.grid;
    json!({
        "grid": {
            "center": [g.center.re, g.center.im],
            "width": g.width,
            "pixels": [g.pixels_x, g.pixels_y],
        },
        "counts": {
            "escaped": s.escaped,
            "basin": s.basin,
            "non_escaping": s.non_escaping,
            "undetermined": s.undetermined,
            "slit": s.slit,
        },
        "undetermined_fraction": s.undetermined_fraction(),
    })
}
