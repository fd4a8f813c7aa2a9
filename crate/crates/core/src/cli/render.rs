//! Grayscale rasters of carpet approximations, written as binary PGM.
//!
//! A pixel is painted when its centre lies in a cylinder (closed intervals).
//! Image row 0 is the top of the unit square.

use std::io::Write;

use thiserror::Error;

use crate::carpet::{AxisCell, CarpetSpec, Sign};

pub const BACKGROUND: u8 = 255;
pub const FOREGROUND: u8 = 0;
pub const MIN_SIZE: u32 = 16;

/// The "F" glyph, top row first, on a 3 x 5 block grid.
const GLYPH: [&[u8; 3]; 5] = [b"###", b"#..", b"##.", b"#..", b"#.."];
const GLYPH_MARGIN: f64 = 0.125;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum RenderError {
    #[error("image size {0} below the minimum of 16 pixels")]
    Size(u32),
    #[error("level {level}: {words} cylinders exceed the enumeration budget of {budget}")]
    Budget {
        level: u32,
        words: String,
        budget: u64,
    },
    #[error("level {0} is too deep for exact pixel arithmetic at this size")]
    Depth(u32),
    #[error("malformed PGM: {0}")]
    Pgm(&'static str),
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RasterImage {
    pub width: u32,
    pub height: u32,
    /// Row-major, top row first.
    pub pixels: Vec<u8>,
    pub source: String,
    pub level: u32,
    pub glyph: bool,
}

impl RasterImage {
    pub fn blank(width: u32, height: u32) -> Self {
        RasterImage {
            width,
            height,
            pixels: vec![BACKGROUND; (width as usize) * (height as usize)],
            source: String::new(),
            level: 0,
            glyph: false,
        }
    }

    pub fn get(&self, col: u32, row: u32) -> u8 {
        self.pixels[(row as usize) * (self.width as usize) + col as usize]
    }

    fn set(&mut self, col: u32, row: u32, v: u8) {
        let w = self.width as usize;
        self.pixels[(row as usize) * w + col as usize] = v;
    }

    pub fn painted(&self, col: u32, row: u32) -> bool {
        self.get(col, row) == FOREGROUND
    }

    pub fn painted_count(&self) -> usize {
        self.pixels.iter().filter(|&&v| v == FOREGROUND).count()
    }

    /// Copy of the sub-image with top-left corner `(col, row)`.
    pub fn crop(&self, col: u32, row: u32, width: u32, height: u32) -> RasterImage {
        let mut out = RasterImage::blank(width, height);
        for r in 0..height {
            for c in 0..width {
                out.set(c, r, self.get(col + c, row + r));
            }
        }
        out
    }

    pub fn mirror_horizontal(&self) -> RasterImage {
        let mut out = self.clone();
        for r in 0..self.height {
            for c in 0..self.width {
                out.set(c, r, self.get(self.width - 1 - c, r));
            }
        }
        out
    }

    pub fn write_pgm<W: Write>(&self, mut w: W) -> std::io::Result<()> {
        write!(w, "P5\n{} {}\n255\n", self.width, self.height)?;
        w.write_all(&self.pixels)
    }

    pub fn to_pgm(&self) -> Vec<u8> {
        let mut buf = Vec::with_capacity(self.pixels.len() + 32);
        self.write_pgm(&mut buf).expect("writing to memory");
        buf
    }

    /// Parses a binary PGM with maxval 255 (no comments).
    pub fn from_pgm(bytes: &[u8]) -> Result<RasterImage, RenderError> {
        let mut fields = Vec::new();
        let mut pos = 0;
        while fields.len() < 4 {
            while pos < bytes.len() && bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            let start = pos;
            while pos < bytes.len() && !bytes[pos].is_ascii_whitespace() {
                pos += 1;
            }
            if start == pos {
                return Err(RenderError::Pgm("truncated header"));
            }
            fields.push(
                std::str::from_utf8(&bytes[start..pos]).map_err(|_| RenderError::Pgm("header"))?,
            );
        }
        if fields[0] != "P5" {
            return Err(RenderError::Pgm("not a P5 file"));
        }
        let parse = |s: &str| s.parse::<u32>().map_err(|_| RenderError::Pgm("bad number"));
        let (width, height, maxval) = (parse(fields[1])?, parse(fields[2])?, parse(fields[3])?);
        if maxval != 255 {
            return Err(RenderError::Pgm("maxval must be 255"));
        }
        let body = &bytes[pos + 1..];
        if body.len() != (width as usize) * (height as usize) {
            return Err(RenderError::Pgm("pixel count mismatch"));
        }
        let mut img = RasterImage::blank(width, height);
        img.pixels.copy_from_slice(body);
        Ok(img)
    }
}

/// Range of pixel indices `p` whose centres `(2p + 1) / (2 size)` lie in
/// `[index / den, (index + 1) / den]`.
fn pixel_span(index: u128, den: u128, size: u32) -> Result<Option<(u32, u32)>, ()> {
    let s2 = 2 * i128::from(size);
    let den = i128::try_from(den).map_err(|_| ())?;
    let a = i128::try_from(index).map_err(|_| ())?;
    let lo_num = s2.checked_mul(a).ok_or(())? - den;
    let hi_num = s2.checked_mul(a + 1).ok_or(())? - den;
    let two_den = 2 * den;
    let lo = lo_num.div_euclid(two_den) + i128::from(lo_num.rem_euclid(two_den) != 0);
    let hi = hi_num.div_euclid(two_den);
    let lo = lo.max(0);
    let hi = hi.min(i128::from(size) - 1);
    if lo > hi {
        return Ok(None);
    }
    Ok(Some((lo as u32, hi as u32)))
}

/// Whether local cylinder coordinates `(u, v)` fall on the glyph.
pub fn glyph_hit(u: f64, v: f64) -> bool {
    let span = 1.0 - 2.0 * GLYPH_MARGIN;
    let a = ((u - GLYPH_MARGIN) / span * 3.0).floor();
    let b = ((v - GLYPH_MARGIN) / span * 5.0).floor();
    if !(0.0..3.0).contains(&a) || !(0.0..5.0).contains(&b) {
        return false;
    }
    GLYPH[4 - b as usize][a as usize] == b'#'
}

/// Pulls a point back to the unit square through the composed map of an
/// axis cell: `t -> (A + t) / b^k`, or `(A + 1 - t) / b^k` when reversed.
fn local(cell: &AxisCell, t: f64) -> f64 {
    let u = t * cell.cells() as f64 - cell.index as f64;
    match cell.orientation {
        Sign::Plus => u,
        Sign::Minus => 1.0 - u,
    }
}

/// The glyph as seen through a cell with signature `(sx, sy)`, rasterised
/// at `width x height`.
pub fn glyph_cell(sx: Sign, sy: Sign, width: u32, height: u32) -> RasterImage {
    let mut img = RasterImage::blank(width, height);
    let x = AxisCell {
        base: 1,
        level: 0,
        index: 0,
        orientation: sx,
    };
    let y = AxisCell {
        base: 1,
        level: 0,
        index: 0,
        orientation: sy,
    };
    for row in 0..height {
        let yc = 1.0 - (f64::from(row) + 0.5) / f64::from(height);
        for col in 0..width {
            let xc = (f64::from(col) + 0.5) / f64::from(width);
            if glyph_hit(local(&x, xc), local(&y, yc)) {
                img.set(col, row, FOREGROUND);
            }
        }
    }
    img
}

fn enumerate_cylinders(
    spec: &CarpetSpec,
    level: u32,
    budget: u64,
) -> Result<Vec<(AxisCell, AxisCell)>, RenderError> {
    let words = (spec.len() as u64).checked_pow(level);
    match words {
        Some(w) if w <= budget => {}
        _ => {
            return Err(RenderError::Budget {
                level,
                words: words.map_or(format!("{}^{level}", spec.len()), |w| w.to_string()),
                budget,
            })
        }
    }
    if level > spec.max_depth() {
        return Err(RenderError::Depth(level));
    }
    let mut frontier = vec![(AxisCell::unit(spec.n()), AxisCell::unit(spec.m()))];
    for _ in 0..level {
        let mut next = Vec::with_capacity(frontier.len() * spec.len());
        for (x, y) in &frontier {
            for d in spec.digits() {
                next.push((
                    x.extend(d.i, d.sx).expect("depth checked"),
                    y.extend(d.j, d.sy).expect("depth checked"),
                ));
            }
        }
        frontier = next;
    }
    Ok(frontier)
}

/// Square raster of the level-`level` cylinders. With `glyph`, each
/// cylinder carries an "F" drawn through its composed map instead of being
/// filled, so reflections are visible.
pub fn render_raster(
    spec: &CarpetSpec,
    level: u32,
    size: u32,
    glyph: bool,
    budget: u64,
) -> Result<RasterImage, RenderError> {
    if size < MIN_SIZE {
        return Err(RenderError::Size(size));
    }
    let cylinders = enumerate_cylinders(spec, level, budget)?;
    let mut img = RasterImage::blank(size, size);
    img.source = spec.to_string();
    img.level = level;
    img.glyph = glyph;
    for (x, y) in &cylinders {
        let cols = pixel_span(x.index, x.cells(), size).map_err(|_| RenderError::Depth(level))?;
        // rows are counted from the bottom here and flipped on write
        let rows = pixel_span(y.index, y.cells(), size).map_err(|_| RenderError::Depth(level))?;
        let (Some((c0, c1)), Some((r0, r1))) = (cols, rows) else {
            continue;
        };
        for rb in r0..=r1 {
            let row = size - 1 - rb;
            let yc = (f64::from(rb) + 0.5) / f64::from(size);
            for col in c0..=c1 {
                let paint = if glyph {
                    let xc = (f64::from(col) + 0.5) / f64::from(size);
                    glyph_hit(local(x, xc), local(y, yc))
                } else {
                    true
                };
                if paint {
                    img.set(col, row, FOREGROUND);
                }
            }
        }
    }
    Ok(img)
}
