//! Carpet descriptions: the grid, the digit set and the per-digit
//! reflection signatures that together define a reflected
//! Bedford-McMullen iterated function system.
//!
//! Each digit `d = (i, j)` with signature `(sx, sy)` acts on the unit square as
//!
//! ```text
//! (x, y) -> ((sx * x + dx) / n, (sy * y + dy) / m)
//! ```
//!
//! where `dx = i` for `sx = +1` and `dx = i + 1` for `sx = -1` (likewise for
//! `dy`), so the image of `[0,1]^2` is always the grid cell `R_{i,j}`.

mod cell;
mod sample;

pub use cell::{AxisCell, AxisMap, CylinderRect, DepthError};
pub use sample::{sample_points, SampleError, SampleSet, DEFAULT_DEPTH, SAMPLE_BLOCK};

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Orientation of one axis of a digit map.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub fn from_i64(v: i64) -> Option<Sign> {
        match v {
            1 => Some(Sign::Plus),
            -1 => Some(Sign::Minus),
            _ => None,
        }
    }

    pub fn as_i8(self) -> i8 {
        match self {
            Sign::Plus => 1,
            Sign::Minus => -1,
        }
    }

    pub fn as_f64(self) -> f64 {
        f64::from(self.as_i8())
    }

    pub fn is_plus(self) -> bool {
        self == Sign::Plus
    }

    /// Product of two signs, i.e. the orientation of a composition.
    pub fn compose(self, other: Sign) -> Sign {
        if self == other {
            Sign::Plus
        } else {
            Sign::Minus
        }
    }
}

impl fmt::Display for Sign {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Sign::Plus => "+",
            Sign::Minus => "-",
        })
    }
}

/// A chosen grid cell together with its reflection signature.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct Digit {
    pub i: u32,
    pub j: u32,
    pub sx: Sign,
    pub sy: Sign,
}

impl Digit {
    pub fn new(i: u32, j: u32, sx: Sign, sy: Sign) -> Self {
        Digit { i, j, sx, sy }
    }

    /// Orientation-preserving digit.
    pub fn plain(i: u32, j: u32) -> Self {
        Digit::new(i, j, Sign::Plus, Sign::Plus)
    }

    pub fn delta_x(&self) -> u32 {
        match self.sx {
            Sign::Plus => self.i,
            Sign::Minus => self.i + 1,
        }
    }

    pub fn delta_y(&self) -> u32 {
        match self.sy {
            Sign::Plus => self.j,
            Sign::Minus => self.j + 1,
        }
    }

    pub fn cell(&self) -> (u32, u32) {
        (self.i, self.j)
    }
}

impl fmt::Display for Digit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({},{},{},{})", self.i, self.j, self.sx, self.sy)
    }
}

/// Unvalidated digit data, as read from a document or built by hand.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawDigit {
    pub i: i64,
    pub j: i64,
    pub sx: i64,
    pub sy: i64,
}

impl RawDigit {
    pub fn new(i: i64, j: i64, sx: i64, sy: i64) -> Self {
        RawDigit { i, j, sx, sy }
    }
}

/// Unvalidated carpet description.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct RawSpec {
    pub n: i64,
    pub m: i64,
    pub digits: Vec<RawDigit>,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SpecError {
    #[error("grid must satisfy 1 < m < n (got n={n}, m={m})")]
    GridOrder { n: i64, m: i64 },
    #[error("grid too large: n={n} exceeds {max}")]
    GridTooLarge { n: i64, max: i64 },
    #[error("digit set needs at least 2 digits (got {0})")]
    TooFewDigits(usize),
    #[error("digit {index}: field {field}={value} outside [0, {bound})")]
    OutOfRange {
        index: usize,
        field: &'static str,
        value: i64,
        bound: i64,
    },
    #[error("digit {index}: field {field}={value} is not a sign (expected -1 or +1)")]
    BadSign {
        index: usize,
        field: &'static str,
        value: i64,
    },
    #[error("digit {index}: cell ({i},{j}) duplicates digit {first}; cells must be distinct")]
    Duplicate {
        index: usize,
        first: usize,
        i: i64,
        j: i64,
    },
}

/// Largest accepted grid width. Keeps `u32` cell indices and the exact
/// cylinder arithmetic comfortably in range.
pub const MAX_GRID: i64 = 1 << 16;

/// A validated reflected carpet: `1 < m < n`, at least two digits, and
/// pairwise distinct cells (which gives strong separation).
///
/// Digit order is preserved from the input and is the canonical index
/// order for weight vectors and words.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CarpetSpec {
    n: u32,
    m: u32,
    digits: Vec<Digit>,
}

impl CarpetSpec {
    pub fn new(n: u32, m: u32, digits: Vec<Digit>) -> Result<Self, SpecError> {
        let raw = RawSpec {
            n: i64::from(n),
            m: i64::from(m),
            digits: digits
                .iter()
                .map(|d| {
                    RawDigit::new(
                        i64::from(d.i),
                        i64::from(d.j),
                        i64::from(d.sx.as_i8()),
                        i64::from(d.sy.as_i8()),
                    )
                })
                .collect(),
        };
        validate_spec(&raw)
    }

    /// Every cell of the `n x m` grid, orientation preserving, in row-major
    /// order (row `j` outer, column `i` inner).
    pub fn full_grid(n: u32, m: u32) -> Result<Self, SpecError> {
        let digits = (0..m)
            .flat_map(|j| (0..n).map(move |i| Digit::plain(i, j)))
            .collect();
        CarpetSpec::new(n, m, digits)
    }

    pub fn n(&self) -> u32 {
        self.n
    }

    pub fn m(&self) -> u32 {
        self.m
    }

    pub fn digits(&self) -> &[Digit] {
        &self.digits
    }

    pub fn len(&self) -> usize {
        self.digits.len()
    }

    pub fn is_empty(&self) -> bool {
        self.digits.is_empty()
    }

    pub fn digit(&self, index: usize) -> &Digit {
        &self.digits[index]
    }

    /// Same cells, new signatures. `signs` must have one entry per digit.
    pub fn with_signatures(&self, signs: &[(Sign, Sign)]) -> CarpetSpec {
        assert_eq!(signs.len(), self.digits.len(), "one signature per digit");
        let digits = self
            .digits
            .iter()
            .zip(signs)
            .map(|(d, &(sx, sy))| Digit::new(d.i, d.j, sx, sy))
            .collect();
        CarpetSpec {
            n: self.n,
            m: self.m,
            digits,
        }
    }

    /// Same cells with every signature reset to `(+1, +1)`.
    pub fn unsigned(&self) -> CarpetSpec {
        self.with_signatures(&vec![(Sign::Plus, Sign::Plus); self.digits.len()])
    }

    pub fn signatures(&self) -> Vec<(Sign, Sign)> {
        self.digits.iter().map(|d| (d.sx, d.sy)).collect()
    }

    /// The two axis maps of digit `index`.
    pub fn digit_axis_maps(&self, index: usize) -> (AxisMap, AxisMap) {
        let d = &self.digits[index];
        (
            AxisMap::new(self.n, d.sx, d.delta_x()),
            AxisMap::new(self.m, d.sy, d.delta_y()),
        )
    }

    /// Applies digit `index` to a point of the unit square.
    pub fn apply(&self, index: usize, (x, y): (f64, f64)) -> (f64, f64) {
        let (fx, fy) = self.digit_axis_maps(index);
        (fx.apply(x), fy.apply(y))
    }

    /// Extends `parent` by digit `index`.
    pub fn extend_cylinder(
        &self,
        parent: &CylinderRect,
        index: usize,
    ) -> Result<CylinderRect, DepthError> {
        parent.extend(index, &self.digits[index])
    }

    /// The cylinder `phi_{w1} o ... o phi_{wk}([0,1]^2)` of a word of digit
    /// indices.
    pub fn cylinder_of_word(&self, word: &[usize]) -> Result<CylinderRect, DepthError> {
        word.iter()
            .try_fold(CylinderRect::unit(self.n, self.m), |cyl, &d| {
                self.extend_cylinder(&cyl, d)
            })
    }

    /// Deepest word length whose cylinders are exactly representable.
    pub fn max_depth(&self) -> u32 {
        AxisCell::max_level(self.n).min(AxisCell::max_level(self.m))
    }

    /// Index of the digit occupying cell `(i, j)`, if any.
    pub fn find_cell(&self, i: u32, j: u32) -> Option<usize> {
        self.digits.iter().position(|d| d.i == i && d.j == j)
    }
}

impl fmt::Display for CarpetSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "n={} m={} D={{", self.n, self.m)?;
        for (k, d) in self.digits.iter().enumerate() {
            if k > 0 {
                f.write_str(",")?;
            }
            write!(f, "{d}")?;
        }
        f.write_str("}")
    }
}

/// Checks raw carpet data against the grid, range, sign and distinctness
/// rules. Digit order is preserved.
pub fn validate_spec(raw: &RawSpec) -> Result<CarpetSpec, SpecError> {
    if raw.m <= 1 || raw.m >= raw.n {
        return Err(SpecError::GridOrder { n: raw.n, m: raw.m });
    }
    if raw.n > MAX_GRID {
        return Err(SpecError::GridTooLarge {
            n: raw.n,
            max: MAX_GRID,
        });
    }
    if raw.digits.len() < 2 {
        return Err(SpecError::TooFewDigits(raw.digits.len()));
    }

    let mut seen = std::collections::HashMap::with_capacity(raw.digits.len());
    let mut digits = Vec::with_capacity(raw.digits.len());
    for (index, d) in raw.digits.iter().enumerate() {
        if !(0..raw.n).contains(&d.i) {
            return Err(SpecError::OutOfRange {
                index,
                field: "i",
                value: d.i,
                bound: raw.n,
            });
        }
        if !(0..raw.m).contains(&d.j) {
            return Err(SpecError::OutOfRange {
                index,
                field: "j",
                value: d.j,
                bound: raw.m,
            });
        }
        let sx = Sign::from_i64(d.sx).ok_or(SpecError::BadSign {
            index,
            field: "sx",
            value: d.sx,
        })?;
        let sy = Sign::from_i64(d.sy).ok_or(SpecError::BadSign {
            index,
            field: "sy",
            value: d.sy,
        })?;
        if let Some(&first) = seen.get(&(d.i, d.j)) {
            return Err(SpecError::Duplicate {
                index,
                first,
                i: d.i,
                j: d.j,
            });
        }
        seen.insert((d.i, d.j), index);
        digits.push(Digit::new(d.i as u32, d.j as u32, sx, sy));
    }

    Ok(CarpetSpec {
        n: raw.n as u32,
        m: raw.m as u32,
        digits,
    })
}

/// The six-digit `4 x 3` carpet with mixed reflections used throughout the
/// tests and documentation.
pub fn reference_carpet() -> CarpetSpec {
    use Sign::{Minus, Plus};
    CarpetSpec::new(
        4,
        3,
        vec![
            Digit::new(0, 0, Plus, Plus),
            Digit::new(3, 0, Plus, Plus),
            Digit::new(1, 1, Minus, Plus),
            Digit::new(0, 2, Plus, Minus),
            Digit::new(2, 2, Minus, Minus),
            Digit::new(3, 2, Plus, Minus),
        ],
    )
    .expect("reference carpet is valid")
}
