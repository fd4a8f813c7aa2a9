use thiserror::Error;

use super::{Digit, Sign};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Error)]
#[error("depth overflow: base {base} at level {level} exceeds 128-bit capacity (max level {max})")]
pub struct DepthError {
    pub base: u32,
    pub level: u32,
    pub max: u32,
}

/// One axis of a digit map: `t -> (sign * t + delta) / base`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct AxisMap {
    pub base: u32,
    pub sign: Sign,
    pub delta: u32,
}

impl AxisMap {
    pub fn new(base: u32, sign: Sign, delta: u32) -> Self {
        AxisMap { base, sign, delta }
    }

    pub fn apply(&self, t: f64) -> f64 {
        (self.sign.as_f64() * t + f64::from(self.delta)) / f64::from(self.base)
    }

    pub fn slope(&self) -> f64 {
        self.sign.as_f64() / f64::from(self.base)
    }

    /// Grid cell (in units of `1/base`) covered by the image of `[0,1]`.
    pub fn cell(&self) -> u32 {
        match self.sign {
            Sign::Plus => self.delta,
            Sign::Minus => self.delta - 1,
        }
    }

    /// Image of `[0,1]` as `(low, high)`.
    pub fn image(&self) -> (f64, f64) {
        let c = f64::from(self.cell());
        let b = f64::from(self.base);
        (c / b, (c + 1.0) / b)
    }
}

/// The exact interval `[index / base^level, (index + 1) / base^level]` plus
/// the sign of the composed affine slope on this axis.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub struct AxisCell {
    pub base: u32,
    pub level: u32,
    pub index: u128,
    pub orientation: Sign,
}

impl AxisCell {
    pub fn unit(base: u32) -> Self {
        AxisCell {
            base,
            level: 0,
            index: 0,
            orientation: Sign::Plus,
        }
    }

    /// Largest level `k` for which `base^k` fits in a `u128`.
    pub fn max_level(base: u32) -> u32 {
        let b = u128::from(base);
        let mut k = 0u32;
        let mut p: u128 = 1;
        while let Some(next) = p.checked_mul(b) {
            p = next;
            k += 1;
        }
        k
    }

    /// `base^level`, the number of cells at this level.
    pub fn cells(&self) -> u128 {
        u128::from(self.base).pow(self.level)
    }

    /// Child cell selected by grid index `c` of a digit with sign `s`.
    ///
    /// A reversed parent reads its children right to left, so the child
    /// index is `A * b + c` when the parent is orientation preserving and
    /// `A * b + (b - 1 - c)` otherwise.
    pub fn extend(&self, c: u32, s: Sign) -> Result<AxisCell, DepthError> {
        debug_assert!(c < self.base);
        let b = u128::from(self.base);
        let level = self.level + 1;
        b.checked_pow(level).ok_or(DepthError {
            base: self.base,
            level,
            max: AxisCell::max_level(self.base),
        })?;
        let local = match self.orientation {
            Sign::Plus => c,
            Sign::Minus => self.base - 1 - c,
        };
        Ok(AxisCell {
            base: self.base,
            level,
            index: self.index * b + u128::from(local),
            orientation: self.orientation.compose(s),
        })
    }

    /// Nearest-double endpoints of the interval.
    pub fn interval(&self) -> (f64, f64) {
        let den = self.cells() as f64;
        (self.index as f64 / den, (self.index + 1) as f64 / den)
    }

    /// Whether `other` is this cell or one of its descendants.
    pub fn contains(&self, other: &AxisCell) -> bool {
        if other.base != self.base || other.level < self.level {
            return false;
        }
        let scale = u128::from(self.base).pow(other.level - self.level);
        other.index / scale == self.index
    }

    /// Ancestor at `level` (must not exceed this cell's level).
    pub fn ancestor_index(&self, level: u32) -> u128 {
        assert!(level <= self.level);
        self.index / u128::from(self.base).pow(self.level - level)
    }
}

/// The image of the unit square under a finite composition of digit maps.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CylinderRect {
    pub x: AxisCell,
    pub y: AxisCell,
    pub word: Vec<usize>,
}

impl CylinderRect {
    pub fn unit(n: u32, m: u32) -> Self {
        CylinderRect {
            x: AxisCell::unit(n),
            y: AxisCell::unit(m),
            word: Vec::new(),
        }
    }

    pub fn level(&self) -> u32 {
        self.x.level
    }

    pub fn extend(&self, index: usize, d: &Digit) -> Result<CylinderRect, DepthError> {
        let x = self.x.extend(d.i, d.sx)?;
        let y = self.y.extend(d.j, d.sy)?;
        let mut word = Vec::with_capacity(self.word.len() + 1);
        word.extend_from_slice(&self.word);
        word.push(index);
        Ok(CylinderRect { x, y, word })
    }

    /// Exact denominators of width and height: `(n^k, m^k)`.
    pub fn extent_denominators(&self) -> (u128, u128) {
        (self.x.cells(), self.y.cells())
    }

    pub fn bounds(&self) -> ((f64, f64), (f64, f64)) {
        (self.x.interval(), self.y.interval())
    }

    pub fn contains(&self, other: &CylinderRect) -> bool {
        self.x.contains(&other.x) && self.y.contains(&other.y)
    }
}
