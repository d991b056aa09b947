//! Cubes, dyadic grids and the shifted grids `D^t`, `t ∈ {0, 1/3}^n`.
//!
//! Cubes are half-open: `[corner_i, corner_i + side)` on every axis. A cube of
//! the grid `D^t` at level `k` has side `2^-k` and corner
//! `2^-k (m + (-1)^k t)` for an integer vector `m`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Axis-aligned half-open cube in dimension 1 or 2.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Cube {
    dim: usize,
    corner: [f64; 2],
    side: f64,
}

impl Cube {
    pub fn new(corner: &[f64], side: f64) -> Result<Self> {
        let dim = corner.len();
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!("dimension {dim} not supported")));
        }
        if !(side > 0.0) || !side.is_finite() || corner.iter().any(|c| !c.is_finite()) {
            return Err(Error::DegenerateCube);
        }
        let mut c = [0.0; 2];
        c[..dim].copy_from_slice(corner);
        Ok(Self {
            dim,
            corner: c,
            side,
        })
    }

    /// `[a, a + side)`.
    pub fn interval(a: f64, side: f64) -> Self {
        Self::new(&[a], side).expect("interval side must be positive")
    }

    /// `[x, x + side) × [y, y + side)`.
    pub fn square(x: f64, y: f64, side: f64) -> Self {
        Self::new(&[x, y], side).expect("square side must be positive")
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn corner(&self) -> &[f64] {
        &self.corner[..self.dim]
    }

    pub fn side(&self) -> f64 {
        self.side
    }

    pub fn lower(&self, axis: usize) -> f64 {
        self.corner[axis]
    }

    pub fn upper(&self, axis: usize) -> f64 {
        self.corner[axis] + self.side
    }

    pub fn measure(&self) -> f64 {
        self.side.powi(self.dim as i32)
    }

    pub fn center(&self) -> [f64; 2] {
        let mut c = [0.0; 2];
        for (axis, v) in c.iter_mut().enumerate().take(self.dim) {
            *v = self.corner[axis] + 0.5 * self.side;
        }
        c
    }

    /// Concentric cube with side `factor * side`.
    pub fn dilate(&self, factor: f64) -> Self {
        assert!(factor > 0.0, "dilation factor must be positive");
        let mut corner = self.corner;
        let shift = 0.5 * (factor - 1.0) * self.side;
        for c in corner.iter_mut().take(self.dim) {
            *c -= shift;
        }
        Self {
            dim: self.dim,
            corner,
            side: factor * self.side,
        }
    }

    pub fn contains_point(&self, x: &[f64]) -> bool {
        (0..self.dim).all(|i| self.lower(i) <= x[i] && x[i] < self.upper(i))
    }

    /// Half-open inclusion `other ⊆ self`.
    pub fn contains(&self, other: &Cube) -> bool {
        self.dim == other.dim
            && (0..self.dim)
                .all(|i| self.lower(i) <= other.lower(i) && other.upper(i) <= self.upper(i))
    }

    /// True when the interiors overlap.
    pub fn intersects(&self, other: &Cube) -> bool {
        self.dim == other.dim
            && (0..self.dim)
                .all(|i| self.lower(i) < other.upper(i) && other.lower(i) < self.upper(i))
    }

    /// Total order used for deterministic tie breaks: corner lexicographic,
    /// then side.
    pub fn order_key(&self) -> [f64; 3] {
        [self.corner[0], self.corner[1], self.side]
    }

    pub fn cmp_key(&self, other: &Cube) -> std::cmp::Ordering {
        let a = self.order_key();
        let b = other.order_key();
        a[0].total_cmp(&b[0])
            .then(a[1].total_cmp(&b[1]))
            .then(a[2].total_cmp(&b[2]))
    }
}

impl fmt::Display for Cube {
    /// `corner… side` as decimals separated by spaces.
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for c in self.corner() {
            write!(f, "{c} ")?;
        }
        write!(f, "{}", self.side)
    }
}

/// One of the `2^n` dyadic grids `D^t` with `t ∈ {0, 1/3}^n`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct DyadicGrid {
    dim: usize,
    /// `true` on an axis means a shift of 1/3 along it.
    shifted: [bool; 2],
}

impl DyadicGrid {
    pub fn standard(dim: usize) -> Self {
        Self {
            dim,
            shifted: [false; 2],
        }
    }

    pub fn shifted(dim: usize, shifted: [bool; 2]) -> Self {
        let mut s = shifted;
        if dim == 1 {
            s[1] = false;
        }
        Self { dim, shifted: s }
    }

    /// All `2^n` shifts, lexicographic in `t` with `0 < 1/3`.
    pub fn all(dim: usize) -> Vec<Self> {
        match dim {
            1 => vec![
                Self::shifted(1, [false, false]),
                Self::shifted(1, [true, false]),
            ],
            _ => vec![
                Self::shifted(2, [false, false]),
                Self::shifted(2, [false, true]),
                Self::shifted(2, [true, false]),
                Self::shifted(2, [true, true]),
            ],
        }
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    /// The shift vector `t`.
    pub fn shift(&self) -> Vec<f64> {
        self.shifted[..self.dim]
            .iter()
            .map(|&s| if s { 1.0 / 3.0 } else { 0.0 })
            .collect()
    }

    fn offset(&self, axis: usize, level: i32) -> f64 {
        if !self.shifted[axis] {
            0.0
        } else if level.rem_euclid(2) == 0 {
            1.0 / 3.0
        } else {
            -1.0 / 3.0
        }
    }

    /// Cube `2^-k ([0,1)^n + m + (-1)^k t)`.
    pub fn cube(&self, level: i32, index: [i64; 2]) -> Cube {
        let side = side_of(level);
        let mut corner = [0.0; 2];
        for (axis, c) in corner.iter_mut().enumerate().take(self.dim) {
            *c = side * (index[axis] as f64 + self.offset(axis, level));
        }
        Cube {
            dim: self.dim,
            corner,
            side,
        }
    }

    /// Index of the level-`k` cube containing the point `x`.
    pub fn index_containing(&self, level: i32, x: &[f64]) -> [i64; 2] {
        let scale = 2f64.powi(level);
        let mut m = [0i64; 2];
        for (axis, v) in m.iter_mut().enumerate().take(self.dim) {
            let mut guess = (x[axis] * scale - self.offset(axis, level)).floor() as i64;
            // Correct for rounding in the scaled coordinate.
            let cube_lo = |g: i64| side_of(level) * (g as f64 + self.offset(axis, level));
            while cube_lo(guess) > x[axis] {
                guess -= 1;
            }
            while cube_lo(guess + 1) <= x[axis] {
                guess += 1;
            }
            *v = guess;
        }
        m
    }

    /// Level and index of `q` if it is a cube of this grid.
    pub fn identify(&self, q: &Cube) -> Result<(i32, [i64; 2])> {
        if q.dim() != self.dim {
            return Err(Error::NotInGrid);
        }
        let level = -(q.side().log2().round() as i32);
        if (side_of(level) - q.side()).abs() > 1e-12 * q.side() {
            return Err(Error::NotInGrid);
        }
        let scale = 2f64.powi(level);
        let mut m = [0i64; 2];
        for (axis, slot) in m.iter_mut().enumerate().take(self.dim) {
            let t = q.lower(axis) * scale - self.offset(axis, level);
            let r = t.round();
            if (t - r).abs() > 1e-9 {
                return Err(Error::NotInGrid);
            }
            *slot = r as i64;
        }
        Ok((level, m))
    }

    pub fn contains_cube(&self, q: &Cube) -> bool {
        self.identify(q).is_ok()
    }

    /// The `2^n` grid cubes of half side contained in `q`.
    pub fn children(&self, q: &Cube) -> Result<Vec<Cube>> {
        let (level, _) = self.identify(q)?;
        let child_level = level + 1;
        let lo = self.index_containing(child_level, &q.center_lower_probe());
        let mut out = Vec::with_capacity(1 << self.dim);
        let steps: &[[i64; 2]] = if self.dim == 1 {
            &[[0, 0], [1, 0]]
        } else {
            &[[0, 0], [0, 1], [1, 0], [1, 1]]
        };
        for step in steps {
            let child = self.cube(child_level, [lo[0] + step[0], lo[1] + step[1]]);
            if !q.contains(&child) {
                return Err(Error::NotInGrid);
            }
            out.push(child);
        }
        Ok(out)
    }

    /// The unique grid cube of double side containing `q`.
    pub fn parent(&self, q: &Cube) -> Result<Cube> {
        let (level, _) = self.identify(q)?;
        let center = q.center();
        let idx = self.index_containing(level - 1, &center[..self.dim]);
        let parent = self.cube(level - 1, idx);
        if !parent.contains(q) {
            return Err(Error::NotInGrid);
        }
        Ok(parent)
    }

    /// All cubes of level `k` meeting `region`.
    pub fn cubes_at_level(&self, level: i32, region: &Cube) -> Result<Vec<Cube>> {
        let side = side_of(level);
        if side > region.side() {
            return Err(Error::LevelTooCoarse { level });
        }
        let mut ranges = [(0i64, 0i64); 2];
        for (axis, range) in ranges.iter_mut().enumerate().take(self.dim) {
            let mut lo_probe = [0.0; 2];
            lo_probe[axis] = region.lower(axis);
            let lo = self.index_containing(level, &lo_probe)[axis];
            let mut hi = lo;
            while self.cube(level, axis_index(axis, hi + 1)).lower(axis) < region.upper(axis) {
                hi += 1;
            }
            *range = (lo, hi);
        }
        let mut out = Vec::new();
        let (y_lo, y_hi) = if self.dim == 2 { ranges[1] } else { (0, 0) };
        for i in ranges[0].0..=ranges[0].1 {
            for j in y_lo..=y_hi {
                out.push(self.cube(level, [i, j]));
            }
        }
        Ok(out)
    }
}

fn axis_index(axis: usize, v: i64) -> [i64; 2] {
    let mut m = [0; 2];
    m[axis] = v;
    m
}

/// `2^-level`.
pub fn side_of(level: i32) -> f64 {
    2f64.powi(-level)
}

impl Cube {
    /// A point strictly inside the lower-left child quadrant.
    fn center_lower_probe(&self) -> [f64; 2] {
        let mut p = [0.0; 2];
        for (axis, v) in p.iter_mut().enumerate().take(self.dim) {
            *v = self.corner[axis] + 0.25 * self.side;
        }
        p
    }
}

/// All cubes of `grid` at side `2^-level` intersecting `region`; their union
/// covers the region and they are pairwise disjoint.
pub fn grid_cubes(grid: &DyadicGrid, level: i32, region: &Cube) -> Result<Vec<Cube>> {
    grid.cubes_at_level(level, region)
}

/// One-third trick: a shift `t` and a cube `Q_t ∈ D^t` with `Q ⊆ Q_t` and
/// `ℓ(Q_t) ≤ 6 ℓ(Q)`.
///
/// The smallest such `Q_t` is returned; ties go to the lexicographically
/// smallest shift.
pub fn locate_shifted_dyadic(q: &Cube) -> (DyadicGrid, Cube) {
    let grids = DyadicGrid::all(q.dim());
    // Largest level whose side is still >= ℓ(Q), down to the smallest level
    // whose side is <= 6 ℓ(Q).
    let finest = (1.0 / q.side()).log2().floor() as i32;
    let coarsest = (1.0 / (6.0 * q.side())).log2().ceil() as i32;
    for level in (coarsest - 2..=finest).rev() {
        for grid in &grids {
            let idx = grid.index_containing(level, q.corner());
            let candidate = grid.cube(level, idx);
            if candidate.contains(q) {
                return (*grid, candidate);
            }
        }
    }
    unreachable!("every cube sits inside a shifted dyadic cube at most six times larger")
}
