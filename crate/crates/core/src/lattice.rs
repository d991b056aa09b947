//! Piecewise-constant functions on a uniform lattice over `[-L, L)^n`.
//!
//! A [`GridFunction`] is constant on every cell and zero outside the box, so
//! integrals over cubes are finite sums and exact up to rounding.

use std::fmt::Write as _;

use serde::{Deserialize, Serialize};

use crate::error::{check_conjugate, Error, Result};
use crate::geometry::Cube;
use crate::summation::NeumaierSum;

/// Tolerance for snapping cube faces onto cell boundaries, in cell units.
const SNAP_TOL: f64 = 1e-9;

/// Lattice description: dimension, half width of the box and cells per axis.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GridSpec {
    dim: usize,
    half_width: f64,
    cells: usize,
}

impl GridSpec {
    pub fn new(dim: usize, half_width: f64, cells: usize) -> Result<Self> {
        if !(1..=2).contains(&dim) {
            return Err(Error::InvalidGrid(format!(
                "dimension {dim} not in {{1, 2}}"
            )));
        }
        if !(half_width > 0.0 && half_width.is_finite()) {
            return Err(Error::InvalidGrid(format!(
                "half width {half_width} must be positive"
            )));
        }
        if cells == 0 || !cells.is_power_of_two() {
            return Err(Error::InvalidGrid(format!(
                "{cells} cells per axis is not a power of two"
            )));
        }
        Ok(Self {
            dim,
            half_width,
            cells,
        })
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn half_width(&self) -> f64 {
        self.half_width
    }

    pub fn cells_per_axis(&self) -> usize {
        self.cells
    }

    /// Cell side `h = 2L / N`.
    pub fn cell_side(&self) -> f64 {
        2.0 * self.half_width / self.cells as f64
    }

    pub fn cell_volume(&self) -> f64 {
        self.cell_side().powi(self.dim as i32)
    }

    /// `N^n`.
    pub fn cell_count(&self) -> usize {
        self.cells.pow(self.dim as u32)
    }

    pub fn box_cube(&self) -> Cube {
        let corner = vec![-self.half_width; self.dim];
        Cube::new(&corner, 2.0 * self.half_width).expect("box is non-degenerate")
    }

    /// Lower edge of cell `i` along an axis.
    pub fn edge(&self, i: isize) -> f64 {
        -self.half_width + i as f64 * self.cell_side()
    }

    pub fn index(&self, coords: [usize; 2]) -> usize {
        if self.dim == 1 {
            coords[0]
        } else {
            coords[0] * self.cells + coords[1]
        }
    }

    pub fn coords(&self, index: usize) -> [usize; 2] {
        if self.dim == 1 {
            [index, 0]
        } else {
            [index / self.cells, index % self.cells]
        }
    }

    pub fn midpoint(&self, index: usize) -> [f64; 2] {
        let c = self.coords(index);
        let h = self.cell_side();
        let mut x = [0.0; 2];
        for axis in 0..self.dim {
            x[axis] = -self.half_width + (c[axis] as f64 + 0.5) * h;
        }
        x
    }

    /// The cell containing `x`, if it lies in the box.
    pub fn locate(&self, x: &[f64]) -> Option<usize> {
        let h = self.cell_side();
        let mut c = [0usize; 2];
        for axis in 0..self.dim {
            let t = ((x[axis] + self.half_width) / h).floor();
            if t < 0.0 || t >= self.cells as f64 {
                return None;
            }
            c[axis] = t as usize;
        }
        Some(self.index(c))
    }

    /// Cell range of a lattice-aligned cube inside the box.
    pub fn aligned_range(&self, q: &Cube) -> Result<CellBox> {
        if q.dim() != self.dim {
            return Err(Error::SpecMismatch);
        }
        let h = self.cell_side();
        let len_f = q.side() / h;
        let len = len_f.round();
        if (len_f - len).abs() > SNAP_TOL || len < 1.0 {
            return Err(Error::NonAlignedCube);
        }
        let mut lo = [0usize; 2];
        for (axis, slot) in lo.iter_mut().enumerate().take(self.dim) {
            let t = (q.lower(axis) + self.half_width) / h;
            let r = t.round();
            if (t - r).abs() > SNAP_TOL {
                return Err(Error::NonAlignedCube);
            }
            if r < 0.0 || r + len > self.cells as f64 {
                return Err(Error::OutOfBox);
            }
            *slot = r as usize;
        }
        Ok(CellBox {
            dim: self.dim,
            lo,
            len: len as usize,
        })
    }

    /// Cells meeting `q` with the measure of each overlap; `q` may be
    /// arbitrary and is clipped to the box.
    pub fn overlaps(&self, q: &Cube) -> Vec<(usize, f64)> {
        let per_axis: Vec<Vec<(usize, f64)>> = (0..self.dim)
            .map(|axis| self.axis_overlap(q.lower(axis), q.upper(axis)))
            .collect();
        if self.dim == 1 {
            return per_axis[0].clone();
        }
        let mut out = Vec::with_capacity(per_axis[0].len() * per_axis[1].len());
        for &(i, a) in &per_axis[0] {
            for &(j, b) in &per_axis[1] {
                out.push((self.index([i, j]), a * b));
            }
        }
        out
    }

    /// Cells whose midpoints lie in `q`.
    pub fn members(&self, q: &Cube) -> Vec<usize> {
        let h = self.cell_side();
        let axis_range = |axis: usize| -> Option<(usize, usize)> {
            // midpoint of cell i is -L + (i + 1/2) h; need lo <= mid < hi
            let lo = ((q.lower(axis) + self.half_width) / h - 0.5)
                .ceil()
                .max(0.0);
            let hi = ((q.upper(axis) + self.half_width) / h - 0.5).ceil() - 1.0;
            let hi = hi.min(self.cells as f64 - 1.0);
            if hi < lo {
                None
            } else {
                Some((lo as usize, hi as usize))
            }
        };
        let mut out = Vec::new();
        let Some((i0, i1)) = axis_range(0) else {
            return out;
        };
        if self.dim == 1 {
            for i in i0..=i1 {
                if q.contains_point(&self.midpoint(i)) {
                    out.push(i);
                }
            }
            return out;
        }
        let Some((j0, j1)) = axis_range(1) else {
            return out;
        };
        for i in i0..=i1 {
            for j in j0..=j1 {
                let idx = self.index([i, j]);
                if q.contains_point(&self.midpoint(idx)) {
                    out.push(idx);
                }
            }
        }
        out
    }

    fn axis_overlap(&self, a: f64, b: f64) -> Vec<(usize, f64)> {
        let h = self.cell_side();
        let snap = |t: f64| {
            let r = t.round();
            if (t - r).abs() <= SNAP_TOL {
                r
            } else {
                t
            }
        };
        let ta = snap((a + self.half_width) / h).max(0.0);
        let tb = snap((b + self.half_width) / h).min(self.cells as f64);
        let mut out = Vec::new();
        if tb <= ta {
            return out;
        }
        let first = ta.floor() as usize;
        let last = (tb.ceil() as usize).min(self.cells);
        for i in first..last {
            let lo = ta.max(i as f64);
            let hi = tb.min(i as f64 + 1.0);
            if hi > lo {
                let frac = hi - lo;
                out.push((i, if frac == 1.0 { h } else { frac * h }));
            }
        }
        out
    }
}

/// Index box of a lattice-aligned cube: `len` cells per axis from `lo`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CellBox {
    pub dim: usize,
    pub lo: [usize; 2],
    pub len: usize,
}

impl CellBox {
    pub fn cell_count(&self) -> usize {
        self.len.pow(self.dim as u32)
    }

    /// Cell indices in row-major order.
    pub fn cells(&self, spec: &GridSpec) -> Vec<usize> {
        let mut out = Vec::with_capacity(self.cell_count());
        if self.dim == 1 {
            out.extend(self.lo[0]..self.lo[0] + self.len);
        } else {
            for i in self.lo[0]..self.lo[0] + self.len {
                for j in self.lo[1]..self.lo[1] + self.len {
                    out.push(spec.index([i, j]));
                }
            }
        }
        out
    }
}

/// Piecewise-constant function: one sample per cell, zero outside the box.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GridFunction {
    spec: GridSpec,
    samples: Vec<f64>,
}

impl GridFunction {
    pub fn new(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        if samples.len() != spec.cell_count() {
            return Err(Error::InvalidSamples(format!(
                "expected {} samples, got {}",
                spec.cell_count(),
                samples.len()
            )));
        }
        if samples.iter().any(|v| !v.is_finite()) {
            return Err(Error::InvalidSamples("non-finite sample".into()));
        }
        Ok(Self { spec, samples })
    }

    /// A function required to be `>= 0` everywhere.
    pub fn nonnegative(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        let f = Self::new(spec, samples)?;
        if !f.is_nonnegative() {
            return Err(Error::NonNegativityViolation);
        }
        Ok(f)
    }

    /// A weight: strictly positive samples.
    pub fn weight(spec: GridSpec, samples: Vec<f64>) -> Result<Self> {
        let f = Self::new(spec, samples)?;
        if !f.is_positive() {
            return Err(Error::NonPositiveWeight);
        }
        Ok(f)
    }

    pub fn zeros(spec: GridSpec) -> Self {
        Self {
            spec,
            samples: vec![0.0; spec.cell_count()],
        }
    }

    pub fn constant(spec: GridSpec, value: f64) -> Self {
        Self {
            spec,
            samples: vec![value; spec.cell_count()],
        }
    }

    /// Samples `f` at the cell midpoints.
    pub fn from_fn(spec: GridSpec, f: impl Fn(&[f64]) -> f64) -> Result<Self> {
        let samples = (0..spec.cell_count())
            .map(|i| f(&spec.midpoint(i)[..spec.dim()]))
            .collect();
        Self::new(spec, samples)
    }

    /// Indicator of the cells whose midpoints lie in `q`.
    pub fn indicator(spec: GridSpec, q: &Cube) -> Self {
        let mut samples = vec![0.0; spec.cell_count()];
        for i in spec.members(q) {
            samples[i] = 1.0;
        }
        Self { spec, samples }
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn samples(&self) -> &[f64] {
        &self.samples
    }

    pub fn into_samples(self) -> Vec<f64> {
        self.samples
    }

    pub fn is_nonnegative(&self) -> bool {
        self.samples.iter().all(|&v| v >= 0.0)
    }

    pub fn is_positive(&self) -> bool {
        self.samples.iter().all(|&v| v > 0.0)
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self {
            spec: self.spec,
            samples: self.samples.iter().map(|&v| f(v)).collect(),
        }
    }

    pub fn scale(&self, c: f64) -> Self {
        self.map(|v| c * v)
    }

    pub fn abs(&self) -> Self {
        self.map(f64::abs)
    }

    /// `|f|^p`, with `0^p = 0` for `p > 0`.
    pub fn abs_pow(&self, p: f64) -> Self {
        self.map(|v| v.abs().powf(p))
    }

    pub fn zip_with(&self, other: &Self, f: impl Fn(f64, f64) -> f64) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        Ok(Self {
            spec: self.spec,
            samples: self
                .samples
                .iter()
                .zip(&other.samples)
                .map(|(&a, &b)| f(a, b))
                .collect(),
        })
    }

    pub fn mul(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a * b)
    }

    pub fn add(&self, other: &Self) -> Result<Self> {
        self.zip_with(other, |a, b| a + b)
    }

    pub fn max_abs(&self) -> f64 {
        self.samples.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Value on the cell containing `x` (zero outside the box).
    pub fn value_at(&self, x: &[f64]) -> f64 {
        self.spec.locate(x).map_or(0.0, |i| self.samples[i])
    }

    /// Mean of the samples of the cells meeting at the lattice node nearest
    /// to `x`; the natural point value at a cell corner.
    pub fn node_value(&self, x: &[f64]) -> f64 {
        let h = self.spec.cell_side();
        let l = self.spec.half_width;
        let mut node = [0.0f64; 2];
        for axis in 0..self.spec.dim {
            node[axis] = ((x[axis] + l) / h).round();
        }
        let mut acc = NeumaierSum::new();
        let mut count = 0u32;
        let offsets: &[[f64; 2]] = if self.spec.dim == 1 {
            &[[-0.5, 0.0], [0.5, 0.0]]
        } else {
            &[[-0.5, -0.5], [-0.5, 0.5], [0.5, -0.5], [0.5, 0.5]]
        };
        for off in offsets {
            let mut p = [0.0; 2];
            for axis in 0..self.spec.dim {
                p[axis] = -l + (node[axis] + off[axis]) * h;
            }
            acc.add(self.value_at(&p[..self.spec.dim]));
            count += 1;
        }
        acc.value() / count as f64
    }

    /// Lattice-aligned dyadic dilation about the origin, `x ↦ f(x / 2)`:
    /// every cell is spread over two cells per axis. Data leaving the box is
    /// dropped.
    pub fn dilate2(&self) -> Self {
        let n = self.spec.cells as isize;
        let half = n / 2;
        let mut out = vec![0.0; self.samples.len()];
        for (idx, v) in out.iter_mut().enumerate() {
            let c = self.spec.coords(idx);
            // cell i has midpoint -L + (i + 1/2) h; x / 2 lands in cell (i + N/2) / 2
            let src = |i: usize| ((i as isize + half) / 2) as usize;
            let coords = [src(c[0]), if self.spec.dim == 2 { src(c[1]) } else { 0 }];
            *v = self.samples[self.spec.index(coords)];
        }
        Self {
            spec: self.spec,
            samples: out,
        }
    }

    /// `∑_cells sample × |cell ∩ q|` for an arbitrary cube, clipped to the box.
    pub fn integral_clipped(&self, q: &Cube) -> f64 {
        let mut acc = NeumaierSum::new();
        for (i, w) in self.spec.overlaps(q) {
            acc.add(self.samples[i] * w);
        }
        acc.value()
    }

    /// `(1/|q|) ∫_{q ∩ box} |f|^p`, the power mean before the root. The
    /// function vanishes outside the box, so the full measure of `q` divides.
    pub fn power_mean_clipped(&self, q: &Cube, p: f64) -> f64 {
        let mut acc = NeumaierSum::new();
        for (i, w) in self.spec.overlaps(q) {
            acc.add(self.samples[i].abs().powf(p) * w);
        }
        acc.value() / q.measure()
    }

    /// Grid file: header `n L N`, then the samples in row-major order.
    pub fn to_grid_text(&self) -> String {
        let mut s = String::new();
        let _ = writeln!(
            s,
            "{} {} {}",
            self.spec.dim, self.spec.half_width, self.spec.cells
        );
        let row = self.spec.cells;
        for chunk in self
            .samples
            .chunks(if self.spec.dim == 1 { 1 } else { row })
        {
            let line: Vec<String> = chunk.iter().map(|v| format!("{v}")).collect();
            let _ = writeln!(s, "{}", line.join(" "));
        }
        s
    }

    pub fn from_grid_text(text: &str) -> Result<Self> {
        let mut tokens = text.split_whitespace();
        let mut next = |what: &str| {
            tokens
                .next()
                .ok_or_else(|| Error::GridFormat(format!("missing {what}")))
        };
        let dim: usize = next("dimension")?
            .parse()
            .map_err(|e| Error::GridFormat(format!("dimension: {e}")))?;
        let half_width: f64 = next("half width")?
            .parse()
            .map_err(|e| Error::GridFormat(format!("half width: {e}")))?;
        let cells: usize = next("cell count")?
            .parse()
            .map_err(|e| Error::GridFormat(format!("cell count: {e}")))?;
        let spec =
            GridSpec::new(dim, half_width, cells).map_err(|e| Error::GridFormat(e.to_string()))?;
        let mut samples = Vec::with_capacity(spec.cell_count());
        for k in 0..spec.cell_count() {
            let v: f64 = next("sample")?
                .parse()
                .map_err(|e| Error::GridFormat(format!("sample {k}: {e}")))?;
            samples.push(v);
        }
        if tokens.next().is_some() {
            return Err(Error::GridFormat("trailing data after samples".into()));
        }
        Self::new(spec, samples)
    }
}

/// `∫_Q f` for a lattice-aligned cube inside the box.
pub fn integrate(f: &GridFunction, q: &Cube) -> Result<f64> {
    let range = f.spec().aligned_range(q)?;
    let vol = f.spec().cell_volume();
    let mut acc = NeumaierSum::new();
    for i in range.cells(f.spec()) {
        acc.add(f.samples()[i] * vol);
    }
    Ok(acc.value())
}

/// `((1/|Q|) ∫_Q |f|^p)^{1/p}` for a lattice-aligned cube inside the box.
pub fn cube_average(f: &GridFunction, q: &Cube, p: f64) -> Result<f64> {
    if !(p > 0.0) {
        return Err(Error::POutOfRange(p));
    }
    if q.measure() == 0.0 {
        return Err(Error::DegenerateCube);
    }
    let range = f.spec().aligned_range(q)?;
    let mut acc = NeumaierSum::new();
    for i in range.cells(f.spec()) {
        acc.add(f.samples()[i].abs().powf(p));
    }
    Ok((acc.value() / range.cell_count() as f64).powf(1.0 / p))
}

/// `m_Q(|f|^r, |g|^s)`: product of the `r`- and `s`-averages, `1/r + 1/s = 1`.
pub fn bilinear_average(
    f: &GridFunction,
    g: &GridFunction,
    q: &Cube,
    r: f64,
    s: f64,
) -> Result<f64> {
    check_conjugate(r, s)?;
    if f.spec() != g.spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(cube_average(f, q, r)? * cube_average(g, q, s)?)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn line(l: f64, n: usize) -> GridSpec {
        GridSpec::new(1, l, n).unwrap()
    }

    #[test]
    fn spec_validation() {
        assert!(GridSpec::new(3, 1.0, 8).is_err());
        assert!(GridSpec::new(1, 1.0, 12).is_err());
        assert!(GridSpec::new(1, 0.0, 8).is_err());
        let s = GridSpec::new(2, 1.0, 8).unwrap();
        assert_eq!(s.cell_count(), 64);
        assert_eq!(s.cell_side(), 0.25);
    }

    #[test]
    fn integrate_examples() {
        let spec = line(1.0, 16);
        let one = GridFunction::constant(spec, 1.0);
        assert_eq!(integrate(&one, &Cube::interval(-1.0, 2.0)).unwrap(), 2.0);
        let chi = GridFunction::indicator(spec, &Cube::interval(0.0, 1.0));
        assert_eq!(integrate(&chi, &Cube::interval(-1.0, 2.0)).unwrap(), 1.0);
    }

    #[test]
    fn midpoint_identity_for_linear_data() {
        // f(x) = x at midpoints of [0,1) split into 16 cells: sum (i + 1/2)/16^2 = 1/2.
        let spec = line(1.0, 32);
        let f = GridFunction::from_fn(spec, |x| x[0]).unwrap();
        let v = integrate(&f, &Cube::interval(0.0, 1.0)).unwrap();
        let closed: f64 = (0..16).map(|i| (i as f64 + 0.5) / 256.0).sum();
        assert_eq!(closed, 0.5);
        assert!((v - 0.5).abs() < 1e-15);
    }

    #[test]
    fn integrate_errors() {
        let spec = line(1.0, 16);
        let f = GridFunction::constant(spec, 1.0);
        assert_eq!(
            integrate(&f, &Cube::interval(0.01, 0.5)),
            Err(Error::NonAlignedCube)
        );
        assert_eq!(
            integrate(&f, &Cube::interval(0.5, 1.0)),
            Err(Error::OutOfBox)
        );
    }

    #[test]
    fn average_examples() {
        let spec = line(2.0, 16);
        let c = GridFunction::constant(spec, -3.0);
        let q = Cube::interval(-1.0, 2.0);
        for p in [0.5, 1.0, 2.0, 7.0] {
            assert!((cube_average(&c, &q, p).unwrap() - 3.0).abs() < 1e-14);
        }
        let chi = GridFunction::indicator(spec, &Cube::interval(0.0, 1.0));
        let q = Cube::interval(0.0, 2.0);
        assert_eq!(cube_average(&chi, &q, 1.0).unwrap(), 0.5);
        assert!((cube_average(&chi, &q, 2.0).unwrap() - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn bilinear_average_examples() {
        let spec = line(2.0, 16);
        let one = GridFunction::constant(spec, 1.0);
        let q = Cube::interval(-1.0, 2.0);
        assert_eq!(bilinear_average(&one, &one, &q, 2.0, 2.0).unwrap(), 1.0);
        assert_eq!(bilinear_average(&one, &one, &q, 3.0, 1.5).unwrap(), 1.0);
        let chi_q = GridFunction::indicator(spec, &q);
        assert!((bilinear_average(&chi_q, &chi_q, &q, 2.0, 2.0).unwrap() - 1.0).abs() < 1e-15);
        let f = GridFunction::indicator(spec, &Cube::interval(0.0, 1.0));
        let g = GridFunction::indicator(spec, &Cube::interval(1.0, 1.0));
        let v = bilinear_average(&f, &g, &Cube::interval(0.0, 2.0), 2.0, 2.0).unwrap();
        assert!((v - 0.5).abs() < 1e-15);
        assert!(matches!(
            bilinear_average(&f, &g, &q, 2.0, 3.0),
            Err(Error::ConjugateMismatch { .. })
        ));
    }

    #[test]
    fn constructors_check_sign() {
        let spec = line(1.0, 4);
        assert_eq!(
            GridFunction::nonnegative(spec, vec![0.0, 1.0, -1.0, 0.0]),
            Err(Error::NonNegativityViolation)
        );
        assert_eq!(
            GridFunction::weight(spec, vec![1.0, 1.0, 0.0, 1.0]),
            Err(Error::NonPositiveWeight)
        );
        assert!(GridFunction::new(spec, vec![f64::NAN, 0.0, 0.0, 0.0]).is_err());
    }

    #[test]
    fn clipped_integral_of_non_aligned_cube() {
        let spec = line(1.0, 4); // cells of side 1/2
        let f = GridFunction::new(spec, vec![1.0, 2.0, 3.0, 4.0]).unwrap();
        // [-0.25, 0.75): half of cell 1, all of cell 2, half of cell 3
        let v = f.integral_clipped(&Cube::interval(-0.25, 1.0));
        assert!((v - (2.0 * 0.25 + 3.0 * 0.5 + 4.0 * 0.25)).abs() < 1e-15);
        // 3Q leaving the box integrates only the intersection.
        let w = f.integral_clipped(&Cube::interval(-3.0, 6.0));
        assert!((w - 5.0).abs() < 1e-15);
    }

    #[test]
    fn grid_text_roundtrip_and_rejection() {
        let spec = GridSpec::new(2, 1.5, 4).unwrap();
        let f = GridFunction::from_fn(spec, |x| x[0] * 0.1 + x[1]).unwrap();
        let back = GridFunction::from_grid_text(&f.to_grid_text()).unwrap();
        assert_eq!(back, f);
        assert!(matches!(
            GridFunction::from_grid_text("1 1.0 6\n1 2 3 4 5 6"),
            Err(Error::GridFormat(_))
        ));
        assert!(GridFunction::from_grid_text("1 1.0 4\n1 2 3").is_err());
    }

    #[test]
    fn dilation_spreads_cells() {
        let spec = line(1.0, 8);
        let f = GridFunction::indicator(spec, &Cube::interval(0.0, 0.25));
        let d = f.dilate2();
        assert_eq!(d, GridFunction::indicator(spec, &Cube::interval(0.0, 0.5)));
        let spec2 = GridSpec::new(2, 1.0, 8).unwrap();
        let g = GridFunction::indicator(spec2, &Cube::square(-0.25, 0.0, 0.25));
        assert_eq!(
            g.dilate2(),
            GridFunction::indicator(spec2, &Cube::square(-0.5, 0.0, 0.5))
        );
    }

    #[test]
    fn members_match_midpoint_test() {
        let spec = GridSpec::new(2, 1.0, 8).unwrap();
        let q = Cube::square(-0.3, 0.1, 0.7);
        let fast = spec.members(&q);
        let slow: Vec<usize> = (0..spec.cell_count())
            .filter(|&i| q.contains_point(&spec.midpoint(i)))
            .collect();
        assert_eq!(fast, slow);
    }
}
