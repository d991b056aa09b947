//! Finite cube families over which discrete sups are taken, and a cell-cover
//! index that turns per-cube averages into flat loops.

use rayon::prelude::*;

use crate::error::{Error, Result};
use crate::geometry::{Cube, DyadicGrid};
use crate::lattice::{GridFunction, GridSpec};
use crate::summation::NeumaierSum;

/// Default cap on the number of cubes in a two-dimensional family.
pub const DEFAULT_CUBE_CAP: usize = 20_000;

/// An explicit, ordered list of cubes inside one lattice box.
#[derive(Debug, Clone, PartialEq)]
pub struct CubeFamily {
    spec: GridSpec,
    cubes: Vec<Cube>,
}

impl CubeFamily {
    pub fn new(spec: GridSpec, cubes: Vec<Cube>) -> Result<Self> {
        if cubes.is_empty() {
            return Err(Error::EmptyCubeFamily);
        }
        if cubes.iter().any(|q| q.dim() != spec.dim()) {
            return Err(Error::SpecMismatch);
        }
        Ok(Self { spec, cubes })
    }

    /// Every lattice-aligned cube inside the box. In two dimensions only
    /// sides `2^j h` are used.
    pub fn lattice(spec: GridSpec) -> Self {
        let n = spec.cells_per_axis();
        let h = spec.cell_side();
        let mut cubes = Vec::new();
        if spec.dim() == 1 {
            for len in 1..=n {
                for i in 0..=n - len {
                    cubes.push(Cube::interval(spec.edge(i as isize), len as f64 * h));
                }
            }
        } else {
            let mut len = 1;
            while len <= n {
                for i in 0..=n - len {
                    for j in 0..=n - len {
                        cubes.push(Cube::square(
                            spec.edge(i as isize),
                            spec.edge(j as isize),
                            len as f64 * h,
                        ));
                    }
                }
                len *= 2;
            }
        }
        Self { spec, cubes }
    }

    /// Cubes of the standard dyadic grid inside the box with side at least `h`.
    pub fn dyadic(spec: GridSpec) -> Self {
        Self::grid_cubes(spec, &DyadicGrid::standard(spec.dim()), spec.cell_side())
    }

    /// Cubes of the shifted grids (every nonzero shift) inside the box with
    /// side at least `2h`.
    pub fn shifted(spec: GridSpec) -> Self {
        let mut cubes = Vec::new();
        for grid in DyadicGrid::all(spec.dim()).into_iter().skip(1) {
            cubes.extend(Self::grid_cubes(spec, &grid, 2.0 * spec.cell_side()).cubes);
        }
        Self { spec, cubes }
    }

    fn grid_cubes(spec: GridSpec, grid: &DyadicGrid, min_side: f64) -> Self {
        let bx = spec.box_cube();
        let mut level = (1.0 / bx.side()).log2().ceil() as i32;
        let mut cubes = Vec::new();
        while crate::geometry::side_of(level) >= min_side * (1.0 - 1e-12) {
            if let Ok(all) = grid.cubes_at_level(level, &bx) {
                cubes.extend(all.into_iter().filter(|q| bx.contains(q)));
            }
            level += 1;
        }
        Self { spec, cubes }
    }

    /// Default family: all aligned cubes in one dimension; aligned
    /// power-of-two squares plus shifted-grid cubes in two, subsampled to
    /// `cap` cubes.
    pub fn default_for(spec: GridSpec, cap: usize) -> Self {
        if spec.dim() == 1 {
            return Self::lattice(spec);
        }
        let mut fam = Self::lattice(spec);
        fam.cubes.extend(Self::shifted(spec).cubes);
        fam.capped(cap)
    }

    /// Deterministic subsampling: sort by corner then side and keep every
    /// `ceil(len / cap)`-th cube. The largest cube is always retained.
    pub fn capped(mut self, cap: usize) -> Self {
        let cap = cap.max(1);
        if self.cubes.len() <= cap {
            return self;
        }
        self.cubes.sort_by(|a, b| a.cmp_key(b));
        let stride = self.cubes.len().div_ceil(cap);
        let largest = self
            .cubes
            .iter()
            .copied()
            .max_by(|a, b| a.side().total_cmp(&b.side()).then(b.cmp_key(a)))
            .expect("family nonempty");
        let mut kept: Vec<Cube> = self.cubes.iter().copied().step_by(stride).collect();
        if !kept.contains(&largest) {
            kept.push(largest);
        }
        self.cubes = kept;
        self
    }

    /// Union of two families on the same lattice, without duplicates.
    pub fn union(&self, other: &Self) -> Result<Self> {
        if self.spec != other.spec {
            return Err(Error::SpecMismatch);
        }
        let mut cubes = self.cubes.clone();
        for q in &other.cubes {
            if !cubes.contains(q) {
                cubes.push(*q);
            }
        }
        Ok(Self {
            spec: self.spec,
            cubes,
        })
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    pub fn cubes(&self) -> &[Cube] {
        &self.cubes
    }

    pub fn len(&self) -> usize {
        self.cubes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cubes.is_empty()
    }

    pub fn largest_measure(&self) -> f64 {
        self.cubes.iter().map(Cube::measure).fold(0.0, f64::max)
    }
}

/// Compressed rows: row `i` is `entries[offsets[i]..offsets[i + 1]]`.
#[derive(Debug, Clone, Default)]
struct Rows<T> {
    offsets: Vec<usize>,
    entries: Vec<T>,
}

impl<T> Rows<T> {
    fn from_rows(rows: impl IntoIterator<Item = Vec<T>>) -> Self {
        let mut offsets = vec![0];
        let mut entries = Vec::new();
        for row in rows {
            entries.extend(row);
            offsets.push(entries.len());
        }
        Self { offsets, entries }
    }

    fn row(&self, i: usize) -> &[T] {
        &self.entries[self.offsets[i]..self.offsets[i + 1]]
    }
}

/// Cell covers of every cube of a family: which cells each cube meets (with
/// overlap measure), which cell midpoints it contains, and optionally the
/// same for the concentric dilates.
#[derive(Debug, Clone)]
pub struct FamilyIndex {
    family: CubeFamily,
    cover: Rows<(u32, f64)>,
    members: Rows<u32>,
    dilated: Option<(f64, Rows<(u32, f64)>)>,
}

impl FamilyIndex {
    pub fn new(family: CubeFamily) -> Self {
        let spec = *family.spec();
        let cover = Rows::from_rows(family.cubes().iter().map(|q| {
            spec.overlaps(q)
                .into_iter()
                .map(|(i, w)| (i as u32, w))
                .collect()
        }));
        let members = Rows::from_rows(
            family
                .cubes()
                .iter()
                .map(|q| spec.members(q).into_iter().map(|i| i as u32).collect()),
        );
        Self {
            family,
            cover,
            members,
            dilated: None,
        }
    }

    /// Also index the dilates `factor·Q`, clipped to the box.
    pub fn with_dilation(mut self, factor: f64) -> Self {
        let spec = *self.family.spec();
        let rows = Rows::from_rows(self.family.cubes().iter().map(|q| {
            spec.overlaps(&q.dilate(factor))
                .into_iter()
                .map(|(i, w)| (i as u32, w))
                .collect()
        }));
        self.dilated = Some((factor, rows));
        self
    }

    pub fn family(&self) -> &CubeFamily {
        &self.family
    }

    pub fn cubes(&self) -> &[Cube] {
        self.family.cubes()
    }

    pub fn len(&self) -> usize {
        self.family.len()
    }

    pub fn is_empty(&self) -> bool {
        self.family.is_empty()
    }

    /// Cells whose midpoints lie in cube `i`.
    pub fn members(&self, i: usize) -> &[u32] {
        self.members.row(i)
    }

    /// `(1/|Q|) ∫_Q |f|^p` for every cube (no root taken).
    pub fn power_means(&self, f: &GridFunction, p: f64) -> Vec<f64> {
        Self::means(&self.cover, self.family.cubes(), f, p, 1.0)
    }

    /// `(1/|λQ|) ∫_{λQ ∩ box} |f|^p` for every cube; needs [`Self::with_dilation`].
    pub fn dilated_power_means(&self, f: &GridFunction, p: f64) -> Vec<f64> {
        let (factor, rows) = self.dilated.as_ref().expect("index built without dilation");
        Self::means(
            rows,
            self.family.cubes(),
            f,
            p,
            factor.powi(f.spec().dim() as i32),
        )
    }

    fn means(
        rows: &Rows<(u32, f64)>,
        cubes: &[Cube],
        f: &GridFunction,
        p: f64,
        scale: f64,
    ) -> Vec<f64> {
        let samples = f.samples();
        (0..cubes.len())
            .into_par_iter()
            .map(|i| {
                let mut acc = NeumaierSum::new();
                for &(c, w) in rows.row(i) {
                    acc.add(samples[c as usize].abs().powf(p) * w);
                }
                acc.value() / (cubes[i].measure() * scale)
            })
            .collect()
    }

    /// Smallest sample over the cells each cube meets.
    pub fn cell_min(&self, f: &GridFunction) -> Vec<f64> {
        let samples = f.samples();
        (0..self.len())
            .map(|i| {
                self.cover
                    .row(i)
                    .iter()
                    .map(|&(c, _)| samples[c as usize])
                    .fold(f64::INFINITY, f64::min)
            })
            .collect()
    }

    /// Per cell, the largest value among cubes containing the cell midpoint;
    /// ties go to the smallest cube in corner-then-side order.
    pub fn scatter_max(&self, values: &[f64]) -> (Vec<f64>, Vec<Option<usize>>) {
        let cells = self.family.spec().cell_count();
        let mut best = vec![f64::NEG_INFINITY; cells];
        let mut arg: Vec<Option<usize>> = vec![None; cells];
        let cubes = self.family.cubes();
        for (i, &v) in values.iter().enumerate() {
            for &c in self.members.row(i) {
                let c = c as usize;
                let better = match arg[c] {
                    None => true,
                    Some(j) => v > best[c] || (v == best[c] && cubes[i].cmp_key(&cubes[j]).is_lt()),
                };
                if better {
                    best[c] = v;
                    arg[c] = Some(i);
                }
            }
        }
        for b in &mut best {
            if *b == f64::NEG_INFINITY {
                *b = 0.0;
            }
        }
        (best, arg)
    }
}

/// Index of the largest value with the corner-then-side tie break.
pub fn argmax(values: &[f64], cubes: &[Cube]) -> Option<usize> {
    let mut best: Option<usize> = None;
    for (i, &v) in values.iter().enumerate() {
        best = match best {
            None => Some(i),
            Some(j) if v > values[j] || (v == values[j] && cubes[i].cmp_key(&cubes[j]).is_lt()) => {
                Some(i)
            }
            keep => keep,
        };
    }
    best
}
