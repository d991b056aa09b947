//! Stopping-time Calderón–Zygmund selection over the dyadic subcubes of a
//! root cube `Q0`, down to single lattice cells.
//!
//! For each `k ≥ 1` the selected cubes `Q_{k,j}` are the maximal `Q ∈ D(Q0)`
//! with `m_{3Q}(|f|^r, |g|^s) > a^k`. Difference sets are kept as cell index
//! lists so every measure claim reduces to integer counting.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{check_conjugate, Error, Result};
use crate::geometry::{Cube, DyadicGrid};
use crate::lattice::{GridFunction, GridSpec};
use crate::summation::NeumaierSum;

/// `2^{2n+1}`, the base that makes every difference set carry half its cube.
pub fn default_base(dim: usize) -> f64 {
    2f64.powi(2 * dim as i32 + 1)
}

/// The full dyadic tree of `D(Q0)`: node `(depth, a, b)` is the cube of side
/// `ℓ(Q0) 2^{-depth}` at sub-index `(a, b)`.
#[derive(Debug, Clone)]
pub(crate) struct DyadicTree {
    pub spec: GridSpec,
    pub root: Cube,
    /// Cell offset of the root's lower corner.
    pub lo: [usize; 2],
    /// Cells per axis of the root.
    pub len: usize,
    pub depths: u32,
}

impl DyadicTree {
    pub fn new(spec: GridSpec, root: &Cube, grid: &DyadicGrid) -> Result<Self> {
        if root.dim() != spec.dim() || grid.dim() != spec.dim() {
            return Err(Error::SpecMismatch);
        }
        grid.identify(root)?;
        let range = spec.aligned_range(root)?;
        if !range.len.is_power_of_two() {
            return Err(Error::NonAlignedCube);
        }
        Ok(Self {
            spec,
            root: *root,
            lo: range.lo,
            len: range.len,
            depths: range.len.trailing_zeros() + 1,
        })
    }

    pub fn dim(&self) -> usize {
        self.spec.dim()
    }

    /// Nodes per axis at a depth.
    pub fn per_axis(&self, depth: u32) -> usize {
        1 << depth
    }

    pub fn node_count(&self, depth: u32) -> usize {
        self.per_axis(depth).pow(self.dim() as u32)
    }

    /// Cells per axis of a node at a depth.
    pub fn node_len(&self, depth: u32) -> usize {
        self.len >> depth
    }

    pub fn node_coords(&self, depth: u32, node: usize) -> [usize; 2] {
        if self.dim() == 1 {
            [node, 0]
        } else {
            let m = self.per_axis(depth);
            [node / m, node % m]
        }
    }

    pub fn node_cube(&self, depth: u32, node: usize) -> Cube {
        let c = self.node_coords(depth, node);
        let side = self.root.side() / (1u64 << depth) as f64;
        let h = self.spec.cell_side();
        let l = self.node_len(depth);
        let mut corner = [0.0; 2];
        for axis in 0..self.dim() {
            corner[axis] = self.spec.edge((self.lo[axis] + c[axis] * l) as isize);
            debug_assert!((corner[axis] + l as f64 * h - corner[axis] - side).abs() < 1e-9);
        }
        Cube::new(&corner[..self.dim()], side).expect("positive side")
    }

    /// Lattice cell indices covered by a node, row-major.
    pub fn node_cells(&self, depth: u32, node: usize) -> Vec<usize> {
        let c = self.node_coords(depth, node);
        let l = self.node_len(depth);
        let x0 = self.lo[0] + c[0] * l;
        if self.dim() == 1 {
            return (x0..x0 + l).collect();
        }
        let y0 = self.lo[1] + c[1] * l;
        let mut out = Vec::with_capacity(l * l);
        for i in x0..x0 + l {
            for j in y0..y0 + l {
                out.push(self.spec.index([i, j]));
            }
        }
        out
    }

    /// Parent node index at `depth - 1`.
    pub fn parent(&self, depth: u32, node: usize) -> usize {
        let c = self.node_coords(depth, node);
        if self.dim() == 1 {
            c[0] / 2
        } else {
            (c[0] / 2) * self.per_axis(depth - 1) + c[1] / 2
        }
    }

    /// Node containing a root-relative cell at a depth.
    pub fn node_of_cell(&self, depth: u32, cell: usize) -> usize {
        let c = self.spec.coords(cell);
        let l = self.node_len(depth);
        let a = (c[0] - self.lo[0]) / l;
        if self.dim() == 1 {
            a
        } else {
            a * self.per_axis(depth) + (c[1] - self.lo[1]) / l
        }
    }

    /// `m_{3Q}(|f|^r, |g|^s)` for every node, grouped by depth.
    pub fn functional(&self, f: &GridFunction, g: &GridFunction, r: f64, s: f64) -> Vec<Vec<f64>> {
        (0..self.depths)
            .map(|d| {
                (0..self.node_count(d))
                    .into_par_iter()
                    .map(|node| {
                        let q = self.node_cube(d, node).dilate(3.0);
                        three_q_functional(f, g, &q, r, s)
                    })
                    .collect()
            })
            .collect()
    }
}

/// `m_{Q}(|f|^r,|g|^s)` over an arbitrary cube, integrating only inside the
/// box but dividing by the full `|Q|`.
pub fn three_q_functional(f: &GridFunction, g: &GridFunction, q: &Cube, r: f64, s: f64) -> f64 {
    let spec = f.spec();
    let mut af = NeumaierSum::new();
    let mut ag = NeumaierSum::new();
    for (i, w) in spec.overlaps(q) {
        af.add(f.samples()[i].abs().powf(r) * w);
        ag.add(g.samples()[i].abs().powf(s) * w);
    }
    let m = q.measure();
    (af.value() / m).powf(1.0 / r) * (ag.value() / m).powf(1.0 / s)
}

/// One selected cube `Q_{k,j}` with its difference set `E_{k,j}`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SelectedCube {
    pub cube: Cube,
    pub level: u32,
    /// `m_{3Q}(|f|^r, |g|^s)`.
    pub functional: f64,
    /// Number of lattice cells in the cube.
    pub cell_count: usize,
    /// Cells of `E_{k,j} = Q_{k,j} \ D_{k+1}`.
    pub e_cells: Vec<usize>,
    /// `|E_{k,j}|`.
    pub e_measure: f64,
    #[serde(skip)]
    pub(crate) cells: Vec<usize>,
}

/// Output of [`cz_decompose`].
#[derive(Debug, Clone, Serialize)]
pub struct SparseFamily {
    pub root: Cube,
    pub base_constant: f64,
    pub dim: usize,
    pub root_functional: f64,
    /// `levels[k - 1]` holds the cubes `Q_{k,j}`.
    pub levels: Vec<Vec<SelectedCube>>,
    pub e0_cells: Vec<usize>,
    pub e0_measure: f64,
    pub cell_volume: f64,
    #[serde(skip)]
    root_cells: Vec<usize>,
    /// Deepest `k` with the cell in `D_k` (0 when in no `D_k`), parallel to
    /// `root_cells`.
    #[serde(skip)]
    cell_level: Vec<u32>,
}

/// Stopping-time selection of the sparse family of `(f, g)` inside `Q0`.
pub fn cz_decompose(
    f: &GridFunction,
    g: &GridFunction,
    r: f64,
    s: f64,
    q0: &Cube,
    grid: &DyadicGrid,
    a: f64,
) -> Result<SparseFamily> {
    check_conjugate(r, s)?;
    if f.spec() != g.spec() {
        return Err(Error::SpecMismatch);
    }
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return Err(Error::NonNegativityViolation);
    }
    let dim = f.spec().dim();
    if !(a > 4f64.powi(dim as i32)) {
        return Err(Error::RelationViolated(format!(
            "base a = {a} must exceed 2^(2n)"
        )));
    }
    let tree = DyadicTree::new(*f.spec(), q0, grid)?;
    let m = tree.functional(f, g, r, s);
    let root_cells = tree.node_cells(0, 0);
    let mut cell_level = vec![0u32; root_cells.len()];
    let position = |cell: usize| -> usize {
        let c = tree.spec.coords(cell);
        let a0 = c[0] - tree.lo[0];
        if dim == 1 {
            a0
        } else {
            a0 * tree.len + (c[1] - tree.lo[1])
        }
    };

    let max_m = m.iter().flatten().fold(0.0f64, |acc, &v| acc.max(v));
    let k_cap = if max_m > a {
        (max_m.ln() / a.ln()).ceil() as u32
    } else {
        0
    };
    let mut raw_levels: Vec<Vec<(u32, usize)>> = Vec::new();
    for k in 1..=k_cap {
        let threshold = a.powi(k as i32);
        let mut chosen = Vec::new();
        // covered[d][node]: some ancestor (or the node) already exceeds the threshold
        let mut covered_prev: Vec<bool> = Vec::new();
        for d in 0..tree.depths {
            let mut covered = vec![false; tree.node_count(d)];
            for node in 0..tree.node_count(d) {
                let ancestor = d > 0 && covered_prev[tree.parent(d, node)];
                if ancestor {
                    covered[node] = true;
                } else if m[d as usize][node] > threshold {
                    covered[node] = true;
                    chosen.push((d, node));
                }
            }
            covered_prev = covered;
        }
        if chosen.is_empty() {
            break;
        }
        for &(d, node) in &chosen {
            for cell in tree.node_cells(d, node) {
                cell_level[position(cell)] = k;
            }
        }
        raw_levels.push(chosen);
    }

    let vol = tree.spec.cell_volume();
    let levels = raw_levels
        .iter()
        .enumerate()
        .map(|(i, chosen)| {
            let k = i as u32 + 1;
            chosen
                .iter()
                .map(|&(d, node)| {
                    let cells = tree.node_cells(d, node);
                    let e_cells: Vec<usize> = cells
                        .iter()
                        .copied()
                        .filter(|&c| cell_level[position(c)] == k)
                        .collect();
                    SelectedCube {
                        cube: tree.node_cube(d, node),
                        level: k,
                        functional: m[d as usize][node],
                        cell_count: cells.len(),
                        e_measure: e_cells.len() as f64 * vol,
                        e_cells,
                        cells,
                    }
                })
                .collect()
        })
        .collect();
    let e0_cells: Vec<usize> = root_cells
        .iter()
        .copied()
        .filter(|&c| cell_level[position(c)] == 0)
        .collect();
    Ok(SparseFamily {
        root: *q0,
        base_constant: a,
        dim,
        root_functional: m[0][0],
        levels,
        e0_measure: e0_cells.len() as f64 * vol,
        e0_cells,
        cell_volume: vol,
        root_cells,
        cell_level,
    })
}

/// Outcome of the exact invariant checks on a [`SparseFamily`].
#[derive(Debug, Clone, Default, PartialEq, Serialize)]
pub struct InvariantReport {
    pub disjoint: bool,
    pub nested: bool,
    pub partition: bool,
    pub root_half: bool,
    pub cube_half: bool,
    pub next_level_half: bool,
    pub functional_bounds: bool,
    pub failures: Vec<String>,
}

impl InvariantReport {
    pub fn all_hold(&self) -> bool {
        self.failures.is_empty()
    }
}

impl SparseFamily {
    /// Number of levels `k ≥ 1` with selected cubes.
    pub fn depth(&self) -> u32 {
        self.levels.len() as u32
    }

    pub fn level(&self, k: u32) -> Result<&[SelectedCube]> {
        if k == 0 || k as usize > self.levels.len() {
            return Err(Error::LevelAbsent(k));
        }
        Ok(&self.levels[k as usize - 1])
    }

    pub fn root_cells(&self) -> &[usize] {
        &self.root_cells
    }

    /// Deepest level whose union contains the cell (0 if none, `None` if the
    /// cell lies outside `Q0`).
    pub fn cell_level(&self, cell: usize) -> Option<u32> {
        self.root_cells
            .iter()
            .position(|&c| c == cell)
            .map(|i| self.cell_level[i])
    }

    /// `|Q_{k,j} ∩ D_{k+1}|` for every cube of level `k`, from cell counts.
    pub fn level_union_measure(&self, k: u32) -> Result<Vec<f64>> {
        let cubes = self.level(k)?;
        Ok(cubes
            .iter()
            .map(|q| (q.cell_count - q.e_cells.len()) as f64 * self.cell_volume)
            .collect())
    }

    /// Checks every structural claim with integer cell arithmetic.
    pub fn check_invariants(&self) -> InvariantReport {
        let mut rep = InvariantReport {
            disjoint: true,
            nested: true,
            partition: true,
            root_half: true,
            cube_half: true,
            next_level_half: true,
            functional_bounds: true,
            failures: Vec::new(),
        };
        let root_count = self.root_cells.len();
        let mut owner = std::collections::HashMap::with_capacity(root_count);
        for &c in &self.root_cells {
            owner.insert(c, 0u32);
        }
        // disjointness within a level, nesting across levels
        for (i, level) in self.levels.iter().enumerate() {
            let k = i as u32 + 1;
            let mut seen = std::collections::HashSet::new();
            for q in level {
                for &c in &q.cells {
                    if !seen.insert(c) {
                        rep.disjoint = false;
                        rep.failures
                            .push(format!("level {k}: cubes overlap at cell {c}"));
                    }
                    match owner.get_mut(&c) {
                        Some(o) if *o + 1 == k => *o = k,
                        Some(_) => {
                            rep.nested = false;
                            rep.failures.push(format!(
                                "level {k}: cube {} not inside level {}",
                                q.cube,
                                k - 1
                            ));
                        }
                        None => {
                            rep.nested = false;
                            rep.failures
                                .push(format!("level {k}: cube {} leaves Q0", q.cube));
                        }
                    }
                }
            }
        }
        // partition of Q0 by E_0 and the E_{k,j}
        let mut count = std::collections::HashMap::with_capacity(root_count);
        for &c in self
            .e0_cells
            .iter()
            .chain(self.levels.iter().flatten().flat_map(|q| q.e_cells.iter()))
        {
            *count.entry(c).or_insert(0u32) += 1;
        }
        let exact =
            count.len() == root_count && self.root_cells.iter().all(|c| count.get(c) == Some(&1));
        if !exact {
            rep.partition = false;
            rep.failures
                .push("difference sets do not partition Q0".into());
        }
        if root_count > 2 * self.e0_cells.len() {
            rep.root_half = false;
            rep.failures.push(format!(
                "|Q0| > 2|E0| ({} cells vs {})",
                root_count,
                self.e0_cells.len()
            ));
        }
        for (i, level) in self.levels.iter().enumerate() {
            let k = i as i32 + 1;
            let lo = self.base_constant.powi(k);
            let hi = 4f64.powi(self.dim as i32) * lo;
            for q in level {
                if q.cell_count > 2 * q.e_cells.len() {
                    rep.cube_half = false;
                    rep.failures
                        .push(format!("level {k}: |Q| > 2|E| at {}", q.cube));
                }
                if 2 * (q.cell_count - q.e_cells.len()) > q.cell_count {
                    rep.next_level_half = false;
                    rep.failures
                        .push(format!("level {k}: |Q ∩ D_(k+1)| > |Q|/2 at {}", q.cube));
                }
                if !(q.functional > lo && q.functional <= hi) {
                    rep.functional_bounds = false;
                    rep.failures.push(format!(
                        "level {k}: functional {} outside ({lo}, {hi}] at {}",
                        q.functional, q.cube
                    ));
                }
            }
        }
        rep
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn setup() -> (GridSpec, Cube, DyadicGrid) {
        (
            GridSpec::new(1, 1.0, 64).unwrap(),
            Cube::interval(0.0, 1.0),
            DyadicGrid::standard(1),
        )
    }

    #[test]
    fn flat_data_selects_nothing() {
        let (spec, q0, grid) = setup();
        let chi = GridFunction::indicator(spec, &q0);
        let fam = cz_decompose(&chi, &chi, 2.0, 2.0, &q0, &grid, 8.0).unwrap();
        assert!(fam.levels.is_empty());
        assert_eq!(fam.e0_cells.len(), 32);
        assert!(fam.check_invariants().all_hold());
        assert_eq!(fam.level_union_measure(1), Err(Error::LevelAbsent(1)));
    }

    #[test]
    fn spike_selects_ancestors() {
        let (spec, q0, grid) = setup();
        let mut samples = vec![0.0; 64];
        samples[32 + 13] = 4000.0;
        let f = GridFunction::new(spec, samples).unwrap();
        let fam = cz_decompose(&f, &f, 2.0, 2.0, &q0, &grid, 8.0).unwrap();
        assert!(fam.depth() >= 1);
        for level in &fam.levels {
            assert!(level
                .iter()
                .any(|q| q.cube.contains_point(&spec.midpoint(45))));
        }
    }

    #[test]
    fn rejects_bad_input() {
        let (spec, q0, grid) = setup();
        let one = GridFunction::constant(spec, 1.0);
        let neg = GridFunction::constant(spec, -1.0);
        assert!(matches!(
            cz_decompose(&one, &one, 2.0, 3.0, &q0, &grid, 8.0),
            Err(Error::ConjugateMismatch { .. })
        ));
        assert_eq!(
            cz_decompose(&neg, &one, 2.0, 2.0, &q0, &grid, 8.0).unwrap_err(),
            Error::NonNegativityViolation
        );
        assert_eq!(
            cz_decompose(&one, &one, 2.0, 2.0, &Cube::interval(0.25, 0.5), &grid, 8.0).unwrap_err(),
            Error::NotInGrid
        );
    }
}
