//! Direct-summation fractional integrals: `BI_α`, `I_α` and `I_{α,2}`.
//!
//! Outputs are sampled at cell midpoints. Each output cell is a sum over
//! offsets in a fixed order with compensated summation, so results do not
//! depend on how cells are scheduled across threads.

use rayon::prelude::*;

use super::kernel::{check_alpha, KernelTable};
use super::quadrature::gl_1d;
use crate::error::{Error, Result};
use crate::lattice::{GridFunction, GridSpec};
use crate::summation::NeumaierSum;

fn same_spec(f: &GridFunction, g: &GridFunction) -> Result<()> {
    if f.spec() != g.spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}

fn check_table(table: &KernelTable, f: &GridFunction) -> Result<()> {
    if table.spec() != f.spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}

/// Which offsets of the bilinear sum to keep.
#[derive(Debug, Clone, Copy, PartialEq)]
enum Part {
    All,
    /// Offsets whose centre has length `<= radius`.
    Within(f64),
    /// Offsets whose centre has length `> radius`.
    Beyond(f64),
}

impl Part {
    fn keeps(&self, len: f64) -> bool {
        match *self {
            Part::All => true,
            Part::Within(r) => len <= r,
            Part::Beyond(r) => len > r,
        }
    }
}

fn bilinear_sum(
    f: &GridFunction,
    g: &GridFunction,
    table: &KernelTable,
    part: Part,
) -> GridFunction {
    let spec = *f.spec();
    let n = spec.cells_per_axis() as i64;
    let fs = f.samples();
    let gs = g.samples();
    let out: Vec<f64> = (0..spec.cell_count())
        .into_par_iter()
        .map(|cell| {
            let c = spec.coords(cell);
            let (cx, cy) = (c[0] as i64, c[1] as i64);
            let mut acc = NeumaierSum::new();
            if spec.dim() == 1 {
                // need 0 <= cx - j < n and 0 <= cx + j < n
                let lo = (cx - (n - 1)).max(-cx);
                let hi = cx.min(n - 1 - cx);
                for j in lo..=hi {
                    let a = fs[(cx - j) as usize];
                    let b = gs[(cx + j) as usize];
                    if a != 0.0 && b != 0.0 && part.keeps(table.offset_length([j, 0])) {
                        acc.add(a * b * table.weight([j, 0]));
                    }
                }
            } else {
                let lox = (cx - (n - 1)).max(-cx);
                let hix = cx.min(n - 1 - cx);
                let loy = (cy - (n - 1)).max(-cy);
                let hiy = cy.min(n - 1 - cy);
                for jx in lox..=hix {
                    for jy in loy..=hiy {
                        let a = fs[spec.index([(cx - jx) as usize, (cy - jy) as usize])];
                        let b = gs[spec.index([(cx + jx) as usize, (cy + jy) as usize])];
                        if a != 0.0 && b != 0.0 && part.keeps(table.offset_length([jx, jy])) {
                            acc.add(a * b * table.weight([jx, jy]));
                        }
                    }
                }
            }
            acc.value()
        })
        .collect();
    GridFunction::new(spec, out).expect("finite sums of finite data")
}

/// `BI_α(f, g)(x) = ∫ f(x - y) g(x + y) |y|^{α-n} dy` at every cell midpoint.
pub fn bi_frac(f: &GridFunction, g: &GridFunction, alpha: f64) -> Result<GridFunction> {
    same_spec(f, g)?;
    let table = KernelTable::new(*f.spec(), alpha)?;
    Ok(bilinear_sum(f, g, &table, Part::All))
}

/// [`bi_frac`] with a precomputed kernel table.
pub fn bi_frac_with(
    f: &GridFunction,
    g: &GridFunction,
    table: &KernelTable,
) -> Result<GridFunction> {
    same_spec(f, g)?;
    check_table(table, f)?;
    Ok(bilinear_sum(f, g, table, Part::All))
}

/// The local and global parts of `BI_α(f, g)`: offsets with centre length
/// `<= radius` and `> radius`. Their sum is [`bi_frac_with`].
pub fn bi_frac_split(
    f: &GridFunction,
    g: &GridFunction,
    table: &KernelTable,
    radius: f64,
) -> Result<(GridFunction, GridFunction)> {
    same_spec(f, g)?;
    check_table(table, f)?;
    Ok((
        bilinear_sum(f, g, table, Part::Within(radius)),
        bilinear_sum(f, g, table, Part::Beyond(radius)),
    ))
}

/// `I_α f(x) = ∫ f(y) |x - y|^{α-n} dy` at every cell midpoint.
pub fn frac_int(f: &GridFunction, alpha: f64) -> Result<GridFunction> {
    let table = KernelTable::new(*f.spec(), alpha)?;
    frac_int_with(f, &table)
}

/// [`frac_int`] with a precomputed kernel table.
pub fn frac_int_with(f: &GridFunction, table: &KernelTable) -> Result<GridFunction> {
    check_table(table, f)?;
    let spec = *f.spec();
    let n = spec.cells_per_axis() as i64;
    let fs = f.samples();
    let out: Vec<f64> = (0..spec.cell_count())
        .into_par_iter()
        .map(|cell| {
            let c = spec.coords(cell);
            let mut acc = NeumaierSum::new();
            if spec.dim() == 1 {
                for y in 0..n {
                    let v = fs[y as usize];
                    if v != 0.0 {
                        acc.add(v * table.weight([c[0] as i64 - y, 0]));
                    }
                }
            } else {
                for y0 in 0..n {
                    for y1 in 0..n {
                        let v = fs[spec.index([y0 as usize, y1 as usize])];
                        if v != 0.0 {
                            acc.add(v * table.weight([c[0] as i64 - y0, c[1] as i64 - y1]));
                        }
                    }
                }
            }
            acc.value()
        })
        .collect();
    Ok(GridFunction::new(spec, out).expect("finite sums of finite data"))
}

/// Offsets (per axis, in cells) below which the one-dimensional pair table
/// uses the closed form instead of Gauss–Legendre.
const NEAR: i64 = 8;

/// Split the centred cell `[(j - 1/2) h, (j + 1/2) h)` into pieces of `|u|`.
fn abs_pieces(j: i64, h: f64) -> Vec<(f64, f64)> {
    let a = (j as f64 - 0.5) * h;
    let b = (j as f64 + 0.5) * h;
    if a >= 0.0 {
        vec![(a, b)]
    } else if b <= 0.0 {
        vec![(-b, -a)]
    } else {
        vec![(0.0, -a), (0.0, b)]
    }
}

/// `∫_p^q ∫_r^t (u + v)^{α-2} du dv` for `u, v >= 0`, via the second
/// antiderivative of `t^{α-2}`.
fn pair_closed_form(alpha: f64, u: (f64, f64), v: (f64, f64)) -> f64 {
    let g = |t: f64| -> f64 {
        if t <= 0.0 {
            0.0
        } else if (alpha - 1.0).abs() < 1e-12 {
            t * t.ln() - t
        } else {
            t.powf(alpha) / ((alpha - 1.0) * alpha)
        }
    };
    g(u.1 + v.1) - g(u.0 + v.1) - g(u.1 + v.0) + g(u.0 + v.0)
}

/// `∫_{cell j1} ∫_{cell j2} (|u| + |v|)^{α-2} du dv` in one dimension.
fn pair_weight_1d(alpha: f64, j1: i64, j2: i64, h: f64) -> f64 {
    if j1.abs().max(j2.abs()) <= NEAR {
        let mut acc = 0.0;
        for u in abs_pieces(j1, h) {
            for v in abs_pieces(j2, h) {
                acc += pair_closed_form(alpha, u, v);
            }
        }
        acc
    } else {
        let (a1, b1) = ((j1 as f64 - 0.5) * h, (j1 as f64 + 0.5) * h);
        let (a2, b2) = ((j2 as f64 - 0.5) * h, (j2 as f64 + 0.5) * h);
        gl_1d(
            |u| gl_1d(|v| (u.abs() + v.abs()).powf(alpha - 2.0), a2, b2, 4),
            a1,
            b1,
            4,
        )
    }
}

/// Pair weights in two dimensions: midpoint rule, with the singular pair
/// split once into `4^n` sub-cells.
fn pair_weight_2d(alpha: f64, j1: [i64; 2], j2: [i64; 2], h: f64) -> f64 {
    let e = alpha - 4.0;
    let norm = |a: [f64; 2]| (a[0] * a[0] + a[1] * a[1]).sqrt();
    let vol = h.powi(4);
    if j1 == [0, 0] && j2 == [0, 0] {
        let q = 0.25 * h;
        let mut acc = 0.0;
        for &u0 in &[-q, q] {
            for &u1 in &[-q, q] {
                for &v0 in &[-q, q] {
                    for &v1 in &[-q, q] {
                        acc += (norm([u0, u1]) + norm([v0, v1])).powf(e);
                    }
                }
            }
        }
        return acc * vol / 16.0;
    }
    let u = [j1[0] as f64 * h, j1[1] as f64 * h];
    let v = [j2[0] as f64 * h, j2[1] as f64 * h];
    (norm(u) + norm(v)).powf(e) * vol
}

/// `I_{α,2}(f1, f2)(x) = ∫∫ f1(y1) f2(y2) (|x - y1| + |x - y2|)^{α-2n} dy1 dy2`.
///
/// Cost is `O(N^{3n})` after an `O(N^{2n})` pair table.
pub fn multi_frac_int(f1: &GridFunction, f2: &GridFunction, alpha: f64) -> Result<GridFunction> {
    same_spec(f1, f2)?;
    let spec = *f1.spec();
    let dim = spec.dim();
    check_alpha(alpha, 0.0, 2.0 * dim as f64)?;
    let n = spec.cells_per_axis() as i64;
    let h = spec.cell_side();
    let width = (2 * n - 1) as usize;
    let offsets: Vec<[i64; 2]> = if dim == 1 {
        (-(n - 1)..n).map(|j| [j, 0]).collect()
    } else {
        (-(n - 1)..n)
            .flat_map(|a| (-(n - 1)..n).map(move |b| [a, b]))
            .collect()
    };
    let m = offsets.len();
    // table[o1 * m + o2], symmetric in (o1, o2)
    let table: Vec<f64> = (0..m * m)
        .into_par_iter()
        .map(|k| {
            let (o1, o2) = (offsets[k / m], offsets[k % m]);
            if dim == 1 {
                pair_weight_1d(alpha, o1[0], o2[0], h)
            } else {
                pair_weight_2d(alpha, o1, o2, h)
            }
        })
        .collect();
    let offset_index = |j: [i64; 2]| -> usize {
        if dim == 1 {
            (j[0] + n - 1) as usize
        } else {
            (j[0] + n - 1) as usize * width + (j[1] + n - 1) as usize
        }
    };
    let support = |f: &GridFunction| -> Vec<usize> {
        (0..spec.cell_count())
            .filter(|&i| f.samples()[i] != 0.0)
            .collect()
    };
    let s1 = support(f1);
    let s2 = support(f2);
    let out: Vec<f64> = (0..spec.cell_count())
        .into_par_iter()
        .map(|cell| {
            let c = spec.coords(cell);
            let rel = |y: usize| {
                let d = spec.coords(y);
                [c[0] as i64 - d[0] as i64, c[1] as i64 - d[1] as i64]
            };
            let mut acc = NeumaierSum::new();
            for &y1 in &s1 {
                let row = offset_index(rel(y1)) * m;
                let a = f1.samples()[y1];
                for &y2 in &s2 {
                    acc.add(a * f2.samples()[y2] * table[row + offset_index(rel(y2))]);
                }
            }
            acc.value()
        })
        .collect();
    Ok(GridFunction::new(spec, out).expect("finite sums of finite data"))
}

/// Shift by whole cells (zero fill), used for covariance checks.
pub fn shift_cells(f: &GridFunction, by: [i64; 2]) -> GridFunction {
    let spec: GridSpec = *f.spec();
    let n = spec.cells_per_axis() as i64;
    let mut out = vec![0.0; spec.cell_count()];
    for (i, v) in out.iter_mut().enumerate() {
        let c = spec.coords(i);
        let src = [c[0] as i64 - by[0], c[1] as i64 - by[1]];
        let inside = src[0] >= 0 && src[0] < n && (spec.dim() == 1 || (src[1] >= 0 && src[1] < n));
        if inside {
            let s = if spec.dim() == 1 {
                [src[0] as usize, 0]
            } else {
                [src[0] as usize, src[1] as usize]
            };
            *v = f.samples()[spec.index(s)];
        }
    }
    GridFunction::new(spec, out).expect("shifted samples are finite")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::Cube;

    #[test]
    fn zero_in_zero_out() {
        let spec = GridSpec::new(1, 1.0, 32).unwrap();
        let z = GridFunction::zeros(spec);
        let one = GridFunction::constant(spec, 1.0);
        assert!(bi_frac(&z, &one, 0.5)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.0));
        assert!(frac_int(&z, 0.5)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.0));
        assert!(multi_frac_int(&z, &one, 1.0)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| v == 0.0));
    }

    #[test]
    fn split_adds_up() {
        let spec = GridSpec::new(1, 1.0, 32).unwrap();
        let f = GridFunction::from_fn(spec, |x| 1.0 + x[0].sin()).unwrap();
        let t = KernelTable::new(spec, 0.4).unwrap();
        let full = bi_frac_with(&f, &f, &t).unwrap();
        let (loc, glob) = bi_frac_split(&f, &f, &t, 0.3).unwrap();
        for i in 0..32 {
            let s = loc.samples()[i] + glob.samples()[i];
            assert!((s - full.samples()[i]).abs() <= 1e-13 * full.samples()[i]);
        }
    }

    #[test]
    fn pair_closed_form_matches_quadrature() {
        let h = 0.1;
        for (j1, j2) in [(3, 5), (8, -2), (1, 1)] {
            let exact = pair_weight_1d(0.6, j1, j2, h);
            let (a1, b1) = ((j1 as f64 - 0.5) * h, (j1 as f64 + 0.5) * h);
            let (a2, b2) = ((j2 as f64 - 0.5) * h, (j2 as f64 + 0.5) * h);
            let quad = gl_1d(
                |u| gl_1d(|v| (u.abs() + v.abs()).powf(-1.4), a2, b2, 8),
                a1,
                b1,
                8,
            );
            assert!(
                (exact - quad).abs() < 1e-9 * exact,
                "{j1} {j2}: {exact} vs {quad}"
            );
        }
    }

    #[test]
    fn multi_symmetric() {
        let spec = GridSpec::new(1, 1.0, 16).unwrap();
        let f = GridFunction::indicator(spec, &Cube::interval(-0.5, 1.0));
        let g = GridFunction::from_fn(spec, |x| (x[0] + 1.0).powi(2)).unwrap();
        let a = multi_frac_int(&f, &g, 0.8).unwrap();
        let b = multi_frac_int(&g, &f, 0.8).unwrap();
        for (x, y) in a.samples().iter().zip(b.samples()) {
            assert!((x - y).abs() <= 1e-12 * x.abs().max(1e-300));
        }
    }
}
