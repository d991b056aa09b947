//! Maximal operators as exact maxima over a finite cube family, and the
//! sparse dyadic sum that dominates the local part of `BI_α`.

use rayon::prelude::*;

use super::kernel::check_alpha;
use crate::error::{check_conjugate, Error, Result};
use crate::family::FamilyIndex;
use crate::geometry::{Cube, DyadicGrid};
use crate::lattice::GridFunction;
use crate::sparse::DyadicTree;

fn check_index(index: &FamilyIndex, f: &GridFunction) -> Result<()> {
    if index.family().spec() != f.spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}

fn scatter(index: &FamilyIndex, values: &[f64]) -> GridFunction {
    let (best, _) = index.scatter_max(values);
    GridFunction::new(*index.family().spec(), best).expect("maxima of finite values")
}

/// `Mf(x) = max_{Q ∋ x} (1/|Q|) ∫_Q |f|` over the family.
pub fn maximal(f: &GridFunction, index: &FamilyIndex) -> Result<GridFunction> {
    check_index(index, f)?;
    Ok(scatter(index, &index.power_means(f, 1.0)))
}

/// `M_α f(x) = max_{Q ∋ x} |Q|^{α/n} (1/|Q|) ∫_Q |f|`.
pub fn frac_maximal(f: &GridFunction, alpha: f64, index: &FamilyIndex) -> Result<GridFunction> {
    check_index(index, f)?;
    let n = f.spec().dim() as f64;
    check_alpha(alpha, 0.0, n)?;
    let means = index.power_means(f, 1.0);
    let values: Vec<f64> = index
        .cubes()
        .iter()
        .zip(&means)
        .map(|(q, m)| q.measure().powf(alpha / n) * m)
        .collect();
    Ok(scatter(index, &values))
}

/// `M^{(p)} f(x) = max_{Q ∋ x} ((1/|Q|) ∫_Q |f|^p)^{1/p}`, `p > 1`.
pub fn p_maximal(f: &GridFunction, p: f64, index: &FamilyIndex) -> Result<GridFunction> {
    check_index(index, f)?;
    if !(p > 1.0) {
        return Err(Error::POutOfRange(p));
    }
    let values: Vec<f64> = index
        .power_means(f, p)
        .into_iter()
        .map(|m| m.powf(1.0 / p))
        .collect();
    Ok(scatter(index, &values))
}

/// `M_{α,R}(f1, f2)(x) = max_{Q ∋ x} ℓ(Q)^α ∏ ((1/|Q|) ∫_Q |f_i|^{r_i})^{1/r_i}`.
pub fn multi_maximal(
    f1: &GridFunction,
    f2: &GridFunction,
    alpha: f64,
    r1: f64,
    r2: f64,
    index: &FamilyIndex,
) -> Result<GridFunction> {
    check_index(index, f1)?;
    check_index(index, f2)?;
    let n = f1.spec().dim() as f64;
    if !(0.0..2.0 * n).contains(&alpha) {
        return Err(Error::AlphaOutOfRange {
            alpha,
            lo: 0.0,
            hi: 2.0 * n,
        });
    }
    for r in [r1, r2] {
        if !(r > 0.0) {
            return Err(Error::POutOfRange(r));
        }
    }
    let a = index.power_means(f1, r1);
    let b = index.power_means(f2, r2);
    let values: Vec<f64> = index
        .cubes()
        .iter()
        .enumerate()
        .map(|(i, q)| q.side().powf(alpha) * a[i].powf(1.0 / r1) * b[i].powf(1.0 / r2))
        .collect();
    Ok(scatter(index, &values))
}

/// `M̃^q_{α,r,s}(f, g; w1, w2)(x) = max_{Q ∋ x} ℓ(Q)^α m_{3Q}(|f|^r, |g|^s)
/// ((1/|Q|) ∫_Q (w1 w2)^q)^{1/q}`. The index must carry the 3× dilation.
#[allow(clippy::too_many_arguments)]
pub fn weighted_bilinear_maximal(
    f: &GridFunction,
    g: &GridFunction,
    w1: &GridFunction,
    w2: &GridFunction,
    alpha: f64,
    r: f64,
    s: f64,
    q: f64,
    index: &FamilyIndex,
) -> Result<GridFunction> {
    check_conjugate(r, s)?;
    for h in [f, g, w1, w2] {
        check_index(index, h)?;
    }
    if !w1.is_positive() || !w2.is_positive() {
        return Err(Error::NonPositiveWeight);
    }
    if !(q > 0.0) {
        return Err(Error::POutOfRange(q));
    }
    let nu = w1.mul(w2)?;
    let fr = index.dilated_power_means(f, r);
    let gs = index.dilated_power_means(g, s);
    let wq = index.power_means(&nu, q);
    let values: Vec<f64> = index
        .cubes()
        .iter()
        .enumerate()
        .map(|(i, c)| {
            c.side().powf(alpha) * fr[i].powf(1.0 / r) * gs[i].powf(1.0 / s) * wq[i].powf(1.0 / q)
        })
        .collect();
    Ok(scatter(index, &values))
}

/// `Σ_{Q ∈ D(Q0)} ℓ(Q)^α m_{3Q}(|f|^r, |g|^s) χ_Q(x)`, down to single cells;
/// zero outside `Q0`.
#[allow(clippy::too_many_arguments)]
pub fn sparse_bound(
    f: &GridFunction,
    g: &GridFunction,
    alpha: f64,
    r: f64,
    s: f64,
    q0: &Cube,
    grid: &DyadicGrid,
) -> Result<GridFunction> {
    check_conjugate(r, s)?;
    if f.spec() != g.spec() {
        return Err(Error::SpecMismatch);
    }
    if !f.is_nonnegative() || !g.is_nonnegative() {
        return Err(Error::NonNegativityViolation);
    }
    let tree = DyadicTree::new(*f.spec(), q0, grid)?;
    let m = tree.functional(f, g, r, s);
    let sides: Vec<f64> = (0..tree.depths)
        .map(|d| tree.node_cube(d, 0).side().powf(alpha))
        .collect();
    let cells = tree.node_cells(0, 0);
    let sums: Vec<(usize, f64)> = cells
        .par_iter()
        .map(|&cell| {
            // coarse to fine, fixed order
            let mut acc = crate::summation::NeumaierSum::new();
            for d in 0..tree.depths {
                acc.add(sides[d as usize] * m[d as usize][tree.node_of_cell(d, cell)]);
            }
            (cell, acc.value())
        })
        .collect();
    let mut out = vec![0.0; f.spec().cell_count()];
    for (cell, v) in sums {
        out[cell] = v;
    }
    Ok(GridFunction::new(*f.spec(), out).expect("finite sums"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::CubeFamily;
    use crate::lattice::GridSpec;

    #[test]
    fn constant_data() {
        let spec = GridSpec::new(1, 1.0, 16).unwrap();
        let idx = FamilyIndex::new(CubeFamily::lattice(spec)).with_dilation(3.0);
        let c = GridFunction::constant(spec, -2.5);
        assert!(maximal(&c, &idx)
            .unwrap()
            .samples()
            .iter()
            .all(|&v| (v - 2.5).abs() < 1e-15));
        let one = GridFunction::constant(spec, 1.0);
        let m = multi_maximal(&one, &one, 0.0, 1.0, 1.0, &idx).unwrap();
        assert!(m.samples().iter().all(|&v| (v - 1.0).abs() < 1e-15));
        let m = multi_maximal(&one, &one, 0.5, 1.0, 1.0, &idx).unwrap();
        assert!(m.samples().iter().all(|&v| (v - 2f64.sqrt()).abs() < 1e-14));
    }

    #[test]
    fn indicator_at_two() {
        let spec = GridSpec::new(1, 4.0, 64).unwrap();
        let idx = FamilyIndex::new(CubeFamily::lattice(spec));
        let chi = GridFunction::indicator(spec, &Cube::interval(0.0, 1.0));
        let m = maximal(&chi, &idx).unwrap();
        // x = 2 is a cell boundary; the cell just to its left has the same value
        let right = spec.locate(&[2.0 + 1e-9]).unwrap();
        assert!((m.samples()[right] - 1.0 / (2.0 + spec.cell_side())).abs() < 1e-14);
        assert!((m.node_value(&[2.0]) - 0.5).abs() < 0.02);
    }

    #[test]
    fn sparse_bound_of_flat_data() {
        let spec = GridSpec::new(1, 2.0, 64).unwrap();
        let q0 = Cube::interval(0.0, 1.0);
        let one = GridFunction::constant(spec, 1.0);
        let sb = sparse_bound(&one, &one, 0.5, 2.0, 2.0, &q0, &DyadicGrid::standard(1)).unwrap();
        let series: f64 = (0..5).map(|k| 2f64.powi(-k).powf(0.5)).sum();
        let inside = spec.locate(&[0.3]).unwrap();
        assert!((sb.samples()[inside] - series).abs() < 1e-13);
        assert_eq!(sb.samples()[spec.locate(&[-0.3]).unwrap()], 0.0);
    }
}
