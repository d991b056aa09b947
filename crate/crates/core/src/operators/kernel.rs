//! Cell integrals of the Riesz kernel `|y|^{α-n}`.
//!
//! Offsets are centred: offset `j` is the cell `[(j - 1/2) h, (j + 1/2) h)^n`,
//! so `x_c ± j h` is again a cell midpoint and a sum over offsets integrates
//! piecewise-constant data exactly against the kernel.

use rayon::prelude::*;

use super::quadrature::adaptive_2d;
use crate::error::{Error, Result};
use crate::lattice::GridSpec;

const REL_TOL: f64 = 1e-8;
const MAX_DEPTH: u32 = 12;

pub(crate) fn check_alpha(alpha: f64, lo: f64, hi: f64) -> Result<()> {
    if !(alpha > lo && alpha < hi) {
        return Err(Error::AlphaOutOfRange { alpha, lo, hi });
    }
    Ok(())
}

/// `∫_a^b |y|^{α-1} dy` in one dimension, from the antiderivative
/// `sign(y) |y|^α / α`.
pub fn interval_weight(alpha: f64, a: f64, b: f64) -> f64 {
    let anti = |y: f64| y.signum() * y.abs().powf(alpha) / alpha;
    anti(b) - anti(a)
}

/// `∫` of `|y|^{α-2}` over the unit-scaled square `[j1 - 1/2, j1 + 1/2) × [j2 - 1/2, j2 + 1/2)`.
fn unit_square_weight(alpha: f64, j1: i64, j2: i64) -> f64 {
    let k = |x: f64, y: f64| (x * x + y * y).powf(0.5 * alpha - 1.0);
    if j1 == 0 && j2 == 0 {
        // Homogeneity: I = A + 2^{-α} I with A the integral over the square
        // minus its concentric half, which stays away from the origin.
        let mut annulus = 0.0;
        for a in 0..4 {
            for b in 0..4 {
                if (1..=2).contains(&a) && (1..=2).contains(&b) {
                    continue;
                }
                let x = [-0.5 + 0.25 * a as f64, -0.25 + 0.25 * a as f64];
                let y = [-0.5 + 0.25 * b as f64, -0.25 + 0.25 * b as f64];
                annulus += adaptive_2d(&k, x, y, REL_TOL, MAX_DEPTH);
            }
        }
        return annulus / (1.0 - 2f64.powf(-alpha));
    }
    let x = [j1 as f64 - 0.5, j1 as f64 + 0.5];
    let y = [j2 as f64 - 0.5, j2 as f64 + 0.5];
    adaptive_2d(&k, x, y, REL_TOL, MAX_DEPTH)
}

/// Kernel weights for every offset `j` with `|j_i| < N`.
#[derive(Debug, Clone, PartialEq)]
pub struct KernelTable {
    alpha: f64,
    spec: GridSpec,
    /// Offsets per axis: `2N - 1`, offset `j` stored at `j + N - 1`.
    width: usize,
    weights: Vec<f64>,
}

impl KernelTable {
    pub fn new(spec: GridSpec, alpha: f64) -> Result<Self> {
        let n = spec.dim() as f64;
        check_alpha(alpha, 0.0, n)?;
        let cells = spec.cells_per_axis() as i64;
        let width = (2 * cells - 1) as usize;
        let h = spec.cell_side();
        let weights = if spec.dim() == 1 {
            (0..width)
                .map(|i| {
                    let j = i as f64 - (cells - 1) as f64;
                    interval_weight(alpha, (j - 0.5) * h, (j + 0.5) * h)
                })
                .collect()
        } else {
            // Unit-scaled weights for 0 <= j2 <= j1, then scale by h^α and
            // fill by the eight symmetries of the square.
            let pairs: Vec<(i64, i64)> = (0..cells)
                .flat_map(|j1| (0..=j1).map(move |j2| (j1, j2)))
                .collect();
            let base: Vec<f64> = pairs
                .par_iter()
                .map(|&(j1, j2)| unit_square_weight(alpha, j1, j2))
                .collect();
            let scale = h.powf(alpha);
            let mut w = vec![0.0; width * width];
            for (&(j1, j2), &v) in pairs.iter().zip(&base) {
                for (a, b) in [(j1, j2), (j2, j1)] {
                    for sa in [-1, 1] {
                        for sb in [-1, 1] {
                            let ia = (sa * a + cells - 1) as usize;
                            let ib = (sb * b + cells - 1) as usize;
                            w[ia * width + ib] = v * scale;
                        }
                    }
                }
            }
            w
        };
        Ok(Self {
            alpha,
            spec,
            width,
            weights,
        })
    }

    pub fn alpha(&self) -> f64 {
        self.alpha
    }

    pub fn spec(&self) -> &GridSpec {
        &self.spec
    }

    /// Weight of offset `j` (components in `(-N, N)`).
    pub fn weight(&self, j: [i64; 2]) -> f64 {
        let c = self.spec.cells_per_axis() as i64 - 1;
        if self.spec.dim() == 1 {
            self.weights[(j[0] + c) as usize]
        } else {
            self.weights[(j[0] + c) as usize * self.width + (j[1] + c) as usize]
        }
    }

    /// Euclidean length of the centre of offset `j`.
    pub fn offset_length(&self, j: [i64; 2]) -> f64 {
        let h = self.spec.cell_side();
        let d = self.spec.dim();
        (0..d)
            .map(|i| (j[i] as f64 * h).powi(2))
            .sum::<f64>()
            .sqrt()
    }
}

/// Convenience wrapper.
pub fn kernel_table(spec: GridSpec, alpha: f64) -> Result<KernelTable> {
    KernelTable::new(spec, alpha)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn one_dimensional_weights() {
        let h: f64 = 0.125;
        assert!((interval_weight(0.5, 0.0, h) - 2.0 * h.sqrt()).abs() < 1e-15);
        assert!((interval_weight(0.5, -h, 0.0) - interval_weight(0.5, 0.0, h)).abs() < 1e-15);
        let near_one = interval_weight(1.0 - 1e-9, 0.3, 0.3 + h);
        assert!((near_one - h).abs() < 1e-8);
        let spec = GridSpec::new(1, 1.0, 16).unwrap();
        let t = KernelTable::new(spec, 0.5).unwrap();
        for j in 1..16 {
            assert_eq!(t.weight([j, 0]), t.weight([-j, 0]));
        }
        assert!((t.weight([0, 0]) - 4.0 * (h / 2.0).sqrt() * 0.5 * 2.0).abs() < 1e-14);
    }

    #[test]
    fn alpha_range() {
        let spec = GridSpec::new(1, 1.0, 16).unwrap();
        assert!(matches!(
            KernelTable::new(spec, 1.0),
            Err(Error::AlphaOutOfRange { .. })
        ));
        assert!(matches!(
            KernelTable::new(spec, 0.0),
            Err(Error::AlphaOutOfRange { .. })
        ));
    }

    #[test]
    fn two_dimensional_origin_cell() {
        // α = 1: ∫_{[-1/2,1/2)^2} |y|^{-1} = 4 ln(1 + √2) on the unit square.
        let w = unit_square_weight(1.0, 0, 0);
        let exact = 4.0 * (1.0 + 2f64.sqrt()).ln();
        assert!((w - exact).abs() < 1e-7 * exact, "{w} vs {exact}");
    }

    #[test]
    fn two_dimensional_symmetry_and_positivity() {
        let spec = GridSpec::new(2, 1.0, 8).unwrap();
        let t = KernelTable::new(spec, 0.7).unwrap();
        for a in -7..8 {
            for b in -7..8 {
                let w = t.weight([a, b]);
                assert!(w > 0.0 && w.is_finite());
                assert_eq!(w, t.weight([-a, -b]));
                assert_eq!(w, t.weight([b, a]));
            }
        }
    }
}
