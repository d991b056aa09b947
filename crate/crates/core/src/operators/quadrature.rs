//! Tensor Gauss–Legendre rules on rectangles.

/// Nodes and weights of the 8-point rule on `[-1, 1]`.
#[allow(clippy::excessive_precision)]
const GL8: [(f64, f64); 8] = [
    (-0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
    (-0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (-0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (-0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.183_434_642_495_649_8, 0.362_683_783_378_362_0),
    (0.525_532_409_916_329_0, 0.313_706_645_877_887_3),
    (0.796_666_477_413_626_7, 0.222_381_034_453_374_47),
    (0.960_289_856_497_536_3, 0.101_228_536_290_376_26),
];

/// Nodes and weights of the 4-point rule on `[-1, 1]`.
#[allow(clippy::excessive_precision)]
const GL4: [(f64, f64); 4] = [
    (-0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
    (-0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.339_981_043_584_856_3, 0.652_145_154_862_546_1),
    (0.861_136_311_594_052_6, 0.347_854_845_137_453_85),
];

pub(crate) fn rule(points: usize) -> &'static [(f64, f64)] {
    match points {
        4 => &GL4,
        _ => &GL8,
    }
}

/// One-dimensional rule on `[a, b]`.
pub(crate) fn gl_1d(f: impl Fn(f64) -> f64, a: f64, b: f64, points: usize) -> f64 {
    let half = 0.5 * (b - a);
    let mid = 0.5 * (a + b);
    rule(points)
        .iter()
        .map(|&(x, w)| w * f(mid + half * x))
        .sum::<f64>()
        * half
}

/// Tensor rule on `[x0, x1] × [y0, y1]`.
pub(crate) fn gl_2d(f: &impl Fn(f64, f64) -> f64, x: [f64; 2], y: [f64; 2], points: usize) -> f64 {
    let hx = 0.5 * (x[1] - x[0]);
    let mx = 0.5 * (x[0] + x[1]);
    let hy = 0.5 * (y[1] - y[0]);
    let my = 0.5 * (y[0] + y[1]);
    let r = rule(points);
    let mut acc = 0.0;
    for &(u, wu) in r {
        let mut row = 0.0;
        for &(v, wv) in r {
            row += wv * f(mx + hx * u, my + hy * v);
        }
        acc += wu * row;
    }
    acc * hx * hy
}

/// Adaptive tensor rule: split into four until the split and unsplit
/// estimates agree to `rel_tol`, or `depth` runs out.
pub(crate) fn adaptive_2d(
    f: &impl Fn(f64, f64) -> f64,
    x: [f64; 2],
    y: [f64; 2],
    rel_tol: f64,
    depth: u32,
) -> f64 {
    let whole = gl_2d(f, x, y, 8);
    adaptive_rec(f, x, y, whole, rel_tol, depth)
}

fn adaptive_rec(
    f: &impl Fn(f64, f64) -> f64,
    x: [f64; 2],
    y: [f64; 2],
    whole: f64,
    rel_tol: f64,
    depth: u32,
) -> f64 {
    let xm = 0.5 * (x[0] + x[1]);
    let ym = 0.5 * (y[0] + y[1]);
    let quads = [
        ([x[0], xm], [y[0], ym]),
        ([x[0], xm], [ym, y[1]]),
        ([xm, x[1]], [y[0], ym]),
        ([xm, x[1]], [ym, y[1]]),
    ];
    let parts: Vec<f64> = quads.iter().map(|(qx, qy)| gl_2d(f, *qx, *qy, 8)).collect();
    let split: f64 = parts.iter().sum();
    if depth == 0 || (split - whole).abs() <= rel_tol * split.abs() {
        return split;
    }
    quads
        .iter()
        .zip(parts)
        .map(|((qx, qy), p)| adaptive_rec(f, *qx, *qy, p, rel_tol, depth - 1))
        .sum()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn rules_integrate_polynomials() {
        let v = gl_1d(|x| x.powi(7) + 3.0 * x * x, 0.0, 2.0, 4);
        assert!((v - (32.0 + 8.0)).abs() < 1e-12);
        let w = gl_2d(&|x, y| x * x * y, [0.0, 1.0], [0.0, 2.0], 8);
        assert!((w - 2.0 / 3.0).abs() < 1e-14);
    }

    #[test]
    fn adaptive_handles_corner_singularity() {
        // ∫_0^1∫_0^1 (x² + y²)^{-1/4}: polar split gives 2 ∫_0^{π/4} ∫_0^{sec θ} r^{1/2} dr dθ
        let f = |x: f64, y: f64| (x * x + y * y).powf(-0.25);
        let v = adaptive_2d(&f, [0.0, 1.0], [0.0, 1.0], 1e-10, 30);
        let inner = |t: f64| (2.0 / 3.0) * (1.0 / t.cos()).powf(1.5);
        let exact = 2.0 * gl_1d(inner, 0.0, std::f64::consts::FRAC_PI_4, 8);
        assert!((v - exact).abs() < 1e-6 * exact, "{v} vs {exact}");
    }
}
