//! Independent oracles: closed forms for the singular integrals and
//! exhaustive cube enumeration for maximal operators and weight constants.
//! Shared by the core oracle tests and the acceptance suite.
#![allow(dead_code)]

use bifrac::weights::conjugate;
use bifrac::*;

// cells [i, j) of a 1-D lattice as a plain list of samples
fn window(f: &GridFunction, i: usize, j: usize) -> &[f64] {
    &f.samples()[i..j]
}

fn mean_pow(s: &[f64], p: f64) -> f64 {
    s.iter().map(|v| v.abs().powf(p)).sum::<f64>() / s.len() as f64
}

pub fn rel(a: f64, b: f64) -> f64 {
    if a == b {
        0.0
    } else {
        (a - b).abs() / a.abs().max(b.abs())
    }
}

fn spec32() -> GridSpec {
    GridSpec::new(1, 1.0, 32).unwrap()
}

// deterministic rough data without pulling in a generator
fn rough(spec: GridSpec, seed: u64, zero_every: usize) -> GridFunction {
    let mut x = seed.wrapping_mul(0x9E37_79B9_7F4A_7C15) | 1;
    let samples = (0..spec.cell_count())
        .map(|i| {
            x ^= x << 13;
            x ^= x >> 7;
            x ^= x << 17;
            if zero_every > 0 && i % zero_every == 0 {
                0.0
            } else {
                0.05 + (x >> 11) as f64 / (1u64 << 53) as f64 * 3.0
            }
        })
        .collect();
    GridFunction::new(spec, samples).unwrap()
}

/// For every cell, the max over all aligned intervals `[i, j)` containing it.
fn brute_max(n: usize, value: impl Fn(usize, usize) -> f64) -> Vec<f64> {
    (0..n)
        .map(|c| {
            let mut best = f64::NEG_INFINITY;
            for i in 0..=c {
                for j in c + 1..=n {
                    best = best.max(value(i, j));
                }
            }
            best
        })
        .collect()
}

fn worst(got: &GridFunction, want: &[f64]) -> f64 {
    got.samples()
        .iter()
        .zip(want)
        .map(|(g, w)| rel(*g, *w))
        .fold(0.0, f64::max)
}

/// Largest relative difference per operator between the library and
/// enumeration over every aligned interval, at `n = 1`, `N = 32`.
pub fn maximal_discrepancies() -> Vec<(&'static str, f64)> {
    let spec = spec32();
    let n = spec.cells_per_axis();
    let h = spec.cell_side();
    let idx = FamilyIndex::new(CubeFamily::lattice(spec)).with_dilation(3.0);
    let f = rough(spec, 1, 5);
    let g = rough(spec, 2, 7);
    let w1 = rough(spec, 3, 0);
    let w2 = rough(spec, 4, 0);
    let len = |i: usize, j: usize| (j - i) as f64 * h;
    let mut out = Vec::new();

    out.push((
        "M",
        worst(
            &maximal(&f, &idx).unwrap(),
            &brute_max(n, |i, j| mean_pow(window(&f, i, j), 1.0)),
        ),
    ));
    let alpha = 0.3;
    out.push((
        "M_alpha",
        worst(
            &frac_maximal(&f, alpha, &idx).unwrap(),
            &brute_max(n, |i, j| {
                len(i, j).powf(alpha) * mean_pow(window(&f, i, j), 1.0)
            }),
        ),
    ));
    out.push((
        "M^(p)",
        worst(
            &p_maximal(&f, 2.5, &idx).unwrap(),
            &brute_max(n, |i, j| mean_pow(window(&f, i, j), 2.5).powf(0.4)),
        ),
    ));
    let (r1, r2) = (1.5, 3.0);
    out.push((
        "M_alpha,R",
        worst(
            &multi_maximal(&f, &g, 0.7, r1, r2, &idx).unwrap(),
            &brute_max(n, |i, j| {
                len(i, j).powf(0.7)
                    * mean_pow(window(&f, i, j), r1).powf(1.0 / r1)
                    * mean_pow(window(&g, i, j), r2).powf(1.0 / r2)
            }),
        ),
    ));

    // 3Q of an aligned interval is aligned; clip it to the box but divide by |3Q|
    let (r, s, q) = (2.0, 2.0, 1.7);
    let clipped = |v: &GridFunction, p: f64, i: usize, j: usize| {
        let k = j - i;
        let lo = i.saturating_sub(k);
        let hi = (j + k).min(n);
        window(v, lo, hi)
            .iter()
            .map(|x| x.abs().powf(p))
            .sum::<f64>()
            / (3 * k) as f64
    };
    let nu: Vec<f64> = w1
        .samples()
        .iter()
        .zip(w2.samples())
        .map(|(a, b)| a * b)
        .collect();
    out.push((
        "weighted bilinear",
        worst(
            &weighted_bilinear_maximal(&f, &g, &w1, &w2, 0.4, r, s, q, &idx).unwrap(),
            &brute_max(n, |i, j| {
                len(i, j).powf(0.4)
                    * clipped(&f, r, i, j).powf(1.0 / r)
                    * clipped(&g, s, i, j).powf(1.0 / s)
                    * mean_pow(&nu[i..j], q).powf(1.0 / q)
            }),
        ),
    ));
    out
}

pub fn step_weight(spec: GridSpec, values: &[f64]) -> GridFunction {
    let n = spec.cells_per_axis();
    let block = n / values.len();
    GridFunction::new(spec, (0..n).map(|i| values[i / block]).collect()).unwrap()
}

/// Max over all aligned intervals.
fn brute_sup(n: usize, value: impl Fn(usize, usize) -> f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for i in 0..n {
        for j in i + 1..=n {
            best = best.max(value(i, j));
        }
    }
    best
}

/// Max over nested aligned pairs `[i, j) ⊆ [a, b)`.
fn brute_pair_sup(n: usize, value: impl Fn(usize, usize, usize, usize) -> f64) -> f64 {
    let mut best = f64::NEG_INFINITY;
    for a in 0..n {
        for b in a + 1..=n {
            for i in a..b {
                for j in i + 1..=b {
                    best = best.max(value(i, j, a, b));
                }
            }
        }
    }
    best
}

/// Largest relative difference per constant between the library and
/// enumeration, for step weights at `N = 32`.
pub fn weight_discrepancies() -> Vec<(&'static str, f64)> {
    let spec = spec32();
    let n = spec.cells_per_axis();
    let h = spec.cell_side();
    let idx = FamilyIndex::new(CubeFamily::lattice(spec));
    let pairs = PairFamily::nested(&idx);
    let w1 = step_weight(spec, &[1.0, 3.0, 0.5, 2.0]);
    let w2 = step_weight(spec, &[0.25, 1.0, 4.0, 1.5, 1.0, 0.75, 2.0, 1.0]);
    let v = step_weight(spec, &[2.0, 1.0]);
    let wv = WeightVector::new(w1.clone(), w2.clone()).unwrap();
    let nu: Vec<f64> = w1
        .samples()
        .iter()
        .zip(w2.samples())
        .map(|(a, b)| a * b)
        .collect();
    let (s1, s2) = (w1.samples(), w2.samples());
    let dual = |s: &[f64], p: f64| {
        let pc = conjugate(p);
        mean_pow(s, -pc).powf(1.0 / pc)
    };
    let mut out = Vec::new();

    let p = 2.5;
    let want = brute_sup(n, |i, j| {
        mean_pow(&s1[i..j], 1.0) * mean_pow(&s1[i..j], 1.0 - conjugate(p)).powf(p - 1.0)
    });
    out.push(("A_p", rel(ap_constant(&w1, p, &idx).unwrap().value, want)));

    let want = brute_sup(n, |i, j| {
        mean_pow(&s1[i..j], 1.0) / s1[i..j].iter().cloned().fold(f64::INFINITY, f64::min)
    });
    out.push(("A_1", rel(ap_constant(&w1, 1.0, &idx).unwrap().value, want)));

    let want = brute_sup(n, |i, j| {
        mean_pow(&s2[i..j], 4.0).powf(0.25) * dual(&s2[i..j], 2.0)
    });
    out.push((
        "A_(p,q)",
        rel(apq_constant(&w2, 2.0, 4.0, &idx).unwrap().value, want),
    ));

    let (p1, p2, q) = (1.6, 2.4, 1.3);
    let want = brute_sup(n, |i, j| {
        mean_pow(&nu[i..j], q).powf(1.0 / q) * dual(&s1[i..j], p1) * dual(&s2[i..j], p2)
    });
    out.push((
        "multiple A_(P,q)",
        rel(
            multiple_apq_constant(&wv, p1, p2, q, &idx).unwrap().value,
            want,
        ),
    ));

    let q0 = 3.0;
    let pair = |target: &[f64], r0: Option<f64>| {
        brute_pair_sup(n, |i, j, a, b| {
            let ratio = (j - i) as f64 / (b - a) as f64;
            let extra = r0.map_or(1.0, |r| ((b - a) as f64 * h).powf(1.0 / r));
            ratio.powf(1.0 / q0)
                * mean_pow(&target[i..j], q).powf(1.0 / q)
                * dual(&s1[a..b], p1)
                * dual(&s2[a..b], p2)
                * extra
        })
    };
    let got = iida_constant(&wv, q0, q, p1, p2, &pairs, &idx)
        .unwrap()
        .value;
    out.push(("pair constant", rel(got, pair(&nu, None))));
    let vs = v.samples();
    let got = two_weight_constant(&v, &wv, q0, q, p1, p2, &pairs, &idx, None)
        .unwrap()
        .value;
    out.push(("two-weight", rel(got, pair(vs, None))));
    let got = two_weight_constant(&v, &wv, q0, q, p1, p2, &pairs, &idx, Some(5.0))
        .unwrap()
        .value;
    out.push(("two-weight with r0", rel(got, pair(vs, Some(5.0)))));
    out
}

/// `BI_{1/2}(χ, χ)(0)` for `χ = χ_[-1,1)` at `N` cells on `[-1, 1)`; the
/// exact value is `∫_{-1}^{1} |y|^{-1/2} dy = 4`. Returns the relative error.
pub fn bilinear_origin_error(n: usize) -> f64 {
    let spec = GridSpec::new(1, 1.0, n).unwrap();
    let chi = GridFunction::indicator(spec, &Cube::interval(-1.0, 2.0));
    let v = bi_frac(&chi, &chi, 0.5).unwrap().node_value(&[0.0]);
    (v - 4.0).abs() / 4.0
}

/// Worst relative error of `I_{1/2} χ_[0,1)` at `x ∈ {0, 2}` on `[-4, 4)`.
pub fn riesz_error(n: usize) -> f64 {
    // ∫_0^1 |x - t|^{-1/2} dt
    let exact = |x: f64| {
        let anti = |t: f64| -2.0 * (x - t).signum() * (x - t).abs().sqrt();
        anti(1.0) - anti(0.0)
    };
    let spec = GridSpec::new(1, 4.0, n).unwrap();
    let chi = GridFunction::indicator(spec, &Cube::interval(0.0, 1.0));
    let out = frac_int(&chi, 0.5).unwrap();
    [0.0, 2.0]
        .into_iter()
        .map(|x| (out.node_value(&[x]) - exact(x)).abs() / exact(x))
        .fold(0.0, f64::max)
}
