//! Deterministic scenario data.

use std::fmt;
use std::ops::Range;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::profile::{ExponentProfile, TheoremTag};
use super::rng::Stream;
use crate::error::{Error, Result};
use crate::geometry::Cube;
use crate::lattice::{GridFunction, GridSpec};

/// Power weights are clamped below at this value.
pub const WEIGHT_FLOOR: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CorpusKind {
    Indicators,
    RandomSteps,
    Spikes,
    PowerWeights,
}

impl CorpusKind {
    pub const ALL: [CorpusKind; 4] = [
        CorpusKind::Indicators,
        CorpusKind::RandomSteps,
        CorpusKind::Spikes,
        CorpusKind::PowerWeights,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            CorpusKind::Indicators => "indicators",
            CorpusKind::RandomSteps => "random-steps",
            CorpusKind::Spikes => "spikes",
            CorpusKind::PowerWeights => "power-weights",
        }
    }

    fn stream(&self) -> u64 {
        match self {
            CorpusKind::Indicators => 1,
            CorpusKind::RandomSteps => 2,
            CorpusKind::Spikes => 3,
            CorpusKind::PowerWeights => 4,
        }
    }
}

impl fmt::Display for CorpusKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for CorpusKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        CorpusKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| Error::GridFormat(format!("unknown corpus kind {s:?}")))
    }
}

/// Input data for one scenario. `v` is the second weight of the two-weight
/// theorems, `h` the multiplier of the Olsen-type ones.
#[derive(Debug, Clone, PartialEq)]
pub struct CorpusItem {
    pub id: String,
    pub f: GridFunction,
    pub g: GridFunction,
    pub w1: GridFunction,
    pub w2: GridFunction,
    pub v: GridFunction,
    pub h: GridFunction,
}

impl CorpusItem {
    pub fn scaled_f(&self, c: f64) -> Self {
        CorpusItem {
            f: self.f.scale(c),
            ..self.clone()
        }
    }

    /// `(f, g) ↦ (f(x/2), g(x/2))` with the weights kept: the right dilation
    /// when every weight is homogeneous about the origin, since the ratios are
    /// invariant under constant multiples of the weights.
    pub fn dilate2_data(&self) -> Self {
        CorpusItem {
            id: format!("{}@x2", self.id),
            f: self.f.dilate2(),
            g: self.g.dilate2(),
            ..self.clone()
        }
    }

    /// `x ↦ item(x/2)` in every component.
    pub fn dilate2(&self) -> Self {
        CorpusItem {
            id: format!("{}@x2", self.id),
            f: self.f.dilate2(),
            g: self.g.dilate2(),
            w1: self.w1.dilate2(),
            w2: self.w2.dilate2(),
            v: self.v.dilate2(),
            h: self.h.dilate2(),
        }
    }
}

/// Ranges for corpus construction.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct CorpusConfig {
    /// Ranges of `β_1`, `β_2` for the power weights `ω_i = |x - x0|^{β_i}`.
    pub beta: [(f64, f64); 2],
    /// Lower limit of `β_1 + β_2`, the exponent of `ν_ω`.
    pub beta_sum_min: f64,
    /// Largest `γ` in the multiplier `h = |x - x0|^{-γ}`.
    pub decay_max: f64,
    /// Data lives in the centred cube of this fraction of the box side.
    pub support_fraction: f64,
    /// Smallest feature in cells: indicator sides are at least this, step
    /// data are constant on blocks of twice this, step weights of four times.
    pub feature_cells: usize,
    /// Put every power-weight singularity at the origin, making the weights
    /// exactly homogeneous under dilation.
    pub centred_weights: bool,
}

impl Default for CorpusConfig {
    fn default() -> Self {
        CorpusConfig {
            beta: [(-0.05, 0.1); 2],
            beta_sum_min: -0.1,
            decay_max: 0.2,
            support_fraction: 0.5,
            feature_cells: 1,
            centred_weights: false,
        }
    }
}

/// Fraction of each admissible exponent limit actually used.
const SAFETY: f64 = 0.5;

impl CorpusConfig {
    /// Power-weight exponents for which the profile's weight constant is
    /// finite for `|x|^β` weights on all of space, shrunk by a safety factor:
    /// `β_i p̃_i' < n` keeps the dual powers integrable, and
    /// `β_1 + β_2 >= -n/(a q0)` keeps the pair constant bounded at the
    /// singularity.
    pub fn for_profile(p: &ExponentProfile) -> Self {
        let n = p.n as f64;
        let a = match p.tag {
            TheoremTag::C14 => 1.0,
            _ => p.a,
        };
        let a_dual = match p.tag {
            TheoremTag::T41 | TheoremTag::T42 => p.a,
            _ => 1.0,
        };
        let (e1, e2) = p.reduced_exponents(a_dual);
        let dual = |e: f64| e / (e - 1.0);
        let sum_min = -SAFETY * n / (a * p.q0);
        let decay_max = match (p.r0, p.r1) {
            (Some(r0), _) => SAFETY * n / r0,
            _ => CorpusConfig::default().decay_max,
        };
        CorpusConfig {
            beta: [
                (sum_min / 2.0, SAFETY * n / dual(e1)),
                (sum_min / 2.0, SAFETY * n / dual(e2)),
            ],
            beta_sum_min: sum_min,
            decay_max,
            ..CorpusConfig::default()
        }
    }
}

struct Builder<'a> {
    spec: GridSpec,
    rng: Stream,
    cfg: &'a CorpusConfig,
}

impl Builder<'_> {
    /// Cell-coordinate bounds of the support region on each axis.
    fn region(&self) -> (usize, usize) {
        let n = self.spec.cells_per_axis();
        let len = ((n as f64 * self.cfg.support_fraction).round() as usize).clamp(1, n);
        let lo = (n - len) / 2;
        (lo, lo + len)
    }

    fn in_region(&self, cell: usize) -> bool {
        let (lo, hi) = self.region();
        let c = self.spec.coords(cell);
        (0..self.spec.dim()).all(|a| c[a] >= lo && c[a] < hi)
    }

    /// Constant on blocks of `block` cells per axis inside the region, drawn
    /// by `draw`; `outside` elsewhere.
    fn blocks(
        &mut self,
        block: usize,
        outside: f64,
        draw: impl Fn(&mut Stream) -> f64,
    ) -> GridFunction {
        let spec = self.spec;
        let per = spec.cells_per_axis().div_ceil(block);
        let count = per.pow(spec.dim() as u32);
        let values: Vec<f64> = (0..count).map(|_| draw(&mut self.rng)).collect();
        let samples = (0..spec.cell_count())
            .map(|cell| {
                if !self.in_region(cell) {
                    return outside;
                }
                let c = spec.coords(cell);
                let mut k = 0;
                for a in (0..spec.dim()).rev() {
                    k = k * per + c[a] / block;
                }
                values[k]
            })
            .collect();
        GridFunction::new(spec, samples).expect("finite samples")
    }

    fn aligned_cube(&mut self) -> Cube {
        let (lo, hi) = self.region();
        let len = self
            .rng
            .below(self.cfg.feature_cells.min(hi - lo), hi - lo + 1);
        let h = self.spec.cell_side();
        let corner: Vec<f64> = (0..self.spec.dim())
            .map(|_| self.spec.edge(self.rng.below(lo, hi - len + 1) as isize))
            .collect();
        Cube::new(&corner, len as f64 * h).expect("positive side")
    }

    fn step_weight(&mut self) -> GridFunction {
        self.blocks(4 * self.cfg.feature_cells, 1.0, |r| r.range(0.5, 2.0))
    }

    /// A lattice node inside the region, or the origin for centred weights.
    fn singular_point(&mut self) -> Vec<f64> {
        let (lo, hi) = self.region();
        (0..self.spec.dim())
            .map(|_| {
                let node = self.spec.edge(self.rng.below(lo, hi + 1) as isize);
                if self.cfg.centred_weights {
                    0.0
                } else {
                    node
                }
            })
            .collect()
    }

    fn heavy_steps(&mut self) -> GridFunction {
        self.blocks(2 * self.cfg.feature_cells, 0.0, |r| 0.1 + r.uniform())
    }
}

/// `max(|x - x0|^β, WEIGHT_FLOOR)` sampled at cell midpoints.
pub fn power_weight(spec: GridSpec, x0: &[f64], beta: f64) -> GridFunction {
    GridFunction::from_fn(spec, |x| {
        let d = x
            .iter()
            .zip(x0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt();
        d.powf(beta).max(WEIGHT_FLOOR)
    })
    .expect("finite weight")
}

/// `count` items of the given kind, a pure function of `(seed, kind, spec,
/// count, cfg)`. Item 0 is a fixed catalogue case.
pub fn corpus(
    seed: u64,
    kind: CorpusKind,
    spec: GridSpec,
    count: usize,
    cfg: &CorpusConfig,
) -> Vec<CorpusItem> {
    corpus_range(seed, kind, spec, 0..count, cfg)
}

/// Items `range` of the stream `corpus` draws from; item `i` depends only
/// on `(seed, kind, i)`.
pub fn corpus_range(
    seed: u64,
    kind: CorpusKind,
    spec: GridSpec,
    range: Range<usize>,
    cfg: &CorpusConfig,
) -> Vec<CorpusItem> {
    let one = GridFunction::constant(spec, 1.0);
    let mut out = Vec::with_capacity(range.len());
    for i in range {
        let mut b = Builder {
            spec,
            rng: Stream::derive(seed, kind.stream() << 32 | i as u64),
            cfg,
        };
        let id = format!("{}-{seed}-{i:03}", kind.as_str());
        let item = match kind {
            CorpusKind::Indicators => {
                let (f, g) = if i == 0 {
                    let q = Cube::new(&vec![-1.0; spec.dim()], 2.0).expect("positive side");
                    let chi = GridFunction::indicator(spec, &q);
                    (chi.clone(), chi)
                } else {
                    let (qf, qg) = (b.aligned_cube(), b.aligned_cube());
                    (
                        GridFunction::indicator(spec, &qf),
                        GridFunction::indicator(spec, &qg),
                    )
                };
                CorpusItem {
                    id,
                    f,
                    g,
                    w1: one.clone(),
                    w2: one.clone(),
                    v: one.clone(),
                    h: one.clone(),
                }
            }
            CorpusKind::RandomSteps => {
                let f = b.heavy_steps();
                let g = b.heavy_steps();
                let (w1, w2, v, h) = (
                    b.step_weight(),
                    b.step_weight(),
                    b.step_weight(),
                    b.step_weight(),
                );
                CorpusItem {
                    id,
                    f,
                    g,
                    w1,
                    w2,
                    v,
                    h,
                }
            }
            CorpusKind::Spikes if i == 0 => {
                // coincident unit spikes at the cell just past the origin
                let centre = spec.index([
                    spec.cells_per_axis() / 2,
                    spec.cells_per_axis() / 2 * (spec.dim() - 1),
                ]);
                let mut s = vec![0.0; spec.cell_count()];
                s[centre] = 1.0;
                let spike = GridFunction::new(spec, s).expect("finite");
                CorpusItem {
                    id,
                    f: spike.clone(),
                    g: spike,
                    w1: one.clone(),
                    w2: one.clone(),
                    v: one.clone(),
                    h: one.clone(),
                }
            }
            CorpusKind::Spikes => {
                let spiky = |b: &mut Builder| {
                    let base = b.blocks(1, 0.0, |_| 0.05);
                    let mut s = base.into_samples();
                    let spikes = b.rng.below(1, 4);
                    for _ in 0..spikes {
                        let cell = loop {
                            let c = b.rng.below(0, spec.cell_count());
                            if b.in_region(c) {
                                break c;
                            }
                        };
                        s[cell] = b.rng.range(5.0, 50.0);
                    }
                    GridFunction::new(spec, s).expect("finite")
                };
                let f = spiky(&mut b);
                let g = spiky(&mut b);
                let w1 = b.step_weight();
                CorpusItem {
                    id,
                    f,
                    g,
                    w1,
                    w2: one.clone(),
                    v: one.clone(),
                    h: b.step_weight(),
                }
            }
            CorpusKind::PowerWeights => {
                let f = b.heavy_steps();
                let g = b.heavy_steps();
                if i == 0 {
                    CorpusItem {
                        id,
                        f,
                        g,
                        w1: one.clone(),
                        w2: one.clone(),
                        v: one.clone(),
                        h: one.clone(),
                    }
                } else {
                    let [(lo1, hi1), (lo2, hi2)] = cfg.beta;
                    let b1 = b.rng.range(lo1, hi1);
                    let b2 = b.rng.range(lo2, hi2).max(cfg.beta_sum_min - b1);
                    let x0 = b.singular_point();
                    let w1 = power_weight(spec, &x0, b1);
                    let w2 = power_weight(spec, &x0, b2);
                    let v = w1.mul(&w2).expect("same spec");
                    let gamma = b.rng.range(0.0, cfg.decay_max);
                    let h = power_weight(spec, &x0, -gamma);
                    CorpusItem {
                        id,
                        f,
                        g,
                        w1,
                        w2,
                        v,
                        h,
                    }
                }
            }
        };
        out.push(item);
    }
    out
}

/// Nonnegative heavy-tailed data on the whole box, for the sparse checks.
pub fn heavy_pair(seed: u64, spec: GridSpec) -> (GridFunction, GridFunction) {
    let mut rng = Stream::derive(seed, 0x5A5A);
    let mut draw = || {
        let s: Vec<f64> = (0..spec.cell_count())
            .map(|_| {
                let u = 1.0 - rng.uniform();
                if rng.uniform() < 0.3 {
                    0.0
                } else {
                    u.powf(-0.9)
                }
            })
            .collect();
        GridFunction::nonnegative(spec, s).expect("nonnegative")
    };
    let f = draw();
    let g = draw();
    (f, g)
}

/// [`heavy_pair`] plus one to three spikes of height `10^U(2,4)` on cells
/// inside `root`, shared by `f` and `g`, so that the
/// stopping time selects several levels.
pub fn spiked_pair(seed: u64, spec: GridSpec, root: &Cube) -> (GridFunction, GridFunction) {
    let (f, g) = heavy_pair(seed, spec);
    let (mut f, mut g) = (f.into_samples(), g.into_samples());
    let cells = spec.members(root);
    let mut rng = Stream::derive(seed, 0x5B5B);
    for _ in 0..rng.below(1, 4) {
        let at = cells[rng.below(0, cells.len())];
        f[at] += 10f64.powf(rng.range(2.0, 4.0));
        g[at] += 10f64.powf(rng.range(2.0, 4.0));
    }
    let wrap = |s| GridFunction::nonnegative(spec, s).expect("nonnegative");
    (wrap(f), wrap(g))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn spec() -> GridSpec {
        GridSpec::new(1, 2.0, 64).unwrap()
    }

    #[test]
    fn indicators_start_with_box_indicator() {
        let c = corpus(
            5,
            CorpusKind::Indicators,
            spec(),
            4,
            &CorpusConfig::default(),
        );
        let chi = GridFunction::indicator(spec(), &Cube::interval(-1.0, 2.0));
        assert_eq!(c[0].f, chi);
        assert_eq!(c[0].g, chi);
    }

    #[test]
    fn spikes_start_with_coincident_spike() {
        let c = corpus(5, CorpusKind::Spikes, spec(), 1, &CorpusConfig::default());
        assert_eq!(c[0].f, c[0].g);
        assert_eq!(c[0].f.samples().iter().filter(|&&x| x != 0.0).count(), 1);
        assert_eq!(c[0].f.value_at(&[0.01]), 1.0);
    }

    #[test]
    fn power_weights_start_with_unit_weight() {
        let c = corpus(
            5,
            CorpusKind::PowerWeights,
            spec(),
            3,
            &CorpusConfig::default(),
        );
        assert!(c[0].w1.samples().iter().all(|&w| w == 1.0));
        assert!(c[1].w1.samples().iter().all(|&w| w >= WEIGHT_FLOOR));
    }

    #[test]
    fn deterministic() {
        for kind in CorpusKind::ALL {
            let a = corpus(9, kind, spec(), 5, &CorpusConfig::default());
            let b = corpus(9, kind, spec(), 5, &CorpusConfig::default());
            assert_eq!(a, b);
            let c = corpus(10, kind, spec(), 5, &CorpusConfig::default());
            assert_ne!(a[1..], c[1..]);
        }
    }

    #[test]
    fn weights_positive_data_supported_centrally() {
        for kind in CorpusKind::ALL {
            for item in corpus(3, kind, spec(), 6, &CorpusConfig::default()) {
                for w in [&item.w1, &item.w2, &item.v, &item.h] {
                    assert!(w.is_positive(), "{}", item.id);
                }
                for (cell, x) in item.f.samples().iter().enumerate() {
                    let m = spec().midpoint(cell)[0];
                    if m.abs() > 1.0 {
                        assert_eq!(*x, 0.0, "{} at {m}", item.id);
                    }
                }
            }
        }
    }
}
