//! Weight-class constants as maxima over finite cube and nested-pair
//! families.

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::FamilyIndex;
use crate::geometry::Cube;
use crate::lattice::GridFunction;

/// `p' = p / (p - 1)`.
pub fn conjugate(p: f64) -> f64 {
    p / (p - 1.0)
}

/// Two weights `ω = (ω1, ω2)`, optionally with a target weight `v`.
#[derive(Debug, Clone, PartialEq)]
pub struct WeightVector {
    w1: GridFunction,
    w2: GridFunction,
    v: Option<GridFunction>,
    nu: GridFunction,
}

impl WeightVector {
    pub fn new(w1: GridFunction, w2: GridFunction) -> Result<Self> {
        if w1.spec() != w2.spec() {
            return Err(Error::SpecMismatch);
        }
        if !w1.is_positive() || !w2.is_positive() {
            return Err(Error::NonPositiveWeight);
        }
        let nu = w1.mul(&w2)?;
        Ok(Self {
            w1,
            w2,
            v: None,
            nu,
        })
    }

    pub fn with_target(mut self, v: GridFunction) -> Result<Self> {
        if v.spec() != self.w1.spec() {
            return Err(Error::SpecMismatch);
        }
        if !v.is_positive() {
            return Err(Error::NonPositiveWeight);
        }
        self.v = Some(v);
        Ok(self)
    }

    pub fn w1(&self) -> &GridFunction {
        &self.w1
    }

    pub fn w2(&self) -> &GridFunction {
        &self.w2
    }

    pub fn target(&self) -> Option<&GridFunction> {
        self.v.as_ref()
    }

    /// `ν_ω = ω1 ω2`.
    pub fn nu(&self) -> &GridFunction {
        &self.nu
    }
}

/// Where a constant's maximum is attained.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Witness {
    Cube(Cube),
    Pair { inner: Cube, outer: Cube },
}

/// A constant together with the cube (or pair) attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ConstantReport {
    /// `f64::INFINITY` when some family member overflows.
    pub value: f64,
    pub infinite: bool,
    pub witness: Witness,
    pub family_size: usize,
}

impl ConstantReport {
    fn from_values(values: &[f64], index: &FamilyIndex) -> Result<Self> {
        let cubes = index.cubes();
        let best = (0..values.len())
            .into_par_iter()
            .map(|i| (sanitize(values[i]), i))
            .reduce_with(|a, b| pick(a, b, |i, j| cubes[i].cmp_key(&cubes[j])))
            .ok_or(Error::EmptyCubeFamily)?;
        Ok(Self {
            value: best.0,
            infinite: best.0.is_infinite(),
            witness: Witness::Cube(cubes[best.1]),
            family_size: values.len(),
        })
    }
}

fn sanitize(v: f64) -> f64 {
    if v.is_nan() {
        f64::INFINITY
    } else {
        v
    }
}

/// Larger value wins; equal values go to the smaller key.
fn pick(
    a: (f64, usize),
    b: (f64, usize),
    key: impl Fn(usize, usize) -> std::cmp::Ordering,
) -> (f64, usize) {
    match a.0.total_cmp(&b.0) {
        std::cmp::Ordering::Greater => a,
        std::cmp::Ordering::Less => b,
        std::cmp::Ordering::Equal => {
            if key(a.1, b.1).is_le() {
                a
            } else {
                b
            }
        }
    }
}

fn check_weight(w: &GridFunction, index: &FamilyIndex) -> Result<()> {
    if w.spec() != index.family().spec() {
        return Err(Error::SpecMismatch);
    }
    if !w.is_positive() {
        return Err(Error::NonPositiveWeight);
    }
    Ok(())
}

/// Per-cube `(1/|Q|) ∫_Q ω^{-p'})^{1/p'}`, or `1 / min_Q ω` when `p = 1`.
fn dual_factor(w: &GridFunction, p: f64, index: &FamilyIndex) -> Vec<f64> {
    if p == 1.0 {
        index.cell_min(w).into_iter().map(|m| 1.0 / m).collect()
    } else {
        let pc = conjugate(p);
        index
            .power_means(w, -pc)
            .into_iter()
            .map(|m| m.powf(1.0 / pc))
            .collect()
    }
}

/// `[ω]_{A_p} = max_Q (avg_Q ω)(avg_Q ω^{1-p'})^{p-1}`; for `p = 1`,
/// `max_Q (avg_Q ω) / min_Q ω`.
pub fn ap_constant(w: &GridFunction, p: f64, index: &FamilyIndex) -> Result<ConstantReport> {
    if !(p >= 1.0) {
        return Err(Error::POutOfRange(p));
    }
    check_weight(w, index)?;
    let avg = index.power_means(w, 1.0);
    let values: Vec<f64> = if p == 1.0 {
        let mins = index.cell_min(w);
        avg.iter().zip(mins).map(|(a, m)| a / m).collect()
    } else {
        let dual = index.power_means(w, 1.0 - conjugate(p));
        avg.iter()
            .zip(dual)
            .map(|(a, d)| a * d.powf(p - 1.0))
            .collect()
    };
    ConstantReport::from_values(&values, index)
}

/// `[ω]_{A(p,q)} = max_Q (avg_Q ω^q)^{1/q} (avg_Q ω^{-p'})^{1/p'}`, `1 < p < q`.
pub fn apq_constant(
    w: &GridFunction,
    p: f64,
    q: f64,
    index: &FamilyIndex,
) -> Result<ConstantReport> {
    if !(p > 1.0) {
        return Err(Error::POutOfRange(p));
    }
    if !(q > p) {
        return Err(Error::ExponentOrder(format!(
            "need p < q, got p = {p}, q = {q}"
        )));
    }
    check_weight(w, index)?;
    let a = index.power_means(w, q);
    let b = dual_factor(w, p, index);
    let values: Vec<f64> = a.iter().zip(b).map(|(a, b)| a.powf(1.0 / q) * b).collect();
    ConstantReport::from_values(&values, index)
}

/// `[ω]_{A(P,q)} = max_Q (avg_Q ν^q)^{1/q} ∏_i (avg_Q ω_i^{-p_i'})^{1/p_i'}`,
/// with the `p_i = 1` factor read as `(min_Q ω_i)^{-1}`.
pub fn multiple_apq_constant(
    wv: &WeightVector,
    p1: f64,
    p2: f64,
    q: f64,
    index: &FamilyIndex,
) -> Result<ConstantReport> {
    for p in [p1, p2] {
        if !(p >= 1.0) {
            return Err(Error::POutOfRange(p));
        }
    }
    if !(q > 0.0) {
        return Err(Error::POutOfRange(q));
    }
    check_weight(wv.w1(), index)?;
    let a = index.power_means(wv.nu(), q);
    let b1 = dual_factor(wv.w1(), p1, index);
    let b2 = dual_factor(wv.w2(), p2, index);
    let values: Vec<f64> = (0..a.len())
        .map(|i| a[i].powf(1.0 / q) * b1[i] * b2[i])
        .collect();
    ConstantReport::from_values(&values, index)
}

/// `max_Q (avg_Q ω^{1+ε})^{1/(1+ε)} / avg_Q ω`: the smallest reverse-Hölder
/// constant valid on the family.
pub fn reverse_holder_probe(w: &GridFunction, epsilon: f64, index: &FamilyIndex) -> Result<f64> {
    if !(epsilon > 0.0) {
        return Err(Error::POutOfRange(epsilon));
    }
    check_weight(w, index)?;
    let hi = index.power_means(w, 1.0 + epsilon);
    let lo = index.power_means(w, 1.0);
    let values: Vec<f64> = hi
        .iter()
        .zip(lo)
        .map(|(h, l)| h.powf(1.0 / (1.0 + epsilon)) / l)
        .collect();
    Ok(ConstantReport::from_values(&values, index)?.value)
}

/// Nested pairs `Q ⊆ Q'` of cubes from one [`FamilyIndex`], stored by index.
#[derive(Debug, Clone, PartialEq)]
pub struct PairFamily {
    family_len: usize,
    pairs: Vec<(u32, u32)>,
}

impl PairFamily {
    /// Every nested pair of the indexed family, `Q = Q'` included.
    pub fn nested(index: &FamilyIndex) -> Self {
        let cubes = index.cubes();
        let pairs: Vec<(u32, u32)> = (0..cubes.len())
            .into_par_iter()
            .flat_map_iter(|outer| {
                (0..cubes.len())
                    .filter(move |&inner| cubes[outer].contains(&cubes[inner]))
                    .map(move |inner| (inner as u32, outer as u32))
            })
            .collect();
        Self {
            family_len: cubes.len(),
            pairs,
        }
    }

    /// Only the diagonal pairs `Q = Q'`.
    pub fn diagonal(index: &FamilyIndex) -> Self {
        Self {
            family_len: index.len(),
            pairs: (0..index.len() as u32).map(|i| (i, i)).collect(),
        }
    }

    /// Explicit pairs; each must satisfy `inner ⊆ outer`.
    pub fn from_pairs(index: &FamilyIndex, pairs: Vec<(u32, u32)>) -> Result<Self> {
        let cubes = index.cubes();
        for &(i, o) in &pairs {
            let (i, o) = (i as usize, o as usize);
            if i >= cubes.len() || o >= cubes.len() || !cubes[o].contains(&cubes[i]) {
                return Err(Error::ExponentOrder(format!(
                    "pair ({i}, {o}) is not nested"
                )));
            }
        }
        Ok(Self {
            family_len: cubes.len(),
            pairs,
        })
    }

    pub fn len(&self) -> usize {
        self.pairs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.pairs.is_empty()
    }

    pub fn pairs(&self) -> &[(u32, u32)] {
        &self.pairs
    }
}

/// Exponents of a nested-pair constant.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct PairExponents {
    pub q0: f64,
    pub q: f64,
    pub p1: f64,
    pub p2: f64,
    /// Extra factor `|Q'|^{1/r0}` when present.
    pub r0: Option<f64>,
}

fn pair_constant(
    target: &GridFunction,
    wv: &WeightVector,
    e: PairExponents,
    pairs: &PairFamily,
    index: &FamilyIndex,
) -> Result<ConstantReport> {
    if pairs.family_len != index.len() {
        return Err(Error::SpecMismatch);
    }
    if pairs.is_empty() {
        return Err(Error::EmptyCubeFamily);
    }
    for p in [e.p1, e.p2] {
        if !(p > 1.0) {
            return Err(Error::POutOfRange(p));
        }
    }
    for (name, v) in [("q0", e.q0), ("q", e.q)] {
        if !(v > 0.0) {
            return Err(Error::ExponentOrder(format!(
                "{name} = {v} must be positive"
            )));
        }
    }
    check_weight(target, index)?;
    check_weight(wv.w1(), index)?;
    let a: Vec<f64> = index
        .power_means(target, e.q)
        .into_iter()
        .map(|m| m.powf(1.0 / e.q))
        .collect();
    let b1 = dual_factor(wv.w1(), e.p1, index);
    let b2 = dual_factor(wv.w2(), e.p2, index);
    let cubes = index.cubes();
    let value = |&(i, o): &(u32, u32)| -> f64 {
        let (qi, qo) = (&cubes[i as usize], &cubes[o as usize]);
        let mut v = (qi.measure() / qo.measure()).powf(1.0 / e.q0)
            * a[i as usize]
            * b1[o as usize]
            * b2[o as usize];
        if let Some(r0) = e.r0 {
            v *= qo.measure().powf(1.0 / r0);
        }
        v
    };
    let list = pairs.pairs();
    let key = |x: usize, y: usize| {
        let (xi, xo) = list[x];
        let (yi, yo) = list[y];
        cubes[xi as usize]
            .cmp_key(&cubes[yi as usize])
            .then(cubes[xo as usize].cmp_key(&cubes[yo as usize]))
    };
    let best = (0..list.len())
        .into_par_iter()
        .map(|k| (sanitize(value(&list[k])), k))
        .reduce_with(|x, y| pick(x, y, key))
        .expect("nonempty pair family");
    let (i, o) = list[best.1];
    Ok(ConstantReport {
        value: best.0,
        infinite: best.0.is_infinite(),
        witness: Witness::Pair {
            inner: cubes[i as usize],
            outer: cubes[o as usize],
        },
        family_size: list.len(),
    })
}

/// `[ω]_{q0,q,P} = max_{Q ⊆ Q'} (|Q|/|Q'|)^{1/q0} (avg_Q ν^q)^{1/q}
/// ∏_i (avg_{Q'} ω_i^{-p_i'})^{1/p_i'}`.
pub fn iida_constant(
    wv: &WeightVector,
    q0: f64,
    q: f64,
    p1: f64,
    p2: f64,
    pairs: &PairFamily,
    index: &FamilyIndex,
) -> Result<ConstantReport> {
    pair_constant(
        wv.nu(),
        wv,
        PairExponents {
            q0,
            q,
            p1,
            p2,
            r0: None,
        },
        pairs,
        index,
    )
}

/// `[v, ω]_{q0,q,P}` (no `r0`) or `[v, ω]_{q0,r0,q,P}` (with the extra
/// factor `|Q'|^{1/r0}`): the pair constant with `v` in place of `ν_ω`.
#[allow(clippy::too_many_arguments)]
pub fn two_weight_constant(
    v: &GridFunction,
    wv: &WeightVector,
    q0: f64,
    q: f64,
    p1: f64,
    p2: f64,
    pairs: &PairFamily,
    index: &FamilyIndex,
    r0: Option<f64>,
) -> Result<ConstantReport> {
    if let Some(r) = r0 {
        if !(r > 0.0) {
            return Err(Error::ExponentOrder(format!("r0 = {r} must be positive")));
        }
    }
    pair_constant(v, wv, PairExponents { q0, q, p1, p2, r0 }, pairs, index)
}
