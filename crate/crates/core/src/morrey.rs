//! Discrete Morrey norms: sups over a finite cube family.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::family::{argmax, FamilyIndex};
use crate::geometry::Cube;
use crate::lattice::GridFunction;

/// Outer exponent `p0` and inner exponent `q` with `0 < q <= p0`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MorreyParams {
    p0: f64,
    q: f64,
}

impl MorreyParams {
    pub fn new(p0: f64, q: f64) -> Result<Self> {
        if !(q > 0.0 && p0.is_finite()) {
            return Err(Error::ExponentOrder(format!(
                "need 0 < q <= p0 < ∞, got q = {q}, p0 = {p0}"
            )));
        }
        if q > p0 * (1.0 + crate::RELATION_TOL) {
            return Err(Error::ExponentOrder(format!(
                "inner exponent q = {q} exceeds p0 = {p0}"
            )));
        }
        Ok(Self { p0, q })
    }

    pub fn p0(&self) -> f64 {
        self.p0
    }

    pub fn q(&self) -> f64 {
        self.q
    }
}

/// A norm value and the cube attaining it.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct NormValue {
    pub value: f64,
    pub witness: Cube,
}

fn best(values: &[f64], index: &FamilyIndex) -> Result<NormValue> {
    let i = argmax(values, index.cubes()).ok_or(Error::EmptyCubeFamily)?;
    Ok(NormValue {
        value: values[i],
        witness: index.cubes()[i],
    })
}

fn check(f: &GridFunction, index: &FamilyIndex) -> Result<()> {
    if index.is_empty() {
        return Err(Error::EmptyCubeFamily);
    }
    if f.spec() != index.family().spec() {
        return Err(Error::SpecMismatch);
    }
    Ok(())
}

/// Per-cube `|Q|^{1/p0 - 1/q} (∫_Q |f|^q)^{1/q} = |Q|^{1/p0} (avg_Q |f|^q)^{1/q}`.
pub fn morrey_profile(
    f: &GridFunction,
    params: MorreyParams,
    index: &FamilyIndex,
) -> Result<Vec<f64>> {
    check(f, index)?;
    let means = index.power_means(f, params.q);
    Ok(index
        .cubes()
        .iter()
        .zip(means)
        .map(|(c, m)| c.measure().powf(1.0 / params.p0) * m.powf(1.0 / params.q))
        .collect())
}

/// `‖f‖_{M^{p0}_q} = max_Q |Q|^{1/p0 - 1/q} ‖f χ_Q‖_{L^q}`.
pub fn morrey_norm(
    f: &GridFunction,
    params: MorreyParams,
    index: &FamilyIndex,
) -> Result<NormValue> {
    best(&morrey_profile(f, params, index)?, index)
}

/// `‖(f1, f2)‖_{M^{p0}_{P}} = max_Q |Q|^{1/p0} ∏_i (avg_Q |f_i|^{p_i})^{1/p_i}`.
pub fn vector_morrey_norm(
    f1: &GridFunction,
    f2: &GridFunction,
    p0: f64,
    p1: f64,
    p2: f64,
    index: &FamilyIndex,
) -> Result<NormValue> {
    check(f1, index)?;
    check(f2, index)?;
    for p in [p0, p1, p2] {
        if !(p > 0.0) {
            return Err(Error::POutOfRange(p));
        }
    }
    let a = index.power_means(f1, p1);
    let b = index.power_means(f2, p2);
    let values: Vec<f64> = index
        .cubes()
        .iter()
        .enumerate()
        .map(|(i, c)| c.measure().powf(1.0 / p0) * a[i].powf(1.0 / p1) * b[i].powf(1.0 / p2))
        .collect();
    best(&values, index)
}

/// Both sides of `‖f^ℓ‖^{1/ℓ}_{M^{p0/ℓ}_{q/ℓ}} = ‖f‖_{M^{p0}_q}`, `1 < ℓ < q`.
pub fn power_scaling_check(
    f: &GridFunction,
    p0: f64,
    q: f64,
    ell: f64,
    index: &FamilyIndex,
) -> Result<(f64, f64)> {
    if !(ell > 1.0 && ell < q) {
        return Err(Error::ExponentOrder(format!(
            "need 1 < ℓ < q, got ℓ = {ell}, q = {q}"
        )));
    }
    let rhs = morrey_norm(f, MorreyParams::new(p0, q)?, index)?.value;
    let powered = f.abs_pow(ell);
    let lhs = morrey_norm(&powered, MorreyParams::new(p0 / ell, q / ell)?, index)?
        .value
        .powf(1.0 / ell);
    Ok((lhs, rhs))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::family::CubeFamily;
    use crate::lattice::GridSpec;

    #[test]
    fn indicator_norm_is_one() {
        let spec = GridSpec::new(1, 2.0, 32).unwrap();
        let idx = FamilyIndex::new(CubeFamily::lattice(spec));
        let chi = GridFunction::indicator(spec, &Cube::interval(0.0, 1.0));
        for (p0, q) in [(2.0, 1.0), (3.0, 2.0), (4.0, 4.0)] {
            let v = morrey_norm(&chi, MorreyParams::new(p0, q).unwrap(), &idx).unwrap();
            assert!((v.value - 1.0).abs() < 1e-14, "{p0} {q}: {}", v.value);
        }
    }

    #[test]
    fn params_order() {
        assert!(matches!(
            MorreyParams::new(2.0, 3.0),
            Err(Error::ExponentOrder(_))
        ));
    }

    #[test]
    fn vector_norm_of_ones() {
        let spec = GridSpec::new(1, 1.0, 16).unwrap();
        let idx = FamilyIndex::new(CubeFamily::lattice(spec));
        let one = GridFunction::constant(spec, 1.0);
        let v = vector_morrey_norm(&one, &one, 2.0, 3.0, 3.0, &idx).unwrap();
        assert!((v.value - 2f64.sqrt()).abs() < 1e-15);
    }
}
