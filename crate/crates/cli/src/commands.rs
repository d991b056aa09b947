//! Subcommand bodies. Each returns whether verification failures occurred.

use std::fs;
use std::path::Path;

use bifrac::harness::{
    power_weight, profile_check_name, summarize, to_csv, verify_inequality, Context, CorpusConfig,
    Scenario, Summary,
};
use bifrac::weights::conjugate;
use bifrac::*;
use serde::Serialize;
use serde_json::json;

use crate::config::{invalid, CliResult, Format, RunConfig};

pub const SCHEMA: u32 = 1;

fn write_out(path: Option<&Path>, text: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, text).map_err(|e| invalid(format!("{}: {e}", p.display()))),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &impl Serialize) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("serializable");
    s.push('\n');
    s
}

fn need(v: Option<f64>, name: &str) -> CliResult<f64> {
    v.ok_or_else(|| invalid(format!("missing exponent `{name}`")))
}

pub fn decompose(cfg: &RunConfig) -> CliResult<bool> {
    let f = cfg.require_input("f")?;
    let g = cfg.input("g")?.unwrap_or_else(|| f.clone());
    let dim = f.spec().dim();
    let root = match &cfg.root {
        Some(c) => c.cube()?,
        None => Cube::new(&vec![0.0; dim], 1.0)?,
    };
    let r = cfg.exponents.r.unwrap_or(2.0);
    let base = cfg.exponents.base.unwrap_or_else(|| default_base(dim));
    let fam = cz_decompose(
        &f,
        &g,
        r,
        conjugate(r),
        &root,
        &DyadicGrid::standard(dim),
        base,
    )?;
    let inv = fam.check_invariants();
    let failed = !inv.all_hold();
    write_out(
        cfg.output_path().as_deref(),
        &pretty(&json!({ "schema": SCHEMA, "family": fam, "invariants": inv })),
    )?;
    Ok(failed)
}

pub const OPERATORS: [&str; 9] = [
    "bi-frac",
    "frac-int",
    "multi-frac-int",
    "maximal",
    "frac-maximal",
    "p-maximal",
    "multi-maximal",
    "weighted-bilinear-maximal",
    "sparse-bound",
];

pub fn apply(cfg: &RunConfig) -> CliResult<bool> {
    let op = cfg
        .operator
        .as_deref()
        .ok_or_else(|| invalid("missing operator"))?;
    let e = &cfg.exponents;
    let f = cfg.require_input("f")?;
    let index =
        || FamilyIndex::new(CubeFamily::default_for(*f.spec(), cfg.cube_cap())).with_dilation(3.0);
    let out = match op {
        "bi-frac" => bi_frac(&f, &cfg.require_input("g")?, need(e.alpha, "alpha")?)?,
        "frac-int" => frac_int(&f, need(e.alpha, "alpha")?)?,
        "multi-frac-int" => multi_frac_int(&f, &cfg.require_input("g")?, need(e.alpha, "alpha")?)?,
        "maximal" => maximal(&f, &index())?,
        "frac-maximal" => frac_maximal(&f, need(e.alpha, "alpha")?, &index())?,
        "p-maximal" => p_maximal(&f, need(e.p, "p")?, &index())?,
        "multi-maximal" => multi_maximal(
            &f,
            &cfg.require_input("g")?,
            e.alpha.unwrap_or(0.0),
            need(e.r1, "r1")?,
            need(e.r2, "r2")?,
            &index(),
        )?,
        "weighted-bilinear-maximal" => {
            let r = e.r.unwrap_or(2.0);
            weighted_bilinear_maximal(
                &f,
                &cfg.require_input("g")?,
                &cfg.require_input("w1")?,
                &cfg.require_input("w2")?,
                need(e.alpha, "alpha")?,
                r,
                conjugate(r),
                need(e.q, "q")?,
                &index(),
            )?
        }
        "sparse-bound" => {
            let dim = f.spec().dim();
            let root = match &cfg.root {
                Some(c) => c.cube()?,
                None => Cube::new(&vec![0.0; dim], 1.0)?,
            };
            let r = e.r.unwrap_or(2.0);
            sparse_bound(
                &f,
                &cfg.require_input("g")?,
                need(e.alpha, "alpha")?,
                r,
                conjugate(r),
                &root,
                &DyadicGrid::standard(dim),
            )?
        }
        other => {
            return Err(invalid(format!(
                "unknown operator `{other}` (one of {})",
                OPERATORS.join(", ")
            )))
        }
    };
    let text = match cfg.format() {
        Format::Csv => out.to_grid_text(),
        Format::Json => pretty(&json!({ "schema": SCHEMA, "operator": op, "output": out })),
    };
    write_out(cfg.output_path().as_deref(), &text)?;
    Ok(false)
}

pub const CONSTANTS: [&str; 7] = [
    "ap",
    "apq",
    "multiple-apq",
    "iida",
    "two-weight",
    "two-weight-r0",
    "reverse-holder",
];

pub fn constants(cfg: &RunConfig) -> CliResult<bool> {
    let w1 = cfg.require_input("w1")?;
    let w2 = cfg.input("w2")?.unwrap_or_else(|| w1.clone());
    let v = cfg.input("v")?;
    let e = &cfg.exponents;
    let (p, q) = (e.p.unwrap_or(2.0), e.q.unwrap_or(4.0));
    let (p1, p2) = (e.p1.unwrap_or(2.0), e.p2.unwrap_or(2.0));
    let q0 = e.q0.unwrap_or(2.0 * q);
    let index = FamilyIndex::new(CubeFamily::default_for(*w1.spec(), cfg.cube_cap()));
    let wv = WeightVector::new(w1.clone(), w2)?;
    let which: Vec<String> = cfg.constants.clone().unwrap_or_else(|| {
        ["ap", "apq", "multiple-apq", "iida", "two-weight"]
            .map(String::from)
            .to_vec()
    });
    let needs_pairs = which
        .iter()
        .any(|w| matches!(w.as_str(), "iida" | "two-weight" | "two-weight-r0"));
    let pairs = needs_pairs.then(|| PairFamily::nested(&index));
    let target = v.as_ref().unwrap_or(wv.nu());
    let mut values = serde_json::Map::new();
    for name in &which {
        let report = match name.as_str() {
            "ap" => serde_json::to_value(ap_constant(&w1, p, &index)?),
            "apq" => serde_json::to_value(apq_constant(&w1, p, q, &index)?),
            "multiple-apq" => serde_json::to_value(multiple_apq_constant(&wv, p1, p2, q, &index)?),
            "iida" => serde_json::to_value(iida_constant(
                &wv,
                q0,
                q,
                p1,
                p2,
                pairs.as_ref().unwrap(),
                &index,
            )?),
            "two-weight" | "two-weight-r0" => {
                let r0 = if name == "two-weight" {
                    None
                } else {
                    Some(need(e.r0, "r0")?)
                };
                serde_json::to_value(two_weight_constant(
                    target,
                    &wv,
                    q0,
                    q,
                    p1,
                    p2,
                    pairs.as_ref().unwrap(),
                    &index,
                    r0,
                )?)
            }
            "reverse-holder" => {
                let eps = e.epsilon.unwrap_or(0.5);
                Ok(json!({ "value": reverse_holder_probe(&w1, eps, &index)?, "epsilon": eps }))
            }
            other => {
                return Err(invalid(format!(
                    "unknown constant `{other}` (one of {})",
                    CONSTANTS.join(", ")
                )))
            }
        }
        .expect("serializable");
        values.insert(name.clone(), report);
    }
    let out = json!({
        "schema": SCHEMA,
        "exponents": { "p": p, "q": q, "p1": p1, "p2": p2, "q0": q0, "r0": e.r0 },
        "constants": values,
    });
    write_out(cfg.output_path().as_deref(), &pretty(&out))?;
    Ok(false)
}

pub fn norms(cfg: &RunConfig) -> CliResult<bool> {
    let f = cfg.require_input("f")?;
    let e = &cfg.exponents;
    let index = FamilyIndex::new(CubeFamily::default_for(*f.spec(), cfg.cube_cap()));
    let p0 = need(e.p0, "p0")?;
    let mut out = json!({ "schema": SCHEMA, "p0": p0 });
    if let Some(q) = e.q {
        out["morrey"] =
            serde_json::to_value(morrey_norm(&f, MorreyParams::new(p0, q)?, &index)?).unwrap();
        out["q"] = json!(q);
    }
    if let Some(g) = cfg.input("g")? {
        let (p1, p2) = (need(e.p1, "p1")?, need(e.p2, "p2")?);
        out["vector"] =
            serde_json::to_value(vector_morrey_norm(&f, &g, p0, p1, p2, &index)?).unwrap();
        out["p1"] = json!(p1);
        out["p2"] = json!(p2);
    }
    if out.get("morrey").is_none() && out.get("vector").is_none() {
        return Err(invalid(
            "norms: give `q` for the scalar norm or a second input `g` for the vector norm",
        ));
    }
    write_out(cfg.output_path().as_deref(), &pretty(&out))?;
    Ok(false)
}

fn scenario_counts(cfg: &RunConfig) -> (usize, usize) {
    (cfg.calibration.unwrap_or(10), cfg.evaluation.unwrap_or(20))
}

fn emit_reports(
    cfg: &RunConfig,
    reports: &[Report],
    extra: serde_json::Value,
) -> CliResult<Summary> {
    let summary = summarize(reports);
    let text = match cfg.format() {
        Format::Csv => to_csv(reports),
        Format::Json => {
            let mut v = json!({ "schema": SCHEMA, "reports": reports });
            if let (Some(obj), serde_json::Value::Object(more)) = (v.as_object_mut(), extra) {
                obj.extend(more);
            }
            pretty(&v)
        }
    };
    write_out(cfg.output_path().as_deref(), &text)?;
    Ok(summary)
}

pub fn verify(cfg: &RunConfig) -> CliResult<bool> {
    let profile = cfg.profile()?;
    let spec = cfg.grid()?;
    let kinds = cfg.corpus_kinds(&CorpusKind::ALL);
    let (cal, eval) = scenario_counts(cfg);
    if cal == 0 {
        return Err(invalid("calibration needs at least one item per kind"));
    }
    let ctx = Context::for_spec(spec, cfg.cube_cap());
    let scenario = Scenario::build(
        cfg.seed(),
        spec,
        &kinds,
        cal,
        eval,
        &CorpusConfig::for_profile(&profile),
    );
    let check = profile_check_name(&profile, 0);
    let result = verify_inequality(&profile, &check, &scenario, &ctx, cfg.margin.unwrap_or(2.0))?;
    let summary = emit_reports(
        cfg,
        &result.reports,
        json!({ "check": check, "profile": profile, "calibration_max": result.calibration_max, "bound": result.bound }),
    )?;
    if let Some(path) = cfg.summary_path() {
        write_out(Some(&path), &pretty(&summary))?;
    }
    Ok(!summary.failures.is_empty())
}

/// The exponents a user would supply for `p`, so that changing `alpha`
/// re-derives everything else.
pub fn free_exponents(p: &ExponentProfile) -> RawExponents {
    let mut raw = RawExponents {
        n: Some(p.n),
        alpha: Some(p.alpha),
        ..Default::default()
    };
    match p.tag {
        TheoremTag::T52 | TheoremTag::C53 => {
            raw.q1 = p.q1;
            raw.q2 = p.q2;
            raw.q = Some(p.q);
            if !p.r.is_nan() {
                raw.r = Some(p.r);
            }
            if p.tag == TheoremTag::T52 {
                raw.r0 = p.r0;
                raw.r1 = p.r1;
            }
        }
        tag => {
            raw.p1 = Some(p.p1);
            raw.p2 = Some(p.p2);
            raw.r = Some(p.r);
            raw.a = Some(p.a);
            if tag != TheoremTag::C14 {
                raw.p0 = Some(p.p0);
            }
            raw.r0 = p.r0;
        }
    }
    raw
}

#[derive(Debug, Serialize)]
pub struct SweepRow {
    pub id: String,
    pub alpha: f64,
    pub beta: f64,
    pub items: usize,
    pub max_ratio: f64,
    pub failures: usize,
    pub ap_constant: f64,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

pub const SWEEP_HEADER: &str = "id,alpha,beta,items,max_ratio,failures,ap_constant,note";

impl SweepRow {
    fn csv_row(&self) -> String {
        format!(
            "{},{},{},{},{},{},{},{}",
            self.id,
            self.alpha,
            self.beta,
            self.items,
            self.max_ratio,
            self.failures,
            self.ap_constant,
            self.note.as_deref().unwrap_or("")
        )
    }
}

/// Every `(α, β)` on the grid: the profile re-derived at `α`, checked on
/// power-weight corpora with `β_1 = β_2 = β` about the origin; `ap_constant`
/// is `[|x|^β]_{A_{p1}}` on the family.
pub fn sweep(cfg: &RunConfig) -> CliResult<bool> {
    let base = cfg.profile()?;
    let spec = cfg.grid()?;
    let kinds = cfg.corpus_kinds(&[CorpusKind::PowerWeights]);
    let (cal, eval) = scenario_counts(cfg);
    if cal == 0 {
        return Err(invalid("calibration needs at least one item per kind"));
    }
    let (alphas, betas) = (&cfg.sweep.alpha, &cfg.sweep.beta);
    let ctx =
        (!alphas.is_empty() && !betas.is_empty()).then(|| Context::for_spec(spec, cfg.cube_cap()));
    let mut rows = Vec::new();
    let mut reports = Vec::new();
    for &alpha in alphas {
        for &beta in betas {
            let id = format!("{}:alpha={alpha}:beta={beta}", base.tag);
            let ctx = ctx.as_ref().expect("built when both ranges are nonempty");
            let raw = RawExponents {
                alpha: Some(alpha),
                ..free_exponents(&base)
            };
            let weight = power_weight(spec, &vec![0.0; spec.dim()], beta);
            let profile = match make_profile(base.tag, &raw) {
                Ok(p) => p,
                Err(e) => {
                    rows.push(SweepRow {
                        id,
                        alpha,
                        beta,
                        items: 0,
                        max_ratio: f64::NAN,
                        failures: 0,
                        ap_constant: ap_constant(&weight, base.p1.max(1.0), &ctx.index)?.value,
                        note: Some(format!("{}: {e}", e.name()).replace(',', ";")),
                    });
                    continue;
                }
            };
            let corpus_cfg = CorpusConfig {
                beta: [(beta, beta), (beta, beta)],
                beta_sum_min: 2.0 * beta,
                centred_weights: true,
                ..CorpusConfig::for_profile(&profile)
            };
            let scenario = Scenario::build(cfg.seed(), spec, &kinds, cal, eval, &corpus_cfg);
            let result =
                verify_inequality(&profile, &id, &scenario, ctx, cfg.margin.unwrap_or(2.0))?;
            let summary = summarize(&result.reports);
            rows.push(SweepRow {
                id,
                alpha,
                beta,
                items: summary.items,
                max_ratio: summary.max_ratio,
                failures: summary.failures.len(),
                ap_constant: ap_constant(&weight, profile.p1, &ctx.index)?.value,
                note: None,
            });
            reports.extend(result.reports);
        }
    }
    let failed = rows.iter().any(|r| r.failures > 0);
    emit_reports(cfg, &reports, json!({}))?;
    if let Some(path) = cfg.summary_path() {
        let text = match cfg.format() {
            Format::Csv => {
                let mut s = String::from(SWEEP_HEADER);
                s.push('\n');
                for r in &rows {
                    s.push_str(&r.csv_row());
                    s.push('\n');
                }
                s
            }
            Format::Json => pretty(&json!({ "schema": SCHEMA, "rows": rows })),
        };
        write_out(Some(&path), &text)?;
    }
    Ok(failed)
}

/// Checked up front so no work is done before a bad path is reported.
pub fn validate(cfg: &RunConfig) -> CliResult<()> {
    cfg.check_outputs()?;
    if let Some(m) = cfg.margin {
        if !(m >= 1.0 && m.is_finite()) {
            return Err(invalid(format!("margin {m} must be a finite number >= 1")));
        }
    }
    Ok(())
}
