//! Validated exponent bundles, one shape per theorem.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result, RELATION_TOL};

/// Which inequality a profile feeds.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum TheoremTag {
    #[serde(rename = "T1.1")]
    T11,
    #[serde(rename = "C1.4")]
    C14,
    #[serde(rename = "T4.1")]
    T41,
    #[serde(rename = "T4.2")]
    T42,
    #[serde(rename = "T5.1")]
    T51,
    #[serde(rename = "T5.2")]
    T52,
    #[serde(rename = "C5.3")]
    C53,
}

impl TheoremTag {
    pub const ALL: [TheoremTag; 7] = [
        TheoremTag::T11,
        TheoremTag::C14,
        TheoremTag::T41,
        TheoremTag::T42,
        TheoremTag::T51,
        TheoremTag::T52,
        TheoremTag::C53,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            TheoremTag::T11 => "T1.1",
            TheoremTag::C14 => "C1.4",
            TheoremTag::T41 => "T4.1",
            TheoremTag::T42 => "T4.2",
            TheoremTag::T51 => "T5.1",
            TheoremTag::T52 => "T5.2",
            TheoremTag::C53 => "C5.3",
        }
    }
}

impl fmt::Display for TheoremTag {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TheoremTag {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        TheoremTag::ALL
            .into_iter()
            .find(|t| t.as_str() == s)
            .ok_or_else(|| Error::RelationViolated(format!("unknown theorem tag {s:?}")))
    }
}

/// Free exponents as supplied by a user; missing derived ones are computed.
#[derive(Debug, Clone, Copy, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RawExponents {
    pub n: Option<usize>,
    pub alpha: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub r: Option<f64>,
    pub s: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub p0: Option<f64>,
    pub q0: Option<f64>,
    pub a: Option<f64>,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
}

/// A complete exponent set satisfying every relation of its theorem.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ExponentProfile {
    pub tag: TheoremTag,
    pub n: usize,
    pub alpha: f64,
    pub p1: f64,
    pub p2: f64,
    pub r: f64,
    pub s: f64,
    pub p: f64,
    pub q: f64,
    pub p0: f64,
    pub q0: f64,
    pub a: f64,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub q1: Option<f64>,
    pub q2: Option<f64>,
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= RELATION_TOL * a.abs().max(b.abs()).max(1.0)
}

fn need(v: Option<f64>, name: &str) -> Result<f64> {
    v.ok_or_else(|| Error::RelationViolated(format!("missing exponent {name}")))
}

/// Collects failing relations so all of them are reported at once.
struct Checks(Vec<String>);

impl Checks {
    fn holds(&mut self, ok: bool, relation: &str) {
        if !ok {
            self.0.push(relation.to_string());
        }
    }

    fn finish(self) -> Result<()> {
        if self.0.is_empty() {
            Ok(())
        } else {
            Err(Error::RelationViolated(self.0.join("; ")))
        }
    }
}

/// `x` from `1/x = v`, rejecting non-positive `v`.
fn recip(v: f64, relation: &str) -> Result<f64> {
    if v > RELATION_TOL && v.is_finite() {
        Ok(1.0 / v)
    } else {
        Err(Error::RelationViolated(format!(
            "{relation} gives a non-positive or infinite reciprocal"
        )))
    }
}

/// Use a supplied value after checking it against the derived one.
fn settle(given: Option<f64>, derived: f64, relation: &str, checks: &mut Checks) -> f64 {
    if let Some(g) = given {
        checks.holds(close(g, derived), relation);
        g
    } else {
        derived
    }
}

/// Validate raw exponents for a theorem, deriving the dependent ones.
pub fn make_profile(tag: TheoremTag, raw: &RawExponents) -> Result<ExponentProfile> {
    let n = raw.n.unwrap_or(1);
    if !(1..=2).contains(&n) {
        return Err(Error::RelationViolated(format!(
            "dimension n = {n} not in {{1, 2}}"
        )));
    }
    let nf = n as f64;
    let alpha = need(raw.alpha, "alpha")?;
    let mut c = Checks(Vec::new());
    c.holds(alpha > 0.0 && alpha < nf, "0 < α < n");

    // r and s: one may be derived from the other; optional for C5.3 only.
    let (r, s) = match (raw.r, raw.s) {
        (Some(r), Some(s)) => (r, s),
        (Some(r), None) => (r, r / (r - 1.0)),
        (None, Some(s)) => (s / (s - 1.0), s),
        (None, None) if tag == TheoremTag::C53 => (f64::NAN, f64::NAN),
        (None, None) => return Err(Error::RelationViolated("missing exponent r or s".into())),
    };
    let has_rs = !r.is_nan();
    if has_rs {
        c.holds(
            r > 1.0 && s > 1.0 && close(1.0 / r + 1.0 / s, 1.0),
            "1/r + 1/s = 1 with r, s > 1",
        );
    }

    let profile = match tag {
        TheoremTag::T11 | TheoremTag::T41 | TheoremTag::C14 | TheoremTag::T42 | TheoremTag::T51 => {
            let p1 = need(raw.p1, "p1")?;
            let p2 = need(raw.p2, "p2")?;
            c.holds(p1 > r && r > 1.0, "p1 > r > 1");
            c.holds(p2 > s && s > 1.0, "p2 > s > 1");
            c.holds(p1 < f64::INFINITY && p2 < f64::INFINITY, "1 < p1, p2 < ∞");
            let p = settle(
                raw.p,
                1.0 / (1.0 / p1 + 1.0 / p2),
                "1/p = 1/p1 + 1/p2",
                &mut c,
            );
            let (p0, q0, r0) = match tag {
                TheoremTag::C14 => {
                    let q0 = recip(1.0 / p - alpha / nf, "1/q = 1/p1 + 1/p2 - α/n")?;
                    let p0 = settle(raw.p0, p, "p0 = p", &mut c);
                    let q0 = settle(raw.q0, q0, "1/p1 + 1/p2 - 1/q = α/n", &mut c);
                    (p0, q0, None)
                }
                TheoremTag::T42 | TheoremTag::T51 => {
                    let p0 = need(raw.p0, "p0")?;
                    let r0 = need(raw.r0, "r0")?;
                    let q0 = recip(1.0 / p0 + 1.0 / r0 - alpha / nf, "1/q0 = 1/p0 + 1/r0 - α/n")?;
                    let q0 = settle(raw.q0, q0, "1/q0 = 1/p0 + 1/r0 - α/n", &mut c);
                    c.holds(r0 >= nf / alpha * (1.0 - RELATION_TOL), "r0 >= n/α");
                    (p0, q0, Some(r0))
                }
                _ => {
                    let p0 = need(raw.p0, "p0")?;
                    let q0 = recip(1.0 / p0 - alpha / nf, "1/q0 = 1/p0 - α/n")?;
                    let q0 = settle(raw.q0, q0, "1/q0 = 1/p0 - α/n", &mut c);
                    (p0, q0, None)
                }
            };
            let q = settle(raw.q, q0 * p / p0, "q/q0 = p/p0", &mut c);
            c.holds(p > 0.0 && p <= p0 * (1.0 + RELATION_TOL), "0 < p <= p0");
            c.holds(q > 0.0 && q <= q0 * (1.0 + RELATION_TOL), "0 < q <= q0");
            c.holds(p > 1.0 || q > 0.5, "p > 1 or q > 1/2");
            let a = match tag {
                TheoremTag::C14 => raw.a.unwrap_or(1.0),
                _ => need(raw.a, "a")?,
            };
            if tag != TheoremTag::C14 {
                c.holds(a > 1.0, "a > 1");
            }
            if matches!(tag, TheoremTag::T41 | TheoremTag::T42 | TheoremTag::T51) {
                c.holds(a < p1 / r && a < p2 / s, "a < min(p1/s', p2/r')");
            }
            if let Some(r0) = r0 {
                c.holds(a < r0 / q0, "a < r0/q0");
            }
            let r1 = if tag == TheoremTag::T51 {
                let derived = if q > 1.0 { a * q } else { q };
                Some(settle(
                    raw.r1,
                    derived,
                    "r1 = aq (q > 1) or q (q <= 1)",
                    &mut c,
                ))
            } else {
                raw.r1
            };
            ExponentProfile {
                tag,
                n,
                alpha,
                p1,
                p2,
                r,
                s,
                p,
                q,
                p0,
                q0,
                a,
                r0,
                r1,
                q1: raw.q1,
                q2: raw.q2,
            }
        }
        TheoremTag::T52 | TheoremTag::C53 => {
            let q1 = need(raw.q1, "q1")?;
            let q2 = need(raw.q2, "q2")?;
            let inv = 1.0 / q1 + 1.0 / q2;
            c.holds(alpha / nf < inv && inv < 1.0, "α/n < 1/q1 + 1/q2 < 1");
            let r0 = if tag == TheoremTag::T52 {
                Some(need(raw.r0, "r0")?)
            } else {
                None
            };
            let extra = r0.map_or(0.0, |r0| 1.0 / r0);
            let q0 = recip(extra + inv - alpha / nf, "1/q0 = 1/r0 + 1/q1 + 1/q2 - α/n")?;
            let q0 = settle(raw.q0, q0, "1/q0 = [1/r0 +] 1/q1 + 1/q2 - α/n", &mut c);
            // q/q0 = p1/q1 = p2/q2: from q, or from p1.
            let (q, p1, p2) = match (raw.q, raw.p1) {
                (Some(q), _) => {
                    let p1 = settle(raw.p1, q1 * q / q0, "q/q0 = p1/q1", &mut c);
                    let p2 = settle(raw.p2, q2 * q / q0, "q/q0 = p2/q2", &mut c);
                    (q, p1, p2)
                }
                (None, Some(p1)) => {
                    let q = q0 * p1 / q1;
                    let p2 = settle(raw.p2, q2 * q / q0, "q/q0 = p2/q2", &mut c);
                    (q, p1, p2)
                }
                (None, None) => {
                    return Err(Error::RelationViolated("missing exponent q or p1".into()))
                }
            };
            c.holds(p1 > 1.0 && p1 <= q1 * (1.0 + RELATION_TOL), "1 < p1 <= q1");
            c.holds(p2 > 1.0 && p2 <= q2 * (1.0 + RELATION_TOL), "1 < p2 <= q2");
            c.holds(q > 1.0 && q <= q0 * (1.0 + RELATION_TOL), "1 < q <= q0");
            if has_rs {
                c.holds(p1 > r, "p1 > r > 1");
                c.holds(p2 > s, "p2 > s > 1");
            }
            let r1 = if let Some(r0) = r0 {
                c.holds(1.0 / r0 < alpha / nf, "1/r0 < α/n");
                let r1 = need(raw.r1, "r1")?;
                c.holds(r1 > q, "r1 > q");
                c.holds(r1 > 1.0 && r1 <= r0 * (1.0 + RELATION_TOL), "1 < r1 <= r0");
                Some(r1)
            } else {
                raw.r1
            };
            let p = 1.0 / (1.0 / p1 + 1.0 / p2);
            ExponentProfile {
                tag,
                n,
                alpha,
                p1,
                p2,
                r,
                s,
                p,
                q,
                p0: raw.p0.unwrap_or(1.0 / inv),
                q0,
                a: raw.a.unwrap_or(1.0),
                r0,
                r1,
                q1: Some(q1),
                q2: Some(q2),
            }
        }
    };
    c.finish()?;
    Ok(profile)
}

impl ExponentProfile {
    /// `(s p1 / (a s + p1), r p2 / (a r + p2))`: the component exponents of
    /// the weight constant (with `a = 1` for the one-weight theorems).
    pub fn reduced_exponents(&self, a: f64) -> (f64, f64) {
        (
            self.s * self.p1 / (a * self.s + self.p1),
            self.r * self.p2 / (a * self.r + self.p2),
        )
    }

    /// Inner exponent of the weighted maximal operator and the two-weight
    /// constant: `aq` when `q > 1`, else `q`.
    pub fn inner_power(&self) -> f64 {
        if self.q > 1.0 {
            self.a * self.q
        } else {
            self.q
        }
    }
}

/// Example profiles known to satisfy every relation, three per theorem.
pub fn example_profiles(tag: TheoremTag) -> Vec<ExponentProfile> {
    let raw = |alpha: f64, p1: f64, p2: f64, r: f64, p0: f64| RawExponents {
        alpha: Some(alpha),
        p1: Some(p1),
        p2: Some(p2),
        r: Some(r),
        p0: Some(p0),
        ..Default::default()
    };
    let list: Vec<RawExponents> = match tag {
        TheoremTag::T11 => vec![
            RawExponents {
                a: Some(1.5),
                ..raw(1.0 / 3.0, 4.0, 4.0, 2.0, 2.0)
            },
            RawExponents {
                a: Some(1.2),
                ..raw(0.25, 6.0, 3.0, 3.0, 3.0)
            },
            RawExponents {
                a: Some(1.5),
                ..raw(0.5, 3.0, 3.0, 2.0, 1.8)
            },
        ],
        TheoremTag::C14 => vec![
            raw(1.0 / 3.0, 4.0, 4.0, 2.0, 2.0),
            raw(0.25, 6.0, 3.0, 3.0, 2.0),
            raw(0.25, 5.0, 5.0, 2.0, 2.5),
        ],
        TheoremTag::T41 => vec![
            RawExponents {
                a: Some(1.5),
                ..raw(1.0 / 3.0, 4.0, 4.0, 2.0, 2.0)
            },
            RawExponents {
                a: Some(1.2),
                ..raw(0.25, 6.0, 3.6, 2.4, 2.5)
            },
            RawExponents {
                a: Some(1.1),
                ..raw(0.5, 3.0, 3.0, 2.0, 1.8)
            },
        ],
        TheoremTag::T42 => vec![
            RawExponents {
                a: Some(1.2),
                r0: Some(8.0),
                ..raw(0.25, 4.0, 4.0, 2.0, 2.0)
            },
            RawExponents {
                a: Some(1.1),
                r0: Some(6.0),
                ..raw(0.25, 6.0, 3.6, 2.4, 3.0)
            },
            RawExponents {
                a: Some(1.2),
                r0: Some(4.0),
                ..raw(0.3, 5.0, 5.0, 2.0, 2.5)
            },
        ],
        TheoremTag::T51 => vec![
            RawExponents {
                a: Some(1.2),
                r0: Some(8.0),
                ..raw(0.25, 4.0, 4.0, 2.0, 2.0)
            },
            RawExponents {
                a: Some(1.1),
                r0: Some(6.0),
                ..raw(0.25, 6.0, 3.6, 2.4, 3.0)
            },
            RawExponents {
                a: Some(1.2),
                r0: Some(4.0),
                ..raw(0.3, 5.0, 5.0, 2.0, 2.5)
            },
        ],
        TheoremTag::T52 => vec![
            RawExponents {
                alpha: Some(0.4),
                q1: Some(4.0),
                q2: Some(4.0),
                r0: Some(4.0),
                r1: Some(3.0),
                q: Some(2.0),
                r: Some(2.0),
                ..Default::default()
            },
            RawExponents {
                alpha: Some(0.4),
                q1: Some(5.0),
                q2: Some(4.0),
                r0: Some(5.0),
                r1: Some(4.0),
                q: Some(2.0),
                r: Some(2.2),
                ..Default::default()
            },
            RawExponents {
                alpha: Some(0.6),
                q1: Some(3.0),
                q2: Some(3.0),
                r0: Some(2.5),
                r1: Some(2.5),
                q: Some(1.5),
                r: Some(2.0),
                ..Default::default()
            },
        ],
        TheoremTag::C53 => vec![
            RawExponents {
                alpha: Some(0.25),
                q1: Some(4.0),
                q2: Some(4.0),
                p1: Some(2.0),
                ..Default::default()
            },
            RawExponents {
                alpha: Some(0.3),
                q1: Some(5.0),
                q2: Some(4.0),
                q: Some(4.0),
                r: Some(2.5),
                ..Default::default()
            },
            RawExponents {
                alpha: Some(0.5),
                q1: Some(3.0),
                q2: Some(3.0),
                q: Some(4.0),
                ..Default::default()
            },
        ],
    };
    list.iter()
        .map(|raw| make_profile(tag, raw).unwrap_or_else(|e| panic!("{tag} example invalid: {e}")))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn t11_boundary_rejected() {
        let raw = RawExponents {
            alpha: Some(0.5),
            p1: Some(4.0),
            p2: Some(4.0),
            r: Some(2.0),
            p0: Some(2.0),
            a: Some(1.5),
            ..Default::default()
        };
        let err = make_profile(TheoremTag::T11, &raw).unwrap_err();
        assert!(matches!(err, Error::RelationViolated(m) if m.contains("1/q0 = 1/p0 - α/n")));
    }

    #[test]
    fn t11_example_accepted() {
        let raw = RawExponents {
            alpha: Some(1.0 / 3.0),
            p1: Some(4.0),
            p2: Some(4.0),
            r: Some(2.0),
            p0: Some(2.0),
            a: Some(1.5),
            ..Default::default()
        };
        let p = make_profile(TheoremTag::T11, &raw).unwrap();
        assert!((p.q0 - 6.0).abs() < 1e-12);
        assert!((p.q - 6.0).abs() < 1e-12);
        assert_eq!(p.s, 2.0);
    }

    #[test]
    fn c53_examples() {
        let mut raw = RawExponents {
            alpha: Some(0.5),
            q1: Some(4.0),
            q2: Some(4.0),
            p1: Some(2.0),
            p2: Some(2.0),
            ..Default::default()
        };
        assert!(make_profile(TheoremTag::C53, &raw).is_err());
        raw.alpha = Some(0.25);
        let p = make_profile(TheoremTag::C53, &raw).unwrap();
        assert!((p.q0 - 4.0).abs() < 1e-12);
        assert!((p.q - 2.0).abs() < 1e-12);
    }

    #[test]
    fn examples_are_valid() {
        for tag in TheoremTag::ALL {
            assert_eq!(example_profiles(tag).len(), 3);
        }
    }

    #[test]
    fn tag_roundtrip() {
        for tag in TheoremTag::ALL {
            assert_eq!(tag.as_str().parse::<TheoremTag>().unwrap(), tag);
            let json = serde_json::to_string(&tag).unwrap();
            assert_eq!(json, format!("\"{}\"", tag.as_str()));
        }
    }
}
