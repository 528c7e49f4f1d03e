//! Registry of groups with their predicted dimensions, and the verdicts
//! that compare experiment records against them.

mod experiment;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::lie_algebra::{algebras, classify, PredictedDim};

pub use experiment::{
    build_cover_file, canonical_model, canonical_spec, experiment_id, load_record, round_sig, round_value, run_experiment, verify_cover_file, write_record,
    ExperimentContext, ExperimentOutput, ExperimentRecord, ExperimentSpec, FiliformRow, EXPERIMENT_KINDS,
    REPORT_SIG_DIGITS,
};

#[derive(Debug, Error)]
pub enum CatalogError {
    #[error("invalid experiment spec: {}", .0.join("; "))]
    InvalidSpec(Vec<String>),
    #[error("unknown catalog entry {0:?}")]
    UnknownEntry(String),
    #[error("cannot compare a {experiment} record with entry {entry:?}: {reason}")]
    Incomparable { experiment: String, entry: String, reason: String },
    #[error("experiment failed: {0}")]
    Run(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

/// A dimension value; infinity is a tag, never a large integer.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(tag = "kind", content = "value", rename_all = "snake_case")]
pub enum DimValue {
    Finite(u32),
    Infinite,
}

impl std::fmt::Display for DimValue {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            DimValue::Finite(n) => write!(f, "{n}"),
            DimValue::Infinite => write!(f, "∞"),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct Prediction {
    pub value: DimValue,
    pub citation: String,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CatalogEntry {
    pub name: String,
    pub aliases: Vec<String>,
    /// Discrete model id understood by the experiment runner.
    pub model: Option<String>,
    /// Built-in Lie algebra name.
    pub lie_algebra: Option<String>,
    pub asdim: Option<Prediction>,
    pub asdim_an: Option<Prediction>,
    /// For the connected Lie group (with a left-invariant Riemannian metric).
    pub dim_an: Option<Prediction>,
    pub hirsch: Option<Prediction>,
    /// Dimension of a maximal compact subgroup, as entry data.
    pub maximal_compact_dim: Option<u32>,
    pub notes: String,
}

impl CatalogEntry {
    pub fn matches(&self, name: &str) -> bool {
        self.name.eq_ignore_ascii_case(name) || self.aliases.iter().any(|a| a.eq_ignore_ascii_case(name))
    }

    pub fn predictions(&self) -> impl Iterator<Item = (&'static str, &Prediction)> {
        [("asdim", &self.asdim), ("asdim_an", &self.asdim_an), ("dim_an", &self.dim_an), ("hirsch", &self.hirsch)]
            .into_iter()
            .filter_map(|(k, p)| p.as_ref().map(|p| (k, p)))
    }
}

const CITE_ABELIAN: &str = "abelian base case of the nilpotent computation, where the dimension bound is an equality";
const CITE_POLYCYCLIC: &str = "polycyclic groups with word metrics: asdim_AN(Γ, d_w) = h(Γ)";
const CITE_SOLVABLE: &str = "connected solvable Lie groups: dim_AN(G, d_G) = dim(G)";
const CITE_SEMISIMPLE: &str = "semisimple Lie groups: asdim_AN(G, d) = dim(G/T), T a maximal compact subgroup";
const CITE_LIE: &str = "connected Lie groups: dim_AN(G) = dim(G)";
const CITE_LAMP_AN: &str = "lamplighter example: the Cayley graph of ℤ₂ ≀ ℤ² has infinite Assouad-Nagata dimension";
const CITE_LAMP_AS: &str = "lamplighter example: the asymptotic dimension of ℤ₂ ≀ ℤ² equals two";
const CITE_HIRSCH: &str = "Hirsch length as the sum of ranks of derived-series quotients";
const CITE_LOWER: &str = "asymptotic dimension is at most the asymptotic Assouad-Nagata dimension, with equality here";

fn p(n: u32, cite: &str) -> Option<Prediction> {
    Some(Prediction { value: DimValue::Finite(n), citation: cite.to_string() })
}

fn abelian_entry(n: u32) -> CatalogEntry {
    CatalogEntry {
        name: format!("Z^{n}"),
        aliases: vec![format!("z{n}"), format!("Z{n}")],
        model: Some(format!("Z^{n}")),
        lie_algebra: Some(format!("abelian{n}")),
        asdim: p(n, CITE_LOWER),
        asdim_an: p(n, CITE_ABELIAN),
        dim_an: p(n, CITE_SOLVABLE),
        hirsch: p(n, CITE_HIRSCH),
        maximal_compact_dim: Some(0),
        notes: format!("cocompact lattice in ℝ^{n}; standard generators"),
    }
}

/// The built-in registry.
pub fn builtin_catalog() -> Vec<CatalogEntry> {
    vec![
        abelian_entry(1),
        abelian_entry(2),
        abelian_entry(3),
        CatalogEntry {
            name: "heisenberg".into(),
            aliases: vec!["heis3".into(), "H3".into()],
            model: Some("heisenberg".into()),
            lie_algebra: Some("heis3".into()),
            asdim: p(3, CITE_LOWER),
            asdim_an: p(3, CITE_POLYCYCLIC),
            dim_an: p(3, CITE_SOLVABLE),
            hirsch: p(3, CITE_HIRSCH),
            maximal_compact_dim: Some(0),
            notes: "integer points of the 3-dimensional Heisenberg group, law (a,b,c)(a',b',c') = (a+a', b+b', c+c'+ab'); \
                    the centre is quadratically distorted (r = 2)"
                .into(),
        },
        CatalogEntry {
            name: "filiform4".into(),
            aliases: vec![],
            model: None,
            lie_algebra: Some("filiform4".into()),
            asdim: p(4, CITE_LOWER),
            asdim_an: p(4, CITE_POLYCYCLIC),
            dim_an: p(4, CITE_SOLVABLE),
            hirsch: p(4, CITE_HIRSCH),
            maximal_compact_dim: Some(0),
            notes: "4-dimensional filiform group; lattices have Hirsch length 4. Only the continuous model is \
                    implemented (grid metric experiments)"
                .into(),
        },
        CatalogEntry {
            name: "sol".into(),
            aliases: vec!["sol3".into(), "sol-lattice".into()],
            model: Some("sol".into()),
            lie_algebra: Some("sol3".into()),
            asdim: p(3, CITE_LOWER),
            asdim_an: p(3, CITE_POLYCYCLIC),
            dim_an: p(3, CITE_SOLVABLE),
            hirsch: p(3, CITE_HIRSCH),
            maximal_compact_dim: Some(0),
            notes: "ℤ² ⋊_A ℤ with A = [[2,1],[1,1]]; the ℤ² fibre is the exponential radical and is \
                    exponentially distorted"
                .into(),
        },
        CatalogEntry {
            name: "lamplighter-Z2-Z2".into(),
            aliases: vec!["lamplighter".into()],
            model: Some("lamplighter".into()),
            lie_algebra: None,
            asdim: p(2, CITE_LAMP_AS),
            asdim_an: Some(Prediction { value: DimValue::Infinite, citation: CITE_LAMP_AN.into() }),
            dim_an: None,
            hirsch: None,
            maximal_compact_dim: None,
            notes: "ℤ₂ ≀ ℤ² with cursor moves and a toggle; not quasi-isometric to any connected Lie group".into(),
        },
        CatalogEntry {
            name: "sl2".into(),
            aliases: vec!["SL(2,R)".into()],
            model: None,
            lie_algebra: Some("sl2".into()),
            asdim: p(2, CITE_SEMISIMPLE),
            asdim_an: p(2, CITE_SEMISIMPLE),
            dim_an: p(3, CITE_LIE),
            hirsch: None,
            maximal_compact_dim: Some(1),
            notes: "Iwasawa G = ANK: A positive diagonal (dim 1), N upper unipotent (dim 1), K = SO(2) (dim 1); \
                    G/K is the hyperbolic plane"
                .into(),
        },
        CatalogEntry {
            name: "so3".into(),
            aliases: vec!["SO(3)".into()],
            model: None,
            lie_algebra: Some("so3".into()),
            asdim: p(0, CITE_SEMISIMPLE),
            asdim_an: p(0, CITE_SEMISIMPLE),
            dim_an: p(3, CITE_LIE),
            hirsch: None,
            maximal_compact_dim: Some(3),
            notes: "compact: K = G and A, N are trivial, so G/T is a point".into(),
        },
    ]
}

pub fn lookup(name: &str) -> Option<CatalogEntry> {
    builtin_catalog().into_iter().find(|e| e.matches(name))
}

/// Checks that the algebra-level prediction agrees with the entry: solvable
/// algebras predict `asdim_AN = dim`; otherwise the entry's maximal compact
/// dimension supplies `dim − dim T`.
pub fn classify_matches_entry(entry: &CatalogEntry) -> Option<Result<(), String>> {
    let alg = algebras::builtin(entry.lie_algebra.as_deref()?)?;
    let report = classify(&alg);
    let expected = match report.predicted_asdim_an {
        PredictedDim::Value(v) => v as u32,
        PredictedDim::RequiresCatalog => match entry.maximal_compact_dim {
            Some(t) if t as usize <= report.topological_dim => report.topological_dim as u32 - t,
            _ => return Some(Err("entry lacks maximal compact data".into())),
        },
    };
    let got = entry.asdim_an.as_ref().map(|p| p.value);
    if got != Some(DimValue::Finite(expected)) {
        return Some(Err(format!("algebra predicts {expected}, entry has {got:?}")));
    }
    if let (Some(h), Some(ph)) = (report.hirsch_length, &entry.hirsch) {
        if ph.value != DimValue::Finite(h as u32) {
            return Some(Err(format!("algebra gives Hirsch length {h}, entry has {}", ph.value)));
        }
    }
    Some(Ok(()))
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub enum VerdictKind {
    #[serde(rename = "PASS")]
    Pass,
    #[serde(rename = "FAIL")]
    Fail,
    #[serde(rename = "EVIDENCE-ONLY")]
    EvidenceOnly,
}

impl std::fmt::Display for VerdictKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            VerdictKind::Pass => "PASS",
            VerdictKind::Fail => "FAIL",
            VerdictKind::EvidenceOnly => "EVIDENCE-ONLY",
        })
    }
}

impl VerdictKind {
    /// 0 for PASS and EVIDENCE-ONLY, 1 for FAIL.
    pub fn exit_code(&self) -> i32 {
        match self {
            VerdictKind::Fail => 1,
            _ => 0,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub verdict: VerdictKind,
    pub entry: String,
    pub experiment: String,
    pub rule: String,
    pub citation: String,
    pub detail: String,
}

/// Allowed gap between a fitted distortion exponent and `1/r`.
pub const EXPONENT_TOLERANCE: f64 = 0.05;
/// Residual limit for a distortion power fit.
pub const POWER_RESIDUAL_LIMIT: f64 = 0.2;
/// Residual limit for a logarithmic distortion fit.
pub const LOG_RESIDUAL_LIMIT: f64 = 0.3;
/// Factor by which the linear fit must be worse than the log fit.
pub const LOG_ADVANTAGE: f64 = 3.0;
/// Exponent above which a control curve counts as superlinear.
pub const SUPERLINEAR_EXPONENT: f64 = 1.3;

fn need<'a>(entry: &'a CatalogEntry, field: Option<&'a Prediction>, what: &str, exp: &str) -> Result<&'a Prediction, CatalogError> {
    field.ok_or_else(|| CatalogError::Incomparable {
        experiment: exp.into(),
        entry: entry.name.clone(),
        reason: format!("entry has no {what} prediction"),
    })
}

/// Apply the comparison rule for the record's experiment type.
pub fn compare_to_prediction(record: &ExperimentRecord, entry: &CatalogEntry) -> Result<Verdict, CatalogError> {
    let exp = record.spec.kind();
    let incomparable = |reason: &str| CatalogError::Incomparable {
        experiment: exp.to_string(),
        entry: entry.name.clone(),
        reason: reason.to_string(),
    };
    let verdict = |v, rule: String, citation: &str, detail: String| Verdict {
        verdict: v,
        entry: entry.name.clone(),
        experiment: exp.to_string(),
        rule,
        citation: citation.to_string(),
        detail,
    };
    match &record.output {
        ExperimentOutput::Cover { certificate, .. } => {
            let pred = need(entry, entry.asdim_an.as_ref(), "asdim_AN", exp)?;
            let fams = certificate.families;
            let rule = "cover family count vs predicted asdim_AN + 1, certificate must pass".to_string();
            let detail = format!("{fams} families, certificate {}", if certificate.pass { "passes" } else { "fails" });
            Ok(match pred.value {
                DimValue::Infinite => verdict(VerdictKind::EvidenceOnly, rule, &pred.citation, detail),
                DimValue::Finite(n) => {
                    let kind = if !certificate.pass || fams < n as usize + 1 {
                        VerdictKind::Fail
                    } else if fams == n as usize + 1 {
                        VerdictKind::Pass
                    } else {
                        VerdictKind::EvidenceOnly
                    };
                    verdict(kind, rule, &pred.citation, format!("{detail}; predicted {}", n + 1))
                }
            })
        }
        ExperimentOutput::Distortion { power, log, linear, .. } => {
            let lie = entry.lie_algebra.as_deref().and_then(algebras::builtin).ok_or_else(|| incomparable("no Lie algebra"))?;
            let report = classify(&lie);
            if let Some(r) = report.nilpotency_degree.filter(|&r| r >= 2) {
                let target = 1.0 / r as f64;
                let fit = power.as_ref().ok_or_else(|| incomparable("no power fit in record"))?;
                let ok = (fit.alpha - target).abs() <= EXPONENT_TOLERANCE && fit.max_relative_residual < POWER_RESIDUAL_LIMIT;
                Ok(verdict(
                    if ok { VerdictKind::Pass } else { VerdictKind::Fail },
                    format!("power exponent within {EXPONENT_TOLERANCE} of 1/r = {target}, residual < {POWER_RESIDUAL_LIMIT}"),
                    "centre distortion: (H, min(1, d_H^(1/r))) for r-step nilpotent groups",
                    format!("alpha = {}, residual = {}", fit.alpha, fit.max_relative_residual),
                ))
            } else if report.is_solvable && !report.is_nilpotent {
                let (lg, ln) = match (log, linear) {
                    (Some(a), Some(b)) => (a, b),
                    _ => return Err(incomparable("record lacks log and linear fits")),
                };
                let ok = lg.max_relative_residual < LOG_RESIDUAL_LIMIT
                    && ln.max_relative_residual >= LOG_ADVANTAGE * lg.max_relative_residual;
                Ok(verdict(
                    if ok { VerdictKind::Pass } else { VerdictKind::Fail },
                    format!(
                        "log fit residual < {LOG_RESIDUAL_LIMIT} and linear residual at least {LOG_ADVANTAGE}x worse"
                    ),
                    "exponential radical: ‖h‖_G is comparable to log(‖h‖_Exp(G) + 1)",
                    format!("log residual = {}, linear residual = {}", lg.max_relative_residual, ln.max_relative_residual),
                ))
            } else {
                Err(incomparable("distortion rule needs a non-abelian nilpotent or an exponentially distorted solvable entry"))
            }
        }
        ExperimentOutput::ControlCurve { linear, power, .. } => {
            let pred = need(entry, entry.asdim_an.as_ref(), "asdim_AN", exp)?;
            let detail = format!(
                "linear residual = {}, power exponent = {}",
                linear.as_ref().map_or("n/a".into(), |f| f.max_relative_residual.to_string()),
                power.as_ref().map_or("n/a".into(), |f| f.alpha.to_string())
            );
            let rule = match pred.value {
                DimValue::Infinite => format!("heuristic curve: power exponent > {SUPERLINEAR_EXPONENT} is evidence for ∞"),
                DimValue::Finite(_) => "heuristic curve: linear fit residual < 0.25 is evidence for a finite value".into(),
            };
            Ok(verdict(VerdictKind::EvidenceOnly, rule, &pred.citation, detail))
        }
        ExperimentOutput::Karidi { estimate, .. } => {
            let lie = entry.lie_algebra.as_deref().and_then(algebras::builtin).ok_or_else(|| incomparable("no Lie algebra"))?;
            if !classify(&lie).is_nilpotent {
                return Err(incomparable("Karidi comparison needs a nilpotent entry"));
            }
            Ok(verdict(
                VerdictKind::EvidenceOnly,
                "finite max-ratio constant on one ball is evidence of a uniform two-sided bound".into(),
                "Karidi: 1/κ D(1, p) ≤ d_N(1, p) ≤ κ D(1, p) for d_N(1, p) > 1",
                format!("kappa_hat = {} over {} samples", estimate.kappa_hat, estimate.samples),
            ))
        }
        ExperimentOutput::LieClassify { report } => {
            let pred = need(entry, entry.asdim_an.as_ref(), "asdim_AN", exp)?;
            if entry.lie_algebra.as_deref() != Some(report.name.as_str()) {
                return Err(incomparable("record classifies a different algebra"));
            }
            let res = classify_matches_entry(entry).ok_or_else(|| incomparable("no built-in algebra"))?;
            Ok(verdict(
                if res.is_ok() { VerdictKind::Pass } else { VerdictKind::Fail },
                "algebra-level prediction equals the catalog asdim_AN".into(),
                &pred.citation,
                res.err().unwrap_or_else(|| format!("asdim_AN = {}", pred.value)),
            ))
        }
        ExperimentOutput::FiliformDiameter { rows, .. } => {
            if entry.lie_algebra.as_deref() != Some("filiform4") {
                return Err(incomparable("filiform diameters compare only with the filiform4 entry"));
            }
            let ok = rows.iter().all(|r| r.ratio >= 0.5 && r.ratio <= 2.0 && r.refinement_change < 0.1);
            Ok(verdict(
                if ok { VerdictKind::Pass } else { VerdictKind::Fail },
                "diameter within a factor 2 of the claim and half-step refinement change < 10%".into(),
                "filiform example: translated e4-interval has diameter x1²c, e3-interval x1c",
                rows.iter()
                    .map(|r| format!("x1={}: ratio {} change {}", r.x1, r.ratio, r.refinement_change))
                    .collect::<Vec<_>>()
                    .join(", "),
            ))
        }
    }
}
