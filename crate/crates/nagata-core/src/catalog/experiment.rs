//! Experiment specs, the runner, and content-addressed records.

use std::collections::BTreeMap;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::{SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};
use serde_json::Value;
use sha2::{Digest, Sha256};

use super::CatalogError;
use crate::cover_engine::{
    brick_cover, certify, empirical_control_curve, exact_sequence_cover, heisenberg_brick_cover, verify_control,
    ControlCertificate, ControlEntry, ControlSample, Cover, CoverError, CoverFile, HeisenbergOverPlane, PlaneOverLine,
};
use crate::group_models::ball::cached_ball;
use crate::group_models::continuous::{axis_interval, filiform4_model, translated_set_diameter};
use crate::group_models::{
    bfs_ball, lamplighter_model, sol_lattice_model, GroupModel, Heisenberg, WordBall, Zn, CAT_MAP,
};
use crate::lie_algebra::{algebras, classify, DimensionReport, LieAlgebra};
use crate::metric_lab::distortion::write_distortion_csv;
use crate::metric_lab::{
    fit, fit_distortion, karidi_comparison, subgroup_distortion, DistortionSample, FitModel, FitReport, GroupMetric,
    KaridiCoordinates, KaridiEstimate, L1Metric, TableMetric,
};

pub const EXPERIMENT_KINDS: &[&str] =
    &["distortion", "karidi", "cover", "control-curve", "filiform-diameter", "lie-classify"];

/// Significant digits kept in serialized report values.
pub const REPORT_SIG_DIGITS: usize = 6;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "experiment", rename_all = "kebab-case")]
pub enum ExperimentSpec {
    Distortion {
        model: String,
        radius: u32,
        subgroup: String,
    },
    Karidi {
        model: String,
        radius: u32,
    },
    Cover {
        construction: String,
        model: String,
        radius: u32,
        scales: Vec<f64>,
    },
    ControlCurve {
        model: String,
        radius: u32,
        families: usize,
        scales: Vec<f64>,
    },
    FiliformDiameter {
        axis: String,
        c: f64,
        x1: Vec<f64>,
        h: f64,
        points: usize,
    },
    LieClassify {
        algebra: String,
    },
}

impl ExperimentSpec {
    pub fn kind(&self) -> &'static str {
        match self {
            ExperimentSpec::Distortion { .. } => "distortion",
            ExperimentSpec::Karidi { .. } => "karidi",
            ExperimentSpec::Cover { .. } => "cover",
            ExperimentSpec::ControlCurve { .. } => "control-curve",
            ExperimentSpec::FiliformDiameter { .. } => "filiform-diameter",
            ExperimentSpec::LieClassify { .. } => "lie-classify",
        }
    }

    /// Validate a JSON spec, reporting every missing or invalid field.
    pub fn from_json(v: &Value) -> Result<Self, CatalogError> {
        let mut errs = Vec::new();
        let Some(obj) = v.as_object() else {
            return Err(CatalogError::InvalidSpec(vec!["spec must be a JSON object".into()]));
        };
        let kind = match obj.get("experiment").and_then(Value::as_str) {
            Some(k) if EXPERIMENT_KINDS.contains(&k) => k,
            Some(k) => {
                return Err(CatalogError::InvalidSpec(vec![format!(
                    "experiment: unknown kind {k:?} (expected one of {})",
                    EXPERIMENT_KINDS.join(", ")
                )]))
            }
            None => return Err(CatalogError::InvalidSpec(vec!["experiment: missing".into()])),
        };
        let fields: &[(&str, Field)] = match kind {
            "distortion" => &[("model", Field::Model), ("radius", Field::Radius), ("subgroup", Field::Str)],
            "karidi" => &[("model", Field::Model), ("radius", Field::Radius)],
            "cover" => &[
                ("construction", Field::Str),
                ("model", Field::Model),
                ("radius", Field::Radius),
                ("scales", Field::Scales),
            ],
            "control-curve" => &[
                ("model", Field::Model),
                ("radius", Field::Radius),
                ("families", Field::Count),
                ("scales", Field::Scales),
            ],
            "filiform-diameter" => &[
                ("axis", Field::Str),
                ("c", Field::Positive),
                ("x1", Field::Scales),
                ("h", Field::Positive),
                ("points", Field::Count),
            ],
            _ => &[("algebra", Field::Str)],
        };
        for (name, f) in fields {
            match obj.get(*name) {
                None => errs.push(format!("{name}: missing")),
                Some(x) => {
                    if let Err(e) = f.check(x) {
                        errs.push(format!("{name}: {e}"));
                    }
                }
            }
        }
        for k in obj.keys() {
            if k != "experiment" && !fields.iter().any(|(n, _)| n == k) {
                errs.push(format!("{k}: unknown field for {kind}"));
            }
        }
        if errs.is_empty() {
            let spec: ExperimentSpec = serde_json::from_value(v.clone())?;
            errs.extend(spec.semantic_errors());
            if errs.is_empty() {
                return Ok(spec.normalized());
            }
        }
        Err(CatalogError::InvalidSpec(errs))
    }

    fn normalized(self) -> Self {
        match self {
            ExperimentSpec::Distortion { model, radius, subgroup } => {
                ExperimentSpec::Distortion { model: canonical_model(&model).unwrap().into(), radius, subgroup }
            }
            ExperimentSpec::Karidi { model, radius } => {
                ExperimentSpec::Karidi { model: canonical_model(&model).unwrap().into(), radius }
            }
            ExperimentSpec::Cover { construction, model, radius, scales } => {
                ExperimentSpec::Cover { construction, model: canonical_model(&model).unwrap().into(), radius, scales }
            }
            ExperimentSpec::ControlCurve { model, radius, families, scales } => ExperimentSpec::ControlCurve {
                model: canonical_model(&model).unwrap().into(),
                radius,
                families,
                scales,
            },
            other => other,
        }
    }

    fn semantic_errors(&self) -> Vec<String> {
        let mut e = Vec::new();
        match self {
            ExperimentSpec::Distortion { model, subgroup, .. } => {
                let m = canonical_model(model).unwrap_or("");
                let ok = matches!((m, subgroup.as_str()), ("heisenberg", "center") | ("sol", "fiber"));
                if !ok {
                    e.push(format!(
                        "subgroup: {subgroup:?} is not available for {model} (heisenberg: center, sol: fiber)"
                    ));
                }
            }
            ExperimentSpec::Karidi { model, .. } => {
                if !matches!(canonical_model(model), Some("heisenberg" | "Z^1" | "Z^2" | "Z^3")) {
                    e.push(format!("model: Karidi coordinates are defined for heisenberg and Z^n, not {model}"));
                }
            }
            ExperimentSpec::Cover { construction, model, .. } => {
                let m = canonical_model(model).unwrap_or("");
                let ok = match construction.as_str() {
                    "brick" => m.starts_with("Z^"),
                    "heis-brick" => m == "heisenberg",
                    "exact-seq" => m == "heisenberg" || m == "Z^2",
                    _ => {
                        e.push(format!("construction: unknown {construction:?} (brick, heis-brick, exact-seq)"));
                        true
                    }
                };
                if !ok {
                    e.push(format!("model: construction {construction} does not apply to {model}"));
                }
            }
            ExperimentSpec::ControlCurve { .. } => {}
            ExperimentSpec::FiliformDiameter { axis, points, .. } => {
                if axis != "e3" && axis != "e4" {
                    e.push(format!("axis: expected \"e3\" or \"e4\", got {axis:?}"));
                }
                if *points < 1 {
                    e.push("points: must be at least 1".into());
                }
            }
            ExperimentSpec::LieClassify { algebra } => {
                if algebras::builtin(algebra).is_none() {
                    e.push(format!("algebra: unknown built-in {algebra:?} ({})", algebras::BUILTIN_NAMES.join(", ")));
                }
            }
        }
        e
    }
}

#[derive(Clone, Copy)]
enum Field {
    Str,
    Model,
    Radius,
    Count,
    Positive,
    Scales,
}

impl Field {
    fn check(&self, v: &Value) -> Result<(), String> {
        match self {
            Field::Str => v.as_str().map(|_| ()).ok_or_else(|| "expected a string".into()),
            Field::Model => match v.as_str() {
                Some(s) if canonical_model(s).is_some() => Ok(()),
                Some(s) => Err(format!("unknown model {s:?} ({})", MODEL_IDS.join(", "))),
                None => Err("expected a string".into()),
            },
            Field::Radius => match v.as_u64() {
                Some(r) if (1..=u32::MAX as u64).contains(&r) => Ok(()),
                _ => Err("expected a positive integer".into()),
            },
            Field::Count => v.as_u64().map(|_| ()).ok_or_else(|| "expected a non-negative integer".into()),
            Field::Positive => match v.as_f64() {
                Some(x) if x > 0.0 && x.is_finite() => Ok(()),
                _ => Err("expected a positive number".into()),
            },
            Field::Scales => match v.as_array() {
                Some(a) if !a.is_empty() && a.iter().all(|x| x.as_f64().is_some_and(|x| x > 0.0 && x.is_finite())) => {
                    Ok(())
                }
                _ => Err("expected a nonempty list of positive numbers".into()),
            },
        }
    }
}

pub const MODEL_IDS: &[&str] = &["Z^1", "Z^2", "Z^3", "heisenberg", "sol", "lamplighter"];

/// Canonical model id, accepting a few spellings.
pub fn canonical_model(s: &str) -> Option<&'static str> {
    let l = s.to_ascii_lowercase();
    Some(match l.as_str() {
        "z^1" | "z1" | "z" => "Z^1",
        "z^2" | "z2" => "Z^2",
        "z^3" | "z3" => "Z^3",
        "heisenberg" | "heis" | "heis3" => "heisenberg",
        "sol" | "sol3" => "sol",
        "lamplighter" | "lamplighter-z2-z2" => "lamplighter",
        _ => return None,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FiliformRow {
    pub x1: f64,
    pub h: f64,
    pub diameter: f64,
    pub claim: f64,
    pub ratio: f64,
    pub refined_diameter: f64,
    pub refinement_change: f64,
    pub grid_nodes: usize,
    pub padding: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "kebab-case")]
pub enum ExperimentOutput {
    Distortion {
        pairs: usize,
        interior_pairs: usize,
        generator_inclusion_constant: Option<u32>,
        warning: Option<String>,
        power: Option<FitReport>,
        log: Option<FitReport>,
        linear: Option<FitReport>,
        fit_errors: BTreeMap<String, String>,
    },
    Karidi {
        estimate: KaridiEstimate,
    },
    Cover {
        certificate: ControlCertificate,
        params: Vec<BTreeMap<String, f64>>,
    },
    ControlCurve {
        samples: Vec<ControlSample>,
        linear: Option<FitReport>,
        power: Option<FitReport>,
        fit_errors: BTreeMap<String, String>,
    },
    FiliformDiameter {
        rows: Vec<FiliformRow>,
    },
    LieClassify {
        report: DimensionReport,
    },
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExperimentRecord {
    pub id: String,
    pub spec: ExperimentSpec,
    pub output: ExperimentOutput,
    pub csv: Option<String>,
    pub started_unix_ms: u64,
    pub finished_unix_ms: u64,
    pub code_version: String,
}

#[derive(Clone, Debug, Default)]
pub struct ExperimentContext {
    /// Ball cache directory; balls are recomputed when absent.
    pub cache_dir: Option<PathBuf>,
}

impl ExperimentContext {
    fn ball<G: GroupModel>(&self, model: &G, radius: u32) -> Result<WordBall<G::Elem>, CatalogError> {
        let r = match &self.cache_dir {
            Some(d) => cached_ball(model, radius, d),
            None => bfs_ball(model, radius),
        };
        r.map_err(|e| CatalogError::Run(e.to_string()))
    }
}

/// Canonical JSON of a spec: fixed key order, normalised numbers.
pub fn canonical_spec(spec: &ExperimentSpec) -> String {
    serde_json::to_string(&serde_json::to_value(spec).expect("spec serializes")).expect("value serializes")
}

/// First 16 hex digits of the SHA-256 of the canonical spec.
pub fn experiment_id(spec: &ExperimentSpec) -> String {
    let digest = Sha256::digest(canonical_spec(spec).as_bytes());
    digest.iter().take(8).map(|b| format!("{b:02x}")).collect()
}

/// `x` rounded to `digits` significant digits.
pub fn round_sig(x: f64, digits: usize) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.*e}", digits.saturating_sub(1), x).parse().unwrap_or(x)
}

/// Round every non-integer number in `v` to [`REPORT_SIG_DIGITS`].
pub fn round_value(v: &mut Value) {
    match v {
        Value::Number(n) if n.is_f64() => {
            let x = round_sig(n.as_f64().unwrap(), REPORT_SIG_DIGITS);
            if let Some(m) = serde_json::Number::from_f64(x) {
                *n = m;
            }
        }
        Value::Array(a) => a.iter_mut().for_each(round_value),
        Value::Object(o) => o.values_mut().for_each(round_value),
        _ => {}
    }
}

fn rounded(out: ExperimentOutput) -> Result<ExperimentOutput, CatalogError> {
    let mut v = serde_json::to_value(&out)?;
    round_value(&mut v);
    Ok(serde_json::from_value(v)?)
}

fn now_ms() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_millis() as u64).unwrap_or(0)
}

fn run_err(e: impl std::fmt::Display) -> CatalogError {
    CatalogError::Run(e.to_string())
}

fn fit_or(errs: &mut BTreeMap<String, String>, name: &str, r: Result<FitReport, impl std::fmt::Display>) -> Option<FitReport> {
    match r {
        Ok(f) => Some(f),
        Err(e) => {
            errs.insert(name.into(), e.to_string());
            None
        }
    }
}

fn distortion_output(sample: &DistortionSample) -> Result<(ExperimentOutput, Option<String>), CatalogError> {
    let mut buf = Vec::new();
    write_distortion_csv(sample, &mut buf).map_err(run_err)?;
    let csv = String::from_utf8(buf).expect("csv is utf8");
    let mut fit_errors = BTreeMap::new();
    let power = fit_or(&mut fit_errors, "power", fit_distortion(sample, FitModel::Power));
    let log = fit_or(&mut fit_errors, "log", fit_distortion(sample, FitModel::Log));
    let linear = fit_or(&mut fit_errors, "linear", fit_distortion(sample, FitModel::Linear));
    let out = ExperimentOutput::Distortion {
        pairs: sample.pairs.len(),
        interior_pairs: sample.pairs.iter().filter(|p| !p.boundary_flag).count(),
        generator_inclusion_constant: sample.generator_inclusion_constant,
        warning: sample.warning.clone(),
        power,
        log,
        linear,
        fit_errors,
    };
    Ok((out, Some(csv)))
}

fn verify_scales<G, M>(
    model: &G,
    ball: &WordBall<G::Elem>,
    metric: &M,
    scales: &[f64],
    build: impl Fn(f64) -> Result<Cover<G::Elem>, CoverError>,
    construction: &str,
) -> Result<ExperimentOutput, CatalogError>
where
    G: GroupModel,
    M: GroupMetric<G::Elem>,
{
    let mut entries = Vec::new();
    let mut params = Vec::new();
    for &s in scales {
        let cover = build(s).map_err(run_err)?;
        let e = verify_control(model, &cover, ball.elements(), |g| ball.is_boundary(g), metric).map_err(run_err)?;
        entries.push(e);
        params.push(cover.params);
    }
    Ok(ExperimentOutput::Cover { certificate: certify(&model.name(), ball.radius, construction, entries), params })
}

fn brick_run<const N: usize>(ctx: &ExperimentContext, radius: u32, scales: &[f64]) -> Result<ExperimentOutput, CatalogError> {
    let ball = ctx.ball(&Zn::<N>, radius)?;
    verify_scales(&Zn::<N>, &ball, &L1Metric, scales, |s| Ok(brick_cover(&ball, s)), "brick")
}

fn curve_output<G: GroupModel>(
    ctx: &ExperimentContext,
    model: &G,
    radius: u32,
    families: usize,
    scales: &[f64],
) -> Result<ExperimentOutput, CatalogError> {
    let ball = ctx.ball(model, radius)?;
    let n = families.saturating_sub(1);
    let samples = empirical_control_curve(model, &ball, n, scales);
    let pts: Vec<(f64, f64)> =
        samples.iter().filter_map(|c| c.bound.filter(|&b| b > 0.0).map(|b| (c.scale, b))).collect();
    let mut fit_errors = BTreeMap::new();
    let linear = fit_or(&mut fit_errors, "linear", fit(&pts, FitModel::Linear));
    let power = fit_or(&mut fit_errors, "power", fit(&pts, FitModel::Power));
    Ok(ExperimentOutput::ControlCurve { samples, linear, power, fit_errors })
}

/// The output, plus the CSV when it cannot be derived from the output.
fn execute(spec: &ExperimentSpec, ctx: &ExperimentContext) -> Result<(ExperimentOutput, Option<String>), CatalogError> {
    let plain = |o: Result<ExperimentOutput, CatalogError>| o.map(|o| (o, None));
    match spec {
        ExperimentSpec::Distortion { model, radius, .. } => match model.as_str() {
            "heisenberg" => {
                let ball = ctx.ball(&Heisenberg, *radius)?;
                let s = subgroup_distortion::<Heisenberg, _>(
                    &ball,
                    &Zn::<1>,
                    "center",
                    |g| (g[0] == 0 && g[1] == 0).then_some([g[2]]),
                    |h| [0, 0, h[0]],
                )
                .map_err(run_err)?;
                distortion_output(&s)
            }
            _ => {
                let sol = sol_lattice_model(CAT_MAP).map_err(run_err)?;
                let ball = ctx.ball(&sol, *radius)?;
                let s = subgroup_distortion::<crate::group_models::SolLattice, _>(
                    &ball,
                    &Zn::<2>,
                    "fiber",
                    |g| (g[2] == 0).then_some([g[0], g[1]]),
                    |h| [h[0], h[1], 0],
                )
                .map_err(run_err)?;
                distortion_output(&s)
            }
        },
        ExperimentSpec::Karidi { model, radius } => {
            let estimate = match model.as_str() {
                "heisenberg" => {
                    karidi_comparison(&Heisenberg, &ctx.ball(&Heisenberg, *radius)?, &KaridiCoordinates::heisenberg())
                }
                "Z^1" => karidi_comparison(&Zn::<1>, &ctx.ball(&Zn::<1>, *radius)?, &KaridiCoordinates::abelian(1)),
                "Z^2" => karidi_comparison(&Zn::<2>, &ctx.ball(&Zn::<2>, *radius)?, &KaridiCoordinates::abelian(2)),
                _ => karidi_comparison(&Zn::<3>, &ctx.ball(&Zn::<3>, *radius)?, &KaridiCoordinates::abelian(3)),
            }
            .map_err(run_err)?;
            Ok((ExperimentOutput::Karidi { estimate }, None))
        }
        ExperimentSpec::Cover { construction, model, radius, scales } => plain(match (construction.as_str(), model.as_str()) {
            ("brick", "Z^1") => brick_run::<1>(ctx, *radius, scales),
            ("brick", "Z^2") => brick_run::<2>(ctx, *radius, scales),
            ("brick", _) => brick_run::<3>(ctx, *radius, scales),
            ("heis-brick", _) => {
                let ball = ctx.ball(&Heisenberg, *radius)?;
                let metric = TableMetric::new(&Heisenberg, 2 * radius).map_err(run_err)?;
                verify_scales(&Heisenberg, &ball, &metric, scales, |s| heisenberg_brick_cover(&ball, s), "heis-brick")
            }
            ("exact-seq", "heisenberg") => {
                let ball = ctx.ball(&Heisenberg, *radius)?;
                let hball = ctx.ball(&Zn::<2>, *radius)?;
                let metric = TableMetric::new(&Heisenberg, 2 * radius).map_err(run_err)?;
                verify_scales(
                    &Heisenberg,
                    &ball,
                    &metric,
                    scales,
                    |s| exact_sequence_cover(&HeisenbergOverPlane, &ball, &brick_cover(&hball, s), &L1Metric, s),
                    "exact-seq",
                )
            }
            _ => {
                let ball = ctx.ball(&Zn::<2>, *radius)?;
                let hball = ctx.ball(&Zn::<1>, *radius)?;
                verify_scales(
                    &Zn::<2>,
                    &ball,
                    &L1Metric,
                    scales,
                    |s| exact_sequence_cover(&PlaneOverLine, &ball, &brick_cover(&hball, s), &L1Metric, s),
                    "exact-seq",
                )
            }
        }),
        ExperimentSpec::ControlCurve { model, radius, families, scales } => plain(match model.as_str() {
            "Z^1" => curve_output(ctx, &Zn::<1>, *radius, *families, scales),
            "Z^2" => curve_output(ctx, &Zn::<2>, *radius, *families, scales),
            "Z^3" => curve_output(ctx, &Zn::<3>, *radius, *families, scales),
            "heisenberg" => curve_output(ctx, &Heisenberg, *radius, *families, scales),
            "sol" => curve_output(ctx, &sol_lattice_model(CAT_MAP).map_err(run_err)?, *radius, *families, scales),
            _ => curve_output(ctx, &lamplighter_model(), *radius, *families, scales),
        }),
        ExperimentSpec::FiliformDiameter { axis, c, x1, h, points } => {
            let m = filiform4_model();
            let ax = if axis == "e3" { 2 } else { 3 };
            let set = axis_interval(ax, *c, *points);
            let mut rows = Vec::new();
            for &x in x1 {
                let tr = [x, 0.0, 0.0, 0.0];
                let coarse = translated_set_diameter(&m, &set, &tr, *h).map_err(run_err)?;
                let fine = translated_set_diameter(&m, &set, &tr, h / 2.0).map_err(run_err)?;
                let claim = if ax == 3 { x * x * c } else { x * c };
                rows.push(FiliformRow {
                    x1: x,
                    h: *h,
                    diameter: coarse.diameter,
                    claim,
                    ratio: coarse.diameter / claim,
                    refined_diameter: fine.diameter,
                    refinement_change: (coarse.diameter - fine.diameter).abs() / fine.diameter,
                    grid_nodes: coarse.grid_nodes,
                    padding: coarse.padding,
                });
            }
            Ok((ExperimentOutput::FiliformDiameter { rows }, None))
        }
        ExperimentSpec::LieClassify { algebra } => {
            let l: LieAlgebra = algebras::builtin(algebra).expect("validated");
            Ok((ExperimentOutput::LieClassify { report: classify(&l) }, None))
        }
    }
}

fn csv_of(out: &ExperimentOutput) -> Result<Option<String>, CatalogError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| CatalogError::Run(e.to_string());
    match out {
        ExperimentOutput::Cover { certificate, .. } => {
            w.write_record([
                "scale",
                "families",
                "claimed_bound",
                "verified_bound",
                "interior_bound",
                "components",
                "boundary_components",
                "pass",
            ])
            .map_err(csv_err)?;
            for e in &certificate.entries {
                w.write_record([
                    e.scale.to_string(),
                    e.families.to_string(),
                    e.claimed_bound.to_string(),
                    e.verified_bound.to_string(),
                    e.interior_bound.to_string(),
                    e.components.to_string(),
                    e.boundary_components.to_string(),
                    e.pass.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        ExperimentOutput::ControlCurve { samples, .. } => {
            w.write_record(["scale", "bound", "rho", "clusters", "colors"]).map_err(csv_err)?;
            for c in samples {
                let opt = |x: Option<String>| x.unwrap_or_default();
                w.write_record([
                    c.scale.to_string(),
                    opt(c.bound.map(|b| b.to_string())),
                    opt(c.rho.map(|r| r.to_string())),
                    c.clusters.to_string(),
                    c.colors.to_string(),
                ])
                .map_err(csv_err)?;
            }
        }
        ExperimentOutput::FiliformDiameter { rows } => {
            w.write_record(["x1", "h", "diameter", "claim", "ratio", "refined_diameter", "refinement_change"])
                .map_err(csv_err)?;
            for r in rows {
                w.write_record(
                    [r.x1, r.h, r.diameter, r.claim, r.ratio, r.refined_diameter, r.refinement_change]
                        .map(|x| x.to_string()),
                )
                .map_err(csv_err)?;
            }
        }
        ExperimentOutput::Distortion { .. } | ExperimentOutput::Karidi { .. } | ExperimentOutput::LieClassify { .. } => {
            return Ok(None)
        }
    }
    let bytes = w.into_inner().map_err(|e| CatalogError::Run(e.to_string()))?;
    Ok(Some(String::from_utf8(bytes).expect("utf8")))
}

/// Validate and run a JSON spec. Nothing is persisted; see [`write_record`].
pub fn run_experiment(spec: &Value, ctx: &ExperimentContext) -> Result<ExperimentRecord, CatalogError> {
    let spec = ExperimentSpec::from_json(spec)?;
    let started = now_ms();
    let (raw, csv) = execute(&spec, ctx)?;
    let output = rounded(raw)?;
    let csv = match csv {
        Some(c) => Some(c),
        None => csv_of(&output)?,
    };
    Ok(ExperimentRecord {
        id: experiment_id(&spec),
        spec,
        output,
        csv,
        started_unix_ms: started,
        finished_unix_ms: now_ms(),
        code_version: env!("CARGO_PKG_VERSION").to_string(),
    })
}

/// Persist under `root/<id>/`: `spec.json`, `output.json` and `output.csv`
/// are the deterministic primary outputs; `record.json` adds timestamps.
/// Files are written to a temporary directory first, then moved into place.
pub fn write_record(root: &Path, record: &ExperimentRecord) -> Result<PathBuf, CatalogError> {
    let dir = root.join(&record.id);
    let tmp = root.join(format!(".{}.tmp", record.id));
    if tmp.exists() {
        fs::remove_dir_all(&tmp)?;
    }
    fs::create_dir_all(&tmp)?;
    fs::write(tmp.join("spec.json"), serde_json::to_string_pretty(&record.spec)? + "\n")?;
    fs::write(tmp.join("output.json"), serde_json::to_string_pretty(&record.output)? + "\n")?;
    if let Some(csv) = &record.csv {
        fs::write(tmp.join("output.csv"), csv)?;
    }
    fs::write(tmp.join("record.json"), serde_json::to_string_pretty(record)? + "\n")?;
    if dir.exists() {
        fs::remove_dir_all(&dir)?;
    }
    fs::rename(&tmp, &dir)?;
    Ok(dir)
}

pub fn load_record(dir: &Path) -> Result<ExperimentRecord, CatalogError> {
    Ok(serde_json::from_str(&fs::read_to_string(dir.join("record.json"))?)?)
}

/// Build one cover at scale `s` and return its on-disk form.
pub fn build_cover_file(
    construction: &str,
    model: &str,
    radius: u32,
    s: f64,
    ctx: &ExperimentContext,
) -> Result<CoverFile, CatalogError> {
    // reuse the spec validator for the construction/model pairing
    let spec = ExperimentSpec::from_json(&serde_json::json!({
        "experiment": "cover", "construction": construction, "model": model,
        "radius": radius, "scales": [s],
    }))?;
    let ExperimentSpec::Cover { construction, model, .. } = spec else { unreachable!() };
    fn brick<const N: usize>(ctx: &ExperimentContext, radius: u32, s: f64) -> Result<CoverFile, CatalogError> {
        let ball = ctx.ball(&Zn::<N>, radius)?;
        Ok(CoverFile::from_cover(&Zn::<N>, radius, &brick_cover(&ball, s)))
    }
    match (construction.as_str(), model.as_str()) {
        ("brick", "Z^1") => brick::<1>(ctx, radius, s),
        ("brick", "Z^2") => brick::<2>(ctx, radius, s),
        ("brick", _) => brick::<3>(ctx, radius, s),
        ("heis-brick", _) => {
            let ball = ctx.ball(&Heisenberg, radius)?;
            let c = heisenberg_brick_cover(&ball, s).map_err(run_err)?;
            Ok(CoverFile::from_cover(&Heisenberg, radius, &c))
        }
        ("exact-seq", "heisenberg") => {
            let ball = ctx.ball(&Heisenberg, radius)?;
            let hball = ctx.ball(&Zn::<2>, radius)?;
            let c = exact_sequence_cover(&HeisenbergOverPlane, &ball, &brick_cover(&hball, s), &L1Metric, s)
                .map_err(run_err)?;
            Ok(CoverFile::from_cover(&Heisenberg, radius, &c))
        }
        _ => {
            let ball = ctx.ball(&Zn::<2>, radius)?;
            let hball = ctx.ball(&Zn::<1>, radius)?;
            let c = exact_sequence_cover(&PlaneOverLine, &ball, &brick_cover(&hball, s), &L1Metric, s)
                .map_err(run_err)?;
            Ok(CoverFile::from_cover(&Zn::<2>, radius, &c))
        }
    }
}

/// Verify a stored cover against the ball it was built on, optionally at a
/// different scale than the one recorded.
pub fn verify_cover_file(
    file: &CoverFile,
    scale: Option<f64>,
    ctx: &ExperimentContext,
) -> Result<ControlEntry, CatalogError> {
    fn check<G: GroupModel, M: GroupMetric<G::Elem>>(
        model: &G,
        metric: &M,
        file: &CoverFile,
        scale: Option<f64>,
        ctx: &ExperimentContext,
    ) -> Result<ControlEntry, CatalogError> {
        let mut cover = file.to_cover(model).map_err(run_err)?;
        if let Some(s) = scale {
            cover.scale = s;
        }
        let ball = ctx.ball(model, file.radius)?;
        verify_control(model, &cover, ball.elements(), |g| ball.is_boundary(g), metric).map_err(run_err)
    }
    let r2 = 2 * file.radius;
    match canonical_model(&file.model) {
        Some("Z^1") => check(&Zn::<1>, &L1Metric, file, scale, ctx),
        Some("Z^2") => check(&Zn::<2>, &L1Metric, file, scale, ctx),
        Some("Z^3") => check(&Zn::<3>, &L1Metric, file, scale, ctx),
        Some("heisenberg") => check(&Heisenberg, &TableMetric::new(&Heisenberg, r2).map_err(run_err)?, file, scale, ctx),
        Some("lamplighter") => {
            let m = lamplighter_model();
            check(&m, &TableMetric::new(&m, r2).map_err(run_err)?, file, scale, ctx)
        }
        _ if file.model.starts_with("sol") => {
            let m = sol_lattice_model(CAT_MAP).map_err(run_err)?;
            if m.name() != file.model && file.model != "sol" {
                return Err(CatalogError::Run(format!("unsupported SOL matrix in {:?}", file.model)));
            }
            check(&m, &TableMetric::new(&m, r2).map_err(run_err)?, file, scale, ctx)
        }
        _ => Err(CatalogError::Run(format!("unknown model {:?}", file.model))),
    }
}
