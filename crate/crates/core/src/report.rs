//! Structured run reports and the built-in regression matrix.
//!
//! Every front-end run produces one [`RunReport`]: a version stamp, the
//! fixture/cone/config identification, one [`CheckEntry`] per executed check
//! and an overall pass/fail flag.  Reports serialize deterministically; the
//! only volatile fields are the creation timestamp and the per-entry wall
//! times, both zeroed by [`normalized`] for byte-for-byte comparisons.
//!
//! The regression matrix pins every catalog fixture to the checks it was
//! built to exercise, including the expected outcome — refutations are
//! expected refutations, so a matrix run passes only when each row lands on
//! its recorded side.

use std::time::{Instant, SystemTime, UNIX_EPOCH};

use serde::{Deserialize, Serialize};

use crate::checks::{
    self, ArgSel, CheckError, CheckRequest, Polarity, PropertyKind, Status, Verdict,
};
use crate::cone::Cone;
use crate::config::Config;
use crate::fixture::{builtin_fixture, Fixture};
use crate::minimax::{self, MinimaxOutcome, TheoremId, REACHABILITY_ID};

pub const REPORT_VERSION: &str = env!("CARGO_PKG_VERSION");

/// Aggregate outcome of a run.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Overall {
    Pass,
    Fail,
}

/// One executed check inside a report.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CheckEntry {
    /// Property id or theorem id.
    pub id: String,
    /// Fixture override for matrix runs; single-fixture runs inherit the
    /// report header.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fixture: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub cone: Option<String>,
    /// Configuration override when the entry ran off the report's base
    /// config (matrix rows fix their own densities).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub config: Option<Config>,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub verdict: Option<Verdict>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outcome: Option<MinimaxOutcome>,
    /// Wall-clock milliseconds; volatile, zeroed by [`normalized`].  Bundled
    /// theorem runs attribute the whole bundle to the conclusion entry.
    pub wall_ms: f64,
}

/// A complete run document with stable field names.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RunReport {
    pub version: String,
    /// Unix seconds at creation; volatile, zeroed by [`normalized`].
    pub timestamp: u64,
    pub fixture: String,
    pub cone: String,
    pub config: Config,
    pub checks: Vec<CheckEntry>,
    pub overall: Overall,
}

fn now_secs() -> u64 {
    SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0)
}

fn ms_since(started: Instant) -> f64 {
    (started.elapsed().as_secs_f64() * 1e6).round() / 1e3
}

/// Cone identification for the report header: the bare name for built-ins,
/// name plus normals otherwise.
pub fn cone_desc(cone: &Cone) -> String {
    if Cone::builtin_names().contains(&cone.name.as_str()) {
        cone.name.clone()
    } else {
        format!("{} normals={:?}", cone.name, cone.normals)
    }
}

/// The volatile-field-free form used for determinism comparisons.
pub fn normalized(mut report: RunReport) -> RunReport {
    report.timestamp = 0;
    for e in &mut report.checks {
        e.wall_ms = 0.0;
    }
    report
}

/// Serializes a report as pretty JSON with a trailing newline.
pub fn to_json(report: &RunReport) -> String {
    let mut s = serde_json::to_string_pretty(report).expect("reports hold only plain data");
    s.push('\n');
    s
}

/// Renders a report as a markdown summary: a header, one table row per
/// check, and the serialized witness or certificate of each decisive entry.
pub fn to_markdown(report: &RunReport) -> String {
    let mut out = String::new();
    out.push_str("# Verification report\n\n");
    out.push_str(&format!("- version: {}\n", report.version));
    out.push_str(&format!("- fixture: {}\n", report.fixture));
    out.push_str(&format!("- cone: {}\n", report.cone));
    out.push_str(&format!(
        "- config: resolution {}, n_max {}, lambda_steps {}, eps_cone {:e}\n",
        report.config.grid_resolution,
        report.config.n_max,
        report.config.lambda_steps,
        report.config.eps_cone
    ));
    out.push_str(&format!(
        "- overall: **{}**\n\n",
        match report.overall {
            Overall::Pass => "pass",
            Overall::Fail => "fail",
        }
    ));
    out.push_str("| check | fixture | cone | status | wall (ms) |\n");
    out.push_str("|-------|---------|------|--------|-----------|\n");
    for e in &report.checks {
        out.push_str(&format!(
            "| {} | {} | {} | {:?} | {:.3} |\n",
            e.id,
            e.fixture.as_deref().unwrap_or(&report.fixture),
            e.cone.as_deref().unwrap_or(&report.cone),
            e.status,
            e.wall_ms
        ));
    }
    let mut details = String::new();
    for e in &report.checks {
        if let Some(w) = e.verdict.as_ref().and_then(|v| v.witness.as_ref()) {
            details.push_str(&format!(
                "\n### {} — {:?}\n\n```json\n{}\n```\n",
                e.id,
                e.status,
                serde_json::to_string_pretty(w).expect("witnesses hold only plain data")
            ));
        } else if let Some(outcome) = &e.outcome {
            details.push_str(&format!(
                "\n### {} — {:?}\n\n```json\n{}\n```\n",
                e.id,
                e.status,
                serde_json::to_string_pretty(outcome).expect("outcomes hold only plain data")
            ));
        }
    }
    if !details.is_empty() {
        out.push_str("\n## Evidence");
        out.push_str(&details);
    }
    out
}

fn entry_for_verdict(v: Verdict, wall_ms: f64) -> CheckEntry {
    CheckEntry {
        id: v.property.clone(),
        fixture: None,
        cone: None,
        config: None,
        status: v.status,
        verdict: Some(v),
        outcome: None,
        wall_ms,
    }
}

fn outcome_status(outcome: &MinimaxOutcome) -> Status {
    if outcome.is_certified() {
        Status::Confirmed
    } else {
        Status::NotConfirmed
    }
}

/// Runs one property check and wraps it in a report.
pub fn report_check(
    fx: &Fixture,
    cone: &Cone,
    cfg: &Config,
    req: &CheckRequest,
) -> Result<RunReport, CheckError> {
    let started = Instant::now();
    let v = checks::run_property(fx, cone, cfg, req)?;
    let entry = entry_for_verdict(v, ms_since(started));
    let overall = if entry.status.is_positive() { Overall::Pass } else { Overall::Fail };
    Ok(RunReport {
        version: REPORT_VERSION.to_string(),
        timestamp: now_secs(),
        fixture: fx.name.clone(),
        cone: cone_desc(cone),
        config: cfg.clone(),
        checks: vec![entry],
        overall,
    })
}

/// Runs a theorem bundle and wraps hypotheses plus conclusion in a report.
pub fn report_verify(
    fx: &Fixture,
    cone: &Cone,
    cfg: &Config,
    theorem: TheoremId,
) -> Result<RunReport, CheckError> {
    let started = Instant::now();
    let rep = minimax::run_theorem_suite(fx, cone, theorem, cfg)?;
    let wall = ms_since(started);
    let mut entries: Vec<CheckEntry> =
        rep.hypotheses.into_iter().map(|v| entry_for_verdict(v, 0.0)).collect();
    entries.push(CheckEntry {
        id: theorem.id().to_string(),
        fixture: None,
        cone: None,
        config: None,
        status: outcome_status(&rep.outcome),
        verdict: None,
        outcome: Some(rep.outcome),
        wall_ms: wall,
    });
    let overall = if rep.consistent { Overall::Pass } else { Overall::Fail };
    Ok(RunReport {
        version: REPORT_VERSION.to_string(),
        timestamp: now_secs(),
        fixture: fx.name.clone(),
        cone: cone_desc(cone),
        config: cfg.clone(),
        checks: entries,
        overall,
    })
}

/// One row of the regression matrix.
#[derive(Clone, Copy, Debug)]
pub struct MatrixRow {
    pub fixture: &'static str,
    pub cone: &'static str,
    pub task: MatrixTask,
    /// Grid resolution override; rows on expensive planar fixtures run
    /// coarser than the base config.
    pub resolution: Option<usize>,
    pub n_max: Option<usize>,
    /// Expected side: positive verdicts / consistent bundles when true,
    /// refutations / inconsistent bundles when false.
    pub expect_positive: bool,
}

#[derive(Clone, Copy, Debug)]
pub enum MatrixTask {
    Property { kind: PropertyKind, arg: ArgSel, polarity: Polarity },
    Theorem(TheoremId),
}

fn prop(
    fixture: &'static str,
    cone: &'static str,
    kind: PropertyKind,
    arg: ArgSel,
    polarity: Polarity,
    resolution: Option<usize>,
    n_max: Option<usize>,
    expect_positive: bool,
) -> MatrixRow {
    MatrixRow {
        fixture,
        cone,
        task: MatrixTask::Property { kind, arg, polarity },
        resolution,
        n_max,
        expect_positive,
    }
}

fn thm(
    fixture: &'static str,
    cone: &'static str,
    theorem: TheoremId,
    resolution: Option<usize>,
    expect_positive: bool,
) -> MatrixRow {
    MatrixRow {
        fixture,
        cone,
        task: MatrixTask::Theorem(theorem),
        resolution,
        n_max: None,
        expect_positive,
    }
}

/// The full regression matrix: every catalog fixture with the checks it was
/// built to exercise and the side each is expected to land on.
pub fn paper_matrix() -> Vec<MatrixRow> {
    use ArgSel::First;
    use Polarity::{Concave, Convex};
    use PropertyKind as K;
    use TheoremId as T;
    vec![
        // Refutation catalog: these maps exist to break one hypothesis.
        prop("ex2_1", "Rplus", K::Wcg, First, Convex, None, None, false),
        prop("ex3_2", "R2plus", K::PairProperlyV, First, Convex, Some(25), Some(2), false),
        prop("ex3_6", "R2plus", K::TransferMuV, First, Convex, None, None, false),
        prop("rem4_2", "Rplus", K::TransferProperlyIii, First, Concave, None, None, false),
        // Confirmation catalog.
        prop("ex3_1", "Rplus", K::TransferMuV, First, Convex, Some(25), None, true),
        prop("ex3_1", "Rplus", K::Alpha, First, Convex, None, None, true),
        prop("ex3_7", "Rplus", K::TransferProperlyIii, First, Concave, Some(25), None, true),
        prop("ex3_8", "Rplus", K::Gamma, First, Convex, None, None, true),
        prop("const_A0", "Rplus", K::Qc, First, Convex, None, None, true),
        prop("ex4_4", "Rplus", K::WeaklyZ, First, Convex, None, None, true),
        prop("ex4_5", "R2plus", K::WeaklyZ, First, Convex, Some(15), None, true),
        // Theorem bundles on their home fixtures.
        thm("ex4_2", "Rplus", T::Thm41I, Some(25), true),
        thm("ex4_2", "Rplus", T::Cor41I, Some(25), true),
        thm("ex4_2", "Rplus", T::Thm43I, Some(25), true),
        thm("ex4_2", "Rplus", T::Thm44I, Some(25), true),
        thm("ex4_1", "minusR2plus", T::Thm42I, Some(12), true),
        thm("ex4_3", "Rplus", T::Cor43I, Some(25), true),
        thm("ex4_6", "Rplus", T::Thm45, Some(25), true),
        thm("ex4_7", "R2plus", T::Cor44, Some(15), true),
        thm("ex4_2", "Rplus", T::Thm46, Some(15), true),
        thm("ex4_5", "R2plus", T::Cor45, Some(15), true),
        // Bundles whose hypotheses the home fixture genuinely refutes: the
        // conclusion still certifies, so the run pins consistent = false.
        thm("ex4_2", "Rplus", T::Thm41Ii, Some(25), false),
        thm("ex4_5", "R2plus", T::Cor42I, Some(15), false),
        // No certificate at all: the diagonal/row extremal sets of the gap
        // map sit on opposite sides of the ray.
        thm("diag_gap", "Rplus", T::Thm41I, Some(25), false),
    ]
}

fn row_config(base: &Config, row: &MatrixRow) -> Config {
    let mut cfg = base.clone();
    if let Some(res) = row.resolution {
        cfg.grid_resolution = res;
    }
    if let Some(n) = row.n_max {
        cfg.n_max = n;
    }
    cfg
}

/// Runs the whole regression matrix against a base configuration.  The
/// report passes only when every row lands on its expected side.
pub fn report_suite(base: &Config) -> Result<RunReport, CheckError> {
    let mut entries = Vec::new();
    let mut all_matched = true;
    for row in paper_matrix() {
        let fx = builtin_fixture(row.fixture)?;
        let cone = Cone::builtin(row.cone, base.eps_cone, base.eps_interior)
            .map_err(|_| CheckError::UnsupportedCone(row.cone.to_string()))?;
        let cfg = row_config(base, &row);
        let cfg_override = if cfg == *base { None } else { Some(cfg.clone()) };
        let started = Instant::now();
        match row.task {
            MatrixTask::Property { kind, arg, polarity } => {
                let req = CheckRequest::new(kind).with_arg(arg).with_polarity(polarity);
                let v = checks::run_property(&fx, &cone, &cfg, &req)?;
                all_matched &= v.status.is_positive() == row.expect_positive;
                let mut entry = entry_for_verdict(v, ms_since(started));
                entry.fixture = Some(row.fixture.to_string());
                entry.cone = Some(row.cone.to_string());
                entry.config = cfg_override;
                entries.push(entry);
            }
            MatrixTask::Theorem(theorem) => {
                let rep = minimax::run_theorem_suite(&fx, &cone, theorem, &cfg)?;
                all_matched &= rep.consistent == row.expect_positive;
                for v in rep.hypotheses {
                    let mut entry = entry_for_verdict(v, 0.0);
                    entry.fixture = Some(row.fixture.to_string());
                    entry.cone = Some(row.cone.to_string());
                    entry.config = cfg_override.clone();
                    entries.push(entry);
                }
                entries.push(CheckEntry {
                    id: theorem.id().to_string(),
                    fixture: Some(row.fixture.to_string()),
                    cone: Some(row.cone.to_string()),
                    config: cfg_override,
                    status: outcome_status(&rep.outcome),
                    verdict: None,
                    outcome: Some(rep.outcome),
                    wall_ms: ms_since(started),
                });
            }
        }
    }
    Ok(RunReport {
        version: REPORT_VERSION.to_string(),
        timestamp: now_secs(),
        fixture: "matrix".to_string(),
        cone: "per-entry".to_string(),
        config: base.clone(),
        checks: entries,
        overall: if all_matched { Overall::Pass } else { Overall::Fail },
    })
}

/// Routes a verdict to its replayer: synthetic reachability verdicts replay
/// through the saddle module, everything else through the property parser.
pub fn replay_verdict(
    fx: &Fixture,
    cone: &Cone,
    cfg: &Config,
    v: &Verdict,
) -> Result<bool, CheckError> {
    if v.property == REACHABILITY_ID {
        minimax::replay_reachability(fx, cone, cfg, v)
    } else {
        checks::replay(fx, cone, cfg, v)
    }
}

/// Replays one report entry under its effective configuration.  Verdict
/// entries re-evaluate their witness; certified conclusion entries re-check
/// the certificate; failed conclusions carry nothing replayable.  Resolves
/// fixtures and cones by name, so it serves reports over the built-ins.
pub fn replay_entry(report: &RunReport, entry: &CheckEntry) -> Result<bool, CheckError> {
    let fixture_name = entry.fixture.as_deref().unwrap_or(&report.fixture);
    let cone_name = entry.cone.as_deref().unwrap_or(&report.cone);
    let cfg = entry.config.clone().unwrap_or_else(|| report.config.clone());
    let fx = builtin_fixture(fixture_name)?;
    let cone = Cone::builtin(cone_name, cfg.eps_cone, cfg.eps_interior)
        .map_err(|_| CheckError::UnsupportedCone(cone_name.to_string()))?;
    if let Some(v) = &entry.verdict {
        return replay_verdict(&fx, &cone, &cfg, v);
    }
    match &entry.outcome {
        Some(MinimaxOutcome::Certified(cert)) => {
            minimax::validate_certificate(&fx, &cone, entry.id.parse()?, cert, &cfg)
        }
        Some(MinimaxOutcome::Failed(_)) | None => Ok(true),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cfg(resolution: usize) -> Config {
        Config::default().with_resolution(resolution)
    }

    fn rplus() -> Cone {
        Cone::rplus(1e-9, 1e-9)
    }

    #[test]
    fn matrix_rows_resolve() {
        for row in paper_matrix() {
            builtin_fixture(row.fixture).unwrap();
            Cone::builtin(row.cone, 1e-9, 1e-9).unwrap();
        }
    }

    #[test]
    fn check_report_wraps_a_single_verdict() {
        let fx = builtin_fixture("ex3_1").unwrap();
        let req = CheckRequest::new(PropertyKind::Alpha);
        let rep = report_check(&fx, &rplus(), &cfg(20), &req).unwrap();
        assert_eq!(rep.overall, Overall::Pass);
        assert_eq!(rep.checks.len(), 1);
        assert_eq!(rep.checks[0].id, "alpha");
        assert_eq!(rep.fixture, "ex3_1");
        assert_eq!(rep.cone, "Rplus");
        assert!(replay_entry(&rep, &rep.checks[0]).unwrap());
    }

    #[test]
    fn verify_report_carries_hypotheses_and_conclusion() {
        let fx = builtin_fixture("ex4_6").unwrap();
        let rep = report_verify(&fx, &rplus(), &cfg(10), TheoremId::Thm45).unwrap();
        assert_eq!(rep.overall, Overall::Pass);
        assert_eq!(rep.checks.len(), 3);
        assert_eq!(rep.checks[0].id, "weakly_z");
        assert_eq!(rep.checks[1].id, REACHABILITY_ID);
        assert_eq!(rep.checks[2].id, "thm45");
        assert!(rep.checks[2].outcome.as_ref().unwrap().is_certified());
        for entry in &rep.checks {
            assert!(replay_entry(&rep, entry).unwrap(), "entry {} must replay", entry.id);
        }
    }

    #[test]
    fn failed_bundles_report_fail_overall() {
        let fx = builtin_fixture("diag_gap").unwrap();
        let rep = report_verify(&fx, &rplus(), &cfg(10), TheoremId::Thm41I).unwrap();
        assert_eq!(rep.overall, Overall::Fail);
        let conclusion = rep.checks.last().unwrap();
        assert_eq!(conclusion.status, Status::NotConfirmed);
        assert!(matches!(conclusion.outcome, Some(MinimaxOutcome::Failed(_))));
    }

    #[test]
    fn reports_roundtrip_and_normalize() {
        let fx = builtin_fixture("ex4_2").unwrap();
        let rep = report_verify(&fx, &rplus(), &cfg(10), TheoremId::Cor41I).unwrap();
        let text = to_json(&rep);
        let back: RunReport = serde_json::from_str(&text).unwrap();
        assert_eq!(rep, back);
        let norm = normalized(rep);
        assert_eq!(norm.timestamp, 0);
        assert!(norm.checks.iter().all(|e| e.wall_ms == 0.0));
    }

    #[test]
    fn markdown_renders_a_table_row_per_check() {
        let fx = builtin_fixture("ex4_2").unwrap();
        let rep = report_verify(&fx, &rplus(), &cfg(10), TheoremId::Cor41I).unwrap();
        let md = to_markdown(&rep);
        assert!(md.contains("# Verification report"));
        assert!(md.contains("| cor41_i | ex4_2 | Rplus |"));
        assert!(md.contains("- overall: **pass**"));
        assert!(md.contains("## Evidence"));
    }
}
