//! Sampling-based checkers for the generalized convexity, transfer, pair,
//! and selection conditions on discretized set-valued maps.
//!
//! Every checker sweeps finite grids and returns a [`Verdict`] whose meaning
//! is one-sided: `Refuted`/`Confirmed` come with a replayable numeric witness
//! and are sound up to the float tolerances; `NotRefuted`/`NotConfirmed` are
//! claims about the searched sample only.  The uniform polarity convention is
//! that a concave check is the convex check run on `-F` (same cone), and a
//! second-argument check runs the first-argument logic on the transposed map.

mod conditions;
mod graph;
mod pair;
mod properly;
mod single;
mod transfer;
mod weaklyz;

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::cone::Cone;
use crate::config::Config;
use crate::engine::{Engine, EngineError};
use crate::fixture::{Fixture, FixtureError};
use crate::value::Pt;

/// Outcome of a property check.  Refutation-style properties (universally
/// quantified conditions) report `Refuted`/`NotRefuted`; confirmation-style
/// properties (existential searches) report `Confirmed`/`NotConfirmed`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Refuted,
    NotRefuted,
    Confirmed,
    NotConfirmed,
}

impl Status {
    /// True for the outcomes that leave the property standing.
    pub fn is_positive(self) -> bool {
        matches!(self, Status::NotRefuted | Status::Confirmed)
    }
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Status::Refuted => "Refuted",
            Status::NotRefuted => "NotRefuted",
            Status::Confirmed => "Confirmed",
            Status::NotConfirmed => "NotConfirmed",
        };
        f.write_str(s)
    }
}

/// Which argument of `F(x, y)` the property constrains.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ArgSel {
    First,
    Second,
}

impl FromStr for ArgSel {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "first" => Ok(ArgSel::First),
            "second" => Ok(ArgSel::Second),
            other => Err(format!("unknown argument selector `{other}` (expected first|second)")),
        }
    }
}

/// Convex checks run on `F` as given; concave checks run the same predicate
/// on `-F` under the same cone.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Polarity {
    Convex,
    Concave,
}

impl FromStr for Polarity {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "convex" => Ok(Polarity::Convex),
            "concave" => Ok(Polarity::Concave),
            other => Err(format!("unknown polarity `{other}` (expected convex|concave)")),
        }
    }
}

/// The checkable property family.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PropertyKind {
    ProperlyQcIii,
    ProperlyQcV,
    NaturallyQcIii,
    NaturallyQcV,
    SQc,
    Qc,
    NaturalQcScalar,
    Wcg,
    Wnq,
    TransferMuV,
    TransferMuIii,
    TransferWeakMuV,
    TransferWeakMuIii,
    TransferMuScalar,
    PairProperlyIii,
    PairProperlyV,
    PairProperlyPlain,
    PairProperlyScalar,
    TransferProperlyIii,
    TransferProperlyV,
    Alpha,
    AlphaPrime,
    Gamma,
    GammaPrime,
    WeaklyZ,
}

/// All kinds in declaration order (the CLI listing order).
pub const ALL_KINDS: [PropertyKind; 25] = [
    PropertyKind::ProperlyQcIii,
    PropertyKind::ProperlyQcV,
    PropertyKind::NaturallyQcIii,
    PropertyKind::NaturallyQcV,
    PropertyKind::SQc,
    PropertyKind::Qc,
    PropertyKind::NaturalQcScalar,
    PropertyKind::Wcg,
    PropertyKind::Wnq,
    PropertyKind::TransferMuV,
    PropertyKind::TransferMuIii,
    PropertyKind::TransferWeakMuV,
    PropertyKind::TransferWeakMuIii,
    PropertyKind::TransferMuScalar,
    PropertyKind::PairProperlyIii,
    PropertyKind::PairProperlyV,
    PropertyKind::PairProperlyPlain,
    PropertyKind::PairProperlyScalar,
    PropertyKind::TransferProperlyIii,
    PropertyKind::TransferProperlyV,
    PropertyKind::Alpha,
    PropertyKind::AlphaPrime,
    PropertyKind::Gamma,
    PropertyKind::GammaPrime,
    PropertyKind::WeaklyZ,
];

impl PropertyKind {
    /// Stable identifier used by the CLI and reports.
    pub fn id(self) -> &'static str {
        match self {
            PropertyKind::ProperlyQcIii => "properly_qc_iii",
            PropertyKind::ProperlyQcV => "properly_qc_v",
            PropertyKind::NaturallyQcIii => "naturally_qc_iii",
            PropertyKind::NaturallyQcV => "naturally_qc_v",
            PropertyKind::SQc => "s_qc",
            PropertyKind::Qc => "qc",
            PropertyKind::NaturalQcScalar => "natural_qc_scalar",
            PropertyKind::Wcg => "wcg",
            PropertyKind::Wnq => "wnq",
            PropertyKind::TransferMuV => "transfer_mu_v",
            PropertyKind::TransferMuIii => "transfer_mu_iii",
            PropertyKind::TransferWeakMuV => "transfer_weak_mu_v",
            PropertyKind::TransferWeakMuIii => "transfer_weak_mu_iii",
            PropertyKind::TransferMuScalar => "transfer_mu_scalar",
            PropertyKind::PairProperlyIii => "pair_properly_iii",
            PropertyKind::PairProperlyV => "pair_properly_v",
            PropertyKind::PairProperlyPlain => "pair_properly_plain",
            PropertyKind::PairProperlyScalar => "pair_properly_scalar",
            PropertyKind::TransferProperlyIii => "transfer_properly_iii",
            PropertyKind::TransferProperlyV => "transfer_properly_v",
            PropertyKind::Alpha => "alpha",
            PropertyKind::AlphaPrime => "alpha_prime",
            PropertyKind::Gamma => "gamma",
            PropertyKind::GammaPrime => "gamma_prime",
            PropertyKind::WeaklyZ => "weakly_z",
        }
    }

    /// Kinds that need a single-valued fixture.
    pub fn needs_single_valued(self) -> bool {
        matches!(
            self,
            PropertyKind::NaturalQcScalar
                | PropertyKind::TransferMuScalar
                | PropertyKind::PairProperlyScalar
        )
    }

    /// Confirmation-style kinds (existential searches) answer
    /// `Confirmed`/`NotConfirmed`; the rest answer `Refuted`/`NotRefuted`.
    pub fn is_confirm_style(self) -> bool {
        matches!(
            self,
            PropertyKind::Wnq
                | PropertyKind::Alpha
                | PropertyKind::AlphaPrime
                | PropertyKind::Gamma
                | PropertyKind::GammaPrime
                | PropertyKind::WeaklyZ
        )
    }
}

impl FromStr for PropertyKind {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        ALL_KINDS
            .iter()
            .copied()
            .find(|k| k.id() == s)
            .ok_or_else(|| format!("unknown property `{s}`"))
    }
}

impl fmt::Display for PropertyKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.id())
    }
}

/// Full numeric data realizing a refutation or confirmation.  Fields are
/// populated per kind; everything needed to replay the predicate instance is
/// here (tuples, weights, auxiliary points, curve names).
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct Witness {
    /// First-argument tuple (x₁ … x_n).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub xs: Vec<f64>,
    /// Paired second arguments / selections (y₁ … y_n).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub ys: Vec<f64>,
    /// Codomain selection points (one per tuple index).
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub sel: Vec<Vec<f64>>,
    /// Simplex weights.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub lambda: Vec<f64>,
    /// Scanned parameter: a domain point for transfer checks, a codomain
    /// point for the z-selection checks.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub z: Option<Vec<f64>>,
    /// Per-index auxiliary points z_i.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub zs: Vec<f64>,
    /// Comparison point y* (or x*) of the exchange conditions.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub y_star: Option<f64>,
    /// Scalar combination coefficient.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub mu: Option<f64>,
    /// Name of the reparametrization curve.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve: Option<String>,
    /// Violating (or confirming) value point.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point: Option<Vec<f64>>,
    /// Second violating point (both disjuncts of a pair condition).
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub point2: Option<Vec<f64>>,
    /// Failing index into the tuple.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub index: Option<usize>,
    /// Frozen second argument of a slice check.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub slice: Option<f64>,
    /// Human-oriented clarification.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub detail: Option<String>,
}

/// Counts of sampled items per quantifier depth; positive for every
/// quantifier the sweep actually visited.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct Coverage {
    /// Frozen-argument slices visited.
    pub slices: usize,
    /// Tuples (pairs, n-tuples) visited.
    pub tuples: usize,
    /// Simplex weight vectors visited.
    pub lambdas: usize,
    /// Scanned z parameters visited.
    pub zs: usize,
    /// Candidate auxiliary points / selections / curves tried.
    pub candidates: usize,
    /// Instances passing vacuously (empty premise).
    pub vacuous: usize,
}

/// Tolerances the verdict was computed under.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Tolerances {
    pub eps_cone: f64,
    pub eps_interior: f64,
}

/// Outcome of one property check.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Verdict {
    pub property: String,
    pub arg: ArgSel,
    pub polarity: Polarity,
    pub status: Status,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub witness: Option<Witness>,
    pub coverage: Coverage,
    pub tolerances: Tolerances,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub notes: Vec<String>,
}

#[derive(Debug, Error)]
pub enum CheckError {
    #[error("unknown property `{0}`")]
    UnknownProperty(String),
    #[error("property `{0}` requires a single-valued fixture")]
    RequiresSingleValued(String),
    #[error("property `{0}` requires a two-argument fixture")]
    RequiresTwoArguments(String),
    #[error("cone `{0}` is not an axis-aligned orthant; s_qc dilation joins are unsupported")]
    UnsupportedCone(String),
    #[error("weakly_z requires a nonempty z set")]
    EmptyZSet,
    #[error("unknown theorem `{0}`")]
    UnknownTheorem(String),
    #[error("theorem `{0}` needs a square domain (domain_x = domain_y)")]
    RequiresSquareDomain(String),
    #[error("theorem `{0}` applies to maps into R (one-dimensional codomain)")]
    RequiresScalarCodomain(String),
    #[error(transparent)]
    Engine(#[from] EngineError),
    #[error("fixture evaluation failed: {0}")]
    Fixture(#[from] FixtureError),
}

/// What to check and how.
#[derive(Clone, Debug)]
pub struct CheckRequest {
    pub kind: PropertyKind,
    pub arg: ArgSel,
    pub polarity: Polarity,
    /// Codomain targets for `weakly_z`; defaults to a grid of the fixture's
    /// codomain box.
    pub z_set: Option<Vec<Pt>>,
}

impl CheckRequest {
    pub fn new(kind: PropertyKind) -> CheckRequest {
        CheckRequest { kind, arg: ArgSel::First, polarity: Polarity::Convex, z_set: None }
    }

    pub fn with_arg(mut self, arg: ArgSel) -> CheckRequest {
        self.arg = arg;
        self
    }

    pub fn with_polarity(mut self, polarity: Polarity) -> CheckRequest {
        self.polarity = polarity;
        self
    }

    pub fn with_z_set(mut self, z_set: Vec<Pt>) -> CheckRequest {
        self.z_set = Some(z_set);
        self
    }
}

/// Builds the working engine: transpose for second-argument checks, negate
/// for concave polarity (in that order; the two commute).
fn build_engine(
    fx: &Fixture,
    cone: &Cone,
    cfg: &Config,
    req: &CheckRequest,
) -> Result<Engine, CheckError> {
    let mut fx = fx.clone();
    if req.arg == ArgSel::Second {
        if fx.single_arg {
            return Err(CheckError::RequiresTwoArguments(req.kind.id().into()));
        }
        fx = fx.transposed();
    }
    if req.polarity == Polarity::Concave {
        fx = fx.negated();
    }
    Ok(Engine::new(fx, cone.clone(), cfg.clone())?)
}

/// Runs one property check on the fixture under the cone.
pub fn run_property(
    fx: &Fixture,
    cone: &Cone,
    cfg: &Config,
    req: &CheckRequest,
) -> Result<Verdict, CheckError> {
    if req.kind.needs_single_valued() && !fx.single_valued {
        return Err(CheckError::RequiresSingleValued(req.kind.id().into()));
    }
    let e = build_engine(fx, cone, cfg, req)?;
    let mut v = dispatch(&e, req)?;
    v.property = req.kind.id().to_string();
    v.arg = req.arg;
    v.polarity = req.polarity;
    Ok(v)
}

/// Re-evaluates a stored witness through the same predicate instance; true
/// when the claimed status reproduces.  Verdicts without a witness replay
/// trivially.
pub fn replay(fx: &Fixture, cone: &Cone, cfg: &Config, v: &Verdict) -> Result<bool, CheckError> {
    let Some(w) = &v.witness else { return Ok(true) };
    let kind: PropertyKind =
        v.property.parse().map_err(|_| CheckError::UnknownProperty(v.property.clone()))?;
    let req = CheckRequest {
        kind,
        arg: v.arg,
        polarity: v.polarity,
        z_set: None,
    };
    let e = build_engine(fx, cone, cfg, &req)?;
    let ok = match kind {
        PropertyKind::ProperlyQcIii
        | PropertyKind::ProperlyQcV
        | PropertyKind::NaturallyQcIii
        | PropertyKind::NaturallyQcV
        | PropertyKind::SQc
        | PropertyKind::Qc
        | PropertyKind::NaturalQcScalar => single::replay(&e, kind, v.status, w)?,
        PropertyKind::Wcg | PropertyKind::Wnq => graph::replay(&e, kind, v.status, w)?,
        PropertyKind::TransferMuV
        | PropertyKind::TransferMuIii
        | PropertyKind::TransferWeakMuV
        | PropertyKind::TransferWeakMuIii
        | PropertyKind::TransferMuScalar => transfer::replay(&e, kind, v.status, w)?,
        PropertyKind::PairProperlyIii
        | PropertyKind::PairProperlyV
        | PropertyKind::PairProperlyPlain
        | PropertyKind::PairProperlyScalar => pair::replay(&e, kind, v.status, w)?,
        PropertyKind::TransferProperlyIii | PropertyKind::TransferProperlyV => {
            properly::replay(&e, kind, v.status, w)?
        }
        PropertyKind::Alpha
        | PropertyKind::AlphaPrime
        | PropertyKind::Gamma
        | PropertyKind::GammaPrime => conditions::replay(&e, kind, v.status, w)?,
        PropertyKind::WeaklyZ => weaklyz::replay(&e, v.status, w)?,
    };
    Ok(ok)
}

fn dispatch(e: &Engine, req: &CheckRequest) -> Result<Verdict, CheckError> {
    match req.kind {
        PropertyKind::ProperlyQcIii
        | PropertyKind::ProperlyQcV
        | PropertyKind::NaturallyQcIii
        | PropertyKind::NaturallyQcV
        | PropertyKind::SQc
        | PropertyKind::Qc
        | PropertyKind::NaturalQcScalar => single::check(e, req.kind),
        PropertyKind::Wcg => graph::check_wcg(e),
        PropertyKind::Wnq => graph::check_wnq(e),
        PropertyKind::TransferMuV
        | PropertyKind::TransferMuIii
        | PropertyKind::TransferWeakMuV
        | PropertyKind::TransferWeakMuIii
        | PropertyKind::TransferMuScalar => transfer::check(e, req.kind),
        PropertyKind::PairProperlyIii
        | PropertyKind::PairProperlyV
        | PropertyKind::PairProperlyPlain
        | PropertyKind::PairProperlyScalar => pair::check(e, req.kind),
        PropertyKind::TransferProperlyIii | PropertyKind::TransferProperlyV => {
            properly::check(e, req.kind)
        }
        PropertyKind::Alpha | PropertyKind::AlphaPrime => conditions::check_alpha(e, req.kind),
        PropertyKind::Gamma | PropertyKind::GammaPrime => conditions::check_gamma(e, req.kind),
        PropertyKind::WeaklyZ => weaklyz::check(e, req.z_set.as_deref()),
    }
}

/// Verdict shell with the engine's tolerance snapshot; kind/arg/polarity are
/// stamped by the dispatcher.
pub(crate) fn verdict(e: &Engine, status: Status, witness: Option<Witness>, coverage: Coverage) -> Verdict {
    Verdict {
        property: String::new(),
        arg: ArgSel::First,
        polarity: Polarity::Convex,
        status,
        witness,
        coverage,
        tolerances: Tolerances {
            eps_cone: e.cone.eps_cone,
            eps_interior: e.cone.eps_interior,
        },
        notes: Vec::new(),
    }
}

/// Default z-targets for `weakly_z`: a grid of the codomain box, 21 points
/// per axis.
pub(crate) fn default_z_set(fx: &Fixture) -> Vec<Pt> {
    let axes: Vec<Vec<f64>> = fx
        .codomain_box
        .iter()
        .map(|&(lo, hi)| crate::config::grid(lo, hi, 20))
        .collect();
    match axes.len() {
        1 => axes[0].iter().map(|&v| vec![v]).collect(),
        _ => {
            let mut out = Vec::with_capacity(axes[0].len() * axes[1].len());
            for &a in &axes[0] {
                for &b in &axes[1] {
                    out.push(vec![a, b]);
                }
            }
            out
        }
    }
}
