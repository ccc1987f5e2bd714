//! Catalog of set-valued maps used as test subjects.
//!
//! A fixture is a map `F(x, y)` from a rectangle (or an interval, for
//! one-argument maps) to value sets described by [`SetDesc`].  Evaluation is
//! exact and closed-form everywhere in the domain — grids only decide where
//! the checkers *look*, never what the map *is* — so replaying a witness at
//! off-grid coordinates (combination points, published counterexamples)
//! reproduces the exact value sets.
//!
//! Branch conditions are ordered if-chains with a small tie tolerance, so a
//! coordinate that lands within `1e-12` of a branch boundary (for instance a
//! convex combination that reconstructs `0.3` with a last-bit error) is
//! routed to the branch its exact value would take.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::config::{grid, Config};
use crate::value::{DiscPart, SetDesc};

/// Tie tolerance for branch conditions.
pub const BRANCH_TIE: f64 = 1e-12;

#[derive(Debug, Error)]
pub enum FixtureError {
    #[error("unknown fixture `{0}`")]
    Unknown(String),
    #[error("point ({x}, {y}) is outside the domain of `{name}`")]
    OffDomain { name: String, x: f64, y: f64 },
    #[error("no branch of `{name}` matches ({x}, {y})")]
    NoBranch { name: String, x: f64, y: f64 },
}

/// How the second-coordinate grid is laid out.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SecondGridKind {
    /// Evenly spaced points of the second domain interval.
    Uniform,
    /// Evenly spaced points interleaved with their images under an
    /// irrational shift (`t + 1/sqrt(2)` mod 1), so both branch families of
    /// rationality-split maps are exercised.
    WithIrrationalOffsets,
}

#[derive(Clone)]
enum EvalImpl {
    Builtin(fn(f64, f64) -> SetDesc),
    Rules(crate::fixture_file::RuleSet),
    Negated(Box<EvalImpl>),
    Transposed(Box<EvalImpl>),
}

impl EvalImpl {
    fn eval(&self, name: &str, x: f64, y: f64) -> Result<SetDesc, FixtureError> {
        match self {
            EvalImpl::Builtin(f) => Ok(f(x, y)),
            EvalImpl::Rules(rules) => rules.eval(x, y).ok_or(FixtureError::NoBranch {
                name: name.to_string(),
                x,
                y,
            }),
            EvalImpl::Negated(inner) => Ok(inner.eval(name, x, y)?.negated()),
            EvalImpl::Transposed(inner) => inner.eval(name, y, x),
        }
    }
}

/// A set-valued map together with its domain and sampling metadata.
#[derive(Clone)]
pub struct Fixture {
    pub name: String,
    pub summary: String,
    pub domain_x: (f64, f64),
    pub domain_y: (f64, f64),
    /// The value ignores the second coordinate (one-argument map).
    pub single_arg: bool,
    /// Every value is a single point.
    pub single_valued: bool,
    pub codomain_dim: usize,
    /// Bounding box of all values, per codomain coordinate.
    pub codomain_box: Vec<(f64, f64)>,
    /// Name of the cone this map is usually ordered by.
    pub default_cone: String,
    /// Supporting fixture (derived example rather than catalog subject).
    pub auxiliary: bool,
    pub second_grid_kind: SecondGridKind,
    eval: EvalImpl,
}

impl Fixture {
    /// Exact value of the map at `(x, y)`; `y` is ignored for one-argument
    /// maps.
    pub fn eval(&self, x: f64, y: f64) -> Result<SetDesc, FixtureError> {
        let (xl, xh) = self.domain_x;
        let (yl, yh) = self.domain_y;
        let tol = 1e-9;
        if x < xl - tol || x > xh + tol || (!self.single_arg && (y < yl - tol || y > yh + tol)) {
            return Err(FixtureError::OffDomain { name: self.name.clone(), x, y });
        }
        self.eval.eval(&self.name, x, y)
    }

    /// Grid over the first domain coordinate.
    pub fn grid_x(&self, cfg: &Config) -> Vec<f64> {
        grid(self.domain_x.0, self.domain_x.1, cfg.grid_resolution)
    }

    /// Grid over the second domain coordinate (a single placeholder point
    /// for one-argument maps).
    pub fn grid_y(&self, cfg: &Config) -> Vec<f64> {
        if self.single_arg {
            return vec![self.domain_y.0];
        }
        let mut pts = grid(self.domain_y.0, self.domain_y.1, cfg.grid_resolution);
        if self.second_grid_kind == SecondGridKind::WithIrrationalOffsets {
            let (lo, hi) = self.domain_y;
            let span = hi - lo;
            let shift = 1.0 / std::f64::consts::SQRT_2;
            for k in 0..cfg.grid_resolution {
                let t = (k as f64 / cfg.grid_resolution as f64 + shift).fract();
                pts.push(lo + span * t);
            }
            pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
            pts.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
        }
        pts
    }

    /// The reflected map `-F` (values negated pointwise).
    pub fn negated(&self) -> Fixture {
        let mut f = self.clone();
        f.name = format!("{}~neg", self.name);
        f.eval = EvalImpl::Negated(Box::new(self.eval.clone()));
        f.codomain_box = self.codomain_box.iter().map(|&(lo, hi)| (-hi, -lo)).collect();
        f
    }

    /// The transposed map `F^T(x, y) = F(y, x)`.
    pub fn transposed(&self) -> Fixture {
        let mut f = self.clone();
        f.name = format!("{}~t", self.name);
        f.eval = EvalImpl::Transposed(Box::new(self.eval.clone()));
        f.domain_x = self.domain_y;
        f.domain_y = self.domain_x;
        f
    }

    pub(crate) fn from_rules(
        name: String,
        summary: String,
        domain_x: (f64, f64),
        domain_y: (f64, f64),
        single_valued: bool,
        codomain_dim: usize,
        codomain_box: Vec<(f64, f64)>,
        default_cone: String,
        rules: crate::fixture_file::RuleSet,
    ) -> Fixture {
        Fixture {
            name,
            summary,
            domain_x,
            domain_y,
            single_arg: false,
            single_valued,
            codomain_dim,
            codomain_box,
            default_cone,
            auxiliary: false,
            second_grid_kind: SecondGridKind::Uniform,
            eval: EvalImpl::Rules(rules),
        }
    }
}

/// True when `t` lies within `tol` of a rational with denominator at most
/// `max_den` (decided through continued-fraction convergents).  Used by
/// maps that branch on rationality: every grid and combination coordinate
/// has a small denominator, while irrational offsets stay provably far from
/// all of them.
pub fn is_near_rational(t: f64, max_den: u64, tol: f64) -> bool {
    let x = t.abs();
    // Convergents p/q of the continued fraction of x.
    let (mut p0, mut q0, mut p1, mut q1) = (1u64, 0u64, x.floor() as u64, 1u64);
    let mut frac = x - x.floor();
    if (x - p1 as f64).abs() <= tol {
        return true;
    }
    for _ in 0..40 {
        if frac.abs() < 1e-15 {
            break;
        }
        let inv = 1.0 / frac;
        let a = inv.floor();
        frac = inv - a;
        let a = a as u64;
        let p2 = a.saturating_mul(p1).saturating_add(p0);
        let q2 = a.saturating_mul(q1).saturating_add(q0);
        if q2 > max_den {
            break;
        }
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        if (x - p1 as f64 / q1 as f64).abs() <= tol {
            return true;
        }
    }
    (x - p1 as f64 / q1 as f64).abs() <= tol
}

fn le(a: f64, b: f64) -> bool {
    a <= b + BRANCH_TIE
}

fn eq(a: f64, b: f64) -> bool {
    (a - b).abs() <= BRANCH_TIE
}

fn pt1(v: f64) -> SetDesc {
    SetDesc::point(vec![v])
}

fn pt2(u: f64, v: f64) -> SetDesc {
    SetDesc::point(vec![u, v])
}

// ---- built-in map formulas -------------------------------------------------

fn step_interval_map(x: f64, _y: f64) -> SetDesc {
    // One-argument map on [0, 4] with a jump at 2: the value interval flips
    // from [0,2] through [-2,0] to the half-open (0,2].
    if eq(x, 2.0) {
        SetDesc::interval(-2.0, 0.0)
    } else if x < 2.0 {
        SetDesc::interval(0.0, 2.0)
    } else {
        SetDesc::interval_open_lo(0.0, 2.0)
    }
}

fn kinked_lower_bound(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        SetDesc::interval(-1.0, y)
    } else {
        SetDesc::interval(-x, y)
    }
}

fn halfdisc_switch(x: f64, y: f64) -> SetDesc {
    if eq(x, 1.0) {
        SetDesc::disc([0.0, 0.0], 1.0, DiscPart::Full)
    } else if eq(x, 0.0) {
        pt2(0.0, 0.0)
    } else if le(x, y) {
        SetDesc::disc([0.0, 0.0], x, DiscPart::Right)
    } else {
        SetDesc::disc([0.0, 0.0], x, DiscPart::Left)
    }
}

fn zero_anchored_kink(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        SetDesc::interval(0.0, y)
    } else {
        SetDesc::interval(-x, y)
    }
}

fn plateau_scalar(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        pt1(1.0)
    } else {
        pt1(x)
    }
}

fn widening_interval(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        SetDesc::interval(-1.0, 1.0)
    } else {
        SetDesc::interval(-x, 1.0)
    }
}

fn rational_split_discs(x: f64, y: f64) -> SetDesc {
    // Disc of radius x whose center swaps axes depending on whether the
    // second coordinate is (near-)rational with a small denominator.
    if is_near_rational(y, 1000, 1e-9) {
        SetDesc::disc([0.0, y], x, DiscPart::Full)
    } else {
        SetDesc::disc([y, 0.0], x, DiscPart::Full)
    }
}

fn two_level_plateaus(x: f64, y: f64) -> SetDesc {
    let mid = (0.25 <= x + BRANCH_TIE) && (x <= 0.75 + BRANCH_TIE);
    let outer = le(x, 0.25) || x >= 0.75 - BRANCH_TIE;
    if (mid && eq(y, 1.0)) || (outer && eq(y, 0.5)) {
        SetDesc::interval(0.0, 1.0)
    } else {
        pt1(0.0)
    }
}

fn quarter_disc_growth(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        pt2(0.0, 0.0)
    } else {
        SetDesc::disc([0.0, 0.0], x, DiscPart::QuarterPp)
    }
}

fn clipped_identity_band(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        SetDesc::interval(0.0, x)
    } else {
        SetDesc::interval(0.0, 1.0)
    }
}

fn saturating_pair(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        pt2(x, y)
    } else {
        pt2(1.0, y)
    }
}

fn corner_snap_pair(x: f64, y: f64) -> SetDesc {
    if le(x, y) {
        pt2(x, y)
    } else {
        pt2(1.0, 1.0)
    }
}

fn constant_unit_interval(_x: f64, _y: f64) -> SetDesc {
    SetDesc::interval(0.0, 1.0)
}

fn diagonal_gap(x: f64, y: f64) -> SetDesc {
    if eq(x, y) {
        pt1(0.0)
    } else {
        pt1(1.0)
    }
}

struct Spec {
    name: &'static str,
    summary: &'static str,
    domain_x: (f64, f64),
    domain_y: (f64, f64),
    single_arg: bool,
    single_valued: bool,
    codomain_dim: usize,
    codomain_box: &'static [(f64, f64)],
    default_cone: &'static str,
    auxiliary: bool,
    second_grid_kind: SecondGridKind,
    eval: fn(f64, f64) -> SetDesc,
}

const SPECS: &[Spec] = &[
    Spec {
        name: "ex2_1",
        summary: "one-argument interval map on [0,4] that jumps across the order at 2",
        domain_x: (0.0, 4.0),
        domain_y: (0.0, 0.0),
        single_arg: true,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-2.0, 2.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: step_interval_map,
    },
    Spec {
        name: "ex3_1",
        summary: "interval map [-1,y] / [-x,y] with a kink along the diagonal",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-1.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: kinked_lower_bound,
    },
    Spec {
        name: "ex3_2",
        summary: "half-discs of radius x that flip side across the diagonal",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 2,
        codomain_box: &[(-1.0, 1.0), (-1.0, 1.0)],
        default_cone: "R2plus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: halfdisc_switch,
    },
    Spec {
        name: "ex3_3",
        summary: "interval map [0,y] / [-x,y] anchored at zero above the diagonal",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-1.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: zero_anchored_kink,
    },
    Spec {
        name: "ex3_4",
        summary: "single-valued plateau: 1 above the diagonal, x below it",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: true,
        codomain_dim: 1,
        codomain_box: &[(0.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: plateau_scalar,
    },
    Spec {
        name: "ex3_5",
        summary: "interval map [-1,1] that narrows to [-x,1] below the diagonal",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-1.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: widening_interval,
    },
    Spec {
        name: "ex3_6",
        summary: "discs of radius x whose center axis depends on rationality of y",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 2,
        codomain_box: &[(-1.0, 2.0), (-1.0, 2.0)],
        default_cone: "R2plus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::WithIrrationalOffsets,
        eval: rational_split_discs,
    },
    Spec {
        name: "ex3_7",
        summary: "zero-anchored kinked interval map (transfer-friendly variant)",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-1.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: zero_anchored_kink,
    },
    Spec {
        name: "ex3_8",
        summary: "zero-anchored kinked interval map (coercivity variant)",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-1.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: zero_anchored_kink,
    },
    Spec {
        name: "rem4_2",
        summary: "two thin plateaus of [0,1] values over an otherwise zero map",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(0.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: two_level_plateaus,
    },
    Spec {
        name: "ex4_1",
        summary: "origin above the diagonal, growing quarter discs below it",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 2,
        codomain_box: &[(0.0, 1.0), (0.0, 1.0)],
        default_cone: "minusR2plus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: quarter_disc_growth,
    },
    Spec {
        name: "ex4_2",
        summary: "interval map [-1,1] narrowing below the diagonal (saddle catalog)",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-1.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: widening_interval,
    },
    Spec {
        name: "ex4_3",
        summary: "zero-anchored kinked interval map (saddle catalog)",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(-1.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: zero_anchored_kink,
    },
    Spec {
        name: "ex4_4",
        summary: "interval map [0,x] above the diagonal, [0,1] below it",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(0.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: clipped_identity_band,
    },
    Spec {
        name: "ex4_5",
        summary: "single-valued planar map saturating its first coordinate below the diagonal",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: true,
        codomain_dim: 2,
        codomain_box: &[(0.0, 1.0), (0.0, 1.0)],
        default_cone: "R2plus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: saturating_pair,
    },
    Spec {
        name: "ex4_6",
        summary: "interval map [0,x] / [0,1] (weak-convexity catalog)",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(0.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: clipped_identity_band,
    },
    Spec {
        name: "ex4_7",
        summary: "single-valued planar map snapping to the corner below the diagonal",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: true,
        codomain_dim: 2,
        codomain_box: &[(0.0, 1.0), (0.0, 1.0)],
        default_cone: "R2plus",
        auxiliary: false,
        second_grid_kind: SecondGridKind::Uniform,
        eval: corner_snap_pair,
    },
    Spec {
        name: "const_A0",
        summary: "constant map with value [0,1]; satisfies every checked property",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: false,
        codomain_dim: 1,
        codomain_box: &[(0.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: true,
        second_grid_kind: SecondGridKind::Uniform,
        eval: constant_unit_interval,
    },
    Spec {
        name: "diag_gap",
        summary: "0 on the diagonal and 1 off it; no saddle certificate exists",
        domain_x: (0.0, 1.0),
        domain_y: (0.0, 1.0),
        single_arg: false,
        single_valued: true,
        codomain_dim: 1,
        codomain_box: &[(0.0, 1.0)],
        default_cone: "Rplus",
        auxiliary: true,
        second_grid_kind: SecondGridKind::Uniform,
        eval: diagonal_gap,
    },
];

/// All built-in fixtures, catalog subjects first.
pub fn builtin_fixtures() -> Vec<Fixture> {
    SPECS
        .iter()
        .map(|s| Fixture {
            name: s.name.to_string(),
            summary: s.summary.to_string(),
            domain_x: s.domain_x,
            domain_y: s.domain_y,
            single_arg: s.single_arg,
            single_valued: s.single_valued,
            codomain_dim: s.codomain_dim,
            codomain_box: s.codomain_box.to_vec(),
            default_cone: s.default_cone.to_string(),
            auxiliary: s.auxiliary,
            second_grid_kind: s.second_grid_kind,
            eval: EvalImpl::Builtin(s.eval),
        })
        .collect()
}

/// Looks up a built-in fixture by name.
pub fn builtin_fixture(name: &str) -> Result<Fixture, FixtureError> {
    builtin_fixtures()
        .into_iter()
        .find(|f| f.name == name)
        .ok_or_else(|| FixtureError::Unknown(name.to_string()))
}
