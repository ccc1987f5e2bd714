//! User-defined fixtures loaded from JSON.
//!
//! A fixture file declares piecewise maps in the same shape the built-in
//! catalog uses: ordered branches guarded by affine comparisons, each
//! producing an interval, point, or disc whose parameters are affine
//! expressions in `x` and `y`.  The first branch whose guards all hold wins;
//! a branch with no `when` clause is a catch-all.
//!
//! Expression grammar (whitespace-insensitive):
//!
//! ```text
//! expr  := term (('+' | '-') term)*
//! term  := number | 'x' | 'y' | number '*' ('x' | 'y')
//! cond  := expr ('<=' | '<' | '>=' | '>' | '==' | '!=') expr
//! ```
//!
//! Comparisons carry the same `1e-12` tie tolerance as built-in branches, so
//! `x <= y` admits `x = y + 5e-13`.
//!
//! ```json
//! {
//!   "cones": { "oblique": [[1.0, 0.0], [1.0, 1.0]] },
//!   "fixtures": [{
//!     "name": "kinked",
//!     "description": "interval map with a diagonal kink",
//!     "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
//!     "cone": "Rplus",
//!     "branches": [
//!       { "when": ["x <= y"], "value": { "interval": { "lo": "-1", "hi": "y" } } },
//!       { "value": { "interval": { "lo": "-x", "hi": "y" } } }
//!     ]
//!   }]
//! }
//! ```

use std::collections::BTreeMap;
use std::path::Path;

use serde::Deserialize;
use thiserror::Error;

use crate::cone::{Cone, ConeError};
use crate::config::grid;
use crate::fixture::{Fixture, BRANCH_TIE};
use crate::value::{DiscPart, SetDesc};

#[derive(Debug, Error)]
pub enum FileError {
    #[error("failed to read fixture file: {0}")]
    Io(#[from] std::io::Error),
    #[error("fixture file is not valid JSON: {0}")]
    Json(#[from] serde_json::Error),
    #[error("in fixture `{fixture}`: {message}")]
    Invalid { fixture: String, message: String },
    #[error("cone `{name}` is invalid: {source}")]
    BadCone { name: String, source: ConeError },
}

// ---- affine expressions ----------------------------------------------------

/// `a*x + b*y + c`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Affine {
    pub a: f64,
    pub b: f64,
    pub c: f64,
}

impl Affine {
    pub fn eval(&self, x: f64, y: f64) -> f64 {
        self.a * x + self.b * y + self.c
    }
}

/// Parses `expr` from the grammar above into coefficients.
pub fn parse_affine(src: &str) -> Result<Affine, String> {
    let compact: String = src.chars().filter(|c| !c.is_whitespace()).collect();
    if compact.is_empty() {
        return Err("empty expression".to_string());
    }
    let mut acc = Affine { a: 0.0, b: 0.0, c: 0.0 };
    let bytes = compact.as_bytes();
    let mut i = 0;
    let mut sign = 1.0;
    // Leading sign.
    if bytes[0] == b'+' || bytes[0] == b'-' {
        sign = if bytes[0] == b'-' { -1.0 } else { 1.0 };
        i = 1;
    }
    while i < bytes.len() {
        let start = i;
        while i < bytes.len() && bytes[i] != b'+' && bytes[i] != b'-' {
            // Keep exponent signs ("1e-3") inside the term.
            if (bytes[i] == b'e' || bytes[i] == b'E')
                && i + 1 < bytes.len()
                && (bytes[i + 1] == b'+' || bytes[i + 1] == b'-')
            {
                i += 1;
            }
            i += 1;
        }
        let term = &compact[start..i];
        parse_term(term, sign, &mut acc).map_err(|e| format!("in `{src}`: {e}"))?;
        if i < bytes.len() {
            sign = if bytes[i] == b'-' { -1.0 } else { 1.0 };
            i += 1;
            if i == bytes.len() {
                return Err(format!("in `{src}`: dangling operator"));
            }
        }
    }
    Ok(acc)
}

fn parse_term(term: &str, sign: f64, acc: &mut Affine) -> Result<(), String> {
    if term.is_empty() {
        return Err("empty term".to_string());
    }
    let (coeff, var) = match term.split_once('*') {
        Some((num, v)) => {
            let coeff: f64 = num.parse().map_err(|_| format!("bad coefficient `{num}`"))?;
            (coeff, v)
        }
        None => match term {
            "x" | "y" => (1.0, term),
            _ => {
                let c: f64 = term.parse().map_err(|_| format!("bad term `{term}`"))?;
                acc.c += sign * c;
                return Ok(());
            }
        },
    };
    match var {
        "x" => acc.a += sign * coeff,
        "y" => acc.b += sign * coeff,
        _ => return Err(format!("bad variable `{var}` (expected x or y)")),
    }
    Ok(())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
enum CmpOp {
    Le,
    Lt,
    Ge,
    Gt,
    Eq,
    Ne,
}

#[derive(Debug, Clone)]
struct Cond {
    lhs: Affine,
    op: CmpOp,
    rhs: Affine,
}

impl Cond {
    fn holds(&self, x: f64, y: f64) -> bool {
        let l = self.lhs.eval(x, y);
        let r = self.rhs.eval(x, y);
        match self.op {
            CmpOp::Le => l <= r + BRANCH_TIE,
            CmpOp::Lt => l < r - BRANCH_TIE,
            CmpOp::Ge => l >= r - BRANCH_TIE,
            CmpOp::Gt => l > r + BRANCH_TIE,
            CmpOp::Eq => (l - r).abs() <= BRANCH_TIE,
            CmpOp::Ne => (l - r).abs() > BRANCH_TIE,
        }
    }
}

fn parse_cond(src: &str) -> Result<Cond, String> {
    // Longest operators first so `<=` is not read as `<`.
    for (tok, op) in [
        ("<=", CmpOp::Le),
        (">=", CmpOp::Ge),
        ("==", CmpOp::Eq),
        ("!=", CmpOp::Ne),
        ("<", CmpOp::Lt),
        (">", CmpOp::Gt),
    ] {
        if let Some((l, r)) = src.split_once(tok) {
            return Ok(Cond {
                lhs: parse_affine(l)?,
                op,
                rhs: parse_affine(r)?,
            });
        }
    }
    Err(format!("no comparison operator in `{src}`"))
}

// ---- value templates ---------------------------------------------------------

#[derive(Clone)]
enum ValueTemplate {
    Point(Vec<Affine>),
    Interval {
        lo: Affine,
        hi: Affine,
        open_lo: bool,
        open_hi: bool,
    },
    Disc {
        cx: Affine,
        cy: Affine,
        r: Affine,
        part: DiscPart,
    },
}

impl ValueTemplate {
    fn dim(&self) -> usize {
        match self {
            ValueTemplate::Point(coords) => coords.len(),
            ValueTemplate::Interval { .. } => 1,
            ValueTemplate::Disc { .. } => 2,
        }
    }

    fn instantiate(&self, x: f64, y: f64) -> SetDesc {
        match self {
            ValueTemplate::Point(coords) => {
                SetDesc::point(coords.iter().map(|e| e.eval(x, y)).collect())
            }
            ValueTemplate::Interval { lo, hi, open_lo, open_hi } => SetDesc::Interval {
                lo: lo.eval(x, y),
                hi: hi.eval(x, y),
                open_lo: *open_lo,
                open_hi: *open_hi,
            },
            ValueTemplate::Disc { cx, cy, r, part } => {
                SetDesc::disc([cx.eval(x, y), cy.eval(x, y)], r.eval(x, y), *part)
            }
        }
    }
}

#[derive(Clone)]
struct Branch {
    conds: Vec<Cond>,
    value: ValueTemplate,
}

/// Compiled piecewise definition of a file-loaded fixture.
#[derive(Clone)]
pub struct RuleSet {
    branches: Vec<Branch>,
}

impl RuleSet {
    pub(crate) fn eval(&self, x: f64, y: f64) -> Option<SetDesc> {
        self.branches
            .iter()
            .find(|b| b.conds.iter().all(|c| c.holds(x, y)))
            .map(|b| b.value.instantiate(x, y))
    }
}

// ---- JSON schema -------------------------------------------------------------

#[derive(Deserialize)]
struct FileSchema {
    #[serde(default)]
    cones: BTreeMap<String, Vec<Vec<f64>>>,
    fixtures: Vec<FixtureSchema>,
}

#[derive(Deserialize)]
struct FixtureSchema {
    name: String,
    #[serde(default)]
    description: String,
    domain: DomainSchema,
    #[serde(default)]
    cone: Option<String>,
    branches: Vec<BranchSchema>,
}

#[derive(Deserialize)]
struct DomainSchema {
    x: [f64; 2],
    y: [f64; 2],
}

#[derive(Deserialize)]
struct BranchSchema {
    #[serde(default)]
    when: Vec<String>,
    value: ValueSchema,
}

#[derive(Deserialize)]
#[serde(rename_all = "snake_case")]
enum ValueSchema {
    Point(Vec<String>),
    Interval {
        lo: String,
        hi: String,
        #[serde(default)]
        open_lo: bool,
        #[serde(default)]
        open_hi: bool,
    },
    Disc {
        cx: String,
        cy: String,
        r: String,
        #[serde(default)]
        part: Option<String>,
    },
}

/// Fixtures and cones declared in one file.
pub struct LoadedFixtures {
    pub fixtures: Vec<Fixture>,
    pub cones: Vec<Cone>,
}

/// Parses a fixture file from its JSON text.
pub fn parse_fixture_file(json: &str) -> Result<LoadedFixtures, FileError> {
    let schema: FileSchema = serde_json::from_str(json)?;
    let mut cones = Vec::new();
    for (name, normals) in &schema.cones {
        let cone = Cone::from_normals(name, normals, 1e-9, 1e-9)
            .map_err(|source| FileError::BadCone { name: name.clone(), source })?;
        cones.push(cone);
    }
    let mut fixtures = Vec::new();
    for fx in &schema.fixtures {
        fixtures.push(compile_fixture(fx, &cones)?);
    }
    Ok(LoadedFixtures { fixtures, cones })
}

/// Reads and parses a fixture file from disk.
pub fn load_fixture_file(path: &Path) -> Result<LoadedFixtures, FileError> {
    parse_fixture_file(&std::fs::read_to_string(path)?)
}

fn compile_fixture(fx: &FixtureSchema, file_cones: &[Cone]) -> Result<Fixture, FileError> {
    let invalid = |message: String| FileError::Invalid {
        fixture: fx.name.clone(),
        message,
    };
    if fx.branches.is_empty() {
        return Err(invalid("fixture has no branches".to_string()));
    }
    let mut branches = Vec::new();
    for b in &fx.branches {
        let conds = b
            .when
            .iter()
            .map(|c| parse_cond(c))
            .collect::<Result<Vec<_>, _>>()
            .map_err(|e| invalid(e))?;
        let value = compile_value(&b.value).map_err(|e| invalid(e))?;
        branches.push(Branch { conds, value });
    }
    let dim = branches[0].value.dim();
    if dim == 0 || dim > 2 {
        return Err(invalid(format!("unsupported codomain dimension {dim}")));
    }
    if branches.iter().any(|b| b.value.dim() != dim) {
        return Err(invalid("branches disagree on codomain dimension".to_string()));
    }
    let single_valued = branches
        .iter()
        .all(|b| matches!(b.value, ValueTemplate::Point(_)));
    let cone_name = match &fx.cone {
        Some(name) => {
            let builtin = Cone::builtin_names().contains(&name.as_str());
            let in_file = file_cones.iter().any(|c| c.name == *name);
            if !builtin && !in_file {
                return Err(invalid(format!("unknown cone `{name}`")));
            }
            name.clone()
        }
        None => match dim {
            1 => "Rplus".to_string(),
            _ => "R2plus".to_string(),
        },
    };
    let rules = RuleSet { branches };
    let (dx, dy) = (fx.domain.x, fx.domain.y);
    if dx[0] > dx[1] || dy[0] > dy[1] {
        return Err(invalid("domain bounds are reversed".to_string()));
    }
    let codomain_box = estimate_codomain_box(&rules, dim, (dx[0], dx[1]), (dy[0], dy[1]))
        .ok_or_else(|| invalid("no branch matches anywhere on the domain".to_string()))?;
    Ok(Fixture::from_rules(
        fx.name.clone(),
        fx.description.clone(),
        (dx[0], dx[1]),
        (dy[0], dy[1]),
        single_valued,
        dim,
        codomain_box,
        cone_name,
        rules,
    ))
}

fn compile_value(v: &ValueSchema) -> Result<ValueTemplate, String> {
    Ok(match v {
        ValueSchema::Point(coords) => {
            let coords = coords
                .iter()
                .map(|s| parse_affine(s))
                .collect::<Result<Vec<_>, _>>()?;
            ValueTemplate::Point(coords)
        }
        ValueSchema::Interval { lo, hi, open_lo, open_hi } => ValueTemplate::Interval {
            lo: parse_affine(lo)?,
            hi: parse_affine(hi)?,
            open_lo: *open_lo,
            open_hi: *open_hi,
        },
        ValueSchema::Disc { cx, cy, r, part } => {
            let part = match part.as_deref().unwrap_or("full") {
                "full" => DiscPart::Full,
                "right" => DiscPart::Right,
                "left" => DiscPart::Left,
                "quarter_pp" => DiscPart::QuarterPp,
                "quarter_mm" => DiscPart::QuarterMm,
                other => return Err(format!("unknown disc part `{other}`")),
            };
            ValueTemplate::Disc {
                cx: parse_affine(cx)?,
                cy: parse_affine(cy)?,
                r: parse_affine(r)?,
                part,
            }
        }
    })
}

/// Bounding box of sampled values over a coarse domain grid — metadata for
/// default z-grids, not part of the map definition.
fn estimate_codomain_box(
    rules: &RuleSet,
    dim: usize,
    dx: (f64, f64),
    dy: (f64, f64),
) -> Option<Vec<(f64, f64)>> {
    let mut lo = vec![f64::INFINITY; dim];
    let mut hi = vec![f64::NEG_INFINITY; dim];
    let mut any = false;
    let mut coarse = crate::config::Config::default();
    coarse.value_resolution = 9;
    for &x in &grid(dx.0, dx.1, 20) {
        for &y in &grid(dy.0, dy.1, 20) {
            let Some(desc) = rules.eval(x, y) else { continue };
            any = true;
            for p in desc.sample(&coarse) {
                for j in 0..dim {
                    lo[j] = lo[j].min(p[j]);
                    hi[j] = hi[j].max(p[j]);
                }
            }
        }
    }
    if !any {
        return None;
    }
    Some(lo.into_iter().zip(hi).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fixture::builtin_fixture;

    const KINKED: &str = r#"{
        "fixtures": [{
            "name": "kinked",
            "description": "interval map with a diagonal kink",
            "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
            "cone": "Rplus",
            "branches": [
                { "when": ["x <= y"], "value": { "interval": { "lo": "-1", "hi": "y" } } },
                { "value": { "interval": { "lo": "-x", "hi": "y" } } }
            ]
        }]
    }"#;

    #[test]
    fn affine_parser_accepts_signed_terms() {
        assert_eq!(parse_affine("0.5*x + 1 - y").unwrap(), Affine { a: 0.5, b: -1.0, c: 1.0 });
        assert_eq!(parse_affine("-x").unwrap(), Affine { a: -1.0, b: 0.0, c: 0.0 });
        assert_eq!(parse_affine("2").unwrap(), Affine { a: 0.0, b: 0.0, c: 2.0 });
        assert_eq!(parse_affine("1e-3 + x").unwrap(), Affine { a: 1.0, b: 0.0, c: 1e-3 });
        assert_eq!(
            parse_affine("x - 2*y + 0.25").unwrap(),
            Affine { a: 1.0, b: -2.0, c: 0.25 }
        );
        assert!(parse_affine("x *").is_err());
        assert!(parse_affine("z + 1").is_err());
        assert!(parse_affine("x +").is_err());
    }

    #[test]
    fn file_fixture_matches_builtin_twin() {
        let loaded = parse_fixture_file(KINKED).unwrap();
        assert_eq!(loaded.fixtures.len(), 1);
        let file_fx = &loaded.fixtures[0];
        let builtin = builtin_fixture("ex3_1").unwrap();
        for &x in &grid(0.0, 1.0, 10) {
            for &y in &grid(0.0, 1.0, 10) {
                assert_eq!(
                    file_fx.eval(x, y).unwrap(),
                    builtin.eval(x, y).unwrap(),
                    "at ({x}, {y})"
                );
            }
        }
        assert_eq!(file_fx.codomain_dim, 1);
        assert!(!file_fx.single_valued);
        assert_eq!(file_fx.default_cone, "Rplus");
        assert_eq!(file_fx.codomain_box, vec![(-1.0, 1.0)]);
    }

    #[test]
    fn first_matching_branch_wins_and_ties_round_up() {
        let loaded = parse_fixture_file(KINKED).unwrap();
        let fx = &loaded.fixtures[0];
        // Within the tie tolerance of the diagonal: first branch.
        let v = fx.eval(0.5 + 5e-13, 0.5).unwrap();
        assert_eq!(v, crate::value::SetDesc::interval(-1.0, 0.5));
    }

    #[test]
    fn custom_cone_section_is_compiled() {
        let src = r#"{
            "cones": { "oblique": [[1.0, 0.0], [1.0, 1.0]] },
            "fixtures": [{
                "name": "flat",
                "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
                "cone": "oblique",
                "branches": [
                    { "value": { "point": ["x", "y"] } }
                ]
            }]
        }"#;
        let loaded = parse_fixture_file(src).unwrap();
        assert_eq!(loaded.cones.len(), 1);
        assert_eq!(loaded.cones[0].name, "oblique");
        assert_eq!(loaded.cones[0].dim, 2);
        let fx = &loaded.fixtures[0];
        assert!(fx.single_valued);
        assert_eq!(fx.codomain_dim, 2);
        assert_eq!(fx.default_cone, "oblique");
    }

    #[test]
    fn loader_rejects_malformed_files() {
        // Unknown cone name.
        let bad_cone = KINKED.replace("\"Rplus\"", "\"nope\"");
        assert!(matches!(
            parse_fixture_file(&bad_cone),
            Err(FileError::Invalid { .. })
        ));
        // Branch dimension mismatch.
        let src = r#"{
            "fixtures": [{
                "name": "mixed",
                "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
                "branches": [
                    { "when": ["x <= y"], "value": { "point": ["0"] } },
                    { "value": { "point": ["0", "0"] } }
                ]
            }]
        }"#;
        assert!(matches!(
            parse_fixture_file(src),
            Err(FileError::Invalid { .. })
        ));
        // Bad expression.
        let src = r#"{
            "fixtures": [{
                "name": "broken",
                "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
                "branches": [ { "value": { "point": ["q + 1"] } } ]
            }]
        }"#;
        assert!(matches!(
            parse_fixture_file(src),
            Err(FileError::Invalid { .. })
        ));
        // No catch-all and guards that never fire is caught by box estimation.
        let src = r#"{
            "fixtures": [{
                "name": "nowhere",
                "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
                "branches": [ { "when": ["x > 2"], "value": { "point": ["0"] } } ]
            }]
        }"#;
        assert!(matches!(
            parse_fixture_file(src),
            Err(FileError::Invalid { .. })
        ));
    }

    #[test]
    fn half_disc_template_round_trip() {
        let src = r#"{
            "fixtures": [{
                "name": "discs",
                "domain": { "x": [0.0, 1.0], "y": [0.0, 1.0] },
                "branches": [
                    { "when": ["x <= y", "x != 0"], "value": { "disc": { "cx": "0", "cy": "0", "r": "x", "part": "right" } } },
                    { "value": { "point": ["0", "0"] } }
                ]
            }]
        }"#;
        let loaded = parse_fixture_file(src).unwrap();
        let fx = &loaded.fixtures[0];
        assert_eq!(
            fx.eval(0.25, 0.5).unwrap(),
            crate::value::SetDesc::disc([0.0, 0.0], 0.25, crate::value::DiscPart::Right)
        );
        assert_eq!(
            fx.eval(0.0, 0.5).unwrap(),
            crate::value::SetDesc::point(vec![0.0, 0.0])
        );
        assert_eq!(
            fx.eval(0.5, 0.25).unwrap(),
            crate::value::SetDesc::point(vec![0.0, 0.0])
        );
    }
}
