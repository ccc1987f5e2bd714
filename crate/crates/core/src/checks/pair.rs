//! Pair-properly quasi-convexity: for all pairs (x₁,y₁), (x₂,y₂) and weights
//! λ, at least one endpoint inclusion against the combined first argument
//! must hold.  The two disjuncts depend on separate second arguments, so a
//! fixed (x₁, x₂, λ) is refuted exactly when each disjunct fails for some y
//! on its own — the sweep collects the failing y-sets independently instead
//! of enumerating (y₁, y₂) pairs.

use crate::engine::{Engine, VId};
use crate::extremal::TranslateSign;
use crate::value::Pt;

use super::{verdict, CheckError, Coverage, PropertyKind, Status, Verdict, Witness};

/// Disjunct for endpoint index i at second argument y: does the kind's
/// inclusion between `F(x_i, y)` and `F(x_λ, y)` hold?  Returns the violating
/// point on failure.
fn disjunct(
    e: &Engine,
    kind: PropertyKind,
    xi: f64,
    xc: f64,
    y: f64,
) -> Result<(bool, Option<Pt>), CheckError> {
    let vi = e.value(xi, y)?;
    let vc = e.value(xc, y)?;
    match kind {
        PropertyKind::PairProperlyIii => {
            let out = e.subset(vi, vc, TranslateSign::Plus, false);
            Ok((out.holds, out.witness))
        }
        PropertyKind::PairProperlyV => {
            let out = e.subset(vc, vi, TranslateSign::Minus, false);
            Ok((out.holds, out.witness))
        }
        PropertyKind::PairProperlyPlain => {
            if e.plain_subset(vi, vc) {
                Ok((true, None))
            } else {
                let offender = first_escapee(e, vi, vc);
                Ok((false, offender))
            }
        }
        PropertyKind::PairProperlyScalar => {
            let pi = e.cloud(vi)[0].clone();
            let pc = e.cloud(vc)[0].clone();
            let diff: Pt = pi.iter().zip(&pc).map(|(a, b)| a - b).collect();
            if e.cone.contains(&diff) {
                Ok((true, None))
            } else {
                Ok((false, Some(pi)))
            }
        }
        _ => unreachable!("disjunct serves the pair-properly kinds"),
    }
}

/// First sampled point of `a` outside the descriptor of `b`.
fn first_escapee(e: &Engine, a: VId, b: VId) -> Option<Pt> {
    let eps = e.cone.eps_cone;
    let d = e.desc(b);
    e.cloud(a).iter().find(|p| !d.contains(p, eps)).cloned()
}

pub(crate) fn check(e: &Engine, kind: PropertyKind) -> Result<Verdict, CheckError> {
    let lambdas = e.cfg.lambda_grid();
    let pairs = e.tuples(2);
    let ys: Vec<f64> = e.grid_y().to_vec();
    let mut cov = Coverage::default();
    for pr in &pairs {
        cov.tuples += 1;
        for &l in &lambdas {
            cov.lambdas += 1;
            let lam = vec![l, 1.0 - l];
            let xc = e.combine(pr, &lam);
            // Failing second arguments for each disjunct, independently.
            let mut bad1: Option<(f64, Option<Pt>)> = None;
            let mut bad2: Option<(f64, Option<Pt>)> = None;
            for &y in &ys {
                cov.candidates += 1;
                if bad1.is_none() {
                    let (ok, p) = disjunct(e, kind, pr[0], xc, y)?;
                    if !ok {
                        bad1 = Some((y, p));
                    }
                }
                if bad2.is_none() {
                    let (ok, p) = disjunct(e, kind, pr[1], xc, y)?;
                    if !ok {
                        bad2 = Some((y, p));
                    }
                }
                if bad1.is_some() && bad2.is_some() {
                    break;
                }
            }
            if let (Some((y1, p1)), Some((y2, p2))) = (bad1, bad2) {
                let w = Witness {
                    xs: pr.clone(),
                    ys: vec![y1, y2],
                    lambda: lam,
                    point: p1,
                    point2: p2,
                    ..Witness::default()
                };
                return Ok(verdict(e, Status::Refuted, Some(w), cov));
            }
        }
    }
    Ok(verdict(e, Status::NotRefuted, None, cov))
}

/// Replays a pair refutation: both stored disjuncts must still fail.
pub(crate) fn replay(
    e: &Engine,
    kind: PropertyKind,
    status: Status,
    w: &Witness,
) -> Result<bool, CheckError> {
    if status != Status::Refuted {
        return Ok(true);
    }
    let xc = e.combine(&w.xs, &w.lambda);
    let (ok1, _) = disjunct(e, kind, w.xs[0], xc, w.ys[0])?;
    let (ok2, _) = disjunct(e, kind, w.xs[1], xc, w.ys[1])?;
    Ok(!ok1 && !ok2)
}
