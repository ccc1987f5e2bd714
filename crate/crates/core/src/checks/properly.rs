//! Transfer-properly quasi-convexity: for each pair (x₁,x₂), interior weight
//! λ and probe z, whenever the combined value F(x_λ, z) misses the weak
//! minimum of the endpoint's row union, the endpoint value must sit inside
//! the corresponding translate of the combined value.

use crate::engine::Engine;
use crate::extremal::{ExtrMode, TranslateSign};

use super::{verdict, CheckError, Coverage, PropertyKind, Status, Verdict, Witness};

/// Evaluates one implication instance.  Returns `None` when the premise is
/// vacuous, otherwise the conclusion's subset outcome.
fn instance(
    e: &Engine,
    kind: PropertyKind,
    xi: f64,
    xc: f64,
    z: f64,
) -> Result<Option<crate::extremal::SubsetOutcome>, CheckError> {
    let vc = e.value(xc, z)?;
    let row_i = e.row(xi)?;
    if e.value_meets_row_extremal(vc, &row_i, ExtrMode::MinWeak) {
        return Ok(None);
    }
    let vi = e.value(xi, z)?;
    let out = match kind {
        PropertyKind::TransferProperlyIii => e.subset(vi, vc, TranslateSign::Plus, false),
        PropertyKind::TransferProperlyV => e.subset(vc, vi, TranslateSign::Minus, false),
        _ => unreachable!("instance serves the transfer-properly kinds"),
    };
    Ok(Some(out))
}

pub(crate) fn check(e: &Engine, kind: PropertyKind) -> Result<Verdict, CheckError> {
    let lambdas = e.cfg.lambda_grid();
    let interior = &lambdas[1..lambdas.len().saturating_sub(1)];
    let zs: Vec<f64> = e.grid_y().to_vec();
    let pairs = e.tuples(2);
    let mut cov = Coverage::default();
    for pr in &pairs {
        cov.tuples += 1;
        for &z in &zs {
            cov.zs += 1;
            for &l in interior {
                cov.lambdas += 1;
                let lam = vec![l, 1.0 - l];
                let xc = e.combine(pr, &lam);
                for (i, &xi) in pr.iter().enumerate() {
                    match instance(e, kind, xi, xc, z)? {
                        None => cov.vacuous += 1,
                        Some(out) => {
                            cov.candidates += 1;
                            if !out.holds {
                                let w = Witness {
                                    xs: pr.clone(),
                                    z: Some(vec![z]),
                                    lambda: lam,
                                    index: Some(i),
                                    point: out.witness,
                                    ..Witness::default()
                                };
                                return Ok(verdict(e, Status::Refuted, Some(w), cov));
                            }
                        }
                    }
                }
            }
        }
    }
    Ok(verdict(e, Status::NotRefuted, None, cov))
}

/// Replays a refutation: the stored instance must still have a live premise
/// and a failing conclusion.
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
    let xi = w.xs[w.index.unwrap_or(0)];
    let z = w.z.as_ref().map(|z| z[0]).unwrap_or_default();
    match instance(e, kind, xi, xc, z)? {
        None => Ok(false),
        Some(out) => Ok(!out.holds),
    }
}
