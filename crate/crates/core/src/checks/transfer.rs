//! Transfer-style convexity: for every tuple and scanned second argument z,
//! some auxiliary z_i must absorb the combination values — with the closed
//! cone where the combination's value meets the weak maxima of its own row,
//! and with the open (interior) cone elsewhere.  The strong form needs a z_i
//! per tuple index, the weak form a single index, and the scalar form filters
//! weights by membership of the combined value in the endpoint row first.

use crate::engine::{Engine, Row, VId};
use crate::extremal::{ExtrMode, TranslateSign};
use crate::value::Pt;

use super::{verdict, CheckError, Coverage, PropertyKind, Status, Verdict, Witness};

use std::rc::Rc;

struct LamCtx {
    lam: Vec<f64>,
    xc: f64,
    /// `F(Σλx, z)`.
    v: VId,
    /// `⋃_y F(Σλx, y)`.
    row: Rc<Row>,
    /// Does `F(Σλx, z)` meet the weak maxima of its row?
    premise: bool,
}

fn lam_contexts(e: &Engine, xs: &[f64], z: f64) -> Result<Vec<LamCtx>, CheckError> {
    let mut out = Vec::new();
    for lam in e.cfg.weight_grid(xs.len()) {
        let xc = e.combine(xs, &lam);
        let row = e.row(xc)?;
        let v = e.value(xc, z)?;
        let premise = e.value_meets_row_extremal(v, &row, ExtrMode::MaxWeak);
        out.push(LamCtx { lam, xc, v, row, premise });
    }
    Ok(out)
}

/// Candidate auxiliary points: the scanned z first, then the grid from the
/// top down (the easiest absorbers usually sit at the upper end).
fn candidate_zs(e: &Engine, z: f64) -> Vec<f64> {
    let mut out = vec![z];
    for &g in e.grid_y().iter().rev() {
        if (g - z).abs() > 1e-12 {
            out.push(g);
        }
    }
    out
}

/// Does candidate `cand` absorb every weight for tuple index `i`?  Returns
/// the index of the first failing context.
fn strong_failure(
    e: &Engine,
    kind: PropertyKind,
    xs: &[f64],
    z: f64,
    row_i: &Row,
    ctxs: &[LamCtx],
    i: usize,
    cand: f64,
) -> Result<Option<usize>, CheckError> {
    for (d, ctx) in ctxs.iter().enumerate() {
        let interior = !ctx.premise;
        let ok = match kind {
            PropertyKind::TransferMuV | PropertyKind::TransferWeakMuV => {
                let target = e.value(xs[i], cand)?;
                e.intersection_included(ctx.v, row_i, target, TranslateSign::Minus, interior)
            }
            PropertyKind::TransferMuIii | PropertyKind::TransferWeakMuIii => {
                let source = e.value(xs[i], z)?;
                let target = e.value(ctx.xc, cand)?;
                e.intersection_included(source, &ctx.row, target, TranslateSign::Plus, interior)
            }
            _ => unreachable!("strong_failure serves the set-valued transfer kinds"),
        };
        if !ok {
            return Ok(Some(d));
        }
    }
    Ok(None)
}

/// The single point of a single-valued value.
fn point_of(e: &Engine, v: VId) -> Pt {
    e.cloud(v)[0].clone()
}

pub(crate) fn check(e: &Engine, kind: PropertyKind) -> Result<Verdict, CheckError> {
    let zs: Vec<f64> = e.grid_y().to_vec();
    let weak = matches!(
        kind,
        PropertyKind::TransferWeakMuV | PropertyKind::TransferWeakMuIii
    );
    let mut cov = Coverage::default();
    for n in 1..=e.cfg.n_max {
        for xs in e.tuples(n) {
            cov.tuples += 1;
            let rows: Vec<Rc<Row>> = {
                let mut rows = Vec::with_capacity(n);
                for &x in &xs {
                    rows.push(e.row(x)?);
                }
                rows
            };
            for &z in &zs {
                cov.zs += 1;
                let ctxs = lam_contexts(e, &xs, z)?;
                cov.lambdas += ctxs.len();
                let cands = candidate_zs(e, z);
                if kind == PropertyKind::TransferMuScalar {
                    if let Some(v) =
                        scalar_at(e, &xs, z, &rows, &ctxs, &cands, &mut cov)?
                    {
                        return Ok(v);
                    }
                    continue;
                }
                if weak {
                    // One index with one absorber suffices.
                    let mut best: Option<(usize, f64, usize)> = None;
                    let mut found = false;
                    'outer: for i in 0..n {
                        for &cand in &cands {
                            cov.candidates += 1;
                            match strong_failure(e, kind, &xs, z, &rows[i], &ctxs, i, cand)? {
                                None => {
                                    found = true;
                                    break 'outer;
                                }
                                Some(d) => {
                                    if best.map_or(true, |(_, _, bd)| d > bd) {
                                        best = Some((i, cand, d));
                                    }
                                }
                            }
                        }
                    }
                    if !found {
                        let (bi, bc, bd) = best.unwrap();
                        let w = Witness {
                            xs,
                            z: Some(vec![z]),
                            zs: vec![bc],
                            lambda: ctxs[bd].lam.clone(),
                            index: Some(bi),
                            detail: Some("no index admits an absorbing point".into()),
                            ..Witness::default()
                        };
                        return Ok(verdict(e, Status::Refuted, Some(w), cov));
                    }
                } else {
                    // Every index needs its own absorber.
                    for i in 0..n {
                        let mut best: Option<(f64, usize)> = None;
                        let mut found = false;
                        for &cand in &cands {
                            cov.candidates += 1;
                            match strong_failure(e, kind, &xs, z, &rows[i], &ctxs, i, cand)? {
                                None => {
                                    found = true;
                                    break;
                                }
                                Some(d) => {
                                    if best.map_or(true, |(_, bd)| d > bd) {
                                        best = Some((cand, d));
                                    }
                                }
                            }
                        }
                        if !found {
                            let (bc, bd) = best.unwrap();
                            let w = Witness {
                                xs,
                                z: Some(vec![z]),
                                zs: vec![bc],
                                lambda: ctxs[bd].lam.clone(),
                                index: Some(i),
                                detail: Some("no absorbing point for this index".into()),
                                ..Witness::default()
                            };
                            return Ok(verdict(e, Status::Refuted, Some(w), cov));
                        }
                    }
                }
            }
        }
    }
    Ok(verdict(e, Status::NotRefuted, None, cov))
}

/// Scalar instance at one (tuple, z): weights whose combined value lies in
/// the endpoint row are classified by weak-maximality and must be absorbed
/// by a single f(x_i, z_i).  Returns a refuting verdict or None.
fn scalar_at(
    e: &Engine,
    xs: &[f64],
    z: f64,
    rows: &[Rc<Row>],
    ctxs: &[LamCtx],
    cands: &[f64],
    cov: &mut Coverage,
) -> Result<Option<Verdict>, CheckError> {
    let eps = e.cone.eps_cone;
    for (i, row_i) in rows.iter().enumerate() {
        let relevant: Vec<(usize, Pt)> = ctxs
            .iter()
            .enumerate()
            .filter_map(|(d, ctx)| {
                let p = point_of(e, ctx.v);
                row_i.contains(&p, eps).then_some((d, p))
            })
            .collect();
        if relevant.is_empty() {
            cov.vacuous += 1;
            continue;
        }
        let mut best: Option<(f64, usize)> = None;
        let mut found = false;
        'cand: for &cand in cands {
            cov.candidates += 1;
            let fi = point_of(e, e.value(xs[i], cand)?);
            for &(d, ref p) in &relevant {
                let diff: Pt = fi.iter().zip(p).map(|(a, b)| a - b).collect();
                let ok = if ctxs[d].premise {
                    e.cone.contains(&diff)
                } else {
                    e.cone.contains_interior(&diff)
                };
                if !ok {
                    if best.map_or(true, |(_, bd)| d > bd) {
                        best = Some((cand, d));
                    }
                    continue 'cand;
                }
            }
            found = true;
            break;
        }
        if !found {
            let (bc, bd) = best.unwrap();
            let w = Witness {
                xs: xs.to_vec(),
                z: Some(vec![z]),
                zs: vec![bc],
                lambda: ctxs[bd].lam.clone(),
                index: Some(i),
                detail: Some("no absorbing point for this index".into()),
                ..Witness::default()
            };
            return Ok(Some(verdict(e, Status::Refuted, Some(w), *cov)));
        }
    }
    Ok(None)
}

/// Replays a transfer refutation: the stored (tuple, z, index) must still
/// admit no absorbing candidate (for the weak form: no index at all).
pub(crate) fn replay(
    e: &Engine,
    kind: PropertyKind,
    status: Status,
    w: &Witness,
) -> Result<bool, CheckError> {
    if status != Status::Refuted {
        return Ok(true);
    }
    let z = w.z.as_ref().map(|v| v[0]).unwrap_or_default();
    let ctxs = lam_contexts(e, &w.xs, z)?;
    let cands = candidate_zs(e, z);
    let mut rows = Vec::with_capacity(w.xs.len());
    for &x in &w.xs {
        rows.push(e.row(x)?);
    }
    if kind == PropertyKind::TransferMuScalar {
        let mut cov = Coverage::default();
        let out = scalar_at(e, &w.xs, z, &rows, &ctxs, &cands, &mut cov)?;
        return Ok(out.is_some());
    }
    let weak = matches!(
        kind,
        PropertyKind::TransferWeakMuV | PropertyKind::TransferWeakMuIii
    );
    let indices: Vec<usize> = if weak {
        (0..w.xs.len()).collect()
    } else {
        vec![w.index.unwrap_or(0)]
    };
    let mut any_absorbed = false;
    'outer: for &i in &indices {
        for &cand in &cands {
            if strong_failure(e, kind, &w.xs, z, &rows[i], &ctxs, i, cand)?.is_none() {
                any_absorbed = true;
                break 'outer;
            }
        }
    }
    Ok(!any_absorbed)
}

#[cfg(test)]
mod tests {
    use super::super::{run_property, CheckRequest, PropertyKind, Status};
    use crate::cone::Cone;
    use crate::config::Config;
    use crate::fixture::builtin_fixture;

    fn run(fixture: &str, cone: &str, kind: PropertyKind, res: usize) -> super::super::Verdict {
        let fx = builtin_fixture(fixture).unwrap();
        let cone = Cone::builtin(cone, 1e-9, 1e-9).unwrap();
        let cfg = Config::default().with_resolution(res).with_n_max(2);
        run_property(&fx, &cone, &cfg, &CheckRequest::new(kind)).unwrap()
    }

    #[test]
    fn kinked_lower_bound_transfers_in_first_argument() {
        // Every row union is [-1, 1] with weak maxima {1}; z_i = 1 absorbs
        // all weights (strictly for z < 1, with equality at z = 1).
        let v = run("ex3_1", "Rplus", PropertyKind::TransferMuV, 10);
        assert_eq!(v.status, Status::NotRefuted, "{:?}", v.witness);
        assert!(v.coverage.zs > 0 && v.coverage.candidates > 0);
    }

    #[test]
    fn weak_form_follows_where_strong_holds() {
        let v = run("ex3_1", "Rplus", PropertyKind::TransferWeakMuV, 10);
        assert_eq!(v.status, Status::NotRefuted);
    }

    #[test]
    fn rational_split_discs_refute_transfer() {
        // Rows mix discs tangent at rational and irrational second arguments;
        // at z = 0 no grid point absorbs both weight classes.
        let v = run("ex3_6", "R2plus", PropertyKind::TransferMuV, 10);
        assert_eq!(v.status, Status::Refuted);
        let w = v.witness.as_ref().unwrap();
        assert!(w.index.is_some());
        let fx = builtin_fixture("ex3_6").unwrap();
        let cone = Cone::builtin("R2plus", 1e-9, 1e-9).unwrap();
        let cfg = Config::default().with_resolution(10).with_n_max(2);
        assert!(super::super::replay(&fx, &cone, &cfg, &v).unwrap());
    }

    #[test]
    fn plateau_is_scalar_transfer_convex() {
        // Rows are {x, 1} with weak maximum 1; z_i at the top of the grid
        // reaches the plateau value 1, which absorbs both weight classes.
        let v = run("ex3_4", "Rplus", PropertyKind::TransferMuScalar, 10);
        assert_eq!(v.status, Status::NotRefuted, "{:?}", v.witness);
    }

    #[test]
    fn constant_map_transfers_trivially() {
        for kind in [
            PropertyKind::TransferMuV,
            PropertyKind::TransferMuIii,
            PropertyKind::TransferWeakMuV,
            PropertyKind::TransferWeakMuIii,
        ] {
            let v = run("const_A0", "Rplus", kind, 8);
            assert_eq!(v.status, Status::NotRefuted, "{kind:?}");
        }
    }
}
