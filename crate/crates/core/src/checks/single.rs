//! Convexity kinds of a one-argument slice map `F(·, y)`: the two "properly"
//! disjunctions, the two hull ("naturally") inclusions, the dilation
//! intersection kind, plain quasi-convexity over n-tuples, and the scalar
//! combination kind for single-valued maps.  Two-argument fixtures are
//! checked on every frozen second argument of the grid.

use std::collections::HashMap;
use std::rc::Rc;

use crate::engine::{Engine, VId};
use crate::extremal::TranslateSign;
use crate::value::Pt;

use super::{verdict, CheckError, Coverage, PropertyKind, Status, Verdict, Witness};

pub(crate) fn check(e: &Engine, kind: PropertyKind) -> Result<Verdict, CheckError> {
    match kind {
        PropertyKind::Qc => check_qc(e),
        PropertyKind::NaturalQcScalar => check_scalar(e),
        _ => check_pairwise(e, kind),
    }
}

/// One pairwise instance: does the kind's inclusion hold for values
/// `a = F(x₁)`, `b = F(x₂)`, `c = F(x_λ)`?  On failure returns the violating
/// point(s).
fn eval_pairwise(
    e: &Engine,
    kind: PropertyKind,
    a: VId,
    b: VId,
    c: VId,
) -> Result<(bool, Option<Pt>, Option<Pt>), CheckError> {
    let ok = (true, None, None);
    match kind {
        PropertyKind::ProperlyQcIii => {
            let first = e.subset(a, c, TranslateSign::Plus, false);
            if first.holds {
                return Ok(ok);
            }
            let second = e.subset(b, c, TranslateSign::Plus, false);
            if second.holds {
                Ok(ok)
            } else {
                Ok((false, first.witness, second.witness))
            }
        }
        PropertyKind::ProperlyQcV => {
            let first = e.subset(c, a, TranslateSign::Minus, false);
            if first.holds {
                return Ok(ok);
            }
            let second = e.subset(c, b, TranslateSign::Minus, false);
            if second.holds {
                Ok(ok)
            } else {
                Ok((false, first.witness, second.witness))
            }
        }
        PropertyKind::NaturallyQcIii => {
            if e.hull_in_translate(a, b, c) {
                Ok(ok)
            } else {
                Ok((false, e.hull_in_translate_offender(a, b, c), None))
            }
        }
        PropertyKind::NaturallyQcV => {
            if e.in_hull_translate(c, a, b) {
                Ok(ok)
            } else {
                Ok((false, e.in_hull_translate_offender(c, a, b), None))
            }
        }
        PropertyKind::SQc => match e.dilation_intersection_included(a, b, c) {
            None => Err(CheckError::UnsupportedCone(e.cone.name.clone())),
            Some(true) => Ok(ok),
            Some(false) => Ok((false, e.dilation_offender(a, b, c), None)),
        },
        _ => unreachable!("eval_pairwise only serves the pairwise kinds"),
    }
}

fn check_pairwise(e: &Engine, kind: PropertyKind) -> Result<Verdict, CheckError> {
    let lambdas = e.cfg.lambda_grid();
    let pairs = e.tuples(2);
    let slices: Vec<f64> = e.grid_y().to_vec();
    let mut cov = Coverage::default();
    for &y in &slices {
        cov.slices += 1;
        for pr in &pairs {
            cov.tuples += 1;
            let a = e.value(pr[0], y)?;
            let b = e.value(pr[1], y)?;
            for &l in &lambdas {
                cov.lambdas += 1;
                let lam = vec![l, 1.0 - l];
                let c = e.value(e.combine(pr, &lam), y)?;
                let (holds, point, point2) = eval_pairwise(e, kind, a, b, c)?;
                if !holds {
                    let w = Witness {
                        xs: pr.clone(),
                        lambda: lam,
                        slice: Some(y),
                        point,
                        point2,
                        ..Witness::default()
                    };
                    return Ok(verdict(e, Status::Refuted, Some(w), cov));
                }
            }
        }
    }
    Ok(verdict(e, Status::NotRefuted, None, cov))
}

/// Sampled `⋂_i F(x_i)`: the points of the first (smallest-id) cloud lying in
/// every other member's descriptor.
fn intersection(e: &Engine, vids: &[VId]) -> Rc<Vec<Pt>> {
    let mut sorted: Vec<VId> = vids.to_vec();
    sorted.sort_unstable();
    sorted.dedup();
    let base = e.cloud(sorted[0]);
    if sorted.len() == 1 {
        return base;
    }
    let eps = e.cone.eps_cone;
    let descs: Vec<_> = sorted[1..].iter().map(|&v| e.desc(v)).collect();
    Rc::new(
        base.iter()
            .filter(|p| descs.iter().all(|d| d.contains(p, eps)))
            .cloned()
            .collect(),
    )
}

fn check_qc(e: &Engine) -> Result<Verdict, CheckError> {
    let slices: Vec<f64> = e.grid_y().to_vec();
    let eps = e.cone.eps_cone;
    let mut cov = Coverage::default();
    let mut inter_memo: HashMap<Vec<VId>, Rc<Vec<Pt>>> = HashMap::new();
    let mut incl_memo: HashMap<(Vec<VId>, VId), bool> = HashMap::new();
    for &y in &slices {
        cov.slices += 1;
        for n in 2..=e.cfg.n_max {
            let weights = e.cfg.weight_grid(n);
            for xs in e.tuples(n) {
                cov.tuples += 1;
                let mut vids = Vec::with_capacity(n);
                for &x in &xs {
                    vids.push(e.value(x, y)?);
                }
                let mut key = vids.clone();
                key.sort_unstable();
                key.dedup();
                let inter = inter_memo
                    .entry(key.clone())
                    .or_insert_with(|| intersection(e, &vids))
                    .clone();
                if inter.is_empty() {
                    cov.vacuous += 1;
                    continue;
                }
                for lam in &weights {
                    cov.lambdas += 1;
                    let c = e.value(e.combine(&xs, lam), y)?;
                    let ikey = (key.clone(), c);
                    let included = *incl_memo.entry(ikey).or_insert_with(|| {
                        let d = e.desc(c);
                        inter.iter().all(|p| d.contains(p, eps))
                    });
                    if !included {
                        let d = e.desc(c);
                        let offender = inter.iter().find(|p| !d.contains(p, eps)).cloned();
                        let w = Witness {
                            xs: xs.clone(),
                            lambda: lam.clone(),
                            slice: Some(y),
                            point: offender,
                            ..Witness::default()
                        };
                        return Ok(verdict(e, Status::Refuted, Some(w), cov));
                    }
                }
            }
        }
    }
    Ok(verdict(e, Status::NotRefuted, None, cov))
}

/// The single point of a single-valued fixture's value.
fn point_of(e: &Engine, v: VId) -> Pt {
    let cloud = e.cloud(v);
    debug_assert_eq!(cloud.len(), 1, "single-valued fixtures sample one point");
    cloud[0].clone()
}

fn check_scalar(e: &Engine) -> Result<Verdict, CheckError> {
    let lambdas = e.cfg.lambda_grid();
    let mus = e.cfg.coeff_grid();
    let pairs = e.tuples(2);
    let slices: Vec<f64> = e.grid_y().to_vec();
    let mut cov = Coverage::default();
    for &y in &slices {
        cov.slices += 1;
        for pr in &pairs {
            cov.tuples += 1;
            let pa = point_of(e, e.value(pr[0], y)?);
            let pb = point_of(e, e.value(pr[1], y)?);
            for &l in &lambdas {
                cov.lambdas += 1;
                let lam = vec![l, 1.0 - l];
                let pc = point_of(e, e.value(e.combine(pr, &lam), y)?);
                let found = mus.iter().any(|&mu| {
                    let diff: Pt = pa
                        .iter()
                        .zip(&pb)
                        .zip(&pc)
                        .map(|((&u, &v), &w)| mu * u + (1.0 - mu) * v - w)
                        .collect();
                    e.cone.contains(&diff)
                });
                cov.candidates += mus.len();
                if !found {
                    let w = Witness {
                        xs: pr.clone(),
                        lambda: lam,
                        slice: Some(y),
                        point: Some(pc),
                        ..Witness::default()
                    };
                    return Ok(verdict(e, Status::Refuted, Some(w), cov));
                }
            }
        }
    }
    Ok(verdict(e, Status::NotRefuted, None, cov))
}

/// Re-evaluates a stored refutation instance; true when it still fails.
pub(crate) fn replay(
    e: &Engine,
    kind: PropertyKind,
    status: Status,
    w: &Witness,
) -> Result<bool, CheckError> {
    if status != Status::Refuted {
        return Ok(true);
    }
    let y = w.slice.unwrap_or_else(|| e.grid_y()[0]);
    let xc = e.combine(&w.xs, &w.lambda);
    let c = e.value(xc, y)?;
    match kind {
        PropertyKind::Qc => {
            let mut vids = Vec::with_capacity(w.xs.len());
            for &x in &w.xs {
                vids.push(e.value(x, y)?);
            }
            let inter = intersection(e, &vids);
            let d = e.desc(c);
            let eps = e.cone.eps_cone;
            Ok(!inter.iter().all(|p| d.contains(p, eps)))
        }
        PropertyKind::NaturalQcScalar => {
            let pa = point_of(e, e.value(w.xs[0], y)?);
            let pb = point_of(e, e.value(w.xs[1], y)?);
            let pc = point_of(e, c);
            let found = e.cfg.coeff_grid().iter().any(|&mu| {
                let diff: Pt = pa
                    .iter()
                    .zip(&pb)
                    .zip(&pc)
                    .map(|((&u, &v), &t)| mu * u + (1.0 - mu) * v - t)
                    .collect();
                e.cone.contains(&diff)
            });
            Ok(!found)
        }
        _ => {
            let a = e.value(w.xs[0], y)?;
            let b = e.value(w.xs[1], y)?;
            let (holds, _, _) = eval_pairwise(e, kind, a, b, c)?;
            Ok(!holds)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::super::{run_property, CheckRequest, Polarity, PropertyKind, Status};
    use super::*;
    use crate::cone::Cone;
    use crate::config::Config;
    use crate::fixture::builtin_fixture;

    fn run(
        fixture: &str,
        cone: &str,
        kind: PropertyKind,
        polarity: Polarity,
    ) -> super::super::Verdict {
        let fx = builtin_fixture(fixture).unwrap();
        let cone = Cone::builtin(cone, 1e-9, 1e-9).unwrap();
        let cfg = Config::default().with_resolution(10);
        let req = CheckRequest::new(kind).with_polarity(polarity);
        run_property(&fx, &cone, &cfg, &req).unwrap()
    }

    #[test]
    fn constant_map_passes_every_pairwise_kind() {
        for kind in [
            PropertyKind::ProperlyQcIii,
            PropertyKind::ProperlyQcV,
            PropertyKind::NaturallyQcIii,
            PropertyKind::NaturallyQcV,
            PropertyKind::SQc,
            PropertyKind::Qc,
        ] {
            let v = run("const_A0", "Rplus", kind, Polarity::Convex);
            assert_eq!(v.status, Status::NotRefuted, "{kind:?}");
            assert!(v.coverage.tuples > 0 && v.coverage.lambdas > 0);
        }
    }

    #[test]
    fn kinked_lower_bound_refutes_properly_iii() {
        // For x₁ ≤ y < x_λ < x₂ the slice bottoms are -1, -x_λ, -x₂: both
        // endpoint values poke below F(x_λ) + S, so the disjunction fails.
        let v = run("ex3_1", "Rplus", PropertyKind::ProperlyQcIii, Polarity::Convex);
        assert_eq!(v.status, Status::Refuted);
        let w = v.witness.as_ref().unwrap();
        assert!(w.point.is_some() && w.point2.is_some());
        // The stored instance still fails when re-evaluated.
        let fx = builtin_fixture("ex3_1").unwrap();
        let cone = Cone::builtin("Rplus", 1e-9, 1e-9).unwrap();
        let cfg = Config::default().with_resolution(10);
        assert!(super::super::replay(&fx, &cone, &cfg, &v).unwrap());
    }

    #[test]
    fn kinked_lower_bound_refutes_dilation_kind() {
        // max(-1, -x₂) = -x₂ < -x_λ: the joined staircase escapes downward.
        let v = run("ex3_1", "Rplus", PropertyKind::SQc, Polarity::Convex);
        assert_eq!(v.status, Status::Refuted);
        assert!(v.witness.unwrap().point.is_some());
    }

    #[test]
    fn zero_anchored_kink_is_naturally_concave_iii() {
        let v = run("ex3_7", "Rplus", PropertyKind::NaturallyQcIii, Polarity::Concave);
        assert_eq!(v.status, Status::NotRefuted);
    }

    #[test]
    fn step_interval_map_refutes_qc() {
        // [0,2] ∩ (0,2] is nonempty but F(2) = [-2,0] misses it entirely.
        let v = run("ex2_1", "Rplus", PropertyKind::Qc, Polarity::Convex);
        assert_eq!(v.status, Status::Refuted);
        let w = v.witness.unwrap();
        assert!(w.point.is_some());
        assert_eq!(w.xs.len(), 2);
    }

    #[test]
    fn plateau_is_scalar_convex() {
        // Values never exceed 1 and f(x₁) with x₁ ≤ y is exactly 1, so μ = 1
        // always realizes the combination bound.
        let v = run("ex3_4", "Rplus", PropertyKind::NaturalQcScalar, Polarity::Convex);
        assert_eq!(v.status, Status::NotRefuted);
        assert!(v.coverage.candidates > 0);
    }

    #[test]
    fn oblique_cone_rejects_dilation_kind() {
        let fx = builtin_fixture("ex3_2").unwrap();
        let cone = Cone::from_normals(
            "oblique",
            &[vec![1.0, 0.0], vec![0.70710678, 0.70710678]],
            1e-9,
            1e-9,
        )
        .unwrap();
        let cfg = Config::default().with_resolution(6);
        let req = CheckRequest::new(PropertyKind::SQc);
        let err = run_property(&fx, &cone, &cfg, &req).unwrap_err();
        assert!(matches!(err, CheckError::UnsupportedCone(_)));
    }
}
