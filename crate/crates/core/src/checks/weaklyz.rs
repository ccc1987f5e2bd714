//! Weak z-convexity of the graph: for every target z and tuple (x_i), if each
//! slice offers a second argument whose value meets the upset z + S, then
//! some such selection (y_i) and reparametrization g keep the combined value
//! F(Σλ_i x_i, Σ g_i(λ) y_i) meeting z + S along the whole weight grid.

use crate::engine::Engine;
use crate::gcurve::tuple_family;
use crate::value::Pt;

use super::{verdict, CheckError, Coverage, Status, Verdict, Witness};

/// Compact per-index selection candidates: the extremes and midpoint of the
/// feasible set, plus the diagonal choice y = x_i when it is feasible.
fn shortlist(feas: &[f64], xi: f64) -> Vec<f64> {
    let mut out = vec![feas[0], *feas.last().unwrap(), feas[feas.len() / 2]];
    if let Some(&d) = feas.iter().find(|&&y| (y - xi).abs() < 1e-9) {
        out.push(d);
    }
    out.dedup_by(|a, b| a == b);
    let mut unique = Vec::with_capacity(out.len());
    for y in out {
        if !unique.iter().any(|&u: &f64| u == y) {
            unique.push(y);
        }
    }
    unique
}

/// Whether the selection/curve keeps every weight vector feasible; returns
/// the first failing weight vector otherwise.
fn sweep_failure(
    e: &Engine,
    z: &[f64],
    tuple: &[f64],
    sel: &[f64],
    curve: &crate::gcurve::GCurve,
    weights: &[Vec<f64>],
    cov: &mut Coverage,
) -> Result<Option<Vec<f64>>, CheckError> {
    let (ylo, yhi) = e.fixture.domain_y;
    for lam in weights {
        cov.lambdas += 1;
        let g = curve.apply(lam);
        let yc: f64 = g.iter().zip(sel).map(|(gi, yi)| gi * yi).sum();
        let v = e.value(e.combine(tuple, lam), yc.clamp(ylo, yhi))?;
        if !e.value_meets_upset(v, z) {
            return Ok(Some(lam.clone()));
        }
    }
    Ok(None)
}

pub(crate) fn check(e: &Engine, z_set: Option<&[Pt]>) -> Result<Verdict, CheckError> {
    let zs: Vec<Pt> = match z_set {
        Some([]) => return Err(CheckError::EmptyZSet),
        Some(s) => s.to_vec(),
        None => super::default_z_set(&e.fixture),
    };
    let mut cov = Coverage::default();
    let mut first_pass: Option<Witness> = None;
    for z in &zs {
        cov.zs += 1;
        for n in 2..=e.cfg.n_max {
            let weights = e.cfg.weight_grid(n);
            for tuple in e.tuples(n) {
                cov.tuples += 1;
                // Feasible second arguments per index; an infeasible index
                // makes the implication hold vacuously.
                let mut feas: Vec<Vec<f64>> = Vec::with_capacity(n);
                for &x in &tuple {
                    let mut fy = Vec::new();
                    for &y in e.grid_y() {
                        if e.value_meets_upset(e.value(x, y)?, z) {
                            fy.push(y);
                        }
                    }
                    feas.push(fy);
                }
                if feas.iter().any(|f| f.is_empty()) {
                    cov.vacuous += 1;
                    continue;
                }
                let lists: Vec<Vec<f64>> =
                    feas.iter().zip(&tuple).map(|(f, &x)| shortlist(f, x)).collect();
                let curves = tuple_family(&tuple);
                let mut found: Option<(Vec<f64>, String)> = None;
                // Deepest surviving attempt, for the failure report.
                let mut best: (usize, Vec<f64>, String, Vec<f64>) =
                    (0, Vec::new(), String::new(), Vec::new());
                'attempt: for curve in &curves {
                    let mut idx = vec![0usize; n];
                    loop {
                        let sel: Vec<f64> = idx.iter().zip(&lists).map(|(&i, l)| l[i]).collect();
                        cov.candidates += 1;
                        match sweep_failure(e, z, &tuple, &sel, curve, &weights, &mut cov)? {
                            None => {
                                found = Some((sel, curve.name.clone()));
                                break 'attempt;
                            }
                            Some(lam) => {
                                let depth = weights.iter().position(|w| *w == lam).unwrap_or(0);
                                if depth >= best.0 {
                                    best = (depth, sel, curve.name.clone(), lam);
                                }
                            }
                        }
                        // Odometer over the selection lists.
                        let mut k = 0;
                        loop {
                            if k == n {
                                break;
                            }
                            idx[k] += 1;
                            if idx[k] < lists[k].len() {
                                break;
                            }
                            idx[k] = 0;
                            k += 1;
                        }
                        if k == n {
                            break;
                        }
                    }
                }
                match found {
                    Some((sel, curve)) => {
                        if first_pass.is_none() {
                            first_pass = Some(Witness {
                                xs: tuple.clone(),
                                ys: sel,
                                z: Some(z.clone()),
                                curve: Some(curve),
                                ..Witness::default()
                            });
                        }
                    }
                    None => {
                        let w = Witness {
                            xs: tuple.clone(),
                            ys: best.1,
                            z: Some(z.clone()),
                            curve: Some(best.2),
                            lambda: best.3,
                            detail: Some("no selection/curve kept the combination feasible".into()),
                            ..Witness::default()
                        };
                        return Ok(verdict(e, Status::NotConfirmed, Some(w), cov));
                    }
                }
            }
        }
    }
    let mut v = verdict(e, Status::Confirmed, first_pass, cov);
    if v.witness.is_none() {
        v.notes.push("all sampled instances were vacuous (no feasible selections)".into());
    }
    Ok(v)
}

/// Replays a confirmation: the stored selection must be feasible and the
/// stored curve must keep every weight vector feasible.
pub(crate) fn replay(e: &Engine, status: Status, w: &Witness) -> Result<bool, CheckError> {
    if status != Status::Confirmed {
        return Ok(true);
    }
    let Some(z) = &w.z else { return Ok(false) };
    for (&x, &y) in w.xs.iter().zip(&w.ys) {
        if !e.value_meets_upset(e.value(x, y)?, z) {
            return Ok(false);
        }
    }
    let curves = tuple_family(&w.xs);
    let Some(curve) = curves.iter().find(|c| Some(&c.name) == w.curve.as_ref()) else {
        return Ok(false);
    };
    let weights = e.cfg.weight_grid(w.xs.len());
    let mut cov = Coverage::default();
    Ok(sweep_failure(e, z, &w.xs, &w.ys, curve, &weights, &mut cov)?.is_none())
}

#[cfg(test)]
mod tests {
    use super::super::{run_property, CheckRequest, PropertyKind, Status};
    use crate::cone::Cone;
    use crate::config::Config;
    use crate::fixture::builtin_fixture;

    fn run(fixture: &str, cone: &str, res: usize, z_set: Option<Vec<Vec<f64>>>) -> super::super::Verdict {
        let fx = builtin_fixture(fixture).unwrap();
        let cone = Cone::builtin(cone, 1e-9, 1e-9).unwrap();
        let cfg = Config::default().with_resolution(res);
        let mut req = CheckRequest::new(PropertyKind::WeaklyZ);
        if let Some(zs) = z_set {
            req = req.with_z_set(zs);
        }
        run_property(&fx, &cone, &cfg, &req).unwrap()
    }

    #[test]
    fn clipped_band_confirms_over_its_codomain_grid() {
        // Choosing every y_i = 0 sends the combination to the full band
        // [0,1], which meets z + S for each z in the box; slices through
        // x = 0 are infeasible for z > 0 and pass vacuously.
        let v = run("ex4_4", "Rplus", 10, None);
        assert_eq!(v.status, Status::Confirmed, "{:?}", v.witness);
        assert!(v.coverage.vacuous > 0);
        let fx = builtin_fixture("ex4_4").unwrap();
        let cone = Cone::builtin("Rplus", 1e-9, 1e-9).unwrap();
        let cfg = Config::default().with_resolution(10);
        assert!(super::super::replay(&fx, &cone, &cfg, &v).unwrap());
    }

    #[test]
    fn saturating_pair_confirms_at_selected_targets() {
        let v = run(
            "ex4_5",
            "R2plus",
            8,
            Some(vec![vec![0.5, 0.5], vec![1.0, 1.0]]),
        );
        assert_eq!(v.status, Status::Confirmed, "{:?}", v.witness);
    }

    #[test]
    fn plateau_gap_defeats_every_selection() {
        // At z = 3/4 only the value [0,1] is feasible, reachable through
        // y = 1/2 on outer slices; every curve keeps the combined second
        // argument at 1/2, and mid-range combinations collapse to {0}.
        let v = run("rem4_2", "Rplus", 8, Some(vec![vec![0.75]]));
        assert_eq!(v.status, Status::NotConfirmed);
        let w = v.witness.as_ref().unwrap();
        assert_eq!(w.z, Some(vec![0.75]));
        assert!(!w.lambda.is_empty());
    }

    #[test]
    fn unreachable_target_is_vacuously_confirmed() {
        let v = run("const_A0", "Rplus", 8, Some(vec![vec![2.0]]));
        assert_eq!(v.status, Status::Confirmed);
        assert!(v.witness.is_none());
        assert!(v.coverage.vacuous > 0);
    }

    #[test]
    fn empty_target_set_is_rejected() {
        let fx = builtin_fixture("ex4_4").unwrap();
        let cone = Cone::builtin("Rplus", 1e-9, 1e-9).unwrap();
        let cfg = Config::default().with_resolution(8);
        let req = CheckRequest::new(PropertyKind::WeaklyZ).with_z_set(Vec::new());
        let err = run_property(&fx, &cone, &cfg, &req).unwrap_err();
        assert!(matches!(err, super::super::CheckError::EmptyZSet));
    }
}
