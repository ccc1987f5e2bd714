//! Simplex reparameterization curves.
//!
//! Several existential properties quantify over continuous maps
//! `g: Δ_{n-1} → Δ_{n-1}` whose components vanish at 0 and equal 1 at 1
//! (the class written `C*(Δ_{n-1})`).  No finite family covers that class,
//! so checkers search an explicit, documented family:
//!
//! * the identity,
//! * renormalized componentwise powers `λ_i ↦ λ_i^{p_i} / Σ_j λ_j^{p_j}`
//!   with exponents from {1/2, 1, 2, 3}, and
//! * a per-tuple "group knee" curve that transfers weight from coordinates
//!   above a threshold to the rest until the combined point crosses it —
//!   the witness shape needed by maps whose graph jumps at a breakpoint.
//!
//! Every curve keeps its image on the simplex and satisfies the endpoint
//! conditions; both facts are checked by tests over sampled grids.

use crate::config::simplex_grid;

#[derive(Debug, Clone, PartialEq)]
enum Kind {
    Identity,
    /// Componentwise powers, renormalized back onto the simplex.
    Powers(Vec<f64>),
    /// Weight transfer across `threshold` (see [`GCurve::group_knee`]).
    Knee { xs: Vec<f64>, threshold: f64 },
}

/// One parametric curve `g: Δ_{n-1} → Δ_{n-1}`.
#[derive(Debug, Clone, PartialEq)]
pub struct GCurve {
    pub name: String,
    kind: Kind,
}

impl GCurve {
    pub fn identity() -> GCurve {
        GCurve { name: "identity".to_string(), kind: Kind::Identity }
    }

    /// `g(λ)_i = λ_i^{p_i} / Σ_j λ_j^{p_j}`.
    pub fn powers(p: Vec<f64>) -> GCurve {
        let name = format!(
            "pow[{}]",
            p.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
        );
        GCurve { name, kind: Kind::Powers(p) }
    }

    /// Splits coordinates into the heavy group `H = {i : xs_i > threshold}`
    /// and the rest `L`, then rescales: heavy weights are multiplied by
    /// `σ(λ) = clamp(a (⟨xs,λ⟩ − threshold), 0, 1)` with
    /// `a = 1 / (min_H xs_i − threshold)`, and the removed mass is handed to
    /// the light group proportionally.  On the simplex this keeps the sum at
    /// one, and at each vertex `e_i` it returns `e_i`.
    ///
    /// Returns `None` when the split is trivial (every coordinate on one
    /// side), in which case the curve would coincide with the identity.
    pub fn group_knee(xs: &[f64], threshold: f64) -> Option<GCurve> {
        let heavy = xs.iter().filter(|&&x| x > threshold).count();
        if heavy == 0 || heavy == xs.len() {
            return None;
        }
        let name = format!(
            "knee[t={threshold};{}]",
            xs.iter().map(|v| format!("{v}")).collect::<Vec<_>>().join(",")
        );
        GCurve {
            name,
            kind: Kind::Knee { xs: xs.to_vec(), threshold },
        }
        .into()
    }

    pub fn apply(&self, lambda: &[f64]) -> Vec<f64> {
        match &self.kind {
            Kind::Identity => lambda.to_vec(),
            Kind::Powers(p) => {
                debug_assert_eq!(p.len(), lambda.len());
                let powered: Vec<f64> =
                    lambda.iter().zip(p).map(|(&l, &e)| l.max(0.0).powf(e)).collect();
                let total: f64 = powered.iter().sum();
                if total <= 0.0 {
                    return lambda.to_vec();
                }
                powered.into_iter().map(|v| v / total).collect()
            }
            Kind::Knee { xs, threshold } => {
                debug_assert_eq!(xs.len(), lambda.len());
                let m = xs
                    .iter()
                    .filter(|&&x| x > *threshold)
                    .fold(f64::INFINITY, |acc, &x| acc.min(x));
                let a = 1.0 / (m - threshold);
                let s: f64 = xs.iter().zip(lambda).map(|(x, l)| x * l).sum();
                let sigma = (a * (s - threshold)).clamp(0.0, 1.0);
                let sum_h: f64 = xs
                    .iter()
                    .zip(lambda)
                    .filter(|(x, _)| **x > *threshold)
                    .map(|(_, l)| l)
                    .sum();
                let sum_l: f64 = lambda.iter().sum::<f64>() - sum_h;
                xs.iter()
                    .zip(lambda)
                    .map(|(&x, &l)| {
                        if x > *threshold {
                            l * sigma
                        } else if sum_l > 0.0 {
                            l * (1.0 + (1.0 - sigma) * sum_h / sum_l)
                        } else {
                            l
                        }
                    })
                    .collect()
            }
        }
    }
}

/// The documented default family for arity `n`: identity plus renormalized
/// powers.  For pairs every exponent vector over {1/2, 1, 2, 3} is included
/// (minus the all-ones identity duplicate); for higher arity only the
/// uniform vectors, to keep the search budget flat.
pub fn default_family(n: usize) -> Vec<GCurve> {
    const EXPONENTS: [f64; 4] = [0.5, 1.0, 2.0, 3.0];
    let mut out = vec![GCurve::identity()];
    if n == 2 {
        for &p1 in &EXPONENTS {
            for &p2 in &EXPONENTS {
                if p1 == 1.0 && p2 == 1.0 {
                    continue;
                }
                out.push(GCurve::powers(vec![p1, p2]));
            }
        }
    } else {
        for &p in &EXPONENTS {
            if p == 1.0 {
                continue;
            }
            out.push(GCurve::powers(vec![p; n]));
        }
    }
    out
}

/// Default family extended with the group-knee curves a tuple admits (one
/// per distinct coordinate threshold between consecutive sorted values).
pub fn tuple_family(xs: &[f64]) -> Vec<GCurve> {
    let mut out = default_family(xs.len());
    let mut sorted = xs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).unwrap());
    sorted.dedup_by(|a, b| (*a - *b).abs() <= 1e-12);
    for w in sorted.windows(2) {
        let threshold = 0.5 * (w[0] + w[1]);
        if let Some(curve) = GCurve::group_knee(xs, threshold) {
            out.push(curve);
        }
    }
    out
}

/// Checks the `C*` membership conditions for one curve over a sampled grid:
/// image on the simplex, identity at the vertices.
pub fn curve_respects_simplex(curve: &GCurve, n: usize, segments: usize, eps: f64) -> bool {
    for lambda in simplex_grid(n, segments) {
        let image = curve.apply(&lambda);
        if image.len() != n || image.iter().any(|&v| v < -eps) {
            return false;
        }
        let total: f64 = image.iter().sum();
        if (total - 1.0).abs() > 1e-9 + eps {
            return false;
        }
        // Vertex conditions: g_i(1) = 1 (hence g_j(0) = 0 elsewhere).
        if let Some(i) = lambda.iter().position(|&v| (v - 1.0).abs() <= 1e-12) {
            if (image[i] - 1.0).abs() > 1e-9 + eps {
                return false;
            }
        }
    }
    true
}
