//! Pointed closed convex polyhedral cones in halfspace form.
//!
//! A cone is stored as a list of unit outward normals `n_1, ..., n_m`; a
//! point `z` belongs to the cone when `n_j · z >= 0` for every `j`, and to
//! its interior when every functional is strictly positive.  All membership
//! tests carry explicit tolerances so that sampled data a hair across a face
//! is classified stably.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

#[derive(Debug, Error)]
pub enum ConeError {
    #[error("cone needs at least one normal")]
    Empty,
    #[error("normal {0} has near-zero length")]
    ZeroNormal(usize),
    #[error("normal {0} has dimension {1}, expected {2}")]
    MixedDims(usize, usize, usize),
    #[error("cone is not pointed: normal matrix has rank {rank} < dimension {dim}")]
    NotPointed { rank: usize, dim: usize },
    #[error("cone has empty interior: no direction satisfies all halfspaces strictly")]
    EmptyInterior,
    #[error("unknown builtin cone `{0}` (expected Rplus, R2plus or minusR2plus)")]
    UnknownBuiltin(String),
}

/// A pointed closed convex polyhedral cone `S = {z : n_j · z >= 0 for all j}`.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Cone {
    pub name: String,
    pub dim: usize,
    /// Unit outward normals of the defining halfspaces.
    pub normals: Vec<Vec<f64>>,
    /// Slack for closed membership (`n·z >= -eps_cone`).
    pub eps_cone: f64,
    /// Margin for interior membership (`n·z >= eps_interior`).
    pub eps_interior: f64,
    /// A designated interior direction, used by self-tests.
    pub interior_witness: Vec<f64>,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm2(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Rank of a small row matrix via Gaussian elimination with partial pivoting.
fn matrix_rank(rows: &[Vec<f64>], dim: usize) -> usize {
    let mut m: Vec<Vec<f64>> = rows.to_vec();
    let mut rank = 0;
    for col in 0..dim {
        let pivot = (rank..m.len()).max_by(|&a, &b| {
            m[a][col]
                .abs()
                .partial_cmp(&m[b][col].abs())
                .unwrap_or(std::cmp::Ordering::Equal)
        });
        let Some(p) = pivot else { break };
        if m[p][col].abs() < 1e-9 {
            continue;
        }
        m.swap(rank, p);
        for r in rank + 1..m.len() {
            let f = m[r][col] / m[rank][col];
            for c in col..dim {
                m[r][c] -= f * m[rank][c];
            }
        }
        rank += 1;
        if rank == m.len() {
            break;
        }
    }
    rank
}

impl Cone {
    /// Builds a cone from outward normals, normalizing them to unit length
    /// and validating pointedness and nonempty interior.
    pub fn from_normals(
        name: &str,
        normals: &[Vec<f64>],
        eps_cone: f64,
        eps_interior: f64,
    ) -> Result<Cone, ConeError> {
        if normals.is_empty() {
            return Err(ConeError::Empty);
        }
        let dim = normals[0].len();
        let mut unit = Vec::with_capacity(normals.len());
        for (j, n) in normals.iter().enumerate() {
            if n.len() != dim {
                return Err(ConeError::MixedDims(j, n.len(), dim));
            }
            let len = norm2(n);
            if len < 1e-12 {
                return Err(ConeError::ZeroNormal(j));
            }
            unit.push(n.iter().map(|v| v / len).collect::<Vec<f64>>());
        }
        let rank = matrix_rank(&unit, dim);
        if rank < dim {
            return Err(ConeError::NotPointed { rank, dim });
        }
        let interior_witness = find_interior_witness(&unit, dim)?;
        Ok(Cone {
            name: name.to_string(),
            dim,
            normals: unit,
            eps_cone,
            eps_interior,
            interior_witness,
        })
    }

    /// The nonnegative ray in dimension one.
    pub fn rplus(eps_cone: f64, eps_interior: f64) -> Cone {
        Cone::from_normals("Rplus", &[vec![1.0]], eps_cone, eps_interior).unwrap()
    }

    /// The nonnegative quadrant in dimension two.
    pub fn r2plus(eps_cone: f64, eps_interior: f64) -> Cone {
        Cone::from_normals(
            "R2plus",
            &[vec![1.0, 0.0], vec![0.0, 1.0]],
            eps_cone,
            eps_interior,
        )
        .unwrap()
    }

    /// The nonpositive quadrant in dimension two.
    pub fn minus_r2plus(eps_cone: f64, eps_interior: f64) -> Cone {
        Cone::from_normals(
            "minusR2plus",
            &[vec![-1.0, 0.0], vec![0.0, -1.0]],
            eps_cone,
            eps_interior,
        )
        .unwrap()
    }

    /// Looks up one of the built-in cones by name.
    pub fn builtin(name: &str, eps_cone: f64, eps_interior: f64) -> Result<Cone, ConeError> {
        match name {
            "Rplus" => Ok(Cone::rplus(eps_cone, eps_interior)),
            "R2plus" => Ok(Cone::r2plus(eps_cone, eps_interior)),
            "minusR2plus" => Ok(Cone::minus_r2plus(eps_cone, eps_interior)),
            other => Err(ConeError::UnknownBuiltin(other.to_string())),
        }
    }

    /// Names of the built-in cones.
    pub fn builtin_names() -> &'static [&'static str] {
        &["Rplus", "R2plus", "minusR2plus"]
    }

    /// Closed membership with the cone's tolerance.
    pub fn contains(&self, z: &[f64]) -> bool {
        self.normals.iter().all(|n| dot(n, z) >= -self.eps_cone)
    }

    /// Interior membership: every halfspace functional clears the margin.
    pub fn contains_interior(&self, z: &[f64]) -> bool {
        self.normals.iter().all(|n| dot(n, z) >= self.eps_interior)
    }

    /// The smallest halfspace functional value at `z` (positive well inside,
    /// negative outside).
    pub fn margin(&self, z: &[f64]) -> f64 {
        self.normals
            .iter()
            .map(|n| dot(n, z))
            .fold(f64::INFINITY, f64::min)
    }

    /// If the cone is a signed orthant (each normal is `±e_i`, every axis
    /// covered exactly once), returns the sign of each coordinate direction,
    /// so that mapping `z -> (s_i * z_i)` carries the cone onto the
    /// nonnegative orthant.
    pub fn orthant_signs(&self) -> Option<Vec<f64>> {
        if self.normals.len() != self.dim {
            return None;
        }
        let mut signs = vec![0.0f64; self.dim];
        for n in &self.normals {
            let mut axis = None;
            for (i, &v) in n.iter().enumerate() {
                if v.abs() > 1e-12 {
                    if axis.is_some() {
                        return None;
                    }
                    axis = Some((i, v));
                }
            }
            let (i, v) = axis?;
            if (v.abs() - 1.0).abs() > 1e-12 || signs[i] != 0.0 {
                return None;
            }
            signs[i] = v.signum();
        }
        if signs.iter().any(|&s| s == 0.0) {
            return None;
        }
        Some(signs)
    }

    /// The cone `-S` (all normals negated).
    pub fn negated(&self) -> Cone {
        let mut c = self.clone();
        c.name = match self.name.as_str() {
            "R2plus" => "minusR2plus".to_string(),
            "minusR2plus" => "R2plus".to_string(),
            other => format!("neg({other})"),
        };
        for n in &mut c.normals {
            for v in n.iter_mut() {
                *v = -*v;
            }
        }
        for v in c.interior_witness.iter_mut() {
            *v = -*v;
        }
        c
    }
}

/// The relation a saddle certificate asserts between its two operands.
///
/// The subset kinds certify a set inclusion elementwise; on a certificate
/// they are carried by a representative pair and re-evaluate exactly like
/// the corresponding membership kind.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RelationKind {
    /// `z1 ∈ z2 + S`.
    InPlus,
    /// `z1 ∈ z2 - S`.
    InMinus,
    /// `A ⊂ B - S`, witnessed pairwise by `z1 ∈ z2 - S`.
    SubsetMinus,
    /// `A ⊂ B + S`, witnessed pairwise by `z1 ∈ z2 + S`.
    SubsetPlus,
}

impl RelationKind {
    /// Evaluates the relation on one operand pair under the cone's own
    /// tolerance.
    pub fn holds(self, cone: &Cone, z1: &[f64], z2: &[f64]) -> bool {
        let diff: Vec<f64> = match self {
            RelationKind::InPlus | RelationKind::SubsetPlus => {
                z1.iter().zip(z2).map(|(a, b)| a - b).collect()
            }
            RelationKind::InMinus | RelationKind::SubsetMinus => {
                z2.iter().zip(z1).map(|(a, b)| a - b).collect()
            }
        };
        cone.contains(&diff)
    }

    pub fn describe(self) -> &'static str {
        match self {
            RelationKind::InPlus => "z1 in z2 + S",
            RelationKind::InMinus => "z1 in z2 - S",
            RelationKind::SubsetMinus => "A subset of B - S",
            RelationKind::SubsetPlus => "A subset of B + S",
        }
    }
}

/// A relation kind frozen together with the tolerance it was certified
/// under; re-evaluating it on the stored operands must return true.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ConeRelation {
    pub kind: RelationKind,
    pub tolerance: f64,
}

impl ConeRelation {
    pub fn of(kind: RelationKind, cone: &Cone) -> ConeRelation {
        ConeRelation { kind, tolerance: cone.eps_cone }
    }

    /// Re-evaluates the relation under the stored tolerance.
    pub fn holds(&self, cone: &Cone, z1: &[f64], z2: &[f64]) -> bool {
        let mut c = cone.clone();
        c.eps_cone = self.tolerance;
        self.kind.holds(&c, z1, z2)
    }
}

/// Finds a direction strictly inside all halfspaces: first the sum of the
/// normals (which works for every orthant-like cone), then a seeded sphere
/// search as a fallback for oblique normal sets.
fn find_interior_witness(normals: &[Vec<f64>], dim: usize) -> Result<Vec<f64>, ConeError> {
    let mut sum = vec![0.0; dim];
    for n in normals {
        for (s, v) in sum.iter_mut().zip(n) {
            *s += v;
        }
    }
    let len = norm2(&sum);
    if len > 1e-12 {
        let cand: Vec<f64> = sum.iter().map(|v| v / len).collect();
        let margin = normals
            .iter()
            .map(|n| dot(n, &cand))
            .fold(f64::INFINITY, f64::min);
        if margin > 1e-7 {
            return Ok(cand);
        }
    }
    let mut rng = ChaCha8Rng::seed_from_u64(0x9e37_79b9);
    let mut best: Option<(f64, Vec<f64>)> = None;
    for _ in 0..20_000 {
        let v: Vec<f64> = (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect();
        let len = norm2(&v);
        if len < 1e-6 {
            continue;
        }
        let u: Vec<f64> = v.iter().map(|x| x / len).collect();
        let margin = normals
            .iter()
            .map(|n| dot(n, &u))
            .fold(f64::INFINITY, f64::min);
        if best.as_ref().map_or(true, |(m, _)| margin > *m) {
            best = Some((margin, u));
        }
    }
    match best {
        Some((m, u)) if m > 1e-7 => Ok(u),
        _ => Err(ConeError::EmptyInterior),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2plus() -> Cone {
        Cone::r2plus(1e-9, 1e-9)
    }

    #[test]
    fn quadrant_membership() {
        let s = r2plus();
        assert!(s.contains(&[1.0, 2.0]));
        assert!(s.contains(&[0.0, 0.0]));
        assert!(!s.contains(&[-1.0, 2.0]));
        assert!(!s.contains(&[1.0, -1e-6]));
        // Within the closed-membership slack.
        assert!(s.contains(&[-0.5e-9, 1.0]));
    }

    #[test]
    fn interior_excludes_boundary() {
        let s = r2plus();
        assert!(s.contains_interior(&[1.0, 1.0]));
        assert!(!s.contains_interior(&[1.0, 0.0]));
        assert!(!s.contains_interior(&[1.0, 0.5e-9]));
        assert!(s.contains_interior(&[1.0, 2e-9]));
    }

    #[test]
    fn nonpositive_quadrant_mirrors() {
        let s = Cone::minus_r2plus(1e-9, 1e-9);
        assert!(s.contains(&[-1.0, -2.0]));
        assert!(!s.contains(&[1.0, -2.0]));
        assert!(s.contains_interior(&[-1.0, -1.0]));
    }

    #[test]
    fn ray_in_dim_one() {
        let s = Cone::rplus(1e-9, 1e-9);
        assert!(s.contains(&[0.5]));
        assert!(!s.contains(&[-0.5]));
        assert_eq!(s.dim, 1);
    }

    #[test]
    fn relation_kinds_orient_the_difference() {
        let s = Cone::rplus(1e-9, 1e-9);
        let plus = ConeRelation::of(RelationKind::InPlus, &s);
        assert!(plus.holds(&s, &[1.0], &[0.5])); // 1 ∈ 0.5 + S
        assert!(!plus.holds(&s, &[0.25], &[0.5]));
        let minus = ConeRelation::of(RelationKind::SubsetMinus, &s);
        assert!(minus.holds(&s, &[0.25], &[0.5])); // 0.25 ∈ 0.5 - S
        assert!(!minus.holds(&s, &[1.0], &[0.5]));
        // The stored tolerance, not the evaluating cone's, decides borderline pairs.
        let loose = ConeRelation { kind: RelationKind::InPlus, tolerance: 1e-3 };
        assert!(loose.holds(&s, &[0.4995], &[0.5]));
    }

    #[test]
    fn builtin_lookup() {
        for name in Cone::builtin_names() {
            let c = Cone::builtin(name, 1e-9, 1e-9).unwrap();
            assert_eq!(&c.name, name);
            assert!(c.contains_interior(&c.interior_witness.clone()));
        }
        assert!(Cone::builtin("bogus", 1e-9, 1e-9).is_err());
    }

    #[test]
    fn normals_are_normalized() {
        let c = Cone::from_normals("scaled", &[vec![2.0, 0.0], vec![0.0, 3.0]], 1e-9, 1e-9).unwrap();
        for n in &c.normals {
            assert!((super::norm2(n) - 1.0).abs() < 1e-12);
        }
        assert_eq!(c.orthant_signs(), Some(vec![1.0, 1.0]));
    }

    #[test]
    fn halfplane_is_rejected_as_unpointed() {
        let err = Cone::from_normals("half", &[vec![1.0, 0.0]], 1e-9, 1e-9).unwrap_err();
        assert!(matches!(err, ConeError::NotPointed { rank: 1, dim: 2 }));
    }

    #[test]
    fn degenerate_interior_is_rejected() {
        // {z1 >= 0} ∩ {z1 <= 0} ∩ {z2 >= 0} is a ray: pointed but flat.
        let err = Cone::from_normals(
            "flat",
            &[vec![1.0, 0.0], vec![-1.0, 0.0], vec![0.0, 1.0]],
            1e-9,
            1e-9,
        )
        .unwrap_err();
        assert!(matches!(err, ConeError::EmptyInterior));
    }

    #[test]
    fn orthant_detection() {
        assert_eq!(r2plus().orthant_signs(), Some(vec![1.0, 1.0]));
        assert_eq!(
            Cone::minus_r2plus(1e-9, 1e-9).orthant_signs(),
            Some(vec![-1.0, -1.0])
        );
        assert_eq!(Cone::rplus(1e-9, 1e-9).orthant_signs(), Some(vec![1.0]));
        let oblique =
            Cone::from_normals("oblique", &[vec![1.0, 1.0], vec![0.0, 1.0]], 1e-9, 1e-9).unwrap();
        assert_eq!(oblique.orthant_signs(), None);
    }

    #[test]
    fn oblique_cone_witness_is_interior() {
        let oblique =
            Cone::from_normals("oblique", &[vec![1.0, 1.0], vec![-0.2, 1.0]], 1e-9, 1e-9).unwrap();
        assert!(oblique.contains_interior(&oblique.interior_witness.clone()));
    }

    #[test]
    fn negation_flips_membership() {
        let s = r2plus();
        let ns = s.negated();
        assert_eq!(ns.name, "minusR2plus");
        assert!(ns.contains(&[-1.0, -2.0]));
        assert!(!ns.contains(&[1.0, 2.0]));
        assert_eq!(ns.negated().name, "R2plus");
    }

    #[test]
    fn pointedness_along_random_directions() {
        // A pointed cone contains no line: u and -u are never both members
        // (sampled over seeded random unit directions).
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for cone in [r2plus(), Cone::minus_r2plus(1e-9, 1e-9)] {
            for _ in 0..1000 {
                let v: [f64; 2] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
                let len = (v[0] * v[0] + v[1] * v[1]).sqrt();
                if len < 1e-6 {
                    continue;
                }
                let u = [v[0] / len, v[1] / len];
                let nu = [-u[0], -u[1]];
                assert!(!(cone.contains(&u) && cone.contains(&nu)), "line direction {u:?}");
            }
        }
    }
}
