//! Extremal points of finite sets under a cone order, and cone-translate
//! inclusion tests between point clouds.
//!
//! For a finite set `A` and cone `S`:
//!
//! * `z` is *minimal* when the only point of `A` in `z - S` is `z` itself
//!   (up to the cone tolerance);
//! * `z` is *weakly minimal* when no point of `A` lies in `z - int S`;
//! * maximal and weakly maximal points mirror these with `z + S`.
//!
//! The quadratic brute-force scan below is the reference semantics for any
//! cone and dimension.  For signed-orthant cones in dimensions one and two a
//! sweep over groups of equal first coordinate computes the same sets in
//! near-linear time; the sweeps assume distinct coordinates differ by more
//! than the tolerances, which holds for every grid- or lattice-derived cloud
//! this crate produces (and with probability one for random ones).

use serde::{Deserialize, Serialize};

use crate::cone::Cone;
use crate::config::grid;
use crate::value::{dedup_points, Pt};

/// Which extremal set to compute.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ExtrMode {
    Min,
    MinWeak,
    Max,
    MaxWeak,
}

/// Direction of a cone translate in inclusion tests: `B - S` or `B + S`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TranslateSign {
    Minus,
    Plus,
}

fn sub(a: &[f64], b: &[f64]) -> Pt {
    a.iter().zip(b).map(|(x, y)| x - y).collect()
}

fn cheb(a: &[f64], b: &[f64]) -> f64 {
    a.iter()
        .zip(b)
        .map(|(x, y)| (x - y).abs())
        .fold(0.0, f64::max)
}

/// True when `y` removes `z` from the extremal set `mode`.
fn dominates(cone: &Cone, z: &[f64], y: &[f64], mode: ExtrMode) -> bool {
    match mode {
        ExtrMode::Min => cone.contains(&sub(z, y)) && cheb(z, y) > cone.eps_cone,
        ExtrMode::MinWeak => cone.contains_interior(&sub(z, y)),
        ExtrMode::Max => cone.contains(&sub(y, z)) && cheb(z, y) > cone.eps_cone,
        ExtrMode::MaxWeak => cone.contains_interior(&sub(y, z)),
    }
}

/// Reference implementation: quadratic scan, any cone, any dimension.
#[doc(hidden)]
pub fn extremal_points_brute(points: &[Pt], cone: &Cone, mode: ExtrMode) -> Vec<Pt> {
    points
        .iter()
        .filter(|z| !points.iter().any(|y| dominates(cone, z, y, mode)))
        .cloned()
        .collect()
}

/// Extremal points of a finite cloud under the cone order.
pub fn extremal_points(points: &[Pt], cone: &Cone, mode: ExtrMode) -> Vec<Pt> {
    if points.is_empty() {
        return Vec::new();
    }
    if let Some(signs) = cone.orthant_signs() {
        match cone.dim {
            1 => return extremal_1d(points, &signs, cone, mode),
            2 => return extremal_2d(points, &signs, cone, mode),
            _ => {}
        }
    }
    extremal_points_brute(points, cone, mode)
}

/// Orthant fast path in dimension one: everything reduces to the minimum or
/// maximum of the sign-mapped coordinates.
fn extremal_1d(points: &[Pt], signs: &[f64], cone: &Cone, mode: ExtrMode) -> Vec<Pt> {
    let mapped: Vec<f64> = points.iter().map(|p| signs[0] * p[0]).collect();
    let lo = mapped.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = mapped.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let keep = |t: f64| match mode {
        ExtrMode::Min => t <= lo + cone.eps_cone,
        ExtrMode::MinWeak => t - lo < cone.eps_interior,
        ExtrMode::Max => t >= hi - cone.eps_cone,
        ExtrMode::MaxWeak => hi - t < cone.eps_interior,
    };
    points
        .iter()
        .zip(&mapped)
        .filter(|(_, &t)| keep(t))
        .map(|(p, _)| p.clone())
        .collect()
}

/// Orthant fast path in dimension two: sort sign-mapped points into groups
/// of equal first coordinate and decide domination from running second-
/// coordinate minima (maxima for the max modes, via reflection).
fn extremal_2d(points: &[Pt], signs: &[f64], cone: &Cone, mode: ExtrMode) -> Vec<Pt> {
    // Reduce Max/MaxWeak to Min/MinWeak on the reflected cloud.
    let flip = matches!(mode, ExtrMode::Max | ExtrMode::MaxWeak);
    let min_mode = match mode {
        ExtrMode::Min | ExtrMode::Max => ExtrMode::Min,
        ExtrMode::MinWeak | ExtrMode::MaxWeak => ExtrMode::MinWeak,
    };
    let sgn = if flip { -1.0 } else { 1.0 };
    let mapped: Vec<[f64; 2]> = points
        .iter()
        .map(|p| [sgn * signs[0] * p[0], sgn * signs[1] * p[1]])
        .collect();

    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| {
        mapped[a]
            .partial_cmp(&mapped[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });

    // Group boundaries over equal first coordinates.
    let mut keep = vec![false; points.len()];
    let mut prefix_min2 = f64::INFINITY; // min second coordinate of earlier groups
    let mut g_start = 0;
    while g_start < order.len() {
        let x = mapped[order[g_start]][0];
        let mut g_end = g_start;
        let mut group_min2 = f64::INFINITY;
        while g_end < order.len() && mapped[order[g_end]][0] == x {
            group_min2 = group_min2.min(mapped[order[g_end]][1]);
            g_end += 1;
        }
        for &i in &order[g_start..g_end] {
            let b = mapped[i][1];
            let dominated = match min_mode {
                ExtrMode::Min => {
                    prefix_min2 <= b + cone.eps_cone || group_min2 < b - cone.eps_cone
                }
                ExtrMode::MinWeak => prefix_min2 <= b - cone.eps_interior,
                _ => unreachable!(),
            };
            keep[i] = !dominated;
        }
        prefix_min2 = prefix_min2.min(group_min2);
        g_start = g_end;
    }
    points
        .iter()
        .enumerate()
        .filter(|(i, _)| keep[*i])
        .map(|(_, p)| p.clone())
        .collect()
}

/// Pareto-maximal staircase of a planar cloud mapped to the nonnegative
/// quadrant: supports `O(log n)` "is there a point componentwise above `a`"
/// queries for the inclusion tests.
pub struct MaxFront {
    /// Frontier points, first coordinate strictly ascending, second strictly
    /// descending.
    pts: Vec<[f64; 2]>,
}

impl MaxFront {
    pub fn build(mapped: &[[f64; 2]]) -> MaxFront {
        let mut sorted: Vec<[f64; 2]> = mapped.to_vec();
        sorted.sort_by(|a, b| a.partial_cmp(b).unwrap_or(std::cmp::Ordering::Equal));
        let mut pts: Vec<[f64; 2]> = Vec::new();
        for p in sorted.into_iter().rev() {
            match pts.last() {
                Some(last) if last[0] == p[0] => continue, // same x: larger y kept first
                Some(last) if p[1] <= last[1] => continue, // dominated
                _ => pts.push(p),
            }
        }
        pts.reverse();
        MaxFront { pts }
    }

    /// Is there a frontier point `p` with `p_j >= a_j + req` in both
    /// coordinates?  Use `req = -eps` for closed domination and
    /// `req = +eps_interior` for strict (interior) domination.
    pub fn dominates(&self, a: [f64; 2], req: f64) -> bool {
        let tx = a[0] + req;
        // First frontier index with x >= tx; y is maximal there.
        let idx = self.pts.partition_point(|p| p[0] < tx);
        idx < self.pts.len() && self.pts[idx][1] >= a[1] + req
    }

    pub fn points(&self) -> &[[f64; 2]] {
        &self.pts
    }
}

/// Outcome of a cone-translate inclusion test `A ⊆ B ± S`.
#[derive(Debug, Clone, PartialEq)]
pub struct SubsetOutcome {
    pub holds: bool,
    /// An offending point of `A` when the inclusion fails.
    pub witness: Option<Pt>,
}

/// Tests `A ⊆ B - S` (sign `Minus`) or `A ⊆ B + S` (sign `Plus`) over point
/// clouds: every `a` must be matched by some `b` with `b - a` (resp.
/// `a - b`) in the cone.  With `interior` set, the difference must lie in
/// the cone's interior instead.
pub fn subset_of_translate(
    a: &[Pt],
    b: &[Pt],
    cone: &Cone,
    sign: TranslateSign,
    interior: bool,
) -> SubsetOutcome {
    if b.is_empty() {
        return SubsetOutcome { holds: a.is_empty(), witness: a.first().cloned() };
    }
    if let Some(signs) = cone.orthant_signs() {
        let req = if interior { cone.eps_interior } else { -cone.eps_cone };
        // Map so that the test becomes "each mapped a is dominated by some
        // mapped b": for `Plus` the roles of above/below swap, which is the
        // same as negating the mapped coordinates.
        let dir = match sign {
            TranslateSign::Minus => 1.0,
            TranslateSign::Plus => -1.0,
        };
        match cone.dim {
            1 => {
                let hi = b
                    .iter()
                    .map(|p| dir * signs[0] * p[0])
                    .fold(f64::NEG_INFINITY, f64::max);
                for p in a {
                    if hi < dir * signs[0] * p[0] + req {
                        return SubsetOutcome { holds: false, witness: Some(p.clone()) };
                    }
                }
                return SubsetOutcome { holds: true, witness: None };
            }
            2 => {
                let mapped: Vec<[f64; 2]> = b
                    .iter()
                    .map(|p| [dir * signs[0] * p[0], dir * signs[1] * p[1]])
                    .collect();
                let front = MaxFront::build(&mapped);
                for p in a {
                    let q = [dir * signs[0] * p[0], dir * signs[1] * p[1]];
                    if !front.dominates(q, req) {
                        return SubsetOutcome { holds: false, witness: Some(p.clone()) };
                    }
                }
                return SubsetOutcome { holds: true, witness: None };
            }
            _ => {}
        }
    }
    for p in a {
        let matched = b.iter().any(|q| {
            let d = match sign {
                TranslateSign::Minus => sub(q, p),
                TranslateSign::Plus => sub(p, q),
            };
            if interior {
                cone.contains_interior(&d)
            } else {
                cone.contains(&d)
            }
        });
        if !matched {
            return SubsetOutcome { holds: false, witness: Some(p.clone()) };
        }
    }
    SubsetOutcome { holds: true, witness: None }
}

/// Pairwise convex combinations `t·a + (1-t)·b` of two clouds over the
/// coefficient grid `t = k/steps`, deduplicated.
pub fn convex_combination_samples(a: &[Pt], b: &[Pt], steps: usize, eps: f64) -> Vec<Pt> {
    let ts = grid(0.0, 1.0, steps);
    let mut out = Vec::with_capacity(a.len() * b.len() * ts.len());
    for p in a {
        for r in b {
            for &t in &ts {
                out.push(
                    p.iter()
                        .zip(r)
                        .map(|(x, y)| t * x + (1.0 - t) * y)
                        .collect(),
                );
            }
        }
    }
    dedup_points(&mut out, eps);
    out
}

/// Which parts of the finite covering lemma hold for a cloud: nonemptiness
/// of the four extremal sets, the coverings `A ⊆ Min A + S`,
/// `A ⊆ Min_w A + (int S ∪ {0})` and their max-side mirrors, plus the
/// inclusions of strict extremal sets in weak ones.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
pub struct Lemma21Report {
    pub min_nonempty: bool,
    pub max_nonempty: bool,
    pub covers_min: bool,
    pub covers_max: bool,
    pub covers_min_weak: bool,
    pub covers_max_weak: bool,
    pub min_subset_min_weak: bool,
    pub max_subset_max_weak: bool,
}

impl Lemma21Report {
    pub fn all_hold(&self) -> bool {
        self.min_nonempty
            && self.max_nonempty
            && self.covers_min
            && self.covers_max
            && self.covers_min_weak
            && self.covers_max_weak
            && self.min_subset_min_weak
            && self.max_subset_max_weak
    }
}

/// Checks the finite covering lemma on a nonempty cloud.
pub fn check_lemma21(points: &[Pt], cone: &Cone) -> Lemma21Report {
    let eps = cone.eps_cone;
    let min_set = extremal_points(points, cone, ExtrMode::Min);
    let max_set = extremal_points(points, cone, ExtrMode::Max);
    let min_weak = extremal_points(points, cone, ExtrMode::MinWeak);
    let max_weak = extremal_points(points, cone, ExtrMode::MaxWeak);

    let covers_min = points
        .iter()
        .all(|a| min_set.iter().any(|m| cone.contains(&sub(a, m))));
    let covers_max = points
        .iter()
        .all(|a| max_set.iter().any(|m| cone.contains(&sub(m, a))));
    // `int S ∪ {0}`: either a strict-interior difference or coincidence.
    let covers_min_weak = points.iter().all(|a| {
        min_weak
            .iter()
            .any(|m| cone.contains_interior(&sub(a, m)) || cheb(a, m) <= eps)
    });
    let covers_max_weak = points.iter().all(|a| {
        max_weak
            .iter()
            .any(|m| cone.contains_interior(&sub(m, a)) || cheb(a, m) <= eps)
    });
    let min_subset_min_weak = min_set
        .iter()
        .all(|z| !points.iter().any(|y| dominates(cone, z, y, ExtrMode::MinWeak)));
    let max_subset_max_weak = max_set
        .iter()
        .all(|z| !points.iter().any(|y| dominates(cone, z, y, ExtrMode::MaxWeak)));

    Lemma21Report {
        min_nonempty: !min_set.is_empty(),
        max_nonempty: !max_set.is_empty(),
        covers_min,
        covers_max,
        covers_min_weak,
        covers_max_weak,
        min_subset_min_weak,
        max_subset_max_weak,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn r2 () -> Cone {
        Cone::r2plus(1e-9, 1e-9)
    }

    fn cloud(pts: &[[f64; 2]]) -> Vec<Pt> {
        pts.iter().map(|p| p.to_vec()).collect()
    }

    fn sorted(mut pts: Vec<Pt>) -> Vec<Pt> {
        pts.sort_by(|a, b| a.partial_cmp(b).unwrap());
        pts
    }

    // Four points in the plane; the diagonal pair is incomparable with the
    // axis points under the componentwise order.
    fn square_sample() -> Vec<Pt> {
        cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])
    }

    #[test]
    fn planar_max_keeps_the_antichain() {
        let max = sorted(extremal_points(&square_sample(), &r2(), ExtrMode::Max));
        assert_eq!(max, sorted(cloud(&[[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])));
    }

    #[test]
    fn planar_min_is_origin() {
        let min = extremal_points(&square_sample(), &r2(), ExtrMode::Min);
        assert_eq!(min, cloud(&[[0.0, 0.0]]));
    }

    #[test]
    fn planar_weak_sets() {
        let a = square_sample();
        let min_w = sorted(extremal_points(&a, &r2(), ExtrMode::MinWeak));
        // (1,0) and (0,1) have no strict dominator below, so they stay.
        assert_eq!(min_w, sorted(cloud(&[[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])));
        let max_w = sorted(extremal_points(&a, &r2(), ExtrMode::MaxWeak));
        assert_eq!(max_w, sorted(cloud(&[[1.0, 0.0], [0.0, 1.0], [0.5, 0.5]])));
    }

    #[test]
    fn one_dimensional_extremes() {
        let cone = Cone::rplus(1e-9, 1e-9);
        let a = vec![vec![0.0], vec![0.3], vec![1.0]];
        assert_eq!(extremal_points(&a, &cone, ExtrMode::Min), vec![vec![0.0]]);
        assert_eq!(extremal_points(&a, &cone, ExtrMode::Max), vec![vec![1.0]]);
        assert_eq!(extremal_points(&a, &cone, ExtrMode::MinWeak), vec![vec![0.0]]);
        assert_eq!(extremal_points(&a, &cone, ExtrMode::MaxWeak), vec![vec![1.0]]);
    }

    #[test]
    fn negated_cone_swaps_min_and_max() {
        let a = square_sample();
        let neg = Cone::minus_r2plus(1e-9, 1e-9);
        assert_eq!(
            sorted(extremal_points(&a, &neg, ExtrMode::Min)),
            sorted(extremal_points(&a, &r2(), ExtrMode::Max))
        );
        assert_eq!(
            sorted(extremal_points(&a, &neg, ExtrMode::MaxWeak)),
            sorted(extremal_points(&a, &r2(), ExtrMode::MinWeak))
        );
    }

    #[test]
    fn fast_path_matches_brute_force() {
        // A lattice cloud with ties in both coordinates.
        let a = cloud(&[
            [0.0, 0.0], [0.0, 0.5], [0.25, 0.25], [0.5, 0.0], [0.5, 0.5],
            [0.75, 0.125], [1.0, 0.0], [0.125, 0.875], [0.25, 0.25],
        ]);
        for cone in [r2(), Cone::minus_r2plus(1e-9, 1e-9)] {
            for mode in [ExtrMode::Min, ExtrMode::MinWeak, ExtrMode::Max, ExtrMode::MaxWeak] {
                assert_eq!(
                    sorted(extremal_points(&a, &cone, mode)),
                    sorted(extremal_points_brute(&a, &cone, mode)),
                    "mode {mode:?} cone {}",
                    cone.name
                );
            }
        }
    }

    #[test]
    fn covering_lemma_on_the_square_sample() {
        let rep = check_lemma21(&square_sample(), &r2());
        assert!(rep.all_hold(), "{rep:?}");
    }

    #[test]
    fn covering_lemma_single_point() {
        let rep = check_lemma21(&[vec![0.3, -0.7]], &r2());
        assert!(rep.all_hold());
    }

    #[test]
    fn subset_translate_minus_basic() {
        let cone = r2();
        let a = cloud(&[[0.0, 0.0]]);
        let b = cloud(&[[1.0, 1.0]]);
        assert!(subset_of_translate(&a, &b, &cone, TranslateSign::Minus, false).holds);
        let back = subset_of_translate(&a, &b, &cone, TranslateSign::Plus, false);
        assert!(!back.holds);
        assert_eq!(back.witness, Some(vec![0.0, 0.0]));
    }

    #[test]
    fn subset_translate_interval_clouds() {
        let cone = Cone::rplus(1e-9, 1e-9);
        let a: Vec<Pt> = (0..=20).map(|k| vec![k as f64 / 10.0]).collect(); // [0,2]
        let b: Vec<Pt> = (0..=10).map(|k| vec![k as f64 / 10.0]).collect(); // [0,1]
        assert!(subset_of_translate(&b, &a, &cone, TranslateSign::Minus, false).holds);
        let fail = subset_of_translate(&a, &b, &cone, TranslateSign::Minus, false);
        assert!(!fail.holds);
        assert_eq!(fail.witness, Some(vec![1.1]));
        // Plus direction: [0,2] ⊆ [0,1] + [0,∞) holds, reverse fails at 0.
        assert!(subset_of_translate(&a, &b, &cone, TranslateSign::Plus, false).holds);
    }

    #[test]
    fn subset_translate_interior_needs_margin() {
        let cone = Cone::rplus(1e-9, 1e-9);
        let a = vec![vec![1.0]];
        let same = vec![vec![1.0]];
        let above = vec![vec![1.5]];
        assert!(subset_of_translate(&a, &same, &cone, TranslateSign::Minus, false).holds);
        assert!(!subset_of_translate(&a, &same, &cone, TranslateSign::Minus, true).holds);
        assert!(subset_of_translate(&a, &above, &cone, TranslateSign::Minus, true).holds);
    }

    #[test]
    fn subset_translate_generic_matches_fast() {
        let cone = r2();
        let a = cloud(&[[0.25, 0.75], [0.2, 0.2]]);
        let b = cloud(&[[0.25, 1.0], [1.0, 0.25]]);
        let fast = subset_of_translate(&a, &b, &cone, TranslateSign::Minus, false);
        // Generic path, via an equivalent oblique description of the quadrant.
        let oblique = Cone::from_normals(
            "quadrant_oblique",
            &[vec![1.0, 0.0], vec![0.0, 1.0], vec![1.0, 1.0]],
            1e-9,
            1e-9,
        )
        .unwrap();
        let slow = subset_of_translate(&a, &b, &oblique, TranslateSign::Minus, false);
        assert_eq!(fast.holds, slow.holds);
        assert!(fast.holds);
        let c = cloud(&[[0.6, 0.6]]);
        assert!(!subset_of_translate(&c, &b, &cone, TranslateSign::Minus, false).holds);
    }

    #[test]
    fn max_front_queries() {
        let front = MaxFront::build(&[[0.0, 1.0], [0.5, 0.5], [1.0, 0.0], [0.2, 0.2]]);
        assert_eq!(front.points().len(), 3);
        assert!(front.dominates([0.4, 0.5], -1e-9));
        assert!(!front.dominates([0.6, 0.5], -1e-9));
        assert!(front.dominates([0.9, -0.5], -1e-9));
        assert!(!front.dominates([1.0, 0.0], 1e-9)); // strict domination fails on itself
    }

    #[test]
    fn combination_samples_cover_the_segment() {
        let a = vec![vec![0.0]];
        let b = vec![vec![1.0]];
        let pts = convex_combination_samples(&a, &b, 20, 1e-9);
        assert_eq!(pts.len(), 21);
        assert!(pts.iter().any(|p| p[0] == 0.5));
        assert_eq!(pts.first().unwrap()[0], 0.0);
        assert_eq!(pts.last().unwrap()[0], 1.0);
    }
}
