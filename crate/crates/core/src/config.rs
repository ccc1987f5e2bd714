//! Run configuration: numerical tolerances and discretization densities.
//!
//! Every checker in this crate works on finite samples of domains and value
//! sets.  The densities of those samples, the cone-membership tolerances, and
//! the seed used for any randomized subsampling all live in [`Config`] so a
//! run is reproducible from its serialized configuration alone.

use serde::{Deserialize, Serialize};

/// Tolerances and sampling densities shared by all checks.
///
/// Grids over an interval `[a, b]` consist of `grid_resolution + 1` evenly
/// spaced points `a + k*(b-a)/grid_resolution` including both endpoints, so
/// doubling the resolution yields a refinement that contains the coarse grid.
/// Simplex weight grids use `lambda_steps` points per coordinate, i.e. the
/// barycentric lattice with denominator `lambda_steps - 1`; the default of 21
/// puts midpoints such as `1/2` on the grid.
#[derive(Debug, Clone, Serialize, Deserialize, PartialEq)]
#[serde(default)]
pub struct Config {
    /// Slack for closed cone membership: `z` counts as a member of the cone
    /// when every halfspace functional is at least `-eps_cone`.
    pub eps_cone: f64,
    /// Margin for interior cone membership: `z` counts as an interior point
    /// when every halfspace functional is at least `eps_interior`.
    pub eps_interior: f64,
    /// Number of subdivisions of each domain interval (grid has `res + 1` points).
    pub grid_resolution: usize,
    /// Number of sample points drawn from each interval-shaped value set.
    pub value_resolution: usize,
    /// Number of grid points per simplex coordinate (denominator `lambda_steps - 1`).
    pub lambda_steps: usize,
    /// Largest tuple length swept by the n-ary checkers.
    pub n_max: usize,
    /// Number of grid points for auxiliary scalar coefficients (convex
    /// combination weights `t = k/coeff_steps`).
    pub coeff_steps: usize,
    /// Seed for every randomized subsample (triple subsampling, random set
    /// generation in self-tests).
    pub seed: u64,
    /// Cap on the number of length-3 domain tuples swept by the n-ary
    /// checkers.  Full 3-fold grids are cubically large; a seeded subsample
    /// keeps runs fast while remaining reproducible.
    pub tuple_samples_n3: usize,
}

impl Default for Config {
    fn default() -> Self {
        Config {
            eps_cone: 1e-9,
            eps_interior: 1e-9,
            grid_resolution: 50,
            value_resolution: 101,
            lambda_steps: 21,
            n_max: 3,
            coeff_steps: 20,
            seed: 7,
            tuple_samples_n3: 250,
        }
    }
}

impl Config {
    /// Same configuration with a different domain grid resolution.
    pub fn with_resolution(mut self, res: usize) -> Self {
        self.grid_resolution = res;
        self
    }

    /// Same configuration with a different tuple-length cap.
    pub fn with_n_max(mut self, n_max: usize) -> Self {
        self.n_max = n_max;
        self
    }

    /// Evenly spaced points of `[lo, hi]` with `grid_resolution` subdivisions.
    pub fn interval_grid(&self, lo: f64, hi: f64) -> Vec<f64> {
        grid(lo, hi, self.grid_resolution)
    }

    /// Convex combination weights `k / coeff_steps` for `k = 0..=coeff_steps`.
    pub fn coeff_grid(&self) -> Vec<f64> {
        grid(0.0, 1.0, self.coeff_steps)
    }

    /// Pairwise combination weights `λ` for two-point sweeps: the
    /// `lambda_steps`-point grid of `[0, 1]`.
    pub fn lambda_grid(&self) -> Vec<f64> {
        grid(0.0, 1.0, self.lambda_steps.saturating_sub(1))
    }

    /// Barycentric weight grid over `Δ_{n-1}`.  Pairs use the full
    /// `lambda_steps` density; longer tuples use half the steps per
    /// coordinate so the lattice size stays flat across arities.
    pub fn weight_grid(&self, n: usize) -> Vec<Vec<f64>> {
        let segments = if n <= 2 {
            self.lambda_steps.saturating_sub(1)
        } else {
            self.lambda_steps.saturating_sub(1) / 2
        };
        simplex_grid(n, segments.max(1))
    }
}

/// Evenly spaced points `lo + k*(hi-lo)/segments`, endpoints included.
///
/// `segments == 0` degenerates to the single point `lo`.
pub fn grid(lo: f64, hi: f64, segments: usize) -> Vec<f64> {
    if segments == 0 {
        return vec![lo];
    }
    (0..=segments)
        .map(|k| {
            if k == segments {
                hi
            } else {
                lo + (hi - lo) * k as f64 / segments as f64
            }
        })
        .collect()
}

/// The barycentric lattice on `Δ_{n-1}` with denominator `segments`: all
/// nonnegative weight vectors summing to 1 whose entries are multiples of
/// `1/segments`.  Vertices (unit weights) are always included.
pub fn simplex_grid(n: usize, segments: usize) -> Vec<Vec<f64>> {
    fn rec(n: usize, left: usize, segments: usize, prefix: &mut Vec<f64>, out: &mut Vec<Vec<f64>>) {
        if n == 1 {
            prefix.push(left as f64 / segments as f64);
            out.push(prefix.clone());
            prefix.pop();
            return;
        }
        for k in 0..=left {
            prefix.push(k as f64 / segments as f64);
            rec(n - 1, left - k, segments, prefix, out);
            prefix.pop();
        }
    }
    if n == 0 {
        return Vec::new();
    }
    if n == 1 {
        return vec![vec![1.0]];
    }
    let mut out = Vec::new();
    rec(n, segments, segments, &mut Vec::new(), &mut out);
    out
}
