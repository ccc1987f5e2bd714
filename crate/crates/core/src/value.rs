//! Value sets of set-valued maps: exact descriptors plus finite samples.
//!
//! Every value a fixture can take is described exactly by a [`SetDesc`]
//! (point, interval, disc sector, or a finite union of those).  Checkers
//! work on two representations at once:
//!
//! * the *descriptor*, which answers exact membership queries for arbitrary
//!   points — this is what makes intersections between values sampled at
//!   different parameters meaningful; and
//! * the *point cloud*, a deterministic finite sample used for extremal
//!   computations and cone-translate inclusion tests.
//!
//! Disc sectors are sampled on a polar grid whose angular nodes sit at cell
//! midpoints.  That keeps the sample mirror-symmetric and — importantly —
//! keeps axis-aligned boundary rays out of the cloud, so weakly-extremal
//! sets of sampled discs collapse to the correct corner points instead of
//! picking up whole boundary segments.

use serde::{Deserialize, Serialize};

use crate::config::{grid, Config};

pub type Pt = Vec<f64>;

/// Which sector of a disc a descriptor covers.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Hash)]
#[serde(rename_all = "snake_case")]
pub enum DiscPart {
    /// The full disc.
    Full,
    /// The closed right half (`u >= 0` relative to the center).
    Right,
    /// The closed left half (`u <= 0` relative to the center).
    Left,
    /// The closed quarter with both offsets nonnegative.
    QuarterPp,
    /// The closed quarter with both offsets nonpositive.
    QuarterMm,
}

impl DiscPart {
    fn angular_span(self) -> (f64, f64) {
        use std::f64::consts::PI;
        match self {
            DiscPart::Full => (0.0, 2.0 * PI),
            DiscPart::Right => (-0.5 * PI, 0.5 * PI),
            DiscPart::Left => (0.5 * PI, 1.5 * PI),
            DiscPart::QuarterPp => (0.0, 0.5 * PI),
            DiscPart::QuarterMm => (PI, 1.5 * PI),
        }
    }

    fn negated(self) -> DiscPart {
        match self {
            DiscPart::Full => DiscPart::Full,
            DiscPart::Right => DiscPart::Left,
            DiscPart::Left => DiscPart::Right,
            DiscPart::QuarterPp => DiscPart::QuarterMm,
            DiscPart::QuarterMm => DiscPart::QuarterPp,
        }
    }

    fn offset_ok(self, du: f64, dv: f64, eps: f64) -> bool {
        match self {
            DiscPart::Full => true,
            DiscPart::Right => du >= -eps,
            DiscPart::Left => du <= eps,
            DiscPart::QuarterPp => du >= -eps && dv >= -eps,
            DiscPart::QuarterMm => du <= eps && dv <= eps,
        }
    }
}

/// Exact description of a value set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "shape", rename_all = "snake_case")]
pub enum SetDesc {
    /// A single point (any dimension).
    Point { at: Pt },
    /// A one-dimensional interval, possibly open at either end.
    Interval {
        lo: f64,
        hi: f64,
        #[serde(default)]
        open_lo: bool,
        #[serde(default)]
        open_hi: bool,
    },
    /// A sector of a planar disc.
    Disc {
        center: [f64; 2],
        radius: f64,
        part: DiscPart,
    },
    /// A finite union of descriptors of equal dimension.
    Union { parts: Vec<SetDesc> },
}

/// Number of angular cells used when sampling a full disc; sectors scale
/// proportionally so the node spacing stays comparable.
const DISC_ANGULAR_CELLS: usize = 32;
/// Number of radial subdivisions (`radius * k / DISC_RADIAL_SEGMENTS`).
const DISC_RADIAL_SEGMENTS: usize = 15;

impl SetDesc {
    pub fn point(at: Pt) -> SetDesc {
        SetDesc::Point { at }
    }

    pub fn interval(lo: f64, hi: f64) -> SetDesc {
        SetDesc::Interval { lo, hi, open_lo: false, open_hi: false }
    }

    pub fn interval_open_lo(lo: f64, hi: f64) -> SetDesc {
        SetDesc::Interval { lo, hi, open_lo: true, open_hi: false }
    }

    pub fn disc(center: [f64; 2], radius: f64, part: DiscPart) -> SetDesc {
        SetDesc::Disc { center, radius, part }
    }

    /// Ambient dimension of the set.
    pub fn dim(&self) -> usize {
        match self {
            SetDesc::Point { at } => at.len(),
            SetDesc::Interval { .. } => 1,
            SetDesc::Disc { .. } => 2,
            SetDesc::Union { parts } => parts.first().map_or(0, |p| p.dim()),
        }
    }

    /// Exact membership with tolerance `eps`; open interval endpoints are
    /// excluded with the same margin.
    pub fn contains(&self, p: &[f64], eps: f64) -> bool {
        match self {
            SetDesc::Point { at } => {
                at.len() == p.len()
                    && at.iter().zip(p).all(|(a, b)| (a - b).abs() <= eps)
            }
            SetDesc::Interval { lo, hi, open_lo, open_hi } => {
                if p.len() != 1 {
                    return false;
                }
                let t = p[0];
                let lo_ok = if *open_lo { t > lo + eps } else { t >= lo - eps };
                let hi_ok = if *open_hi { t < hi - eps } else { t <= hi + eps };
                lo_ok && hi_ok
            }
            SetDesc::Disc { center, radius, part } => {
                if p.len() != 2 {
                    return false;
                }
                let du = p[0] - center[0];
                let dv = p[1] - center[1];
                (du * du + dv * dv).sqrt() <= radius + eps && part.offset_ok(du, dv, eps)
            }
            SetDesc::Union { parts } => parts.iter().any(|d| d.contains(p, eps)),
        }
    }

    /// The reflected set `-A`.
    pub fn negated(&self) -> SetDesc {
        match self {
            SetDesc::Point { at } => SetDesc::Point { at: at.iter().map(|v| -v).collect() },
            SetDesc::Interval { lo, hi, open_lo, open_hi } => SetDesc::Interval {
                lo: -hi,
                hi: -lo,
                open_lo: *open_hi,
                open_hi: *open_lo,
            },
            SetDesc::Disc { center, radius, part } => SetDesc::Disc {
                center: [-center[0], -center[1]],
                radius: *radius,
                part: part.negated(),
            },
            SetDesc::Union { parts } => SetDesc::Union {
                parts: parts.iter().map(|d| d.negated()).collect(),
            },
        }
    }

    /// Deterministic finite sample of the set.
    pub fn sample(&self, cfg: &Config) -> Vec<Pt> {
        let mut out = Vec::new();
        self.sample_into(cfg, &mut out);
        dedup_points(&mut out, cfg.eps_cone);
        out
    }

    fn sample_into(&self, cfg: &Config, out: &mut Vec<Pt>) {
        match self {
            SetDesc::Point { at } => out.push(at.clone()),
            SetDesc::Interval { lo, hi, open_lo, open_hi } => {
                if (hi - lo).abs() <= 0.0 {
                    if !open_lo && !open_hi {
                        out.push(vec![*lo]);
                    }
                    return;
                }
                let segments = cfg.value_resolution.max(2) - 1;
                for (k, t) in grid(*lo, *hi, segments).into_iter().enumerate() {
                    if (*open_lo && k == 0) || (*open_hi && k == segments) {
                        continue;
                    }
                    out.push(vec![t]);
                }
            }
            SetDesc::Disc { center, radius, part } => {
                if *radius <= 0.0 {
                    out.push(vec![center[0], center[1]]);
                    return;
                }
                let (start, end) = part.angular_span();
                let span = end - start;
                let cells = (DISC_ANGULAR_CELLS as f64 * span / (2.0 * std::f64::consts::PI))
                    .round()
                    .max(1.0) as usize;
                out.push(vec![center[0], center[1]]);
                for j in 0..cells {
                    let theta = start + (j as f64 + 0.5) * span / cells as f64;
                    let (sin, cos) = theta.sin_cos();
                    for k in 1..=DISC_RADIAL_SEGMENTS {
                        let r = radius * k as f64 / DISC_RADIAL_SEGMENTS as f64;
                        out.push(vec![center[0] + r * cos, center[1] + r * sin]);
                    }
                }
            }
            SetDesc::Union { parts } => {
                for d in parts {
                    d.sample_into(cfg, out);
                }
            }
        }
    }

    /// Stable identity for caching: the descriptor with every parameter
    /// quantized to a nanoscale lattice.  Values reconstructed through
    /// different float expressions of the same quantity share a key.
    pub fn key(&self) -> DescKey {
        match self {
            SetDesc::Point { at } => DescKey::Point(at.iter().map(|&v| q(v)).collect()),
            SetDesc::Interval { lo, hi, open_lo, open_hi } => {
                DescKey::Interval(q(*lo), q(*hi), *open_lo, *open_hi)
            }
            SetDesc::Disc { center, radius, part } => {
                DescKey::Disc(q(center[0]), q(center[1]), q(*radius), *part)
            }
            SetDesc::Union { parts } => {
                let mut keys: Vec<DescKey> = parts.iter().map(|d| d.key()).collect();
                keys.sort();
                keys.dedup();
                if keys.len() == 1 {
                    keys.pop().unwrap()
                } else {
                    DescKey::Union(keys)
                }
            }
        }
    }
}

/// Quantized descriptor identity (see [`SetDesc::key`]).
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum DescKey {
    Point(Vec<i64>),
    Interval(i64, i64, bool, bool),
    Disc(i64, i64, i64, DiscPart),
    Union(Vec<DescKey>),
}

impl PartialOrd for DiscPart {
    fn partial_cmp(&self, other: &Self) -> Option<std::cmp::Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for DiscPart {
    fn cmp(&self, other: &Self) -> std::cmp::Ordering {
        (*self as u8).cmp(&(*other as u8))
    }
}

/// Quantizes a coordinate to the key lattice (1e-9 cells).
pub fn q(v: f64) -> i64 {
    (v * 1e9).round() as i64
}

/// Sorts a cloud lexicographically and removes points that coincide within
/// `eps` (checked against the previously kept point).
pub fn dedup_points(pts: &mut Vec<Pt>, eps: f64) {
    pts.sort_by(|a, b| {
        a.iter()
            .zip(b)
            .find_map(|(x, y)| x.partial_cmp(y).filter(|o| o.is_ne()))
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut kept: Vec<Pt> = Vec::with_capacity(pts.len());
    for p in pts.drain(..) {
        if kept
            .last()
            .is_some_and(|k: &Pt| k.iter().zip(&p).all(|(a, b)| (a - b).abs() <= eps))
        {
            continue;
        }
        kept.push(p);
    }
    *pts = kept;
}

/// True when two clouds share a point up to `eps` (minimum pairwise
/// Chebyshev distance at most `eps`).
pub fn clouds_meet(a: &[Pt], b: &[Pt], eps: f64) -> bool {
    a.iter().any(|p| {
        b.iter()
            .any(|r| p.iter().zip(r).all(|(x, y)| (x - y).abs() <= eps))
    })
}
