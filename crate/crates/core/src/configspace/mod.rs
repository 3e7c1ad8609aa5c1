//! Planar point configurations and sampled isotopies.
//!
//! A [`Config`] is a finite labeled set of distinct points with exact rational
//! coordinates. A [`Trajectory`] samples an isotopy of such a set at increasing
//! times in `[0, 1]`; between samples each point moves along a straight segment.

mod generate;
mod io;

use std::cmp::Ordering;
use std::fmt;

use num_traits::{Signed, Zero};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::rational::{fmt_q, q_from_f64, q_to_f64, Q};

pub use generate::{gen_braid, gen_cascade, gen_rigid, RigidMotion, DEFAULT_STEPS_PER_ORBIT};
pub use io::{
    load_trajectory, save_trajectory, trajectory_from_json, trajectory_to_csv, trajectory_to_json,
    TrajectoryFormat,
};

/// Distinctness tolerance for configurations built from double-precision input.
pub const F64_DISTINCT_TOL: f64 = 1e-9;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("configuration is empty")]
    Empty,
    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("orbit of point {mover} about point {center} meets point {other}")]
    OrbitCollision {
        mover: usize,
        center: usize,
        other: usize,
    },
    #[error("parse error: {0}")]
    Parse(String),
    #[error("schema error: {0}")]
    Schema(String),
    #[error("invariant violation: {0}")]
    InvariantViolation(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct Point {
    pub x: Q,
    pub y: Q,
}

impl Point {
    pub fn new(x: Q, y: Q) -> Self {
        Self { x, y }
    }

    pub fn from_f64(x: f64, y: f64) -> Option<Self> {
        Some(Self::new(q_from_f64(x)?, q_from_f64(y)?))
    }

    pub fn dist_sq(&self, other: &Point) -> Q {
        let dx = &self.x - &other.x;
        let dy = &self.y - &other.y;
        &dx * &dx + &dy * &dy
    }

    pub fn to_f64(&self) -> [f64; 2] {
        [q_to_f64(&self.x), q_to_f64(&self.y)]
    }

    /// Point on the segment `self -> other` at parameter `s`.
    pub fn lerp(&self, other: &Point, s: &Q) -> Point {
        Point::new(
            &self.x + (&other.x - &self.x) * s,
            &self.y + (&other.y - &self.y) * s,
        )
    }

    /// Chart order: by x, ties broken by smaller y first.
    pub fn chart_cmp(&self, other: &Point) -> Ordering {
        self.x.cmp(&other.x).then_with(|| self.y.cmp(&other.y))
    }
}

impl fmt::Display for Point {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "({}, {})", fmt_q(&self.x), fmt_q(&self.y))
    }
}

/// A labeled finite set of distinct planar points. Point `i` carries label `i + 1`.
#[derive(Debug, Clone)]
pub struct Config {
    points: Vec<Point>,
    approx: Vec<[f64; 2]>,
    min_sep_sq: Option<Q>,
}

impl PartialEq for Config {
    fn eq(&self, other: &Self) -> bool {
        self.points == other.points
    }
}

impl Eq for Config {}

impl Config {
    /// Validates a point sequence; labels are assigned in input order.
    pub fn new(points: Vec<Point>) -> Result<Self, ConfigError> {
        if points.is_empty() {
            return Err(ConfigError::Empty);
        }
        let mut min_sep_sq: Option<Q> = None;
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let d = points[i].dist_sq(&points[j]);
                if d.is_zero() {
                    return Err(ConfigError::DuplicatePoint(i + 1, j + 1));
                }
                if min_sep_sq.as_ref().is_none_or(|m| d < *m) {
                    min_sep_sq = Some(d);
                }
            }
        }
        let approx = points.iter().map(Point::to_f64).collect();
        Ok(Self {
            points,
            approx,
            min_sep_sq,
        })
    }

    /// Builds a configuration from doubles. Points closer than [`F64_DISTINCT_TOL`]
    /// count as duplicates.
    pub fn from_f64(points: &[(f64, f64)]) -> Result<Self, ConfigError> {
        let mut pts = Vec::with_capacity(points.len());
        for (i, &(x, y)) in points.iter().enumerate() {
            pts.push(Point::from_f64(x, y).ok_or_else(|| {
                ConfigError::InvalidParameter(format!("point {} is not finite", i + 1))
            })?);
        }
        for i in 0..points.len() {
            for j in i + 1..points.len() {
                let (a, b) = (points[i], points[j]);
                if (a.0 - b.0).hypot(a.1 - b.1) < F64_DISTINCT_TOL {
                    return Err(ConfigError::DuplicatePoint(i + 1, j + 1));
                }
            }
        }
        Self::new(pts)
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn point(&self, i: usize) -> &Point {
        &self.points[i]
    }

    pub fn approx(&self) -> &[[f64; 2]] {
        &self.approx
    }

    pub fn labels(&self) -> impl Iterator<Item = usize> {
        1..=self.points.len()
    }

    /// Minimum pairwise distance; infinite for a single point.
    pub fn min_sep(&self) -> f64 {
        self.min_sep_sq
            .as_ref()
            .map_or(f64::INFINITY, |d| q_to_f64(d).sqrt())
    }

    pub fn min_sep_sq(&self) -> Option<&Q> {
        self.min_sep_sq.as_ref()
    }

    /// Indices of the points sorted by the chart order (x, then y).
    pub fn chart_order(&self) -> Vec<usize> {
        let mut idx: Vec<usize> = (0..self.points.len()).collect();
        idx.sort_by(|&a, &b| self.points[a].chart_cmp(&self.points[b]));
        idx
    }

    pub fn has_distinct_x(&self) -> bool {
        let order = self.chart_order();
        order
            .windows(2)
            .all(|w| self.points[w[0]].x != self.points[w[1]].x)
    }

    /// x-coordinates in increasing order, or `None` when two coincide.
    pub fn sorted_x(&self) -> Option<Vec<Q>> {
        let xs: Vec<Q> = self
            .chart_order()
            .into_iter()
            .map(|i| self.points[i].x.clone())
            .collect();
        xs.windows(2).all(|w| w[0] != w[1]).then_some(xs)
    }

    pub fn centroid(&self) -> Point {
        let n = Q::from_integer(self.points.len().into());
        let (sx, sy) = self
            .points
            .iter()
            .fold((Q::zero(), Q::zero()), |(sx, sy), p| (sx + &p.x, sy + &p.y));
        Point::new(sx / &n, sy / n)
    }

    pub fn map_points(&self, f: impl Fn(&Point) -> Point) -> Result<Self, ConfigError> {
        Self::new(self.points.iter().map(f).collect())
    }
}

/// Symmetric Hausdorff distance between the two point sets.
pub fn hausdorff_distance(a: &Config, b: &Config) -> f64 {
    fn directed(a: &Config, b: &Config) -> Q {
        a.points
            .iter()
            .map(|p| {
                b.points
                    .iter()
                    .map(|q| p.dist_sq(q))
                    .min()
                    .expect("configs are nonempty")
            })
            .max()
            .expect("configs are nonempty")
    }
    let d = directed(a, b).max(directed(b, a));
    q_to_f64(&d).sqrt()
}

/// Generator name and parameters attached to a trajectory.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Meta {
    pub generator: String,
    #[serde(default)]
    pub params: serde_json::Map<String, serde_json::Value>,
}

impl Meta {
    pub fn new(generator: impl Into<String>) -> Self {
        Self {
            generator: generator.into(),
            params: serde_json::Map::new(),
        }
    }

    pub fn with(mut self, key: &str, value: impl Into<serde_json::Value>) -> Self {
        self.params.insert(key.to_string(), value.into());
        self
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Sample {
    pub t: Q,
    pub config: Config,
}

/// A sampled isotopy. Sample 0 sits at `t = 0`; times strictly increase inside
/// `[0, 1]`; every sample has the same number of points, identified by index.
#[derive(Debug, Clone, PartialEq)]
pub struct Trajectory {
    samples: Vec<Sample>,
    meta: Meta,
}

impl Trajectory {
    pub fn new(samples: Vec<Sample>, meta: Meta) -> Result<Self, ConfigError> {
        let first = samples
            .first()
            .ok_or_else(|| ConfigError::InvariantViolation("trajectory has no samples".into()))?;
        if !first.t.is_zero() {
            return Err(ConfigError::InvariantViolation(format!(
                "first sample is at t = {}, expected 0",
                fmt_q(&first.t)
            )));
        }
        let n = first.config.len();
        for (k, s) in samples.iter().enumerate() {
            if s.config.len() != n {
                return Err(ConfigError::InvariantViolation(format!(
                    "sample {k} has {} points, expected {n}",
                    s.config.len()
                )));
            }
            if s.t.is_negative() || s.t > Q::from_integer(1.into()) {
                return Err(ConfigError::InvariantViolation(format!(
                    "sample {k} time {} outside [0, 1]",
                    fmt_q(&s.t)
                )));
            }
        }
        if let Some(k) = samples.windows(2).position(|w| w[1].t <= w[0].t) {
            return Err(ConfigError::InvariantViolation(format!(
                "sample times not strictly increasing at sample {}",
                k + 1
            )));
        }
        Ok(Self { samples, meta })
    }

    /// Constant trajectory holding `config` at the given sample times.
    pub fn constant(config: Config, times: Vec<Q>) -> Result<Self, ConfigError> {
        let samples = times
            .into_iter()
            .map(|t| Sample {
                t,
                config: config.clone(),
            })
            .collect();
        Self::new(samples, Meta::new("constant"))
    }

    pub fn n(&self) -> usize {
        self.samples[0].config.len()
    }

    pub fn samples(&self) -> &[Sample] {
        &self.samples
    }

    pub fn meta(&self) -> &Meta {
        &self.meta
    }

    pub fn first(&self) -> &Config {
        &self.samples[0].config
    }

    pub fn last(&self) -> &Config {
        &self.samples[self.samples.len() - 1].config
    }

    pub fn steps(&self) -> usize {
        self.samples.len() - 1
    }

    pub fn into_parts(self) -> (Vec<Sample>, Meta) {
        (self.samples, self.meta)
    }

    /// Per-step validity margins of the piecewise-linear motion.
    pub fn validity_margins(&self) -> MarginReport {
        let steps = self
            .samples
            .windows(2)
            .enumerate()
            .map(|(k, w)| step_margin(k, &w[0].config, &w[1].config))
            .collect();
        MarginReport { steps }
    }
}

/// Margin data for one step of a trajectory.
///
/// `ratio` is the largest, over pairs of points, of
/// `|relative displacement| / (|separation before| + |separation after|)`.
/// It is below 1 exactly when no pair meets while both move linearly across the
/// step; `valid` records that fact from exact arithmetic.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StepMargin {
    pub step: usize,
    pub min_sep_before: f64,
    pub min_sep_after: f64,
    pub max_displacement: f64,
    pub ratio: f64,
    pub valid: bool,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct MarginReport {
    pub steps: Vec<StepMargin>,
}

impl MarginReport {
    pub fn is_valid(&self) -> bool {
        self.steps.iter().all(|s| s.valid)
    }

    pub fn worst_ratio(&self) -> f64 {
        self.steps.iter().map(|s| s.ratio).fold(0.0, f64::max)
    }

    pub fn first_invalid(&self) -> Option<&StepMargin> {
        self.steps.iter().find(|s| !s.valid)
    }
}

pub(crate) fn step_margin(step: usize, before: &Config, after: &Config) -> StepMargin {
    let n = before.len();
    let disp: Vec<(Q, Q)> = (0..n)
        .map(|i| {
            (
                &after.points[i].x - &before.points[i].x,
                &after.points[i].y - &before.points[i].y,
            )
        })
        .collect();
    let max_displacement = (0..n)
        .map(|i| {
            let [x0, y0] = before.approx[i];
            let [x1, y1] = after.approx[i];
            (x1 - x0).hypot(y1 - y0)
        })
        .fold(0.0, f64::max);
    let mut ratio: f64 = 0.0;
    let mut valid = true;
    for i in 0..n {
        for j in i + 1..n {
            if disp[i] == disp[j] {
                continue;
            }
            let (p0, p1) = (&before.points, &after.points);
            let d0 = (&p0[j].x - &p0[i].x, &p0[j].y - &p0[i].y);
            let d1 = (&p1[j].x - &p1[i].x, &p1[j].y - &p1[i].y);
            let cross = &d0.0 * &d1.1 - &d0.1 * &d1.0;
            let dot = &d0.0 * &d1.0 + &d0.1 * &d1.1;
            if cross.is_zero() && !dot.is_positive() {
                valid = false;
            }
            let a0 = [q_to_f64(&d0.0), q_to_f64(&d0.1)];
            let a1 = [q_to_f64(&d1.0), q_to_f64(&d1.1)];
            let rel = (a1[0] - a0[0]).hypot(a1[1] - a0[1]);
            let r = rel / (a0[0].hypot(a0[1]) + a1[0].hypot(a1[1]));
            ratio = ratio.max(r);
        }
    }
    if valid && ratio >= 1.0 {
        // rounding on a nearly degenerate but valid pair
        ratio = 1.0 - f64::EPSILON;
    }
    StepMargin {
        step,
        min_sep_before: before.min_sep(),
        min_sep_after: after.min_sep(),
        max_displacement,
        ratio,
        valid,
    }
}
