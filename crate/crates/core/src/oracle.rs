//! Brute-force geometric oracle.
//!
//! An explicit closed polyline is pushed through a trajectory by plane
//! homeomorphisms built from one radial bump per moving puncture, then its free
//! homotopy class is read from signed crossings with the downward cut rays. None of
//! this goes through the free-group substitution rules, so it cross-checks them.
//!
//! Bump for a puncture at `c` moving by `d`, with `R` half the distance to its
//! nearest neighbor: points within `R/4` of `c` move rigidly by `d`, the factor
//! decays linearly to zero at `R`. With `|d| <= R/2` the displacement field is
//! 2/3-Lipschitz and the supports are disjoint, so the step map is a homeomorphism.

use std::fmt::Write as _;

use thiserror::Error;

use crate::configspace::{Config, Trajectory};
use crate::loops::{Letter, LoopClass};

/// Lipschitz bound of the bump displacement field.
const BUMP_LIP: f64 = 2.0 / 3.0;
/// Segments near a moving puncture are cut to this fraction of their clearance.
const CLEARANCE_FRACTION: f64 = 1.0 / 8.0;
const NUDGE: f64 = 1e-9;
const MAX_SUBSTEPS: usize = 1 << 16;
const MAX_PIECES: f64 = 65536.0;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum OracleError {
    #[error("step {step}: puncture moves {displacement:.3e}, cap is {cap:.3e}; subdivide")]
    StepTooLarge {
        step: usize,
        displacement: f64,
        cap: f64,
    },
    #[error("polyline comes too close to puncture {puncture} ({detail})")]
    ProximityViolation { puncture: usize, detail: String },
    #[error("polyline meets a cut ray non-transversally after perturbation")]
    DegenerateCrossing,
    #[error("chart undefined: x-coordinates are not pairwise distinct")]
    Chart,
    #[error("invalid polyline: {0}")]
    InvalidPolyline(String),
}

type P = [f64; 2];

fn sub(a: P, b: P) -> P {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: P) -> f64 {
    a[0].hypot(a[1])
}

fn dist(a: P, b: P) -> f64 {
    norm(sub(a, b))
}

fn point_segment_dist(p: P, a: P, b: P) -> f64 {
    let ab = sub(b, a);
    let len2 = ab[0] * ab[0] + ab[1] * ab[1];
    if len2 == 0.0 {
        return dist(p, a);
    }
    let ap = sub(p, a);
    let s = ((ap[0] * ab[0] + ap[1] * ab[1]) / len2).clamp(0.0, 1.0);
    dist(p, [a[0] + s * ab[0], a[1] + s * ab[1]])
}

fn orient(a: P, b: P, c: P) -> f64 {
    (b[0] - a[0]) * (c[1] - a[1]) - (b[1] - a[1]) * (c[0] - a[0])
}

/// Closed polyline; the last vertex connects back to the first.
#[derive(Debug, Clone, PartialEq)]
pub struct PolylineLoop {
    vertices: Vec<P>,
}

impl PolylineLoop {
    pub fn new(vertices: Vec<P>) -> Result<Self, OracleError> {
        let mut v: Vec<P> = Vec::with_capacity(vertices.len());
        for p in vertices {
            if !(p[0].is_finite() && p[1].is_finite()) {
                return Err(OracleError::InvalidPolyline("non-finite vertex".into()));
            }
            if v.last() != Some(&p) {
                v.push(p);
            }
        }
        while v.len() > 1 && v.first() == v.last() {
            v.pop();
        }
        if v.len() < 3 {
            return Err(OracleError::InvalidPolyline(format!(
                "need at least 3 distinct consecutive vertices, got {}",
                v.len()
            )));
        }
        Ok(Self { vertices: v })
    }

    pub fn vertices(&self) -> &[P] {
        &self.vertices
    }

    pub fn len(&self) -> usize {
        self.vertices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.vertices.is_empty()
    }

    fn segments(&self) -> impl Iterator<Item = (P, P)> + '_ {
        let n = self.vertices.len();
        (0..n).map(move |i| (self.vertices[i], self.vertices[(i + 1) % n]))
    }

    /// Counterclockwise circle.
    pub fn circle(center: P, radius: f64, segments: usize) -> Result<Self, OracleError> {
        let segments = segments.max(3);
        Self::new(
            (0..segments)
                .map(|i| {
                    let a = std::f64::consts::TAU * i as f64 / segments as f64;
                    [center[0] + radius * a.cos(), center[1] + radius * a.sin()]
                })
                .collect(),
        )
    }

    /// Counterclockwise boundary of the convex hull of disks of radius `margin`
    /// about the punctures in chart slots `j..=k`. Fails if the curve does not
    /// separate exactly those punctures from the rest.
    pub fn round(q: &Config, j: usize, k: usize, margin: f64) -> Result<Self, OracleError> {
        let order = q.chart_order();
        if j == 0 || j > k || k > order.len() {
            return Err(OracleError::InvalidPolyline(format!(
                "bad slot range {j}..={k}"
            )));
        }
        let inside: Vec<usize> = order[j - 1..k].to_vec();
        let mut cloud = Vec::new();
        for &i in &inside {
            let c = q.approx()[i];
            for s in 0..48 {
                let a = std::f64::consts::TAU * s as f64 / 48.0;
                cloud.push([c[0] + margin * a.cos(), c[1] + margin * a.sin()]);
            }
        }
        let poly = Self::new(convex_hull(cloud))?;
        for (i, &p) in q.approx().iter().enumerate() {
            let enclosed = poly.winding_number(p) != 0;
            if enclosed != inside.contains(&i) {
                return Err(OracleError::InvalidPolyline(format!(
                    "round curve does not separate puncture {}",
                    i + 1
                )));
            }
        }
        Ok(poly)
    }

    /// Based loop for a word: for each letter a lasso from a base point at the
    /// upper left, over the top of all punctures, down to the puncture, once around
    /// it, and back the same way.
    pub fn lassos(q: &Config, word: &[Letter], radius: f64) -> Result<Self, OracleError> {
        let order = q.chart_order();
        let pts = q.approx();
        let (mut xmin, mut ymax) = (f64::INFINITY, f64::NEG_INFINITY);
        for p in pts {
            xmin = xmin.min(p[0]);
            ymax = ymax.max(p[1]);
        }
        let base = [xmin - 1.0, ymax + 1.0];
        let mut v = vec![base];
        for &l in word {
            let g = l.unsigned_abs() as usize;
            if g == 0 || g > order.len() {
                return Err(OracleError::InvalidPolyline(format!(
                    "letter {l} out of range"
                )));
            }
            let c = pts[order[g - 1]];
            let top = [c[0], c[1] + radius];
            v.push([c[0], base[1]]);
            v.push(top);
            let steps = 24;
            for s in 1..steps {
                let turn = std::f64::consts::TAU * s as f64 / steps as f64;
                let a = std::f64::consts::FRAC_PI_2 + if l > 0 { turn } else { -turn };
                v.push([c[0] + radius * a.cos(), c[1] + radius * a.sin()]);
            }
            v.push(top);
            v.push([c[0], base[1]]);
            v.push(base);
        }
        Self::new(v)
    }

    fn winding_number(&self, p: P) -> i32 {
        let mut w = 0;
        for (a, b) in self.segments() {
            if a[1] <= p[1] {
                if b[1] > p[1] && orient(a, b, p) > 0.0 {
                    w += 1;
                }
            } else if b[1] <= p[1] && orient(a, b, p) < 0.0 {
                w -= 1;
            }
        }
        w
    }

    pub fn min_clearance(&self, q: &Config) -> f64 {
        let mut best = f64::INFINITY;
        for (a, b) in self.segments() {
            for &c in q.approx() {
                best = best.min(point_segment_dist(c, a, b));
            }
        }
        best
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::json!({ "vertices": self.vertices })
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, OracleError> {
        let verts: Vec<P> = serde_json::from_value(v["vertices"].clone())
            .map_err(|e| OracleError::InvalidPolyline(e.to_string()))?;
        Self::new(verts)
    }
}

fn convex_hull(mut pts: Vec<P>) -> Vec<P> {
    pts.sort_by(|a, b| a.partial_cmp(b).expect("finite coordinates"));
    pts.dedup();
    if pts.len() < 3 {
        return pts;
    }
    let mut lower: Vec<P> = Vec::new();
    for &p in &pts {
        while lower.len() >= 2 && orient(lower[lower.len() - 2], lower[lower.len() - 1], p) <= 0.0 {
            lower.pop();
        }
        lower.push(p);
    }
    let mut upper: Vec<P> = Vec::new();
    for &p in pts.iter().rev() {
        while upper.len() >= 2 && orient(upper[upper.len() - 2], upper[upper.len() - 1], p) <= 0.0 {
            upper.pop();
        }
        upper.push(p);
    }
    lower.pop();
    upper.pop();
    lower.extend(upper);
    lower
}

/// Largest distance between two vertices.
pub fn diameter(p: &PolylineLoop) -> f64 {
    let hull = convex_hull(p.vertices.clone());
    let mut best: f64 = 0.0;
    for i in 0..hull.len() {
        for j in i + 1..hull.len() {
            best = best.max(dist(hull[i], hull[j]));
        }
    }
    best
}

/// Reads the class of `p` in the complement of `q` from its crossings with the
/// downward vertical rays: left-to-right across the ray of slot `j` is `x_j`.
pub fn word_from_polyline(p: &PolylineLoop, q: &Config) -> Result<LoopClass, OracleError> {
    if !q.has_distinct_x() {
        return Err(OracleError::Chart);
    }
    let rays: Vec<P> = q.chart_order().iter().map(|&i| q.approx()[i]).collect();
    let mut verts = p.vertices.clone();
    // vertices sitting on a ray line are nudged sideways
    for attempt in 0..8 {
        let mut touched = false;
        for v in verts.iter_mut() {
            for r in &rays {
                if v[0] == r[0] && v[1] < r[1] {
                    v[0] += NUDGE * (attempt + 1) as f64;
                    touched = true;
                }
            }
        }
        if !touched {
            break;
        }
        if attempt == 7 {
            return Err(OracleError::DegenerateCrossing);
        }
    }

    let nv = verts.len();
    let mut word: Vec<Letter> = Vec::new();
    let mut hits: Vec<(f64, Letter)> = Vec::new();
    for i in 0..nv {
        let (a, b) = (verts[i], verts[(i + 1) % nv]);
        let (lo, hi) = if a[0] < b[0] {
            (a[0], b[0])
        } else {
            (b[0], a[0])
        };
        hits.clear();
        for (j, r) in rays.iter().enumerate() {
            if r[0] <= lo || r[0] >= hi {
                continue;
            }
            let s = (r[0] - a[0]) / (b[0] - a[0]);
            let y = a[1] + s * (b[1] - a[1]);
            if y == r[1] {
                return Err(OracleError::DegenerateCrossing);
            }
            if y < r[1] {
                let g = (j + 1) as Letter;
                hits.push((s, if b[0] > a[0] { g } else { -g }));
            }
        }
        hits.sort_by(|x, y| x.0.partial_cmp(&y.0).expect("finite parameters"));
        word.extend(hits.iter().map(|h| h.1));
    }
    Ok(LoopClass::canonical(q.len(), &word).expect("letters are in range"))
}

struct Bump {
    center: P,
    shift: P,
    core: f64,
    outer: f64,
}

impl Bump {
    fn factor(&self, p: P) -> f64 {
        let r = dist(p, self.center);
        if r <= self.core {
            1.0
        } else if r >= self.outer {
            0.0
        } else {
            (self.outer - r) / (self.outer - self.core)
        }
    }
}

fn nearest_neighbor(pts: &[P], i: usize) -> f64 {
    pts.iter()
        .enumerate()
        .filter(|&(j, _)| j != i)
        .map(|(_, &p)| dist(p, pts[i]))
        .fold(f64::INFINITY, f64::min)
}

/// One bump homeomorphism taking the punctures from `from` to `to`.
fn bump_step(verts: &mut Vec<P>, from: &[P], to: &[P], step: usize) -> Result<(), OracleError> {
    let mut bumps = Vec::new();
    for i in 0..from.len() {
        let shift = sub(to[i], from[i]);
        let len = norm(shift);
        if len == 0.0 {
            continue;
        }
        let nn = nearest_neighbor(from, i);
        let outer = if nn.is_finite() { nn / 2.0 } else { 4.0 * len };
        if len > outer / 2.0 {
            return Err(OracleError::StepTooLarge {
                step,
                displacement: len,
                cap: outer / 2.0,
            });
        }
        bumps.push(Bump {
            center: from[i],
            shift,
            core: outer / 4.0,
            outer,
        });
    }
    if bumps.is_empty() {
        return Ok(());
    }

    // refine segments that reach into a support
    let nv = verts.len();
    let mut refined: Vec<P> = Vec::with_capacity(nv);
    for i in 0..nv {
        let (a, b) = (verts[i], verts[(i + 1) % nv]);
        refined.push(a);
        let in_support = bumps
            .iter()
            .any(|bm| point_segment_dist(bm.center, a, b) < bm.outer);
        if !in_support {
            continue;
        }
        // points near a moving puncture travel with it, so only the distance to
        // the starting positions matters
        let clearance = from
            .iter()
            .map(|&c| point_segment_dist(c, a, b))
            .fold(f64::INFINITY, f64::min);
        let pieces = (dist(a, b) / (clearance * CLEARANCE_FRACTION)).ceil();
        if !(pieces <= MAX_PIECES) {
            return Err(OracleError::ProximityViolation {
                puncture: 0,
                detail: format!("segment within {clearance:.3e} of a puncture at step {step}"),
            });
        }
        let pieces = pieces as usize;
        for s in 1..pieces {
            let f = s as f64 / pieces as f64;
            refined.push([a[0] + f * (b[0] - a[0]), a[1] + f * (b[1] - a[1])]);
        }
    }

    let moved: Vec<P> = refined
        .iter()
        .map(|&p| {
            let mut out = p;
            for bm in &bumps {
                let f = bm.factor(p);
                out[0] += f * bm.shift[0];
                out[1] += f * bm.shift[1];
            }
            out
        })
        .collect();

    // the image of each segment and its chord both lie in a ball about the image of
    // its first endpoint; no puncture may sit in that ball
    let nr = refined.len();
    for i in 0..nr {
        let j = (i + 1) % nr;
        if moved[i] == refined[i] && moved[j] == refined[j] {
            continue;
        }
        let radius = (1.0 + BUMP_LIP) * dist(refined[i], refined[j]);
        for (k, &c) in to.iter().enumerate() {
            if dist(moved[i], c) <= radius {
                return Err(OracleError::ProximityViolation {
                    puncture: k + 1,
                    detail: format!("image segment may sweep across it at step {step}"),
                });
            }
        }
    }
    *verts = moved;
    verts.dedup();
    while verts.len() > 1 && verts.first() == verts.last() {
        verts.pop();
    }
    Ok(())
}

fn check_initial_clearance(p: &PolylineLoop, q: &Config) -> Result<(), OracleError> {
    let floor = q.min_sep() / 8.0;
    let floor = if floor.is_finite() { floor } else { 0.0 };
    for (k, &c) in q.approx().iter().enumerate() {
        for (a, b) in p.segments() {
            let d = point_segment_dist(c, a, b);
            if d < floor || d == 0.0 {
                return Err(OracleError::ProximityViolation {
                    puncture: k + 1,
                    detail: format!("initial clearance {d:.3e} below {floor:.3e}"),
                });
            }
        }
    }
    Ok(())
}

/// Carries `p` along `traj`, one bump map per step. Every step must already be
/// small enough.
pub fn carry(p: &PolylineLoop, traj: &Trajectory) -> Result<PolylineLoop, OracleError> {
    check_initial_clearance(p, traj.first())?;
    let mut verts = p.vertices.clone();
    for (k, w) in traj.samples().windows(2).enumerate() {
        bump_step(&mut verts, w[0].config.approx(), w[1].config.approx(), k)?;
    }
    PolylineLoop::new(verts)
}

/// Like [`carry`], but splits each step into as many equal linear substeps as it
/// needs. Returns the polyline at every sample of `traj`.
pub fn carry_frames(p: &PolylineLoop, traj: &Trajectory) -> Result<Vec<PolylineLoop>, OracleError> {
    check_initial_clearance(p, traj.first())?;
    let mut frames = vec![p.clone()];
    let mut verts = p.vertices.clone();
    for (k, w) in traj.samples().windows(2).enumerate() {
        let (a, b) = (w[0].config.approx(), w[1].config.approx());
        let mut m = initial_substeps(a, b);
        loop {
            let mut trial = verts.clone();
            match run_substeps(&mut trial, a, b, m, k) {
                Ok(()) => {
                    verts = trial;
                    break;
                }
                Err(OracleError::StepTooLarge { .. } | OracleError::ProximityViolation { .. })
                    if m < MAX_SUBSTEPS =>
                {
                    m *= 2;
                }
                Err(e) => return Err(e),
            }
        }
        frames.push(PolylineLoop::new(verts.clone())?);
    }
    Ok(frames)
}

pub fn carry_refined(p: &PolylineLoop, traj: &Trajectory) -> Result<PolylineLoop, OracleError> {
    Ok(carry_frames(p, traj)?.pop().expect("at least one frame"))
}

fn initial_substeps(a: &[P], b: &[P]) -> usize {
    let mut need: f64 = 1.0;
    for i in 0..a.len() {
        let len = dist(a[i], b[i]);
        if len == 0.0 {
            continue;
        }
        let nn = nearest_neighbor(a, i).min(nearest_neighbor(b, i));
        if nn.is_finite() {
            need = need.max(len / (nn / 4.0));
        }
    }
    (need.ceil() as usize).next_power_of_two()
}

fn run_substeps(
    verts: &mut Vec<P>,
    a: &[P],
    b: &[P],
    m: usize,
    step: usize,
) -> Result<(), OracleError> {
    let at = |s: usize| -> Vec<P> {
        let f = s as f64 / m as f64;
        a.iter()
            .zip(b)
            .map(|(p, q)| {
                if s == m {
                    *q
                } else {
                    [p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])]
                }
            })
            .collect()
    };
    let mut from = at(0);
    for s in 1..=m {
        let to = at(s);
        bump_step(verts, &from, &to, step)?;
        from = to;
    }
    Ok(())
}

/// SVG frame: punctures as dots (labeled), optional polyline.
pub fn render_svg(q: &Config, p: Option<&PolylineLoop>, title: &str) -> String {
    let mut xs: Vec<f64> = q.approx().iter().map(|c| c[0]).collect();
    let mut ys: Vec<f64> = q.approx().iter().map(|c| c[1]).collect();
    if let Some(p) = p {
        xs.extend(p.vertices.iter().map(|v| v[0]));
        ys.extend(p.vertices.iter().map(|v| v[1]));
    }
    let fold = |v: &[f64], f: fn(f64, f64) -> f64, init: f64| v.iter().copied().fold(init, f);
    let (x0, x1) = (
        fold(&xs, f64::min, f64::INFINITY),
        fold(&xs, f64::max, f64::NEG_INFINITY),
    );
    let (y0, y1) = (
        fold(&ys, f64::min, f64::INFINITY),
        fold(&ys, f64::max, f64::NEG_INFINITY),
    );
    let span = (x1 - x0).max(y1 - y0).max(1e-6);
    let pad = 0.05 * span;
    let size = 600.0;
    let scale = size / (span + 2.0 * pad);
    let tx = |x: f64| (x - x0 + pad) * scale;
    let ty = |y: f64| (y1 + pad - y) * scale;
    let h = (y1 - y0 + 2.0 * pad) * scale;

    let mut s = String::new();
    let _ = writeln!(
        s,
        r#"<svg xmlns="http://www.w3.org/2000/svg" width="{size:.0}" height="{h:.0}" viewBox="0 0 {size:.2} {h:.2}">"#
    );
    let _ = writeln!(s, "<title>{}</title>", xml_escape(title));
    let _ = writeln!(s, r#"<rect width="100%" height="100%" fill="white"/>"#);
    if let Some(p) = p {
        let mut d = String::new();
        for (i, v) in p.vertices.iter().enumerate() {
            let _ = write!(
                d,
                "{}{:.3},{:.3} ",
                if i == 0 { "M" } else { "L" },
                tx(v[0]),
                ty(v[1])
            );
        }
        d.push('Z');
        let _ = writeln!(
            s,
            r##"<path d="{d}" fill="none" stroke="#1f77b4" stroke-width="1"/>"##
        );
    }
    for (i, c) in q.approx().iter().enumerate() {
        let _ = writeln!(
            s,
            r##"<circle cx="{:.3}" cy="{:.3}" r="3" fill="#d62728"><title>{}</title></circle>"##,
            tx(c[0]),
            ty(c[1]),
            i + 1
        );
    }
    s.push_str("</svg>\n");
    s
}

fn xml_escape(s: &str) -> String {
    s.replace('&', "&amp;")
        .replace('<', "&lt;")
        .replace('>', "&gt;")
}
