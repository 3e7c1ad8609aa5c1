//! Trajectory files: canonical JSON plus a flat CSV projection (`t,label,x,y`).

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use super::{Config, ConfigError, Meta, Point, Sample, Trajectory};
use crate::rational::{fmt_q, parse_q, Q};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum TrajectoryFormat {
    Json,
    Csv,
}

impl TrajectoryFormat {
    pub fn from_path(path: &Path) -> Self {
        match path.extension().and_then(|e| e.to_str()) {
            Some(e) if e.eq_ignore_ascii_case("csv") => TrajectoryFormat::Csv,
            _ => TrajectoryFormat::Json,
        }
    }
}

/// A coordinate or time: `"p/q"`, a decimal string, or a bare JSON number.
#[derive(Debug, Clone, Serialize, Deserialize)]
#[serde(untagged)]
enum RawScalar {
    Text(String),
    Number(serde_json::Number),
}

impl RawScalar {
    fn parse(&self) -> Result<Q, ConfigError> {
        let text = match self {
            RawScalar::Text(s) => s.clone(),
            RawScalar::Number(n) => n.to_string(),
        };
        parse_q(&text).ok_or_else(|| ConfigError::Parse(format!("bad number {text:?}")))
    }
}

#[derive(Debug, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawSample {
    t: RawScalar,
    points: Vec<[RawScalar; 2]>,
}

#[derive(Debug, Serialize, Deserialize)]
struct RawTrajectory {
    n: usize,
    labels: Vec<usize>,
    samples: Vec<RawSample>,
    #[serde(default)]
    meta: Option<Meta>,
}

pub fn trajectory_to_json(traj: &Trajectory) -> serde_json::Value {
    let raw = RawTrajectory {
        n: traj.n(),
        labels: (1..=traj.n()).collect(),
        samples: traj
            .samples()
            .iter()
            .map(|s| RawSample {
                t: RawScalar::Text(fmt_q(&s.t)),
                points: s
                    .config
                    .points()
                    .iter()
                    .map(|p| [RawScalar::Text(fmt_q(&p.x)), RawScalar::Text(fmt_q(&p.y))])
                    .collect(),
            })
            .collect(),
        meta: Some(traj.meta().clone()),
    };
    serde_json::to_value(raw).expect("trajectory serializes")
}

pub fn trajectory_from_json(text: &str) -> Result<Trajectory, ConfigError> {
    let raw: RawTrajectory = serde_json::from_str(text).map_err(|e| {
        if e.is_data() {
            ConfigError::Schema(e.to_string())
        } else {
            ConfigError::Parse(e.to_string())
        }
    })?;
    let n = raw.n;
    let order = label_positions(&raw.labels, n)?;
    let mut samples = Vec::with_capacity(raw.samples.len());
    for (k, s) in raw.samples.iter().enumerate() {
        if s.points.len() != n {
            return Err(ConfigError::Schema(format!(
                "sample {k} has {} points, expected {n}",
                s.points.len()
            )));
        }
        let mut points = Vec::with_capacity(n);
        for &pos in &order {
            let [x, y] = &s.points[pos];
            points.push(Point::new(x.parse()?, y.parse()?));
        }
        samples.push(Sample {
            t: s.t.parse()?,
            config: Config::new(points).map_err(|e| invariant(k, e))?,
        });
    }
    Trajectory::new(samples, raw.meta.unwrap_or_default())
}

/// For each label 1..=n, the column holding it.
fn label_positions(labels: &[usize], n: usize) -> Result<Vec<usize>, ConfigError> {
    if labels.len() != n {
        return Err(ConfigError::Schema(format!(
            "{} labels for n = {n}",
            labels.len()
        )));
    }
    let mut pos = vec![usize::MAX; n];
    for (col, &l) in labels.iter().enumerate() {
        if l == 0 || l > n || pos[l - 1] != usize::MAX {
            return Err(ConfigError::Schema(format!(
                "labels must be a permutation of 1..={n}"
            )));
        }
        pos[l - 1] = col;
    }
    Ok(pos)
}

fn invariant(sample: usize, e: ConfigError) -> ConfigError {
    match e {
        ConfigError::DuplicatePoint(a, b) => ConfigError::InvariantViolation(format!(
            "points {a} and {b} coincide at sample {sample}"
        )),
        ConfigError::Empty => ConfigError::InvariantViolation("empty configuration".into()),
        other => other,
    }
}

pub fn trajectory_to_csv(traj: &Trajectory) -> Result<String, ConfigError> {
    let mut w = csv::Writer::from_writer(Vec::new());
    let csv_err = |e: csv::Error| ConfigError::Parse(e.to_string());
    w.write_record(["t", "label", "x", "y"]).map_err(csv_err)?;
    for s in traj.samples() {
        let t = fmt_q(&s.t);
        for (i, p) in s.config.points().iter().enumerate() {
            w.write_record([t.clone(), (i + 1).to_string(), fmt_q(&p.x), fmt_q(&p.y)])
                .map_err(csv_err)?;
        }
    }
    let bytes = w
        .into_inner()
        .map_err(|e| ConfigError::Parse(e.to_string()))?;
    Ok(String::from_utf8(bytes).expect("csv output is utf-8"))
}

fn trajectory_from_csv(text: &str) -> Result<Trajectory, ConfigError> {
    let mut rdr = csv::ReaderBuilder::new()
        .trim(csv::Trim::All)
        .from_reader(text.as_bytes());
    let headers = rdr
        .headers()
        .map_err(|e| ConfigError::Parse(e.to_string()))?
        .clone();
    let col = |name: &str| {
        headers
            .iter()
            .position(|h| h == name)
            .ok_or_else(|| ConfigError::Schema(format!("missing column {name:?}")))
    };
    let (ct, cl, cx, cy) = (col("t")?, col("label")?, col("x")?, col("y")?);

    let mut groups: Vec<(Q, Vec<(usize, Point)>)> = Vec::new();
    for rec in rdr.records() {
        let rec = rec.map_err(|e| ConfigError::Parse(e.to_string()))?;
        let field = |c: usize| {
            parse_q(&rec[c]).ok_or_else(|| ConfigError::Parse(format!("bad number {:?}", &rec[c])))
        };
        let t = field(ct)?;
        let label: usize = rec[cl]
            .parse()
            .map_err(|_| ConfigError::Parse(format!("bad label {:?}", &rec[cl])))?;
        let p = Point::new(field(cx)?, field(cy)?);
        match groups.last_mut() {
            Some((gt, rows)) if *gt == t => rows.push((label, p)),
            _ => groups.push((t, vec![(label, p)])),
        }
    }
    let n = groups
        .first()
        .map(|g| g.1.len())
        .ok_or_else(|| ConfigError::InvariantViolation("trajectory has no samples".into()))?;
    let mut samples = Vec::with_capacity(groups.len());
    for (k, (t, rows)) in groups.into_iter().enumerate() {
        if rows.len() != n {
            return Err(ConfigError::InvariantViolation(format!(
                "sample {k} has {} points, expected {n}",
                rows.len()
            )));
        }
        let labels: Vec<usize> = rows.iter().map(|r| r.0).collect();
        let order = label_positions(&labels, n).map_err(|_| {
            ConfigError::InvariantViolation(format!("label set changes at sample {k}"))
        })?;
        let points = order.iter().map(|&i| rows[i].1.clone()).collect();
        samples.push(Sample {
            t,
            config: Config::new(points).map_err(|e| invariant(k, e))?,
        });
    }
    Trajectory::new(samples, Meta::new("csv"))
}

pub fn save_trajectory(traj: &Trajectory, path: &Path) -> Result<(), ConfigError> {
    let text = match TrajectoryFormat::from_path(path) {
        TrajectoryFormat::Json => {
            let mut s = serde_json::to_string_pretty(&trajectory_to_json(traj))
                .expect("trajectory serializes");
            s.push('\n');
            s
        }
        TrajectoryFormat::Csv => trajectory_to_csv(traj)?,
    };
    fs::write(path, text)?;
    Ok(())
}

pub fn load_trajectory(path: &Path) -> Result<Trajectory, ConfigError> {
    let text = fs::read_to_string(path)?;
    match TrajectoryFormat::from_path(path) {
        TrajectoryFormat::Json => trajectory_from_json(&text),
        TrajectoryFormat::Csv => trajectory_from_csv(&text),
    }
}
