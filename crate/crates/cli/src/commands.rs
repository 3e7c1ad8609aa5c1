use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use thiserror::Error;

use isoloop::braid::{extract_word, subdivide, BraidError, BraidWord};
use isoloop::configspace::{
    gen_braid, gen_cascade, gen_rigid, load_trajectory, trajectory_to_csv, trajectory_to_json,
    Config, ConfigError, Point, RigidMotion, Trajectory, DEFAULT_STEPS_PER_ORBIT,
};
use isoloop::loops::{
    certify as certify_class, parse_letters, LoopClass, LoopError, DEFAULT_WORD_CAP,
};
use isoloop::oracle::{carry_frames, render_svg, OracleError, PolylineLoop};
use isoloop::rational::{fmt_decimal, fmt_q, parse_q, q_frac, q_from_f64, q_int, Q};
use isoloop::transport::{
    paper_table, transport as run_transport, transport_report_json, TransportError,
};

use crate::{CertifyArgs, ClassArgs, ExtractArgs, Format, GenerateArgs, PaperArgs, TransportArgs};

const WORD_CAP_ENV: &str = "ISOLOOP_WORD_CAP";
const DEFAULT_RIGID_STEPS: usize = 16;
const DEFAULT_TWIST_STEPS: usize = 8;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Invalid(String),
    #[error("{0}")]
    Overflow(String),
}

impl CliError {
    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 1,
            CliError::Invalid(_) => 2,
            CliError::Overflow(_) => 3,
        }
    }
}

impl From<ConfigError> for CliError {
    fn from(e: ConfigError) -> Self {
        match e {
            ConfigError::InvalidParameter(_) => CliError::Usage(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<LoopError> for CliError {
    fn from(e: LoopError) -> Self {
        match e {
            LoopError::WordOverflow { .. } => CliError::Overflow(e.to_string()),
            LoopError::Parse(_)
            | LoopError::IndexOutOfRange { .. }
            | LoopError::SlotOutOfRange { .. } => CliError::Usage(e.to_string()),
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<BraidError> for CliError {
    fn from(e: BraidError) -> Self {
        match e {
            BraidError::InvalidWord(_) | BraidError::InvalidFactor(_) => {
                CliError::Usage(e.to_string())
            }
            _ => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<TransportError> for CliError {
    fn from(e: TransportError) -> Self {
        match e {
            TransportError::Config(e) => e.into(),
            TransportError::Braid(e) => e.into(),
            TransportError::Loop(e) => e.into(),
            TransportError::Precondition(_) => CliError::Usage(e.to_string()),
            TransportError::InvalidStep { .. } => CliError::Invalid(e.to_string()),
        }
    }
}

impl From<OracleError> for CliError {
    fn from(e: OracleError) -> Self {
        CliError::Invalid(format!("oracle: {e}"))
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Invalid(e.to_string())
    }
}

fn emit(text: &str, out: Option<&Path>) -> Result<(), CliError> {
    match out {
        Some(p) => {
            fs::write(p, text).map_err(|e| CliError::Invalid(format!("{}: {e}", p.display())))
        }
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn pretty(v: &serde_json::Value) -> String {
    let mut s = serde_json::to_string_pretty(v).expect("json serializes");
    s.push('\n');
    s
}

fn parse_point(text: &str) -> Result<Point, CliError> {
    let (x, y) = text
        .split_once(',')
        .ok_or_else(|| CliError::Usage(format!("expected x,y, got {text:?}")))?;
    let num =
        |s: &str| parse_q(s.trim()).ok_or_else(|| CliError::Usage(format!("bad number {s:?}")));
    Ok(Point::new(num(x)?, num(y)?))
}

fn parse_points(text: &str) -> Result<Config, CliError> {
    let pts = text
        .split(';')
        .filter(|s| !s.trim().is_empty())
        .map(parse_point)
        .collect::<Result<Vec<_>, _>>()?;
    Ok(Config::new(pts)?)
}

fn collinear(n: usize) -> Result<Config, CliError> {
    Ok(Config::new(
        (0..n)
            .map(|i| Point::new(q_int(i as i64), q_int(0)))
            .collect(),
    )?)
}

/// Radians to turns. Multiples of an eighth turn within 1e-6 snap to the exact
/// fraction so that full and half turns close up exactly.
fn radians_to_turns(rad: f64) -> Result<Q, CliError> {
    let turns = rad / std::f64::consts::TAU;
    let eighths = (turns * 8.0).round();
    if (turns * 8.0 - eighths).abs() < 1e-6 * 8.0 {
        return Ok(q_frac(eighths as i64, 8));
    }
    q_from_f64(turns).ok_or_else(|| CliError::Usage(format!("bad angle {rad}")))
}

fn word_cap(flag: Option<usize>) -> Result<usize, CliError> {
    if let Some(c) = flag {
        return Ok(c);
    }
    match std::env::var(WORD_CAP_ENV) {
        Ok(v) => v.trim().parse().map_err(|_| {
            CliError::Usage(format!(
                "{WORD_CAP_ENV} must be a positive integer, got {v:?}"
            ))
        }),
        Err(_) => Ok(DEFAULT_WORD_CAP),
    }
}

fn load(path: &Path, factor: Option<usize>) -> Result<Trajectory, CliError> {
    let traj =
        load_trajectory(path).map_err(|e| CliError::Invalid(format!("{}: {e}", path.display())))?;
    match factor {
        Some(k) => Ok(subdivide(&traj, k)?),
        None => Ok(traj),
    }
}

fn initial_class(args: &ClassArgs, n: usize) -> Result<LoopClass, CliError> {
    if let Some(r) = &args.round {
        return Ok(LoopClass::round_loop(r[0], r[1], n)?);
    }
    let text = args.word.as_deref().unwrap_or_default();
    let letters = parse_letters(text)?;
    Ok(LoopClass::canonical(n, &letters)?)
}

fn margin_summary(traj: &Trajectory) -> String {
    let m = traj.validity_margins();
    let status = match m.first_invalid() {
        None => "valid".to_string(),
        Some(s) => format!("INVALID at step {}", s.step),
    };
    format!(
        "{} points, {} steps, worst margin ratio {:.4}, {status}",
        traj.n(),
        traj.steps(),
        m.worst_ratio()
    )
}

pub fn generate(a: &GenerateArgs) -> Result<(), CliError> {
    let rigid_config = || -> Result<Config, CliError> {
        match (&a.points, a.collinear) {
            (Some(p), _) => parse_points(p),
            (None, Some(n)) => collinear(n),
            (None, None) => Err(CliError::Usage(
                "rigid motions need --points or --collinear".into(),
            )),
        }
    };
    let traj = if let Some(n) = a.cascade {
        if n < 2 {
            return Err(CliError::Usage(format!("--cascade needs n >= 2, got {n}")));
        }
        gen_cascade(n, a.steps.unwrap_or(DEFAULT_STEPS_PER_ORBIT))?
    } else if let Some(text) = &a.braid {
        let w: BraidWord = text.parse()?;
        gen_braid(w.n(), w.letters(), a.steps.unwrap_or(DEFAULT_TWIST_STEPS))?
    } else {
        let config = rigid_config()?;
        let motion = if let Some(d) = &a.translate {
            let num =
                |s: &str| parse_q(s).ok_or_else(|| CliError::Usage(format!("bad number {s:?}")));
            RigidMotion::Translation {
                dx: num(&d[0])?,
                dy: num(&d[1])?,
            }
        } else {
            let turns = match (&a.turns, a.rotate) {
                (Some(t), _) => {
                    parse_q(t).ok_or_else(|| CliError::Usage(format!("bad turns {t:?}")))?
                }
                (None, Some(r)) => radians_to_turns(r)?,
                (None, None) => unreachable!("clap requires one generator"),
            };
            let center = match &a.center {
                Some(c) => parse_point(c)?,
                None => config.centroid(),
            };
            RigidMotion::Rotation { center, turns }
        };
        gen_rigid(&motion, &config, a.steps.unwrap_or(DEFAULT_RIGID_STEPS))?
    };
    eprintln!("{}", margin_summary(&traj));

    let format = a.format.unwrap_or_else(|| match &a.out {
        Some(p) if p.extension().is_some_and(|e| e.eq_ignore_ascii_case("csv")) => Format::Csv,
        _ => Format::Json,
    });
    let text = match format {
        Format::Json => pretty(&trajectory_to_json(&traj)),
        Format::Csv => trajectory_to_csv(&traj)?,
    };
    emit(&text, a.out.as_deref())
}

pub fn extract(a: &ExtractArgs) -> Result<(), CliError> {
    let traj = load(&a.trajectory, a.subdivide)?;
    let ex = extract_word(&traj)?;
    let text = match a.format {
        Format::Json => {
            let events: Vec<_> = ex
                .events
                .iter()
                .map(|e| {
                    serde_json::json!({
                        "step": e.step,
                        "time": fmt_q(&e.time),
                        "slot": e.slot,
                        "sign": e.sign,
                        "labels": [e.labels.0, e.labels.1],
                    })
                })
                .collect();
            pretty(&serde_json::json!({
                "n": traj.n(),
                "braid": ex.word.to_string(),
                "length": ex.word.len(),
                "permutation": ex.word.permutation(),
                "pure": ex.word.is_pure(),
                "events": events,
                "margins": {
                    "worst_ratio": ex.margins.worst_ratio(),
                    "valid": ex.margins.is_valid(),
                    "first_invalid": ex.margins.first_invalid().map(|s| s.step),
                },
            }))
        }
        Format::Csv => {
            let mut s = String::from("step,time,slot,sign,left_label,right_label\n");
            for e in &ex.events {
                let _ = writeln!(
                    s,
                    "{},{},{},{},{},{}",
                    e.step,
                    fmt_q(&e.time),
                    e.slot,
                    e.sign,
                    e.labels.0,
                    e.labels.1
                );
            }
            s
        }
    };
    emit(&text, a.out.as_deref())
}

pub fn transport(a: &TransportArgs) -> Result<(), CliError> {
    let traj = load(&a.trajectory, a.subdivide)?;
    let cap = word_cap(a.word_cap)?;
    let c0 = initial_class(&a.class, traj.n())?;
    let record = run_transport(&traj, &c0, cap)?;

    if let Some(dir) = &a.svg {
        write_frames(dir, &traj, &a.class, &c0)?;
    }

    let text = match a.format {
        Format::Json => pretty(&transport_report_json(&record)),
        Format::Csv => {
            let mut s = String::from("t,prefix_len,diam_lb,diam_lb_exact,class\n");
            for e in &record.entries {
                let (d, dx) = match e.chart.certificate() {
                    Some(c) => (fmt_decimal(&c.diam_lb, 12), fmt_q(&c.diam_lb)),
                    None => (String::new(), String::new()),
                };
                let _ = writeln!(
                    s,
                    "{},{},{d},{dx},\"{}\"",
                    fmt_q(&e.t),
                    e.prefix_len,
                    e.class
                );
            }
            s
        }
    };
    emit(&text, a.out.as_deref())
}

fn write_frames(
    dir: &PathBuf,
    traj: &Trajectory,
    class: &ClassArgs,
    c0: &LoopClass,
) -> Result<(), CliError> {
    fs::create_dir_all(dir)?;
    let q0 = traj.first();
    let scale = q0.min_sep() / 4.0;
    let p = match &class.round {
        Some(r) => PolylineLoop::round(q0, r[0], r[1], scale)?,
        None => PolylineLoop::lassos(q0, c0.word(), scale)?,
    };
    let frames = carry_frames(&p, traj)?;
    for (k, (s, f)) in traj.samples().iter().zip(&frames).enumerate() {
        let title = format!("t = {}", fmt_q(&s.t));
        fs::write(
            dir.join(format!("frame_{k:04}.svg")),
            render_svg(&s.config, Some(f), &title),
        )?;
    }
    Ok(())
}

pub fn certify(a: &CertifyArgs) -> Result<(), CliError> {
    let config = match (&a.trajectory, &a.points) {
        (Some(path), _) => load(path, None)?.last().clone(),
        (None, Some(p)) => parse_points(p)?,
        (None, None) => return Err(CliError::Usage("need a trajectory or --points".into())),
    };
    let c = initial_class(&a.class, config.len())?;
    let cert = certify_class(&c, &config)?;
    let mut v = cert.to_json();
    v["class"] = serde_json::Value::String(c.to_string());
    emit(&pretty(&v), a.out.as_deref())
}

fn parse_range(text: &str) -> Result<Vec<usize>, CliError> {
    let bad = || CliError::Usage(format!("bad range {text:?}; expected a..b or n"));
    let (lo, hi) = match text.split_once("..") {
        Some((a, b)) => {
            let b = b.strip_prefix('=').unwrap_or(b);
            (
                a.trim().parse().map_err(|_| bad())?,
                b.trim().parse().map_err(|_| bad())?,
            )
        }
        None => {
            let n: usize = text.trim().parse().map_err(|_| bad())?;
            (n, n)
        }
    };
    if lo < 3 || hi < lo {
        return Err(CliError::Usage(format!(
            "range {text:?} must satisfy 3 <= a <= b"
        )));
    }
    Ok((lo..=hi).collect())
}

pub fn paper(a: &PaperArgs) -> Result<(), CliError> {
    let ns = parse_range(&a.n)?;
    let cap = word_cap(a.word_cap)?;
    let rows = paper_table(ns, a.steps.unwrap_or(DEFAULT_STEPS_PER_ORBIT), cap)?;

    let mut table = format!(
        "{:>3}  {:>10}  {:>12}  {:>11}  {:>6}  {}\n",
        "n", "certified", "paper bound", "1 - 1/n", "length", "pass"
    );
    for r in &rows {
        let _ = writeln!(
            table,
            "{:>3}  {:>10}  {:>12}  {:>11}  {:>6}  {}",
            r.n,
            fmt_q(&r.certified),
            fmt_q(&r.paper_bound),
            fmt_q(&r.full_extent),
            r.final_class.len(),
            if r.pass { "pass" } else { "FAIL" }
        );
    }
    print!("{table}");

    if let Some(out) = &a.out {
        let text = match a.format {
            Format::Json => pretty(&serde_json::Value::Array(
                rows.iter().map(|r| r.to_json()).collect(),
            )),
            Format::Csv => {
                let mut s = String::from(
                    "n,certified,certified_exact,paper_bound,paper_bound_exact,final_class_length,pass\n",
                );
                for r in &rows {
                    let _ = writeln!(
                        s,
                        "{},{},{},{},{},{},{}",
                        r.n,
                        fmt_decimal(&r.certified, 12),
                        fmt_q(&r.certified),
                        fmt_decimal(&r.paper_bound, 12),
                        fmt_q(&r.paper_bound),
                        r.final_class.len(),
                        r.pass
                    );
                }
                s
            }
        };
        emit(&text, Some(out))?;
    }
    if rows.iter().all(|r| r.pass) {
        Ok(())
    } else {
        Err(CliError::Invalid("some rows fall below the bound".into()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn whole_and_half_turns_snap() {
        assert_eq!(radians_to_turns(6.2831853).unwrap(), q_int(1));
        assert_eq!(
            radians_to_turns(-std::f64::consts::PI).unwrap(),
            q_frac(-1, 2)
        );
        let odd = radians_to_turns(1.0).unwrap();
        assert!((isoloop::rational::q_to_f64(&odd) - 1.0 / std::f64::consts::TAU).abs() < 1e-15);
    }

    #[test]
    fn ranges() {
        assert_eq!(parse_range("3..5").unwrap(), vec![3, 4, 5]);
        assert_eq!(parse_range("3..=4").unwrap(), vec![3, 4]);
        assert_eq!(parse_range("7").unwrap(), vec![7]);
        assert!(parse_range("2..5").is_err());
        assert!(parse_range("5..3").is_err());
        assert!(parse_range("x").is_err());
    }

    #[test]
    fn points_parse_exactly() {
        let c = parse_points("0,0; 1/3,-2 ;0.25,1e-1").unwrap();
        assert_eq!(c.point(1), &Point::new(q_frac(1, 3), q_int(-2)));
        assert_eq!(c.point(2), &Point::new(q_frac(1, 4), q_frac(1, 10)));
        assert!(matches!(parse_points("0,0;0,0"), Err(CliError::Invalid(_))));
        assert!(matches!(parse_points("0;1"), Err(CliError::Usage(_))));
    }
}
