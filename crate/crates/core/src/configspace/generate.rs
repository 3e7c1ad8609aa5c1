//! Built-in isotopy generators.

use num_traits::One;

use super::{Config, ConfigError, Meta, Point, Sample, Trajectory};
use crate::rational::{fmt_q, q_frac, q_int, ExactRotation, Q};

pub const DEFAULT_STEPS_PER_ORBIT: usize = 16;

/// The truncated cascade on `F_n = {1/n, ..., 1/2, 1}` placed on the x-axis.
///
/// For `k = n, n-1, ..., 2` in that order, during `[1/k, 1/(k-1)]` the point at
/// `1/k` runs once counterclockwise around the point at `1/(k-1)` on the circle of
/// radius `1/(k(k-1))`, starting and ending at its home position. Everything is
/// held fixed on `[0, 1/n]`. Labels follow increasing x, so label 1 sits at `1/n`.
pub fn gen_cascade(n: usize, steps_per_orbit: usize) -> Result<Trajectory, ConfigError> {
    if n < 2 {
        return Err(ConfigError::InvalidParameter(format!(
            "cascade needs n >= 2, got {n}"
        )));
    }
    if steps_per_orbit < 8 {
        return Err(ConfigError::InvalidParameter(format!(
            "cascade needs at least 8 steps per orbit, got {steps_per_orbit}"
        )));
    }
    let ni = n as i64;
    let home: Vec<Point> = (1..=ni)
        .map(|label| Point::new(q_frac(1, ni - label + 1), q_int(0)))
        .collect();
    let mut current = home.clone();
    let mut samples = vec![Sample {
        t: q_int(0),
        config: Config::new(home.clone())?,
    }];

    for k in (2..=ni).rev() {
        let mover = (ni - k) as usize;
        let center = mover + 1;
        let c = home[center].clone();
        let radius = q_frac(1, k * (k - 1));
        check_orbit_clearance(&home, mover, center, &radius)?;

        let start = q_frac(1, k);
        let span = q_frac(1, k - 1) - &start;
        for j in 0..=steps_per_orbit {
            let t = &start + &span * q_frac(j as i64, steps_per_orbit as i64);
            if samples.last().is_some_and(|s| s.t == t) {
                continue;
            }
            let rot = ExactRotation::from_turns(&q_frac(j as i64, steps_per_orbit as i64));
            let (dx, dy) = rot.apply(&-radius.clone(), &q_int(0));
            current[mover] = Point::new(&c.x + dx, &c.y + dy);
            samples.push(Sample {
                t,
                config: Config::new(current.clone())?,
            });
        }
    }

    let meta = Meta::new("cascade")
        .with("n", n)
        .with("steps_per_orbit", steps_per_orbit);
    Trajectory::new(samples, meta)
}

/// The orbit circle must stay off every point other than its center.
fn check_orbit_clearance(
    home: &[Point],
    mover: usize,
    center: usize,
    radius: &Q,
) -> Result<(), ConfigError> {
    let r2 = radius * radius;
    for (other, p) in home.iter().enumerate() {
        if other == mover || other == center {
            continue;
        }
        if p.dist_sq(&home[center]) == r2 {
            return Err(ConfigError::OrbitCollision {
                mover: mover + 1,
                center: center + 1,
                other: other + 1,
            });
        }
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub enum RigidMotion {
    Translation {
        dx: Q,
        dy: Q,
    },
    /// Counterclockwise rotation by `turns` full turns about `center`.
    Rotation {
        center: Point,
        turns: Q,
    },
}

/// Uniformly sampled rigid motion of every point of `config`, `steps` steps.
pub fn gen_rigid(
    motion: &RigidMotion,
    config: &Config,
    steps: usize,
) -> Result<Trajectory, ConfigError> {
    if steps == 0 {
        return Err(ConfigError::InvalidParameter(
            "steps must be positive".into(),
        ));
    }
    let denom = steps as i64;
    let mut samples = Vec::with_capacity(steps + 1);
    for j in 0..=steps {
        let s = q_frac(j as i64, denom);
        let cfg = match motion {
            RigidMotion::Translation { dx, dy } => {
                config.map_points(|p| Point::new(&p.x + dx * &s, &p.y + dy * &s))?
            }
            RigidMotion::Rotation { center, turns } => {
                let rot = ExactRotation::from_turns(&(turns * &s));
                config.map_points(|p| {
                    let (x, y) = rot.apply(&(&p.x - &center.x), &(&p.y - &center.y));
                    Point::new(x + &center.x, y + &center.y)
                })?
            }
        };
        samples.push(Sample { t: s, config: cfg });
    }
    let meta = match motion {
        RigidMotion::Translation { dx, dy } => Meta::new("translation")
            .with("dx", fmt_q(dx))
            .with("dy", fmt_q(dy)),
        RigidMotion::Rotation { center, turns } => Meta::new("rotation")
            .with("cx", fmt_q(&center.x))
            .with("cy", fmt_q(&center.y))
            .with("turns", fmt_q(turns)),
    }
    .with("steps", steps);
    Trajectory::new(samples, meta)
}

/// Realizes a braid on `n` punctures at `0, 1, ..., n-1` on the x-axis. Letter `±i`
/// swaps the punctures in slots `i` and `i+1` by a half turn about their midpoint,
/// counterclockwise for `+i`, sampled with `steps_per_twist` steps. An empty word
/// gives a two-sample constant trajectory.
pub fn gen_braid(
    n: usize,
    letters: &[i32],
    steps_per_twist: usize,
) -> Result<Trajectory, ConfigError> {
    if n < 2 || steps_per_twist == 0 {
        return Err(ConfigError::InvalidParameter(format!(
            "braid realization needs n >= 2 and positive steps, got n = {n}, steps = {steps_per_twist}"
        )));
    }
    if let Some(&bad) = letters
        .iter()
        .find(|&&l| l == 0 || l.unsigned_abs() as usize >= n)
    {
        return Err(ConfigError::InvalidParameter(format!(
            "letter {bad} out of range for n = {n}"
        )));
    }
    let start = Config::new(
        (0..n)
            .map(|i| Point::new(q_int(i as i64), q_int(0)))
            .collect(),
    )?;
    let meta = Meta::new("braid")
        .with("n", n)
        .with("letters", letters.to_vec())
        .with("steps", steps_per_twist);
    if letters.is_empty() {
        let (samples, _) = Trajectory::constant(start, vec![q_int(0), q_int(1)])?.into_parts();
        return Trajectory::new(samples, meta);
    }
    let total = (letters.len() * steps_per_twist) as i64;
    let mut slot_of: Vec<usize> = (0..n).collect(); // label by slot
    let mut cur = start.clone();
    let mut samples = vec![Sample {
        t: q_int(0),
        config: start,
    }];
    for (li, &l) in letters.iter().enumerate() {
        let i = l.unsigned_abs() as usize - 1;
        let (a, b) = (slot_of[i], slot_of[i + 1]);
        let mid = Point::new((&cur.point(a).x + &cur.point(b).x) / q_int(2), q_int(0));
        let base = cur.clone();
        for k in 1..=steps_per_twist {
            let turns = q_frac(k as i64 * l.signum() as i64, 2 * steps_per_twist as i64);
            let rot = ExactRotation::from_turns(&turns);
            let mut pts = base.points().to_vec();
            for &idx in &[a, b] {
                let p = base.point(idx);
                let (x, y) = rot.apply(&(&p.x - &mid.x), &(&p.y - &mid.y));
                pts[idx] = Point::new(x + &mid.x, y + &mid.y);
            }
            cur = Config::new(pts)?;
            samples.push(Sample {
                t: q_frac((li * steps_per_twist + k) as i64, total),
                config: cur.clone(),
            });
        }
        slot_of.swap(i, i + 1);
    }
    Trajectory::new(samples, meta)
}

impl RigidMotion {
    pub fn full_turn(center: Point) -> Self {
        RigidMotion::Rotation {
            center,
            turns: Q::one(),
        }
    }
}
