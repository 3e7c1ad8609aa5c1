//! Braid words from sampled trajectories.
//!
//! Between samples every point moves linearly. Sorting the points by x (ties
//! broken by smaller y) gives slots `1..=n`; each exchange of adjacent slots is an
//! Artin generator. The point coming from the left slot passing below the other
//! one is a counterclockwise exchange, `σ_i`; passing above is `σ_i⁻¹`. A full
//! counterclockwise orbit of one point about its neighbor is `σ_i²`.

use std::fmt;
use std::str::FromStr;

use num_traits::{One, Zero};
use thiserror::Error;

use crate::configspace::{Config, MarginReport, Sample, Trajectory};
use crate::loops::{format_letters, parse_letters, LoopError, WordJson};
use crate::rational::{q_frac, Q};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum BraidError {
    #[error("x-coordinates at t = 0 are not pairwise distinct")]
    Chart,
    #[error("step {step}: order change is not a sequence of adjacent exchanges; subdivide")]
    AmbiguousStep { step: usize },
    #[error("step {step}: points {a} and {b} collide")]
    Collision { step: usize, a: usize, b: usize },
    #[error("subdivision factor must be at least 2, got {0}")]
    InvalidFactor(usize),
    #[error("invalid braid word: {0}")]
    InvalidWord(String),
}

/// Signed Artin generators in chronological order: `i` is `σ_i`, `-i` is `σ_i⁻¹`.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct BraidWord {
    n: usize,
    letters: Vec<i32>,
}

impl BraidWord {
    pub fn new(n: usize, letters: Vec<i32>) -> Result<Self, BraidError> {
        if let Some(&bad) = letters
            .iter()
            .find(|&&l| l == 0 || l.unsigned_abs() as usize >= n)
        {
            return Err(BraidError::InvalidWord(format!(
                "generator {bad} out of range for {n} strands"
            )));
        }
        Ok(Self { n, letters })
    }

    pub fn empty(n: usize) -> Self {
        Self {
            n,
            letters: Vec::new(),
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn letters(&self) -> &[i32] {
        &self.letters
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// `(slot, sign)` pairs in order.
    pub fn iter(&self) -> impl Iterator<Item = (usize, i32)> + '_ {
        self.letters
            .iter()
            .map(|&l| (l.unsigned_abs() as usize, l.signum()))
    }

    pub fn prefix(&self, len: usize) -> BraidWord {
        Self {
            n: self.n,
            letters: self.letters[..len].to_vec(),
        }
    }

    /// Where each strand ends up: `perm[start_slot - 1] = end_slot - 1`.
    pub fn permutation(&self) -> Vec<usize> {
        let mut at: Vec<usize> = (0..self.n).collect(); // slot -> strand
        for (slot, _) in self.iter() {
            at.swap(slot - 1, slot);
        }
        let mut perm = vec![0; self.n];
        for (slot, &strand) in at.iter().enumerate() {
            perm[strand] = slot;
        }
        perm
    }

    pub fn is_pure(&self) -> bool {
        self.permutation().iter().enumerate().all(|(i, &p)| i == p)
    }

    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(WordJson {
            n: self.n,
            word: self.letters.clone(),
        })
        .expect("braid word serializes")
    }

    pub fn from_json(v: &serde_json::Value) -> Result<Self, BraidError> {
        let w: WordJson = serde_json::from_value(v.clone())
            .map_err(|e| BraidError::InvalidWord(e.to_string()))?;
        Self::new(w.n, w.word)
    }

    pub fn parse(n: usize, text: &str) -> Result<Self, BraidError> {
        let letters =
            parse_letters(text).map_err(|e: LoopError| BraidError::InvalidWord(e.to_string()))?;
        Self::new(n, letters)
    }
}

impl fmt::Display for BraidWord {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&format_letters(&self.letters))
    }
}

/// Parses `"n: letters"`.
impl FromStr for BraidWord {
    type Err = BraidError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let (n, rest) = s
            .split_once(':')
            .ok_or_else(|| BraidError::InvalidWord("expected \"n: letters\"".into()))?;
        let n = n
            .trim()
            .parse()
            .map_err(|_| BraidError::InvalidWord(format!("bad strand count {n:?}")))?;
        Self::parse(n, rest)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CrossingEvent {
    pub step: usize,
    /// Crossing time as a fraction of the step.
    pub within: Q,
    /// Crossing time on the trajectory clock.
    pub time: Q,
    /// Left slot of the exchanged pair.
    pub slot: usize,
    pub sign: i32,
    /// Labels of the point leaving the left slot and of the point it overtakes.
    pub labels: (usize, usize),
}

#[derive(Debug, Clone)]
pub struct Extraction {
    pub word: BraidWord,
    pub events: Vec<CrossingEvent>,
    pub margins: MarginReport,
}

impl Extraction {
    /// Number of letters emitted strictly before each sample.
    pub fn prefix_lengths(&self, samples: usize) -> Vec<usize> {
        let mut out = vec![0; samples];
        for e in &self.events {
            for p in out.iter_mut().skip(e.step + 1) {
                *p += 1;
            }
        }
        out
    }
}

pub fn extract_word(traj: &Trajectory) -> Result<Extraction, BraidError> {
    if !traj.first().has_distinct_x() {
        return Err(BraidError::Chart);
    }
    let mut events = Vec::new();
    let samples = traj.samples();
    for (k, w) in samples.windows(2).enumerate() {
        step_events(k, &w[0], &w[1], &mut events)?;
    }
    let word = BraidWord::new(
        traj.n(),
        events.iter().map(|e| e.sign * e.slot as i32).collect(),
    )
    .expect("slots are in range");
    Ok(Extraction {
        word,
        events,
        margins: traj.validity_margins(),
    })
}

struct PairCross {
    time: Q,
    left: usize,
    right: usize,
    sign: i32,
}

fn step_events(
    step: usize,
    s0: &Sample,
    s1: &Sample,
    out: &mut Vec<CrossingEvent>,
) -> Result<(), BraidError> {
    let (c0, c1) = (&s0.config, &s1.config);
    let mut order = c0.chart_order();
    let end_order = c1.chart_order();
    if order == end_order {
        return Ok(());
    }
    let n = c0.len();
    let mut end_rank = vec![0; n];
    for (r, &i) in end_order.iter().enumerate() {
        end_rank[i] = r;
    }

    let mut crossings = Vec::new();
    for p in 0..n {
        for q in p + 1..n {
            let (a, b) = (order[p], order[q]);
            if end_rank[a] > end_rank[b] {
                crossings.push(pair_crossing(step, c0, c1, a, b)?);
            }
        }
    }
    crossings.sort_by(|x, y| x.time.cmp(&y.time));

    let dt = &s1.t - &s0.t;
    let mut rest = &crossings[..];
    while let Some(first) = rest.first() {
        let batch_len = rest.iter().take_while(|c| c.time == first.time).count();
        let mut batch: Vec<&PairCross> = rest[..batch_len].iter().collect();
        rest = &rest[batch_len..];
        while !batch.is_empty() {
            let found = (0..n - 1).find_map(|p| {
                batch
                    .iter()
                    .position(|c| c.left == order[p] && c.right == order[p + 1])
                    .map(|bi| (p, bi))
            });
            let Some((p, bi)) = found else {
                return Err(BraidError::AmbiguousStep { step });
            };
            let c = batch.swap_remove(bi);
            out.push(CrossingEvent {
                step,
                within: c.time.clone(),
                time: &s0.t + &dt * &c.time,
                slot: p + 1,
                sign: c.sign,
                labels: (c.left + 1, c.right + 1),
            });
            order.swap(p, p + 1);
        }
    }
    if order != end_order {
        return Err(BraidError::AmbiguousStep { step });
    }
    Ok(())
}

/// Crossing of `left` (before `right` at the start of the step) with `right`.
fn pair_crossing(
    step: usize,
    c0: &Config,
    c1: &Config,
    left: usize,
    right: usize,
) -> Result<PairCross, BraidError> {
    let collision = || BraidError::Collision {
        step,
        a: left + 1,
        b: right + 1,
    };
    let g0 = &c0.point(right).x - &c0.point(left).x;
    let g1 = &c1.point(right).x - &c1.point(left).x;
    let time = if g0.is_zero() && g1.is_zero() {
        return Err(collision());
    } else if g0.is_zero() {
        Q::zero()
    } else if g1.is_zero() {
        Q::one()
    } else {
        &g0 / (&g0 - &g1)
    };
    let ya = c0.point(left).lerp(c1.point(left), &time).y;
    let yb = c0.point(right).lerp(c1.point(right), &time).y;
    let sign = match ya.cmp(&yb) {
        std::cmp::Ordering::Less => 1,
        std::cmp::Ordering::Greater => -1,
        std::cmp::Ordering::Equal => return Err(collision()),
    };
    Ok(PairCross {
        time,
        left,
        right,
        sign,
    })
}

/// Inserts `factor - 1` linearly interpolated samples into every step.
pub fn subdivide(traj: &Trajectory, factor: usize) -> Result<Trajectory, BraidError> {
    if factor < 2 {
        return Err(BraidError::InvalidFactor(factor));
    }
    let samples = traj.samples();
    let mut out = Vec::with_capacity(traj.steps() * factor + 1);
    out.push(samples[0].clone());
    for (k, w) in samples.windows(2).enumerate() {
        for j in 1..factor {
            let s = q_frac(j as i64, factor as i64);
            let points = w[0]
                .config
                .points()
                .iter()
                .zip(w[1].config.points())
                .map(|(a, b)| a.lerp(b, &s))
                .collect();
            let config = Config::new(points).map_err(|e| match e {
                crate::configspace::ConfigError::DuplicatePoint(a, b) => {
                    BraidError::Collision { step: k, a, b }
                }
                _ => BraidError::Collision {
                    step: k,
                    a: 0,
                    b: 0,
                },
            })?;
            out.push(Sample {
                t: &w[0].t + (&w[1].t - &w[0].t) * &s,
                config,
            });
        }
        out.push(w[1].clone());
    }
    let meta = traj.meta().clone().with("subdivided", factor);
    Ok(Trajectory::new(out, meta).expect("interpolated times stay increasing"))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::{gen_cascade, gen_rigid, Point, RigidMotion};
    use crate::rational::q_int;

    fn collinear(n: i64) -> Config {
        Config::new((0..n).map(|i| Point::new(q_int(i), q_int(0))).collect()).unwrap()
    }

    fn two_sample(a: Vec<(i64, i64)>, b: Vec<(i64, i64)>) -> Trajectory {
        let cfg = |v: Vec<(i64, i64)>| {
            Config::new(
                v.into_iter()
                    .map(|(x, y)| Point::new(q_int(x), q_int(y)))
                    .collect(),
            )
            .unwrap()
        };
        Trajectory::new(
            vec![
                Sample {
                    t: q_int(0),
                    config: cfg(a),
                },
                Sample {
                    t: q_int(1),
                    config: cfg(b),
                },
            ],
            Default::default(),
        )
        .unwrap()
    }

    #[test]
    fn constant_trajectory_has_empty_word() {
        let tr =
            Trajectory::constant(collinear(3), vec![q_int(0), q_frac(1, 2), q_int(1)]).unwrap();
        assert!(extract_word(&tr).unwrap().word.is_empty());
    }

    #[test]
    fn single_orbit_is_sigma_squared() {
        let ex = extract_word(&gen_cascade(2, 16).unwrap()).unwrap();
        assert_eq!(ex.word.letters(), &[1, 1]);
        assert!(ex.margins.is_valid());
    }

    #[test]
    fn cascade_three_is_two_squared_twists() {
        let ex = extract_word(&gen_cascade(3, 16).unwrap()).unwrap();
        assert_eq!(ex.word.letters(), &[1, 1, 2, 2]);
        assert!(ex.events.windows(2).all(|w| w[0].time <= w[1].time));
    }

    #[test]
    fn full_turn_of_collinear_points_is_full_twist() {
        for n in 2..=6i64 {
            let c = collinear(n);
            let tr = gen_rigid(&RigidMotion::full_turn(c.centroid()), &c, 8).unwrap();
            let ex = extract_word(&tr).unwrap();
            assert_eq!(ex.word.len(), (n * (n - 1)) as usize, "n={n}");
            assert!(ex.word.letters().iter().all(|&l| l > 0));
            assert!(ex.word.is_pure());
        }
    }

    #[test]
    fn passing_below_and_above() {
        // left point passes below the right one
        let tr = two_sample(vec![(0, 0), (2, 0)], vec![(2, -1), (0, 1)]);
        assert_eq!(extract_word(&tr).unwrap().word.letters(), &[1]);
        let tr = two_sample(vec![(0, 0), (2, 0)], vec![(2, 1), (0, -1)]);
        assert_eq!(extract_word(&tr).unwrap().word.letters(), &[-1]);
    }

    #[test]
    fn head_on_swap_is_collision() {
        let tr = two_sample(vec![(0, 0), (2, 0)], vec![(2, 0), (0, 0)]);
        assert!(matches!(
            extract_word(&tr),
            Err(BraidError::Collision { step: 0, .. })
        ));
        assert!(matches!(
            subdivide(&tr, 2),
            Err(BraidError::Collision { step: 0, .. })
        ));
    }

    #[test]
    fn x_tie_at_start_is_chart_error() {
        let tr = two_sample(vec![(0, 0), (0, 1)], vec![(0, 0), (0, 1)]);
        assert_eq!(extract_word(&tr).unwrap_err(), BraidError::Chart);
    }

    #[test]
    fn tie_inside_trajectory_is_resolved_by_y() {
        // point 1 moves to directly below point 2, then past it
        let tr = Trajectory::new(
            vec![
                Sample {
                    t: q_int(0),
                    config: collinear(2),
                },
                Sample {
                    t: q_frac(1, 2),
                    config: Config::new(vec![
                        Point::new(q_int(1), q_int(-1)),
                        Point::new(q_int(1), q_int(0)),
                    ])
                    .unwrap(),
                },
                Sample {
                    t: q_int(1),
                    config: Config::new(vec![
                        Point::new(q_int(2), q_int(-1)),
                        Point::new(q_int(1), q_int(0)),
                    ])
                    .unwrap(),
                },
            ],
            Default::default(),
        )
        .unwrap();
        let ex = extract_word(&tr).unwrap();
        assert_eq!(ex.word.letters(), &[1]);
        assert_eq!(ex.events[0].step, 1);
        assert_eq!(ex.events[0].within, q_int(0));
    }

    #[test]
    fn subdivide_constant() {
        let tr = Trajectory::constant(collinear(2), vec![q_int(0), q_int(1)]).unwrap();
        let s = subdivide(&tr, 4).unwrap();
        assert_eq!(s.samples().len(), 5);
        assert!(s.samples().iter().all(|x| x.config == collinear(2)));
        assert_eq!(subdivide(&tr, 1).unwrap_err(), BraidError::InvalidFactor(1));
    }

    #[test]
    fn subdivide_keeps_originals_and_word() {
        let tr = gen_cascade(3, 16).unwrap();
        let s = subdivide(&tr, 3).unwrap();
        for (k, orig) in tr.samples().iter().enumerate() {
            assert_eq!(&s.samples()[3 * k], orig);
        }
        assert_eq!(
            extract_word(&s).unwrap().word,
            extract_word(&tr).unwrap().word
        );
    }

    #[test]
    fn word_formats() {
        let w = BraidWord::parse(3, "1 1 2 2").unwrap();
        assert_eq!(w.to_string(), "1 1 2 2");
        assert_eq!(BraidWord::from_json(&w.to_json()).unwrap(), w);
        assert_eq!("3: 1 -2".parse::<BraidWord>().unwrap().letters(), &[1, -2]);
        assert!(BraidWord::parse(3, "3").is_err());
        assert_eq!(w.permutation(), vec![0, 1, 2]);
        assert_eq!(
            BraidWord::parse(3, "1 2").unwrap().permutation(),
            vec![2, 0, 1]
        );
    }

    #[test]
    fn prefix_lengths_count_letters_before_each_sample() {
        let tr = gen_cascade(2, 8).unwrap();
        let ex = extract_word(&tr).unwrap();
        let p = ex.prefix_lengths(tr.samples().len());
        assert_eq!(p[0], 0);
        assert_eq!(*p.last().unwrap(), 2);
        assert!(p.windows(2).all(|w| w[0] <= w[1]));
    }
}
