//! Carrying loop classes along sampled isotopies.
//!
//! The class at each sample is the initial class pushed through the braid letters
//! emitted before that sample. Samples whose x-coordinates repeat have no chart
//! and are recorded without a certificate.

use num_traits::{One, Zero};
use rayon::prelude::*;
use serde_json::json;
use thiserror::Error;

use crate::braid::{extract_word, subdivide, BraidError, BraidWord};
use crate::configspace::{gen_cascade, Config, ConfigError, Meta, Trajectory};
use crate::loops::{apply_word, certify, Certificate, LoopClass, LoopError};
use crate::rational::{fmt_decimal, fmt_q, q_frac, q_to_f64, Q};

#[derive(Debug, Error)]
pub enum TransportError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error(transparent)]
    Braid(#[from] BraidError),
    #[error(transparent)]
    Loop(#[from] LoopError),
    #[error("step {step} is not transport-valid (margin ratio {ratio:.3}); subdivide")]
    InvalidStep { step: usize, ratio: f64 },
    #[error("{0}")]
    Precondition(String),
}

#[derive(Debug, Clone, PartialEq)]
pub enum Chart {
    Certified(Certificate),
    Skipped,
}

impl Chart {
    pub fn certificate(&self) -> Option<&Certificate> {
        match self {
            Chart::Certified(c) => Some(c),
            Chart::Skipped => None,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Entry {
    pub t: Q,
    pub config: Config,
    /// Braid letters applied to reach this sample.
    pub prefix_len: usize,
    pub class: LoopClass,
    pub chart: Chart,
}

#[derive(Debug, Clone)]
pub struct TransportRecord {
    pub meta: Meta,
    pub initial: LoopClass,
    pub word: BraidWord,
    pub entries: Vec<Entry>,
    /// Largest certified bound over entries with a chart.
    pub peak: Option<Q>,
}

impl TransportRecord {
    pub fn final_entry(&self) -> &Entry {
        self.entries.last().expect("records are nonempty")
    }

    pub fn final_class(&self) -> &LoopClass {
        &self.final_entry().class
    }
}

pub fn transport(
    traj: &Trajectory,
    c0: &LoopClass,
    cap: usize,
) -> Result<TransportRecord, TransportError> {
    if c0.n() != traj.n() {
        return Err(LoopError::StrandMismatch {
            class: c0.n(),
            other: traj.n(),
        }
        .into());
    }
    let ex = extract_word(traj)?;
    if let Some(bad) = ex.margins.first_invalid() {
        return Err(TransportError::InvalidStep {
            step: bad.step,
            ratio: bad.ratio,
        });
    }
    let prefixes = ex.prefix_lengths(traj.samples().len());

    let mut entries = Vec::with_capacity(traj.samples().len());
    let mut class = c0.clone();
    let mut applied = 0;
    for (sample, &prefix_len) in traj.samples().iter().zip(&prefixes) {
        if prefix_len > applied {
            let letters = ex.word.letters()[applied..prefix_len].to_vec();
            let chunk = BraidWord::new(traj.n(), letters).expect("letters come from a valid word");
            class = apply_word(&class, &chunk, cap)?;
            applied = prefix_len;
        }
        let chart = match certify(&class, &sample.config) {
            Ok(cert) => Chart::Certified(cert),
            Err(LoopError::ChartError) => Chart::Skipped,
            Err(e) => return Err(e.into()),
        };
        entries.push(Entry {
            t: sample.t.clone(),
            config: sample.config.clone(),
            prefix_len,
            class: class.clone(),
            chart,
        });
    }
    let peak = entries
        .iter()
        .filter_map(|e| e.chart.certificate().map(|c| c.diam_lb.clone()))
        .max();
    Ok(TransportRecord {
        meta: traj.meta().clone(),
        initial: c0.clone(),
        word: ex.word,
        entries,
        peak,
    })
}

#[derive(Debug, Clone, PartialEq)]
pub struct StretchProfile {
    pub series: Vec<(Q, Q)>,
    pub peak: Option<Q>,
}

pub fn stretch_profile(r: &TransportRecord) -> StretchProfile {
    let series = r
        .entries
        .iter()
        .filter_map(|e| {
            e.chart
                .certificate()
                .map(|c| (e.t.clone(), c.diam_lb.clone()))
        })
        .collect::<Vec<_>>();
    let peak = series.iter().map(|(_, d)| d.clone()).max();
    StretchProfile { series, peak }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RefineReport {
    pub factor: usize,
    pub compared: usize,
    /// Sample times where the refined and unrefined classes differ.
    pub mismatches: Vec<Q>,
}

impl RefineReport {
    pub fn agree(&self) -> bool {
        self.mismatches.is_empty()
    }
}

/// Transports along `traj` and along its `factor`-fold subdivision and compares
/// the classes at every sample time the two share.
pub fn refine_check(
    traj: &Trajectory,
    c0: &LoopClass,
    factor: usize,
    cap: usize,
) -> Result<RefineReport, TransportError> {
    let fine_traj = subdivide(traj, factor)?;
    let coarse = transport(traj, c0, cap)?;
    let fine = transport(&fine_traj, c0, cap)?;
    let mut mismatches = Vec::new();
    let mut compared = 0;
    for (k, e) in coarse.entries.iter().enumerate() {
        let f = &fine.entries[k * factor];
        debug_assert_eq!(f.t, e.t);
        compared += 1;
        if f.class != e.class {
            mismatches.push(e.t.clone());
        }
    }
    Ok(RefineReport {
        factor,
        compared,
        mismatches,
    })
}

/// `1 - 1/(n-1)`: the lower bound asserted for the cascade.
pub fn cascade_paper_bound(n: usize) -> Q {
    Q::one() - q_frac(1, n as i64 - 1)
}

/// `1 - 1/n`: the x-extent of the whole truncated sequence.
pub fn cascade_full_extent(n: usize) -> Q {
    Q::one() - q_frac(1, n as i64)
}

#[derive(Debug, Clone)]
pub struct CascadeReport {
    pub n: usize,
    pub steps_per_orbit: usize,
    pub final_class: LoopClass,
    pub certified: Q,
    pub paper_bound: Q,
    pub full_extent: Q,
    pub pass: bool,
    pub profile: StretchProfile,
    pub record: TransportRecord,
}

/// Transports the loop around the two leftmost points through the cascade on
/// `F_n` and certifies the final class.
pub fn cascade_experiment(
    n: usize,
    steps_per_orbit: usize,
    cap: usize,
) -> Result<CascadeReport, TransportError> {
    if n < 3 {
        return Err(TransportError::Precondition(format!(
            "cascade experiment needs n >= 3, got {n}"
        )));
    }
    let traj = gen_cascade(n, steps_per_orbit)?;
    let c0 = LoopClass::round_loop(1, 2, n)?;
    let record = transport(&traj, &c0, cap)?;
    let certified = record
        .final_entry()
        .chart
        .certificate()
        .map(|c| c.diam_lb.clone())
        .ok_or_else(|| TransportError::Precondition("final cascade sample has no chart".into()))?;
    let paper_bound = cascade_paper_bound(n);
    Ok(CascadeReport {
        n,
        steps_per_orbit,
        final_class: record.final_class().clone(),
        pass: certified >= paper_bound,
        certified,
        paper_bound,
        full_extent: cascade_full_extent(n),
        profile: stretch_profile(&record),
        record,
    })
}

/// One cascade experiment per `n`, in increasing order of `n`.
pub fn paper_table(
    ns: impl IntoIterator<Item = usize>,
    steps_per_orbit: usize,
    cap: usize,
) -> Result<Vec<CascadeReport>, TransportError> {
    let ns: Vec<usize> = ns.into_iter().collect();
    ns.par_iter()
        .map(|&n| cascade_experiment(n, steps_per_orbit, cap))
        .collect()
}

fn profile_json(p: &StretchProfile) -> serde_json::Value {
    p.series
        .iter()
        .map(|(t, d)| json!([q_to_f64(t), q_to_f64(d)]))
        .collect()
}

/// Report for an arbitrary transport. `paper_bound` and `pass` are filled in for
/// cascade trajectories started from the round loop about the two leftmost points.
pub fn transport_report_json(r: &TransportRecord) -> serde_json::Value {
    let profile = stretch_profile(r);
    let certified = r
        .final_entry()
        .chart
        .certificate()
        .map(|c| c.diam_lb.clone());
    let n = r.initial.n();
    let is_cascade = r.meta.generator == "cascade"
        && n >= 3
        && LoopClass::round_loop(1, 2, n).is_ok_and(|c| c == r.initial);
    let bound = is_cascade.then(|| cascade_paper_bound(n));
    let pass = match (&bound, &certified) {
        (Some(b), Some(c)) => json!(c >= b),
        _ => serde_json::Value::Null,
    };
    let dec = |q: &Option<Q>| {
        q.as_ref()
            .map_or(serde_json::Value::Null, |q| json!(fmt_decimal(q, 12)))
    };
    let exact = |q: &Option<Q>| {
        q.as_ref()
            .map_or(serde_json::Value::Null, |q| json!(fmt_q(q)))
    };
    json!({
        "experiment": r.meta.generator,
        "n": n,
        "initial_class": r.initial.to_string(),
        "braid": r.word.to_string(),
        "profile": profile_json(&profile),
        "peak": dec(&profile.peak),
        "final_class": r.final_class().to_string(),
        "final_certificate": r.final_entry().chart.certificate().map(Certificate::to_json),
        "paper_bound": dec(&bound),
        "certified": dec(&certified),
        "certified_exact": exact(&certified),
        "pass": pass,
    })
}

impl CascadeReport {
    pub fn to_json(&self) -> serde_json::Value {
        json!({
            "experiment": "cascade",
            "n": self.n,
            "steps_per_orbit": self.steps_per_orbit,
            "profile": profile_json(&self.profile),
            "final_class": self.final_class.to_string(),
            "final_class_length": self.final_class.len(),
            "paper_bound": fmt_decimal(&self.paper_bound, 12),
            "paper_bound_exact": fmt_q(&self.paper_bound),
            "certified": fmt_decimal(&self.certified, 12),
            "certified_exact": fmt_q(&self.certified),
            "full_extent_exact": fmt_q(&self.full_extent),
            "pass": self.pass,
        })
    }
}

impl StretchProfile {
    pub fn is_constant(&self) -> bool {
        self.series.windows(2).all(|w| w[0].1 == w[1].1)
    }

    pub fn running_peak(&self) -> Vec<Q> {
        let mut best = Q::zero();
        self.series
            .iter()
            .map(|(_, d)| {
                if *d > best {
                    best = d.clone();
                }
                best.clone()
            })
            .collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::braid::subdivide;
    use crate::configspace::{gen_rigid, Point, RigidMotion};
    use crate::loops::DEFAULT_WORD_CAP;
    use crate::rational::q_int;

    const CAP: usize = DEFAULT_WORD_CAP;

    fn collinear(n: i64) -> Config {
        Config::new((0..n).map(|i| Point::new(q_int(i), q_int(0))).collect()).unwrap()
    }

    #[test]
    fn constant_trajectory_keeps_class() {
        let c0 = LoopClass::canonical(3, &[1, -3, 2]).unwrap();
        let tr =
            Trajectory::constant(collinear(3), vec![q_int(0), q_frac(1, 3), q_int(1)]).unwrap();
        let r = transport(&tr, &c0, CAP).unwrap();
        assert!(r.entries.iter().all(|e| e.class == c0));
        let cert = certify(&c0, tr.first()).unwrap();
        assert_eq!(r.peak, Some(cert.diam_lb.clone()));
        assert!(stretch_profile(&r).is_constant());
    }

    #[test]
    fn cascade_three_drags_round_pair() {
        let tr = gen_cascade(3, 16).unwrap();
        let r = transport(&tr, &LoopClass::round_loop(1, 2, 3).unwrap(), CAP).unwrap();
        assert_eq!(
            r.final_class(),
            &LoopClass::canonical(3, &[1, 2, 3, 2, -3, -2]).unwrap()
        );
        assert!(r.peak.clone().unwrap() >= q_frac(2, 3));
        let p = stretch_profile(&r);
        assert!(p.running_peak().windows(2).all(|w| w[0] <= w[1]));
        // mid-orbit the mover sits right of 1, so the running peak overshoots
        assert_eq!(p.running_peak().last(), Some(&q_frac(7, 6)));
        assert_eq!(p.series.last().map(|s| s.1.clone()), Some(q_frac(2, 3)));
    }

    #[test]
    fn entries_match_prefix_application() {
        let tr = gen_cascade(4, 12).unwrap();
        let c0 = LoopClass::round_loop(1, 2, 4).unwrap();
        let r = transport(&tr, &c0, CAP).unwrap();
        assert_eq!(r.entries[0].class, c0);
        assert_eq!(&r.entries[0].config, tr.first());
        for e in &r.entries {
            assert_eq!(
                e.class,
                apply_word(&c0, &r.word.prefix(e.prefix_len), CAP).unwrap()
            );
        }
        let peak = r
            .entries
            .iter()
            .filter_map(|e| e.chart.certificate().map(|c| c.diam_lb.clone()))
            .max();
        assert_eq!(r.peak, peak);
        // samples directly above or below an orbit center have no chart
        assert!(r.entries.iter().any(|e| e.chart == Chart::Skipped));
    }

    #[test]
    fn full_turn_is_invisible_on_classes() {
        let c = collinear(4);
        let tr = gen_rigid(&RigidMotion::full_turn(c.centroid()), &c, 16).unwrap();
        for w in [vec![1, 2], vec![2, -3, 4, 1, 1], vec![3]] {
            let c0 = LoopClass::canonical(4, &w).unwrap();
            let r = transport(&tr, &c0, CAP).unwrap();
            assert_eq!(r.final_class(), &c0);
            assert_eq!(r.entries[0].chart, r.final_entry().chart);
        }
    }

    #[test]
    fn translation_profile_is_constant() {
        let c = collinear(3);
        let tr = gen_rigid(
            &RigidMotion::Translation {
                dx: q_frac(5, 2),
                dy: q_int(-1),
            },
            &c,
            7,
        )
        .unwrap();
        let c0 = LoopClass::canonical(3, &[1, 3, -2]).unwrap();
        let r = transport(&tr, &c0, CAP).unwrap();
        let p = stretch_profile(&r);
        assert_eq!(p.series.len(), 8);
        assert!(p.is_constant());
        let (a, b) = (
            r.entries[0].chart.certificate().unwrap(),
            r.final_entry().chart.certificate().unwrap(),
        );
        assert_eq!(
            (&a.winding, &a.crossed, &a.diam_lb),
            (&b.winding, &b.crossed, &b.diam_lb)
        );
    }

    #[test]
    fn refine_checks_agree() {
        let tr = gen_cascade(4, 16).unwrap();
        let c0 = LoopClass::round_loop(1, 2, 4).unwrap();
        assert!(refine_check(&tr, &c0, 2, CAP).unwrap().agree());
        let c = collinear(3);
        let rot = gen_rigid(&RigidMotion::full_turn(c.centroid()), &c, 12).unwrap();
        let r = refine_check(&rot, &LoopClass::canonical(3, &[1, -2, 3]).unwrap(), 3, CAP).unwrap();
        assert!(r.agree());
        assert_eq!(r.compared, 13);
        let constant = Trajectory::constant(c, vec![q_int(0), q_int(1)]).unwrap();
        for f in 2..5 {
            assert!(
                refine_check(&constant, &LoopClass::round_loop(1, 3, 3).unwrap(), f, CAP)
                    .unwrap()
                    .agree()
            );
        }
    }

    #[test]
    fn cascade_experiment_small_n() {
        let r3 = cascade_experiment(3, 16, CAP).unwrap();
        assert_eq!(r3.certified, q_frac(2, 3));
        assert_eq!(r3.paper_bound, q_frac(1, 2));
        assert!(r3.pass);
        let r4 = cascade_experiment(4, 16, CAP).unwrap();
        assert_eq!(r4.certified, q_frac(3, 4));
        assert_eq!(r4.paper_bound, q_frac(2, 3));
        assert!(r4.pass);
        assert!(matches!(
            cascade_experiment(2, 16, CAP),
            Err(TransportError::Precondition(_))
        ));
    }

    #[test]
    fn crossed_set_grows_with_each_twist() {
        for n in 3..=12usize {
            let tr = gen_cascade(n, 8).unwrap();
            let r = transport(&tr, &LoopClass::round_loop(1, 2, n).unwrap(), CAP).unwrap();
            // entry at the end of the orbit window of slot k
            for k in 1..n {
                let t_end = q_frac(1, (n - k) as i64);
                let e = r.entries.iter().find(|e| e.t == t_end).unwrap();
                let crossed = e.class.crossed();
                assert!(crossed.contains(&(k + 1)), "n={n} k={k}");
                assert_eq!(crossed, (1..=k + 1).collect::<Vec<_>>());
            }
        }
    }

    #[test]
    fn pure_braid_keeps_winding() {
        let tr = gen_cascade(5, 8).unwrap();
        let c0 = LoopClass::canonical(5, &[1, 2, -4, 5, 5]).unwrap();
        let r = transport(&tr, &c0, CAP).unwrap();
        assert!(r.word.is_pure());
        assert_eq!(r.final_class().winding(), c0.winding());
    }

    #[test]
    fn invalid_steps_are_refused() {
        let c = Config::new(vec![
            Point::new(q_int(0), q_int(0)),
            Point::new(q_int(2), q_int(0)),
        ])
        .unwrap();
        let swapped = Config::new(vec![
            Point::new(q_int(2), q_int(0)),
            Point::new(q_int(0), q_int(0)),
        ])
        .unwrap();
        let tr = Trajectory::new(
            vec![
                crate::configspace::Sample {
                    t: q_int(0),
                    config: c,
                },
                crate::configspace::Sample {
                    t: q_int(1),
                    config: swapped,
                },
            ],
            Default::default(),
        )
        .unwrap();
        assert!(transport(&tr, &LoopClass::round_loop(1, 1, 2).unwrap(), CAP).is_err());
        assert!(subdivide(&tr, 2).is_err());
    }

    #[test]
    fn report_json_for_cascade() {
        let tr = gen_cascade(3, 16).unwrap();
        let r = transport(&tr, &LoopClass::round_loop(1, 2, 3).unwrap(), CAP).unwrap();
        let j = transport_report_json(&r);
        assert_eq!(j["experiment"], "cascade");
        assert_eq!(j["pass"], true);
        assert_eq!(j["certified_exact"], "2/3");
        assert_eq!(j["paper_bound"], "0.500000000000");
        assert_eq!(j["final_class"], "1 2 3 2 -3 -2");
    }
}
