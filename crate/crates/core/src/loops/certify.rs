//! Diameter lower bounds for loop classes.
//!
//! Cut the plane along the vertical downward ray from each puncture. A cyclically
//! reduced word forms no bigons with this cut system, so every loop in the class
//! crosses the ray of each generator occurring in the word. Such a loop meets the
//! vertical lines through all of those punctures, and its diameter is at least the
//! x-extent of them. The bound depends on the chart and is not tight.

use num_traits::Zero;
use serde::Serialize;

use super::{LoopClass, LoopError};
use crate::configspace::Config;
use crate::rational::{fmt_decimal, fmt_q, Q};

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Certificate {
    pub winding: Vec<i64>,
    pub crossed: Vec<usize>,
    pub diam_lb: Q,
    /// x-coordinates of the punctures in chart order.
    pub xs: Vec<Q>,
}

#[derive(Serialize)]
struct CertificateJson<'a> {
    winding: &'a [i64],
    crossed: &'a [usize],
    diam_lb: String,
    diam_lb_exact: String,
}

impl Certificate {
    pub fn to_json(&self) -> serde_json::Value {
        serde_json::to_value(CertificateJson {
            winding: &self.winding,
            crossed: &self.crossed,
            diam_lb: fmt_decimal(&self.diam_lb, 12),
            diam_lb_exact: fmt_q(&self.diam_lb),
        })
        .expect("certificate serializes")
    }
}

pub fn certify(c: &LoopClass, q: &Config) -> Result<Certificate, LoopError> {
    if q.len() != c.n() {
        return Err(LoopError::StrandMismatch {
            class: c.n(),
            other: q.len(),
        });
    }
    let xs = q.sorted_x().ok_or(LoopError::ChartError)?;
    let crossed = c.crossed();
    let diam_lb = match (crossed.first(), crossed.last()) {
        (Some(&lo), Some(&hi)) if lo != hi => &xs[hi - 1] - &xs[lo - 1],
        _ => Q::zero(),
    };
    Ok(Certificate {
        winding: c.winding(),
        crossed,
        diam_lb,
        xs,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::configspace::Point;
    use crate::rational::{q_frac, q_int};

    fn f3() -> Config {
        Config::new(
            [q_frac(1, 3), q_frac(1, 2), q_int(1)]
                .into_iter()
                .map(|x| Point::new(x, q_int(0)))
                .collect(),
        )
        .unwrap()
    }

    #[test]
    fn trivial_class_has_zero_bound() {
        let cert = certify(&LoopClass::trivial(3), &f3()).unwrap();
        assert!(cert.diam_lb.is_zero());
        assert!(cert.crossed.is_empty());
    }

    #[test]
    fn single_puncture_has_zero_bound() {
        let cert = certify(&LoopClass::round_loop(2, 2, 3).unwrap(), &f3()).unwrap();
        assert!(cert.diam_lb.is_zero());
        assert_eq!(cert.winding, vec![0, 1, 0]);
    }

    #[test]
    fn left_pair_bound_is_one_sixth() {
        let cert = certify(&LoopClass::round_loop(1, 2, 3).unwrap(), &f3()).unwrap();
        assert_eq!(cert.crossed, vec![1, 2]);
        assert_eq!(cert.diam_lb, q_frac(1, 6));
    }

    #[test]
    fn dragged_class_spans_all_three() {
        let c = LoopClass::canonical(3, &[1, 2, 3, 2, -3, -2]).unwrap();
        let cert = certify(&c, &f3()).unwrap();
        assert_eq!(cert.crossed, vec![1, 2, 3]);
        assert_eq!(cert.diam_lb, q_frac(2, 3));
        assert!(cert.diam_lb > q_frac(1, 2));
        assert_eq!(cert.winding, vec![1, 1, 0]);
        let j = cert.to_json();
        assert_eq!(j["diam_lb_exact"], "2/3");
        assert_eq!(j["diam_lb"], "0.666666666667");
    }

    #[test]
    fn repeated_x_is_chart_error() {
        let q = Config::new(vec![
            Point::new(q_int(0), q_int(0)),
            Point::new(q_int(0), q_int(1)),
        ])
        .unwrap();
        assert_eq!(
            certify(&LoopClass::round_loop(1, 2, 2).unwrap(), &q),
            Err(LoopError::ChartError)
        );
    }
}
