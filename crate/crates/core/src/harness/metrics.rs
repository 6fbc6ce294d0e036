//! Test-set metrics with +1 as the positive class.

use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graph::NodeId;
use crate::label::Label;
use crate::predictor::Predictions;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Metric {
    ErrorRate,
    FMeasure,
}

impl fmt::Display for Metric {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Metric::ErrorRate => "error_rate",
            Metric::FMeasure => "f_measure",
        })
    }
}

impl FromStr for Metric {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "error_rate" | "error" => Ok(Metric::ErrorRate),
            "f_measure" | "f1" => Ok(Metric::FMeasure),
            _ => Err(Error::Config(format!("unknown metric {s:?}"))),
        }
    }
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq)]
pub struct Confusion {
    pub tp: usize,
    pub fp: usize,
    pub fn_: usize,
    pub tn: usize,
}

impl Confusion {
    pub fn from_pairs(pairs: impl IntoIterator<Item = (Label, Label)>) -> Result<Self> {
        let mut c = Confusion::default();
        for (pred, truth) in pairs {
            match (pred, truth) {
                (Label::Pos, Label::Pos) => c.tp += 1,
                (Label::Pos, Label::Neg) => c.fp += 1,
                (Label::Neg, Label::Pos) => c.fn_ += 1,
                (Label::Neg, Label::Neg) => c.tn += 1,
            }
        }
        if c.total() == 0 {
            return Err(Error::EmptyTestSet);
        }
        Ok(c)
    }

    /// Confusion counts over `test`; every test node must have a prediction.
    pub fn evaluate(pred: &Predictions, truth: &[Label], test: &[NodeId]) -> Result<Self> {
        let pairs = test
            .iter()
            .map(|&v| {
                pred.get(v)
                    .map(|p| (p, truth[v]))
                    .ok_or_else(|| Error::Config(format!("no prediction for test node {v}")))
            })
            .collect::<Result<Vec<_>>>()?;
        Self::from_pairs(pairs)
    }

    pub fn total(&self) -> usize {
        self.tp + self.fp + self.fn_ + self.tn
    }

    pub fn error_rate(&self) -> f64 {
        (self.fp + self.fn_) as f64 / self.total() as f64
    }

    /// Zero predicted positives give precision 0; precision + recall = 0
    /// gives F = 0.
    pub fn f_measure(&self) -> f64 {
        let ratio = |a: usize, b: usize| if b == 0 { 0.0 } else { a as f64 / b as f64 };
        let p = ratio(self.tp, self.tp + self.fp);
        let r = ratio(self.tp, self.tp + self.fn_);
        if p + r == 0.0 {
            0.0
        } else {
            2.0 * p * r / (p + r)
        }
    }

    pub fn metric(&self, m: Metric) -> f64 {
        match m {
            Metric::ErrorRate => self.error_rate(),
            Metric::FMeasure => self.f_measure(),
        }
    }
}

pub fn score(pred: &Predictions, truth: &[Label], test: &[NodeId], m: Metric) -> Result<f64> {
    Confusion::evaluate(pred, truth, test).map(|c| c.metric(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use Label::{Neg, Pos};

    #[test]
    fn perfect() {
        let c = Confusion::from_pairs([(Pos, Pos), (Neg, Neg)]).unwrap();
        assert_eq!((c.error_rate(), c.f_measure()), (0.0, 1.0));
    }

    #[test]
    fn all_negative_predictions() {
        let c = Confusion::from_pairs([(Neg, Pos), (Neg, Neg)]).unwrap();
        assert_eq!(c.f_measure(), 0.0);
        assert_eq!(c.error_rate(), 0.5);
    }

    #[test]
    fn two_thirds() {
        let c = Confusion::from_pairs([(Pos, Pos), (Pos, Pos), (Pos, Neg), (Neg, Pos)]).unwrap();
        assert!((c.f_measure() - 2.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn empty_and_missing() {
        assert!(matches!(
            Confusion::from_pairs([]),
            Err(Error::EmptyTestSet)
        ));
        let p = Predictions::new(2);
        assert!(score(&p, &[Pos, Pos], &[0], Metric::ErrorRate).is_err());
    }
}
