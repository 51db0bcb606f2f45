use serde::{Deserialize, Serialize};

use super::EvalError;
use crate::rank::IntensityLevel;

/// Fraction of positions where `pred` equals `truth`.
pub fn classification_accuracy<L: PartialEq>(pred: &[L], truth: &[L]) -> Result<f64, EvalError> {
    if pred.len() != truth.len() {
        return Err(EvalError::LengthMismatch(format!(
            "{} predictions for {} labels",
            pred.len(),
            truth.len()
        )));
    }
    if pred.is_empty() {
        return Err(EvalError::Empty("label list"));
    }
    let correct = pred.iter().zip(truth).filter(|(p, t)| p == t).count();
    Ok(correct as f64 / pred.len() as f64)
}

/// One listener judgment in the perceptual intensity ranking test.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct PirResponse {
    pub rater_id: String,
    pub utterance_id: String,
    pub perceived: IntensityLevel,
    pub annotated: IntensityLevel,
}

/// Rows are annotated levels, columns perceived levels, both Low/Medium/High.
#[derive(Debug, Clone, PartialEq, Eq, Serialize, Deserialize)]
pub struct ConfusionMatrix {
    pub labels: Vec<String>,
    pub counts: Vec<Vec<u64>>,
}

impl ConfusionMatrix {
    pub fn total(&self) -> u64 {
        self.counts.iter().flatten().sum()
    }

    pub fn trace(&self) -> u64 {
        (0..self.counts.len()).map(|i| self.counts[i][i]).sum()
    }

    pub fn row_sums(&self) -> Vec<u64> {
        self.counts.iter().map(|r| r.iter().sum()).collect()
    }

    /// Diagonal over row sum; `None` for levels with no responses.
    pub fn recall(&self) -> Vec<Option<f64>> {
        self.row_sums()
            .iter()
            .enumerate()
            .map(|(i, &n)| (n > 0).then(|| self.counts[i][i] as f64 / n as f64))
            .collect()
    }

    pub fn accuracy(&self) -> f64 {
        let total = self.total();
        if total == 0 {
            0.0
        } else {
            self.trace() as f64 / total as f64
        }
    }
}

pub fn pir_confusion(responses: &[PirResponse]) -> Result<ConfusionMatrix, EvalError> {
    if responses.is_empty() {
        return Err(EvalError::Empty("PIR responses"));
    }
    let mut counts = vec![vec![0u64; 3]; 3];
    for r in responses {
        counts[r.annotated.index()][r.perceived.index()] += 1;
    }
    Ok(ConfusionMatrix {
        labels: IntensityLevel::ALL.iter().map(|l| l.to_string()).collect(),
        counts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use IntensityLevel::*;

    fn resp(annotated: IntensityLevel, perceived: IntensityLevel) -> PirResponse {
        PirResponse {
            rater_id: "r".into(),
            utterance_id: "u".into(),
            perceived,
            annotated,
        }
    }

    #[test]
    fn accuracy_cases() {
        assert_eq!(classification_accuracy(&[1, 2, 3], &[1, 2, 3]).unwrap(), 1.0);
        let truth = vec![0u8; 1000];
        let pred: Vec<u8> = (0..1000).map(|i| u8::from(i >= 797)).collect();
        assert_eq!(classification_accuracy(&pred, &truth).unwrap(), 0.797);
        assert!(classification_accuracy::<u8>(&[], &[]).is_err());
        assert!(classification_accuracy(&[1], &[1, 2]).is_err());
    }

    #[test]
    fn perfect_pir() {
        let rs: Vec<_> = IntensityLevel::ALL.iter().map(|&l| resp(l, l)).collect();
        let m = pir_confusion(&rs).unwrap();
        assert_eq!(m.counts, vec![vec![1, 0, 0], vec![0, 1, 0], vec![0, 0, 1]]);
        assert_eq!(m.accuracy(), 1.0);
    }

    #[test]
    fn single_off_diagonal() {
        let m = pir_confusion(&[resp(Low, High)]).unwrap();
        assert_eq!(m.counts[0][2], 1);
        assert_eq!(m.total(), 1);
        assert_eq!(m.accuracy(), 0.0);
        assert_eq!(m.recall(), vec![Some(0.0), None, None]);
    }

    #[test]
    fn empty_is_error() {
        assert!(pir_confusion(&[]).is_err());
    }
}
