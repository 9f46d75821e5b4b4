//! Classification evaluation: per-class precision/recall/F1 and a confusion
//! matrix. Macro averages are unweighted means over classes present in the
//! prediction or gold sets.

use super::TextModelError;

/// Per-class and macro-averaged classification metrics.
///
/// `confusion[i][j]` counts items with gold class `i` predicted as class `j`;
/// row sums therefore equal gold class counts. Undefined ratios (no
/// predictions or no gold items for a class) are reported as 0.
#[derive(Debug, Clone)]
pub struct EvalReport {
    pub classes: Vec<String>,
    pub precision: Vec<f64>,
    pub recall: Vec<f64>,
    pub f1: Vec<f64>,
    pub macro_precision: f64,
    pub macro_recall: f64,
    pub macro_f1: f64,
    pub confusion: Vec<Vec<usize>>,
}

impl EvalReport {
    /// Overall accuracy: trace of the confusion matrix over the total count.
    pub fn accuracy(&self) -> f64 {
        let correct: usize = (0..self.classes.len()).map(|i| self.confusion[i][i]).sum();
        let total: usize = self.confusion.iter().flatten().sum();
        correct as f64 / total as f64
    }
}

/// Compares predicted labels against gold labels.
pub fn evaluate(pred: &[String], gold: &[String]) -> Result<EvalReport, TextModelError> {
    if pred.len() != gold.len() {
        return Err(TextModelError::LengthMismatch {
            labels: gold.len(),
            rows: pred.len(),
        });
    }
    if pred.is_empty() {
        return Err(TextModelError::EmptyCorpus);
    }

    let mut classes: Vec<String> = pred.iter().chain(gold).cloned().collect();
    classes.sort();
    classes.dedup();
    let index = |label: &String| classes.binary_search(label).expect("label in class list");

    let n = classes.len();
    let mut confusion = vec![vec![0usize; n]; n];
    for (p, g) in pred.iter().zip(gold) {
        confusion[index(g)][index(p)] += 1;
    }

    let mut precision = vec![0.0; n];
    let mut recall = vec![0.0; n];
    let mut f1 = vec![0.0; n];
    for c in 0..n {
        let tp = confusion[c][c];
        let pred_total: usize = (0..n).map(|g| confusion[g][c]).sum();
        let gold_total: usize = confusion[c].iter().sum();
        precision[c] = ratio(tp, pred_total);
        recall[c] = ratio(tp, gold_total);
        f1[c] = if precision[c] + recall[c] == 0.0 {
            0.0
        } else {
            2.0 * precision[c] * recall[c] / (precision[c] + recall[c])
        };
    }

    let mean = |xs: &[f64]| xs.iter().sum::<f64>() / xs.len() as f64;
    Ok(EvalReport {
        macro_precision: mean(&precision),
        macro_recall: mean(&recall),
        macro_f1: mean(&f1),
        classes,
        precision,
        recall,
        f1,
        confusion,
    })
}

fn ratio(num: usize, den: usize) -> f64 {
    if den == 0 {
        0.0
    } else {
        num as f64 / den as f64
    }
}
