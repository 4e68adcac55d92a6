//! L2-regularized logistic regression trained by full-batch gradient descent.
//!
//! Hyperparameters: `learning_rate` (default 0.1), `l2_penalty` (default 0),
//! `epochs` (default 100). Weights start at zero, so training is
//! deterministic and ignores the seed.

use crate::data::Dataset;
use crate::space::Configuration;

use super::{hyper_f64, hyper_usize, FeatureEncoder, LearnerError, Scorer, TrainInput};

#[derive(Debug, Clone)]
pub struct LogisticModel {
    encoder: FeatureEncoder,
    weights: Vec<f64>,
    bias: f64,
}

fn sigmoid(z: f64) -> f64 {
    if z >= 0.0 {
        1.0 / (1.0 + (-z).exp())
    } else {
        let e = z.exp();
        e / (1.0 + e)
    }
}

pub fn fit(config: &Configuration, input: TrainInput<'_>) -> Result<LogisticModel, LearnerError> {
    let learning_rate = hyper_f64(config, "learning_rate", 0.1)?;
    let l2 = hyper_f64(config, "l2_penalty", 0.0)?;
    let epochs = hyper_usize(config, "epochs", 100)?;
    if learning_rate <= 0.0 {
        return Err(LearnerError::Hyperparameter {
            name: "learning_rate".into(),
            reason: format!("must be positive, got {learning_rate}"),
        });
    }
    if l2 < 0.0 {
        return Err(LearnerError::Hyperparameter {
            name: "l2_penalty".into(),
            reason: format!("must be non-negative, got {l2}"),
        });
    }

    let encoder = FeatureEncoder::fit(input.train, input.rows);
    let x = encoder.transform(input.train, input.rows)?;
    let y: Vec<f64> = input.rows.iter().map(|&r| input.train.labels()[r] as f64).collect();
    let d = encoder.width();
    let n = y.len() as f64;

    let mut weights = vec![0.0; d];
    let mut bias = 0.0;
    let mut grad = vec![0.0; d];
    for _ in 0..epochs {
        grad.iter_mut().for_each(|g| *g = 0.0);
        let mut grad_bias = 0.0;
        for (row, &target) in x.chunks_exact(d.max(1)).zip(&y) {
            let z = bias + row.iter().zip(&weights).map(|(a, w)| a * w).sum::<f64>();
            let err = sigmoid(z) - target;
            grad_bias += err;
            for (g, a) in grad.iter_mut().zip(row) {
                *g += err * a;
            }
        }
        for (w, g) in weights.iter_mut().zip(&grad) {
            *w -= learning_rate * (g / n + l2 * *w);
        }
        bias -= learning_rate * grad_bias / n;
    }
    Ok(LogisticModel { encoder, weights, bias })
}

impl LogisticModel {
    pub fn weights(&self) -> &[f64] {
        &self.weights
    }
}

impl Scorer for LogisticModel {
    fn score_rows(&self, rows: &Dataset) -> Result<Vec<f64>, LearnerError> {
        let x = self.encoder.transform_all(rows)?;
        let d = self.encoder.width();
        if d == 0 {
            return Ok(vec![sigmoid(self.bias); rows.len()]);
        }
        Ok(x.chunks_exact(d)
            .map(|row| sigmoid(self.bias + row.iter().zip(&self.weights).map(|(a, w)| a * w).sum::<f64>()))
            .collect())
    }
}
