use super::{ObjectiveError, PretrainExample};

/// Conditional next-token distribution over the vocabulary.
pub trait LossOracle {
    /// `ln P(next | prefix, input)`; must be `<= 0`.
    fn logprob(&self, prefix: &[u32], input: &[u32], next: u32) -> f64;
}

impl<F> LossOracle for F
where
    F: Fn(&[u32], &[u32], u32) -> f64,
{
    fn logprob(&self, prefix: &[u32], input: &[u32], next: u32) -> f64 {
        self(prefix, input, next)
    }
}

/// Negative log-likelihood of the example's target given its input:
/// `sum_t -logprob(target[..t], input, target[t])`.
pub fn reference_nll(ex: &PretrainExample, oracle: &dyn LossOracle) -> Result<f64, ObjectiveError> {
    let mut total = 0.0;
    for (t, &next) in ex.target_ids.iter().enumerate() {
        let lp = oracle.logprob(&ex.target_ids[..t], &ex.input_ids, next);
        if lp > 0.0 || lp.is_nan() {
            return Err(ObjectiveError::PositiveLogProb(lp));
        }
        total -= lp;
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::objectives::{ExampleMeta, Task};

    fn example(target: Vec<u32>) -> PretrainExample {
        PretrainExample {
            task: Task::Sclm,
            input_ids: vec![5, 6],
            target_ids: target,
            corpus_id: "c".into(),
            meta: ExampleMeta::default(),
        }
    }

    #[test]
    fn uniform_oracle() {
        let uniform = |_: &[u32], _: &[u32], _: u32| -(10f64.ln());
        let nll = reference_nll(&example(vec![3, 4, 5, 1]), &uniform).unwrap();
        assert!((nll - 4.0 * 10f64.ln()).abs() < 1e-12);
    }

    #[test]
    fn delta_oracle() {
        let target = vec![3, 4, 5, 1];
        let t2 = target.clone();
        let delta = move |prefix: &[u32], _: &[u32], next: u32| {
            if t2[prefix.len()] == next {
                0.0
            } else {
                f64::NEG_INFINITY
            }
        };
        assert_eq!(reference_nll(&example(target), &delta).unwrap(), 0.0);
    }

    #[test]
    fn positive_logprob_rejected() {
        let bad = |_: &[u32], _: &[u32], _: u32| 0.1;
        assert!(reference_nll(&example(vec![1]), &bad).is_err());
    }
}
