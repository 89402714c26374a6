//! Summarization with a diversity reward: `f(x) = sum_j h(sum_{i in P_j} r_i x_i)`.

use crate::analytic::AnalyticKernel;
use crate::error::{input, Result};
use crate::matroid::PartitionMatroid;
use crate::objective::{CompositeObjective, CompositeTerm};
use crate::polynomial::{Basis, Monomial, MultilinearPoly};
use crate::scalar::Scalar;

#[derive(Clone, Debug, PartialEq)]
pub struct SummarizationSpec {
    /// Non-negative rewards summing to 1.
    pub rewards: Vec<f64>,
    /// Similarity blocks partitioning the ground set.
    pub blocks: Vec<Vec<usize>>,
    pub matroid: PartitionMatroid,
}

impl SummarizationSpec {
    pub fn new(rewards: Vec<f64>, blocks: Vec<Vec<usize>>, matroid: PartitionMatroid) -> Result<Self> {
        let n = rewards.len();
        if let Some(r) = rewards.iter().find(|r| !(**r >= 0.0 && r.is_finite())) {
            return input(format!("reward {r} is negative or not finite"));
        }
        let total: f64 = rewards.iter().sum();
        if (total - 1.0).abs() > 1e-9 {
            return input(format!("rewards sum to {total}, expected 1"));
        }
        let mut seen = vec![false; n];
        for &i in blocks.iter().flatten() {
            if i >= n || seen[i] {
                return input(format!("similarity blocks do not partition 0..{n}"));
            }
            seen[i] = true;
        }
        if seen.iter().any(|s| !s) {
            return input(format!("similarity blocks do not cover 0..{n}"));
        }
        if matroid.ground_size() != n {
            return input("matroid ground size differs from the reward vector");
        }
        Ok(SummarizationSpec {
            rewards,
            blocks,
            matroid,
        })
    }

    /// Scales raw non-negative rewards to sum to 1 before validating.
    pub fn normalized(raw: Vec<f64>, blocks: Vec<Vec<usize>>, matroid: PartitionMatroid) -> Result<Self> {
        let total: f64 = raw.iter().sum();
        if !(total > 0.0) {
            return input("rewards must have a positive sum");
        }
        Self::new(raw.iter().map(|r| r / total).collect(), blocks, matroid)
    }
}

/// One unit-weight term per similarity block with a linear inner function.
pub fn build_sm<T: Scalar>(
    spec: &SummarizationSpec,
    kernel: AnalyticKernel<T>,
) -> Result<(CompositeObjective<T>, PartitionMatroid)> {
    let n = spec.rewards.len();
    let terms = spec
        .blocks
        .iter()
        .map(|block| {
            let inner = MultilinearPoly::from_terms(
                n,
                Basis::Standard,
                block.iter().map(|&i| Monomial::new(T::lit(spec.rewards[i]), [i])),
            )?;
            Ok(CompositeTerm {
                weight: T::one(),
                kernel,
                inner,
            })
        })
        .collect::<Result<Vec<_>>>()?;
    Ok((
        CompositeObjective::new(n, terms, T::zero())?,
        spec.matroid.clone(),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn examples() {
        let one = SummarizationSpec::new(
            vec![0.6, 0.4],
            vec![vec![0, 1]],
            PartitionMatroid::uniform(2, 1).unwrap(),
        )
        .unwrap();
        let (obj, _) = build_sm::<f64>(&one, AnalyticKernel::log1p()).unwrap();
        assert_relative_eq!(obj.exact_value(&[true, true]).unwrap(), 2f64.ln());
        assert_eq!(obj.exact_value(&[false, false]).unwrap(), 0.0);

        let two = SummarizationSpec::new(
            vec![0.6, 0.4],
            vec![vec![0], vec![1]],
            PartitionMatroid::uniform(2, 1).unwrap(),
        )
        .unwrap();
        let (obj, _) = build_sm::<f64>(&two, AnalyticKernel::log1p()).unwrap();
        assert_relative_eq!(obj.exact_value(&[true, false]).unwrap(), 0.470004, epsilon = 1e-6);
        assert_eq!(obj.terms().len(), 2);
    }

    #[test]
    fn rejects_unnormalized() {
        let mat = PartitionMatroid::uniform(2, 1).unwrap();
        assert!(SummarizationSpec::new(vec![0.6, 0.6], vec![vec![0, 1]], mat.clone()).is_err());
        assert!(SummarizationSpec::new(vec![0.6, 0.4], vec![vec![0]], mat.clone()).is_err());
        let s = SummarizationSpec::normalized(vec![3.0, 1.0], vec![vec![0, 1]], mat).unwrap();
        assert_eq!(s.rewards, vec![0.75, 0.25]);
    }
}
