//! Empirical shattering search: the largest instance subset whose 2^N
//! above/below threshold patterns all occur among sampled parameter vectors.
//! The result is a certified lower bound on the pseudo-dimension of the cost
//! class restricted to the sample.

use crate::engine::{BncConfig, PenaltySpec};
use crate::error::{Error, Result};
use crate::instance::MipInstance;
use crate::policy::PolicyTemplate;
use std::collections::BTreeSet;

use super::census::{sample_cost_vectors, ParamSampler};

/// Largest shattered subset found, with the witness thresholds.
#[derive(Debug, Clone, PartialEq)]
pub struct ShatterResult {
    /// Indices into the instance list.
    pub subset: Vec<usize>,
    /// One threshold per subset member, aligned with `subset`.
    pub thresholds: Vec<f64>,
}

impl ShatterResult {
    pub fn size(&self) -> usize {
        self.subset.len()
    }
}

fn patterns_complete(vectors: &[Vec<f64>], subset: &[usize], thresholds: &[f64]) -> bool {
    let need = 1usize << subset.len();
    let mut seen: BTreeSet<usize> = BTreeSet::new();
    for v in vectors {
        let mut bits = 0usize;
        for (pos, (&i, &y)) in subset.iter().zip(thresholds).enumerate() {
            if v[i] > y {
                bits |= 1 << pos;
            }
        }
        seen.insert(bits);
        if seen.len() == need {
            return true;
        }
    }
    false
}

/// Greedy shattering search over pre-sampled cost vectors. Candidate
/// thresholds default to midpoints between consecutive distinct observed
/// values of each instance; an explicit `thresholds` list (one per instance)
/// pins them instead.
pub fn shatter_from_samples(
    vectors: &[Vec<f64>],
    thresholds: Option<&[f64]>,
    max_subset: usize,
) -> Result<ShatterResult> {
    if max_subset > 20 {
        return Err(Error::Parameter(
            "shatter search caps the subset size at 20".into(),
        ));
    }
    let Some(first) = vectors.first() else {
        return Ok(ShatterResult {
            subset: Vec::new(),
            thresholds: Vec::new(),
        });
    };
    let n = first.len();
    if let Some(ys) = thresholds {
        if ys.len() != n {
            return Err(Error::Parameter(format!(
                "expected {n} thresholds, got {}",
                ys.len()
            )));
        }
    }

    // Candidate thresholds per instance.
    let mut candidates: Vec<Vec<f64>> = Vec::with_capacity(n);
    for i in 0..n {
        match thresholds {
            Some(ys) => candidates.push(vec![ys[i]]),
            None => {
                let mut values: Vec<f64> = vectors.iter().map(|v| v[i]).collect();
                values.sort_by(|a, b| a.partial_cmp(b).unwrap());
                values.dedup();
                candidates.push(values.windows(2).map(|w| 0.5 * (w[0] + w[1])).collect());
            }
        }
    }

    let mut subset: Vec<usize> = Vec::new();
    let mut chosen: Vec<f64> = Vec::new();
    loop {
        if subset.len() == max_subset {
            break;
        }
        let mut extended = false;
        'candidates: for i in 0..n {
            if subset.contains(&i) {
                continue;
            }
            for &y in &candidates[i] {
                let mut trial_subset = subset.clone();
                trial_subset.push(i);
                let mut trial_thresholds = chosen.clone();
                trial_thresholds.push(y);
                if patterns_complete(vectors, &trial_subset, &trial_thresholds) {
                    subset = trial_subset;
                    chosen = trial_thresholds;
                    extended = true;
                    break 'candidates;
                }
            }
        }
        if !extended {
            break;
        }
    }
    Ok(ShatterResult {
        subset,
        thresholds: chosen,
    })
}

/// Samples the parameter space and searches for a shattered instance subset.
pub fn shatter_search(
    instances: &[MipInstance],
    template: &PolicyTemplate,
    cfg: &BncConfig,
    penalties: &PenaltySpec,
    sampler: &ParamSampler,
    thresholds: Option<&[f64]>,
    max_subset: usize,
) -> Result<ShatterResult> {
    let vectors = sample_cost_vectors(instances, template, cfg, penalties, sampler)?;
    shatter_from_samples(&vectors, thresholds, max_subset)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_family_cannot_be_shattered() {
        let vectors = vec![vec![5.0, 2.0]; 10];
        let r = shatter_from_samples(&vectors, None, 4).unwrap();
        assert_eq!(r.size(), 0);
    }

    #[test]
    fn two_values_on_one_instance_shatter_a_singleton() {
        let vectors = vec![vec![1.0], vec![4.0], vec![1.0]];
        let r = shatter_from_samples(&vectors, None, 4).unwrap();
        assert_eq!(r.size(), 1);
        assert_eq!(r.subset, vec![0]);
        assert_eq!(r.thresholds, vec![2.5]);
    }

    #[test]
    fn independent_pair_is_shattered() {
        // All four above/below combinations occur.
        let vectors = vec![
            vec![0.0, 0.0],
            vec![0.0, 1.0],
            vec![1.0, 0.0],
            vec![1.0, 1.0],
        ];
        let r = shatter_from_samples(&vectors, None, 4).unwrap();
        assert_eq!(r.size(), 2);
    }

    #[test]
    fn correlated_pair_is_not_shattered() {
        // The two coordinates always move together: only 2 patterns.
        let vectors = vec![vec![0.0, 0.0], vec![1.0, 1.0]];
        let r = shatter_from_samples(&vectors, None, 4).unwrap();
        assert_eq!(r.size(), 1);
    }

    #[test]
    fn explicit_thresholds_are_respected() {
        let vectors = vec![vec![0.0], vec![4.0]];
        let r = shatter_from_samples(&vectors, Some(&[10.0]), 4).unwrap();
        // Both values sit below 10, so no pattern variety.
        assert_eq!(r.size(), 0);
    }

    #[test]
    fn subset_cap_enforced() {
        assert!(shatter_from_samples(&[], None, 21).is_err());
    }
}
