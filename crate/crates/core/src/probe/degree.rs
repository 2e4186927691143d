//! Polynomial-degree probing of MLP scorers along parameter lines.
//!
//! Along a line on which every hidden unit stays inside one activation
//! piece, the network output restricted to the line is a polynomial whose
//! degree is bounded by L * alpha^L. The probe partitions the line by
//! activation pattern and checks that the (degree+1)-th equispaced finite
//! difference of the output vanishes inside each region.

use crate::error::{Error, Result};
use crate::policy::MlpScorer;

/// Relative tolerance on the vanishing finite difference.
const DIFF_TOL: f64 = 1e-6;
/// Regions narrower than this are skipped rather than probed.
const MIN_REGION_WIDTH: f64 = 1e-6;
/// Interior margin kept away from region boundaries when sampling.
const INSET: f64 = 0.05;

/// Probe result for one activation-pattern region of the line.
#[derive(Debug, Clone, PartialEq)]
pub struct DegreeRegion {
    pub t_lo: f64,
    pub t_hi: f64,
    /// Smallest degree whose next finite difference vanishes, when one not
    /// exceeding the structural bound exists.
    pub certified_degree: Option<usize>,
    /// Relative magnitude of the (bound+1)-th difference.
    pub max_rel_diff: f64,
    /// Set when the region was skipped instead of probed.
    pub note: Option<String>,
}

fn params_at(w0: &[f64], dir: &[f64], t: f64) -> Vec<f64> {
    w0.iter().zip(dir).map(|(a, d)| a + t * d).collect()
}

fn pattern_at(
    scorer: &MlpScorer,
    input: &[f64],
    w0: &[f64],
    dir: &[f64],
    t: f64,
) -> Result<Vec<usize>> {
    let probe = MlpScorer {
        spec: scorer.spec.clone(),
        w: params_at(w0, dir, t),
    };
    probe.forward_with_pattern(input).map(|(_, p)| p)
}

fn value_at(scorer: &MlpScorer, input: &[f64], w0: &[f64], dir: &[f64], t: f64) -> Result<f64> {
    let probe = MlpScorer {
        spec: scorer.spec.clone(),
        w: params_at(w0, dir, t),
    };
    probe.forward(input)
}

/// Splits [0, 1] into maximal intervals of constant activation pattern.
fn find_regions(
    scorer: &MlpScorer,
    input: &[f64],
    w0: &[f64],
    dir: &[f64],
) -> Result<Vec<(f64, f64, Vec<usize>)>> {
    const GRID: usize = 512;
    let ts: Vec<f64> = (0..=GRID).map(|i| i as f64 / GRID as f64).collect();
    let mut patterns = Vec::with_capacity(ts.len());
    for &t in &ts {
        patterns.push(pattern_at(scorer, input, w0, dir, t)?);
    }

    let mut boundaries = Vec::new();
    for i in 0..GRID {
        if patterns[i] != patterns[i + 1] {
            // Bisect the flip point.
            let (mut lo, mut hi) = (ts[i], ts[i + 1]);
            let left = patterns[i].clone();
            while hi - lo > 1e-9 {
                let mid = 0.5 * (lo + hi);
                if pattern_at(scorer, input, w0, dir, mid)? == left {
                    lo = mid;
                } else {
                    hi = mid;
                }
            }
            boundaries.push(0.5 * (lo + hi));
        }
    }

    let mut edges = vec![0.0];
    edges.extend(boundaries);
    edges.push(1.0);
    let mut regions = Vec::new();
    for w in edges.windows(2) {
        let mid = 0.5 * (w[0] + w[1]);
        regions.push((w[0], w[1], pattern_at(scorer, input, w0, dir, mid)?));
    }
    Ok(regions)
}

/// Probes the degree of the scorer output along `w0 + t * dir`, t in [0, 1].
/// `samples` equispaced interior points per region feed the finite
/// differences; the structural degree bound is L * alpha^L.
pub fn degree_probe(
    scorer: &MlpScorer,
    input: &[f64],
    w0: &[f64],
    dir: &[f64],
    samples: usize,
) -> Result<Vec<DegreeRegion>> {
    let layers = scorer.spec.layers();
    let alpha = scorer.spec.activation.degree();
    let bound = layers * alpha.pow(layers as u32);
    if samples < layers + 3 {
        return Err(Error::Parameter(format!(
            "need at least {} samples for {layers} hidden layers",
            layers + 3
        )));
    }
    if samples < bound + 2 {
        return Err(Error::Parameter(format!(
            "need at least {} samples to form order-{} differences",
            bound + 2,
            bound + 1
        )));
    }
    if w0.len() != scorer.w.len() || dir.len() != scorer.w.len() {
        return Err(Error::Parameter(
            "line dimension does not match parameter count".into(),
        ));
    }

    let mut out = Vec::new();
    for (lo, hi, pattern) in find_regions(scorer, input, w0, dir)? {
        let width = hi - lo;
        if width < MIN_REGION_WIDTH {
            out.push(DegreeRegion {
                t_lo: lo,
                t_hi: hi,
                certified_degree: None,
                max_rel_diff: f64::NAN,
                note: Some("region too short for the requested samples".into()),
            });
            continue;
        }
        let a = lo + width * INSET;
        let b = hi - width * INSET;
        let ts: Vec<f64> = (0..samples)
            .map(|i| a + (b - a) * i as f64 / (samples - 1) as f64)
            .collect();

        let mut consistent = true;
        for &t in &ts {
            if pattern_at(scorer, input, w0, dir, t)? != pattern {
                consistent = false;
                break;
            }
        }
        if !consistent {
            out.push(DegreeRegion {
                t_lo: lo,
                t_hi: hi,
                certified_degree: None,
                max_rel_diff: f64::NAN,
                note: Some("activation pattern flips inside the probe window".into()),
            });
            continue;
        }

        let mut values = Vec::with_capacity(samples);
        for &t in &ts {
            values.push(value_at(scorer, input, w0, dir, t)?);
        }
        let denom = values.iter().fold(1.0f64, |acc, v| acc.max(v.abs()));

        // Successive difference levels; level q holds the q-th differences.
        let mut certified = None;
        let mut level = values.clone();
        let mut rel_at_bound = f64::NAN;
        for q in 1..=bound + 1 {
            level = level.windows(2).map(|w| w[1] - w[0]).collect();
            let max_abs = level.iter().fold(0.0f64, |acc, v| acc.max(v.abs()));
            let rel = max_abs / denom;
            if q == bound + 1 {
                rel_at_bound = rel;
            }
            if certified.is_none() && rel <= DIFF_TOL {
                certified = Some(q - 1);
            }
        }
        out.push(DegreeRegion {
            t_lo: lo,
            t_hi: hi,
            certified_degree: certified,
            max_rel_diff: rel_at_bound,
            note: None,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::policy::{MlpScorer, MlpSpec};
    use crate::rng::SplitMix64;

    fn random_net(layers: usize, seed: u64) -> MlpScorer {
        let mut rng = SplitMix64::new(seed);
        let hidden = vec![3; layers];
        let spec = MlpSpec::relu(4, hidden);
        let w: Vec<f64> = (0..spec.param_count())
            .map(|_| rng.uniform(-1.0, 1.0))
            .collect();
        MlpScorer::new(spec, w).unwrap()
    }

    /// A direction that moves hidden-layer parameters only; the output
    /// layer's block stays fixed, matching the per-layer degree law.
    fn hidden_only_direction(scorer: &MlpScorer, seed: u64) -> Vec<f64> {
        let mut rng = SplitMix64::new(seed);
        let total = scorer.w.len();
        let out_block = scorer.spec.hidden.last().unwrap() + 1;
        (0..total)
            .map(|i| {
                if i < total - out_block {
                    rng.uniform(-1.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect()
    }

    #[test]
    fn zero_network_has_vanishing_differences_everywhere() {
        let spec = MlpSpec::relu(4, vec![3]);
        let scorer = MlpScorer::new(spec.clone(), vec![0.0; spec.param_count()]).unwrap();
        let w0 = vec![0.0; spec.param_count()];
        let dir = vec![0.0; spec.param_count() - 4]
            .into_iter()
            .chain(vec![0.0; 4])
            .collect::<Vec<_>>();
        let regions = degree_probe(&scorer, &[0.3, -0.2, 0.8, 0.1], &w0, &dir, 8).unwrap();
        for r in regions {
            assert!(r.note.is_some() || r.max_rel_diff <= DIFF_TOL);
        }
    }

    #[test]
    fn single_hidden_layer_is_degree_one_within_regions() {
        for seed in 0..10 {
            let scorer = random_net(1, seed);
            let w0 = scorer.w.clone();
            let dir = hidden_only_direction(&scorer, seed ^ 0xabc);
            let input = [0.5, -0.3, 0.9, 0.2];
            for r in degree_probe(&scorer, &input, &w0, &dir, 8).unwrap() {
                if r.note.is_none() {
                    assert!(
                        r.max_rel_diff <= DIFF_TOL,
                        "seed {seed}: second differences {} too large",
                        r.max_rel_diff
                    );
                    assert!(r.certified_degree.unwrap_or(99) <= 1);
                }
            }
        }
    }

    #[test]
    fn two_hidden_layers_show_interior_flips_but_bounded_degree() {
        let mut any_flip = false;
        for seed in 0..10 {
            let scorer = random_net(2, seed);
            let w0 = scorer.w.clone();
            let dir = hidden_only_direction(&scorer, seed ^ 0x5f);
            let input = [0.5, -0.3, 0.9, 0.2];
            let regions = degree_probe(&scorer, &input, &w0, &dir, 9).unwrap();
            if regions.len() > 1 {
                any_flip = true;
            }
            for r in &regions {
                if r.note.is_none() {
                    assert!(
                        r.max_rel_diff <= DIFF_TOL,
                        "seed {seed}: {}",
                        r.max_rel_diff
                    );
                }
            }
        }
        assert!(any_flip, "no fixture produced an interior activation flip");
    }

    #[test]
    fn sample_floor_enforced() {
        let scorer = random_net(2, 1);
        let w0 = scorer.w.clone();
        let dir = vec![0.0; w0.len()];
        assert!(degree_probe(&scorer, &[0.0; 4], &w0, &dir, 3).is_err());
    }
}
