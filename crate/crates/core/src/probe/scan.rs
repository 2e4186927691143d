//! One-dimensional slice scans: locate the breakpoints of a piecewise
//! constant cost along a parameter line and validate constancy on each piece.

use crate::engine::{solve_bnc, BncConfig, PenaltySpec};
use crate::error::{Error, Result};
use crate::exec::map_indexed;
use crate::instance::MipInstance;
use crate::policy::PolicyTemplate;
use crate::rng::{Fnv64, SplitMix64};

/// Rounds of reprobe-and-refine before a non-constant piece is reported as a
/// structural violation.
const MAX_REFINE_ROUNDS: usize = 8;
/// Pieces narrower than this many bisection tolerances are boundary slivers
/// and are not probed.
const SLIVER_FACTOR: f64 = 4.0;

/// A scanned slice: breakpoints of the total cost along `anchor + t * direction`
/// over `interval`, the constant value on each piece, and every sample taken.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceScan {
    /// Anchor after the seeded degeneracy jitter.
    pub anchor: Vec<f64>,
    pub direction: Vec<f64>,
    pub interval: (f64, f64),
    pub breakpoints: Vec<f64>,
    pub piece_values: Vec<f64>,
    pub grid0: usize,
    pub bisect_tol: f64,
    /// All evaluated (t, total cost) pairs, ascending in t.
    pub samples: Vec<(f64, f64)>,
}

/// Core scanner over an arbitrary cost function of one variable.
pub fn scan_line<F>(
    eval: F,
    interval: (f64, f64),
    grid0: usize,
    bisect_tol: f64,
) -> Result<(Vec<f64>, Vec<f64>, Vec<(f64, f64)>)>
where
    F: Fn(f64) -> Result<f64> + Sync,
{
    let (t_lo, t_hi) = interval;
    if grid0 < 2 {
        return Err(Error::Parameter(
            "initial grid must have at least 2 cells".into(),
        ));
    }
    if !(t_lo < t_hi) {
        return Err(Error::Parameter("empty scan interval".into()));
    }
    if !(bisect_tol > 0.0) {
        return Err(Error::Parameter("bisect tolerance must be positive".into()));
    }

    let ts: Vec<f64> = (0..=grid0)
        .map(|i| t_lo + (t_hi - t_lo) * i as f64 / grid0 as f64)
        .collect();
    let vals = map_indexed(ts.len(), |i| eval(ts[i]));
    let mut samples: Vec<(f64, f64)> = Vec::with_capacity(ts.len());
    for (t, v) in ts.into_iter().zip(vals) {
        samples.push((t, v?));
    }

    for _ in 0..MAX_REFINE_ROUNDS {
        // Narrow every bracket with differing endpoint values below tol.
        loop {
            let mids: Vec<f64> = samples
                .windows(2)
                .filter(|w| w[0].1 != w[1].1 && w[1].0 - w[0].0 >= bisect_tol)
                .map(|w| 0.5 * (w[0].0 + w[1].0))
                .collect();
            if mids.is_empty() {
                break;
            }
            let vals = map_indexed(mids.len(), |i| eval(mids[i]));
            for (t, v) in mids.into_iter().zip(vals) {
                insert_sample(&mut samples, t, v?);
            }
        }

        let breakpoints: Vec<f64> = samples
            .windows(2)
            .filter(|w| w[0].1 != w[1].1)
            .map(|w| 0.5 * (w[0].0 + w[1].0))
            .collect();

        // More breakpoints than grid cells means the value changes on a
        // scale finer than the scan can resolve: not piecewise constant.
        if breakpoints.len() > grid0.max(64) {
            let w = samples.windows(2).find(|w| w[0].1 != w[1].1).unwrap();
            return Err(Error::StructuralViolation {
                t: w[1].0,
                expected: w[0].1,
                found: w[1].1,
                detail: format!(
                    "{} breakpoints exceed the {}-cell grid resolution",
                    breakpoints.len(),
                    grid0
                ),
            });
        }

        // Probe three interior points of each piece wide enough to resolve.
        let mut edges = vec![t_lo];
        edges.extend(breakpoints.iter().copied());
        edges.push(t_hi);
        let mut mismatches: Vec<(f64, f64)> = Vec::new();
        let mut probes: Vec<(f64, f64)> = Vec::new();
        for w in edges.windows(2) {
            let (a, b) = (w[0], w[1]);
            if b - a < SLIVER_FACTOR * bisect_tol {
                continue;
            }
            let piece_value = piece_value(&samples, a, b);
            for q in [0.25, 0.5, 0.75] {
                probes.push((a + (b - a) * q, piece_value));
            }
        }
        let vals = map_indexed(probes.len(), |i| eval(probes[i].0));
        for ((t, expect), v) in probes.into_iter().zip(vals) {
            let v = v?;
            if v != expect {
                mismatches.push((t, v));
            }
            insert_sample(&mut samples, t, v);
        }
        if mismatches.is_empty() {
            let piece_values: Vec<f64> = edges
                .windows(2)
                .map(|w| piece_value(&samples, w[0], w[1]))
                .collect();
            return Ok((breakpoints, piece_values, samples));
        }
    }

    // Still finding new values inside pieces: not piecewise constant at this
    // resolution.
    let (t, found) = samples
        .windows(2)
        .find(|w| w[0].1 != w[1].1 && w[1].0 - w[0].0 < bisect_tol)
        .map(|w| (w[1].0, w[1].1))
        .unwrap_or((t_lo, f64::NAN));
    Err(Error::StructuralViolation {
        t,
        expected: piece_value(&samples, t_lo, t_hi),
        found,
        detail: format!("piece still changing after {MAX_REFINE_ROUNDS} refinement rounds"),
    })
}

fn insert_sample(samples: &mut Vec<(f64, f64)>, t: f64, v: f64) {
    match samples.binary_search_by(|(st, _)| st.partial_cmp(&t).unwrap()) {
        Ok(_) => {}
        Err(at) => samples.insert(at, (t, v)),
    }
}

/// Value of the first sample strictly inside (a, b); pieces always contain
/// at least one grid sample by construction.
fn piece_value(samples: &[(f64, f64)], a: f64, b: f64) -> f64 {
    samples
        .iter()
        .find(|(t, _)| *t > a && *t < b)
        .or_else(|| samples.iter().find(|(t, _)| *t >= a && *t <= b))
        .map(|(_, v)| *v)
        .unwrap_or(f64::NAN)
}

/// Specification of one slice through policy-parameter space.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    pub anchor: Vec<f64>,
    pub direction: Vec<f64>,
    pub interval: (f64, f64),
    pub grid0: usize,
    pub bisect_tol: f64,
}

impl SliceSpec {
    pub fn new(anchor: Vec<f64>, direction: Vec<f64>) -> Self {
        Self {
            anchor,
            direction,
            interval: (0.0, 1.0),
            grid0: 1024,
            bisect_tol: 1e-7,
        }
    }
}

/// Evaluates the total cost of a parameter vector over a set of instances.
pub fn total_cost(
    instances: &[MipInstance],
    template: &PolicyTemplate,
    cfg: &BncConfig,
    penalties: &PenaltySpec,
    w: &[f64],
) -> Result<f64> {
    let bundle = template.assemble(w)?;
    let mut total = 0.0;
    for inst in instances {
        let (_, v, _) = solve_bnc(inst, &bundle, cfg, penalties)?;
        total += v;
    }
    Ok(total)
}

/// Scans the total branch-and-cut cost along one parameter slice. The anchor
/// is perturbed by a seeded jitter of at most `1e-9 * ||direction||` so that
/// measure-zero coincidences of breakpoints with grid points cannot occur.
pub fn scan_slice(
    instances: &[MipInstance],
    template: &PolicyTemplate,
    cfg: &BncConfig,
    penalties: &PenaltySpec,
    spec: &SliceSpec,
) -> Result<SliceScan> {
    if instances.is_empty() {
        return Err(Error::Parameter(
            "slice scan needs at least one instance".into(),
        ));
    }
    if spec.anchor.len() != template.param_count() || spec.direction.len() != spec.anchor.len() {
        return Err(Error::Parameter(
            "anchor/direction dimension mismatch".into(),
        ));
    }
    let dir_norm = spec.direction.iter().map(|d| d * d).sum::<f64>().sqrt();
    if dir_norm == 0.0 {
        return Err(Error::Parameter("slice direction must be nonzero".into()));
    }

    let jitter_seed = Fnv64::new()
        .write_f64_slice(&spec.anchor)
        .write_f64_slice(&spec.direction)
        .finish();
    let mut rng = SplitMix64::new(jitter_seed);
    let anchor: Vec<f64> = spec
        .anchor
        .iter()
        .map(|&w| w + (2.0 * rng.next_f64() - 1.0) * 1e-9 * dir_norm)
        .collect();

    let eval = |t: f64| -> Result<f64> {
        let w: Vec<f64> = anchor
            .iter()
            .zip(&spec.direction)
            .map(|(a, d)| a + t * d)
            .collect();
        total_cost(instances, template, cfg, penalties, &w)
    };
    let (breakpoints, piece_values, samples) =
        scan_line(eval, spec.interval, spec.grid0, spec.bisect_tol)?;
    Ok(SliceScan {
        anchor,
        direction: spec.direction.clone(),
        interval: spec.interval,
        breakpoints,
        piece_values,
        grid0: spec.grid0,
        bisect_tol: spec.bisect_tol,
        samples,
    })
}

/// CSV export of every sample: `t,total_cost` with a schema header line.
pub fn scan_to_csv(scan: &SliceScan) -> String {
    let mut out = String::from("# bclab-scan-v1\nt,total_cost\n");
    for (t, v) in &scan.samples {
        out.push_str(&format!("{t:.17e},{v:.17e}\n"));
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_function_has_no_breakpoints() {
        let (bps, pieces, _) = scan_line(|_| Ok(3.0), (0.0, 1.0), 64, 1e-7).unwrap();
        assert!(bps.is_empty());
        assert_eq!(pieces, vec![3.0]);
    }

    #[test]
    fn single_step_located_to_tolerance() {
        // Two-candidate choice with linear scores crossing at t = 0.5 and
        // distinct downstream cost.
        let eval = |t: f64| Ok(if t < 0.5 { 2.0 } else { 7.0 });
        let (bps, pieces, _) = scan_line(eval, (0.0, 1.0), 64, 1e-7).unwrap();
        assert_eq!(bps.len(), 1);
        assert!((bps[0] - 0.5).abs() < 1e-7);
        assert_eq!(pieces, vec![2.0, 7.0]);
    }

    #[test]
    fn refinement_recovers_pieces_missed_by_the_grid() {
        // A spike strictly between the points of a 2-cell grid; only the
        // interior validation probe at t = 0.25 can expose it.
        let eval = |t: f64| Ok(if (0.2..0.3).contains(&t) { 9.0 } else { 1.0 });
        let (bps, pieces, _) = scan_line(eval, (0.0, 1.0), 2, 1e-7).unwrap();
        assert_eq!(bps.len(), 2);
        assert!((bps[0] - 0.2).abs() < 1e-7);
        assert!((bps[1] - 0.3).abs() < 1e-7);
        assert_eq!(pieces, vec![1.0, 9.0, 1.0]);
    }

    #[test]
    fn doubling_the_grid_is_stable() {
        let eval = |t: f64| {
            Ok(if t < 0.3 {
                0.0
            } else if t < 0.62 {
                4.0
            } else {
                1.0
            })
        };
        let (bp_a, pieces_a, _) = scan_line(eval, (0.0, 1.0), 128, 1e-7).unwrap();
        let (bp_b, pieces_b, _) = scan_line(eval, (0.0, 1.0), 256, 1e-7).unwrap();
        assert_eq!(pieces_a, pieces_b);
        assert_eq!(bp_a.len(), bp_b.len());
        for (a, b) in bp_a.iter().zip(&bp_b) {
            assert!((a - b).abs() < 1e-7);
        }
    }

    #[test]
    fn continuously_varying_cost_is_reported() {
        let err = scan_line(|t| Ok(t), (0.0, 1.0), 16, 1e-3).unwrap_err();
        assert!(matches!(err, Error::StructuralViolation { .. }));
    }
}
