//! Gomory fractional cuts read off the optimal tableau, restated over the
//! original variables, plus an enumeration-backed validity oracle.
//!
//! A tableau row for a fractional basic integer variable gives the cut
//! `sum_j frac(a_j) t_j >= frac(rhs)` over structural variables and slacks.
//! Substituting each slack `s_i = rhs_i - row_i . x` turns this into
//! `alpha' x <= beta` over the original space, which is the form features and
//! the validity oracle work with. The derivation needs all variables
//! (including slacks of earlier cuts) to be integral at integer-feasible
//! points, which holds for pure-integer instances with integer data.

use crate::error::{Error, Result};
use crate::instance::{all_feasible_points, MipInstance};
use crate::simplex::{LpSolution, LpStatus};

/// Fractionality threshold: a basic integer variable is a cut source only if
/// its value is at least this far from the nearest integer.
pub const INT_TOL: f64 = 1e-6;
/// Fractional parts within this of 0 or 1 are rounding noise and snapped.
const SNAP_TOL: f64 = 1e-9;
/// Minimum violation of the generating LP point for a cut to be kept.
const VIOLATION_TOL: f64 = 1e-7;

/// A cutting plane `alpha' x <= beta` over the original variables.
#[derive(Debug, Clone, PartialEq)]
pub struct Cut {
    pub alpha: Vec<f64>,
    pub beta: f64,
    pub origin: CutOrigin,
    /// Monotone generation index; doubles as the lexicographic tie-break key.
    pub id: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CutOrigin {
    pub node: usize,
    pub round: usize,
    /// Tableau row the cut was derived from.
    pub source_row: usize,
}

/// Threaded through a run so cut ids stay unique and monotone.
#[derive(Debug, Clone, Copy, Default)]
pub struct CutContext {
    pub node: usize,
    pub round: usize,
    pub next_id: u64,
}

fn frac(v: f64) -> f64 {
    let f = v - v.floor();
    if f < SNAP_TOL || f > 1.0 - SNAP_TOL {
        0.0
    } else {
        f
    }
}

/// Derives one Gomory fractional cut per fractional basic integer variable,
/// orders them most-fractional first (ties by variable index), and truncates
/// to `cap`. Every returned cut is violated by the LP solution that produced
/// it. An integral solution yields an empty list.
pub fn generate_candidate_cuts(
    sol: &LpSolution,
    inst: &MipInstance,
    cap: usize,
    ctx: CutContext,
) -> Vec<Cut> {
    if sol.status != LpStatus::Optimal || cap == 0 {
        return Vec::new();
    }
    let n = sol.n;

    // Candidate source rows: basic original integer variables with
    // fractional value, ranked by fractionality.
    let mut sources: Vec<(usize, usize, f64)> = Vec::new();
    for (row, &col) in sol.basis.iter().enumerate() {
        if col < inst.n1 {
            let v = sol.rhs[row];
            let f = v - v.floor();
            let fractionality = f.min(1.0 - f);
            if fractionality > INT_TOL {
                sources.push((row, col, fractionality));
            }
        }
    }
    sources.sort_by(|a, b| {
        b.2.partial_cmp(&a.2)
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(a.1.cmp(&b.1))
    });
    sources.truncate(cap);

    let mut cuts = Vec::with_capacity(sources.len());
    let mut next_id = ctx.next_id;
    for (row, _, _) in sources {
        let tab_row = &sol.tableau[row];
        let f0 = frac(sol.rhs[row]);
        if f0 == 0.0 {
            continue;
        }

        // alpha_j = sum_i f_slack(i) * row_i[j] - f_x(j); beta likewise from
        // the rhs side. This is the <=-form of the fractional cut after
        // substituting out every slack.
        let mut alpha = vec![0.0; n];
        let mut beta = -f0;
        for j in 0..n {
            alpha[j] = -frac(tab_row[j]);
        }
        for (i, (coeffs, rhs)) in sol.rows.iter().enumerate() {
            let fs = frac(tab_row[n + i]);
            if fs != 0.0 {
                for j in 0..n {
                    alpha[j] += fs * coeffs[j];
                }
                beta += fs * rhs;
            }
        }
        for a in alpha.iter_mut() {
            if a.abs() < 1e-12 {
                *a = 0.0;
            }
        }
        if alpha.iter().all(|&a| a == 0.0) {
            continue;
        }
        let violation: f64 = alpha.iter().zip(&sol.x).map(|(a, v)| a * v).sum::<f64>() - beta;
        if violation < VIOLATION_TOL {
            continue;
        }

        cuts.push(Cut {
            alpha,
            beta,
            origin: CutOrigin {
                node: ctx.node,
                round: ctx.round,
                source_row: row,
            },
            id: next_id,
        });
        next_id += 1;
    }
    cuts
}

/// True iff every feasible integer point of the instance satisfies the cut
/// within 1e-7. Requires an enumerable instance.
pub fn check_cut_validity(cut: &Cut, inst: &MipInstance) -> Result<bool> {
    if inst.n2 > 0 {
        return Err(Error::Unsupported(
            "cut validity check needs a pure-integer instance".into(),
        ));
    }
    if cut.alpha.len() != inst.n() {
        return Err(Error::Validation(format!(
            "cut has {} coefficients but instance has {} variables",
            cut.alpha.len(),
            inst.n()
        )));
    }
    all_feasible_points(inst, |x| {
        cut.alpha.iter().zip(x).map(|(a, v)| a * v).sum::<f64>() <= cut.beta + 1e-7
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{generate_instance, Family, MipInstance};
    use crate::simplex::{solve_lp, LpProblem};

    fn binary_inst(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>) -> MipInstance {
        let n = c.len();
        MipInstance {
            name: "cut-test".into(),
            a,
            b,
            c,
            n1: n,
            n2: 0,
            var_upper: Some(vec![1.0; n]),
            seed: None,
        }
    }

    #[test]
    fn integral_optimum_gives_no_cuts() {
        let inst = binary_inst(vec![vec![1.0, 0.0]], vec![1.0], vec![-1.0, 0.0]);
        let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
        assert!(generate_candidate_cuts(&sol, &inst, 8, CutContext::default()).is_empty());
    }

    #[test]
    fn half_integral_knapsack_yields_clique_cut() {
        // min -x1 - x2 s.t. 2x1 + 2x2 <= 3, binary. LP vertex is fractional,
        // and the fractional cut reduces to x1 + x2 <= 1.
        let inst = binary_inst(vec![vec![2.0, 2.0]], vec![3.0], vec![-1.0, -1.0]);
        let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
        let cuts = generate_candidate_cuts(&sol, &inst, 8, CutContext::default());
        assert_eq!(cuts.len(), 1);
        let cut = &cuts[0];
        assert!((cut.alpha[0] - 1.0).abs() < 1e-9);
        assert!((cut.alpha[1] - 1.0).abs() < 1e-9);
        assert!((cut.beta - 1.0).abs() < 1e-9);
        assert!(check_cut_validity(cut, &inst).unwrap());
        let viol: f64 = cut
            .alpha
            .iter()
            .zip(&sol.x)
            .map(|(a, v)| a * v)
            .sum::<f64>()
            - cut.beta;
        assert!(viol >= 1e-7);
    }

    #[test]
    fn cap_keeps_most_fractional_source() {
        // Two independent knapsack rows with different fractionalities:
        // x1 = 0.5 (from 2x1 <= 1) and x2 = 0.75 (from 4x2 <= 3).
        let inst = binary_inst(
            vec![vec![2.0, 0.0], vec![0.0, 4.0]],
            vec![1.0, 3.0],
            vec![-1.0, -1.0],
        );
        let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
        let all = generate_candidate_cuts(&sol, &inst, 8, CutContext::default());
        assert_eq!(all.len(), 2);
        let capped = generate_candidate_cuts(&sol, &inst, 1, CutContext::default());
        assert_eq!(capped.len(), 1);
        // x1 sits at fractionality 0.5, x2 at 0.25, so x1's row wins.
        assert_eq!(capped[0].origin.source_row, all[0].origin.source_row);
        assert!(capped[0].alpha[0].abs() > 1e-9);
    }

    #[test]
    fn vacuous_and_violating_cuts_checked() {
        let inst = binary_inst(vec![vec![1.0, 1.0]], vec![2.0], vec![0.0, 0.0]);
        let vacuous = Cut {
            alpha: vec![0.0, 0.0],
            beta: 1.0,
            origin: CutOrigin {
                node: 0,
                round: 0,
                source_row: 0,
            },
            id: 0,
        };
        assert!(check_cut_validity(&vacuous, &inst).unwrap());
        let bad = Cut {
            alpha: vec![1.0, 0.0],
            beta: -1.0,
            origin: CutOrigin {
                node: 0,
                round: 0,
                source_row: 0,
            },
            id: 1,
        };
        // x = 0 is feasible and violates x1 <= -1.
        assert!(!check_cut_validity(&bad, &inst).unwrap());
    }

    #[test]
    fn ids_follow_generation_order() {
        let inst = binary_inst(
            vec![vec![2.0, 0.0], vec![0.0, 4.0]],
            vec![1.0, 3.0],
            vec![-1.0, -1.0],
        );
        let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
        let ctx = CutContext {
            node: 3,
            round: 2,
            next_id: 10,
        };
        let cuts = generate_candidate_cuts(&sol, &inst, 8, ctx);
        let ids: Vec<u64> = cuts.iter().map(|c| c.id).collect();
        assert_eq!(ids, vec![10, 11]);
        assert!(cuts
            .iter()
            .all(|c| c.origin.node == 3 && c.origin.round == 2));
    }

    #[test]
    fn generated_cuts_valid_and_violated_on_random_instances() {
        for seed in 0..60u64 {
            let family = match seed % 3 {
                0 => Family::Knapsack,
                1 => Family::Packing,
                _ => Family::Covering,
            };
            let inst =
                generate_instance(family, 4 + (seed % 4) as usize, 0, 2, (1, 9), seed).unwrap();
            let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
            if sol.status != LpStatus::Optimal {
                continue;
            }
            for cut in generate_candidate_cuts(&sol, &inst, 8, CutContext::default()) {
                assert!(
                    check_cut_validity(&cut, &inst).unwrap(),
                    "invalid cut on {}",
                    inst.name
                );
                let viol: f64 = cut
                    .alpha
                    .iter()
                    .zip(&sol.x)
                    .map(|(a, v)| a * v)
                    .sum::<f64>()
                    - cut.beta;
                assert!(viol >= 1e-7, "cut not violated on {}", inst.name);
            }
        }
    }

    #[test]
    fn determinism_of_cut_lists() {
        let inst = generate_instance(Family::Knapsack, 6, 0, 2, (1, 9), 5).unwrap();
        let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
        let a = generate_candidate_cuts(&sol, &inst, 4, CutContext::default());
        let b = generate_candidate_cuts(&sol, &inst, 4, CutContext::default());
        assert_eq!(a, b);
    }
}
