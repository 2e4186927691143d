//! Two-phase primal tableau simplex for node LP relaxations.
//!
//! Every bound and every added constraint is carried as an explicit `<=` row
//! with its own slack, so the working system `[A | I]` always has full row
//! rank and the final tableau can be read row-by-row for cut generation.
//! Pricing is Dantzig with a permanent switch to Bland's rule after a run of
//! degenerate pivots; all tie-breaks are by smallest index, so identical
//! problems pivot identically.

use crate::error::{Error, Result};
use crate::instance::MipInstance;
use crate::rng::Fnv64;

/// Reduced-cost threshold for optimality.
const OPT_TOL: f64 = 1e-9;
/// Smallest admissible pivot element.
const PIVOT_TOL: f64 = 1e-10;
/// Exposed feasibility tolerance on returned solutions.
const FEAS_TOL: f64 = 1e-7;
/// Degenerate pivots tolerated before switching to Bland's rule.
const BLAND_TRIGGER: usize = 1000;
/// Absolute pivot-count cap; hitting it is reported as a solver error.
const MAX_PIVOTS: usize = 200_000;

/// An LP relaxation: a base instance plus accumulated cut and branching rows
/// and working variable bounds. Row order is insertion order and is part of
/// the determinism contract.
#[derive(Debug, Clone)]
pub struct LpProblem<'a> {
    pub base: &'a MipInstance,
    pub extra_rows: Vec<(Vec<f64>, f64)>,
    pub var_lower: Vec<f64>,
    pub var_upper: Vec<Option<f64>>,
}

impl<'a> LpProblem<'a> {
    pub fn new(base: &'a MipInstance) -> Self {
        let n = base.n();
        let var_upper = match &base.var_upper {
            Some(ub) => ub.iter().map(|&u| u.is_finite().then_some(u)).collect(),
            None => vec![None; n],
        };
        Self {
            base,
            extra_rows: Vec::new(),
            var_lower: vec![0.0; n],
            var_upper,
        }
    }

    /// Working rows in solver order: base rows, upper-bound rows, positive
    /// lower-bound rows, then extra rows.
    fn working_rows(&self) -> Vec<(Vec<f64>, f64)> {
        let n = self.base.n();
        let mut rows: Vec<(Vec<f64>, f64)> = self
            .base
            .a
            .iter()
            .zip(&self.base.b)
            .map(|(r, &rhs)| (r.clone(), rhs))
            .collect();
        for (j, ub) in self.var_upper.iter().enumerate() {
            if let Some(u) = ub {
                let mut row = vec![0.0; n];
                row[j] = 1.0;
                rows.push((row, *u));
            }
        }
        for (j, &lb) in self.var_lower.iter().enumerate() {
            if lb > 0.0 {
                let mut row = vec![0.0; n];
                row[j] = -1.0;
                rows.push((row, -lb));
            }
        }
        rows.extend(self.extra_rows.iter().cloned());
        rows
    }

    /// Stable digest of the full problem data, used in solver errors.
    pub fn digest(&self) -> u64 {
        let mut h = Fnv64::new();
        h.write_f64_slice(&self.base.c);
        for (row, rhs) in self.working_rows() {
            h.write_f64_slice(&row).write_f64(rhs);
        }
        h.finish()
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
}

/// Final state of a solve. For `Optimal` the tableau is the full dictionary:
/// `tableau[r]` holds the row coefficients over all working columns
/// (structural variables first, then one slack per row) and `rhs[r]` the
/// basic variable's value.
#[derive(Debug, Clone)]
pub struct LpSolution {
    pub status: LpStatus,
    pub x: Vec<f64>,
    pub value: f64,
    pub basis: Vec<usize>,
    pub tableau: Vec<Vec<f64>>,
    pub rhs: Vec<f64>,
    /// Original-space statement of each working row; `rows[i]` is the row
    /// whose slack is column `n + i`.
    pub rows: Vec<(Vec<f64>, f64)>,
    pub n: usize,
}

impl LpSolution {
    fn non_optimal(status: LpStatus) -> Self {
        Self {
            status,
            x: Vec::new(),
            value: f64::NAN,
            basis: Vec::new(),
            tableau: Vec::new(),
            rhs: Vec::new(),
            rows: Vec::new(),
            n: 0,
        }
    }
}

struct Tableau {
    /// rows x (n_cols incl. artificials); rhs kept separately.
    rows: Vec<Vec<f64>>,
    rhs: Vec<f64>,
    basis: Vec<usize>,
    obj: Vec<f64>,
    obj_rhs: f64,
    n_struct: usize,
    n_slack: usize,
    n_art: usize,
    degenerate: usize,
    pivots: usize,
    digest: u64,
}

impl Tableau {
    fn n_real(&self) -> usize {
        self.n_struct + self.n_slack
    }

    fn n_cols(&self) -> usize {
        self.n_struct + self.n_slack + self.n_art
    }

    fn err(&self, msg: &str) -> Error {
        Error::Solver {
            digest: self.digest,
            msg: msg.into(),
        }
    }

    /// Rebuilds the reduced-cost row for the given column costs.
    fn set_objective(&mut self, cost: &[f64]) {
        let cols = self.n_cols();
        let mut obj = cost.to_vec();
        let mut z = 0.0;
        for (r, &b) in self.basis.iter().enumerate() {
            let cb = cost[b];
            if cb != 0.0 {
                for j in 0..cols {
                    obj[j] -= cb * self.rows[r][j];
                }
                z += cb * self.rhs[r];
            }
        }
        // Basic columns must price at exactly zero.
        for &b in &self.basis {
            obj[b] = 0.0;
        }
        self.obj = obj;
        self.obj_rhs = z;
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let piv = self.rows[r][c];
        let cols = self.n_cols();
        let inv = 1.0 / piv;
        for j in 0..cols {
            self.rows[r][j] *= inv;
        }
        self.rhs[r] *= inv;
        self.rows[r][c] = 1.0;
        for i in 0..self.rows.len() {
            if i == r {
                continue;
            }
            let f = self.rows[i][c];
            if f != 0.0 {
                for j in 0..cols {
                    self.rows[i][j] -= f * self.rows[r][j];
                }
                self.rhs[i] -= f * self.rhs[r];
                self.rows[i][c] = 0.0;
            }
        }
        let f = self.obj[c];
        if f != 0.0 {
            for j in 0..cols {
                self.obj[j] -= f * self.rows[r][j];
            }
            // Objective moves by the reduced cost times the entering step.
            self.obj_rhs += f * self.rhs[r];
            self.obj[c] = 0.0;
        }
        self.basis[r] = c;
        self.pivots += 1;
    }

    /// Entering column under the active rule, among real (non-artificial)
    /// columns. Returns None at optimality.
    fn entering(&self, bland: bool) -> Option<usize> {
        let limit = self.n_real();
        if bland {
            (0..limit).find(|&j| self.obj[j] < -OPT_TOL)
        } else {
            let mut best: Option<(usize, f64)> = None;
            for j in 0..limit {
                let rc = self.obj[j];
                if rc < -OPT_TOL && best.map_or(true, |(_, b)| rc < b) {
                    best = Some((j, rc));
                }
            }
            best.map(|(j, _)| j)
        }
    }

    /// Leaving row by the minimum-ratio test; ties go to the smallest basic
    /// variable index. Returns None when the column is unbounded.
    fn leaving(&self, c: usize) -> Option<usize> {
        let mut best: Option<(usize, f64)> = None;
        for r in 0..self.rows.len() {
            let a = self.rows[r][c];
            if a > PIVOT_TOL {
                let ratio = self.rhs[r] / a;
                match best {
                    None => best = Some((r, ratio)),
                    Some((br, bratio)) => {
                        if ratio < bratio - 1e-12
                            || (ratio <= bratio + 1e-12 && self.basis[r] < self.basis[br])
                        {
                            best = Some((r, ratio));
                        }
                    }
                }
            }
        }
        best.map(|(r, _)| r)
    }

    /// Runs the simplex loop to optimality of the current objective.
    /// Returns Ok(false) when an unbounded direction is found.
    fn optimize(&mut self) -> Result<bool> {
        let mut bland = false;
        loop {
            if self.pivots > MAX_PIVOTS {
                return Err(self.err("pivot limit exceeded"));
            }
            let Some(c) = self.entering(bland) else {
                return Ok(true);
            };
            let Some(r) = self.leaving(c) else {
                return Ok(false);
            };
            let before = self.obj_rhs;
            self.pivot(r, c);
            if (self.obj_rhs - before).abs() <= 1e-12 {
                self.degenerate += 1;
                if self.degenerate >= BLAND_TRIGGER {
                    bland = true;
                }
            }
        }
    }
}

/// Solves the relaxation with a deterministic two-phase primal simplex.
pub fn solve_lp(p: &LpProblem<'_>) -> Result<LpSolution> {
    p.base.validate()?;
    let n = p.base.n();
    let rows_in = p.working_rows();
    for (i, (row, _)) in rows_in.iter().enumerate() {
        if row.len() != n {
            return Err(Error::Validation(format!(
                "working row {i} has {} coefficients, expected {n}",
                row.len()
            )));
        }
    }
    let r = rows_in.len();
    let digest = p.digest();

    // Columns: structural | slacks | artificials. Rows with a negative rhs
    // are negated (slack coefficient -1) and given an artificial.
    let mut art_of_row: Vec<Option<usize>> = vec![None; r];
    let mut n_art = 0;
    for (i, (_, rhs)) in rows_in.iter().enumerate() {
        if *rhs < 0.0 {
            art_of_row[i] = Some(n_art);
            n_art += 1;
        }
    }
    let n_cols = n + r + n_art;
    let mut tab = Tableau {
        rows: vec![vec![0.0; n_cols]; r],
        rhs: vec![0.0; r],
        basis: vec![0; r],
        obj: vec![0.0; n_cols],
        obj_rhs: 0.0,
        n_struct: n,
        n_slack: r,
        n_art,
        degenerate: 0,
        pivots: 0,
        digest,
    };
    for (i, (row, rhs)) in rows_in.iter().enumerate() {
        let neg = *rhs < 0.0;
        let sign = if neg { -1.0 } else { 1.0 };
        for (j, &a) in row.iter().enumerate() {
            tab.rows[i][j] = sign * a;
        }
        tab.rows[i][n + i] = sign;
        tab.rhs[i] = sign * rhs;
        match art_of_row[i] {
            Some(k) => {
                tab.rows[i][n + r + k] = 1.0;
                tab.basis[i] = n + r + k;
            }
            None => tab.basis[i] = n + i,
        }
    }

    if n_art > 0 {
        let mut phase1 = vec![0.0; n_cols];
        for c in phase1.iter_mut().skip(n + r) {
            *c = 1.0;
        }
        tab.set_objective(&phase1);
        if !tab.optimize()? {
            return Err(tab.err("phase-1 objective unbounded"));
        }
        if tab.obj_rhs > 1e-7 {
            return Ok(LpSolution::non_optimal(LpStatus::Infeasible));
        }
        // Drive remaining artificials out of the basis. Every row owns a
        // slack column, so a nonzero real pivot always exists.
        for row in 0..r {
            if tab.basis[row] >= n + r {
                let col = (0..n + r)
                    .find(|&j| tab.rows[row][j].abs() > PIVOT_TOL)
                    .ok_or_else(|| tab.err("cannot drive artificial out of basis"))?;
                tab.pivot(row, col);
            }
        }
    }

    let mut cost = vec![0.0; n_cols];
    cost[..n].copy_from_slice(&p.base.c);
    tab.set_objective(&cost);
    if !tab.optimize()? {
        return Ok(LpSolution::non_optimal(LpStatus::Unbounded));
    }

    let mut x = vec![0.0; n];
    for (row, &b) in tab.basis.iter().enumerate() {
        if b < n {
            x[b] = tab.rhs[row];
        }
    }
    let value: f64 = p.base.c.iter().zip(&x).map(|(c, v)| c * v).sum();
    for (i, (row, rhs)) in rows_in.iter().enumerate() {
        let lhs: f64 = row.iter().zip(&x).map(|(a, v)| a * v).sum();
        if lhs > rhs + FEAS_TOL {
            return Err(tab.err(&format!("row {i} violated by {:.3e} at optimum", lhs - rhs)));
        }
    }
    for (j, &v) in x.iter().enumerate() {
        if v < -FEAS_TOL {
            return Err(tab.err(&format!("variable {j} negative ({v:.3e}) at optimum")));
        }
    }

    // Strip artificial columns from the exported tableau.
    let tableau: Vec<Vec<f64>> = tab.rows.iter().map(|row| row[..n + r].to_vec()).collect();
    Ok(LpSolution {
        status: LpStatus::Optimal,
        x,
        value,
        basis: tab.basis.clone(),
        tableau,
        rhs: tab.rhs.clone(),
        rows: rows_in,
        n,
    })
}

/// Dictionary row of a basic variable: coefficients over all working columns
/// (unit at `basic_index`, zero at other basic columns) and the row's rhs,
/// which equals the basic variable's value.
pub fn tableau_row(sol: &LpSolution, basic_index: usize) -> Result<(Vec<f64>, f64)> {
    if sol.status != LpStatus::Optimal {
        return Err(Error::Parameter(
            "tableau_row requires an optimal solution".into(),
        ));
    }
    match sol.basis.iter().position(|&b| b == basic_index) {
        Some(r) => Ok((sol.tableau[r].clone(), sol.rhs[r])),
        None => Err(Error::Parameter(format!(
            "column {basic_index} is not basic"
        ))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::instance::{enumerate_integer_optimum, generate_instance, Family, OptStatus};

    fn inst(a: Vec<Vec<f64>>, b: Vec<f64>, c: Vec<f64>, ub: Option<Vec<f64>>) -> MipInstance {
        let n = c.len();
        MipInstance {
            name: "lp".into(),
            a,
            b,
            c,
            n1: n,
            n2: 0,
            var_upper: ub,
            seed: None,
        }
    }

    #[test]
    fn single_bound_vertex() {
        // min -x1 s.t. x1 <= 3, x >= 0.
        let i = inst(vec![vec![1.0]], vec![3.0], vec![-1.0], None);
        let sol = solve_lp(&LpProblem::new(&i)).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.x[0] - 3.0).abs() < 1e-9);
        assert!((sol.value + 3.0).abs() < 1e-9);
        // x1 is basic; its dictionary row reads back its value.
        let (_, rhs) = tableau_row(&sol, 0).unwrap();
        assert!((rhs - 3.0).abs() < 1e-9);
    }

    #[test]
    fn infeasible_lp() {
        let i = inst(vec![vec![1.0]], vec![-1.0], vec![0.0], None);
        let sol = solve_lp(&LpProblem::new(&i)).unwrap();
        assert_eq!(sol.status, LpStatus::Infeasible);
    }

    #[test]
    fn unbounded_lp() {
        // min -x1 with only x2 constrained.
        let i = inst(vec![vec![0.0, 1.0]], vec![1.0], vec![-1.0, 0.0], None);
        let sol = solve_lp(&LpProblem::new(&i)).unwrap();
        assert_eq!(sol.status, LpStatus::Unbounded);
    }

    #[test]
    fn slack_row_reads_residual() {
        // min -x1 s.t. x1 <= 3, x1 <= 5: second slack basic at 5 - 3 = 2.
        let i = inst(vec![vec![1.0], vec![1.0]], vec![3.0, 5.0], vec![-1.0], None);
        let sol = solve_lp(&LpProblem::new(&i)).unwrap();
        let slack1_col = sol.n + 1;
        let (_, rhs) = tableau_row(&sol, slack1_col).unwrap();
        assert!((rhs - 2.0).abs() < 1e-9);
    }

    #[test]
    fn tableau_row_rejects_nonbasic() {
        let i = inst(vec![vec![1.0, 1.0]], vec![1.0], vec![-1.0, 0.0], None);
        let sol = solve_lp(&LpProblem::new(&i)).unwrap();
        // x2 stays nonbasic at 0.
        assert!(tableau_row(&sol, 1).is_err());
    }

    #[test]
    fn tableau_row_requires_optimal() {
        let i = inst(vec![vec![1.0]], vec![-1.0], vec![0.0], None);
        let sol = solve_lp(&LpProblem::new(&i)).unwrap();
        assert!(tableau_row(&sol, 0).is_err());
    }

    #[test]
    fn negative_rhs_rows_need_phase_one() {
        // Covering row: x1 + x2 >= 1 as -x1 - x2 <= -1; min x1 + 2 x2.
        let i = inst(
            vec![vec![-1.0, -1.0]],
            vec![-1.0],
            vec![1.0, 2.0],
            Some(vec![1.0, 1.0]),
        );
        let sol = solve_lp(&LpProblem::new(&i)).unwrap();
        assert_eq!(sol.status, LpStatus::Optimal);
        assert!((sol.value - 1.0).abs() < 1e-9);
        assert!((sol.x[0] - 1.0).abs() < 1e-9);
    }

    #[test]
    fn extra_rows_are_honored() {
        let i = inst(
            vec![vec![1.0, 1.0]],
            vec![10.0],
            vec![-1.0, -1.0],
            Some(vec![4.0, 4.0]),
        );
        let mut p = LpProblem::new(&i);
        p.extra_rows.push((vec![1.0, 0.0], 2.0));
        let sol = solve_lp(&p).unwrap();
        assert!((sol.x[0] - 2.0).abs() < 1e-9);
        assert!((sol.x[1] - 4.0).abs() < 1e-9);
    }

    #[test]
    fn deterministic_repeat_solves() {
        let i = generate_instance(Family::Knapsack, 6, 0, 3, (1, 9), 11).unwrap();
        let a = solve_lp(&LpProblem::new(&i)).unwrap();
        let b = solve_lp(&LpProblem::new(&i)).unwrap();
        assert_eq!(a.basis, b.basis);
        assert_eq!(a.x, b.x);
        assert_eq!(a.value, b.value);
    }

    #[test]
    fn lp_relaxation_bounds_mip_on_random_instances() {
        let mut checked = 0;
        for seed in 0..200u64 {
            let family = match seed % 3 {
                0 => Family::Knapsack,
                1 => Family::Packing,
                _ => Family::Covering,
            };
            let n1 = 3 + (seed % 6) as usize;
            let m = 1 + (seed % 4) as usize;
            let inst = generate_instance(family, n1, 0, m, (1, 9), seed).unwrap();
            let lp = solve_lp(&LpProblem::new(&inst)).unwrap();
            let mip = enumerate_integer_optimum(&inst, None).unwrap();
            if lp.status == LpStatus::Optimal && mip.status == OptStatus::Optimal {
                assert!(
                    lp.value <= mip.value + 1e-6,
                    "lp {} > mip {} on {}",
                    lp.value,
                    mip.value,
                    inst.name
                );
                checked += 1;
            }
        }
        assert!(checked >= 150, "only {checked} instances were comparable");
    }

    #[test]
    fn optimal_solutions_respect_rows() {
        for seed in 0..50u64 {
            let inst = generate_instance(Family::Knapsack, 5, 0, 2, (1, 9), seed).unwrap();
            let sol = solve_lp(&LpProblem::new(&inst)).unwrap();
            assert_eq!(sol.status, LpStatus::Optimal);
            for (row, rhs) in &sol.rows {
                let lhs: f64 = row.iter().zip(&sol.x).map(|(a, v)| a * v).sum();
                assert!(lhs <= rhs + 1e-7);
            }
        }
    }
}
