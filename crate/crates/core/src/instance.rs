//! MIP instances: representation, seeded generators, a text format, and a
//! brute-force integer-enumeration oracle.
//!
//! The oracle is the ground truth that the solver, the cut generator, and the
//! policy experiments are all tested against, so it stays deliberately dumb:
//! enumerate every integer point in the bounding box and keep the best.

use crate::error::{Error, Result};
use crate::rng::SplitMix64;

/// Feasibility tolerance used when checking enumerated points against Ax <= b.
pub const FEAS_TOL: f64 = 1e-9;

/// Hard cap on enumeration work (number of lattice points).
const ENUM_POINT_CAP: f64 = 5e8;

/// A mixed-integer program `min c'x  s.t.  Ax <= b, x >= 0`, with the first
/// `n1` variables integer and the remaining `n2` continuous.
#[derive(Debug, Clone, PartialEq)]
pub struct MipInstance {
    pub name: String,
    /// Constraint matrix, m rows by n columns.
    pub a: Vec<Vec<f64>>,
    pub b: Vec<f64>,
    pub c: Vec<f64>,
    pub n1: usize,
    pub n2: usize,
    /// Per-variable upper bounds; required on integer variables if the
    /// enumeration oracle is to be used.
    pub var_upper: Option<Vec<f64>>,
    pub seed: Option<u64>,
}

impl MipInstance {
    pub fn n(&self) -> usize {
        self.n1 + self.n2
    }

    pub fn m(&self) -> usize {
        self.a.len()
    }

    pub fn validate(&self) -> Result<()> {
        let n = self.n();
        if n == 0 {
            return Err(Error::Validation("instance has no variables".into()));
        }
        if self.a.is_empty() {
            return Err(Error::Validation("instance has no constraints".into()));
        }
        if self.b.len() != self.a.len() {
            return Err(Error::Validation(format!(
                "b has {} entries but A has {} rows",
                self.b.len(),
                self.a.len()
            )));
        }
        if self.c.len() != n {
            return Err(Error::Validation(format!(
                "c has {} entries but n = {}",
                self.c.len(),
                n
            )));
        }
        for (i, row) in self.a.iter().enumerate() {
            if row.len() != n {
                return Err(Error::Validation(format!(
                    "row {} has {} coefficients but n = {}",
                    i,
                    row.len(),
                    n
                )));
            }
        }
        if let Some(ub) = &self.var_upper {
            if ub.len() != n {
                return Err(Error::Validation(format!(
                    "ub has {} entries but n = {}",
                    ub.len(),
                    n
                )));
            }
        }
        let all = self
            .a
            .iter()
            .flatten()
            .chain(self.b.iter())
            .chain(self.c.iter());
        for v in all {
            if !v.is_finite() {
                return Err(Error::Validation("non-finite coefficient".into()));
            }
        }
        Ok(())
    }
}

/// Result of the enumeration oracle.
#[derive(Debug, Clone, PartialEq)]
pub struct IntegerOptimum {
    pub status: OptStatus,
    pub value: f64,
    pub x: Vec<f64>,
    /// True when continuous variables were discretized on a grid.
    pub approximate: bool,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum OptStatus {
    Optimal,
    Infeasible,
}

/// Generator families. All of them produce binary integer variables so the
/// enumeration oracle stays tractable.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Family {
    Knapsack,
    Packing,
    Covering,
}

impl Family {
    pub fn as_str(&self) -> &'static str {
        match self {
            Family::Knapsack => "knapsack",
            Family::Packing => "packing",
            Family::Covering => "covering",
        }
    }

    pub fn parse(s: &str) -> Result<Family> {
        match s {
            "knapsack" => Ok(Family::Knapsack),
            "packing" => Ok(Family::Packing),
            "covering" => Ok(Family::Covering),
            other => Err(Error::Parameter(format!("unknown family '{other}'"))),
        }
    }
}

/// Deterministic instance generator. The draw order is fixed (objective
/// values first, then constraint rows top to bottom, left to right), so a
/// given argument tuple produces the same instance on every platform.
///
/// Knapsack and packing are maximization problems stated as minimization via
/// a negated objective; covering minimizes directly. Coefficient magnitudes
/// come from `coeff_range` clamped to be at least 1.
pub fn generate_instance(
    family: Family,
    n1: usize,
    n2: usize,
    m: usize,
    coeff_range: (i64, i64),
    seed: u64,
) -> Result<MipInstance> {
    let n = n1 + n2;
    if n == 0 {
        return Err(Error::Parameter("n1 + n2 must be at least 1".into()));
    }
    if m == 0 {
        return Err(Error::Parameter("m must be at least 1".into()));
    }
    let (lo, hi) = coeff_range;
    if lo > hi {
        return Err(Error::Parameter("empty coefficient range".into()));
    }
    let lo = lo.max(1);
    let hi = hi.max(lo);

    let mut rng = SplitMix64::new(seed);
    let values: Vec<f64> = (0..n).map(|_| rng.int_in(lo, hi) as f64).collect();

    let mut a = Vec::with_capacity(m);
    let mut b = Vec::with_capacity(m);
    match family {
        Family::Knapsack => {
            for _ in 0..m {
                let row: Vec<f64> = (0..n).map(|_| rng.int_in(lo, hi) as f64).collect();
                let cap = ((row.iter().sum::<f64>()) / 2.0).floor().max(1.0);
                a.push(row);
                b.push(cap);
            }
        }
        Family::Packing => {
            for i in 0..m {
                let mut row: Vec<f64> = (0..n)
                    .map(|_| if rng.next_f64() < 0.5 { 1.0 } else { 0.0 })
                    .collect();
                if row.iter().all(|&v| v == 0.0) {
                    row[i % n] = 1.0;
                }
                let cap = ((row.iter().sum::<f64>()) / 2.0).floor().max(1.0);
                a.push(row);
                b.push(cap);
            }
        }
        Family::Covering => {
            for i in 0..m {
                let mut row: Vec<f64> = (0..n)
                    .map(|_| if rng.next_f64() < 0.5 { 1.0 } else { 0.0 })
                    .collect();
                if row.iter().all(|&v| v == 0.0) {
                    row[i % n] = 1.0;
                }
                // Covering rows are `sum x_j >= 1`, stored in <= form.
                a.push(row.iter().map(|&v| -v).collect());
                b.push(-1.0);
            }
        }
    }

    let c: Vec<f64> = match family {
        Family::Knapsack | Family::Packing => values.iter().map(|&v| -v).collect(),
        Family::Covering => values,
    };

    let inst = MipInstance {
        name: format!("{}-n{}x{}-m{}-s{}", family.as_str(), n1, n2, m, seed),
        a,
        b,
        c,
        n1,
        n2,
        var_upper: Some(vec![1.0; n]),
        seed: Some(seed),
    };
    inst.validate()?;
    Ok(inst)
}

/// Renders an f64 with 17 significant digits, enough to round-trip exactly.
fn fmt17(v: f64) -> String {
    format!("{v:.16e}")
}

/// Serializes an instance to the documented text format:
///
/// ```text
/// mip <name> <m> <n1> <n2>
/// c <n values>
/// row <n coefficients> <= <rhs>     (m lines)
/// ub <n values>                      (optional)
/// seed <u64>                         (optional)
/// ```
pub fn serialize_instance(inst: &MipInstance) -> String {
    let mut out = String::new();
    out.push_str(&format!(
        "mip {} {} {} {}\n",
        inst.name,
        inst.m(),
        inst.n1,
        inst.n2
    ));
    let join = |vs: &[f64]| vs.iter().map(|&v| fmt17(v)).collect::<Vec<_>>().join(" ");
    out.push_str(&format!("c {}\n", join(&inst.c)));
    for (row, rhs) in inst.a.iter().zip(&inst.b) {
        out.push_str(&format!("row {} <= {}\n", join(row), fmt17(*rhs)));
    }
    if let Some(ub) = &inst.var_upper {
        out.push_str(&format!("ub {}\n", join(ub)));
    }
    if let Some(seed) = inst.seed {
        out.push_str(&format!("seed {seed}\n"));
    }
    out
}

fn parse_floats(tokens: &[&str], line: usize) -> Result<Vec<f64>> {
    tokens
        .iter()
        .map(|t| {
            t.parse::<f64>().map_err(|_| Error::Parse {
                line,
                msg: format!("expected a number, found '{t}'"),
            })
        })
        .collect()
}

/// Parses the documented text format. Errors carry the 1-based line number.
pub fn parse_instance(text: &str) -> Result<MipInstance> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty());

    let (lno, header) = lines.next().ok_or(Error::Parse {
        line: 1,
        msg: "empty input".into(),
    })?;
    let tok: Vec<&str> = header.split_whitespace().collect();
    if tok.len() != 5 || tok[0] != "mip" {
        return Err(Error::Parse {
            line: lno,
            msg: "expected header 'mip <name> <m> <n1> <n2>'".into(),
        });
    }
    let name = tok[1].to_string();
    let parse_count = |s: &str, what: &str| -> Result<usize> {
        s.parse::<usize>().map_err(|_| Error::Parse {
            line: lno,
            msg: format!("bad {what} '{s}'"),
        })
    };
    let m = parse_count(tok[2], "m")?;
    let n1 = parse_count(tok[3], "n1")?;
    let n2 = parse_count(tok[4], "n2")?;
    let n = n1 + n2;

    let mut c: Option<Vec<f64>> = None;
    let mut a: Vec<Vec<f64>> = Vec::new();
    let mut b: Vec<f64> = Vec::new();
    let mut ub: Option<Vec<f64>> = None;
    let mut seed: Option<u64> = None;

    for (lno, line) in lines {
        let tok: Vec<&str> = line.split_whitespace().collect();
        match tok[0] {
            "c" => {
                c = Some(parse_floats(&tok[1..], lno)?);
            }
            "row" => {
                let sep = tok.iter().position(|&t| t == "<=").ok_or(Error::Parse {
                    line: lno,
                    msg: "row line missing '<='".into(),
                })?;
                if sep + 2 != tok.len() {
                    return Err(Error::Parse {
                        line: lno,
                        msg: "row line needs exactly one rhs after '<='".into(),
                    });
                }
                a.push(parse_floats(&tok[1..sep], lno)?);
                b.push(parse_floats(&tok[sep + 1..], lno)?[0]);
            }
            "ub" => {
                ub = Some(parse_floats(&tok[1..], lno)?);
            }
            "seed" => {
                seed = Some(
                    tok.get(1)
                        .and_then(|t| t.parse().ok())
                        .ok_or(Error::Parse {
                            line: lno,
                            msg: "bad seed".into(),
                        })?,
                );
            }
            other => {
                return Err(Error::Parse {
                    line: lno,
                    msg: format!("unknown directive '{other}'"),
                });
            }
        }
    }

    let c = c.ok_or(Error::Parse {
        line: 1,
        msg: "missing 'c' line".into(),
    })?;
    if a.len() != m {
        return Err(Error::Validation(format!(
            "header declares m={} but found {} rows",
            m,
            a.len()
        )));
    }
    if c.len() != n {
        return Err(Error::Validation(format!(
            "header declares n={} but c has {} entries",
            n,
            c.len()
        )));
    }
    let inst = MipInstance {
        name,
        a,
        b,
        c,
        n1,
        n2,
        var_upper: ub,
        seed,
    };
    inst.validate()?;
    Ok(inst)
}

/// Integer upper bounds of the enumeration box, or an error when some
/// integer variable is unbounded.
fn integer_box(inst: &MipInstance) -> Result<Vec<i64>> {
    let ub = inst.var_upper.as_ref().ok_or_else(|| {
        Error::Unsupported("enumeration requires finite variable upper bounds".into())
    })?;
    let mut out = Vec::with_capacity(inst.n1);
    for (j, &u) in ub.iter().take(inst.n1).enumerate() {
        if !u.is_finite() || u < 0.0 {
            return Err(Error::Unsupported(format!(
                "integer variable {j} has no usable upper bound"
            )));
        }
        out.push(u.floor() as i64);
    }
    Ok(out)
}

/// Visits feasible points of the (possibly gridded) box in lexicographic
/// order. The callback returns `false` to stop early.
fn for_each_feasible<F: FnMut(&[f64]) -> bool>(
    inst: &MipInstance,
    grid: Option<usize>,
    mut visit: F,
) -> Result<()> {
    inst.validate()?;
    let n = inst.n();
    let int_ub = integer_box(inst)?;

    let mut levels: Vec<Vec<f64>> = Vec::with_capacity(n);
    for &u in &int_ub {
        levels.push((0..=u).map(|v| v as f64).collect());
    }
    if inst.n2 > 0 {
        let g = grid.ok_or_else(|| {
            Error::Unsupported("continuous variables require a grid resolution".into())
        })?;
        if g == 0 {
            return Err(Error::Parameter(
                "grid resolution must be at least 1".into(),
            ));
        }
        let ub = inst.var_upper.as_ref().unwrap();
        for (j, &u) in ub.iter().enumerate().take(n).skip(inst.n1) {
            if !u.is_finite() || u < 0.0 {
                return Err(Error::Unsupported(format!(
                    "continuous variable {j} has no usable upper bound"
                )));
            }
            levels.push((0..=g).map(|k| u * k as f64 / g as f64).collect());
        }
    }

    let total: f64 = levels.iter().map(|l| l.len() as f64).product();
    if total > ENUM_POINT_CAP {
        return Err(Error::Parameter(format!(
            "enumeration box has ~{total:.2e} points, beyond the supported size"
        )));
    }

    // Odometer over `levels`, most significant digit first, so points come
    // out in ascending lexicographic order.
    let mut idx = vec![0usize; n];
    let mut x = vec![0.0; n];
    'outer: loop {
        for j in 0..n {
            x[j] = levels[j][idx[j]];
        }
        let feasible = inst.a.iter().zip(&inst.b).all(|(row, &rhs)| {
            row.iter().zip(&x).map(|(a, v)| a * v).sum::<f64>() <= rhs + FEAS_TOL
        });
        if feasible && !visit(&x) {
            return Ok(());
        }
        // increment
        for j in (0..n).rev() {
            idx[j] += 1;
            if idx[j] < levels[j].len() {
                continue 'outer;
            }
            idx[j] = 0;
        }
        return Ok(());
    }
}

/// Brute-force oracle: enumerates every integer point in the variable box
/// (continuous variables on a grid of `grid` steps when present), filters by
/// Ax <= b, and returns the minimum objective. Ties go to the
/// lexicographically smallest point. Exact for pure-integer instances.
pub fn enumerate_integer_optimum(
    inst: &MipInstance,
    grid: Option<usize>,
) -> Result<IntegerOptimum> {
    let mut best: Option<(f64, Vec<f64>)> = None;
    for_each_feasible(inst, grid, |x| {
        let val: f64 = inst.c.iter().zip(x).map(|(c, v)| c * v).sum();
        match &best {
            Some((bv, _)) if val >= *bv => {}
            _ => best = Some((val, x.to_vec())),
        }
        true
    })?;
    Ok(match best {
        Some((value, x)) => IntegerOptimum {
            status: OptStatus::Optimal,
            value,
            x,
            approximate: inst.n2 > 0,
        },
        None => IntegerOptimum {
            status: OptStatus::Infeasible,
            value: f64::INFINITY,
            x: Vec::new(),
            approximate: inst.n2 > 0,
        },
    })
}

/// Runs `check` on every feasible integer point; returns false as soon as
/// one point fails. Used by the cut-validity oracle.
pub fn all_feasible_points<F: FnMut(&[f64]) -> bool>(
    inst: &MipInstance,
    mut check: F,
) -> Result<bool> {
    let mut ok = true;
    for_each_feasible(inst, None, |x| {
        if !check(x) {
            ok = false;
            return false;
        }
        true
    })?;
    Ok(ok)
}
