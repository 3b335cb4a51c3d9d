//! Dense linear programs of the form `max cᵀx  s.t.  A x <= b`, `x` free,
//! and the MM subproblem built on top of them.
//!
//! # Dump format
//!
//! [`LinearProgram::write_dump`] emits a plain-text block that
//! [`LinearProgram::read_dump`] parses back:
//!
//! ```text
//! max c'x s.t. A x <= b
//! n <vars> m <rows>
//! labels
//! <label_0> ... <label_{n-1}>
//! c
//! <c_0> ... <c_{n-1}>
//! A
//! <row 0: n values>
//! ...
//! b
//! <b_0> ... <b_{m-1}>
//! end
//! ```
//!
//! Numbers are written with Rust's shortest round-trip formatting.

mod simplex;
mod subproblem;

use std::io::{BufRead, Write};

pub use simplex::{solve, solve_from, solve_with, SolverOptions};
pub use subproblem::{build_subproblem, crash_basis, SurrogateRow};

use crate::error::{Error, Result};

#[derive(Debug, Clone, PartialEq)]
pub struct LinearProgram {
    pub objective: Vec<f64>,
    /// Row-major `m x n` constraint matrix.
    pub matrix: Vec<f64>,
    pub bounds: Vec<f64>,
    pub labels: Vec<String>,
}

impl LinearProgram {
    pub fn new(objective: Vec<f64>) -> Self {
        let labels = (0..objective.len()).map(|j| format!("x{j}")).collect();
        LinearProgram {
            objective,
            matrix: Vec::new(),
            bounds: Vec::new(),
            labels,
        }
    }

    pub fn with_labels(mut self, labels: Vec<String>) -> Self {
        assert_eq!(labels.len(), self.n_vars());
        self.labels = labels;
        self
    }

    pub fn n_vars(&self) -> usize {
        self.objective.len()
    }

    pub fn n_rows(&self) -> usize {
        self.bounds.len()
    }

    pub fn add_row(&mut self, coeffs: &[f64], bound: f64) {
        assert_eq!(coeffs.len(), self.n_vars(), "row length");
        self.matrix.extend_from_slice(coeffs);
        self.bounds.push(bound);
    }

    pub fn row(&self, i: usize) -> &[f64] {
        let n = self.n_vars();
        &self.matrix[i * n..(i + 1) * n]
    }

    pub fn objective_value(&self, x: &[f64]) -> f64 {
        dot(&self.objective, x)
    }

    /// `max_i (A x - b)_i`, clamped below at zero.
    pub fn feasibility_residual(&self, x: &[f64]) -> f64 {
        (0..self.n_rows())
            .map(|i| dot(self.row(i), x) - self.bounds[i])
            .fold(0.0, f64::max)
    }

    pub fn validate(&self) -> Result<()> {
        if self.n_vars() == 0 {
            return Err(Error::invalid("lp", "no variables"));
        }
        if self.matrix.len() != self.n_vars() * self.n_rows() {
            return Err(Error::DimensionMismatch {
                expected: self.n_vars() * self.n_rows(),
                actual: self.matrix.len(),
            });
        }
        let finite = self
            .objective
            .iter()
            .chain(&self.matrix)
            .chain(&self.bounds)
            .all(|v| v.is_finite());
        if !finite {
            return Err(Error::invalid("lp", "non-finite coefficient"));
        }
        Ok(())
    }

    pub fn write_dump<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        let join = |v: &[f64]| v.iter().map(|x| format!("{x:?}")).collect::<Vec<_>>().join(" ");
        writeln!(out, "max c'x s.t. A x <= b")?;
        writeln!(out, "n {} m {}", self.n_vars(), self.n_rows())?;
        writeln!(out, "labels")?;
        writeln!(out, "{}", self.labels.join(" "))?;
        writeln!(out, "c")?;
        writeln!(out, "{}", join(&self.objective))?;
        writeln!(out, "A")?;
        for i in 0..self.n_rows() {
            writeln!(out, "{}", join(self.row(i)))?;
        }
        writeln!(out, "b")?;
        writeln!(out, "{}", join(&self.bounds))?;
        writeln!(out, "end")
    }

    pub fn read_dump<R: BufRead>(input: R) -> Result<Self> {
        let bad = |m: &str| Error::invalid("lp dump", m.to_string());
        let mut lines = input.lines();
        let mut next = || -> Result<String> {
            lines
                .next()
                .ok_or_else(|| bad("unexpected end of input"))?
                .map_err(Error::from)
        };
        let nums = |s: &str| -> Result<Vec<f64>> {
            s.split_whitespace()
                .map(|t| t.parse::<f64>().map_err(|_| bad("bad number")))
                .collect()
        };
        if next()?.trim() != "max c'x s.t. A x <= b" {
            return Err(bad("missing header"));
        }
        let dims: Vec<String> = next()?.split_whitespace().map(str::to_string).collect();
        if dims.len() != 4 || dims[0] != "n" || dims[2] != "m" {
            return Err(bad("bad dimension line"));
        }
        let n: usize = dims[1].parse().map_err(|_| bad("bad n"))?;
        let m: usize = dims[3].parse().map_err(|_| bad("bad m"))?;
        let expect = |tag: &str, line: String| {
            if line.trim() == tag {
                Ok(())
            } else {
                Err(bad(&format!("expected '{tag}'")))
            }
        };
        expect("labels", next()?)?;
        let labels: Vec<String> = next()?.split_whitespace().map(str::to_string).collect();
        expect("c", next()?)?;
        let objective = nums(&next()?)?;
        expect("A", next()?)?;
        let mut matrix = Vec::with_capacity(n * m);
        for _ in 0..m {
            let row = nums(&next()?)?;
            if row.len() != n {
                return Err(bad("row length"));
            }
            matrix.extend(row);
        }
        expect("b", next()?)?;
        let bounds = if m == 0 {
            next()?;
            Vec::new()
        } else {
            nums(&next()?)?
        };
        expect("end", next()?)?;
        if objective.len() != n || labels.len() != n || bounds.len() != m {
            return Err(bad("section sizes disagree with header"));
        }
        Ok(LinearProgram {
            objective,
            matrix,
            bounds,
            labels,
        })
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum LpStatus {
    Optimal,
    Infeasible,
    Unbounded,
    NumericalFailure,
}

#[derive(Debug, Clone, PartialEq)]
pub struct LpSolution {
    pub x: Vec<f64>,
    pub objective_value: f64,
    pub status: LpStatus,
    /// Simplex pivots across both phases.
    pub iterations: usize,
    /// Feasibility residual `max(A x - b, 0)` of `x`.
    pub residual: f64,
    /// Constraint rows active at the returned vertex.
    pub active_rows: Vec<usize>,
}

pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}
