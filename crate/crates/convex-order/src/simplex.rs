//! Dense two-phase primal simplex for small linear programs.
//!
//! Internal workhorse behind the martingale feasibility LP and the witness LP
//! in [`crate::order`]. Problems are desk scale (a few hundred rows), so the
//! tableau is dense and every pivot is a full row sweep. Pricing is Dantzig's
//! rule; the leaving row is chosen by the lexicographic ratio test over the
//! inverse-basis block, which both prevents cycling on the heavily degenerate
//! feasibility systems that arise here and avoids the tiny pivots that wreck
//! a plain tableau.
//!
//! Conventions: minimize `cᵀx` subject to rows `Σⱼ aᵢⱼ xⱼ {≤,=,≥} bᵢ` and
//! `x ≥ 0`. Callers split free variables themselves. Infeasibility comes with
//! a Farkas ray `y` for the slack-augmented equality system `Ax = b, x ≥ 0`:
//! `yᵀA ≤ 0` componentwise and `yᵀb > 0`.

use crate::{Error, Result};

/// Entering threshold on reduced costs; optimality means all ≥ −ENTER_TOL.
const ENTER_TOL: f64 = 1e-9;
/// Smallest usable pivot element.
const PIVOT_TOL: f64 = 1e-8;
/// Phase-1 objective above this (scaled) means infeasible.
const FEAS_TOL: f64 = 1e-9;
/// A column that admits no pivot is a genuine ray only if its reduced cost is
/// clearly negative; otherwise it is fp noise and the column is set aside.
const RAY_TOL: f64 = 1e-6;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub(crate) enum Rel {
    Le,
    Eq,
    Ge,
}

#[derive(Debug)]
pub(crate) enum LpOutcome {
    Optimal {
        /// values of the caller's structural variables
        x: Vec<f64>,
        /// optimal objective value
        value: f64,
    },
    Infeasible {
        /// Farkas ray for the equality form, one multiplier per row
        farkas: Vec<f64>,
        /// phase-1 residual (total artificial mass)
        residual: f64,
    },
    Unbounded,
}

type Row = (Vec<(usize, f64)>, Rel, f64);

/// Incremental LP assembly: declare variables, then rows, then solve.
pub(crate) struct LpBuilder {
    costs: Vec<f64>,
    rows: Vec<Row>,
}

impl LpBuilder {
    pub fn new() -> Self {
        Self {
            costs: Vec::new(),
            rows: Vec::new(),
        }
    }

    pub fn add_var(&mut self, cost: f64) -> usize {
        self.costs.push(cost);
        self.costs.len() - 1
    }

    pub fn add_constraint(&mut self, coeffs: Vec<(usize, f64)>, rel: Rel, rhs: f64) {
        self.rows.push((coeffs, rel, rhs));
    }

    pub fn solve(self) -> Result<LpOutcome> {
        Tableau::assemble(self).solve()
    }
}

struct Tableau {
    m: usize,
    /// structural columns (caller vars + slacks)
    t: usize,
    /// tableau width: t + m artificials + 1 rhs column
    w: usize,
    tab: Vec<f64>,
    /// pristine copy of the assembled rows, for the final residual check
    tab0: Vec<f64>,
    basis: Vec<usize>,
    in_basis: Vec<bool>,
    /// redundant rows are deactivated after phase 1 and never touched again
    active: Vec<bool>,
    n_caller: usize,
    obj: Vec<f64>,
    rhs_scale: f64,
}

impl Tableau {
    fn assemble(builder: LpBuilder) -> Self {
        let n_caller = builder.costs.len();
        let m = builder.rows.len();
        let n_slack = builder
            .rows
            .iter()
            .filter(|(_, rel, _)| *rel != Rel::Eq)
            .count();
        let t = n_caller + n_slack;
        let w = t + m + 1;
        let mut tab = vec![0.0; m * w];
        let mut obj = vec![0.0; t];
        obj[..n_caller].copy_from_slice(&builder.costs);

        let mut slack = n_caller;
        let mut rhs_scale = 1.0f64;
        for (i, (coeffs, rel, rhs)) in builder.rows.into_iter().enumerate() {
            let row = &mut tab[i * w..(i + 1) * w];
            for (j, a) in coeffs {
                debug_assert!(j < n_caller);
                row[j] += a;
            }
            match rel {
                Rel::Le => {
                    row[slack] = 1.0;
                    slack += 1;
                }
                Rel::Ge => {
                    row[slack] = -1.0;
                    slack += 1;
                }
                Rel::Eq => {}
            }
            row[w - 1] = rhs;
            if row[w - 1] < 0.0 {
                for v in row.iter_mut() {
                    *v = -*v;
                }
            }
            rhs_scale = rhs_scale.max(row[w - 1].abs());
            // artificial for this row
            row[t + i] = 1.0;
        }

        let basis: Vec<usize> = (0..m).map(|i| t + i).collect();
        let mut in_basis = vec![false; t + m];
        for &b in &basis {
            in_basis[b] = true;
        }
        Tableau {
            m,
            t,
            w,
            tab0: tab.clone(),
            tab,
            basis,
            in_basis,
            active: vec![true; m],
            n_caller,
            obj,
            rhs_scale,
        }
    }

    #[inline]
    fn at(&self, i: usize, j: usize) -> f64 {
        self.tab[i * self.w + j]
    }

    fn rhs(&self, i: usize) -> f64 {
        self.at(i, self.w - 1).max(0.0)
    }

    fn solve(mut self) -> Result<LpOutcome> {
        // Phase 1: minimize total artificial mass. Artificials never re-enter.
        let phase1: Vec<f64> = (0..self.t + self.m)
            .map(|j| if j < self.t { 0.0 } else { 1.0 })
            .collect();
        match self.run(&phase1)? {
            End::Optimal => {}
            End::Unbounded => {
                // Phase 1 is bounded below by zero; reaching here is a bug.
                return Err(Error::SolverFailure(
                    "phase 1 reported unbounded".to_string(),
                ));
            }
        }
        let residual: f64 = (0..self.m)
            .filter(|&i| self.basis[i] >= self.t)
            .map(|i| self.rhs(i))
            .sum();
        if residual > FEAS_TOL * (1.0 + self.rhs_scale) {
            let farkas = self.multipliers(&phase1);
            return Ok(LpOutcome::Infeasible { farkas, residual });
        }

        // Drive artificials out of the basis on the best-conditioned pivot.
        // A row admitting no usable pivot is linearly dependent on the
        // others; it is deactivated so later pivots can never repopulate it
        // with noise and silently distort the system.
        for i in 0..self.m {
            if self.basis[i] >= self.t {
                let best = (0..self.t)
                    .filter(|&j| !self.in_basis[j])
                    .max_by(|&a, &b| {
                        self.at(i, a)
                            .abs()
                            .partial_cmp(&self.at(i, b).abs())
                            .expect("tableau entries are finite")
                    });
                match best {
                    Some(j) if self.at(i, j).abs() > PIVOT_TOL => self.pivot(i, j),
                    _ => self.active[i] = false,
                }
            }
        }

        // Phase 2 with the caller's objective.
        let mut phase2 = vec![0.0; self.t + self.m];
        phase2[..self.t].copy_from_slice(&self.obj);
        match self.run(&phase2)? {
            End::Unbounded => Ok(LpOutcome::Unbounded),
            End::Optimal => {
                let mut x = vec![0.0; self.t];
                for i in 0..self.m {
                    let b = self.basis[i];
                    if b < self.t {
                        x[b] = self.rhs(i);
                    }
                }
                self.verify_residual(&x)?;
                let value = x
                    .iter()
                    .zip(&self.obj[..self.n_caller])
                    .map(|(xi, ci)| xi * ci)
                    .sum();
                x.truncate(self.n_caller);
                Ok(LpOutcome::Optimal { x, value })
            }
        }
    }

    /// Check the final point against the pristine constraint rows. Catches
    /// any corruption that pivoting may have introduced, including in
    /// deactivated rows.
    fn verify_residual(&self, x: &[f64]) -> Result<()> {
        for i in 0..self.m {
            let row = &self.tab0[i * self.w..(i + 1) * self.w];
            let lhs: f64 = row[..self.t]
                .iter()
                .zip(x)
                .map(|(a, xj)| a * xj)
                .sum();
            let residual = (lhs - row[self.w - 1]).abs();
            if residual > 1e-7 * (1.0 + self.rhs_scale) {
                return Err(Error::SolverFailure(format!(
                    "row {i} residual {residual:.3e} after optimization"
                )));
            }
        }
        Ok(())
    }

    /// Simplex multipliers y = c_Bᵀ B⁻¹, read off the artificial block.
    fn multipliers(&self, costs: &[f64]) -> Vec<f64> {
        (0..self.m)
            .map(|i| {
                (0..self.m)
                    .map(|k| costs[self.basis[k]] * self.at(k, self.t + i))
                    .sum()
            })
            .collect()
    }

    fn run(&mut self, costs: &[f64]) -> Result<End> {
        let max_iters = 4000 + 80 * (self.m + self.t);
        // Columns whose reduced cost went slightly negative from fp noise but
        // admit no pivot; cleared after every successful pivot.
        let mut set_aside = vec![false; self.t];

        for _ in 0..max_iters {
            // Dantzig pricing over structural columns.
            let mut entering: Option<usize> = None;
            let mut best = -ENTER_TOL;
            for j in 0..self.t {
                if self.in_basis[j] || set_aside[j] {
                    continue;
                }
                let mut r = costs[j];
                for i in 0..self.m {
                    let cb = costs[self.basis[i]];
                    if cb != 0.0 {
                        r -= cb * self.at(i, j);
                    }
                }
                if r < best {
                    entering = Some(j);
                    best = r;
                }
            }
            let Some(e) = entering else {
                return Ok(End::Optimal);
            };

            match self.lexicographic_leaving(e) {
                Some(l) => {
                    self.pivot(l, e);
                    set_aside.fill(false);
                }
                None if best < -RAY_TOL * (1.0 + self.cost_scale(costs)) => {
                    return Ok(End::Unbounded);
                }
                None => {
                    // fp-phantom improving column; ignore it at this vertex
                    set_aside[e] = true;
                }
            }
        }
        Err(Error::SolverFailure(format!(
            "simplex iteration cap exceeded ({} rows, {} columns)",
            self.m, self.t
        )))
    }

    fn cost_scale(&self, costs: &[f64]) -> f64 {
        costs[..self.t].iter().fold(0.0f64, |m, c| m.max(c.abs()))
    }

    /// Lexicographic ratio test: among rows with a usable pivot, take the row
    /// minimizing `(rhs_i, B⁻¹ row i) / a_ie` lexicographically. Unique in
    /// exact arithmetic because B⁻¹ is nonsingular, so the walk cannot cycle.
    fn lexicographic_leaving(&self, e: usize) -> Option<usize> {
        let col_max = (0..self.m)
            .filter(|&i| self.active[i])
            .fold(0.0f64, |m, i| m.max(self.at(i, e).abs()));
        let threshold = PIVOT_TOL.max(1e-9 * col_max);
        let mut leaving: Option<usize> = None;
        for i in 0..self.m {
            if !self.active[i] {
                continue;
            }
            let a = self.at(i, e);
            if a <= threshold {
                continue;
            }
            leaving = Some(match leaving {
                None => i,
                Some(l) => {
                    if self.lex_less(i, l, e) {
                        i
                    } else {
                        l
                    }
                }
            });
        }
        leaving
    }

    fn lex_less(&self, i: usize, l: usize, e: usize) -> bool {
        let ai = self.at(i, e);
        let al = self.at(l, e);
        let ri = self.rhs(i) / ai;
        let rl = self.rhs(l) / al;
        if ri != rl {
            return ri < rl;
        }
        for k in 0..self.m {
            let bi = self.at(i, self.t + k) / ai;
            let bl = self.at(l, self.t + k) / al;
            if bi != bl {
                return bi < bl;
            }
        }
        false
    }

    fn pivot(&mut self, row: usize, col: usize) {
        let w = self.w;
        let p = self.at(row, col);
        debug_assert!(p.abs() > 0.0);
        let inv = 1.0 / p;
        for v in self.tab[row * w..(row + 1) * w].iter_mut() {
            *v *= inv;
        }
        for i in 0..self.m {
            if i == row || !self.active[i] {
                continue;
            }
            let factor = self.at(i, col);
            if factor != 0.0 {
                for j in 0..w {
                    self.tab[i * w + j] -= factor * self.tab[row * w + j];
                }
                self.tab[i * w + col] = 0.0;
            }
        }
        self.in_basis[self.basis[row]] = false;
        self.in_basis[col] = true;
        self.basis[row] = col;
    }
}

enum End {
    Optimal,
    Unbounded,
}
