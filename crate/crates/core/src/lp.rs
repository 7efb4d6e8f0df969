//! Dense two-phase simplex over exact rationals with Bland's rule.
//!
//! Solves `min c.x  s.t.  A x = b, x >= 0`. Sizes in this crate stay below a
//! few dozen rows, so a dense tableau is adequate.

use num_traits::{One, Signed, Zero};

use crate::rational::Q;

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum LpOutcome {
    Optimal { x: Vec<Q>, value: Q },
    Infeasible,
    Unbounded,
}

#[derive(Clone, Debug)]
pub struct LinearProgram {
    pub a: Vec<Vec<Q>>,
    pub b: Vec<Q>,
    pub c: Vec<Q>,
}

struct Tableau {
    // rows: constraints; last column is the right-hand side
    t: Vec<Vec<Q>>,
    basis: Vec<usize>,
}

impl Tableau {
    fn cols(&self) -> usize {
        self.t[0].len() - 1
    }

    fn pivot(&mut self, r: usize, c: usize) {
        let inv = Q::one() / &self.t[r][c];
        for v in self.t[r].iter_mut() {
            *v = &*v * &inv;
        }
        let prow = self.t[r].clone();
        for (i, row) in self.t.iter_mut().enumerate() {
            if i == r || row[c].is_zero() {
                continue;
            }
            let f = row[c].clone();
            for (v, p) in row.iter_mut().zip(&prow) {
                if !p.is_zero() {
                    *v -= &f * p;
                }
            }
        }
        self.basis[r] = c;
    }

    /// Reduced costs of all columns for cost vector `cost` (length = cols).
    fn reduced_costs(&self, cost: &[Q]) -> Vec<Q> {
        let mut d = cost.to_vec();
        for (r, &bv) in self.basis.iter().enumerate() {
            let cb = &cost[bv];
            if cb.is_zero() {
                continue;
            }
            for (j, dj) in d.iter_mut().enumerate() {
                if !self.t[r][j].is_zero() {
                    *dj -= cb * &self.t[r][j];
                }
            }
        }
        d
    }

    /// Runs simplex iterations with Bland's rule over columns `allowed`.
    /// Returns `false` on unboundedness.
    fn optimize(&mut self, cost: &[Q], allowed: usize) -> bool {
        loop {
            let d = self.reduced_costs(cost);
            let Some(enter) = (0..allowed).find(|&j| d[j].is_negative()) else {
                return true;
            };
            let rhs = self.cols();
            let mut leave: Option<(usize, Q)> = None;
            for r in 0..self.t.len() {
                let a = &self.t[r][enter];
                if !a.is_positive() {
                    continue;
                }
                let ratio = &self.t[r][rhs] / a;
                let better = match &leave {
                    None => true,
                    Some((lr, lratio)) => {
                        ratio < *lratio || (ratio == *lratio && self.basis[r] < self.basis[*lr])
                    }
                };
                if better {
                    leave = Some((r, ratio));
                }
            }
            match leave {
                None => return false,
                Some((r, _)) => self.pivot(r, enter),
            }
        }
    }
}

impl LinearProgram {
    pub fn new(a: Vec<Vec<Q>>, b: Vec<Q>, c: Vec<Q>) -> Self {
        LinearProgram { a, b, c }
    }

    pub fn solve(&self) -> LpOutcome {
        let m = self.a.len();
        let n = self.c.len();
        if m == 0 {
            // only x >= 0: optimum at zero unless some cost is negative
            return if self.c.iter().any(|c| c.is_negative()) {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal { x: vec![Q::zero(); n], value: Q::zero() }
            };
        }
        // phase 1 tableau with one artificial per row
        let mut t = Vec::with_capacity(m);
        for (i, (row, bi)) in self.a.iter().zip(&self.b).enumerate() {
            assert_eq!(row.len(), n, "constraint width");
            let flip = bi.is_negative();
            let mut r: Vec<Q> = row.iter().map(|v| if flip { -v } else { v.clone() }).collect();
            r.extend((0..m).map(|k| if k == i { Q::one() } else { Q::zero() }));
            r.push(if flip { -bi } else { bi.clone() });
            t.push(r);
        }
        let mut tab = Tableau { t, basis: (n..n + m).collect() };
        let mut phase1_cost = vec![Q::zero(); n + m];
        for c in phase1_cost.iter_mut().skip(n) {
            *c = Q::one();
        }
        tab.optimize(&phase1_cost, n + m);
        let rhs = n + m;
        let infeas: Q = tab
            .basis
            .iter()
            .enumerate()
            .filter(|(_, &bv)| bv >= n)
            .map(|(r, _)| tab.t[r][rhs].clone())
            .sum();
        if infeas.is_positive() {
            return LpOutcome::Infeasible;
        }
        // drive remaining artificials out; drop redundant rows
        let mut r = 0;
        while r < tab.t.len() {
            if tab.basis[r] >= n {
                if let Some(j) = (0..n).find(|&j| !tab.t[r][j].is_zero()) {
                    tab.pivot(r, j);
                    r += 1;
                } else {
                    tab.t.remove(r);
                    tab.basis.remove(r);
                }
            } else {
                r += 1;
            }
        }
        if tab.t.is_empty() {
            return if self.c.iter().any(|c| c.is_negative()) {
                LpOutcome::Unbounded
            } else {
                LpOutcome::Optimal { x: vec![Q::zero(); n], value: Q::zero() }
            };
        }
        let mut cost = self.c.clone();
        cost.extend((0..m).map(|_| Q::zero()));
        if !tab.optimize(&cost, n) {
            return LpOutcome::Unbounded;
        }
        let mut x = vec![Q::zero(); n];
        for (r, &bv) in tab.basis.iter().enumerate() {
            if bv < n {
                x[bv] = tab.t[r][rhs].clone();
            }
        }
        let value = x.iter().zip(&self.c).map(|(a, b)| a * b).sum();
        LpOutcome::Optimal { x, value }
    }
}

/// A basic feasible solution of `A x = b, x >= 0`, if one exists.
pub fn feasible_point(a: Vec<Vec<Q>>, b: Vec<Q>) -> Option<Vec<Q>> {
    let n = a.first().map_or(0, Vec::len);
    match LinearProgram::new(a, b, vec![Q::zero(); n]).solve() {
        LpOutcome::Optimal { x, .. } => Some(x),
        _ => None,
    }
}
