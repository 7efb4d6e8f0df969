//! Halfspace description of the chained no-signaling polytope, extremality
//! certificates, and brute-force vertex enumeration for small `n`.

use std::collections::{BTreeSet, HashSet};

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::linalg;
use crate::matrix::{equality_system, validate, DistributionMatrix, Scenario};
use crate::rational::{to_f64, Q};

pub use crate::linalg::rank_exact;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum ConstraintKind {
    /// Row sum or no-signaling equality, stored once.
    Equality,
    /// `-x_c <= 0`.
    Nonnegativity,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintRow {
    pub coef: Vec<Q>,
    pub bound: Q,
    pub kind: ConstraintKind,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConstraintSystem {
    pub scenario: Scenario,
    pub rows: Vec<ConstraintRow>,
}

impl ConstraintSystem {
    pub fn equalities(&self) -> impl Iterator<Item = &ConstraintRow> {
        self.rows.iter().filter(|r| r.kind == ConstraintKind::Equality)
    }

    pub fn equality_rank(&self) -> usize {
        let m: Vec<Vec<Q>> = self.equalities().map(|r| r.coef.clone()).collect();
        rank_exact(&m)
    }

    /// Rows active at `x`: every equality, plus nonnegativity rows of zero cells.
    pub fn active_rows(&self, x: &[Q]) -> Vec<Vec<Q>> {
        self.rows
            .iter()
            .filter(|r| match r.kind {
                ConstraintKind::Equality => true,
                ConstraintKind::Nonnegativity => {
                    let v: Q = r.coef.iter().zip(x).map(|(a, b)| a * b).sum();
                    v == r.bound
                }
            })
            .map(|r| r.coef.clone())
            .collect()
    }
}

/// `2n` row sums, `2n` marginal equalities and `8n` nonnegativity rows.
pub fn build_constraints(scenario: Scenario) -> ConstraintSystem {
    let mut rows: Vec<ConstraintRow> = equality_system(scenario)
        .into_iter()
        .map(|(coef, bound)| ConstraintRow { coef, bound, kind: ConstraintKind::Equality })
        .collect();
    let dim = scenario.cells();
    for c in 0..dim {
        let mut coef = vec![Q::zero(); dim];
        coef[c] = -Q::one();
        rows.push(ConstraintRow { coef, bound: Q::zero(), kind: ConstraintKind::Nonnegativity });
    }
    ConstraintSystem { scenario, rows }
}

/// `true` when the active constraints at `dm` have full rank `8n`.
pub fn is_extremal(dm: &DistributionMatrix) -> Result<bool> {
    if !validate(dm).is_empty() {
        return Err(Error::Precondition("point is outside the no-signaling polytope".into()));
    }
    let sys = build_constraints(dm.scenario());
    let active = sys.active_rows(&dm.flat());
    Ok(rank_exact(&active) == dm.scenario().cells())
}

/// Exact vertex through the zero cells `zeros`, if the system is nonsingular
/// and the solution is nonnegative.
fn exact_vertex(sc: Scenario, zeros: &[usize]) -> Option<Vec<Q>> {
    let dim = sc.cells();
    let mut a: Vec<Vec<Q>> = Vec::with_capacity(dim);
    let mut b: Vec<Q> = Vec::with_capacity(dim);
    for (coef, rhs) in equality_system(sc) {
        a.push(coef);
        b.push(rhs);
    }
    for &c in zeros {
        let mut coef = vec![Q::zero(); dim];
        coef[c] = Q::one();
        a.push(coef);
        b.push(Q::zero());
    }
    let x = linalg::solve(&a, &b)?;
    if x.iter().any(|v| v.is_negative()) {
        return None;
    }
    Some(x)
}

/// Affine parametrization `x = base + basis * y` of the equality subspace,
/// in floating point, with `y` the free coordinates.
fn parametrize(sc: Scenario) -> (Vec<f64>, Vec<Vec<f64>>) {
    let dim = sc.cells();
    let eq = equality_system(sc);
    // reduced row echelon form of [E | f]
    let mut m: Vec<Vec<Q>> = eq
        .into_iter()
        .map(|(mut c, r)| {
            c.push(r);
            c
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..dim {
        let Some(p) = (r..m.len()).find(|&i| !m[i][c].is_zero()) else { continue };
        m.swap(r, p);
        let inv = Q::one() / &m[r][c];
        for v in m[r].iter_mut() {
            *v = &*v * &inv;
        }
        for i in 0..m.len() {
            if i != r && !m[i][c].is_zero() {
                let f = m[i][c].clone();
                for j in 0..=dim {
                    let d = &f * &m[r][j];
                    m[i][j] -= d;
                }
            }
        }
        pivots.push(c);
        r += 1;
    }
    let free: Vec<usize> = (0..dim).filter(|c| !pivots.contains(c)).collect();
    let mut base = vec![0.0; dim];
    let mut basis = vec![vec![0.0; free.len()]; dim];
    for (j, &f) in free.iter().enumerate() {
        basis[f][j] = 1.0;
    }
    for (i, &p) in pivots.iter().enumerate() {
        base[p] = to_f64(&m[i][dim]);
        for (j, &f) in free.iter().enumerate() {
            basis[p][j] = -to_f64(&m[i][f]);
        }
    }
    (base, basis)
}

struct Search<'a> {
    sc: Scenario,
    base: &'a [f64],
    basis: &'a [Vec<f64>],
    free_dim: usize,
    chosen: Vec<usize>,
    zeros_in_row: Vec<usize>,
    // echelon rows over y with a right-hand side in the last slot
    echelon: Vec<(usize, Vec<f64>)>,
    seen: HashSet<Vec<i64>>,
    found: BTreeSet<Vec<Q>>,
}

impl Search<'_> {
    fn run(&mut self, next: usize) {
        if self.chosen.len() == self.free_dim {
            self.leaf();
            return;
        }
        let dim = self.sc.cells();
        let needed = self.free_dim - self.chosen.len();
        for c in next..dim {
            if dim - c < needed {
                break;
            }
            let row = c / 4;
            if self.zeros_in_row[row] == 3 {
                continue;
            }
            // x_c = 0  <=>  basis[c] . y = -base[c]
            let mut v: Vec<f64> = self.basis[c].clone();
            v.push(-self.base[c]);
            for (p, e) in &self.echelon {
                let f = v[*p];
                if f != 0.0 {
                    for (vi, ei) in v.iter_mut().zip(e) {
                        *vi -= f * ei;
                    }
                }
            }
            let Some(p) = (0..self.free_dim).max_by(|&a, &b| v[a].abs().total_cmp(&v[b].abs())) else {
                continue;
            };
            if v[p].abs() < 1e-9 {
                continue;
            }
            let inv = 1.0 / v[p];
            for vi in v.iter_mut() {
                *vi *= inv;
            }
            self.echelon.push((p, v));
            self.chosen.push(c);
            self.zeros_in_row[row] += 1;
            self.run(c + 1);
            self.zeros_in_row[row] -= 1;
            self.chosen.pop();
            self.echelon.pop();
        }
    }

    fn leaf(&mut self) {
        let k = self.free_dim;
        let mut y = vec![0.0; k];
        for i in (0..self.echelon.len()).rev() {
            let (p, row) = &self.echelon[i];
            let mut s = row[k];
            for (j, yj) in y.iter().enumerate() {
                if j != *p {
                    s -= row[j] * yj;
                }
            }
            y[*p] = s;
        }
        let x: Vec<f64> = self
            .base
            .iter()
            .zip(self.basis)
            .map(|(b0, br)| b0 + br.iter().zip(&y).map(|(a, b)| a * b).sum::<f64>())
            .collect();
        if x.iter().any(|v| *v < -1e-9) {
            return;
        }
        let key: Vec<i64> = x.iter().map(|v| (v * 1e6).round() as i64).collect();
        if !self.seen.insert(key) {
            return;
        }
        if let Some(exact) = exact_vertex(self.sc, &self.chosen) {
            self.found.insert(exact);
        }
    }
}

/// All vertices of the polytope. `n = 2` is immediate; `n = 3` scans about
/// 2.7 million candidate bases and needs `allow_slow`.
pub fn enumerate_vertices(scenario: Scenario, allow_slow: bool) -> Result<Vec<DistributionMatrix>> {
    match scenario.n() {
        2 => {}
        3 if allow_slow => {}
        3 => {
            return Err(Error::Precondition(
                "vertex enumeration at n = 3 is slow; pass the slow flag".into(),
            ))
        }
        n => return Err(Error::Capacity { n, limit: 3 }),
    }
    let (base, basis) = parametrize(scenario);
    let free_dim = basis[0].len();
    let mut s = Search {
        sc: scenario,
        base: &base,
        basis: &basis,
        free_dim,
        chosen: Vec::new(),
        zeros_in_row: vec![0; scenario.rows()],
        echelon: Vec::new(),
        seen: HashSet::new(),
        found: BTreeSet::new(),
    };
    s.run(0);
    s.found
        .into_iter()
        .map(|x| DistributionMatrix::from_flat(scenario, &x))
        .collect()
}
