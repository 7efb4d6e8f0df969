//! Distribution matrices, validation against the no-signaling polytope, and
//! exact convex mixing.

use std::fmt;

use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::linalg;
use crate::rational::{fmt_q, qi, Q};
use crate::vertex::{GeneralizedPrBox, LocalDeterministic};

/// Number of settings per party in a chained scenario. `n = 2` is the usual
/// `(2,2,2)` setting with `a1 = a`, `a2 = a'`, `b1 = b`, `b2 = b'`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct Scenario {
    n: usize,
}

/// The party owning a column of an assignment table.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Party {
    Alice,
    Bob,
}

impl Scenario {
    pub fn new(n: usize) -> Result<Self> {
        if n < 2 {
            return Err(Error::Shape(format!("scenario needs n >= 2, got {n}")));
        }
        Ok(Scenario { n })
    }

    pub fn two_two_two() -> Self {
        Scenario { n: 2 }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    /// Number of setting pairs (rows), `2n`.
    pub fn rows(&self) -> usize {
        2 * self.n
    }

    /// Ambient dimension `8n`.
    pub fn cells(&self) -> usize {
        8 * self.n
    }

    /// Zero-based `(alice setting, bob setting)` of canonical row `k`.
    pub fn row_settings(&self, k: usize) -> (usize, usize) {
        assert!(k < self.rows(), "row {k} out of range");
        if k == self.rows() - 1 {
            (0, self.n - 1)
        } else if k % 2 == 0 {
            (k / 2, k / 2)
        } else {
            ((k + 1) / 2, (k - 1) / 2)
        }
    }

    pub fn row_of_settings(&self, alice: usize, bob: usize) -> Option<usize> {
        (0..self.rows()).find(|&k| self.row_settings(k) == (alice, bob))
    }

    /// Label such as `"a2b1"`.
    pub fn row_label(&self, k: usize) -> String {
        let (a, b) = self.row_settings(k);
        format!("a{}b{}", a + 1, b + 1)
    }

    /// Assignment-table column `c` holds `a_{c/2+1}` for even `c` and
    /// `b_{c/2+1}` for odd `c`. Row `k` sits on the line between columns `k`
    /// and `k + 1 (mod 2n)`.
    pub fn column_party(&self, c: usize) -> (Party, usize) {
        if c % 2 == 0 {
            (Party::Alice, c / 2)
        } else {
            (Party::Bob, c / 2)
        }
    }

    /// `(alice column, bob column)` straddling row `k`.
    pub fn row_columns(&self, k: usize) -> (usize, usize) {
        let right = (k + 1) % self.rows();
        if k % 2 == 0 {
            (k, right)
        } else {
            (right, k)
        }
    }
}

/// Joint outcome of one trial, in column order `++, +0, 0+, 00`.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum Outcome {
    PlusPlus,
    PlusZero,
    ZeroPlus,
    ZeroZero,
}

impl Outcome {
    pub const ALL: [Outcome; 4] = [
        Outcome::PlusPlus,
        Outcome::PlusZero,
        Outcome::ZeroPlus,
        Outcome::ZeroZero,
    ];

    pub fn index(self) -> usize {
        self as usize
    }

    pub fn from_index(i: usize) -> Outcome {
        Self::ALL[i]
    }

    /// Outcome with Alice reporting `+` iff `alice_plus`, likewise for Bob.
    pub fn from_parties(alice_plus: bool, bob_plus: bool) -> Outcome {
        match (alice_plus, bob_plus) {
            (true, true) => Outcome::PlusPlus,
            (true, false) => Outcome::PlusZero,
            (false, true) => Outcome::ZeroPlus,
            (false, false) => Outcome::ZeroZero,
        }
    }

    pub fn alice_plus(self) -> bool {
        matches!(self, Outcome::PlusPlus | Outcome::PlusZero)
    }

    pub fn bob_plus(self) -> bool {
        matches!(self, Outcome::PlusPlus | Outcome::ZeroPlus)
    }

    pub fn label(self) -> &'static str {
        ["++", "+0", "0+", "00"][self.index()]
    }
}

/// A `2n x 4` table of conditional outcome probabilities.
///
/// Construction only checks the shape. Nonnegativity, row normalization and
/// the no-signaling equalities are diagnosed by [`validate`] so that malformed
/// inputs can be reported rather than rejected blindly.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct DistributionMatrix {
    scenario: Scenario,
    rows: Vec<[Q; 4]>,
}

impl DistributionMatrix {
    pub fn new(scenario: Scenario, rows: Vec<[Q; 4]>) -> Result<Self> {
        if rows.len() != scenario.rows() {
            return Err(Error::Shape(format!(
                "expected {} rows for n = {}, got {}",
                scenario.rows(),
                scenario.n(),
                rows.len()
            )));
        }
        Ok(DistributionMatrix { scenario, rows })
    }

    /// Builds from `8n` entries in row-major canonical order.
    pub fn from_flat(scenario: Scenario, flat: &[Q]) -> Result<Self> {
        if flat.len() != scenario.cells() {
            return Err(Error::Shape(format!(
                "expected {} entries, got {}",
                scenario.cells(),
                flat.len()
            )));
        }
        let rows = flat
            .chunks(4)
            .map(|c| [c[0].clone(), c[1].clone(), c[2].clone(), c[3].clone()])
            .collect();
        Self::new(scenario, rows)
    }

    pub fn zeros(scenario: Scenario) -> Self {
        let rows = vec![[Q::zero(), Q::zero(), Q::zero(), Q::zero()]; scenario.rows()];
        DistributionMatrix { scenario, rows }
    }

    /// Every cell `1/4`.
    pub fn uniform(scenario: Scenario) -> Self {
        let quarter = Q::new(1.into(), 4.into());
        let rows = vec![
            [quarter.clone(), quarter.clone(), quarter.clone(), quarter];
            scenario.rows()
        ];
        DistributionMatrix { scenario, rows }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn n(&self) -> usize {
        self.scenario.n()
    }

    pub fn rows(&self) -> &[[Q; 4]] {
        &self.rows
    }

    pub fn get(&self, row: usize, outcome: Outcome) -> &Q {
        &self.rows[row][outcome.index()]
    }

    pub fn set(&mut self, row: usize, outcome: Outcome, value: Q) {
        self.rows[row][outcome.index()] = value;
    }

    pub fn flat(&self) -> Vec<Q> {
        self.rows.iter().flat_map(|r| r.iter().cloned()).collect()
    }

    pub fn cells(&self) -> impl Iterator<Item = (usize, Outcome, &Q)> {
        self.rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| Outcome::ALL.iter().map(move |&o| (r, o, &row[o.index()])))
    }

    /// `P(party reports + | row)`.
    pub fn plus_marginal(&self, row: usize, party: Party) -> Q {
        let r = &self.rows[row];
        match party {
            Party::Alice => &r[0] + &r[1],
            Party::Bob => &r[0] + &r[2],
        }
    }

    /// `self + weight * other`, entrywise.
    pub fn add_scaled(&mut self, other: &DistributionMatrix, weight: &Q) {
        debug_assert_eq!(self.scenario, other.scenario);
        for (a, b) in self.rows.iter_mut().zip(&other.rows) {
            for j in 0..4 {
                a[j] += weight * &b[j];
            }
        }
    }

    pub fn scaled(&self, weight: &Q) -> DistributionMatrix {
        let mut out = DistributionMatrix::zeros(self.scenario);
        out.add_scaled(self, weight);
        out
    }

    pub fn to_f64_rows(&self) -> Vec<[f64; 4]> {
        self.rows
            .iter()
            .map(|r| {
                [
                    crate::rational::to_f64(&r[0]),
                    crate::rational::to_f64(&r[1]),
                    crate::rational::to_f64(&r[2]),
                    crate::rational::to_f64(&r[3]),
                ]
            })
            .collect()
    }

    pub fn is_nonsignaling(&self) -> bool {
        validate(self).is_empty()
    }
}

impl fmt::Display for DistributionMatrix {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (k, row) in self.rows.iter().enumerate() {
            write!(f, "{:>6}", self.scenario.row_label(k))?;
            for v in row {
                write!(f, " {:>10}", fmt_q(v))?;
            }
            writeln!(f)?;
        }
        Ok(())
    }
}

/// One failed probability or no-signaling constraint.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    /// A negative cell; the residual is the cell value.
    Negative { row: usize, outcome: Outcome, residual: Q },
    /// Row sum minus one.
    RowSum { row: usize, residual: Q },
    /// The `+` marginal of the party owning assignment column `column`
    /// differs between the two rows it appears in: `P(row_a) - P(row_b)`.
    NoSignaling {
        party: Party,
        setting: usize,
        row_a: usize,
        row_b: usize,
        residual: Q,
    },
}

impl Violation {
    pub fn residual(&self) -> &Q {
        match self {
            Violation::Negative { residual, .. }
            | Violation::RowSum { residual, .. }
            | Violation::NoSignaling { residual, .. } => residual,
        }
    }

    pub fn describe(&self, scenario: Scenario) -> String {
        match self {
            Violation::Negative { row, outcome, residual } => format!(
                "negative entry P({}|{}) = {}",
                outcome.label(),
                scenario.row_label(*row),
                fmt_q(residual)
            ),
            Violation::RowSum { row, residual } => format!(
                "row {} sums to 1 + ({})",
                scenario.row_label(*row),
                fmt_q(residual)
            ),
            Violation::NoSignaling { party, setting, row_a, row_b, residual } => {
                let who = match party {
                    Party::Alice => format!("a{}", setting + 1),
                    Party::Bob => format!("b{}", setting + 1),
                };
                format!(
                    "no-signaling on {who}: P(+|{}) - P(+|{}) = {}",
                    scenario.row_label(*row_a),
                    scenario.row_label(*row_b),
                    fmt_q(residual)
                )
            }
        }
    }
}

/// Lists every violated constraint. An empty list means the matrix lies in the
/// no-signaling polytope.
pub fn validate(dm: &DistributionMatrix) -> Vec<Violation> {
    let sc = dm.scenario();
    let mut out = Vec::new();
    for (row, outcome, v) in dm.cells() {
        if v.is_negative() {
            out.push(Violation::Negative { row, outcome, residual: v.clone() });
        }
    }
    for (row, r) in dm.rows().iter().enumerate() {
        let s: Q = r.iter().sum();
        let residual = s - Q::one();
        if !residual.is_zero() {
            out.push(Violation::RowSum { row, residual });
        }
    }
    for (c, a, b) in marginal_pairs(sc) {
        let (party, setting) = sc.column_party(c);
        let residual = dm.plus_marginal(a, party) - dm.plus_marginal(b, party);
        if !residual.is_zero() {
            out.push(Violation::NoSignaling { party, setting, row_a: a, row_b: b, residual });
        }
    }
    out
}

/// For each assignment column, the two rows that share that setting.
pub(crate) fn marginal_pairs(sc: Scenario) -> Vec<(usize, usize, usize)> {
    let m = sc.rows();
    (0..m).map(|c| (c, (c + m - 1) % m, c)).collect()
}

/// Rows of the independent equality system (`2n` row sums, `2n` marginal
/// equalities) over the `8n` flat coordinates, with right-hand sides.
pub(crate) fn equality_system(sc: Scenario) -> Vec<(Vec<Q>, Q)> {
    let dim = sc.cells();
    let mut rows = Vec::new();
    for r in 0..sc.rows() {
        let mut coef = vec![Q::zero(); dim];
        for j in 0..4 {
            coef[4 * r + j] = Q::one();
        }
        rows.push((coef, Q::one()));
    }
    for (c, a, b) in marginal_pairs(sc) {
        let (party, _) = sc.column_party(c);
        let cols: [usize; 2] = match party {
            Party::Alice => [0, 1],
            Party::Bob => [0, 2],
        };
        let mut coef = vec![Q::zero(); dim];
        for j in cols {
            coef[4 * a + j] += Q::one();
            coef[4 * b + j] -= Q::one();
        }
        rows.push((coef, Q::zero()));
    }
    rows
}

/// Minimum-Euclidean-norm adjustment that makes every row sum to one and every
/// marginal equality hold. Signs of entries are not enforced.
pub fn project_nonsignaling(dm: &DistributionMatrix) -> DistributionMatrix {
    let sc = dm.scenario();
    let eq = equality_system(sc);
    let x = dm.flat();
    let residual: Vec<Q> = eq
        .iter()
        .map(|(coef, rhs)| coef.iter().zip(&x).map(|(a, b)| a * b).sum::<Q>() - rhs)
        .collect();
    let gram: Vec<Vec<Q>> = eq
        .iter()
        .map(|(ri, _)| {
            eq.iter()
                .map(|(rj, _)| ri.iter().zip(rj).map(|(a, b)| a * b).sum())
                .collect()
        })
        .collect();
    let y = linalg::solve(&gram, &residual).expect("independent equality rows");
    let mut out = x;
    for ((coef, _), yi) in eq.iter().zip(&y) {
        for (o, c) in out.iter_mut().zip(coef) {
            if !c.is_zero() {
                *o -= c * yi;
            }
        }
    }
    DistributionMatrix::from_flat(sc, &out).expect("same shape")
}

/// Exact convex combination. Weights must be nonnegative and sum to one and
/// all matrices must share a scenario.
pub fn mix(terms: &[(DistributionMatrix, Q)]) -> Result<DistributionMatrix> {
    let first = terms
        .first()
        .ok_or_else(|| Error::Shape("mix of zero terms".into()))?;
    let sc = first.0.scenario();
    let mut total = Q::zero();
    for (m, w) in terms {
        if m.scenario() != sc {
            return Err(Error::Shape(format!(
                "scenario mismatch: n = {} vs n = {}",
                sc.n(),
                m.n()
            )));
        }
        if w.is_negative() {
            return Err(Error::Precondition(format!("negative weight {}", fmt_q(w))));
        }
        total += w;
    }
    if !total.is_one() {
        return Err(Error::Normalization(total));
    }
    let mut out = DistributionMatrix::zeros(sc);
    for (m, w) in terms {
        out.add_scaled(m, w);
    }
    Ok(out)
}

/// Probabilities of each setting pair, in canonical row order.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SettingsDistribution {
    scenario: Scenario,
    probs: Vec<Q>,
}

impl SettingsDistribution {
    pub fn new(scenario: Scenario, probs: Vec<Q>) -> Result<Self> {
        if probs.len() != scenario.rows() {
            return Err(Error::Shape(format!(
                "expected {} setting probabilities, got {}",
                scenario.rows(),
                probs.len()
            )));
        }
        if let Some(p) = probs.iter().find(|p| p.is_negative()) {
            return Err(Error::Precondition(format!(
                "negative setting probability {}",
                fmt_q(p)
            )));
        }
        let total: Q = probs.iter().sum();
        if !total.is_one() {
            return Err(Error::Normalization(total));
        }
        Ok(SettingsDistribution { scenario, probs })
    }

    /// `1/(2n)` for every setting pair.
    pub fn uniform(scenario: Scenario) -> Self {
        let p = Q::new(1.into(), (scenario.rows() as i64).into());
        SettingsDistribution { scenario, probs: vec![p; scenario.rows()] }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn probs(&self) -> &[Q] {
        &self.probs
    }

    pub fn prob(&self, row: usize) -> &Q {
        &self.probs[row]
    }
}

/// At most one (generalized) PR box plus weighted local deterministic terms.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Decomposition {
    pub pr_term: Option<(GeneralizedPrBox, Q)>,
    pub ld_terms: Vec<(LocalDeterministic, Q)>,
}

impl Decomposition {
    pub fn local(ld_terms: Vec<(LocalDeterministic, Q)>) -> Self {
        Decomposition { pr_term: None, ld_terms }
    }

    /// Weight on the PR box, zero when absent.
    pub fn pr_weight(&self) -> Q {
        self.pr_term.as_ref().map(|(_, w)| w.clone()).unwrap_or_else(Q::zero)
    }

    pub fn local_weight(&self) -> Q {
        self.ld_terms.iter().map(|(_, w)| w).sum()
    }

    pub fn total_weight(&self) -> Q {
        self.pr_weight() + self.local_weight()
    }

    pub fn term_count(&self) -> usize {
        self.ld_terms.len() + usize::from(self.pr_term.is_some())
    }

    pub fn weight_of(&self, ld: &LocalDeterministic) -> Q {
        self.ld_terms
            .iter()
            .filter(|(d, _)| d == ld)
            .map(|(_, w)| w)
            .sum()
    }

    /// Mixes the terms back into a distribution matrix.
    pub fn reconstruct(&self, scenario: Scenario) -> DistributionMatrix {
        let mut out = DistributionMatrix::zeros(scenario);
        if let Some((g, w)) = &self.pr_term {
            out.add_scaled(&g.to_matrix(), w);
        }
        for (d, w) in &self.ld_terms {
            out.add_scaled(&d.to_matrix(), w);
        }
        out
    }

    /// Checks positivity of weights and unit total.
    pub fn check_weights(&self) -> Result<()> {
        let all = self
            .pr_term
            .iter()
            .map(|(_, w)| w)
            .chain(self.ld_terms.iter().map(|(_, w)| w));
        for w in all {
            if !w.is_positive() {
                return Err(Error::Invariant(format!(
                    "non-positive decomposition weight {}",
                    fmt_q(w)
                )));
            }
        }
        let total = self.total_weight();
        if !total.is_one() {
            return Err(Error::Normalization(total));
        }
        Ok(())
    }

    /// Drops terms with zero weight.
    pub(crate) fn pruned(mut self) -> Self {
        self.ld_terms.retain(|(_, w)| !w.is_zero());
        if matches!(&self.pr_term, Some((_, w)) if w.is_zero()) {
            self.pr_term = None;
        }
        self
    }
}

/// Half the summed absolute cell differences, over all rows.
pub(crate) fn cell_tv(a: &DistributionMatrix, b: &DistributionMatrix) -> Q {
    let s: Q = a
        .flat()
        .iter()
        .zip(b.flat())
        .map(|(x, y)| (x - y).abs())
        .sum();
    s / qi(2)
}
