//! Vertices of the chained no-signaling polytope: local deterministic
//! assignments and generalized PR boxes, plus the fixed `(2,2,2)` catalogs.

use std::fmt;
use std::sync::OnceLock;

use num_traits::{One, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::matrix::{DistributionMatrix, Outcome, Party, Scenario};
use crate::rational::{half, Q};

/// Largest `n` accepted by the exhaustive enumerations.
pub const MAX_ENUMERATION_N: usize = 12;

/// A deterministic strategy: every setting of each party is mapped to `+`
/// (`true`) or `0` (`false`).
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct LocalDeterministic {
    scenario: Scenario,
    a_assign: Vec<bool>,
    b_assign: Vec<bool>,
}

impl LocalDeterministic {
    pub fn new(scenario: Scenario, a_assign: Vec<bool>, b_assign: Vec<bool>) -> Result<Self> {
        if a_assign.len() != scenario.n() || b_assign.len() != scenario.n() {
            return Err(Error::Shape(format!(
                "assignment lengths {}/{} for n = {}",
                a_assign.len(),
                b_assign.len(),
                scenario.n()
            )));
        }
        Ok(LocalDeterministic { scenario, a_assign, b_assign })
    }

    /// From the `2n` assignment-table columns `a1, b1, a2, b2, ...`.
    pub fn from_columns(scenario: Scenario, columns: &[bool]) -> Result<Self> {
        if columns.len() != scenario.rows() {
            return Err(Error::Shape(format!(
                "expected {} assignment columns, got {}",
                scenario.rows(),
                columns.len()
            )));
        }
        let a = columns.iter().step_by(2).copied().collect();
        let b = columns.iter().skip(1).step_by(2).copied().collect();
        Self::new(scenario, a, b)
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn a_assign(&self) -> &[bool] {
        &self.a_assign
    }

    pub fn b_assign(&self) -> &[bool] {
        &self.b_assign
    }

    pub fn column(&self, c: usize) -> bool {
        match self.scenario.column_party(c) {
            (Party::Alice, i) => self.a_assign[i],
            (Party::Bob, i) => self.b_assign[i],
        }
    }

    pub fn columns(&self) -> Vec<bool> {
        (0..self.scenario.rows()).map(|c| self.column(c)).collect()
    }

    /// The single outcome this strategy produces for row `k`.
    pub fn outcome(&self, k: usize) -> Outcome {
        let (a, b) = self.scenario.row_settings(k);
        Outcome::from_parties(self.a_assign[a], self.b_assign[b])
    }

    pub fn to_matrix(&self) -> DistributionMatrix {
        let mut m = DistributionMatrix::zeros(self.scenario);
        for k in 0..self.scenario.rows() {
            m.set(k, self.outcome(k), Q::one());
        }
        m
    }

    /// Inverse of [`to_matrix`](Self::to_matrix) for 0/1 matrices.
    pub fn from_matrix(dm: &DistributionMatrix) -> Option<Self> {
        let sc = dm.scenario();
        let mut cols: Vec<Option<bool>> = vec![None; sc.rows()];
        for k in 0..sc.rows() {
            let ones: Vec<Outcome> = Outcome::ALL
                .into_iter()
                .filter(|&o| dm.get(k, o).is_one())
                .collect();
            let zeros = Outcome::ALL.iter().filter(|&&o| dm.get(k, o).is_zero()).count();
            if ones.len() != 1 || zeros != 3 {
                return None;
            }
            let (ca, cb) = sc.row_columns(k);
            for (c, v) in [(ca, ones[0].alice_plus()), (cb, ones[0].bob_plus())] {
                match cols[c] {
                    Some(prev) if prev != v => return None,
                    _ => cols[c] = Some(v),
                }
            }
        }
        let cols: Vec<bool> = cols.into_iter().map(|c| c.expect("every column covered")).collect();
        Self::from_columns(sc, &cols).ok()
    }
}

impl fmt::Display for LocalDeterministic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sym = |v: &bool| if *v { '+' } else { '0' };
        let a: String = self.a_assign.iter().map(sym).collect();
        let b: String = self.b_assign.iter().map(sym).collect();
        write!(f, "LD[a={a} b={b}]")
    }
}

/// Row shape of a generalized PR box.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum RowType {
    /// `(1/2, 0, 0, 1/2)`
    Correlated,
    /// `(0, 1/2, 1/2, 0)`
    Anticorrelated,
}

impl RowType {
    /// The two outcomes this row type assigns probability zero.
    pub fn zero_cells(self) -> [Outcome; 2] {
        match self {
            RowType::Correlated => [Outcome::PlusZero, Outcome::ZeroPlus],
            RowType::Anticorrelated => [Outcome::PlusPlus, Outcome::ZeroZero],
        }
    }

    pub fn supports(self, o: Outcome) -> bool {
        !self.zero_cells().contains(&o)
    }

    /// `true` when the parties agree on every supported outcome.
    pub fn agrees(self) -> bool {
        self == RowType::Correlated
    }

    pub fn symbol(self) -> char {
        match self {
            RowType::Correlated => 'C',
            RowType::Anticorrelated => 'A',
        }
    }
}

/// Extremal nonlocal vertex: every row correlated or anticorrelated, with an
/// odd number of each.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub struct GeneralizedPrBox {
    scenario: Scenario,
    row_types: Vec<RowType>,
}

impl GeneralizedPrBox {
    pub fn new(scenario: Scenario, row_types: Vec<RowType>) -> Result<Self> {
        if row_types.len() != scenario.rows() {
            return Err(Error::Shape(format!(
                "expected {} row types, got {}",
                scenario.rows(),
                row_types.len()
            )));
        }
        let correlated = row_types.iter().filter(|t| t.agrees()).count();
        if correlated % 2 == 0 {
            return Err(Error::Precondition(format!(
                "a generalized PR box needs odd numbers of correlated and anticorrelated rows, got {correlated} correlated"
            )));
        }
        Ok(GeneralizedPrBox { scenario, row_types })
    }

    /// Parses a row-type string such as `"CCCCCA"` in canonical row order.
    pub fn from_spec(spec: &str) -> Result<Self> {
        let types = spec
            .trim()
            .chars()
            .map(|c| match c.to_ascii_uppercase() {
                'C' => Ok(RowType::Correlated),
                'A' => Ok(RowType::Anticorrelated),
                other => Err(Error::Parse(format!("bad row type {other:?} in {spec:?}"))),
            })
            .collect::<Result<Vec<_>>>()?;
        if types.len() % 2 != 0 || types.len() < 4 {
            return Err(Error::Parse(format!("row-type string {spec:?} must have 2n >= 4 letters")));
        }
        Self::new(Scenario::new(types.len() / 2)?, types)
    }

    /// The box with a single anticorrelated row at `a1bn`: the only one that
    /// sends the chained Bell expression to zero.
    pub fn canonical(scenario: Scenario) -> Self {
        let mut t = vec![RowType::Correlated; scenario.rows()];
        *t.last_mut().expect("rows") = RowType::Anticorrelated;
        GeneralizedPrBox { scenario, row_types: t }
    }

    pub fn scenario(&self) -> Scenario {
        self.scenario
    }

    pub fn row_types(&self) -> &[RowType] {
        &self.row_types
    }

    pub fn row_type(&self, k: usize) -> RowType {
        self.row_types[k]
    }

    pub fn is_zero_cell(&self, row: usize, o: Outcome) -> bool {
        !self.row_types[row].supports(o)
    }

    /// All `4n` zero cells in canonical order.
    pub fn zero_cells(&self) -> Vec<(usize, Outcome)> {
        self.row_types
            .iter()
            .enumerate()
            .flat_map(|(k, t)| t.zero_cells().into_iter().map(move |o| (k, o)))
            .collect()
    }

    /// All `4n` support cells in canonical order.
    pub fn support_cells(&self) -> Vec<(usize, Outcome)> {
        self.row_types
            .iter()
            .enumerate()
            .flat_map(|(k, t)| {
                Outcome::ALL
                    .into_iter()
                    .filter(move |&o| t.supports(o))
                    .map(move |o| (k, o))
            })
            .collect()
    }

    pub fn spec(&self) -> String {
        self.row_types.iter().map(|t| t.symbol()).collect()
    }

    pub fn to_matrix(&self) -> DistributionMatrix {
        let mut m = DistributionMatrix::zeros(self.scenario);
        for (k, t) in self.row_types.iter().enumerate() {
            for o in Outcome::ALL {
                if t.supports(o) {
                    m.set(k, o, half());
                }
            }
        }
        m
    }

    pub fn from_matrix(dm: &DistributionMatrix) -> Option<Self> {
        let types = dm
            .rows()
            .iter()
            .map(|r| {
                let h = half();
                let z = Q::zero();
                if r[0] == h && r[3] == h && r[1] == z && r[2] == z {
                    Some(RowType::Correlated)
                } else if r[1] == h && r[2] == h && r[0] == z && r[3] == z {
                    Some(RowType::Anticorrelated)
                } else {
                    None
                }
            })
            .collect::<Option<Vec<_>>>()?;
        Self::new(dm.scenario(), types).ok()
    }
}

impl fmt::Display for GeneralizedPrBox {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "GPR[{}]", self.spec())
    }
}

fn check_capacity(sc: Scenario) -> Result<()> {
    if sc.n() > MAX_ENUMERATION_N {
        return Err(Error::Capacity { n: sc.n(), limit: MAX_ENUMERATION_N });
    }
    Ok(())
}

/// All `2^(2n)` deterministic strategies. Bit `c` of the index is assignment
/// column `c` (1 = `+`).
pub fn enumerate_lds(scenario: Scenario) -> Result<Vec<LocalDeterministic>> {
    check_capacity(scenario)?;
    let m = scenario.rows();
    Ok((0u64..1 << m)
        .map(|bits| {
            let cols: Vec<bool> = (0..m).map(|c| bits >> c & 1 == 1).collect();
            LocalDeterministic::from_columns(scenario, &cols).expect("shape")
        })
        .collect())
}

/// All `2^(2n-1)` generalized PR boxes. Bit `k` of the index marks row `k`
/// anticorrelated for the first `2n - 1` rows; the last row fixes parity.
pub fn enumerate_gprs(scenario: Scenario) -> Result<Vec<GeneralizedPrBox>> {
    check_capacity(scenario)?;
    let m = scenario.rows();
    Ok((0u64..1 << (m - 1))
        .map(|bits| {
            let mut types: Vec<RowType> = (0..m - 1)
                .map(|k| {
                    if bits >> k & 1 == 1 {
                        RowType::Anticorrelated
                    } else {
                        RowType::Correlated
                    }
                })
                .collect();
            let correlated = types.iter().filter(|t| t.agrees()).count();
            types.push(if correlated % 2 == 0 {
                RowType::Correlated
            } else {
                RowType::Anticorrelated
            });
            GeneralizedPrBox::new(scenario, types).expect("parity fixed")
        })
        .collect())
}

/// The `(2,2,2)` vertex catalogs under the standard 1-based indexing: eight PR
/// boxes and sixteen deterministic strategies.
#[derive(Clone, Debug)]
pub struct Catalog222 {
    prs: Vec<GeneralizedPrBox>,
    lds: Vec<LocalDeterministic>,
}

// Row types in (ab, ab', a'b, a'b') order.
const PR_TYPES: [&str; 8] = ["CCCA", "AAAC", "CCAC", "AACA", "CACC", "ACAA", "ACCC", "CAAA"];
// Assignments (a, a', b, b').
const LD_ASSIGN: [&str; 16] = [
    "++++", "++00", "00++", "0000", "+++0", "++0+", "00+0", "000+", "+0++", "+000", "0+++",
    "0+00", "+0+0", "+00+", "0++0", "0+0+",
];

impl Catalog222 {
    fn build() -> Self {
        let sc = Scenario::two_two_two();
        let prs = PR_TYPES
            .iter()
            .map(|s| {
                let t: Vec<RowType> = s
                    .chars()
                    .map(|c| if c == 'C' { RowType::Correlated } else { RowType::Anticorrelated })
                    .collect();
                // (ab, ab', a'b, a'b') -> (ab, a'b, a'b', ab')
                GeneralizedPrBox::new(sc, vec![t[0], t[2], t[3], t[1]]).expect("valid PR box")
            })
            .collect();
        let lds = LD_ASSIGN
            .iter()
            .map(|s| {
                let v: Vec<bool> = s.chars().map(|c| c == '+').collect();
                LocalDeterministic::new(sc, vec![v[0], v[1]], vec![v[2], v[3]]).expect("shape")
            })
            .collect();
        Catalog222 { prs, lds }
    }

    /// PR box by 1-based catalog index.
    pub fn pr(&self, index: usize) -> &GeneralizedPrBox {
        &self.prs[index - 1]
    }

    /// Deterministic strategy by 1-based catalog index.
    pub fn ld(&self, index: usize) -> &LocalDeterministic {
        &self.lds[index - 1]
    }

    pub fn prs(&self) -> &[GeneralizedPrBox] {
        &self.prs
    }

    pub fn lds(&self) -> &[LocalDeterministic] {
        &self.lds
    }

    pub fn pr_index(&self, g: &GeneralizedPrBox) -> Option<usize> {
        self.prs.iter().position(|p| p == g).map(|i| i + 1)
    }

    pub fn ld_index(&self, d: &LocalDeterministic) -> Option<usize> {
        self.lds.iter().position(|p| p == d).map(|i| i + 1)
    }

    pub fn sizes(&self) -> (usize, usize) {
        (self.prs.len(), self.lds.len())
    }
}

/// Shared `(2,2,2)` catalog.
pub fn catalog_222() -> &'static Catalog222 {
    static CATALOG: OnceLock<Catalog222> = OnceLock::new();
    CATALOG.get_or_init(Catalog222::build)
}
