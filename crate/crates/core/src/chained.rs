//! The chained `(2,n,2)` engine: generalized PR boxes, their one-support
//! mismatch strategies, the read-off decomposition, and the two constructive
//! replacements (domino merge of two boxes, mismatch replacement of one
//! strategy).

use num_traits::{One, Signed, Zero};

use crate::error::{Error, Result};
use crate::matrix::{cell_tv, validate, Decomposition, DistributionMatrix, Outcome, Scenario};
use crate::rational::{fmt_q, Q};
use crate::vertex::{GeneralizedPrBox, LocalDeterministic, RowType, MAX_ENUMERATION_N};

/// A `(row, outcome)` cell where a generalized PR box has probability zero.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct MismatchCell {
    pub row: usize,
    pub outcome: Outcome,
}

fn same_scenario(a: Scenario, b: Scenario) -> Result<()> {
    if a != b {
        return Err(Error::Shape(format!(
            "scenario mismatch: n = {} vs n = {}",
            a.n(),
            b.n()
        )));
    }
    Ok(())
}

/// Rows where `d` puts its 1 on a zero cell of `g`.
pub fn mismatch_rows(g: &GeneralizedPrBox, d: &LocalDeterministic) -> Vec<usize> {
    (0..g.scenario().rows())
        .filter(|&k| g.is_zero_cell(k, d.outcome(k)))
        .collect()
}

/// Number of rows where `d` misses the support of `g`. Always odd.
pub fn support_mismatch_count(g: &GeneralizedPrBox, d: &LocalDeterministic) -> Result<usize> {
    same_scenario(g.scenario(), d.scenario())?;
    let m = mismatch_rows(g, d).len();
    if m % 2 == 0 {
        return Err(Error::Invariant(format!(
            "even mismatch count {m} between {g} and {d}"
        )));
    }
    Ok(m)
}

/// Propagates column `start` rightward using `g`'s row relations, skipping
/// nothing; row `k` links column `k` to column `k + 1`.
fn propagate(g: &GeneralizedPrBox, columns: &mut [bool], start: usize, steps: usize) {
    let m = columns.len();
    for s in 0..steps {
        let k = (start + s) % m;
        let next = (k + 1) % m;
        columns[next] = columns[k] ^ !g.row_type(k).agrees();
    }
}

/// The strategy that agrees with `g` everywhere except at `cell`.
pub fn mismatch_ld(g: &GeneralizedPrBox, cell: MismatchCell) -> Result<LocalDeterministic> {
    let sc = g.scenario();
    if cell.row >= sc.rows() || !g.is_zero_cell(cell.row, cell.outcome) {
        return Err(Error::Precondition(format!(
            "({}, {}) is not a zero cell of {g}",
            sc.row_label(cell.row.min(sc.rows() - 1)),
            cell.outcome.label()
        )));
    }
    let m = sc.rows();
    let mut cols = vec![false; m];
    let (ca, cb) = sc.row_columns(cell.row);
    cols[ca] = cell.outcome.alice_plus();
    cols[cb] = cell.outcome.bob_plus();
    // rows cell.row+1 .. cell.row-1 (wrapping) fill columns cell.row+2 .. cell.row
    propagate(g, &mut cols, (cell.row + 1) % m, m - 2);
    LocalDeterministic::from_columns(sc, &cols)
}

/// One strategy per zero cell of `g` (`4n` in total), in canonical cell order.
pub fn one_support_mismatches(g: &GeneralizedPrBox) -> Result<Vec<(MismatchCell, LocalDeterministic)>> {
    if g.scenario().n() > MAX_ENUMERATION_N {
        return Err(Error::Capacity { n: g.scenario().n(), limit: MAX_ENUMERATION_N });
    }
    g.zero_cells()
        .into_iter()
        .map(|(row, outcome)| {
            let cell = MismatchCell { row, outcome };
            Ok((cell, mismatch_ld(g, cell)?))
        })
        .collect()
}

/// Total mass of `dm` on the zero cells of `g`. For the canonical box this is
/// the chained Bell expression `I_n`.
pub fn chained_value(dm: &DistributionMatrix, g: &GeneralizedPrBox) -> Result<Q> {
    same_scenario(dm.scenario(), g.scenario())?;
    Ok(g.zero_cells().into_iter().map(|(k, o)| dm.get(k, o)).sum())
}

/// Mass of row `k` on the zero cells of row type `t`.
fn row_cost(dm: &DistributionMatrix, k: usize, t: RowType) -> Q {
    t.zero_cells().iter().map(|&o| dm.get(k, o)).sum()
}

/// The generalized PR box with `chained_value < 1`, if any.
///
/// The value is a sum of per-row costs, so the two cheapest boxes are found
/// by dynamic programming over the parity of anticorrelated rows.
pub fn identify_gpr(dm: &DistributionMatrix) -> Result<Option<GeneralizedPrBox>> {
    let sc = dm.scenario();
    if sc.n() > MAX_ENUMERATION_N {
        return Err(Error::Capacity { n: sc.n(), limit: MAX_ENUMERATION_N });
    }
    // best[parity] holds up to two (cost, types), cheapest first
    let mut best: [Vec<(Q, Vec<RowType>)>; 2] = [vec![(Q::zero(), Vec::new())], Vec::new()];
    for k in 0..sc.rows() {
        let mut next: [Vec<(Q, Vec<RowType>)>; 2] = [Vec::new(), Vec::new()];
        for (parity, entries) in best.iter().enumerate() {
            for (cost, types) in entries {
                for t in [RowType::Correlated, RowType::Anticorrelated] {
                    let p = parity ^ usize::from(t == RowType::Anticorrelated);
                    let mut ty = types.clone();
                    ty.push(t);
                    next[p].push((cost + row_cost(dm, k, t), ty));
                }
            }
        }
        for v in next.iter_mut() {
            v.sort_by(|a, b| a.0.cmp(&b.0).then_with(|| a.1.cmp(&b.1)));
            v.truncate(2);
        }
        best = next;
    }
    let one = Q::one();
    let below: Vec<&(Q, Vec<RowType>)> = best[1].iter().filter(|(c, _)| *c < one).collect();
    match below.as_slice() {
        [] => Ok(None),
        [(_, types)] => Ok(Some(GeneralizedPrBox::new(sc, types.clone())?)),
        _ => Err(Error::Invariant(
            "two generalized PR boxes both have chained value below 1; input is not nonsignaling"
                .into(),
        )),
    }
}

/// Brute-force version of [`identify_gpr`] over all boxes; kept as a test oracle.
pub fn identify_gpr_exhaustive(dm: &DistributionMatrix) -> Result<Option<GeneralizedPrBox>> {
    let one = Q::one();
    let mut found = None;
    for g in crate::vertex::enumerate_gprs(dm.scenario())? {
        if chained_value(dm, &g)? < one {
            if found.is_some() {
                return Err(Error::Invariant("two generalized PR boxes below 1".into()));
            }
            found = Some(g);
        }
    }
    Ok(found)
}

/// Read-off decomposition of a nonlocal chained distribution. Tolerant form:
/// returns the decomposition together with the exact reconstruction residual
/// (half the summed absolute cell differences). Weights are clamped at zero.
pub fn decompose_chained_with_residual(dm: &DistributionMatrix) -> Result<(Decomposition, Q)> {
    let g = identify_gpr(dm)?
        .ok_or_else(|| Error::NotApplicable("no generalized PR box has chained value below 1; the distribution is local".into()))?;
    let mut ld_terms = Vec::new();
    let mut local = Q::zero();
    for (cell, d) in one_support_mismatches(&g)? {
        let w = dm.get(cell.row, cell.outcome).clone();
        if w.is_negative() {
            return Err(Error::Precondition(format!("negative cell {}", fmt_q(&w))));
        }
        local += &w;
        ld_terms.push((d, w));
    }
    let p = Q::one() - local;
    let dec = Decomposition { pr_term: Some((g, p)), ld_terms }.pruned();
    let residual = cell_tv(&dec.reconstruct(dm.scenario()), dm);
    Ok((dec, residual))
}

/// One generalized PR box plus weights on its `4n` one-support-mismatch
/// strategies. Exact: fails unless the terms reproduce `dm` exactly.
pub fn decompose_chained(dm: &DistributionMatrix) -> Result<Decomposition> {
    let (dec, residual) = decompose_chained_with_residual(dm)?;
    if !residual.is_zero() {
        return Err(Error::InconsistentInput { residual });
    }
    Ok(dec)
}

/// `(local weight, decomposition)` where the local weight equals the chained
/// value of the identified box, attaining the bound `p <= I`.
pub fn tightness_witness(dm: &DistributionMatrix) -> Result<(Q, Decomposition)> {
    let dec = decompose_chained(dm)?;
    Ok((dec.local_weight(), dec))
}

/// Row label for a pair of boxes: `C`, `A`, or `U` where they differ.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PairRow {
    Correlated,
    Anticorrelated,
    Uniform,
}

pub fn pair_rows(ga: &GeneralizedPrBox, gb: &GeneralizedPrBox) -> Vec<PairRow> {
    ga.row_types()
        .iter()
        .zip(gb.row_types())
        .map(|(a, b)| match (a, b) {
            (RowType::Correlated, RowType::Correlated) => PairRow::Correlated,
            (RowType::Anticorrelated, RowType::Anticorrelated) => PairRow::Anticorrelated,
            _ => PairRow::Uniform,
        })
        .collect()
}

/// Four strategies whose uniform mixture equals `½ ga + ½ gb`.
///
/// Seeds the column right of the leftmost uniform row with `(+, +, 0, 0)` and
/// fills the remaining columns left to right, wrapping around.
pub fn domino_merge(ga: &GeneralizedPrBox, gb: &GeneralizedPrBox) -> Result<[LocalDeterministic; 4]> {
    same_scenario(ga.scenario(), gb.scenario())?;
    if ga == gb {
        return Err(Error::Precondition("domino merge needs two distinct generalized PR boxes".into()));
    }
    let sc = ga.scenario();
    let m = sc.rows();
    let rows = pair_rows(ga, gb);
    let uniform = rows.iter().filter(|r| **r == PairRow::Uniform).count();
    if uniform == 0 || uniform % 2 != 0 {
        return Err(Error::Invariant(format!("{uniform} uniform rows between {ga} and {gb}")));
    }
    let first_u = rows.iter().position(|r| *r == PairRow::Uniform).expect("some uniform row");
    let mut cols = vec![[false; 4]; m];
    let seed = (first_u + 1) % m;
    cols[seed] = [true, true, false, false];
    for s in 0..m - 1 {
        let k = (seed + s) % m;
        let cur = cols[k];
        cols[(k + 1) % m] = match rows[k] {
            PairRow::Correlated => cur,
            PairRow::Anticorrelated => cur.map(|v| !v),
            PairRow::Uniform => {
                if cur[0] == cur[1] {
                    [true, false, true, false]
                } else {
                    [true, true, false, false]
                }
            }
        };
    }
    let ld = |j: usize| {
        let c: Vec<bool> = cols.iter().map(|col| col[j]).collect();
        LocalDeterministic::from_columns(sc, &c).expect("shape")
    };
    Ok([ld(0), ld(1), ld(2), ld(3)])
}

/// Replaces `2m·g + d` (with `d` missing `g`'s support in `2m + 1` rows) by
/// `2m + 1` one-support-mismatch strategies of `g`, each at weight one.
///
/// Output `j` copies `d`'s columns with sign `+` or complements them with sign
/// `-`. Column `a1` starts with `m + 1` plus signs followed by `m` minus signs.
/// Crossing an aligned row keeps every sign; crossing the `k`-th misaligned row
/// flips every sign except that of one exception output, which must hold `+`.
pub fn mismatch_replacement(g: &GeneralizedPrBox, d: &LocalDeterministic) -> Result<Vec<LocalDeterministic>> {
    let count = support_mismatch_count(g, d)?;
    if count < 3 {
        return Err(Error::Precondition(
            "mismatch replacement needs m != 0 (at least three misaligned rows)".into(),
        ));
    }
    let m = (count - 1) / 2;
    let sc = g.scenario();
    let rows = sc.rows();
    let v = d.columns();
    let outputs = 2 * m + 1;
    let mut signs: Vec<bool> = (0..outputs).map(|j| j <= m).collect();
    let mut out_cols = vec![vec![false; rows]; outputs];
    let mut marked = 0usize;
    for c in 0..rows {
        if c > 0 {
            let line = c - 1;
            if g.is_zero_cell(line, d.outcome(line)) {
                marked += 1;
                let k = marked;
                // 1-based exception output
                let ex = if k % 2 == 1 { m + 1 - (k - 1) / 2 } else { m + 1 + k / 2 };
                if !signs[ex - 1] {
                    return Err(Error::Invariant(format!(
                        "exception output {ex} carries a minus sign at misaligned row {line}"
                    )));
                }
                for (j, s) in signs.iter_mut().enumerate() {
                    if j != ex - 1 {
                        *s = !*s;
                    }
                }
            }
        }
        for (j, s) in signs.iter().enumerate() {
            out_cols[j][c] = if *s { v[c] } else { !v[c] };
        }
    }
    out_cols
        .into_iter()
        .map(|c| LocalDeterministic::from_columns(sc, &c))
        .collect()
}

/// Checks a decomposition reproduces `dm` exactly and carries valid weights.
pub fn verify_decomposition(dm: &DistributionMatrix, dec: &Decomposition) -> Result<()> {
    dec.check_weights()?;
    let residual = cell_tv(&dec.reconstruct(dm.scenario()), dm);
    if !residual.is_zero() {
        return Err(Error::InconsistentInput { residual });
    }
    if !validate(dm).is_empty() {
        return Err(Error::Precondition("input is outside the no-signaling polytope".into()));
    }
    Ok(())
}
