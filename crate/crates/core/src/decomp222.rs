//! `(2,2,2)` machinery: the eight CHSH symmetries, the one-PR-plus-eight-LD
//! read-off, the pair and cast-out replacement tables, variant-Eberhard
//! expressions and the minimum-variance estimator.

use std::sync::OnceLock;

use num_traits::{One, Signed, Zero};

use crate::chained::{one_support_mismatches, MismatchCell};
use crate::error::{Error, Result};
use crate::lp::feasible_point;
use crate::matrix::{
    cell_tv, validate, Decomposition, DistributionMatrix, Outcome, Scenario, SettingsDistribution,
};
use crate::rational::{qi, to_f64, Q};
use crate::relabel::{canonicalizer, Relabeling};
use crate::vertex::catalog_222;

/// LD indices saturating CHSH symmetry 1.
pub const SATURATING_SET_1: [usize; 8] = [1, 4, 5, 8, 9, 12, 14, 15];

/// One of the eight relabeled CHSH expressions, named by the PR box that
/// violates it maximally.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ChshSymmetry {
    pub index: usize,
    /// Maps `PR_index` to `PR_1`.
    pub canonicalizer: Relabeling,
    /// LD catalog indices on which this expression equals 2, ascending.
    pub saturating_set: [usize; 8],
}

/// All eight symmetries, index `k` at position `k - 1`.
pub fn symmetries() -> &'static [ChshSymmetry] {
    static SYMS: OnceLock<Vec<ChshSymmetry>> = OnceLock::new();
    SYMS.get_or_init(|| {
        (1..=8)
            .map(|k| {
                let canon = *canonicalizer(k);
                let back = canon.inverse();
                let mut sat = SATURATING_SET_1.map(|i| back.map_ld_index(i));
                sat.sort_unstable();
                ChshSymmetry { index: k, canonicalizer: canon, saturating_set: sat }
            })
            .collect()
    })
}

pub fn symmetry(k: usize) -> Result<&'static ChshSymmetry> {
    if !(1..=8).contains(&k) {
        return Err(Error::Precondition(format!("CHSH symmetry index must be 1..8, got {k}")));
    }
    Ok(&symmetries()[k - 1])
}

fn require_222(dm: &DistributionMatrix) -> Result<()> {
    if dm.n() != 2 {
        return Err(Error::UnsupportedScenario(dm.n()));
    }
    Ok(())
}

/// `E = P(++) - P(+0) - P(0+) + P(00)` of canonical row `k`.
fn correlator(dm: &DistributionMatrix, k: usize) -> Q {
    let r = &dm.rows()[k];
    &r[0] - &r[1] - &r[2] + &r[3]
}

/// `E_ab + E_ab' + E_a'b - E_a'b'` (canonical rows 0, 3, 1, 2).
fn chsh1(dm: &DistributionMatrix) -> Q {
    correlator(dm, 0) + correlator(dm, 3) + correlator(dm, 1) - correlator(dm, 2)
}

pub fn chsh_value(dm: &DistributionMatrix, sym: &ChshSymmetry) -> Result<Q> {
    require_222(dm)?;
    Ok(chsh1(&sym.canonicalizer.apply(dm)?))
}

/// The eight symmetry values, symmetry `k` at position `k - 1`.
pub fn chsh_values(dm: &DistributionMatrix) -> Result<Vec<Q>> {
    symmetries().iter().map(|s| chsh_value(dm, s)).collect()
}

/// The unique symmetry with value above 2, or `None` for local inputs.
pub fn violated_symmetry(dm: &DistributionMatrix) -> Result<Option<&'static ChshSymmetry>> {
    let two = qi(2);
    let vals = chsh_values(dm)?;
    let over: Vec<usize> = (0..8).filter(|&i| vals[i] > two).collect();
    match over.as_slice() {
        [] => Ok(None),
        [i] => Ok(Some(&symmetries()[*i])),
        _ => Err(Error::Invariant(format!(
            "{} CHSH symmetries exceed 2; input is not nonsignaling",
            over.len()
        ))),
    }
}

/// The eight one-support-mismatch strategies of `PR_1` keyed by the zero
/// cell they occupy, as LD catalog indices.
fn pr1_keys() -> &'static [(MismatchCell, usize)] {
    static KEYS: OnceLock<Vec<(MismatchCell, usize)>> = OnceLock::new();
    KEYS.get_or_init(|| {
        let cat = catalog_222();
        one_support_mismatches(cat.pr(1))
            .expect("n = 2")
            .into_iter()
            .map(|(c, d)| (c, cat.ld_index(&d).expect("catalog")))
            .collect()
    })
}

/// Read-off in a tolerant form: decomposes via the cells that determine each
/// weight and reports the exact reconstruction residual (half the summed
/// absolute cell differences) instead of failing on rounded inputs.
pub fn decompose_222_with_residual(dm: &DistributionMatrix) -> Result<(Decomposition, Q)> {
    require_222(dm)?;
    let sym = violated_symmetry(dm)?.ok_or_else(|| {
        Error::NotApplicable("no CHSH symmetry is violated; use the local decomposition".into())
    })?;
    let canon = sym.canonicalizer.apply(dm)?;
    let back = sym.canonicalizer.inverse();
    let cat = catalog_222();
    let mut ld_terms = Vec::new();
    let mut local = Q::zero();
    for (cell, i) in pr1_keys() {
        let w = canon.get(cell.row, cell.outcome).clone();
        if w.is_negative() {
            return Err(Error::Precondition("negative cell in input".into()));
        }
        local += &w;
        ld_terms.push((cat.ld(back.map_ld_index(*i)).clone(), w));
    }
    let p = Q::one() - local;
    if !p.is_positive() {
        return Err(Error::InconsistentInput { residual: -p });
    }
    ld_terms.sort_by_key(|(d, _)| cat.ld_index(d));
    let dec = Decomposition { pr_term: Some((cat.pr(sym.index).clone(), p)), ld_terms }.pruned();
    let residual = cell_tv(&dec.reconstruct(dm.scenario()), dm);
    Ok((dec, residual))
}

/// One PR box plus weights on the eight LDs saturating its CHSH symmetry.
pub fn decompose_222(dm: &DistributionMatrix) -> Result<Decomposition> {
    let (dec, residual) = decompose_222_with_residual(dm)?;
    if !residual.is_zero() {
        return Err(Error::InconsistentInput { residual });
    }
    Ok(dec)
}

/// Exact convex combination of LDs for a local distribution, found as a basic
/// feasible solution (at most nine terms).
pub fn decompose_local_222(dm: &DistributionMatrix) -> Result<Decomposition> {
    require_222(dm)?;
    if !validate(dm).is_empty() {
        return Err(Error::Precondition("input is outside the no-signaling polytope".into()));
    }
    if violated_symmetry(dm)?.is_some() {
        return Err(Error::NotApplicable("input violates a CHSH symmetry".into()));
    }
    let dec = local_decomposition_over(dm, &(1..=16).collect::<Vec<_>>())
        .ok_or_else(|| Error::Invariant("local distribution has no LD decomposition".into()))?;
    Ok(dec)
}

/// Exact feasibility over the given LD catalog indices.
pub(crate) fn local_decomposition_over(dm: &DistributionMatrix, lds: &[usize]) -> Option<Decomposition> {
    let cat = catalog_222();
    let mats: Vec<Vec<Q>> = lds.iter().map(|&i| cat.ld(i).to_matrix().flat()).collect();
    let target = dm.flat();
    let mut a: Vec<Vec<Q>> = (0..16)
        .map(|cell| mats.iter().map(|m| m[cell].clone()).collect())
        .collect();
    let mut b = target;
    a.push(vec![Q::one(); lds.len()]);
    b.push(Q::one());
    let x = feasible_point(a, b)?;
    let terms = lds
        .iter()
        .zip(x)
        .filter(|(_, w)| !w.is_zero())
        .map(|(&i, w)| (cat.ld(i).clone(), w))
        .collect();
    Some(Decomposition::local(terms))
}

// Pairs (1, j): the four LDs mixing to ½PR_1 + ½PR_j.
const PAIR_TABLE: [[usize; 4]; 7] = [
    [1, 2, 3, 4],
    [1, 4, 9, 12],
    [5, 8, 14, 15],
    [1, 4, 5, 8],
    [9, 12, 14, 15],
    [1, 4, 14, 15],
    [5, 8, 9, 12],
];

/// Four LD indices whose uniform mixture equals `½PR_i + ½PR_j`.
pub fn pair_replacement(i: usize, j: usize) -> Result<[usize; 4]> {
    for k in [i, j] {
        if !(1..=8).contains(&k) {
            return Err(Error::Precondition(format!("PR index must be 1..8, got {k}")));
        }
    }
    if i == j {
        return Err(Error::Precondition("pair replacement needs distinct PR boxes".into()));
    }
    let r = canonicalizer(i);
    let j1 = r.map_pr_index(j);
    let back = r.inverse();
    let mut out = PAIR_TABLE[j1 - 2].map(|d| back.map_ld_index(d));
    out.sort_unstable();
    Ok(out)
}

// D_d + 2 PR_1 = sum of three saturating LDs, for d outside the set.
const CASTOUT_TABLE: [(usize, [usize; 3]); 8] = [
    (2, [5, 12, 14]),
    (3, [8, 9, 15]),
    (6, [1, 12, 14]),
    (7, [4, 9, 15]),
    (10, [4, 5, 14]),
    (11, [1, 8, 15]),
    (13, [4, 5, 9]),
    (16, [1, 8, 12]),
];

/// Three saturating LD indices absorbing `D_d` together with twice its weight
/// of `PR_1`.
pub fn castout_replacement(d: usize) -> Result<[usize; 3]> {
    CASTOUT_TABLE
        .iter()
        .find(|(k, _)| *k == d)
        .map(|(_, out)| *out)
        .ok_or_else(|| {
            Error::Precondition(format!(
                "LD {d} is not outside the saturating set {{1,4,5,8,9,12,14,15}}"
            ))
        })
}

/// A variant-Eberhard expression in the frame of symmetry 1: a support cell
/// of `PR_1` minus the key cells of the three saturating LDs covering it.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VariantEberhard {
    pub support: (usize, Outcome),
    pub lds: [usize; 3],
    pub subtract: [(usize, Outcome); 3],
}

/// The eight variant-Eberhard expressions, ordered by support cell.
pub fn variant_eberhard_family() -> &'static [VariantEberhard] {
    static FAMILY: OnceLock<Vec<VariantEberhard>> = OnceLock::new();
    FAMILY.get_or_init(|| {
        let cat = catalog_222();
        cat.pr(1)
            .support_cells()
            .into_iter()
            .map(|(row, o)| {
                let hits: Vec<&(MismatchCell, usize)> = pr1_keys()
                    .iter()
                    .filter(|(_, i)| cat.ld(*i).outcome(row) == o)
                    .collect();
                assert_eq!(hits.len(), 3, "three saturating LDs cover each support cell");
                let mut lds = [0; 3];
                let mut subtract = [(0, Outcome::PlusPlus); 3];
                for (slot, (cell, i)) in hits.iter().enumerate() {
                    lds[slot] = *i;
                    subtract[slot] = (cell.row, cell.outcome);
                }
                VariantEberhard { support: (row, o), lds, subtract }
            })
            .collect()
    })
}

/// Values of the eight variant-Eberhard expressions of `sym`.
pub fn variant_eberhard_values(dm: &DistributionMatrix, sym: &ChshSymmetry) -> Result<Vec<Q>> {
    require_222(dm)?;
    let c = sym.canonicalizer.apply(dm)?;
    Ok(variant_eberhard_family()
        .iter()
        .map(|v| {
            let mut x = c.get(v.support.0, v.support.1).clone();
            for (r, o) in v.subtract {
                x -= c.get(r, o);
            }
            x
        })
        .collect())
}

/// Coefficient of variant `i` on each of the 16 cells of the original frame.
fn variant_coefficients(sym: &ChshSymmetry) -> Vec<[f64; 16]> {
    // cell j of the canonical frame reads cell perm[j] of the original
    let mut map = [0usize; 16];
    for j in 0..16 {
        let mut probe = DistributionMatrix::zeros(Scenario::two_two_two());
        probe.set(j / 4, Outcome::from_index(j % 4), Q::one());
        let img = sym.canonicalizer.apply(&probe).expect("n = 2");
        let t = img.flat().iter().position(|v| v.is_one()).expect("permutation");
        map[t] = j;
    }
    variant_eberhard_family()
        .iter()
        .map(|v| {
            let mut coef = [0.0; 16];
            coef[map[4 * v.support.0 + v.support.1.index()]] += 1.0;
            for (r, o) in v.subtract {
                coef[map[4 * r + o.index()]] -= 1.0;
            }
            coef
        })
        .collect()
}

/// Euclidean projection onto the probability simplex.
pub(crate) fn project_simplex(v: &[f64]) -> Vec<f64> {
    let mut u = v.to_vec();
    u.sort_by(|a, b| b.partial_cmp(a).expect("finite"));
    let mut css = 0.0;
    let mut theta = 0.0;
    for (i, ui) in u.iter().enumerate() {
        css += ui;
        let t = (css - 1.0) / (i as f64 + 1.0);
        if ui - t > 0.0 {
            theta = t;
        }
    }
    v.iter().map(|x| (x - theta).max(0.0)).collect()
}

/// Single-trial second moment `E[X^2]` of the combined estimator with weights
/// `c`, where one trial draws a setting pair from `settings` and an outcome
/// from `expected`.
pub fn estimator_second_moment(
    c: &[f64],
    expected: &DistributionMatrix,
    settings: &SettingsDistribution,
) -> Result<f64> {
    let sym = violated_symmetry(expected)?
        .ok_or_else(|| Error::NotApplicable("expected distribution is local".into()))?;
    let (h, _) = estimator_quadratic(expected, settings, sym);
    Ok(quad(&h, c))
}

fn quad(h: &[[f64; 8]; 8], c: &[f64]) -> f64 {
    (0..8).map(|i| (0..8).map(|j| c[i] * h[i][j] * c[j]).sum::<f64>()).sum()
}

/// `H` with `E[X^2] = c^T H c`, and the largest eigenvalue bound of `2H`.
fn estimator_quadratic(
    expected: &DistributionMatrix,
    settings: &SettingsDistribution,
    sym: &ChshSymmetry,
) -> ([[f64; 8]; 8], f64) {
    let coefs = variant_coefficients(sym);
    let p: Vec<f64> = expected.flat().iter().map(to_f64).collect();
    let pi: Vec<f64> = settings.probs().iter().map(to_f64).collect();
    let mut h = [[0.0; 8]; 8];
    for cell in 0..16 {
        let r = cell / 4;
        if pi[r] == 0.0 || p[cell] == 0.0 {
            continue;
        }
        let f = p[cell] / pi[r];
        for i in 0..8 {
            for j in 0..8 {
                h[i][j] += coefs[i][cell] * coefs[j][cell] * f;
            }
        }
    }
    let lmax = (0..8).map(|i| h[i].iter().map(|x| x.abs()).sum::<f64>()).fold(0.0, f64::max);
    (h, 2.0 * lmax)
}

/// Weights over the eight variant-Eberhard expressions minimizing the
/// single-trial variance of the unbiased estimator of `p_PR / 2`.
///
/// Projected gradient descent on the simplex with step `1/L`; stops once the
/// objective decreases by less than `1e-10` between iterations after a
/// settling period.
pub fn estimator_weights(
    expected: &DistributionMatrix,
    settings: &SettingsDistribution,
) -> Result<[f64; 8]> {
    require_222(expected)?;
    if settings.scenario() != expected.scenario() {
        return Err(Error::Shape("settings distribution has the wrong scenario".into()));
    }
    let sym = violated_symmetry(expected)?
        .ok_or_else(|| Error::NotApplicable("expected distribution is local".into()))?;
    if settings.probs().iter().any(|p| p.is_zero()) {
        return Err(Error::Precondition("every setting pair needs positive probability".into()));
    }
    let (h, l) = estimator_quadratic(expected, settings, sym);
    let step = if l > 0.0 { 1.0 / l } else { 1.0 };
    let mut c = vec![1.0 / 8.0; 8];
    let mut f = quad(&h, &c);
    let mut quiet = 0;
    for _ in 0..1_000_000 {
        let grad: Vec<f64> = (0..8).map(|i| 2.0 * (0..8).map(|j| h[i][j] * c[j]).sum::<f64>()).collect();
        let trial: Vec<f64> = c.iter().zip(&grad).map(|(x, g)| x - step * g).collect();
        let next = project_simplex(&trial);
        let fn_ = quad(&h, &next);
        let decrease = f - fn_;
        c = next;
        f = fn_;
        if decrease < 1e-10 {
            quiet += 1;
            if quiet >= 50 {
                break;
            }
        } else {
            quiet = 0;
        }
    }
    let mut out = [0.0; 8];
    out.copy_from_slice(&c);
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::mix;
    use crate::rational::q;

    fn pr_pair_mix() -> DistributionMatrix {
        let cat = catalog_222();
        mix(&[(cat.pr(1).to_matrix(), q(1, 2)), (cat.pr(6).to_matrix(), q(1, 2))]).unwrap()
    }

    #[test]
    fn symmetry_one_saturating_set() {
        assert_eq!(symmetries()[0].saturating_set, SATURATING_SET_1);
    }

    #[test]
    fn chsh_extremes() {
        let cat = catalog_222();
        for s in symmetries() {
            assert_eq!(chsh_value(&cat.pr(s.index).to_matrix(), s).unwrap(), qi(4));
            for i in 1..=16 {
                let v = chsh_value(&cat.ld(i).to_matrix(), s).unwrap();
                assert!(v <= qi(2));
                assert_eq!(v == qi(2), s.saturating_set.contains(&i));
            }
        }
        let s1 = &symmetries()[0];
        assert_eq!(chsh_value(&cat.ld(1).to_matrix(), s1).unwrap(), qi(2));
        assert_eq!(chsh_value(&pr_pair_mix(), s1).unwrap(), qi(2));
    }

    #[test]
    fn read_off_matches_reference_cells() {
        // (LD, canonical row, outcome): ab = 0, a'b = 1, a'b' = 2, ab' = 3
        let reference = [
            (14, 0, Outcome::PlusZero),
            (15, 0, Outcome::ZeroPlus),
            (5, 3, Outcome::PlusZero),
            (8, 3, Outcome::ZeroPlus),
            (12, 1, Outcome::PlusZero),
            (9, 1, Outcome::ZeroPlus),
            (1, 2, Outcome::PlusPlus),
            (4, 2, Outcome::ZeroZero),
        ];
        for (i, row, o) in reference {
            assert!(pr1_keys().contains(&(MismatchCell { row, outcome: o }, i)));
        }
    }

    #[test]
    fn decompose_simple_cases() {
        let cat = catalog_222();
        let dec = decompose_222(&cat.pr(1).to_matrix()).unwrap();
        assert_eq!(dec.pr_weight(), Q::one());
        assert!(dec.ld_terms.is_empty());
        let half = mix(&[(cat.pr(1).to_matrix(), q(1, 2)), (cat.ld(1).to_matrix(), q(1, 2))]).unwrap();
        let dec = decompose_222(&half).unwrap();
        assert_eq!(dec.pr_weight(), q(1, 2));
        assert_eq!(dec.weight_of(cat.ld(1)), q(1, 2));
        assert!(matches!(decompose_222(&pr_pair_mix()), Err(Error::NotApplicable(_))));
    }

    #[test]
    fn local_decomposition() {
        let cat = catalog_222();
        let dec = decompose_local_222(&pr_pair_mix()).unwrap();
        assert_eq!(dec.reconstruct(Scenario::two_two_two()), pr_pair_mix());
        dec.check_weights().unwrap();
        let dec = decompose_local_222(&cat.ld(7).to_matrix()).unwrap();
        assert_eq!(dec.ld_terms, vec![(cat.ld(7).clone(), Q::one())]);
        let u = DistributionMatrix::uniform(Scenario::two_two_two());
        let dec = decompose_local_222(&u).unwrap();
        assert!(dec.term_count() <= 9);
        assert_eq!(dec.reconstruct(u.scenario()), u);
    }

    #[test]
    fn reference_pair_rows() {
        assert_eq!(pair_replacement(1, 6).unwrap(), [9, 12, 14, 15]);
        assert_eq!(pair_replacement(1, 2).unwrap(), [1, 2, 3, 4]);
        assert!(matches!(pair_replacement(3, 3), Err(Error::Precondition(_))));
    }

    #[test]
    fn castout_rows() {
        assert_eq!(castout_replacement(16).unwrap(), [1, 8, 12]);
        assert_eq!(castout_replacement(2).unwrap(), [5, 12, 14]);
        assert!(castout_replacement(1).is_err());
    }

    #[test]
    fn eberhard_on_pr1_and_lds() {
        let cat = catalog_222();
        let s1 = &symmetries()[0];
        assert!(variant_eberhard_values(&cat.pr(1).to_matrix(), s1)
            .unwrap()
            .iter()
            .all(|v| *v == q(1, 2)));
        for s in symmetries() {
            for &i in &s.saturating_set {
                let vals = variant_eberhard_values(&cat.ld(i).to_matrix(), s).unwrap();
                assert!(vals.iter().all(Q::is_zero));
            }
        }
    }

    #[test]
    fn eberhard_triangle_on_ab_plus_plus() {
        let fam = variant_eberhard_family();
        let v = fam.iter().find(|v| v.support == (0, Outcome::PlusPlus)).unwrap();
        let mut lds = v.lds;
        lds.sort_unstable();
        assert_eq!(lds, [1, 5, 9]);
    }

    #[test]
    fn simplex_projection() {
        let p = project_simplex(&[0.5, 0.5, 0.5]);
        for x in &p {
            assert!((x - 1.0 / 3.0).abs() < 1e-12);
        }
        let p = project_simplex(&[2.0, 0.0]);
        assert_eq!(p, vec![1.0, 0.0]);
    }

    #[test]
    fn estimator_on_pr1_is_uniform() {
        let cat = catalog_222();
        let s = SettingsDistribution::uniform(Scenario::two_two_two());
        let w = estimator_weights(&cat.pr(1).to_matrix(), &s).unwrap();
        for x in w {
            assert!((x - 0.125).abs() < 1e-6, "{w:?}");
        }
    }
}
