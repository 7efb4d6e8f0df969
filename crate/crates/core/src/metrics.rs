//! Distances from a nonlocal distribution to the local polytope.
//!
//! Total variation is exact. Kullback-Leibler divergence is computed in
//! floating point and minimized by entropic mirror descent.

use num_traits::{One, Signed, Zero};

use crate::decomp222::{decompose_222, decompose_local_222, local_decomposition_over, violated_symmetry};
use crate::error::{Error, Result};
use crate::lp::{LinearProgram, LpOutcome};
use crate::matrix::{cell_tv, mix, validate, DistributionMatrix, SettingsDistribution};
use crate::rational::{qi, to_f64, Q};
use crate::vertex::catalog_222;

/// Closest local point under total variation, with weights on LD catalog
/// indices.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ClosestLocalResult {
    pub closest: DistributionMatrix,
    pub distance: Q,
    pub weights: Vec<(usize, Q)>,
}

/// Closest local point under KL divergence (floating point).
#[derive(Clone, Debug, PartialEq)]
pub struct KlClosestResult {
    pub closest: Vec<[f64; 4]>,
    pub distance: f64,
    pub weights: Vec<(usize, f64)>,
    pub iterations: usize,
}

fn same_scenario(a: &DistributionMatrix, b: &DistributionMatrix) -> Result<()> {
    if a.scenario() != b.scenario() {
        return Err(Error::Shape(format!("scenario mismatch: n = {} vs n = {}", a.n(), b.n())));
    }
    Ok(())
}

/// Half the summed absolute cell differences over every row.
pub fn tv_distance(q: &DistributionMatrix, s: &DistributionMatrix) -> Result<Q> {
    same_scenario(q, s)?;
    Ok(cell_tv(q, s))
}

/// Closest local distribution: move the PR weight evenly onto the eight
/// saturating strategies. A local input is returned unchanged.
pub fn tv_closest_local(q: &DistributionMatrix) -> Result<ClosestLocalResult> {
    let Some(sym) = violated_symmetry(q)? else {
        let dec = decompose_local_222(q)?;
        let cat = catalog_222();
        let weights = dec
            .ld_terms
            .iter()
            .map(|(d, w)| (cat.ld_index(d).expect("catalog"), w.clone()))
            .collect();
        return Ok(ClosestLocalResult { closest: q.clone(), distance: Q::zero(), weights });
    };
    let dec = decompose_222(q)?;
    let cat = catalog_222();
    let p = dec.pr_weight();
    let share = &p / qi(8);
    let weights: Vec<(usize, Q)> = sym
        .saturating_set
        .iter()
        .map(|&i| (i, dec.weight_of(cat.ld(i)) + &share))
        .collect();
    let closest = mix(
        &weights
            .iter()
            .map(|(i, w)| (cat.ld(*i).to_matrix(), w.clone()))
            .collect::<Vec<_>>(),
    )?;
    Ok(ClosestLocalResult { closest, distance: p, weights })
}

/// Minimum total variation from `q` to the convex hull of the 16 LDs, by an
/// exact linear program with slack variables for the absolute values.
/// Independent of the closed form in [`tv_closest_local`].
pub fn tv_lp_oracle(q: &DistributionMatrix) -> Result<Q> {
    if q.n() != 2 {
        return Err(Error::UnsupportedScenario(q.n()));
    }
    let cat = catalog_222();
    let lds: Vec<Vec<Q>> = cat.lds().iter().map(|d| d.to_matrix().flat()).collect();
    let target = q.flat();
    // columns: w (16), u (16), v (16)
    let width = 48;
    let mut a = Vec::new();
    let mut b = Vec::new();
    for cell in 0..16 {
        let mut row = vec![Q::zero(); width];
        for (i, m) in lds.iter().enumerate() {
            row[i] = m[cell].clone();
        }
        row[16 + cell] = -Q::one();
        row[32 + cell] = Q::one();
        a.push(row);
        b.push(target[cell].clone());
    }
    let mut norm = vec![Q::zero(); width];
    for x in norm.iter_mut().take(16) {
        *x = Q::one();
    }
    a.push(norm);
    b.push(Q::one());
    let half = Q::new(1.into(), 2.into());
    let c: Vec<Q> = (0..width).map(|j| if j < 16 { Q::zero() } else { half.clone() }).collect();
    match LinearProgram::new(a, b, c).solve() {
        LpOutcome::Optimal { value, .. } => Ok(value),
        other => Err(Error::Invariant(format!("TV linear program failed: {other:?}"))),
    }
}

fn kl_rows(q: &[[f64; 4]], s: &[[f64; 4]], pi: &[f64]) -> f64 {
    let mut total = 0.0;
    for ((qr, sr), p) in q.iter().zip(s).zip(pi) {
        for (x, y) in qr.iter().zip(sr) {
            let joint = x * p;
            if joint <= 0.0 {
                continue;
            }
            if *y <= 0.0 {
                return f64::INFINITY;
            }
            total += joint * (x / y).log2();
        }
    }
    total
}

/// `D(Q' || S')` in bits, where `Q'` and `S'` are the joint distributions over
/// setting pairs and outcomes.
pub fn kl_divergence(
    q: &DistributionMatrix,
    s: &DistributionMatrix,
    settings: &SettingsDistribution,
) -> Result<f64> {
    same_scenario(q, s)?;
    if settings.scenario() != q.scenario() {
        return Err(Error::Shape("settings distribution has the wrong scenario".into()));
    }
    let pi: Vec<f64> = settings.probs().iter().map(to_f64).collect();
    // exact log-ratio terms would need transcendental arithmetic; cells are
    // converted individually
    let mut total = 0.0;
    for k in 0..q.scenario().rows() {
        for (x, y) in q.rows()[k].iter().zip(&s.rows()[k]) {
            if x.is_zero() || pi[k] == 0.0 {
                continue;
            }
            if y.is_zero() {
                return Ok(f64::INFINITY);
            }
            let xf = to_f64(x);
            total += xf * pi[k] * (xf / to_f64(y)).log2();
        }
    }
    Ok(total)
}

/// KL objective over weights on a fixed list of LDs.
#[derive(Clone, Debug)]
pub struct KlObjective {
    q: Vec<[f64; 4]>,
    pi: Vec<f64>,
    lds: Vec<usize>,
    // cells[i][row] = outcome index hit by LD i in that row
    cells: Vec<Vec<usize>>,
}

impl KlObjective {
    pub fn new(q: &DistributionMatrix, settings: &SettingsDistribution, lds: &[usize]) -> Result<Self> {
        if q.n() != 2 || settings.scenario() != q.scenario() {
            return Err(Error::UnsupportedScenario(q.n()));
        }
        let cat = catalog_222();
        let cells = lds
            .iter()
            .map(|&i| (0..4).map(|k| cat.ld(i).outcome(k).index()).collect())
            .collect();
        Ok(KlObjective {
            q: q.to_f64_rows(),
            pi: settings.probs().iter().map(to_f64).collect(),
            lds: lds.to_vec(),
            cells,
        })
    }

    pub fn lds(&self) -> &[usize] {
        &self.lds
    }

    pub fn mixture(&self, w: &[f64]) -> Vec<[f64; 4]> {
        let mut s = vec![[0.0; 4]; self.q.len()];
        for (wi, cells) in w.iter().zip(&self.cells) {
            for (k, &o) in cells.iter().enumerate() {
                s[k][o] += wi;
            }
        }
        s
    }

    pub fn value(&self, w: &[f64]) -> f64 {
        kl_rows(&self.q, &self.mixture(w), &self.pi)
    }

    /// Partial derivatives in bits.
    pub fn gradient(&self, w: &[f64]) -> Vec<f64> {
        let s = self.mixture(w);
        let ln2 = std::f64::consts::LN_2;
        self.cells
            .iter()
            .map(|cells| {
                cells
                    .iter()
                    .enumerate()
                    .map(|(k, &o)| {
                        let joint = self.q[k][o] * self.pi[k];
                        if joint <= 0.0 {
                            0.0
                        } else {
                            -joint / (s[k][o] * ln2)
                        }
                    })
                    .sum()
            })
            .collect()
    }
}

#[derive(Clone, Copy, Debug)]
pub struct KlOptions {
    pub max_iterations: usize,
    /// Stop when the relative objective decrease falls below this.
    pub rel_tolerance: f64,
    /// Stop when the Frank-Wolfe gap falls below this.
    pub gap_tolerance: f64,
}

impl Default for KlOptions {
    fn default() -> Self {
        KlOptions { max_iterations: 100_000, rel_tolerance: 1e-12, gap_tolerance: 1e-12 }
    }
}

/// Entropic mirror descent from `start` (strictly positive, summing to one).
/// Returns `(weights, value, iterations)`.
pub fn mirror_descent(obj: &KlObjective, start: &[f64], opts: KlOptions) -> Result<(Vec<f64>, f64, usize)> {
    let mut w = start.to_vec();
    let mut f = obj.value(&w);
    if !f.is_finite() {
        return Err(Error::Precondition("starting point has infinite divergence".into()));
    }
    let mut step = 1.0;
    for it in 0..opts.max_iterations {
        let g = obj.gradient(&w);
        let avg: f64 = w.iter().zip(&g).map(|(a, b)| a * b).sum();
        let gmin = g.iter().copied().fold(f64::INFINITY, f64::min);
        let gap = avg - gmin;
        if gap < opts.gap_tolerance {
            return Ok((w, f, it));
        }
        loop {
            let shift = g.iter().copied().fold(f64::INFINITY, f64::min);
            let mut next: Vec<f64> = w.iter().zip(&g).map(|(x, gi)| x * (-step * (gi - shift)).exp()).collect();
            let z: f64 = next.iter().sum();
            for x in next.iter_mut() {
                *x /= z;
            }
            let fn_ = obj.value(&next);
            if fn_ < f {
                let rel = (f - fn_) / f.abs().max(1e-300);
                w = next;
                f = fn_;
                step *= 1.5;
                if rel < opts.rel_tolerance && gap < 1e-9 {
                    return Ok((w, f, it + 1));
                }
                break;
            }
            step *= 0.5;
            if step < 1e-30 {
                // no representable decrease left
                return Ok((w, f, it + 1));
            }
        }
    }
    Err(Error::NoConvergence { iterations: opts.max_iterations, best_objective: f, best_weights: w })
}

/// KL projection onto the local polytope restricted to the eight strategies
/// saturating the violated CHSH symmetry, started at the TV-closest weights.
pub fn kl_closest_local(q: &DistributionMatrix, settings: &SettingsDistribution) -> Result<KlClosestResult> {
    kl_closest_local_with(q, settings, KlOptions::default())
}

pub fn kl_closest_local_with(
    q: &DistributionMatrix,
    settings: &SettingsDistribution,
    opts: KlOptions,
) -> Result<KlClosestResult> {
    let Some(sym) = violated_symmetry(q)? else {
        return Ok(local_kl_result(q)?);
    };
    let tv = tv_closest_local(q)?;
    let start: Vec<f64> = tv.weights.iter().map(|(_, w)| to_f64(w)).collect();
    let obj = KlObjective::new(q, settings, &sym.saturating_set)?;
    let start_value = obj.value(&start);
    let (w, f, iterations) = mirror_descent(&obj, &start, opts)?;
    if f > start_value + 1e-12 {
        return Err(Error::Invariant("KL optimizer ended above its starting point".into()));
    }
    Ok(KlClosestResult {
        closest: obj.mixture(&w),
        distance: f,
        weights: obj.lds().iter().copied().zip(w).collect(),
        iterations,
    })
}

/// The same projection over all sixteen strategies, started near the
/// TV-closest point with a small share on the other eight.
pub fn kl_closest_local_full(q: &DistributionMatrix, settings: &SettingsDistribution) -> Result<KlClosestResult> {
    let Some(sym) = violated_symmetry(q)? else {
        return Ok(local_kl_result(q)?);
    };
    let tv = tv_closest_local(q)?;
    let all: Vec<usize> = (1..=16).collect();
    let mut start = vec![0.01 / 16.0; 16];
    for (i, w) in &tv.weights {
        start[i - 1] += 0.99 * to_f64(w);
    }
    debug_assert!(sym.saturating_set.len() == 8);
    let obj = KlObjective::new(q, settings, &all)?;
    let (w, f, iterations) = mirror_descent(&obj, &start, KlOptions::default())?;
    Ok(KlClosestResult {
        closest: obj.mixture(&w),
        distance: f,
        weights: all.into_iter().zip(w).collect(),
        iterations,
    })
}

fn local_kl_result(q: &DistributionMatrix) -> Result<KlClosestResult> {
    let tv = tv_closest_local(q)?;
    Ok(KlClosestResult {
        closest: q.to_f64_rows(),
        distance: 0.0,
        weights: tv.weights.iter().map(|(i, w)| (*i, to_f64(w))).collect(),
        iterations: 0,
    })
}

/// Moves a local point toward `q` until it lands on the face spanned by the
/// saturating strategies of `q`'s violated symmetry.
///
/// With `n` the local weight of `s_local` outside that face (minimized over
/// all LD decompositions) and `q_PR` the PR weight of `q`,
/// `lambda = 2n / (2n + q_PR)`.
pub fn face_projection(q: &DistributionMatrix, s_local: &DistributionMatrix) -> Result<(Q, DistributionMatrix)> {
    same_scenario(q, s_local)?;
    let sym = violated_symmetry(q)?
        .ok_or_else(|| Error::NotApplicable("q does not violate any CHSH symmetry".into()))?;
    if !validate(s_local).is_empty() || violated_symmetry(s_local)?.is_some() {
        return Err(Error::NotApplicable("s_local is not a local distribution".into()));
    }
    let q_pr = decompose_222(q)?.pr_weight();
    let outside = min_outside_weight(s_local, &sym.saturating_set)?;
    let two_n = qi(2) * outside;
    let lambda = &two_n / (&two_n + &q_pr);
    let one_minus = Q::one() - &lambda;
    let projected = mix(&[(q.clone(), lambda.clone()), (s_local.clone(), one_minus)])?;
    if local_decomposition_over(&projected, &sym.saturating_set).is_none() {
        return Err(Error::Invariant("projected point is not on the saturating face".into()));
    }
    Ok((lambda, projected))
}

/// Smallest total weight on LDs outside `face` over all exact decompositions.
fn min_outside_weight(s: &DistributionMatrix, face: &[usize]) -> Result<Q> {
    let cat = catalog_222();
    let mats: Vec<Vec<Q>> = cat.lds().iter().map(|d| d.to_matrix().flat()).collect();
    let target = s.flat();
    let mut a: Vec<Vec<Q>> = (0..16)
        .map(|cell| mats.iter().map(|m| m[cell].clone()).collect())
        .collect();
    let mut b = target;
    a.push(vec![Q::one(); 16]);
    b.push(Q::one());
    let c: Vec<Q> = (1..=16).map(|i| if face.contains(&i) { Q::zero() } else { Q::one() }).collect();
    match LinearProgram::new(a, b, c).solve() {
        LpOutcome::Optimal { value, .. } => Ok(value),
        _ => {
            // fall back to any decomposition
            let dec = decompose_local_222(s)?;
            Ok(dec
                .ld_terms
                .iter()
                .filter(|(d, _)| !face.contains(&cat.ld_index(d).expect("catalog")))
                .map(|(_, w)| w)
                .sum())
        }
    }
}

/// Objective value of the alternative TV minimizer that puts the PR weight on
/// two saturating strategies, half each.
pub fn tv_alternative_minimum(q: &DistributionMatrix) -> Result<Q> {
    let sym = violated_symmetry(q)?
        .ok_or_else(|| Error::NotApplicable("q is local".into()))?;
    let dec = decompose_222(q)?;
    let cat = catalog_222();
    let p = dec.pr_weight();
    let half = &p / qi(2);
    let back = sym.canonicalizer.inverse();
    let pair = [back.map_ld_index(1), back.map_ld_index(4)];
    let terms: Vec<(DistributionMatrix, Q)> = sym
        .saturating_set
        .iter()
        .map(|&i| {
            let extra = if pair.contains(&i) { half.clone() } else { Q::zero() };
            (cat.ld(i).to_matrix(), dec.weight_of(cat.ld(i)) + extra)
        })
        .collect();
    let s = mix(&terms)?;
    let d = cell_tv(q, &s);
    if d.is_negative() {
        unreachable!("absolute values are nonnegative");
    }
    Ok(d)
}
