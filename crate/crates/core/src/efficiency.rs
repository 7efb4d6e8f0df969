//! Detector loss: each `+` registered by a party survives with probability
//! `eta` and otherwise turns into `0`.

use num_traits::{One, Signed, Zero};

use crate::chained::identify_gpr;
use crate::decomp222::{chsh_value, violated_symmetry, ChshSymmetry};
use crate::error::{Error, Result};
use crate::matrix::{DistributionMatrix, Outcome};
use crate::rational::{fmt_q, qi, to_f64, Q};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EfficiencyParams {
    pub eta_a: Q,
    pub eta_b: Q,
}

impl EfficiencyParams {
    pub fn new(eta_a: Q, eta_b: Q) -> Result<Self> {
        for e in [&eta_a, &eta_b] {
            if e.is_negative() || *e > Q::one() {
                return Err(Error::Precondition(format!("efficiency {} outside [0, 1]", fmt_q(e))));
            }
        }
        Ok(EfficiencyParams { eta_a, eta_b })
    }

    pub fn symmetric(eta: Q) -> Result<Self> {
        Self::new(eta.clone(), eta)
    }
}

pub fn apply_efficiency(dm: &DistributionMatrix, p: &EfficiencyParams) -> DistributionMatrix {
    let (ea, eb) = (&p.eta_a, &p.eta_b);
    let la = Q::one() - ea;
    let lb = Q::one() - eb;
    let mut out = dm.clone();
    for k in 0..dm.scenario().rows() {
        let pp = dm.get(k, Outcome::PlusPlus);
        let pz = dm.get(k, Outcome::PlusZero);
        let zp = dm.get(k, Outcome::ZeroPlus);
        let zz = dm.get(k, Outcome::ZeroZero);
        out.set(k, Outcome::PlusPlus, ea * eb * pp);
        out.set(k, Outcome::PlusZero, ea * pz + ea * &lb * pp);
        out.set(k, Outcome::ZeroPlus, eb * zp + &la * eb * pp);
        out.set(k, Outcome::ZeroZero, zz + &la * pz + &lb * zp + &la * &lb * pp);
    }
    out
}

/// Nonlocality test shared by both scenarios.
fn nonlocal(dm: &DistributionMatrix) -> Result<bool> {
    if dm.n() == 2 {
        Ok(violated_symmetry(dm)?.is_some())
    } else {
        Ok(identify_gpr(dm)?.is_some())
    }
}

/// `(c0, c1, c2)` with `chsh(apply_efficiency(dm, eta)) = c0 + c1 eta + c2 eta^2`.
pub fn chsh_polynomial(dm: &DistributionMatrix, sym: &ChshSymmetry) -> Result<[Q; 3]> {
    let at = |e: Q| -> Result<Q> { chsh_value(&apply_efficiency(dm, &EfficiencyParams::symmetric(e)?), sym) };
    let f0 = at(Q::zero())?;
    let fh = at(Q::new(1.into(), 2.into()))?;
    let f1 = at(Q::one())?;
    // f(1/2) = c0 + c1/2 + c2/4
    let c2 = qi(2) * (&f1 + &f0 - qi(2) * &fh);
    let c1 = &f1 - &f0 - &c2;
    Ok([f0, c1, c2])
}

/// Result of the critical-efficiency search.
#[derive(Clone, Debug, PartialEq)]
pub struct CriticalEfficiency {
    /// Bisection estimate of the threshold.
    pub eta: f64,
    /// Bracket `(local, nonlocal)` after the last step, exact.
    pub bracket: (Q, Q),
}

/// Threshold efficiency below which `dm` becomes local, or `None` when `dm` is
/// already local. Bisects the symmetric efficiency for 60 steps.
pub fn critical_efficiency(dm: &DistributionMatrix) -> Result<Option<CriticalEfficiency>> {
    if !nonlocal(dm)? {
        return Ok(None);
    }
    let reference = if dm.n() == 2 { violated_symmetry(dm)?.map(|s| s.index) } else { None };
    let reference_box = if dm.n() == 2 { None } else { identify_gpr(dm)? };
    let mut lo = Q::zero();
    let mut hi = Q::one();
    let two = qi(2);
    for _ in 0..60 {
        let mid = (&lo + &hi) / &two;
        let t = apply_efficiency(dm, &EfficiencyParams::symmetric(mid.clone())?);
        let nl = nonlocal(&t)?;
        if nl {
            // the same symmetry (or box) must be the one violated along the way
            if dm.n() == 2 {
                let s = violated_symmetry(&t)?.map(|s| s.index);
                if s != reference {
                    return Err(Error::Invariant(format!(
                        "violated symmetry changed from {reference:?} to {s:?} at eta = {}",
                        fmt_q(&mid)
                    )));
                }
            } else if identify_gpr(&t)? != reference_box {
                return Err(Error::Invariant("violating box changed along the efficiency path".into()));
            }
            hi = mid;
        } else {
            lo = mid;
        }
    }
    let eta = to_f64(&((&lo + &hi) / &two));
    Ok(Some(CriticalEfficiency { eta, bracket: (lo, hi) }))
}

/// Largest root in `[0, 1]` of `chsh(eta) = 2` from the exact quadratic.
pub fn critical_efficiency_quadratic(dm: &DistributionMatrix) -> Result<Option<f64>> {
    let Some(sym) = violated_symmetry(dm)? else { return Ok(None) };
    let [c0, c1, c2] = chsh_polynomial(dm, sym)?;
    let a = to_f64(&c2);
    let b = to_f64(&c1);
    let c = to_f64(&(c0 - qi(2)));
    let roots: Vec<f64> = if a == 0.0 {
        vec![-c / b]
    } else {
        let disc = (b * b - 4.0 * a * c).max(0.0).sqrt();
        vec![(-b + disc) / (2.0 * a), (-b - disc) / (2.0 * a)]
    };
    Ok(roots
        .into_iter()
        .filter(|r| (-1e-12..=1.0 + 1e-12).contains(r))
        .fold(None, |acc: Option<f64>, r| Some(acc.map_or(r, |x| x.max(r)))))
}
