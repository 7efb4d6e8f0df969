//! Random exact members of the polytope, built as rational convex
//! combinations of vertices so membership is guaranteed.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::chained::one_support_mismatches;
use crate::decomp222::violated_symmetry;
use crate::matrix::{mix, DistributionMatrix, Scenario};
use crate::rational::Q;
use crate::vertex::{catalog_222, enumerate_gprs, enumerate_lds, GeneralizedPrBox, LocalDeterministic};

/// `k` positive rationals summing to one, numerators drawn from `1..=100`.
pub fn random_weights<R: Rng + ?Sized>(rng: &mut R, k: usize) -> Vec<Q> {
    let raw: Vec<i64> = (0..k).map(|_| rng.gen_range(1..=100)).collect();
    let total: i64 = raw.iter().sum();
    raw.into_iter().map(|r| Q::new(r.into(), total.into())).collect()
}

/// Random point of the `(2,2,2)` polytope mixing a few random vertices.
pub fn random_nonsignaling_222<R: Rng + ?Sized>(rng: &mut R) -> DistributionMatrix {
    let cat = catalog_222();
    let mut verts: Vec<DistributionMatrix> = cat
        .prs()
        .iter()
        .map(|g| g.to_matrix())
        .chain(cat.lds().iter().map(|d| d.to_matrix()))
        .collect();
    verts.shuffle(rng);
    let k = rng.gen_range(1..=6);
    let w = random_weights(rng, k);
    mix(&verts.into_iter().take(k).zip(w).collect::<Vec<_>>()).expect("weights sum to one")
}

/// Random CHSH-violating point: one PR box with a sizeable weight mixed with
/// random LDs and occasionally a second PR box; resampled until nonlocal.
pub fn random_nonlocal_222<R: Rng + ?Sized>(rng: &mut R) -> DistributionMatrix {
    let cat = catalog_222();
    loop {
        let k = rng.gen_range(1..=8);
        let mut verts = vec![cat.pr(k).to_matrix()];
        let extra = rng.gen_range(0..=8);
        for _ in 0..extra {
            verts.push(cat.ld(rng.gen_range(1..=16)).to_matrix());
        }
        if rng.gen_bool(0.2) {
            verts.push(cat.pr(rng.gen_range(1..=8)).to_matrix());
        }
        let mut w = random_weights(rng, verts.len());
        // boost the leading box so most draws are nonlocal
        w[0] += Q::from_integer(verts.len().into());
        let total: Q = w.iter().sum();
        let w: Vec<Q> = w.into_iter().map(|x| x / &total).collect();
        let dm = mix(&verts.into_iter().zip(w).collect::<Vec<_>>()).expect("normalized");
        if violated_symmetry(&dm).expect("n = 2").is_some() {
            return dm;
        }
    }
}

/// A random exact mixture `p_G g + sum p_i D_i` over a random box `g` and its
/// one-support-mismatch strategies, with `p_G > 0`. Returns the matrix, the
/// box, its weight, and the strategy weights in the order of
/// [`one_support_mismatches`].
pub fn random_gpr_mixture<R: Rng + ?Sized>(
    rng: &mut R,
    scenario: Scenario,
) -> (DistributionMatrix, GeneralizedPrBox, Q, Vec<(LocalDeterministic, Q)>) {
    let boxes = enumerate_gprs(scenario).expect("small n");
    let g = boxes.choose(rng).expect("nonempty").clone();
    let lds = one_support_mismatches(&g).expect("small n");
    let mut w = random_weights(rng, lds.len() + 1);
    // zero out some strategy weights to reach the face boundary
    for wi in w.iter_mut().skip(1) {
        if rng.gen_bool(0.2) {
            *wi = Q::from_integer(0.into());
        }
    }
    let total: Q = w.iter().sum();
    let w: Vec<Q> = w.into_iter().map(|x| x / &total).collect();
    let mut terms = vec![(g.to_matrix(), w[0].clone())];
    let mut ld_w = Vec::new();
    for ((_, d), wi) in lds.iter().zip(&w[1..]) {
        terms.push((d.to_matrix(), wi.clone()));
        ld_w.push((d.clone(), wi.clone()));
    }
    let dm = mix(&terms).expect("normalized");
    (dm, g, w[0].clone(), ld_w)
}

/// Random point of the chained polytope mixing random LDs and boxes.
pub fn random_nonsignaling_chained<R: Rng + ?Sized>(rng: &mut R, scenario: Scenario) -> DistributionMatrix {
    let lds = enumerate_lds(scenario).expect("small n");
    let boxes = enumerate_gprs(scenario).expect("small n");
    let k = rng.gen_range(1..=6);
    let verts: Vec<DistributionMatrix> = (0..k)
        .map(|_| {
            if rng.gen_bool(0.5) {
                boxes.choose(rng).expect("nonempty").to_matrix()
            } else {
                lds.choose(rng).expect("nonempty").to_matrix()
            }
        })
        .collect();
    let w = random_weights(rng, k);
    mix(&verts.into_iter().zip(w).collect::<Vec<_>>()).expect("normalized")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::matrix::validate;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn samples_are_members() {
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        for _ in 0..50 {
            assert!(validate(&random_nonsignaling_222(&mut rng)).is_empty());
            let dm = random_nonlocal_222(&mut rng);
            assert!(validate(&dm).is_empty());
            assert!(violated_symmetry(&dm).unwrap().is_some());
            let (dm, _, pg, _) = random_gpr_mixture(&mut rng, Scenario::new(3).unwrap());
            assert!(validate(&dm).is_empty());
            assert!(pg > Q::from_integer(0.into()));
        }
    }
}
