//! Relabelings of settings and outcomes in the `(2,2,2)` scenario.
//!
//! A relabeling may swap Alice's two settings, swap Bob's, and flip the
//! outcome of any individual setting. The 64 combinations form a group that
//! acts on distribution matrices by permuting cells.

use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::matrix::{DistributionMatrix, Outcome, Scenario};
use crate::vertex::{catalog_222, GeneralizedPrBox, LocalDeterministic};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Relabeling {
    pub swap_a_settings: bool,
    pub swap_b_settings: bool,
    /// Indexed by Alice's setting in the relabeled matrix.
    pub flip_a_outcomes: [bool; 2],
    /// Indexed by Bob's setting in the relabeled matrix.
    pub flip_b_outcomes: [bool; 2],
}

impl Relabeling {
    pub const IDENTITY: Relabeling = Relabeling {
        swap_a_settings: false,
        swap_b_settings: false,
        flip_a_outcomes: [false; 2],
        flip_b_outcomes: [false; 2],
    };

    /// All 64 relabelings in a fixed order (identity first).
    pub fn all() -> &'static [Relabeling] {
        static ALL: OnceLock<Vec<Relabeling>> = OnceLock::new();
        ALL.get_or_init(|| {
            (0..64u32)
                .map(|bits| {
                    let b = |i: u32| bits >> i & 1 == 1;
                    Relabeling {
                        swap_a_settings: b(0),
                        swap_b_settings: b(1),
                        flip_a_outcomes: [b(2), b(3)],
                        flip_b_outcomes: [b(4), b(5)],
                    }
                })
                .collect()
        })
    }

    /// `perm[i]` is the source flat cell of target flat cell `i`.
    fn permutation(&self) -> [usize; 16] {
        let sc = Scenario::two_two_two();
        let mut perm = [0; 16];
        for k in 0..4 {
            let (a, b) = sc.row_settings(k);
            let src_row = sc
                .row_of_settings(a ^ usize::from(self.swap_a_settings), b ^ usize::from(self.swap_b_settings))
                .expect("all setting pairs present at n = 2");
            for o in Outcome::ALL {
                let src = Outcome::from_parties(
                    o.alice_plus() ^ self.flip_a_outcomes[a],
                    o.bob_plus() ^ self.flip_b_outcomes[b],
                );
                perm[4 * k + o.index()] = 4 * src_row + src.index();
            }
        }
        perm
    }

    pub fn apply(&self, dm: &DistributionMatrix) -> Result<DistributionMatrix> {
        if dm.n() != 2 {
            return Err(Error::UnsupportedScenario(dm.n()));
        }
        let flat = dm.flat();
        let out: Vec<_> = self.permutation().iter().map(|&s| flat[s].clone()).collect();
        DistributionMatrix::from_flat(dm.scenario(), &out)
    }

    /// The relabeling undoing `self`.
    pub fn inverse(&self) -> Relabeling {
        let p = self.permutation();
        let mut inv = [0; 16];
        for (i, &s) in p.iter().enumerate() {
            inv[s] = i;
        }
        *Relabeling::all()
            .iter()
            .find(|r| r.permutation() == inv)
            .expect("relabelings form a group")
    }

    pub fn apply_ld(&self, d: &LocalDeterministic) -> Result<LocalDeterministic> {
        let m = self.apply(&d.to_matrix())?;
        Ok(LocalDeterministic::from_matrix(&m).expect("relabeling maps vertices to vertices"))
    }

    pub fn apply_pr(&self, g: &GeneralizedPrBox) -> Result<GeneralizedPrBox> {
        let m = self.apply(&g.to_matrix())?;
        Ok(GeneralizedPrBox::from_matrix(&m).expect("relabeling maps vertices to vertices"))
    }

    /// Image of LD catalog index `i` (1-based).
    pub fn map_ld_index(&self, i: usize) -> usize {
        let cat = catalog_222();
        let d = self.apply_ld(cat.ld(i)).expect("n = 2");
        cat.ld_index(&d).expect("catalog is closed under relabeling")
    }

    /// Image of PR catalog index `i` (1-based).
    pub fn map_pr_index(&self, i: usize) -> usize {
        let cat = catalog_222();
        let g = self.apply_pr(cat.pr(i)).expect("n = 2");
        cat.pr_index(&g).expect("catalog is closed under relabeling")
    }
}

/// Free-function form of [`Relabeling::apply`].
pub fn apply_relabeling(dm: &DistributionMatrix, r: &Relabeling) -> Result<DistributionMatrix> {
    r.apply(dm)
}

/// For each PR index `k` (1-based), the first relabeling in [`Relabeling::all`]
/// sending `PR_k` to `PR_1`.
pub fn canonicalizer(k: usize) -> &'static Relabeling {
    static CANON: OnceLock<Vec<Relabeling>> = OnceLock::new();
    let table = CANON.get_or_init(|| {
        (1..=8)
            .map(|k| {
                *Relabeling::all()
                    .iter()
                    .find(|r| r.map_pr_index(k) == 1)
                    .expect("relabelings act transitively on PR boxes")
            })
            .collect()
    });
    &table[k - 1]
}
