// Detector loss: lost particles are recorded as outcome 0, which pulls
// every box towards the local set.

use bellpoly::decomp222::{chsh_value, violated_symmetry};
use bellpoly::efficiency::{apply_efficiency, chsh_polynomial, critical_efficiency, EfficiencyParams};
use bellpoly::rational::{fmt_q, q};
use bellpoly::{catalog_222, mix, Result};

pub fn run_example() -> Result<()> {
    let cat = catalog_222();
    let pr1 = cat.pr(1).to_matrix();
    let sym = violated_symmetry(&pr1)?.unwrap();
    let [c0, c1, c2] = chsh_polynomial(&pr1, sym)?;
    println!("CHSH(eta) for PR1 = {} + ({}) eta + {} eta^2", fmt_q(&c0), fmt_q(&c1), fmt_q(&c2));

    for eta in [q(1, 1), q(9, 10), q(2, 3), q(1, 2)] {
        let lossy = apply_efficiency(&pr1, &EfficiencyParams::symmetric(eta.clone())?);
        println!("  eta = {:<5} CHSH = {}", fmt_q(&eta), fmt_q(&chsh_value(&lossy, sym)?));
    }

    let boxes = [
        ("PR1", pr1.clone()),
        ("0.5 PR1 + 0.5 D1", mix(&[(pr1.clone(), q(1, 2)), (cat.ld(1).to_matrix(), q(1, 2))])?),
        ("0.2 PR1 + 0.8 D1", mix(&[(pr1, q(1, 5)), (cat.ld(1).to_matrix(), q(4, 5))])?),
    ];
    for (name, dm) in boxes {
        match critical_efficiency(&dm)? {
            Some(c) => println!("{name}: critical efficiency {:.9}", c.eta),
            None => println!("{name}: already local"),
        }
    }

    // Alice's detector perfect, Bob's lossy
    let pr1 = cat.pr(1).to_matrix();
    let lossy = apply_efficiency(&pr1, &EfficiencyParams::new(q(1, 1), q(1, 2))?);
    println!("eta_A = 1, eta_B = 1/2: CHSH = {}", fmt_q(&chsh_value(&lossy, sym)?));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
