// Chained scenarios: recovering a hidden generalized PR box, the chained
// value certificate and the two merge constructions.

use bellpoly::chained::{
    chained_value, decompose_chained, domino_merge, identify_gpr, mismatch_replacement, mismatch_rows,
    tightness_witness,
};
use bellpoly::rational::fmt_q;
use bellpoly::sampling::random_gpr_mixture;
use bellpoly::{enumerate_gprs, enumerate_lds, Result, Scenario};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

pub fn run_example() -> Result<()> {
    let sc = Scenario::new(4)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (dm, hidden, p, _) = random_gpr_mixture(&mut rng, sc);
    println!("hidden box {hidden} with weight {}", fmt_q(&p));

    let found = identify_gpr(&dm)?.expect("mixture is nonlocal");
    println!("identified {found}, chained value {}", fmt_q(&chained_value(&dm, &found)?));
    let dec = decompose_chained(&dm)?;
    println!("recovered PR weight {} and {} local terms", fmt_q(&dec.pr_weight()), dec.ld_terms.len());

    let (local, _) = tightness_witness(&dm)?;
    assert_eq!(local, chained_value(&dm, &hidden)?);
    println!("local weight {} matches the chained value", fmt_q(&local));

    let boxes = enumerate_gprs(Scenario::new(3)?)?;
    let merged = domino_merge(&boxes[0], &boxes[5])?;
    println!("({} + {}) / 2 =", boxes[0], boxes[5]);
    for d in &merged {
        println!("  1/4 {d}");
    }

    let g = &boxes[0];
    let d = enumerate_lds(Scenario::new(3)?)?
        .into_iter()
        .find(|d| mismatch_rows(g, d).len() == 5)
        .unwrap();
    let out = mismatch_replacement(g, &d)?;
    println!("(4/5) {g} + (1/5) {d} = uniform mix of:");
    for o in &out {
        println!("  {o}");
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
