// Choosing weights over the variant-Eberhard expressions so the combined
// estimator of the PR weight has the smallest variance.

use bellpoly::decomp222::{estimator_second_moment, estimator_weights};
use bellpoly::rational::q;
use bellpoly::{catalog_222, mix, Result, Scenario, SettingsDistribution};

pub fn run_example() -> Result<()> {
    let cat = catalog_222();
    let expected = mix(&[
        (cat.pr(1).to_matrix(), q(1, 10)),
        (cat.ld(1).to_matrix(), q(6, 10)),
        (cat.ld(4).to_matrix(), q(3, 10)),
    ])?;
    let settings = SettingsDistribution::uniform(Scenario::two_two_two());

    let c = estimator_weights(&expected, &settings)?;
    let uniform = [1.0 / 8.0; 8];
    println!("weights: {}", c.iter().map(|w| format!("{w:.4}")).collect::<Vec<_>>().join(" "));
    println!("E[X^2] optimal: {:.6}", estimator_second_moment(&c, &expected, &settings)?);
    println!("E[X^2] uniform: {:.6}", estimator_second_moment(&uniform, &expected, &settings)?);
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
