// Distance from a nonlocal box to the local polytope, in total variation
// (exact) and in Kullback-Leibler divergence (numerical).

use bellpoly::decomp222::decompose_222;
use bellpoly::metrics::{kl_closest_local, tv_closest_local, tv_lp_oracle};
use bellpoly::rational::{fmt_q, q};
use bellpoly::{catalog_222, mix, Result, Scenario, SettingsDistribution};

pub fn run_example() -> Result<()> {
    let cat = catalog_222();
    let noisy = mix(&[(cat.pr(1).to_matrix(), q(3, 10)), (cat.ld(5).to_matrix(), q(7, 10))])?;

    let tv = tv_closest_local(&noisy)?;
    println!("TV distance to the local set: {}", fmt_q(&tv.distance));
    println!("PR weight of the decomposition: {}", fmt_q(&decompose_222(&noisy)?.pr_weight()));
    println!("LP minimum over all local points: {}", fmt_q(&tv_lp_oracle(&noisy)?));
    println!("closest local point:\n{}", tv.closest);

    let settings = SettingsDistribution::uniform(Scenario::two_two_two());
    for (name, dm) in [("PR1", cat.pr(1).to_matrix()), ("0.3 PR1 + 0.7 D5", noisy)] {
        let kl = kl_closest_local(&dm, &settings)?;
        println!("KL distance of {name}: {:.9} bits after {} iterations", kl.distance, kl.iterations);
    }
    println!("log2(4/3) = {:.9}", (4.0f64 / 3.0).log2());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
