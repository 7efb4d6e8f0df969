// Equal mixtures of two PR boxes are local, and so is a local vertex with
// the PR box cast out.

use bellpoly::decomp222::{castout_replacement, pair_replacement};
use bellpoly::rational::{q, qi};
use bellpoly::{catalog_222, mix, DistributionMatrix, Result, Scenario};

pub fn run_example() -> Result<()> {
    let cat = catalog_222();
    println!("(PR_i + PR_j) / 2 as an equal mix of four LDs:");
    for i in 1..=8 {
        for j in i + 1..=8 {
            let lds = pair_replacement(i, j)?;
            let quarter = q(1, 4);
            let lhs = mix(&lds.map(|k| (cat.ld(k).to_matrix(), quarter.clone())))?;
            let rhs = mix(&[(cat.pr(i).to_matrix(), q(1, 2)), (cat.pr(j).to_matrix(), q(1, 2))])?;
            assert_eq!(lhs, rhs);
            if i == 1 {
                println!("  PR1 + PR{j}: D{} D{} D{} D{}", lds[0], lds[1], lds[2], lds[3]);
            }
        }
    }

    println!("D_d + 2 PR1 as a sum of three LDs:");
    for d in 1..=16 {
        let Ok(out) = castout_replacement(d) else { continue };
        let mut lhs = cat.ld(d).to_matrix();
        lhs.add_scaled(&cat.pr(1).to_matrix(), &qi(2));
        let mut rhs = DistributionMatrix::zeros(Scenario::two_two_two());
        for k in out {
            rhs.add_scaled(&cat.ld(k).to_matrix(), &qi(1));
        }
        assert_eq!(lhs, rhs);
        println!("  D{d}: D{} D{} D{}", out[0], out[1], out[2]);
    }
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
