// Enumerating the vertices of the no-signaling polytope from its
// inequality description and checking extremality by rank.

use std::collections::BTreeSet;

use bellpoly::polytope::{enumerate_vertices, is_extremal};
use bellpoly::rational::q;
use bellpoly::{catalog_222, enumerate_gprs, enumerate_lds, mix, Result, Scenario};

pub fn run_example() -> Result<()> {
    let sc = Scenario::two_two_two();
    let vertices = enumerate_vertices(sc, false)?;
    let lds = enumerate_lds(sc)?;
    let gprs = enumerate_gprs(sc)?;
    println!("{} vertices: {} local deterministic, {} PR boxes", vertices.len(), lds.len(), gprs.len());

    let expected: BTreeSet<_> = lds
        .iter()
        .map(|d| d.to_matrix().flat())
        .chain(gprs.iter().map(|g| g.to_matrix().flat()))
        .collect();
    let got: BTreeSet<_> = vertices.iter().map(|v| v.flat()).collect();
    assert_eq!(got, expected);

    let cat = catalog_222();
    let blend = mix(&[(cat.pr(1).to_matrix(), q(1, 2)), (cat.pr(2).to_matrix(), q(1, 2))])?;
    println!("PR1 extremal: {}", is_extremal(&cat.pr(1).to_matrix())?);
    println!("D7 extremal: {}", is_extremal(&cat.ld(7).to_matrix())?);
    println!("(PR1 + PR2)/2 extremal: {}", is_extremal(&blend)?);

    // n = 3 takes a few seconds in a debug build
    let n3 = enumerate_vertices(Scenario::new(3)?, true)?;
    println!("n = 3: {} vertices", n3.len());
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
