// Splitting a weakly nonlocal measured table into one PR box plus local
// deterministic terms.

use bellpoly::decomp222::{chsh_values, decompose_222_with_residual, variant_eberhard_values, violated_symmetry};
use bellpoly::io::parse_distribution;
use bellpoly::rational::{fmt_decimal, to_f64};
use bellpoly::Result;

const TABLE: &str = include_str!(concat!(env!("CARGO_MANIFEST_DIR"), "/data/empirical_weak_violation.json"));

pub fn run_example() -> Result<()> {
    let loaded = parse_distribution(TABLE)?;
    let dm = &loaded.matrix;

    let chsh = chsh_values(dm)?;
    for (k, v) in chsh.iter().enumerate() {
        println!("CHSH symmetry {}: {}", k + 1, fmt_decimal(v, 7));
    }
    let sym = violated_symmetry(dm)?.expect("table violates CHSH");
    println!("violated symmetry: {}", sym.index);

    // the measured rows carry rounding, so the read-off works on the
    // nearest no-signaling matrix and reports how far that was
    let (dec, residual) = decompose_222_with_residual(dm)?;
    let (pr, p) = dec.pr_term.clone().unwrap();
    println!("PR part: {pr} with weight {}", fmt_decimal(&p, 7));
    for (d, w) in &dec.ld_terms {
        println!("  {d}  {}", fmt_decimal(w, 7));
    }
    println!("projection residual (TV): {:.1e}", to_f64(&residual));

    let vals = variant_eberhard_values(dm, sym)?;
    println!("first variant-Eberhard value: {}", fmt_decimal(&vals[0], 7));
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
