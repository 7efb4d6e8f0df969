// The 16 local deterministic vertices and 8 PR boxes of the (2,2,2)
// scenario, and how relabelings act on them.

use bellpoly::relabel::Relabeling;
use bellpoly::{catalog_222, validate, Result};

pub fn run_example() -> Result<()> {
    let cat = catalog_222();
    println!("local deterministic vertices (a, a', b, b'):");
    for i in 1..=16 {
        println!("  D{i:<2} {}", cat.ld(i));
    }
    println!("PR boxes (row types ab, a'b, a'b', ab'):");
    for k in 1..=8 {
        let g = cat.pr(k);
        assert!(validate(&g.to_matrix()).is_empty());
        println!("  PR{k} {g}");
    }

    println!("PR1 is\n{}", cat.pr(1).to_matrix());

    // every relabeling permutes both catalogs
    let group = Relabeling::all();
    let moved = group.iter().filter(|r| r.map_pr_index(1) != 1).count();
    println!("{} relabelings, {moved} of them move PR1", group.len());
    let swap = group.iter().find(|r| r.swap_a_settings && !r.swap_b_settings).unwrap();
    println!(
        "swapping Alice's settings sends PR1 to PR{} and D1 to D{}",
        swap.map_pr_index(1),
        swap.map_ld_index(1)
    );
    Ok(())
}

#[allow(dead_code)]
fn main() {
    run_example().unwrap();
}
