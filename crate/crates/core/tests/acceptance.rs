//! Acceptance suite: one line per criterion, nonzero exit if any fails.

use std::collections::BTreeSet;
use std::time::{Duration, Instant};

use bellpoly::chained::{
    chained_value, decompose_chained, domino_merge, mismatch_replacement, mismatch_rows, support_mismatch_count,
    tightness_witness,
};
use bellpoly::decomp222::{
    castout_replacement, chsh_value, chsh_values, decompose_222, decompose_222_with_residual, pair_replacement,
    symmetries, variant_eberhard_values, violated_symmetry,
};
use bellpoly::efficiency::{apply_efficiency, critical_efficiency, EfficiencyParams};
use bellpoly::metrics::{kl_closest_local, kl_closest_local_full, tv_closest_local, tv_distance, tv_lp_oracle, KlObjective};
use bellpoly::polytope::enumerate_vertices;
use bellpoly::rational::{parse_q, q, qi, to_f64};
use bellpoly::sampling::{random_gpr_mixture, random_nonlocal_222};
use bellpoly::{catalog_222, enumerate_gprs, enumerate_lds, mix, DistributionMatrix, Scenario, SettingsDistribution, Q};
use num_traits::{One, Signed};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Check = std::result::Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> std::result::Result<(), String> {
    if cond {
        Ok(())
    } else {
        Err(msg())
    }
}

fn within(t: Instant, limit: Duration, what: &str) -> std::result::Result<(), String> {
    let e = t.elapsed();
    ensure(e <= limit, || format!("{what} took {e:?}, limit {limit:?}"))
}

fn uniform_mix(ms: &[DistributionMatrix]) -> DistributionMatrix {
    let w = q(1, ms.len() as i64);
    mix(&ms.iter().map(|m| (m.clone(), w.clone())).collect::<Vec<_>>()).unwrap()
}

fn vertex_set(sc: Scenario) -> BTreeSet<Vec<Q>> {
    enumerate_lds(sc)
        .unwrap()
        .iter()
        .map(|d| d.to_matrix().flat())
        .chain(enumerate_gprs(sc).unwrap().iter().map(|g| g.to_matrix().flat()))
        .collect()
}

fn criterion_1() -> Check {
    let t = Instant::now();
    let v2 = enumerate_vertices(Scenario::new(2).unwrap(), false).map_err(|e| e.to_string())?;
    within(t, Duration::from_secs(1), "n = 2 enumeration")?;
    let got2: BTreeSet<Vec<Q>> = v2.iter().map(|m| m.flat()).collect();
    ensure(v2.len() == 24 && got2 == vertex_set(Scenario::new(2).unwrap()), || {
        format!("n = 2: {} vertices, catalog match {}", v2.len(), got2 == vertex_set(Scenario::new(2).unwrap()))
    })?;
    let t = Instant::now();
    let v3 = enumerate_vertices(Scenario::new(3).unwrap(), true).map_err(|e| e.to_string())?;
    let e3 = t.elapsed();
    within(t, Duration::from_secs(600), "n = 3 enumeration")?;
    let got3: BTreeSet<Vec<Q>> = v3.iter().map(|m| m.flat()).collect();
    ensure(v3.len() == 96 && got3 == vertex_set(Scenario::new(3).unwrap()), || {
        format!("n = 3: {} vertices", v3.len())
    })?;
    Ok(format!("24 vertices at n = 2, 96 at n = 3 ({e3:.1?}), equal to LD and GPR catalogs"))
}

fn criterion_2() -> Check {
    let t = Instant::now();
    let cat = catalog_222();
    // reference rows for pairs containing PR 1
    let reference: [(usize, [usize; 4]); 7] = [
        (2, [1, 2, 3, 4]),
        (3, [1, 4, 9, 12]),
        (4, [5, 8, 14, 15]),
        (5, [1, 4, 5, 8]),
        (6, [9, 12, 14, 15]),
        (7, [1, 4, 14, 15]),
        (8, [5, 8, 9, 12]),
    ];
    for (j, lds) in reference {
        let lhs = uniform_mix(&lds.map(|i| cat.ld(i).to_matrix()));
        let rhs = uniform_mix(&[cat.pr(1).to_matrix(), cat.pr(j).to_matrix()]);
        ensure(lhs == rhs, || format!("reference row 1,{j} fails the mixture identity"))?;
        let got = pair_replacement(1, j).map_err(|e| e.to_string())?;
        ensure(got == lds, || format!("pair_replacement(1,{j}) = {got:?}, reference {lds:?}"))?;
    }
    let mut pairs = 0;
    for i in 1..=8 {
        for j in i + 1..=8 {
            let lds = pair_replacement(i, j).map_err(|e| e.to_string())?;
            let lhs = uniform_mix(&lds.map(|k| cat.ld(k).to_matrix()));
            let rhs = uniform_mix(&[cat.pr(i).to_matrix(), cat.pr(j).to_matrix()]);
            ensure(lhs == rhs, || format!("pair {i},{j} fails"))?;
            pairs += 1;
        }
    }
    within(t, Duration::from_secs(1), "pair table")?;
    Ok(format!("7 reference rows and all {pairs} pairs satisfy the equal-mixture identity"))
}

fn criterion_3() -> Check {
    let t = Instant::now();
    let cat = catalog_222();
    let reference: [(usize, [usize; 3]); 8] = [
        (2, [5, 12, 14]),
        (3, [8, 9, 15]),
        (6, [1, 12, 14]),
        (7, [4, 9, 15]),
        (10, [4, 5, 14]),
        (11, [1, 8, 15]),
        (13, [4, 5, 9]),
        (16, [1, 8, 12]),
    ];
    for (d, out) in reference {
        let mut lhs = cat.ld(d).to_matrix();
        lhs.add_scaled(&cat.pr(1).to_matrix(), &qi(2));
        let mut rhs = DistributionMatrix::zeros(Scenario::two_two_two());
        for i in out {
            rhs.add_scaled(&cat.ld(i).to_matrix(), &Q::one());
        }
        ensure(lhs == rhs, || format!("cast-out row {d} fails cellwise"))?;
        ensure(castout_replacement(d).ok() == Some(out), || format!("castout_replacement({d}) differs"))?;
    }
    within(t, Duration::from_secs(1), "cast-out table")?;
    Ok("all 8 cast-out rows satisfy D_d + 2 PR1 = sum of three LDs".into())
}

fn measured_table() -> DistributionMatrix {
    // label order ab, ab', a'b, a'b'; canonical order ab, a'b, a'b', ab'
    let rows = [
        ["0.0001422", "0.0000743", "0.0000699", "0.9997136"],
        ["0.0001530", "0.0000635", "0.0005249", "0.9992586"],
        ["0.0001476", "0.0004795", "0.0000644", "0.9993084"],
        ["0.0000024", "0.0006247", "0.0006755", "0.9986974"],
    ];
    let p = |r: usize| rows[r].map(|s| parse_q(s).unwrap());
    DistributionMatrix::new(Scenario::two_two_two(), vec![p(0), p(2), p(3), p(1)]).unwrap()
}

fn criterion_4() -> Check {
    let dm = measured_table();
    let (dec, residual) = decompose_222_with_residual(&dm).map_err(|e| e.to_string())?;
    let cat = catalog_222();
    let p14 = dec.weight_of(cat.ld(14));
    ensure(p14 == parse_q("0.0000743").unwrap(), || format!("p14 = {p14}"))?;
    // twice the Eberhard combination of the table cells
    let eb = parse_q("0.0001422").unwrap() - parse_q("0.0000635").unwrap() - parse_q("0.0000644").unwrap()
        - parse_q("0.0000024").unwrap();
    ensure(eb == parse_q("0.0000119").unwrap(), || "Eberhard oracle".into())?;
    let target = qi(2) * eb;
    let p = dec.pr_weight();
    ensure((&p - &target).abs() <= q(1, 1_000_000), || format!("p_PR = {p}, expected near {target}"))?;
    ensure(residual <= q(2, 10_000_000), || format!("residual {residual}"))?;
    Ok(format!(
        "p14 = 0.0000743 exactly, p_PR = {:.7} (target 0.0000238), residual {:.1e}",
        to_f64(&p),
        to_f64(&residual)
    ))
}

fn criterion_5() -> Check {
    let t = Instant::now();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for i in 0..1000 {
        let dm = random_nonlocal_222(&mut rng);
        let c = tv_closest_local(&dm).map_err(|e| e.to_string())?;
        let p = decompose_222(&dm).map_err(|e| e.to_string())?.pr_weight();
        let direct = tv_distance(&dm, &c.closest).map_err(|e| e.to_string())?;
        let lp = tv_lp_oracle(&dm).map_err(|e| e.to_string())?;
        ensure(c.distance == p && direct == p && lp == p, || {
            format!("instance {i}: closed form {}, direct {direct}, LP {lp}, p_PR {p}", c.distance)
        })?;
    }
    within(t, Duration::from_secs(60), "1000 TV instances")?;
    Ok(format!("1000 instances: closed form = p_PR = exact LP minimum ({:.1?})", t.elapsed()))
}

fn criterion_6() -> Check {
    let cat = catalog_222();
    let pr1 = cat.pr(1).to_matrix();
    let c = critical_efficiency(&pr1).map_err(|e| e.to_string())?.ok_or("PR1 reported local")?;
    ensure((c.eta - 2.0 / 3.0).abs() < 1e-9, || format!("eta* = {}", c.eta))?;
    let at = apply_efficiency(&pr1, &EfficiencyParams::symmetric(q(2, 3)).unwrap());
    ensure(chsh_value(&at, &symmetries()[0]).unwrap() == qi(2), || "CHSH(2/3) != 2".into())?;
    let mut rng = ChaCha8Rng::seed_from_u64(6);
    let two_thirds = EfficiencyParams::symmetric(q(2, 3)).unwrap();
    for i in 0..200 {
        let dm = random_nonlocal_222(&mut rng);
        let t = apply_efficiency(&dm, &two_thirds);
        let vals = chsh_values(&t).map_err(|e| e.to_string())?;
        ensure(vals.iter().all(|v| *v <= qi(2)), || format!("instance {i} stays nonlocal at 2/3"))?;
    }
    Ok(format!("eta*(PR1) = {:.12}, CHSH(2/3) = 2 exactly, 200 instances local at 2/3", c.eta))
}

fn criterion_7() -> Check {
    let t = Instant::now();
    let boxes = enumerate_gprs(Scenario::new(3).unwrap()).unwrap();
    let mut pairs = 0;
    for i in 0..boxes.len() {
        for j in i + 1..boxes.len() {
            let out = domino_merge(&boxes[i], &boxes[j]).map_err(|e| e.to_string())?;
            let lhs = uniform_mix(&out.clone().map(|d| d.to_matrix()));
            let rhs = uniform_mix(&[boxes[i].to_matrix(), boxes[j].to_matrix()]);
            ensure(lhs == rhs, || format!("domino fails for {} / {}", boxes[i], boxes[j]))?;
            pairs += 1;
        }
    }
    ensure(pairs == 496, || format!("{pairs} pairs"))?;
    within(t, Duration::from_secs(10), "domino closure")?;
    Ok(format!("all {pairs} pairs at n = 3 pass the domino identity ({:.1?})", t.elapsed()))
}

fn criterion_8() -> Check {
    let t = Instant::now();
    let sc = Scenario::new(3).unwrap();
    let mut total = 0;
    let mut replaced = 0;
    for g in enumerate_gprs(sc).unwrap() {
        for d in enumerate_lds(sc).unwrap() {
            total += 1;
            let c = mismatch_rows(&g, &d).len();
            ensure(c % 2 == 1, || format!("even count {c} for {g} / {d}"))?;
            ensure(support_mismatch_count(&g, &d).is_ok(), || "count rejected".into())?;
            if c >= 3 {
                let m = ((c - 1) / 2) as i64;
                let out = mismatch_replacement(&g, &d).map_err(|e| e.to_string())?;
                ensure(out.len() == c, || "wrong output count".into())?;
                for o in &out {
                    ensure(mismatch_rows(&g, o).len() == 1, || format!("{o} is not a one-support mismatch"))?;
                }
                let lhs = mix(&[(g.to_matrix(), q(2 * m, 2 * m + 1)), (d.to_matrix(), q(1, 2 * m + 1))]).unwrap();
                let rhs = uniform_mix(&out.iter().map(|o| o.to_matrix()).collect::<Vec<_>>());
                ensure(lhs == rhs, || format!("replacement identity fails for {g} / {d}"))?;
                replaced += 1;
            }
        }
    }
    ensure(total == 2048, || format!("{total} pairs"))?;
    within(t, Duration::from_secs(60), "mismatch exhaustive")?;
    Ok(format!("2048 pairs odd; {replaced} replacements exact ({:.1?})", t.elapsed()))
}

fn criterion_9() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(9);
    for i in 0..1000 {
        let n = rng.gen_range(2..=4);
        let (dm, g, pg, lds) = random_gpr_mixture(&mut rng, Scenario::new(n).unwrap());
        let dec = decompose_chained(&dm).map_err(|e| format!("instance {i}: {e}"))?;
        let (box_got, w_got) = dec.pr_term.clone().ok_or("missing box")?;
        ensure(box_got == g && w_got == pg, || format!("instance {i}: box or weight differs"))?;
        for (d, w) in &lds {
            ensure(dec.weight_of(d) == *w, || format!("instance {i}: weight of {d} differs"))?;
        }
        let (lw, _) = tightness_witness(&dm).map_err(|e| e.to_string())?;
        let iv = chained_value(&dm, &g).map_err(|e| e.to_string())?;
        ensure(lw == iv, || format!("instance {i}: local weight {lw} vs chained value {iv}"))?;
    }
    Ok("1000 mixtures (n in 2..=4) recovered exactly; local weight = chained value".into())
}

fn criterion_10() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    let settings = SettingsDistribution::uniform(Scenario::two_two_two());
    let mut worst_grad = 0.0f64;
    for _ in 0..100 {
        let dm = random_nonlocal_222(&mut rng);
        let sym = violated_symmetry(&dm).unwrap().unwrap();
        let obj = KlObjective::new(&dm, &settings, &sym.saturating_set).map_err(|e| e.to_string())?;
        let raw: Vec<f64> = (0..8).map(|_| rng.gen_range(0.05..1.0)).collect();
        let total: f64 = raw.iter().sum();
        let w: Vec<f64> = raw.iter().map(|x| x / total).collect();
        let g = obj.gradient(&w);
        let h = 1e-6;
        for i in 0..8 {
            let mut up = w.clone();
            let mut dn = w.clone();
            up[i] += h;
            dn[i] -= h;
            let fd = (obj.value(&up) - obj.value(&dn)) / (2.0 * h);
            let err = if g[i].abs() > 1e-12 { (fd - g[i]).abs() / g[i].abs() } else { fd.abs() };
            worst_grad = worst_grad.max(err);
        }
    }
    ensure(worst_grad <= 1e-5, || format!("gradient relative error {worst_grad:e}"))?;
    let mut worst_gap = 0.0f64;
    for i in 0..50 {
        let dm = random_nonlocal_222(&mut rng);
        let r = kl_closest_local(&dm, &settings).map_err(|e| format!("reduced {i}: {e}"))?;
        let f = kl_closest_local_full(&dm, &settings).map_err(|e| format!("full {i}: {e}"))?;
        worst_gap = worst_gap.max((r.distance - f.distance).abs());
    }
    ensure(worst_gap <= 1e-8, || format!("reduced vs full differ by {worst_gap:e}"))?;
    let cat = catalog_222();
    let pr1 = cat.pr(1).to_matrix();
    let r = kl_closest_local(&pr1, &settings).map_err(|e| e.to_string())?;
    let bound = (4.0f64 / 3.0).log2();
    ensure(r.distance <= bound + 1e-9, || format!("PR1 optimum {} above log2(4/3)", r.distance))?;
    let grid = kl_grid_oracle(&pr1, &settings, 24);
    ensure((r.distance - grid).abs() <= 1e-3, || format!("optimum {} vs grid {grid}", r.distance))?;
    Ok(format!(
        "gradient err {worst_grad:.1e}; reduced/full gap {worst_gap:.1e}; PR1 optimum {:.9} (grid {grid:.9})",
        r.distance
    ))
}

/// Minimum of the reduced KL objective over the simplex grid with spacing
/// `1/steps`.
fn kl_grid_oracle(dm: &DistributionMatrix, settings: &SettingsDistribution, steps: usize) -> f64 {
    let sym = violated_symmetry(dm).unwrap().unwrap();
    let obj = KlObjective::new(dm, settings, &sym.saturating_set).unwrap();
    let mut best = f64::INFINITY;
    let mut counts = [0usize; 8];
    fn rec(k: usize, left: usize, steps: usize, counts: &mut [usize; 8], obj: &KlObjective, best: &mut f64) {
        if k == 7 {
            counts[7] = left;
            let w: Vec<f64> = counts.iter().map(|&c| c as f64 / steps as f64).collect();
            let v = obj.value(&w);
            if v < *best {
                *best = v;
            }
            return;
        }
        for c in 0..=left {
            counts[k] = c;
            rec(k + 1, left - c, steps, counts, obj, best);
        }
    }
    rec(0, steps, steps, &mut counts, &obj, &mut best);
    best
}

fn criterion_11() -> Check {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for i in 0..500 {
        let dm = random_nonlocal_222(&mut rng);
        let sym = violated_symmetry(&dm).unwrap().unwrap();
        let p = decompose_222(&dm).map_err(|e| e.to_string())?.pr_weight();
        let vals = variant_eberhard_values(&dm, sym).map_err(|e| e.to_string())?;
        let half_p = &p / qi(2);
        ensure(vals.iter().all(|v| *v == half_p), || format!("instance {i}: values differ from p_PR/2"))?;
        let sum: Q = vals.iter().sum();
        ensure(sum == qi(4) * &p, || format!("instance {i}: sum {sum}"))?;
        let c = chsh_value(&dm, sym).unwrap();
        ensure(c == qi(2) + qi(2) * &p, || format!("instance {i}: CHSH {c} vs p_PR {p}"))?;
        ensure(p.is_positive(), || "non-positive p_PR".into())?;
    }
    Ok("500 instances: 8 equal values = p_PR/2, sum = 4 p_PR, CHSH = 2 + 2 p_PR".into())
}

fn main() {
    let criteria: [(&str, fn() -> Check); 11] = [
        ("vertex counts", criterion_1),
        ("pair replacement table", criterion_2),
        ("cast-out table", criterion_3),
        ("empirical table read-off", criterion_4),
        ("closest local point in TV", criterion_5),
        ("efficiency threshold", criterion_6),
        ("domino closure at n = 3", criterion_7),
        ("mismatch parity and replacement at n = 3", criterion_8),
        ("chained read-off round trip", criterion_9),
        ("KL projection", criterion_10),
        ("variant-Eberhard family", criterion_11),
    ];
    let mut failed = 0;
    for (i, (name, f)) in criteria.iter().enumerate() {
        let t = Instant::now();
        let outcome = std::panic::catch_unwind(f).unwrap_or_else(|_| Err("panicked".into()));
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name}: {detail} [{:.1?}]", i + 1, t.elapsed()),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name}: {why} [{:.1?}]", i + 1, t.elapsed());
            }
        }
    }
    println!("acceptance: {} passed, {failed} failed", criteria.len() - failed);
    if failed > 0 {
        std::process::exit(1);
    }
}
