//! Acceptance criteria 1 to 12, one pass/fail line each. Runs without the
//! libtest harness so the lines always reach the output.

use std::process::ExitCode;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use groupdens::battery;
use groupdens::catalog::small_groups;
use groupdens::density::{density_bruteforce, density_closed_form, DensityKind, Scope};
use groupdens::games::{eval_extremal, intersection_number, sigma_r_via_game, ExtremalEvaluator, ExtremalPattern};
use groupdens::group::{build_group, translate, GroupSpec, GroupSubset};
use groupdens::partitions::{
    difference_power_subgroup, odd_group_check, thm139_bound, verify_prop122, verify_thm137, verify_thm139,
};
use groupdens::perms::{conjugation_witness, perm_compose, FinSuppPermutation, TargetDomain};
use groupdens::rational::{self, ratio};
use groupdens::words::fgroup_nonsubadditivity_certificate;
use groupdens::zline::{self, ZSet};

type Outcome = Result<String, String>;

fn ensure(cond: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if cond { Ok(()) } else { Err(msg()) }
}

fn err(e: groupdens::Error) -> String {
    e.to_string()
}

fn subsets(order: usize) -> impl Iterator<Item = GroupSubset> {
    (0..1u64 << order).map(move |m| GroupSubset::from_mask(order, m))
}

fn oracle() -> Outcome {
    let specs = [2, 3, 4, 5, 6].map(GroupSpec::Cyclic).into_iter().chain([GroupSpec::Symmetric(3)]);
    let mut count = 0;
    for spec in specs {
        let g = build_group(&spec).map_err(err)?;
        for a in subsets(g.order()).skip(1) {
            for kind in DensityKind::ALL {
                let bf = density_bruteforce(&g, &a, kind, g.order()).map_err(err)?;
                let closed = density_closed_form(&g, &a, kind);
                ensure(bf.value == closed, || format!("{} {:?} {kind}: {} vs {}", g.name(), a.to_indices(), bf.value, closed))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} (group, set, kind) triples agree"))
}

fn minimax() -> Outcome {
    let mut count = 0;
    for g in small_groups(8) {
        let n = g.order();
        for a in subsets(n) {
            let game = sigma_r_via_game(&g, &a).map_err(err)?;
            let family: Vec<Vec<usize>> = g.elements().map(|x| translate(&g, &a, x, 0).to_indices()).collect();
            let (inum, _) = intersection_number(&family, n).map_err(err)?;
            let closed = density_closed_form(&g, &a, DensityKind::SigmaR);
            ensure(
                game.minimax.value == closed && game.maximin.value == closed && inum == closed,
                || format!("{} {:?}", g.name(), a.to_indices()),
            )?;
            count += 1;
        }
    }
    Ok(format!("{count} sets over {} groups", small_groups(8).len()))
}

fn haar_collapse() -> Outcome {
    let patterns: Vec<ExtremalPattern> = (1..=3)
        .flat_map(ExtremalPattern::all_of_length)
        .filter(ExtremalPattern::is_mixed)
        .collect();
    let mut count = 0;
    for g in small_groups(6) {
        let mut eval = ExtremalEvaluator::new(&g).map_err(err)?;
        for a in subsets(g.order()) {
            let closed = density_closed_form(&g, &a, DensityKind::Sigma);
            for p in &patterns {
                let v = eval.eval(p, &a).map_err(err)?;
                ensure(v.value() == Some(&closed), || format!("{} {:?} {p}: {v:?}", g.name(), a.to_indices()))?;
                count += 1;
            }
        }
    }
    // the one-shot entry point agrees with the cached evaluator
    let g = build_group(&GroupSpec::Symmetric(3)).map_err(err)?;
    let a = g.subset(&[0, 1]).map_err(err)?;
    let v = eval_extremal(&"Ssi231".parse().map_err(err)?, &g, &a).map_err(err)?;
    ensure(v.value() == Some(&ratio(1, 3)), || format!("Ssi231 on s3: {v:?}"))?;
    Ok(format!("{count} evaluations over {} mixed patterns", patterns.len()))
}

fn covering_packing() -> Outcome {
    let mut checked = 0;
    let mut tight = 0;
    for g in small_groups(8) {
        let r = verify_prop122(&g).map_err(err)?;
        ensure(r.holds(), || format!("{}: {:?}", g.name(), r.violations.first()))?;
        checked += r.subsets_checked;
        tight += r.tight.len();
    }
    let c6 = build_group(&GroupSpec::Cyclic(6)).map_err(err)?;
    let r = verify_prop122(&c6).map_err(err)?;
    let case = r
        .tight
        .iter()
        .find(|c| c.set == [0, 1])
        .ok_or("cyclic 6 {0,1} not reported tight")?;
    ensure((case.cov_difference, case.pack, case.bound) == (2, 3, 3), || format!("{case:?}"))?;
    Ok(format!("{checked} sets, {tight} tight; cyclic 6 {{0,1}}: 2 <= 3 <= 3"))
}

fn partition_bounds() -> Outcome {
    let bounds: Vec<u64> = (2..=4).map(thm139_bound).collect();
    ensure(bounds == [2, 3, 7], || format!("general bounds {bounds:?}"))?;
    let mut partitions = 0;
    for g in small_groups(8) {
        for n in [2, 3] {
            for v in [verify_thm137(&g, n).map_err(err)?, verify_thm139(&g, n).map_err(err)?] {
                ensure(v.pass, || format!("{} n={n} {}: worst {}", g.name(), v.theorem, v.worst_value))?;
                partitions += v.partitions_checked;
            }
        }
    }
    Ok(format!("{partitions} partitions; bounds for n = 2, 3, 4 are {bounds:?}"))
}

fn odd_groups() -> Outcome {
    let specs = [2, 3, 4, 5, 6, 7, 8, 9, 15]
        .map(GroupSpec::Cyclic)
        .into_iter()
        .chain([GroupSpec::Symmetric(3), GroupSpec::Dihedral(4)]);
    let mut lines = Vec::new();
    for spec in specs {
        let v = odd_group_check(&build_group(&spec).map_err(err)?).map_err(err)?;
        ensure(v.consistent, || format!("{}: {v:?}", v.group))?;
        ensure(v.odd || v.witness.is_some(), || format!("{}: no witness", v.group))?;
        lines.push(format!("{}={}", v.group, if v.odd { "odd" } else { "witness" }));
    }
    Ok(lines.join(" "))
}

fn primes() -> Outcome {
    let table = zline::primes_bound_table(6, 1_000_000).map_err(err)?;
    let expected = [(2, 1), (6, 2), (30, 8), (210, 48), (2310, 480), (30030, 5760)];
    let got: Vec<(u64, u64)> = table.rows.iter().map(|r| (r.n_k, r.phi)).collect();
    ensure(got == expected, || format!("(n_k, phi) = {got:?}"))?;
    ensure(table.strictly_decreasing, || "bounds not strictly decreasing".into())?;
    let last = table.rows[5].bound();
    ensure(last < ratio(39, 100), || format!("bound_6 = {last}"))?;
    for r in &table.rows[..5] {
        ensure(r.holds, || format!("k = {}: {} > {}", r.k, r.empirical_max, r.bound_num))?;
    }
    let row6 = &table.rows[5];
    Ok(format!(
        "bound_6 = {} ~ {:.4}; k = 6 empirical max {} vs {}",
        rational::format(&last),
        rational::to_f64(&last),
        row6.empirical_max,
        row6.bound_num
    ))
}

fn free_group() -> Outcome {
    for n in 1..=8 {
        let r = fgroup_nonsubadditivity_certificate(n, 12).map_err(err)?;
        let e = &r.exhaustive;
        ensure(e.agree && e.max_row_count_a <= 1 && e.max_row_count_b <= 1, || format!("n = {n}: {e:?}"))?;
        for c in [&r.a_certificate, &r.b_certificate] {
            ensure(c.scope == Scope::Exact && c.bound <= ratio(1, n as i64), || format!("n = {n}: {c:?}"))?;
        }
        ensure(r.union_is_group && (n < 3 || r.subadditivity_fails), || format!("n = {n}: {r:?}"))?;
    }
    Ok("row counts <= 1 through length 12 for n <= 8; EXACT certificates at 1/n".into())
}

fn random_permutation(rng: &mut ChaCha8Rng) -> FinSuppPermutation {
    (0..rng.gen_range(1..4)).fold(FinSuppPermutation::identity(), |acc, _| {
        let a = rng.gen_range(1..=15);
        let b = rng.gen_range(1..=15);
        if a == b {
            return acc;
        }
        perm_compose(&acc, &FinSuppPermutation::transposition(a, b))
    })
}

fn conjugation() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(66);
    let (mut tails, mut residues) = (0, 0);
    for _ in 0..100 {
        let s: Vec<FinSuppPermutation> = (0..rng.gen_range(1..5)).map(|_| random_permutation(&mut rng)).collect();
        let e = if rng.gen_bool(0.5) {
            tails += 1;
            TargetDomain::tail(rng.gen_range(1..30))
        } else {
            residues += 1;
            let m = rng.gen_range(2..7);
            TargetDomain::residue(m, rng.gen_range(0..m)).map_err(err)?
        };
        let w = conjugation_witness(&s, &e).map_err(err)?;
        for c in &w.conjugates {
            ensure(c.support().into_iter().all(|x| e.contains(x)), || format!("{c} escapes {e:?}"))?;
        }
    }
    Ok(format!("100 witnesses ({tails} tail, {residues} residue targets)"))
}

fn random_zset(rng: &mut ChaCha8Rng) -> ZSet {
    let m = rng.gen_range(1..=12u64);
    loop {
        let r: Vec<u64> = (0..m).filter(|_| rng.gen_bool(0.45)).collect();
        if !r.is_empty() {
            return ZSet::periodic(m, r).expect("valid residues");
        }
    }
}

fn zline_battery() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(10);
    for _ in 0..50 {
        let a = random_zset(&mut rng);
        let d = zline::dstar(&a);
        let trace = zline::folner_density(|x| a.contains(x), 0, 10 * a.modulus() as usize).map_err(err)?;
        ensure((trace.estimate - rational::to_f64(&d)).abs() <= 0.1, || format!("{a}: {} vs {d}", trace.estimate))?;
        let lattice = ZSet::periodic(a.modulus(), [0]).map_err(err)?;
        ensure(lattice.is_subset(&zline::delta_eps(&a, &d)).map_err(err)?, || format!("{a}: delta misses mZ"))?;
    }
    let mut applicable = 0;
    for _ in 0..25 {
        let (a, b) = (random_zset(&mut rng), random_zset(&mut rng));
        let j = zline::jin_witness(&a, &b, 64).map_err(err)?;
        ensure(j.within_bound, || format!("{a} + {b}: |F| = {} > {}", j.f.len(), j.bound))?;
        let v = zline::lemma163_check(&a, &b, 64).map_err(err)?;
        ensure(v.holds, || format!("{a} + {b}: {v:?}"))?;
        applicable += usize::from(v.applicable);
    }
    let evens = ZSet::periodic(2, [0]).map_err(err)?;
    let boundary = zline::lemma163_check(&evens, &evens, 64).map_err(err)?;
    ensure(!boundary.applicable, || format!("2Z boundary: {boundary:?}"))?;
    Ok(format!("50 sets, 25 pairs ({applicable} with density sum > 1); 2Z boundary not applicable"))
}

fn power_subgroup() -> Outcome {
    let mut count = 0;
    for g in small_groups(12) {
        for a in subsets(g.order()).skip(1) {
            for n in 1..=3 {
                if a.len() * n < g.order() {
                    continue;
                }
                let p = difference_power_subgroup(&g, &a, n).map_err(err)?;
                ensure(p.holds, || format!("{} {:?} n={n}: {p:?}", g.name(), a.to_indices()))?;
                count += 1;
            }
        }
    }
    Ok(format!("{count} (group, set, n) cases"))
}

fn invariant_battery() -> Outcome {
    let report = battery::verify_all(8, 0).map_err(err)?;
    let named = [
        "convolution-associativity",
        "uniform-absorption",
        "pushforward-convolution",
        "quotient-sigma-invariance",
        "sigma-subadditivity",
        "right-density-dilation",
        "inversion-mirror",
    ];
    for name in named {
        ensure(report.checks.iter().any(|c| c.name == name), || format!("{name} missing"))?;
    }
    if let Some(c) = report.failures().next() {
        return Err(format!("{}: {:?}", c.name, c.violation));
    }
    let instances: u64 = report.checks.iter().map(|c| c.instances).sum();
    Ok(format!("{} checks, {instances} instances", report.checks.len()))
}

fn main() -> ExitCode {
    let criteria: [(&str, fn() -> Outcome); 12] = [
        ("closed form vs brute force", oracle),
        ("minimax chain", minimax),
        ("Haar collapse", haar_collapse),
        ("covering and packing", covering_packing),
        ("partition bounds", partition_bounds),
        ("odd groups", odd_groups),
        ("primes table", primes),
        ("free group certificate", free_group),
        ("conjugation witnesses", conjugation),
        ("zline battery", zline_battery),
        ("power subgroup", power_subgroup),
        ("invariant battery", invariant_battery),
    ];
    let mut failed = 0;
    for (i, (name, check)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = check();
        let secs = start.elapsed().as_secs_f64();
        match outcome {
            Ok(detail) => println!("criterion {:>2} PASS  {name} ({secs:.1}s): {detail}", i + 1),
            Err(why) => {
                failed += 1;
                println!("criterion {:>2} FAIL  {name} ({secs:.1}s): {why}", i + 1);
            }
        }
    }
    println!("acceptance: {} of 12 passed", 12 - failed);
    if failed == 0 { ExitCode::SUCCESS } else { ExitCode::FAILURE }
}
