//! Acceptance run: one PASS/FAIL line per criterion, nonzero exit if any
//! criterion fails.

mod common;

use std::time::{Duration, Instant};

use rand::rngs::StdRng;
use rand::{Rng, SeedableRng};

use common::{in_spectrum, oracle_accepts, spectrum_size};
use urd_core::catalog::{self, Designator, Source, IURD20_PARTIALS};
use urd_core::constructor::{construct_urd, solve_plan, ConstructError, Plan, Route};
use urd_core::format;
use urd_core::ingredients::{c4_factorization_bipartite, near_one_factorization, IngredientError, IngredientKey, Provider};
use urd_core::model::{BlockKind, Certificate, Coverage, TargetShape};
use urd_core::spectrum::{admissible, multiple, pair_set, spectrum_set, sum_sets, ClassPair};
use urd_core::verifier::{verify, verify_equal_partial_coverage};

struct Outcome {
    pass: bool,
    summary: String,
    notes: Vec<String>,
}

fn outcome(pass: bool, summary: impl Into<String>) -> Outcome {
    Outcome { pass, summary: summary.into(), notes: Vec::new() }
}

fn cp(r: u32, s: u32) -> ClassPair {
    ClassPair::new(r, s)
}

fn ms(d: Duration) -> String {
    format!("{:.1} ms", d.as_secs_f64() * 1e3)
}

fn catalog_reproduction() -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut count = 0;
    for (d, source) in catalog::designators() {
        if source != Source::Explicit {
            continue;
        }
        count += 1;
        let c = catalog::explicit(&d).expect("explicit entry");
        let report = verify(&c);
        let lambda_two = c.target.lambda == 2;
        if !report.passed() || !lambda_two || !oracle_accepts(&c) {
            failures.push(format!("{d}: {report}"));
        }
    }
    let elapsed = start.elapsed();
    let mut out = outcome(
        failures.is_empty() && elapsed < Duration::from_secs(1),
        format!("{count} explicit entries, {} failing, {}", failures.len(), ms(elapsed)),
    );
    out.notes.extend(failures);
    for e in catalog::errata() {
        let printed = match &e.as_printed {
            Some(c) => {
                let r = verify(c);
                if r.passed() {
                    "as printed: PASS".to_string()
                } else {
                    format!("as printed: FAIL at check {}", r.failed_check().map_or(0, |c| c.number()))
                }
            }
            None => "no literal reading".to_string(),
        };
        out.notes.push(format!("erratum {}: {}; {printed}", e.designator, e.note));
    }
    out
}

fn partial_consistency() -> Outcome {
    let certs: Vec<Certificate> = IURD20_PARTIALS
        .iter()
        .map(|&partial| catalog::explicit(&Designator::Iurd20 { partial, full: cp(12, 0) }).expect("IURD entry"))
        .collect();
    let partial_only: Vec<Certificate> = certs
        .iter()
        .map(|c| {
            let mut c = c.clone();
            c.classes.retain(|k| !k.coverage.is_full());
            c
        })
        .collect();
    match verify_equal_partial_coverage(&partial_only) {
        Ok(true) => outcome(true, "the three partial resolutions cover the same edge multiset"),
        Ok(false) => outcome(false, "partial resolutions cover different edges"),
        Err(e) => outcome(false, e.to_string()),
    }
}

const DESK: [(u32, usize); 10] =
    [(4, 2), (8, 3), (12, 4), (16, 6), (20, 7), (24, 8), (28, 10), (32, 11), (44, 15), (48, 16)];

fn desk_scale_construction(provider: &mut Provider) -> Outcome {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut built = 0;
    for (v, size) in DESK {
        let set = spectrum_set(v);
        if set.len() != size {
            failures.push(format!("|I({v})| = {}, expected {size}", set.len()));
        }
        for p in set.pairs {
            match construct_urd(v, p, provider) {
                Ok(c) if verify(&c).passed() && c.profile() == p && c.partial_profile() == cp(0, 0) => built += 1,
                Ok(c) => failures.push(format!("URD({v};{},{}): {}", p.r, p.s, verify(&c))),
                Err(e) => failures.push(format!("URD({v};{},{}): {e}", p.r, p.s)),
            }
        }
    }
    let elapsed = start.elapsed();
    let mut out = outcome(
        failures.is_empty() && elapsed < Duration::from_secs(60),
        format!("{built} designs built and verified over v in 4..32, 44, 48 in {}", ms(elapsed)),
    );
    out.notes = failures;
    out
}

fn order_36(provider: &mut Provider) -> Outcome {
    let mut failures = Vec::new();
    let mut built = 0;
    let set = spectrum_set(36);
    for p in &set.pairs {
        match construct_urd(36, *p, provider) {
            Ok(c) if verify(&c).passed() && c.profile() == *p => built += 1,
            Ok(c) => failures.push(format!("{p}: {}", verify(&c))),
            Err(e) => failures.push(format!("{p}: {e}")),
        }
    }
    // profiles of the 12^3 ingredient with no direct construction
    let mut gaps = Vec::new();
    let mut direct = provider_without_search();
    for profile in [cp(24, 0), cp(18, 8), cp(12, 16), cp(6, 24), cp(0, 32)] {
        match direct.provide(&IngredientKey::urgdd(12, 3, 2, profile)) {
            Ok(c) if c.profile() == profile && verify(&c).passed() => {}
            Ok(_) => failures.push(format!("URGDD(12^3;{profile}) wrong certificate")),
            Err(IngredientError::NotAvailable { .. }) => gaps.push(profile),
            Err(e) => failures.push(e.to_string()),
        }
    }
    // a plan that can only use a missing profile reports the gap
    let gap_plan = Plan {
        v: 36,
        profile: cp(26, 8),
        route: Route::Groups12 { u: 3, options: vec![(cp(18, 8), ClassPair::from_index(12, 0))] },
    };
    let gap_message = match solve_plan(&gap_plan, &mut direct) {
        Err(ConstructError::IngredientNotAvailable { reason, .. }) => Some(reason),
        Ok(_) => {
            failures.push("plan through a missing ingredient produced a design".into());
            None
        }
        Err(e) => {
            failures.push(format!("unexpected error {e}"));
            None
        }
    };
    let mut out = outcome(
        failures.is_empty() && built == set.len() && gap_message.is_some(),
        format!(
            "{built}/{} profiles of I(36) built and verified; 12^3 profiles without a direct construction: {}",
            set.len(),
            gaps.iter().map(|p| p.to_string()).collect::<Vec<_>>().join(" ")
        ),
    );
    if let Some(m) = gap_message {
        out.notes.push(format!("gap message: {m}"));
    }
    out.notes.extend(failures);
    out
}

fn provider_without_search() -> Provider {
    let mut p = Provider::new();
    p.search = false;
    p
}

fn necessary_condition(provider: &mut Provider) -> Outcome {
    let mut rng = StdRng::seed_from_u64(20240601);
    let mut failures = Vec::new();
    let (mut admissible_seen, mut built, mut missing) = (0, 0, 0);
    for i in 0..1000 {
        let v = rng.gen_range(1..=100u32);
        let (r, s) = if i % 2 == 0 && v % 4 == 0 {
            let x = rng.gen_range(0..spectrum_size(v) as u32);
            (v - 1 - 3 * x, 4 * x)
        } else {
            (rng.gen_range(0..=v), rng.gen_range(0..=v + 8))
        };
        let expected = in_spectrum(v, r, s);
        if admissible(v, cp(r, s)) != expected {
            failures.push(format!("admissible({v},({r},{s})) disagrees with the closed form"));
        }
        match construct_urd(v, cp(r, s), provider) {
            Err(ConstructError::Inadmissible { .. }) => {
                if expected {
                    failures.push(format!("({v},({r},{s})) admissible but rejected"));
                }
            }
            Ok(c) => {
                admissible_seen += 1;
                built += 1;
                if !expected || c.profile() != cp(r, s) || !oracle_accepts(&c) {
                    failures.push(format!("({v},({r},{s})) produced a wrong design"));
                }
            }
            Err(ConstructError::IngredientNotAvailable { .. }) if expected => {
                admissible_seen += 1;
                missing += 1;
            }
            Err(e) => failures.push(format!("({v},({r},{s})): {e}")),
        }
    }
    for v in 1..=200 {
        if spectrum_set(v).len() != spectrum_size(v) {
            failures.push(format!("|I({v})| differs from the closed form"));
        }
    }
    let mut out = outcome(
        failures.is_empty(),
        format!(
            "1000 samples, {admissible_seen} admissible ({built} built, {missing} beyond the search cap), all inadmissible rejected; |I(v)| matches for v <= 200"
        ),
    );
    out.notes = failures;
    out
}

/// One random single-element change; `None` if the drawn change would be
/// a no-op.
fn mutate(c: &Certificate, rng: &mut StdRng) -> Option<Certificate> {
    let mut m = c.clone();
    let n = c.target.point_count();
    match rng.gen_range(0..10) {
        0..=5 => {
            let ci = rng.gen_range(0..m.classes.len());
            let class = &mut m.classes[ci];
            let bi = rng.gen_range(0..class.blocks.len());
            let block = &mut class.blocks[bi];
            let pi = rng.gen_range(0..block.points.len());
            let new = rng.gen_range(0..n + 2);
            if new == block.points[pi] {
                return None;
            }
            block.points[pi] = new;
        }
        6 => {
            let ci = rng.gen_range(0..m.classes.len());
            let class = &mut m.classes[ci];
            class.kind = match class.kind {
                BlockKind::Cycle4 => BlockKind::Star3,
                _ => BlockKind::Cycle4,
            };
        }
        7 => {
            let ci = rng.gen_range(0..m.classes.len());
            let class = &mut m.classes[ci];
            class.coverage = match &class.coverage {
                Coverage::Full => Coverage::partial(vec![rng.gen_range(0..n)]),
                Coverage::Partial { .. } => Coverage::Full,
            };
        }
        8 => {
            match rng.gen_range(0..4) {
                0 => m.claimed.r += 1,
                1 => m.claimed.s += 1,
                2 => m.claimed.r = m.claimed.r.checked_sub(1)?,
                _ => m.claimed.s = m.claimed.s.checked_sub(1)?,
            };
        }
        _ => {
            if rng.gen_bool(0.5) {
                m.target.lambda = 3 - m.target.lambda;
            } else if let TargetShape::Complete { v } = &mut m.target.shape {
                *v += 4;
            } else {
                return None;
            }
        }
    }
    Some(m)
}

fn mutation_suite(provider: &mut Provider) -> Outcome {
    let picks: [(u32, u32); 20] = [
        (4, 0),
        (8, 2),
        (12, 1),
        (16, 0),
        (16, 5),
        (20, 0),
        (20, 6),
        (24, 2),
        (24, 7),
        (28, 9),
        (32, 5),
        (36, 0),
        (36, 5),
        (36, 11),
        (40, 13),
        (44, 0),
        (44, 14),
        (48, 7),
        (68, 10),
        (92, 30),
    ];
    let mut rng = StdRng::seed_from_u64(6);
    let mut false_accepts = Vec::new();
    let mut oracle_disagreements = 0;
    let mut tried = 0;
    for (v, x) in picks {
        let c = match construct_urd(v, ClassPair::from_index(v, x), provider) {
            Ok(c) => c,
            Err(e) => return outcome(false, format!("could not build URD({v}) with x={x}: {e}")),
        };
        let mut done = 0;
        while done < 100 {
            let Some(m) = mutate(&c, &mut rng) else { continue };
            done += 1;
            tried += 1;
            let ours = verify(&m).passed();
            if ours {
                false_accepts.push(format!("v={v} x={x}"));
            }
            if ours != oracle_accepts(&m) {
                oracle_disagreements += 1;
            }
        }
    }
    let mut out = outcome(
        false_accepts.is_empty() && oracle_disagreements == 0,
        format!("{tried} mutations of 20 designs, {} false accepts, {oracle_disagreements} disagreements with the oracle", false_accepts.len()),
    );
    out.notes = false_accepts;
    out
}

fn ingredient_properties(provider: &mut Provider) -> Outcome {
    let mut failures = Vec::new();
    for n in (1..=25).step_by(2) {
        let c = near_one_factorization(n);
        let one_missing = c.classes.iter().all(|k| k.coverage.missing().len() == 1);
        if !verify(&c).passed() || !oracle_accepts(&c) || !one_missing || c.classes.len() != n as usize {
            failures.push(format!("near-one-factorization of K_{n}"));
        }
    }
    for n in [4, 8, 12, 16] {
        for lambda in [1, 2] {
            let c = c4_factorization_bipartite(n, lambda);
            if !verify(&c).passed() || !oracle_accepts(&c) || c.profile() != cp(lambda * n / 2, 0) {
                failures.push(format!("bipartite 4-cycle factorization n={n} index {lambda}"));
            }
        }
    }
    let mut rgdds = Vec::new();
    for (g, u) in [(4, 4), (4, 7), (4, 10), (8, 4), (12, 4)] {
        match provider.provide(&IngredientKey::rgdd4(g, u)) {
            Ok(c) if c.classes.len() as u32 == g * (u - 1) / 3 && oracle_accepts(&c) => rgdds.push(format!("{g}^{u}")),
            Ok(c) => failures.push(format!("4-RGDD {g}^{u} has {} classes", c.classes.len())),
            Err(e) => failures.push(e.to_string()),
        }
    }
    let mut out = outcome(
        failures.is_empty(),
        format!("near-one-factorizations n <= 25, bipartite n in 4,8,12,16, 4-RGDDs {}", rgdds.join(" ")),
    );
    out.notes = failures;
    out
}

fn composition_arithmetic() -> Outcome {
    let both = pair_set([(3, 0), (0, 4)]);
    let mut failures = Vec::new();
    for v in [24, 48] {
        let rhs = sum_sets(&spectrum_set(12).to_set(), &multiple((v - 12) / 3, &both));
        if rhs != spectrum_set(v).to_set() {
            failures.push(format!("I({v}) != I(12) + {}*{{(3,0),(0,4)}}", (v - 12) / 3));
        }
    }
    let rhs = sum_sets(&pair_set([(7, 0), (4, 4), (1, 8)]), &multiple(3, &pair_set([(12, 0), (6, 8), (0, 16)])));
    if rhs != spectrum_set(44).to_set() {
        failures.push("I(44) != {(7,0),(4,4),(1,8)} + 3*{(12,0),(6,8),(0,16)}".into());
    }
    let mut out = outcome(failures.is_empty(), "I(24), I(48) and I(44) identities hold as set equalities");
    out.notes = failures;
    out
}

fn format_round_trip(provider: &mut Provider) -> Outcome {
    let dir = std::env::temp_dir().join(format!("urd-acceptance-{}", std::process::id()));
    if let Err(e) = std::fs::create_dir_all(&dir) {
        return outcome(false, e.to_string());
    }
    let mut failures = Vec::new();
    let mut files = 0;
    for (d, _) in catalog::designators() {
        let c = match catalog::lookup(&d, provider) {
            Ok(c) => c,
            Err(e) => {
                failures.push(format!("{d}: {e}"));
                continue;
            }
        };
        let path = dir.join(format!("entry{files}.json"));
        files += 1;
        let written = format::save(&path, &c).and_then(|_| std::fs::read(&path));
        let bytes = match written {
            Ok(b) => b,
            Err(e) => {
                failures.push(format!("{d}: {e}"));
                continue;
            }
        };
        let reread = match format::load(&path) {
            Ok(r) => r,
            Err(e) => {
                failures.push(format!("{d}: {e}"));
                continue;
            }
        };
        let again = format!("{}\n", format::encode_canonical(&reread));
        if again.as_bytes() != bytes.as_slice() || reread != c.canonical() || !verify(&reread).passed() {
            failures.push(format!("{d}: re-serialization differs"));
        }
    }
    let _ = std::fs::remove_dir_all(&dir);
    let mut out = outcome(failures.is_empty(), format!("{files} catalog files re-serialize byte-identically"));
    out.notes = failures;
    out
}

fn main() {
    let mut provider = Provider::new();
    let criteria: Vec<(&str, Box<dyn FnMut(&mut Provider) -> Outcome>)> = vec![
        ("catalog reproduction", Box::new(|_| catalog_reproduction())),
        ("partial resolutions on 20 points agree", Box::new(|_| partial_consistency())),
        ("construction at desk scale", Box::new(desk_scale_construction)),
        ("order 36", Box::new(order_36)),
        ("necessary condition gate", Box::new(necessary_condition)),
        ("mutation suite", Box::new(mutation_suite)),
        ("ingredient properties", Box::new(ingredient_properties)),
        ("composition arithmetic", Box::new(|_| composition_arithmetic())),
        ("format round trip", Box::new(format_round_trip)),
    ];
    let mut failed = 0;
    for (i, (name, mut run)) in criteria.into_iter().enumerate() {
        let o = run(&mut provider);
        println!("criterion {} {name}: {} ({})", i + 1, if o.pass { "PASS" } else { "FAIL" }, o.summary);
        for note in &o.notes {
            println!("    {note}");
        }
        if !o.pass {
            failed += 1;
        }
    }
    if failed > 0 {
        println!("{failed} criteria failed");
        std::process::exit(1);
    }
}
