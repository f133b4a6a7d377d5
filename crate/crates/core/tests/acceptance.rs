use std::process::ExitCode;
use std::time::{Duration, Instant};

use ixgroup::cocycle::{
    check_admissible_cocycle, check_coherence, check_cocycle_identity, check_normalized,
};
use ixgroup::dynamics::{ca_apply, ca_preimages, all_progressive_dictionaries};
use ixgroup::groupoid::{
    check_groupoid_axioms, check_poly_groupoid, check_preimage_intersection, class_product_bijection,
    sample_chains,
};
use ixgroup::lattice::mini_square_from_pair;
use ixgroup::operators::check_interaction_axioms;
use ixgroup::space::sample_points;
use ixgroup::suites::{
    check_circle_roots, check_relation_pair, convolution_checks, dictionary_action, example_dictionary,
    ledrappier_cocycle, run_suite, search_dictionaries, shift_cocycle, Suite,
};
use ixgroup::{Action, Cocycle, Endo, LatticeElement, Report, Result, Sampling};

struct Outcome {
    passed: bool,
    detail: String,
}

fn all_pass(reports: &[Report]) -> Outcome {
    match reports.iter().find(|r| !r.passed()) {
        None => Outcome { passed: true, detail: format!("{} checks", reports.len()) },
        Some(r) => Outcome { passed: false, detail: r.to_string() },
    }
}

fn fails_with_witness(r: &Report) -> bool {
    !r.passed() && !r.witnesses.is_empty()
}

fn c1() -> Result<Outcome> {
    let t = Endo::automaton(example_dictionary())?;
    let r = check_relation_pair(&Endo::Shift, &t, &"0|1".parse()?, &"|0".parse()?)?;
    let passed = r.passed() && r.witnesses[0].contains("y=|1") && r.witnesses[0].contains("|0, 1|0");
    Ok(Outcome { passed, detail: r.witnesses.join("; ") })
}

fn c2() -> Result<Outcome> {
    let rows = search_dictionaries(3, 4)?;
    let d = example_dictionary().to_string();
    let ex = rows.iter().find(|r| r.dictionary == d);
    let passed = rows.len() == 16
        && ex.is_some_and(|r| !r.relations_commute && !r.star_commuting && r.star_witness.is_some());
    Ok(Outcome {
        passed,
        detail: format!("{} dictionaries; {d}: {:?}", rows.len(), ex.and_then(|r| r.star_witness.clone())),
    })
}

fn c3() -> Result<Outcome> {
    let points = sample_points(3);
    let targets: Vec<_> = points.iter().step_by(4).take(20).map(|p| p.as_word()).collect::<Result<_>>()?;
    let dicts = all_progressive_dictionaries(3)?;
    let mut checked = 0;
    for d in &dicts {
        for y in &targets {
            let pre = ca_preimages(d, y)?;
            let distinct = pre.iter().collect::<std::collections::BTreeSet<_>>().len();
            if pre.len() != 4 || distinct != 4 || pre.iter().any(|x| &ca_apply(d, x) != *y) {
                return Ok(Outcome { passed: false, detail: format!("{d} at {y}: {} preimages", pre.len()) });
            }
            checked += 1;
        }
    }
    Ok(Outcome { passed: targets.len() == 20, detail: format!("{checked} (dictionary, target) pairs") })
}

fn c4() -> Result<Outcome> {
    let cfg = Sampling::new(4, 3);
    let mut reports = Vec::new();
    for omega in [shift_cocycle()?, ledrappier_cocycle()?] {
        reports.push(check_normalized(&omega, cfg)?);
        reports.push(check_cocycle_identity(&omega, cfg)?);
        reports.extend(check_admissible_cocycle(&omega, cfg)?);
        reports.push(check_coherence(&omega, cfg)?);
    }
    Ok(all_pass(&reports))
}

fn c5() -> Result<Outcome> {
    let cfg = Sampling::new(4, 3);
    let norm = check_normalized(&Cocycle::perturbed_shift(), cfg)?;
    let candidate = Cocycle::product_candidate(dictionary_action(&example_dictionary())?)?;
    let coh = check_coherence(&candidate, cfg)?;
    Ok(Outcome {
        passed: fails_with_witness(&norm) && fails_with_witness(&coh),
        detail: format!("{} | {}", norm.witnesses.join(""), coh.witnesses.join("")),
    })
}

fn c6() -> Result<Outcome> {
    let cfg = Sampling::new(4, 2);
    let mut reports = check_interaction_axioms(&shift_cocycle()?, cfg)?;
    reports.extend(check_interaction_axioms(&ledrappier_cocycle()?, cfg)?);
    Ok(all_pass(&reports))
}

fn c7() -> Result<Outcome> {
    let v = LatticeElement::vector;
    let mut reports = Vec::new();
    convolution_checks(
        &mut reports,
        &ledrappier_cocycle()?,
        Sampling::new(3, 2),
        &[(v(&[1, 0]), v(&[0, 1])), (v(&[1, 1]), v(&[1, 0]))],
        &[v(&[1, 0]), v(&[0, 1]), v(&[1, 1])],
    )?;
    let reports: Vec<Report> = reports.into_iter().map(|(_, r)| r).collect();
    Ok(all_pass(&reports))
}

fn c8() -> Result<Outcome> {
    let run = run_suite(Suite::Lattice, Sampling::default(), None)?;
    let reports: Vec<Report> = run.checks.into_iter().map(|c| c.report).collect();
    Ok(all_pass(&reports))
}

fn c9() -> Result<Outcome> {
    let action = Action::ledrappier();
    let cfg = Sampling::new(3, 1);
    let chains = sample_chains(&action, cfg)?.len();
    let mut reports = vec![check_groupoid_axioms(&action, cfg)?, check_preimage_intersection(&action, cfg)?];
    reports.extend(check_poly_groupoid(&action, cfg)?);
    let v = LatticeElement::vector;
    let sq = mini_square_from_pair(&v(&[1, 0]), &v(&[0, 1]))?;
    let cp = class_product_bijection(&action, &sq, &"|0".parse()?)?;
    let sizes = cp.bijective && (cp.class_size, cp.left, cp.right) == (4, 2, 2);
    let out = all_pass(&reports);
    Ok(Outcome {
        passed: out.passed && chains >= 100 && sizes,
        detail: format!("{}; {chains} chains; class {} = {} x {}", out.detail, cp.class_size, cp.left, cp.right),
    })
}

fn c10() -> Result<Outcome> {
    let omega = Cocycle::reciprocal();
    let cfg = Sampling::new(4, 6);
    let samples = omega.action().samples(cfg.depth).len();
    let reports = vec![
        check_normalized(&omega, cfg)?,
        check_cocycle_identity(&omega, cfg)?,
        check_coherence(&omega, cfg)?,
        check_circle_roots(cfg)?,
    ];
    let mut out = all_pass(&reports);
    out.passed &= samples == 50;
    out.detail = format!("{}; {samples} rationals", out.detail);
    Ok(out)
}

fn main() -> ExitCode {
    let criteria: [(fn() -> Result<Outcome>, Option<u64>); 10] = [
        (c1, Some(1)),
        (c2, Some(10)),
        (c3, None),
        (c4, Some(60)),
        (c5, None),
        (c6, None),
        (c7, Some(300)),
        (c8, None),
        (c9, None),
        (c10, None),
    ];
    let mut failures = 0;
    for (i, (run, limit)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let in_time = limit.is_none_or(|s| elapsed < Duration::from_secs(s));
        let (passed, detail) = match outcome {
            Ok(o) => (o.passed && in_time, o.detail),
            Err(e) => (false, format!("error: {e}")),
        };
        if !passed {
            failures += 1;
        }
        let limit = limit.map(|s| format!(", limit {s} s")).unwrap_or_default();
        println!(
            "criterion {}: {} ({detail}; {:.2} s{limit})",
            i + 1,
            if passed { "PASS" } else { "FAIL" },
            elapsed.as_secs_f64()
        );
    }
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
