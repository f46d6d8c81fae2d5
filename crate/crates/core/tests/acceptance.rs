//! One PASS/FAIL line per acceptance criterion. Exits non-zero if any fails.

use std::time::Duration;

use lambda_sp::rewrite::{reachable, redexes};
use lambda_sp::suites::{run_suite, Suite, SuiteConfig, SuiteReport};
use lambda_sp::{check_cert, join_fp, parse, Axiom, ConvCert, Direction, Relation, Step};

const LIMIT: Duration = Duration::from_secs(60);

struct Outcome {
    ok: bool,
    detail: String,
}

fn outcome(ok: bool, detail: impl Into<String>) -> Outcome {
    Outcome { ok, detail: detail.into() }
}

type Shape = (Vec<usize>, Axiom, Direction);

fn shapes(c: &ConvCert) -> Vec<Shape> {
    c.steps.iter().map(|s| (s.pos.0.clone(), s.axiom, s.dir)).collect()
}

fn fwd(pos: &[usize], a: Axiom) -> Shape {
    (pos.to_vec(), a, Direction::Forward)
}

/// Join the peak `expand at [0]` / `reduce at the root` and compare against
/// the expected valley: left leg, right leg and meet.
fn golden(term: &str, expand: Axiom, reduce: Axiom, left: Vec<Shape>, right: Vec<Shape>, meet: &str) -> Result<(), String> {
    let m = parse(term).unwrap();
    let e = ConvCert::new(m.clone(), vec![Step::forward(vec![0], expand)]);
    let r = ConvCert::new(m, vec![Step::forward(vec![], reduce)]);
    let v = join_fp(&e, &r, true).map_err(|e| e.to_string())?;
    v.verify().map_err(|e| e.to_string())?;
    let fp = Relation::fp(true);
    let replayed = (check_cert(&v.left, &fp), check_cert(&v.right, &fp));
    let want = parse(meet).unwrap();
    if shapes(&v.left) != left || shapes(&v.right) != right || v.meet != want {
        return Err(format!("{term}: got meet {} left {:?} right {:?}", v.meet, shapes(&v.left), shapes(&v.right)));
    }
    if replayed.0.ok() != Some(want.clone()) || replayed.1.ok() != Some(want) {
        return Err(format!("{term}: legs do not replay to the meet"));
    }
    Ok(())
}

fn golden_pairs() -> Outcome {
    let mut errs = Vec::new();
    let mut check = |r: Result<(), String>| {
        if let Err(e) = r {
            errs.push(e);
        }
    };
    check(golden("(\\x. m) n", Axiom::EtaExp, Axiom::Beta, vec![fwd(&[], Axiom::Beta), fwd(&[], Axiom::Beta)], vec![], "m"));
    for (side, a, al, kept) in [("p1", Axiom::Pi1, Axiom::Pi1Lam, "a"), ("p2", Axiom::Pi2, Axiom::Pi2Lam, "b")] {
        let term = format!("{side} <a, b>");
        check(golden(&term, Axiom::SpExp, a, vec![fwd(&[], a), fwd(&[], a)], vec![], kept));
        check(golden(
            &term,
            Axiom::EtaExp,
            a,
            vec![fwd(&[0, 0], Axiom::DeltaPi), fwd(&[], al), fwd(&[0], a)],
            vec![fwd(&[], Axiom::EtaExp)],
            &format!("\\z. {kept} z"),
        ));
    }
    check(golden(
        "(\\x. m) n",
        Axiom::SpExp,
        Axiom::Beta,
        vec![
            fwd(&[0, 0], Axiom::Pi1Lam),
            fwd(&[0, 1], Axiom::Pi2Lam),
            fwd(&[], Axiom::DeltaPi),
            fwd(&[0], Axiom::Beta),
            fwd(&[1], Axiom::Beta),
        ],
        vec![fwd(&[], Axiom::SpExp)],
        "<p1 m, p2 m>",
    ));
    match errs.first() {
        None => outcome(true, "4 families (6 peaks) match step for step"),
        Some(e) => outcome(false, e.clone()),
    }
}

fn suite(s: Suite, count: u64, ext: bool, timings: &mut Vec<(String, Duration)>) -> SuiteReport {
    let report = run_suite(s, 0, count, &SuiteConfig::for_suite(s, ext));
    timings.push((format!("{s}{}", if ext { "" } else { " (non-ext)" }), report.elapsed));
    report
}

fn describe(r: &SuiteReport) -> Outcome {
    let mut detail = format!("{} cases, {} failures", r.cases, r.failures.len());
    for (k, v) in &r.checks {
        detail.push_str(&format!(", {v} {k}"));
    }
    if let Some(f) = r.failures.first() {
        detail.push_str(&format!("; first: case {} {}", f.index, f.message));
    }
    outcome(r.passed(), detail)
}

fn negative_control() -> Outcome {
    let m = parse("<p1 (\\x. x), p2 (\\x. x)>").unwrap();
    let rel = Relation::contracting(true);
    let all = reachable(&m, &rel, 12, 64);
    let normal: Vec<_> = all.iter().filter(|t| redexes(t, &rel).is_empty()).cloned().collect();
    let want = [parse("\\x. x").unwrap(), parse("<\\x. p1 x, \\x. p2 x>").unwrap()];
    let exact = normal.len() == 2 && want.iter().all(|w| normal.contains(w));
    if !exact {
        let shown: Vec<String> = normal.iter().map(|t| t.to_string()).collect();
        return outcome(false, format!("normal forms: {shown:?}"));
    }
    let (a, b) = (reachable(&want[0], &rel, 12, 64), reachable(&want[1], &rel, 12, 64));
    let common = a.intersection(&b).count();
    outcome(common == 0, format!("normal forms {} and {}, {common} common reducts within fuel 12", want[0], want[1]))
}

fn main() {
    let mut timings = Vec::new();
    let mut results: Vec<(u32, &str, Outcome)> = Vec::new();

    results.push((1, "golden critical pairs", golden_pairs()));
    results.push((2, "diamond suite", describe(&suite(Suite::Diamond, 500, true, &mut timings))));
    results.push((3, "commutation suite", describe(&suite(Suite::Commute, 500, true, &mut timings))));
    results.push((4, "church-rosser suite", describe(&suite(Suite::Join, 200, true, &mut timings))));
    results.push((5, "negative control", negative_control()));
    results.push((6, "erasure-substitution", describe(&suite(Suite::EraseSubst, 1000, true, &mut timings))));
    results.push((7, "end-to-end conservativity", describe(&suite(Suite::EndToEnd, 200, true, &mut timings))));

    let non_ext = [(Suite::Diamond, 500), (Suite::Commute, 500), (Suite::Join, 200), (Suite::EndToEnd, 200)];
    let reports: Vec<SuiteReport> = non_ext.iter().map(|&(s, n)| suite(s, n, false, &mut timings)).collect();
    let ok = reports.iter().all(SuiteReport::passed);
    let detail = reports
        .iter()
        .map(|r| format!("{} {}/{}", r.suite, r.cases - r.failures.len() as u64, r.cases))
        .collect::<Vec<_>>()
        .join(", ");
    results.push((8, "non-extensional rerun", outcome(ok, detail)));

    let slowest = timings.iter().max_by_key(|(_, d)| *d).cloned().unwrap();
    let fast = timings.iter().all(|(_, d)| *d < LIMIT);
    results.push((9, "runtime", outcome(fast, format!("slowest: {} in {:.2?}", slowest.0, slowest.1))));

    let mut failed = 0;
    for (n, name, o) in &results {
        if !o.ok {
            failed += 1;
        }
        println!("{} criterion {n}: {name}: {}", if o.ok { "PASS" } else { "FAIL" }, o.detail);
    }
    println!("{} of {} criteria passed", results.len() - failed, results.len());
    if failed > 0 {
        std::process::exit(1);
    }
}
