//! With pairing oriented as contraction the system is not confluent: one
//! term has two distinct normal forms.

use lambda_sp::rewrite::{reachable, redexes};
use lambda_sp::{parse, Relation};

fn main() {
    let m = parse("<p1 (\\x. x), p2 (\\x. x)>").unwrap();
    let rel = Relation::contracting(true);
    let all = reachable(&m, &rel, 12, 64);
    let normal: Vec<_> = all.iter().filter(|t| redexes(t, &rel).is_empty()).collect();
    println!("{} terms reachable from {m}", all.len());
    for t in &normal {
        println!("  normal form: {t}");
    }
    let (a, b) = (normal[0], normal[1]);
    let ra = reachable(a, &rel, 12, 64);
    let rb = reachable(b, &rel, 12, 64);
    println!("common reducts within fuel 12: {}", ra.intersection(&rb).count());

    // Oriented as expansion, the same term is fine: the two forms meet.
    let fp = Relation::fp(true);
    println!("under fp, {m} has {} one-step successors", lambda_sp::rewrite::successors(&m, &fp).len());
}
