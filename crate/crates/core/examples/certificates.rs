//! Building, checking, inverting and serializing conversion certificates.

use lambda_sp::json::{cert_from_json, cert_to_json};
use lambda_sp::{check_cert, concat, invert, parse, print, Axiom, ConvCert, Relation, Step};

fn main() {
    let start = parse("(\\x. x) (p1 <y, z>)").unwrap();
    let c = ConvCert::new(
        start,
        vec![
            Step::forward(vec![1], Axiom::Pi1),
            Step::forward(vec![], Axiom::Beta),
        ],
    );
    let rel = Relation::besp(true);
    let end = check_cert(&c, &rel).unwrap();
    println!("checks, ends at {}", print(&end));

    // The converse needs the source of the backward beta step; `invert`
    // records it.
    let back = invert(&c).unwrap();
    for s in &back.steps {
        println!("  {s}");
    }
    let round = concat(&c, &back).unwrap();
    println!("round trip has {} steps and ends at {}", round.len(), print(&check_cert(&round, &rel).unwrap()));

    let text = cert_to_json(&back, &rel);
    println!("{text}");
    let (_, parsed) = cert_from_json(&text).unwrap();
    assert_eq!(parsed, back);

    // A tampered step is reported with its index.
    let mut bad = c.clone();
    bad.steps[1].axiom = Axiom::Eta;
    println!("tampered: {}", check_cert(&bad, &rel).unwrap_err());
}
