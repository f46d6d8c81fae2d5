//! Turning a conversion that detours through pairs into a pure beta-eta
//! conversion.

use lambda_sp::{check_cert, parse, transform_conservativity, Axiom, ConvCert, Relation, Step};

fn main() {
    // \f.\a. f a  <-sp  <p1 M, p2 M>  ->sp  M  ->eta  \f. f
    let m = parse("\\f. \\a. f a").unwrap();
    let detour = parse("<p1 (\\f. \\a. f a), p2 (\\f. \\a. f a)>").unwrap();
    let c = ConvCert::new(
        m.clone(),
        vec![
            Step::backward(vec![], Axiom::Sp).with_source(detour),
            Step::forward(vec![], Axiom::Sp),
            Step::forward(vec![0], Axiom::Eta),
        ],
    );
    let n = check_cert(&c, &Relation::besp(true)).unwrap();
    let out = transform_conservativity(&m, &n, &c, true).unwrap();
    println!("input:  {} steps under besp, {m} = {n}", c.len());
    println!("output: {} steps under be", out.len());
    for (s, t) in out.steps.iter().zip(out.replay().unwrap().iter().skip(1)) {
        println!("  {s}  =>  {t}");
    }
    assert_eq!(check_cert(&out, &Relation::be(true)).unwrap(), n);

    // The same pipeline without eta: beta plus pairing down to beta.
    let m = parse("(\\x. x) y").unwrap();
    let c = ConvCert::new(
        m.clone(),
        vec![
            Step::backward(vec![0, 0], Axiom::Pi1).with_source(parse("(\\x. p1 <x, y>) y").unwrap()),
            Step::forward(vec![], Axiom::Beta),
            Step::forward(vec![], Axiom::Pi1),
        ],
    );
    let n = check_cert(&c, &Relation::besp(false)).unwrap();
    let out = transform_conservativity(&m, &n, &c, false).unwrap();
    println!("non-extensional: {m} = {n} in {} beta steps", out.len());
}
