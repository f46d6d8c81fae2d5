//! The four critical-pair families between expansion and reduction, joined
//! by the confluence procedure.

use lambda_sp::{join_fp, parse, Axiom, ConvCert, Step};

fn peak(term: &str, expand: Axiom, reduce: Axiom) {
    let m = parse(term).unwrap();
    let e = ConvCert::new(m.clone(), vec![Step::forward(vec![0], expand)]);
    let r = ConvCert::new(m, vec![Step::forward(vec![], reduce)]);
    let v = join_fp(&e, &r, true).unwrap();
    v.verify().unwrap();
    println!("{term}: {expand} below vs {reduce} at the root");
    println!("  meet  {}", v.meet);
    let show = |c: &ConvCert| c.steps.iter().map(|s| s.to_string()).collect::<Vec<_>>().join(", ");
    println!("  left  [{}]", show(&v.left));
    println!("  right [{}]", show(&v.right));
}

fn main() {
    peak("(\\x. m) n", Axiom::EtaExp, Axiom::Beta);
    peak("p1 <a, b>", Axiom::SpExp, Axiom::Pi1);
    peak("p2 <a, b>", Axiom::EtaExp, Axiom::Pi2);
    peak("(\\x. m) n", Axiom::SpExp, Axiom::Beta);
}
