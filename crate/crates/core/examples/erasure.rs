//! Projection erasure, its interaction with substitution, and symmetry
//! witnesses maintained across expansion steps.

use lambda_sp::{erase, erase_subst_check, parse, step_erase, trivial_witness, Axiom, Step, VarName};

fn main() {
    for s in ["<a, b>", "p2 <\\x. <x, y>, z>", "\\x. p1 (x <y, z>)"] {
        println!("|{s}| = {}", erase(&parse(s).unwrap()));
    }
    let m = parse("<x, y>").unwrap();
    let n = parse("p1 z").unwrap();
    println!("erase commutes with [x := p1 z] on <x, y>: {}", erase_subst_check(&m, &VarName::new("x"), &n));

    // Witnesses: expand a pure term into a pair, then eta-expand inside the
    // right component; the pair's entry records the erased conversion.
    let t = parse("\\x. f x").unwrap();
    let w = trivial_witness(&t).unwrap();
    let (c1, w) = step_erase(&t, &w, &Step::forward(vec![], Axiom::SpExp), true).unwrap();
    let t = w.subject.clone();
    let (c2, w) = step_erase(&t, &w, &Step::forward(vec![1, 0], Axiom::EtaExp).with_fresh("v"), true).unwrap();
    w.verify(true).unwrap();
    println!("after two expansions: {}", w.subject);
    println!("erased certificates have {} and {} steps", c1.len(), c2.len());
    for (p, c) in &w.entries {
        println!("  pair at {p}: {} steps from {}", c.len(), c.start);
    }
}
