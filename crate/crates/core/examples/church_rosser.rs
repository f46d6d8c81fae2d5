//! From a zig-zag conversion of the expansion system to a valley.

use lambda_sp::gen::{case_rng, random_fp_zigzag};
use lambda_sp::json::valley_to_json;
use lambda_sp::{church_rosser, invert, parse, Axiom, ConvCert, Step};

fn main() {
    // a  <-beta  (\x. x) a  ->eta_exp  \y. (\x. x) a y
    let c = ConvCert::new(
        parse("a").unwrap(),
        vec![
            Step::backward(vec![], Axiom::Beta).with_source(parse("(\\x. x) a").unwrap()),
            Step::forward(vec![], Axiom::EtaExp).with_fresh("y"),
        ],
    );
    let v = church_rosser(&c, true).unwrap();
    v.verify().unwrap();
    println!("{}", valley_to_json(&v));

    // The converse conversion gives the mirrored valley.
    let w = church_rosser(&invert(&c).unwrap(), true).unwrap();
    assert_eq!(w.swap(), v);

    for i in 0..5 {
        let z = random_fp_zigzag(&mut case_rng(7, i), 8, 6, true);
        let v = church_rosser(&z, true).unwrap();
        v.verify().unwrap();
        println!("zig-zag of {} steps from {} -> valley {} + {} steps, meet {}", z.len(), z.start, v.left.len(), v.right.len(), v.meet);
    }
}
