//! Parallel reduction and expansion, and their diamond properties.

use lambda_sp::gen::{case_rng, random_par_r, random_term};
use lambda_sp::parallel::{flatten_r, par_r_of_step};
use lambda_sp::{par_e_diamond, par_r_diamond, parse, print, Axiom, ParE, ParR, Step};

fn main() {
    let m = parse("(\\x. x x) ((\\y. y) z)").unwrap();
    let outer = par_r_of_step(&m, &Step::forward(vec![], Axiom::Beta)).unwrap();
    let inner = par_r_of_step(&m, &Step::forward(vec![1], Axiom::Beta)).unwrap();
    let (p, e1, e2) = par_r_diamond(&outer, &inner);
    println!("{} => {}  and  {} => {}", print(&m), print(outer.target()), print(&m), print(inner.target()));
    println!("joined at {} (heights {} and {})", print(&p), e1.height(), e2.height());
    println!("left closing derivation flattens to {} steps", flatten_r(&e1).len());

    // Expansions: eta on one side, pairing on the other.
    let n = parse("f").unwrap();
    let (q, _, _) = par_e_diamond(&ParE::eta("v", ParE::refl(n.clone())), &ParE::sp(ParE::refl(n)));
    println!("expansions of f join at {}", print(&q));

    let mut ok = 0;
    for i in 0..200 {
        let rng = &mut case_rng(42, i);
        let t = random_term(rng, 10, false);
        let (d1, d2): (ParR, ParR) = (random_par_r(rng, &t), random_par_r(rng, &t));
        let (p, e1, e2) = par_r_diamond(&d1, &d2);
        if e1.validate().is_ok() && e2.validate().is_ok() && e1.target() == &p && e2.target() == &p {
            ok += 1;
        }
    }
    println!("{ok}/200 random reduction diamonds closed");
}
