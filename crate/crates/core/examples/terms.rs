//! Parsing, printing, alpha-equivalence and capture-avoiding substitution.

use lambda_sp::{alpha_eq, free_vars, parse, print, substitute, subterm_at, Position, VarName};

fn main() {
    let m = parse("\\x. <p1 x, y (\\z. z x)>").unwrap();
    println!("parsed:        {}", print(&m));
    println!("free vars:     {:?}", free_vars(&m));
    println!("size:          {}", m.size());

    let renamed = parse("\\w. <p1 w, y (\\q. q w)>").unwrap();
    println!("alpha-equal to `{}`: {}", print(&renamed), alpha_eq(&m, &renamed));

    // Substituting a term that mentions `x` under the binder `x` renames it.
    let y = VarName::new("y");
    let s = substitute(&m, &y, &parse("x").unwrap());
    println!("m[y := x]:     {}", print(&s));

    let sub = subterm_at(&m, &Position(vec![0, 1])).unwrap();
    println!("at [0,1]:      {}", print(&sub));

    match parse("\\x. (x") {
        Err(e) => println!("parse error:   {e}"),
        Ok(_) => unreachable!(),
    }
}
