//! Seeded random terms, derivations and certificates.
//!
//! Terms are generated against a size budget with constructor weights
//! Var 3, App 3, Abs 2, Pair 2, Proj 2 (pure terms: Var 3, App 3, Abs 2).
//! A variable under a binder is bound with probability 0.5, otherwise it is
//! drawn from a small pool of free names.

use rand::seq::IndexedRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::cert::{invert, ConvCert};
use crate::parallel::{ParE, ParR};
use crate::rewrite::{apply_step_in, redexes, Axiom, Relation, Step};
use crate::term::{shift, Node, Position, Side, Term, VarName};

pub type GenRng = ChaCha8Rng;

/// The generator for case `index` of a run seeded with `seed`.
pub fn case_rng(seed: u64, index: u64) -> GenRng {
    let mixed = seed
        .wrapping_mul(0x9E37_79B9_7F4A_7C15)
        .rotate_left(17)
        ^ index.wrapping_mul(0xD1B5_4A32_D192_ED03);
    ChaCha8Rng::seed_from_u64(mixed)
}

pub const FREE_NAMES: [&str; 4] = ["a", "b", "f", "g"];
const BINDER_NAMES: [&str; 4] = ["x", "y", "z", "w"];
pub const BOUND_REUSE: f64 = 0.5;

/// A random term of size at most `size`. The budget is drawn from
/// `[size / 2, size]`; below the root a variable may end a branch early.
pub fn random_term<R: Rng>(rng: &mut R, size: usize, pure: bool) -> Term {
    let size = size.max(1);
    let n = rng.random_range(size.div_ceil(2)..=size);
    loop {
        let t = term_of_size(rng, n, pure, 0);
        if n == 1 || t.size() > 1 {
            return t;
        }
    }
}

fn variable<R: Rng>(rng: &mut R, depth: u32) -> Term {
    if depth > 0 && rng.random_bool(BOUND_REUSE) {
        Term::bound(rng.random_range(0..depth))
    } else {
        Term::var(*FREE_NAMES.choose(rng).unwrap())
    }
}

fn term_of_size<R: Rng>(rng: &mut R, n: usize, pure: bool, depth: u32) -> Term {
    if n <= 1 {
        return variable(rng, depth);
    }
    // Var, App, Abs, Pair, Proj
    let weights: &[u32] = if pure { &[3, 3, 2] } else { &[3, 3, 2, 2, 2] };
    let total: u32 = weights.iter().sum();
    let mut pick = rng.random_range(0..total);
    let mut choice = 0;
    for (i, w) in weights.iter().enumerate() {
        if pick < *w {
            choice = i;
            break;
        }
        pick -= w;
    }
    let split = |rng: &mut R| {
        let l = rng.random_range(1..=n - 2);
        (l, n - 1 - l)
    };
    match choice {
        0 => variable(rng, depth),
        1 if n >= 3 => {
            let (l, r) = split(rng);
            Term::app(
                term_of_size(rng, l, pure, depth),
                term_of_size(rng, r, pure, depth),
            )
        }
        3 if n >= 3 => {
            let (l, r) = split(rng);
            Term::pair(
                term_of_size(rng, l, pure, depth),
                term_of_size(rng, r, pure, depth),
            )
        }
        4 => Term::proj(
            if rng.random_bool(0.5) { Side::Fst } else { Side::Snd },
            term_of_size(rng, n - 1, pure, depth),
        ),
        _ => {
            let hint = VarName::new(BINDER_NAMES[depth as usize % BINDER_NAMES.len()]);
            Term::abs_raw(hint, term_of_size(rng, n - 1, pure, depth + 1))
        }
    }
}

/// A random parallel reduction from `m`: each redex is contracted with
/// probability one half.
pub fn random_par_r<R: Rng>(rng: &mut R, m: &Term) -> ParR {
    let fire = |rng: &mut R| rng.random_bool(0.5);
    match m.node() {
        Node::App(f, a) => match f.node() {
            Node::Abs(h, b) if fire(rng) => {
                ParR::beta_raw(h.clone(), random_par_r(rng, b), random_par_r(rng, a))
            }
            Node::Pair(l, r) if fire(rng) => ParR::delta_pi(
                random_par_r(rng, l),
                random_par_r(rng, r),
                random_par_r(rng, a),
            ),
            _ => ParR::app(random_par_r(rng, f), random_par_r(rng, a)),
        },
        Node::Proj(side, u) => match u.node() {
            Node::Pair(l, r) if fire(rng) => {
                let (kept, other) = if *side == Side::Fst { (l, r) } else { (r, l) };
                ParR::pi(*side, random_par_r(rng, kept), other.clone())
            }
            Node::Abs(h, b) if fire(rng) => ParR::pi_lam_raw(*side, h.clone(), random_par_r(rng, b)),
            _ => ParR::proj(*side, random_par_r(rng, u)),
        },
        Node::Abs(h, b) => ParR::abs_raw(h.clone(), random_par_r(rng, b)),
        Node::Pair(l, r) => ParR::pair(random_par_r(rng, l), random_par_r(rng, r)),
        Node::Free(_) | Node::Bound(_) => ParR::refl(m.clone()),
    }
}

/// A random parallel expansion from `m`: each node is eta- or
/// pairing-expanded with probability 0.15 each (no eta when not
/// extensional).
pub fn random_par_e<R: Rng>(rng: &mut R, m: &Term, extensional: bool) -> ParE {
    let inner = match m.node() {
        Node::Abs(h, b) => ParE::abs_raw(h.clone(), random_par_e(rng, b, extensional)),
        Node::App(f, a) => ParE::app(random_par_e(rng, f, extensional), random_par_e(rng, a, extensional)),
        Node::Pair(l, r) => ParE::pair(random_par_e(rng, l, extensional), random_par_e(rng, r, extensional)),
        Node::Proj(s, u) => ParE::proj(*s, random_par_e(rng, u, extensional)),
        Node::Free(_) | Node::Bound(_) => ParE::refl(m.clone()),
    };
    let roll: f64 = rng.random();
    if extensional && roll < 0.15 {
        ParE::eta("w", inner)
    } else if roll < 0.30 {
        ParE::sp(inner)
    } else {
        inner
    }
}

/// A uniformly chosen forward step of `r` on `m`, if any.
pub fn random_step<R: Rng>(rng: &mut R, m: &Term, r: &Relation) -> Option<Step> {
    let all = redexes(m, r);
    let (p, a) = all.choose(rng)?;
    let mut s = Step::forward(p.clone(), *a);
    if matches!(a, Axiom::EtaExp) {
        s = s.with_fresh("v");
    }
    Some(s)
}

/// Candidate pre-images of the subterm `s` for backward steps: identity and
/// vacuous beta redexes, projections of junk pairs, and the deterministic
/// inverses of the remaining axioms.
fn preimages<R: Rng>(rng: &mut R, s: &Term, rel: &Relation) -> Vec<(Term, Axiom)> {
    let junk = random_term(rng, 2, rel.requires_pure());
    let mut out = vec![
        (
            Term::app(Term::abs_raw(VarName::new("x"), Term::bound(0)), s.clone()),
            Axiom::Beta,
        ),
        (
            Term::app(Term::abs_raw(VarName::new("x"), shift(s, 1, 0)), junk.clone()),
            Axiom::Beta,
        ),
    ];
    if rel.contains(Axiom::Pi1) {
        out.push((Term::proj(Side::Fst, Term::pair(s.clone(), junk.clone())), Axiom::Pi1));
        out.push((Term::proj(Side::Snd, Term::pair(junk, s.clone())), Axiom::Pi2));
    }
    match s.node() {
        Node::Abs(h, b) => {
            if let Node::App(f, x) = b.node() {
                if x == &Term::bound(0) && !f.has_loose(0) && rel.contains(Axiom::EtaExp) {
                    out.push((crate::term::subst_bound(f, 0, &Term::var("_")), Axiom::EtaExp));
                }
            }
            if let Node::Proj(side, u) = b.node() {
                if rel.contains(Axiom::Pi1Lam) {
                    out.push((
                        Term::proj(*side, Term::abs_raw(h.clone(), u.clone())),
                        Axiom::pi_lam(*side),
                    ));
                }
            }
        }
        Node::Pair(l, r) => {
            if let (Node::Proj(Side::Fst, a), Node::Proj(Side::Snd, b)) = (l.node(), r.node()) {
                if a == b && rel.contains(Axiom::SpExp) {
                    out.push((a.clone(), Axiom::SpExp));
                }
            }
            if let (Node::App(a, c), Node::App(b, c2)) = (l.node(), r.node()) {
                if c == c2 && rel.contains(Axiom::DeltaPi) {
                    out.push((Term::app(Term::pair(a.clone(), b.clone()), c.clone()), Axiom::DeltaPi));
                }
            }
        }
        _ => {}
    }
    out
}

/// A random backward step of `rel` on `m`, as a step from `m`.
fn random_backward<R: Rng>(rng: &mut R, m: &Term, rel: &Relation, max_size: usize) -> Option<Step> {
    let positions = m.positions();
    for _ in 0..8 {
        let p: &Position = positions.choose(rng)?;
        let sub = m.at(&p.0)?;
        let cands = preimages(rng, sub, rel);
        let (pre, axiom) = cands.choose(rng)?;
        let whole = m.replace(&p.0, pre.clone())?;
        if whole.size() > max_size {
            continue;
        }
        let fwd = Step::forward(p.clone(), *axiom);
        match apply_step_in(&whole, &fwd, rel) {
            Ok(t) if &t == m => {}
            _ => continue,
        }
        let back = invert(&ConvCert::new(whole, vec![fwd])).ok()?;
        return back.steps.into_iter().next();
    }
    None
}

/// Expansions usable forwards in a walk: `EtaExp`/`SpExp` in the expansion
/// system, or the backward `Eta`/`Sp` of the surjective-pairing theory.
fn random_expansion<R: Rng>(rng: &mut R, m: &Term, rel: &Relation) -> Option<Step> {
    let positions = m.positions();
    let p = positions.choose(rng)?.clone();
    let eta_ok = rel.extensional;
    let use_eta = eta_ok && rng.random_bool(0.5);
    let step = match (rel.contains(Axiom::EtaExp), use_eta) {
        (true, true) => Step::forward(p, Axiom::EtaExp).with_fresh("v"),
        (true, false) => Step::forward(p, Axiom::SpExp),
        (false, true) => Step::backward(p, Axiom::Eta).with_fresh("v"),
        (false, false) => Step::backward(p, Axiom::Sp),
    };
    Some(step)
}

/// A random conversion walk of length at most `len` under `rel`, mixing
/// forward steps (45%), expansions (30%) and backward steps (25%), starting
/// from `start` and keeping every term within `max_size`. Impure terms shift
/// a quarter of the weight to forward steps.
pub fn random_walk<R: Rng>(
    rng: &mut R,
    start: &Term,
    rel: &Relation,
    len: usize,
    max_size: usize,
) -> ConvCert {
    let mut cur = start.clone();
    let mut steps = Vec::new();
    let target = rng.random_range(len.min(1)..=len);
    let mut attempts = 0;
    while steps.len() < target && attempts < 8 * len + 8 {
        attempts += 1;
        // Once a pair or projection appears, lean towards contracting it.
        let bias = if crate::term::is_pure(&cur) { 0.0 } else { 0.25 };
        let roll: f64 = rng.random::<f64>() - bias;
        let step = if roll < 0.45 {
            random_step(rng, &cur, rel)
        } else if roll < 0.75 {
            random_expansion(rng, &cur, rel)
        } else {
            random_backward(rng, &cur, rel, max_size)
        };
        let Some(s) = step else { continue };
        match apply_step_in(&cur, &s, rel) {
            Ok(next) if next.size() <= max_size => {
                cur = next;
                steps.push(s);
            }
            _ => {}
        }
    }
    ConvCert::new(start.clone(), steps)
}

/// A random zig-zag of the expansion system from a random term.
pub fn random_fp_zigzag<R: Rng>(rng: &mut R, size: usize, len: usize, extensional: bool) -> ConvCert {
    let start = random_term(rng, size / 2, false);
    random_walk(rng, &start, &Relation::fp(extensional), len, size.max(start.size()))
}

/// A random conversion of the surjective-pairing theory from a random pure
/// term, cut at its last pure term.
pub fn random_besp_walk<R: Rng>(rng: &mut R, size: usize, len: usize, extensional: bool) -> ConvCert {
    let start = random_term(rng, size / 2 + 1, true);
    let walk = random_walk(rng, &start, &Relation::besp(extensional), len, size.max(start.size()));
    let terms = walk.replay().expect("generated walk replays");
    let last_pure = terms
        .iter()
        .rposition(crate::term::is_pure)
        .expect("the start is pure");
    ConvCert::new(start, walk.steps[..last_pure].to_vec())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::check_cert;
    use crate::term::is_pure;

    #[test]
    fn deterministic_and_bounded() {
        for i in 0..200 {
            let a = random_term(&mut case_rng(7, i), 10, false);
            let b = random_term(&mut case_rng(7, i), 10, false);
            assert_eq!(a, b);
            assert!(a.size() <= 10);
            assert!(a.is_closed_locally());
            assert!(is_pure(&random_term(&mut case_rng(7, i), 10, true)));
        }
    }

    #[test]
    fn derivations_are_valid() {
        for i in 0..200 {
            let rng = &mut case_rng(1, i);
            let m = random_term(rng, 10, false);
            let d = random_par_r(rng, &m);
            d.validate().unwrap();
            assert_eq!(d.source(), &m);
            let e = random_par_e(rng, &m, true);
            e.validate().unwrap();
            assert_eq!(e.source(), &m);
        }
    }

    #[test]
    fn walks_check() {
        for i in 0..200 {
            let rng = &mut case_rng(2, i);
            let c = random_fp_zigzag(rng, 8, 6, true);
            check_cert(&c, &Relation::fp(true)).unwrap();
            let c = random_besp_walk(rng, 10, 6, i % 2 == 0);
            let end = check_cert(&c, &Relation::besp(i % 2 == 0)).unwrap();
            assert!(is_pure(&end));
        }
    }

    #[test]
    fn walks_have_backward_steps() {
        let mut backward = 0;
        for i in 0..100 {
            let c = random_fp_zigzag(&mut case_rng(3, i), 8, 6, true);
            backward += c.steps.iter().filter(|s| s.dir == crate::rewrite::Direction::Backward).count();
        }
        assert!(backward > 20, "only {backward} backward steps");
    }
}
