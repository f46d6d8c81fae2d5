//! Projection erasure, symmetry witnesses and the conservativity
//! transformer.
//!
//! A witness stores, for every pair node `<P, Q>` of its subject, a pure
//! certificate from `|P|` to `|Q|`. Pair nodes under binders have dangling
//! indices; their certificates are stated over the raw (locally nameless)
//! subterms, which the checker handles like any other term.

use std::collections::BTreeMap;

use thiserror::Error;

use crate::cert::{check_cert, concat, embed_besp_in_fp, invert, map_cert, CertError, ConvCert, TermMap};
use crate::confluence::{church_rosser, ConfluenceError};
use crate::rewrite::{apply_step, apply_step_in, Axiom, Direction, Relation, Step, StepError};
use crate::term::{is_pure, shift, substitute, Node, Position, Term, VarName};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConservError {
    #[error("{which} term `{term}` is not pure")]
    NotPure { which: &'static str, term: Term },
    #[error("the witness is for `{witness}`, not for `{term}`")]
    WrongSubject { witness: Term, term: Term },
    #[error("witness entry at {pos} is invalid: {reason}")]
    WitnessInvalid { pos: Position, reason: String },
    #[error("no witness can be transported across the backward {axiom} step at {pos}")]
    WitnessUnavailable { pos: Position, axiom: Axiom },
    #[error("step {index} is invalid: {cause}")]
    InvalidStep { index: usize, cause: StepError },
    #[error("invalid input certificate: {0}")]
    InvalidInput(CertError),
    #[error("the input certificate ends at `{end}`, expected `{expected}`")]
    WrongEndpoint { end: Term, expected: Term },
    #[error(transparent)]
    Confluence(#[from] ConfluenceError),
    #[error("internal certificate transport failed: {0}")]
    Transport(String),
}

type Entries = BTreeMap<Position, ConvCert>;

/// The projection erasure: keeps the left component of pairs and drops
/// projections.
pub fn erase(m: &Term) -> Term {
    match m.node() {
        Node::Free(_) | Node::Bound(_) => m.clone(),
        Node::Abs(h, b) => Term::abs_raw(h.clone(), erase(b)),
        Node::App(f, a) => Term::app(erase(f), erase(a)),
        Node::Pair(l, _) => erase(l),
        Node::Proj(_, b) => erase(b),
    }
}

/// Whether erasure commutes with substitution on this instance.
pub fn erase_subst_check(m: &Term, x: &VarName, n: &Term) -> bool {
    erase(&substitute(m, x, n)) == substitute(&erase(m), x, &erase(n))
}

/// Positions of all pair nodes, in preorder.
pub fn pair_positions(m: &Term) -> Vec<Position> {
    m.positions()
        .into_iter()
        .filter(|p| m.at(&p.0).is_some_and(Term::is_pair))
        .collect()
}

/// Constructive evidence that every pair of `subject` has convertible
/// component erasures.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SymWitness {
    pub subject: Term,
    pub entries: BTreeMap<Position, ConvCert>,
}

impl SymWitness {
    /// Re-check every entry against the current pair components.
    pub fn verify(&self, extensional: bool) -> Result<(), ConservError> {
        let rel = Relation::be(extensional);
        let pairs = pair_positions(&self.subject);
        for p in &pairs {
            let invalid = |reason: String| ConservError::WitnessInvalid {
                pos: p.clone(),
                reason,
            };
            let c = self.entries.get(p).ok_or_else(|| invalid("missing".into()))?;
            let Some(Node::Pair(l, r)) = self.subject.at(&p.0).map(Term::node) else {
                unreachable!()
            };
            if c.start != erase(l) {
                return Err(invalid(format!("starts at `{}`, expected `{}`", c.start, erase(l))));
            }
            let end = check_cert(c, &rel).map_err(|e| invalid(e.to_string()))?;
            if end != erase(r) {
                return Err(invalid(format!("ends at `{end}`, expected `{}`", erase(r))));
            }
        }
        if let Some(p) = self.entries.keys().find(|p| !pairs.contains(p)) {
            return Err(ConservError::WitnessInvalid {
                pos: p.clone(),
                reason: "no pair at this position".into(),
            });
        }
        Ok(())
    }
}

/// The empty witness of a pure term.
pub fn trivial_witness(m: &Term) -> Result<SymWitness, ConservError> {
    if !is_pure(m) {
        return Err(ConservError::NotPure {
            which: "witness subject",
            term: m.clone(),
        });
    }
    Ok(SymWitness {
        subject: m.clone(),
        entries: BTreeMap::new(),
    })
}

/// Entries below `prefix`, re-rooted there.
fn restrict(e: &Entries, prefix: &[usize]) -> Entries {
    e.iter()
        .filter_map(|(p, c)| Some((Position::from(p.strip_prefix(prefix)?), c.clone())))
        .collect()
}

fn graft(out: &mut Entries, prefix: &[usize], e: Entries) {
    for (q, c) in e {
        out.insert(Position::from(prefix).join(&q.0), c);
    }
}

fn transport(c: &ConvCert, f: &TermMap<'_>) -> Result<ConvCert, ConservError> {
    map_cert(c, f).map_err(|e| ConservError::Transport(e.to_string()))
}

fn dummy() -> Term {
    Term::var("_")
}

/// Remove `by` unused dangling indices starting at `k`.
fn lower(c: &ConvCert, k: u32, by: u32) -> Result<ConvCert, ConservError> {
    let d = dummy();
    let mut out = c.clone();
    for _ in 0..by {
        out = transport(&out, &TermMap::SubstBound(k, &d))?;
    }
    Ok(out)
}

/// Positions of occurrences of dangling index `k`, with the number of
/// binders crossed to reach each.
fn occurrences(t: &Term, k: u32) -> Vec<(Vec<usize>, u32)> {
    fn go(t: &Term, k: u32, depth: u32, path: &mut Vec<usize>, out: &mut Vec<(Vec<usize>, u32)>) {
        match t.node() {
            Node::Bound(i) if *i == k + depth => out.push((path.clone(), depth)),
            Node::Free(_) | Node::Bound(_) => {}
            Node::Abs(_, b) => {
                path.push(0);
                go(b, k, depth + 1, path, out);
                path.pop();
            }
            _ => {
                for (i, c) in t.children().into_iter().enumerate() {
                    path.push(i);
                    go(c, k, depth, path, out);
                    path.pop();
                }
            }
        }
    }
    let mut out = Vec::new();
    go(t, k, 0, &mut Vec::new(), &mut out);
    out
}

/// Marker error from the local handlers, given a position by the caller.
struct Unavailable;

fn fill_missing(t: &Term, out: &mut Entries, prefix: &[usize]) -> Result<(), Unavailable> {
    let sub = t.at(prefix).expect("valid prefix");
    for (q, c) in fallback_partial(sub, &restrict(out, prefix))? {
        out.insert(Position::from(prefix).join(&q.0), c);
    }
    Ok(())
}

/// Entries for the pairs of `t` not covered by `known`. With no witness to
/// transport, only pairs whose components have equal erasures qualify.
fn fallback_partial(t: &Term, known: &Entries) -> Result<Entries, Unavailable> {
    let mut out = Entries::new();
    for p in pair_positions(t) {
        if known.contains_key(&p) {
            continue;
        }
        let Node::Pair(l, r) = t.at(&p.0).unwrap().node() else {
            unreachable!()
        };
        let el = erase(l);
        if el != erase(r) {
            return Err(Unavailable);
        }
        out.insert(p, ConvCert::empty(el));
    }
    Ok(out)
}

enum LocalError {
    Unavailable,
    Fatal(ConservError),
}

impl From<ConservError> for LocalError {
    fn from(e: ConservError) -> Self {
        LocalError::Fatal(e)
    }
}

impl From<Unavailable> for LocalError {
    fn from(_: Unavailable) -> Self {
        LocalError::Unavailable
    }
}

type Local = Result<(ConvCert, Entries), LocalError>;

/// A root step from `t` to `t2` forward along `axiom`.
fn root_forward(t: &Term, t2: &Term, axiom: Axiom, e: &Entries) -> Local {
    let et = erase(t);
    let mut out = Entries::new();
    let cert = match axiom {
        Axiom::Beta => {
            let Node::App(f, a) = t.node() else { unreachable!() };
            let Node::Abs(_, b) = f.node() else { unreachable!() };
            let ea = erase(a);
            for (q, c) in restrict(e, &[0, 0]) {
                let d = b.binders_along(&q.0).unwrap();
                let v = shift(&ea, d, 0);
                out.insert(q, transport(&c, &TermMap::SubstBound(d, &v))?);
            }
            let inner = restrict(e, &[1]);
            for (j, dj) in occurrences(b, 0) {
                for (q, c) in &inner {
                    let cq = a.binders_along(&q.0).unwrap();
                    let moved = transport(c, &TermMap::Shift { by: dj, cutoff: cq })?;
                    out.insert(Position(j.clone()).join(&q.0), moved);
                }
            }
            ConvCert::new(et, vec![Step::forward(vec![], Axiom::Beta)])
        }
        Axiom::Pi1 => {
            out = restrict(e, &[0, 0]);
            ConvCert::empty(et)
        }
        Axiom::Pi2 => {
            out = restrict(e, &[0, 1]);
            e.get(&Position::from(vec![0]))
                .cloned()
                .ok_or_else(|| ConservError::WitnessInvalid {
                    pos: Position::from(vec![0]),
                    reason: "missing".into(),
                })?
        }
        Axiom::DeltaPi => {
            let Node::App(_, c) = t.node() else { unreachable!() };
            let e0 = e.get(&Position::from(vec![0])).ok_or_else(|| {
                ConservError::WitnessInvalid {
                    pos: Position::from(vec![0]),
                    reason: "missing".into(),
                }
            })?;
            let outer = Term::app(e0.start.clone(), erase(c));
            out.insert(Position::root(), e0.lift(&outer, &[0]));
            graft(&mut out, &[0, 0], restrict(e, &[0, 0]));
            graft(&mut out, &[1, 0], restrict(e, &[0, 1]));
            let ec = restrict(e, &[1]);
            graft(&mut out, &[0, 1], ec.clone());
            graft(&mut out, &[1, 1], ec);
            ConvCert::empty(et)
        }
        Axiom::Pi1Lam | Axiom::Pi2Lam => {
            out = e.clone();
            ConvCert::empty(et)
        }
        Axiom::EtaExp => {
            let Node::Abs(hint, _) = t2.node() else { unreachable!() };
            for (q, c) in e {
                let cq = t.binders_along(&q.0).unwrap();
                let moved = transport(c, &TermMap::Shift { by: 1, cutoff: cq })?;
                out.insert(Position::from(vec![0, 0]).join(&q.0), moved);
            }
            let s = Step::backward(vec![], Axiom::Eta).with_fresh(hint.clone());
            ConvCert::new(et, vec![s])
        }
        Axiom::SpExp => {
            out.insert(Position::root(), ConvCert::empty(et.clone()));
            graft(&mut out, &[0, 0], e.clone());
            graft(&mut out, &[1, 0], e.clone());
            ConvCert::empty(et)
        }
        Axiom::Eta | Axiom::Sp => unreachable!("not an expansion-system axiom"),
    };
    Ok((cert, out))
}

/// A root step from `t` to `t2`, where `t2 -> t` forward along `axiom`.
fn root_backward(t: &Term, t2: &Term, axiom: Axiom, e: &Entries) -> Local {
    let et = erase(t);
    let mut out = Entries::new();
    let cert = match axiom {
        Axiom::EtaExp => {
            for (q, c) in restrict(e, &[0, 0]) {
                let cq = t2.binders_along(&q.0).unwrap();
                out.insert(q, lower(&c, cq, 1)?);
            }
            ConvCert::new(et, vec![Step::forward(vec![], Axiom::Eta)])
        }
        Axiom::SpExp => {
            out = restrict(e, &[0, 0]);
            ConvCert::empty(et)
        }
        Axiom::Pi1Lam | Axiom::Pi2Lam => {
            out = e.clone();
            ConvCert::empty(et)
        }
        Axiom::Beta => {
            let Node::App(f, a) = t2.node() else { unreachable!() };
            let Node::Abs(_, b) = f.node() else { unreachable!() };
            for q in pair_positions(b) {
                let d = b.binders_along(&q.0).unwrap();
                let Node::Pair(l, r) = b.at(&q.0).unwrap().node() else { unreachable!() };
                if l.has_loose(d) || r.has_loose(d) {
                    continue;
                }
                if let Some(c) = e.get(&q) {
                    let moved = transport(c, &TermMap::Shift { by: 1, cutoff: d })?;
                    out.insert(Position::from(vec![0, 0]).join(&q.0), moved);
                }
            }
            if let Some((j, dj)) = occurrences(b, 0).into_iter().next() {
                for (q, c) in restrict(e, &j) {
                    let cq = a.binders_along(&q.0).unwrap();
                    out.insert(Position::from(vec![1]).join(&q.0), lower(&c, cq, dj)?);
                }
            }
            fill_missing(t2, &mut out, &[])?;
            let s = Step::backward(vec![], Axiom::Beta).with_source(erase(t2));
            ConvCert::new(et, vec![s])
        }
        Axiom::Pi1 => {
            graft(&mut out, &[0, 0], e.clone());
            fill_missing(t2, &mut out, &[])?;
            ConvCert::empty(et)
        }
        Axiom::Pi2 => {
            graft(&mut out, &[0, 1], e.clone());
            fill_missing(t2, &mut out, &[])?;
            // The new pair's components have equal erasures.
            ConvCert::empty(et)
        }
        Axiom::DeltaPi => {
            graft(&mut out, &[0, 0], restrict(e, &[0, 0]));
            graft(&mut out, &[0, 1], restrict(e, &[1, 0]));
            graft(&mut out, &[1], restrict(e, &[0, 1]));
            fill_missing(t2, &mut out, &[])?;
            ConvCert::empty(et)
        }
        Axiom::Eta | Axiom::Sp => unreachable!("not an expansion-system axiom"),
    };
    Ok((cert, out))
}

/// Walk to the redex, handle it, and propagate the erased certificate and
/// the entries back out through the enclosing constructors.
fn walk(t: &Term, path: &[usize], t2: &Term, axiom: Axiom, dir: Direction, e: &Entries) -> Local {
    let Some((&i, rest)) = path.split_first() else {
        return match dir {
            Direction::Forward => root_forward(t, t2, axiom, e),
            Direction::Backward => root_backward(t, t2, axiom, e),
        };
    };
    let child = t.children()[i];
    let (c, ce) = walk(child, rest, t2, axiom, dir, &restrict(e, &[i]))?;
    let mut out: Entries = e
        .iter()
        .filter(|(p, _)| p.0.first() != Some(&i))
        .map(|(p, c)| (p.clone(), c.clone()))
        .collect();
    graft(&mut out, &[i], ce);
    let cert = match t.node() {
        Node::Abs(..) | Node::App(..) => c.lift(&erase(t), &[i]),
        Node::Proj(..) => c,
        Node::Pair(..) => {
            let root = Position::root();
            let e0 = e.get(&root).ok_or_else(|| ConservError::WitnessInvalid {
                pos: root.clone(),
                reason: "missing".into(),
            })?;
            let fail = |err: String| LocalError::Fatal(ConservError::Transport(err));
            if i == 0 {
                let back = invert(&c).map_err(|x| fail(x.to_string()))?;
                let entry = concat(&back, e0).map_err(|x| fail(x.to_string()))?;
                out.insert(root, entry);
                c
            } else {
                let entry = concat(e0, &c).map_err(|x| fail(x.to_string()))?;
                out.insert(root, entry);
                ConvCert::empty(erase(t))
            }
        }
        Node::Free(_) | Node::Bound(_) => unreachable!(),
    };
    Ok((cert, out))
}

/// Erase one expansion-system step: a pure certificate from `|m|` to `|m'|`
/// and a witness for `m'`.
///
/// Forward steps are always supported. Backward steps are supported exactly
/// for `EtaExp`, `SpExp` and the projection-abstraction axioms; for the
/// others, pairs whose witness cannot be recovered must have components with
/// equal erasures.
pub fn step_erase(
    m: &Term,
    w: &SymWitness,
    s: &Step,
    extensional: bool,
) -> Result<(ConvCert, SymWitness), ConservError> {
    if &w.subject != m {
        return Err(ConservError::WrongSubject {
            witness: w.subject.clone(),
            term: m.clone(),
        });
    }
    let m2 = apply_step_in(m, s, &Relation::fp(extensional))
        .map_err(|cause| ConservError::InvalidStep { index: 0, cause })?;
    let t2 = m2.at(&s.pos.0).expect("step position is valid");
    let (cert, entries) = match walk(m, &s.pos.0, t2, s.axiom, s.dir, &w.entries) {
        Ok(x) => x,
        Err(LocalError::Fatal(e)) => return Err(e),
        Err(LocalError::Unavailable) => {
            return Err(ConservError::WitnessUnavailable {
                pos: s.pos.clone(),
                axiom: s.axiom,
            })
        }
    };
    Ok((
        cert,
        SymWitness {
            subject: m2,
            entries,
        },
    ))
}

/// Erase a whole expansion-system certificate, step by step.
pub fn multi_step_erase(
    m: &Term,
    w: &SymWitness,
    c: &ConvCert,
    extensional: bool,
) -> Result<(ConvCert, SymWitness), ConservError> {
    if &c.start != m {
        return Err(ConservError::WrongSubject {
            witness: c.start.clone(),
            term: m.clone(),
        });
    }
    let mut out = ConvCert::empty(erase(m));
    let mut cur = m.clone();
    let mut w = w.clone();
    for (index, s) in c.steps.iter().enumerate() {
        let (ce, w2) = step_erase(&cur, &w, s, extensional).map_err(|e| match e {
            ConservError::InvalidStep { cause, .. } => ConservError::InvalidStep { index, cause },
            e => e,
        })?;
        out.extend(ce);
        cur = apply_step(&cur, s).expect("validated");
        w = w2;
    }
    Ok((out, w))
}

/// Turn a conversion in the surjective-pairing theory between pure terms
/// into a pure beta-eta conversion with the same endpoints (beta only when
/// `extensional` is false).
pub fn transform_conservativity(
    m: &Term,
    n: &Term,
    c: &ConvCert,
    extensional: bool,
) -> Result<ConvCert, ConservError> {
    for (which, t) in [("start", m), ("end", n)] {
        if !is_pure(t) {
            return Err(ConservError::NotPure {
                which,
                term: t.clone(),
            });
        }
    }
    if &c.start != m {
        return Err(ConservError::WrongEndpoint {
            end: c.start.clone(),
            expected: m.clone(),
        });
    }
    let end = check_cert(c, &Relation::besp(extensional)).map_err(ConservError::InvalidInput)?;
    if &end != n {
        return Err(ConservError::WrongEndpoint {
            end,
            expected: n.clone(),
        });
    }
    let fp = embed_besp_in_fp(c).map_err(ConservError::InvalidInput)?;
    let valley = church_rosser(&fp, extensional)?;
    let (left, _) = multi_step_erase(m, &trivial_witness(m)?, &valley.left, extensional)?;
    let (right, _) = multi_step_erase(n, &trivial_witness(n)?, &valley.right, extensional)?;
    let back = invert(&right).map_err(|e| ConservError::Transport(e.to_string()))?;
    let out = concat(&left, &back).map_err(|e| ConservError::Transport(e.to_string()))?;
    let end = check_cert(&out, &Relation::be(extensional))
        .map_err(|e| ConservError::Transport(e.to_string()))?;
    debug_assert_eq!(&out.start, m);
    if &end != n {
        return Err(ConservError::Transport(format!("output ends at `{end}`")));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn erase_examples() {
        assert_eq!(erase(&t("<a, b>")), t("a"));
        assert_eq!(erase(&t("\\x. x y")), t("\\x. x y"));
        assert_eq!(erase(&t("p2 <\\x. <x, y>, z>")), t("\\x. x"));
    }

    #[test]
    fn erase_subst_examples() {
        let x = VarName::new("x");
        assert!(erase_subst_check(&t("x"), &x, &t("<a, b>")));
        assert!(erase_subst_check(&t("<x, y>"), &x, &t("p1 z")));
        assert_eq!(erase(&substitute(&t("<x, y>"), &x, &t("p1 z"))), t("z"));
    }

    #[test]
    fn trivial_witnesses() {
        assert!(trivial_witness(&t("\\x. x")).unwrap().entries.is_empty());
        assert!(trivial_witness(&t("x y")).unwrap().entries.is_empty());
        assert!(matches!(trivial_witness(&t("p1 x")), Err(ConservError::NotPure { .. })));
    }

    #[test]
    fn sp_expansion_then_pi2() {
        let m = t("\\x. f x");
        let w = trivial_witness(&m).unwrap();
        let (c, w) = step_erase(&m, &w, &Step::forward(vec![], Axiom::SpExp), true).unwrap();
        assert!(c.is_empty());
        assert_eq!(w.entries.len(), 1);
        w.verify(true).unwrap();
        let m2 = w.subject.clone();
        let (c, w) = step_erase(&m2, &w, &Step::forward(vec![0, 0], Axiom::EtaExp), true).unwrap();
        assert_eq!(c.len(), 1, "the left component carries the erasure");
        w.verify(true).unwrap();
        let m3 = w.subject.clone();
        let (c, w) = step_erase(&m3, &w, &Step::forward(vec![1, 0], Axiom::EtaExp), true).unwrap();
        assert!(c.is_empty());
        w.verify(true).unwrap();
        assert_eq!(w.entries[&Position::root()].len(), 2);
    }

    #[test]
    fn pi2_consumes_the_witness() {
        let m = t("p2 <(\\x. x) b, b>");
        let mut entries = BTreeMap::new();
        entries.insert(
            Position::from(vec![0]),
            ConvCert::new(t("(\\x. x) b"), vec![Step::forward(vec![], Axiom::Beta)]),
        );
        let w = SymWitness { subject: m.clone(), entries };
        w.verify(true).unwrap();
        let (c, w2) = step_erase(&m, &w, &Step::forward(vec![], Axiom::Pi2), true).unwrap();
        assert_eq!(c, w.entries[&Position::from(vec![0])]);
        assert_eq!(w2.subject, t("b"));
        assert!(w2.entries.is_empty());
    }

    #[test]
    fn beta_on_erasures() {
        let m = t("(\\x. p1 x) y");
        let w = SymWitness { subject: m.clone(), entries: BTreeMap::new() };
        let (c, _) = step_erase(&m, &w, &Step::forward(vec![], Axiom::Beta), true).unwrap();
        assert_eq!(c.start, t("(\\x. x) y"));
        assert_eq!(c.steps, vec![Step::forward(vec![], Axiom::Beta)]);
    }

    #[test]
    fn beta_duplicates_argument_witnesses() {
        let m = t("\\z. (\\x. \\y. x (y x)) (\\q. <z q, (\\v. z v) q>)");
        let Node::Pair(l, r) = m.at(&[0, 1, 0]).unwrap().node() else { panic!() };
        let c = ConvCert::new(
            erase(l),
            vec![Step::backward(vec![], Axiom::Beta).with_source(erase(r))],
        );
        let mut entries = BTreeMap::new();
        entries.insert(Position::from(vec![0, 1, 0]), c);
        let w = SymWitness { subject: m.clone(), entries };
        w.verify(true).unwrap();
        let (c, w2) = step_erase(&m, &w, &Step::forward(vec![0], Axiom::Beta), true).unwrap();
        assert_eq!(c.len(), 1);
        assert_eq!(w2.entries.len(), 2);
        w2.verify(true).unwrap();
    }

    #[test]
    fn transform_examples() {
        let m = t("(\\x. x) z");
        let c = ConvCert::new(m.clone(), vec![Step::forward(vec![], Axiom::Beta)]);
        let out = transform_conservativity(&m, &t("z"), &c, true).unwrap();
        assert_eq!(check_cert(&out, &Relation::be(true)).unwrap(), t("z"));
        let empty = ConvCert::empty(m.clone());
        assert!(transform_conservativity(&m, &m, &empty, true).unwrap().is_empty());

        // \f.\a. f a  <-Sp  <p1 M, p2 M>  ...  the surjective-pairing detour.
        let m = t("\\f. \\a. f a");
        let sp = t("<p1 (\\f. \\a. f a), p2 (\\f. \\a. f a)>");
        let c = ConvCert::new(
            m.clone(),
            vec![
                Step::backward(vec![], Axiom::Sp).with_source(sp.clone()),
                Step::forward(vec![], Axiom::Sp),
                Step::forward(vec![0], Axiom::Eta),
            ],
        );
        let n = check_cert(&c, &Relation::besp(true)).unwrap();
        assert_eq!(n, t("\\f. f"));
        let out = transform_conservativity(&m, &n, &c, true).unwrap();
        assert_eq!(check_cert(&out, &Relation::be(true)).unwrap(), n);
        assert_eq!(out.start, m);
    }

    #[test]
    fn backward_expansions_round_trip() {
        let m = t("\\x. f x");
        let w = trivial_witness(&m).unwrap();
        let fwd = ConvCert::new(
            m.clone(),
            vec![
                Step::forward(vec![], Axiom::SpExp),
                Step::forward(vec![0, 0], Axiom::EtaExp),
            ],
        );
        let back = invert(&fwd).unwrap();
        let whole = concat(&fwd, &back).unwrap();
        let (c, w2) = multi_step_erase(&m, &w, &whole, true).unwrap();
        assert_eq!(check_cert(&c, &Relation::be(true)).unwrap(), erase(&m));
        assert!(w2.entries.is_empty());
    }
}
