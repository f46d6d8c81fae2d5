//! Terms of the lambda calculus extended with pairs and projections.
//!
//! Internally a term is locally nameless: free variables carry names, bound
//! variables are de Bruijn indices and binders keep their original name only
//! as a printing hint. Two terms are equal exactly when they are
//! alpha-equivalent, so `==` is the alpha-equivalence test used everywhere in
//! the crate. Positions address the tree shape, which renaming never changes.
//!
//! The public surface speaks named terms: constructors close over names,
//! [`Term::view`] opens binders with printable names, and [`subterm_at`] /
//! [`replace_at`] read and graft subterms in the named reading.

use std::collections::BTreeSet;
use std::fmt;
use std::hash::{Hash, Hasher};
use std::sync::Arc;

use thiserror::Error;

/// A variable name.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VarName(Arc<str>);

impl VarName {
    pub fn new(name: impl AsRef<str>) -> Self {
        VarName(Arc::from(name.as_ref()))
    }

    pub fn as_str(&self) -> &str {
        &self.0
    }

    /// First name of the sequence `x0, x1, ...` that is not in `avoid`.
    pub fn fresh(avoid: &BTreeSet<VarName>) -> VarName {
        (0usize..)
            .map(|i| VarName::new(format!("x{i}")))
            .find(|n| !avoid.contains(n))
            .expect("unbounded name supply")
    }
}

impl fmt::Debug for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl fmt::Display for VarName {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.0)
    }
}

impl From<&str> for VarName {
    fn from(s: &str) -> Self {
        VarName::new(s)
    }
}

impl From<String> for VarName {
    fn from(s: String) -> Self {
        VarName::new(s)
    }
}

/// Which component a projection selects.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    Fst,
    Snd,
}

impl Side {
    pub fn index(self) -> usize {
        match self {
            Side::Fst => 0,
            Side::Snd => 1,
        }
    }

    pub fn both() -> [Side; 2] {
        [Side::Fst, Side::Snd]
    }
}

#[derive(Clone)]
pub(crate) enum Node {
    Free(VarName),
    Bound(u32),
    Abs(VarName, Term),
    App(Term, Term),
    Pair(Term, Term),
    Proj(Side, Term),
}

/// An immutable, cheaply clonable term. Equality is alpha-equivalence.
#[derive(Clone)]
pub struct Term(Arc<Node>);

/// The named reading of the root constructor of a term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum View {
    Var(VarName),
    Abs(VarName, Term),
    App(Term, Term),
    Pair(Term, Term),
    Proj(Side, Term),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum TermError {
    #[error("invalid position {0}")]
    InvalidPosition(Position),
}

/// A path from the root: Abs body = 0; App function = 0, argument = 1;
/// Pair left = 0, right = 1; Proj body = 0.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Position(pub Vec<usize>);

impl Position {
    pub fn root() -> Self {
        Position(Vec::new())
    }

    pub fn child(&self, i: usize) -> Position {
        let mut p = self.0.clone();
        p.push(i);
        Position(p)
    }

    pub fn join(&self, rest: &[usize]) -> Position {
        let mut p = self.0.clone();
        p.extend_from_slice(rest);
        Position(p)
    }

    pub fn is_root(&self) -> bool {
        self.0.is_empty()
    }

    pub fn strip_prefix(&self, prefix: &[usize]) -> Option<&[usize]> {
        self.0.strip_prefix(prefix)
    }
}

impl From<Vec<usize>> for Position {
    fn from(v: Vec<usize>) -> Self {
        Position(v)
    }
}

impl From<&[usize]> for Position {
    fn from(v: &[usize]) -> Self {
        Position(v.to_vec())
    }
}

impl fmt::Display for Position {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "[")?;
        for (i, c) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{c}")?;
        }
        write!(f, "]")
    }
}

impl PartialEq for Term {
    fn eq(&self, other: &Term) -> bool {
        if Arc::ptr_eq(&self.0, &other.0) {
            return true;
        }
        match (&*self.0, &*other.0) {
            (Node::Free(a), Node::Free(b)) => a == b,
            (Node::Bound(a), Node::Bound(b)) => a == b,
            (Node::Abs(_, a), Node::Abs(_, b)) => a == b,
            (Node::App(a1, a2), Node::App(b1, b2)) | (Node::Pair(a1, a2), Node::Pair(b1, b2)) => {
                a1 == b1 && a2 == b2
            }
            (Node::Proj(s, a), Node::Proj(t, b)) => s == t && a == b,
            _ => false,
        }
    }
}

impl Eq for Term {}

impl Hash for Term {
    fn hash<H: Hasher>(&self, state: &mut H) {
        match &*self.0 {
            Node::Free(n) => {
                0u8.hash(state);
                n.hash(state);
            }
            Node::Bound(i) => {
                1u8.hash(state);
                i.hash(state);
            }
            Node::Abs(_, b) => {
                2u8.hash(state);
                b.hash(state);
            }
            Node::App(a, b) => {
                3u8.hash(state);
                a.hash(state);
                b.hash(state);
            }
            Node::Pair(a, b) => {
                4u8.hash(state);
                a.hash(state);
                b.hash(state);
            }
            Node::Proj(s, a) => {
                5u8.hash(state);
                s.hash(state);
                a.hash(state);
            }
        }
    }
}

impl fmt::Debug for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "`{}`", crate::syntax::print(self))
    }
}

impl fmt::Display for Term {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&crate::syntax::print(self))
    }
}

impl Term {
    pub(crate) fn mk(node: Node) -> Term {
        Term(Arc::new(node))
    }

    pub(crate) fn node(&self) -> &Node {
        &self.0
    }

    pub(crate) fn bound(i: u32) -> Term {
        Term::mk(Node::Bound(i))
    }

    pub(crate) fn abs_raw(hint: VarName, body: Term) -> Term {
        Term::mk(Node::Abs(hint, body))
    }

    pub fn var(name: impl Into<VarName>) -> Term {
        Term::mk(Node::Free(name.into()))
    }

    /// `λname. body`, binding the free occurrences of `name` in `body`.
    pub fn lam(name: impl Into<VarName>, body: Term) -> Term {
        let name = name.into();
        let body = close(&body, &name, 0);
        Term::mk(Node::Abs(name, body))
    }

    pub fn app(f: Term, a: Term) -> Term {
        Term::mk(Node::App(f, a))
    }

    /// Left-nested application `f a1 a2 ...`.
    pub fn apps(f: Term, args: impl IntoIterator<Item = Term>) -> Term {
        args.into_iter().fold(f, Term::app)
    }

    pub fn pair(l: Term, r: Term) -> Term {
        Term::mk(Node::Pair(l, r))
    }

    pub fn proj(side: Side, t: Term) -> Term {
        Term::mk(Node::Proj(side, t))
    }

    pub fn fst(t: Term) -> Term {
        Term::proj(Side::Fst, t)
    }

    pub fn snd(t: Term) -> Term {
        Term::proj(Side::Snd, t)
    }

    /// The named reading of the root constructor. Binders are opened with the
    /// same names the printer would choose.
    pub fn view(&self) -> View {
        match self.node() {
            Node::Free(n) => View::Var(n.clone()),
            Node::Bound(i) => View::Var(VarName::new(format!("^{i}"))),
            Node::Abs(hint, body) => {
                let name = binder_name(hint, body, &[]);
                View::Abs(name.clone(), open(body, &name, 0))
            }
            Node::App(a, b) => View::App(a.clone(), b.clone()),
            Node::Pair(a, b) => View::Pair(a.clone(), b.clone()),
            Node::Proj(s, a) => View::Proj(*s, a.clone()),
        }
    }

    pub fn is_var(&self) -> bool {
        matches!(self.node(), Node::Free(_) | Node::Bound(_))
    }

    pub fn is_abs(&self) -> bool {
        matches!(self.node(), Node::Abs(..))
    }

    pub fn is_pair(&self) -> bool {
        matches!(self.node(), Node::Pair(..))
    }

    /// Number of constructor nodes.
    pub fn size(&self) -> usize {
        match self.node() {
            Node::Free(_) | Node::Bound(_) => 1,
            Node::Abs(_, b) | Node::Proj(_, b) => 1 + b.size(),
            Node::App(a, b) | Node::Pair(a, b) => 1 + a.size() + b.size(),
        }
    }

    pub fn children(&self) -> Vec<&Term> {
        match self.node() {
            Node::Free(_) | Node::Bound(_) => vec![],
            Node::Abs(_, b) | Node::Proj(_, b) => vec![b],
            Node::App(a, b) | Node::Pair(a, b) => vec![a, b],
        }
    }

    /// All valid positions, in pre-order (leftmost-outermost first).
    pub fn positions(&self) -> Vec<Position> {
        fn go(t: &Term, path: &mut Vec<usize>, out: &mut Vec<Position>) {
            out.push(Position(path.clone()));
            for (i, c) in t.children().into_iter().enumerate() {
                path.push(i);
                go(c, path, out);
                path.pop();
            }
        }
        let mut out = Vec::new();
        go(self, &mut Vec::new(), &mut out);
        out
    }

    /// Raw subterm at a path; dangling indices refer to binders above it.
    pub(crate) fn at(&self, path: &[usize]) -> Option<&Term> {
        let mut t = self;
        for &i in path {
            t = *t.children().get(i)?;
        }
        Some(t)
    }

    /// Raw grafting: `new` is placed verbatim, its dangling indices become
    /// bound by the binders above `path`.
    pub(crate) fn replace(&self, path: &[usize], new: Term) -> Option<Term> {
        let Some((&i, rest)) = path.split_first() else {
            return Some(new);
        };
        let node = match (self.node(), i) {
            (Node::Abs(h, b), 0) => Node::Abs(h.clone(), b.replace(rest, new)?),
            (Node::App(a, b), 0) => Node::App(a.replace(rest, new)?, b.clone()),
            (Node::App(a, b), 1) => Node::App(a.clone(), b.replace(rest, new)?),
            (Node::Pair(a, b), 0) => Node::Pair(a.replace(rest, new)?, b.clone()),
            (Node::Pair(a, b), 1) => Node::Pair(a.clone(), b.replace(rest, new)?),
            (Node::Proj(s, a), 0) => Node::Proj(*s, a.replace(rest, new)?),
            _ => return None,
        };
        Some(Term::mk(node))
    }

    /// Number of binders crossed by a path.
    pub(crate) fn binders_along(&self, path: &[usize]) -> Option<u32> {
        let mut t = self;
        let mut depth = 0;
        for &i in path {
            if t.is_abs() {
                depth += 1;
            }
            t = *t.children().get(i)?;
        }
        Some(depth)
    }

    /// Free names (not counting dangling indices).
    pub(crate) fn free_names(&self) -> BTreeSet<VarName> {
        let mut out = BTreeSet::new();
        self.collect_free(&mut out);
        out
    }

    fn collect_free(&self, out: &mut BTreeSet<VarName>) {
        match self.node() {
            Node::Free(n) => {
                out.insert(n.clone());
            }
            Node::Bound(_) => {}
            Node::Abs(_, b) | Node::Proj(_, b) => b.collect_free(out),
            Node::App(a, b) | Node::Pair(a, b) => {
                a.collect_free(out);
                b.collect_free(out);
            }
        }
    }

    /// Whether dangling index `k` (relative to this term's root) occurs.
    pub(crate) fn has_loose(&self, k: u32) -> bool {
        match self.node() {
            Node::Free(_) => false,
            Node::Bound(i) => *i == k,
            Node::Abs(_, b) => b.has_loose(k + 1),
            Node::Proj(_, b) => b.has_loose(k),
            Node::App(a, b) | Node::Pair(a, b) => a.has_loose(k) || b.has_loose(k),
        }
    }

    /// No dangling indices at all.
    #[cfg(test)]
    pub(crate) fn is_closed_locally(&self) -> bool {
        fn go(t: &Term, depth: u32) -> bool {
            match t.node() {
                Node::Free(_) => true,
                Node::Bound(i) => *i < depth,
                Node::Abs(_, b) => go(b, depth + 1),
                Node::Proj(_, b) => go(b, depth),
                Node::App(a, b) | Node::Pair(a, b) => go(a, depth) && go(b, depth),
            }
        }
        go(self, 0)
    }

    fn rebuild(&self, f: &mut impl FnMut(&Term) -> Term) -> Term {
        match self.node() {
            Node::Free(_) | Node::Bound(_) => self.clone(),
            Node::Abs(h, b) => Term::mk(Node::Abs(h.clone(), f(b))),
            Node::App(a, b) => Term::mk(Node::App(f(a), f(b))),
            Node::Pair(a, b) => Term::mk(Node::Pair(f(a), f(b))),
            Node::Proj(s, a) => Term::mk(Node::Proj(*s, f(a))),
        }
    }
}

/// Add `by` to every index `>= cutoff` (measured at the root).
pub(crate) fn shift(t: &Term, by: u32, cutoff: u32) -> Term {
    if by == 0 {
        return t.clone();
    }
    match t.node() {
        Node::Bound(i) if *i >= cutoff => Term::bound(i + by),
        Node::Free(_) | Node::Bound(_) => t.clone(),
        Node::Abs(h, b) => Term::abs_raw(h.clone(), shift(b, by, cutoff + 1)),
        _ => t.rebuild(&mut |c| shift(c, by, cutoff)),
    }
}

/// Replace dangling index `k` by `value` and lower the dangling indices above
/// `k` by one. `value` lives at the root level of `t`.
pub(crate) fn subst_bound(t: &Term, k: u32, value: &Term) -> Term {
    fn go(t: &Term, k: u32, value: &Term, depth: u32) -> Term {
        match t.node() {
            Node::Bound(i) if *i >= depth => {
                let j = i - depth;
                if j == k {
                    shift(value, depth, 0)
                } else if j > k {
                    Term::bound(i - 1)
                } else {
                    t.clone()
                }
            }
            Node::Free(_) | Node::Bound(_) => t.clone(),
            Node::Abs(h, b) => Term::abs_raw(h.clone(), go(b, k, value, depth + 1)),
            _ => t.rebuild(&mut |c| go(c, k, value, depth)),
        }
    }
    go(t, k, value, 0)
}

/// Replace the free name `x` by `value` (which lives at the root level of `t`).
pub(crate) fn subst_free(t: &Term, x: &VarName, value: &Term) -> Term {
    fn go(t: &Term, x: &VarName, value: &Term, depth: u32) -> Term {
        match t.node() {
            Node::Free(n) if n == x => shift(value, depth, 0),
            Node::Free(_) | Node::Bound(_) => t.clone(),
            Node::Abs(h, b) => Term::abs_raw(h.clone(), go(b, x, value, depth + 1)),
            _ => t.rebuild(&mut |c| go(c, x, value, depth)),
        }
    }
    go(t, x, value, 0)
}

/// Bind the free name `x` as dangling index `k`.
pub(crate) fn close(t: &Term, x: &VarName, k: u32) -> Term {
    match t.node() {
        Node::Free(n) if n == x => Term::bound(k),
        Node::Free(_) | Node::Bound(_) => t.clone(),
        Node::Abs(h, b) => Term::abs_raw(h.clone(), close(b, x, k + 1)),
        _ => t.rebuild(&mut |c| close(c, x, k)),
    }
}

/// Turn dangling index `k` into the free name `x`.
pub(crate) fn open(t: &Term, x: &VarName, k: u32) -> Term {
    match t.node() {
        Node::Bound(i) if *i == k => Term::var(x.clone()),
        Node::Free(_) | Node::Bound(_) => t.clone(),
        Node::Abs(h, b) => Term::abs_raw(h.clone(), open(b, x, k + 1)),
        _ => t.rebuild(&mut |c| open(c, x, k)),
    }
}

/// The printable name of a binder with hint `hint` and body `body`, under
/// enclosing binder names `ctx`: the hint unless it clashes with a free name
/// of the body or an enclosing name, else the first fresh `x<n>`.
pub(crate) fn binder_name(hint: &VarName, body: &Term, ctx: &[VarName]) -> VarName {
    let mut avoid = body.free_names();
    avoid.extend(ctx.iter().cloned());
    if avoid.contains(hint) || is_keyword(hint.as_str()) {
        VarName::fresh(&avoid)
    } else {
        hint.clone()
    }
}

pub(crate) fn is_keyword(s: &str) -> bool {
    s == "p1" || s == "p2"
}

/// Printable names of the binders crossed by `path`, outermost first.
pub(crate) fn context_names(m: &Term, path: &[usize]) -> Option<Vec<VarName>> {
    let mut ctx = Vec::new();
    let mut t = m;
    for &i in path {
        if let Node::Abs(h, b) = t.node() {
            let name = binder_name(h, b, &ctx);
            ctx.push(name);
        }
        t = *t.children().get(i)?;
    }
    Some(ctx)
}

/// Replace dangling indices by the names of the enclosing binders
/// (`ctx` outermost first).
pub(crate) fn open_with(t: &Term, ctx: &[VarName]) -> Term {
    ctx.iter()
        .rev()
        .fold(t.clone(), |acc, name| subst_bound(&acc, 0, &Term::var(name.clone())))
}

/// Bind free names that match enclosing binder names (innermost wins).
pub(crate) fn close_with(t: &Term, ctx: &[VarName]) -> Term {
    let mut acc = t.clone();
    let mut seen = BTreeSet::new();
    for (from_inner, name) in ctx.iter().rev().enumerate() {
        if seen.insert(name.clone()) {
            acc = close(&acc, name, from_inner as u32);
        }
    }
    acc
}

/// Free variables of a term.
pub fn free_vars(m: &Term) -> BTreeSet<VarName> {
    m.free_names()
}

/// Alpha-equivalence.
pub fn alpha_eq(m: &Term, n: &Term) -> bool {
    m == n
}

/// Capture-avoiding substitution `m[x := n]`.
pub fn substitute(m: &Term, x: &VarName, n: &Term) -> Term {
    subst_free(m, x, n)
}

/// True iff the term has no pair and no projection node.
pub fn is_pure(m: &Term) -> bool {
    match m.node() {
        Node::Free(_) | Node::Bound(_) => true,
        Node::Abs(_, b) => is_pure(b),
        Node::App(a, b) => is_pure(a) && is_pure(b),
        Node::Pair(..) | Node::Proj(..) => false,
    }
}

/// The subterm at `p`, with variables bound above `p` named as the printer
/// names them.
pub fn subterm_at(m: &Term, p: &Position) -> Result<Term, TermError> {
    let sub = m.at(&p.0).ok_or_else(|| TermError::InvalidPosition(p.clone()))?;
    let ctx = context_names(m, &p.0).expect("path already resolved");
    Ok(open_with(sub, &ctx))
}

/// Graft `s` at `p`. Grafting is literal: free names of `s` that coincide
/// with the printed names of binders above `p` become bound by them.
pub fn replace_at(m: &Term, p: &Position, s: &Term) -> Result<Term, TermError> {
    let ctx = context_names(m, &p.0).ok_or_else(|| TermError::InvalidPosition(p.clone()))?;
    let graft = close_with(s, &ctx);
    m.replace(&p.0, graft)
        .ok_or_else(|| TermError::InvalidPosition(p.clone()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn names(v: &[&str]) -> BTreeSet<VarName> {
        v.iter().map(|s| VarName::new(s)).collect()
    }

    #[test]
    fn free_vars_examples() {
        assert!(free_vars(&t("\\x. x")).is_empty());
        assert_eq!(free_vars(&t("\\x. x y")), names(&["y"]));
        assert_eq!(free_vars(&t("<p1 z, \\y. y> w")), names(&["z", "w"]));
    }

    #[test]
    fn alpha_examples() {
        assert!(alpha_eq(&t("\\x. x"), &t("\\y. y")));
        assert!(!alpha_eq(&t("\\x. y"), &t("\\y. y")));
        assert!(alpha_eq(&t("<\\a. a b, p1 c>"), &t("<\\d. d b, p1 c>")));
    }

    #[test]
    fn substitution_examples() {
        let x = VarName::new("x");
        assert_eq!(substitute(&t("x"), &x, &t("<a, b>")), t("<a, b>"));
        let r = substitute(&t("\\y. x"), &x, &t("y"));
        assert_eq!(r, t("\\y'. y"));
        assert_ne!(r, t("\\y. y"));
        assert_eq!(r.to_string(), "\\x0. y");
        assert_eq!(
            substitute(&t("p1 (x x)"), &x, &t("\\z. z")),
            t("p1 ((\\z. z) (\\z. z))")
        );
    }

    #[test]
    fn purity() {
        assert!(is_pure(&t("\\x. x x")));
        assert!(!is_pure(&t("p1 (\\x. x)")));
        assert!(!is_pure(&t("\\x. <x, x>")));
    }

    #[test]
    fn subterm_and_replace() {
        assert_eq!(subterm_at(&t("a b"), &vec![1].into()).unwrap(), t("b"));
        assert_eq!(
            replace_at(&t("<a, b>"), &vec![0].into(), &t("c")).unwrap(),
            t("<c, b>")
        );
        assert_eq!(subterm_at(&t("\\x. p1 x"), &vec![0, 0].into()).unwrap(), t("x"));
        assert_eq!(
            subterm_at(&t("a b"), &vec![2].into()),
            Err(TermError::InvalidPosition(vec![2].into()))
        );
        assert!(replace_at(&t("a"), &vec![0].into(), &t("b")).is_err());
    }

    #[test]
    fn replace_captures_enclosing_names() {
        let m = t("\\x. \\y. z");
        let r = replace_at(&m, &vec![0, 0].into(), &t("x y")).unwrap();
        assert_eq!(r, t("\\x. \\y. x y"));
        for p in m.positions() {
            let s = subterm_at(&m, &p).unwrap();
            assert_eq!(replace_at(&m, &p, &s).unwrap(), m);
        }
    }

    #[test]
    fn shadowed_binders_round_trip_through_named_view() {
        let m = t("\\x. \\x. x (\\y. x y)");
        for p in m.positions() {
            let s = subterm_at(&m, &p).unwrap();
            assert_eq!(replace_at(&m, &p, &s).unwrap(), m, "at {p}");
        }
    }

    #[test]
    fn fresh_names_skip_avoid_set() {
        assert_eq!(VarName::fresh(&names(&[])), VarName::new("x0"));
        assert_eq!(VarName::fresh(&names(&["x0", "x1", "x3"])), VarName::new("x2"));
    }

    #[test]
    fn view_opens_binders() {
        match t("\\x. x y").view() {
            View::Abs(n, body) => {
                assert_eq!(n.as_str(), "x");
                assert_eq!(body, t("x y"));
            }
            v => panic!("unexpected {v:?}"),
        }
    }
}
