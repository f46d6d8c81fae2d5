//! Conversion certificates: a start term plus a list of steps. Intermediate
//! terms are never stored; every consumer replays.

use thiserror::Error;

use crate::rewrite::{apply_step, apply_step_in, Axiom, Direction, Relation, Step, StepError};
use crate::term::{
    close_with, context_names, shift, subst_bound, subst_free, Node, Position, Term, TermError,
    VarName,
};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct ConvCert {
    pub start: Term,
    pub steps: Vec<Step>,
}

/// A failing step and why.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
#[error("step {index}: {cause}")]
pub struct CertError {
    pub index: usize,
    pub cause: StepError,
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CertOpError {
    #[error("junction mismatch: first certificate ends at `{left}`, second starts at `{right}`")]
    JunctionMismatch { left: Term, right: Term },
    #[error("invalid hole: {0}")]
    InvalidHole(#[from] TermError),
    #[error(transparent)]
    Invalid(#[from] CertError),
}

impl ConvCert {
    pub fn new(start: Term, steps: Vec<Step>) -> Self {
        ConvCert { start, steps }
    }

    pub fn empty(start: Term) -> Self {
        ConvCert::new(start, Vec::new())
    }

    pub fn len(&self) -> usize {
        self.steps.len()
    }

    pub fn is_empty(&self) -> bool {
        self.steps.is_empty()
    }

    pub fn is_forward_only(&self) -> bool {
        self.steps.iter().all(|s| s.dir == Direction::Forward)
    }

    /// Every intermediate term, start first.
    pub fn replay(&self) -> Result<Vec<Term>, CertError> {
        let mut terms = Vec::with_capacity(self.steps.len() + 1);
        let mut cur = self.start.clone();
        terms.push(cur.clone());
        for (index, s) in self.steps.iter().enumerate() {
            cur = apply_step(&cur, s).map_err(|cause| CertError { index, cause })?;
            terms.push(cur.clone());
        }
        Ok(terms)
    }

    /// The last term, without any relation check.
    pub fn end(&self) -> Result<Term, CertError> {
        let mut cur = self.start.clone();
        for (index, s) in self.steps.iter().enumerate() {
            cur = apply_step(&cur, s).map_err(|cause| CertError { index, cause })?;
        }
        Ok(cur)
    }

    /// Steps moved below `prefix`, with `outer` supplying the surrounding
    /// term (its subterm at `prefix` is ignored). Raw grafting.
    pub(crate) fn lift(&self, outer: &Term, prefix: &[usize]) -> ConvCert {
        let graft = |t: &Term| outer.replace(prefix, t.clone()).expect("valid hole");
        ConvCert {
            start: graft(&self.start),
            steps: self
                .steps
                .iter()
                .map(|s| {
                    let mut s = s.under(prefix);
                    s.source = s.source.as_ref().map(graft);
                    s
                })
                .collect(),
        }
    }

    /// Append steps, trusting the junction.
    pub(crate) fn extend(&mut self, other: ConvCert) {
        self.steps.extend(other.steps);
    }
}

/// Replay `c`, checking every step against `r`; returns the final term.
pub fn check_cert(c: &ConvCert, r: &Relation) -> Result<Term, CertError> {
    let mut cur = c.start.clone();
    if r.requires_pure() && !crate::term::is_pure(&cur) {
        return Err(CertError {
            index: 0,
            cause: StepError::ImpureTerm,
        });
    }
    for (index, s) in c.steps.iter().enumerate() {
        cur = apply_step_in(&cur, s, r).map_err(|cause| CertError { index, cause })?;
    }
    Ok(cur)
}

/// Translate a certificate over the surjective-pairing theory into the
/// expansion-oriented system: `Eta` becomes `EtaExp` and `Sp` becomes
/// `SpExp`, each with the direction flipped.
pub fn embed_besp_in_fp(c: &ConvCert) -> Result<ConvCert, CertError> {
    check_cert(c, &Relation::besp(true))?;
    let terms = c.replay()?;
    let steps = c
        .steps
        .iter()
        .enumerate()
        .map(|(i, s)| {
            let (axiom, dir) = match s.axiom {
                Axiom::Eta => (Axiom::EtaExp, s.dir.flip()),
                Axiom::Sp => (Axiom::SpExp, s.dir.flip()),
                a => (a, s.dir),
            };
            let mut out = Step::new(s.pos.clone(), axiom, dir);
            if axiom == Axiom::EtaExp && dir == Direction::Forward {
                out.fresh = binder_hint(&terms[i + 1], &s.pos);
            }
            if dir == Direction::Backward && axiom.needs_source_backward() {
                out.source = Some(terms[i + 1].clone());
            }
            out
        })
        .collect();
    Ok(ConvCert::new(c.start.clone(), steps))
}

fn binder_hint(t: &Term, pos: &Position) -> Option<VarName> {
    match t.at(&pos.0)?.node() {
        Node::Abs(h, _) => Some(h.clone()),
        _ => None,
    }
}

/// The converse certificate: reversed order, flipped directions. Backward
/// steps that need a source get one from the replay.
pub fn invert(c: &ConvCert) -> Result<ConvCert, CertError> {
    let terms = c.replay()?;
    let n = c.steps.len();
    let mut steps = Vec::with_capacity(n);
    for i in (0..n).rev() {
        let s = &c.steps[i];
        let dir = s.dir.flip();
        let mut out = Step::new(s.pos.clone(), s.axiom, dir);
        let intro = matches!(
            (s.axiom, dir),
            (Axiom::EtaExp, Direction::Forward) | (Axiom::Eta, Direction::Backward)
        );
        if intro {
            out.fresh = binder_hint(&terms[i], &s.pos);
        }
        if dir == Direction::Backward && s.axiom.needs_source_backward() {
            out.source = Some(terms[i].clone());
        }
        steps.push(out);
    }
    Ok(ConvCert::new(terms[n].clone(), steps))
}

/// `c1` followed by `c2`; the end of `c1` must be alpha-equal to the start of
/// `c2`.
pub fn concat(c1: &ConvCert, c2: &ConvCert) -> Result<ConvCert, CertOpError> {
    let end = c1.end()?;
    if end != c2.start {
        return Err(CertOpError::JunctionMismatch {
            left: end,
            right: c2.start.clone(),
        });
    }
    let mut out = c1.clone();
    out.extend(c2.clone());
    Ok(out)
}

/// Congruence: place `c` at `hole` inside `outer`. Free names of the
/// certificate that coincide with binder names above the hole are captured,
/// as with [`crate::term::replace_at`].
pub fn under_context(c: &ConvCert, outer: &Term, hole: &Position) -> Result<ConvCert, CertOpError> {
    outer
        .at(&hole.0)
        .ok_or_else(|| TermError::InvalidPosition(hole.clone()))?;
    let ctx = context_names(outer, &hole.0).expect("hole resolved");
    let closed = if ctx.is_empty() {
        c.clone()
    } else {
        map_cert(c, &TermMap::CloseWith(&ctx))?
    };
    Ok(closed.lift(outer, &hole.0))
}

/// A certificate from `c.start[x := n]` to `end[x := n]`.
pub fn cert_subst(c: &ConvCert, x: &VarName, n: &Term) -> Result<ConvCert, CertError> {
    map_cert(c, &TermMap::SubstFree(x, n))
}

/// Term transformations that commute with every axiom instance.
pub(crate) enum TermMap<'a> {
    SubstFree(&'a VarName, &'a Term),
    /// Replace dangling index `k` (lowering those above it).
    SubstBound(u32, &'a Term),
    Shift { by: u32, cutoff: u32 },
    CloseWith(&'a [VarName]),
}

impl TermMap<'_> {
    pub(crate) fn apply(&self, t: &Term) -> Term {
        match self {
            TermMap::SubstFree(x, n) => subst_free(t, x, n),
            TermMap::SubstBound(k, v) => subst_bound(t, *k, v),
            TermMap::Shift { by, cutoff } => shift(t, *by, *cutoff),
            TermMap::CloseWith(ctx) => close_with(t, ctx),
        }
    }
}

/// Apply a map to the start and every recorded source. Binder hints that
/// would now clash with a free name are replaced.
pub(crate) fn map_cert(c: &ConvCert, f: &TermMap<'_>) -> Result<ConvCert, CertError> {
    let start = f.apply(&c.start);
    let mut cur = start.clone();
    let mut steps = Vec::with_capacity(c.steps.len());
    for (index, s) in c.steps.iter().enumerate() {
        let mut s2 = s.clone();
        s2.source = s.source.as_ref().map(|t| f.apply(t));
        if let Some(h) = &s2.fresh {
            if let Some(sub) = cur.at(&s2.pos.0) {
                if sub.free_names().contains(h) {
                    s2.fresh = Some(VarName::fresh(&sub.free_names()));
                }
            }
        }
        cur = apply_step(&cur, &s2).map_err(|cause| CertError { index, cause })?;
        steps.push(s2);
    }
    Ok(ConvCert::new(start, steps))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn check_examples() {
        let c = ConvCert::new(t("(\\x. x) y"), vec![Step::forward(vec![], Axiom::Beta)]);
        assert_eq!(check_cert(&c, &Relation::besp(true)).unwrap(), t("y"));
        let c = ConvCert::new(t("m"), vec![Step::backward(vec![], Axiom::Sp)]);
        assert_eq!(check_cert(&c, &Relation::besp(true)).unwrap(), t("<p1 m, p2 m>"));
        let c = ConvCert::new(t("a b"), vec![Step::forward(vec![], Axiom::Pi1)]);
        let e = check_cert(&c, &Relation::besp(true)).unwrap_err();
        assert_eq!(e.index, 0);
        assert!(matches!(e.cause, StepError::AxiomMismatch { .. }));
        let c = ConvCert::new(t("p1 <a, b>"), vec![Step::forward(vec![], Axiom::Pi1)]);
        assert!(matches!(
            check_cert(&c, &Relation::e(true)).unwrap_err().cause,
            StepError::AxiomNotInRelation(..)
        ));
    }

    #[test]
    fn embed_examples() {
        let c = ConvCert::new(t("\\x. y x"), vec![Step::forward(vec![], Axiom::Eta)]);
        let e = embed_besp_in_fp(&c).unwrap();
        assert!(e.steps[0].same_shape(&Step::backward(vec![], Axiom::EtaExp)));
        assert_eq!(check_cert(&e, &Relation::fp(true)).unwrap(), t("y"));

        let c = ConvCert::new(t("(\\x. x) y"), vec![Step::forward(vec![], Axiom::Beta)]);
        assert_eq!(embed_besp_in_fp(&c).unwrap(), c);

        let c = ConvCert::new(t("<a, m>"), vec![Step::backward(vec![0], Axiom::Sp)]);
        let e = embed_besp_in_fp(&c).unwrap();
        assert!(e.steps[0].same_shape(&Step::forward(vec![0], Axiom::SpExp)));
        assert_eq!(check_cert(&e, &Relation::fp(true)).unwrap(), t("<<p1 a, p2 a>, m>"));
    }

    #[test]
    fn invert_beta() {
        let c = ConvCert::new(t("(\\x. x) y"), vec![Step::forward(vec![], Axiom::Beta)]);
        let i = invert(&c).unwrap();
        assert_eq!(i.start, t("y"));
        assert_eq!(i.steps[0].dir, Direction::Backward);
        assert_eq!(check_cert(&i, &Relation::besp(true)).unwrap(), t("(\\x. x) y"));
        assert_eq!(invert(&i).unwrap().steps, c.steps);
    }

    #[test]
    fn invert_eta_expansion_keeps_binder() {
        let c = ConvCert::new(t("\\f. \\y. f y"), vec![Step::forward(vec![0], Axiom::Eta)]);
        let i = invert(&c).unwrap();
        assert_eq!(i.steps[0].fresh, Some(VarName::new("y")));
        assert_eq!(check_cert(&i, &Relation::besp(true)).unwrap(), c.start);
    }

    #[test]
    fn concat_checks_junction() {
        let a = ConvCert::new(t("(\\x. x) y"), vec![Step::forward(vec![], Axiom::Beta)]);
        let b = ConvCert::new(t("y"), vec![Step::backward(vec![], Axiom::Sp)]);
        let ab = concat(&a, &b).unwrap();
        assert_eq!(check_cert(&ab, &Relation::besp(true)).unwrap(), t("<p1 y, p2 y>"));
        assert!(matches!(concat(&b, &a), Err(CertOpError::JunctionMismatch { .. })));
    }

    #[test]
    fn congruence() {
        let c = ConvCert::new(t("p1 <a, d>"), vec![Step::forward(vec![], Axiom::Pi1)]);
        let u = under_context(&c, &t("<z, c>"), &Position(vec![0])).unwrap();
        assert_eq!(u.start, t("<p1 <a, d>, c>"));
        assert_eq!(check_cert(&u, &Relation::besp(true)).unwrap(), t("<a, c>"));
        assert!(under_context(&c, &t("z"), &Position(vec![0])).is_err());
        // Free names matching binders above the hole are captured.
        let c = ConvCert::new(t("(\\y. y) x"), vec![Step::forward(vec![], Axiom::Beta)]);
        let u = under_context(&c, &t("\\x. z"), &Position(vec![0])).unwrap();
        assert_eq!(u.start, t("\\x. (\\y. y) x"));
        assert_eq!(check_cert(&u, &Relation::besp(true)).unwrap(), t("\\x. x"));
    }

    #[test]
    fn substitution_closure() {
        let c = ConvCert::new(t("(\\y. y) x"), vec![Step::forward(vec![], Axiom::Beta)]);
        let s = cert_subst(&c, &VarName::new("x"), &t("z")).unwrap();
        assert_eq!(check_cert(&s, &Relation::besp(true)).unwrap(), t("z"));
        // Hints are repaired when the substituted term captures them.
        let c = ConvCert::new(t("w"), vec![Step::forward(vec![], Axiom::EtaExp).with_fresh("x0")]);
        let s = cert_subst(&c, &VarName::new("w"), &t("x0")).unwrap();
        assert_eq!(check_cert(&s, &Relation::fp(true)).unwrap(), t("\\v. x0 v"));
        // Backward steps keep their sources in sync.
        let c = invert(&ConvCert::new(t("(\\y. w) x"), vec![Step::forward(vec![], Axiom::Beta)])).unwrap();
        let s = cert_subst(&c, &VarName::new("x"), &t("q")).unwrap();
        assert_eq!(check_cert(&s, &Relation::besp(true)).unwrap(), t("(\\y. w) q"));
    }
}
