//! Rewrite axioms, the named relations built from them, single steps in the
//! compatible closure, redex enumeration and bounded reduction.

use std::fmt;

use indexmap::IndexSet;
use thiserror::Error;

use crate::cert::ConvCert;
use crate::term::{is_pure, shift, subst_bound, Node, Position, Side, Term, VarName};

/// The ten rewrite axioms.
///
/// | axiom     | left side        | right side          |
/// |-----------|------------------|---------------------|
/// | `Beta`    | `(\x. M) N`      | `M[x := N]`         |
/// | `Eta`     | `\x. M x`        | `M` (x not in M)    |
/// | `Pi1`     | `p1 <M, N>`      | `M`                 |
/// | `Pi2`     | `p2 <M, N>`      | `N`                 |
/// | `Sp`      | `<p1 M, p2 M>`   | `M`                 |
/// | `EtaExp`  | `M`              | `\x. M x`           |
/// | `SpExp`   | `M`              | `<p1 M, p2 M>`      |
/// | `DeltaPi` | `<M, N> P`       | `<M P, N P>`        |
/// | `Pi1Lam`  | `p1 (\x. M)`     | `\x. p1 M`          |
/// | `Pi2Lam`  | `p2 (\x. M)`     | `\x. p2 M`          |
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Axiom {
    Beta,
    Eta,
    Pi1,
    Pi2,
    Sp,
    EtaExp,
    SpExp,
    DeltaPi,
    Pi1Lam,
    Pi2Lam,
}

impl Axiom {
    pub const ALL: [Axiom; 10] = [
        Axiom::Beta,
        Axiom::Eta,
        Axiom::Pi1,
        Axiom::Pi2,
        Axiom::Sp,
        Axiom::EtaExp,
        Axiom::SpExp,
        Axiom::DeltaPi,
        Axiom::Pi1Lam,
        Axiom::Pi2Lam,
    ];

    /// Name used in certificate files.
    pub fn name(self) -> &'static str {
        match self {
            Axiom::Beta => "beta",
            Axiom::Eta => "eta",
            Axiom::Pi1 => "pi1",
            Axiom::Pi2 => "pi2",
            Axiom::Sp => "sp",
            Axiom::EtaExp => "eta_exp",
            Axiom::SpExp => "sp_exp",
            Axiom::DeltaPi => "delta_pi",
            Axiom::Pi1Lam => "pi1_lam",
            Axiom::Pi2Lam => "pi2_lam",
        }
    }

    pub fn from_name(s: &str) -> Option<Axiom> {
        Axiom::ALL.into_iter().find(|a| a.name() == s)
    }

    pub fn pi(side: Side) -> Axiom {
        match side {
            Side::Fst => Axiom::Pi1,
            Side::Snd => Axiom::Pi2,
        }
    }

    pub fn pi_lam(side: Side) -> Axiom {
        match side {
            Side::Fst => Axiom::Pi1Lam,
            Side::Snd => Axiom::Pi2Lam,
        }
    }

    /// Axioms whose left side cannot be recovered from the right side; a
    /// backward use of them must record its source term.
    pub fn needs_source_backward(self) -> bool {
        matches!(self, Axiom::Beta | Axiom::Pi1 | Axiom::Pi2)
    }

    /// Axioms whose right side contains a binder not present on the left.
    fn introduces_binder(self, dir: Direction) -> bool {
        matches!(
            (self, dir),
            (Axiom::EtaExp, Direction::Forward) | (Axiom::Eta, Direction::Backward)
        )
    }
}

impl fmt::Display for Axiom {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum RelationKind {
    /// Beta, eta and the three surjective pairing equations.
    BetaEtaSp,
    /// The expansion-oriented system: `R` together with `E`.
    Fp,
    /// Beta, projections and the commutation axioms.
    R,
    /// Eta and pairing expansion.
    E,
    /// Beta and eta on pure terms only.
    BetaEtaPure,
    /// Everything oriented as contraction. Not confluent; kept as a control.
    ContractingFp,
}

/// A named relation together with the extensionality switch. Turning
/// extensionality off removes `Eta` and `EtaExp` from every axiom set.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Relation {
    pub kind: RelationKind,
    pub extensional: bool,
}

impl Relation {
    pub fn new(kind: RelationKind, extensional: bool) -> Self {
        Relation { kind, extensional }
    }

    pub fn besp(extensional: bool) -> Self {
        Relation::new(RelationKind::BetaEtaSp, extensional)
    }

    pub fn fp(extensional: bool) -> Self {
        Relation::new(RelationKind::Fp, extensional)
    }

    pub fn r(extensional: bool) -> Self {
        Relation::new(RelationKind::R, extensional)
    }

    pub fn e(extensional: bool) -> Self {
        Relation::new(RelationKind::E, extensional)
    }

    pub fn be(extensional: bool) -> Self {
        Relation::new(RelationKind::BetaEtaPure, extensional)
    }

    pub fn contracting(extensional: bool) -> Self {
        Relation::new(RelationKind::ContractingFp, extensional)
    }

    pub fn axioms(&self) -> Vec<Axiom> {
        use Axiom::*;
        let all: &[Axiom] = match self.kind {
            RelationKind::BetaEtaSp => &[Beta, Eta, Pi1, Pi2, Sp],
            RelationKind::Fp => &[Beta, Pi1, Pi2, EtaExp, SpExp, DeltaPi, Pi1Lam, Pi2Lam],
            RelationKind::R => &[Beta, Pi1, Pi2, DeltaPi, Pi1Lam, Pi2Lam],
            RelationKind::E => &[EtaExp, SpExp],
            RelationKind::BetaEtaPure => &[Beta, Eta],
            RelationKind::ContractingFp => &[Beta, Eta, Pi1, Pi2, Sp, DeltaPi, Pi1Lam, Pi2Lam],
        };
        all.iter()
            .copied()
            .filter(|a| self.extensional || !matches!(a, Eta | EtaExp))
            .collect()
    }

    pub fn contains(&self, a: Axiom) -> bool {
        self.axioms().contains(&a)
    }

    pub fn requires_pure(&self) -> bool {
        self.kind == RelationKind::BetaEtaPure
    }

    /// Short code used in certificate files.
    pub fn code(&self) -> &'static str {
        match self.kind {
            RelationKind::BetaEtaSp => "besp",
            RelationKind::Fp => "fp",
            RelationKind::R => "r",
            RelationKind::E => "e",
            RelationKind::BetaEtaPure => "be",
            RelationKind::ContractingFp => "fp_contract",
        }
    }

    pub fn from_code(code: &str, extensional: bool) -> Option<Relation> {
        let kind = match code {
            "besp" => RelationKind::BetaEtaSp,
            "fp" => RelationKind::Fp,
            "r" => RelationKind::R,
            "e" => RelationKind::E,
            "be" => RelationKind::BetaEtaPure,
            "fp_contract" => RelationKind::ContractingFp,
            _ => return None,
        };
        Some(Relation::new(kind, extensional))
    }
}

impl fmt::Display for Relation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.code())?;
        if !self.extensional {
            f.write_str(" (non-extensional)")?;
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Direction {
    Forward,
    Backward,
}

impl Direction {
    pub fn flip(self) -> Direction {
        match self {
            Direction::Forward => Direction::Backward,
            Direction::Backward => Direction::Forward,
        }
    }

    pub fn symbol(self) -> &'static str {
        match self {
            Direction::Forward => "+",
            Direction::Backward => "-",
        }
    }
}

/// One oriented axiom instance at a position.
///
/// `fresh` names the binder introduced by `EtaExp` (forward) or `Eta`
/// (backward). `source` is the whole term before the step; it is required for
/// backward `Beta`, `Pi1` and `Pi2`, whose pre-images are not determined by
/// the result, and ignored otherwise.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Step {
    pub pos: Position,
    pub axiom: Axiom,
    pub dir: Direction,
    pub fresh: Option<VarName>,
    pub source: Option<Term>,
}

impl Step {
    pub fn new(pos: impl Into<Position>, axiom: Axiom, dir: Direction) -> Step {
        Step {
            pos: pos.into(),
            axiom,
            dir,
            fresh: None,
            source: None,
        }
    }

    pub fn forward(pos: impl Into<Position>, axiom: Axiom) -> Step {
        Step::new(pos, axiom, Direction::Forward)
    }

    pub fn backward(pos: impl Into<Position>, axiom: Axiom) -> Step {
        Step::new(pos, axiom, Direction::Backward)
    }

    pub fn with_fresh(mut self, name: impl Into<VarName>) -> Step {
        self.fresh = Some(name.into());
        self
    }

    pub fn with_source(mut self, source: Term) -> Step {
        self.source = Some(source);
        self
    }

    /// The same step moved below `prefix`.
    pub(crate) fn under(&self, prefix: &[usize]) -> Step {
        let mut p = prefix.to_vec();
        p.extend_from_slice(&self.pos.0);
        Step {
            pos: Position(p),
            ..self.clone()
        }
    }

    /// Same position, axiom and direction.
    pub fn same_shape(&self, other: &Step) -> bool {
        self.pos == other.pos && self.axiom == other.axiom && self.dir == other.dir
    }
}

impl fmt::Display for Step {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}@{}", self.dir.symbol(), self.axiom, self.pos)
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum StepError {
    #[error("invalid position {0}")]
    InvalidPosition(Position),
    #[error("axiom {axiom} ({dir}) does not match the subterm at {pos}", dir = dir.symbol())]
    AxiomMismatch {
        axiom: Axiom,
        dir: Direction,
        pos: Position,
    },
    #[error("axiom {0} is not in relation {1}")]
    AxiomNotInRelation(Axiom, Relation),
    #[error("freshness violation at {pos}: the abstracted variable occurs in the function part")]
    FreshnessViolation { pos: Position },
    #[error("backward {axiom} step at {pos} carries no source term")]
    MissingSource { axiom: Axiom, pos: Position },
    #[error("term is not pure")]
    ImpureTerm,
}

/// The contractum of `m` under axiom `a` at the root, if `m` matches.
pub fn root_step(m: &Term, a: Axiom) -> Option<Term> {
    match (a, m.node()) {
        (Axiom::Beta, Node::App(f, arg)) => match f.node() {
            Node::Abs(_, body) => Some(subst_bound(body, 0, arg)),
            _ => None,
        },
        (Axiom::Eta, Node::Abs(_, body)) => eta_body(body),
        (Axiom::Pi1, Node::Proj(Side::Fst, p)) | (Axiom::Pi2, Node::Proj(Side::Snd, p)) => {
            match p.node() {
                Node::Pair(l, r) => Some(if a == Axiom::Pi1 { l.clone() } else { r.clone() }),
                _ => None,
            }
        }
        (Axiom::Sp, _) => sp_inner(m),
        (Axiom::EtaExp, _) => Some(eta_expand(m, None)),
        (Axiom::SpExp, _) => Some(sp_expand(m)),
        (Axiom::DeltaPi, Node::App(f, p)) => match f.node() {
            Node::Pair(l, r) => Some(Term::pair(
                Term::app(l.clone(), p.clone()),
                Term::app(r.clone(), p.clone()),
            )),
            _ => None,
        },
        (Axiom::Pi1Lam, Node::Proj(Side::Fst, f)) | (Axiom::Pi2Lam, Node::Proj(Side::Snd, f)) => {
            match f.node() {
                Node::Abs(h, body) => {
                    let side = if a == Axiom::Pi1Lam { Side::Fst } else { Side::Snd };
                    Some(Term::abs_raw(h.clone(), Term::proj(side, body.clone())))
                }
                _ => None,
            }
        }
        _ => None,
    }
}

/// `M` from the body `M x` of `\x. M x`, provided x does not occur in M.
fn eta_body(body: &Term) -> Option<Term> {
    match body.node() {
        Node::App(f, x) if matches!(x.node(), Node::Bound(0)) && !f.has_loose(0) => {
            Some(subst_bound(f, 0, x))
        }
        _ => None,
    }
}

fn sp_inner(m: &Term) -> Option<Term> {
    match m.node() {
        Node::Pair(l, r) => match (l.node(), r.node()) {
            (Node::Proj(Side::Fst, a), Node::Proj(Side::Snd, b)) if a == b => Some(a.clone()),
            _ => None,
        },
        _ => None,
    }
}

/// Default binder hint for an eta expansion of `m`.
pub(crate) fn default_fresh(m: &Term) -> VarName {
    VarName::fresh(&m.free_names())
}

/// `\x. m x` with `x` named `hint` (or a fresh default).
pub(crate) fn eta_expand(m: &Term, hint: Option<&VarName>) -> Term {
    let hint = match hint {
        Some(h) if !m.free_names().contains(h) => h.clone(),
        _ => default_fresh(m),
    };
    Term::abs_raw(hint, Term::app(shift(m, 1, 0), Term::bound(0)))
}

pub(crate) fn sp_expand(m: &Term) -> Term {
    Term::pair(Term::fst(m.clone()), Term::snd(m.clone()))
}

/// Rewrite the subterm `sub` (found at `pos` inside `whole`) by one step.
fn local_step(whole: &Term, sub: &Term, s: &Step) -> Result<Term, StepError> {
    let mismatch = || StepError::AxiomMismatch {
        axiom: s.axiom,
        dir: s.dir,
        pos: s.pos.clone(),
    };
    if s.axiom.introduces_binder(s.dir) {
        if let Some(h) = &s.fresh {
            if sub.free_names().contains(h) {
                return Err(StepError::FreshnessViolation { pos: s.pos.clone() });
            }
        }
        return Ok(eta_expand(sub, s.fresh.as_ref()));
    }
    let contracts_eta = matches!(
        (s.axiom, s.dir),
        (Axiom::Eta, Direction::Forward) | (Axiom::EtaExp, Direction::Backward)
    );
    if contracts_eta {
        return match sub.node() {
            Node::Abs(_, body) => match body.node() {
                Node::App(f, x) if matches!(x.node(), Node::Bound(0)) => {
                    if f.has_loose(0) {
                        Err(StepError::FreshnessViolation { pos: s.pos.clone() })
                    } else {
                        Ok(subst_bound(f, 0, x))
                    }
                }
                _ => Err(mismatch()),
            },
            _ => Err(mismatch()),
        };
    }
    match (s.axiom, s.dir) {
        (Axiom::EtaExp, _) | (Axiom::Eta, _) => unreachable!("handled above"),
        (Axiom::SpExp, Direction::Forward) | (Axiom::Sp, Direction::Backward) => Ok(sp_expand(sub)),
        (Axiom::SpExp, Direction::Backward) => sp_inner(sub).ok_or_else(mismatch),
        (a, Direction::Forward) => root_step(sub, a).ok_or_else(mismatch),
        (Axiom::DeltaPi, Direction::Backward) => match sub.node() {
            Node::Pair(l, r) => match (l.node(), r.node()) {
                (Node::App(a, c1), Node::App(b, c2)) if c1 == c2 => Ok(Term::app(
                    Term::pair(a.clone(), b.clone()),
                    c1.clone(),
                )),
                _ => Err(mismatch()),
            },
            _ => Err(mismatch()),
        },
        (Axiom::Pi1Lam | Axiom::Pi2Lam, Direction::Backward) => {
            let side = if s.axiom == Axiom::Pi1Lam { Side::Fst } else { Side::Snd };
            match sub.node() {
                Node::Abs(h, body) => match body.node() {
                    Node::Proj(sd, inner) if *sd == side => {
                        Ok(Term::proj(side, Term::abs_raw(h.clone(), inner.clone())))
                    }
                    _ => Err(mismatch()),
                },
                _ => Err(mismatch()),
            }
        }
        (a, Direction::Backward) => {
            // Beta, Pi1, Pi2 backwards: the source term is the witness.
            let source = s.source.as_ref().ok_or_else(|| StepError::MissingSource {
                axiom: a,
                pos: s.pos.clone(),
            })?;
            let redex = source.at(&s.pos.0).ok_or_else(mismatch)?;
            match root_step(redex, a) {
                Some(r) if r == *sub => {}
                _ => return Err(mismatch()),
            }
            if source.replace(&s.pos.0, sub.clone()).as_ref() != Some(whole) {
                return Err(mismatch());
            }
            Ok(redex.clone())
        }
    }
}

/// Apply one step anywhere in `m`.
pub fn apply_step(m: &Term, s: &Step) -> Result<Term, StepError> {
    let sub = m
        .at(&s.pos.0)
        .ok_or_else(|| StepError::InvalidPosition(s.pos.clone()))?;
    let new = local_step(m, sub, s)?;
    Ok(m.replace(&s.pos.0, new).expect("position already resolved"))
}

/// Apply a step after checking that the axiom belongs to `r` and, for the
/// pure relation, that both terms are pure.
pub fn apply_step_in(m: &Term, s: &Step, r: &Relation) -> Result<Term, StepError> {
    if !r.contains(s.axiom) {
        return Err(StepError::AxiomNotInRelation(s.axiom, *r));
    }
    if r.requires_pure() && !is_pure(m) {
        return Err(StepError::ImpureTerm);
    }
    let out = apply_step(m, s)?;
    if r.requires_pure() && !is_pure(&out) {
        return Err(StepError::ImpureTerm);
    }
    Ok(out)
}

/// All forward redexes of `r` in `m`, positions in pre-order, axioms in
/// declaration order.
pub fn redexes(m: &Term, r: &Relation) -> Vec<(Position, Axiom)> {
    if r.requires_pure() && !is_pure(m) {
        return Vec::new();
    }
    let axioms = r.axioms();
    let mut out = Vec::new();
    for p in m.positions() {
        let sub = m.at(&p.0).expect("own position");
        for &a in &axioms {
            if root_step(sub, a).is_some() {
                out.push((p.clone(), a));
            }
        }
    }
    out
}

/// One-step successors of `m` under `r`.
pub fn successors(m: &Term, r: &Relation) -> Vec<(Step, Term)> {
    redexes(m, r)
        .into_iter()
        .map(|(p, a)| {
            let s = Step::forward(p, a);
            let t = apply_step(m, &s).expect("listed redex applies");
            (s, t)
        })
        .collect()
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Strategy {
    LeftmostOutermost,
    /// Breadth-first exploration of every redex; terms larger than the bound
    /// are not explored.
    FullEnumeration { size_bound: usize },
}

#[derive(Clone, Debug)]
pub struct Trace {
    pub cert: ConvCert,
    pub terms: Vec<Term>,
    /// The last term has no redex.
    pub normal_form: bool,
}

impl Trace {
    pub fn last(&self) -> &Term {
        self.terms.last().expect("trace is never empty")
    }
}

#[derive(Clone, Debug)]
pub enum Reduction {
    Trace(Trace),
    Reachable(IndexSet<Term>),
}

pub fn reduce_bounded(m: &Term, r: &Relation, fuel: usize, strategy: Strategy) -> Reduction {
    match strategy {
        Strategy::LeftmostOutermost => Reduction::Trace(reduce_leftmost(m, r, fuel)),
        Strategy::FullEnumeration { size_bound } => {
            Reduction::Reachable(reachable(m, r, fuel, size_bound))
        }
    }
}

/// Contract the leftmost-outermost redex up to `fuel` times.
pub fn reduce_leftmost(m: &Term, r: &Relation, fuel: usize) -> Trace {
    let mut terms = vec![m.clone()];
    let mut steps = Vec::new();
    let mut cur = m.clone();
    for _ in 0..fuel {
        let Some((p, a)) = redexes(&cur, r).into_iter().next() else {
            break;
        };
        let s = Step::forward(p, a);
        cur = apply_step(&cur, &s).expect("listed redex applies");
        steps.push(s);
        terms.push(cur.clone());
    }
    let normal_form = redexes(&cur, r).is_empty();
    Trace {
        cert: ConvCert::new(m.clone(), steps),
        terms,
        normal_form,
    }
}

/// Every term reachable in at most `fuel` steps, skipping terms larger than
/// `size_bound`. Deduplicated up to alpha, in discovery order.
pub fn reachable(m: &Term, r: &Relation, fuel: usize, size_bound: usize) -> IndexSet<Term> {
    let mut seen = IndexSet::new();
    seen.insert(m.clone());
    let mut frontier = vec![m.clone()];
    for _ in 0..fuel {
        let mut next = Vec::new();
        for t in &frontier {
            for (_, u) in successors(t, r) {
                if u.size() <= size_bound && seen.insert(u.clone()) {
                    next.push(u);
                }
            }
        }
        if next.is_empty() {
            break;
        }
        frontier = next;
    }
    seen
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;
    use std::collections::BTreeSet;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    #[test]
    fn root_step_examples() {
        assert_eq!(root_step(&t("<m, n> p"), Axiom::DeltaPi), Some(t("<m p, n p>")));
        assert_eq!(root_step(&t("p1 (\\x. m)"), Axiom::Pi1Lam), Some(t("\\x. p1 m")));
        assert_eq!(root_step(&t("x"), Axiom::Beta), None);
        assert_eq!(root_step(&t("p2 <a, b>"), Axiom::Pi2), Some(t("b")));
        assert_eq!(root_step(&t("p2 <a, b>"), Axiom::Pi1), None);
        assert_eq!(root_step(&t("<p1 m, p2 m>"), Axiom::Sp), Some(t("m")));
        assert_eq!(root_step(&t("<p1 m, p2 n>"), Axiom::Sp), None);
        assert_eq!(root_step(&t("\\x. f x x"), Axiom::Eta), None);
        assert_eq!(root_step(&t("\\x. y x"), Axiom::Eta), Some(t("y")));
        assert_eq!(root_step(&t("m"), Axiom::EtaExp), Some(t("\\x. m x")));
    }

    #[test]
    fn apply_step_examples() {
        let s = Step::forward(vec![], Axiom::Beta);
        assert_eq!(apply_step(&t("(\\x. x) y"), &s).unwrap(), t("y"));
        let s = Step::forward(vec![], Axiom::SpExp);
        assert_eq!(apply_step(&t("m"), &s).unwrap(), t("<p1 m, p2 m>"));
        let s = Step::forward(vec![], Axiom::Eta);
        assert_eq!(apply_step(&t("\\x. y x"), &s).unwrap(), t("y"));
    }

    #[test]
    fn step_errors() {
        let s = Step::forward(vec![1], Axiom::Beta);
        assert!(matches!(apply_step(&t("x"), &s), Err(StepError::InvalidPosition(_))));
        let s = Step::forward(vec![], Axiom::Pi1);
        assert!(matches!(apply_step(&t("x y"), &s), Err(StepError::AxiomMismatch { .. })));
        let s = Step::forward(vec![], Axiom::Eta);
        assert!(matches!(
            apply_step(&t("\\x. x x"), &s),
            Err(StepError::FreshnessViolation { .. })
        ));
        let s = Step::forward(vec![], Axiom::EtaExp).with_fresh("y");
        assert!(matches!(apply_step(&t("y"), &s), Err(StepError::FreshnessViolation { .. })));
        let s = Step::backward(vec![], Axiom::Beta);
        assert!(matches!(apply_step(&t("y"), &s), Err(StepError::MissingSource { .. })));
    }

    #[test]
    fn backward_steps() {
        let m = t("<m p, n p>");
        let s = Step::backward(vec![], Axiom::DeltaPi);
        assert_eq!(apply_step(&m, &s).unwrap(), t("<m, n> p"));
        let s = Step::backward(vec![], Axiom::Pi1).with_source(t("p1 <y, z>"));
        assert_eq!(apply_step(&t("y"), &s).unwrap(), t("p1 <y, z>"));
        let s = Step::backward(vec![], Axiom::Pi1).with_source(t("p1 <w, z>"));
        assert!(apply_step(&t("y"), &s).is_err());
        let s = Step::backward(vec![0], Axiom::Beta).with_source(t("\\v. (\\u. u) v"));
        assert_eq!(apply_step(&t("\\v. v"), &s).unwrap(), t("\\v. (\\u. u) v"));
        let s = Step::backward(vec![], Axiom::EtaExp);
        assert_eq!(apply_step(&t("\\x. f x"), &s).unwrap(), t("f"));
        let s = Step::backward(vec![], Axiom::Pi2Lam);
        assert_eq!(apply_step(&t("\\x. p2 x"), &s).unwrap(), t("p2 (\\x. x)"));
        let s = Step::backward(vec![], Axiom::Sp);
        assert_eq!(apply_step(&t("m"), &s).unwrap(), t("<p1 m, p2 m>"));
    }

    #[test]
    fn redex_listing() {
        assert!(redexes(&t("x"), &Relation::r(true)).is_empty());
        assert_eq!(
            redexes(&t("x"), &Relation::e(true)),
            vec![(Position::root(), Axiom::EtaExp), (Position::root(), Axiom::SpExp)]
        );
        assert_eq!(
            redexes(&t("p1 <a, b> c"), &Relation::r(true)),
            vec![(Position(vec![0]), Axiom::Pi1)]
        );
        assert_eq!(redexes(&t("x"), &Relation::e(false)), vec![(Position::root(), Axiom::SpExp)]);
    }

    #[test]
    fn relation_axiom_sets() {
        let fp: BTreeSet<_> = Relation::fp(true).axioms().into_iter().collect();
        let mut ru: BTreeSet<_> = Relation::r(true).axioms().into_iter().collect();
        ru.extend(Relation::e(true).axioms());
        assert_eq!(fp, ru);
        for kind in [
            RelationKind::BetaEtaSp,
            RelationKind::Fp,
            RelationKind::R,
            RelationKind::E,
            RelationKind::BetaEtaPure,
            RelationKind::ContractingFp,
        ] {
            let r = Relation::new(kind, false);
            assert!(!r.contains(Axiom::Eta) && !r.contains(Axiom::EtaExp));
            assert_eq!(Relation::from_code(r.code(), false), Some(r));
        }
    }

    #[test]
    fn bounded_reduction() {
        let tr = reduce_leftmost(&t("(\\x. x) y"), &Relation::r(true), 10);
        assert_eq!(tr.last(), &t("y"));
        assert!(tr.normal_form);
        let tr = reduce_leftmost(&t("p1 <a, b>"), &Relation::r(true), 1);
        assert_eq!(tr.terms, vec![t("p1 <a, b>"), t("a")]);
        let set = reachable(&t("<p1 (\\x. x), p2 (\\x. x)>"), &Relation::r(true), 10, 64);
        assert!(set.contains(&t("<\\x. p1 x, \\x. p2 x>")));
    }

    #[test]
    fn purity_is_enforced_for_the_pure_relation() {
        let r = Relation::be(true);
        let s = Step::forward(vec![], Axiom::Beta);
        assert_eq!(apply_step_in(&t("(\\x. x) <a, b>"), &s, &r), Err(StepError::ImpureTerm));
        let s = Step::forward(vec![], Axiom::Pi1);
        assert!(matches!(
            apply_step_in(&t("p1 <a, b>"), &s, &r),
            Err(StepError::AxiomNotInRelation(..))
        ));
    }
}
