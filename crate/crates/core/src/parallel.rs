//! Parallel reduction (`=>R`) and parallel expansion (`=>E`) as explicit
//! derivation trees, with flattening, substitution and the constructive
//! diamond property for both.
//!
//! Derivations work on the internal representation: below a binder, terms
//! refer to it through a dangling index. Every node stores its endpoints,
//! computed by the smart constructors, so a derivation is valid by
//! construction; [`ParR::validate`] and [`ParE::validate`] re-derive them
//! independently.

use std::sync::Arc;

use serde_json::{json, Value};

use crate::cert::ConvCert;
use crate::rewrite::{default_fresh, Axiom, Direction, Step, StepError};
use crate::term::{shift, subst_bound, subst_free, Node, Side, Term, VarName};

/// A derivation of `source =>R target`.
#[derive(Clone, Debug)]
pub struct ParR {
    src: Term,
    tgt: Term,
    rule: RuleR,
}

#[derive(Clone, Debug)]
pub enum RuleR {
    Refl,
    /// `(\x. M) N => M'[x := N']`.
    Beta {
        hint: VarName,
        body: Arc<ParR>,
        arg: Arc<ParR>,
    },
    /// `pi <M1, M2> => Mi'`; `other` is the discarded component.
    Pi {
        side: Side,
        kept: Arc<ParR>,
        other: Term,
    },
    /// `<M, N> P => <M' P', N' P'>`.
    DeltaPi {
        left: Arc<ParR>,
        right: Arc<ParR>,
        arg: Arc<ParR>,
    },
    /// `pi (\x. M) => \x. pi M'`.
    PiLam {
        side: Side,
        hint: VarName,
        body: Arc<ParR>,
    },
    Abs {
        hint: VarName,
        body: Arc<ParR>,
    },
    App(Arc<ParR>, Arc<ParR>),
    Pair(Arc<ParR>, Arc<ParR>),
    Proj(Side, Arc<ParR>),
}

/// A derivation of `source =>E target`.
#[derive(Clone, Debug)]
pub struct ParE {
    src: Term,
    tgt: Term,
    rule: RuleE,
}

#[derive(Clone, Debug)]
pub enum RuleE {
    Refl,
    /// `M => \x. M' x`.
    Eta { hint: VarName, inner: Arc<ParE> },
    /// `M => <p1 M', p2 M'>`.
    Sp { inner: Arc<ParE> },
    Abs { hint: VarName, body: Arc<ParE> },
    App(Arc<ParE>, Arc<ParE>),
    Pair(Arc<ParE>, Arc<ParE>),
    Proj(Side, Arc<ParE>),
}

/// What a substitution replaces: a free name, or a dangling index.
#[derive(Clone, Debug)]
enum Target {
    Free(VarName),
    Bound(u32),
}

impl Target {
    fn under_binder(&self) -> Target {
        match self {
            Target::Free(x) => Target::Free(x.clone()),
            Target::Bound(k) => Target::Bound(k + 1),
        }
    }

    fn occurs_in(&self, t: &Term) -> bool {
        match self {
            Target::Free(x) => t.free_names().contains(x),
            Target::Bound(k) => t.has_loose(*k),
        }
    }

    fn apply(&self, t: &Term, value: &Term) -> Term {
        match self {
            Target::Free(x) => subst_free(t, x, value),
            Target::Bound(k) => subst_bound(t, *k, value),
        }
    }

    fn matches_leaf(&self, t: &Term) -> bool {
        match (self, t.node()) {
            (Target::Free(x), Node::Free(y)) => x == y,
            (Target::Bound(k), Node::Bound(i)) => k == i,
            _ => false,
        }
    }
}

fn a<T>(x: T) -> Arc<T> {
    Arc::new(x)
}

// ---------------------------------------------------------------------------
// =>R

impl ParR {
    pub fn source(&self) -> &Term {
        &self.src
    }

    pub fn target(&self) -> &Term {
        &self.tgt
    }

    pub fn rule(&self) -> &RuleR {
        &self.rule
    }

    pub fn is_refl(&self) -> bool {
        matches!(self.rule, RuleR::Refl)
    }

    pub fn refl(m: Term) -> ParR {
        ParR {
            src: m.clone(),
            tgt: m,
            rule: RuleR::Refl,
        }
    }

    pub(crate) fn beta_raw(hint: VarName, body: ParR, arg: ParR) -> ParR {
        ParR {
            src: Term::app(Term::abs_raw(hint.clone(), body.src.clone()), arg.src.clone()),
            tgt: subst_bound(&body.tgt, 0, &arg.tgt),
            rule: RuleR::Beta {
                hint,
                body: a(body),
                arg: a(arg),
            },
        }
    }

    /// `(\x. M) N => M'[x := N']` from `M => M'` (over the free name `x`) and
    /// `N => N'`.
    pub fn beta(x: impl Into<VarName>, body: ParR, arg: ParR) -> ParR {
        let x = x.into();
        let body = ParR::bind(&x, body);
        ParR::beta_raw(x, body, arg)
    }

    pub fn pi(side: Side, kept: ParR, other: Term) -> ParR {
        let pair = match side {
            Side::Fst => Term::pair(kept.src.clone(), other.clone()),
            Side::Snd => Term::pair(other.clone(), kept.src.clone()),
        };
        ParR {
            src: Term::proj(side, pair),
            tgt: kept.tgt.clone(),
            rule: RuleR::Pi {
                side,
                kept: a(kept),
                other,
            },
        }
    }

    pub fn delta_pi(left: ParR, right: ParR, arg: ParR) -> ParR {
        ParR {
            src: Term::app(Term::pair(left.src.clone(), right.src.clone()), arg.src.clone()),
            tgt: Term::pair(
                Term::app(left.tgt.clone(), arg.tgt.clone()),
                Term::app(right.tgt.clone(), arg.tgt.clone()),
            ),
            rule: RuleR::DeltaPi {
                left: a(left),
                right: a(right),
                arg: a(arg),
            },
        }
    }

    pub(crate) fn pi_lam_raw(side: Side, hint: VarName, body: ParR) -> ParR {
        ParR {
            src: Term::proj(side, Term::abs_raw(hint.clone(), body.src.clone())),
            tgt: Term::abs_raw(hint.clone(), Term::proj(side, body.tgt.clone())),
            rule: RuleR::PiLam {
                side,
                hint,
                body: a(body),
            },
        }
    }

    pub fn pi_lam(side: Side, x: impl Into<VarName>, body: ParR) -> ParR {
        let x = x.into();
        let body = ParR::bind(&x, body);
        ParR::pi_lam_raw(side, x, body)
    }

    pub(crate) fn abs_raw(hint: VarName, body: ParR) -> ParR {
        ParR {
            src: Term::abs_raw(hint.clone(), body.src.clone()),
            tgt: Term::abs_raw(hint.clone(), body.tgt.clone()),
            rule: RuleR::Abs { hint, body: a(body) },
        }
    }

    /// `\x. M => \x. M'`, binding the free name `x`.
    pub fn lam(x: impl Into<VarName>, body: ParR) -> ParR {
        let x = x.into();
        let body = ParR::bind(&x, body);
        ParR::abs_raw(x, body)
    }

    pub fn app(f: ParR, arg: ParR) -> ParR {
        ParR {
            src: Term::app(f.src.clone(), arg.src.clone()),
            tgt: Term::app(f.tgt.clone(), arg.tgt.clone()),
            rule: RuleR::App(a(f), a(arg)),
        }
    }

    pub fn pair(l: ParR, r: ParR) -> ParR {
        ParR {
            src: Term::pair(l.src.clone(), r.src.clone()),
            tgt: Term::pair(l.tgt.clone(), r.tgt.clone()),
            rule: RuleR::Pair(a(l), a(r)),
        }
    }

    pub fn proj(side: Side, d: ParR) -> ParR {
        ParR {
            src: Term::proj(side, d.src.clone()),
            tgt: Term::proj(side, d.tgt.clone()),
            rule: RuleR::Proj(side, a(d)),
        }
    }

    /// Turn the free name `x` into the index of a new enclosing binder.
    fn bind(x: &VarName, d: ParR) -> ParR {
        par_r_subst_target(&d, &Target::Free(x.clone()), &ParR::refl(Term::bound(0)))
    }

    /// Recompute every endpoint from the leaves and compare.
    pub fn validate(&self) -> Result<(), String> {
        let (s, t) = self.recompute()?;
        if s != self.src || t != self.tgt {
            return Err(format!("endpoint mismatch at {}", self.rule_name()));
        }
        Ok(())
    }

    fn recompute(&self) -> Result<(Term, Term), String> {
        let check = |d: &ParR| -> Result<(Term, Term), String> {
            let (s, t) = d.recompute()?;
            if s != d.src || t != d.tgt {
                return Err(format!("endpoint mismatch at {}", d.rule_name()));
            }
            Ok((s, t))
        };
        Ok(match &self.rule {
            RuleR::Refl => (self.src.clone(), self.src.clone()),
            RuleR::Beta { hint, body, arg } => {
                let (bs, bt) = check(body)?;
                let (as_, at) = check(arg)?;
                (
                    Term::app(Term::abs_raw(hint.clone(), bs), as_),
                    subst_bound(&bt, 0, &at),
                )
            }
            RuleR::Pi { side, kept, other } => {
                let (ks, kt) = check(kept)?;
                let pair = match side {
                    Side::Fst => Term::pair(ks, other.clone()),
                    Side::Snd => Term::pair(other.clone(), ks),
                };
                (Term::proj(*side, pair), kt)
            }
            RuleR::DeltaPi { left, right, arg } => {
                let (ls, lt) = check(left)?;
                let (rs, rt) = check(right)?;
                let (ps, pt) = check(arg)?;
                (
                    Term::app(Term::pair(ls, rs), ps),
                    Term::pair(Term::app(lt, pt.clone()), Term::app(rt, pt)),
                )
            }
            RuleR::PiLam { side, hint, body } => {
                let (bs, bt) = check(body)?;
                (
                    Term::proj(*side, Term::abs_raw(hint.clone(), bs)),
                    Term::abs_raw(hint.clone(), Term::proj(*side, bt)),
                )
            }
            RuleR::Abs { hint, body } => {
                let (bs, bt) = check(body)?;
                (Term::abs_raw(hint.clone(), bs), Term::abs_raw(hint.clone(), bt))
            }
            RuleR::App(f, x) => {
                let (fs, ft) = check(f)?;
                let (xs, xt) = check(x)?;
                (Term::app(fs, xs), Term::app(ft, xt))
            }
            RuleR::Pair(l, r) => {
                let (ls, lt) = check(l)?;
                let (rs, rt) = check(r)?;
                (Term::pair(ls, rs), Term::pair(lt, rt))
            }
            RuleR::Proj(side, d) => {
                let (s, t) = check(d)?;
                (Term::proj(*side, s), Term::proj(*side, t))
            }
        })
    }

    pub fn rule_name(&self) -> &'static str {
        match &self.rule {
            RuleR::Refl => "refl",
            RuleR::Beta { .. } => "beta",
            RuleR::Pi { side: Side::Fst, .. } => "pi1",
            RuleR::Pi { side: Side::Snd, .. } => "pi2",
            RuleR::DeltaPi { .. } => "delta_pi",
            RuleR::PiLam { side: Side::Fst, .. } => "pi1_lam",
            RuleR::PiLam { side: Side::Snd, .. } => "pi2_lam",
            RuleR::Abs { .. } => "abs",
            RuleR::App(..) => "app",
            RuleR::Pair(..) => "pair",
            RuleR::Proj(Side::Fst, _) => "proj1",
            RuleR::Proj(Side::Snd, _) => "proj2",
        }
    }

    fn children(&self) -> Vec<&ParR> {
        match &self.rule {
            RuleR::Refl => vec![],
            RuleR::Beta { body, arg, .. } => vec![body, arg],
            RuleR::Pi { kept, .. } => vec![kept],
            RuleR::DeltaPi { left, right, arg } => vec![left, right, arg],
            RuleR::PiLam { body, .. } | RuleR::Abs { body, .. } | RuleR::Proj(_, body) => {
                vec![body]
            }
            RuleR::App(x, y) | RuleR::Pair(x, y) => vec![x, y],
        }
    }

    /// Height of the derivation tree.
    pub fn height(&self) -> usize {
        1 + self.children().iter().map(|c| c.height()).max().unwrap_or(0)
    }

    /// Debugging dump: rule, endpoints, children. Not a stable format.
    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule_name(),
            "source": self.src.to_string(),
            "target": self.tgt.to_string(),
            "children": self.children().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    /// Components of a reflexive or congruence node, as derivations.
    fn split(&self) -> Option<Vec<ParR>> {
        match &self.rule {
            RuleR::Refl => Some(
                self.src
                    .children()
                    .into_iter()
                    .map(|c| ParR::refl(c.clone()))
                    .collect(),
            ),
            RuleR::Abs { body, .. } | RuleR::Proj(_, body) => Some(vec![(**body).clone()]),
            RuleR::App(x, y) | RuleR::Pair(x, y) => Some(vec![(**x).clone(), (**y).clone()]),
            _ => None,
        }
    }

    /// Rebuild the congruence shape of `shape` (a term) around `kids`.
    fn congruence(shape: &Term, mut kids: Vec<ParR>) -> ParR {
        match shape.node() {
            Node::Abs(h, _) => ParR::abs_raw(h.clone(), kids.remove(0)),
            Node::App(..) => {
                let y = kids.pop().unwrap();
                ParR::app(kids.pop().unwrap(), y)
            }
            Node::Pair(..) => {
                let y = kids.pop().unwrap();
                ParR::pair(kids.pop().unwrap(), y)
            }
            Node::Proj(side, _) => ParR::proj(*side, kids.remove(0)),
            Node::Free(_) | Node::Bound(_) => ParR::refl(shape.clone()),
        }
    }
}

/// Map every stored leaf term (reflexive endpoints and discarded pair
/// components); `f` receives the number of binders crossed.
fn map_r(d: &ParR, depth: u32, f: &dyn Fn(&Term, u32) -> Term) -> ParR {
    match &d.rule {
        RuleR::Refl => ParR::refl(f(&d.src, depth)),
        RuleR::Beta { hint, body, arg } => {
            ParR::beta_raw(hint.clone(), map_r(body, depth + 1, f), map_r(arg, depth, f))
        }
        RuleR::Pi { side, kept, other } => ParR::pi(*side, map_r(kept, depth, f), f(other, depth)),
        RuleR::DeltaPi { left, right, arg } => ParR::delta_pi(
            map_r(left, depth, f),
            map_r(right, depth, f),
            map_r(arg, depth, f),
        ),
        RuleR::PiLam { side, hint, body } => {
            ParR::pi_lam_raw(*side, hint.clone(), map_r(body, depth + 1, f))
        }
        RuleR::Abs { hint, body } => ParR::abs_raw(hint.clone(), map_r(body, depth + 1, f)),
        RuleR::App(x, y) => ParR::app(map_r(x, depth, f), map_r(y, depth, f)),
        RuleR::Pair(x, y) => ParR::pair(map_r(x, depth, f), map_r(y, depth, f)),
        RuleR::Proj(side, x) => ParR::proj(*side, map_r(x, depth, f)),
    }
}

pub(crate) fn shift_r(d: &ParR, by: u32, cutoff: u32) -> ParR {
    if by == 0 {
        return d.clone();
    }
    map_r(d, 0, &|t, depth| shift(t, by, cutoff + depth))
}

/// Flatten into a forward-only certificate from the source to the target.
pub fn flatten_r(d: &ParR) -> ConvCert {
    let mut steps = Vec::new();
    steps_r(d, &mut Vec::new(), &mut steps);
    ConvCert::new(d.src.clone(), steps)
}

fn steps_r(d: &ParR, path: &mut Vec<usize>, out: &mut Vec<Step>) {
    fn sub(d: &ParR, path: &mut Vec<usize>, rel: &[usize], out: &mut Vec<Step>) {
        let n = path.len();
        path.extend_from_slice(rel);
        steps_r(d, path, out);
        path.truncate(n);
    }
    match &d.rule {
        RuleR::Refl => {}
        RuleR::Beta { body, arg, .. } => {
            sub(body, path, &[0, 0], out);
            sub(arg, path, &[1], out);
            out.push(Step::forward(path.clone(), Axiom::Beta));
        }
        RuleR::Pi { side, kept, .. } => {
            sub(kept, path, &[0, side.index()], out);
            out.push(Step::forward(path.clone(), Axiom::pi(*side)));
        }
        RuleR::DeltaPi { left, right, arg } => {
            sub(left, path, &[0, 0], out);
            sub(right, path, &[0, 1], out);
            sub(arg, path, &[1], out);
            out.push(Step::forward(path.clone(), Axiom::DeltaPi));
        }
        RuleR::PiLam { side, body, .. } => {
            sub(body, path, &[0, 0], out);
            out.push(Step::forward(path.clone(), Axiom::pi_lam(*side)));
        }
        RuleR::Abs { body, .. } | RuleR::Proj(_, body) => sub(body, path, &[0], out),
        RuleR::App(x, y) | RuleR::Pair(x, y) => {
            sub(x, path, &[0], out);
            sub(y, path, &[1], out);
        }
    }
}

/// The one-step parallel derivation performing a single forward `R` step.
pub fn par_r_of_step(m: &Term, s: &Step) -> Result<ParR, StepError> {
    let mismatch = || StepError::AxiomMismatch {
        axiom: s.axiom,
        dir: s.dir,
        pos: s.pos.clone(),
    };
    if s.dir != Direction::Forward {
        return Err(mismatch());
    }
    fn go(t: &Term, path: &[usize], s: &Step) -> Option<ParR> {
        let Some((&i, rest)) = path.split_first() else {
            return root_r(t, s.axiom);
        };
        let kids: Vec<ParR> = t
            .children()
            .into_iter()
            .enumerate()
            .map(|(j, c)| if j == i { go(c, rest, s) } else { Some(ParR::refl(c.clone())) })
            .collect::<Option<_>>()?;
        if i >= kids.len() {
            return None;
        }
        Some(ParR::congruence(t, kids))
    }
    m.at(&s.pos.0)
        .ok_or_else(|| StepError::InvalidPosition(s.pos.clone()))?;
    go(m, &s.pos.0, s).ok_or_else(mismatch)
}

fn root_r(t: &Term, axiom: Axiom) -> Option<ParR> {
    match (axiom, t.node()) {
        (Axiom::Beta, Node::App(f, x)) => match f.node() {
            Node::Abs(h, b) => Some(ParR::beta_raw(
                h.clone(),
                ParR::refl(b.clone()),
                ParR::refl(x.clone()),
            )),
            _ => None,
        },
        (Axiom::Pi1 | Axiom::Pi2, Node::Proj(side, p)) if Axiom::pi(*side) == axiom => {
            match p.node() {
                Node::Pair(l, r) => Some(match side {
                    Side::Fst => ParR::pi(*side, ParR::refl(l.clone()), r.clone()),
                    Side::Snd => ParR::pi(*side, ParR::refl(r.clone()), l.clone()),
                }),
                _ => None,
            }
        }
        (Axiom::DeltaPi, Node::App(f, x)) => match f.node() {
            Node::Pair(l, r) => Some(ParR::delta_pi(
                ParR::refl(l.clone()),
                ParR::refl(r.clone()),
                ParR::refl(x.clone()),
            )),
            _ => None,
        },
        (Axiom::Pi1Lam | Axiom::Pi2Lam, Node::Proj(side, f)) if Axiom::pi_lam(*side) == axiom => {
            match f.node() {
                Node::Abs(h, b) => Some(ParR::pi_lam_raw(*side, h.clone(), ParR::refl(b.clone()))),
                _ => None,
            }
        }
        _ => None,
    }
}

/// `M[x := N] =>R M'[x := N']` from `dm: M =>R M'` and `dn: N =>R N'`.
pub fn par_r_subst(dm: &ParR, dn: &ParR, x: &VarName) -> ParR {
    par_r_subst_target(dm, &Target::Free(x.clone()), dn)
}

/// Substitution for dangling index `k`; `dn` lives at the result level.
pub(crate) fn par_r_subst_bound(dm: &ParR, k: u32, dn: &ParR) -> ParR {
    par_r_subst_target(dm, &Target::Bound(k), dn)
}

fn par_r_subst_target(dm: &ParR, tg: &Target, dn: &ParR) -> ParR {
    let under = |d: &ParR| par_r_subst_target(d, &tg.under_binder(), &shift_r(dn, 1, 0));
    let same = |d: &ParR| par_r_subst_target(d, tg, dn);
    match &dm.rule {
        RuleR::Refl => {
            let m = &dm.src;
            if dn.is_refl() || !tg.occurs_in(m) {
                return ParR::refl(tg.apply(m, &dn.src));
            }
            if tg.matches_leaf(m) {
                return dn.clone();
            }
            match m.node() {
                Node::Free(_) | Node::Bound(_) => ParR::refl(tg.apply(m, &dn.src)),
                Node::Abs(h, b) => ParR::abs_raw(h.clone(), under(&ParR::refl(b.clone()))),
                _ => {
                    let kids = m
                        .children()
                        .into_iter()
                        .map(|c| same(&ParR::refl(c.clone())))
                        .collect();
                    ParR::congruence(m, kids)
                }
            }
        }
        RuleR::Beta { hint, body, arg } => ParR::beta_raw(hint.clone(), under(body), same(arg)),
        RuleR::Pi { side, kept, other } => ParR::pi(*side, same(kept), tg.apply(other, &dn.src)),
        RuleR::DeltaPi { left, right, arg } => ParR::delta_pi(same(left), same(right), same(arg)),
        RuleR::PiLam { side, hint, body } => ParR::pi_lam_raw(*side, hint.clone(), under(body)),
        RuleR::Abs { hint, body } => ParR::abs_raw(hint.clone(), under(body)),
        RuleR::App(x, y) => ParR::app(same(x), same(y)),
        RuleR::Pair(x, y) => ParR::pair(same(x), same(y)),
        RuleR::Proj(side, x) => ParR::proj(*side, same(x)),
    }
}

/// The diamond property of `=>R`: from `d1: M => N1` and `d2: M => N2`,
/// derivations `e1: N1 => P` and `e2: N2 => P`.
///
/// A reflexive side is absorbed (`P` is the other target). Otherwise `P`
/// contracts every redex contracted by either side.
pub fn par_r_diamond(d1: &ParR, d2: &ParR) -> (Term, ParR, ParR) {
    let (e1, e2) = diamond_r(d1, d2);
    debug_assert_eq!(e1.tgt, e2.tgt);
    (e1.tgt.clone(), e1, e2)
}

fn diamond_r(d1: &ParR, d2: &ParR) -> (ParR, ParR) {
    if d1.is_refl() {
        return (d2.clone(), ParR::refl(d2.tgt.clone()));
    }
    if d2.is_refl() {
        return (ParR::refl(d1.tgt.clone()), d1.clone());
    }
    let swap = |(x, y): (ParR, ParR)| (y, x);
    match (&d1.rule, &d2.rule) {
        (RuleR::Beta { body: b1, arg: a1, .. }, RuleR::Beta { body: b2, arg: a2, .. }) => {
            let (eb1, eb2) = diamond_r(b1, b2);
            let (ea1, ea2) = diamond_r(a1, a2);
            (par_r_subst_bound(&eb1, 0, &ea1), par_r_subst_bound(&eb2, 0, &ea2))
        }
        (RuleR::Beta { hint, body: b1, arg: a1 }, _) => {
            let kids = d2.split().expect("application congruence");
            let body2 = kids[0].split().expect("abstraction congruence").remove(0);
            let (eb1, eb2) = diamond_r(b1, &body2);
            let (ea1, ea2) = diamond_r(a1, &kids[1]);
            (
                par_r_subst_bound(&eb1, 0, &ea1),
                ParR::beta_raw(hint.clone(), eb2, ea2),
            )
        }
        (_, RuleR::Beta { .. }) => swap(diamond_r(d2, d1)),
        (RuleR::Pi { kept: k1, .. }, RuleR::Pi { kept: k2, .. }) => diamond_r(k1, k2),
        (RuleR::Pi { side, kept, .. }, _) => {
            let pair = d2.split().expect("projection congruence").remove(0);
            let mut comps = pair.split().expect("pair congruence");
            let other = comps.remove(1 - side.index());
            let c = comps.remove(0);
            let (e1, e2) = diamond_r(kept, &c);
            (e1, ParR::pi(*side, e2, other.tgt.clone()))
        }
        (_, RuleR::Pi { .. }) => swap(diamond_r(d2, d1)),
        (
            RuleR::DeltaPi { left: l1, right: r1, arg: p1 },
            RuleR::DeltaPi { left: l2, right: r2, arg: p2 },
        ) => {
            let (el1, el2) = diamond_r(l1, l2);
            let (er1, er2) = diamond_r(r1, r2);
            let (ep1, ep2) = diamond_r(p1, p2);
            (distribute(el1, er1, ep1), distribute(el2, er2, ep2))
        }
        (RuleR::DeltaPi { left, right, arg }, _) => {
            let kids = d2.split().expect("application congruence");
            let comps = kids[0].split().expect("pair congruence");
            let (el1, el2) = diamond_r(left, &comps[0]);
            let (er1, er2) = diamond_r(right, &comps[1]);
            let (ep1, ep2) = diamond_r(arg, &kids[1]);
            (distribute(el1, er1, ep1), ParR::delta_pi(el2, er2, ep2))
        }
        (_, RuleR::DeltaPi { .. }) => swap(diamond_r(d2, d1)),
        (RuleR::PiLam { side, hint, body: b1 }, RuleR::PiLam { body: b2, .. }) => {
            let (e1, e2) = diamond_r(b1, b2);
            (
                ParR::abs_raw(hint.clone(), ParR::proj(*side, e1)),
                ParR::abs_raw(hint.clone(), ParR::proj(*side, e2)),
            )
        }
        (RuleR::PiLam { side, hint, body }, _) => {
            let f = d2.split().expect("projection congruence").remove(0);
            let b2 = f.split().expect("abstraction congruence").remove(0);
            let (e1, e2) = diamond_r(body, &b2);
            (
                ParR::abs_raw(hint.clone(), ParR::proj(*side, e1)),
                ParR::pi_lam_raw(*side, hint.clone(), e2),
            )
        }
        (_, RuleR::PiLam { .. }) => swap(diamond_r(d2, d1)),
        _ => {
            let k1 = d1.split().expect("congruence");
            let k2 = d2.split().expect("congruence");
            let (e1s, e2s): (Vec<_>, Vec<_>) =
                k1.iter().zip(&k2).map(|(x, y)| diamond_r(x, y)).unzip();
            (ParR::congruence(&d1.tgt, e1s), ParR::congruence(&d2.tgt, e2s))
        }
    }
}

/// `<M P, N P> => <M' P', N' P'>`.
fn distribute(l: ParR, r: ParR, p: ParR) -> ParR {
    ParR::pair(ParR::app(l, p.clone()), ParR::app(r, p))
}

// ---------------------------------------------------------------------------
// =>E

impl ParE {
    pub fn source(&self) -> &Term {
        &self.src
    }

    pub fn target(&self) -> &Term {
        &self.tgt
    }

    pub fn rule(&self) -> &RuleE {
        &self.rule
    }

    pub fn is_refl(&self) -> bool {
        matches!(self.rule, RuleE::Refl)
    }

    pub fn refl(m: Term) -> ParE {
        ParE {
            src: m.clone(),
            tgt: m,
            rule: RuleE::Refl,
        }
    }

    /// `M => \x. M' x`. A hint that occurs free in `M'` is replaced by a
    /// fresh name.
    pub fn eta(hint: impl Into<VarName>, inner: ParE) -> ParE {
        let hint = hint.into();
        let hint = if inner.tgt.free_names().contains(&hint) {
            default_fresh(&inner.tgt)
        } else {
            hint
        };
        ParE {
            src: inner.src.clone(),
            tgt: Term::abs_raw(
                hint.clone(),
                Term::app(shift(&inner.tgt, 1, 0), Term::bound(0)),
            ),
            rule: RuleE::Eta {
                hint,
                inner: a(inner),
            },
        }
    }

    pub fn sp(inner: ParE) -> ParE {
        ParE {
            src: inner.src.clone(),
            tgt: Term::pair(Term::fst(inner.tgt.clone()), Term::snd(inner.tgt.clone())),
            rule: RuleE::Sp { inner: a(inner) },
        }
    }

    pub(crate) fn abs_raw(hint: VarName, body: ParE) -> ParE {
        ParE {
            src: Term::abs_raw(hint.clone(), body.src.clone()),
            tgt: Term::abs_raw(hint.clone(), body.tgt.clone()),
            rule: RuleE::Abs { hint, body: a(body) },
        }
    }

    pub fn lam(x: impl Into<VarName>, body: ParE) -> ParE {
        let x = x.into();
        let body = par_e_subst_target(&body, &Target::Free(x.clone()), &ParE::refl(Term::bound(0)));
        ParE::abs_raw(x, body)
    }

    pub fn app(f: ParE, arg: ParE) -> ParE {
        ParE {
            src: Term::app(f.src.clone(), arg.src.clone()),
            tgt: Term::app(f.tgt.clone(), arg.tgt.clone()),
            rule: RuleE::App(a(f), a(arg)),
        }
    }

    pub fn pair(l: ParE, r: ParE) -> ParE {
        ParE {
            src: Term::pair(l.src.clone(), r.src.clone()),
            tgt: Term::pair(l.tgt.clone(), r.tgt.clone()),
            rule: RuleE::Pair(a(l), a(r)),
        }
    }

    pub fn proj(side: Side, d: ParE) -> ParE {
        ParE {
            src: Term::proj(side, d.src.clone()),
            tgt: Term::proj(side, d.tgt.clone()),
            rule: RuleE::Proj(side, a(d)),
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        let (s, t) = self.recompute()?;
        if s != self.src || t != self.tgt {
            return Err(format!("endpoint mismatch at {}", self.rule_name()));
        }
        Ok(())
    }

    fn recompute(&self) -> Result<(Term, Term), String> {
        let check = |d: &ParE| -> Result<(Term, Term), String> {
            let (s, t) = d.recompute()?;
            if s != d.src || t != d.tgt {
                return Err(format!("endpoint mismatch at {}", d.rule_name()));
            }
            Ok((s, t))
        };
        Ok(match &self.rule {
            RuleE::Refl => (self.src.clone(), self.src.clone()),
            RuleE::Eta { hint, inner } => {
                let (s, t) = check(inner)?;
                if t.free_names().contains(hint) {
                    return Err(format!("eta binder {hint} occurs free in the expanded term"));
                }
                let tgt = Term::abs_raw(hint.clone(), Term::app(shift(&t, 1, 0), Term::bound(0)));
                (s, tgt)
            }
            RuleE::Sp { inner } => {
                let (s, t) = check(inner)?;
                (s, Term::pair(Term::fst(t.clone()), Term::snd(t)))
            }
            RuleE::Abs { hint, body } => {
                let (bs, bt) = check(body)?;
                (Term::abs_raw(hint.clone(), bs), Term::abs_raw(hint.clone(), bt))
            }
            RuleE::App(f, x) => {
                let (fs, ft) = check(f)?;
                let (xs, xt) = check(x)?;
                (Term::app(fs, xs), Term::app(ft, xt))
            }
            RuleE::Pair(l, r) => {
                let (ls, lt) = check(l)?;
                let (rs, rt) = check(r)?;
                (Term::pair(ls, rs), Term::pair(lt, rt))
            }
            RuleE::Proj(side, d) => {
                let (s, t) = check(d)?;
                (Term::proj(*side, s), Term::proj(*side, t))
            }
        })
    }

    pub fn rule_name(&self) -> &'static str {
        match &self.rule {
            RuleE::Refl => "refl",
            RuleE::Eta { .. } => "eta",
            RuleE::Sp { .. } => "sp",
            RuleE::Abs { .. } => "abs",
            RuleE::App(..) => "app",
            RuleE::Pair(..) => "pair",
            RuleE::Proj(Side::Fst, _) => "proj1",
            RuleE::Proj(Side::Snd, _) => "proj2",
        }
    }

    fn children(&self) -> Vec<&ParE> {
        match &self.rule {
            RuleE::Refl => vec![],
            RuleE::Eta { inner, .. } | RuleE::Sp { inner } => vec![inner],
            RuleE::Abs { body, .. } | RuleE::Proj(_, body) => vec![body],
            RuleE::App(x, y) | RuleE::Pair(x, y) => vec![x, y],
        }
    }

    pub fn height(&self) -> usize {
        1 + self.children().iter().map(|c| c.height()).max().unwrap_or(0)
    }

    pub fn to_json(&self) -> Value {
        json!({
            "rule": self.rule_name(),
            "source": self.src.to_string(),
            "target": self.tgt.to_string(),
            "children": self.children().iter().map(|c| c.to_json()).collect::<Vec<_>>(),
        })
    }

    pub(crate) fn split(&self) -> Option<Vec<ParE>> {
        match &self.rule {
            RuleE::Refl => Some(
                self.src
                    .children()
                    .into_iter()
                    .map(|c| ParE::refl(c.clone()))
                    .collect(),
            ),
            RuleE::Abs { body, .. } | RuleE::Proj(_, body) => Some(vec![(**body).clone()]),
            RuleE::App(x, y) | RuleE::Pair(x, y) => Some(vec![(**x).clone(), (**y).clone()]),
            _ => None,
        }
    }

    pub(crate) fn congruence(shape: &Term, mut kids: Vec<ParE>) -> ParE {
        match shape.node() {
            Node::Abs(h, _) => ParE::abs_raw(h.clone(), kids.remove(0)),
            Node::App(..) => {
                let y = kids.pop().unwrap();
                ParE::app(kids.pop().unwrap(), y)
            }
            Node::Pair(..) => {
                let y = kids.pop().unwrap();
                ParE::pair(kids.pop().unwrap(), y)
            }
            Node::Proj(side, _) => ParE::proj(*side, kids.remove(0)),
            Node::Free(_) | Node::Bound(_) => ParE::refl(shape.clone()),
        }
    }
}

fn map_e(d: &ParE, depth: u32, f: &dyn Fn(&Term, u32) -> Term) -> ParE {
    match &d.rule {
        RuleE::Refl => ParE::refl(f(&d.src, depth)),
        RuleE::Eta { hint, inner } => ParE::eta(hint.clone(), map_e(inner, depth, f)),
        RuleE::Sp { inner } => ParE::sp(map_e(inner, depth, f)),
        RuleE::Abs { hint, body } => ParE::abs_raw(hint.clone(), map_e(body, depth + 1, f)),
        RuleE::App(x, y) => ParE::app(map_e(x, depth, f), map_e(y, depth, f)),
        RuleE::Pair(x, y) => ParE::pair(map_e(x, depth, f), map_e(y, depth, f)),
        RuleE::Proj(side, x) => ParE::proj(*side, map_e(x, depth, f)),
    }
}

pub(crate) fn shift_e(d: &ParE, by: u32, cutoff: u32) -> ParE {
    if by == 0 {
        return d.clone();
    }
    map_e(d, 0, &|t, depth| shift(t, by, cutoff + depth))
}

pub fn flatten_e(d: &ParE) -> ConvCert {
    let mut steps = Vec::new();
    steps_e(d, &mut Vec::new(), &mut steps);
    ConvCert::new(d.src.clone(), steps)
}

fn steps_e(d: &ParE, path: &mut Vec<usize>, out: &mut Vec<Step>) {
    fn sub(d: &ParE, path: &mut Vec<usize>, rel: &[usize], out: &mut Vec<Step>) {
        let n = path.len();
        path.extend_from_slice(rel);
        steps_e(d, path, out);
        path.truncate(n);
    }
    match &d.rule {
        RuleE::Refl => {}
        RuleE::Eta { hint, inner } => {
            sub(inner, path, &[], out);
            out.push(Step::forward(path.clone(), Axiom::EtaExp).with_fresh(hint.clone()));
        }
        RuleE::Sp { inner } => {
            sub(inner, path, &[], out);
            out.push(Step::forward(path.clone(), Axiom::SpExp));
        }
        RuleE::Abs { body, .. } | RuleE::Proj(_, body) => sub(body, path, &[0], out),
        RuleE::App(x, y) | RuleE::Pair(x, y) => {
            sub(x, path, &[0], out);
            sub(y, path, &[1], out);
        }
    }
}

/// The one-step parallel derivation performing a single forward `E` step.
pub fn par_e_of_step(m: &Term, s: &Step) -> Result<ParE, StepError> {
    let mismatch = || StepError::AxiomMismatch {
        axiom: s.axiom,
        dir: s.dir,
        pos: s.pos.clone(),
    };
    if s.dir != Direction::Forward || !matches!(s.axiom, Axiom::EtaExp | Axiom::SpExp) {
        return Err(mismatch());
    }
    let sub = m
        .at(&s.pos.0)
        .ok_or_else(|| StepError::InvalidPosition(s.pos.clone()))?;
    if let (Axiom::EtaExp, Some(h)) = (s.axiom, &s.fresh) {
        if sub.free_names().contains(h) {
            return Err(StepError::FreshnessViolation { pos: s.pos.clone() });
        }
    }
    fn go(t: &Term, path: &[usize], s: &Step) -> ParE {
        let Some((&i, rest)) = path.split_first() else {
            return match s.axiom {
                Axiom::EtaExp => {
                    let hint = s.fresh.clone().unwrap_or_else(|| default_fresh(t));
                    ParE::eta(hint, ParE::refl(t.clone()))
                }
                _ => ParE::sp(ParE::refl(t.clone())),
            };
        };
        let kids = t
            .children()
            .into_iter()
            .enumerate()
            .map(|(j, c)| if j == i { go(c, rest, s) } else { ParE::refl(c.clone()) })
            .collect();
        ParE::congruence(t, kids)
    }
    Ok(go(m, &s.pos.0, s))
}

pub fn par_e_subst(dm: &ParE, dn: &ParE, x: &VarName) -> ParE {
    par_e_subst_target(dm, &Target::Free(x.clone()), dn)
}

pub(crate) fn par_e_subst_bound(dm: &ParE, k: u32, dn: &ParE) -> ParE {
    par_e_subst_target(dm, &Target::Bound(k), dn)
}

fn par_e_subst_target(dm: &ParE, tg: &Target, dn: &ParE) -> ParE {
    let under = |d: &ParE| par_e_subst_target(d, &tg.under_binder(), &shift_e(dn, 1, 0));
    let same = |d: &ParE| par_e_subst_target(d, tg, dn);
    match &dm.rule {
        RuleE::Refl => {
            let m = &dm.src;
            if dn.is_refl() || !tg.occurs_in(m) {
                return ParE::refl(tg.apply(m, &dn.src));
            }
            if tg.matches_leaf(m) {
                return dn.clone();
            }
            match m.node() {
                Node::Free(_) | Node::Bound(_) => ParE::refl(tg.apply(m, &dn.src)),
                Node::Abs(h, b) => ParE::abs_raw(h.clone(), under(&ParE::refl(b.clone()))),
                _ => {
                    let kids = m
                        .children()
                        .into_iter()
                        .map(|c| same(&ParE::refl(c.clone())))
                        .collect();
                    ParE::congruence(m, kids)
                }
            }
        }
        RuleE::Eta { hint, inner } => ParE::eta(hint.clone(), same(inner)),
        RuleE::Sp { inner } => ParE::sp(same(inner)),
        RuleE::Abs { hint, body } => ParE::abs_raw(hint.clone(), under(body)),
        RuleE::App(x, y) => ParE::app(same(x), same(y)),
        RuleE::Pair(x, y) => ParE::pair(same(x), same(y)),
        RuleE::Proj(side, x) => ParE::proj(*side, same(x)),
    }
}

/// The diamond property of `=>E`. Expansions at the root of either side are
/// re-applied on top of the join of what remains.
pub fn par_e_diamond(d1: &ParE, d2: &ParE) -> (Term, ParE, ParE) {
    let (e1, e2) = diamond_e(d1, d2);
    debug_assert_eq!(e1.tgt, e2.tgt);
    (e1.tgt.clone(), e1, e2)
}

/// `\x. A x => \x. B x` from `A => B` (one level up).
fn under_eta(hint: &VarName, d: &ParE) -> ParE {
    ParE::abs_raw(
        hint.clone(),
        ParE::app(shift_e(d, 1, 0), ParE::refl(Term::bound(0))),
    )
}

/// `<p1 A, p2 A> => <p1 B, p2 B>` from `A => B`.
fn under_sp(d: &ParE) -> ParE {
    ParE::pair(ParE::proj(Side::Fst, d.clone()), ParE::proj(Side::Snd, d.clone()))
}

fn diamond_e(d1: &ParE, d2: &ParE) -> (ParE, ParE) {
    if d1.is_refl() {
        return (d2.clone(), ParE::refl(d2.tgt.clone()));
    }
    if d2.is_refl() {
        return (ParE::refl(d1.tgt.clone()), d1.clone());
    }
    let swap = |(x, y): (ParE, ParE)| (y, x);
    match (&d1.rule, &d2.rule) {
        (RuleE::Eta { hint, inner: i1 }, RuleE::Eta { inner: i2, .. }) => {
            let (e1, e2) = diamond_e(i1, i2);
            (under_eta(hint, &e1), under_eta(hint, &e2))
        }
        (RuleE::Eta { hint, inner }, _) => {
            let (e1, e2) = diamond_e(inner, d2);
            (under_eta(hint, &e1), ParE::eta(hint.clone(), e2))
        }
        (_, RuleE::Eta { .. }) => swap(diamond_e(d2, d1)),
        (RuleE::Sp { inner: i1 }, RuleE::Sp { inner: i2 }) => {
            let (e1, e2) = diamond_e(i1, i2);
            (under_sp(&e1), under_sp(&e2))
        }
        (RuleE::Sp { inner }, _) => {
            let (e1, e2) = diamond_e(inner, d2);
            (under_sp(&e1), ParE::sp(e2))
        }
        (_, RuleE::Sp { .. }) => swap(diamond_e(d2, d1)),
        _ => {
            let k1 = d1.split().expect("congruence");
            let k2 = d2.split().expect("congruence");
            let (e1s, e2s): (Vec<_>, Vec<_>) =
                k1.iter().zip(&k2).map(|(x, y)| diamond_e(x, y)).unzip();
            (ParE::congruence(&d1.tgt, e1s), ParE::congruence(&d2.tgt, e2s))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::check_cert;
    use crate::rewrite::Relation;
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn r() -> Relation {
        Relation::r(true)
    }

    fn e() -> Relation {
        Relation::e(true)
    }

    fn check_r(d: &ParR) {
        d.validate().unwrap();
        let c = flatten_r(d);
        assert!(c.is_forward_only());
        assert_eq!(&check_cert(&c, &r()).unwrap(), d.target());
    }

    fn check_e(d: &ParE) {
        d.validate().unwrap();
        let c = flatten_e(d);
        assert_eq!(&check_cert(&c, &e()).unwrap(), d.target());
    }

    #[test]
    fn flatten_examples() {
        assert!(flatten_r(&ParR::refl(t("m"))).is_empty());
        let d = ParR::beta("x", ParR::refl(t("m")), ParR::refl(t("n")));
        assert_eq!(d.source(), &t("(\\x. m) n"));
        assert_eq!(flatten_r(&d).steps, vec![Step::forward(vec![], Axiom::Beta)]);
        let d = ParR::app(
            ParR::beta("x", ParR::refl(t("x")), ParR::refl(t("a"))),
            ParR::pi(Side::Fst, ParR::refl(t("b")), t("c")),
        );
        assert_eq!(d.source(), &t("((\\x. x) a) (p1 <b, c>)"));
        assert_eq!(flatten_r(&d).len(), 2);
        assert_eq!(d.target(), &t("a b"));
        check_r(&d);
    }

    #[test]
    fn flatten_e_examples() {
        assert!(flatten_e(&ParE::refl(t("m"))).is_empty());
        let d = ParE::eta("x", ParE::refl(t("m")));
        assert_eq!(d.target(), &t("\\x. m x"));
        check_e(&d);
        let d = ParE::pair(ParE::sp(ParE::refl(t("a"))), ParE::refl(t("b")));
        assert_eq!(flatten_e(&d).steps, vec![Step::forward(vec![0], Axiom::SpExp)]);
        check_e(&d);
    }

    #[test]
    fn single_steps_lift() {
        let m = t("(\\x. p1 <x, y>) ((\\z. z) w)");
        for (p, ax) in crate::rewrite::redexes(&m, &r()) {
            let s = Step::forward(p, ax);
            let d = par_r_of_step(&m, &s).unwrap();
            assert_eq!(flatten_r(&d).steps, vec![s.clone()]);
            check_r(&d);
        }
        let s = Step::forward(vec![1], Axiom::SpExp);
        let d = par_e_of_step(&m, &s).unwrap();
        assert_eq!(flatten_e(&d).steps, vec![s]);
    }

    #[test]
    fn substitution_examples() {
        let x = VarName::new("x");
        let dn = par_r_of_step(&t("p1 <a, b>"), &Step::forward(vec![], Axiom::Pi1)).unwrap();
        let d = par_r_subst(&ParR::refl(t("x")), &dn, &x);
        assert_eq!((d.source(), d.target()), (dn.source(), dn.target()));
        let d = par_r_subst(&ParR::refl(t("y")), &dn, &x);
        assert!(d.is_refl());
        let dm = ParR::beta("y", ParR::refl(t("y")), ParR::refl(t("x")));
        let d = par_r_subst(&dm, &dn, &x);
        assert_eq!(d.source(), &t("(\\y. y) (p1 <a, b>)"));
        assert_eq!(d.target(), &t("a"));
        check_r(&d);

        let dn = ParE::sp(ParE::refl(t("n")));
        let dm = ParE::lam("y", ParE::eta("z", ParE::refl(t("x y"))));
        let d = par_e_subst(&dm, &dn, &x);
        assert_eq!(d.source(), &t("\\y. n y"));
        assert_eq!(d.target(), &t("\\y. \\z. <p1 n, p2 n> y z"));
        check_e(&d);
    }

    #[test]
    fn diamond_examples() {
        let m = t("(\\x. x) ((\\y. y) z)");
        let d1 = par_r_of_step(&m, &Step::forward(vec![], Axiom::Beta)).unwrap();
        let d2 = par_r_of_step(&m, &Step::forward(vec![1], Axiom::Beta)).unwrap();
        let (p, e1, e2) = par_r_diamond(&d1, &d2);
        assert_eq!(p, t("z"));
        check_r(&e1);
        check_r(&e2);

        let (p, e1, e2) = par_r_diamond(&d1, &d1);
        assert_eq!(&p, d1.target());
        assert!(e1.is_refl() && e2.is_refl());

        let m = t("p1 (\\x. <a, b>)");
        let d1 = par_r_of_step(&m, &Step::forward(vec![], Axiom::Pi1Lam)).unwrap();
        let d2 = ParR::proj(Side::Fst, ParR::lam("x", ParR::refl(t("<a, b>"))));
        let (p, _, _) = par_r_diamond(&d1, &d2);
        assert_eq!(p, t("\\x. p1 <a, b>"));

        let (p, _, _) = par_r_diamond(&d1, &ParR::refl(m.clone()));
        assert_eq!(&p, d1.target());
    }

    #[test]
    fn diamond_e_examples() {
        let m = t("m");
        let (p, _, _) = par_e_diamond(&ParE::refl(m.clone()), &ParE::refl(m.clone()));
        assert_eq!(p, m);
        let d1 = ParE::eta("x", ParE::refl(m.clone()));
        let d2 = ParE::sp(ParE::refl(m.clone()));
        let (p, e1, e2) = par_e_diamond(&d1, &d2);
        check_e(&e1);
        check_e(&e2);
        assert_eq!(p, t("\\x. <p1 m, p2 m> x"));

        let m = t("<m, n>");
        let d1 = ParE::pair(ParE::eta("x", ParE::refl(t("m"))), ParE::refl(t("n")));
        let (p, _, _) = par_e_diamond(&d1, &ParE::refl(m));
        assert_eq!(p, t("<\\x. m x, n>"));
    }

    #[test]
    fn json_dump_has_rule_names() {
        let d = ParR::beta("x", ParR::refl(t("x")), ParR::refl(t("a")));
        let v = d.to_json();
        assert_eq!(v["rule"], "beta");
        assert_eq!(v["children"].as_array().unwrap().len(), 2);
    }
}
