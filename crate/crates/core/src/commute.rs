//! Commutation of parallel expansion with reduction: the two expansion
//! analysis lemmas, the single-step commutation and its iterations.

use thiserror::Error;

use crate::cert::{map_cert, CertError, ConvCert, TermMap};
use crate::parallel::{par_e_subst_bound, ParE, RuleE};
use crate::rewrite::{apply_step, apply_step_in, Axiom, Direction, Relation, Step, StepError};
use crate::term::{shift, subst_bound, Node, Side, Term};

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum CommuteError {
    #[error("the expansion starts at `{expansion}` but the reduction starts at `{reduction}`")]
    SourceMismatch { expansion: Term, reduction: Term },
    #[error("reduction step {index} is not a forward R step: {cause}")]
    NotAnRStep { index: usize, cause: StepError },
    #[error(transparent)]
    Cert(#[from] CertError),
}

/// A certificate under construction, replayed step by step.
struct Builder {
    cert: ConvCert,
    cur: Term,
}

impl Builder {
    fn new(start: Term) -> Self {
        Builder {
            cur: start.clone(),
            cert: ConvCert::empty(start),
        }
    }

    fn push(&mut self, s: Step) {
        self.cur = apply_step(&self.cur, &s).expect("lemma step applies");
        self.cert.steps.push(s);
    }

    fn root(&mut self, axiom: Axiom, pos: &[usize]) {
        self.push(Step::forward(pos.to_vec(), axiom));
    }

    /// Append a forward certificate acting on the subterm at `prefix`.
    fn append_at(&mut self, c: &ConvCert, prefix: &[usize]) {
        debug_assert_eq!(self.cur.at(prefix), Some(&c.start));
        for s in &c.steps {
            self.push(s.under(prefix));
        }
    }

    fn finish(self) -> (ConvCert, Term) {
        (self.cert, self.cur)
    }
}

/// Shift a forward certificate one binder level up.
fn shift_cert(c: &ConvCert) -> ConvCert {
    ConvCert::new(shift(&c.start, 1, 0), c.steps.clone())
}

/// Instantiate dangling index 0 of a certificate with `v`.
fn instantiate(c: &ConvCert, v: &Term) -> Result<ConvCert, CertError> {
    map_cert(c, &TermMap::SubstBound(0, v))
}

/// `N x`, one binder level below `N`.
fn applied_to_bound(n: &Term) -> Term {
    Term::app(shift(n, 1, 0), Term::bound(0))
}

/// Analysis of `d: \x. M =>E N`.
#[derive(Clone, Debug)]
pub struct LamExpansion {
    /// `N x ->R* P`, one binder level below `N`.
    pub app_cert: ConvCert,
    /// `M =>E P`.
    pub app_deriv: ParE,
    /// `pi_i N ->R* \x. pi_i Q` for both projections.
    pub proj_certs: [ConvCert; 2],
    /// `M =>E Q`.
    pub proj_deriv: ParE,
}

impl LamExpansion {
    pub fn app_target(&self) -> &Term {
        self.app_deriv.target()
    }

    pub fn proj_body(&self) -> &Term {
        self.proj_deriv.target()
    }
}

/// Analysis of `d: <M1, M2> =>E N`.
#[derive(Clone, Debug)]
pub struct PairExpansion {
    /// `pi_i N ->R* P_i` for both projections.
    pub proj_certs: [ConvCert; 2],
    /// `M_i =>E P_i`.
    pub proj_derivs: [ParE; 2],
    /// `N x ->R* <Q1 x, Q2 x>`, one binder level below `N`.
    pub app_cert: ConvCert,
    /// `M_i =>E Q_i`.
    pub app_derivs: [ParE; 2],
}

/// Expansion analysis for an abstraction: returns `None` when the source of
/// `d` is not an abstraction.
pub fn lemma_lam_expand(d: &ParE) -> Option<LamExpansion> {
    let Node::Abs(_, m) = d.source().node() else {
        return None;
    };
    let n = d.target();
    let a = applied_to_bound(n);
    let proj_start = |side: Side| Term::proj(side, n.clone());
    Some(match d.rule() {
        RuleE::Refl | RuleE::Abs { .. } => {
            let body = match d.rule() {
                RuleE::Abs { body, .. } => (**body).clone(),
                _ => ParE::refl(m.clone()),
            };
            let mut app = Builder::new(a);
            app.root(Axiom::Beta, &[]);
            let proj_certs = Side::both().map(|side| {
                let mut b = Builder::new(proj_start(side));
                b.root(Axiom::pi_lam(side), &[]);
                b.finish().0
            });
            LamExpansion {
                app_cert: app.finish().0,
                app_deriv: body.clone(),
                proj_certs,
                proj_deriv: body,
            }
        }
        RuleE::Eta { inner, .. } => {
            let r0 = lemma_lam_expand(inner)?;
            let mut app = Builder::new(a);
            app.root(Axiom::Beta, &[]);
            app.append_at(&r0.app_cert, &[]);
            let proj_certs = Side::both().map(|side| {
                let mut b = Builder::new(proj_start(side));
                b.root(Axiom::pi_lam(side), &[]);
                b.append_at(&r0.app_cert, &[0, 0]);
                b.finish().0
            });
            LamExpansion {
                app_cert: app.finish().0,
                app_deriv: r0.app_deriv.clone(),
                proj_certs,
                proj_deriv: r0.app_deriv,
            }
        }
        RuleE::Sp { inner } => {
            let r0 = lemma_lam_expand(inner)?;
            let proj_certs = Side::both().map(|side| {
                let mut b = Builder::new(proj_start(side));
                b.root(Axiom::pi(side), &[]);
                b.append_at(&r0.proj_certs[side.index()], &[]);
                b.finish().0
            });
            let mut app = Builder::new(a);
            app.append_at(&shift_cert(&r0.proj_certs[0]), &[0, 0]);
            app.append_at(&shift_cert(&r0.proj_certs[1]), &[0, 1]);
            app.root(Axiom::DeltaPi, &[]);
            app.root(Axiom::Beta, &[0]);
            app.root(Axiom::Beta, &[1]);
            let app_deriv = ParE::sp(r0.proj_deriv.clone());
            let (app_cert, end) = app.finish();
            debug_assert_eq!(&end, app_deriv.target());
            LamExpansion {
                app_cert,
                app_deriv,
                proj_certs,
                proj_deriv: r0.proj_deriv,
            }
        }
        _ => unreachable!("only reflexivity, abstraction, eta and sp apply to an abstraction"),
    })
}

/// Expansion analysis for a pair: returns `None` when the source of `d` is
/// not a pair.
pub fn lemma_pair_expand(d: &ParE) -> Option<PairExpansion> {
    let Node::Pair(m1, m2) = d.source().node() else {
        return None;
    };
    let n = d.target();
    let a = applied_to_bound(n);
    let proj_start = |side: Side| Term::proj(side, n.clone());
    Some(match d.rule() {
        RuleE::Refl | RuleE::Pair(..) => {
            let comps = match d.rule() {
                RuleE::Pair(x, y) => [(**x).clone(), (**y).clone()],
                _ => [ParE::refl(m1.clone()), ParE::refl(m2.clone())],
            };
            let proj_certs = Side::both().map(|side| {
                let mut b = Builder::new(proj_start(side));
                b.root(Axiom::pi(side), &[]);
                b.finish().0
            });
            let mut app = Builder::new(a);
            app.root(Axiom::DeltaPi, &[]);
            PairExpansion {
                proj_certs,
                proj_derivs: comps.clone(),
                app_cert: app.finish().0,
                app_derivs: comps,
            }
        }
        RuleE::Eta { hint, inner } => {
            let r0 = lemma_pair_expand(inner)?;
            let proj_derivs = Side::both()
                .map(|side| ParE::eta(hint.clone(), r0.app_derivs[side.index()].clone()));
            let proj_certs = Side::both().map(|side| {
                let mut b = Builder::new(proj_start(side));
                b.append_at(&r0.app_cert, &[0, 0]);
                b.root(Axiom::pi_lam(side), &[]);
                b.root(Axiom::pi(side), &[0]);
                let (c, end) = b.finish();
                debug_assert_eq!(&end, proj_derivs[side.index()].target());
                c
            });
            let mut app = Builder::new(a);
            app.root(Axiom::Beta, &[]);
            app.append_at(&r0.app_cert, &[]);
            PairExpansion {
                proj_certs,
                proj_derivs,
                app_cert: app.finish().0,
                app_derivs: r0.app_derivs,
            }
        }
        RuleE::Sp { inner } => {
            let r0 = lemma_pair_expand(inner)?;
            let proj_certs = Side::both().map(|side| {
                let mut b = Builder::new(proj_start(side));
                b.root(Axiom::pi(side), &[]);
                b.append_at(&r0.proj_certs[side.index()], &[]);
                b.finish().0
            });
            let mut app = Builder::new(a);
            app.root(Axiom::DeltaPi, &[]);
            app.append_at(&shift_cert(&r0.proj_certs[0]), &[0, 0]);
            app.append_at(&shift_cert(&r0.proj_certs[1]), &[1, 0]);
            PairExpansion {
                proj_certs,
                proj_derivs: r0.proj_derivs.clone(),
                app_cert: app.finish().0,
                app_derivs: r0.proj_derivs,
            }
        }
        _ => unreachable!("only reflexivity, pair, eta and sp apply to a pair"),
    })
}

/// Result of commuting an expansion past reductions: `N ->R* P` and
/// `M' =>E P`.
#[derive(Clone, Debug)]
pub struct Commuted {
    pub cert: ConvCert,
    pub deriv: ParE,
}

impl Commuted {
    pub fn target(&self) -> &Term {
        self.deriv.target()
    }
}

/// From `dE: M =>E N` and a forward `R` step `M -> M'`, a term `P` with
/// `N ->R* P` and `M' =>E P`.
pub fn commute_step(de: &ParE, s: &Step) -> Result<Commuted, CommuteError> {
    apply_step_in(de.source(), s, &Relation::r(true))
        .map_err(|cause| CommuteError::NotAnRStep { index: 0, cause })?;
    if s.dir != Direction::Forward {
        return Err(CommuteError::NotAnRStep {
            index: 0,
            cause: StepError::AxiomMismatch {
                axiom: s.axiom,
                dir: s.dir,
                pos: s.pos.clone(),
            },
        });
    }
    Ok(go(de, &s.pos.0, s.axiom)?)
}

fn go(de: &ParE, path: &[usize], axiom: Axiom) -> Result<Commuted, CertError> {
    let n = de.target();
    match de.rule() {
        RuleE::Refl => {
            let s = Step::forward(path.to_vec(), axiom);
            let m2 = apply_step(de.source(), &s).expect("checked by the caller");
            Ok(Commuted {
                cert: ConvCert::new(n.clone(), vec![s]),
                deriv: ParE::refl(m2),
            })
        }
        RuleE::Eta { hint, inner } => {
            let r = go(inner, path, axiom)?;
            let deriv = ParE::eta(hint.clone(), r.deriv);
            let mut b = Builder::new(n.clone());
            b.append_at(&shift_cert(&r.cert), &[0, 0]);
            Ok(Commuted {
                cert: b.finish().0,
                deriv,
            })
        }
        RuleE::Sp { inner } => {
            let r = go(inner, path, axiom)?;
            let mut b = Builder::new(n.clone());
            b.append_at(&r.cert, &[0, 0]);
            b.append_at(&r.cert, &[1, 0]);
            Ok(Commuted {
                cert: b.finish().0,
                deriv: ParE::sp(r.deriv),
            })
        }
        _ => {
            let mut kids = de.split().expect("congruence node");
            if let Some((&i, rest)) = path.split_first() {
                let r = go(&kids[i], rest, axiom)?;
                let cert = r.cert.lift(n, &[i]);
                kids[i] = r.deriv;
                let deriv = ParE::congruence(de.source(), kids);
                return Ok(Commuted { cert, deriv });
            }
            root_case(de, kids, axiom)
        }
    }
}

fn root_case(de: &ParE, kids: Vec<ParE>, axiom: Axiom) -> Result<Commuted, CertError> {
    match axiom {
        Axiom::Beta => {
            let le = lemma_lam_expand(&kids[0]).expect("beta redex has an abstraction");
            let n2 = kids[1].target();
            let cert = instantiate(&le.app_cert, n2)?;
            let deriv = par_e_subst_bound(&le.app_deriv, 0, &kids[1]);
            debug_assert_eq!(deriv.target(), &subst_bound(le.app_target(), 0, n2));
            Ok(Commuted { cert, deriv })
        }
        Axiom::DeltaPi => {
            let pe = lemma_pair_expand(&kids[0]).expect("delta redex has a pair");
            let cert = instantiate(&pe.app_cert, kids[1].target())?;
            let [q1, q2] = pe.app_derivs;
            let deriv = ParE::pair(ParE::app(q1, kids[1].clone()), ParE::app(q2, kids[1].clone()));
            Ok(Commuted { cert, deriv })
        }
        Axiom::Pi1 | Axiom::Pi2 => {
            let pe = lemma_pair_expand(&kids[0]).expect("projection redex has a pair");
            let i = if axiom == Axiom::Pi1 { 0 } else { 1 };
            Ok(Commuted {
                cert: pe.proj_certs[i].clone(),
                deriv: pe.proj_derivs[i].clone(),
            })
        }
        Axiom::Pi1Lam | Axiom::Pi2Lam => {
            let side = if axiom == Axiom::Pi1Lam { Side::Fst } else { Side::Snd };
            let le = lemma_lam_expand(&kids[0]).expect("projection redex has an abstraction");
            let Node::Proj(_, f) = de.source().node() else {
                unreachable!()
            };
            let Node::Abs(hint, _) = f.node() else {
                unreachable!()
            };
            let deriv = ParE::abs_raw(hint.clone(), ParE::proj(side, le.proj_deriv.clone()));
            Ok(Commuted {
                cert: le.proj_certs[side.index()].clone(),
                deriv,
            })
        }
        a => unreachable!("{a} is not an R axiom"),
    }
}

/// Commute one parallel expansion past a whole `R` reduction.
pub fn commute_par_multi(de: &ParE, cert: &ConvCert) -> Result<Commuted, CommuteError> {
    if de.source() != &cert.start {
        return Err(CommuteError::SourceMismatch {
            expansion: de.source().clone(),
            reduction: cert.start.clone(),
        });
    }
    let mut cur_d = de.clone();
    let mut out = ConvCert::empty(de.target().clone());
    for (index, s) in cert.steps.iter().enumerate() {
        let r = commute_step(&cur_d, s).map_err(|e| match e {
            CommuteError::NotAnRStep { cause, .. } => CommuteError::NotAnRStep { index, cause },
            e => e,
        })?;
        out.extend(r.cert);
        cur_d = r.deriv;
    }
    Ok(Commuted {
        cert: out,
        deriv: cur_d,
    })
}

/// From a chain of parallel expansions `M =>E* N` and `M ->R* M'`: a term
/// `P` with `N ->R* P` and a chain `M' =>E* P`. Outer loop over the
/// expansions, inner loop over the reduction steps.
pub fn commute_multi(
    es: &[ParE],
    cert: &ConvCert,
) -> Result<(Term, ConvCert, Vec<ParE>), CommuteError> {
    let mut cur = cert.clone();
    let mut out = Vec::with_capacity(es.len());
    for e in es {
        let r = commute_par_multi(e, &cur)?;
        cur = r.cert;
        out.push(r.deriv);
    }
    let end = cur.end()?;
    Ok((end, cur, out))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::cert::check_cert;
    use crate::parallel::{flatten_e, par_e_of_step};
    use crate::syntax::parse;

    fn t(s: &str) -> Term {
        parse(s).unwrap()
    }

    fn check_commuted(de: &ParE, s: &Step, r: &Commuted) {
        let m2 = apply_step(de.source(), s).unwrap();
        assert_eq!(r.deriv.source(), &m2);
        r.deriv.validate().unwrap();
        assert_eq!(r.cert.start, *de.target());
        assert_eq!(&check_cert(&r.cert, &Relation::r(true)).unwrap(), r.target());
    }

    fn shapes(c: &ConvCert) -> Vec<(Vec<usize>, Axiom)> {
        c.steps.iter().map(|s| (s.pos.0.clone(), s.axiom)).collect()
    }

    #[test]
    fn lam_expand_refl() {
        let d = ParE::refl(t("\\x. m"));
        let le = lemma_lam_expand(&d).unwrap();
        assert_eq!(le.app_target(), &t("m"));
        assert_eq!(shapes(&le.app_cert), vec![(vec![], Axiom::Beta)]);
    }

    #[test]
    fn lam_expand_eta() {
        let d = ParE::eta("y", ParE::refl(t("\\x. m")));
        assert_eq!(d.target(), &t("\\y. (\\x. m) y"));
        let le = lemma_lam_expand(&d).unwrap();
        assert_eq!(le.app_target(), &t("m"));
        assert_eq!(
            shapes(&le.app_cert),
            vec![(vec![], Axiom::Beta), (vec![], Axiom::Beta)]
        );
        for c in &le.proj_certs {
            check_cert(c, &Relation::r(true)).unwrap();
        }
    }

    #[test]
    fn lam_expand_sp() {
        let d = ParE::sp(ParE::refl(t("\\x. m")));
        let le = lemma_lam_expand(&d).unwrap();
        assert_eq!(
            shapes(&le.app_cert),
            vec![
                (vec![0, 0], Axiom::Pi1Lam),
                (vec![0, 1], Axiom::Pi2Lam),
                (vec![], Axiom::DeltaPi),
                (vec![0], Axiom::Beta),
                (vec![1], Axiom::Beta),
            ]
        );
        assert_eq!(le.app_target(), &t("<p1 m, p2 m>"));
    }

    #[test]
    fn pair_expand_cases() {
        let pe = lemma_pair_expand(&ParE::refl(t("<a, b>"))).unwrap();
        assert_eq!(pe.proj_derivs[1].target(), &t("b"));
        let pe = lemma_pair_expand(&ParE::sp(ParE::refl(t("<a, b>")))).unwrap();
        assert_eq!(
            shapes(&pe.proj_certs[0]),
            vec![(vec![], Axiom::Pi1), (vec![], Axiom::Pi1)]
        );
        let d = ParE::pair(ParE::eta("y", ParE::refl(t("a"))), ParE::refl(t("b")));
        let pe = lemma_pair_expand(&d).unwrap();
        assert_eq!(pe.proj_derivs[0].target(), &t("\\y. a y"));
        let d = ParE::eta("y", ParE::refl(t("<a, b>")));
        let pe = lemma_pair_expand(&d).unwrap();
        for (c, p) in pe.proj_certs.iter().zip(&pe.proj_derivs) {
            assert_eq!(&check_cert(c, &Relation::r(true)).unwrap(), p.target());
        }
    }

    #[test]
    fn commute_refl_and_sp() {
        let m = t("(\\x. a) b");
        let s = Step::forward(vec![], Axiom::Beta);
        let r = commute_step(&ParE::refl(m.clone()), &s).unwrap();
        assert_eq!(r.target(), &t("a"));
        assert_eq!(r.cert.steps, vec![s.clone()]);

        let de = par_e_of_step(&m, &Step::forward(vec![], Axiom::SpExp)).unwrap();
        let r = commute_step(&de, &s).unwrap();
        check_commuted(&de, &s, &r);
        assert_eq!(r.target(), &t("<p1 a, p2 a>"));

        let de = par_e_of_step(&m, &Step::forward(vec![0], Axiom::SpExp)).unwrap();
        let r = commute_step(&de, &s).unwrap();
        check_commuted(&de, &s, &r);
        assert_eq!(r.target(), &t("<p1 a, p2 a>"));
        assert_eq!(flatten_e(&r.deriv).steps, vec![Step::forward(vec![], Axiom::SpExp)]);
    }

    #[test]
    fn commute_under_binders() {
        let m = t("\\z. (\\x. x z) (p2 <z, \\y. y>)");
        let de = ParE::lam(
            "z",
            ParE::app(
                ParE::eta("w", ParE::sp(ParE::refl(t("\\x. x z")))),
                ParE::refl(t("p2 <z, \\y. y>")),
            ),
        );
        assert_eq!(de.source(), &m);
        for (p, ax) in crate::rewrite::redexes(&m, &Relation::r(true)) {
            let s = Step::forward(p, ax);
            let r = commute_step(&de, &s).unwrap();
            check_commuted(&de, &s, &r);
        }
    }

    #[test]
    fn multi_commutation() {
        let m = t("(\\x. a) b");
        let empty = ConvCert::empty(m.clone());
        let de = ParE::sp(ParE::refl(m.clone()));
        let r = commute_par_multi(&de, &empty).unwrap();
        assert_eq!(r.target(), de.target());
        assert!(r.cert.is_empty());

        let red = ConvCert::new(m.clone(), vec![Step::forward(vec![], Axiom::Beta)]);
        let (p, c, es) = commute_multi(&[de.clone(), ParE::eta("y", ParE::refl(de.target().clone()))], &red).unwrap();
        assert_eq!(es.len(), 2);
        assert_eq!(es[0].source(), &t("a"));
        assert_eq!(es[1].target(), &p);
        check_cert(&c, &Relation::r(true)).unwrap();
        assert!(commute_par_multi(&de, &ConvCert::empty(t("q"))).is_err());
    }
}
