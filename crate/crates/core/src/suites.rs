//! Named randomized property suites, shared by the `fuzz` command and the
//! acceptance tests. Case `i` of a run seeded with `s` uses its own
//! generator derived from `(s, i)`, so any case replays alone.

use std::collections::HashSet;
use std::fmt;
use std::time::{Duration, Instant};

use serde_json::{json, Value};

use crate::cert::{check_cert, ConvCert};
use crate::commute::commute_step;
use crate::confluence::church_rosser;
use crate::conservativity::{erase, erase_subst_check, transform_conservativity};
use crate::gen::{
    case_rng, random_besp_walk, random_fp_zigzag, random_par_e, random_par_r, random_step,
    random_term, FREE_NAMES,
};
use crate::json::cert_to_value;
use crate::parallel::{flatten_e, flatten_r, par_e_diamond, par_r_diamond, ParR};
use crate::rewrite::{Axiom, Relation};
use crate::syntax::print;
use crate::term::{subst_bound, Node, Term, VarName};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Suite {
    Diamond,
    Commute,
    Join,
    EraseSubst,
    EndToEnd,
}

impl Suite {
    pub const ALL: [Suite; 5] = [
        Suite::Diamond,
        Suite::Commute,
        Suite::Join,
        Suite::EraseSubst,
        Suite::EndToEnd,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Diamond => "diamond",
            Suite::Commute => "commute",
            Suite::Join => "join",
            Suite::EraseSubst => "erase-subst",
            Suite::EndToEnd => "end-to-end",
        }
    }

    pub fn from_name(s: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|x| x.name() == s)
    }

    /// Term size bound used when none is given.
    pub fn default_size(self) -> usize {
        match self {
            Suite::Join => 8,
            _ => 10,
        }
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct SuiteConfig {
    pub extensional: bool,
    pub size: usize,
    /// Maximum walk length for the join and end-to-end suites.
    pub len: usize,
    /// Terms up to this size are cross-checked against the enumeration
    /// oracle in the diamond suite.
    pub oracle_size: usize,
}

impl SuiteConfig {
    pub fn for_suite(suite: Suite, extensional: bool) -> Self {
        SuiteConfig {
            extensional,
            size: suite.default_size(),
            len: 6,
            oracle_size: 7,
        }
    }
}

/// A failing case with ready-to-run input files for the matching command.
#[derive(Clone, Debug)]
pub struct Counterexample {
    pub index: u64,
    pub message: String,
    /// The command that replays the case, with file names for its inputs.
    pub command: Vec<String>,
    pub files: Vec<(String, Value)>,
}

#[derive(Clone, Debug)]
pub struct SuiteReport {
    pub suite: Suite,
    pub seed: u64,
    pub cases: u64,
    pub failures: Vec<Counterexample>,
    /// Extra counts reported by some suites (oracle checks, mutations).
    pub checks: Vec<(&'static str, u64)>,
    pub elapsed: Duration,
}

impl SuiteReport {
    pub fn passed(&self) -> bool {
        self.failures.is_empty()
    }

    /// Deterministic summary: the elapsed time is left out.
    pub fn to_json(&self) -> Value {
        json!({
            "suite": self.suite.name(),
            "seed": self.seed,
            "cases": self.cases,
            "failures": self.failures.iter().map(|c| json!({
                "index": c.index,
                "message": c.message,
                "command": c.command,
                "files": c.files.iter().map(|(n, v)| json!({"name": n, "content": v})).collect::<Vec<_>>(),
            })).collect::<Vec<_>>(),
            "checks": self.checks.iter().map(|(k, v)| json!({"name": k, "count": v})).collect::<Vec<_>>(),
        })
    }
}

type CaseResult = Result<(), Counterexample>;

struct Counters(Vec<(&'static str, u64)>);

impl Counters {
    fn bump(&mut self, key: &'static str, by: u64) {
        match self.0.iter_mut().find(|(k, _)| *k == key) {
            Some((_, v)) => *v += by,
            None => self.0.push((key, by)),
        }
    }
}

pub fn run_suite(suite: Suite, seed: u64, count: u64, cfg: &SuiteConfig) -> SuiteReport {
    let start = Instant::now();
    let mut failures = Vec::new();
    let mut counters = Counters(Vec::new());
    for index in 0..count {
        let r = match suite {
            Suite::Diamond => diamond_case(seed, index, cfg, &mut counters),
            Suite::Commute => commute_case(seed, index, cfg),
            Suite::Join => join_case(seed, index, cfg),
            Suite::EraseSubst => erase_subst_case(seed, index, cfg),
            Suite::EndToEnd => end_to_end_case(seed, index, cfg, &mut counters),
        };
        if let Err(c) = r {
            failures.push(c);
        }
    }
    SuiteReport {
        suite,
        seed,
        cases: count,
        failures,
        checks: counters.0,
        elapsed: start.elapsed(),
    }
}

fn ext_flag(cfg: &SuiteConfig) -> String {
    format!("--extensional={}", cfg.extensional)
}

fn fail(index: u64, message: impl Into<String>, command: &[&str], files: Vec<(String, Value)>) -> Counterexample {
    Counterexample {
        index,
        message: message.into(),
        command: command.iter().map(|s| s.to_string()).collect(),
        files,
    }
}

/// Every target of a parallel reduction from `m`, by exhaustive enumeration.
pub fn par_r_reducts(m: &Term) -> HashSet<Term> {
    let mut out = HashSet::new();
    match m.node() {
        Node::Free(_) | Node::Bound(_) => {
            out.insert(m.clone());
        }
        Node::Abs(h, b) => {
            for t in par_r_reducts(b) {
                out.insert(Term::abs_raw(h.clone(), t));
            }
        }
        Node::App(f, a) => {
            let ta = par_r_reducts(a);
            for tf in par_r_reducts(f) {
                for x in &ta {
                    out.insert(Term::app(tf.clone(), x.clone()));
                }
            }
            match f.node() {
                Node::Abs(_, b) => {
                    for tb in par_r_reducts(b) {
                        for x in &ta {
                            out.insert(subst_bound(&tb, 0, x));
                        }
                    }
                }
                Node::Pair(l, r) => {
                    let tr = par_r_reducts(r);
                    for tl in par_r_reducts(l) {
                        for y in &tr {
                            for x in &ta {
                                out.insert(Term::pair(
                                    Term::app(tl.clone(), x.clone()),
                                    Term::app(y.clone(), x.clone()),
                                ));
                            }
                        }
                    }
                }
                _ => {}
            }
        }
        Node::Pair(l, r) => {
            let tr = par_r_reducts(r);
            for tl in par_r_reducts(l) {
                for y in &tr {
                    out.insert(Term::pair(tl.clone(), y.clone()));
                }
            }
        }
        Node::Proj(side, u) => {
            for t in par_r_reducts(u) {
                out.insert(Term::proj(*side, t));
            }
            match u.node() {
                Node::Pair(l, r) => {
                    let kept = if side.index() == 0 { l } else { r };
                    out.extend(par_r_reducts(kept));
                }
                Node::Abs(h, b) => {
                    for t in par_r_reducts(b) {
                        out.insert(Term::abs_raw(h.clone(), Term::proj(*side, t)));
                    }
                }
                _ => {}
            }
        }
    }
    out
}

fn peak_files(a: &ConvCert, b: &ConvCert, rel: &Relation) -> Vec<(String, Value)> {
    vec![
        ("left.json".into(), cert_to_value(a, rel)),
        ("right.json".into(), cert_to_value(b, rel)),
    ]
}

fn diamond_case(seed: u64, index: u64, cfg: &SuiteConfig, counters: &mut Counters) -> CaseResult {
    let rng = &mut case_rng(seed, index);
    let m = random_term(rng, cfg.size, false);
    let (d1, d2) = (random_par_r(rng, &m), random_par_r(rng, &m));
    let rrel = Relation::r(cfg.extensional);
    let files = || peak_files(&flatten_r(&d1), &flatten_r(&d2), &rrel);
    let cmd = ["join", "left.json", "right.json"];
    let (p, e1, e2) = par_r_diamond(&d1, &d2);
    let ok = |e: &ParR, from: &Term| e.validate().is_ok() && e.source() == from && e.target() == &p;
    if !ok(&e1, d1.target()) || !ok(&e2, d2.target()) {
        return Err(fail(index, "parallel reduction diamond is not closed", &cmd, files()));
    }
    if m.size() <= cfg.oracle_size {
        counters.bump("oracle checks", 1);
        if !par_r_reducts(d1.target()).contains(&p) || !par_r_reducts(d2.target()).contains(&p) {
            return Err(fail(index, format!("join `{}` is not a one-step parallel reduct", print(&p)), &cmd, files()));
        }
        if !par_r_reducts(&m).contains(d1.target()) {
            return Err(fail(index, "generated derivation escapes the oracle", &cmd, files()));
        }
    }
    let (f1, f2) = (random_par_e(rng, &m, cfg.extensional), random_par_e(rng, &m, cfg.extensional));
    let (q, g1, g2) = par_e_diamond(&f1, &f2);
    let good = g1.validate().is_ok()
        && g2.validate().is_ok()
        && g1.source() == f1.target()
        && g2.source() == f2.target()
        && g1.target() == &q
        && g2.target() == &q;
    if !good {
        let erel = Relation::e(cfg.extensional);
        let files = peak_files(&flatten_e(&f1), &flatten_e(&f2), &erel);
        return Err(fail(index, "parallel expansion diamond is not closed", &cmd, files));
    }
    Ok(())
}

fn commute_case(seed: u64, index: u64, cfg: &SuiteConfig) -> CaseResult {
    let rng = &mut case_rng(seed, index);
    let rrel = Relation::r(cfg.extensional);
    let (m, s) = loop {
        let m = random_term(rng, cfg.size, false);
        if let Some(s) = random_step(rng, &m, &rrel) {
            break (m, s);
        }
    };
    let de = random_par_e(rng, &m, cfg.extensional);
    let fp = Relation::fp(cfg.extensional);
    let files = || peak_files(&flatten_e(&de), &ConvCert::new(m.clone(), vec![s.clone()]), &fp);
    let cmd = ["join", "left.json", "right.json"];
    let r = match commute_step(&de, &s) {
        Ok(r) => r,
        Err(e) => return Err(fail(index, e.to_string(), &cmd, files())),
    };
    let m2 = crate::rewrite::apply_step(&m, &s).expect("generated step applies");
    let end = check_cert(&r.cert, &rrel);
    let good = r.cert.start == *de.target()
        && end.as_ref().ok() == Some(r.target())
        && r.deriv.validate().is_ok()
        && r.deriv.source() == &m2;
    if !good {
        return Err(fail(index, "commutation output does not replay to matching endpoints", &cmd, files()));
    }
    Ok(())
}

fn join_case(seed: u64, index: u64, cfg: &SuiteConfig) -> CaseResult {
    let rng = &mut case_rng(seed, index);
    let c = random_fp_zigzag(rng, cfg.size, cfg.len, cfg.extensional);
    let fp = Relation::fp(cfg.extensional);
    let files = || vec![("conversion.json".to_string(), cert_to_value(&c, &fp))];
    let cmd = ["cr", "conversion.json"];
    let end = check_cert(&c, &fp).expect("generated zig-zag checks");
    let v = match church_rosser(&c, cfg.extensional) {
        Ok(v) => v,
        Err(e) => return Err(fail(index, e.to_string(), &cmd, files())),
    };
    if let Err(e) = v.verify() {
        return Err(fail(index, e.to_string(), &cmd, files()));
    }
    if v.left.start != c.start || v.right.start != end {
        return Err(fail(index, "valley legs start at the wrong terms", &cmd, files()));
    }
    Ok(())
}

fn erase_subst_case(seed: u64, index: u64, cfg: &SuiteConfig) -> CaseResult {
    let rng = &mut case_rng(seed, index);
    let m = random_term(rng, cfg.size, false);
    let n = random_term(rng, cfg.size, false);
    let x = VarName::new(FREE_NAMES[(index % FREE_NAMES.len() as u64) as usize]);
    if erase_subst_check(&m, &x, &n) {
        return Ok(());
    }
    let case = json!({"m": print(&m), "x": x.as_str(), "n": print(&n), "erased": print(&erase(&m))});
    Err(fail(index, "erasure does not commute with substitution", &["erase", "case.json"], vec![("case.json".into(), case)]))
}

/// Single-step tampers of a certificate: each step's axiom flipped between
/// beta and eta, and each step's position moved.
pub fn tampers(c: &ConvCert) -> Vec<ConvCert> {
    let mut out = Vec::new();
    for i in 0..c.steps.len() {
        let mut t = c.clone();
        let s = &mut t.steps[i];
        s.axiom = if s.axiom == Axiom::Beta { Axiom::Eta } else { Axiom::Beta };
        out.push(t);
        let mut t = c.clone();
        let pos = &mut t.steps[i].pos.0;
        match pos.last_mut() {
            Some(last) => *last = 1 - (*last).min(1),
            None => pos.push(0),
        }
        out.push(t);
    }
    out
}

/// Whether a certificate proves `m = n` under `rel`.
pub fn proves(c: &ConvCert, rel: &Relation, m: &Term, n: &Term) -> bool {
    &c.start == m && check_cert(c, rel).is_ok_and(|end| &end == n)
}

fn end_to_end_case(seed: u64, index: u64, cfg: &SuiteConfig, counters: &mut Counters) -> CaseResult {
    let rng = &mut case_rng(seed, index);
    let c = random_besp_walk(rng, cfg.size, cfg.len, cfg.extensional);
    let besp = Relation::besp(cfg.extensional);
    let files = || vec![("input.json".to_string(), cert_to_value(&c, &besp))];
    let ext = ext_flag(cfg);
    let cmd = ["transform", "input.json", ext.as_str()];
    let m = c.start.clone();
    let n = check_cert(&c, &besp).expect("generated walk checks");
    let out = match transform_conservativity(&m, &n, &c, cfg.extensional) {
        Ok(out) => out,
        Err(e) => return Err(fail(index, e.to_string(), &cmd, files())),
    };
    let be = Relation::be(cfg.extensional);
    if !proves(&out, &be, &m, &n) {
        return Err(fail(index, "output does not check with the right endpoints", &cmd, files()));
    }
    for t in tampers(&out) {
        counters.bump("mutations rejected", 1);
        if proves(&t, &be, &m, &n) {
            let msg = format!(
                "a tampered output was accepted; it replays as another proof of the same equation:\n{}",
                crate::cli::render_cert(&t)
            );
            return Err(fail(index, msg, &cmd, files()));
        }
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse;

    #[test]
    fn oracle_small() {
        let r = par_r_reducts(&parse("(\\x. x) ((\\y. y) a)").unwrap());
        // `(\x. x) a` and `(\y. y) a` coincide up to alpha.
        assert_eq!(r.len(), 3);
        assert!(r.contains(&parse("a").unwrap()));
    }

    #[test]
    fn suites_pass_briefly() {
        for suite in Suite::ALL {
            for ext in [true, false] {
                let rep = run_suite(suite, 0, 25, &SuiteConfig::for_suite(suite, ext));
                assert!(rep.passed(), "{suite} ext={ext}: {:?}", rep.failures.first().map(|c| &c.message));
            }
        }
    }

    #[test]
    fn names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }
}
