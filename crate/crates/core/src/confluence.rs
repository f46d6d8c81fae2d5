//! Joining peaks: strip tiling for `->R` and `->E`, a grid of homogeneous
//! blocks for `->Fp`, and Church-Rosser for full conversions.

use thiserror::Error;

use crate::cert::{check_cert, invert, CertError, ConvCert};
use crate::commute::{commute_multi, CommuteError};
use crate::parallel::{
    flatten_e, flatten_r, par_e_diamond, par_e_of_step, par_r_diamond, par_r_of_step, ParE, ParR,
};
use crate::rewrite::{Direction, Relation, RelationKind, Step};
use crate::syntax::print;
use crate::term::Term;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ConfluenceError {
    #[error("certificate {which} is not a valid {relation} certificate: {cause}")]
    InvalidInput {
        which: &'static str,
        relation: String,
        cause: CertError,
    },
    #[error("certificate {which} contains a backward step at index {index}")]
    NotForward { which: &'static str, index: usize },
    #[error("the peak sides start at different terms: `{left}` and `{right}`")]
    StartMismatch { left: Term, right: Term },
    #[error(transparent)]
    Commute(#[from] CommuteError),
    #[error(transparent)]
    Cert(#[from] CertError),
}

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum ValleyError {
    #[error("{side} leg is invalid: {cause}")]
    Invalid { side: &'static str, cause: CertError },
    #[error("{side} leg contains a backward step")]
    NotForward { side: &'static str },
    #[error("{side} leg ends at `{end}`, not at the meet `{meet}`")]
    WrongMeet {
        side: &'static str,
        end: Term,
        meet: Term,
    },
}

/// Two forward certificates meeting at a common term.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Valley {
    pub relation: Relation,
    pub meet: Term,
    pub left: ConvCert,
    pub right: ConvCert,
}

impl Valley {
    pub fn verify(&self) -> Result<(), ValleyError> {
        for (side, c) in [("left", &self.left), ("right", &self.right)] {
            if !c.is_forward_only() {
                return Err(ValleyError::NotForward { side });
            }
            let end =
                check_cert(c, &self.relation).map_err(|cause| ValleyError::Invalid { side, cause })?;
            if end != self.meet {
                return Err(ValleyError::WrongMeet {
                    side,
                    end,
                    meet: self.meet.clone(),
                });
            }
        }
        Ok(())
    }

    pub fn swap(self) -> Valley {
        Valley {
            left: self.right,
            right: self.left,
            ..self
        }
    }
}

trait Par: Clone {
    fn target(&self) -> &Term;
    fn diamond(&self, other: &Self) -> (Self, Self);
    fn flatten(&self) -> ConvCert;
    fn of_step(m: &Term, s: &Step) -> Self;
}

impl Par for ParR {
    fn target(&self) -> &Term {
        ParR::target(self)
    }
    fn diamond(&self, other: &Self) -> (Self, Self) {
        let (_, a, b) = par_r_diamond(self, other);
        (a, b)
    }
    fn flatten(&self) -> ConvCert {
        flatten_r(self)
    }
    fn of_step(m: &Term, s: &Step) -> Self {
        par_r_of_step(m, s).expect("validated R step")
    }
}

impl Par for ParE {
    fn target(&self) -> &Term {
        ParE::target(self)
    }
    fn diamond(&self, other: &Self) -> (Self, Self) {
        let (_, a, b) = par_e_diamond(self, other);
        (a, b)
    }
    fn flatten(&self) -> ConvCert {
        flatten_e(self)
    }
    fn of_step(m: &Term, s: &Step) -> Self {
        par_e_of_step(m, s).expect("validated E step")
    }
}

/// One single-step derivation per step of a valid forward certificate.
fn derivations<D: Par>(c: &ConvCert) -> Vec<D> {
    let mut cur = c.start.clone();
    c.steps
        .iter()
        .map(|s| {
            let d = D::of_step(&cur, s);
            cur = d.target().clone();
            d
        })
        .collect()
}

fn flatten_chain<D: Par>(start: &Term, ds: &[D]) -> ConvCert {
    let mut out = ConvCert::empty(start.clone());
    for d in ds {
        out.extend(d.flatten());
    }
    out
}

/// Strip tiling. `top` runs rightwards and `col` downwards from a common
/// corner; returns the right edge (downwards from the end of `top`) and the
/// bottom edge (rightwards from the end of `col`).
fn tile<D: Par>(top: &[D], col: &[D]) -> (Vec<D>, Vec<D>) {
    let mut col = col.to_vec();
    let mut bottom = Vec::with_capacity(top.len());
    for t in top {
        let mut cur = t.clone();
        let mut next = Vec::with_capacity(col.len());
        for d in &col {
            let (down, right) = cur.diamond(d);
            next.push(down);
            cur = right;
        }
        col = next;
        bottom.push(cur);
    }
    (col, bottom)
}

fn validate_peak(
    c1: &ConvCert,
    c2: &ConvCert,
    rel: &Relation,
) -> Result<(Term, Term), ConfluenceError> {
    let mut ends = Vec::with_capacity(2);
    for (which, c) in [("left", c1), ("right", c2)] {
        if let Some(index) = c.steps.iter().position(|s| s.dir != Direction::Forward) {
            return Err(ConfluenceError::NotForward { which, index });
        }
        let end = check_cert(c, rel).map_err(|cause| ConfluenceError::InvalidInput {
            which,
            relation: rel.to_string(),
            cause,
        })?;
        ends.push(end);
    }
    if c1.start != c2.start {
        return Err(ConfluenceError::StartMismatch {
            left: c1.start.clone(),
            right: c2.start.clone(),
        });
    }
    let n2 = ends.pop().unwrap();
    Ok((ends.pop().unwrap(), n2))
}

fn join_homogeneous<D: Par>(
    c1: &ConvCert,
    c2: &ConvCert,
    rel: Relation,
) -> Result<Valley, ConfluenceError> {
    let (n1, n2) = validate_peak(c1, c2, &rel)?;
    let top: Vec<D> = derivations(c1);
    let col: Vec<D> = derivations(c2);
    let (right_edge, bottom) = tile(&top, &col);
    let left = flatten_chain(&n1, &right_edge);
    let right = flatten_chain(&n2, &bottom);
    let meet = left.end()?;
    Ok(Valley {
        relation: rel,
        meet,
        left,
        right,
    })
}

/// Join a peak `N1 <-R* M ->R* N2`.
pub fn join_r(c1: &ConvCert, c2: &ConvCert, extensional: bool) -> Result<Valley, ConfluenceError> {
    join_homogeneous::<ParR>(c1, c2, Relation::r(extensional))
}

/// Join a peak `N1 <-E* M ->E* N2`.
pub fn join_e(c1: &ConvCert, c2: &ConvCert, extensional: bool) -> Result<Valley, ConfluenceError> {
    join_homogeneous::<ParE>(c1, c2, Relation::e(extensional))
}

/// A maximal run of steps of one kind, as parallel derivations.
#[derive(Clone, Debug)]
enum Block {
    R(Term, Vec<ParR>),
    E(Term, Vec<ParE>),
}

impl Block {
    fn flatten(&self) -> ConvCert {
        match self {
            Block::R(s, ds) => flatten_chain(s, ds),
            Block::E(s, ds) => flatten_chain(s, ds),
        }
    }

    fn end(&self) -> &Term {
        match self {
            Block::R(s, ds) => ds.last().map_or(s, |d| d.target()),
            Block::E(s, ds) => ds.last().map_or(s, |d| d.target()),
        }
    }
}

fn blocks(c: &ConvCert, extensional: bool) -> Vec<Block> {
    let r = Relation::r(extensional);
    let mut out: Vec<Block> = Vec::new();
    let mut cur = c.start.clone();
    for s in &c.steps {
        let is_r = r.contains(s.axiom);
        match out.last_mut() {
            Some(Block::R(_, ds)) if is_r => ds.push(ParR::of_step(&cur, s)),
            Some(Block::E(_, ds)) if !is_r => ds.push(ParE::of_step(&cur, s)),
            _ if is_r => out.push(Block::R(cur.clone(), vec![ParR::of_step(&cur, s)])),
            _ => out.push(Block::E(cur.clone(), vec![ParE::of_step(&cur, s)])),
        }
        cur = out.last().unwrap().end().clone();
    }
    out
}

/// Close one cell: `top` rightwards and `left` downwards from a common
/// corner. Returns (right edge, bottom edge).
fn cell(top: &Block, left: &Block) -> Result<(Block, Block), ConfluenceError> {
    Ok(match (top, left) {
        (Block::R(_, t), Block::R(_, l)) => {
            let (re, bo) = tile(t, l);
            (Block::R(top.end().clone(), re), Block::R(left.end().clone(), bo))
        }
        (Block::E(_, t), Block::E(_, l)) => {
            let (re, bo) = tile(t, l);
            (Block::E(top.end().clone(), re), Block::E(left.end().clone(), bo))
        }
        (Block::E(_, t), Block::R(..)) => {
            let (_, cert, es) = commute_multi(t, &left.flatten())?;
            (
                Block::R(cert.start.clone(), derivations(&cert)),
                Block::E(left.end().clone(), es),
            )
        }
        (Block::R(..), Block::E(_, l)) => {
            let (_, cert, es) = commute_multi(l, &top.flatten())?;
            (
                Block::E(top.end().clone(), es),
                Block::R(cert.start.clone(), derivations(&cert)),
            )
        }
    })
}

/// Join a peak `N1 <-Fp* M ->Fp* N2` by tiling a grid whose cells pair up
/// maximal homogeneous blocks of the two sides.
pub fn join_fp(c1: &ConvCert, c2: &ConvCert, extensional: bool) -> Result<Valley, ConfluenceError> {
    let rel = Relation::fp(extensional);
    let (n1, n2) = validate_peak(c1, c2, &rel)?;
    let top = blocks(c1, extensional);
    let mut col = blocks(c2, extensional);
    let mut bottom = Vec::with_capacity(top.len());
    for t in &top {
        let mut cur = t.clone();
        let mut next = Vec::with_capacity(col.len());
        for l in &col {
            let (down, right) = cell(&cur, l)?;
            next.push(down);
            cur = right;
        }
        col = next;
        bottom.push(cur);
    }
    let chain = |start: &Term, bs: &[Block]| {
        let mut out = ConvCert::empty(start.clone());
        for b in bs {
            out.extend(b.flatten());
        }
        out
    };
    let left = chain(&n1, &col);
    let right = chain(&n2, &bottom);
    let meet = left.end()?;
    Ok(Valley {
        relation: rel,
        meet,
        left,
        right,
    })
}

fn orientation_key(c: &ConvCert) -> (String, Vec<(Vec<usize>, &'static str, &'static str)>) {
    (
        print(&c.start),
        c.steps
            .iter()
            .map(|s| (s.pos.0.clone(), s.axiom.name(), s.dir.symbol()))
            .collect(),
    )
}

/// From a conversion `M <->Fp* N`, a valley `M ->Fp* P <-Fp* N`.
///
/// Of `c` and its converse, the one with the smaller printed key is
/// processed, so `church_rosser(invert(c))` is the mirror image of
/// `church_rosser(c)`.
pub fn church_rosser(c: &ConvCert, extensional: bool) -> Result<Valley, ConfluenceError> {
    let rel = Relation::fp(extensional);
    check_cert(c, &rel).map_err(|cause| ConfluenceError::InvalidInput {
        which: "input",
        relation: rel.to_string(),
        cause,
    })?;
    let inv = invert(c)?;
    if orientation_key(&inv) < orientation_key(c) {
        return Ok(church_rosser_directed(&inv, extensional)?.swap());
    }
    church_rosser_directed(c, extensional)
}

fn church_rosser_directed(c: &ConvCert, extensional: bool) -> Result<Valley, ConfluenceError> {
    let mut left = ConvCert::empty(c.start.clone());
    let mut right = ConvCert::empty(c.start.clone());
    let mut meet = c.start.clone();
    let mut cur = c.start.clone();
    let mut i = 0;
    while i < c.steps.len() {
        if c.steps[i].dir == Direction::Forward {
            let j = c.steps[i..]
                .iter()
                .position(|s| s.dir != Direction::Forward)
                .map_or(c.steps.len(), |k| i + k);
            let run = ConvCert::new(cur.clone(), c.steps[i..j].to_vec());
            let v = join_fp(&right, &run, extensional)?;
            left.extend(v.left);
            right = v.right;
            meet = v.meet;
            cur = run.end()?;
            i = j;
        } else {
            let single = ConvCert::new(cur.clone(), vec![c.steps[i].clone()]);
            let fwd = invert(&single)?;
            cur = fwd.start.clone();
            let mut steps = fwd.steps;
            steps.extend(right.steps);
            right = ConvCert::new(cur.clone(), steps);
            i += 1;
        }
    }
    Ok(Valley {
        relation: Relation::new(RelationKind::Fp, extensional),
        meet,
        left,
        right,
    })
}
