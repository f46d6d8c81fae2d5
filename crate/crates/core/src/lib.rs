//! Lambda calculus with surjective pairing.
//!
//! The crate provides terms and concrete syntax, the rewrite axioms and
//! checkable conversion certificates, parallel reduction and expansion with
//! constructive diamond and commutation procedures, confluence of the
//! expansion-oriented system, and a transformer that turns conversions in
//! the theory with surjective pairing between pure terms into plain
//! beta-eta conversions.

pub mod cert;
pub mod cli;
pub mod commute;
pub mod confluence;
pub mod conservativity;
pub mod gen;
pub mod json;
pub mod parallel;
pub mod rewrite;
pub mod suites;
pub mod syntax;
pub mod term;

pub use cert::{
    check_cert, concat, cert_subst, embed_besp_in_fp, invert, under_context, CertError,
    CertOpError, ConvCert,
};
pub use commute::{commute_multi, commute_par_multi, commute_step, lemma_lam_expand, lemma_pair_expand};
pub use confluence::{church_rosser, join_e, join_fp, join_r, Valley};
pub use conservativity::{
    erase, erase_subst_check, multi_step_erase, step_erase, transform_conservativity,
    trivial_witness, SymWitness,
};
pub use parallel::{par_e_diamond, par_r_diamond, ParE, ParR};
pub use rewrite::{
    apply_step, redexes, reduce_bounded, root_step, Axiom, Direction, Relation, RelationKind,
    Step, StepError, Strategy,
};
pub use syntax::{parse, print, ParseError};
pub use term::{
    alpha_eq, free_vars, is_pure, replace_at, substitute, subterm_at, Position, Side, Term,
    TermError, VarName, View,
};
