use proptest::prelude::*;

use lambda_sp::gen::{case_rng, random_besp_walk, random_fp_zigzag, random_par_e, random_term};
use lambda_sp::parallel::flatten_e;
use lambda_sp::term::Side;
use lambda_sp::{
    alpha_eq, check_cert, church_rosser, concat, erase, free_vars, invert, is_pure, parse, print, substitute,
    transform_conservativity, Relation, Term, VarName,
};

fn name() -> impl Strategy<Value = &'static str> {
    prop::sample::select(vec!["x", "y", "z", "f", "x0"])
}

fn term() -> impl Strategy<Value = Term> {
    let leaf = name().prop_map(Term::var);
    leaf.prop_recursive(5, 40, 2, |inner| {
        prop_oneof![
            (name(), inner.clone()).prop_map(|(x, b)| Term::lam(x, b)),
            (inner.clone(), inner.clone()).prop_map(|(f, a)| Term::app(f, a)),
            (inner.clone(), inner.clone()).prop_map(|(l, r)| Term::pair(l, r)),
            (any::<bool>(), inner).prop_map(|(s, t)| Term::proj(if s { Side::Fst } else { Side::Snd }, t)),
        ]
    })
}

proptest! {
    #[test]
    fn print_parse_round_trip(m in term()) {
        let back = parse(&print(&m)).unwrap();
        prop_assert_eq!(&back, &m);
        prop_assert_eq!(print(&back), print(&m));
    }

    #[test]
    fn erase_is_pure_and_idempotent(m in term()) {
        let e = erase(&m);
        prop_assert!(is_pure(&e));
        prop_assert_eq!(erase(&e), e.clone());
        if is_pure(&m) {
            prop_assert_eq!(e, m);
        }
    }

    #[test]
    fn substitution_avoids_capture(m in term(), n in term(), x in name()) {
        let x = VarName::new(x);
        let s = substitute(&m, &x, &n);
        let mut expected = free_vars(&m);
        if expected.remove(&x) {
            expected.extend(free_vars(&n));
        }
        prop_assert_eq!(free_vars(&s), expected);
        prop_assert!(alpha_eq(&substitute(&m, &x, &Term::var(x.clone())), &m));
    }

    #[test]
    fn parallel_expansions_flatten_to_checked_certificates(seed in any::<u64>(), ext in any::<bool>()) {
        let rng = &mut case_rng(seed, 0);
        let m = random_term(rng, 10, false);
        let d = random_par_e(rng, &m, ext);
        let end = check_cert(&flatten_e(&d), &Relation::e(ext)).unwrap();
        prop_assert_eq!(&end, d.target());
    }

    #[test]
    fn inverse_composes_to_a_loop(seed in any::<u64>(), ext in any::<bool>()) {
        let c = random_fp_zigzag(&mut case_rng(seed, 1), 8, 6, ext);
        let fp = Relation::fp(ext);
        let back = invert(&c).unwrap();
        let loop_ = concat(&c, &back).unwrap();
        prop_assert_eq!(check_cert(&loop_, &fp).unwrap(), c.start.clone());
        prop_assert_eq!(invert(&back).unwrap(), c);
    }

    #[test]
    fn church_rosser_valleys_verify(seed in any::<u64>(), ext in any::<bool>()) {
        let c = random_fp_zigzag(&mut case_rng(seed, 2), 8, 6, ext);
        let v = church_rosser(&c, ext).unwrap();
        v.verify().unwrap();
        prop_assert_eq!(&v.left.start, &c.start);
        prop_assert_eq!(v.right.start, check_cert(&c, &Relation::fp(ext)).unwrap());
    }

    #[test]
    fn conservativity_yields_pure_conversions(seed in any::<u64>(), ext in any::<bool>()) {
        let c = random_besp_walk(&mut case_rng(seed, 3), 10, 6, ext);
        let n = check_cert(&c, &Relation::besp(ext)).unwrap();
        let out = transform_conservativity(&c.start, &n, &c, ext).unwrap();
        prop_assert_eq!(&out.start, &c.start);
        prop_assert_eq!(check_cert(&out, &Relation::be(ext)).unwrap(), n);
    }
}
