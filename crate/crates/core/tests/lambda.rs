mod support;

use intsys::lambda::{
    check, diff_substitute, is_normal, normalize, parse_context, parse_term, parse_type, reduce,
    substitute, typecheck, Context, Term, Type, DEFAULT_MAX_STEPS,
};
use proptest::prelude::*;
use support::gen::{typed_term, x};

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn generated_terms_have_the_requested_type(seed: u64, diff: bool) {
        let (ctx, t, ty) = typed_term(seed, 3, diff);
        prop_assert!(check(&ctx, &t, &ty).is_ok(), "{} : {}", t, ty);
    }

    #[test]
    fn printing_then_parsing_is_the_identity(seed: u64, diff: bool) {
        let (_, t, ty) = typed_term(seed, 3, diff);
        prop_assert_eq!(parse_term(&t.to_string()).unwrap(), t.clone());
        prop_assert_eq!(parse_type(&ty.to_string()).unwrap(), ty);
    }

    #[test]
    fn reduction_preserves_types_and_terminates(seed: u64, diff: bool) {
        let (ctx, t, ty) = typed_term(seed, 3, diff);
        let mut cur = t.clone();
        for _ in 0..DEFAULT_MAX_STEPS {
            match reduce(&cur) {
                Some(next) => {
                    prop_assert!(check(&ctx, &next, &ty).is_ok(), "{} -> {}", cur, next);
                    cur = next;
                }
                None => break,
            }
        }
        prop_assert!(is_normal(&cur), "{} did not normalize", t);
        prop_assert_eq!(normalize(&t, DEFAULT_MAX_STEPS).unwrap(), cur);
    }

    #[test]
    fn substitution_removes_the_variable(seed: u64) {
        let (ctx, t, _) = typed_term(seed, 3, true);
        if let Some((x, _)) = ctx.entries().last() {
            let u = Term::Zero(None);
            let s = substitute(&t, x, &u);
            prop_assert!(!s.free_vars().contains(x));
            let fv_t = t.free_vars();
            prop_assert!(s.free_vars().is_subset(&fv_t));
        }
    }

    #[test]
    fn derivative_in_an_absent_variable_is_zero(seed: u64) {
        let (_, t, _) = typed_term(seed, 3, true);
        prop_assert!(diff_substitute(&t, "absent", &Term::var("u")).is_zero());
    }
}

#[test]
fn derivative_of_a_variable_is_the_argument() {
    let u = Term::var("u");
    assert_eq!(diff_substitute(&Term::var("x"), "x", &u), u);
    assert!(diff_substitute(&Term::var("y"), "x", &u).is_zero());
}

#[test]
fn application_is_krivine_style() {
    let t = parse_term("((f) a) b").unwrap();
    assert_eq!(
        t,
        Term::apps(Term::var("f"), [Term::var("a"), Term::var("b")])
    );
    let ctx = parse_context("f : X -> X -> X, a : X, b : X").unwrap();
    assert_eq!(typecheck(&ctx, &t).unwrap(), x());
}

#[test]
fn arrows_associate_to_the_right() {
    assert_eq!(
        parse_type("X -> X -> X").unwrap(),
        Type::arrow(x(), Type::arrow(x(), x()))
    );
}

#[test]
fn parse_errors_carry_positions() {
    let e = parse_term("\\x:X.\n  (x) )").unwrap_err();
    assert_eq!(e.line, 2);
    assert!(e.column > 1);
    assert!(parse_term("\\x. x").is_err());
    assert!(parse_context("x : X, x : X").is_err());
}

#[test]
fn comments_are_ignored() {
    let t = parse_term("# the identity\n\\x:X. x # on X\n").unwrap();
    assert_eq!(typecheck(&Context::new(), &t).unwrap(), Type::arrow(x(), x()));
}
