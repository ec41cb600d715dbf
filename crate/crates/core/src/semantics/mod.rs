//! Bounded relational semantics: a term of type `ω` in context `Γ` denotes a
//! set of pairs `(γ, p)` where `γ` gives a multiset of points per variable
//! and `p` is a point of `ω`. Every multiset is cut off at `k` elements.

mod denote;
mod point;
mod verify;

pub use denote::{denote, denote_at, denote_within, environment_points, Denotation};
pub use point::{
    interpret, interpret_bang, states_of, Environment, Point, SemanticsError, Valuation,
};
pub use verify::{
    denotation_as_relation, uncurried_pairs, verify_correctness, verify_denotation,
    verify_invariance, CorrectnessReport, CurriedCheck, InvarianceReport, Verdict,
};

#[cfg(test)]
mod tests {
    use super::*;
    use crate::connectives::DEFAULT_CAP;
    use crate::fixtures::{four_cycle, stack};
    use crate::lambda::{parse_context, parse_term, Context};
    use crate::multiset::Multiset;
    use crate::token::Token;

    fn rho_stack() -> Valuation {
        Valuation::new().with("X", stack(1).into_ref())
    }

    fn closed(s: &str, rho: &Valuation, k: usize) -> Denotation {
        denote(&Context::new(), &parse_term(s).unwrap(), rho, k).unwrap()
    }

    fn base(s: &str) -> Point {
        Point::Base(s.parse::<Token>().unwrap())
    }

    #[test]
    fn identity_is_the_diagonal() {
        let rho = rho_stack();
        let d = closed("\\x:X. x", &rho, 2);
        let states = rho.get("X").unwrap().states();
        assert_eq!(d.len(), states.len());
        for s in states {
            let p = Point::Base(s);
            assert!(d.contains(
                &Environment(vec![]),
                &Point::arrow(Multiset::singleton(p.clone()), p)
            ));
        }
    }

    #[test]
    fn variables_use_their_own_coordinate() {
        let ctx = parse_context("x : X, y : X").unwrap();
        let d = denote(&ctx, &parse_term("y").unwrap(), &rho_stack(), 1).unwrap();
        assert!(d
            .iter()
            .all(|(env, p)| env.0[0].is_empty() && env.0[1] == Multiset::singleton(p.clone())));
        assert_eq!(
            denote(&ctx, &parse_term("y").unwrap(), &rho_stack(), 0)
                .unwrap()
                .len(),
            0
        );
    }

    #[test]
    fn first_projection_discards_its_second_argument() {
        let rho = rho_stack();
        let d = closed("\\x:X. \\y:X. x", &rho, 1);
        for (_, p) in d.iter() {
            let (args, s) = p.uncurry();
            assert_eq!(args[0], &Multiset::singleton(s.clone()));
            assert!(args[1].is_empty());
        }
        assert_eq!(d.len(), 3);
    }

    #[test]
    fn duplication_needs_width_two() {
        let rho = Valuation::new().with("X", four_cycle().into_ref());
        let t = "\\f:X -> X -> X. \\x:X. ((f) x) x";
        let uses_x_twice = |d: &Denotation| d.iter().any(|(_, p)| p.uncurry().0[1].len() == 2);
        assert!(!uses_x_twice(&closed(t, &rho, 1)));
        assert!(uses_x_twice(&closed(t, &rho, 2)));
    }

    #[test]
    fn zero_and_sums() {
        let rho = rho_stack();
        let ty = crate::lambda::parse_type("X -> X").unwrap();
        let zero = denote_at(&Context::new(), &parse_term("0").unwrap(), &ty, &rho, 2).unwrap();
        assert!(zero.is_empty());
        let a = closed("\\x:X. x", &rho, 2);
        let sum = closed("(\\x:X. x) + 0", &rho, 2);
        assert_eq!(a, sum);
    }

    #[test]
    fn differential_of_identity_is_constant() {
        let rho = rho_stack();
        let ctx = parse_context("u : X").unwrap();
        let d = denote(&ctx, &parse_term("D (\\x:X. x) . u").unwrap(), &rho, 2).unwrap();
        let e = denote(&ctx, &parse_term("\\x:X. u").unwrap(), &rho, 2).unwrap();
        assert_eq!(d, e);
        assert!(d.iter().all(|(_, p)| p.uncurry().0[0].is_empty()));
        assert_eq!(d.len(), 3);
        assert!(d.contains(
            &Environment(vec![Multiset::singleton(base("()"))]),
            &Point::arrow(Multiset::new(), base("()"))
        ));
    }

    #[test]
    fn sound_on_small_combinators() {
        let rho = rho_stack();
        for t in [
            "\\x:X. x",
            "\\x:X. \\y:X. x",
            "\\f:X -> X. \\x:X. (f) (f) x",
            "\\f:X -> X. D f . (f) 0",
        ] {
            let ctx = Context::new();
            let r =
                verify_correctness(&ctx, &parse_term(t).unwrap(), &rho, 1, DEFAULT_CAP).unwrap();
            assert!(r.holds(), "{t}: {r:?}");
        }
    }

    #[test]
    fn an_extra_pair_breaks_soundness() {
        let rho = Valuation::new().with("X", four_cycle().into_ref());
        let ctx = Context::new();
        let t = parse_term("\\x:X. x").unwrap();
        let ty = crate::lambda::parse_type("X -> X").unwrap();
        let mut d = denote_at(&ctx, &t, &ty, &rho, 1).unwrap();
        d.pairs.insert((
            Environment(vec![]),
            Point::arrow(Multiset::singleton(base("s1")), base("s2")),
        ));
        let r = verify_denotation(&ctx, &ty, &d, &rho, DEFAULT_CAP).unwrap();
        assert!(matches!(r.verdict, Verdict::Fails { .. }));
        assert_eq!(r.curried, CurriedCheck::Agrees);
    }

    #[test]
    fn beta_preserves_the_denotation() {
        let rho = rho_stack();
        let ctx = parse_context("a : X").unwrap();
        let r = verify_invariance(
            &ctx,
            &parse_term("(\\x:X. x) a").unwrap(),
            &parse_term("a").unwrap(),
            &rho,
            2,
        )
        .unwrap();
        assert!(r.equal(), "{r:?}");
        let r = verify_invariance(
            &ctx,
            &parse_term("a").unwrap(),
            &parse_term("0").unwrap(),
            &rho,
            2,
        )
        .unwrap();
        assert!(!r.equal());
        assert_eq!(r.only_left.len(), 3);
        assert!(r.only_left.iter().any(|s| s == "a:=[()] |- ()"));
    }

    #[test]
    fn differential_redex_needs_one_more_element_inside() {
        let rho = rho_stack();
        let ctx = parse_context("u : X, h : X -> X -> X").unwrap();
        let redex = parse_term("D (\\x:X. ((h) x) x) . u").unwrap();
        let (_, reduct) = crate::lambda::root_step(&redex).unwrap();
        let ty = crate::lambda::typecheck(&ctx, &redex).unwrap();
        let cut = denote_at(&ctx, &redex, &ty, &rho, 2).unwrap();
        let exact = denote_within(&ctx, &redex, &ty, &rho, 2, 3).unwrap();
        assert!(cut.pairs.is_subset(&exact.pairs));
        assert!(cut.len() < exact.len());
        let r = verify_invariance(&ctx, &redex, &reduct, &rho, 2).unwrap();
        assert!(r.equal(), "{r:?}");
        assert_eq!(r.internal, 3);
    }
}
