//! Property tests: exact-arithmetic invariants, floor bracketing, carry
//! structure, preimage completeness, parser round-trips, and the
//! case-split/original-system equivalence.

use std::cmp::Ordering;

use num_bigint::BigInt;
use num_traits::Zero;
use proptest::prelude::*;

use beatty_core::alpha::{self, AlphaPoly, AlphaRat};
use beatty_core::rat::{rat_big, Rat};
use beatty_core::syntax::{
    case_matches, flatten, parse_system, system_holds, Constraint, FracSum, System, Term,
};
use beatty_core::BeattyCtx;

// ---------------------------------------------------------------------------
// Strategies
// ---------------------------------------------------------------------------

fn rat_strategy(bound: i64) -> impl Strategy<Value = Rat> {
    (-bound..=bound, 1i64..=bound).prop_map(|(n, d)| Rat::new(BigInt::from(n), BigInt::from(d)))
}

fn poly_strategy(deg: usize, bound: i64) -> impl Strategy<Value = AlphaPoly> {
    proptest::collection::vec(rat_strategy(bound), 1..=deg + 1).prop_map(AlphaPoly::from_coeffs)
}

fn nonzero_poly(deg: usize, bound: i64) -> impl Strategy<Value = AlphaPoly> {
    poly_strategy(deg, bound).prop_filter("nonzero polynomial", |p| !p.is_zero())
}

fn alpha_rat(deg: usize, bound: i64) -> impl Strategy<Value = AlphaRat> {
    (poly_strategy(deg, bound), nonzero_poly(deg, bound)).prop_map(|(n, d)| AlphaRat::ratio(n, d))
}

/// Integer-valued terms over `vars` variables, f-depth at most 2.
fn term_strategy(vars: usize) -> impl Strategy<Value = Term> {
    let leaf = prop_oneof![
        (-9i64..=9).prop_map(Term::int),
        (0..vars).prop_map(Term::Var),
    ];
    leaf.prop_recursive(3, 12, 3, |inner| {
        prop_oneof![
            proptest::collection::vec(inner.clone(), 2..=3).prop_map(Term::Add),
            (
                (-4i64..=4).prop_filter("nonzero scalar", |n| *n != 0),
                inner.clone()
            )
                .prop_map(|(n, t)| Term::Mul(BigInt::from(n), Box::new(t))),
            (1u32..=2, inner).prop_map(|(pow, t)| Term::F {
                pow,
                arg: Box::new(t)
            }),
        ]
    })
}

fn frac_sum_strategy(vars: usize) -> impl Strategy<Value = FracSum> {
    (
        proptest::collection::vec(
            (
                (-3i64..=3).prop_filter("nonzero scale", |n| *n != 0),
                term_strategy(vars),
            ),
            0..=2,
        ),
        -3i64..=3,
    )
        .prop_map(|(terms, k)| FracSum {
            terms: terms
                .into_iter()
                .map(|(n, t)| (BigInt::from(n), t))
                .collect(),
            konst: BigInt::from(k),
        })
}

fn constraint_strategy(vars: usize) -> impl Strategy<Value = Constraint> {
    prop_oneof![
        (term_strategy(vars), term_strategy(vars)).prop_map(|(a, b)| Constraint::Eq(a, b)),
        (term_strategy(vars), term_strategy(vars), 1i64..=9)
            .prop_map(|(a, b, m)| Constraint::Cong(a, b, BigInt::from(m))),
        (frac_sum_strategy(vars), frac_sum_strategy(vars))
            .prop_map(|(a, b)| Constraint::FracLt(a, b)),
    ]
}

fn system_strategy(vars: usize, max_constraints: usize) -> impl Strategy<Value = System> {
    proptest::collection::vec(constraint_strategy(vars), 1..=max_constraints).prop_map(
        move |constraints| System {
            vars: ["x", "y", "z"][..vars]
                .iter()
                .map(|s| s.to_string())
                .collect(),
            constraints,
        },
    )
}

// ---------------------------------------------------------------------------
// Exact arithmetic in Q(alpha)
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 64, ..ProptestConfig::default() })]

    #[test]
    fn addition_and_subtraction_cancel(a in alpha_rat(2, 9), b in alpha_rat(2, 9)) {
        let ctx = BeattyCtx::pi_default();
        let roundtrip = a.add(&b).sub(&b);
        prop_assert_eq!(
            alpha::compare(&ctx.alpha, &roundtrip, &a).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn multiplication_and_division_cancel(a in alpha_rat(2, 9), b in alpha_rat(2, 9)) {
        prop_assume!(!b.is_zero());
        let ctx = BeattyCtx::pi_default();
        let roundtrip = a.mul(&b).div(&b);
        prop_assert_eq!(
            alpha::compare(&ctx.alpha, &roundtrip, &a).unwrap(),
            Ordering::Equal
        );
    }

    #[test]
    fn comparison_is_antisymmetric(a in alpha_rat(2, 9), b in alpha_rat(2, 9)) {
        let ctx = BeattyCtx::pi_default();
        let ab = alpha::compare(&ctx.alpha, &a, &b).unwrap();
        let ba = alpha::compare(&ctx.alpha, &b, &a).unwrap();
        prop_assert_eq!(ab, ba.reverse());
    }

    #[test]
    fn floor_brackets_the_value(v in alpha_rat(3, 50)) {
        let ctx = BeattyCtx::pi_default();
        let m = alpha::floor_of(&ctx.alpha, &v).unwrap();
        let lo = AlphaRat::from_rat(rat_big(m.clone()));
        let hi = AlphaRat::from_rat(rat_big(&m + 1));
        prop_assert_ne!(
            alpha::compare(&ctx.alpha, &v, &lo).unwrap(),
            Ordering::Less,
            "floor {} exceeds the value", m
        );
        prop_assert_eq!(
            alpha::compare(&ctx.alpha, &v, &hi).unwrap(),
            Ordering::Less,
            "value reaches floor {} + 1", m
        );
    }

    #[test]
    fn floor_agrees_with_rational_floor(r in rat_strategy(1000)) {
        let ctx = BeattyCtx::pi_default();
        let via_alpha = alpha::floor_of(&ctx.alpha, &AlphaRat::from_rat(r.clone())).unwrap();
        prop_assert_eq!(via_alpha, r.floor().to_integer());
    }
}

// ---------------------------------------------------------------------------
// Integer-level structure of f
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 128, ..ProptestConfig::default() })]

    #[test]
    fn superadditivity_carry_is_zero_or_one(a in -1_000_000i64..=1_000_000, b in -1_000_000i64..=1_000_000) {
        let ctx = BeattyCtx::pi_default();
        let (a, b) = (BigInt::from(a), BigInt::from(b));
        let carry = ctx.apply_f(&(&a + &b)).unwrap()
            - ctx.apply_f(&a).unwrap()
            - ctx.apply_f(&b).unwrap();
        prop_assert!(carry == BigInt::zero() || carry == BigInt::from(1), "carry {}", carry);
        // carry = 0 exactly when the fractional parts sum below one.
        let s = ctx
            .frac_poly(&a)
            .unwrap()
            .add(&ctx.frac_poly(&b).unwrap())
            .sub(&AlphaPoly::one());
        let below_one = alpha::poly_sign(&ctx.alpha, &s).unwrap() < 0;
        prop_assert_eq!(below_one, carry.is_zero());
    }
}

proptest! {
    #![proptest_config(ProptestConfig { cases: 32, ..ProptestConfig::default() })]

    #[test]
    fn floor_preimages_are_exactly_the_solutions(
        n1 in -6i64..=6,
        n0 in -6i64..=6,
        a in -40i64..=40,
    ) {
        prop_assume!(n1 != 0 || n0 != 0);
        let ctx = BeattyCtx::pi_default();
        let f_poly = AlphaPoly::from_coeffs(vec![
            Rat::from_integer(BigInt::from(n0)),
            Rat::from_integer(BigInt::from(n1)),
        ]);
        let a = BigInt::from(a);
        let pre = ctx.floor_preimages(&f_poly, &a).unwrap();
        for x in -120i64..=120 {
            let scaled = AlphaRat::from_poly(f_poly.scale(&Rat::from_integer(BigInt::from(x))));
            let fl = alpha::floor_of(&ctx.alpha, &scaled).unwrap();
            let listed = pre.contains(&BigInt::from(x));
            prop_assert_eq!(
                fl == a,
                listed,
                "x = {}: floor is {}, target {}, listed {}",
                x, fl, &a, listed
            );
        }
    }
}

// ---------------------------------------------------------------------------
// Parser round-trips
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 96, ..ProptestConfig::default() })]

    #[test]
    fn rendering_then_parsing_is_stable(sys in system_strategy(3, 2)) {
        // Render the generated tree, parse it back, and require the printed
        // form to be a fixpoint of parse-then-print from then on.
        let first = sys.to_string();
        let reparsed = match parse_system(&first) {
            Ok(s) => s,
            Err(e) => return Err(TestCaseError::fail(format!("'{first}' failed to parse: {e}"))),
        };
        let second = reparsed.to_string();
        let third = parse_system(&second).unwrap().to_string();
        prop_assert_eq!(&second, &third, "printed form is not stable for '{}'", first);
    }
}

// ---------------------------------------------------------------------------
// Case-splitting is an exact disjunction
// ---------------------------------------------------------------------------

proptest! {
    #![proptest_config(ProptestConfig { cases: 48, ..ProptestConfig::default() })]

    #[test]
    fn case_union_matches_original_truth(
        sys in system_strategy(2, 1),
        xv in -10i64..=10,
        yv in -10i64..=10,
    ) {
        let ctx = BeattyCtx::pi_default();
        let split = match flatten(&ctx, &sys) {
            Ok(s) => s,
            // Size limits are a configuration concern, not a soundness one.
            Err(_) => return Ok(()),
        };
        let env = vec![BigInt::from(xv), BigInt::from(yv)];
        let truth = system_holds(&ctx, &sys, &env).unwrap();
        let mut extended = env;
        extended.resize(split.vars.len(), BigInt::zero());
        let mut hit = false;
        for case in &split.cases {
            if case_matches(&ctx, case, &split.vars, &mut extended).unwrap() {
                hit = true;
                break;
            }
        }
        prop_assert_eq!(truth, hit, "system '{}' at ({}, {})", sys, xv, yv);
    }
}
