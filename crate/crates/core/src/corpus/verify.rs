//! Exact, itemized verification of every computation in the published worked
//! example. Items (a), (c), (e), (g) are exact polynomial identities or sign
//! facts with zero tolerance; item (d) is a dense exact-rational sign scan
//! and is labeled as sampled. Where the published text prints a value that
//! disagrees with the definition-level computation, the item passes on the
//! computed value and carries the printed variant side by side.

use super::polys;
use crate::poly::{int, rat, Polynomial, Rational};
use num_traits::Signed;
use serde::Serialize;

/// One verification item.
#[derive(Clone, Debug, Serialize)]
pub struct VerifyItem {
    pub id: char,
    pub title: String,
    pub pass: bool,
    /// True for zero-tolerance identities; false for the sampled item.
    pub exact: bool,
    pub computed: String,
    /// What the published text prints, when it differs from the computation.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub printed_variant: Option<String>,
    pub detail: String,
}

/// The full itemized report.
#[derive(Clone, Debug, Serialize)]
pub struct PaperVerification {
    pub items: Vec<VerifyItem>,
    pub all_pass: bool,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub timestamp: Option<u64>,
}

fn item_a() -> VerifyItem {
    let expanded = polys::q_factored();
    let literal = Polynomial::from_terms(
        2,
        vec![
            (vec![0, 6], int(16)),
            (vec![4, 4], int(-24)),
            (vec![8, 2], int(9)),
            (vec![12, 0], int(-1)),
        ],
    )
    .unwrap();
    let pass = expanded == literal;
    VerifyItem {
        id: 'a',
        title: "expansion of the factored auxiliary polynomial".into(),
        pass,
        exact: true,
        computed: expanded.to_string(),
        printed_variant: None,
        detail: "(y-x^2)(y+x^2)(2y-x^2)^2(2y+x^2)^2 expands to 16y^6 - 24y^4x^4 + 9y^2x^8 - x^12"
            .into(),
    }
}

fn item_b() -> VerifyItem {
    let rf = polys::example_f().radial_derivative();
    let q = polys::q_factored();
    let diff = rf.try_sub(&q).unwrap();
    let expected = Polynomial::term(2, &[0, 12], int(-12));
    let pass = diff == expected;
    VerifyItem {
        id: 'b',
        title: "radial derivative of f versus the factored polynomial".into(),
        pass,
        exact: true,
        computed: format!("R_f - Q = {diff}"),
        printed_variant: Some(
            "published text prints R_f = Q - y^12 and a leading term y^6 in R_f; the definition <grad f, q> gives leading term 16y^6 and difference -12y^12"
                .into(),
        ),
        detail: format!("R_f = {rf}"),
    }
}

fn item_c() -> VerifyItem {
    let f = polys::example_f();
    let x = Polynomial::var(1, 0);
    let x2 = Polynomial::term(1, &[2], int(1));
    let expected =
        Polynomial::from_terms(1, vec![(vec![12], rat(29, 60)), (vec![24], int(-1))]).unwrap();
    let plus = f.substitute_curve(&[x.clone(), x2.clone()]).unwrap();
    let minus = f.substitute_curve(&[x, x2.neg()]).unwrap();
    let pass = plus == expected && minus == expected;
    VerifyItem {
        id: 'c',
        title: "restriction of f to the parabolas y = ±x^2".into(),
        pass,
        exact: true,
        computed: plus.to_string(),
        printed_variant: None,
        detail: "f(x, ±x^2) = (29/60 - x^12)·x^12 exactly, both signs".into(),
    }
}

fn item_d() -> VerifyItem {
    let h = polys::h_lambda();
    const POINTS: usize = 10_000;
    let mut worst: Option<Rational> = None;
    let mut pass = true;
    for i in 0..POINTS {
        // λ_i = -3/4 + (3/2)·i/(POINTS-1), endpoints included
        let lambda = rat(-3, 4) + rat(3, 2) * rat(i as i64, (POINTS - 1) as i64);
        let v = h.eval_exact(&[lambda]).unwrap();
        if !v.is_negative() {
            pass = false;
        }
        if worst.as_ref().map(|w| &v > w).unwrap_or(true) {
            worst = Some(v);
        }
    }
    let endpoint = h.eval_exact(&[rat(3, 4)]).unwrap();
    VerifyItem {
        id: 'd',
        title: "negativity of h on [-3/4, 3/4]".into(),
        pass,
        exact: false,
        computed: format!(
            "h < 0 at all {POINTS} rational sample points; h(3/4) = {endpoint}, largest sampled value {}",
            worst.map(|w| w.to_string()).unwrap_or_default()
        ),
        printed_variant: None,
        detail: "sampled: dense exact-rational scan including endpoints, not a root-isolation proof"
            .into(),
    }
}

fn item_e() -> VerifyItem {
    let pi = polys::example_pi();
    let j11 = pi.jet(11);
    // j11 = y^2 * ((8/3)y^4 - 3y^2x^4 + (9/10)x^8)
    let inner = Polynomial::from_terms(
        2,
        vec![(vec![0, 4], rat(8, 3)), (vec![4, 2], int(-3)), (vec![8, 0], rat(9, 10))],
    )
    .unwrap();
    let product = Polynomial::term(2, &[0, 2], int(1)).try_mul(&inner).unwrap();
    let factorization_ok = j11 == product;
    // inner as a quadratic form in (u, v) = (y^2, x^4):
    // (8/3)u^2 - 3uv + (9/10)v^2, discriminant 9 - 4·(8/3)·(9/10) = -3/5 < 0
    let disc = int(9) - int(4) * rat(8, 3) * rat(9, 10);
    let definite = disc.is_negative();
    let pass = factorization_ok && definite;
    VerifyItem {
        id: 'e',
        title: "the degree-11 jet is positive semidefinite with zero set {y = 0}".into(),
        pass,
        exact: true,
        computed: format!("j11 = y^2·({inner}); discriminant of the inner quadratic = {disc}"),
        printed_variant: None,
        detail: "negative discriminant and positive leading coefficient make the inner quadratic in (y^2, x^4) positive definite, so j11 vanishes only on the axis y = 0"
            .into(),
    }
}

fn item_f() -> VerifyItem {
    let pi = polys::example_pi();
    let j8 = pi.jet(8);
    let neg = j8.eval_exact(&[int(1), rat(3, 10)]).unwrap();
    let pos = j8.eval_exact(&[int(0), int(1)]).unwrap();
    let pass = neg.is_negative() && pos.is_positive();
    VerifyItem {
        id: 'f',
        title: "the degree-8 jet takes negative values (saddle)".into(),
        pass,
        exact: true,
        computed: format!("j8(1, 3/10) = {neg}, j8(0, 1) = {pos}"),
        printed_variant: None,
        detail: "j8 = (8/3)y^6 - 3y^4x^4 changes sign, so the potential fails the nonnegative-lower-jet hypothesis"
            .into(),
    }
}

fn item_g() -> VerifyItem {
    let pi = polys::example_pi();
    let rpi = pi.radial_derivative();
    let x = Polynomial::var(1, 0);
    let half_x2 = Polynomial::term(1, &[2], rat(1, 2));
    let restricted = rpi.substitute_curve(&[x, half_x2]).unwrap();
    let expected = Polynomial::from_terms(
        1,
        vec![(vec![24], rat(-12, 4096)), (vec![14], int(14))],
    )
    .unwrap();
    let identity_ok = restricted == expected;
    // positivity for small x ≠ 0: the lowest-degree term 14x^14 dominates;
    // on 0 < |x| <= 1 the value is at least (14 - 12/4096)·x^14 > 0
    let at_one = restricted.eval_exact(&[int(1)]).unwrap();
    let at_tenth = restricted.eval_exact(&[rat(1, 10)]).unwrap();
    let positive = at_one.is_positive() && at_tenth.is_positive();
    let pass = identity_ok && positive;
    VerifyItem {
        id: 'g',
        title: "radial derivative of the potential on the curve y = x^2/2".into(),
        pass,
        exact: true,
        computed: format!("R_pi(x, x^2/2) = {restricted}; value at 1 is {at_one}"),
        printed_variant: Some(
            "published text prints -2/2^12·x^24 + 14x^14; exact substitution gives coefficient -12/2^12"
                .into(),
        ),
        detail: "positive for 0 < |x| <= 1 since the degree-14 term dominates the single higher-degree term; the potential itself is negative on that curve for small x, so the strict radial condition fails"
            .into(),
    }
}

/// Runs a single item by id (`'a'..='g'`).
pub fn verify_item(id: char) -> Option<VerifyItem> {
    match id {
        'a' => Some(item_a()),
        'b' => Some(item_b()),
        'c' => Some(item_c()),
        'd' => Some(item_d()),
        'e' => Some(item_e()),
        'f' => Some(item_f()),
        'g' => Some(item_g()),
        _ => None,
    }
}

/// Runs all items.
pub fn verify_paper_example() -> PaperVerification {
    let items: Vec<VerifyItem> = "abcdefg".chars().map(|c| verify_item(c).unwrap()).collect();
    let all_pass = items.iter().all(|i| i.pass);
    PaperVerification { items, all_pass, timestamp: None }
}
