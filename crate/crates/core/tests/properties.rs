use mahonia::forest::{make_rake, Labelling};
use mahonia::permstat::Permutation;
use mahonia::wreath::{self, canonical_dual, ColoredPermutation};
use mahonia::{IntPolynomial, Sign};
use proptest::prelude::*;

const QZ: [&str; 2] = ["q", "z"];

fn poly2() -> impl Strategy<Value = IntPolynomial> {
    prop::collection::vec((0u32..6, 0u32..4, -5i64..=5), 0..6).prop_map(|terms| {
        terms.into_iter().fold(IntPolynomial::zero(&QZ), |acc, (a, b, c)| {
            &acc + &IntPolynomial::monomial(&QZ, &[a, b], c)
        })
    })
}

fn nonzero_poly2() -> impl Strategy<Value = IntPolynomial> {
    poly2().prop_filter("nonzero", |p| !p.is_zero())
}

fn permutation(max: usize) -> impl Strategy<Value = Permutation> {
    (1..=max)
        .prop_flat_map(|n| Just((1..=n).collect::<Vec<usize>>()).prop_shuffle())
        .prop_map(|w| Permutation::new(w).unwrap())
}

fn colored(r: u32, max: usize) -> impl Strategy<Value = ColoredPermutation> {
    (1..=max).prop_flat_map(move |n| colored_of_size(r, n))
}

fn colored_of_size(r: u32, n: usize) -> impl Strategy<Value = ColoredPermutation> {
    Just((1..=n).collect::<Vec<usize>>()).prop_shuffle().prop_flat_map(move |word| {
        let sigma = Permutation::new(word).unwrap();
        prop::collection::vec(0..r, sigma.len())
            .prop_map(move |colors| ColoredPermutation::new(r, sigma.word().to_vec(), colors).unwrap())
    })
}

proptest! {
    #[test]
    fn ring_axioms(a in poly2(), b in poly2(), c in poly2()) {
        prop_assert_eq!(&a + &b, &b + &a);
        prop_assert_eq!(&a * &b, &b * &a);
        prop_assert_eq!(&(&a + &b) + &c, &a + &(&b + &c));
        prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
        prop_assert_eq!(&(&a + &b) * &c, &(&a * &c) + &(&b * &c));
        prop_assert!((&a - &a).is_zero());
        prop_assert_eq!(&a * &IntPolynomial::one(&QZ), a.clone());
    }

    #[test]
    fn exact_division_recovers_factor(a in poly2(), b in nonzero_poly2()) {
        prop_assert_eq!((&a * &b).exact_div(&b).unwrap(), a);
    }

    #[test]
    fn json_round_trip(a in poly2()) {
        let text = serde_json::to_string(&a).unwrap();
        let back: IntPolynomial = serde_json::from_str(&text).unwrap();
        prop_assert_eq!(back, a);
    }

    #[test]
    fn sign_substitution_is_a_ring_involution(a in poly2(), b in poly2()) {
        let s = |p: &IntPolynomial| p.substitute_sign("z").unwrap();
        prop_assert_eq!(s(&s(&a)), a.clone());
        prop_assert_eq!(s(&(&a * &b)), &s(&a) * &s(&b));
        let e = |p: &IntPolynomial| p.eval_at_one("q").unwrap();
        prop_assert_eq!(e(&(&a * &b)), &e(&a) * &e(&b));
    }

    #[test]
    fn permutation_statistics(sigma in permutation(9)) {
        prop_assert_eq!(sigma.inverse().inv(), sigma.inv());
        prop_assert_eq!(sigma.compose(&sigma.inverse()), Permutation::identity(sigma.len()));
        let maj: usize = sigma.descents().iter().sum();
        prop_assert_eq!(sigma.maj(), maj);
        let n = sigma.len();
        prop_assert!(sigma.inv() <= n * (n - 1) / 2);
    }

    #[test]
    fn colored_group_laws((g, h) in (1..=7usize).prop_flat_map(|n| (colored_of_size(4, n), colored_of_size(4, n)))) {
        let id = ColoredPermutation::identity(4, g.len());
        prop_assert_eq!(g.multiply(&g.inverse()).unwrap(), id);
        let gh_inv = g.multiply(&h).unwrap().inverse();
        prop_assert_eq!(gh_inv, h.inverse().multiply(&g.inverse()).unwrap());
    }

    #[test]
    fn canonical_dual_ignores_central_shifts(g in colored(6, 6), m in 0u32..3) {
        let d = canonical_dual(&g, 3).unwrap();
        prop_assert_eq!(canonical_dual(&g.shifted(2 * m), 3).unwrap(), d.clone());
        let lambda = d.lambda_vec();
        prop_assert!(lambda.windows(2).all(|w| w[0] >= w[1]));
        prop_assert!(wreath::colori_check(&d));
    }

    #[test]
    fn compatible_vectors_round_trip(
        g in colored(6, 5),
        parts in prop::collection::vec(0u64..5, 5),
        h in 0u32..3,
    ) {
        let d = canonical_dual(&g, 3).unwrap();
        let mut lambda: Vec<u64> = parts[..d.len()].to_vec();
        lambda.sort_unstable_by(|a, b| b.cmp(a));
        let f = wreath::encode_compatible(&d, &lambda, h).unwrap();
        prop_assert_eq!(wreath::decode_compatible(&f, 6, 3).unwrap(), (d, lambda, h));
    }

    #[test]
    fn tooth_relabelling_preserves_statistics(
        labels in Just((1..=8usize).collect::<Vec<_>>()).prop_shuffle(),
        teeth in Just((0..4usize).collect::<Vec<_>>()).prop_shuffle(),
    ) {
        let rake = make_rake(8, 4).unwrap();
        let w = Labelling::new(rake.clone(), labels.clone()).unwrap();
        let mut moved = labels.clone();
        for (i, &t) in teeth.iter().enumerate() {
            moved[i] = labels[t];
        }
        let v = Labelling::new(rake, moved).unwrap();
        prop_assert_eq!((v.inv(), v.maj()), (w.inv(), w.maj()));
    }
}

#[test]
fn even_brackets_commute_with_sign() {
    for m in 1..=6u32 {
        for s in (2..=12u32).step_by(2) {
            let left = &IntPolynomial::bracket(2 * m, Sign::Plus) * &IntPolynomial::bracket(s, Sign::Minus);
            let right = &IntPolynomial::bracket(2 * m, Sign::Minus) * &IntPolynomial::bracket(s, Sign::Plus);
            assert_eq!(left, right, "m={m}, s={s}");
        }
    }
}
