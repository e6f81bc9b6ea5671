use std::collections::BTreeMap;

use polyzeta::coeff::{q, qi};
use polyzeta::ncalg::{
    coproduct_image, exp_conc, is_character, log_conc, shuffle_words, stuffle_words, Coproduct,
    TruncatedSeries,
};
use polyzeta::words::words_up_to;
use polyzeta::{Alphabet, NCPoly, Word, Q};
use proptest::prelude::*;

fn x(s: &str) -> Word {
    Word::parse(Alphabet::X, s).unwrap()
}

fn w1(w: Word) -> NCPoly<Q> {
    NCPoly::word(w)
}

/// Interleavings by brute force over position subsets.
fn shuffle_oracle(u: &Word, v: &Word) -> BTreeMap<Word, i64> {
    let n = u.len() + v.len();
    let mut out = BTreeMap::new();
    for mask in 0u32..(1 << n) {
        if mask.count_ones() as usize != u.len() {
            continue;
        }
        let (mut i, mut j) = (0, 0);
        let mut letters = Vec::new();
        for s in 0..n {
            if mask >> s & 1 == 1 {
                letters.push(u.indices()[i]);
                i += 1;
            } else {
                letters.push(v.indices()[j]);
                j += 1;
            }
        }
        *out.entry(Word::new(u.alphabet(), letters).unwrap()).or_insert(0) += 1;
    }
    out
}

#[test]
fn spec_examples() {
    let p = w1(x("0")).conc(&w1(x("1"))).unwrap();
    assert_eq!(p, w1(x("01")));
    let s = w1(x("0")).add(&w1(x("1"))).conc(&w1(x("1"))).unwrap();
    assert_eq!(s, w1(x("01")).add(&w1(x("11"))));
    assert_eq!(NCPoly::<Q>::one(Alphabet::X).conc(&s).unwrap(), s);

    assert_eq!(w1(x("0")).shuffle(&w1(x("1"))).unwrap(), w1(x("01")).add(&w1(x("10"))));
    let sh = w1(x("01")).shuffle(&w1(x("0"))).unwrap();
    assert_eq!(sh, w1(x("001")).scale_q(&qi(2)).add(&w1(x("010"))));
    assert_eq!(w1(x("0110")).shuffle(&NCPoly::one(Alphabet::X)).unwrap(), w1(x("0110")));

    let y = |i: &[u8]| w1(Word::y(i));
    assert_eq!(y(&[1]).stuffle(&y(&[1])).unwrap(), y(&[1, 1]).scale_q(&qi(2)).add(&y(&[2])));
    assert_eq!(y(&[2]).stuffle(&y(&[3])).unwrap(), y(&[2, 3]).add(&y(&[3, 2])).add(&y(&[5])));
    assert_eq!(NCPoly::one(Alphabet::Y).stuffle(&y(&[3, 1])).unwrap(), y(&[3, 1]));
    assert!(w1(x("0")).stuffle(&w1(x("1"))).is_err());
    assert!(w1(x("0")).shuffle(&y(&[1])).is_err());

    let p = w1(x("0")).add(&w1(x("1")).scale_q(&qi(2)));
    assert_eq!(p.pair(&p), qi(5));
    let e = exp_conc(&w1(x("0")), 2).unwrap();
    assert_eq!(e, NCPoly::one(Alphabet::X).add(&w1(x("0"))).add(&w1(x("00")).scale_q(&q(1, 2))));
    let series = TruncatedSeries::new(e, 2);
    assert_eq!(series.pair(&w1(x("00"))).unwrap(), q(1, 2));
    assert!(series.pair(&w1(x("000"))).is_err());

    let ey = exp_conc(&y(&[1]), 3).unwrap();
    assert_eq!(ey.coeff(&Word::y(&[1, 1, 1])), q(1, 6));
    assert_eq!(ey.len(), 4);
    assert!(exp_conc(&NCPoly::<Q>::one(Alphabet::X), 3).is_err());
    assert!(log_conc(&w1(x("0")), 3).is_err());
    let g = w1(x("0")).add(&w1(x("1")));
    assert_eq!(log_conc(&exp_conc(&g, 4).unwrap(), 4).unwrap(), g);

    let dc = coproduct_image(&x("01"), Coproduct::Conc).unwrap();
    assert_eq!(dc.len(), 3);
    assert!(dc.contains_key(&(x("0"), x("1"))));
    let ds = coproduct_image(&Word::y(&[2]), Coproduct::Stuffle).unwrap();
    assert_eq!(ds.len(), 3);
    assert_eq!(ds[&(Word::y(&[1]), Word::y(&[1]))], qi(1));
    let dsh = coproduct_image(&x("0"), Coproduct::Shuffle).unwrap();
    assert_eq!(dsh.len(), 2);
}

#[test]
fn shuffle_matches_interleaving_oracle() {
    let ws = words_up_to(Alphabet::X, 4).unwrap();
    for u in &ws {
        for v in &ws {
            assert_eq!(shuffle_words(u, v), shuffle_oracle(u, v));
        }
    }
}

/// `⟨Δ(w) | u ⊗ v⟩ = ⟨w | u ∗ v⟩` for all words of total grade `<= 5`.
fn duality(a: Alphabet, prod: Coproduct) {
    let ws = words_up_to(a, 5).unwrap();
    let mut from_products: BTreeMap<(Word, Word, Word), i64> = BTreeMap::new();
    let e = Word::empty(a);
    let mut all = vec![e.clone()];
    all.extend(ws.iter().cloned());
    for u in &all {
        for v in &all {
            if u.grade() + v.grade() > 5 {
                continue;
            }
            let r = match prod {
                Coproduct::Shuffle => shuffle_words(u, v),
                _ => stuffle_words(u, v),
            };
            for (w, k) in r {
                from_products.insert((w, u.clone(), v.clone()), k);
            }
        }
    }
    let mut from_coproducts = BTreeMap::new();
    for w in &ws {
        for ((u, v), c) in coproduct_image(w, prod).unwrap() {
            assert!(c.is_integer());
            from_coproducts.insert((w.clone(), u, v), i64::try_from(c.numer().clone()).unwrap());
        }
    }
    from_products.retain(|(w, _, _), _| !w.is_empty());
    assert_eq!(from_products, from_coproducts);
}

#[test]
fn shuffle_coproduct_duality() {
    duality(Alphabet::X, Coproduct::Shuffle);
}

#[test]
fn stuffle_coproduct_duality() {
    duality(Alphabet::Y, Coproduct::Stuffle);
}

#[test]
fn conc_coproduct_is_dual_to_concatenation() {
    for w in words_up_to(Alphabet::X, 5).unwrap() {
        for ((u, v), c) in coproduct_image(&w, Coproduct::Conc).unwrap() {
            assert_eq!(u.concat(&v), w);
            assert_eq!(c, qi(1));
        }
    }
}

#[test]
fn exp_of_primitive_is_group_like() {
    let p = w1(x("01")).sub(&w1(x("10"))).scale_q(&q(3, 7)).add(&w1(x("1")).scale_q(&qi(2)));
    let e = exp_conc(&p, 6).unwrap();
    assert!(is_character(&e, Coproduct::Shuffle, 6).unwrap());
    let not = e.add(&w1(x("011")));
    assert!(!is_character(&not, Coproduct::Shuffle, 6).unwrap());
}

fn arb_x_word(max: usize) -> impl Strategy<Value = Word> {
    proptest::collection::vec(0u8..2, 0..=max).prop_map(|v| Word::x(&v))
}

fn arb_y_word(max_weight: u8) -> impl Strategy<Value = Word> {
    proptest::collection::vec(1u8..=3, 0..=(max_weight as usize / 2))
        .prop_map(|v| Word::y(&v))
}

/// Random Lie polynomial: combination of letters and nested brackets.
fn arb_lie() -> impl Strategy<Value = NCPoly<Q>> {
    proptest::collection::vec((-3i64..=3, 0usize..6), 1..5).prop_map(|terms| {
        let a = w1(x("0"));
        let b = w1(x("1"));
        let gens = [
            a.clone(),
            b.clone(),
            a.bracket(&b),
            a.bracket(&a.bracket(&b)),
            b.bracket(&a.bracket(&b)),
            a.bracket(&a.bracket(&a.bracket(&b))),
        ];
        terms
            .into_iter()
            .fold(NCPoly::zero(Alphabet::X), |acc, (c, i)| acc.add(&gens[i].scale_q(&qi(c))))
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn shuffle_commutative_associative(u in arb_x_word(3), v in arb_x_word(2), w in arb_x_word(2)) {
        let (pu, pv, pw) = (w1(u), w1(v), w1(w));
        prop_assert_eq!(pu.shuffle(&pv).unwrap(), pv.shuffle(&pu).unwrap());
        prop_assert_eq!(
            pu.shuffle(&pv).unwrap().shuffle(&pw).unwrap(),
            pu.shuffle(&pv.shuffle(&pw).unwrap()).unwrap()
        );
    }

    #[test]
    fn stuffle_commutative_associative(u in arb_y_word(6), v in arb_y_word(4), w in arb_y_word(4)) {
        let (pu, pv, pw) = (w1(u), w1(v), w1(w));
        prop_assert_eq!(pu.stuffle(&pv).unwrap(), pv.stuffle(&pu).unwrap());
        prop_assert_eq!(
            pu.stuffle(&pv).unwrap().stuffle(&pw).unwrap(),
            pu.stuffle(&pv.stuffle(&pw).unwrap()).unwrap()
        );
    }

    #[test]
    fn log_inverts_exp(p in arb_lie()) {
        let n = 7;
        let e = exp_conc(&p, n).unwrap();
        prop_assert_eq!(log_conc(&e, n).unwrap(), p.truncate(n));
        prop_assert!(is_character(&e, Coproduct::Shuffle, 5).unwrap());
    }
}
