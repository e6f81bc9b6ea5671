use std::f64::consts::{LN_2, PI};

use polyzeta::bridge::{euler_even_ratio, mine_relations, RelationRule, Side};
use polyzeta::coeff::{q, q_to_f64};
use polyzeta::numeric::*;
use polyzeta::{Poly, Ring, Symbol, Word};
use proptest::prelude::*;

const ZETA3: f64 = 1.202_056_903_159_594_3;

fn cfg(terms: usize) -> NumericConfig {
    NumericConfig { terms, ..Default::default() }
}

#[test]
fn config_validation() {
    assert!(NumericConfig::default().validate().is_ok());
    assert!(NumericConfig { tol: 0.0, ..Default::default() }.validate().is_err());
    assert!(NumericConfig { terms: 999, ..Default::default() }.validate().is_err());
    assert!(NumericConfig { precision_bits: 200, ..Default::default() }.validate().is_err());
}

#[test]
fn zeta_two_against_euler_ratio() {
    let target = PI * PI * q_to_f64(&euler_even_ratio(1).unwrap());
    let z = mzv(&[2], &cfg(1_000_000)).unwrap();
    assert!((z.value - target).abs() < 1e-5);
    assert!(z.value <= target && target - z.value <= z.error);
}

#[test]
fn zeta_two_one_equals_zeta_three() {
    let a = mzv(&[2, 1], &cfg(1_000_000)).unwrap();
    let b = mzv(&[3], &cfg(1_000_000)).unwrap();
    assert!((a.value - b.value).abs() < 1e-4, "{} vs {}", a.value, b.value);
    assert!((b.value - ZETA3).abs() < 1e-11);
}

#[test]
fn zeta_two_times_gamma() {
    let c = cfg(1_000_000);
    let v = mzv(&[2], &c).unwrap().value * euler_gamma(&c).value;
    assert!((v - 0.949_481_711_11).abs() < 1e-4, "{v}");
    assert!((euler_gamma(&c).value - 0.577_215_664_901_532_9).abs() < 1e-12);
}

#[test]
fn divergent_and_out_of_range_inputs() {
    assert!(mzv(&[1, 2], &cfg(1000)).is_err());
    assert!(mzv(&[], &cfg(1000)).is_err());
    assert!(polylog(&[2], 1.0, &cfg(1000)).is_err());
    assert!(polylog(&[2], -1.5, &cfg(1000)).is_err());
    assert!(mzv_word(&Word::x(&[0, 1, 0]), &cfg(1000)).is_err());
    let a = mzv_word(&Word::x(&[0, 1, 1]), &cfg(10_000)).unwrap();
    let b = mzv(&[2, 1], &cfg(10_000)).unwrap();
    assert_eq!(a, b);
}

#[test]
fn polylog_values() {
    let c = cfg(100_000);
    let li2 = polylog(&[2], 0.5, &c).unwrap();
    let oracle = PI * PI * q_to_f64(&euler_even_ratio(1).unwrap()) / 2.0 - LN_2 * LN_2 / 2.0;
    assert!((li2 - oracle).abs() < 1e-12);
    assert!((li2 - 0.582_240_526_5).abs() < 1e-10);
    assert!((polylog(&[1], 0.5, &c).unwrap() - LN_2).abs() < 1e-9);
    // Li_{1,1}(z) = log²(1−z)/2
    let z: f64 = -0.3;
    assert!((polylog(&[1, 1], z, &c).unwrap() - (1.0 - z).ln().powi(2) / 2.0).abs() < 1e-13);
}

#[test]
fn exact_harmonic_sums() {
    assert_eq!(harmonic(&[2], 3).unwrap(), q(49, 36));
    assert_eq!(harmonic(&[1], 4).unwrap(), q(25, 12));
    // H_{2,1}(3) = 1/4·1 + 1/9·(1 + 1/2)
    assert_eq!(harmonic(&[2, 1], 3).unwrap(), q(5, 12));
    assert!(harmonic(&[0], 3).is_err());
}

#[test]
fn table_rows_validate_numerically() {
    let report = mine_relations(5).unwrap();
    let loose = validate_relations(&report, 5, &cfg(100_000)).unwrap();
    assert_eq!(loose.len(), 18);
    // Truncation is honest even where it is not yet tight enough.
    for c in &loose {
        assert!(c.residual.abs() <= c.bound, "{c:?}");
    }
    // Only the rules carrying ζ(2,1,1,1), whose tail at 10^5 is about 2.5e-3, miss 1e-3.
    let missed: Vec<String> = loose.iter().filter(|c| !c.pass).map(|c| c.lhs.basis_name()).collect();
    assert_eq!(missed, ["Sigma[y2 y1 y1 y1]", "S[x0 x1 x1 x1 x1]"]);
    for c in validate_relations(&report, 5, &cfg(1_000_000)).unwrap() {
        assert!(c.pass, "{c:?}");
    }
}

#[test]
#[ignore = "depth-4 tails exceed 1e-3 at 10^5 terms under plain truncation"]
fn table_rows_validate_at_ten_to_the_five() {
    let report = mine_relations(5).unwrap();
    for c in validate_relations(&report, 5, &cfg(100_000)).unwrap() {
        assert!(c.pass, "{c:?}");
    }
}

#[test]
fn table_examples_at_tighter_tolerance() {
    let c = NumericConfig { terms: 1_000_000, tol: 1e-4, ..Default::default() };
    let mut ev = Evaluator::new(c).unwrap();
    let y = RelationRule {
        side: Side::Y,
        lhs: Symbol::zy(&[2, 1]),
        rhs: Poly::var(Symbol::zy(&[3])).scale(&q(3, 2)),
        weight: 3,
    };
    assert!(validate_rule(&y, &mut ev).unwrap().pass);
    let x = RelationRule {
        side: Side::X,
        lhs: Symbol::zx(&[0, 0, 0, 1]),
        rhs: Poly::var(Symbol::zx(&[0, 1])).pow(2).scale(&q(2, 5)),
        weight: 4,
    };
    assert!(validate_rule(&x, &mut ev).unwrap().pass);
    let bad = RelationRule { rhs: Poly::var(Symbol::zy(&[3])).scale(&q(7, 5)), ..y };
    let check = validate_rule(&bad, &mut ev).unwrap();
    assert!(!check.pass);
    assert!((check.residual - 0.1 * ZETA3).abs() < 1e-3);
}

#[test]
fn abel_limits() {
    let c = cfg(100_000);
    let grid = [0.99, 0.999];
    let y2 = abel_spotcheck(&Word::y(&[2]), &grid, &c).unwrap();
    assert!((y2.target - PI * PI / 6.0).abs() < 1e-4);
    assert!((y2.points[1].1 - y2.target).abs() < 1e-2);
    assert!(y2.error < 1e-2);
    let y1 = abel_spotcheck(&Word::y(&[1]), &grid, &c).unwrap();
    assert_eq!(y1.target, 0.0);
    assert!(y1.points.iter().all(|(_, v)| v.abs() < 1e-9));
    let y3 = abel_spotcheck(&Word::y(&[3]), &grid, &c).unwrap();
    assert!((y3.target - ZETA3).abs() < 1e-4 && y3.error < 1e-2);
    // ⟨Z_⧢ | x1 x0 x1⟩ = −2ζ(2,1), truncated here at depth 2
    let y12 = abel_spotcheck(&Word::y(&[1, 2]), &grid, &c).unwrap();
    assert!((y12.target + 2.0 * ZETA3).abs() < 1e-3);
    assert!(y12.error < 5e-2, "{y12:?}");
}

fn convergent() -> impl Strategy<Value = Vec<u8>> {
    (2u8..=4, prop::collection::vec(1u8..=2, 0..3)).prop_filter_map("weight <= 5", |(h, t)| {
        let mut s = vec![h];
        s.extend(t);
        (s.iter().map(|&x| x as usize).sum::<usize>() <= 5).then_some(s)
    })
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(24))]

    #[test]
    fn doubling_the_cutoff_stays_within_the_bound(s in convergent(), t in 1000usize..4000) {
        let a = mzv(&s, &cfg(t)).unwrap();
        let b = mzv(&s, &cfg(2 * t)).unwrap();
        prop_assert!(b.value >= a.value);
        prop_assert!(b.value - a.value <= a.error);
    }
}
