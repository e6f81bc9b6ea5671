//! The eulerian projector, PBW bases and their duals, the diagonal series
//! factorization, and coordinates of group-like series.
//!
//! Three kinds of dual pairs are built:
//! * `ShuffleX`: `{P_w}` over X with dual `{S_w}` for the shuffle product;
//! * `ShuffleY`: the same construction over the alphabet Y;
//! * `StuffleY`: `{Π_w}` built from `π1` on letters, with dual `{Σ_w}` for the
//!   quasi-shuffle product.

use std::collections::BTreeMap;


use crate::coeff::{factorial, q, qi, Ring, Q};
use crate::error::{Error, Result};
use crate::linalg;
use crate::ncalg::{exp_conc, shuffle_words, stuffle_words, NCPoly};
use crate::words::{compositions, lyndon_words, words_of_grade, Alphabet, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BasisKind {
    ShuffleX,
    ShuffleY,
    StuffleY,
}

impl BasisKind {
    pub fn alphabet(self) -> Alphabet {
        match self {
            BasisKind::ShuffleX => Alphabet::X,
            _ => Alphabet::Y,
        }
    }

    /// Product dual to the coproduct for which the lower basis is primitive.
    pub fn upper_product(self, u: &Word, v: &Word) -> BTreeMap<Word, i64> {
        match self {
            BasisKind::StuffleY => stuffle_words(u, v),
            _ => shuffle_words(u, v),
        }
    }
}

/// `π1(y_s) = Σ_{(i1..ij) ⊨ s} ((-1)^{j-1}/j) y_{i1}...y_{ij}`.
pub fn pi1_letter(s: u8) -> NCPoly<Q> {
    let mut out = NCPoly::zero(Alphabet::Y);
    for c in compositions(s as usize) {
        let j = c.len() as i64;
        let sign = if j % 2 == 1 { 1 } else { -1 };
        out.add_term(Word::from_raw(Alphabet::Y, c), q(sign, j));
    }
    out
}

/// `φ^{-1}(y_s) = Σ_{(i1..ij) ⊨ s} (1/j!) y_{i1}...y_{ij}`.
pub fn pi1_inverse_letter(s: u8) -> NCPoly<Q> {
    let mut out = NCPoly::zero(Alphabet::Y);
    for c in compositions(s as usize) {
        let j = c.len();
        out.add_term(Word::from_raw(Alphabet::Y, c), Q::new(1.into(), factorial(j)));
    }
    out
}

/// The eulerian projector on a Y word:
/// `π1(w) = Σ_{k>=1} ((-1)^{k-1}/k) Σ_{u1..uk ∈ Y+} ⟨w | u1 ⧻ ... ⧻ uk⟩ u1...uk`.
///
/// The inner coefficient is read off the `k`-fold reduced coproduct of `w`.
/// The outer sum runs up to the weight of `w`: a letter `y_s` alone already
/// contributes for every `k <= s` (e.g. `⟨y3 | y1 ⧻ y1 ⧻ y1⟩ = 1`).
pub fn eulerian_pi1(w: &Word) -> Result<NCPoly<Q>> {
    if w.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("π1 is defined on Y words".into()));
    }
    let mut out = NCPoly::zero(Alphabet::Y);
    if w.is_empty() {
        return Ok(out);
    }
    for k in 1..=w.weight() {
        // Each letter y_s splits as y_{a1} ⊗ ... ⊗ y_{ak} with a_i >= 0, Σ a_i = s
        // (y_0 meaning the empty word). Enumerate all choices.
        let mut acc: BTreeMap<Vec<Vec<u8>>, i64> = BTreeMap::new();
        acc.insert(vec![Vec::new(); k], 1);
        for &s in w.indices() {
            let mut next: BTreeMap<Vec<Vec<u8>>, i64> = BTreeMap::new();
            for split in weak_compositions(s as usize, k) {
                for (parts, c) in &acc {
                    let mut p = parts.clone();
                    for (i, &a) in split.iter().enumerate() {
                        if a > 0 {
                            p[i].push(a as u8);
                        }
                    }
                    *next.entry(p).or_insert(0) += c;
                }
            }
            acc = next;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        for (parts, c) in acc {
            if parts.iter().any(|p| p.is_empty()) {
                continue;
            }
            let word: Vec<u8> = parts.concat();
            out.add_term(Word::from_raw(Alphabet::Y, word), q(sign * c, k as i64));
        }
    }
    Ok(out)
}

fn weak_compositions(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 1 {
        return vec![vec![n]];
    }
    let mut out = Vec::new();
    for first in 0..=n {
        for mut rest in weak_compositions(n - first, k - 1) {
            rest.insert(0, first);
            out.push(rest);
        }
    }
    out
}

/// Concatenation morphism extending a letter map.
fn conc_morphism(p: &NCPoly<Q>, letter: &dyn Fn(u8) -> NCPoly<Q>) -> NCPoly<Q> {
    let a = p.alphabet();
    let mut cache: BTreeMap<u8, NCPoly<Q>> = BTreeMap::new();
    let mut out = NCPoly::zero(a);
    for (w, c) in p.terms() {
        let mut img = NCPoly::one(a);
        for &l in w.indices() {
            let f = cache.entry(l).or_insert_with(|| letter(l));
            img = img.conc_trunc(f, usize::MAX);
        }
        out = out.add(&img.scale_q(c));
    }
    out
}

/// `φ_{π1}`: the concatenation morphism `y_k ↦ π1(y_k)`.
pub fn phi_pi1(p: &NCPoly<Q>) -> Result<NCPoly<Q>> {
    if p.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("φ acts on Y polynomials".into()));
    }
    Ok(conc_morphism(p, &pi1_letter))
}

/// Inverse of [`phi_pi1`].
pub fn phi_pi1_inverse(p: &NCPoly<Q>) -> Result<NCPoly<Q>> {
    if p.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("φ acts on Y polynomials".into()));
    }
    Ok(conc_morphism(p, &pi1_inverse_letter))
}

/// A PBW basis and its graded dual, for every word of grade `1..=bound`.
#[derive(Clone, Debug)]
pub struct DualBasisPair {
    pub kind: BasisKind,
    pub bound: usize,
    pub lower: BTreeMap<Word, NCPoly<Q>>,
    pub upper: BTreeMap<Word, NCPoly<Q>>,
}

impl DualBasisPair {
    pub fn lower(&self, w: &Word) -> Option<&NCPoly<Q>> {
        self.lower.get(w)
    }

    pub fn upper(&self, w: &Word) -> Option<&NCPoly<Q>> {
        self.upper.get(w)
    }

    pub fn lyndon(&self) -> Result<Vec<Word>> {
        lyndon_words(self.kind.alphabet(), self.bound)
    }
}

fn build_lower(kind: BasisKind, w: &Word, memo: &mut BTreeMap<Word, NCPoly<Q>>) -> NCPoly<Q> {
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let p = if w.len() == 1 {
        match kind {
            BasisKind::StuffleY => pi1_letter(w.indices()[0]),
            _ => NCPoly::word(w.clone()),
        }
    } else if w.is_lyndon() {
        let (l1, l2) = w.standard_factorization().expect("Lyndon word of length >= 2");
        let a = build_lower(kind, &l1, memo);
        let b = build_lower(kind, &l2, memo);
        a.bracket(&b)
    } else {
        let mut acc = NCPoly::one(w.alphabet());
        for (l, k) in w.lyndon_factorization() {
            let pl = build_lower(kind, &l, memo);
            for _ in 0..k {
                acc = acc.conc_trunc(&pl, usize::MAX);
            }
        }
        acc
    };
    memo.insert(w.clone(), p.clone());
    p
}

fn bilinear_product(kind: BasisKind, a: &NCPoly<Q>, b: &NCPoly<Q>) -> NCPoly<Q> {
    let mut out = NCPoly::zero(a.alphabet());
    for (u, x) in a.terms() {
        for (v, y) in b.terms() {
            let xy = x * y;
            for (w, k) in kind.upper_product(u, v) {
                out.add_term(w, &xy * qi(k));
            }
        }
    }
    out
}

/// `S_x = x`, `S_{x l'} = x S_{l'}` for Lyndon words, and divided shuffle
/// powers along the Lyndon factorization otherwise.
fn build_upper_shuffle(w: &Word, memo: &mut BTreeMap<Word, NCPoly<Q>>) -> NCPoly<Q> {
    if let Some(p) = memo.get(w) {
        return p.clone();
    }
    let a = w.alphabet();
    let p = if w.len() == 1 {
        NCPoly::word(w.clone())
    } else if w.is_lyndon() {
        let head = NCPoly::word(w.slice(0, 1));
        let rest = build_upper_shuffle(&w.slice(1, w.len()), memo);
        head.conc_trunc(&rest, usize::MAX)
    } else {
        let mut acc = NCPoly::one(a);
        let mut denom = num_bigint::BigInt::from(1);
        for (l, k) in w.lyndon_factorization() {
            let sl = build_upper_shuffle(&l, memo);
            for _ in 0..k {
                acc = bilinear_product(BasisKind::ShuffleX, &acc, &sl);
            }
            denom *= factorial(k);
        }
        acc.scale_q(&Q::new(1.into(), denom))
    };
    memo.insert(w.clone(), p.clone());
    p
}

/// Build the dual pair up to grade `n`.
///
/// For `StuffleY` the dual basis `Σ` is obtained from the linear solve
/// `⟨Σ_u | Π_v⟩ = δ_{u,v}` in each weight slice.
pub fn pbw_basis(kind: BasisKind, n: usize) -> Result<DualBasisPair> {
    if n == 0 {
        return Err(Error::Domain("grade bound must be at least 1".into()));
    }
    let a = kind.alphabet();
    let mut lower = BTreeMap::new();
    let mut upper = BTreeMap::new();
    let mut lmemo = BTreeMap::new();
    let mut umemo = BTreeMap::new();
    for g in 1..=n {
        let words = words_of_grade(a, g)?;
        for w in &words {
            lower.insert(w.clone(), build_lower(kind, w, &mut lmemo));
        }
        match kind {
            BasisKind::StuffleY => {
                let sigma = dual_by_solve(&words, &lower)?;
                upper.extend(sigma);
            }
            _ => {
                for w in &words {
                    upper.insert(w.clone(), build_upper_shuffle(w, &mut umemo));
                }
            }
        }
    }
    Ok(DualBasisPair { kind, bound: n, lower, upper })
}

/// Solve `⟨U_u | L_v⟩ = δ` within one grade slice.
fn dual_by_solve(
    words: &[Word],
    lower: &BTreeMap<Word, NCPoly<Q>>,
) -> Result<BTreeMap<Word, NCPoly<Q>>> {
    let index: BTreeMap<&Word, usize> = words.iter().enumerate().map(|(i, w)| (w, i)).collect();
    let n = words.len();
    let mut m = vec![vec![Q::zero(); n]; n];
    for (i, v) in words.iter().enumerate() {
        for (w, c) in lower[v].terms() {
            let j = *index
                .get(w)
                .ok_or_else(|| Error::Domain(format!("basis element {v} leaves its grade slice")))?;
            m[i][j] = c.clone();
        }
    }
    // rows of X satisfy X M^T = I
    let inv = linalg::invert(&linalg::transpose(&m))
        .ok_or_else(|| Error::Domain("PBW slice is singular".into()))?;
    let mut out = BTreeMap::new();
    for (i, u) in words.iter().enumerate() {
        let p = NCPoly::from_terms(u.alphabet(), words.iter().enumerate().map(|(j, w)| (w.clone(), inv[i][j].clone())));
        out.insert(u.clone(), p);
    }
    Ok(out)
}

/// `Σ_u` through the adjoint of `φ^{-1}` applied to the shuffle dual basis
/// over Y: every word `v` of `S^Y_u` spreads over its coarsenings, with weight
/// `1/j!` for each block of `j` merged letters.
pub fn sigma_by_adjoint(u: &Word) -> Result<NCPoly<Q>> {
    if u.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("Σ is indexed by Y words".into()));
    }
    let mut memo = BTreeMap::new();
    let s = build_upper_shuffle(u, &mut memo);
    let mut out = NCPoly::zero(Alphabet::Y);
    for (v, c) in s.terms() {
        for (w, k) in coarsenings(v.indices(), &|j| Q::new(1.into(), factorial(j))) {
            out.add_term(Word::from_raw(Alphabet::Y, w), c * k);
        }
    }
    Ok(out)
}

/// All coarsenings of a composition (merging consecutive blocks), each with
/// the product of `block(j)` over its blocks of `j` merged parts.
pub fn coarsenings(v: &[u8], block: &dyn Fn(usize) -> Q) -> Vec<(Vec<u8>, Q)> {
    let n = v.len();
    if n == 0 {
        return vec![(Vec::new(), qi(1))];
    }
    let mut out = Vec::with_capacity(1 << (n - 1));
    for mask in 0..(1usize << (n - 1)) {
        let mut word = Vec::new();
        let mut coeff = qi(1);
        let mut cur = v[0];
        let mut len = 1;
        for i in 1..n {
            if mask >> (i - 1) & 1 == 1 {
                cur += v[i];
                len += 1;
            } else {
                word.push(cur);
                coeff *= block(len);
                cur = v[i];
                len = 1;
            }
        }
        word.push(cur);
        coeff *= block(len);
        out.push((word, coeff));
    }
    out
}

/// Outcome of a duality check.
#[derive(Clone, Debug, PartialEq)]
pub struct DualityReport {
    pub checked: usize,
    pub violation: Option<(Word, Word, Q)>,
}

impl DualityReport {
    pub fn ok(&self) -> bool {
        self.violation.is_none()
    }
}

/// Verify `⟨U_u | L_v⟩ = δ_{u,v}` for all words of the same grade (pairs of
/// different grades vanish by homogeneity, which is checked as well).
pub fn check_duality(pair: &DualBasisPair) -> DualityReport {
    let mut checked = 0;
    for (u, su) in &pair.upper {
        if su.terms().any(|(w, _)| w.grade() != u.grade()) {
            return DualityReport { checked, violation: Some((u.clone(), u.clone(), qi(-1))) };
        }
        for (v, pv) in &pair.lower {
            if v.grade() != u.grade() {
                continue;
            }
            checked += 1;
            let val = su.pair(pv);
            let expect = if u == v { qi(1) } else { Q::zero() };
            if val != expect {
                return DualityReport { checked, violation: Some((u.clone(), v.clone(), val)) };
            }
        }
    }
    DualityReport { checked, violation: None }
}

/// Tensor element `Σ c (u ⊗ v)`; the left factor multiplies with the upper
/// product (shuffle or stuffle), the right one with concatenation.
type Pairs = BTreeMap<(Word, Word), Q>;

fn pairs_add(t: &mut Pairs, k: (Word, Word), c: Q) {
    if c.is_zero() {
        return;
    }
    let e = t.entry(k.clone()).or_insert_with(Q::zero);
    *e += c;
    if e.is_zero() {
        t.remove(&k);
    }
}

fn pairs_mul(kind: BasisKind, a: &Pairs, b: &Pairs, n: usize) -> Pairs {
    let mut out = Pairs::new();
    for ((u1, v1), c1) in a {
        for ((u2, v2), c2) in b {
            if u1.grade() + u2.grade() > n {
                continue;
            }
            let right = v1.concat(v2);
            let c = c1 * c2;
            for (w, k) in kind.upper_product(u1, u2) {
                pairs_add(&mut out, (w, right.clone()), &c * qi(k));
            }
        }
    }
    out
}

/// Check `Π↘_{l} exp(U_l ⊗ L_l) = Σ_{w} w ⊗ w` up to grade `n`.
pub fn mrs_check(kind: BasisKind, n: usize) -> Result<bool> {
    let pair = pbw_basis(kind, n)?;
    let a = kind.alphabet();
    let e = Word::empty(a);
    let mut acc = Pairs::new();
    acc.insert((e.clone(), e.clone()), qi(1));
    let mut lyn = pair.lyndon()?;
    lyn.reverse();
    for l in &lyn {
        let mut x = Pairs::new();
        for (u, a) in pair.upper[l].terms() {
            for (v, b) in pair.lower[l].terms() {
                pairs_add(&mut x, (u.clone(), v.clone()), a * b);
            }
        }
        // exp(x) = Σ x^k / k!
        let mut factor = Pairs::new();
        factor.insert((e.clone(), e.clone()), qi(1));
        let mut power = factor.clone();
        let mut k = 1i64;
        loop {
            power = pairs_mul(kind, &power, &x, n);
            if power.is_empty() {
                break;
            }
            for (key, c) in &power {
                pairs_add(&mut factor, key.clone(), c * Q::new(1.into(), factorial(k as usize)));
            }
            k += 1;
        }
        acc = pairs_mul(kind, &acc, &factor, n);
    }
    let mut expect = Pairs::new();
    expect.insert((e.clone(), e), qi(1));
    for g in 1..=n {
        for w in words_of_grade(a, g)? {
            expect.insert((w.clone(), w), qi(1));
        }
    }
    Ok(acc == expect)
}

/// Second-kind coordinates `c_l = ⟨S | U_l⟩` for Lyndon `l` of grade `<= bound`.
pub fn coordinates_of<C: Ring>(s: &NCPoly<C>, pair: &DualBasisPair) -> Result<BTreeMap<Word, C>> {
    let mut out = BTreeMap::new();
    for l in pair.lyndon()? {
        let ul = pair.upper[&l].map_to::<C>();
        out.insert(l, s.pair(&ul));
    }
    Ok(out)
}

/// `Π↘_{l} exp(c_l L_l)` truncated at grade `n`, in decreasing Lyndon order.
pub fn assemble_group_like<C: Ring>(
    coords: &BTreeMap<Word, C>,
    pair: &DualBasisPair,
    n: usize,
) -> Result<NCPoly<C>> {
    let a = pair.kind.alphabet();
    if n > pair.bound {
        return Err(Error::Truncation(format!("basis built to {} < {n}", pair.bound)));
    }
    let mut acc = NCPoly::<C>::one(a);
    for (l, c) in coords.iter().rev() {
        if c.is_zero() || l.grade() > n {
            continue;
        }
        let pl = pair
            .lower(l)
            .ok_or_else(|| Error::Domain(format!("no basis element for {l}")))?
            .map_to::<C>()
            .scale(c);
        acc = acc.conc_trunc(&exp_conc(&pl, n)?, n);
    }
    Ok(acc)
}

impl NCPoly<Q> {
    /// Coerce rational coefficients into another ring.
    pub fn map_to<C: Ring>(&self) -> NCPoly<C> {
        NCPoly::from_terms(self.alphabet(), self.terms().map(|(w, c)| (w.clone(), C::from_q(c.clone()))))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn pi1_small() {
        let p = pi1_letter(2);
        assert_eq!(p.coeff(&Word::y(&[2])), qi(1));
        assert_eq!(p.coeff(&Word::y(&[1, 1])), q(-1, 2));
        assert_eq!(eulerian_pi1(&Word::y(&[3])).unwrap(), pi1_letter(3));
    }

    #[test]
    fn sigma_y2y1() {
        let s = sigma_by_adjoint(&Word::y(&[2, 1])).unwrap();
        assert_eq!(s.to_text(), "y2.y1 + 1/2 y3");
    }
}
