//! Noncommutative polynomials and truncated series: concatenation, shuffle,
//! quasi-shuffle (stuffle), the word pairing, truncated exp/log and the three
//! coproducts.

use std::collections::{BTreeMap, HashMap};
use std::fmt;

use crate::coeff::{fmt_q, q, qi, Poly, Ring, Q};
use crate::error::{Error, Result};
use crate::words::{Alphabet, Word};

/// Finite linear combination of words over one alphabet.
#[derive(Clone, PartialEq)]
pub struct NCPoly<C: Ring> {
    alphabet: Alphabet,
    terms: BTreeMap<Word, C>,
}

impl<C: Ring> NCPoly<C> {
    pub fn zero(alphabet: Alphabet) -> Self {
        NCPoly { alphabet, terms: BTreeMap::new() }
    }

    pub fn one(alphabet: Alphabet) -> Self {
        Self::word(Word::empty(alphabet))
    }

    pub fn word(w: Word) -> Self {
        Self::term(w, C::one())
    }

    pub fn term(w: Word, c: C) -> Self {
        let mut p = Self::zero(w.alphabet());
        p.add_term(w, c);
        p
    }

    pub fn from_terms(alphabet: Alphabet, it: impl IntoIterator<Item = (Word, C)>) -> Self {
        let mut p = Self::zero(alphabet);
        for (w, c) in it {
            p.add_term(w, c);
        }
        p
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, &C)> {
        self.terms.iter()
    }

    pub fn into_terms(self) -> BTreeMap<Word, C> {
        self.terms
    }

    pub fn coeff(&self, w: &Word) -> C {
        self.terms.get(w).cloned().unwrap_or_else(C::zero)
    }

    pub fn add_term(&mut self, w: Word, c: C) {
        debug_assert_eq!(w.alphabet(), self.alphabet);
        if c.is_zero() {
            return;
        }
        match self.terms.entry(w) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                e.get_mut().add_assign(&c);
                if e.get().is_zero() {
                    e.remove();
                }
            }
        }
    }

    pub fn constant_term(&self) -> C {
        self.coeff(&Word::empty(self.alphabet))
    }

    /// Largest grade among the words in the support (0 for the zero polynomial).
    pub fn max_grade(&self) -> usize {
        self.terms.keys().map(Word::grade).max().unwrap_or(0)
    }

    pub fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.clone());
        }
        out
    }

    pub fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (w, c) in &o.terms {
            out.add_term(w.clone(), c.neg());
        }
        out
    }

    pub fn neg(&self) -> Self {
        self.map_coeffs(|c| c.neg())
    }

    pub fn scale(&self, k: &C) -> Self {
        if k.is_zero() {
            return Self::zero(self.alphabet);
        }
        let mut out = Self::zero(self.alphabet);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), c.mul(k));
        }
        out
    }

    pub fn scale_q(&self, k: &Q) -> Self {
        self.scale(&C::from_q(k.clone()))
    }

    pub fn map_coeffs(&self, f: impl Fn(&C) -> C) -> Self {
        let mut out = Self::zero(self.alphabet);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), f(c));
        }
        out
    }

    /// Drop words of grade greater than `n`.
    pub fn truncate(&self, n: usize) -> Self {
        NCPoly {
            alphabet: self.alphabet,
            terms: self.terms.iter().filter(|(w, _)| w.grade() <= n).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    pub fn homogeneous_part(&self, g: usize) -> Self {
        NCPoly {
            alphabet: self.alphabet,
            terms: self.terms.iter().filter(|(w, _)| w.grade() == g).map(|(w, c)| (w.clone(), c.clone())).collect(),
        }
    }

    fn check(&self, o: &Self) -> Result<()> {
        if self.alphabet != o.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{} vs {}",
                self.alphabet.name(),
                o.alphabet.name()
            )));
        }
        Ok(())
    }

    /// Concatenation product.
    pub fn conc(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.conc_trunc(o, usize::MAX))
    }

    /// Concatenation product keeping only words of grade `<= n`.
    pub fn conc_trunc(&self, o: &Self, n: usize) -> Self {
        let mut out = Self::zero(self.alphabet);
        for (u, a) in &self.terms {
            let gu = u.grade();
            if gu > n {
                continue;
            }
            for (v, b) in &o.terms {
                if gu + v.grade() <= n {
                    out.add_term(u.concat(v), a.mul(b));
                }
            }
        }
        out
    }

    fn bilinear(&self, o: &Self, f: impl Fn(&Word, &Word) -> BTreeMap<Word, i64>) -> Self {
        let mut out = Self::zero(self.alphabet);
        for (u, a) in &self.terms {
            for (v, b) in &o.terms {
                let ab = a.mul(b);
                for (w, k) in f(u, v) {
                    out.add_term(w, ab.mul(&C::from_i64(k)));
                }
            }
        }
        out
    }

    pub fn shuffle(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        Ok(self.bilinear(o, shuffle_words))
    }

    pub fn stuffle(&self, o: &Self) -> Result<Self> {
        self.check(o)?;
        if !self.alphabet.is_y() {
            return Err(Error::AlphabetMismatch("stuffle is defined on Y and Y0 only".into()));
        }
        Ok(self.bilinear(o, stuffle_words))
    }

    /// `⟨self | o⟩ = Σ_w ⟨self|w⟩⟨o|w⟩`.
    pub fn pair(&self, o: &Self) -> C {
        let (small, big) = if self.terms.len() <= o.terms.len() { (self, o) } else { (o, self) };
        let mut acc = C::zero();
        for (w, c) in &small.terms {
            if let Some(d) = big.terms.get(w) {
                acc.add_assign(&c.mul(d));
            }
        }
        acc
    }

    /// Commutator `[a, b] = ab - ba`.
    pub fn bracket(&self, o: &Self) -> Self {
        self.conc_trunc(o, usize::MAX).sub(&o.conc_trunc(self, usize::MAX))
    }

    /// Render as `y2.y1 + 1/2 y3` (terms in decreasing word order).
    pub fn render(&self, coeff: &dyn Fn(&C) -> (bool, String)) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut s = String::new();
        for (i, (w, c)) in self.terms.iter().rev().enumerate() {
            let (neg, body) = coeff(c);
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            let word = if w.is_empty() { String::new() } else { w.render(".") };
            match (body.as_str(), word.is_empty()) {
                ("1", false) => s.push_str(&word),
                (_, true) => s.push_str(&body),
                (b, false) if b.contains(' ') || b.contains('+') => {
                    s.push_str(&format!("({b}) {word}"))
                }
                (b, false) => s.push_str(&format!("{b} {word}")),
            }
        }
        s
    }
}

impl NCPoly<Q> {
    pub fn to_text(&self) -> String {
        self.render(&|c: &Q| {
            let neg = c < &qi(0);
            let a = if neg { -c } else { c.clone() };
            (neg, fmt_q(&a))
        })
    }

    /// Lift to polynomial coefficients.
    pub fn to_poly(&self) -> NCPoly<Poly> {
        let mut out = NCPoly::zero(self.alphabet);
        for (w, c) in &self.terms {
            out.add_term(w.clone(), Poly::constant(c.clone()));
        }
        out
    }
}

impl NCPoly<Poly> {
    pub fn to_text(&self) -> String {
        self.render(&|c: &Poly| {
            let s = c.to_string();
            match s.strip_prefix('-') {
                Some(rest) if c.num_terms() == 1 => (true, rest.to_string()),
                _ => (false, s),
            }
        })
    }
}

impl<C: Ring + fmt::Debug> fmt::Debug for NCPoly<C> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut first = true;
        for (w, c) in &self.terms {
            if !first {
                f.write_str(" + ")?;
            }
            first = false;
            write!(f, "({c:?}) {}", w.render("."))?;
        }
        if first {
            f.write_str("0")?;
        }
        Ok(())
    }
}

/// Shuffle of two words with integer structure constants.
pub fn shuffle_words(u: &Word, v: &Word) -> BTreeMap<Word, i64> {
    let a = u.alphabet();
    let (x, y) = (u.indices(), v.indices());
    let mut out: HashMap<Vec<u8>, i64> = HashMap::new();
    let n = x.len() + y.len();
    // choose the positions of u's letters among n slots
    let mut pos: Vec<usize> = (0..x.len()).collect();
    loop {
        let mut w = Vec::with_capacity(n);
        let (mut i, mut j) = (0, 0);
        for slot in 0..n {
            if i < pos.len() && pos[i] == slot {
                w.push(x[i]);
                i += 1;
            } else {
                w.push(y[j]);
                j += 1;
            }
        }
        *out.entry(w).or_insert(0) += 1;
        // next combination
        let k = pos.len();
        let mut idx = k;
        loop {
            if idx == 0 {
                return out.into_iter().map(|(w, c)| (Word::from_raw(a, w), c)).collect();
            }
            idx -= 1;
            if pos[idx] < n - k + idx {
                pos[idx] += 1;
                for t in idx + 1..k {
                    pos[t] = pos[t - 1] + 1;
                }
                break;
            }
        }
    }
}

/// Quasi-shuffle of two Y words:
/// `y_i u ⧻ y_j v = y_i(u ⧻ y_j v) + y_j(y_i u ⧻ v) + y_{i+j}(u ⧻ v)`.
pub fn stuffle_words(u: &Word, v: &Word) -> BTreeMap<Word, i64> {
    fn rec(x: &[u8], y: &[u8], memo: &mut HashMap<(usize, usize), Vec<(Vec<u8>, i64)>>) -> Vec<(Vec<u8>, i64)> {
        if x.is_empty() {
            return vec![(y.to_vec(), 1)];
        }
        if y.is_empty() {
            return vec![(x.to_vec(), 1)];
        }
        let key = (x.len(), y.len());
        if let Some(r) = memo.get(&key) {
            return r.clone();
        }
        let mut acc: HashMap<Vec<u8>, i64> = HashMap::new();
        let mut push = |head: u8, tail: Vec<(Vec<u8>, i64)>| {
            for (w, c) in tail {
                let mut v = Vec::with_capacity(w.len() + 1);
                v.push(head);
                v.extend(w);
                *acc.entry(v).or_insert(0) += c;
            }
        };
        push(x[0], rec(&x[1..], y, memo));
        push(y[0], rec(x, &y[1..], memo));
        push(x[0] + y[0], rec(&x[1..], &y[1..], memo));
        let r: Vec<(Vec<u8>, i64)> = acc.into_iter().collect();
        memo.insert(key, r.clone());
        r
    }
    let a = u.alphabet();
    let mut memo = HashMap::new();
    rec(u.indices(), v.indices(), &mut memo)
        .into_iter()
        .map(|(w, c)| (Word::from_raw(a, w), c))
        .collect()
}

/// A series truncated at a grade bound.
#[derive(Clone, PartialEq, Debug)]
pub struct TruncatedSeries<C: Ring> {
    pub poly: NCPoly<C>,
    pub bound: usize,
}

impl<C: Ring> TruncatedSeries<C> {
    pub fn new(poly: NCPoly<C>, bound: usize) -> Self {
        TruncatedSeries { poly: poly.truncate(bound), bound }
    }

    pub fn one(alphabet: Alphabet, bound: usize) -> Self {
        Self::new(NCPoly::one(alphabet), bound)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.poly.alphabet()
    }

    pub fn coeff(&self, w: &Word) -> C {
        self.poly.coeff(w)
    }

    pub fn mul(&self, o: &Self) -> Self {
        let n = self.bound.min(o.bound);
        TruncatedSeries { poly: self.poly.conc_trunc(&o.poly, n), bound: n }
    }

    pub fn add(&self, o: &Self) -> Self {
        Self::new(self.poly.add(&o.poly), self.bound.min(o.bound))
    }

    /// `⟨S | P⟩`; fails when `P` reaches beyond the truncation bound.
    pub fn pair(&self, p: &NCPoly<C>) -> Result<C> {
        if p.max_grade() > self.bound {
            return Err(Error::Truncation(format!(
                "polynomial of grade {} exceeds series bound {}",
                p.max_grade(),
                self.bound
            )));
        }
        Ok(self.poly.pair(p))
    }

    pub fn shuffle(&self, o: &Self) -> Result<Self> {
        Ok(Self::new(self.poly.shuffle(&o.poly)?, self.bound.min(o.bound)))
    }

    pub fn stuffle(&self, o: &Self) -> Result<Self> {
        Ok(Self::new(self.poly.stuffle(&o.poly)?, self.bound.min(o.bound)))
    }
}

/// `exp(S)` in the concatenation algebra, truncated at `n`; requires `⟨S|1⟩ = 0`.
pub fn exp_conc<C: Ring>(s: &NCPoly<C>, n: usize) -> Result<NCPoly<C>> {
    if !s.constant_term().is_zero() {
        return Err(Error::Precondition("exp needs a series without constant term".into()));
    }
    let s = s.truncate(n);
    if s.is_zero() {
        return Ok(NCPoly::one(s.alphabet()));
    }
    let mut out = NCPoly::one(s.alphabet());
    let mut power = NCPoly::one(s.alphabet());
    let min_grade = s.terms().map(|(w, _)| w.grade()).min().unwrap_or(0);
    if min_grade == 0 {
        // only grade-0 words are the empty word, which is excluded above; Y0 letters y0 have grade 0
        return Err(Error::Precondition("exp over grade-0 letters does not truncate".into()));
    }
    let mut k = 1i64;
    loop {
        power = power.conc_trunc(&s, n).scale_q(&q(1, k));
        if power.is_zero() {
            break;
        }
        out = out.add(&power);
        k += 1;
    }
    Ok(out)
}

/// `log(S)` in the concatenation algebra, truncated at `n`; requires `⟨S|1⟩ = 1`.
pub fn log_conc<C: Ring>(s: &NCPoly<C>, n: usize) -> Result<NCPoly<C>> {
    if s.constant_term() != C::one() {
        return Err(Error::Precondition("log needs a series with constant term 1".into()));
    }
    let x = s.truncate(n).sub(&NCPoly::one(s.alphabet()));
    if x.terms().any(|(w, _)| w.grade() == 0) {
        return Err(Error::Precondition("log over grade-0 letters does not truncate".into()));
    }
    let mut out = NCPoly::zero(s.alphabet());
    let mut power = NCPoly::one(s.alphabet());
    let mut k = 1i64;
    loop {
        power = power.conc_trunc(&x, n);
        if power.is_zero() {
            break;
        }
        let sign = if k % 2 == 1 { 1 } else { -1 };
        out = out.add(&power.scale_q(&q(sign, k)));
        k += 1;
    }
    Ok(out)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Coproduct {
    Conc,
    Shuffle,
    Stuffle,
}

/// Element of `A⟨W⟩ ⊗ A⟨W⟩`, stored as a map on pairs of words.
pub type Tensor<C> = BTreeMap<(Word, Word), C>;

pub fn tensor_add<C: Ring>(t: &mut Tensor<C>, u: Word, v: Word, c: C) {
    use std::collections::btree_map::Entry;
    if c.is_zero() {
        return;
    }
    match t.entry((u, v)) {
        Entry::Vacant(e) => {
            e.insert(c);
        }
        Entry::Occupied(mut e) => {
            e.get_mut().add_assign(&c);
            if e.get().is_zero() {
                e.remove();
            }
        }
    }
}

fn tensor_mul<C: Ring>(a: &Tensor<C>, b: &Tensor<C>) -> Tensor<C> {
    let mut out = Tensor::new();
    for ((u1, v1), c1) in a {
        for ((u2, v2), c2) in b {
            tensor_add(&mut out, u1.concat(u2), v1.concat(v2), c1.mul(c2));
        }
    }
    out
}

/// Image of a single word under one of the coproducts, as integer pairs.
pub fn coproduct_image(w: &Word, which: Coproduct) -> Result<Tensor<Q>> {
    let a = w.alphabet();
    let e = Word::empty(a);
    match which {
        Coproduct::Conc => {
            let mut t = Tensor::new();
            for i in 0..=w.len() {
                tensor_add(&mut t, w.slice(0, i), w.slice(i, w.len()), qi(1));
            }
            Ok(t)
        }
        Coproduct::Shuffle | Coproduct::Stuffle => {
            if which == Coproduct::Stuffle && !a.is_y() {
                return Err(Error::AlphabetMismatch("stuffle coproduct on X".into()));
            }
            let mut acc: Tensor<Q> = Tensor::new();
            tensor_add(&mut acc, e.clone(), e.clone(), qi(1));
            for l in w.indices() {
                let mut d: Tensor<Q> = Tensor::new();
                let lw = Word::from_raw(a, vec![*l]);
                tensor_add(&mut d, lw.clone(), e.clone(), qi(1));
                tensor_add(&mut d, e.clone(), lw, qi(1));
                if which == Coproduct::Stuffle {
                    let lo = a.min_index();
                    for i in lo..=*l {
                        let j = *l - i;
                        if j >= lo && (lo == 0 || (i > 0 && j > 0)) {
                            tensor_add(&mut d, Word::from_raw(a, vec![i]), Word::from_raw(a, vec![j]), qi(1));
                        }
                    }
                }
                acc = tensor_mul(&acc, &d);
            }
            Ok(acc)
        }
    }
}

/// `⟨S|u ∗ v⟩ = ⟨S|u⟩⟨S|v⟩` for all nonempty `u, v` with grade sum `<= n`,
/// plus `⟨S|1⟩ = 1`; equivalent to `Δ(S) = S ⊗ S` up to grade `n`.
pub fn is_character<C: Ring>(s: &NCPoly<C>, product: Coproduct, n: usize) -> Result<bool> {
    let a = s.alphabet();
    if s.constant_term() != C::one() {
        return Ok(false);
    }
    let words = crate::words::words_up_to(a, n)?;
    for u in &words {
        for v in &words {
            if u.grade() + v.grade() > n || u > v {
                continue;
            }
            let prod = match product {
                Coproduct::Shuffle => shuffle_words(u, v),
                Coproduct::Stuffle => stuffle_words(u, v),
                Coproduct::Conc => return Err(Error::Domain("use shuffle or stuffle".into())),
            };
            let mut lhs = C::zero();
            for (w, k) in prod {
                lhs.add_assign(&s.coeff(&w).mul(&C::from_i64(k)));
            }
            if lhs != s.coeff(u).mul(&s.coeff(v)) {
                return Ok(false);
            }
        }
    }
    Ok(true)
}
