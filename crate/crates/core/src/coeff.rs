//! Exact coefficient rings: rationals and commutative polynomials over the
//! rationals in named symbols (`gamma`, `t`, and zeta symbols indexed by
//! Lyndon words).

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::words::{Alphabet, Word};

pub type Q = BigRational;

pub fn q(n: i64, d: i64) -> Q {
    Q::new(BigInt::from(n), BigInt::from(d))
}

pub fn qi(n: i64) -> Q {
    Q::from_integer(BigInt::from(n))
}

/// `p/q` or `p` for integers.
pub fn fmt_q(x: &Q) -> String {
    if x.is_integer() {
        x.numer().to_string()
    } else {
        format!("{}/{}", x.numer(), x.denom())
    }
}

/// Parse `p`, `-p` or `p/q`.
pub fn parse_q(s: &str) -> Option<Q> {
    let s = s.trim();
    match s.split_once('/') {
        Some((a, b)) => {
            let n: BigInt = a.trim().parse().ok()?;
            let d: BigInt = b.trim().parse().ok()?;
            (!d.is_zero()).then(|| Q::new(n, d))
        }
        None => s.parse::<BigInt>().ok().map(Q::from_integer),
    }
}

pub fn q_to_f64(x: &Q) -> f64 {
    x.numer().to_f64().unwrap_or(f64::NAN) / x.denom().to_f64().unwrap_or(f64::NAN)
}

pub fn factorial(n: usize) -> BigInt {
    (1..=n).fold(BigInt::one(), |a, k| a * BigInt::from(k))
}

/// The operations the algebra code needs from a coefficient ring.
pub trait Ring: Clone + PartialEq + fmt::Debug + Send + Sync + 'static {
    fn zero() -> Self;
    fn one() -> Self;
    fn is_zero(&self) -> bool;
    fn add(&self, o: &Self) -> Self;
    fn sub(&self, o: &Self) -> Self;
    fn mul(&self, o: &Self) -> Self;
    fn neg(&self) -> Self;
    fn from_q(q: Q) -> Self;
    fn scale(&self, q: &Q) -> Self;

    fn from_i64(n: i64) -> Self {
        Self::from_q(qi(n))
    }
    fn add_assign(&mut self, o: &Self) {
        *self = self.add(o);
    }
}

impl Ring for Q {
    fn zero() -> Self {
        Zero::zero()
    }
    fn one() -> Self {
        One::one()
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn add(&self, o: &Self) -> Self {
        self + o
    }
    fn sub(&self, o: &Self) -> Self {
        self - o
    }
    fn mul(&self, o: &Self) -> Self {
        self * o
    }
    fn neg(&self) -> Self {
        -self
    }
    fn from_q(q: Q) -> Self {
        q
    }
    fn scale(&self, q: &Q) -> Self {
        self * q
    }
    fn add_assign(&mut self, o: &Self) {
        *self += o;
    }
}

/// Named commutative variables.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Symbol {
    Gamma,
    T,
    /// Local coordinate on the stuffle side, indexed by a Lyndon word over Y.
    ZetaY(Word),
    /// Local coordinate on the shuffle side, indexed by a Lyndon word over X.
    ZetaX(Word),
}

impl Symbol {
    pub fn weight(&self) -> usize {
        match self {
            Symbol::Gamma | Symbol::T => 1,
            Symbol::ZetaY(w) | Symbol::ZetaX(w) => w.weight(),
        }
    }

    pub fn zy(letters: &[u8]) -> Self {
        Symbol::ZetaY(Word::y(letters))
    }

    pub fn zx(letters: &[u8]) -> Self {
        Symbol::ZetaX(Word::x(letters))
    }

    /// Default rendering: `gamma`, `t`, `zY[2 1]`, `zX[001]`.
    /// Indexing word of a coordinate symbol.
    pub fn word(&self) -> Option<&Word> {
        match self {
            Symbol::ZetaY(w) | Symbol::ZetaX(w) => Some(w),
            _ => None,
        }
    }

    pub fn name(&self) -> String {
        match self {
            Symbol::Gamma => "gamma".into(),
            Symbol::T => "t".into(),
            Symbol::ZetaY(w) => format!("zY[{}]", w.to_text()),
            Symbol::ZetaX(w) => format!("zX[{}]", w.to_text()),
        }
    }

    /// Basis-style rendering used in relation tables: `Sigma[y2 y1]`, `S[x0 x1]`.
    pub fn basis_name(&self) -> String {
        match self {
            Symbol::ZetaY(w) => format!("Sigma[{w}]"),
            Symbol::ZetaX(w) => format!("S[{w}]"),
            s => s.name(),
        }
    }

    /// Inverse of both renderings.
    pub fn parse(s: &str) -> Option<Symbol> {
        let s = s.trim();
        match s {
            "gamma" => return Some(Symbol::Gamma),
            "t" => return Some(Symbol::T),
            _ => {}
        }
        let open = s.find('[')?;
        let inner = s.strip_suffix(']')?.get(open + 1..)?;
        let alph = match &s[..open] {
            "zY" | "Sigma" => Alphabet::Y,
            "zX" | "S" => Alphabet::X,
            _ => return None,
        };
        let cleaned: String = if s.starts_with('z') {
            inner.to_string()
        } else {
            inner.replace(['x', 'y'], "")
        };
        let w = Word::parse(alph, &cleaned).ok()?;
        Some(match alph {
            Alphabet::Y => Symbol::ZetaY(w),
            _ => Symbol::ZetaX(w),
        })
    }
}

impl fmt::Debug for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

impl fmt::Display for Symbol {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.name())
    }
}

/// A monomial as a sorted list of `(symbol, exponent)` with positive exponents.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct Monomial(Vec<(Symbol, u32)>);

impl Monomial {
    pub fn one() -> Self {
        Monomial(Vec::new())
    }

    pub fn var(s: Symbol) -> Self {
        Monomial(vec![(s, 1)])
    }

    pub fn from_pairs(mut v: Vec<(Symbol, u32)>) -> Self {
        v.retain(|(_, e)| *e > 0);
        v.sort_by(|a, b| a.0.cmp(&b.0));
        let mut out: Vec<(Symbol, u32)> = Vec::with_capacity(v.len());
        for (s, e) in v {
            match out.last_mut() {
                Some((t, f)) if *t == s => *f += e,
                _ => out.push((s, e)),
            }
        }
        Monomial(out)
    }

    pub fn pairs(&self) -> &[(Symbol, u32)] {
        &self.0
    }

    pub fn is_one(&self) -> bool {
        self.0.is_empty()
    }

    pub fn degree(&self) -> u32 {
        self.0.iter().map(|(_, e)| e).sum()
    }

    pub fn weight(&self) -> usize {
        self.0.iter().map(|(s, e)| s.weight() * *e as usize).sum()
    }

    pub fn exponent(&self, s: &Symbol) -> u32 {
        self.0.iter().find(|(t, _)| t == s).map_or(0, |(_, e)| *e)
    }

    pub fn mul(&self, o: &Monomial) -> Monomial {
        let (a, b) = (&self.0, &o.0);
        let mut out = Vec::with_capacity(a.len() + b.len());
        let (mut i, mut j) = (0, 0);
        while i < a.len() && j < b.len() {
            match a[i].0.cmp(&b[j].0) {
                std::cmp::Ordering::Less => {
                    out.push(a[i].clone());
                    i += 1;
                }
                std::cmp::Ordering::Greater => {
                    out.push(b[j].clone());
                    j += 1;
                }
                std::cmp::Ordering::Equal => {
                    out.push((a[i].0.clone(), a[i].1 + b[j].1));
                    i += 1;
                    j += 1;
                }
            }
        }
        out.extend_from_slice(&a[i..]);
        out.extend_from_slice(&b[j..]);
        Monomial(out)
    }

    pub fn render(&self, name: &dyn Fn(&Symbol) -> String) -> String {
        self.0
            .iter()
            .map(|(s, e)| if *e == 1 { name(s) } else { format!("{}^{}", name(s), e) })
            .collect::<Vec<_>>()
            .join("*")
    }
}

impl fmt::Debug for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_one() {
            f.write_str("1")
        } else {
            f.write_str(&self.render(&Symbol::name))
        }
    }
}

/// Polynomial over the rationals in [`Symbol`]s.
#[derive(Clone, PartialEq, Eq, Default)]
pub struct Poly {
    terms: BTreeMap<Monomial, Q>,
}

impl Poly {
    pub fn constant(c: Q) -> Self {
        let mut p = Poly::default();
        if !Zero::is_zero(&c) {
            p.terms.insert(Monomial::one(), c);
        }
        p
    }

    pub fn var(s: Symbol) -> Self {
        Poly::monomial(Monomial::var(s), qi(1))
    }

    pub fn monomial(m: Monomial, c: Q) -> Self {
        let mut p = Poly::default();
        p.add_term(m, c);
        p
    }

    pub fn gamma() -> Self {
        Poly::var(Symbol::Gamma)
    }

    pub fn t() -> Self {
        Poly::var(Symbol::T)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Monomial, &Q)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn add_term(&mut self, m: Monomial, c: Q) {
        if Zero::is_zero(&c) {
            return;
        }
        match self.terms.entry(m) {
            std::collections::btree_map::Entry::Vacant(e) => {
                e.insert(c);
            }
            std::collections::btree_map::Entry::Occupied(mut e) => {
                *e.get_mut() += c;
                if Zero::is_zero(e.get()) {
                    e.remove();
                }
            }
        }
    }

    pub fn coeff(&self, m: &Monomial) -> Q {
        self.terms.get(m).cloned().unwrap_or_else(Zero::zero)
    }

    pub fn constant_term(&self) -> Q {
        self.coeff(&Monomial::one())
    }

    pub fn as_constant(&self) -> Option<Q> {
        match self.terms.len() {
            0 => Some(Zero::zero()),
            1 => self.terms.get(&Monomial::one()).cloned(),
            _ => None,
        }
    }

    pub fn pow(&self, n: u32) -> Poly {
        let mut acc = <Poly as Ring>::one();
        for _ in 0..n {
            acc = Ring::mul(&acc, self);
        }
        acc
    }

    /// Set of symbols occurring with nonzero coefficient.
    pub fn symbols(&self) -> Vec<Symbol> {
        let mut out: Vec<Symbol> =
            self.terms.keys().flat_map(|m| m.0.iter().map(|(s, _)| s.clone())).collect();
        out.sort();
        out.dedup();
        out
    }

    pub fn contains_symbol(&self, s: &Symbol) -> bool {
        self.terms.keys().any(|m| m.exponent(s) > 0)
    }

    /// `Some(w)` when every monomial has weight `w` (the zero polynomial is
    /// homogeneous of any weight and reports `None`).
    pub fn homogeneous_weight(&self) -> Option<usize> {
        let mut it = self.terms.keys().map(Monomial::weight);
        let first = it.next()?;
        it.all(|w| w == first).then_some(first)
    }

    pub fn is_homogeneous_of(&self, w: usize) -> bool {
        self.terms.keys().all(|m| m.weight() == w)
    }

    /// Substitute symbols by polynomials; symbols mapped to `None` are kept.
    pub fn substitute(&self, f: &dyn Fn(&Symbol) -> Option<Poly>) -> Poly {
        let mut cache: BTreeMap<Symbol, Option<Poly>> = BTreeMap::new();
        let mut out = Poly::default();
        for (m, c) in &self.terms {
            let mut acc = Poly::constant(c.clone());
            for (s, e) in &m.0 {
                let img = cache.entry(s.clone()).or_insert_with(|| f(s)).clone();
                let base = img.unwrap_or_else(|| Poly::var(s.clone()));
                acc = Ring::mul(&acc, &base.pow(*e));
            }
            out = Ring::add(&out, &acc);
        }
        out
    }

    /// Evaluate numerically.
    pub fn eval_f64(&self, f: &dyn Fn(&Symbol) -> f64) -> f64 {
        self.terms
            .iter()
            .map(|(m, c)| q_to_f64(c) * m.0.iter().map(|(s, e)| f(s).powi(*e as i32)).product::<f64>())
            .sum()
    }

    /// Render as `3/2*zY[3] - zY[2 1]`. Terms are sorted by decreasing degree,
    /// then by monomial order.
    pub fn render_with(&self, name: &dyn Fn(&Symbol) -> String) -> String {
        if self.terms.is_empty() {
            return "0".into();
        }
        let mut items: Vec<(&Monomial, &Q)> = self.terms.iter().collect();
        items.sort_by(|a, b| b.0.degree().cmp(&a.0.degree()).then_with(|| a.0.cmp(b.0)));
        let mut s = String::new();
        for (i, (m, c)) in items.into_iter().enumerate() {
            let neg = c.is_negative();
            let a = c.abs();
            if i == 0 {
                if neg {
                    s.push('-');
                }
            } else {
                s.push_str(if neg { " - " } else { " + " });
            }
            if m.is_one() {
                s.push_str(&fmt_q(&a));
            } else if a.is_one() {
                s.push_str(&m.render(name));
            } else {
                s.push_str(&fmt_q(&a));
                s.push('*');
                s.push_str(&m.render(name));
            }
        }
        s
    }

    /// Parse the output of [`Poly::render_with`] under either naming scheme.
    pub fn parse(text: &str) -> Option<Poly> {
        let text = text.trim();
        if text == "0" {
            return Some(Poly::default());
        }
        // split on top-level " + " / " - " (names contain spaces only inside brackets)
        let mut terms: Vec<(bool, String)> = Vec::new();
        let mut depth = 0i32;
        let mut cur = String::new();
        let mut neg = false;
        let chars: Vec<char> = text.chars().collect();
        let mut i = 0;
        if chars.first() == Some(&'-') {
            neg = true;
            i = 1;
        }
        while i < chars.len() {
            let c = chars[i];
            match c {
                '[' => depth += 1,
                ']' => depth -= 1,
                _ => {}
            }
            if depth == 0 && (c == '+' || c == '-') && i > 0 && chars[i - 1] == ' ' {
                terms.push((neg, cur.trim().to_string()));
                cur.clear();
                neg = c == '-';
                i += 1;
                continue;
            }
            cur.push(c);
            i += 1;
        }
        terms.push((neg, cur.trim().to_string()));
        let mut out = Poly::default();
        for (neg, t) in terms {
            let mut coeff = qi(1);
            let mut pairs = Vec::new();
            for factor in split_top(&t, '*') {
                if let Some(c) = parse_q(&factor) {
                    coeff *= c;
                    continue;
                }
                let (base, exp) = match factor.rsplit_once('^') {
                    Some((b, e)) if !b.ends_with('[') => (b.to_string(), e.parse::<u32>().ok()?),
                    _ => (factor.clone(), 1),
                };
                pairs.push((Symbol::parse(&base)?, exp));
            }
            if neg {
                coeff = -coeff;
            }
            out.add_term(Monomial::from_pairs(pairs), coeff);
        }
        Some(out)
    }
}

fn split_top(s: &str, sep: char) -> Vec<String> {
    let mut out = Vec::new();
    let mut depth = 0;
    let mut cur = String::new();
    for c in s.chars() {
        match c {
            '[' => depth += 1,
            ']' => depth -= 1,
            _ => {}
        }
        if c == sep && depth == 0 {
            out.push(std::mem::take(&mut cur));
        } else {
            cur.push(c);
        }
    }
    out.push(cur);
    out.into_iter().map(|s| s.trim().to_string()).filter(|s| !s.is_empty()).collect()
}

impl Ring for Poly {
    fn zero() -> Self {
        Poly::default()
    }
    fn one() -> Self {
        Poly::constant(qi(1))
    }
    fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }
    fn add(&self, o: &Self) -> Self {
        let mut out = self.clone();
        out.add_assign(o);
        out
    }
    fn add_assign(&mut self, o: &Self) {
        for (m, c) in &o.terms {
            self.add_term(m.clone(), c.clone());
        }
    }
    fn sub(&self, o: &Self) -> Self {
        let mut out = self.clone();
        for (m, c) in &o.terms {
            out.add_term(m.clone(), -c);
        }
        out
    }
    fn mul(&self, o: &Self) -> Self {
        let mut out = Poly::default();
        for (m1, c1) in &self.terms {
            for (m2, c2) in &o.terms {
                out.add_term(m1.mul(m2), c1 * c2);
            }
        }
        out
    }
    fn neg(&self) -> Self {
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), -c)).collect() }
    }
    fn from_q(q: Q) -> Self {
        Poly::constant(q)
    }
    fn scale(&self, q: &Q) -> Self {
        if Zero::is_zero(q) {
            return Poly::default();
        }
        Poly { terms: self.terms.iter().map(|(m, c)| (m.clone(), c * q)).collect() }
    }
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&Symbol::name))
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render_with(&Symbol::name))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn render_and_parse() {
        let p = Ring::sub(
            &Poly::var(Symbol::zy(&[3])).scale(&q(3, 2)),
            &Poly::var(Symbol::zy(&[2, 1])),
        );
        let s = p.to_string();
        assert_eq!(s, "3/2*zY[3] - zY[2 1]");
        assert_eq!(Poly::parse(&s).unwrap(), p);
        let sq = Ring::mul(&p, &p);
        assert_eq!(Poly::parse(&sq.to_string()).unwrap(), sq);
        let b = sq.render_with(&Symbol::basis_name);
        assert_eq!(Poly::parse(&b).unwrap(), sq);
    }

    #[test]
    fn homogeneity() {
        let p = Ring::add(&Poly::var(Symbol::zy(&[2])).pow(2), &Poly::var(Symbol::zy(&[4])));
        assert_eq!(p.homogeneous_weight(), Some(4));
        let r = Ring::add(&p, &Poly::gamma());
        assert_eq!(r.homogeneous_weight(), None);
    }
}
