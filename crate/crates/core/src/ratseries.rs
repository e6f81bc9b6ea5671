//! Rational series as linear representations `(ν, μ, η)`.
//!
//! Expressions built from letters, scalars (polynomials in `t`), sums,
//! concatenation, Kleene star, shuffle and quasi-shuffle are compiled to
//! representations with the classical block constructions. After each step
//! states that are unreachable or cannot reach a final state are dropped, so
//! `(c x0 x1)*` ends up with the two-state automaton one would draw by hand.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;

use crate::coeff::{parse_q, Poly, Ring, Q};
use crate::error::{Error, Result};
use crate::ncalg::{NCPoly, TruncatedSeries};
use crate::words::{Alphabet, Word};

pub type PMatrix = Vec<Vec<Poly>>;

#[derive(Clone, Debug, PartialEq)]
pub struct LinearRepresentation {
    pub alphabet: Alphabet,
    pub nu: Vec<Poly>,
    /// Letter index to transition matrix; absent letters act as zero.
    pub mu: BTreeMap<u8, PMatrix>,
    pub eta: Vec<Poly>,
}

fn zeros(n: usize, m: usize) -> PMatrix {
    vec![vec![Poly::zero(); m]; n]
}

fn kron(a: &PMatrix, b: &PMatrix) -> PMatrix {
    let (n1, n2) = (a.len(), b.len());
    let mut out = zeros(n1 * n2, n1 * n2);
    for i in 0..n1 {
        for j in 0..n1 {
            if a[i][j].is_zero() {
                continue;
            }
            for k in 0..n2 {
                for l in 0..n2 {
                    if !b[k][l].is_zero() {
                        out[i * n2 + k][j * n2 + l] = a[i][j].mul(&b[k][l]);
                    }
                }
            }
        }
    }
    out
}

fn kron_vec(a: &[Poly], b: &[Poly]) -> Vec<Poly> {
    a.iter().flat_map(|x| b.iter().map(move |y| x.mul(y))).collect()
}

fn ident(n: usize) -> PMatrix {
    let mut m = zeros(n, n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = Poly::one();
    }
    m
}

fn mat_add(a: &PMatrix, b: &PMatrix) -> PMatrix {
    a.iter().zip(b).map(|(r, s)| r.iter().zip(s).map(|(x, y)| x.add(y)).collect()).collect()
}

fn vec_mat(v: &[Poly], m: &PMatrix) -> Vec<Poly> {
    let n = m.first().map_or(0, |r| r.len());
    let mut out = vec![Poly::zero(); n];
    for (i, vi) in v.iter().enumerate() {
        if vi.is_zero() {
            continue;
        }
        for (j, mij) in m[i].iter().enumerate() {
            if !mij.is_zero() {
                out[j].add_assign(&vi.mul(mij));
            }
        }
    }
    out
}

fn dot(a: &[Poly], b: &[Poly]) -> Poly {
    let mut s = Poly::zero();
    for (x, y) in a.iter().zip(b) {
        if !x.is_zero() && !y.is_zero() {
            s.add_assign(&x.mul(y));
        }
    }
    s
}

fn check_letter(a: Alphabet, i: u8) -> Result<()> {
    match a {
        Alphabet::X if i <= 1 => Ok(()),
        Alphabet::Y if i >= 1 => Ok(()),
        _ => Err(Error::InvalidLetter(format!("letter {i} is not in {}", a.name()))),
    }
}

impl LinearRepresentation {
    pub fn dim(&self) -> usize {
        self.nu.len()
    }

    /// The constant series `c`.
    pub fn constant(alphabet: Alphabet, c: Poly) -> Self {
        LinearRepresentation { alphabet, nu: vec![c], mu: BTreeMap::new(), eta: vec![Poly::one()] }
    }

    pub fn letter(alphabet: Alphabet, index: u8) -> Result<Self> {
        check_letter(alphabet, index)?;
        let mut m = zeros(2, 2);
        m[0][1] = Poly::one();
        Ok(LinearRepresentation {
            alphabet,
            nu: vec![Poly::one(), Poly::zero()],
            mu: BTreeMap::from([(index, m)]),
            eta: vec![Poly::zero(), Poly::one()],
        })
    }

    fn same_alphabet(&self, o: &Self) -> Result<()> {
        if self.alphabet != o.alphabet {
            return Err(Error::AlphabetMismatch(format!(
                "{} vs {}",
                self.alphabet.name(),
                o.alphabet.name()
            )));
        }
        Ok(())
    }

    fn letters_with(&self, o: &Self) -> BTreeSet<u8> {
        self.mu.keys().chain(o.mu.keys()).copied().collect()
    }

    fn mu_or_zero(&self, x: u8) -> PMatrix {
        self.mu.get(&x).cloned().unwrap_or_else(|| zeros(self.dim(), self.dim()))
    }

    pub fn constant_term(&self) -> Poly {
        dot(&self.nu, &self.eta)
    }

    pub fn scale(&self, c: &Poly) -> Self {
        let mut r = self.clone();
        r.nu = r.nu.iter().map(|x| x.mul(c)).collect();
        r
    }

    pub fn sum(&self, o: &Self) -> Result<Self> {
        self.same_alphabet(o)?;
        let (n1, n2) = (self.dim(), o.dim());
        let mut mu = BTreeMap::new();
        for x in self.letters_with(o) {
            let mut m = zeros(n1 + n2, n1 + n2);
            let (a, b) = (self.mu_or_zero(x), o.mu_or_zero(x));
            for i in 0..n1 {
                m[i][..n1].clone_from_slice(&a[i]);
            }
            for i in 0..n2 {
                m[n1 + i][n1..].clone_from_slice(&b[i]);
            }
            mu.insert(x, m);
        }
        Ok(LinearRepresentation {
            alphabet: self.alphabet,
            nu: self.nu.iter().chain(&o.nu).cloned().collect(),
            mu,
            eta: self.eta.iter().chain(&o.eta).cloned().collect(),
        })
    }

    /// Concatenation product `R1 R2`.
    pub fn product(&self, o: &Self) -> Result<Self> {
        self.same_alphabet(o)?;
        let (n1, n2) = (self.dim(), o.dim());
        let c1 = self.constant_term();
        let mut nu = self.nu.clone();
        nu.extend(o.nu.iter().map(|x| c1.mul(x)));
        // a factorization ends inside R2, possibly right after the jump
        let mut eta = vec![Poly::zero(); n1];
        eta.extend(o.eta.iter().cloned());
        let mut mu = BTreeMap::new();
        for x in self.letters_with(o) {
            let (a, b) = (self.mu_or_zero(x), o.mu_or_zero(x));
            let mut m = zeros(n1 + n2, n1 + n2);
            for i in 0..n1 {
                m[i][..n1].clone_from_slice(&a[i]);
                // μ1(x) η1 ν2
                let ae = dot(&a[i], &self.eta);
                if !ae.is_zero() {
                    for j in 0..n2 {
                        m[i][n1 + j] = ae.mul(&o.nu[j]);
                    }
                }
            }
            for i in 0..n2 {
                m[n1 + i][n1..].clone_from_slice(&b[i]);
            }
            mu.insert(x, m);
        }
        Ok(LinearRepresentation { alphabet: self.alphabet, nu, mu, eta })
    }

    /// Kleene star of a proper series, on `n + 1` states: a fresh state
    /// records completed factors.
    pub fn star(&self) -> Result<Self> {
        if !self.constant_term().is_zero() {
            return Err(Error::Precondition(
                "star of a series with nonzero constant term".into(),
            ));
        }
        let n = self.dim();
        let mut mu = BTreeMap::new();
        for (&x, a) in &self.mu {
            let mut m = zeros(n + 1, n + 1);
            let nm = vec_mat(&self.nu, a);
            m[0][0] = dot(&nm, &self.eta);
            m[0][1..].clone_from_slice(&nm);
            for i in 0..n {
                m[i + 1][0] = dot(&a[i], &self.eta);
                m[i + 1][1..].clone_from_slice(&a[i]);
            }
            mu.insert(x, m);
        }
        let mut nu = vec![Poly::zero(); n + 1];
        nu[0] = Poly::one();
        let mut eta = vec![Poly::zero(); n + 1];
        eta[0] = Poly::one();
        Ok(LinearRepresentation { alphabet: self.alphabet, nu, mu, eta })
    }

    /// `μ(x) = μ1(x) ⊗ I + I ⊗ μ2(x)` on `n1 n2` states.
    pub fn shuffle(&self, o: &Self) -> Result<Self> {
        self.same_alphabet(o)?;
        let (i1, i2) = (ident(self.dim()), ident(o.dim()));
        let mut mu = BTreeMap::new();
        for x in self.letters_with(o) {
            let m = mat_add(&kron(&self.mu_or_zero(x), &i2), &kron(&i1, &o.mu_or_zero(x)));
            mu.insert(x, m);
        }
        Ok(LinearRepresentation {
            alphabet: self.alphabet,
            nu: kron_vec(&self.nu, &o.nu),
            mu,
            eta: kron_vec(&self.eta, &o.eta),
        })
    }

    /// Quasi-shuffle: the shuffle matrices plus `Σ_{i+j=k} μ1(y_i) ⊗ μ2(y_j)`.
    pub fn stuffle(&self, o: &Self) -> Result<Self> {
        self.same_alphabet(o)?;
        if self.alphabet != Alphabet::Y {
            return Err(Error::AlphabetMismatch("quasi-shuffle needs the alphabet Y".into()));
        }
        let mut r = self.shuffle(o)?;
        for (&i, a) in &self.mu {
            for (&j, b) in &o.mu {
                let k = i.checked_add(j).ok_or_else(|| Error::Domain("letter index overflow".into()))?;
                let extra = kron(a, b);
                let slot = r.mu.entry(k).or_insert_with(|| zeros(extra.len(), extra.len()));
                *slot = mat_add(slot, &extra);
            }
        }
        Ok(r)
    }

    /// Drop states that are not both accessible and co-accessible.
    pub fn trim(&self) -> Self {
        let n = self.dim();
        let edge = |i: usize, j: usize| self.mu.values().any(|m| !m[i][j].is_zero());
        let reach = |start: Vec<usize>, fwd: bool| {
            let mut seen = vec![false; n];
            let mut stack = start;
            while let Some(i) = stack.pop() {
                if seen[i] {
                    continue;
                }
                seen[i] = true;
                for j in 0..n {
                    let e = if fwd { edge(i, j) } else { edge(j, i) };
                    if e && !seen[j] {
                        stack.push(j);
                    }
                }
            }
            seen
        };
        let acc = reach((0..n).filter(|&i| !self.nu[i].is_zero()).collect(), true);
        let coacc = reach((0..n).filter(|&i| !self.eta[i].is_zero()).collect(), false);
        let keep: Vec<usize> = (0..n).filter(|&i| acc[i] && coacc[i]).collect();
        if keep.len() == n {
            return self.clone();
        }
        let mu = self
            .mu
            .iter()
            .map(|(&x, m)| (x, keep.iter().map(|&i| keep.iter().map(|&j| m[i][j].clone()).collect()).collect()))
            .filter(|(_, m): &(u8, PMatrix)| m.iter().any(|r| r.iter().any(|c| !c.is_zero())))
            .collect();
        LinearRepresentation {
            alphabet: self.alphabet,
            nu: keep.iter().map(|&i| self.nu[i].clone()).collect(),
            mu,
            eta: keep.iter().map(|&i| self.eta[i].clone()).collect(),
        }
    }

    /// `⟨S|w⟩ = ν μ(w) η`.
    pub fn coefficient(&self, w: &Word) -> Result<Poly> {
        if w.alphabet() != self.alphabet {
            return Err(Error::AlphabetMismatch(format!("word {w} for a {} series", self.alphabet.name())));
        }
        let mut v = self.nu.clone();
        for &x in w.indices() {
            match self.mu.get(&x) {
                Some(m) => v = vec_mat(&v, m),
                None => return Ok(Poly::zero()),
            }
        }
        Ok(dot(&v, &self.eta))
    }

    /// All coefficients on words of grade `<= n`.
    pub fn expand(&self, n: usize) -> TruncatedSeries<Poly> {
        let mut out = NCPoly::zero(self.alphabet);
        let mut stack = vec![(Vec::<u8>::new(), 0usize, self.nu.clone())];
        while let Some((letters, g, v)) = stack.pop() {
            let c = dot(&v, &self.eta);
            if !c.is_zero() {
                out.add_term(Word::from_raw(self.alphabet, letters.clone()), c);
            }
            for (&x, m) in &self.mu {
                let gx = if self.alphabet == Alphabet::X { 1 } else { x as usize };
                if g + gx > n {
                    continue;
                }
                let nv = vec_mat(&v, m);
                if nv.iter().all(|p| p.is_zero()) {
                    continue;
                }
                let mut l = letters.clone();
                l.push(x);
                stack.push((l, g + gx, nv));
            }
        }
        TruncatedSeries::new(out, n)
    }
}

/// `(Σ c_x x)*` as a one-state representation: a conc-character.
pub fn star_of_plane(alphabet: Alphabet, c: &BTreeMap<u8, Poly>) -> Result<LinearRepresentation> {
    let mut mu = BTreeMap::new();
    for (&x, v) in c {
        check_letter(alphabet, x)?;
        if !v.is_zero() {
            mu.insert(x, vec![vec![v.clone()]]);
        }
    }
    Ok(LinearRepresentation { alphabet, nu: vec![Poly::one()], mu, eta: vec![Poly::one()] })
}

/// `(Σ a_s y_s)* ⧻ (Σ b_s y_s)* = (Σ (a_s + b_s) y_s + Σ a_s b_r y_{s+r})*`
/// checked coefficient-wise up to weight `n`.
pub fn stuffle_star_identity(a: &BTreeMap<u8, Poly>, b: &BTreeMap<u8, Poly>, n: usize) -> Result<bool> {
    let lhs = star_of_plane(Alphabet::Y, a)?.stuffle(&star_of_plane(Alphabet::Y, b)?)?;
    let mut c: BTreeMap<u8, Poly> = BTreeMap::new();
    for (&s, v) in a.iter().chain(b) {
        c.entry(s).or_insert_with(Poly::zero).add_assign(v);
    }
    for (&s, x) in a {
        for (&r, y) in b {
            c.entry(s + r).or_insert_with(Poly::zero).add_assign(&x.mul(y));
        }
    }
    let rhs = star_of_plane(Alphabet::Y, &c)?;
    Ok(lhs.expand(n).poly == rhs.expand(n).poly)
}

#[derive(Clone, Debug, PartialEq)]
pub enum RatExpr {
    Letter(Alphabet, u8),
    Scalar(Poly),
    Sum(Box<RatExpr>, Box<RatExpr>),
    Conc(Box<RatExpr>, Box<RatExpr>),
    Star(Box<RatExpr>),
    Shuffle(Box<RatExpr>, Box<RatExpr>),
    Stuffle(Box<RatExpr>, Box<RatExpr>),
}

impl RatExpr {
    pub fn letter(a: Alphabet, i: u8) -> Self {
        RatExpr::Letter(a, i)
    }

    pub fn scalar(c: Poly) -> Self {
        RatExpr::Scalar(c)
    }

    pub fn plus(self, o: RatExpr) -> Self {
        RatExpr::Sum(Box::new(self), Box::new(o))
    }

    pub fn conc(self, o: RatExpr) -> Self {
        RatExpr::Conc(Box::new(self), Box::new(o))
    }

    pub fn star(self) -> Self {
        RatExpr::Star(Box::new(self))
    }

    pub fn shuffle(self, o: RatExpr) -> Self {
        RatExpr::Shuffle(Box::new(self), Box::new(o))
    }

    pub fn stuffle(self, o: RatExpr) -> Self {
        RatExpr::Stuffle(Box::new(self), Box::new(o))
    }

    /// Constant term, computed syntactically.
    pub fn constant_term(&self) -> Poly {
        match self {
            RatExpr::Letter(..) => Poly::zero(),
            RatExpr::Scalar(c) => c.clone(),
            RatExpr::Sum(a, b) => a.constant_term().add(&b.constant_term()),
            RatExpr::Star(_) => Poly::one(),
            RatExpr::Conc(a, b) | RatExpr::Shuffle(a, b) | RatExpr::Stuffle(a, b) => {
                a.constant_term().mul(&b.constant_term())
            }
        }
    }

    fn collect_alphabets(&self, out: &mut BTreeSet<Alphabet>) {
        match self {
            RatExpr::Letter(a, _) => {
                out.insert(*a);
            }
            RatExpr::Scalar(_) => {}
            RatExpr::Star(e) => e.collect_alphabets(out),
            RatExpr::Sum(a, b) | RatExpr::Conc(a, b) | RatExpr::Shuffle(a, b) | RatExpr::Stuffle(a, b) => {
                a.collect_alphabets(out);
                b.collect_alphabets(out);
            }
        }
        if matches!(self, RatExpr::Stuffle(..)) {
            out.insert(Alphabet::Y);
        }
    }

    /// The alphabet of the letters used; `None` for a constant expression.
    pub fn alphabet(&self) -> Result<Option<Alphabet>> {
        let mut s = BTreeSet::new();
        self.collect_alphabets(&mut s);
        match s.len() {
            0 => Ok(None),
            1 => Ok(s.into_iter().next()),
            _ => Err(Error::AlphabetMismatch("expression mixes X and Y letters".into())),
        }
    }
}

impl fmt::Display for RatExpr {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            RatExpr::Letter(Alphabet::X, i) => write!(f, "x{i}"),
            RatExpr::Letter(_, i) => write!(f, "y{i}"),
            RatExpr::Scalar(c) => write!(f, "({c})"),
            RatExpr::Sum(a, b) => write!(f, "({a} + {b})"),
            RatExpr::Conc(a, b) => write!(f, "{a} . {b}"),
            RatExpr::Star(e) => write!(f, "({e})*"),
            RatExpr::Shuffle(a, b) => write!(f, "({a} sh {b})"),
            RatExpr::Stuffle(a, b) => write!(f, "({a} qsh {b})"),
        }
    }
}

/// Compile an expression over the given alphabet.
pub fn rep_of_in(e: &RatExpr, alphabet: Alphabet) -> Result<LinearRepresentation> {
    let r = match e {
        RatExpr::Letter(a, i) => {
            if *a != alphabet {
                return Err(Error::AlphabetMismatch(format!("letter of {} in a {} expression", a.name(), alphabet.name())));
            }
            LinearRepresentation::letter(alphabet, *i)?
        }
        RatExpr::Scalar(c) => LinearRepresentation::constant(alphabet, c.clone()),
        RatExpr::Sum(a, b) => rep_of_in(a, alphabet)?.sum(&rep_of_in(b, alphabet)?)?,
        RatExpr::Conc(a, b) => match (&**a, &**b) {
            (RatExpr::Scalar(c), other) | (other, RatExpr::Scalar(c)) => rep_of_in(other, alphabet)?.scale(c),
            _ => rep_of_in(a, alphabet)?.product(&rep_of_in(b, alphabet)?)?,
        },
        RatExpr::Star(a) => rep_of_in(a, alphabet)?.star()?,
        RatExpr::Shuffle(a, b) => rep_of_in(a, alphabet)?.shuffle(&rep_of_in(b, alphabet)?)?,
        RatExpr::Stuffle(a, b) => rep_of_in(a, alphabet)?.stuffle(&rep_of_in(b, alphabet)?)?,
    };
    Ok(r.trim())
}

/// Compile an expression; constant expressions are taken over X.
pub fn rep_of(e: &RatExpr) -> Result<LinearRepresentation> {
    rep_of_in(e, e.alphabet()?.unwrap_or(Alphabet::X))
}

/// Compare two expressions on every word of grade `<= n`.
pub fn equal_up_to(e1: &RatExpr, e2: &RatExpr, n: usize) -> Result<bool> {
    let a = match (e1.alphabet()?, e2.alphabet()?) {
        (Some(a), Some(b)) if a != b => {
            return Err(Error::AlphabetMismatch("expressions over different alphabets".into()))
        }
        (Some(a), _) | (None, Some(a)) => a,
        (None, None) => Alphabet::X,
    };
    let s1 = rep_of_in(e1, a)?.expand(n);
    let s2 = rep_of_in(e2, a)?.expand(n);
    Ok(s1.poly == s2.poly)
}

// ---------------------------------------------------------------- parser

#[derive(Clone, Debug, PartialEq)]
enum Tok {
    Num(Q),
    T,
    Letter(Alphabet, u8),
    Plus,
    Minus,
    Dot,
    Star,
    Caret,
    LParen,
    RParen,
    Sh,
    Qsh,
}

fn perr(pos: usize, msg: impl fmt::Display) -> Error {
    Error::Parse(format!("at position {pos}: {msg}"))
}

fn tokenize(s: &str) -> Result<Vec<(usize, Tok)>> {
    let cs: Vec<(usize, char)> = s.char_indices().collect();
    let mut out = Vec::new();
    let mut i = 0;
    while i < cs.len() {
        let (pos, c) = cs[i];
        if c.is_whitespace() {
            i += 1;
            continue;
        }
        let single = match c {
            '+' => Some(Tok::Plus),
            '-' | '−' => Some(Tok::Minus),
            '.' | '·' => Some(Tok::Dot),
            '*' => Some(Tok::Star),
            '^' => Some(Tok::Caret),
            '(' => Some(Tok::LParen),
            ')' => Some(Tok::RParen),
            '⧢' => Some(Tok::Sh),
            '⧻' => Some(Tok::Qsh),
            _ => None,
        };
        if let Some(t) = single {
            out.push((pos, t));
            i += 1;
            continue;
        }
        if c.is_ascii_digit() {
            let mut j = i;
            while j < cs.len() && (cs[j].1.is_ascii_digit() || cs[j].1 == '/') {
                j += 1;
            }
            let text: String = cs[i..j].iter().map(|p| p.1).collect();
            let v = parse_q(&text).ok_or_else(|| perr(pos, format!("bad number {text:?}")))?;
            out.push((pos, Tok::Num(v)));
            i = j;
            continue;
        }
        if c.is_ascii_alphabetic() {
            let mut j = i;
            while j < cs.len() && cs[j].1.is_ascii_alphanumeric() {
                j += 1;
            }
            let word: String = cs[i..j].iter().map(|p| p.1).collect();
            // a lone `t` directly followed by a letter, as in `tx0`, is split
            let tok = match word.as_str() {
                "t" => Tok::T,
                "sh" => Tok::Sh,
                "qsh" => Tok::Qsh,
                w if (w.starts_with('x') || w.starts_with('y')) && w.len() > 1 && w[1..].bytes().all(|b| b.is_ascii_digit()) => {
                    let idx: u8 = w[1..].parse().map_err(|_| perr(pos, format!("letter index too large in {w:?}")))?;
                    let a = if w.starts_with('x') { Alphabet::X } else { Alphabet::Y };
                    check_letter(a, idx).map_err(|_| perr(pos, format!("no letter {w}")))?;
                    Tok::Letter(a, idx)
                }
                w if w.starts_with('t') && w.len() > 1 => {
                    out.push((pos, Tok::T));
                    i += 1;
                    continue;
                }
                w => return Err(perr(pos, format!("unknown identifier {w:?}"))),
            };
            out.push((pos, tok));
            i = j;
            continue;
        }
        return Err(perr(pos, format!("unexpected character {c:?}")));
    }
    Ok(out)
}

struct Parser {
    toks: Vec<(usize, Tok)>,
    at: usize,
    end: usize,
}

impl Parser {
    fn peek(&self) -> Option<&Tok> {
        self.toks.get(self.at).map(|p| &p.1)
    }

    fn pos(&self) -> usize {
        self.toks.get(self.at).map_or(self.end, |p| p.0)
    }

    fn eat(&mut self, t: &Tok) -> bool {
        if self.peek() == Some(t) {
            self.at += 1;
            true
        } else {
            false
        }
    }

    fn sum(&mut self) -> Result<RatExpr> {
        let neg = self.eat(&Tok::Minus);
        let mut e = self.shterm()?;
        if neg {
            e = RatExpr::Scalar(Poly::from_i64(-1)).conc(e);
        }
        loop {
            if self.eat(&Tok::Plus) {
                e = e.plus(self.shterm()?);
            } else if self.eat(&Tok::Minus) {
                e = e.plus(RatExpr::Scalar(Poly::from_i64(-1)).conc(self.shterm()?));
            } else {
                return Ok(e);
            }
        }
    }

    fn shterm(&mut self) -> Result<RatExpr> {
        let mut e = self.cterm()?;
        loop {
            if self.eat(&Tok::Sh) {
                e = e.shuffle(self.cterm()?);
            } else if self.eat(&Tok::Qsh) {
                e = e.stuffle(self.cterm()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn starts_atom(&self) -> bool {
        matches!(self.peek(), Some(Tok::Num(_) | Tok::T | Tok::Letter(..) | Tok::LParen))
    }

    fn cterm(&mut self) -> Result<RatExpr> {
        let mut e = self.factor()?;
        loop {
            if self.eat(&Tok::Dot) || self.starts_atom() {
                e = e.conc(self.factor()?);
            } else {
                return Ok(e);
            }
        }
    }

    fn factor(&mut self) -> Result<RatExpr> {
        let mut e = self.atom()?;
        loop {
            if self.eat(&Tok::Caret) {
                let pos = self.pos();
                let k = match self.peek() {
                    Some(Tok::Num(v)) if v.is_integer() => {
                        let k = u32::try_from(v.to_integer()).map_err(|_| perr(pos, "bad exponent"))?;
                        self.at += 1;
                        k
                    }
                    _ => return Err(perr(pos, "expected an integer exponent")),
                };
                e = match e {
                    RatExpr::Scalar(c) => RatExpr::Scalar(c.pow(k)),
                    other if k == 0 => {
                        let _ = other;
                        RatExpr::Scalar(Poly::one())
                    }
                    other => (1..k).fold(other.clone(), |acc, _| acc.conc(other.clone())),
                };
            } else if self.peek() == Some(&Tok::Star) {
                let pos = self.pos();
                self.at += 1;
                if !e.constant_term().is_zero() {
                    return Err(Error::Precondition(format!(
                        "at position {pos}: star of a series with nonzero constant term"
                    )));
                }
                e = e.star();
            } else {
                return Ok(e);
            }
        }
    }

    fn atom(&mut self) -> Result<RatExpr> {
        let pos = self.pos();
        let Some((_, t)) = self.toks.get(self.at).cloned() else {
            return Err(perr(pos, "unexpected end of input"));
        };
        self.at += 1;
        match t {
            Tok::Num(v) => Ok(RatExpr::Scalar(Poly::constant(v))),
            Tok::T => Ok(RatExpr::Scalar(Poly::t())),
            Tok::Letter(a, i) => Ok(RatExpr::Letter(a, i)),
            Tok::LParen => {
                let e = self.sum()?;
                if !self.eat(&Tok::RParen) {
                    return Err(perr(self.pos(), "expected ')'"));
                }
                Ok(e)
            }
            other => Err(perr(pos, format!("unexpected token {other:?}"))),
        }
    }
}

/// Parse a rational expression. Precedence, tightest first: `*` and `^`,
/// concatenation (`.` or juxtaposition), `sh`/`qsh`, then `+`/`-`.
pub fn parse(text: &str) -> Result<RatExpr> {
    let toks = tokenize(text)?;
    if toks.is_empty() {
        return Err(perr(0, "empty expression"));
    }
    let mut p = Parser { toks, at: 0, end: text.len() };
    let e = p.sum()?;
    if p.at != p.toks.len() {
        return Err(perr(p.pos(), "trailing input"));
    }
    e.alphabet()?;
    Ok(e)
}
