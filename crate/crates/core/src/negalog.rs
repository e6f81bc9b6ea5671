//! Polylogarithms and harmonic sums at nonpositive multi-indices.
//!
//! A word `y_{s1}...y_{sr}` over Y0 stands for `(-s1, ..., -sr)`:
//!
//! ```text
//! Li⁻_w(z) = Σ_{n1>...>nr>0} n1^s1 ... nr^sr z^n1
//! H⁻_w(n)  = Σ_{n>=n1>...>nr>0} n1^s1 ... nr^sr
//! ```
//!
//! `Li⁻_w` is a polynomial `p` in `u = 1/(1-z)` of degree `(w)+|w|`, and
//! `H⁻_w(n) = Σ p_k binom(n+k, k)`. Since `Li_{(k x1)*} = u^k`, the same
//! coefficient vector expresses `R_w` in the star basis `{(k x1)*}`.

use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::coeff::{factorial, fmt_q, Q};
use crate::error::{Error, Result};
use crate::linalg;
use crate::words::{Alphabet, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum UBasis {
    /// `Σ c_k u^k`, `u = (1-z)^{-1}`.
    Monomial,
    /// `Σ c_k binom(n+k, k)`.
    Binomial,
    /// `Σ c_k (k x1)*`.
    Star,
}

/// Univariate polynomial with its basis recorded.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct UPoly {
    pub basis: UBasis,
    pub coeffs: Vec<Q>,
}

impl UPoly {
    pub fn new(basis: UBasis, mut coeffs: Vec<Q>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        UPoly { basis, coeffs }
    }

    pub fn in_basis(&self, basis: UBasis) -> UPoly {
        UPoly { basis, coeffs: self.coeffs.clone() }
    }

    /// Degree; `None` for zero.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading(&self) -> Q {
        self.coeffs.last().cloned().unwrap_or_else(Q::zero)
    }

    pub fn coeff(&self, k: usize) -> Q {
        self.coeffs.get(k).cloned().unwrap_or_else(Q::zero)
    }

    /// Sum of the coefficients, i.e. the value at 1 in the monomial reading.
    pub fn at_one(&self) -> Q {
        self.coeffs.iter().sum()
    }

    /// Evaluate as a polynomial in its variable.
    pub fn eval(&self, x: &Q) -> Q {
        self.coeffs.iter().rev().fold(Q::zero(), |acc, c| acc * x + c)
    }

    pub fn integer_coeffs(&self) -> Option<Vec<i64>> {
        self.coeffs.iter().map(|c| if c.is_integer() { c.to_integer().to_i64() } else { None }).collect()
    }

    fn term(&self, k: usize) -> String {
        match self.basis {
            UBasis::Monomial => match k {
                0 => String::new(),
                1 => "u".into(),
                _ => format!("u^{k}"),
            },
            UBasis::Binomial => format!("C(n+{k},{k})"),
            UBasis::Star => match k {
                0 => String::new(),
                1 => "x1*".into(),
                _ => format!("({k}x1)*"),
            },
        }
    }
}

impl fmt::Display for UPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut out = String::new();
        for (k, c) in self.coeffs.iter().enumerate() {
            if c.is_zero() {
                continue;
            }
            let neg = c.is_negative();
            let a = c.abs();
            let t = self.term(k);
            let body = if t.is_empty() {
                fmt_q(&a)
            } else if a.is_one() {
                t
            } else {
                format!("{}{}", fmt_q(&a), t)
            };
            if out.is_empty() {
                out = if neg { format!("-{body}") } else { body };
            } else {
                out.push_str(if neg { " - " } else { " + " });
                out.push_str(&body);
            }
        }
        if out.is_empty() {
            out.push('0');
        }
        f.write_str(&out)
    }
}

// dense polynomial helpers on coefficient vectors
fn padd(a: &[Q], b: &[Q]) -> Vec<Q> {
    let n = a.len().max(b.len());
    (0..n)
        .map(|i| a.get(i).cloned().unwrap_or_else(Q::zero) + b.get(i).cloned().unwrap_or_else(Q::zero))
        .collect()
}

fn pmul(a: &[Q], b: &[Q]) -> Vec<Q> {
    if a.is_empty() || b.is_empty() {
        return Vec::new();
    }
    let mut out = vec![Q::zero(); a.len() + b.len() - 1];
    for (i, x) in a.iter().enumerate() {
        if x.is_zero() {
            continue;
        }
        for (j, y) in b.iter().enumerate() {
            out[i + j] += x * y;
        }
    }
    out
}

fn pscale(a: &[Q], c: &Q) -> Vec<Q> {
    a.iter().map(|x| x * c).collect()
}

fn ppow(a: &[Q], k: usize) -> Vec<Q> {
    (0..k).fold(vec![Q::one()], |acc, _| pmul(&acc, a))
}

fn qb(n: &BigInt) -> Q {
    Q::from_integer(n.clone())
}

fn binom(n: usize, k: usize) -> BigInt {
    if k > n {
        return BigInt::zero();
    }
    factorial(n) / (factorial(k) * factorial(n - k))
}

fn check_word(w: &Word) -> Result<()> {
    if w.alphabet() != Alphabet::Y0 && w.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("negative indices are words over Y0".into()));
    }
    Ok(())
}

/// `(w) + |w|`, the degree of `Li⁻_w` in `u`.
pub fn degree(w: &Word) -> usize {
    w.weight() + w.len()
}

/// `H⁻_w(m)` for all `m <= n` by nested summation.
fn hneg_table(s: &[u8], n: usize) -> Vec<BigInt> {
    // h[m] = H⁻_{suffix}(m); start with the empty word
    let mut h: Vec<BigInt> = vec![BigInt::one(); n + 1];
    for &e in s.iter().rev() {
        let mut next = vec![BigInt::zero(); n + 1];
        for m in 1..=n {
            let term = BigInt::from(m).pow(e as u32) * &h[m - 1];
            next[m] = &next[m - 1] + term;
        }
        h = next;
    }
    h
}

/// `H⁻_w(n)` by direct nested summation.
pub fn hneg_direct(w: &Word, n: usize) -> Result<Q> {
    check_word(w)?;
    Ok(qb(&hneg_table(w.indices(), n)[n]))
}

/// `u`-coefficients of `Li⁻_w` from its Taylor coefficients: the first
/// `d+1` coefficients of `Σ p_k (1-z)^{-k}` determine `p`.
pub fn lineg_coeffs(w: &Word) -> Result<UPoly> {
    check_word(w)?;
    if w.is_empty() {
        return Ok(UPoly::new(UBasis::Monomial, vec![Q::one()]));
    }
    let d = degree(w);
    let s = w.indices();
    let rest = hneg_table(&s[1..], d);
    // Taylor coefficient of z^m is m^{s1} H⁻_{rest}(m-1)
    let c: Vec<Q> = (0..=d)
        .map(|m| if m == 0 { Q::zero() } else { qb(&(BigInt::from(m).pow(s[0] as u32) * &rest[m - 1])) })
        .collect();
    // (1-z)^{-k} = Σ_m binom(m+k-1, m) z^m
    let a: linalg::Matrix = (0..=d)
        .map(|m| {
            (0..=d)
                .map(|k| match (m, k) {
                    (_, 0) => if m == 0 { Q::one() } else { Q::zero() },
                    _ => qb(&binom(m + k - 1, m)),
                })
                .collect()
        })
        .collect();
    let inv = linalg::invert(&a).ok_or_else(|| Error::Domain("singular change of basis".into()))?;
    let p: Vec<Q> = (0..=d).map(|k| (0..=d).map(|m| &inv[k][m] * &c[m]).sum()).collect();
    Ok(UPoly::new(UBasis::Monomial, p))
}

/// The same polynomial through `Li⁻_{y_s v} = θ^s[(u-1) Li⁻_v]`, where
/// `θ = z d/dz = u(u-1) d/du`.
pub fn lineg_operator(w: &Word) -> Result<UPoly> {
    check_word(w)?;
    let mut p = vec![Q::one()];
    for &s in w.indices().iter().rev() {
        p = padd(&pmul(&p, &[-Q::one(), Q::one()]), &[]);
        for _ in 0..s {
            p = theta(&p);
        }
    }
    Ok(UPoly::new(UBasis::Monomial, p))
}

fn theta(p: &[Q]) -> Vec<Q> {
    // coefficient k: (k-1) p_{k-1} - k p_k
    (0..=p.len())
        .map(|k| {
            let a = if k >= 1 { Q::from_integer((k as i64 - 1).into()) * p.get(k - 1).cloned().unwrap_or_else(Q::zero) } else { Q::zero() };
            let b = Q::from_integer((k as i64).into()) * p.get(k).cloned().unwrap_or_else(Q::zero);
            a - b
        })
        .collect()
}

/// The two-case coefficient recursion exactly as it is usually printed,
/// including the product `π_{k-1} π_k` in the middle range of the `y0` case.
pub fn lineg_printed(w: &Word) -> Result<UPoly> {
    check_word(w)?;
    let s = w.indices();
    if s.is_empty() {
        return Ok(UPoly::new(UBasis::Monomial, vec![Q::one()]));
    }
    let pi = |v: &[Q], k: usize| v.get(k).cloned().unwrap_or_else(Q::zero);
    let mut p = vec![Q::one()];
    let mut tail_deg = 0usize;
    for &i in s.iter().rev() {
        // y0 step
        let d = tail_deg;
        let mut q = vec![Q::zero(); d + 2];
        for (k, slot) in q.iter_mut().enumerate() {
            *slot = if k == d + 1 {
                pi(&p, k - 1)
            } else if k >= 1 {
                pi(&p, k - 1) * pi(&p, k)
            } else {
                -pi(&p, 0)
            };
        }
        p = q;
        // raise y_{j-1} u to y_j u
        for j in 1..=i as usize {
            let top = d + j + 1;
            let mut q = vec![Q::zero(); top + 1];
            for (k, slot) in q.iter_mut().enumerate() {
                let kq = Q::from_integer((k as i64).into());
                let km1 = Q::from_integer((k as i64 - 1).into());
                *slot = if k == top {
                    km1 * pi(&p, k - 1)
                } else if k >= 2 {
                    km1 * pi(&p, k - 1) - kq * pi(&p, k)
                } else if k == 1 {
                    -pi(&p, 1)
                } else {
                    Q::zero()
                };
            }
            p = q;
        }
        tail_deg = d + i as usize + 1;
    }
    Ok(UPoly::new(UBasis::Monomial, p))
}

/// Words of degree `<= max_degree` on which the printed recursion disagrees
/// with the Taylor-coefficient computation, which is kept.
pub fn recursion_conflicts(max_degree: usize) -> Result<Vec<(Word, UPoly, UPoly)>> {
    let mut out = Vec::new();
    for w in y0_words_up_to_degree(max_degree) {
        let printed = lineg_printed(&w)?;
        let oracle = lineg_coeffs(&w)?;
        if printed != oracle {
            out.push((w, printed, oracle));
        }
    }
    Ok(out)
}

/// Nonempty Y0 words with `(w)+|w| <= d`.
pub fn y0_words_up_to_degree(d: usize) -> Vec<Word> {
    let mut out = Vec::new();
    let mut stack: Vec<Vec<u8>> = vec![Vec::new()];
    while let Some(v) = stack.pop() {
        let deg: usize = v.iter().map(|&i| i as usize + 1).sum();
        if !v.is_empty() {
            out.push(Word::y0(&v));
        }
        for i in 0..d.saturating_sub(deg) {
            let mut n = v.clone();
            n.push(i as u8);
            stack.push(n);
        }
    }
    out.sort();
    out
}

/// `H⁻_w(n) = Σ p_k binom(n+k, k)`.
pub fn hneg_value(w: &Word, n: usize) -> Result<Q> {
    let p = lineg_coeffs(w)?;
    Ok(p.coeffs.iter().enumerate().map(|(k, c)| c * qb(&binom(n + k, k))).sum())
}

/// `H⁻_w` in the binomial basis.
pub fn hneg_poly(w: &Word) -> Result<UPoly> {
    Ok(lineg_coeffs(w)?.in_basis(UBasis::Binomial))
}

/// `C⁻_w = Π_{w=uv, v≠1} ((v)+|v|)^{-1}`.
pub fn c_minus(w: &Word) -> Result<Q> {
    check_word(w)?;
    let s = w.indices();
    let mut c = Q::one();
    for start in 0..s.len() {
        let d: usize = s[start..].iter().map(|&i| i as usize + 1).sum();
        c /= Q::from_integer(d.into());
    }
    Ok(c)
}

/// `B⁻_w = ((w)+|w|)! C⁻_w`, the leading coefficient of `Li⁻_w`.
pub fn b_minus(w: &Word) -> Result<BigInt> {
    let b = qb(&factorial(degree(w))) * c_minus(w)?;
    debug_assert!(b.is_integer());
    Ok(b.to_integer())
}

/// `p̂_k = p_k / k!`.
pub fn hat(p: &UPoly) -> UPoly {
    UPoly::new(p.basis, p.coeffs.iter().enumerate().map(|(k, c)| c / qb(&factorial(k))).collect())
}

/// `p̌_k = k! p_k`.
pub fn check(p: &UPoly) -> UPoly {
    UPoly::new(p.basis, p.coeffs.iter().enumerate().map(|(k, c)| c * qb(&factorial(k))).collect())
}

/// `(p̂, p̌)`.
pub fn transforms(p: &UPoly) -> (UPoly, UPoly) {
    (hat(p), check(p))
}

/// `ζ_⧢(-s1,...,-sr) = p(1)`.
pub fn zeta_sh_neg(w: &Word) -> Result<Q> {
    Ok(lineg_coeffs(w)?.at_one())
}

/// `γ_{-s1,...,-sr} = p̂(1)`.
pub fn gamma_neg(w: &Word) -> Result<Q> {
    Ok(hat(&lineg_coeffs(w)?).at_one())
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum StirlingKind {
    /// Signed, from `(x)_k = Σ S1(k,j) x^j`.
    First,
    Second,
}

pub fn stirling(kind: StirlingKind, k: usize, j: usize) -> BigInt {
    match kind {
        StirlingKind::First => stirling1(k, j),
        StirlingKind::Second => stirling2(k, j),
    }
}

/// Signed Stirling numbers of the first kind.
pub fn stirling1(k: usize, j: usize) -> BigInt {
    let mut row = vec![BigInt::one()];
    for n in 0..k {
        // (x)_{n+1} = (x)_n (x - n)
        let mut next = vec![BigInt::zero(); n + 2];
        for (i, c) in row.iter().enumerate() {
            next[i + 1] += c;
            next[i] -= c * BigInt::from(n);
        }
        row = next;
    }
    row.get(j).cloned().unwrap_or_default()
}

pub fn stirling1_unsigned(k: usize, j: usize) -> BigInt {
    stirling1(k, j).abs()
}

pub fn stirling2(k: usize, j: usize) -> BigInt {
    let mut row = vec![BigInt::one()];
    for n in 0..k {
        let mut next = vec![BigInt::zero(); n + 2];
        for i in 1..=n + 1 {
            let a = if i <= n { BigInt::from(i) * &row[i] } else { BigInt::zero() };
            next[i] = a + &row[i - 1];
        }
        row = next;
    }
    row.get(j).cloned().unwrap_or_default()
}

/// `R'_{y_k} = Σ_i i! S2(k,i) (x1* - 1)^{⧢i}` in the star basis.
pub fn r_prime_letter(k: u8) -> Vec<Q> {
    let xm1 = vec![-Q::one(), Q::one()];
    let mut out = Vec::new();
    for i in 0..=k as usize {
        let c = qb(&(factorial(i) * stirling2(k as usize, i)));
        if !c.is_zero() {
            out = padd(&out, &pscale(&ppow(&xm1, i), &c));
        }
    }
    out
}

/// `R_w` in the star basis. Letters use `R_{y0} = x1* - 1` and
/// `R_{y_k} = x1* ⧢ R'_{y_k}`; longer words apply `θ^s[(x1* - 1) ⧢ R_v]`
/// with `θ (k x1)* = k ((k+1) x1)* - k (k x1)*`.
pub fn r_word(w: &Word) -> Result<UPoly> {
    check_word(w)?;
    let s = w.indices();
    if s.is_empty() {
        return Ok(UPoly::new(UBasis::Star, vec![Q::one()]));
    }
    let last = s[s.len() - 1];
    let mut r = if last == 0 { vec![-Q::one(), Q::one()] } else { pmul(&[Q::zero(), Q::one()], &r_prime_letter(last)) };
    for &e in s[..s.len() - 1].iter().rev() {
        r = pmul(&r, &[-Q::one(), Q::one()]);
        for _ in 0..e {
            r = theta(&r);
        }
    }
    Ok(UPoly::new(UBasis::Star, r))
}

/// The explicit nested-binomial formula for `R_w` as printed, with
/// `ρ_0 = x1* - 1` and `ρ_k = Σ_j S2(k,j) (j!)^2 Σ_l (-1)^l/l! (x1*)^{⧢(j-l+1)}/(j-l)!`.
pub fn r_word_explicit_printed(w: &Word) -> Result<UPoly> {
    check_word(w)?;
    let s: Vec<usize> = w.indices().iter().map(|&i| i as usize).collect();
    let rho = |k: usize| -> Vec<Q> {
        if k == 0 {
            return vec![-Q::one(), Q::one()];
        }
        let mut out = Vec::new();
        for j in 1..=k {
            let c = qb(&(stirling2(k, j) * factorial(j) * factorial(j)));
            for l in 0..=j {
                let sign = if l % 2 == 0 { Q::one() } else { -Q::one() };
                let coef = &c * sign / qb(&(factorial(l) * factorial(j - l)));
                let mut mono = vec![Q::zero(); j - l + 2];
                mono[j - l + 1] = coef;
                out = padd(&out, &mono);
            }
        }
        out
    };
    // enumerate k_1..k_r with k_i <= s_1+..+s_i - (k_1+..+k_{i-1})
    fn go(s: &[usize], i: usize, budget: usize, coef: BigInt, acc: Vec<Q>, rho: &dyn Fn(usize) -> Vec<Q>, out: &mut Vec<Q>) {
        if i == s.len() {
            *out = padd(out, &pscale(&acc, &Q::from_integer(coef)));
            return;
        }
        let top = budget + s[i];
        for k in 0..=top {
            go(s, i + 1, top - k, &coef * binom(top, k), pmul(&acc, &rho(k)), rho, out);
        }
    }
    let mut out = Vec::new();
    go(&s, 0, 0, BigInt::one(), vec![Q::one()], &rho, &mut out);
    Ok(UPoly::new(UBasis::Star, out))
}

/// Whether the printed explicit formula reproduces `R_w`.
pub fn explicit_formula_holds(w: &Word) -> Result<bool> {
    Ok(r_word_explicit_printed(w)? == r_word(w)?)
}

/// Whether `(k x1)* = 1 + R_{y0} + Σ_{j=2}^k S1(k,j)/(k-1)! R_{y_{j+1}}` holds
/// in the star basis. Reported, not assumed.
pub fn letter_formula_holds(k: usize) -> Result<bool> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let mut rhs = vec![Q::one()];
    rhs = padd(&rhs, &r_word(&Word::y0(&[0]))?.coeffs);
    for j in 2..=k {
        let c = qb(&stirling1(k, j)) / qb(&factorial(k - 1));
        let idx = u8::try_from(j + 1).map_err(|_| Error::Domain("index too large".into()))?;
        rhs = padd(&rhs, &pscale(&r_word(&Word::y0(&[idx]))?.coeffs, &c));
    }
    let mut lhs = vec![Q::zero(); k + 1];
    lhs[k] = Q::one();
    Ok(UPoly::new(UBasis::Star, lhs) == UPoly::new(UBasis::Star, rhs))
}

/// `S = x1* ⧢ (R'_{y_{k+l}} + R'_{y_k y_l} + R'_{y_l y_k})`, i.e. the star
/// polynomial of `Li⁻_{y_k ⧻ y_l}`, whose harmonic transform is the
/// pointwise product `H⁻_{y_k} H⁻_{y_l}`.
pub fn hadamard_square_index(k: u8, l: u8) -> Result<UPoly> {
    if k == 0 || l == 0 {
        return Err(Error::Domain("indices must be at least 1".into()));
    }
    let kl = k.checked_add(l).ok_or_else(|| Error::Domain("index overflow".into()))?;
    let mut s = r_word(&Word::y0(&[kl]))?.coeffs;
    s = padd(&s, &r_word(&Word::y0(&[k, l]))?.coeffs);
    s = padd(&s, &r_word(&Word::y0(&[l, k]))?.coeffs);
    Ok(UPoly::new(UBasis::Star, s))
}

/// Pointwise product of two `u`-polynomials.
pub fn upoly_mul(a: &UPoly, b: &UPoly) -> UPoly {
    UPoly::new(a.basis, pmul(&a.coeffs, &b.coeffs))
}

/// Exact harmonic sum `H_w(n) = Σ_{n>=n1>...>nr>0} n1^{-s1}...nr^{-sr}` for a Y word.
pub fn harmonic_exact(w: &Word, n: usize) -> Result<Q> {
    if w.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("harmonic sums take Y words".into()));
    }
    let mut h: Vec<Q> = vec![Q::one(); n + 1];
    for &e in w.indices().iter().rev() {
        let mut next = vec![Q::zero(); n + 1];
        for m in 1..=n {
            let term = &h[m - 1] / qb(&BigInt::from(m).pow(e as u32));
            next[m] = &next[m - 1] + term;
        }
        h = next;
    }
    Ok(h[n].clone())
}
