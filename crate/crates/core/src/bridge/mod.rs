//! Generating series, the bridge identity `Z_γ = B(y1) π_Y(Z_⧢)` and the
//! relation miner built on it.
//!
//! Coordinates are symbols: `zY[l]` for the stuffle-side coordinate
//! `ζ(Σ_l)`, `zX[l]` for the shuffle-side `ζ(S_l)`, and `γ`.

mod miner;
pub mod modp;

use std::collections::BTreeMap;

use num_traits::One;

use crate::bases::{assemble_group_like, pbw_basis, BasisKind};
use crate::coeff::{factorial, q, qi, Poly, Ring, Symbol, Q};
use crate::error::{Error, Result};
use crate::ncalg::{NCPoly, TruncatedSeries};
use crate::negalog;
use crate::ratseries;
use crate::words::{compositions, lyndon_words, words_up_to, Alphabet, Word};

pub use miner::Preference;

/// Symbols are shared with the polynomial layer.
pub type ZetaSymbol = Symbol;

/// Which family of coordinates (or which bridge letter) is meant.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Side {
    /// Stuffle side: `Σ_l`, letter `y1`.
    Y,
    /// Shuffle side: `S_l`, letter `x1`.
    X,
}

impl Side {
    pub fn name(self) -> &'static str {
        match self {
            Side::Y => "Y",
            Side::X => "X",
        }
    }
}

/// `ζ(k)` as a symbol of the given family.
pub fn zeta_symbol(side: Side, k: u8) -> Symbol {
    match side {
        Side::Y => Symbol::zy(&[k]),
        Side::X => {
            let mut v = vec![0u8; k as usize - 1];
            v.push(1);
            Symbol::zx(&v)
        }
    }
}

/// `B(t) = exp(γ t − Σ_{k≥2} ζ(k)(−t)^k/k)` on the letter `y1` or `x1`
/// (without the `γ` term when `include_gamma` is false).
pub fn build_b(side: Side, include_gamma: bool, n: usize) -> Result<TruncatedSeries<Poly>> {
    if n == 0 {
        return Err(Error::Domain("truncation bound must be at least 1".into()));
    }
    let b = miner::b_coefficients(n, include_gamma, &|k| zeta_symbol(side, k));
    let alphabet = match side {
        Side::Y => Alphabet::Y,
        Side::X => Alphabet::X,
    };
    let mut out = NCPoly::zero(alphabet);
    for (k, c) in b.into_iter().enumerate() {
        out.add_term(Word::new(alphabet, vec![1; k])?, c);
    }
    Ok(TruncatedSeries::new(out, n))
}

fn group_like(kind: BasisKind, n: usize, coord: &dyn Fn(&Word) -> Poly) -> Result<TruncatedSeries<Poly>> {
    if n < 1 {
        return Err(Error::Domain("truncation bound must be at least 1".into()));
    }
    let pair = pbw_basis(kind, n)?;
    let coords: BTreeMap<Word, Poly> = pair.lyndon()?.into_iter().map(|l| {
        let c = coord(&l);
        (l, c)
    }).collect();
    Ok(TruncatedSeries::new(assemble_group_like(&coords, &pair, n)?, n))
}

/// `Z_⧢ = Π↘ exp(ζ(S_l) P_l)`, letters `x0`, `x1` with coordinate 0.
pub fn build_zsh(n: usize) -> Result<TruncatedSeries<Poly>> {
    group_like(BasisKind::ShuffleX, n, &|l| {
        if l.len() == 1 {
            Poly::zero()
        } else {
            Poly::var(Symbol::ZetaX(l.clone()))
        }
    })
}

/// `Z_⧻ = Π↘ exp(ζ(Σ_l) Π_l)`, `y1` with coordinate 0.
pub fn build_zst(n: usize) -> Result<TruncatedSeries<Poly>> {
    group_like(BasisKind::StuffleY, n, &|l| {
        if l.indices() == [1] {
            Poly::zero()
        } else {
            Poly::var(Symbol::ZetaY(l.clone()))
        }
    })
}

/// `Z_γ`: as `Z_⧻` with coordinate `γ` on `y1`.
pub fn build_zgamma(n: usize) -> Result<TruncatedSeries<Poly>> {
    group_like(BasisKind::StuffleY, n, &|l| {
        if l.indices() == [1] {
            Poly::gamma()
        } else {
            Poly::var(Symbol::ZetaY(l.clone()))
        }
    })
}

/// `⟨B(y1) π_Y(Z_⧢) | w⟩` as it comes out of the expansion: `γ`, the
/// `ζ(k)` of `B` as `zY[y_k]`, and shuffle coordinates `zX[l]`.
pub fn gamma_divergent_raw(w: &Word, zsh: &TruncatedSeries<Poly>) -> Result<Poly> {
    if w.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("divergent constants are indexed by Y words".into()));
    }
    let p = w.weight();
    if p > zsh.bound {
        return Err(Error::Truncation(format!("weight {p} exceeds bound {}", zsh.bound)));
    }
    let b = miner::b_coefficients(p, true, &|k| Symbol::zy(&[k]));
    let s = w.indices();
    let mut out = Poly::zero();
    let mut k = 0;
    loop {
        let rest = Word::y(&s[k..]).pi_x()?;
        out.add_assign(&b[s[..k].len()].mul(&zsh.coeff(&rest)));
        if k == s.len() || s[k] != 1 {
            break;
        }
        k += 1;
    }
    Ok(out)
}

/// Finite part `γ_w` of a (possibly divergent) harmonic sum, reduced to the
/// stuffle-side irreducibles and `γ`.
pub fn gamma_divergent(w: &Word, n: usize) -> Result<Poly> {
    let p = w.weight();
    if p > n {
        return Err(Error::Domain(format!("weight of {w} exceeds {n}")));
    }
    let zsh = build_zsh(p.max(1))?;
    let raw = gamma_divergent_raw(w, &zsh)?;
    if p < 2 {
        return Ok(raw);
    }
    let report = mine_relations(p)?;
    Ok(report.normal_form(&raw, Side::Y))
}

/// How bridge equations are read off.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum EquationMode {
    /// Pair with `Σ_l` (Y side) and `S_l` (X side) for Lyndon `l`.
    Coordinates,
    /// Coefficient of every Y word.
    AllWords,
}

/// `lhs − rhs = 0`, weight-homogeneous.
#[derive(Clone, Debug, PartialEq)]
pub struct Equation {
    pub side: Side,
    pub weight: usize,
    pub label: String,
    pub poly: Poly,
}

/// The bridge identity read off at every weight `<= n`.
pub fn bridge_equations(n: usize, mode: EquationMode) -> Result<Vec<Equation>> {
    if n < 2 {
        return Err(Error::Domain("maximum weight must be at least 2".into()));
    }
    let zsh = build_zsh(n)?;
    let zg = build_zgamma(n)?;
    // Y-word coefficients of Z_γ − B(y1)π_Y Z_⧢
    let mut diff: BTreeMap<Word, Poly> = BTreeMap::new();
    for w in words_up_to(Alphabet::Y, n)? {
        let lhs = zg.coeff(&w);
        let rhs = gamma_divergent_raw(&w, &zsh)?;
        diff.insert(w, lhs.sub(&rhs));
    }
    let mut out = Vec::new();
    match mode {
        EquationMode::AllWords => {
            for (w, p) in diff {
                out.push(Equation { side: Side::Y, weight: w.weight(), label: w.to_text(), poly: p });
            }
        }
        EquationMode::Coordinates => {
            let ys = pbw_basis(BasisKind::StuffleY, n)?;
            for l in ys.lyndon()? {
                let mut acc = Poly::zero();
                for (w, c) in ys.upper[&l].terms() {
                    acc.add_assign(&diff[w].scale(c));
                }
                out.push(Equation { side: Side::Y, weight: l.weight(), label: Symbol::ZetaY(l.clone()).basis_name(), poly: acc });
            }
            // π_X Z_γ − B(x1) Z_⧢ on X words
            let xs = pbw_basis(BasisKind::ShuffleX, n)?;
            let bx = build_b(Side::X, true, n)?;
            let lhs_x = |v: &Word| -> Result<Poly> {
                Ok(match v.pi_y()? {
                    Some(u) if !v.is_empty() => zg.coeff(&u),
                    _ => Poly::zero(),
                })
            };
            let rhs_x = |v: &Word| -> Poly {
                let s = v.indices();
                let mut acc = Poly::zero();
                let mut k = 0;
                loop {
                    let rest = Word::x(&s[k..]);
                    acc.add_assign(&bx.coeff(&Word::x(&s[..k])).mul(&zsh.coeff(&rest)));
                    if k == s.len() || s[k] != 1 {
                        break;
                    }
                    k += 1;
                }
                acc
            };
            for l in xs.lyndon()? {
                if l.len() < 2 {
                    continue;
                }
                let mut acc = Poly::zero();
                for (v, c) in xs.upper[&l].terms() {
                    acc.add_assign(&lhs_x(v)?.sub(&rhs_x(v)).scale(c));
                }
                out.push(Equation { side: Side::X, weight: l.len(), label: Symbol::ZetaX(l.clone()).basis_name(), poly: acc });
            }
        }
    }
    Ok(out)
}

/// `lhs → rhs`, homogeneous of weight `weight`; `rhs` uses irreducibles only.
#[derive(Clone, Debug, PartialEq)]
pub struct RelationRule {
    pub side: Side,
    pub lhs: Symbol,
    pub rhs: Poly,
    pub weight: usize,
}

/// Miner output.
#[derive(Clone, Debug, PartialEq)]
pub struct MinerReport {
    pub max_weight: usize,
    pub rules_y: Vec<RelationRule>,
    pub rules_x: Vec<RelationRule>,
    pub irr_y: Vec<Symbol>,
    pub irr_x: Vec<Symbol>,
    /// Each X irreducible in terms of the Y irreducibles.
    pub x_to_y: BTreeMap<Symbol, Poly>,
    /// Each Y irreducible in terms of the X irreducibles.
    pub y_to_x: BTreeMap<Symbol, Poly>,
    /// No rule or dictionary entry involves `γ`.
    pub gamma_free: bool,
}

/// Pivot orders deciding which Lyndon words stay irreducible.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MinerConfig {
    pub y_order: Preference,
    pub x_order: Preference,
}

impl Default for MinerConfig {
    fn default() -> Self {
        MinerConfig { y_order: Preference::LettersLongestLex, x_order: Preference::LettersLongestLexDesc }
    }
}

/// Run the miner with the default pivot orders.
pub fn mine_relations(n: usize) -> Result<MinerReport> {
    mine_relations_with(n, &MinerConfig::default())
}

pub fn mine_relations_with(n: usize, cfg: &MinerConfig) -> Result<MinerReport> {
    let exact = miner::mine_exact(n, &cfg.y_order, &cfg.x_order)?;
    let mut r = MinerReport {
        max_weight: n,
        rules_y: vec![],
        rules_x: vec![],
        irr_y: vec![],
        irr_x: vec![],
        x_to_y: BTreeMap::new(),
        y_to_x: BTreeMap::new(),
        gamma_free: true,
    };
    for (k, w) in exact.into_iter().enumerate() {
        let p = k + 2;
        r.irr_y.extend(w.irr_y.into_iter().map(Symbol::ZetaY));
        r.irr_x.extend(w.irr_x.into_iter().map(Symbol::ZetaX));
        r.rules_y.extend(w.rules_y.into_iter().map(|(l, rhs)| RelationRule { side: Side::Y, lhs: Symbol::ZetaY(l), rhs, weight: p }));
        r.rules_x.extend(w.rules_x.into_iter().map(|(l, rhs)| RelationRule { side: Side::X, lhs: Symbol::ZetaX(l), rhs, weight: p }));
        r.x_to_y.extend(w.x_to_y.into_iter().map(|(l, v)| (Symbol::ZetaX(l), v)));
        r.y_to_x.extend(w.y_to_x.into_iter().map(|(l, v)| (Symbol::ZetaY(l), v)));
        r.gamma_free &= w.gamma_free;
    }
    Ok(r)
}

impl MinerReport {
    pub fn rules(&self, side: Side) -> &[RelationRule] {
        match side {
            Side::Y => &self.rules_y,
            Side::X => &self.rules_x,
        }
    }

    pub fn irreducibles(&self, side: Side) -> &[Symbol] {
        match side {
            Side::Y => &self.irr_y,
            Side::X => &self.irr_x,
        }
    }

    pub fn rules_at(&self, side: Side, weight: usize) -> Vec<&RelationRule> {
        self.rules(side).iter().filter(|r| r.weight == weight).collect()
    }

    pub fn irreducibles_at(&self, side: Side, weight: usize) -> Vec<&Symbol> {
        self.irreducibles(side).iter().filter(|s| s.weight() == weight).collect()
    }

    /// Rewrite every coordinate symbol into the irreducibles of `side`
    /// (`γ` and symbols beyond the mined weight are kept).
    pub fn normal_form(&self, p: &Poly, side: Side) -> Poly {
        let own: BTreeMap<&Symbol, &Poly> = self.rules(side).iter().map(|r| (&r.lhs, &r.rhs)).collect();
        let other: BTreeMap<&Symbol, &Poly> = self.rules(side_other(side)).iter().map(|r| (&r.lhs, &r.rhs)).collect();
        let dict = match side {
            Side::Y => &self.x_to_y,
            Side::X => &self.y_to_x,
        };
        let translate = |rhs: &Poly| rhs.substitute(&|s| dict.get(s).cloned());
        let belongs = |s: &Symbol| matches!((side, s), (Side::Y, Symbol::ZetaY(_)) | (Side::X, Symbol::ZetaX(_)));
        p.substitute(&|s| {
            if s.weight() > self.max_weight {
                return None;
            }
            if belongs(s) {
                own.get(s).map(|r| (*r).clone())
            } else if let Some(v) = dict.get(s) {
                Some(v.clone())
            } else {
                other.get(s).map(|r| translate(r))
            }
        })
    }

    /// Kernel generators `Q_l = U_l − rhs(U)`: the rule lifted to the dual
    /// basis (`Σ` with `⧻` on the Y side, `S` with `⧢` on the X side).
    pub fn kernel(&self, side: Side, max_weight: usize) -> Result<Vec<(Symbol, NCPoly<Q>)>> {
        let n = max_weight.min(self.max_weight);
        let kind = match side {
            Side::Y => BasisKind::StuffleY,
            Side::X => BasisKind::ShuffleX,
        };
        let pair = pbw_basis(kind, n)?;
        let upper = |s: &Symbol| -> Result<NCPoly<Q>> {
            let w = match s {
                Symbol::ZetaY(w) | Symbol::ZetaX(w) => w,
                _ => return Err(Error::Domain(format!("{s} has no basis element"))),
            };
            pair.upper(w).cloned().ok_or_else(|| Error::Domain(format!("no basis element for {w}")))
        };
        let mut out = Vec::new();
        for r in self.rules(side).iter().filter(|r| r.weight <= n) {
            let mut qp = upper(&r.lhs)?;
            for (m, c) in r.rhs.terms() {
                let mut prod = NCPoly::one(kind.alphabet());
                for (s, e) in m.pairs() {
                    let u = upper(s)?;
                    for _ in 0..*e {
                        prod = match side {
                            Side::Y => prod.stuffle(&u)?,
                            Side::X => prod.shuffle(&u)?,
                        };
                    }
                }
                qp = qp.sub(&prod.scale_q(c));
            }
            out.push((r.lhs.clone(), qp));
        }
        Ok(out)
    }

    /// Every equation reduces to zero under the rules.
    pub fn residues(&self, eqs: &[Equation]) -> Vec<(String, Poly)> {
        eqs.iter()
            .filter(|e| e.weight <= self.max_weight)
            .map(|e| (e.label.clone(), self.normal_form(&e.poly, Side::Y)))
            .filter(|(_, p)| !p.is_zero())
            .collect()
    }
}

fn side_other(s: Side) -> Side {
    match s {
        Side::Y => Side::X,
        Side::X => Side::Y,
    }
}

/// `ζ(Σ_l)` computed on the other side, `⟨Z_⧢ | π_X Σ_l⟩`, agrees with the
/// Y-side rule after mapping both into the X irreducibles.
pub fn cross_side_check(report: &MinerReport, n: usize) -> Result<bool> {
    let n = n.min(report.max_weight);
    let zsh = build_zsh(n)?;
    let ys = pbw_basis(BasisKind::StuffleY, n)?;
    for l in ys.lyndon()? {
        if l.indices() == [1] {
            continue;
        }
        let mut via_x = Poly::zero();
        for (w, c) in ys.upper[&l].terms() {
            via_x.add_assign(&zsh.coeff(&w.pi_x()?).scale(c));
        }
        let a = report.normal_form(&Poly::var(Symbol::ZetaY(l.clone())), Side::X);
        let b = report.normal_form(&via_x, Side::X);
        if a != b {
            return Ok(false);
        }
    }
    Ok(true)
}

/// `ζ(2k)/π^{2k} = k Σ_l ((−1)^{k+l}/l) Σ_{n1+…+nl=k} Π 1/(2n_i+1)!`.
pub fn euler_even_ratio(k: usize) -> Result<Q> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let mut total = qi(0);
    for c in compositions(k) {
        let l = c.len() as i64;
        let mut term = q(if (k as i64 + l) % 2 == 0 { 1 } else { -1 }, l);
        for &n in &c {
            term /= Q::from_integer(factorial(2 * n as usize + 1));
        }
        total += term;
    }
    Ok(total * qi(k as i64))
}

/// `(ζ({2}^k)/π^{2k}, ζ({3,1}^k)/π^{4k}) = (1/(2k+1)!, 2/(4k+2)!)`; the
/// second value is cross-checked against the product of the sine and
/// hyperbolic sine series, which is what the shuffle identity
/// `(−t²x0x1)* ⧢ (t²x0x1)* = (−4t⁴x0²x1²)*` says after applying `ζ`.
pub fn run_ratios(k: usize) -> Result<(Q, Q)> {
    if k == 0 {
        return Err(Error::Domain("k must be at least 1".into()));
    }
    let f = |n: usize| Q::from_integer(factorial(n));
    let twos = f(2 * k + 1).recip();
    let three_one = qi(2) / f(4 * k + 2);
    // coefficient of t^{4k} in sin(πt)/(πt) · sinh(πt)/(πt), divided by (−4)^k
    let mut s = qi(0);
    for i in 0..=2 * k {
        let j = 2 * k - i;
        let sign = if i % 2 == 0 { 1 } else { -1 };
        s += qi(sign) / (f(2 * i + 1) * f(2 * j + 1));
    }
    let scale = Q::from_integer(num_bigint::BigInt::from(-4).pow(k as u32));
    if s / scale != three_one {
        return Err(Error::Inconsistent(format!("run ratio cross-check failed at k = {k}")));
    }
    let grade = (4 * k).min(8);
    let lhs = ratseries::parse("(-t^2 . x0 . x1)* sh (t^2 . x0 . x1)*")?;
    let rhs = ratseries::parse("(-4t^4 x0^2 x1^2)*")?;
    if !ratseries::equal_up_to(&lhs, &rhs, grade)? {
        return Err(Error::Inconsistent("shuffle star identity failed".into()));
    }
    Ok((twos, three_one))
}

/// `y_r* = exp_⧻(Σ_k (−1)^{k−1} y_{kr}/k)` up to weight `n`.
pub fn newton_girard_check(r: u8, n: usize) -> Result<bool> {
    if r == 0 || n < r as usize {
        return Err(Error::Domain("need r >= 1 and n >= r".into()));
    }
    let trunc = |p: NCPoly<Q>| NCPoly::from_terms(Alphabet::Y, p.terms().filter(|(w, _)| w.weight() <= n).map(|(w, c)| (w.clone(), c.clone())));
    let mut star = NCPoly::one(Alphabet::Y);
    let mut power = NCPoly::one(Alphabet::Y);
    for _ in 0..n / r as usize {
        power = trunc(power.conc(&NCPoly::word(Word::y(&[r])))?);
        star = star.add(&power);
    }
    let mut s = NCPoly::zero(Alphabet::Y);
    let mut k = 1;
    while k * r as usize <= n {
        let sign = if k % 2 == 1 { 1 } else { -1 };
        s.add_term(Word::y(&[(k * r as usize) as u8]), q(sign, k as i64));
        k += 1;
    }
    let mut exp = NCPoly::one(Alphabet::Y);
    let mut term = NCPoly::one(Alphabet::Y);
    let mut m = 1;
    loop {
        term = trunc(term.stuffle(&s)?).scale_q(&q(1, m));
        if term.is_zero() {
            break;
        }
        exp = exp.add(&term);
        m += 1;
    }
    Ok(exp == star)
}

/// Negative-side series.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NegSide {
    /// `Z⁻_⧢` over X, coordinates `ζ_⧢` of negative indices.
    Shuffle,
    /// `Z⁻_γ` over Y, coordinates `γ` of negative indices.
    Gamma,
}

/// `Z⁻_γ = Π↘ exp(γ⁻(Σ_l) Π_l)` or `Z⁻_⧢ = Π↘ exp(ζ⁻_⧢(S_l) P_l)`, where a
/// Y word `y_{s1}…y_{sr}` stands for the negative multi-index `(−s1,…,−sr)`.
pub fn build_zneg(side: NegSide, n: usize) -> Result<TruncatedSeries<Q>> {
    if n == 0 || n > 6 {
        return Err(Error::Domain("negative-side series are built for 1 <= n <= 6".into()));
    }
    let (kind, value): (BasisKind, fn(&Word) -> Result<Q>) = match side {
        NegSide::Gamma => (BasisKind::StuffleY, negalog::gamma_neg),
        NegSide::Shuffle => (BasisKind::ShuffleX, negalog::zeta_sh_neg),
    };
    let pair = pbw_basis(kind, n)?;
    let mut coords = BTreeMap::new();
    for l in pair.lyndon()? {
        let mut c = qi(0);
        for (w, k) in pair.upper[&l].terms() {
            // shuffle side: only words ending in x1 have a Y image
            let y = match kind {
                BasisKind::ShuffleX => match w.pi_y()? {
                    Some(u) => u,
                    None => continue,
                },
                _ => w.clone(),
            };
            c += k * value(&y)?;
        }
        coords.insert(l, c);
    }
    let s = assemble_group_like(&coords, &pair, n)?;
    debug_assert!(s.constant_term().is_one());
    Ok(TruncatedSeries::new(s, n))
}

/// Lyndon words of every weight `<= n` on one side, in the miner's symbol form.
pub fn lyndon_symbols(side: Side, n: usize) -> Result<Vec<Symbol>> {
    Ok(match side {
        Side::Y => lyndon_words(Alphabet::Y, n)?.into_iter().filter(|l| l.indices() != [1]).map(Symbol::ZetaY).collect(),
        Side::X => lyndon_words(Alphabet::X, n)?.into_iter().filter(|l| l.len() >= 2).map(Symbol::ZetaX).collect(),
    })
}
