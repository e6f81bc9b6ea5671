//! Floating-point evaluation of convergent nested sums, and numeric checks of
//! mined relations.
//!
//! Everything here is plain truncation: `Σ_{n1 ≤ T}` with an analytic bound
//! on the discarded tail. Exact pipelines never see a float; `harmonic`
//! returns rationals.

use std::collections::HashMap;

use crate::bridge::{build_zsh, MinerReport, RelationRule, Side};
use crate::bases::{pbw_basis, BasisKind, DualBasisPair};
use crate::coeff::{Poly, Symbol, Q};
use crate::error::{Error, Result};
use crate::negalog;
use crate::words::{Alphabet, Word};

/// Summation settings.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct NumericConfig {
    /// Cutoff `T` on the outermost summation index.
    pub terms: usize,
    pub tol: f64,
    /// Above 53 the running sums are compensated (about 106 bits).
    pub precision_bits: u32,
}

impl Default for NumericConfig {
    fn default() -> Self {
        NumericConfig { terms: 100_000, tol: 1e-3, precision_bits: 64 }
    }
}

impl NumericConfig {
    pub fn validate(&self) -> Result<()> {
        if !(self.tol > 0.0 && self.tol.is_finite()) {
            return Err(Error::Precondition(format!("tolerance must be positive, got {}", self.tol)));
        }
        if self.terms < 1000 {
            return Err(Error::Precondition(format!("term bound must be at least 1000, got {}", self.terms)));
        }
        if !(24..=106).contains(&self.precision_bits) {
            return Err(Error::Precondition(format!(
                "working precision must be 24..=106 bits, got {}",
                self.precision_bits
            )));
        }
        Ok(())
    }

    fn compensated(&self) -> bool {
        self.precision_bits > 53
    }
}

/// Running sum, Neumaier-compensated on request.
#[derive(Clone, Copy, Debug, Default)]
struct Acc {
    s: f64,
    c: f64,
}

impl Acc {
    #[inline]
    fn add(&mut self, x: f64, compensated: bool) {
        if !compensated {
            self.s += x;
            return;
        }
        let t = self.s + x;
        if self.s.abs() >= x.abs() {
            self.c += (self.s - t) + x;
        } else {
            self.c += (x - t) + self.s;
        }
        self.s = t;
    }

    #[inline]
    fn value(&self) -> f64 {
        self.s + self.c
    }
}

/// A truncated value with a bound on what truncation and rounding left out.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Approx {
    pub value: f64,
    pub error: f64,
}

/// `Σ_{n1>…>nr>0, n1 ≤ T} z^{n1} n1^{-s1}…nr^{-sr}` in one pass, keeping one
/// accumulator per depth.
fn nested_sum(s: &[u8], z: f64, terms: usize, compensated: bool) -> f64 {
    let r = s.len();
    if r == 0 {
        return 1.0;
    }
    // acc[k] = Σ over n_k ≤ n of the sum of depths k..r
    let mut acc = vec![Acc::default(); r];
    let mut zn = 1.0;
    for n in 1..=terms {
        let nf = n as f64;
        zn *= z;
        // Outermost first, so acc[k+1] still holds its value at n - 1.
        for k in 0..r {
            let inner = if k + 1 < r { acc[k + 1].value() } else { 1.0 };
            if inner == 0.0 {
                continue;
            }
            let mut t = inner / nf.powi(s[k] as i32);
            if k == 0 {
                t *= zn;
            }
            acc[k].add(t, compensated);
        }
    }
    acc[0].value()
}

fn check_indices(s: &[u8]) -> Result<()> {
    if s.is_empty() {
        return Err(Error::Precondition("empty index".into()));
    }
    if s.contains(&0) {
        return Err(Error::Precondition(format!("indices must be positive: {s:?}")));
    }
    Ok(())
}

/// `∫_T^∞ (1 + ln x)^m x^{-s} dx / m!`, which dominates the tail of a depth
/// `m + 1` sum with leading index `s`.
fn tail_bound(s: u8, m: usize, terms: usize) -> Result<f64> {
    let l = (terms as f64).ln();
    // The integrand must decrease on [T, ∞) for the integral to dominate the sum.
    if m as f64 >= s as f64 * (1.0 + l) {
        return Err(Error::Precondition(format!("depth {} too large for a tail bound at T = {terms}", m + 1)));
    }
    let a = (s - 1) as f64;
    let mut sum = 0.0;
    let mut falling = 1.0;
    for j in 0..=m {
        sum += falling * (1.0 + l).powi((m - j) as i32) / a.powi(j as i32 + 1);
        falling *= (m - j) as f64;
    }
    let mfact: f64 = (1..=m).map(|i| i as f64).product();
    Ok((-a * l).exp() * sum / mfact)
}

/// Multiple zeta value `ζ(s1,…,sr)` truncated at `n1 ≤ cfg.terms`.
pub fn mzv(s: &[u8], cfg: &NumericConfig) -> Result<Approx> {
    check_indices(s)?;
    if s[0] == 1 {
        return Err(Error::Domain(format!("divergent index {s:?}: leading entry must be at least 2")));
    }
    let t = cfg.terms;
    let value = nested_sum(s, 1.0, t, cfg.compensated());
    let rounding = if cfg.compensated() { 4.0 } else { 2.0 * (t * s.len()) as f64 } * f64::EPSILON * value;
    Ok(Approx { value, error: tail_bound(s[0], s.len() - 1, t)? + rounding })
}

/// `ζ` of a convergent word: `y_{s1}…y_{sr}`, or an X word read through `π_Y`.
pub fn mzv_word(w: &Word, cfg: &NumericConfig) -> Result<Approx> {
    match w.alphabet() {
        Alphabet::X => match w.pi_y()? {
            Some(y) => mzv(y.indices(), cfg),
            None => Err(Error::Domain(format!("divergent word {w}: ends in x0"))),
        },
        _ => mzv(w.indices(), cfg),
    }
}

/// Multiple polylogarithm `Li_{s1,…,sr}(z)` for real `|z| < 1`.
pub fn polylog(s: &[u8], z: f64, cfg: &NumericConfig) -> Result<f64> {
    check_indices(s)?;
    if !(z.abs() < 1.0) {
        return Err(Error::Domain(format!("|z| must be below 1, got {z}")));
    }
    Ok(nested_sum(s, z, cfg.terms, cfg.compensated()))
}

/// Exact `H_s(n) = Σ_{n ≥ n1 > … > nr > 0} n1^{-s1}…nr^{-sr}`.
pub fn harmonic(s: &[u8], n: usize) -> Result<Q> {
    check_indices(s)?;
    negalog::harmonic_exact(&Word::y(s), n)
}

/// Euler's constant from `H_T − ln T` with the first Euler–Maclaurin corrections.
pub fn euler_gamma(cfg: &NumericConfig) -> Approx {
    let t = cfg.terms as f64;
    let value = nested_sum(&[1], 1.0, cfg.terms, cfg.compensated()) - t.ln() - 1.0 / (2.0 * t)
        + 1.0 / (12.0 * t * t)
        - 1.0 / (120.0 * t.powi(4));
    Approx { value, error: 1.0 / (252.0 * t.powi(6)) + 4.0 * t * f64::EPSILON }
}

/// Numeric values of coordinate symbols, cached by word.
pub struct Evaluator {
    cfg: NumericConfig,
    words: HashMap<Word, Approx>,
    bases: HashMap<(BasisKind, usize), DualBasisPair>,
    gamma: Approx,
}

impl Evaluator {
    pub fn new(cfg: NumericConfig) -> Result<Self> {
        cfg.validate()?;
        Ok(Evaluator { cfg, words: HashMap::new(), bases: HashMap::new(), gamma: euler_gamma(&cfg) })
    }

    pub fn config(&self) -> &NumericConfig {
        &self.cfg
    }

    pub fn word(&mut self, w: &Word) -> Result<Approx> {
        if let Some(a) = self.words.get(w) {
            return Ok(*a);
        }
        let a = mzv_word(w, &self.cfg)?;
        self.words.insert(w.clone(), a);
        Ok(a)
    }

    /// `ζ(Σ_l)` or `ζ(S_l)`: expand the dual basis element into words.
    pub fn symbol(&mut self, s: &Symbol) -> Result<Approx> {
        let (kind, l) = match s {
            Symbol::Gamma => return Ok(self.gamma),
            Symbol::T => return Err(Error::Domain("t has no numeric value".into())),
            Symbol::ZetaY(l) => (BasisKind::StuffleY, l),
            Symbol::ZetaX(l) => (BasisKind::ShuffleX, l),
        };
        let n = l.weight();
        if !self.bases.contains_key(&(kind, n)) {
            self.bases.insert((kind, n), pbw_basis(kind, n)?);
        }
        let upper = self.bases[&(kind, n)]
            .upper(l)
            .cloned()
            .ok_or_else(|| Error::Domain(format!("{l} is not a Lyndon word")))?;
        let mut out = Approx { value: 0.0, error: 0.0 };
        for (w, c) in upper.terms() {
            let a = self.word(w)?;
            let c = crate::coeff::q_to_f64(c);
            out.value += c * a.value;
            out.error += c.abs() * a.error;
        }
        Ok(out)
    }

    /// Value of a polynomial in coordinate symbols, with a first-order error bound.
    pub fn poly(&mut self, p: &Poly) -> Result<Approx> {
        let mut vals: HashMap<Symbol, Approx> = HashMap::new();
        for s in p.symbols() {
            let a = self.symbol(&s)?;
            vals.insert(s, a);
        }
        let mut out = Approx { value: 0.0, error: 0.0 };
        for (m, c) in p.terms() {
            let c = crate::coeff::q_to_f64(c);
            let mut v = c;
            let mut rel = 0.0;
            for (s, e) in m.pairs() {
                let a = vals[s];
                v *= a.value.powi(*e as i32);
                rel += *e as f64 * a.error / a.value.abs().max(f64::MIN_POSITIVE);
            }
            out.value += v;
            out.error += v.abs() * rel;
        }
        Ok(out)
    }
}

/// Numeric check of one rule.
#[derive(Clone, Debug, PartialEq)]
pub struct RuleCheck {
    pub side: Side,
    pub weight: usize,
    pub lhs: Symbol,
    pub rhs: Poly,
    pub lhs_value: f64,
    pub rhs_value: f64,
    pub residual: f64,
    /// Combined truncation bound of both sides.
    pub bound: f64,
    pub pass: bool,
}

pub fn validate_rule(rule: &RelationRule, ev: &mut Evaluator) -> Result<RuleCheck> {
    let l = ev.symbol(&rule.lhs)?;
    let r = ev.poly(&rule.rhs)?;
    let residual = l.value - r.value;
    Ok(RuleCheck {
        side: rule.side,
        weight: rule.weight,
        lhs: rule.lhs.clone(),
        rhs: rule.rhs.clone(),
        lhs_value: l.value,
        rhs_value: r.value,
        residual,
        bound: l.error + r.error,
        pass: residual.abs() <= ev.config().tol,
    })
}

/// Check every rule of weight at most `max_weight` on both sides, Y first.
pub fn validate_relations(report: &MinerReport, max_weight: usize, cfg: &NumericConfig) -> Result<Vec<RuleCheck>> {
    let mut ev = Evaluator::new(*cfg)?;
    let mut out = Vec::new();
    for side in [Side::Y, Side::X] {
        for r in report.rules(side).iter().filter(|r| r.weight <= max_weight) {
            out.push(validate_rule(r, &mut ev)?);
        }
    }
    Ok(out)
}

/// Abel-type limit of one coefficient of `e^{y1 log(1−z)} π_Y(L(z))`.
#[derive(Clone, Debug, PartialEq)]
pub struct AbelReport {
    pub word: Word,
    /// `(z, coefficient at z)` on the grid.
    pub points: Vec<(f64, f64)>,
    /// Linear extrapolation to `z = 1` from the last two grid points.
    pub limit: f64,
    /// `⟨Z_⧢ | π_X w⟩` evaluated numerically.
    pub target: f64,
    pub error: f64,
}

/// Coefficient of `w` in `e^{y1 log(1−z)} π_Y(L(z))`: split off leading `y1`s.
pub fn renormalized_coefficient(w: &Word, z: f64, cfg: &NumericConfig) -> Result<f64> {
    let s = w.indices();
    let lg = (1.0 - z).ln();
    let mut total = 0.0;
    let mut pw = 1.0;
    for k in 0..=s.len() {
        if k > 0 {
            if s[k - 1] != 1 {
                break;
            }
            pw *= lg / k as f64;
        }
        let rest = &s[k..];
        let li = if rest.is_empty() { 1.0 } else { polylog(rest, z, cfg)? };
        total += pw * li;
    }
    Ok(total)
}

pub fn abel_spotcheck(w: &Word, z_grid: &[f64], cfg: &NumericConfig) -> Result<AbelReport> {
    if w.alphabet() != Alphabet::Y {
        return Err(Error::AlphabetMismatch("Abel spot checks take Y words".into()));
    }
    if z_grid.is_empty() {
        return Err(Error::Precondition("empty grid".into()));
    }
    let points = z_grid
        .iter()
        .map(|&z| Ok((z, renormalized_coefficient(w, z, cfg)?)))
        .collect::<Result<Vec<_>>>()?;
    let limit = match points.as_slice() {
        [.., (z1, f1), (z2, f2)] => {
            let (e1, e2) = (1.0 - z1, 1.0 - z2);
            (e1 * f2 - e2 * f1) / (e1 - e2)
        }
        [(_, f)] => *f,
        [] => unreachable!(),
    };
    let zsh = build_zsh(w.weight())?;
    let coeff = zsh.coeff(&w.pi_x()?);
    let target = Evaluator::new(*cfg)?.poly(&coeff)?.value;
    Ok(AbelReport { word: w.clone(), points, limit, target, error: (limit - target).abs() })
}
