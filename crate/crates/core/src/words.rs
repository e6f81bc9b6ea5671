//! Alphabets, words, the lexicographic orders used throughout, and Lyndon words.
//!
//! Three alphabets are supported:
//! * `X = {x0 < x1}`, graded by length;
//! * `Y = {y1 > y2 > ...}`, graded by weight (sum of indices);
//! * `Y0 = {y0 > y1 > ...}`, the same order extended to index 0.
//!
//! On `Y` the letter order is reversed with respect to the index, so the
//! lexicographic order on words compares indices in decreasing order.

use std::cmp::Ordering;
use std::fmt;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Alphabet {
    X,
    Y,
    Y0,
}

impl Alphabet {
    pub fn min_index(self) -> u8 {
        match self {
            Alphabet::X | Alphabet::Y0 => 0,
            Alphabet::Y => 1,
        }
    }

    pub fn max_index(self) -> Option<u8> {
        match self {
            Alphabet::X => Some(1),
            _ => None,
        }
    }

    pub fn is_y(self) -> bool {
        matches!(self, Alphabet::Y | Alphabet::Y0)
    }

    pub fn name(self) -> &'static str {
        match self {
            Alphabet::X => "X",
            Alphabet::Y => "Y",
            Alphabet::Y0 => "Y0",
        }
    }

    /// Compare two letter indices according to the alphabet order.
    #[inline]
    pub fn cmp_letters(self, a: u8, b: u8) -> Ordering {
        match self {
            Alphabet::X => a.cmp(&b),
            _ => b.cmp(&a),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct Letter {
    pub alphabet: Alphabet,
    pub index: u8,
}

impl Letter {
    pub fn new(alphabet: Alphabet, index: u8) -> Result<Self> {
        if index < alphabet.min_index() || alphabet.max_index().is_some_and(|m| index > m) {
            return Err(Error::InvalidLetter(format!(
                "index {index} is not a letter of {}",
                alphabet.name()
            )));
        }
        Ok(Letter { alphabet, index })
    }

    pub fn x(i: u8) -> Self {
        Letter::new(Alphabet::X, i).expect("x0 or x1")
    }

    pub fn y(i: u8) -> Self {
        Letter::new(Alphabet::Y, i).expect("y_k with k >= 1")
    }
}

impl fmt::Display for Letter {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.alphabet {
            Alphabet::X => write!(f, "x{}", self.index),
            _ => write!(f, "y{}", self.index),
        }
    }
}

/// A word over a single alphabet. Letters are stored as raw indices.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Word {
    alphabet: Alphabet,
    letters: Vec<u8>,
}

impl Word {
    pub fn new(alphabet: Alphabet, letters: Vec<u8>) -> Result<Self> {
        for &i in &letters {
            Letter::new(alphabet, i)?;
        }
        Ok(Word { alphabet, letters })
    }

    /// Construct without range checks. Callers guarantee validity.
    pub(crate) fn from_raw(alphabet: Alphabet, letters: Vec<u8>) -> Self {
        Word { alphabet, letters }
    }

    pub fn empty(alphabet: Alphabet) -> Self {
        Word { alphabet, letters: Vec::new() }
    }

    pub fn letter(l: Letter) -> Self {
        Word { alphabet: l.alphabet, letters: vec![l.index] }
    }

    pub fn x(letters: &[u8]) -> Self {
        Word::new(Alphabet::X, letters.to_vec()).expect("valid X word")
    }

    pub fn y(letters: &[u8]) -> Self {
        Word::new(Alphabet::Y, letters.to_vec()).expect("valid Y word")
    }

    pub fn y0(letters: &[u8]) -> Self {
        Word::new(Alphabet::Y0, letters.to_vec()).expect("valid Y0 word")
    }

    /// Parse the text syntax: X words as strings over `{0,1}` (`"001"`),
    /// Y words as space separated indices (`"2 1"`), `"e"` for the empty word.
    pub fn parse(alphabet: Alphabet, text: &str) -> Result<Self> {
        let t = text.trim();
        if t == "e" || t.is_empty() {
            return Ok(Word::empty(alphabet));
        }
        let letters: Vec<u8> = match alphabet {
            Alphabet::X => t
                .chars()
                .filter(|c| !c.is_whitespace())
                .map(|c| match c {
                    '0' => Ok(0),
                    '1' => Ok(1),
                    _ => Err(Error::Parse(format!("bad X letter '{c}' in \"{text}\""))),
                })
                .collect::<Result<_>>()?,
            _ => t
                .split(|c: char| c.is_whitespace() || c == ',')
                .filter(|s| !s.is_empty())
                .map(|s| {
                    s.trim_start_matches('y')
                        .parse::<u8>()
                        .map_err(|_| Error::Parse(format!("bad Y letter \"{s}\" in \"{text}\"")))
                })
                .collect::<Result<_>>()?,
        };
        Word::new(alphabet, letters)
    }

    /// Inverse of [`Word::parse`].
    pub fn to_text(&self) -> String {
        if self.letters.is_empty() {
            return "e".into();
        }
        match self.alphabet {
            Alphabet::X => self.letters.iter().map(|i| char::from(b'0' + i)).collect(),
            _ => join(self.letters.iter().map(|i| i.to_string()), " "),
        }
    }

    /// Letters joined by `sep`, e.g. `y2 y1` or `x0.x1`; `1` for the empty word.
    pub fn render(&self, sep: &str) -> String {
        if self.letters.is_empty() {
            return "1".into();
        }
        join(self.letters().map(|l| l.to_string()), sep)
    }

    pub fn alphabet(&self) -> Alphabet {
        self.alphabet
    }

    pub fn indices(&self) -> &[u8] {
        &self.letters
    }

    pub fn letters(&self) -> impl Iterator<Item = Letter> + '_ {
        let a = self.alphabet;
        self.letters.iter().map(move |&index| Letter { alphabet: a, index })
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// Grade: length on X, sum of indices on Y and Y0.
    pub fn weight(&self) -> usize {
        match self.alphabet {
            Alphabet::X => self.letters.len(),
            _ => self.letters.iter().map(|&i| i as usize).sum(),
        }
    }

    /// The grade used for truncation. Same as [`Word::weight`].
    pub fn grade(&self) -> usize {
        self.weight()
    }

    pub fn concat(&self, other: &Word) -> Word {
        debug_assert_eq!(self.alphabet, other.alphabet);
        let mut letters = Vec::with_capacity(self.len() + other.len());
        letters.extend_from_slice(&self.letters);
        letters.extend_from_slice(&other.letters);
        Word { alphabet: self.alphabet, letters }
    }

    pub fn slice(&self, from: usize, to: usize) -> Word {
        Word { alphabet: self.alphabet, letters: self.letters[from..to].to_vec() }
    }

    pub fn first(&self) -> Option<u8> {
        self.letters.first().copied()
    }

    pub fn last(&self) -> Option<u8> {
        self.letters.last().copied()
    }

    pub fn pow(&self, n: usize) -> Word {
        Word { alphabet: self.alphabet, letters: self.letters.repeat(n) }
    }

    pub fn with_alphabet(&self, alphabet: Alphabet) -> Result<Word> {
        Word::new(alphabet, self.letters.clone())
    }

    pub fn is_lyndon(&self) -> bool {
        is_lyndon_slice(self.alphabet, &self.letters)
    }

    /// Chen-Fox-Lyndon factorization `w = l1^i1 ... lk^ik`, `l1 > ... > lk`.
    pub fn lyndon_factorization(&self) -> Vec<(Word, usize)> {
        let mut out: Vec<(Word, usize)> = Vec::new();
        for (a, b) in duval(self.alphabet, &self.letters) {
            let w = self.slice(a, b);
            match out.last_mut() {
                Some((last, k)) if *last == w => *k += 1,
                _ => out.push((w, 1)),
            }
        }
        out
    }

    /// Standard factorization `l = l1 l2` with `l2` the longest proper Lyndon suffix.
    pub fn standard_factorization(&self) -> Result<(Word, Word)> {
        if self.len() < 2 || !self.is_lyndon() {
            return Err(Error::NotLyndon(self.to_string()));
        }
        for i in 1..self.len() {
            if is_lyndon_slice(self.alphabet, &self.letters[i..]) {
                return Ok((self.slice(0, i), self.slice(i, self.len())));
            }
        }
        unreachable!("the last letter is always a Lyndon suffix")
    }

    /// `pi_X(y_{s1}...y_{sr}) = x0^{s1-1}x1 ... x0^{sr-1}x1`.
    pub fn pi_x(&self) -> Result<Word> {
        match self.alphabet {
            Alphabet::Y => {
                let mut letters = Vec::with_capacity(self.weight());
                for &s in &self.letters {
                    letters.extend(std::iter::repeat(0).take(s as usize - 1));
                    letters.push(1);
                }
                Ok(Word { alphabet: Alphabet::X, letters })
            }
            a => Err(Error::AlphabetMismatch(format!("pi_X expects a Y word, got {}", a.name()))),
        }
    }

    /// One-sided inverse of `pi_X`; `None` stands for the zero polynomial
    /// (words ending in `x0`).
    pub fn pi_y(&self) -> Result<Option<Word>> {
        if self.alphabet != Alphabet::X {
            return Err(Error::AlphabetMismatch("pi_Y expects an X word".into()));
        }
        if self.letters.last() == Some(&0) {
            return Ok(None);
        }
        let mut letters = Vec::new();
        let mut run = 1u8;
        for &l in &self.letters {
            if l == 0 {
                run += 1;
            } else {
                letters.push(run);
                run = 1;
            }
        }
        Ok(Some(Word { alphabet: Alphabet::Y, letters }))
    }
}

fn join<I: Iterator<Item = String>>(it: I, sep: &str) -> String {
    it.collect::<Vec<_>>().join(sep)
}

impl Ord for Word {
    fn cmp(&self, other: &Self) -> Ordering {
        self.alphabet
            .cmp(&other.alphabet)
            .then_with(|| cmp_slices(self.alphabet, &self.letters, &other.letters))
    }
}

impl PartialOrd for Word {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.render(" "))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}[{}]", self.alphabet.name(), self.render(" "))
    }
}

/// Lexicographic comparison (a proper prefix is smaller).
pub fn cmp_slices(a: Alphabet, u: &[u8], v: &[u8]) -> Ordering {
    for (&x, &y) in u.iter().zip(v) {
        match a.cmp_letters(x, y) {
            Ordering::Equal => {}
            o => return o,
        }
    }
    u.len().cmp(&v.len())
}

/// Duval's test: `w` is Lyndon iff it is nonempty and a single Duval block.
fn is_lyndon_slice(a: Alphabet, w: &[u8]) -> bool {
    if w.is_empty() {
        return false;
    }
    let blocks = duval(a, w);
    blocks.len() == 1
}

/// Duval's algorithm; returns the factor boundaries of the CFL factorization.
fn duval(a: Alphabet, s: &[u8]) -> Vec<(usize, usize)> {
    let n = s.len();
    let mut out = Vec::new();
    let mut i = 0;
    while i < n {
        let (mut j, mut k) = (i + 1, i);
        while j < n {
            match a.cmp_letters(s[k], s[j]) {
                Ordering::Less => k = i,
                Ordering::Equal => k += 1,
                Ordering::Greater => break,
            }
            j += 1;
        }
        while i <= k {
            out.push((i, i + j - k));
            i += j - k;
        }
    }
    out
}

/// Lyndon words over X of length `1..=n`, generated by Duval's successor
/// algorithm, in increasing lexicographic order.
fn lyndon_x(n: usize) -> Vec<Word> {
    let mut out = Vec::new();
    if n == 0 {
        return out;
    }
    let mut w: Vec<u8> = vec![0];
    loop {
        out.push(Word::from_raw(Alphabet::X, w.clone()));
        // extend periodically to length n, then strip trailing maximal letters
        let m = w.len();
        for i in m..n {
            let c = w[i % m];
            w.push(c);
        }
        while w.last() == Some(&1) {
            w.pop();
        }
        match w.last_mut() {
            None => break,
            Some(c) => *c += 1,
        }
    }
    out
}

/// Lyndon words of grade `<= grade_bound`, sorted lexicographically.
///
/// On Y the grade is the weight; the list is obtained from the X words through
/// the order embedding `pi_X`, which maps Lyndon words on Y bijectively onto
/// Lyndon words on X other than `x0`.
pub fn lyndon_words(alphabet: Alphabet, grade_bound: usize) -> Result<Vec<Word>> {
    if grade_bound == 0 {
        return Err(Error::Domain("grade bound must be at least 1".into()));
    }
    match alphabet {
        Alphabet::X => Ok(lyndon_x(grade_bound)),
        Alphabet::Y => Ok(lyndon_x(grade_bound)
            .into_iter()
            .filter_map(|w| w.pi_y().ok().flatten())
            .collect()),
        Alphabet::Y0 => Err(Error::Domain(
            "Y0 has a letter of weight 0, so a weight bound does not make the set finite".into(),
        )),
    }
}

/// Lyndon words of grade exactly `g`.
pub fn lyndon_words_of_grade(alphabet: Alphabet, g: usize) -> Result<Vec<Word>> {
    Ok(lyndon_words(alphabet, g)?.into_iter().filter(|w| w.grade() == g).collect())
}

/// All words of grade exactly `g`, sorted lexicographically.
///
/// On X these are the `2^g` words of length `g`; on Y they are the
/// compositions of `g`.
pub fn words_of_grade(alphabet: Alphabet, g: usize) -> Result<Vec<Word>> {
    let mut out = match alphabet {
        Alphabet::X => (0..1usize << g)
            .map(|bits| {
                let letters = (0..g).map(|i| ((bits >> (g - 1 - i)) & 1) as u8).collect();
                Word::from_raw(Alphabet::X, letters)
            })
            .collect::<Vec<_>>(),
        Alphabet::Y => compositions(g)
            .into_iter()
            .map(|c| Word::from_raw(Alphabet::Y, c))
            .collect(),
        Alphabet::Y0 => {
            return Err(Error::Domain("Y0 words of fixed weight are infinitely many".into()))
        }
    };
    out.sort();
    Ok(out)
}

/// All words of grade `1..=n` (the empty word is not included).
pub fn words_up_to(alphabet: Alphabet, n: usize) -> Result<Vec<Word>> {
    let mut out = Vec::new();
    for g in 1..=n {
        out.extend(words_of_grade(alphabet, g)?);
    }
    Ok(out)
}

/// Compositions of `n` (ordered sequences of positive parts).
pub fn compositions(n: usize) -> Vec<Vec<u8>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::with_capacity(1 << (n - 1));
    for mask in 0..(1usize << (n - 1)) {
        let mut parts = Vec::new();
        let mut cur = 1u8;
        for i in 0..n - 1 {
            if mask >> i & 1 == 1 {
                parts.push(cur);
                cur = 1;
            } else {
                cur += 1;
            }
        }
        parts.push(cur);
        out.push(parts);
    }
    out
}
