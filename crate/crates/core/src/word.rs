//! Finite words over `Σ_k = {1, …, k}` and the elementary queries on them.
//!
//! Letters are stored as `u8`, so alphabets have at most 255 letters. The
//! alphabet size always travels with the word: a word over `Σ_5` may use only
//! three of its letters.

use std::collections::{BTreeSet, HashSet};
use std::fmt;
use std::str::FromStr;

use num_rational::Ratio;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

pub type Letter = u8;

#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Word {
    letters: Vec<Letter>,
    k: usize,
}

impl Word {
    pub fn new(letters: Vec<Letter>, k: usize) -> Result<Self> {
        check_alphabet(k)?;
        if let Some(&bad) = letters.iter().find(|&&a| a == 0 || a as usize > k) {
            return Err(Error::LetterOutOfRange { letter: bad as u32, k });
        }
        Ok(Word { letters, k })
    }

    pub fn empty(k: usize) -> Result<Self> {
        Word::new(Vec::new(), k)
    }

    /// Parses the word text format: a digit string when every token is a
    /// single digit, otherwise whitespace-separated decimal letters.
    pub fn parse(text: &str, k: usize) -> Result<Self> {
        check_alphabet(k)?;
        let text = text.trim();
        let mut letters = Vec::new();
        if text.contains(char::is_whitespace) || text.contains(',') {
            for tok in text.split(|c: char| c.is_whitespace() || c == ',') {
                if tok.is_empty() {
                    continue;
                }
                let v: u32 = tok
                    .parse()
                    .map_err(|_| Error::Parse(format!("bad letter `{tok}`")))?;
                letters.push(to_letter(v, k)?);
            }
        } else {
            for c in text.chars() {
                let v = c
                    .to_digit(10)
                    .ok_or_else(|| Error::Parse(format!("bad character `{c}`")))?;
                letters.push(to_letter(v, k)?);
            }
        }
        Ok(Word { letters, k })
    }

    pub(crate) fn from_trusted(letters: Vec<Letter>, k: usize) -> Self {
        debug_assert!(letters.iter().all(|&a| a >= 1 && a as usize <= k));
        Word { letters, k }
    }

    pub fn letters(&self) -> &[Letter] {
        &self.letters
    }

    pub fn into_letters(self) -> Vec<Letter> {
        self.letters
    }

    pub fn alphabet_size(&self) -> usize {
        self.k
    }

    pub fn len(&self) -> usize {
        self.letters.len()
    }

    pub fn is_empty(&self) -> bool {
        self.letters.is_empty()
    }

    /// The factor of length `len` starting at `start`.
    pub fn factor(&self, start: usize, len: usize) -> Word {
        Word::from_trusted(self.letters[start..start + len].to_vec(), self.k)
    }

    pub fn prefix(&self, len: usize) -> Word {
        self.factor(0, len.min(self.len()))
    }

    pub fn reverse(&self) -> Word {
        let mut letters = self.letters.clone();
        letters.reverse();
        Word::from_trusted(letters, self.k)
    }

    pub fn concat(&self, other: &Word) -> Word {
        let mut letters = self.letters.clone();
        letters.extend_from_slice(&other.letters);
        Word::from_trusted(letters, self.k.max(other.k))
    }

    /// Number of distinct letters occurring in the word.
    pub fn distinct_letters(&self) -> usize {
        let mut seen = [false; 256];
        self.letters.iter().for_each(|&a| seen[a as usize] = true);
        seen.iter().filter(|&&s| s).count()
    }

    pub fn count(&self, letter: Letter) -> usize {
        self.letters.iter().filter(|&&a| a == letter).count()
    }

    /// Same letters, reinterpreted over a (larger) alphabet.
    pub fn with_alphabet(&self, k: usize) -> Result<Word> {
        Word::new(self.letters.clone(), k)
    }
}

fn check_alphabet(k: usize) -> Result<()> {
    if k == 0 || k > 255 {
        return Err(Error::AlphabetSize(k));
    }
    Ok(())
}

fn to_letter(v: u32, k: usize) -> Result<Letter> {
    if v == 0 || v as usize > k {
        return Err(Error::LetterOutOfRange { letter: v, k });
    }
    Ok(v as Letter)
}

/// Serialized as its text rendering.
impl Serialize for Word {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl fmt::Display for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&letters_to_text(&self.letters, self.k))
    }
}

impl fmt::Debug for Word {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Word({:?}/{})", self.to_string(), self.k)
    }
}

/// Renders letters in the word text format chosen by alphabet size.
pub fn letters_to_text(letters: &[Letter], k: usize) -> String {
    if k <= 9 {
        letters.iter().map(|&a| char::from(b'0' + a)).collect()
    } else {
        letters
            .iter()
            .map(|a| a.to_string())
            .collect::<Vec<_>>()
            .join(" ")
    }
}

/// All distinct factors of `w` of length exactly `len`.
pub fn factor_set(w: &Word, len: usize) -> BTreeSet<Word> {
    if len == 0 {
        return BTreeSet::from([Word::from_trusted(Vec::new(), w.k)]);
    }
    w.letters
        .windows(len)
        .map(|x| Word::from_trusted(x.to_vec(), w.k))
        .collect()
}

/// Largest `L <= cap` such that some length-`L` factor of `w` has its
/// reversal as a factor too. A return value of `cap` means "at least `cap`".
pub fn max_reversible_factor_length(w: &Word, cap: usize) -> usize {
    reversible_bound(w.letters(), cap)
}

pub(crate) fn has_reversible_factor(text: &[Letter], len: usize) -> bool {
    if len == 0 {
        return true;
    }
    if len > text.len() {
        return false;
    }
    let forward: HashSet<&[Letter]> = text.windows(len).collect();
    let mut buf = vec![0; len];
    text.windows(len).any(|x| {
        buf.copy_from_slice(x);
        buf.reverse();
        forward.contains(buf.as_slice())
    })
}

pub(crate) fn reversible_bound(text: &[Letter], cap: usize) -> usize {
    // Reversibility is inherited by factors, so the lengths with a reversible
    // factor form an initial segment.
    let (mut lo, mut hi) = (0usize, cap.min(text.len()));
    while lo < hi {
        let mid = (lo + hi).div_ceil(2);
        if has_reversible_factor(text, mid) {
            lo = mid;
        } else {
            hi = mid - 1;
        }
    }
    lo
}

/// Letter-wise pairing of two equal-length words.
///
/// The pair `(a, b)` is renumbered as `(a - 1) * k_v + b`, giving a word over
/// `Σ_{k_u · k_v}`.
pub fn direct_product(u: &Word, v: &Word) -> Result<Word> {
    if u.len() != v.len() {
        return Err(Error::LengthMismatch { left: u.len(), right: v.len() });
    }
    let k = u.k * v.k;
    check_alphabet(k)?;
    let letters = u
        .letters
        .iter()
        .zip(&v.letters)
        .map(|(&a, &b)| ((a as usize - 1) * v.k + b as usize) as Letter)
        .collect();
    Ok(Word::from_trusted(letters, k))
}

/// Inverse of the product renumbering: `(letter of u, letter of v)`.
pub fn split_product_letter(letter: Letter, k_v: usize) -> (Letter, Letter) {
    let c = letter as usize - 1;
    ((c / k_v + 1) as Letter, (c % k_v + 1) as Letter)
}

/// Both distinct-letter window properties used by the ternary encoding:
/// every length `k-2` factor has `k-2` distinct letters and every length `k`
/// factor has at least `k-1` distinct letters.
pub fn window_properties(w: &Word, k: usize) -> bool {
    first_window_violation(w.letters(), k).is_none()
}

/// Index of the last letter of the first window (by end position) that breaks
/// a window property.
pub(crate) fn first_window_violation(text: &[Letter], k: usize) -> Option<usize> {
    assert!(k >= 3, "window properties need k >= 3");
    let mut last_seen = [usize::MAX; 256];
    for (i, &a) in text.iter().enumerate() {
        // Every length-(k-2) window is distinct iff no letter recurs within
        // distance k-3.
        let prev = last_seen[a as usize];
        if prev != usize::MAX && i - prev < k - 2 {
            return Some(i);
        }
        last_seen[a as usize] = i;
        if i + 1 >= k {
            let mut seen = [false; 256];
            let distinct = text[i + 1 - k..=i]
                .iter()
                .filter(|&&b| !std::mem::replace(&mut seen[b as usize], true))
                .count();
            if distinct < k - 1 {
                return Some(i);
            }
        }
    }
    None
}

/// An exponent threshold: `α`-free (`strict == false`, forbids exponents
/// `>= α`) or `α⁺`-free (`strict == true`, forbids exponents `> α`).
#[derive(Clone, Copy, PartialEq, Eq, Hash, Debug, Serialize, Deserialize)]
pub struct Threshold {
    #[serde(with = "ratio_string")]
    alpha: Ratio<u64>,
    strict: bool,
}

impl Threshold {
    pub fn new(num: u64, den: u64, strict: bool) -> Result<Self> {
        if den == 0 {
            return Err(Error::InvalidThreshold("zero denominator".into()));
        }
        let alpha = Ratio::new(num, den);
        if alpha <= Ratio::from_integer(1) || alpha > Ratio::from_integer(2) {
            return Err(Error::InvalidThreshold(format!("{alpha} is not in (1, 2]")));
        }
        Ok(Threshold { alpha, strict })
    }

    /// Parses an exact fraction `P/Q` (or an integer). Decimals are rejected.
    pub fn parse(text: &str, strict: bool) -> Result<Self> {
        let text = text.trim();
        let (num, den) = match text.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (text, "1"),
        };
        let parse = |s: &str| {
            s.parse::<u64>()
                .map_err(|_| Error::InvalidThreshold(format!("`{text}` is not an exact fraction P/Q")))
        };
        Threshold::new(parse(num)?, parse(den)?, strict)
    }

    /// The threshold `(k-1)/(k-2)` governing `k` letters.
    pub fn dejean_like(k: usize, strict: bool) -> Result<Self> {
        if k < 4 {
            return Err(Error::Unsupported(format!("(k-1)/(k-2) needs k >= 4, got {k}")));
        }
        Threshold::new(k as u64 - 1, k as u64 - 2, strict)
    }

    pub fn alpha(&self) -> Ratio<u64> {
        self.alpha
    }

    pub fn is_strict(&self) -> bool {
        self.strict
    }

    /// Whether an exponent is forbidden under this threshold.
    pub fn forbids(&self, exponent: Ratio<u64>) -> bool {
        if self.strict {
            exponent > self.alpha
        } else {
            exponent >= self.alpha
        }
    }

    /// Whether a repetition with period `p` and excess `e` is forbidden.
    pub fn is_violated(&self, period: usize, excess: usize) -> bool {
        let (a, b) = (*self.alpha.numer() as u128, *self.alpha.denom() as u128);
        let (p, e) = (period as u128, excess as u128);
        if self.strict {
            b * (p + e) > a * p
        } else {
            b * (p + e) >= a * p
        }
    }

    /// Smallest excess that is forbidden at the given period (may exceed the
    /// period, in which case nothing is forbidden there).
    pub fn min_excess(&self, period: usize) -> usize {
        let (a, b) = (*self.alpha.numer() as u128, *self.alpha.denom() as u128);
        let gap = period as u128 * (a - b);
        let e = if self.strict { gap / b + 1 } else { gap.div_ceil(b) };
        (e as usize).max(1)
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}{}", self.alpha, if self.strict { "+" } else { "" })
    }
}

impl FromStr for Threshold {
    type Err = Error;

    /// `P/Q` for the non-strict threshold, `P/Q+` for the strict one.
    fn from_str(s: &str) -> Result<Self> {
        match s.trim().strip_suffix('+') {
            Some(body) => Threshold::parse(body, true),
            None => Threshold::parse(s, false),
        }
    }
}

pub(crate) mod ratio_string {
    use num_rational::Ratio;
    use serde::{Deserialize, Deserializer, Serializer};

    pub fn serialize<S: Serializer>(r: &Ratio<u64>, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&format!("{}/{}", r.numer(), r.denom()))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Ratio<u64>, D::Error> {
        let text = String::deserialize(d)?;
        let (n, q) = text.split_once('/').unwrap_or((&text, "1"));
        let n = n.parse().map_err(serde::de::Error::custom)?;
        let q: u64 = q.parse().map_err(serde::de::Error::custom)?;
        if q == 0 {
            return Err(serde::de::Error::custom("zero denominator"));
        }
        Ok(Ratio::new(n, q))
    }
}
