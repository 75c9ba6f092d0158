//! The ternary ranking encoding of `k`-ary words and the permutation
//! morphisms `σ` and `τ = σ ∘ g` acting on codes.
//!
//! After a prefix `p`, the ranking `r` lists the letters of `Σ_k` by the index
//! of their final appearance (`r[k]` most recent). The next letter is always
//! one of `r[1], r[2], r[3]`, and its rank is the code letter. Reading code
//! letter `t` updates the ranking by `r ← r ∘ σ(t)`, where `(a ∘ b)(j) =
//! a(b(j))`; so after a code word `c`, `r = r₀ ∘ σ(c)` with
//! `σ(c₁c₂⋯cₙ) = σ(c₁) ∘ σ(c₂) ∘ ⋯ ∘ σ(cₙ)`.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::morphisms::{builtin, BuiltinName};
use crate::word::{first_window_violation, Letter, Word};

/// A bijection on `{1, …, k}` stored by its images.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Permutation {
    image: Vec<Letter>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Parity {
    Even,
    Odd,
}

impl Permutation {
    pub fn identity(k: usize) -> Self {
        Permutation { image: (1..=k as Letter).collect() }
    }

    /// `image[j-1]` is the image of `j`.
    pub fn from_images(image: Vec<Letter>) -> Result<Self> {
        let k = image.len();
        let mut seen = vec![false; k + 1];
        for &a in &image {
            if a == 0 || a as usize > k || std::mem::replace(&mut seen[a as usize], true) {
                return Err(Error::InvalidPermutation(format!("{image:?} is not a bijection on 1..={k}")));
            }
        }
        Ok(Permutation { image })
    }

    pub fn k(&self) -> usize {
        self.image.len()
    }

    pub fn images(&self) -> &[Letter] {
        &self.image
    }

    pub fn apply(&self, j: Letter) -> Letter {
        self.image[j as usize - 1]
    }

    /// `self ∘ other`: apply `other` first.
    pub fn compose(&self, other: &Permutation) -> Permutation {
        assert_eq!(self.k(), other.k(), "composing permutations of different degree");
        Permutation { image: other.image.iter().map(|&j| self.apply(j)).collect() }
    }

    pub fn inverse(&self) -> Permutation {
        let mut image = vec![0; self.k()];
        for (j, &a) in self.image.iter().enumerate() {
            image[a as usize - 1] = (j + 1) as Letter;
        }
        Permutation { image }
    }

    pub fn is_identity(&self) -> bool {
        self.image.iter().enumerate().all(|(j, &a)| a as usize == j + 1)
    }

    pub fn parity(&self) -> Parity {
        // sign = (-1)^(k - #cycles)
        let k = self.k();
        let mut seen = vec![false; k];
        let mut cycles = 0;
        for start in 0..k {
            if seen[start] {
                continue;
            }
            cycles += 1;
            let mut j = start;
            while !seen[j] {
                seen[j] = true;
                j = self.image[j] as usize - 1;
            }
        }
        if (k - cycles).is_multiple_of(2) {
            Parity::Even
        } else {
            Parity::Odd
        }
    }
}

pub fn parity(p: &Permutation) -> Parity {
    p.parity()
}

impl fmt::Display for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.image.iter().map(|a| a.to_string()).collect();
        write!(f, "({})", parts.join(","))
    }
}

impl fmt::Debug for Permutation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Permutation{self}")
    }
}

/// A morphism from words to `S_k`, given by the images of its letters.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PermutationMap {
    perms: Vec<Permutation>,
}

impl PermutationMap {
    pub fn new(perms: Vec<Permutation>) -> Result<Self> {
        let k = perms.first().map(Permutation::k).ok_or_else(|| Error::InvalidPermutation("empty map".into()))?;
        if perms.iter().any(|p| p.k() != k) {
            return Err(Error::InvalidPermutation("mixed degrees".into()));
        }
        Ok(PermutationMap { perms })
    }

    pub fn k(&self) -> usize {
        self.perms[0].k()
    }

    pub fn of(&self, a: Letter) -> &Permutation {
        &self.perms[a as usize - 1]
    }

    pub fn letters(&self) -> usize {
        self.perms.len()
    }

    pub fn eval(&self, t: &[Letter]) -> Result<Permutation> {
        let mut acc = Permutation::identity(self.k());
        for &a in t {
            if a == 0 || a as usize > self.perms.len() {
                return Err(Error::LetterOutOfRange { letter: a as u32, k: self.perms.len() });
            }
            acc = acc.compose(self.of(a));
        }
        Ok(acc)
    }
}

pub fn eval_word(map: &PermutationMap, t: &Word) -> Result<Permutation> {
    map.eval(t.letters())
}

/// `σ(1): j ↦ j+1 (mod k)`, `σ(2)`: fixes 1 and cycles `2..k`, `σ(3)`: fixes
/// 1, 2 and cycles `3..k`.
pub fn sigma(k: usize) -> Result<PermutationMap> {
    if !(4..=255).contains(&k) {
        return Err(Error::Unsupported(format!("sigma needs 4 <= k <= 255, got {k}")));
    }
    let cycle_from = |fixed: usize| {
        let image = (1..=k)
            .map(|j| if j <= fixed { j } else if j == k { fixed + 1 } else { j + 1 })
            .map(|j| j as Letter)
            .collect();
        Permutation { image }
    };
    PermutationMap::new(vec![cycle_from(0), cycle_from(1), cycle_from(2)])
}

/// `τ(a) = σ(g(a))`.
pub fn tau(k: usize) -> Result<PermutationMap> {
    let sigma = sigma(k)?;
    let g = builtin(BuiltinName::G);
    PermutationMap::new(
        g.images()
            .iter()
            .map(|img| sigma.eval(img.letters()))
            .collect::<Result<Vec<_>>>()?,
    )
}

/// `1 ↦ 1`, `j ↦ k + 2 - j`: the ranking change from reading `u` to reading
/// its reversal.
pub fn reversal_ranking_shift(k: usize) -> Result<Permutation> {
    if k < 4 {
        return Err(Error::Unsupported(format!("k must be at least 4, got {k}")));
    }
    let image = (1..=k).map(|j| if j == 1 { 1 } else { (k + 2 - j) as Letter }).collect();
    Ok(Permutation { image })
}

/// Ranking of `Σ_k` after reading `prefix`, from the definition: letters
/// sorted by index of last appearance, absent letters first.
pub fn ranking_after(prefix: &Word, k: usize) -> Result<Permutation> {
    ranking_of(prefix.letters(), k)
}

fn ranking_of(prefix: &[Letter], k: usize) -> Result<Permutation> {
    let mut last: Vec<Option<usize>> = vec![None; k + 1];
    for (i, &a) in prefix.iter().enumerate() {
        if a == 0 || a as usize > k {
            return Err(Error::LetterOutOfRange { letter: a as u32, k });
        }
        last[a as usize] = Some(i);
    }
    let found = last.iter().skip(1).filter(|x| x.is_some()).count();
    if found + 1 < k {
        return Err(Error::TooFewLetters { needed: k - 1, found });
    }
    let mut order: Vec<(Option<usize>, Letter)> = (1..=k).map(|a| (last[a], a as Letter)).collect();
    order.sort();
    Permutation::from_images(order.into_iter().map(|(_, a)| a).collect())
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct EncodingResult {
    /// Shortest prefix containing `k-1` distinct letters.
    pub prefix: Word,
    /// The ternary code of the remaining letters.
    pub code: Word,
    pub initial_ranking: Permutation,
}

fn shortest_prefix_len(w: &[Letter], k: usize) -> Option<usize> {
    let mut seen = vec![false; k + 1];
    let mut distinct = 0;
    for (i, &a) in w.iter().enumerate() {
        if !std::mem::replace(&mut seen[a as usize], true) {
            distinct += 1;
        }
        if distinct + 1 == k {
            return Some(i + 1);
        }
    }
    None
}

pub fn encode(w: &Word, k: usize) -> Result<EncodingResult> {
    if !(4..=255).contains(&k) {
        return Err(Error::Unsupported(format!("encoding needs 4 <= k <= 255, got {k}")));
    }
    let s = w.letters();
    if let Some(&bad) = s.iter().find(|&&a| a as usize > k) {
        return Err(Error::LetterOutOfRange { letter: bad as u32, k });
    }
    let u_len = shortest_prefix_len(s, k).ok_or(Error::TooFewLetters {
        needed: k - 1,
        found: w.distinct_letters(),
    })?;
    if let Some(index) = first_window_violation(s, k) {
        return Err(Error::WindowViolation { index });
    }
    let initial = ranking_of(&s[..u_len], k)?;
    let sigma = sigma(k)?;
    let mut ranking = initial.clone();
    let mut code = Vec::with_capacity(s.len() - u_len);
    for (i, &a) in s.iter().enumerate().skip(u_len) {
        let t = (1..=3)
            .find(|&t| ranking.apply(t) == a)
            .ok_or(Error::UnencodableLetter { index: i })?;
        code.push(t);
        ranking = ranking.compose(sigma.of(t));
    }
    Ok(EncodingResult {
        prefix: Word::from_trusted(s[..u_len].to_vec(), k),
        code: Word::from_trusted(code, 3),
        initial_ranking: initial,
    })
}

fn validate_prefix(prefix: &[Letter], k: usize) -> Result<()> {
    if shortest_prefix_len(prefix, k) != Some(prefix.len()) {
        return Err(Error::InvalidPrefix(format!(
            "not the shortest prefix with {} distinct letters",
            k - 1
        )));
    }
    if first_window_violation(prefix, k).is_some() {
        return Err(Error::InvalidPrefix("prefix breaks the window properties".into()));
    }
    Ok(())
}

/// `w = u · v` with `v_i = r_{i-1}[t_i]`.
pub fn decode(prefix: &Word, code: &Word, k: usize) -> Result<Word> {
    let mut out = prefix.letters().to_vec();
    out.extend(Decoder::new(prefix, k)?.feed_all(code.letters())?);
    Ok(Word::from_trusted(out, k))
}

/// As [`decode`], additionally checking the window properties of the result.
pub fn decode_checked(prefix: &Word, code: &Word, k: usize) -> Result<Word> {
    let w = decode(prefix, code, k)?;
    if let Some(index) = first_window_violation(w.letters(), k) {
        return Err(Error::WindowViolation { index });
    }
    Ok(w)
}

/// Incremental decoder: holds only the current ranking.
#[derive(Clone, Debug)]
pub struct Decoder {
    ranking: Permutation,
    sigma: PermutationMap,
}

impl Decoder {
    pub fn new(prefix: &Word, k: usize) -> Result<Self> {
        if !(4..=255).contains(&k) {
            return Err(Error::Unsupported(format!("encoding needs 4 <= k <= 255, got {k}")));
        }
        validate_prefix(prefix.letters(), k)?;
        Ok(Decoder { ranking: ranking_of(prefix.letters(), k)?, sigma: sigma(k)? })
    }

    pub fn ranking(&self) -> &Permutation {
        &self.ranking
    }

    pub fn feed(&mut self, t: Letter) -> Result<Letter> {
        if !(1..=3).contains(&t) {
            return Err(Error::LetterOutOfRange { letter: t as u32, k: 3 });
        }
        let a = self.ranking.apply(t);
        self.ranking = self.ranking.compose(self.sigma.of(t));
        Ok(a)
    }

    fn feed_all(&mut self, code: &[Letter]) -> Result<Vec<Letter>> {
        code.iter().map(|&t| self.feed(t)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, k: usize) -> Word {
        Word::parse(s, k).unwrap()
    }

    fn perm(v: &[Letter]) -> Permutation {
        Permutation::from_images(v.to_vec()).unwrap()
    }

    #[test]
    fn rankings() {
        assert_eq!(ranking_after(&w("123416", 6), 6).unwrap(), perm(&[5, 2, 3, 4, 1, 6]));
        assert_eq!(ranking_after(&w("123", 4), 4).unwrap(), perm(&[4, 1, 2, 3]));
        assert_eq!(ranking_after(&w("1234", 5), 5).unwrap(), perm(&[5, 1, 2, 3, 4]));
        assert!(matches!(ranking_after(&w("12", 4), 4), Err(Error::TooFewLetters { .. })));
    }

    #[test]
    fn encode_examples() {
        let e = encode(&w("12342541243", 5), 5).unwrap();
        assert_eq!(e.prefix, w("1234", 5));
        assert_eq!(e.code, w("3131231", 3));
        let e = encode(&w("123243414212324", 4), 4).unwrap();
        assert_eq!(e.prefix, w("123", 4));
        assert_eq!(e.code, w("312313123131", 3));
        let e = encode(&w("1234", 5), 5).unwrap();
        assert!(e.code.is_empty());
    }

    #[test]
    fn encode_errors() {
        assert!(matches!(encode(&w("1123", 4), 4), Err(Error::WindowViolation { index: 1 })));
        assert!(matches!(encode(&w("1212", 4), 4), Err(Error::TooFewLetters { .. })));
    }

    #[test]
    fn decode_examples() {
        assert_eq!(decode(&w("1234", 5), &w("3131231", 3), 5).unwrap(), w("12342541243", 5));
        assert_eq!(decode(&w("123", 4), &Word::empty(3).unwrap(), 4).unwrap(), w("123", 4));
        assert!(matches!(decode(&w("1231", 4), &w("3", 3), 4), Err(Error::InvalidPrefix(_))));
        assert!(matches!(decode(&w("12", 4), &w("3", 3), 4), Err(Error::InvalidPrefix(_))));
        // 33 repeats two letters inside one length-4 window
        assert!(decode_checked(&w("123", 4), &w("33", 3), 4).is_err());
    }

    #[test]
    fn sigma_matrices() {
        let s4 = sigma(4).unwrap();
        assert_eq!(s4.of(1), &perm(&[2, 3, 4, 1]));
        assert_eq!(s4.of(2), &perm(&[1, 3, 4, 2]));
        assert_eq!(s4.of(3), &perm(&[1, 2, 4, 3]));
        for k in [4, 5, 9] {
            let s = sigma(k).unwrap();
            assert_eq!((s.of(3).apply(1), s.of(3).apply(2)), (1, 2));
            let twos = Word::new(vec![2; k - 1], 3).unwrap();
            assert!(eval_word(&s, &twos).unwrap().is_identity());
        }
        assert!(eval_word(&s4, &w("3123131231", 3)).unwrap().is_identity());
        assert!(eval_word(&s4, &Word::empty(3).unwrap()).unwrap().is_identity());
    }

    #[test]
    fn tau_images() {
        for k in [4, 8, 12] {
            let s = sigma(k).unwrap();
            let t = tau(k).unwrap();
            assert_eq!(t.of(1), &s.of(3).compose(s.of(1)));
            assert_eq!(t.of(2), &s.eval(&[3, 1, 2]).unwrap());
        }
        let t4 = tau(4).unwrap();
        assert!(eval_word(&t4, &w("2121", 2)).unwrap().is_identity());
        assert!(eval_word(&t4, &w("2112112212", 2)).unwrap().is_identity());
    }

    #[test]
    fn parities() {
        for k in [4, 8, 12] {
            let s = sigma(k).unwrap();
            assert_eq!(s.of(1).parity(), Parity::Odd);
            assert_eq!(s.of(2).parity(), Parity::Even);
            assert_eq!(s.of(3).parity(), Parity::Odd);
        }
        assert_eq!(Permutation::identity(7).parity(), Parity::Even);
        assert_eq!(reversal_ranking_shift(4).unwrap(), perm(&[1, 4, 3, 2]));
        // k=8 fixes 1 and 5, swaps (2 8)(3 7)(4 6): three transpositions
        assert_eq!(reversal_ranking_shift(8).unwrap().parity(), Parity::Odd);
        // k=6 fixes 1 and 4, swaps (2 6)(3 5): two transpositions
        assert_eq!(reversal_ranking_shift(6).unwrap().parity(), Parity::Even);
        assert_eq!(reversal_ranking_shift(4).unwrap().parity(), Parity::Odd);
    }

    #[test]
    fn permutation_algebra() {
        let p = perm(&[3, 1, 2, 5, 4]);
        assert!(p.compose(&p.inverse()).is_identity());
        assert!(Permutation::from_images(vec![1, 1, 2]).is_err());
        assert_eq!(p.to_string(), "(3,1,2,5,4)");
    }
}
