//! Morphisms between finite alphabets, their fixed points, cuts over their
//! blocks, and finitized factor sets of their fixed points.

use std::collections::BTreeSet;
use std::fmt;
use std::str::FromStr;
use std::sync::Arc;

use crate::error::{Error, Result};
use crate::factor_index::FactorIndex;
use crate::word::{letters_to_text, Letter, Word};

/// A non-erasing morphism `Σ_domain* → Σ_codomain*`.
#[derive(Clone, PartialEq, Eq)]
pub struct Morphism {
    images: Vec<Word>,
    codomain: usize,
}

impl Morphism {
    /// `images[a - 1]` is the image of letter `a`.
    pub fn new(images: Vec<Word>, codomain: usize) -> Result<Self> {
        if images.is_empty() {
            return Err(Error::InvalidMorphism("no images".into()));
        }
        for (i, img) in images.iter().enumerate() {
            if img.is_empty() {
                return Err(Error::InvalidMorphism(format!("image of {} is empty", i + 1)));
            }
        }
        let images = images
            .into_iter()
            .map(|img| img.with_alphabet(codomain))
            .collect::<Result<Vec<_>>>()?;
        Ok(Morphism { images, codomain })
    }

    /// Parses lines of the form `letter -> image` in the word text format.
    /// Blank lines and `#` comments are ignored; letters must be `1..=n`.
    pub fn parse_table(text: &str, codomain: usize) -> Result<Self> {
        let mut entries: Vec<(usize, Word)> = Vec::new();
        for line in text.lines() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (lhs, rhs) = line
                .split_once("->")
                .ok_or_else(|| Error::Parse(format!("expected `letter -> image`, got `{line}`")))?;
            let letter: usize = lhs
                .trim()
                .parse()
                .map_err(|_| Error::Parse(format!("bad letter `{}`", lhs.trim())))?;
            entries.push((letter, Word::parse(rhs, codomain)?));
        }
        entries.sort_by_key(|(a, _)| *a);
        for (i, (a, _)) in entries.iter().enumerate() {
            if *a != i + 1 {
                return Err(Error::InvalidMorphism(format!("missing or repeated image for letter {}", i + 1)));
            }
        }
        Morphism::new(entries.into_iter().map(|(_, w)| w).collect(), codomain)
    }

    pub fn domain_size(&self) -> usize {
        self.images.len()
    }

    pub fn codomain_size(&self) -> usize {
        self.codomain
    }

    pub fn image(&self, a: Letter) -> &Word {
        &self.images[a as usize - 1]
    }

    pub fn images(&self) -> &[Word] {
        &self.images
    }

    /// Common image length, or 0 if the morphism is not uniform.
    pub fn uniform_length(&self) -> usize {
        let r = self.images[0].len();
        if self.images.iter().all(|w| w.len() == r) {
            r
        } else {
            0
        }
    }

    pub fn max_image_len(&self) -> usize {
        self.images.iter().map(Word::len).max().unwrap_or(0)
    }

    pub fn min_image_len(&self) -> usize {
        self.images.iter().map(Word::len).min().unwrap_or(0)
    }

    pub fn final_letters(&self) -> Vec<Letter> {
        self.images.iter().map(|w| *w.letters().last().unwrap()).collect()
    }

    pub fn images_end_in_distinct_letters(&self) -> bool {
        let finals: BTreeSet<Letter> = self.final_letters().into_iter().collect();
        finals.len() == self.images.len()
    }

    /// Longest common prefix of all images.
    pub fn common_prefix(&self) -> Word {
        let first = self.images[0].letters();
        let len = self.images[1..].iter().fold(first.len(), |acc, w| {
            acc.min(first.iter().zip(w.letters()).take_while(|(a, b)| a == b).count())
        });
        Word::from_trusted(first[..len].to_vec(), self.codomain)
    }

    pub fn apply(&self, w: &Word) -> Result<Word> {
        Ok(Word::from_trusted(self.apply_letters(w.letters())?, self.codomain))
    }

    pub(crate) fn apply_letters(&self, w: &[Letter]) -> Result<Vec<Letter>> {
        let mut out = Vec::with_capacity(w.len() * self.max_image_len());
        for &a in w {
            if a == 0 || a as usize > self.images.len() {
                return Err(Error::LetterOutOfRange { letter: a as u32, k: self.images.len() });
            }
            out.extend_from_slice(self.images[a as usize - 1].letters());
        }
        Ok(out)
    }

    /// `h^m(w)`.
    pub fn iterate(&self, w: &Word, m: usize) -> Result<Word> {
        let mut cur = w.clone();
        for _ in 0..m {
            cur = self.apply(&cur)?;
        }
        Ok(cur)
    }

    fn check_prolongable(&self, seed: Letter) -> Result<()> {
        if self.codomain != self.images.len() || seed == 0 || seed as usize > self.images.len() {
            return Err(Error::NonProlongable(seed));
        }
        let img = self.image(seed);
        if img.len() < 2 || img.letters()[0] != seed {
            return Err(Error::NonProlongable(seed));
        }
        Ok(())
    }

    /// The length-`n` prefix of the fixed point `h^ω(seed)`.
    pub fn fixed_point_prefix(&self, seed: Letter, n: usize) -> Result<Word> {
        let letters: Vec<Letter> = self.fixed_point_iter(seed)?.take(n).collect();
        Ok(Word::from_trusted(letters, self.codomain))
    }

    /// Streams `h^ω(seed)` letter by letter in `O(log n)` memory.
    pub fn fixed_point_iter(&self, seed: Letter) -> Result<FixedPoint> {
        self.check_prolongable(seed)?;
        Ok(FixedPoint::new(Arc::new(self.clone()), seed))
    }
}

impl fmt::Debug for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut m = f.debug_map();
        for (i, img) in self.images.iter().enumerate() {
            m.entry(&(i + 1), &img.to_string());
        }
        m.finish()
    }
}

impl fmt::Display for Morphism {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for (i, img) in self.images.iter().enumerate() {
            writeln!(f, "{} -> {}", i + 1, img)?;
        }
        Ok(())
    }
}

/// Lazy fixed-point generator. Level `d` emits `h(F)` where `F` is read from
/// level `d+1`; deeper levels are created only when needed, so the stack
/// depth is logarithmic in the number of letters produced.
pub struct FixedPoint {
    h: Arc<Morphism>,
    seed: Letter,
    current: Letter,
    offset: usize,
    source: Option<Box<FixedPoint>>,
}

impl FixedPoint {
    fn new(h: Arc<Morphism>, seed: Letter) -> Self {
        FixedPoint { h, seed, current: seed, offset: 0, source: None }
    }
}

impl Iterator for FixedPoint {
    type Item = Letter;

    fn next(&mut self) -> Option<Letter> {
        let img = self.h.image(self.current).letters();
        if self.offset < img.len() {
            self.offset += 1;
            return Some(img[self.offset - 1]);
        }
        let source = self.source.get_or_insert_with(|| {
            let mut child = FixedPoint::new(self.h.clone(), self.seed);
            child.next();
            Box::new(child)
        });
        self.current = source.next()?;
        self.offset = 1;
        Some(self.h.image(self.current).letters()[0])
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum BuiltinName {
    /// The 24-uniform ternary morphism (letters 0,1,2 relabelled 1,2,3).
    F24,
    F4,
    F8,
    F12,
    G,
}

impl BuiltinName {
    pub const ALL: [BuiltinName; 5] =
        [BuiltinName::F24, BuiltinName::F4, BuiltinName::F8, BuiltinName::F12, BuiltinName::G];

    pub fn as_str(self) -> &'static str {
        match self {
            BuiltinName::F24 => "f24",
            BuiltinName::F4 => "f4",
            BuiltinName::F8 => "f8",
            BuiltinName::F12 => "f12",
            BuiltinName::G => "g",
        }
    }

    /// The binary morphism `f_k` used for `k ∈ {4, 8, 12}`.
    pub fn for_alphabet(k: usize) -> Result<Self> {
        match k {
            4 => Ok(BuiltinName::F4),
            8 => Ok(BuiltinName::F8),
            12 => Ok(BuiltinName::F12),
            _ => Err(Error::Unsupported(format!("no construction for k = {k}"))),
        }
    }
}

impl FromStr for BuiltinName {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        BuiltinName::ALL
            .into_iter()
            .find(|b| b.as_str() == s)
            .ok_or_else(|| Error::UnknownMorphism(s.to_string()))
    }
}

// Image tables exactly as published. F24 is written over the digits 0,1,2.
pub(crate) const F24_TABLE: [&str; 3] = [
    "012 021 201 021 012 102 120 210",
    "120 102 012 102 120 210 201 021",
    "201 210 120 210 201 021 012 102",
];
pub(crate) const F4_TABLE: [&str; 2] = ["121", "122"];
pub(crate) const F8_TABLE: [&str; 2] = ["121212112122121", "211212122122112"];
pub(crate) const F12_TABLE: [&str; 2] = ["121212121211212122121", "212122112121121212212"];
pub(crate) const G_TABLE: [&str; 2] = ["31", "312"];

pub fn builtin(name: BuiltinName) -> Morphism {
    let (table, codomain, shift): (&[&str], usize, u8) = match name {
        BuiltinName::F24 => (&F24_TABLE, 3, 1),
        BuiltinName::F4 => (&F4_TABLE, 2, 0),
        BuiltinName::F8 => (&F8_TABLE, 2, 0),
        BuiltinName::F12 => (&F12_TABLE, 2, 0),
        BuiltinName::G => (&G_TABLE, 3, 0),
    };
    let images = table
        .iter()
        .map(|s| {
            let letters = s
                .bytes()
                .filter(u8::is_ascii_digit)
                .map(|b| b - b'0' + shift)
                .collect();
            Word::from_trusted(letters, codomain)
        })
        .collect();
    Morphism { images, codomain }
}

pub fn builtin_by_name(name: &str) -> Result<Morphism> {
    Ok(builtin(name.parse()?))
}

/// Renders a word over `{1,2,3}` in the 0-based digits of the `f24` table.
pub fn to_zero_based(w: &Word) -> String {
    w.letters().iter().map(|&a| char::from(b'0' + a - 1)).collect()
}

/// A split point `w = x|y` forced by every parse over the code.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Cut {
    pub position: usize,
}

pub fn is_prefix_code(code: &[Word]) -> bool {
    code.iter().enumerate().all(|(i, a)| {
        !a.is_empty()
            && code
                .iter()
                .enumerate()
                .all(|(j, b)| i == j || !b.letters().starts_with(a.letters()))
    })
}

/// True iff no codeword is a suffix of another.
pub fn is_suffix_code(code: &[Word]) -> bool {
    let reversed: Vec<Word> = code.iter().map(Word::reverse).collect();
    is_prefix_code(&reversed)
}

/// All cuts of `w` over a prefix or suffix code, as positions in `0..=|w|`.
///
/// Since such a code parses every element of `P⁺` uniquely, the boundaries
/// falling inside `w` depend only on how `w` is aligned against the blocks: an
/// entry offset into a first block followed by whole blocks, the last one
/// possibly running past the end of `w`. Every such alignment is realizable,
/// so the cuts are the boundary positions common to all alignments.
pub fn cuts(w: &Word, code: &[Word]) -> Result<Vec<Cut>> {
    if !is_prefix_code(code) && !is_suffix_code(code) {
        return Err(Error::NotPrefixCode);
    }
    let s = w.letters();
    if s.is_empty() {
        return Ok(Vec::new());
    }
    let mut common: Option<Vec<bool>> = None;
    let mut boundaries = vec![false; s.len() + 1];
    for block in code {
        let b = block.letters();
        for offset in 0..b.len() {
            let take = (b.len() - offset).min(s.len());
            if b[offset..offset + take] != s[..take] {
                continue;
            }
            boundaries.iter_mut().for_each(|x| *x = false);
            boundaries[0] = offset == 0;
            if offset + s.len() <= b.len() {
                boundaries[s.len()] = offset + s.len() == b.len();
                intersect(&mut common, &boundaries);
            } else {
                let pos = b.len() - offset;
                boundaries[pos] = true;
                walk(s, code, pos, &mut boundaries, &mut common);
            }
        }
    }
    let common = common.ok_or(Error::NotACodeFactor)?;
    Ok(common
        .iter()
        .enumerate()
        .filter(|(_, &c)| c)
        .map(|(position, _)| Cut { position })
        .collect())
}

/// The `(block, offset)` pairs at which `w` can start inside a
/// concatenation of blocks: `w` begins `offset` letters into `code[block]`.
pub fn alignments(w: &Word, code: &[Word]) -> Result<BTreeSet<(usize, usize)>> {
    if !is_prefix_code(code) && !is_suffix_code(code) {
        return Err(Error::NotPrefixCode);
    }
    let s = w.letters();
    let mut out = BTreeSet::new();
    for (i, block) in code.iter().enumerate() {
        let b = block.letters();
        for offset in 0..b.len() {
            let take = (b.len() - offset).min(s.len());
            if b[offset..offset + take] == s[..take] && completes(s, code, take) {
                out.insert((i, offset));
            }
        }
    }
    Ok(out)
}

fn completes(s: &[Letter], code: &[Word], pos: usize) -> bool {
    let rest = &s[pos..];
    rest.is_empty()
        || code.iter().any(|block| {
            let b = block.letters();
            if b.len() >= rest.len() {
                b.starts_with(rest)
            } else {
                rest.starts_with(b) && completes(s, code, pos + b.len())
            }
        })
}

fn walk(
    s: &[Letter],
    code: &[Word],
    pos: usize,
    boundaries: &mut Vec<bool>,
    common: &mut Option<Vec<bool>>,
) {
    let rest = &s[pos..];
    for block in code {
        let b = block.letters();
        if b.len() >= rest.len() {
            if b.starts_with(rest) {
                let end_cut = b.len() == rest.len();
                boundaries[s.len()] = end_cut;
                intersect(common, boundaries);
                boundaries[s.len()] = false;
            }
        } else if rest.starts_with(b) {
            let next = pos + b.len();
            boundaries[next] = true;
            walk(s, code, next, boundaries, common);
            boundaries[next] = false;
        }
    }
}

fn intersect(common: &mut Option<Vec<bool>>, boundaries: &[bool]) {
    match common {
        None => *common = Some(boundaries.to_vec()),
        Some(c) => c.iter_mut().zip(boundaries).for_each(|(x, &b)| *x &= b),
    }
}

/// True iff `w` has no cut over the code.
pub fn has_cut_free_check(w: &Word, code: &[Word]) -> Result<bool> {
    Ok(cuts(w, code)?.is_empty())
}

/// All factors of `h^ω(seed)` up to a length bound, indexed over a prefix
/// `h^m(seed)` that provably contains every one of them.
#[derive(Clone, Debug)]
pub struct StableFactors {
    prefix: Word,
    index: FactorIndex,
    max_len: usize,
    iterations: usize,
}

impl StableFactors {
    /// The exponent `m` of the certified prefix `h^m(seed)`.
    pub fn iterations(&self) -> usize {
        self.iterations
    }

    pub fn max_len(&self) -> usize {
        self.max_len
    }

    pub fn prefix(&self) -> &Word {
        &self.prefix
    }

    pub fn contains(&self, x: &[Letter]) -> bool {
        x.len() <= self.max_len && self.index.contains(x)
    }

    pub fn count(&self, len: usize) -> usize {
        assert!(len <= self.max_len);
        self.index.distinct_counts(len)[len]
    }

    /// The factors of exactly `len` letters, in lexicographic order.
    pub fn factors(&self, len: usize) -> impl Iterator<Item = &[Letter]> + '_ {
        assert!(len <= self.max_len);
        let eps: Option<&[Letter]> = if len == 0 { Some(&[]) } else { None };
        let rest: Box<dyn Iterator<Item = &[Letter]>> =
            if len == 0 { Box::new(std::iter::empty()) } else { Box::new(self.index.distinct(len)) };
        eps.into_iter().chain(rest)
    }

    /// Start positions in the prefix of one occurrence of each factor of
    /// exactly `len` letters.
    pub fn positions(&self, len: usize) -> Vec<usize> {
        self.index.distinct_positions(len)
    }

    pub fn to_set(&self) -> BTreeSet<Word> {
        let k = self.prefix.alphabet_size();
        (0..=self.max_len)
            .flat_map(|l| self.factors(l).map(|x| Word::from_trusted(x.to_vec(), k)).collect::<Vec<_>>())
            .collect()
    }
}

const MAX_STABILIZATION_STEPS: usize = 16;
const MAX_PREFIX_LEN: usize = 1 << 26;

/// Certifies that the length-`≤ max_len` factors of `h^m(seed)` are all the
/// length-`≤ max_len` factors of `h^ω(seed)`.
///
/// Each factor of length `≤ L` of `h^{m+1}(seed)` lies inside `h(u)` for a
/// length-`L'` factor `u` of `h^m(seed)`, where `L' = ⌈(L-1)/min|h(a)|⌉ + 1 ≤ L`.
/// If those images contribute no new factors, the restricted factor sets of
/// all later iterates coincide by induction.
pub fn factors_stabilize_at(h: &Morphism, seed: Letter, max_len: usize, m: usize) -> Result<bool> {
    h.check_prolongable(seed)?;
    let prefix = h.iterate(&Word::from_trusted(vec![seed], h.codomain), m)?;
    Ok(certify(h, prefix.letters(), max_len)?.is_some())
}

fn certify(h: &Morphism, prefix: &[Letter], max_len: usize) -> Result<Option<FactorIndex>> {
    let window = window_len(h, max_len);
    if prefix.len() < window {
        return Ok(None);
    }
    let index = FactorIndex::new(&[prefix]);
    let counts = index.distinct_counts(max_len);
    let images = index
        .distinct(window)
        .map(|u| h.apply_letters(u))
        .collect::<Result<Vec<_>>>()?;
    let next = FactorIndex::new(&images);
    Ok((next.distinct_counts(max_len) == counts).then_some(index))
}

fn window_len(h: &Morphism, max_len: usize) -> usize {
    let min = h.min_image_len().max(1);
    if max_len <= 1 {
        1
    } else {
        (max_len - 1).div_ceil(min) + 1
    }
}

/// The factors of `h^ω(seed)` of length `≤ max_len`, over the first prefix
/// `h^m(seed)` that passes the stabilization certificate and is at least
/// `2 · max_len · max|h(a)|` long.
pub fn stable_factor_set(h: &Morphism, seed: Letter, max_len: usize) -> Result<StableFactors> {
    h.check_prolongable(seed)?;
    let floor = 2 * max_len * h.max_image_len();
    let mut prefix = vec![seed];
    for m in 0..=MAX_STABILIZATION_STEPS {
        if prefix.len() >= floor.max(1) {
            if let Some(index) = certify(h, &prefix, max_len)? {
                return Ok(StableFactors {
                    prefix: Word::from_trusted(prefix, h.codomain),
                    index,
                    max_len,
                    iterations: m,
                });
            }
        }
        if prefix.len() > MAX_PREFIX_LEN {
            break;
        }
        prefix = h.apply_letters(&prefix)?;
    }
    Err(Error::Stabilization { iterations: MAX_STABILIZATION_STEPS })
}

impl fmt::Display for StableFactors {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "factors of length <= {} certified on h^{}(seed) ({} letters)",
            self.max_len,
            self.iterations,
            self.prefix.len()
        )
    }
}

/// Text rendering helper for code sets in reports.
pub fn code_to_string(code: &[Word]) -> String {
    let parts: Vec<String> = code
        .iter()
        .map(|w| letters_to_text(w.letters(), w.alphabet_size()))
        .collect();
    format!("{{{}}}", parts.join(", "))
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeSet;

    fn w(s: &str, k: usize) -> Word {
        Word::parse(s, k).unwrap()
    }

    #[test]
    fn apply_examples() {
        let g = builtin(BuiltinName::G);
        assert_eq!(g.apply(&w("12", 2)).unwrap(), w("31312", 3));
        assert!(g.apply(&Word::empty(2).unwrap()).unwrap().is_empty());
        let f4 = builtin(BuiltinName::F4);
        assert_eq!(f4.apply(&w("1", 2)).unwrap(), w("121", 2));
        assert!(matches!(g.apply(&w("3", 3)), Err(Error::LetterOutOfRange { .. })));
    }

    #[test]
    fn fixed_points() {
        let f4 = builtin(BuiltinName::F4);
        assert_eq!(f4.fixed_point_prefix(1, 9).unwrap(), w("121122121", 2));
        assert_eq!(f4.fixed_point_prefix(1, 1).unwrap(), w("1", 2));
        let f = builtin(BuiltinName::F24);
        assert_eq!(&f.fixed_point_prefix(1, 24).unwrap(), f.image(1));
        assert!(matches!(f4.fixed_point_prefix(2, 3), Err(Error::NonProlongable(2))));
        assert!(matches!(builtin(BuiltinName::G).fixed_point_prefix(1, 3), Err(Error::NonProlongable(1))));
    }

    #[test]
    fn fixed_point_stream_matches_iteration() {
        for name in [BuiltinName::F24, BuiltinName::F4, BuiltinName::F8, BuiltinName::F12] {
            let h = builtin(name);
            let seed = 1;
            let it = h.iterate(&Word::new(vec![seed], h.codomain_size()).unwrap(), 4).unwrap();
            let n = it.len().min(50_000);
            assert_eq!(h.fixed_point_prefix(seed, n).unwrap().letters(), &it.letters()[..n]);
        }
    }

    #[test]
    fn builtin_tables() {
        let f = builtin(BuiltinName::F24);
        assert_eq!(f.uniform_length(), 24);
        for (img, table) in f.images().iter().zip(F24_TABLE) {
            assert_eq!(to_zero_based(img), table.replace(' ', ""));
        }
        assert_eq!(builtin(BuiltinName::F8).uniform_length(), 15);
        assert_eq!(builtin(BuiltinName::F12).uniform_length(), 21);
        assert_eq!(builtin(BuiltinName::F4).uniform_length(), 3);
        assert_eq!(builtin(BuiltinName::G).uniform_length(), 0);
        for name in BuiltinName::ALL {
            assert!(builtin(name).images_end_in_distinct_letters(), "{name:?}");
        }
        assert_eq!(builtin(BuiltinName::F4).common_prefix(), w("12", 2));
        assert!(builtin(BuiltinName::F8).common_prefix().is_empty());
        assert!(builtin(BuiltinName::F12).common_prefix().is_empty());
        assert_eq!(builtin(BuiltinName::G).common_prefix(), w("31", 3));
        assert!(matches!("h".parse::<BuiltinName>(), Err(Error::UnknownMorphism(_))));
    }

    #[test]
    fn morphism_table_format() {
        let h = Morphism::parse_table("# f4\n1 -> 121\n2 -> 122\n", 2).unwrap();
        assert_eq!(h, builtin(BuiltinName::F4));
        assert_eq!(Morphism::parse_table(&h.to_string(), 2).unwrap(), h);
        assert!(Morphism::parse_table("1 -> 12\n3 -> 1\n", 3).is_err());
        assert!(Morphism::parse_table("1 = 12\n", 2).is_err());
    }

    #[test]
    fn cut_examples() {
        // code {01, 10} relabelled as {12, 21}; the word 11 becomes 22
        let code = [w("12", 2), w("21", 2)];
        assert_eq!(cuts(&w("22", 2), &code).unwrap(), vec![Cut { position: 1 }]);
        assert!(matches!(cuts(&w("1212", 2), &[w("1", 2), w("11", 2)]), Err(Error::NotPrefixCode)));
        assert!(matches!(cuts(&w("3", 3), &[w("12", 3)]), Err(Error::NotACodeFactor)));

        let f4 = builtin(BuiltinName::F4);
        let code = f4.images().to_vec();
        assert_eq!(
            cuts(&w("121", 2), &code).unwrap(),
            vec![Cut { position: 0 }, Cut { position: 3 }]
        );
        assert!(has_cut_free_check(&w("21", 2), &code).unwrap());
        assert!(has_cut_free_check(&Word::empty(2).unwrap(), &code).unwrap());
    }

    /// Boundary sets of all parses of `p w s` with bounded context, intersected.
    fn cuts_oracle(w: &Word, code: &[Word], radius: usize) -> Option<BTreeSet<usize>> {
        let s = w.letters();
        let mut common: Option<BTreeSet<usize>> = None;
        // enumerate block sequences whose concatenation has length <= |w| + 2 * radius
        let limit = s.len() + 2 * radius;
        let mut stack: Vec<Vec<usize>> = vec![vec![]];
        while let Some(seq) = stack.pop() {
            let text: Vec<Letter> = seq.iter().flat_map(|&b| code[b].letters().to_vec()).collect();
            let mut bounds = BTreeSet::from([0usize]);
            let mut acc = 0;
            for &b in &seq {
                acc += code[b].len();
                bounds.insert(acc);
            }
            for off in 0..=text.len().saturating_sub(s.len()) {
                if text.len() >= s.len() && text[off..off + s.len()] == *s && off <= radius {
                    let inside: BTreeSet<usize> = bounds
                        .iter()
                        .filter(|&&x| x >= off && x <= off + s.len())
                        .map(|&x| x - off)
                        .collect();
                    common = Some(match common {
                        None => inside,
                        Some(c) => c.intersection(&inside).copied().collect(),
                    });
                }
            }
            if text.len() < limit {
                for b in 0..code.len() {
                    let mut next = seq.clone();
                    next.push(b);
                    stack.push(next);
                }
            }
        }
        common
    }

    #[test]
    fn cuts_match_bounded_context_oracle() {
        let g = builtin(BuiltinName::G);
        let f4 = builtin(BuiltinName::F4);
        let cases: Vec<(Word, Vec<Word>)> = vec![
            (w("31231", 3), g.images().to_vec()),
            (w("3123", 3), g.images().to_vec()),
            (w("12", 3), g.images().to_vec()),
            (w("21", 2), f4.images().to_vec()),
            (w("212", 2), f4.images().to_vec()),
            (w("1221", 2), f4.images().to_vec()),
            (w("22", 2), vec![w("12", 2), w("21", 2)]),
        ];
        for (x, code) in cases {
            let radius = 2 * code.iter().map(Word::len).max().unwrap();
            let expected = cuts_oracle(&x, &code, radius).unwrap();
            let wider = cuts_oracle(&x, &code, radius + 3).unwrap();
            assert_eq!(expected, wider, "radius sensitivity for {x}");
            let got: BTreeSet<usize> = cuts(&x, &code).unwrap().iter().map(|c| c.position).collect();
            assert_eq!(got, expected, "{x}");
        }
    }

    #[test]
    fn short_factors_of_f4_contain_cuts() {
        let f4 = builtin(BuiltinName::F4);
        let code = f4.images().to_vec();
        let stable = stable_factor_set(&f4, 1, 3).unwrap();
        for x in stable.factors(3) {
            let x = Word::new(x.to_vec(), 2).unwrap();
            assert!(!has_cut_free_check(&x, &code).unwrap(), "{x}");
        }
    }

    #[test]
    fn stable_sets() {
        let f4 = builtin(BuiltinName::F4);
        let s = stable_factor_set(&f4, 1, 3).unwrap();
        let five: BTreeSet<Word> = (0..=3)
            .flat_map(|l| crate::word::factor_set(&f4.iterate(&w("1", 2), 5).unwrap(), l))
            .collect();
        let six: BTreeSet<Word> = (0..=3)
            .flat_map(|l| crate::word::factor_set(&f4.iterate(&w("1", 2), 6).unwrap(), l))
            .collect();
        assert_eq!(five, six);
        assert_eq!(s.to_set(), five);

        let letters = stable_factor_set(&builtin(BuiltinName::F24), 1, 1).unwrap();
        assert_eq!(letters.count(1), 3);
        assert_eq!(letters.factors(0).count(), 1);
    }
}
