//! Periods, exponents and the detection of ordinary, reverse and undirected
//! fractional powers.
//!
//! A witness `xyx'` is located by its start, its period `|xy|` and its excess
//! `|x|`. The fast scanner runs two longest-common-extension passes per start
//! position (a Z-function of the suffix against itself, and against the
//! reversed word), which is `O(n²)` overall and parallel over starts. The
//! [`reference`] module keeps a direct triple-by-triple scanner for oracle
//! comparisons.

use std::cmp::Ordering;
use std::fmt;

use num_rational::Ratio;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::word::{Letter, Threshold, Word};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Kind {
    Ordinary,
    Reverse,
    /// `x` is a palindrome, so the repetition is both ordinary and reverse.
    Both,
}

impl Kind {
    pub fn is_ordinary(self) -> bool {
        matches!(self, Kind::Ordinary | Kind::Both)
    }

    pub fn is_reverse(self) -> bool {
        matches!(self, Kind::Reverse | Kind::Both)
    }
}

impl fmt::Display for Kind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Kind::Ordinary => "ordinary",
            Kind::Reverse => "reverse",
            Kind::Both => "both",
        })
    }
}

/// A located factor `xyx'` with `x'` equal to `x` or its reversal.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PowerWitness {
    pub start: usize,
    pub period: usize,
    pub excess: usize,
    pub kind: Kind,
    #[serde(with = "crate::word::ratio_string")]
    pub exponent: Ratio<u64>,
}

impl PowerWitness {
    pub fn new(start: usize, period: usize, excess: usize, kind: Kind) -> Self {
        let exponent = Ratio::new((period + excess) as u64, period as u64);
        PowerWitness { start, period, excess, kind, exponent }
    }

    pub fn len(&self) -> usize {
        self.period + self.excess
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Re-checks the factorization against the host word.
    pub fn holds_in(&self, w: &[Letter]) -> bool {
        let (s, p, e) = (self.start, self.period, self.excess);
        if e == 0 || e > p || s + p + e > w.len() {
            return false;
        }
        let x = &w[s..s + e];
        let x2 = &w[s + p..s + p + e];
        let ord = x == x2;
        let rev = x.iter().eq(x2.iter().rev());
        match self.kind {
            Kind::Ordinary => ord,
            Kind::Reverse => rev,
            Kind::Both => ord && rev,
        }
    }

    fn sort_key(&self) -> (usize, usize, usize, Kind) {
        (self.start, self.period, self.excess, self.kind)
    }
}

impl PartialOrd for PowerWitness {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for PowerWitness {
    fn cmp(&self, other: &Self) -> Ordering {
        self.sort_key().cmp(&other.sort_key())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct ExponentReport {
    pub length: usize,
    pub minimal_period: usize,
    #[serde(with = "crate::word::ratio_string")]
    pub exponent: Ratio<u64>,
}

impl ExponentReport {
    /// The excess `e` in `w = pe` with `|p|` the minimal period.
    pub fn excess(&self) -> usize {
        self.length - self.minimal_period
    }
}

pub fn minimal_period(w: &Word) -> Result<usize> {
    if w.is_empty() {
        return Err(Error::EmptyWord);
    }
    Ok(minimal_period_of(w.letters()))
}

pub(crate) fn minimal_period_of(s: &[Letter]) -> usize {
    // Longest proper border from the prefix function.
    let mut pi = vec![0usize; s.len()];
    for i in 1..s.len() {
        let mut j = pi[i - 1];
        while j > 0 && s[i] != s[j] {
            j = pi[j - 1];
        }
        if s[i] == s[j] {
            j += 1;
        }
        pi[i] = j;
    }
    s.len() - pi.last().copied().unwrap_or(0)
}

pub fn exponent(w: &Word) -> Result<ExponentReport> {
    let q = minimal_period(w)?;
    Ok(ExponentReport {
        length: w.len(),
        minimal_period: q,
        exponent: Ratio::new(w.len() as u64, q as u64),
    })
}

/// Which repetitions a scan looks for, and how much it reports.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct ScanOptions {
    pub ordinary: bool,
    pub reverse: bool,
    /// Report every violating `(start, period, excess)` instead of only the
    /// largest excess per `(start, period, kind)`.
    pub exhaustive: bool,
    /// Ignore reverse repetitions whose `x` is longer than this.
    pub max_reverse_excess: Option<usize>,
}

impl Default for ScanOptions {
    fn default() -> Self {
        ScanOptions { ordinary: true, reverse: true, exhaustive: false, max_reverse_excess: None }
    }
}

impl ScanOptions {
    pub fn ordinary_only() -> Self {
        ScanOptions { reverse: false, ..Default::default() }
    }
}

/// All maximal undirected witnesses forbidden by `t`, sorted by start, then
/// period. Empty iff `w` is undirected `t`-free.
pub fn scan_undirected(w: &Word, t: &Threshold) -> Vec<PowerWitness> {
    scan(w.letters(), t, ScanOptions::default())
}

/// As [`scan_undirected`] but for ordinary repetitions `xyx` only; every
/// witness is tagged [`Kind::Ordinary`].
pub fn scan_ordinary(w: &Word, t: &Threshold) -> Vec<PowerWitness> {
    scan(w.letters(), t, ScanOptions::ordinary_only())
}

pub fn is_undirected_free(w: &Word, t: &Threshold) -> bool {
    scan_undirected(w, t).is_empty()
}

pub fn scan(w: &[Letter], t: &Threshold, opts: ScanOptions) -> Vec<PowerWitness> {
    let n = w.len();
    if n < 2 {
        return Vec::new();
    }
    let reversed: Vec<Letter> = w.iter().rev().copied().collect();
    let mut out: Vec<PowerWitness> = (0..n - 1)
        .into_par_iter()
        .flat_map_iter(|i| scan_from(w, &reversed, i, t, opts))
        .collect();
    out.sort_unstable();
    out
}

fn z_function(s: &[Letter]) -> Vec<usize> {
    let n = s.len();
    let mut z = vec![0usize; n];
    if n == 0 {
        return z;
    }
    z[0] = n;
    let (mut l, mut r) = (0usize, 0usize);
    for i in 1..n {
        if i < r {
            z[i] = (r - i).min(z[i - l]);
        }
        while i + z[i] < n && s[z[i]] == s[i + z[i]] {
            z[i] += 1;
        }
        if i + z[i] > r {
            l = i;
            r = i + z[i];
        }
    }
    z
}

/// Witnesses starting at `i`.
fn scan_from(
    w: &[Letter],
    reversed: &[Letter],
    i: usize,
    t: &Threshold,
    opts: ScanOptions,
) -> Vec<PowerWitness> {
    let n = w.len();
    let tail = &w[i..];
    let m = tail.len();
    let mut out = Vec::new();

    // ordinary[p]: largest e <= p with w[i..i+e] == w[i+p..i+p+e].
    let mut ordinary = vec![0usize; m];
    if opts.ordinary {
        let z = z_function(tail);
        for p in 1..m {
            ordinary[p] = z[p].min(p);
        }
    }

    // arm(j): length of the longest match of w[i..] read forwards against
    // w[..=j] read backwards.
    let mut reverse = vec![0usize; m];
    let mut pairs: Vec<(usize, usize)> = Vec::new();
    if opts.reverse {
        let mut s = Vec::with_capacity(m + 1 + n);
        s.extend_from_slice(tail);
        s.push(0);
        s.extend_from_slice(reversed);
        let z = z_function(&s);
        let arm = |j: usize| z[m + 1 + (n - 1 - j)];
        let cap = opts.max_reverse_excess.unwrap_or(usize::MAX);
        if opts.exhaustive {
            for j in i + 1..n {
                let len = j - i + 1;
                let top = arm(j).min(len / 2).min(cap);
                for e in 1..=top {
                    if t.is_violated(len - e, e) {
                        pairs.push((len - e, e));
                    }
                }
            }
        } else {
            // For each period keep the excess of the longest span: scan spans
            // from longest to shortest and give every still-unassigned period
            // in the span's admissible range its excess.
            let mut next_free: Vec<usize> = (0..=m).collect();
            fn find(next: &mut [usize], mut x: usize) -> usize {
                while next[x] != x {
                    next[x] = next[next[x]];
                    x = next[x];
                }
                x
            }
            for j in (i + 1..n).rev() {
                let len = j - i + 1;
                let a = arm(j).min(cap);
                if a == 0 {
                    continue;
                }
                let lo = (len - a.min(len)).max(len.div_ceil(2)).max(1);
                let hi = len - 1;
                let mut p = find(&mut next_free, lo);
                while p <= hi {
                    reverse[p] = len - p;
                    next_free[p] = p + 1;
                    p = find(&mut next_free, p + 1);
                }
            }
        }
    }

    if opts.exhaustive {
        let mut found: Vec<(usize, usize, Kind)> = Vec::new();
        if opts.ordinary {
            for p in 1..m {
                let lo = t.min_excess(p);
                for e in lo..=ordinary[p] {
                    found.push((p, e, Kind::Ordinary));
                }
            }
        }
        found.extend(pairs.into_iter().map(|(p, e)| (p, e, Kind::Reverse)));
        found.sort_unstable();
        let mut k = 0;
        while k < found.len() {
            let (p, e, kind) = found[k];
            if k + 1 < found.len() && found[k + 1].0 == p && found[k + 1].1 == e {
                out.push(PowerWitness::new(i, p, e, Kind::Both));
                k += 2;
            } else {
                out.push(PowerWitness::new(i, p, e, kind));
                k += 1;
            }
        }
        return out;
    }

    for p in 1..m {
        let lo = t.min_excess(p);
        let eo = ordinary[p];
        let er = reverse[p];
        let o = opts.ordinary && eo >= lo;
        let r = opts.reverse && er >= lo;
        match (o, r) {
            (true, true) if eo == er => out.push(PowerWitness::new(i, p, eo, Kind::Both)),
            _ => {
                if o {
                    out.push(PowerWitness::new(i, p, eo, Kind::Ordinary));
                }
                if r {
                    out.push(PowerWitness::new(i, p, er, Kind::Reverse));
                }
            }
        }
    }
    out
}

/// Whether `w` contains `X₁X₂⋯X_m` with all blocks of one nonempty length and
/// each block equal to `X₁` or its reversal.
pub fn scan_unary_pattern(w: &Word, m: usize) -> bool {
    assert!(m >= 2, "unary pattern needs m >= 2");
    let s = w.letters();
    (1..=s.len() / m).any(|len| (0..=s.len() - m * len).any(|i| unary_at(s, i, len, m)))
}

fn unary_at(s: &[Letter], i: usize, len: usize, m: usize) -> bool {
    let first = &s[i..i + len];
    (1..m).all(|b| {
        let x = &s[i + b * len..i + (b + 1) * len];
        x == first || x.iter().eq(first.iter().rev())
    })
}

/// Whether some occurrence of the unary pattern ends at the last letter.
pub(crate) fn unary_pattern_at_end(s: &[Letter], m: usize) -> bool {
    let n = s.len();
    (1..=n / m).any(|len| unary_at(s, n - m * len, len, m))
}

/// Whether some forbidden undirected repetition ends at the last letter.
pub(crate) fn violation_at_end(s: &[Letter], t: &Threshold) -> bool {
    let n = s.len();
    for len in 2..=n {
        let start = n - len;
        for e in 1..=len / 2 {
            if !t.is_violated(len - e, e) {
                continue;
            }
            // Reverse matches at a fixed span nest, so the first violating
            // excess decides them.
            let x = &s[start..start + e];
            let tail = &s[n - e..];
            if x == tail {
                return true;
            }
            if x.iter().eq(tail.iter().rev()) {
                return true;
            }
        }
    }
    false
}

/// Direct scanners used as oracles in tests and finite checks.
pub mod reference {
    use super::*;

    /// Every `(start, period, excess)` whose repetition is forbidden by `t`,
    /// tested one triple at a time.
    pub fn scan_exhaustive(w: &[Letter], t: &Threshold, opts: ScanOptions) -> Vec<PowerWitness> {
        scan_bounded(w, t, opts, usize::MAX)
    }

    /// As [`scan_exhaustive`] restricted to witnesses shorter than `max_span`.
    pub fn scan_bounded(
        w: &[Letter],
        t: &Threshold,
        opts: ScanOptions,
        max_span: usize,
    ) -> Vec<PowerWitness> {
        let n = w.len();
        let mut out = Vec::new();
        for s in 0..n {
            for p in 1..n - s {
                for e in 1..=p {
                    if s + p + e > n || p + e >= max_span {
                        break;
                    }
                    if !t.is_violated(p, e) {
                        continue;
                    }
                    let cap = opts.max_reverse_excess.unwrap_or(usize::MAX);
                    let x = &w[s..s + e];
                    let y = &w[s + p..s + p + e];
                    let ord = opts.ordinary && x == y;
                    let rev = opts.reverse && e <= cap && (0..e).all(|q| x[q] == y[e - 1 - q]);
                    let kind = match (ord, rev) {
                        (true, true) => Kind::Both,
                        (true, false) => Kind::Ordinary,
                        (false, true) => Kind::Reverse,
                        (false, false) => continue,
                    };
                    out.push(PowerWitness::new(s, p, e, kind));
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Reduces an exhaustive list to the largest excess per
    /// `(start, period, kind)`, merging equal ordinary/reverse maxima into
    /// [`Kind::Both`].
    pub fn maximal(exhaustive: &[PowerWitness]) -> Vec<PowerWitness> {
        use std::collections::BTreeMap;
        let mut best: BTreeMap<(usize, usize), (usize, usize)> = BTreeMap::new();
        for w in exhaustive {
            let entry = best.entry((w.start, w.period)).or_insert((0, 0));
            if w.kind.is_ordinary() {
                entry.0 = entry.0.max(w.excess);
            }
            if w.kind.is_reverse() {
                entry.1 = entry.1.max(w.excess);
            }
        }
        let mut out = Vec::new();
        for ((s, p), (eo, er)) in best {
            if eo > 0 && eo == er {
                out.push(PowerWitness::new(s, p, eo, Kind::Both));
                continue;
            }
            if eo > 0 {
                out.push(PowerWitness::new(s, p, eo, Kind::Ordinary));
            }
            if er > 0 {
                out.push(PowerWitness::new(s, p, er, Kind::Reverse));
            }
        }
        out.sort_unstable();
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn w(s: &str, k: usize) -> Word {
        Word::parse(s, k).unwrap()
    }

    fn th(n: u64, d: u64, strict: bool) -> Threshold {
        Threshold::new(n, d, strict).unwrap()
    }

    #[test]
    fn periods_and_exponents() {
        // alfalfa with a=1 l=2 f=3
        let alfalfa = w("1231231", 3);
        assert_eq!(minimal_period(&alfalfa).unwrap(), 3);
        assert_eq!(exponent(&alfalfa).unwrap().exponent, Ratio::new(7, 3));
        assert_eq!(exponent(&alfalfa).unwrap().excess(), 4);
        assert_eq!(minimal_period(&w("1111", 1)).unwrap(), 1);
        assert_eq!(minimal_period(&w("123", 3)).unwrap(), 3);
        assert_eq!(exponent(&w("11", 1)).unwrap().exponent, Ratio::from_integer(2));
        assert_eq!(minimal_period(&Word::empty(2).unwrap()), Err(Error::EmptyWord));
    }

    #[test]
    fn exponent_by_brute_force() {
        // abcab: smallest q with w[i+q] == w[i] for all valid i
        let s = w("12312", 3);
        let q = (1..=5)
            .find(|&q| (0..5 - q).all(|i| s.letters()[i] == s.letters()[i + q]))
            .unwrap();
        assert_eq!(q, 3);
        assert_eq!(exponent(&s).unwrap().exponent, Ratio::new(5, 3));
    }

    #[test]
    fn edited_and_render() {
        // edited: e=1 d=2 i=3 t=4
        let edited = w("123412", 4);
        let strict = scan_undirected(&edited, &th(3, 2, true));
        assert!(strict.is_empty());
        let loose = scan_undirected(&edited, &th(3, 2, false));
        assert_eq!(loose, vec![PowerWitness::new(0, 4, 2, Kind::Ordinary)]);
        assert_eq!(scan_ordinary(&edited, &th(3, 2, false)), loose);

        // render: r=1 e=2 n=3 d=4
        let render = w("123421", 4);
        let found = scan_undirected(&render, &th(3, 2, false));
        assert_eq!(found, vec![PowerWitness::new(0, 4, 2, Kind::Reverse)]);
        assert_eq!(found[0].exponent, Ratio::new(3, 2));
        assert!(scan_ordinary(&render, &th(3, 2, false)).is_empty());

        assert!(scan_undirected(&w("123", 3), &th(11, 10, false)).is_empty());
    }

    #[test]
    fn freeness_basics() {
        assert!(is_undirected_free(&Word::empty(2).unwrap(), &th(2, 1, false)));
        assert!(!is_undirected_free(&w("11", 1), &th(2, 1, false)));
        assert_eq!(
            scan_ordinary(&w("11", 1), &th(2, 1, false)),
            vec![PowerWitness::new(0, 1, 1, Kind::Ordinary)]
        );
        // a single letter is a palindrome
        assert_eq!(
            scan_undirected(&w("11", 1), &th(2, 1, false)),
            vec![PowerWitness::new(0, 1, 1, Kind::Both)]
        );
    }

    #[test]
    fn witnesses_recheck() {
        let s = w("1213121323123", 3);
        for wit in scan(s.letters(), &th(5, 4, false), ScanOptions { exhaustive: true, ..Default::default() }) {
            assert!(wit.holds_in(s.letters()), "{wit:?}");
        }
        for wit in scan_undirected(&s, &th(5, 4, false)) {
            assert!(wit.holds_in(s.letters()), "{wit:?}");
        }
    }

    #[test]
    fn reverse_cap() {
        // 1 2 3 4 5 ... x = 12, reversed at the end with gap
        let s = w("12345621", 6);
        let t = th(5, 4, false);
        assert!(!scan(s.letters(), &t, ScanOptions::default()).is_empty());
        let capped = ScanOptions { max_reverse_excess: Some(1), ..Default::default() };
        assert!(scan(s.letters(), &t, capped).iter().all(|x| x.excess <= 1 || x.kind.is_ordinary()));
    }

    #[test]
    fn unary_patterns() {
        assert!(scan_unary_pattern(&w("111", 1), 3));
        assert!(!scan_unary_pattern(&w("1212", 2), 3));
        // 12 21 12
        assert!(scan_unary_pattern(&w("122112", 2), 3));
        assert!(unary_pattern_at_end(&[2, 1, 2, 2, 1, 1, 2], 3));
    }

    #[test]
    fn suffix_check_agrees_with_scan() {
        let t = th(3, 2, false);
        let s = [1u8, 2, 3, 4, 1, 2];
        assert!(violation_at_end(&s, &t));
        assert!(!violation_at_end(&s[..5], &t));
    }
}
