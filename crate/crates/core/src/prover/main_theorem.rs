use std::collections::HashSet;

use num_rational::Ratio;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphisms::{builtin, BuiltinName, FixedPoint, Morphism};
use crate::pansiot::{encode, Decoder};
use crate::powers::{reference, scan, Kind, ScanOptions};
use crate::report::Report;
use crate::word::{Letter, Threshold, Word};

/// One leaf of the tree of words starting `12⋯(k-1)`: the factor
/// `a(a+1)⋯(k-1)·suffix`, where `0` in the suffix stands for `k`.
#[derive(Clone, Copy, Debug)]
struct Leaf {
    run_from: usize,
    suffix: &'static [usize],
    kind: Kind,
    /// Excess is `|x| = len - period`; the exponent is `len / period`.
    excess: usize,
}

const K: usize = 0;

const LEAVES: [Leaf; 11] = [
    Leaf { run_from: 1, suffix: &[1, 2], kind: Kind::Ordinary, excess: 2 },
    Leaf { run_from: 2, suffix: &[1, K, 2, 3], kind: Kind::Ordinary, excess: 2 },
    Leaf { run_from: 3, suffix: &[1, K, 2, 4, 3], kind: Kind::Reverse, excess: 2 },
    Leaf { run_from: 4, suffix: &[1, K, 2, 4, 5], kind: Kind::Ordinary, excess: 2 },
    Leaf { run_from: 2, suffix: &[1, K, 3, 2], kind: Kind::Reverse, excess: 2 },
    Leaf { run_from: 3, suffix: &[1, K, 3, 4], kind: Kind::Ordinary, excess: 2 },
    Leaf { run_from: 1, suffix: &[K, 1, 2], kind: Kind::Ordinary, excess: 2 },
    Leaf { run_from: 2, suffix: &[K, 1, 3, 2], kind: Kind::Reverse, excess: 2 },
    Leaf { run_from: 3, suffix: &[K, 1, 3, 4], kind: Kind::Ordinary, excess: 2 },
    Leaf { run_from: 1, suffix: &[K, 2, 1], kind: Kind::Reverse, excess: 2 },
    Leaf { run_from: 2, suffix: &[K, 2, 3], kind: Kind::Ordinary, excess: 2 },
];

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct LeafCheck {
    pub factor: Word,
    pub kind: Kind,
    #[serde(with = "crate::word::ratio_string")]
    pub exponent: Ratio<u64>,
    pub pass: bool,
}

fn leaf_word(leaf: &Leaf, k: usize) -> Word {
    let letters = (leaf.run_from..k)
        .chain(leaf.suffix.iter().map(|&a| if a == K { k } else { a }))
        .map(|a| a as Letter)
        .collect();
    Word::from_trusted(letters, k)
}

/// The leaf factors for `k ≥ 6`, each checked to be an undirected power of
/// the stated kind whose exponent reaches `(k-1)/(k-2)`.
pub fn leaf_factors(k: usize) -> Result<Vec<LeafCheck>> {
    if !(6..=255).contains(&k) {
        return Err(Error::Unsupported(format!("leaf factors need k >= 6, got {k}")));
    }
    let t = Threshold::dejean_like(k, false)?;
    Ok(LEAVES
        .iter()
        .map(|leaf| {
            let w = leaf_word(leaf, k);
            let s = w.letters();
            let e = leaf.excess;
            let p = s.len() - e;
            let x = &s[..e];
            let tail = &s[p..];
            let ordinary = x == tail && crate::powers::minimal_period_of(s) == p;
            let reverse = x.iter().eq(tail.iter().rev());
            let kind_ok = match leaf.kind {
                Kind::Ordinary => ordinary,
                Kind::Reverse => reverse && !ordinary,
                Kind::Both => ordinary && reverse,
            };
            let exponent = Ratio::new(s.len() as u64, p as u64);
            LeafCheck { factor: w, kind: leaf.kind, exponent, pass: kind_ok && t.is_violated(p, e) }
        })
        .collect())
}

pub fn check_leaf_factors(k: usize) -> Result<Report> {
    let mut report = Report::new(format!("leaf-factors-{k}"));
    let kk = k as u64;
    let chain = Ratio::new(kk + 1, kk - 1) > Ratio::new(kk + 2, kk) && Ratio::new(kk + 2, kk) > Ratio::new(kk - 1, kk - 2);
    report.push("exponent-chain", chain, format!("{}/{} > {}/{} > {}/{}", k + 1, k - 1, k + 2, k, k - 1, k - 2));
    let t = Threshold::dejean_like(k, false)?;
    for (i, leaf) in leaf_factors(k)?.into_iter().enumerate() {
        let found = !scan(leaf.factor.letters(), &t, ScanOptions::default()).is_empty();
        report.push(
            format!("leaf-{}", i + 1),
            leaf.pass && found,
            format!("{} is a {} {}-power", leaf.factor, leaf.kind, leaf.exponent),
        );
    }
    Ok(report)
}

fn main_morphism(k: usize) -> Result<Morphism> {
    match k {
        4 | 8 | 12 => Ok(builtin(BuiltinName::for_alphabet(k)?)),
        _ => Err(Error::Unsupported(format!("the construction is defined for k in {{4, 8, 12}}, got {k}"))),
    }
}

/// The ternary code `g(f_k^ω(1))`, streamed.
pub fn main_code_iter(k: usize) -> Result<impl Iterator<Item = Letter>> {
    let f = main_morphism(k)?;
    let g = builtin(BuiltinName::G);
    let fixed: FixedPoint = f.fixed_point_iter(1)?;
    Ok(fixed.flat_map(move |a| g.image(a).letters().to_vec()))
}

/// The word over `Σ_k` with prefix `12⋯(k-1)` and code `g(f_k^ω(1))`, streamed.
pub fn main_word_iter(k: usize) -> Result<impl Iterator<Item = Letter>> {
    let prefix = Word::from_trusted((1..k as Letter).collect(), k);
    let mut decoder = Decoder::new(&prefix, k)?;
    let code = main_code_iter(k)?;
    let head = prefix.into_letters();
    Ok(head.into_iter().chain(code.map(move |t| decoder.feed(t).expect("code letters are in 1..=3"))))
}

pub fn construct_w(k: usize, n: usize) -> Result<Word> {
    if n < k - 1 {
        return Err(Error::Unsupported(format!("length must be at least k - 1 = {}", k - 1)));
    }
    Ok(Word::from_trusted(main_word_iter(k)?.take(n).collect(), k))
}

/// Whether some factor `u` of `k-1` distinct letters has `rev(u)` as a factor.
pub fn has_reversed_distinct_pair(w: &Word, k: usize) -> bool {
    let s = w.letters();
    let len = k - 1;
    let distinct = |x: &[Letter]| {
        let mut seen = [false; 256];
        x.iter().all(|&a| !std::mem::replace(&mut seen[a as usize], true))
    };
    let set: HashSet<&[Letter]> = s.windows(len).filter(|x| distinct(x)).collect();
    set.iter().any(|x| {
        let r: Vec<Letter> = x.iter().rev().copied().collect();
        set.contains(r.as_slice())
    })
}

#[derive(Clone, Copy, Debug, Default)]
pub struct MainOptions {
    /// Scan reverse powers of every length even when the reversed-factor check
    /// allows capping `|x|` at `k - 1`.
    pub full_reverse_scan: bool,
}

/// Checks a length-`n` prefix of the construction for undirected
/// `(k-1)/(k-2)⁺` repetitions and the finite facts the freeness argument uses.
pub fn verify_main(k: usize, n: usize, opts: MainOptions) -> Result<Report> {
    let w = construct_w(k, n)?;
    let t = Threshold::dejean_like(k, true)?;
    let mut report = Report::new(format!("main-{k}"));

    let code: Vec<Letter> = main_code_iter(k)?.take(n - (k - 1)).collect();
    let enc = encode(&w, k)?;
    report.push(
        "encoding-round-trip",
        enc.code.letters() == code.as_slice() && enc.prefix.len() == k - 1,
        format!("encode(w) recovers g(f^w(1)) on {} code letters", code.len()),
    );
    let no_33 = !code.windows(2).any(|x| x == [3, 3]);
    report.push("code-avoids-33", no_33, "33 is not a factor of the code prefix");

    let lemma = !has_reversed_distinct_pair(&w, k);
    report.push(
        "no-reversed-distinct-factor",
        lemma,
        format!("no factor of {} distinct letters occurs with its reversal", k - 1),
    );

    let cap = (lemma && !opts.full_reverse_scan).then_some(k - 1);
    let scan_opts = ScanOptions { max_reverse_excess: cap, ..ScanOptions::default() };
    let witnesses = scan(w.letters(), &t, scan_opts);
    let first = witnesses.first().map(|x| format!("; first at {} period {} excess {}", x.start, x.period, x.excess));
    report.push(
        "prefix-is-free",
        witnesses.is_empty(),
        format!(
            "{} witnesses for {t} in a prefix of length {n} (reverse excess {}){}",
            witnesses.len(),
            cap.map_or("unbounded".to_string(), |c| format!("<= {c}")),
            first.unwrap_or_default()
        ),
    );

    let span = (k - 1) * (k - 1);
    let short = reference::scan_bounded(w.letters(), &t, ScanOptions::default(), span);
    report.push(
        "short-repetitions",
        short.is_empty(),
        format!("{} repetitions shorter than {span} found by direct enumeration", short.len()),
    );
    Ok(report)
}
