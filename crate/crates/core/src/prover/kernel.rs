use std::collections::{BTreeSet, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::morphisms::{builtin, has_cut_free_check, stable_factor_set, BuiltinName, Morphism};
use crate::pansiot::{tau, Permutation, PermutationMap};
use crate::report::Report;
use crate::word::{Letter, Word};

/// A kernel repetition `π·η` of `f_k^ω(1)` at the level where the excess
/// `η` (a prefix of `π`) has no cut.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct KernelPair {
    pub pi: Word,
    pub eta: Word,
}

fn check_k(k: usize) -> Result<Morphism> {
    match k {
        4 | 8 | 12 => Ok(builtin(BuiltinName::for_alphabet(k)?)),
        _ => Err(Error::Unsupported(format!("kernel search is defined for k in {{4, 8, 12}}, got {k}"))),
    }
}

/// Largest `|π|` with `2|π| < (k-2)(3|η| + k + 1)`.
pub fn kernel_period_bound(k: usize, eta_len: usize) -> usize {
    ((k - 2) * (3 * eta_len + k + 1)).div_ceil(2) - 1
}

/// Cut-free factors of `f^ω(1)` over the blocks of `f`, all of which are
/// shorter than `r` (checked: every factor of length `r` has a cut).
pub fn cut_free_excesses(f: &Morphism) -> Result<Vec<Word>> {
    let r = f.uniform_length();
    let code = f.images().to_vec();
    let sf = stable_factor_set(f, 1, r)?;
    let k = f.codomain_size();
    let mut out = Vec::new();
    for len in 0..=r {
        for x in sf.factors(len) {
            let x = Word::new(x.to_vec(), k)?;
            if has_cut_free_check(&x, &code)? {
                if len == r {
                    return Err(Error::PremiseFailed(format!("factor {x} of length r = {r} has no cut")));
                }
                out.push(x);
            }
        }
    }
    Ok(out)
}

/// All pairs `(π, η)` with `π·η` a factor of `f_k^ω(1)`, `η` a cut-free prefix
/// of `π`, `τ(π)` the identity and `|π|` within [`kernel_period_bound`].
///
/// Maximality of the repetition is not required, so this is a superset of
/// the pairs that can arise from a repetition in the constructed word.
pub fn kernel_search(k: usize) -> Result<Vec<KernelPair>> {
    let f = check_k(k)?;
    let etas = cut_free_excesses(&f)?;
    let eta_set: HashSet<&[Letter]> = etas.iter().map(Word::letters).collect();
    let max_eta = etas.iter().map(Word::len).max().unwrap_or(0);
    let max_p = kernel_period_bound(k, max_eta);
    let span = max_p + max_eta;
    let sf = stable_factor_set(&f, 1, span)?;
    let tau = tau(k)?;
    let text = sf.prefix().letters();
    let found: BTreeSet<KernelPair> = sf
        .positions(span)
        .par_iter()
        .flat_map_iter(|&start| {
            let win = &text[start..start + span];
            pairs_in_window(k, win, &tau, &eta_set, max_eta)
        })
        .collect();
    Ok(found.into_iter().collect())
}

fn pairs_in_window(
    k: usize,
    win: &[Letter],
    tau: &PermutationMap,
    etas: &HashSet<&[Letter]>,
    max_eta: usize,
) -> Vec<KernelPair> {
    let mut out = Vec::new();
    let mut acc = Permutation::identity(tau.k());
    let max_p = kernel_period_bound(k, max_eta);
    for p in 1..=max_p {
        acc = acc.compose(tau.of(win[p - 1]));
        if !acc.is_identity() {
            continue;
        }
        for e in 0..=max_eta.min(p) {
            if p > kernel_period_bound(k, e) || p + e > win.len() {
                continue;
            }
            if win[p..p + e] != win[..e] {
                break;
            }
            if etas.contains(&win[..e]) {
                out.push(KernelPair {
                    pi: Word::from_trusted(win[..p].to_vec(), 2),
                    eta: Word::from_trusted(win[..e].to_vec(), 2),
                });
            }
        }
    }
    out
}

fn balanced(w: &Word) -> bool {
    w.count(1) == w.count(2)
}

/// For `k = 4`: pairs with balanced `π` and `η` must satisfy
/// `|π| < 2|η| + 4`; the rest are dropped. Unbalanced pairs are kept since
/// the refined bound does not apply to them.
pub fn refined_k4_filter(pairs: &[KernelPair]) -> Vec<KernelPair> {
    pairs
        .iter()
        .filter(|p| !(balanced(&p.pi) && balanced(&p.eta)) || p.pi.len() < 2 * p.eta.len() + 4)
        .cloned()
        .collect()
}

/// Lengths of `(π₀, η₀)` after undoing `s` telescoping steps.
pub fn telescope_lengths(s: u32, r: u64, eta_prime_len: u64, pi_s_len: u64, eta_s_len: u64) -> (u64, u64) {
    let rs = r.pow(s);
    let geometric: u64 = (0..s).map(|i| r.pow(i)).sum();
    (rs * pi_s_len, rs * eta_s_len + eta_prime_len * geometric)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct TelescopeTrace {
    /// `levels[i] = (π_i, η_i)`; the last entry is the input pair.
    pub levels: Vec<(Word, Word)>,
    pub eta_prime_len: usize,
    pub s: usize,
}

/// Builds `π_i = f(π_{i+1})`, `η_i = f(η_{i+1})·η′` from a level-`s` pair.
pub fn telescope(f: &Morphism, pair: &KernelPair, s: usize) -> Result<TelescopeTrace> {
    let eta_prime = f.common_prefix();
    let mut levels = vec![(pair.pi.clone(), pair.eta.clone())];
    for _ in 0..s {
        let (pi, eta) = levels.last().expect("nonempty");
        let next = (f.apply(pi)?, f.apply(eta)?.concat(&eta_prime));
        levels.push(next);
    }
    levels.reverse();
    Ok(TelescopeTrace { levels, eta_prime_len: eta_prime.len(), s })
}

/// A permutation `φ` with `φ ∘ τ(f(a)) ∘ φ⁻¹ = τ(a)` for both letters,
/// found by backtracking over partial images with propagation.
pub fn find_intertwiner(k: usize) -> Result<Option<Permutation>> {
    let f = check_k(k)?;
    let tau = tau(k)?;
    let mut xs = Vec::new();
    let mut ys = Vec::new();
    for a in 1..=2 {
        xs.push(tau.eval(f.image(a).letters())?);
        ys.push(tau.of(a).clone());
    }
    let phi = vec![0 as Letter; k + 1];
    let found = extend(&phi, &xs, &ys, k);
    match found {
        Some(image) => {
            let p = Permutation::from_images(image[1..].to_vec())?;
            Ok(intertwines(&p, &xs, &ys).then_some(p))
        }
        None => Ok(None),
    }
}

fn intertwines(phi: &Permutation, xs: &[Permutation], ys: &[Permutation]) -> bool {
    xs.iter().zip(ys).all(|(x, y)| &phi.compose(x).compose(&phi.inverse()) == y)
}

/// Assigns `φ(j) = v` and closes under `φ(X(j)) = Y(φ(j))` and the inverse
/// relation; false on conflict.
fn propagate(phi: &mut [Letter], j: Letter, v: Letter, xs: &[Permutation], ys: &[Permutation], inv: &[(Permutation, Permutation)]) -> bool {
    let mut queue = vec![(j, v)];
    while let Some((j, v)) = queue.pop() {
        let cur = phi[j as usize];
        if cur != 0 {
            if cur != v {
                return false;
            }
            continue;
        }
        if phi.contains(&v) {
            return false;
        }
        phi[j as usize] = v;
        for (x, y) in xs.iter().zip(ys) {
            queue.push((x.apply(j), y.apply(v)));
        }
        for (xi, yi) in inv {
            queue.push((xi.apply(j), yi.apply(v)));
        }
    }
    true
}

fn extend(phi: &[Letter], xs: &[Permutation], ys: &[Permutation], k: usize) -> Option<Vec<Letter>> {
    let inv: Vec<(Permutation, Permutation)> = xs.iter().zip(ys).map(|(x, y)| (x.inverse(), y.inverse())).collect();
    let Some(j) = (1..=k).find(|&j| phi[j] == 0) else {
        return Some(phi.to_vec());
    };
    for v in 1..=k as Letter {
        if phi.contains(&v) {
            continue;
        }
        let mut trial = phi.to_vec();
        if propagate(&mut trial, j as Letter, v, xs, ys, &inv) {
            if let Some(done) = extend(&trial, xs, ys, k) {
                return Some(done);
            }
        }
    }
    None
}

/// Kernel search, the refined `k = 4` filter, telescoping bookkeeping and
/// the intertwiner, as one report.
pub fn kernel_report(k: usize) -> Result<Report> {
    let f = check_k(k)?;
    let r = f.uniform_length();
    let mut report = Report::new(format!("kernel-{k}"));

    let etas = cut_free_excesses(&f)?;
    let listed = if etas.len() <= 8 {
        let names: Vec<String> = etas.iter().map(|e| if e.is_empty() { "ε".into() } else { e.to_string() }).collect();
        names.join(", ")
    } else {
        let longest = etas.iter().map(Word::len).max().unwrap_or(0);
        format!("{} words of length <= {longest}", etas.len())
    };
    report.push(
        "factors-of-length-r-have-cuts",
        true,
        format!("every factor of length {r} has a cut; cut-free excesses: {listed}"),
    );

    let pairs = kernel_search(k)?;
    let shown: Vec<String> = pairs.iter().map(|p| format!("({}, {})", p.pi, if p.eta.is_empty() { "ε".into() } else { p.eta.to_string() })).collect();
    let expected: Vec<KernelPair> = if k == 4 {
        vec![
            KernelPair { pi: Word::parse("2112112212", 2)?, eta: Word::parse("21", 2)? },
            KernelPair { pi: Word::parse("2121", 2)?, eta: Word::empty(2)? },
        ]
    } else {
        Vec::new()
    };
    let mut sorted_expected = expected.clone();
    sorted_expected.sort();
    report.push(
        "kernel-pairs",
        pairs == sorted_expected,
        format!("{} pairs: [{}]", pairs.len(), shown.join(", ")),
    );

    let bound_ok = pairs.iter().all(|p| 2 * p.pi.len() < (k - 2) * (3 * p.eta.len() + k + 1));
    report.push("period-bound", bound_ok, format!("2|pi| < {}(3|eta| + {}) for every pair", k - 2, k + 1));

    if k == 4 {
        let balanced_all = pairs.iter().all(|p| balanced(&p.pi) && balanced(&p.eta));
        let images_balance = pairs.iter().all(|p| {
            telescope(&f, p, 2)
                .map(|t| t.levels.iter().all(|(pi, eta)| balanced(pi) && balanced(eta)))
                .unwrap_or(false)
        });
        report.push(
            "pairs-balanced",
            balanced_all && images_balance,
            "|pi|_1 = |pi|_2 and |eta|_1 = |eta|_2, also after 2 telescoping steps",
        );
        let survivors = refined_k4_filter(&pairs);
        report.push(
            "refined-bound-eliminates-pairs",
            survivors.is_empty(),
            format!("{} pairs satisfy |pi| < 2|eta| + 4", survivors.len()),
        );
    }

    let eta_prime = f.common_prefix().len() as u64;
    let trace_ok = pairs.iter().all(|p| {
        telescope(&f, p, 2).is_ok_and(|t| {
            let (pi0, eta0) = telescope_lengths(2, r as u64, eta_prime, p.pi.len() as u64, p.eta.len() as u64);
            t.levels[0].0.len() as u64 == pi0 && t.levels[0].1.len() as u64 == eta0
        })
    });
    report.push("telescope-lengths", trace_ok, format!("r = {r}, |eta'| = {eta_prime}"));

    match find_intertwiner(k)? {
        Some(phi) => report.push("intertwiner", true, format!("phi = {phi}")),
        None => report.push("intertwiner", false, "no permutation conjugates tau(f(a)) to tau(a)"),
    }
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn bounds() {
        // k = 4: |pi| < 3|eta| + 5
        assert_eq!(kernel_period_bound(4, 0), 4);
        assert_eq!(kernel_period_bound(4, 2), 10);
        assert_eq!(kernel_period_bound(8, 0), 26);
    }

    #[test]
    fn telescoping() {
        assert_eq!(telescope_lengths(0, 3, 2, 4, 0), (4, 0));
        assert_eq!(telescope_lengths(2, 3, 2, 10, 1), (90, 17));
        assert_eq!(telescope_lengths(3, 15, 0, 7, 2), (7 * 3375, 2 * 3375));
        let f = builtin(BuiltinName::F4);
        let pair = KernelPair { pi: Word::parse("2121", 2).unwrap(), eta: Word::parse("2", 2).unwrap() };
        let t = telescope(&f, &pair, 2).unwrap();
        assert_eq!(t.levels[0].1.len(), 9 + 8);
    }

    #[test]
    fn refined_filter() {
        assert!(refined_k4_filter(&[]).is_empty());
        let keep = KernelPair { pi: Word::parse("21", 2).unwrap(), eta: Word::parse("21", 2).unwrap() };
        assert_eq!(refined_k4_filter(std::slice::from_ref(&keep)), vec![keep]);
    }

    #[test]
    fn cut_free_excesses_of_f4() {
        let got: Vec<String> = cut_free_excesses(&builtin(BuiltinName::F4))
            .unwrap()
            .iter()
            .map(|w| w.to_string())
            .collect();
        assert_eq!(got, ["", "1", "2", "21"]);
    }
}
