use std::sync::atomic::{AtomicBool, AtomicU64, Ordering};

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::powers::{unary_pattern_at_end, violation_at_end};
use crate::word::{Letter, Threshold, Word};

/// What the searched words must avoid.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Constraint {
    /// Undirected repetitions forbidden by the threshold.
    Threshold(Threshold),
    /// `X₁⋯X_m` with every block equal to `X₁` or its reversal.
    UnaryPattern(usize),
}

impl Constraint {
    fn violated_at_end(&self, s: &[Letter]) -> bool {
        match self {
            Constraint::Threshold(t) => violation_at_end(s, t),
            Constraint::UnaryPattern(m) => unary_pattern_at_end(s, *m),
        }
    }
}

#[derive(Clone, Debug)]
pub struct BacktrackOptions {
    /// Only explore words whose letters first appear in increasing order.
    /// Every word is a renaming of exactly one such word, and both
    /// constraints are invariant under renaming.
    pub symmetry: bool,
    pub max_nodes: Option<u64>,
    /// Number of maximal words kept, lexicographically smallest first.
    pub max_witnesses: usize,
}

impl Default for BacktrackOptions {
    fn default() -> Self {
        BacktrackOptions { symmetry: false, max_nodes: Some(100_000_000), max_witnesses: 16 }
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SearchOutcome {
    pub max_length: usize,
    pub witnesses: Vec<Word>,
    /// Number of words of `max_length` that avoid the constraint (within the
    /// symmetry class representatives when reduction is on).
    pub witness_count: u64,
    pub nodes_expanded: u64,
}

struct Shared<'a> {
    k: usize,
    constraint: &'a Constraint,
    opts: &'a BacktrackOptions,
    nodes: AtomicU64,
    aborted: AtomicBool,
}

#[derive(Default)]
struct Partial {
    max_length: usize,
    witnesses: Vec<Vec<Letter>>,
    count: u64,
}

impl Partial {
    fn record(&mut self, s: &[Letter], keep: usize) {
        if s.len() > self.max_length {
            self.max_length = s.len();
            self.witnesses.clear();
            self.count = 0;
        }
        if s.len() == self.max_length {
            self.count += 1;
            if self.witnesses.len() < keep {
                self.witnesses.push(s.to_vec());
            }
        }
    }

    fn merge(mut self, other: Partial, keep: usize) -> Partial {
        if other.max_length > self.max_length {
            return other.merge(self, keep);
        }
        if other.max_length == self.max_length {
            self.count += other.count;
            self.witnesses.extend(other.witnesses);
            self.witnesses.sort();
            self.witnesses.truncate(keep);
        }
        self
    }
}

const SHARD_DEPTH: usize = 3;

/// Exact length of the longest word over `Σ_k` avoiding the constraint, by
/// exhaustive depth-first search. Fails with [`Error::BudgetExceeded`] when
/// the node budget runs out, which happens in particular when the language
/// is infinite.
pub fn backtrack_max_length(k: usize, constraint: &Constraint, opts: &BacktrackOptions) -> Result<SearchOutcome> {
    if !(1..=255).contains(&k) {
        return Err(Error::AlphabetSize(k));
    }
    if let Constraint::UnaryPattern(m) = constraint {
        if *m < 2 {
            return Err(Error::Unsupported(format!("unary pattern needs m >= 2, got {m}")));
        }
    }
    let shared = Shared { k, constraint, opts, nodes: AtomicU64::new(0), aborted: AtomicBool::new(false) };

    // Enumerate shallow prefixes sequentially, then search below each in parallel.
    let mut shards = Vec::new();
    let mut shallow = Partial::default();
    shallow.record(&[], opts.max_witnesses);
    collect_shards(&shared, &mut Vec::new(), &mut shards, &mut shallow);
    let deep = shards
        .par_iter()
        .map(|prefix| search_below(&shared, prefix))
        .reduce(Partial::default, |a, b| a.merge(b, opts.max_witnesses));
    if shared.aborted.load(Ordering::Relaxed) {
        return Err(Error::BudgetExceeded { budget: opts.max_nodes.unwrap_or(u64::MAX) });
    }
    let best = shallow.merge(deep, opts.max_witnesses);
    Ok(SearchOutcome {
        max_length: best.max_length,
        witnesses: best.witnesses.into_iter().map(|s| Word::from_trusted(s, k)).collect(),
        witness_count: best.count,
        nodes_expanded: shared.nodes.load(Ordering::Relaxed),
    })
}

fn letter_range(shared: &Shared, s: &[Letter]) -> std::ops::RangeInclusive<Letter> {
    let top = if shared.opts.symmetry {
        let used = s.iter().copied().max().unwrap_or(0) as usize;
        (used + 1).min(shared.k)
    } else {
        shared.k
    };
    1..=top as Letter
}

fn count_node(shared: &Shared) -> bool {
    let n = shared.nodes.fetch_add(1, Ordering::Relaxed) + 1;
    if shared.opts.max_nodes.is_some_and(|max| n > max) {
        shared.aborted.store(true, Ordering::Relaxed);
    }
    !shared.aborted.load(Ordering::Relaxed)
}

fn collect_shards(shared: &Shared, s: &mut Vec<Letter>, shards: &mut Vec<Vec<Letter>>, best: &mut Partial) {
    for a in letter_range(shared, s) {
        s.push(a);
        if count_node(shared) && !shared.constraint.violated_at_end(s) {
            if s.len() == SHARD_DEPTH {
                shards.push(s.clone());
            } else {
                best.record(s, shared.opts.max_witnesses);
                collect_shards(shared, s, shards, best);
            }
        }
        s.pop();
    }
}

fn search_below(shared: &Shared, prefix: &[Letter]) -> Partial {
    let mut best = Partial::default();
    let mut s = prefix.to_vec();
    best.record(&s, shared.opts.max_witnesses);
    // next[d] is the next letter to try at depth prefix.len() + d
    let mut next: Vec<Letter> = vec![1];
    while let Some(&candidate) = next.last() {
        if shared.aborted.load(Ordering::Relaxed) {
            break;
        }
        if candidate > *letter_range(shared, &s).end() {
            next.pop();
            if next.is_empty() {
                break;
            }
            s.pop();
            continue;
        }
        *next.last_mut().expect("nonempty") += 1;
        s.push(candidate);
        if !count_node(shared) {
            break;
        }
        if shared.constraint.violated_at_end(&s) {
            s.pop();
        } else {
            best.record(&s, shared.opts.max_witnesses);
            next.push(1);
        }
    }
    best
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(k: usize, c: Constraint, symmetry: bool) -> SearchOutcome {
        let opts = BacktrackOptions { symmetry, ..Default::default() };
        backtrack_max_length(k, &c, &opts).unwrap()
    }

    #[test]
    fn squares_over_small_alphabets() {
        // Two letters: 121 is the longest square-free word.
        let sq = Constraint::Threshold(Threshold::new(2, 1, false).unwrap());
        let out = run(2, sq.clone(), false);
        assert_eq!(out.max_length, 3);
        assert_eq!(out.witness_count, 2);
        assert_eq!(out.witnesses[0].to_string(), "121");
        assert_eq!(run(1, sq, false).max_length, 1);
    }

    #[test]
    fn symmetry_reduction_keeps_the_maximum() {
        let t = Constraint::Threshold(Threshold::new(3, 2, false).unwrap());
        let full = run(4, t.clone(), false);
        let reduced = run(4, t, true);
        assert_eq!(full.max_length, reduced.max_length);
        // 4! renamings per representative, all letters being used
        assert_eq!(full.witness_count, 24 * reduced.witness_count);
    }

    #[test]
    fn budget_is_reported() {
        let overlap = Constraint::Threshold(Threshold::new(2, 1, true).unwrap());
        let opts = BacktrackOptions { max_nodes: Some(10_000), ..Default::default() };
        assert!(matches!(
            backtrack_max_length(3, &overlap, &opts),
            Err(Error::BudgetExceeded { budget: 10_000 })
        ));
    }

    #[test]
    fn witnesses_are_free() {
        let t = Threshold::new(4, 3, false).unwrap();
        let out = run(5, Constraint::Threshold(t), true);
        for w in &out.witnesses {
            assert_eq!(w.len(), out.max_length);
            assert!(crate::powers::is_undirected_free(w, &t));
        }
    }
}
