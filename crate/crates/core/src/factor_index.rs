//! Suffix-array index over one or more texts, used to enumerate and count
//! distinct factors of long morphic prefixes without materializing them.

use crate::word::Letter;

/// Suffix array with LCP over `parts` joined by a separator that matches no
/// letter. Factors never span a separator.
#[derive(Clone, Debug)]
pub struct FactorIndex {
    text: Vec<Letter>,
    sa: Vec<u32>,
    lcp: Vec<u32>,
    extent: Vec<u32>,
}

const SEPARATOR: Letter = 0;

impl FactorIndex {
    pub fn new<T: AsRef<[Letter]>>(parts: &[T]) -> Self {
        let mut text = Vec::new();
        for (i, part) in parts.iter().enumerate() {
            if i > 0 {
                text.push(SEPARATOR);
            }
            debug_assert!(!part.as_ref().contains(&SEPARATOR));
            text.extend_from_slice(part.as_ref());
        }
        let sa = suffix_array(&text);
        let lcp = lcp_array(&text, &sa);
        let mut extent = vec![0u32; text.len()];
        let mut run = 0u32;
        for i in (0..text.len()).rev() {
            run = if text[i] == SEPARATOR { 0 } else { run + 1 };
            extent[i] = run;
        }
        FactorIndex { text, sa, lcp, extent }
    }

    pub fn text(&self) -> &[Letter] {
        &self.text
    }

    /// `counts[l]` is the number of distinct factors of length `l` for
    /// `l in 0..=max_len` (`counts[0] == 1`).
    pub fn distinct_counts(&self, max_len: usize) -> Vec<usize> {
        let mut diff = vec![0i64; max_len + 2];
        for (rank, &pos) in self.sa.iter().enumerate() {
            let ext = (self.extent[pos as usize] as usize).min(max_len);
            let lo = self.lcp[rank] as usize + 1;
            if lo <= ext {
                diff[lo] += 1;
                diff[ext + 1] -= 1;
            }
        }
        let mut counts = vec![0usize; max_len + 1];
        let mut acc = 0i64;
        for (l, c) in counts.iter_mut().enumerate() {
            acc += diff[l];
            *c = acc as usize;
        }
        counts[0] = 1;
        counts
    }

    /// One occurrence position for each distinct factor of length `len`, in
    /// lexicographic order of the factors.
    pub fn distinct_positions(&self, len: usize) -> Vec<usize> {
        assert!(len > 0);
        self.sa
            .iter()
            .enumerate()
            .filter(|&(rank, &pos)| {
                self.extent[pos as usize] as usize >= len && (self.lcp[rank] as usize) < len
            })
            .map(|(_, &pos)| pos as usize)
            .collect()
    }

    /// The distinct factors of length `len`, as slices of the indexed text.
    pub fn distinct(&self, len: usize) -> impl Iterator<Item = &[Letter]> + '_ {
        self.distinct_positions(len)
            .into_iter()
            .map(move |p| &self.text[p..p + len])
    }

    pub fn contains(&self, pattern: &[Letter]) -> bool {
        if pattern.is_empty() {
            return true;
        }
        let m = pattern.len();
        let idx = self.sa.partition_point(|&pos| {
            let p = pos as usize;
            let end = (p + m).min(self.text.len());
            &self.text[p..end] < pattern
        });
        idx < self.sa.len() && {
            let p = self.sa[idx] as usize;
            self.text.len() - p >= m && &self.text[p..p + m] == pattern
        }
    }
}

/// Prefix-doubling suffix array with counting sorts, `O(n log n)`.
fn suffix_array(text: &[Letter]) -> Vec<u32> {
    let n = text.len() + 1;
    // Shift letters up by one so the appended terminator 0 is unique and
    // smallest; cyclic-shift order then equals suffix order.
    let s: Vec<usize> = text.iter().map(|&a| a as usize + 1).chain([0]).collect();
    let alphabet = 258;
    let mut p = vec![0usize; n];
    let mut c = vec![0usize; n];
    let mut cnt = vec![0usize; alphabet.max(n)];
    for &x in &s {
        cnt[x] += 1;
    }
    for i in 1..alphabet {
        cnt[i] += cnt[i - 1];
    }
    for i in (0..n).rev() {
        cnt[s[i]] -= 1;
        p[cnt[s[i]]] = i;
    }
    let mut classes = 1;
    for i in 1..n {
        if s[p[i]] != s[p[i - 1]] {
            classes += 1;
        }
        c[p[i]] = classes - 1;
    }
    let mut pn = vec![0usize; n];
    let mut cn = vec![0usize; n];
    let mut h = 1;
    while h < n && classes < n {
        for i in 0..n {
            pn[i] = (p[i] + n - h) % n;
        }
        cnt[..classes].iter_mut().for_each(|x| *x = 0);
        for &x in &pn {
            cnt[c[x]] += 1;
        }
        for i in 1..classes {
            cnt[i] += cnt[i - 1];
        }
        for i in (0..n).rev() {
            let cl = c[pn[i]];
            cnt[cl] -= 1;
            p[cnt[cl]] = pn[i];
        }
        cn[p[0]] = 0;
        classes = 1;
        for i in 1..n {
            let cur = (c[p[i]], c[(p[i] + h) % n]);
            let prev = (c[p[i - 1]], c[(p[i - 1] + h) % n]);
            if cur != prev {
                classes += 1;
            }
            cn[p[i]] = classes - 1;
        }
        std::mem::swap(&mut c, &mut cn);
        h <<= 1;
    }
    // p[0] is the terminator.
    p[1..].iter().map(|&x| x as u32).collect()
}

/// Kasai: `lcp[r]` is the LCP of suffixes at ranks `r-1` and `r` (0 at rank 0).
fn lcp_array(text: &[Letter], sa: &[u32]) -> Vec<u32> {
    let n = text.len();
    let mut rank = vec![0usize; n];
    for (r, &p) in sa.iter().enumerate() {
        rank[p as usize] = r;
    }
    let mut lcp = vec![0u32; n];
    let mut h = 0usize;
    for i in 0..n {
        if rank[i] > 0 {
            let j = sa[rank[i] - 1] as usize;
            while i + h < n && j + h < n && text[i + h] == text[j + h] {
                h += 1;
            }
            lcp[rank[i]] = h as u32;
            h = h.saturating_sub(1);
        } else {
            h = 0;
        }
    }
    lcp
}
