use crate::error::Result;
use crate::morphisms::{alignments, builtin, cuts, factors_stabilize_at, stable_factor_set, BuiltinName};
use crate::powers::{reference, scan, ScanOptions};
use crate::report::Report;
use crate::word::{direct_product, max_reversible_factor_length, reversible_bound, Letter, Threshold, Word};

/// Default prefix length for the smoke scan of the 24-uniform fixed point.
pub const URT3_SCAN_LENGTH: usize = 5000;

fn seven_fourths() -> Threshold {
    Threshold::new(7, 4, true).expect("7/4 is a valid threshold")
}

/// The finite facts behind the undirected `7/4⁺`-freeness of the fixed point
/// of the 24-uniform ternary morphism, plus a direct scan of a prefix.
pub fn verify_urt3(scan_length: usize) -> Result<Report> {
    let f = builtin(BuiltinName::F24);
    let mut report = Report::new("urt3");

    let sf = stable_factor_set(&f, 1, 19)?;
    let reversible: Vec<&[Letter]> = sf
        .factors(19)
        .filter(|x| sf.contains(&x.iter().rev().copied().collect::<Vec<_>>()))
        .collect();
    report.push(
        "no-reversible-factor-of-length-19",
        reversible.is_empty(),
        format!(
            "{} factors of length 19 ({}), {} reversible",
            sf.count(19),
            sf,
            reversible.len()
        ),
    );

    let f3 = f.iterate(&Word::new(vec![1], 3)?, 3)?;
    let longest = reversible_bound(f3.letters(), 19);
    report.push(
        "longest-reversible-factor-of-f^3",
        longest <= 18,
        format!("longest reversible factor of f^3(0) has length {longest}"),
    );

    for len in [41, 62] {
        let ok = factors_stabilize_at(&f, 1, len, 3)?;
        report.push(
            format!("factors-up-to-{len}-appear-in-f^3"),
            ok,
            format!("factor set of length <= {len} of f^3(0) is closed under f: {ok}"),
        );
    }

    // Reverse powers above 7/4 have |x| <= 18, so span < 42: scan f^3 for them.
    let t = seven_fourths();
    let reverse_only = ScanOptions { ordinary: false, ..ScanOptions::default() };
    let rev = reference::scan_bounded(f3.letters(), &t, reverse_only, 42);
    report.push(
        "no-short-reverse-power-in-f^3",
        rev.is_empty(),
        format!("{} reverse 7/4+ powers of span < 42 in f^3(0)", rev.len()),
    );
    let ord = scan(f3.letters(), &t, ScanOptions::ordinary_only());
    report.push(
        "f^3-is-ordinary-7/4+-free",
        ord.is_empty(),
        format!("{} ordinary 7/4+ powers in f^3(0) ({} letters)", ord.len(), f3.len()),
    );

    // Factors of length >= 28 contain one of three words that sit at a single
    // offset of a single block, which forces a cut into the longer factor.
    let code = f.images().to_vec();
    let sync: Vec<Word> = ["12131", "23212", "31323"].iter().map(|s| Word::parse(s, 3)).collect::<Result<_>>()?;
    let mut unique = true;
    for x in &sync {
        unique &= alignments(x, &code)?.len() == 1;
    }
    report.push(
        "synchronizing-factors",
        unique,
        "01020, 12101, 20212 each occur at one offset of one block",
    );
    let sf28 = stable_factor_set(&f, 1, 28)?;
    let mut covered = true;
    let mut all_cut = true;
    for x in sf28.factors(28) {
        covered &= sync.iter().any(|y| x.windows(5).any(|z| z == y.letters()));
        all_cut &= !cuts(&Word::new(x.to_vec(), 3)?, &code)?.is_empty();
    }
    report.push(
        "long-factors-have-cuts",
        covered && all_cut,
        format!(
            "each of the {} factors of length 28 contains a synchronizing factor ({covered}) and has a cut ({all_cut})",
            sf28.count(28)
        ),
    );

    let prefix = f.fixed_point_prefix(1, scan_length)?;
    let witnesses = scan(prefix.letters(), &t, ScanOptions::default());
    report.push(
        "prefix-scan",
        witnesses.is_empty(),
        format!("{} undirected 7/4+ witnesses in a prefix of length {scan_length}", witnesses.len()),
    );
    Ok(report)
}

/// `u ⊗ (123)^ω` for a prefix `u` of the 24-uniform fixed point: every
/// reverse power in it is ordinary, so it inherits ordinary freeness.
pub fn verify_product(n: usize) -> Result<Report> {
    let f = builtin(BuiltinName::F24);
    let u = f.fixed_point_prefix(1, n)?;
    let v = Word::new((0..n).map(|i| (i % 3) as Letter + 1).collect(), 3)?;
    let w = direct_product(&u, &v)?;
    let t = seven_fourths();
    let mut report = Report::new("product");
    let witnesses = scan(w.letters(), &t, ScanOptions::default());
    report.push(
        "product-is-free",
        witnesses.is_empty(),
        format!("{} undirected 7/4+ witnesses in a {n}-letter product over {} letters", witnesses.len(), w.alphabet_size()),
    );
    let rv = max_reversible_factor_length(&v, n);
    let rw = max_reversible_factor_length(&w, n);
    report.push(
        "short-reversible-factors",
        rv <= 1 && rw <= 1,
        format!("longest reversible factor: {rv} in (123)^w, {rw} in the product"),
    );
    Ok(report)
}
