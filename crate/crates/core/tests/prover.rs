use urtlab_core::morphisms::{builtin, has_cut_free_check, stable_factor_set, BuiltinName};
use urtlab_core::pansiot::tau;
use urtlab_core::powers::is_undirected_free;
use urtlab_core::prover::*;
use urtlab_core::{Error, Threshold, Word};

#[test]
fn symmetry_reduction_is_exact() {
    for k in 4..=6 {
        let t = Constraint::Threshold(Threshold::dejean_like(k, false).unwrap());
        let full = backtrack_max_length(k, &t, &BacktrackOptions::default()).unwrap();
        let reduced = backtrack_max_length(k, &t, &BacktrackOptions { symmetry: true, ..Default::default() }).unwrap();
        assert_eq!(full.max_length, reduced.max_length, "k={k}");
        assert_eq!(full.max_length, k + 3);
        assert!(reduced.nodes_expanded < full.nodes_expanded);
    }
}

#[test]
fn maximal_words_are_free_and_not_extendable() {
    let k = 5;
    let t = Threshold::dejean_like(k, false).unwrap();
    let out = backtrack_max_length(k, &Constraint::Threshold(t), &BacktrackOptions { symmetry: true, ..Default::default() }).unwrap();
    for w in &out.witnesses {
        assert!(is_undirected_free(w, &t));
        for a in 1..=k as u8 {
            let longer = w.concat(&Word::new(vec![a], k).unwrap());
            assert!(!is_undirected_free(&longer, &t));
        }
    }
}

#[test]
fn unary_cube_witness() {
    let out = backtrack_max_length(2, &Constraint::UnaryPattern(3), &BacktrackOptions::default()).unwrap();
    assert_eq!(out.max_length, 9);
    for w in &out.witnesses {
        assert!(!urtlab_core::powers::scan_unary_pattern(w, 3));
    }
    // three letters avoid it for much longer than any small budget allows
    let tiny = BacktrackOptions { max_nodes: Some(5_000), ..Default::default() };
    assert!(matches!(
        backtrack_max_length(3, &Constraint::UnaryPattern(3), &tiny),
        Err(Error::BudgetExceeded { .. })
    ));
}

#[test]
fn kernel_pairs_satisfy_their_invariants() {
    for k in [4, 8, 12] {
        let f = builtin(BuiltinName::for_alphabet(k).unwrap());
        let code = f.images().to_vec();
        let tau = tau(k).unwrap();
        let pairs = kernel_search(k).unwrap();
        for p in &pairs {
            assert!(p.pi.letters().starts_with(p.eta.letters()));
            let both = p.pi.concat(&p.eta);
            let sf = stable_factor_set(&f, 1, both.len()).unwrap();
            assert!(sf.contains(both.letters()));
            assert!(tau.eval(p.pi.letters()).unwrap().is_identity());
            assert!(has_cut_free_check(&p.eta, &code).unwrap());
            assert!(p.pi.len() <= kernel_period_bound(k, p.eta.len()));
            // the chain 1/(k-2) < (3|eta| + k + 1) / (2|pi|)
            assert!(2 * p.pi.len() < (k - 2) * (3 * p.eta.len() + k + 1));
        }
    }
}

#[test]
fn kernel_reports_pass() {
    for k in [4, 8, 12] {
        let r = kernel_report(k).unwrap();
        assert!(r.passed(), "{r}");
    }
    assert!(kernel_search(5).is_err());
}

#[test]
fn balance_survives_telescoping() {
    let f = builtin(BuiltinName::F4);
    for p in kernel_search(4).unwrap() {
        let trace = telescope(&f, &p, 3).unwrap();
        for (pi, eta) in &trace.levels {
            assert_eq!(pi.count(1), pi.count(2));
            assert_eq!(eta.count(1), eta.count(2));
        }
        let (pi0, eta0) = telescope_lengths(3, 3, 2, p.pi.len() as u64, p.eta.len() as u64);
        assert_eq!(trace.levels[0].0.len() as u64, pi0);
        assert_eq!(trace.levels[0].1.len() as u64, eta0);
        // closed form for k = 4
        assert_eq!(eta0, 27 * p.eta.len() as u64 + 27 - 1);
    }
}

#[test]
fn constructions_are_nested_and_free() {
    for k in [4, 8, 12] {
        let long = construct_w(k, 600).unwrap();
        let short = construct_w(k, 250).unwrap();
        assert_eq!(long.prefix(250), short);
        let t = Threshold::dejean_like(k, true).unwrap();
        assert!(is_undirected_free(&long, &t));
        assert!(!has_reversed_distinct_pair(&long, k));
    }
}

#[test]
fn full_reverse_scan_agrees() {
    for k in [4, 8] {
        let capped = verify_main(k, 800, MainOptions::default()).unwrap();
        let full = verify_main(k, 800, MainOptions { full_reverse_scan: true }).unwrap();
        assert!(capped.passed() && full.passed());
    }
}

#[test]
fn the_bound_is_tight_for_the_construction_alphabets() {
    // a non-strict scan at (k-1)/(k-2) does find repetitions: the exponent
    // is attained
    let w = construct_w(4, 400).unwrap();
    assert!(!is_undirected_free(&w, &Threshold::dejean_like(4, false).unwrap()));
}

#[test]
fn leaf_reports() {
    for k in 6..=12 {
        assert!(check_leaf_factors(k).unwrap().passed());
    }
}
