//! Python bindings. Words and thresholds are classes; everything else is a
//! function returning plain Python values (reports and search outcomes come
//! back as dicts built from their JSON form).

use pyo3::create_exception;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use urtlab_core::morphisms::builtin_by_name;
use urtlab_core::powers::{scan, ScanOptions};
use urtlab_core::prover::{
    backtrack_max_length, check_leaf_factors, construct_w, find_intertwiner, kernel_report, kernel_search,
    verify_main, verify_product, verify_urt3, BacktrackOptions, Constraint, MainOptions, URT3_SCAN_LENGTH,
};
use urtlab_core::{pansiot, Error};

create_exception!(urtlab, UrtlabError, PyValueError);
create_exception!(urtlab, BudgetExceeded, UrtlabError);

fn err(e: Error) -> PyErr {
    match e {
        Error::BudgetExceeded { .. } => BudgetExceeded::new_err(e.to_string()),
        _ => UrtlabError::new_err(e.to_string()),
    }
}

fn from_json<'py, T: serde::Serialize>(py: Python<'py>, value: &T) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| UrtlabError::new_err(e.to_string()))?;
    py.import("json")?.call_method1("loads", (text,))
}

// Vec<u8> would cross over as bytes.
fn as_list(letters: &[u8]) -> Vec<u32> {
    letters.iter().map(|&a| a as u32).collect()
}

#[derive(FromPyObject)]
enum WordInput {
    Text(String),
    Letters(Vec<u32>),
}

/// A finite word over `1..=k`.
#[pyclass(module = "urtlab", frozen, eq, hash, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash)]
struct Word(urtlab_core::Word);

#[pymethods]
impl Word {
    /// `Word("12312", 3)` or `Word([1, 2, 3, 1, 2], 3)`. Text uses digits for
    /// k <= 9 and space-separated numbers above.
    #[new]
    fn new(letters: WordInput, k: usize) -> PyResult<Self> {
        let w = match letters {
            WordInput::Text(s) => urtlab_core::Word::parse(&s, k),
            WordInput::Letters(v) => {
                let mut out = Vec::with_capacity(v.len());
                for a in v {
                    if a == 0 || a as usize > k || a > 255 {
                        return Err(err(Error::LetterOutOfRange { letter: a, k }));
                    }
                    out.push(a as u8);
                }
                urtlab_core::Word::new(out, k)
            }
        };
        w.map(Word).map_err(err)
    }

    #[getter]
    fn k(&self) -> usize {
        self.0.alphabet_size()
    }

    fn letters(&self) -> Vec<u32> {
        as_list(self.0.letters())
    }

    fn reverse(&self) -> Word {
        Word(self.0.reverse())
    }

    fn __len__(&self) -> usize {
        self.0.len()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Word({:?}, {})", self.0.to_string(), self.0.alphabet_size())
    }
}

/// An exponent bound `num/den`, strict (`α⁺`) or not.
#[pyclass(module = "urtlab", frozen, skip_from_py_object)]
#[derive(Clone)]
struct Threshold(urtlab_core::Threshold);

#[pymethods]
impl Threshold {
    #[new]
    #[pyo3(signature = (num, den, strict = false))]
    fn new(num: u64, den: u64, strict: bool) -> PyResult<Self> {
        urtlab_core::Threshold::new(num, den, strict).map(Threshold).map_err(err)
    }

    /// Parses `"7/4"` or `"7/4+"`.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        let (body, strict) = match text.strip_suffix('+') {
            Some(b) => (b, true),
            None => (text, false),
        };
        urtlab_core::Threshold::parse(body, strict).map(Threshold).map_err(err)
    }

    /// `(k-1)/(k-2)`, with `strict` selecting the `⁺` variant.
    #[staticmethod]
    #[pyo3(signature = (k, strict = false))]
    fn dejean_like(k: usize, strict: bool) -> PyResult<Self> {
        urtlab_core::Threshold::dejean_like(k, strict).map(Threshold).map_err(err)
    }

    #[getter]
    fn strict(&self) -> bool {
        self.0.is_strict()
    }

    /// `(numerator, denominator)` in lowest terms.
    #[getter]
    fn alpha(&self) -> (u64, u64) {
        let a = self.0.alpha();
        (*a.numer(), *a.denom())
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Threshold({:?})", self.0.to_string())
    }
}

/// Maximal witnesses `xyx'` forbidden by `threshold`, as dicts with keys
/// start, period, excess, kind and exponent.
#[pyfunction]
#[pyo3(signature = (word, threshold, ordinary = true, reverse = true, exhaustive = false))]
fn find_powers<'py>(
    py: Python<'py>,
    word: &Word,
    threshold: &Threshold,
    ordinary: bool,
    reverse: bool,
    exhaustive: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let opts = ScanOptions { ordinary, reverse, exhaustive, max_reverse_excess: None };
    let found = py.detach(|| scan(word.0.letters(), &threshold.0, opts));
    from_json(py, &found)
}

/// Whether `word` avoids every undirected power forbidden by `threshold`.
#[pyfunction]
fn is_free(py: Python<'_>, word: &Word, threshold: &Threshold) -> bool {
    py.detach(|| urtlab_core::powers::is_undirected_free(&word.0, &threshold.0))
}

/// `{"prefix": Word, "code": Word, "initial_ranking": [int]}`.
#[pyfunction]
fn encode<'py>(py: Python<'py>, word: &Word, k: usize) -> PyResult<Bound<'py, PyDict>> {
    let enc = pansiot::encode(&word.0, k).map_err(err)?;
    let d = PyDict::new(py);
    d.set_item("prefix", Word(enc.prefix))?;
    d.set_item("code", Word(enc.code))?;
    d.set_item("initial_ranking", as_list(enc.initial_ranking.images()))?;
    Ok(d)
}

/// Rebuilds a word from its prefix and ternary code, checking the result.
#[pyfunction]
fn decode(prefix: &Word, code: &Word, k: usize) -> PyResult<Word> {
    pansiot::decode_checked(&prefix.0, &code.0, k).map(Word).map_err(err)
}

/// Prefix of length `n` of the fixed point of a built-in morphism
/// (f24, f4, f8, f12, g) starting with `seed`.
#[pyfunction]
#[pyo3(signature = (name, n, seed = 1))]
fn fixed_point(name: &str, n: usize, seed: u8) -> PyResult<Word> {
    let h = builtin_by_name(name).map_err(err)?;
    h.fixed_point_prefix(seed, n).map(Word).map_err(err)
}

/// Prefix of length `n` of the word over `k ∈ {4, 8, 12}` letters built from
/// the binary morphism and the ternary code.
#[pyfunction]
fn construct(py: Python<'_>, k: usize, n: usize) -> PyResult<Word> {
    py.detach(|| construct_w(k, n)).map(Word).map_err(err)
}

/// Kernel pairs `(π, η)` for `k ∈ {4, 8, 12}`, as strings.
#[pyfunction]
fn kernel_pairs(py: Python<'_>, k: usize) -> PyResult<Vec<(String, String)>> {
    let pairs = py.detach(|| kernel_search(k)).map_err(err)?;
    Ok(pairs.into_iter().map(|p| (p.pi.to_string(), p.eta.to_string())).collect())
}

/// Image list of a permutation conjugating the `τ`-images of the morphism
/// images back to `τ`, or None.
#[pyfunction]
fn intertwiner(py: Python<'_>, k: usize) -> PyResult<Option<Vec<u32>>> {
    let phi = py.detach(|| find_intertwiner(k)).map_err(err)?;
    Ok(phi.map(|p| as_list(p.images())))
}

/// Exhaustive search for the longest word over `k` letters avoiding either
/// `threshold` (undirected) or the pattern `x^m` up to reversal.
#[pyfunction]
#[pyo3(signature = (k, threshold = None, pattern_m = None, symmetry = true, max_nodes = Some(100_000_000), max_witnesses = 16))]
fn longest_free_word<'py>(
    py: Python<'py>,
    k: usize,
    threshold: Option<&Threshold>,
    pattern_m: Option<usize>,
    symmetry: bool,
    max_nodes: Option<u64>,
    max_witnesses: usize,
) -> PyResult<Bound<'py, PyAny>> {
    let constraint = match (threshold, pattern_m) {
        (Some(t), None) => Constraint::Threshold(t.0),
        (None, Some(m)) => Constraint::UnaryPattern(m),
        _ => return Err(UrtlabError::new_err("give exactly one of threshold and pattern_m")),
    };
    let opts = BacktrackOptions { symmetry, max_nodes, max_witnesses };
    let out = py.detach(|| backtrack_max_length(k, &constraint, &opts)).map_err(err)?;
    from_json(py, &out)
}

/// Runs one of the finite verifications and returns its report as a dict
/// `{"theorem", "checks": [{"name", "pass", "details"}]}`. Theorems: urt3,
/// product, leaves (uses `k`), main-4, main-8, main-12.
#[pyfunction]
#[pyo3(signature = (theorem, length = None, k = 6, full_reverse_scan = false))]
fn verify<'py>(
    py: Python<'py>,
    theorem: &str,
    length: Option<usize>,
    k: usize,
    full_reverse_scan: bool,
) -> PyResult<Bound<'py, PyAny>> {
    let run = || match theorem {
        "urt3" => verify_urt3(length.unwrap_or(URT3_SCAN_LENGTH)),
        "product" => verify_product(length.unwrap_or(2000)),
        "leaves" => check_leaf_factors(k),
        "main-4" | "main-8" | "main-12" => {
            let k: usize = theorem[5..].parse().expect("matched above");
            let mut r = verify_main(k, length.unwrap_or(3000), MainOptions { full_reverse_scan })?;
            r.extend(kernel_report(k)?);
            Ok(r)
        }
        other => Err(Error::Unsupported(format!("unknown theorem `{other}`"))),
    };
    let report = py.detach(run).map_err(err)?;
    from_json(py, &report)
}

#[pymodule]
fn urtlab(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("UrtlabError", m.py().get_type::<UrtlabError>())?;
    m.add("BudgetExceeded", m.py().get_type::<BudgetExceeded>())?;
    m.add_class::<Word>()?;
    m.add_class::<Threshold>()?;
    m.add_function(wrap_pyfunction!(find_powers, m)?)?;
    m.add_function(wrap_pyfunction!(is_free, m)?)?;
    m.add_function(wrap_pyfunction!(encode, m)?)?;
    m.add_function(wrap_pyfunction!(decode, m)?)?;
    m.add_function(wrap_pyfunction!(fixed_point, m)?)?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(kernel_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(intertwiner, m)?)?;
    m.add_function(wrap_pyfunction!(longest_free_word, m)?)?;
    m.add_function(wrap_pyfunction!(verify, m)?)?;
    Ok(())
}
