//! Python module `sosforge`: a loaded spec and the analyses that run on it.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;
use sosforge_core::axioms::{axiom_report, NormalizeBudget, Normalizer};
use sosforge_core::bisim::{are_equal, bisimilar, Bisimilarity, DEFAULT_STATE_CAP};
use sosforge_core::comm::{check_comm, derived_spec};
use sosforge_core::parser::{parse_spec, parse_term};
use sosforge_core::simulate::Simulator;
use sosforge_core::terms::Term;
use sosforge_core::validate::{rule_errors, validate};
use sosforge_core::Error;

create_exception!(sosforge, LimitExceeded, PyRuntimeError, "A state cap, depth cap or rewrite budget was hit.");

fn to_py(e: impl Into<Error>) -> PyErr {
    let e = e.into();
    if e.is_limit() {
        LimitExceeded::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

type WitnessPairs = Vec<(String, String)>;

fn verdict(r: Bisimilarity) -> (bool, WitnessPairs) {
    let pairs = r.witness.map(|w| w.pairs.iter().map(|(a, b)| (a.to_string(), b.to_string())).collect());
    (r.bisimilar, pairs.unwrap_or_default())
}

#[pyclass(name = "Spec", module = "sosforge", frozen)]
pub struct PySpec {
    inner: sosforge_core::spec::Spec,
}

impl PySpec {
    fn term(&self, text: &str) -> PyResult<Term> {
        parse_term(text, &self.inner, true).map_err(to_py)
    }

    /// Analyses beyond validation assume the rules are well formed.
    fn checked(&self) -> PyResult<&sosforge_core::spec::Spec> {
        let errors = rule_errors(&self.inner);
        match errors.first() {
            None => Ok(&self.inner),
            Some(v) => Err(PyValueError::new_err(format!("rules are not in the supported format: {v}"))),
        }
    }
}

#[pymethods]
impl PySpec {
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        Ok(PySpec { inner: parse_spec(text).map_err(to_py)? })
    }

    #[staticmethod]
    fn load(path: std::path::PathBuf) -> PyResult<Self> {
        let text = std::fs::read_to_string(&path)
            .map_err(|e| PyValueError::new_err(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    #[getter]
    fn name(&self) -> &str {
        &self.inner.name
    }

    /// Findings as dicts with `kind`, `rule`, `def`, `message` and `span`.
    fn validate<'py>(&self, py: Python<'py>) -> PyResult<Vec<Bound<'py, PyDict>>> {
        validate(&self.inner)
            .into_iter()
            .map(|v| {
                let d = PyDict::new(py);
                d.set_item("kind", v.kind.to_string())?;
                d.set_item("rule", v.rule)?;
                d.set_item("def", v.def)?;
                d.set_item("message", v.message)?;
                d.set_item("span", v.span)?;
                Ok(d)
            })
            .collect()
    }

    /// Outgoing transitions as `(label, target)` pairs.
    fn simulate(&self, term: &str) -> PyResult<Vec<(String, String)>> {
        let p = self.term(term)?;
        let steps = Simulator::new(self.checked()?).step(&p).map_err(to_py)?;
        Ok(steps.into_iter().map(|s| (s.label.to_string(), s.target.to_string())).collect())
    }

    /// `(bisimilar, witness pairs)`; the pair list is empty when not bisimilar.
    #[pyo3(signature = (left, right, state_cap = DEFAULT_STATE_CAP))]
    fn bisimilar(&self, left: &str, right: &str, state_cap: usize) -> PyResult<(bool, WitnessPairs)> {
        let (p, q) = (self.term(left)?, self.term(right)?);
        Ok(verdict(bisimilar(self.checked()?, &p, &q, state_cap).map_err(to_py)?))
    }

    #[pyo3(signature = (left, right, state_cap = DEFAULT_STATE_CAP))]
    fn are_equal(&self, left: &str, right: &str, state_cap: usize) -> PyResult<(bool, WitnessPairs)> {
        Ok(verdict(are_equal(self.checked()?, left, right, state_cap).map_err(to_py)?))
    }

    #[pyo3(signature = (term, budget = NormalizeBudget::default().max_rewrites))]
    fn normalize(&self, term: &str, budget: usize) -> PyResult<String> {
        let p = self.term(term)?;
        let budget = NormalizeBudget { max_rewrites: budget, ..NormalizeBudget::default() };
        Ok(Normalizer::new(self.checked()?, budget).normalize(&p).map_err(to_py)?.to_string())
    }

    /// The axiom listing, as printed by the command-line tool.
    fn axioms(&self) -> PyResult<String> {
        Ok(axiom_report(self.checked()?).to_string())
    }

    /// `{"commutative": {op: [(rule_a, rule_b, mapping)]}, "failed": {op: [rule numbers]}}`.
    fn comm<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let report = check_comm(self.checked()?);
        let proven = PyDict::new(py);
        for (op, mirrors) in &report.commutative {
            let entries: PyResult<Vec<_>> = mirrors
                .iter()
                .map(|m| {
                    let mapping = PyDict::new(py);
                    for (k, v) in m.pairs() {
                        mapping.set_item(k, v)?;
                    }
                    Ok((m.rule_a, m.rule_b, mapping))
                })
                .collect();
            proven.set_item(op, entries?)?;
        }
        let out = PyDict::new(py);
        out.set_item("commutative", proven)?;
        out.set_item("failed", report.failed.clone())?;
        Ok(out)
    }

    /// The spec text with `[comm]` on every operator the checker proves.
    fn derived(&self) -> PyResult<String> {
        let spec = self.checked()?;
        Ok(derived_spec(spec, &check_comm(spec)).to_string())
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }

    fn __repr__(&self) -> String {
        format!("<sosforge.Spec {}>", self.inner.name)
    }
}

#[pymodule]
fn sosforge(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySpec>()?;
    m.add("LimitExceeded", m.py().get_type::<LimitExceeded>())?;
    Ok(())
}
