//! Python bindings: snapshots, co-t-structures, co-slicings, conditions and
//! the scenario commands.

use ::costab::cli::{self, Context};
use ::costab::coslice::{self, CoSlicing, Distance};
use ::costab::costab::{self as cs, CentralCharge, CoStabilityCondition, CoStabilityFunction, DeformOptions, ScanVerdict};
use ::costab::cotstruct::{self, Coheart, CoTStructure};
use ::costab::engine::AlgebraPresentation;
use ::costab::field::FieldChoice;
use ::costab::report::{Report, Verdict};
use ::costab::snapshot::{BuildConfig, IndecId, Snapshot};
use ::costab::Error;
use num_complex::Complex64;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use std::collections::BTreeMap;
use std::path::PathBuf;

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Precondition(_) | Error::Validation(_) | Error::Parse(_) | Error::Schema(_) | Error::UndefinedPhase(_) => {
            PyValueError::new_err(e.to_string())
        }
        e => PyRuntimeError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for ::costab::Result<T> {
    fn py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Finite model of the homotopy category over a builtin or file algebra.
#[pyclass(name = "Snapshot", module = "costab_py", frozen)]
struct PySnapshot {
    inner: Snapshot,
}

impl PySnapshot {
    fn id(&self, label: &str) -> PyResult<IndecId> {
        self.inner.parse_id(label).py()
    }

    fn ids(&self, labels: &[String]) -> PyResult<Vec<IndecId>> {
        labels.iter().map(|l| self.id(l)).collect()
    }

    fn labels(&self, ids: impl IntoIterator<Item = IndecId>) -> Vec<String> {
        ids.into_iter().map(|i| self.inner.id_label(i)).collect()
    }
}

#[pymethods]
impl PySnapshot {
    #[new]
    #[pyo3(signature = (algebra = "a2", window = (-2, 2), width = 2, field = "Q", seed = 0))]
    fn new(algebra: &str, window: (i32, i32), width: usize, field: &str, seed: u64) -> PyResult<Self> {
        let field: FieldChoice = field.parse().map_err(PyValueError::new_err)?;
        let pres = AlgebraPresentation::resolve(algebra).py()?.with_field(field);
        let cfg = BuildConfig { width_bound: width, window, seed, ..BuildConfig::default() };
        Ok(PySnapshot { inner: Snapshot::build(pres, &cfg).py()? })
    }

    #[staticmethod]
    fn load(path: PathBuf) -> PyResult<Self> {
        Ok(PySnapshot { inner: Snapshot::load(&path).py()? })
    }

    fn save(&self, path: PathBuf) -> PyResult<()> {
        self.inner.save(&path).py()
    }

    fn to_toml(&self) -> String {
        self.inner.to_toml()
    }

    #[getter]
    fn window(&self) -> (i32, i32) {
        self.inner.window
    }

    #[getter]
    fn orbits(&self) -> Vec<String> {
        self.inner.orbits.iter().map(|o| o.label.clone()).collect()
    }

    #[getter]
    fn k0_rank(&self) -> usize {
        self.inner.k0_rank()
    }

    #[getter]
    fn k0_basis(&self) -> Vec<String> {
        self.inner.k0_basis.clone()
    }

    fn window_ids(&self) -> Vec<String> {
        self.labels(self.inner.window_ids())
    }

    fn hom(&self, a: &str, b: &str) -> PyResult<u32> {
        self.inner.hom(self.id(a)?, self.id(b)?).py()
    }

    /// K0 class of a formal object such as `"x + 2 y[1]"`.
    fn class_of(&self, object: &str) -> PyResult<Vec<i64>> {
        Ok(self.inner.class(&self.inner.parse_object(object).py()?))
    }

    fn validate(&self) -> PyResult<()> {
        self.inner.validate().py()
    }

    fn __repr__(&self) -> String {
        format!("Snapshot({}, window={:?}, orbits={:?})", self.inner.algebra, self.inner.window, self.orbits())
    }
}

#[pyclass(name = "Report", module = "costab_py", frozen)]
struct PyReport {
    inner: Report,
}

#[pymethods]
impl PyReport {
    /// `(name, status, detail)` per check.
    #[getter]
    fn checks(&self) -> Vec<(String, &'static str, Option<String>)> {
        self.inner
            .checks
            .iter()
            .map(|c| match &c.verdict {
                Verdict::Pass => (c.name.clone(), "pass", None),
                Verdict::Fail(d) => (c.name.clone(), "fail", Some(d.clone())),
                Verdict::Unverifiable(d) => (c.name.clone(), "unverifiable", Some(d.clone())),
            })
            .collect()
    }

    #[getter]
    fn notes(&self) -> Vec<String> {
        self.inner.notes.clone()
    }

    fn all_pass(&self) -> bool {
        self.inner.all_pass()
    }

    fn exit_code(&self) -> i32 {
        self.inner.exit_code()
    }

    fn to_toml(&self) -> String {
        self.inner.to_text()
    }

    fn __str__(&self) -> String {
        self.inner.to_string()
    }
}

fn report(r: Report) -> PyReport {
    PyReport { inner: r }
}

#[pyclass(name = "CoTStructure", module = "costab_py", frozen)]
struct PyCoTStructure {
    inner: CoTStructure,
}

#[pymethods]
impl PyCoTStructure {
    #[staticmethod]
    fn from_coheart(snap: &PySnapshot, coheart: Vec<String>) -> PyResult<Self> {
        let c = Coheart::new(snap.ids(&coheart)?).py()?;
        Ok(PyCoTStructure { inner: CoTStructure::from_coheart(&snap.inner, &c).py()? })
    }

    #[staticmethod]
    fn from_toml(snap: &PySnapshot, text: &str) -> PyResult<Self> {
        Ok(PyCoTStructure { inner: CoTStructure::from_toml(&snap.inner, text).py()? })
    }

    fn to_toml(&self, snap: &PySnapshot) -> String {
        self.inner.to_toml(&snap.inner)
    }

    fn aisle(&self, snap: &PySnapshot) -> Vec<String> {
        snap.labels(self.inner.aisle.iter().copied())
    }

    fn coaisle(&self, snap: &PySnapshot) -> Vec<String> {
        snap.labels(self.inner.coaisle.iter().copied())
    }

    fn coheart(&self, snap: &PySnapshot) -> Vec<String> {
        snap.labels(self.inner.coheart_ids(&snap.inner))
    }

    fn check(&self, snap: &PySnapshot) -> PyReport {
        report(cotstruct::check_cotstructure(&snap.inner, &self.inner))
    }
}

#[pyclass(name = "CoSlicing", module = "costab_py", frozen)]
struct PyCoSlicing {
    inner: CoSlicing,
}

#[pymethods]
impl PyCoSlicing {
    /// From `[(phase, [ids])]` with phases written like `"1/2"` or `"0.3"`.
    #[new]
    fn new(snap: &PySnapshot, slices: Vec<(String, Vec<String>)>) -> PyResult<Self> {
        let parsed = slices
            .iter()
            .map(|(p, ids)| Ok((p.parse().py()?, snap.ids(ids)?)))
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyCoSlicing { inner: CoSlicing::from_slices(parsed).py()? })
    }

    #[staticmethod]
    fn from_toml(snap: &PySnapshot, text: &str) -> PyResult<Self> {
        Ok(PyCoSlicing { inner: CoSlicing::from_toml(&snap.inner, text).py()? })
    }

    fn to_toml(&self, snap: &PySnapshot) -> String {
        self.inner.to_toml(&snap.inner)
    }

    fn describe(&self, snap: &PySnapshot) -> String {
        self.inner.describe(&snap.inner)
    }

    fn phase_of(&self, snap: &PySnapshot, id: &str) -> PyResult<Option<f64>> {
        Ok(self.inner.phase_of(snap.id(id)?).map(|p| p.value()))
    }

    fn check_axioms(&self, snap: &PySnapshot) -> PyReport {
        report(coslice::check_axioms(&snap.inner, &self.inner))
    }

    /// `None` when condition (S) holds, otherwise the offending pair.
    fn condition_s_witness(&self, snap: &PySnapshot) -> PyResult<Option<(String, String)>> {
        let s = coslice::check_condition_s(&snap.inner, &self.inner).py()?;
        Ok(s.witness.map(|(a, b)| (snap.inner.id_label(a), snap.inner.id_label(b))))
    }

    fn epsilon0(&self) -> PyResult<f64> {
        coslice::epsilon0(&self.inner).py()
    }

    fn induced_cotstructure(&self, snap: &PySnapshot) -> PyResult<PyCoTStructure> {
        Ok(PyCoTStructure { inner: coslice::induced_cotstructure(&snap.inner, &self.inner).py()? })
    }

    fn __eq__(&self, other: &PyCoSlicing) -> bool {
        self.inner == other.inner
    }
}

/// `(value, exact)`: exact below 1/2; above it `value` is the refined bound or `None`.
#[pyfunction]
fn metric(snap: &PySnapshot, q: &PyCoSlicing, r: &PyCoSlicing) -> (Option<f64>, bool) {
    match coslice::metric(&snap.inner, &q.inner, &r.inner) {
        Distance::Exact(v) => (Some(v), true),
        d @ Distance::AtLeastHalf { .. } => (d.value(), false),
    }
}

#[pyclass(name = "Condition", module = "costab_py", frozen)]
struct PyCondition {
    inner: CoStabilityCondition,
}

#[pymethods]
impl PyCondition {
    #[new]
    fn new(charge: Vec<Complex64>, slicing: &PyCoSlicing) -> Self {
        PyCondition { inner: CoStabilityCondition { charge: CentralCharge::new(charge), slicing: slicing.inner.clone() } }
    }

    #[staticmethod]
    fn from_toml(snap: &PySnapshot, text: &str) -> PyResult<Self> {
        Ok(PyCondition { inner: CoStabilityCondition::from_toml(&snap.inner, text, None).py()? })
    }

    fn to_toml(&self, snap: &PySnapshot) -> String {
        self.inner.to_toml(&snap.inner)
    }

    /// Charge values on the K0 basis.
    #[getter]
    fn charge(&self) -> Vec<Complex64> {
        self.inner.charge.values.clone()
    }

    #[getter]
    fn slicing(&self) -> PyCoSlicing {
        PyCoSlicing { inner: self.inner.slicing.clone() }
    }

    fn charge_of(&self, snap: &PySnapshot, object: &str) -> PyResult<Complex64> {
        Ok(self.inner.charge.of(&snap.inner, &snap.inner.parse_object(object).py()?))
    }

    fn validate(&self, snap: &PySnapshot) -> PyReport {
        report(cs::validate_condition(&snap.inner, &self.inner))
    }

    fn act_shift(&self, k: i32) -> PyCondition {
        PyCondition { inner: cs::act_shift(&self.inner, k) }
    }

    /// Right action of the rotation-scaling `lam` with phase shift `a`.
    fn act_g(&self, lam: Complex64, a: f64) -> PyResult<PyCondition> {
        let g = cs::GElement::new(lam, ::costab::phase::Phase::Approx(a)).py()?;
        Ok(PyCondition { inner: cs::act_g(&self.inner, &g) })
    }

    /// `(deformed condition, distance, swaps)`.
    #[pyo3(signature = (snap, charge, eps = None, snap_denominator = None))]
    fn deform(
        &self,
        snap: &PySnapshot,
        charge: Vec<Complex64>,
        eps: Option<f64>,
        snap_denominator: Option<i64>,
    ) -> PyResult<(PyCondition, f64, usize)> {
        let eps = match eps {
            Some(e) => e,
            None => coslice::epsilon0(&self.inner.slicing).py()? / 2.0,
        };
        let mut opts = DeformOptions::new(eps);
        opts.snap_denominator = snap_denominator;
        let d = cs::deform(&snap.inner, &self.inner, &CentralCharge::new(charge), &opts).py()?;
        Ok((PyCondition { inner: d.condition }, d.distance, d.swaps))
    }

    /// `("none" | "exists" | "inconclusive", trace)`.
    fn counterexample_scan(&self, snap: &PySnapshot, charge: Vec<Complex64>) -> PyResult<(&'static str, Vec<String>)> {
        let scan = cs::counterexample_scan(&snap.inner, &self.inner, &CentralCharge::new(charge)).py()?;
        let v = match scan.verdict {
            ScanVerdict::NoneExists => "none",
            ScanVerdict::Exists(_) => "exists",
            ScanVerdict::Inconclusive(_) => "inconclusive",
        };
        Ok((v, scan.trace))
    }
}

/// Packs a co-t-structure and co-heart values into a condition.
#[pyfunction]
fn pack(snap: &PySnapshot, structure: &PyCoTStructure, values: BTreeMap<String, Complex64>) -> PyResult<PyCondition> {
    let mut map = BTreeMap::new();
    for (k, v) in values {
        map.insert(snap.id(&k)?, v);
    }
    let coheart = Coheart::new(map.keys().copied()).py()?;
    let f = CoStabilityFunction::new(coheart, map).py()?;
    Ok(PyCondition { inner: cs::pack(&snap.inner, &structure.inner, &f).py()? })
}

#[pyfunction]
fn unpack(snap: &PySnapshot, condition: &PyCondition) -> PyResult<(PyCoTStructure, BTreeMap<String, Complex64>)> {
    let (p, f) = cs::unpack(&snap.inner, &condition.inner).py()?;
    let values = f.values.iter().map(|(&k, &v)| (snap.inner.id_label(k), v)).collect();
    Ok((PyCoTStructure { inner: p }, values))
}

#[pyfunction]
fn enumerate_cohearts(snap: &PySnapshot) -> Vec<Vec<String>> {
    cotstruct::enumerate_cohearts(&snap.inner).found.iter().map(|c| snap.labels(c.coheart.ids.clone())).collect()
}

/// Filtration factors of `object` as `(factor, level)` pairs.
#[pyfunction]
#[pyo3(signature = (snap, coheart, object, seed = None))]
fn heart_filtration(snap: &PySnapshot, coheart: Vec<String>, object: &str, seed: Option<u64>) -> PyResult<Vec<(String, f64)>> {
    let c = Coheart::new(snap.ids(&coheart)?).py()?;
    let t = snap.inner.parse_object(object).py()?;
    let tower = cotstruct::heart_filtration(&snap.inner, &c, &t, seed).py()?;
    Ok(tower.factors.iter().map(|f| (snap.inner.object_label(&f.object), f.tag.value())).collect())
}

fn context(algebra: &str, seed: u64) -> Context {
    let mut ctx = Context::new(algebra);
    ctx.seed = seed;
    ctx
}

#[pyfunction]
#[pyo3(signature = (eps = vec![0.1, 0.25, 0.49], seed = cli::DEFAULT_SEED))]
fn demo_counterexample(eps: Vec<f64>, seed: u64) -> PyResult<PyReport> {
    Ok(report(cli::cmd_demo_counterexample(&context("a2", seed), &eps).py()?))
}

/// `(report, chart csv)`.
#[pyfunction]
#[pyo3(signature = (samples = 50, seed = cli::DEFAULT_SEED))]
fn demo_theorem_b(samples: usize, seed: u64) -> PyResult<(PyReport, String)> {
    let mut ctx = context("dual", seed);
    ctx.width = 3;
    let w = cli::cmd_demo_theorem_b(&ctx, samples).py()?;
    Ok((report(w.report), w.csv))
}

#[pymodule]
fn costab_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySnapshot>()?;
    m.add_class::<PyReport>()?;
    m.add_class::<PyCoTStructure>()?;
    m.add_class::<PyCoSlicing>()?;
    m.add_class::<PyCondition>()?;
    m.add_function(wrap_pyfunction!(metric, m)?)?;
    m.add_function(wrap_pyfunction!(pack, m)?)?;
    m.add_function(wrap_pyfunction!(unpack, m)?)?;
    m.add_function(wrap_pyfunction!(enumerate_cohearts, m)?)?;
    m.add_function(wrap_pyfunction!(heart_filtration, m)?)?;
    m.add_function(wrap_pyfunction!(demo_counterexample, m)?)?;
    m.add_function(wrap_pyfunction!(demo_theorem_b, m)?)?;
    Ok(())
}
