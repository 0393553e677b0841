//! Python bindings for the lattice library: lattices, certified
//! isometries, Mukai vectors and the monodromy test, with exact big-integer
//! arithmetic crossing the boundary as Python ints.

use std::sync::Arc;

use num_bigint::BigInt;
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::mukai_lattice::disc::{oq_unit_count, DiscriminantGroup, SignClass};
use ::mukai_lattice::isometry::{
    extend_from_perp, in_w, orientation_character, restrict_to_perp, Isometry, Orientation,
    OrientationFrame,
};
use ::mukai_lattice::lattice::IntegralLattice;
use ::mukai_lattice::matrix::IntMat;
use ::mukai_lattice::monodromy::{index_of_w, verify_index, MonodromyContext};
use ::mukai_lattice::mukai::{ample_elliptic, MukaiVector};
use ::mukai_lattice::verify;
use ::mukai_lattice::word::MorphismWord;

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

fn mat_from_rows(rows: Vec<Vec<BigInt>>) -> PyResult<IntMat> {
    IntMat::from_bigint_rows(rows).map_err(err)
}

#[pyclass(name = "Lattice", frozen)]
struct PyLattice {
    inner: Arc<IntegralLattice>,
}

#[pymethods]
impl PyLattice {
    #[new]
    #[pyo3(signature = (gram, name=None))]
    fn new(gram: Vec<Vec<BigInt>>, name: Option<String>) -> PyResult<Self> {
        let gram = mat_from_rows(gram)?;
        Ok(PyLattice {
            inner: Arc::new(IntegralLattice::new(name, gram).map_err(err)?),
        })
    }

    /// Built-in lattices: "U", "E8m", "mukai", "Lk:<k>".
    #[staticmethod]
    fn by_name(name: &str) -> PyResult<Self> {
        Ok(PyLattice {
            inner: Arc::new(IntegralLattice::by_name(name).map_err(err)?),
        })
    }

    #[getter]
    fn rank(&self) -> usize {
        self.inner.rank()
    }

    #[getter]
    fn name(&self) -> Option<String> {
        self.inner.name().map(str::to_string)
    }

    fn gram(&self) -> Vec<Vec<BigInt>> {
        self.inner.gram().to_rows()
    }

    fn det(&self) -> BigInt {
        self.inner.det()
    }

    fn is_even(&self) -> bool {
        self.inner.is_even()
    }

    fn signature(&self) -> PyResult<(usize, usize)> {
        self.inner.signature().map_err(err)
    }

    fn pair(&self, x: Vec<BigInt>, y: Vec<BigInt>) -> PyResult<BigInt> {
        self.inner.pair(&x, &y).map_err(err)
    }

    fn square(&self, x: Vec<BigInt>) -> PyResult<BigInt> {
        self.inner.square(&x).map_err(err)
    }

    fn is_primitive(&self, x: Vec<BigInt>) -> PyResult<bool> {
        self.inner.is_primitive(&x).map_err(err)
    }

    fn divisibility(&self, x: Vec<BigInt>) -> PyResult<BigInt> {
        self.inner.divisibility(&x).map_err(err)
    }

    /// Gram matrix of the saturated orthogonal complement of `v`.
    fn perp_gram(&self, v: Vec<BigInt>) -> PyResult<Vec<Vec<BigInt>>> {
        Ok(self.inner.perp_basis(&v).map_err(err)?.induced_gram().to_rows())
    }

    /// Invariant factors and discriminant-form values (as strings) of L*/L.
    fn discriminant_group(&self) -> PyResult<(Vec<BigInt>, Vec<String>)> {
        let d = DiscriminantGroup::of(&self.inner).map_err(err)?;
        Ok((
            d.invariant_factors().to_vec(),
            d.q_values().iter().map(|q| q.to_string()).collect(),
        ))
    }

    fn __repr__(&self) -> String {
        match self.inner.name() {
            Some(name) => format!("Lattice({}, rank {})", name, self.inner.rank()),
            None => format!("Lattice(rank {})", self.inner.rank()),
        }
    }
}

#[pyclass(name = "Isometry", frozen)]
struct PyIsometry {
    inner: Isometry,
}

#[pymethods]
impl PyIsometry {
    #[new]
    fn new(lattice: &PyLattice, matrix: Vec<Vec<BigInt>>) -> PyResult<Self> {
        let matrix = mat_from_rows(matrix)?;
        Ok(PyIsometry {
            inner: Isometry::certify(lattice.inner.clone(), matrix).map_err(err)?,
        })
    }

    #[staticmethod]
    fn identity(lattice: &PyLattice) -> Self {
        PyIsometry { inner: Isometry::identity(lattice.inner.clone()) }
    }

    fn matrix(&self) -> Vec<Vec<BigInt>> {
        self.inner.matrix().to_rows()
    }

    fn lattice(&self) -> PyLattice {
        PyLattice { inner: self.inner.lattice().clone() }
    }

    fn det(&self) -> BigInt {
        self.inner.det()
    }

    fn apply(&self, v: Vec<BigInt>) -> Vec<BigInt> {
        self.inner.apply(&v)
    }

    fn compose(&self, other: &PyIsometry) -> PyResult<Self> {
        Ok(PyIsometry { inner: self.inner.compose(&other.inner).map_err(err)? })
    }

    fn inverse(&self) -> Self {
        PyIsometry { inner: self.inner.inverse() }
    }

    /// "preserving" or "reversing", on the default positive frame.
    fn orientation(&self) -> PyResult<String> {
        let frame = OrientationFrame::default_for(self.inner.lattice().clone()).map_err(err)?;
        Ok(match orientation_character(&self.inner, &frame).map_err(err)? {
            Orientation::Preserving => "preserving".to_string(),
            Orientation::Reversing => "reversing".to_string(),
        })
    }

    /// "plus_id", "minus_id" or "other".
    fn disc_sign_class(&self) -> PyResult<String> {
        let d = DiscriminantGroup::of(self.inner.lattice()).map_err(err)?;
        Ok(match d.action_of(&self.inner).map_err(err)?.sign_class() {
            SignClass::PlusId => "plus_id".to_string(),
            SignClass::MinusId => "minus_id".to_string(),
            SignClass::Other => "other".to_string(),
        })
    }

    /// Orientation preserving and acting as +-id on the discriminant group.
    fn in_w(&self) -> PyResult<bool> {
        let frame = OrientationFrame::default_for(self.inner.lattice().clone()).map_err(err)?;
        in_w(&self.inner, &frame).map_err(err)
    }

    fn __eq__(&self, other: &PyIsometry) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Isometry(rank {})", self.inner.lattice().rank())
    }
}

#[pyfunction]
fn reflection(lattice: &PyLattice, u: Vec<BigInt>) -> PyResult<PyIsometry> {
    Ok(PyIsometry { inner: Isometry::reflection(lattice.inner.clone(), &u).map_err(err)? })
}

#[pyfunction]
fn transvection(lattice: &PyLattice, z: Vec<BigInt>, a: Vec<BigInt>) -> PyResult<PyIsometry> {
    Ok(PyIsometry { inner: Isometry::transvection(lattice.inner.clone(), &z, &a).map_err(err)? })
}

/// Restrict an isometry of the ambient lattice to the complement of `v`.
#[pyfunction(name = "restrict_to_perp")]
fn py_restrict_to_perp(g: &PyIsometry, v: Vec<BigInt>) -> PyResult<PyIsometry> {
    Ok(PyIsometry { inner: restrict_to_perp(&g.inner, &v).map_err(err)? })
}

/// Extend an isometry of the complement of `v` in the ambient lattice;
/// returns the extension and the sign it applies to `v`.
#[pyfunction(name = "extend_from_perp")]
fn py_extend_from_perp(
    ambient: &PyLattice,
    v: Vec<BigInt>,
    g: &PyIsometry,
) -> PyResult<(PyIsometry, i8)> {
    let (ext, eps) = extend_from_perp(&ambient.inner, &v, &g.inner).map_err(err)?;
    Ok((PyIsometry { inner: ext }, eps))
}

#[pyclass(name = "MukaiVector", frozen)]
struct PyMukaiVector {
    inner: MukaiVector,
}

#[pymethods]
impl PyMukaiVector {
    #[new]
    fn new(r: BigInt, xi: Vec<BigInt>, a: BigInt) -> PyResult<Self> {
        Ok(PyMukaiVector { inner: MukaiVector::new(r, xi, a).map_err(err)? })
    }

    #[getter]
    fn r(&self) -> BigInt {
        self.inner.r.clone()
    }

    #[getter]
    fn xi(&self) -> Vec<BigInt> {
        self.inner.xi.clone()
    }

    #[getter]
    fn a(&self) -> BigInt {
        self.inner.a.clone()
    }

    /// Coordinates in the fixed rank-24 basis.
    fn coords(&self) -> Vec<BigInt> {
        self.inner.coords()
    }

    fn square(&self) -> BigInt {
        self.inner.square()
    }

    fn pair(&self, other: &PyMukaiVector) -> BigInt {
        self.inner.pair(&other.inner)
    }

    /// Splits into (m, w, k) with w primitive and w^2 = 2k.
    fn mk_decompose(&self) -> PyResult<(BigInt, PyMukaiVector, BigInt)> {
        let t = self.inner.mk_decompose().map_err(err)?;
        Ok((t.m, PyMukaiVector { inner: t.w }, t.k))
    }

    fn fm_delta(&self) -> Self {
        PyMukaiVector { inner: self.inner.fm_delta() }
    }

    fn fm_dual(&self) -> Self {
        PyMukaiVector { inner: self.inner.fm_dual() }
    }

    fn fm_poincare(&self) -> Self {
        PyMukaiVector { inner: self.inner.fm_poincare() }
    }

    fn tensor(&self, c: Vec<BigInt>) -> PyResult<Self> {
        Ok(PyMukaiVector { inner: self.inner.tensor(&c).map_err(err)? })
    }

    fn __eq__(&self, other: &PyMukaiVector) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("MukaiVector(r={}, a={})", self.inner.r, self.inner.a)
    }
}

#[pyclass(name = "MonodromyContext", frozen)]
struct PyMonodromyContext {
    inner: MonodromyContext,
}

#[pymethods]
impl PyMonodromyContext {
    #[new]
    fn new(m: u64, k: u64) -> PyResult<Self> {
        Ok(PyMonodromyContext { inner: MonodromyContext::new(m, k).map_err(err)? })
    }

    #[getter]
    fn m(&self) -> u64 {
        self.inner.m()
    }

    #[getter]
    fn k(&self) -> u64 {
        self.inner.k()
    }

    fn mukai_vector(&self) -> PyMukaiVector {
        PyMukaiVector { inner: self.inner.mukai_vector().clone() }
    }

    fn induced_lattice(&self) -> PyLattice {
        PyLattice { inner: self.inner.induced_lattice().clone() }
    }

    /// Membership of an isometry of the complement in the monodromy group.
    fn is_monodromy(&self, g: &PyIsometry) -> PyResult<bool> {
        self.inner.is_monodromy(&g.inner).map_err(err)
    }

    fn generators(&self) -> PyResult<Vec<PyIsometry>> {
        Ok(self
            .inner
            .generators()
            .map_err(err)?
            .into_iter()
            .map(|g| PyIsometry { inner: g })
            .collect())
    }

    /// Ambient coordinates mapped into complement coordinates, if the
    /// vector is orthogonal to the Mukai vector.
    fn perp_coords(&self, ambient: Vec<BigInt>) -> Option<Vec<BigInt>> {
        self.inner.perp_coords(&ambient)
    }
}

#[pyfunction(name = "oq_unit_count")]
fn py_oq_unit_count(k: u64) -> PyResult<u64> {
    oq_unit_count(k).map_err(err)
}

#[pyfunction(name = "index_of_w")]
fn py_index_of_w(k: u64) -> PyResult<u64> {
    index_of_w(k).map_err(err)
}

#[pyfunction(name = "verify_index")]
fn py_verify_index(k_max: u64) -> PyResult<Vec<u64>> {
    verify_index(k_max).map_err(err)
}

#[pyfunction(name = "ample_elliptic")]
fn py_ample_elliptic(alpha: BigInt, beta: BigInt) -> PyResult<bool> {
    ample_elliptic(&alpha, &beta).map_err(err)
}

/// Evaluate a word given as JSON; functor is "phi_tilde", "phi" or "pt".
/// Matrix entries come back as strings to stay exact.
#[pyfunction]
fn eval_word(py: Python<'_>, word_json: &str, functor: &str) -> PyResult<Py<PyAny>> {
    let word: MorphismWord = serde_json::from_str(word_json).map_err(err)?;
    let value = match functor {
        "phi_tilde" => {
            let iso = word.eval_ambient().map_err(err)?;
            serde_json::json!({
                "matrix": rows_as_strings(iso.matrix()),
            })
        }
        "phi" | "pt" => {
            let ev = word.eval_restricted().map_err(err)?;
            serde_json::json!({
                "loop": ev.is_loop(),
                "sign": if ev.sign == Orientation::Preserving { 1 } else { -1 },
                "matrix": rows_as_strings(&ev.matrix),
            })
        }
        other => return Err(err(format!("unknown functor {:?}", other))),
    };
    json_to_py(py, &value)
}

fn rows_as_strings(m: &IntMat) -> Vec<Vec<String>> {
    m.to_rows()
        .iter()
        .map(|r| r.iter().map(|x| x.to_string()).collect())
        .collect()
}

/// Run the verification suite; returns (all_passed, lines).
#[pyfunction]
#[pyo3(signature = (seed=0))]
fn run_verification(seed: u64) -> PyResult<(bool, Vec<String>)> {
    let report = verify::run(None, seed).map_err(err)?;
    let lines = report
        .checks
        .iter()
        .map(|c| {
            format!(
                "{} {} ({} ms)",
                if c.status == verify::Status::Pass { "pass" } else { "FAIL" },
                c.id,
                c.millis
            )
        })
        .collect();
    Ok((report.all_passed(), lines))
}

fn json_to_py(py: Python<'_>, value: &serde_json::Value) -> PyResult<Py<PyAny>> {
    use pyo3::types::{PyDict, PyList};
    Ok(match value {
        serde_json::Value::Null => py.None(),
        serde_json::Value::Bool(b) => b.into_pyobject(py)?.to_owned().unbind().into(),
        serde_json::Value::Number(n) => {
            if let Some(i) = n.as_i64() {
                i.into_pyobject(py)?.unbind().into()
            } else {
                n.to_string().into_pyobject(py)?.unbind().into()
            }
        }
        serde_json::Value::String(s) => s.into_pyobject(py)?.unbind().into(),
        serde_json::Value::Array(items) => {
            let list = PyList::empty(py);
            for item in items {
                list.append(json_to_py(py, item)?)?;
            }
            list.unbind().into()
        }
        serde_json::Value::Object(map) => {
            let dict = PyDict::new(py);
            for (key, item) in map {
                dict.set_item(key, json_to_py(py, item)?)?;
            }
            dict.unbind().into()
        }
    })
}

#[pymodule(name = "mukai_lattice")]
fn pymodule_init(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyLattice>()?;
    m.add_class::<PyIsometry>()?;
    m.add_class::<PyMukaiVector>()?;
    m.add_class::<PyMonodromyContext>()?;
    m.add_function(wrap_pyfunction!(reflection, m)?)?;
    m.add_function(wrap_pyfunction!(transvection, m)?)?;
    m.add_function(wrap_pyfunction!(py_restrict_to_perp, m)?)?;
    m.add_function(wrap_pyfunction!(py_extend_from_perp, m)?)?;
    m.add_function(wrap_pyfunction!(py_oq_unit_count, m)?)?;
    m.add_function(wrap_pyfunction!(py_index_of_w, m)?)?;
    m.add_function(wrap_pyfunction!(py_verify_index, m)?)?;
    m.add_function(wrap_pyfunction!(py_ample_elliptic, m)?)?;
    m.add_function(wrap_pyfunction!(eval_word, m)?)?;
    m.add_function(wrap_pyfunction!(run_verification, m)?)?;
    Ok(())
}
