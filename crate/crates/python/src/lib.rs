//! Python bindings: `import lcover`.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

use ::lcover as core;
use core::{BasisChoice, ConstructConfig, Mode};

fn py_err(e: core::Error) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// A verified ℓ-covering of `Z_n`.
#[pyclass(name = "CoveringSet", module = "lcover", frozen)]
struct PyCoveringSet {
    inner: core::CoveringSet,
}

#[pymethods]
impl PyCoveringSet {
    #[getter]
    fn n(&self) -> u64 {
        self.inner.n
    }

    #[getter]
    fn ell(&self) -> u64 {
        self.inner.ell
    }

    #[getter]
    fn slopes(&self) -> Vec<u64> {
        self.inner.slopes.clone()
    }

    #[getter]
    fn method(&self) -> &'static str {
        self.inner.method.as_str()
    }

    #[getter]
    fn basis_kind(&self) -> &'static str {
        self.inner.stats.basis_kind.as_str()
    }

    #[getter]
    fn patch_count(&self) -> u64 {
        self.inner.stats.patch_count
    }

    #[getter]
    fn size(&self) -> usize {
        self.inner.size()
    }

    fn __len__(&self) -> usize {
        self.inner.size()
    }

    fn __repr__(&self) -> String {
        format!(
            "CoveringSet(n={}, ell={}, method='{}', size={})",
            self.inner.n,
            self.inner.ell,
            self.inner.method.as_str(),
            self.inner.size()
        )
    }

    /// Re-checks the covering property.
    fn verify(&self) -> PyResult<bool> {
        let v = core::verify_cover(self.inner.n, self.inner.ell, &self.inner.slopes).map_err(py_err)?;
        Ok(v.complete)
    }
}

fn parse_mode(mode: &str) -> PyResult<Mode> {
    match mode {
        "det" | "deterministic" => Ok(Mode::Deterministic),
        "rand" | "randomized" => Ok(Mode::Randomized),
        _ => Err(PyValueError::new_err(format!("unknown mode {mode:?}"))),
    }
}

fn parse_case(case: Option<&str>) -> PyResult<Option<BasisChoice>> {
    match case {
        None => Ok(None),
        Some("above-threshold") => Ok(Some(BasisChoice::AboveThreshold)),
        Some("divisor-lattice") => Ok(Some(BasisChoice::DivisorLattice)),
        Some(other) => Err(PyValueError::new_err(format!("unknown case {other:?}"))),
    }
}

/// Builds a verified ℓ-covering of `Z_n`.
#[pyfunction]
#[pyo3(signature = (n, ell, mode = "det", seed = 0, c = None, case = None))]
fn construct(
    py: Python<'_>,
    n: u64,
    ell: u64,
    mode: &str,
    seed: u64,
    c: Option<f64>,
    case: Option<&str>,
) -> PyResult<PyCoveringSet> {
    let cfg = ConstructConfig {
        c: c.unwrap_or(core::cover::DEFAULT_C),
        case_override: parse_case(case)?,
        mode: parse_mode(mode)?,
        seed,
        ..ConstructConfig::default()
    };
    let inner = py.detach(|| core::construct(n, ell, &cfg)).map_err(py_err)?;
    Ok(PyCoveringSet { inner })
}

/// Returns `(complete, uncovered_count, witnesses)`.
#[pyfunction]
fn verify_cover(py: Python<'_>, n: u64, ell: u64, slopes: Vec<u64>) -> PyResult<(bool, u64, Vec<u64>)> {
    let v = py.detach(|| core::verify_cover(n, ell, &slopes)).map_err(py_err)?;
    Ok((v.complete, v.uncovered_count, v.witnesses))
}

/// Number of integers in `[1, ℓ]` coprime to `n`.
#[pyfunction]
fn phi_relative(n: u64, ell: u64) -> PyResult<u64> {
    let f = core::factorize(n).map_err(py_err)?;
    core::phi_relative(&f, ell).map_err(py_err)
}

/// Number of units `x` with `y` in the segment of slope `x` and length `ℓ`.
#[pyfunction]
fn coverage_count(n: u64, ell: u64, y: u64) -> PyResult<u64> {
    core::coverage_count(n, ell, y).map_err(py_err)
}

/// Prime factorization as `[(p, e), ...]`.
#[pyfunction]
fn factorize(n: u64) -> PyResult<Vec<(u64, u32)>> {
    Ok(core::factorize(n).map_err(py_err)?.factors().to_vec())
}

/// The divisor basis `construct` would use.
#[pyfunction]
#[pyo3(signature = (n, ell, c = None, case = None))]
fn divisor_basis(n: u64, ell: u64, c: Option<f64>, case: Option<&str>) -> PyResult<Vec<u64>> {
    let f = core::factorize(n).map_err(py_err)?;
    let cfg = ConstructConfig {
        c: c.unwrap_or(core::cover::DEFAULT_C),
        case_override: parse_case(case)?,
        ..ConstructConfig::default()
    };
    Ok(core::select_basis(&f, ell, &cfg).basis)
}

/// `(n, ell, phi_n, certificate)` for the `k`-th primorial instance.
#[pyfunction]
fn lower_bound_instance(k: u32) -> PyResult<(u64, u64, u64, Option<u64>)> {
    let i = core::lower_bound_instance(k).map_err(py_err)?;
    Ok((i.n, i.ell, i.phi_n, i.certificate))
}

/// Exact minimum covering size for `n ≤ 40`; `None` if the search timed out.
#[pyfunction]
fn min_cover_size(py: Python<'_>, n: u64, ell: u64) -> PyResult<Option<u64>> {
    let m = py.detach(|| core::min_cover_bruteforce(n, ell)).map_err(py_err)?;
    Ok(m.size())
}

#[pymodule]
fn lcover(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyCoveringSet>()?;
    m.add_function(wrap_pyfunction!(construct, m)?)?;
    m.add_function(wrap_pyfunction!(verify_cover, m)?)?;
    m.add_function(wrap_pyfunction!(phi_relative, m)?)?;
    m.add_function(wrap_pyfunction!(coverage_count, m)?)?;
    m.add_function(wrap_pyfunction!(factorize, m)?)?;
    m.add_function(wrap_pyfunction!(divisor_basis, m)?)?;
    m.add_function(wrap_pyfunction!(lower_bound_instance, m)?)?;
    m.add_function(wrap_pyfunction!(min_cover_size, m)?)?;
    Ok(())
}
