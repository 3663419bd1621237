//! Python bindings: `import sigma_coeffs`.

use num_bigint::BigInt;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;
use pyo3::types::PyDict;

use sigma_coeffs::engine::Index;
use sigma_coeffs::harness::default_workers;
use sigma_coeffs::tables::{OutputFormat, TableMode};
use sigma_coeffs::valuation::ValuationReport;
use sigma_coeffs::{checkpoint, oracle, tables, valuation, Error};

create_exception!(sigma_coeffs, SigmaError, PyException);

fn py_err(e: Error) -> PyErr {
    SigmaError::new_err(e.to_string())
}

/// Coefficients a[i,j] over a rectangle and its dependency closure.
#[pyclass(name = "CoeffTable", frozen)]
struct PyCoeffTable {
    inner: sigma_coeffs::CoeffTable,
}

#[pymethods]
impl PyCoeffTable {
    #[getter]
    fn max_i(&self) -> u32 {
        self.inner.max_i()
    }

    #[getter]
    fn max_j(&self) -> u32 {
        self.inner.max_j()
    }

    #[getter]
    fn completed_weight(&self) -> Option<u32> {
        self.inner.completed_weight()
    }

    /// a[i,j]; 0 for negative indices.
    fn coefficient(&self, i: i64, j: i64) -> PyResult<BigInt> {
        self.inner.coefficient(i, j).map_err(py_err)
    }

    fn save(&self, path: &str) -> PyResult<()> {
        checkpoint::save_checkpoint(&self.inner, path).map_err(py_err)
    }

    fn __len__(&self) -> usize {
        self.inner.closure_len()
    }

    fn __repr__(&self) -> String {
        format!(
            "CoeffTable(max_i={}, max_j={}, completed_weight={:?})",
            self.inner.max_i(),
            self.inner.max_j(),
            self.inner.completed_weight()
        )
    }
}

/// Exact truncated Laurent series in z over Q[g2, g3].
#[pyclass(name = "TruncatedSeries", frozen)]
struct PyTruncatedSeries {
    inner: sigma_coeffs::TruncatedSeries,
}

#[pymethods]
impl PyTruncatedSeries {
    /// Precision (None for an exact series).
    #[getter]
    fn order(&self) -> Option<i64> {
        self.inner.order()
    }

    fn is_zero(&self) -> bool {
        self.inner.is_zero()
    }

    /// Coefficient of z^k rendered as a polynomial, None beyond the precision.
    fn coefficient(&self, k: i64) -> Option<String> {
        self.inner.coefficient(k).map(|p| p.to_string())
    }

    fn dump(&self) -> String {
        self.inner.dump()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("TruncatedSeries(order={:?})", self.inner.order())
    }
}

fn wrap_series(r: sigma_coeffs::Result<sigma_coeffs::TruncatedSeries>) -> PyResult<PyTruncatedSeries> {
    r.map(|inner| PyTruncatedSeries { inner }).map_err(py_err)
}

fn report_dict<'py>(py: Python<'py>, r: &ValuationReport) -> PyResult<Bound<'py, PyDict>> {
    let d = PyDict::new(py);
    d.set_item("i", r.i)?;
    d.set_item("j", r.j)?;
    d.set_item("nu2_actual", r.nu2_actual)?;
    d.set_item("nu2_predicted", r.nu2_predicted)?;
    d.set_item("nu3_actual", r.nu3_actual)?;
    d.set_item("nu3_predicted", r.nu3_predicted)?;
    d.set_item("status", format!("{:?}", r.status))?;
    Ok(d)
}

#[pyfunction]
fn weight(i: u32, j: u32) -> u32 {
    sigma_coeffs::weight(Index::new(i, j))
}

#[pyfunction]
#[pyo3(signature = (max_i, max_j, workers=None, resume_from=None))]
fn compute_rectangle(
    py: Python<'_>,
    max_i: u32,
    max_j: u32,
    workers: Option<usize>,
    resume_from: Option<&str>,
) -> PyResult<PyCoeffTable> {
    let resume = resume_from
        .map(checkpoint::load_checkpoint)
        .transpose()
        .map_err(py_err)?;
    let workers = workers.unwrap_or_else(default_workers);
    py.detach(|| sigma_coeffs::compute_rectangle(max_i, max_j, workers, resume.as_ref()))
        .map(|inner| PyCoeffTable { inner })
        .map_err(py_err)
}

#[pyfunction]
fn load_table(path: &str) -> PyResult<PyCoeffTable> {
    checkpoint::load_table(path)
        .map(|inner| PyCoeffTable { inner })
        .map_err(py_err)
}

#[pyfunction]
fn nu_factorial(n: u64, p: u64) -> PyResult<u64> {
    valuation::nu_factorial(n, p).map_err(py_err)
}

#[pyfunction]
fn nu(x: BigInt, p: u64) -> PyResult<u64> {
    valuation::nu(&x, p).map_err(py_err)
}

#[pyfunction]
fn b_value(i: u32, j: u32) -> PyResult<BigInt> {
    valuation::b_value(i, j).map_err(py_err)
}

#[pyfunction]
fn nu_b(i: u32, j: u32, p: u64) -> PyResult<i64> {
    valuation::nu_b(i, j, p).map_err(py_err)
}

#[pyfunction]
fn hypothesis_check<'py>(
    py: Python<'py>,
    table: &PyCoeffTable,
    i: u32,
    j: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let r = valuation::hypothesis_check(&table.inner, Index::new(i, j)).map_err(py_err)?;
    report_dict(py, &r)
}

#[pyfunction]
fn verify_range<'py>(
    py: Python<'py>,
    table: &PyCoeffTable,
    max_i: u32,
    max_j: u32,
) -> PyResult<Bound<'py, PyDict>> {
    let s = py
        .detach(|| valuation::verify_range(&table.inner, max_i, max_j))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    d.set_item("max_i", s.bounds.max_i)?;
    d.set_item("max_j", s.bounds.max_j)?;
    d.set_item("total", s.total)?;
    d.set_item("matches", s.matches)?;
    let mismatches = s
        .mismatches
        .iter()
        .map(|r| report_dict(py, r))
        .collect::<PyResult<Vec<_>>>()?;
    d.set_item("mismatches", mismatches)?;
    d.set_item("elapsed_seconds", s.elapsed_seconds)?;
    Ok(d)
}

/// Matrix of v_p(a) - v_p(b), rows j; None where a[i,j] = 0.
#[pyfunction]
fn residual_report(
    table: &PyCoeffTable,
    p: u64,
    max_i: u32,
    max_j: u32,
) -> PyResult<Vec<Vec<Option<i64>>>> {
    let rows = valuation::residual_report(&table.inner, p, max_i, max_j).map_err(py_err)?;
    Ok(rows
        .into_iter()
        .map(|row| row.into_iter().map(Result::ok).collect())
        .collect())
}

#[pyfunction]
#[pyo3(signature = (table, p, max_i, max_j, mode="nu", format="plain"))]
fn emit_table(
    table: &PyCoeffTable,
    p: u64,
    max_i: u32,
    max_j: u32,
    mode: &str,
    format: &str,
) -> PyResult<String> {
    let mode: TableMode = mode.parse().map_err(py_err)?;
    let format: OutputFormat = format.parse().map_err(py_err)?;
    tables::emit_table(&table.inner, p, max_i, max_j, mode, format).map_err(py_err)
}

#[pyfunction]
fn sigma_from_table(table: &PyCoeffTable, order: i64) -> PyResult<PyTruncatedSeries> {
    wrap_series(oracle::sigma_from_table(&table.inner, order))
}

#[pyfunction]
fn sigma_from_pe(order: i64) -> PyResult<PyTruncatedSeries> {
    wrap_series(oracle::sigma_from_pe(order))
}

#[pyfunction]
fn pe_laurent(order: i64) -> PyResult<PyTruncatedSeries> {
    wrap_series(oracle::pe_laurent(order))
}

#[pyfunction]
fn weierstrass_residual(order: i64) -> PyResult<PyTruncatedSeries> {
    wrap_series(oracle::weierstrass_residual(order))
}

#[pyfunction]
fn apply_q0(series: &PyTruncatedSeries) -> PyTruncatedSeries {
    PyTruncatedSeries {
        inner: oracle::apply_q0(&series.inner),
    }
}

#[pyfunction]
fn apply_q2(series: &PyTruncatedSeries) -> PyResult<PyTruncatedSeries> {
    wrap_series(oracle::apply_q2(&series.inner))
}

/// Runs every series oracle; returns {check name: passed}.
#[pyfunction]
#[pyo3(signature = (order=30, workers=1))]
fn oracle_check<'py>(py: Python<'py>, order: i64, workers: usize) -> PyResult<Bound<'py, PyDict>> {
    let report = py
        .detach(|| oracle::run_oracle_suite(order, workers))
        .map_err(py_err)?;
    let d = PyDict::new(py);
    for c in &report.checks {
        d.set_item(&c.name, c.passed)?;
    }
    Ok(d)
}

#[pymodule]
#[pyo3(name = "sigma_coeffs")]
fn sigma_coeffs_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("SigmaError", m.py().get_type::<SigmaError>())?;
    m.add_class::<PyCoeffTable>()?;
    m.add_class::<PyTruncatedSeries>()?;
    m.add_function(wrap_pyfunction!(weight, m)?)?;
    m.add_function(wrap_pyfunction!(compute_rectangle, m)?)?;
    m.add_function(wrap_pyfunction!(load_table, m)?)?;
    m.add_function(wrap_pyfunction!(nu_factorial, m)?)?;
    m.add_function(wrap_pyfunction!(nu, m)?)?;
    m.add_function(wrap_pyfunction!(b_value, m)?)?;
    m.add_function(wrap_pyfunction!(nu_b, m)?)?;
    m.add_function(wrap_pyfunction!(hypothesis_check, m)?)?;
    m.add_function(wrap_pyfunction!(verify_range, m)?)?;
    m.add_function(wrap_pyfunction!(residual_report, m)?)?;
    m.add_function(wrap_pyfunction!(emit_table, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_from_table, m)?)?;
    m.add_function(wrap_pyfunction!(sigma_from_pe, m)?)?;
    m.add_function(wrap_pyfunction!(pe_laurent, m)?)?;
    m.add_function(wrap_pyfunction!(weierstrass_residual, m)?)?;
    m.add_function(wrap_pyfunction!(apply_q0, m)?)?;
    m.add_function(wrap_pyfunction!(apply_q2, m)?)?;
    m.add_function(wrap_pyfunction!(oracle_check, m)?)?;
    Ok(())
}
