//! Python bindings. Every function takes the same JSON input documents as the
//! command line tool and returns JSON text or plain numbers.

use coverforge::fischer::{build_fischer_graph, is_irreducible};
use coverforge::graph::CoverGraph;
use coverforge::input::{parse_input_str, Input};
use coverforge::krieger::{build_krieger_graph, termination_level};
use coverforge::transfer::{perron_value, DEFAULT_MAX_ITER};
use coverforge::{Error, Subshift};
use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;

fn py_err(e: impl Into<Error>) -> PyErr {
    let e = e.into();
    PyValueError::new_err(format!("{}: {}", e.code(), e))
}

fn subshift(input: &str) -> PyResult<Subshift> {
    match parse_input_str(input).map_err(py_err)? {
        Input::Subshift(spec) => Subshift::new(spec).map_err(py_err),
        other => Err(PyValueError::new_err(format!("input: expected a subshift, got `{}`", other.kind()))),
    }
}

fn krieger_graph(shift: &Subshift, max_k: usize) -> PyResult<CoverGraph> {
    let report = termination_level(shift, max_k).map_err(py_err)?;
    let n = report
        .level
        .ok_or_else(|| PyValueError::new_err(format!("krieger: no termination up to k = {max_k}")))?;
    build_krieger_graph(shift, n).map_err(py_err)
}

/// Krieger cover as a JSON graph document.
#[pyfunction]
#[pyo3(signature = (input, max_k = 8))]
fn krieger(input: &str, max_k: usize) -> PyResult<String> {
    let shift = subshift(input)?;
    Ok(krieger_graph(&shift, max_k)?.to_json().to_string())
}

/// Fischer cover as a JSON graph document.
#[pyfunction]
fn fischer(input: &str) -> PyResult<String> {
    let shift = subshift(input)?;
    Ok(build_fischer_graph(&shift).map_err(py_err)?.to_json().to_string())
}

/// Number of profile classes at each level `1..=max_k + 1`.
#[pyfunction]
#[pyo3(signature = (input, max_k = 8))]
fn class_counts(input: &str, max_k: usize) -> PyResult<Vec<usize>> {
    let shift = subshift(input)?;
    Ok(termination_level(&shift, max_k).map_err(py_err)?.class_counts)
}

/// Perron value of a cover, or of the Fischer (else Krieger) cover of a subshift.
#[pyfunction]
#[pyo3(signature = (input, tol = 1e-12))]
fn perron(input: &str, tol: f64) -> PyResult<f64> {
    let g = match parse_input_str(input).map_err(py_err)? {
        Input::Cover(g) => g,
        Input::Substitution(s) => s.build_edge_shift(),
        _ => {
            let shift = subshift(input)?;
            if is_irreducible(&shift).map_err(py_err)? {
                build_fischer_graph(&shift).map_err(py_err)?
            } else {
                krieger_graph(&shift, 8)?
            }
        }
    };
    perron_value(&g, tol, DEFAULT_MAX_ITER).map_err(py_err)
}

/// Topological entropy `ln λ`.
#[pyfunction]
#[pyo3(signature = (input, tol = 1e-12))]
fn entropy(input: &str, tol: f64) -> PyResult<f64> {
    Ok(perron(input, tol)?.ln())
}

/// Edge shift of a substitution as a JSON graph document.
#[pyfunction]
fn substitution_cover(input: &str) -> PyResult<String> {
    match parse_input_str(input).map_err(py_err)? {
        Input::Substitution(s) => Ok(s.build_edge_shift().to_json().to_string()),
        other => Err(PyValueError::new_err(format!("input: expected a substitution, got `{}`", other.kind()))),
    }
}

#[pymodule]
fn coverforge_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("__version__", env!("CARGO_PKG_VERSION"))?;
    m.add_function(wrap_pyfunction!(krieger, m)?)?;
    m.add_function(wrap_pyfunction!(fischer, m)?)?;
    m.add_function(wrap_pyfunction!(class_counts, m)?)?;
    m.add_function(wrap_pyfunction!(perron, m)?)?;
    m.add_function(wrap_pyfunction!(entropy, m)?)?;
    m.add_function(wrap_pyfunction!(substitution_cover, m)?)?;
    Ok(())
}
