//! Python bindings: polynomials, p-adic data, local zeta functions and S-part counts.
//!
//! Rationals cross the boundary as `fractions.Fraction`; structured results
//! (root profiles, zeta functions, reports) come back as plain dicts.

use dashu::integer::IBig;
use dashu::rational::RBig;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;
use spart::cli::{emit_report, Format};
use spart::counting::{self, SPartContext};
use spart::msums::{self, Beta, ExactReal, SigmaSet};
use spart::num::{float_rat, parse_rational, rational_string, to_f64};
use spart::{igusa, padic, poly, IntPoly};

fn err(e: spart::Error) -> PyErr {
    if e.is_computational() {
        PyRuntimeError::new_err(e.to_string())
    } else {
        PyValueError::new_err(e.to_string())
    }
}

fn fraction<'py>(py: Python<'py>, r: &RBig) -> PyResult<Bound<'py, PyAny>> {
    py.import("fractions")?.getattr("Fraction")?.call1((rational_string(r),))
}

/// Accepts `Fraction`, `int` or strings such as `"1/3"`.
fn rational(x: &Bound<'_, PyAny>) -> PyResult<RBig> {
    parse_rational(&x.str()?.to_cow()?).map_err(err)
}

fn json<'py>(py: Python<'py>, v: &impl serde::Serialize) -> PyResult<Bound<'py, PyAny>> {
    let text = serde_json::to_string(v).map_err(|e| PyRuntimeError::new_err(e.to_string()))?;
    py.import("json")?.getattr("loads")?.call1((text,))
}

fn ibig(x: &Bound<'_, PyAny>) -> PyResult<IBig> {
    x.str()?
        .to_cow()?
        .parse()
        .map_err(|_| PyValueError::new_err("expected an integer"))
}

/// Integer polynomial, built from text (`"x^2-1"`, `"-1,0,1"`) or a list of
/// coefficients in increasing degree.
#[pyclass(name = "Poly", frozen, from_py_object)]
#[derive(Clone)]
struct PyPoly {
    inner: IntPoly,
}

#[pymethods]
impl PyPoly {
    #[new]
    fn new(source: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = if let Ok(s) = source.extract::<String>() {
            s.parse().map_err(err)?
        } else {
            let cs: Vec<Bound<'_, PyAny>> = source.extract()?;
            IntPoly::new(cs.iter().map(ibig).collect::<PyResult<_>>()?)
        };
        Ok(Self { inner })
    }

    #[getter]
    fn degree(&self) -> Option<usize> {
        self.inner.degree()
    }

    #[getter]
    fn coeffs(&self) -> Vec<String> {
        self.inner.coeffs().iter().map(ToString::to_string).collect()
    }

    fn __call__<'py>(&self, py: Python<'py>, x: &Bound<'py, PyAny>) -> PyResult<Bound<'py, PyAny>> {
        let v = self.inner.eval(&ibig(x)?);
        py.import("builtins")?.getattr("int")?.call1((v.to_string(),))
    }

    fn derivative(&self) -> Self {
        Self { inner: self.inner.derivative() }
    }

    fn discriminant<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        let d = poly::discriminant(&self.inner).map_err(err)?;
        py.import("builtins")?.getattr("int")?.call1((d.to_string(),))
    }

    /// `(unit, [(factor, multiplicity), ...])`.
    fn squarefree<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyTuple>> {
        let d = poly::squarefree_decompose(&self.inner).map_err(err)?;
        let unit = py.import("builtins")?.getattr("int")?.call1((d.unit.to_string(),))?;
        let factors: Vec<(Self, u32)> = d.factors.into_iter().map(|(f, e)| (Self { inner: f }, e)).collect();
        PyTuple::new(py, [unit, factors.into_pyobject(py)?.into_any()])
    }

    fn __str__(&self) -> String {
        self.inner.to_human()
    }

    fn __repr__(&self) -> String {
        format!("Poly('{}')", self.inner.to_human())
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }
}

#[pyfunction]
fn vp(n: &Bound<'_, PyAny>, p: u64) -> PyResult<u32> {
    padic::vp(&ibig(n)?, p).map_err(err)
}

#[pyfunction]
fn has_zp_root(f: &PyPoly, p: u64) -> PyResult<bool> {
    padic::has_zp_root(&f.inner, p).map_err(err)
}

#[pyfunction]
fn u_p(f: &PyPoly, p: u64) -> PyResult<u32> {
    padic::u_p(&f.inner, p).map_err(err)
}

/// Root profile as a dict: roots with residues and multiplicities, valuations.
#[pyfunction]
#[pyo3(signature = (f, p, precision = 8))]
fn padic_roots<'py>(py: Python<'py>, f: &PyPoly, p: u64, precision: u32) -> PyResult<Bound<'py, PyAny>> {
    json(py, &padic::padic_roots(&f.inner, p, precision).map_err(err)?)
}

/// `λ_p`, `a_p`, the exponents `k_i` and the initial measures.
#[pyfunction]
fn igusa_data<'py>(py: Python<'py>, f: &PyPoly, p: u64) -> PyResult<Bound<'py, PyAny>> {
    json(py, &igusa::igusa_data(&f.inner, p).map_err(err)?)
}

#[pyfunction]
fn local_measure<'py>(py: Python<'py>, f: &PyPoly, p: u64, k: u32) -> PyResult<Bound<'py, PyAny>> {
    fraction(py, &igusa::local_measure(&f.inner, p, k).map_err(err)?)
}

#[pyfunction]
#[pyo3(signature = (f, p, k, budget = igusa::DEFAULT_ORACLE_BUDGET))]
fn local_measure_oracle<'py>(py: Python<'py>, f: &PyPoly, p: u64, k: u32, budget: u64) -> PyResult<Bound<'py, PyAny>> {
    let m = py.detach(|| igusa::local_measure_oracle_with_budget(&f.inner, p, k, budget));
    fraction(py, &m.map_err(err)?)
}

/// Local zeta function as a rational function of `t = p^{-s}`.
#[pyclass(name = "LocalZeta", frozen)]
struct PyLocalZeta {
    inner: igusa::LocalZeta,
}

#[pymethods]
impl PyLocalZeta {
    /// Exact value at `t`; `None` at a pole.
    fn __call__<'py>(&self, py: Python<'py>, t: &Bound<'py, PyAny>) -> PyResult<Option<Bound<'py, PyAny>>> {
        self.inner.eval(&rational(t)?).map(|v| fraction(py, &v)).transpose()
    }

    fn series<'py>(&self, py: Python<'py>, n: u32) -> PyResult<Vec<Bound<'py, PyAny>>> {
        self.inner.series(n).iter().map(|c| fraction(py, c)).collect()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json(py, &self.inner.to_json())
    }
}

#[pyfunction]
fn zeta(f: &PyPoly, p: u64) -> PyResult<PyLocalZeta> {
    Ok(PyLocalZeta { inner: igusa::zeta_rational(&f.inner, p).map_err(err)? })
}

/// Everything the S-part counters need for a fixed `(f, S)`.
#[pyclass(name = "SPartContext", frozen)]
struct PyContext {
    inner: SPartContext,
}

#[pymethods]
impl PyContext {
    #[new]
    fn new(py: Python<'_>, f: &PyPoly, primes: Vec<u64>) -> PyResult<Self> {
        let inner = py.detach(|| counting::build_context(&f.inner, &primes)).map_err(err)?;
        Ok(Self { inner })
    }

    #[getter]
    fn primes(&self) -> Vec<u64> {
        self.inner.primes.clone()
    }

    #[getter]
    fn s_prime(&self) -> Vec<u64> {
        self.inner.s_prime.clone()
    }

    #[getter]
    fn balanced(&self) -> bool {
        self.inner.is_balanced()
    }

    fn to_dict<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyAny>> {
        json(py, &self.inner)
    }

    #[pyo3(signature = (eps, bound, normalized = false))]
    fn count(&self, py: Python<'_>, eps: &Bound<'_, PyAny>, bound: u64, normalized: bool) -> PyResult<u64> {
        let eps = rational(eps)?;
        py.detach(|| counting::count_n(&self.inner, &eps, bound, normalized)).map_err(err)
    }

    #[pyo3(signature = (eps, bound, normalized = false))]
    fn count_naive(&self, py: Python<'_>, eps: &Bound<'_, PyAny>, bound: u64, normalized: bool) -> PyResult<u64> {
        let eps = rational(eps)?;
        py.detach(|| counting::count_naive(&self.inner, &eps, bound, normalized)).map_err(err)
    }

    #[pyo3(signature = (x, eps, normalized = false))]
    fn satisfies(&self, x: &Bound<'_, PyAny>, eps: &Bound<'_, PyAny>, normalized: bool) -> PyResult<bool> {
        counting::satisfies_condition(&ibig(x)?, &self.inner, &rational(eps)?, normalized).map_err(err)
    }

    fn asymptotic_constant(&self, eps: &Bound<'_, PyAny>) -> PyResult<f64> {
        Ok(to_f64(&counting::asymptotic_constant(&self.inner, &rational(eps)?).map_err(err)?))
    }

    /// `(liminf, limsup)` constants of the one-prime envelope.
    fn envelope(&self, eps: &Bound<'_, PyAny>) -> PyResult<(f64, f64)> {
        let (lo, hi) = counting::envelope_s1(&self.inner, &rational(eps)?).map_err(err)?;
        Ok((to_f64(&lo), to_f64(&hi)))
    }

    #[pyo3(signature = (eps, bound, gamma = None, tol_bits = 64))]
    fn adelic_measure(&self, eps: &Bound<'_, PyAny>, bound: u64, gamma: Option<&Bound<'_, PyAny>>, tol_bits: u32) -> PyResult<f64> {
        let gamma = gamma.map(rational).transpose()?.unwrap_or(RBig::ONE);
        let b = spart::num::float(bound, spart::num::DEFAULT_PRECISION);
        let m = counting::adelic_measure(&self.inner, &rational(eps)?, &b, &gamma, tol_bits).map_err(err)?;
        Ok(to_f64(&m))
    }

    /// Report dict with the same schema as the CLI's JSON output.
    #[pyo3(signature = (eps, ladder, normalized = false, digits = 30))]
    fn report<'py>(
        &self,
        py: Python<'py>,
        eps: &Bound<'py, PyAny>,
        ladder: Vec<u64>,
        normalized: bool,
        digits: usize,
    ) -> PyResult<Bound<'py, PyAny>> {
        let eps = rational(eps)?;
        let r = py
            .detach(|| counting::count_report(&self.inner, &eps, &ladder, normalized))
            .map_err(err)?;
        py.import("json")?.getattr("loads")?.call1((emit_report(&r, Format::Json, digits),))
    }
}

/// Measure of `{|x| ≤ B, |f(x)| ≤ M}`.
#[pyfunction]
fn vf_measure(f: &PyPoly, bound: &Bound<'_, PyAny>, m: &Bound<'_, PyAny>) -> PyResult<f64> {
    let prec = spart::num::DEFAULT_PRECISION;
    let v = counting::vf_measure(&f.inner, &float_rat(&rational(bound)?, prec), &float_rat(&rational(m)?, prec));
    Ok(to_f64(&v))
}

fn sigma(text: &str) -> PyResult<SigmaSet> {
    text.parse().map_err(err)
}

fn exact_real(x: &Bound<'_, PyAny>) -> PyResult<ExactReal> {
    x.str()?.to_cow()?.parse().map_err(err)
}

/// `#{k : Σ k_i log q_i ≤ t}` with natural logarithms.
#[pyfunction]
fn lattice_count(py: Python<'_>, sigma_text: &str, t: u64) -> PyResult<u64> {
    let s = sigma(sigma_text)?;
    py.detach(|| msums::lattice_count(&s, &Beta::E, t)).map_err(err)
}

/// `Σ_{h ∈ N_Σ, h ≤ L} h^α`.
#[pyfunction]
fn power_sum(sigma_text: &str, alpha: &Bound<'_, PyAny>, limit: &Bound<'_, PyAny>) -> PyResult<f64> {
    let a = float_rat(&rational(alpha)?, spart::num::DEFAULT_PRECISION);
    let v = msums::power_sum_le(&sigma(sigma_text)?, &a, &exact_real(limit)?).map_err(err)?;
    Ok(to_f64(&v))
}

#[pyfunction]
fn c_sigma(sigma_text: &str) -> PyResult<f64> {
    Ok(to_f64(&msums::c_sigma(&sigma(sigma_text)?).map_err(err)?))
}

/// Runs the command-line front end; returns `(exit_code, stdout, stderr)`.
#[pyfunction]
fn run_cli(py: Python<'_>, args: Vec<String>) -> (i32, String, String) {
    py.detach(|| spart::cli::main_with_args(args))
}

#[pymodule]
fn spartpy(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyPoly>()?;
    m.add_class::<PyLocalZeta>()?;
    m.add_class::<PyContext>()?;
    m.add_function(wrap_pyfunction!(vp, m)?)?;
    m.add_function(wrap_pyfunction!(has_zp_root, m)?)?;
    m.add_function(wrap_pyfunction!(u_p, m)?)?;
    m.add_function(wrap_pyfunction!(padic_roots, m)?)?;
    m.add_function(wrap_pyfunction!(igusa_data, m)?)?;
    m.add_function(wrap_pyfunction!(local_measure, m)?)?;
    m.add_function(wrap_pyfunction!(local_measure_oracle, m)?)?;
    m.add_function(wrap_pyfunction!(zeta, m)?)?;
    m.add_function(wrap_pyfunction!(vf_measure, m)?)?;
    m.add_function(wrap_pyfunction!(lattice_count, m)?)?;
    m.add_function(wrap_pyfunction!(power_sum, m)?)?;
    m.add_function(wrap_pyfunction!(c_sigma, m)?)?;
    m.add_function(wrap_pyfunction!(run_cli, m)?)?;
    Ok(())
}
