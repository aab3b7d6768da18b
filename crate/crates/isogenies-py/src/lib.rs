//! Python bindings: fields, curves, isogeny construction/recovery, and the
//! division-polynomial and wp-series helpers.

use pyo3::exceptions::PyValueError;
use pyo3::prelude::*;
use pyo3::types::{PyList, PyTuple};

use isogenies::curve::{
    add_points, division_polynomial, enumerate_points, make_curve, scalar_mul, short_form,
    Point, WeierstrassCurve,
};
use isogenies::field::{make_field_seeded, Field, FieldElement, DEFAULT_MODULUS_SEED};
use isogenies::isogeny::{
    compose, evaluate, from_kernel_general, kohel, pullback_constant, velu, Isogeny,
};
use isogenies::poly::Polynomial;
use isogenies::recover::{denominator_to_kernel_poly, naive_search, stark};
use isogenies::series::{wp_series, WpMethod};

fn err<E: std::fmt::Display>(e: E) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// Accept an int or a coefficient list (constant term first).
fn elem_from_py(spec: &Field, v: &Bound<'_, PyAny>) -> PyResult<FieldElement> {
    if let Ok(n) = v.extract::<i64>() {
        return Ok(FieldElement::from_i64(spec, n));
    }
    let coeffs: Vec<u64> = v.extract()?;
    FieldElement::from_coeffs(spec, &coeffs).map_err(err)
}

fn elem_to_py(py: Python<'_>, c: &FieldElement) -> PyObject {
    if c.spec().degree() == 1 {
        c.coeffs()[0].into_py(py)
    } else {
        PyList::new_bound(py, c.coeffs()).into_py(py)
    }
}

fn point_from_py(e: &WeierstrassCurve, v: &Bound<'_, PyAny>) -> PyResult<Point> {
    if v.is_none() {
        return Ok(Point::Infinity);
    }
    let (x, y): (Bound<'_, PyAny>, Bound<'_, PyAny>) = v.extract()?;
    e.point(elem_from_py(e.spec(), &x)?, elem_from_py(e.spec(), &y)?)
        .map_err(err)
}

fn point_to_py(py: Python<'_>, p: &Point) -> PyObject {
    match p.xy() {
        None => py.None(),
        Some((x, y)) => {
            PyTuple::new_bound(py, [elem_to_py(py, x), elem_to_py(py, y)]).into_py(py)
        }
    }
}

fn poly_to_py(py: Python<'_>, f: &Polynomial) -> PyObject {
    let items: Vec<PyObject> = f.coeffs().iter().map(|c| elem_to_py(py, c)).collect();
    PyList::new_bound(py, items).into_py(py)
}

fn poly_from_py(spec: &Field, v: &Bound<'_, PyAny>) -> PyResult<Polynomial> {
    let items: Vec<Bound<'_, PyAny>> = v.extract()?;
    let coeffs = items
        .iter()
        .map(|c| elem_from_py(spec, c))
        .collect::<PyResult<Vec<_>>>()?;
    Ok(Polynomial::new(spec, coeffs))
}

/// A finite field F_{p^d}; the modulus is a coefficient list of length d+1.
#[pyclass(name = "Field")]
#[derive(Clone)]
struct PyField {
    spec: Field,
}

#[pymethods]
impl PyField {
    #[new]
    #[pyo3(signature = (p, d=1, modulus=None, seed=DEFAULT_MODULUS_SEED))]
    fn new(p: u64, d: usize, modulus: Option<Vec<u64>>, seed: u64) -> PyResult<Self> {
        let spec = make_field_seeded(p, d, modulus.as_deref(), seed).map_err(err)?;
        Ok(PyField { spec })
    }

    #[getter]
    fn p(&self) -> u64 {
        self.spec.p()
    }

    #[getter]
    fn degree(&self) -> usize {
        self.spec.degree()
    }

    #[getter]
    fn modulus(&self) -> Option<Vec<u64>> {
        self.spec.modulus().map(|m| m.to_vec())
    }

    fn __repr__(&self) -> String {
        if self.spec.degree() == 1 {
            format!("Field(p={})", self.spec.p())
        } else {
            format!("Field(p={}, d={})", self.spec.p(), self.spec.degree())
        }
    }
}

/// An elliptic curve in general Weierstrass form, from a-invariants
/// [a1, a2, a3, a4, a6].
#[pyclass(name = "Curve")]
#[derive(Clone)]
struct PyCurve {
    e: WeierstrassCurve,
}

#[pymethods]
impl PyCurve {
    #[new]
    fn new(field: &PyField, a: Vec<Bound<'_, PyAny>>) -> PyResult<Self> {
        if a.len() != 5 {
            return Err(PyValueError::new_err("expected 5 a-invariants"));
        }
        let coeffs = a
            .iter()
            .map(|c| elem_from_py(&field.spec, c))
            .collect::<PyResult<Vec<_>>>()?;
        let e = make_curve(&field.spec, coeffs.try_into().unwrap()).map_err(err)?;
        Ok(PyCurve { e })
    }

    #[getter]
    fn field(&self) -> PyField {
        PyField { spec: self.e.spec().clone() }
    }

    #[getter]
    fn a_invariants(&self, py: Python<'_>) -> Vec<PyObject> {
        self.e.a_invariants().iter().map(|c| elem_to_py(py, c)).collect()
    }

    #[getter]
    fn j_invariant(&self, py: Python<'_>) -> PyObject {
        elem_to_py(py, &self.e.j_invariant)
    }

    #[getter]
    fn discriminant(&self, py: Python<'_>) -> PyObject {
        elem_to_py(py, &self.e.discriminant)
    }

    fn contains(&self, point: &Bound<'_, PyAny>) -> bool {
        point_from_py(&self.e, point).is_ok()
    }

    /// All rational points, infinity included (None).
    fn points(&self, py: Python<'_>) -> PyResult<Vec<PyObject>> {
        let pts = enumerate_points(&self.e).map_err(err)?;
        Ok(pts.iter().map(|p| point_to_py(py, p)).collect())
    }

    fn order(&self) -> PyResult<usize> {
        Ok(enumerate_points(&self.e).map_err(err)?.len())
    }

    fn add(&self, py: Python<'_>, p: &Bound<'_, PyAny>, q: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let s = add_points(&self.e, &point_from_py(&self.e, p)?, &point_from_py(&self.e, q)?)
            .map_err(err)?;
        Ok(point_to_py(py, &s))
    }

    fn mul(&self, py: Python<'_>, m: i64, p: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let s = scalar_mul(&self.e, m, &point_from_py(&self.e, p)?).map_err(err)?;
        Ok(point_to_py(py, &s))
    }

    /// The m-th division polynomial triple as display strings.
    fn division_polynomial(&self, m: u64) -> PyResult<(String, String, String)> {
        let (short, _, _) = short_form(&self.e).map_err(err)?;
        let (psi, phi, omega) = division_polynomial(&short, m).map_err(err)?;
        Ok((psi.to_string(), phi.to_string(), omega.to_string()))
    }

    /// Coefficients a0..a_{n-1} of wp(z) - z^-2 = sum a_k z^{2k}.
    fn wp_coefficients(&self, py: Python<'_>, n: usize) -> PyResult<Vec<PyObject>> {
        let (short, _, _) = short_form(&self.e).map_err(err)?;
        let a = short.a4.clone();
        let b = short.a6.clone();
        let wp = wp_series(&a, &b, n, WpMethod::Recurrence).map_err(err)?;
        Ok((0..n as i64).map(|k| elem_to_py(py, &wp.coeff_at(k))).collect())
    }

    fn __repr__(&self) -> String {
        let a: Vec<String> =
            self.e.a_invariants().iter().map(|c| c.to_string()).collect();
        format!("Curve(a=[{}] over {})", a.join(", "), PyField { spec: self.e.spec().clone() }.__repr__())
    }

    fn __eq__(&self, other: &PyCurve) -> bool {
        self.e == other.e
    }
}

/// A separable isogeny with explicit rational maps.
#[pyclass(name = "Isogeny")]
#[derive(Clone)]
struct PyIsogeny {
    phi: Isogeny,
}

#[pymethods]
impl PyIsogeny {
    #[getter]
    fn degree(&self) -> u64 {
        self.phi.degree
    }

    #[getter]
    fn domain(&self) -> PyCurve {
        PyCurve { e: self.phi.domain.clone() }
    }

    #[getter]
    fn codomain(&self) -> PyCurve {
        PyCurve { e: self.phi.codomain.clone() }
    }

    #[getter]
    fn kernel_polynomial(&self, py: Python<'_>) -> PyObject {
        poly_to_py(py, &self.phi.kernel_poly)
    }

    /// (numerator, denominator) of the x-map, coefficient lists.
    #[getter]
    fn x_map(&self, py: Python<'_>) -> (PyObject, PyObject) {
        (poly_to_py(py, &self.phi.maps.p), poly_to_py(py, &self.phi.maps.q))
    }

    fn pullback_constant(&self, py: Python<'_>) -> PyResult<PyObject> {
        let c = pullback_constant(&self.phi).map_err(err)?;
        Ok(elem_to_py(py, &c))
    }

    fn __call__(&self, py: Python<'_>, point: &Bound<'_, PyAny>) -> PyResult<PyObject> {
        let p = point_from_py(&self.phi.domain, point)?;
        let q = evaluate(&self.phi, &p).map_err(err)?;
        Ok(point_to_py(py, &q))
    }

    fn compose(&self, inner: &PyIsogeny) -> PyResult<PyIsogeny> {
        Ok(PyIsogeny { phi: compose(&self.phi, &inner.phi).map_err(err)? })
    }

    fn __repr__(&self) -> String {
        format!(
            "Isogeny(degree={}, kernel={})",
            self.phi.degree, self.phi.kernel_poly
        )
    }
}

/// Velu's formulas from an explicit kernel subgroup (None = infinity).
#[pyfunction]
fn from_points(curve: &PyCurve, points: Vec<Bound<'_, PyAny>>) -> PyResult<PyIsogeny> {
    let kernel = points
        .iter()
        .map(|p| point_from_py(&curve.e, p))
        .collect::<PyResult<Vec<_>>>()?;
    Ok(PyIsogeny { phi: velu(&curve.e, &kernel).map_err(err)? })
}

/// Kernel-polynomial construction; psi is a coefficient list, constant first.
#[pyfunction]
#[pyo3(signature = (curve, psi, method="kohel"))]
fn from_kernel(curve: &PyCurve, psi: &Bound<'_, PyAny>, method: &str) -> PyResult<PyIsogeny> {
    let psi = poly_from_py(curve.e.spec(), psi)?;
    let phi = match method {
        "kohel" => kohel(&curve.e, &psi).map_err(err)?,
        "general" => {
            let (two, _) = {
                let (u, uni) = isogenies::curve::two_torsion_polys(&curve.e);
                (uni, u)
            };
            let d2 = psi.gcd_monic(&two).degree().unwrap_or(0);
            let dpsi = psi.degree().unwrap_or(0);
            let ell = (1 + d2 + 2 * (dpsi - d2)) as u64;
            from_kernel_general(&curve.e, &psi, ell).map_err(err)?
        }
        other => return Err(PyValueError::new_err(format!("unknown method {other}"))),
    };
    Ok(PyIsogeny { phi })
}

/// Kernel polynomials of the degree-ell isogenies between two curves.
#[pyfunction]
#[pyo3(signature = (e1, e2, degree, method="stark", dmax=6))]
fn recover(
    py: Python<'_>,
    e1: &PyCurve,
    e2: &PyCurve,
    degree: u64,
    method: &str,
    dmax: usize,
) -> PyResult<Vec<PyObject>> {
    let spec = e1.e.spec().clone();
    let kernels = match method {
        "stark" => {
            let (s1, rho1, _) = short_form(&e1.e).map_err(err)?;
            let (s2, _, _) = short_form(&e2.e).map_err(err)?;
            let d = stark(&s1, &s2, degree).map_err(err)?;
            let psi = denominator_to_kernel_poly(&s1, &d).map_err(err)?;
            vec![psi.substitute_affine(&FieldElement::one(&spec), &rho1.r.neg())]
        }
        "naive" => {
            let found = naive_search(&e1.e, &e2.e, degree, dmax).map_err(err)?;
            let mut polys = Vec::new();
            for pts in &found {
                let work = pts
                    .iter()
                    .find_map(|p| p.xy().map(|(x, _)| x.spec().clone()))
                    .unwrap_or_else(|| spec.clone());
                let ec = if work == spec {
                    e1.e.clone()
                } else {
                    e1.e.base_change(&work).map_err(err)?
                };
                let psi = velu(&ec, pts).map_err(err)?.kernel_poly.to_monic();
                let psi = psi
                    .coeffs()
                    .iter()
                    .map(|c| c.descend(&spec))
                    .collect::<Option<Vec<_>>>()
                    .map(|cs| Polynomial::new(&spec, cs))
                    .unwrap_or(psi);
                polys.push(psi);
            }
            polys
        }
        other => return Err(PyValueError::new_err(format!("unknown method {other}"))),
    };
    Ok(kernels.iter().map(|k| poly_to_py(py, k)).collect())
}

/// Dual isogeny, searching torsion in extensions of degree at most dmax.
#[pyfunction]
#[pyo3(signature = (phi, dmax=6))]
fn dual(phi: &PyIsogeny, dmax: usize) -> PyResult<PyIsogeny> {
    Ok(PyIsogeny { phi: isogenies::recover::dual(&phi.phi, dmax).map_err(err)? })
}

#[pymodule]
fn isogenies_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyField>()?;
    m.add_class::<PyCurve>()?;
    m.add_class::<PyIsogeny>()?;
    m.add_function(wrap_pyfunction!(from_points, m)?)?;
    m.add_function(wrap_pyfunction!(from_kernel, m)?)?;
    m.add_function(wrap_pyfunction!(recover, m)?)?;
    m.add_function(wrap_pyfunction!(dual, m)?)?;
    Ok(())
}
