//! Python bindings: expressions, the catalog, the Painlevé test, singularity analysis and
//! numerical checks.

use std::collections::HashMap;

use num_complex::Complex64;
use pyo3::create_exception;
use pyo3::exceptions::PyException;
use pyo3::prelude::*;

use ::painleve::algebra::{eval_numeric, parse, sym, Assignment, RF};
use ::painleve::geometry::{self, AccessiblePoint, Atlas};
use ::painleve::numerics::{self, IntegratorConfig, PathSegment};
use ::painleve::series::PainleveBranch;
use ::painleve::systems::{self, BirationalMap, Catalog, PlaneSystem};

create_exception!(painleve, PainleveError, PyException);

fn err(e: ::painleve::Error) -> PyErr {
    PainleveError::new_err(e.to_string())
}

fn strings(fs: &[RF]) -> Vec<String> {
    fs.iter().map(|f| f.to_string()).collect()
}

fn assignment(values: Option<HashMap<String, Complex64>>) -> Assignment {
    values.unwrap_or_default().into_iter().map(|(k, v)| (sym(&k), v)).collect()
}

/// An exact rational function with radical symbols.
#[pyclass(name = "Expr", frozen, eq, from_py_object)]
#[derive(Clone, PartialEq)]
struct PyExpr(RF);

#[pymethods]
impl PyExpr {
    #[new]
    fn new(text: &str) -> PyResult<Self> {
        parse(text).map(PyExpr).map_err(err)
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Expr('{}')", self.0)
    }

    fn __add__(&self, o: &PyExpr) -> PyExpr {
        PyExpr(&self.0 + &o.0)
    }

    fn __sub__(&self, o: &PyExpr) -> PyExpr {
        PyExpr(&self.0 - &o.0)
    }

    fn __mul__(&self, o: &PyExpr) -> PyExpr {
        PyExpr(&self.0 * &o.0)
    }

    fn __truediv__(&self, o: &PyExpr) -> PyResult<PyExpr> {
        self.0.checked_div(&o.0).map(PyExpr).map_err(err)
    }

    fn __neg__(&self) -> PyExpr {
        PyExpr(-&self.0)
    }

    fn derivative(&self, var: &str) -> PyExpr {
        PyExpr(self.0.derivative(sym(var)))
    }

    /// Replaces each named symbol with an expression given as text.
    fn substitute(&self, values: HashMap<String, String>) -> PyResult<PyExpr> {
        let mut sub = Vec::new();
        for (k, v) in values {
            sub.push((sym(&k), parse(&v).map_err(err)?));
        }
        self.0.substitute(&sub).map(PyExpr).map_err(err)
    }

    fn evaluate(&self, values: HashMap<String, Complex64>) -> PyResult<Complex64> {
        eval_numeric(&self.0, &assignment(Some(values))).map_err(err)
    }

    fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
}

#[pyclass(name = "System", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PySystem(PlaneSystem);

#[pymethods]
impl PySystem {
    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn vars(&self) -> Vec<String> {
        self.0.vars.iter().map(|v| v.name().to_owned()).collect()
    }

    #[getter]
    fn rhs(&self) -> Vec<PyExpr> {
        self.0.rhs.iter().cloned().map(PyExpr).collect()
    }

    #[getter]
    fn hamiltonian(&self) -> Option<PyExpr> {
        self.0.hamiltonian.clone().map(PyExpr)
    }

    fn pushforward(&self, map: &PyMap) -> PyResult<PySystem> {
        systems::pushforward(&self.0, &map.0).map(PySystem).map_err(err)
    }

    fn same_field(&self, other: &PySystem) -> bool {
        self.0.same_field(&other.0)
    }

    fn is_symmetry(&self, map: &PyMap) -> PyResult<bool> {
        systems::check_symmetry(&self.0, &map.0).map_err(err)
    }

    /// The transformed Hamiltonian after adding `shift`, and whether it is polynomial.
    fn holomorphy(&self, map: &PyMap, shift: &str) -> PyResult<(bool, String)> {
        let h = systems::check_holomorphy(&self.0, &map.0, &parse(shift).map_err(err)?).map_err(err)?;
        Ok((h.is_polynomial(), h.value().to_string()))
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }
}

#[pyclass(name = "Map", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyMap(BirationalMap);

#[pymethods]
impl PyMap {
    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    fn forward(&self) -> PyResult<Vec<String>> {
        self.0.forward_components().map(|f| strings(&f)).map_err(err)
    }

    fn jacobian_determinant(&self) -> PyResult<PyExpr> {
        self.0.jacobian_determinant().map(PyExpr).map_err(err)
    }

    fn inverse(&self) -> PyResult<PyMap> {
        self.0.inverse().map(PyMap).map_err(err)
    }

    fn then(&self, next: &PyMap) -> PyResult<PyMap> {
        self.0.then(&next.0).map(PyMap).map_err(err)
    }

    fn is_identity(&self) -> PyResult<bool> {
        self.0.is_identity().map_err(err)
    }
}

#[pyclass(name = "Catalog")]
struct PyCatalog(Catalog);

#[pymethods]
impl PyCatalog {
    /// The built-in catalog, optionally extended with definitions in the catalog format.
    #[new]
    #[pyo3(signature = (extra = None))]
    fn new(extra: Option<&str>) -> PyResult<Self> {
        let mut c = Catalog::builtin();
        if let Some(text) = extra {
            c.extend_from(text).map_err(err)?;
        }
        Ok(PyCatalog(c))
    }

    fn systems(&self) -> Vec<String> {
        self.0.systems().map(|s| s.name.clone()).collect()
    }

    fn maps(&self) -> Vec<String> {
        self.0.maps().map(|m| m.name.clone()).collect()
    }

    fn odes(&self) -> Vec<String> {
        self.0.odes().map(|o| o.name.clone()).collect()
    }

    fn system(&self, name: &str) -> PyResult<PySystem> {
        self.0.system(name).cloned().map(PySystem).map_err(err)
    }

    fn map(&self, name: &str) -> PyResult<PyMap> {
        self.0.map(name).cloned().map(PyMap).map_err(err)
    }

    #[pyo3(signature = (ode, depth = 9))]
    fn painleve_test(&self, ode: &str, depth: usize) -> PyResult<Vec<PyBranch>> {
        let o = self.0.ode(ode).map_err(err)?;
        let bs = o.painleve_test(depth).map_err(err)?;
        Ok(bs.into_iter().map(PyBranch).collect())
    }

    /// Largest deviation between each branch and a numerical solution started near its pole.
    #[pyo3(signature = (ode, t0 = Complex64::new(1.0, 0.0), near = 0.02, far = 0.1, params = None, depth = 14))]
    fn verify_branch(
        &self,
        ode: &str,
        t0: Complex64,
        near: f64,
        far: f64,
        params: Option<HashMap<String, Complex64>>,
        depth: usize,
    ) -> PyResult<Vec<f64>> {
        let o = self.0.ode(ode).map_err(err)?;
        let mut out = Vec::new();
        for b in o.painleve_test(depth).map_err(err)? {
            let mut asg = assignment(params.clone());
            for (_, s) in &b.free_symbols {
                asg.entry(*s).or_default();
            }
            let chk = numerics::verify_branch_numeric(o, &b, t0, &asg, near, far, 8, &IntegratorConfig::default())
                .map_err(err)?;
            out.push(chk.max_deviation);
        }
        Ok(out)
    }
}

#[pyclass(name = "Branch", frozen)]
struct PyBranch(PainleveBranch);

#[pymethods]
impl PyBranch {
    #[getter]
    fn leading_exponent(&self) -> i64 {
        self.0.leading_exponent
    }

    #[getter]
    fn leading_coefficient(&self) -> PyExpr {
        PyExpr(self.0.leading_coefficient.clone())
    }

    #[getter]
    fn resonances(&self) -> Vec<i64> {
        self.0.resonances.clone()
    }

    #[getter]
    fn free_symbols(&self) -> Vec<(i64, String)> {
        self.0.free_symbols.iter().map(|(k, s)| (*k, s.name().to_owned())).collect()
    }

    #[getter]
    fn compatible(&self) -> bool {
        self.0.compatible()
    }

    fn coefficient(&self, k: i64) -> PyExpr {
        PyExpr(self.0.series.coeff(k))
    }

    fn to_json(&self) -> String {
        serde_json::to_string(&self.0.to_json()).expect("branch serializes")
    }
}

#[pyclass(name = "Point", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyPoint(AccessiblePoint);

#[pymethods]
impl PyPoint {
    #[getter]
    fn name(&self) -> String {
        self.0.name.clone()
    }

    #[getter]
    fn chart(&self) -> String {
        self.0.chart.id.clone()
    }

    #[getter]
    fn divisor(&self) -> String {
        self.0.divisor.clone()
    }

    #[getter]
    fn coordinates(&self) -> Vec<String> {
        strings(&self.0.coordinates())
    }

    #[getter]
    fn multiplicity(&self) -> usize {
        self.0.multiplicity_hint
    }

    fn __repr__(&self) -> String {
        let c = self.0.coordinates();
        format!("Point({}, {}: ({}, {}))", self.0.name, self.0.chart.id, c[0], c[1])
    }
}

fn atlas(name: &str) -> PyResult<Atlas> {
    Atlas::builtin(name).or_else(|_| Atlas::parse(name)).map_err(err)
}

/// Accessible singular points of `system` on a built-in atlas, or an atlas given as text.
#[pyfunction]
fn accessible_points(system: &PySystem, atlas_name: &str) -> PyResult<Vec<PyPoint>> {
    let s = geometry::accessible_points(&system.0, &atlas(atlas_name)?).map_err(err)?;
    Ok(s.points.into_iter().map(PyPoint).collect())
}

/// `(a11, a22, a21, ratio, integer)` at an accessible point.
#[pyfunction]
fn local_index(system: &PySystem, point: &PyPoint) -> PyResult<(PyExpr, PyExpr, PyExpr, PyExpr, bool)> {
    let li = geometry::local_index(&system.0, &point.0).map_err(err)?;
    Ok((PyExpr(li.a11), PyExpr(li.a22), PyExpr(li.a21), PyExpr(li.resonance_ratio), li.integer_verdict))
}

/// `(single_valued, D(T), C(T) or None)` from the scaling-limit reduction at a point.
#[pyfunction]
fn alpha_test(system: &PySystem, point: &PyPoint) -> PyResult<(bool, PyExpr, Option<PyExpr>)> {
    let rep = geometry::solve_reduced(&geometry::alpha_reduce(&system.0, &point.0).map_err(err)?).map_err(err)?;
    Ok((rep.single_valued, PyExpr(rep.divisor_solution), rep.transverse_solution.map(PyExpr)))
}

/// Pole order of `system` along each divisor of the atlas, by name.
#[pyfunction]
fn pole_orders(system: &PySystem, atlas_name: &str) -> PyResult<Vec<(String, i64)>> {
    let a = atlas(atlas_name)?;
    a.divisors
        .iter()
        .map(|d| Ok((d.name.clone(), geometry::divisor_pole_order(&system.0, &a, d).map_err(err)?)))
        .collect()
}

/// Integrates along the straight segments between `path` points. Returns the times and
/// states at each waypoint and the diagnostic if the integration stopped early.
#[pyfunction]
#[pyo3(signature = (system, init, path, params = None, rtol = 1e-10, atol = 1e-12))]
#[allow(clippy::type_complexity)]
fn integrate(
    system: &PySystem,
    init: (Complex64, Complex64),
    path: Vec<Complex64>,
    params: Option<HashMap<String, Complex64>>,
    rtol: f64,
    atol: f64,
) -> PyResult<(Vec<Complex64>, Vec<(Complex64, Complex64)>, Option<String>)> {
    let segs: Vec<PathSegment> = path.windows(2).map(|w| PathSegment::new(w[0], w[1])).collect();
    let cfg = IntegratorConfig::default().with_tolerances(rtol, atol);
    let tr = numerics::integrate(&system.0, &assignment(params), [init.0, init.1], &segs, &cfg).map_err(err)?;
    let mut ts = vec![tr.samples[0].t];
    let mut ys = vec![(tr.samples[0].state[0], tr.samples[0].state[1])];
    for &i in &tr.checkpoints {
        ts.push(tr.samples[i].t);
        ys.push((tr.samples[i].state[0], tr.samples[i].state[1]));
    }
    Ok((ts, ys, tr.diagnostic))
}

#[pymodule]
#[pyo3(name = "painleve")]
fn painleve_module(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("PainleveError", m.py().get_type::<PainleveError>())?;
    m.add_class::<PyExpr>()?;
    m.add_class::<PySystem>()?;
    m.add_class::<PyMap>()?;
    m.add_class::<PyCatalog>()?;
    m.add_class::<PyBranch>()?;
    m.add_class::<PyPoint>()?;
    m.add_function(wrap_pyfunction!(accessible_points, m)?)?;
    m.add_function(wrap_pyfunction!(local_index, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_test, m)?)?;
    m.add_function(wrap_pyfunction!(pole_orders, m)?)?;
    m.add_function(wrap_pyfunction!(integrate, m)?)?;
    Ok(())
}
