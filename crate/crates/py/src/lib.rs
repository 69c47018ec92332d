//! Python bindings: `import svcalc`.

use pyo3::create_exception;
use pyo3::exceptions::{PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyAny;
use serde::Serialize;

use svcalc_core::approximant::{
    alpha_probe as core_alpha_probe, approximant_anchored, approximant_eval,
    error_curve as core_error_curve, fit_order, CurveSide, ErrorCurve, LocalLinearApproximant,
    NoiseFloor,
};
use svcalc_core::calculus::{
    anchored_dds as core_anchored_dds, full_dd as core_full_dd, one_sided_derivative,
    DerivativeField, HLadder, Side,
};
use svcalc_core::set_core::{
    hausdorff_direct, hausdorff_via_pairs, metric_difference as core_metric_difference,
    metric_pairs as core_metric_pairs, set_norm,
};
use svcalc_core::svf::{
    eval, gallery as core_gallery, gallery_names as core_gallery_names, PiecewiseSpec,
    PiecewiseSvf, SetValuedFunction,
};
use svcalc_core::{CompactSet, Error, Point, Tolerances};

create_exception!(svcalc, UnconvergedError, PyRuntimeError);
create_exception!(svcalc, InsufficientDataError, PyRuntimeError);

fn py_err(e: Error) -> PyErr {
    match e {
        Error::Unconverged { .. } => UnconvergedError::new_err(e.to_string()),
        Error::InsufficientData { .. } => InsufficientDataError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

trait OrPy<T> {
    fn or_py(self) -> PyResult<T>;
}

impl<T> OrPy<T> for svcalc_core::Result<T> {
    fn or_py(self) -> PyResult<T> {
        self.map_err(py_err)
    }
}

/// Serializes `value` and hands it to Python's `json.loads`.
fn to_py<T: Serialize>(py: Python<'_>, value: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(value).map_err(|e| PyValueError::new_err(e.to_string()))?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

fn parse_side(side: &str) -> PyResult<Side> {
    side.parse().or_py()
}

fn parse_curve_side(side: &str) -> PyResult<CurveSide> {
    side.parse().or_py()
}

fn ladder(h0: f64, ratio: f64, rungs: usize) -> PyResult<HLadder> {
    HLadder::new(h0, ratio, rungs).or_py()
}

/// Finite point set in ℝⁿ; accepts a list of numbers or a list of rows.
#[pyclass(name = "CompactSet", module = "svcalc", frozen)]
struct PySet {
    inner: CompactSet,
}

impl From<CompactSet> for PySet {
    fn from(inner: CompactSet) -> Self {
        PySet { inner }
    }
}

#[pymethods]
impl PySet {
    #[new]
    fn new(points: &Bound<'_, PyAny>) -> PyResult<Self> {
        let inner = if let Ok(values) = points.extract::<Vec<f64>>() {
            CompactSet::from_scalars(&values)
        } else {
            let rows: Vec<Vec<f64>> = points.extract()?;
            CompactSet::from_rows(&rows)
        };
        Ok(inner.or_py()?.into())
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    fn rows(&self) -> Vec<Vec<f64>> {
        self.inner.rows()
    }

    /// Coordinates of a one-dimensional set, or None.
    fn scalars(&self) -> Option<Vec<f64>> {
        self.inner.scalars()
    }

    fn norm(&self) -> f64 {
        set_norm(&self.inner)
    }

    fn union(&self, other: &PySet) -> PyResult<PySet> {
        Ok(self.inner.union(&other.inner).or_py()?.into())
    }

    fn __len__(&self) -> usize {
        self.inner.len()
    }

    fn __eq__(&self, other: &Bound<'_, PyAny>) -> bool {
        other
            .cast::<PySet>()
            .is_ok_and(|o| o.get().inner == self.inner)
    }

    fn __repr__(&self) -> String {
        format!("CompactSet({:?})", self.inner.rows())
    }
}

/// A set-valued function from the gallery or a piecewise definition.
#[pyclass(name = "Svf", module = "svcalc", frozen)]
struct PySvf {
    inner: Box<dyn SetValuedFunction>,
}

impl PySvf {
    fn f(&self) -> &dyn SetValuedFunction {
        self.inner.as_ref()
    }
}

#[pymethods]
impl PySvf {
    /// Gallery member by name; `params` is a JSON string.
    #[staticmethod]
    #[pyo3(signature = (name, params = None))]
    fn gallery(name: &str, params: Option<&str>) -> PyResult<Self> {
        let params = match params {
            Some(p) => serde_json::from_str(p).map_err(|e| PyValueError::new_err(e.to_string()))?,
            None => serde_json::Value::Null,
        };
        Ok(PySvf {
            inner: Box::new(core_gallery(name, &params).or_py()?),
        })
    }

    /// Piecewise interval-valued function from its JSON definition.
    #[staticmethod]
    fn piecewise(spec: &str) -> PyResult<Self> {
        let spec: PiecewiseSpec =
            serde_json::from_str(spec).map_err(|e| PyValueError::new_err(e.to_string()))?;
        Ok(PySvf {
            inner: Box::new(PiecewiseSvf::from_spec(&spec).or_py()?),
        })
    }

    #[getter]
    fn name(&self) -> String {
        self.inner.name()
    }

    #[getter]
    fn dim(&self) -> usize {
        self.inner.dim()
    }

    #[getter]
    fn domain(&self) -> (f64, f64) {
        let d = self.inner.domain();
        (d.a, d.b)
    }

    #[pyo3(signature = (x, resolution = 256))]
    fn __call__(&self, x: f64, resolution: usize) -> PyResult<PySet> {
        Ok(eval(self.f(), x, resolution).or_py()?.into())
    }

    fn __repr__(&self) -> String {
        format!("Svf({})", self.inner.name())
    }
}

/// One-sided derivative estimate at every anchor of the sampled F(x0).
#[pyclass(name = "DerivativeField", module = "svcalc", frozen)]
struct PyField {
    inner: DerivativeField,
}

#[pymethods]
impl PyField {
    #[getter]
    fn x0(&self) -> f64 {
        self.inner.x0
    }

    #[getter]
    fn side(&self) -> String {
        self.inner.side.to_string()
    }

    #[getter]
    fn converged(&self) -> bool {
        self.inner.converged
    }

    #[getter]
    fn conv_tol(&self) -> f64 {
        self.inner.conv_tol
    }

    #[getter]
    fn steps(&self) -> Vec<f64> {
        self.inner.steps.clone()
    }

    fn anchors(&self) -> Vec<Vec<f64>> {
        self.inner.anchors.iter().map(|a| a.y.to_vec()).collect()
    }

    /// Derivative set at anchor `y`, or None if `y` is not an anchor.
    #[pyo3(signature = (y, tol = 1e-12))]
    fn at(&self, y: Vec<f64>, tol: f64) -> PyResult<Option<PySet>> {
        let y = Point::new(y).or_py()?;
        Ok(self
            .inner
            .get(&y, tol)
            .map(|a| a.derivative_points.clone().into()))
    }

    fn residuals(&self, y: Vec<f64>) -> PyResult<Option<Vec<f64>>> {
        let y = Point::new(y).or_py()?;
        Ok(self.inner.get(&y, 1e-12).map(|a| a.residuals.clone()))
    }

    fn unconverged(&self) -> Vec<Vec<f64>> {
        self.inner.unconverged().map(|a| a.y.to_vec()).collect()
    }

    fn to_dict(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.inner)
    }
}

/// Local linear approximant L F around x0.
#[pyclass(name = "Approximant", module = "svcalc", frozen)]
struct PyApproximant {
    inner: LocalLinearApproximant,
}

#[pymethods]
impl PyApproximant {
    #[getter]
    fn x0(&self) -> f64 {
        self.inner.x0
    }

    #[getter]
    fn f_at_x0(&self) -> PySet {
        self.inner.f_at_x0.clone().into()
    }

    fn __call__(&self, x: f64) -> PyResult<PySet> {
        Ok(approximant_eval(&self.inner, x).or_py()?.into())
    }

    /// {y0} + (x − x0)·D F(x0)|y0.
    fn anchored(&self, y0: Vec<f64>, x: f64) -> PyResult<PySet> {
        let y0 = Point::new(y0).or_py()?;
        Ok(approximant_anchored(&self.inner, &y0, x).or_py()?.into())
    }

    fn field(&self, side: &str) -> PyResult<Option<PyField>> {
        let side = parse_side(side)?;
        Ok(self.inner.field(side).map(|f| PyField { inner: f.clone() }))
    }
}

#[pyfunction]
fn hausdorff(a: &PySet, b: &PySet) -> PyResult<f64> {
    hausdorff_via_pairs(&a.inner, &b.inner, &Tolerances::default()).or_py()
}

/// Hausdorff distance by the brute-force double sup-inf.
#[pyfunction]
fn hausdorff_brute(a: &PySet, b: &PySet) -> PyResult<f64> {
    hausdorff_direct(&a.inner, &b.inner).or_py()
}

#[pyfunction]
fn metric_pairs(a: &PySet, b: &PySet) -> PyResult<Vec<(Vec<f64>, Vec<f64>)>> {
    let pairs = core_metric_pairs(&a.inner, &b.inner, &Tolerances::default()).or_py()?;
    Ok(pairs
        .iter()
        .map(|(p, q)| (p.to_vec(), q.to_vec()))
        .collect())
}

#[pyfunction]
fn metric_difference(a: &PySet, b: &PySet) -> PyResult<PySet> {
    Ok(
        core_metric_difference(&a.inner, &b.inner, &Tolerances::default())
            .or_py()?
            .into(),
    )
}

#[pyfunction]
fn gallery_names() -> Vec<&'static str> {
    core_gallery_names().to_vec()
}

/// Anchored divided differences as (anchor, set) pairs.
#[pyfunction]
#[pyo3(signature = (f, x0, x, resolution = 256))]
fn anchored_dds(f: &PySvf, x0: f64, x: f64, resolution: usize) -> PyResult<Vec<(Vec<f64>, PySet)>> {
    let dds = core_anchored_dds(f.f(), x0, x, resolution, &Tolerances::default()).or_py()?;
    Ok(dds
        .into_iter()
        .map(|d| (d.anchor.to_vec(), d.value.into()))
        .collect())
}

#[pyfunction]
#[pyo3(signature = (f, x0, x, resolution = 256))]
fn full_dd(f: &PySvf, x0: f64, x: f64, resolution: usize) -> PyResult<PySet> {
    Ok(
        core_full_dd(f.f(), x0, x, resolution, &Tolerances::default())
            .or_py()?
            .into(),
    )
}

#[pyfunction]
#[pyo3(signature = (f, x0, side = "right", resolution = 256, h0 = 0.25, ratio = 0.5, rungs = 12, conv_tol = None))]
#[allow(clippy::too_many_arguments)]
fn derivative(
    py: Python<'_>,
    f: &PySvf,
    x0: f64,
    side: &str,
    resolution: usize,
    h0: f64,
    ratio: f64,
    rungs: usize,
    conv_tol: Option<f64>,
) -> PyResult<PyField> {
    let side = parse_side(side)?;
    let ladder = ladder(h0, ratio, rungs)?;
    let inner = py
        .detach(|| {
            one_sided_derivative(
                f.f(),
                x0,
                side,
                &ladder,
                conv_tol,
                resolution,
                &Tolerances::default(),
            )
        })
        .or_py()?;
    Ok(PyField { inner })
}

/// Raises UnconvergedError if a requested side does not converge.
#[pyfunction]
#[pyo3(signature = (f, x0, sides = vec!["right".to_string(), "left".to_string()], resolution = 256, h0 = 0.25, ratio = 0.5, rungs = 12, conv_tol = None))]
#[allow(clippy::too_many_arguments)]
fn approximant(
    py: Python<'_>,
    f: &PySvf,
    x0: f64,
    sides: Vec<String>,
    resolution: usize,
    h0: f64,
    ratio: f64,
    rungs: usize,
    conv_tol: Option<f64>,
) -> PyResult<PyApproximant> {
    let sides = sides
        .iter()
        .map(|s| parse_side(s))
        .collect::<PyResult<Vec<_>>>()?;
    let ladder = ladder(h0, ratio, rungs)?;
    let inner = py
        .detach(|| {
            LocalLinearApproximant::build(
                f.f(),
                x0,
                &sides,
                &ladder,
                conv_tol,
                resolution,
                &Tolerances::default(),
            )
        })
        .or_py()?;
    Ok(PyApproximant { inner })
}

/// err(h) along the ladder as lists `(h, err)`.
#[pyfunction]
#[pyo3(signature = (f, approx, side = "both", resolution = 256, h0 = 0.25, ratio = 0.5, rungs = 12))]
#[allow(clippy::too_many_arguments)]
fn error_curve(
    py: Python<'_>,
    f: &PySvf,
    approx: &PyApproximant,
    side: &str,
    resolution: usize,
    h0: f64,
    ratio: f64,
    rungs: usize,
) -> PyResult<(Vec<f64>, Vec<f64>)> {
    let curve = curve(py, f, approx, side, resolution, ladder(h0, ratio, rungs)?)?;
    Ok(curve.samples.iter().map(|s| (s.h, s.err)).unzip())
}

fn curve(
    py: Python<'_>,
    f: &PySvf,
    approx: &PyApproximant,
    side: &str,
    resolution: usize,
    ladder: HLadder,
) -> PyResult<ErrorCurve> {
    let side = parse_curve_side(side)?;
    py.detach(|| {
        core_error_curve(
            f.f(),
            &approx.inner,
            &ladder,
            side,
            resolution,
            &Tolerances::default(),
        )
    })
    .or_py()
}

/// Builds the approximant, measures its error curve and fits the order.
///
/// Returns `{"curve": ..., "noise_floor": ..., "fit": ...}`.
#[pyfunction]
#[pyo3(signature = (f, x0, side = "both", resolution = 256, h0 = 0.25, ratio = 0.5, rungs = 12, conv_tol = None, noise_floor = None))]
#[allow(clippy::too_many_arguments)]
fn order(
    py: Python<'_>,
    f: &PySvf,
    x0: f64,
    side: &str,
    resolution: usize,
    h0: f64,
    ratio: f64,
    rungs: usize,
    conv_tol: Option<f64>,
    noise_floor: Option<(f64, f64)>,
) -> PyResult<Py<PyAny>> {
    let curve_side = parse_curve_side(side)?;
    let sides: Vec<String> = curve_side.sides().iter().map(|s| s.to_string()).collect();
    let l = approximant(py, f, x0, sides, resolution, h0, ratio, rungs, conv_tol)?;
    let c = curve(py, f, &l, side, resolution, ladder(h0, ratio, rungs)?)?;
    let floor = match noise_floor {
        Some((absolute, per_h)) => NoiseFloor { absolute, per_h },
        None => c.default_noise_floor(),
    };
    let fit = fit_order(&c, &floor).or_py()?;
    to_py(
        py,
        &serde_json::json!({"curve": c, "noise_floor": floor, "fit": fit}),
    )
}

/// Fitted Hölder order of the divided-difference deviation at x0.
#[pyfunction]
#[pyo3(signature = (f, x0, side = "right", resolution = 256, h0 = 0.25, ratio = 0.5, rungs = 12, conv_tol = None))]
#[allow(clippy::too_many_arguments)]
fn alpha_probe(
    py: Python<'_>,
    f: &PySvf,
    x0: f64,
    side: &str,
    resolution: usize,
    h0: f64,
    ratio: f64,
    rungs: usize,
    conv_tol: Option<f64>,
) -> PyResult<Py<PyAny>> {
    let side = parse_side(side)?;
    let ladder = ladder(h0, ratio, rungs)?;
    let probe = py
        .detach(|| {
            core_alpha_probe(
                f.f(),
                x0,
                side,
                &ladder,
                conv_tol,
                resolution,
                &Tolerances::default(),
                None,
            )
        })
        .or_py()?;
    to_py(py, &probe)
}

#[pymodule]
fn svcalc(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PySet>()?;
    m.add_class::<PySvf>()?;
    m.add_class::<PyField>()?;
    m.add_class::<PyApproximant>()?;
    m.add("UnconvergedError", m.py().get_type::<UnconvergedError>())?;
    m.add(
        "InsufficientDataError",
        m.py().get_type::<InsufficientDataError>(),
    )?;
    m.add_function(wrap_pyfunction!(hausdorff, m)?)?;
    m.add_function(wrap_pyfunction!(hausdorff_brute, m)?)?;
    m.add_function(wrap_pyfunction!(metric_pairs, m)?)?;
    m.add_function(wrap_pyfunction!(metric_difference, m)?)?;
    m.add_function(wrap_pyfunction!(gallery_names, m)?)?;
    m.add_function(wrap_pyfunction!(anchored_dds, m)?)?;
    m.add_function(wrap_pyfunction!(full_dd, m)?)?;
    m.add_function(wrap_pyfunction!(derivative, m)?)?;
    m.add_function(wrap_pyfunction!(approximant, m)?)?;
    m.add_function(wrap_pyfunction!(error_curve, m)?)?;
    m.add_function(wrap_pyfunction!(order, m)?)?;
    m.add_function(wrap_pyfunction!(alpha_probe, m)?)?;
    Ok(())
}
