//! Python bindings: values, spaces, relations, the Noetherian operations,
//! loops (from JSON files or the built-in examples) and the audit.

use std::collections::BTreeSet;

use noet::catalog::{build_in, CatalogExpr, SpaceExpr};
use noet::cli::audit;
use noet::cli::files::{LoopFile, RelationFile};
use noet::examples::{self, ExampleName, GcdOrder, Params};
use noet::loopkit::{verify, InputSample, LoopDef};
use noet::noether::{self, LimitMode, DEFAULT_FUEL};
use noet::{Error, Interval, Relation, Space, Value};
use pyo3::create_exception;
use pyo3::exceptions::{PyException, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyTuple;
use serde::Serialize;

create_exception!(pynoet, NoetError, PyException, "Raised for any library error.");
create_exception!(pynoet, NotNoetherianError, NoetError, "The relation admits an infinite chain.");

fn err(e: Error) -> PyErr {
    match e {
        Error::NotNoetherian => NotNoetherianError::new_err(e.to_string()),
        e => NoetError::new_err(e.to_string()),
    }
}

fn json_err(e: serde_json::Error) -> PyErr {
    NoetError::new_err(format!("malformed expression: {e}"))
}

/// Any serializable result as plain Python data.
fn to_py<T: Serialize>(py: Python<'_>, v: &T) -> PyResult<Py<PyAny>> {
    let text = serde_json::to_string(v).map_err(json_err)?;
    Ok(py.import("json")?.call_method1("loads", (text,))?.unbind())
}

/// Accepts a `Value`, an int, a 2-tuple, a list of ints or the text form.
fn to_value(obj: &Bound<'_, PyAny>) -> PyResult<Value> {
    if let Ok(v) = obj.extract::<PyRef<'_, PyValue>>() {
        return Ok(v.0.clone());
    }
    if let Ok(i) = obj.extract::<i64>() {
        return Ok(Value::Int(i));
    }
    if let Ok(s) = obj.extract::<String>() {
        return s.parse().map_err(err);
    }
    if let Ok(t) = obj.cast::<PyTuple>() {
        if t.len() == 2 {
            return Ok(Value::pair(to_value(&t.get_item(0)?)?, to_value(&t.get_item(1)?)?));
        }
        let items: PyResult<Vec<Value>> = t.iter().map(|x| to_value(&x)).collect();
        return Ok(Value::Tuple(items?));
    }
    if let Ok(seq) = obj.extract::<Vec<i64>>() {
        return Ok(Value::Seq(seq));
    }
    Err(PyValueError::new_err(format!("cannot convert {obj} to a value")))
}

fn to_values(objs: &Bound<'_, PyAny>) -> PyResult<Vec<Value>> {
    objs.try_iter()?.map(|x| to_value(&x?)).collect()
}

fn wrap_all(vs: impl IntoIterator<Item = Value>) -> Vec<PyValue> {
    vs.into_iter().map(PyValue).collect()
}

fn limit_mode(mode: &str) -> PyResult<LimitMode> {
    match mode {
        "minima" | "reachable_minima" => Ok(LimitMode::ReachableMinima),
        "maxdepth" => Ok(LimitMode::Maxdepth),
        _ => Err(PyValueError::new_err(format!("unknown limit mode {mode:?}"))),
    }
}

/// A state element, shown in its text form.
#[pyclass(name = "Value", module = "pynoet", frozen, eq, hash, ord, skip_from_py_object)]
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
struct PyValue(Value);

#[pymethods]
impl PyValue {
    #[new]
    fn new(obj: &Bound<'_, PyAny>) -> PyResult<Self> {
        to_value(obj).map(PyValue)
    }

    #[staticmethod]
    fn interval(lo: i64, hi: i64) -> PyResult<Self> {
        Ok(PyValue(Value::Interval(Interval::new(lo, hi).map_err(err)?)))
    }

    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        serde_json::from_str(text).map(PyValue).map_err(json_err)
    }

    fn to_json(&self) -> PyResult<String> {
        serde_json::to_string(&self.0).map_err(json_err)
    }

    /// The integer, or `None` for other kinds of value.
    fn as_int(&self) -> Option<i64> {
        self.0.as_int()
    }

    fn __str__(&self) -> String {
        self.0.to_string()
    }

    fn __repr__(&self) -> String {
        format!("Value('{}')", self.0)
    }
}

#[pyclass(name = "Space", module = "pynoet", frozen, from_py_object)]
#[derive(Clone)]
struct PySpace(Space);

#[pymethods]
impl PySpace {
    #[staticmethod]
    fn int_range(lo: i64, hi: i64) -> Self {
        PySpace(Space::int_range(lo, hi))
    }

    #[staticmethod]
    fn explicit(values: &Bound<'_, PyAny>) -> PyResult<Self> {
        Ok(PySpace(Space::explicit(to_values(values)?).map_err(err)?))
    }

    #[staticmethod]
    fn product(factors: Vec<PySpace>) -> Self {
        PySpace(Space::product(factors.into_iter().map(|s| s.0).collect()))
    }

    #[staticmethod]
    fn intervals_of(lo: i64, hi: i64) -> Self {
        PySpace(Space::intervals_of(lo, hi))
    }

    #[staticmethod]
    fn interval_sets_of(lo: i64, hi: i64) -> Self {
        PySpace(Space::interval_sets_of(lo, hi))
    }

    /// A space from its JSON description, e.g. `{"kind": "int_range", "lo": 0, "hi": 3}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let expr: SpaceExpr = serde_json::from_str(text).map_err(json_err)?;
        Ok(PySpace(expr.to_space().map_err(err)?))
    }

    fn values(&self) -> PyResult<Vec<PyValue>> {
        Ok(wrap_all(self.0.values().map_err(err)?.iter().cloned()))
    }

    fn __len__(&self) -> PyResult<usize> {
        self.0.len().map_err(err)
    }

    fn __contains__(&self, v: &Bound<'_, PyAny>) -> PyResult<bool> {
        Ok(self.0.contains(&to_value(v)?))
    }
}

#[pyclass(name = "Relation", module = "pynoet", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyRelation(Relation);

#[pymethods]
impl PyRelation {
    #[staticmethod]
    fn from_pairs(space: &PySpace, pairs: &Bound<'_, PyAny>) -> PyResult<Self> {
        let pairs = pairs
            .try_iter()?
            .map(|p| {
                let (a, b): (Bound<'_, PyAny>, Bound<'_, PyAny>) = p?.extract()?;
                Ok((to_value(&a)?, to_value(&b)?))
            })
            .collect::<PyResult<Vec<_>>>()?;
        Ok(PyRelation(Relation::from_pairs(&space.0, pairs).map_err(err)?))
    }

    /// A relation file: `{"space": ..., "relation": ...}`.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: RelationFile = serde_json::from_str(text).map_err(json_err)?;
        Ok(PyRelation(file.build().map_err(err)?))
    }

    /// Builds a catalog expression, with `space` for extensional leaves.
    #[staticmethod]
    #[pyo3(signature = (expr, space=None))]
    fn catalog(expr: &str, space: Option<&PySpace>) -> PyResult<Self> {
        let expr: CatalogExpr = serde_json::from_str(expr).map_err(json_err)?;
        Ok(PyRelation(build_in(&expr, space.map(|s| &s.0)).map_err(err)?))
    }

    fn to_json(&self) -> PyResult<String> {
        let file = RelationFile::from_relation(&self.0).map_err(err)?;
        serde_json::to_string(&file).map_err(json_err)
    }

    fn space(&self) -> PySpace {
        PySpace(self.0.space().clone())
    }

    fn pairs(&self) -> PyResult<Vec<(PyValue, PyValue)>> {
        Ok(self.0.pairs().map_err(err)?.into_iter().map(|(a, b)| (PyValue(a), PyValue(b))).collect())
    }

    fn contains(&self, a: &Bound<'_, PyAny>, b: &Bound<'_, PyAny>) -> PyResult<bool> {
        self.0.contains(&to_value(a)?, &to_value(b)?).map_err(err)
    }

    fn image(&self, a: &Bound<'_, PyAny>) -> PyResult<Vec<PyValue>> {
        Ok(wrap_all(self.0.image(&to_value(a)?).map_err(err)?))
    }

    fn domain(&self) -> PyResult<Vec<PyValue>> {
        Ok(wrap_all(self.0.domain().map_err(err)?))
    }

    fn __len__(&self) -> PyResult<usize> {
        self.0.len().map_err(err)
    }

    fn equals(&self, other: &PyRelation) -> PyResult<bool> {
        self.0.equals(&other.0).map_err(err)
    }

    fn inverse(&self) -> PyResult<Self> {
        self.0.inverse().map(PyRelation).map_err(err)
    }

    fn compose(&self, other: &PyRelation) -> PyResult<Self> {
        self.0.compose(&other.0).map(PyRelation).map_err(err)
    }

    fn restrict(&self, to: &Bound<'_, PyAny>) -> PyResult<Self> {
        let set: BTreeSet<Value> = to_values(to)?.into_iter().collect();
        self.0.restrict(&set).map(PyRelation).map_err(err)
    }

    fn union(&self, other: &PyRelation) -> PyResult<Self> {
        self.0.union(&other.0).map(PyRelation).map_err(err)
    }

    fn intersection(&self, other: &PyRelation) -> PyResult<Self> {
        self.0.intersection(&other.0).map(PyRelation).map_err(err)
    }

    fn power(&self, n: usize) -> PyResult<Self> {
        self.0.power(n).map(PyRelation).map_err(err)
    }

    fn plus(&self) -> PyResult<Self> {
        Ok(PyRelation(self.0.closures().map_err(err)?.0))
    }

    fn star(&self) -> PyResult<Self> {
        Ok(PyRelation(self.0.closures().map_err(err)?.1))
    }

    fn classify(&self, py: Python<'_>) -> PyResult<Py<PyAny>> {
        to_py(py, &self.0.classify().map_err(err)?)
    }

    /// `{"status", "method", "witness"}`; the witness is a chain of values.
    #[pyo3(signature = (fuel=DEFAULT_FUEL))]
    fn is_noetherian(&self, py: Python<'_>, fuel: usize) -> PyResult<Py<PyAny>> {
        to_py(py, &noether::is_noetherian(&self.0, fuel))
    }

    fn minima(&self) -> PyResult<Vec<PyValue>> {
        Ok(wrap_all(noether::minima(&self.0).map_err(err)?))
    }

    fn height(&self, a: &Bound<'_, PyAny>) -> PyResult<usize> {
        noether::height(&self.0, &to_value(a)?).map_err(err)
    }

    #[pyo3(signature = (mode="minima"))]
    fn limit(&self, mode: &str) -> PyResult<Self> {
        noether::limit(&self.0, limit_mode(mode)?).map(PyRelation).map_err(err)
    }

    #[pyo3(signature = (a, mode="minima"))]
    fn limit_image(&self, a: &Bound<'_, PyAny>, mode: &str) -> PyResult<Vec<PyValue>> {
        Ok(wrap_all(noether::limit_image(&self.0, &to_value(a)?, limit_mode(mode)?).map_err(err)?))
    }

    /// Whether `self` is a seed of `s`: contained in it with the same domain.
    fn is_seed_of(&self, s: &PyRelation) -> PyResult<bool> {
        noether::is_seed(&self.0, &s.0).map_err(err)
    }

    fn __repr__(&self) -> String {
        match self.0.len() {
            Ok(n) => format!("Relation({n} pairs)"),
            Err(_) => "Relation(unbounded)".into(),
        }
    }
}

#[pyclass(name = "Loop", module = "pynoet", frozen)]
struct PyLoop {
    lp: LoopDef,
    inputs: Option<Vec<Value>>,
}

impl PyLoop {
    /// A Python 2-tuple converts to a pair; search inputs are 2-element tuples.
    fn input(&self, obj: &Bound<'_, PyAny>) -> PyResult<Value> {
        Ok(match to_value(obj)? {
            Value::Pair(a, b) if !self.lp.input_space().contains(&Value::Pair(a.clone(), b.clone())) => {
                Value::Tuple(vec![*a, *b])
            }
            v => v,
        })
    }
}

#[pymethods]
impl PyLoop {
    /// A loop file: space, order, init pairs, body and optional postcondition.
    #[staticmethod]
    fn from_json(text: &str) -> PyResult<Self> {
        let file: LoopFile = serde_json::from_str(text).map_err(json_err)?;
        Ok(PyLoop { lp: file.build().map_err(err)?, inputs: None })
    }

    /// One of the built-in examples, instantiated for `input`.
    #[staticmethod]
    #[pyo3(signature = (name, input, pivot=None, bound=None, midpoint=false, overlapping=false, gcd_order="maxint"))]
    fn example(
        name: &str,
        input: &Bound<'_, PyAny>,
        pivot: Option<i64>,
        bound: Option<i64>,
        midpoint: bool,
        overlapping: bool,
        gcd_order: &str,
    ) -> PyResult<Self> {
        let name = ExampleName::parse(name).ok_or_else(|| PyValueError::new_err(format!("unknown example {name:?}")))?;
        let input = match to_value(input)? {
            Value::Pair(a, b) if name != ExampleName::Gcd => Value::Tuple(vec![*a, *b]),
            v => v,
        };
        let bad = || NoetError::new_err(format!("input {input} does not fit {name}"));
        let search = || -> PyResult<(Vec<i64>, i64)> {
            let t = input.component(0).and_then(Value::as_seq).ok_or_else(bad)?;
            let x = input.component(1).and_then(Value::as_int).ok_or_else(bad)?;
            Ok((t.to_vec(), x))
        };
        let array = || input.as_seq().map(<[i64]>::to_vec).ok_or_else(bad);
        let params = match name {
            ExampleName::Gcd => {
                let (a, b) = input.as_int_pair().ok_or_else(bad)?;
                let order = match gcd_order {
                    "maxint" => GcdOrder::MaxInt,
                    "intsum" => GcdOrder::IntSum,
                    other => return Err(PyValueError::new_err(format!("unknown gcd order {other:?}"))),
                };
                Params::Gcd { a, b, bound, order }
            }
            ExampleName::SeqSearch => {
                let (t, x) = search()?;
                Params::SeqSearch { t, x }
            }
            ExampleName::GeneralSearchInterval => {
                let (t, x) = search()?;
                Params::GeneralSearchInterval { t, x, midpoint }
            }
            ExampleName::GeneralSearchIntervalset => {
                let (t, x) = search()?;
                Params::GeneralSearchIntervalset { t, x, disjoint: !overlapping }
            }
            ExampleName::Partition => {
                let pivot = pivot.ok_or_else(|| PyValueError::new_err("partition needs a pivot"))?;
                Params::Partition { t: array()?, pivot }
            }
            ExampleName::Lamsort => Params::Lamsort { t: array()? },
        };
        let inst = examples::instantiate(&params).map_err(err)?;
        Ok(PyLoop { lp: inst.lp, inputs: Some(inst.inputs) })
    }

    fn space(&self) -> PySpace {
        PySpace(self.lp.space().clone())
    }

    fn body(&self) -> PyRelation {
        PyRelation(self.lp.body().clone())
    }

    fn order(&self) -> PyRelation {
        PyRelation(self.lp.order().clone())
    }

    /// One execution: `{"input", "states", "terminal", "steps"}`.
    #[pyo3(signature = (input, fuel=DEFAULT_FUEL))]
    fn run(&self, py: Python<'_>, input: &Bound<'_, PyAny>, fuel: usize) -> PyResult<Py<PyAny>> {
        to_py(py, &self.lp.run(&self.input(input)?, fuel).map_err(err)?)
    }

    /// Every terminal state reachable from `input`.
    #[pyo3(signature = (input, fuel=DEFAULT_FUEL))]
    fn terminals(&self, input: &Bound<'_, PyAny>, fuel: usize) -> PyResult<Vec<PyValue>> {
        Ok(wrap_all(self.lp.run_all(&self.input(input)?, fuel).map_err(err)?.terminals))
    }

    /// Checks the loop's obligations over its inputs and returns the report.
    #[pyo3(signature = (fuel=DEFAULT_FUEL))]
    fn verify(&self, py: Python<'_>, fuel: usize) -> PyResult<Py<PyAny>> {
        let sample = match &self.inputs {
            Some(inputs) => InputSample::Values(inputs.clone()),
            None => InputSample::All,
        };
        to_py(py, &verify(&self.lp, &sample, fuel))
    }
}

/// Runs the claim audit and returns its findings.
#[pyfunction]
#[pyo3(signature = (seed=0, samples=audit::DEFAULT_SAMPLES))]
fn run_audit(py: Python<'_>, seed: u64, samples: usize) -> PyResult<Py<PyAny>> {
    to_py(py, &audit::audit(seed, samples).map_err(err)?)
}

/// Names of the built-in examples.
#[pyfunction]
fn example_names() -> Vec<&'static str> {
    ExampleName::ALL.iter().map(|n| n.as_str()).collect()
}

#[pymodule]
pub fn pynoet(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add("NoetError", m.py().get_type::<NoetError>())?;
    m.add("NotNoetherianError", m.py().get_type::<NotNoetherianError>())?;
    m.add_class::<PyValue>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PyRelation>()?;
    m.add_class::<PyLoop>()?;
    m.add_function(wrap_pyfunction!(run_audit, m)?)?;
    m.add_function(wrap_pyfunction!(example_names, m)?)?;
    Ok(())
}
