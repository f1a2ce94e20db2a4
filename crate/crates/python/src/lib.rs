//! Python bindings: `treegen.Scheme`, `treegen.Generator`, `treegen.Tree`
//! and block-graph conversions through graph6 strings.

use std::sync::Mutex;

use num_bigint::BigUint;
use pyo3::exceptions::{PyIndexError, PyOSError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyBytes;
use treegen_core::{
    self as core, CacheOutcome, ColorId, ColorScheme, CountTable, FreeSegment, RankedSpace, SpaceKind, Structure,
};

fn py_err(e: core::Error) -> PyErr {
    match e {
        core::Error::RankOutOfRange { .. } => PyIndexError::new_err(e.to_string()),
        core::Error::Io(_) | core::Error::Cache(_) => PyOSError::new_err(e.to_string()),
        _ => PyValueError::new_err(e.to_string()),
    }
}

/// A color scheme: per-color weight ranges, minimum subtree weights and
/// child colors, plus the colors allowed at a free tree's centroid.
#[pyclass(name = "Scheme", module = "treegen", frozen, from_py_object)]
#[derive(Clone)]
struct PyScheme {
    inner: ColorScheme,
}

#[pymethods]
impl PyScheme {
    /// One of the built-in presets: `gray`, `pos-weighted`, `block`.
    #[staticmethod]
    fn preset(name: &str) -> PyResult<Self> {
        ColorScheme::preset(name)
            .map(|inner| PyScheme { inner })
            .ok_or_else(|| PyValueError::new_err(format!("unknown preset {name:?}")))
    }

    /// Parses the line-oriented scheme format.
    #[staticmethod]
    fn parse(text: &str) -> PyResult<Self> {
        ColorScheme::parse(text).map(|inner| PyScheme { inner }).map_err(py_err)
    }

    #[getter]
    fn colors(&self) -> Vec<String> {
        self.inner.color_ids().map(|c| self.inner.name(c).to_string()).collect()
    }

    #[getter]
    fn root_colors(&self) -> Vec<String> {
        self.inner.root_colors().iter().map(|&c| self.inner.name(c).to_string()).collect()
    }

    fn to_text(&self) -> String {
        self.inner.to_text()
    }

    fn hash(&self) -> String {
        self.inner.hash()
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.inner == other.inner
    }

    fn __repr__(&self) -> String {
        format!("Scheme({})", self.colors().join(", "))
    }
}

impl PyScheme {
    fn color(&self, name: &str) -> PyResult<ColorId> {
        self.inner.color_by_name(name).ok_or_else(|| PyValueError::new_err(format!("unknown color {name:?}")))
    }
}

/// An immutable colored weighted rooted tree.
#[pyclass(name = "Tree", module = "treegen", frozen, from_py_object)]
#[derive(Clone)]
struct PyTree {
    tree: core::Tree,
    scheme: ColorScheme,
}

impl PyTree {
    fn wrap(tree: core::Tree, scheme: &ColorScheme) -> Self {
        PyTree { tree, scheme: scheme.clone() }
    }
}

#[pymethods]
impl PyTree {
    /// Parses the one-line `depth:weight:color` text form.
    #[staticmethod]
    fn parse(text: &str, scheme: &PyScheme) -> PyResult<Self> {
        core::Tree::parse_text(text, &scheme.inner).map(|t| PyTree::wrap(t, &scheme.inner)).map_err(py_err)
    }

    #[getter]
    fn weight(&self) -> u32 {
        self.tree.weight()
    }

    #[getter]
    fn color(&self) -> String {
        self.scheme.name(self.tree.color()).to_string()
    }

    #[getter]
    fn total_weight(&self) -> u32 {
        self.tree.total_weight()
    }

    #[getter]
    fn children(&self) -> Vec<PyTree> {
        self.tree.children().iter().map(|c| PyTree::wrap((**c).clone(), &self.scheme)).collect()
    }

    fn vertex_count(&self) -> usize {
        self.tree.vertex_count()
    }

    fn canonical_code<'py>(&self, py: Python<'py>) -> Bound<'py, PyBytes> {
        PyBytes::new(py, &self.tree.canonical_code())
    }

    fn is_canonical(&self) -> bool {
        core::is_canonical(&self.tree, &self.scheme)
    }

    /// The same free tree rooted at its central centroid.
    fn centroid_rooted(&self) -> PyResult<Self> {
        core::centroid_rooted(&self.tree).map(|t| PyTree::wrap(t, &self.scheme)).map_err(py_err)
    }

    fn to_text(&self) -> String {
        self.tree.to_text(&self.scheme)
    }

    /// graph6 string of the block graph this block tree encodes.
    fn to_graph6(&self) -> PyResult<String> {
        core::block_tree_to_graph(&self.tree).map(|g| g.to_graph6()).map_err(py_err)
    }

    fn __eq__(&self, other: &Self) -> bool {
        self.tree == other.tree
    }

    fn __lt__(&self, other: &Self) -> bool {
        self.tree < other.tree
    }

    fn __hash__(&self) -> u64 {
        use std::hash::{Hash, Hasher};
        let mut h = std::collections::hash_map::DefaultHasher::new();
        self.tree.hash(&mut h);
        h.finish()
    }

    fn __str__(&self) -> String {
        self.to_text()
    }

    fn __repr__(&self) -> String {
        format!("Tree({:?})", self.to_text())
    }
}

fn to_py(item: Structure, scheme: &ColorScheme, py: Python<'_>) -> PyResult<Py<PyAny>> {
    match item {
        Structure::Tree(t) => Ok(Py::new(py, PyTree::wrap(t, scheme))?.into_any()),
        Structure::Forest(f) => {
            let trees: Vec<PyTree> = f.trees().iter().map(|t| PyTree::wrap((**t).clone(), scheme)).collect();
            Ok(trees.into_pyobject(py)?.into_any().unbind())
        }
    }
}

fn from_py(item: &Bound<'_, PyAny>) -> PyResult<Structure> {
    if let Ok(t) = item.extract::<PyTree>() {
        return Ok(Structure::Tree(t.tree));
    }
    let trees: Vec<PyTree> = item.extract()?;
    Ok(Structure::Forest(core::Forest::new(trees.into_iter().map(|t| t.tree))))
}

/// Lazy iterator over a ranked space in rank order.
#[pyclass(name = "SpaceIter", module = "treegen")]
struct PySpaceIter {
    inner: Mutex<Box<dyn Iterator<Item = Structure> + Send>>,
    scheme: ColorScheme,
}

#[pymethods]
impl PySpaceIter {
    fn __iter__(slf: PyRef<'_, Self>) -> PyRef<'_, Self> {
        slf
    }

    fn __next__(&self, py: Python<'_>) -> PyResult<Option<Py<PyAny>>> {
        let next = self.inner.lock().unwrap().next();
        next.map(|item| to_py(item, &self.scheme, py)).transpose()
    }
}

/// A family of trees or forests with a fixed enumeration order.
#[pyclass(name = "Space", module = "treegen", frozen)]
struct PySpace {
    inner: RankedSpace,
}

#[pymethods]
impl PySpace {
    #[getter]
    fn size(&self) -> BigUint {
        self.inner.size().clone()
    }

    fn __len__(&self) -> PyResult<usize> {
        usize::try_from(self.inner.size()).map_err(|_| PyValueError::new_err("space too large for len(); use .size"))
    }

    fn __iter__(&self) -> PySpaceIter {
        PySpaceIter { inner: Mutex::new(self.inner.iter()), scheme: self.inner.scheme().clone() }
    }

    fn unrank(&self, py: Python<'_>, i: BigUint) -> PyResult<Py<PyAny>> {
        let item = self.inner.unrank(&i).map_err(py_err)?;
        to_py(item, self.inner.scheme(), py)
    }

    fn rank(&self, item: &Bound<'_, PyAny>) -> PyResult<BigUint> {
        self.inner.rank(&from_py(item)?).map_err(py_err)
    }

    /// `(item, rank, metadata)` for a uniform draw with the given seed.
    fn sample(&self, py: Python<'_>, seed: u64) -> PyResult<(Py<PyAny>, BigUint, String)> {
        let s = self.inner.sample(seed).map_err(py_err)?;
        let meta = s.metadata();
        Ok((to_py(s.item, self.inner.scheme(), py)?, s.rank, meta))
    }

    /// Ranks of `count` uniform draws from one seeded stream.
    fn sample_ranks(&self, seed: u64, count: usize) -> PyResult<Vec<BigUint>> {
        let mut sampler = self.inner.sampler(seed);
        (0..count).map(|_| sampler.draw_rank().map_err(py_err)).collect()
    }

    /// Contiguous rank chunks unranked on `workers` threads.
    fn parallel_enumerate(&self, py: Python<'_>, workers: usize) -> PyResult<Vec<Vec<Py<PyAny>>>> {
        if workers == 0 {
            return Err(PyValueError::new_err("need at least one worker"));
        }
        let chunks = py.detach(|| self.inner.parallel_enumerate(workers)).map_err(py_err)?;
        let scheme = self.inner.scheme();
        chunks
            .into_iter()
            .map(|chunk| chunk.into_iter().map(|item| to_py(item, scheme, py)).collect())
            .collect()
    }
}

/// Count tables plus ranking, unranking, enumeration and sampling up to a
/// maximum weight.
#[pyclass(name = "Generator", module = "treegen", frozen)]
struct PyGenerator {
    inner: core::Generator,
    scheme: PyScheme,
}

#[pymethods]
impl PyGenerator {
    /// Builds the tables, or loads them from `cache` (a file path) when it
    /// holds tables for the same scheme covering `max_weight`.
    #[new]
    #[pyo3(signature = (scheme, max_weight, cache = None))]
    fn new(py: Python<'_>, scheme: PyScheme, max_weight: u32, cache: Option<std::path::PathBuf>) -> PyResult<Self> {
        let s = scheme.inner.clone();
        let table = py
            .detach(|| match cache {
                None => CountTable::build(s, max_weight),
                Some(path) => CountTable::load_or_build(&path, &s, max_weight).map(|(t, _): (_, CacheOutcome)| t),
            })
            .map_err(py_err)?;
        Ok(PyGenerator { inner: core::Generator::from_table(table), scheme })
    }

    #[getter]
    fn scheme(&self) -> PyScheme {
        self.scheme.clone()
    }

    #[getter]
    fn max_weight(&self) -> u32 {
        self.inner.max_weight()
    }

    /// Number of free trees of weight `w`.
    fn count(&self, w: u32) -> PyResult<BigUint> {
        self.inner.free_count(w).map(|f| f.total.clone()).map_err(py_err)
    }

    /// Free-tree counts per centroid segment, as `(kind, colors, count)`.
    fn breakdown(&self, w: u32) -> PyResult<Vec<(String, Vec<String>, BigUint)>> {
        let s = &self.scheme.inner;
        let name = |c: ColorId| s.name(c).to_string();
        let fc = self.inner.free_count(w).map_err(py_err)?;
        Ok(fc
            .segments
            .iter()
            .map(|(seg, n)| match *seg {
                FreeSegment::Mono(c) => ("mono".into(), vec![name(c)], n.clone()),
                FreeSegment::Bi(c, d) => ("bi".into(), vec![name(c), name(d)], n.clone()),
                FreeSegment::Tri(c) => ("tri".into(), vec![name(c)], n.clone()),
            })
            .collect())
    }

    /// Free trees of weight `w`, each rooted at its central centroid.
    fn free(&self, w: u32) -> PyResult<PySpace> {
        self.space(SpaceKind::Free { weight: w })
    }

    /// Rooted trees of weight `w` with root color `color`; with `bound`,
    /// every child subtree weighs at most `bound`.
    #[pyo3(signature = (w, color, bound = None))]
    fn rooted(&self, w: u32, color: &str, bound: Option<u32>) -> PyResult<PySpace> {
        let color = self.scheme.color(color)?;
        self.space(match bound {
            None => SpaceKind::Rooted { weight: w, color },
            Some(bound) => SpaceKind::RootedBounded { weight: w, color, bound },
        })
    }

    /// Forests of total weight `w` whose trees have root color `color`.
    #[pyo3(signature = (w, color, bound = None, multiplicity = None))]
    fn forests(&self, w: u32, color: &str, bound: Option<u32>, multiplicity: Option<u32>) -> PyResult<PySpace> {
        let color = self.scheme.color(color)?;
        self.space(SpaceKind::Forest { weight: w, color, bound, multiplicity })
    }
}

impl PyGenerator {
    fn space(&self, kind: SpaceKind) -> PyResult<PySpace> {
        self.inner.space(kind).map(|inner| PySpace { inner }).map_err(py_err)
    }
}

/// Whether the graph6 string describes a block graph.
#[pyfunction]
fn is_block_graph(graph6: &str) -> PyResult<bool> {
    core::Graph::from_graph6(graph6).map(|g| core::is_block_graph(&g)).map_err(py_err)
}

/// The centroid-rooted block tree of a block graph given as graph6.
#[pyfunction]
fn graph6_to_block_tree(graph6: &str) -> PyResult<PyTree> {
    let g = core::Graph::from_graph6(graph6).map_err(py_err)?;
    let t = core::graph_to_block_tree(&g).map_err(py_err)?;
    Ok(PyTree::wrap(t, &ColorScheme::block()))
}

/// Number of multisets of size `k` over `n` kinds.
#[pyfunction]
fn multiset_count(n: BigUint, k: u32) -> BigUint {
    core::multiset_count(&n, k)
}

/// The multiset of rank `i`, as a non-increasing list of kinds.
#[pyfunction]
fn find_multiset(n: BigUint, k: u32, i: BigUint) -> PyResult<Vec<BigUint>> {
    core::find_multiset(&n, k, &i).map_err(py_err)
}

#[pyfunction]
fn rank_multiset(n: BigUint, k: u32, multiset: Vec<BigUint>) -> PyResult<BigUint> {
    core::rank_multiset(&n, k, &multiset).map_err(py_err)
}

#[pymodule]
fn treegen(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyScheme>()?;
    m.add_class::<PyTree>()?;
    m.add_class::<PyGenerator>()?;
    m.add_class::<PySpace>()?;
    m.add_class::<PySpaceIter>()?;
    m.add_function(wrap_pyfunction!(is_block_graph, m)?)?;
    m.add_function(wrap_pyfunction!(graph6_to_block_tree, m)?)?;
    m.add_function(wrap_pyfunction!(multiset_count, m)?)?;
    m.add_function(wrap_pyfunction!(find_multiset, m)?)?;
    m.add_function(wrap_pyfunction!(rank_multiset, m)?)?;
    m.add("RNG", core::RNG_NAME)?;
    Ok(())
}
