//! Finite interaction (hyper)graphs.
//!
//! Vertices are lattice sites; (hyper)edges are the supports of local
//! Hamiltonian terms. The module provides the combinatorial layer everything
//! else is built on: graph and edge-set distances, boundary and restricted
//! edge sets, extension/boundary of edge subsets, duplicate-free enumeration
//! of edge animals, and the standard upper bounds on animal growth constants.
//!
//! Size-1 hyperedges are allowed (on-site field terms) and participate in
//! distances, boundaries and animals like any other edge.

use std::collections::{BTreeMap, BTreeSet, VecDeque};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Vertex identifier. Vertices are kept in ascending order.
pub type Vertex = usize;

/// A hyperedge: a sorted, duplicate-free, nonempty set of vertices.
pub type Edge = Vec<Vertex>;

/// Default cap on animal sizes accepted by [`InteractionGraph::enumerate_animals`].
pub const DEFAULT_M_MAX: usize = 10;

/// A finite interaction (hyper)graph with per-vertex local dimensions.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct InteractionGraph {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    local_dims: BTreeMap<Vertex, usize>,
    /// vertex -> indices of incident edges
    incidence: BTreeMap<Vertex, Vec<usize>>,
    /// edge index -> indices of overlapping edges (sharing a vertex)
    edge_adjacency: Vec<Vec<usize>>,
    m_max: usize,
}

/// A subset of a graph's edge set, stored as sorted edge indices.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct EdgeSubset {
    indices: Vec<usize>,
}

/// A connected edge subset.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Animal {
    edges: EdgeSubset,
}

/// JSON document form of a graph: `{"vertices":[..],"edges":[[..]],"local_dims":{"v":d}}`.
#[derive(Serialize, Deserialize)]
struct GraphDocument {
    vertices: Vec<Vertex>,
    edges: Vec<Edge>,
    local_dims: BTreeMap<String, usize>,
}

impl EdgeSubset {
    /// Builds a subset from edge indices into the graph's edge list.
    pub fn from_indices(g: &InteractionGraph, mut indices: Vec<usize>) -> Result<Self> {
        indices.sort_unstable();
        indices.dedup();
        if let Some(&bad) = indices.iter().find(|&&i| i >= g.edge_count()) {
            return Err(Error::InvalidArgument(format!(
                "edge index {bad} out of range (graph has {} edges)",
                g.edge_count()
            )));
        }
        Ok(EdgeSubset { indices })
    }

    pub fn empty() -> Self {
        EdgeSubset::default()
    }

    pub fn indices(&self) -> &[usize] {
        &self.indices
    }

    pub fn len(&self) -> usize {
        self.indices.len()
    }

    pub fn is_empty(&self) -> bool {
        self.indices.is_empty()
    }

    pub fn contains(&self, edge_index: usize) -> bool {
        self.indices.binary_search(&edge_index).is_ok()
    }

    /// The edges themselves, resolved against the graph.
    pub fn edges<'g>(&self, g: &'g InteractionGraph) -> Vec<&'g Edge> {
        self.indices.iter().map(|&i| &g.edges()[i]).collect()
    }

    fn from_sorted(indices: Vec<usize>) -> Self {
        debug_assert!(indices.windows(2).all(|w| w[0] < w[1]));
        EdgeSubset { indices }
    }
}

impl Animal {
    /// Wraps a subset after checking connectedness in the overlap relation.
    pub fn new(g: &InteractionGraph, edges: EdgeSubset) -> Result<Self> {
        if edges.is_empty() {
            return Err(Error::InvalidArgument("an animal must be nonempty".into()));
        }
        if !g.edge_subset_connected(&edges) {
            return Err(Error::InvalidArgument(
                "edge subset is not connected in the overlap relation".into(),
            ));
        }
        Ok(Animal { edges })
    }

    pub fn edges(&self) -> &EdgeSubset {
        &self.edges
    }

    pub fn size(&self) -> usize {
        self.edges.len()
    }
}

impl InteractionGraph {
    /// Builds a graph from explicit vertex and edge lists.
    ///
    /// Every edge must be a nonempty subset of the vertex set; duplicate edges
    /// are rejected. `local_dims` defaults to qubits (dimension 2) for
    /// unmentioned vertices.
    pub fn new(
        vertices: Vec<Vertex>,
        edges: Vec<Edge>,
        local_dims: BTreeMap<Vertex, usize>,
    ) -> Result<Self> {
        let mut vs = vertices;
        vs.sort_unstable();
        vs.dedup();
        if vs.is_empty() {
            return Err(Error::InvalidSize("graph needs at least one vertex".into()));
        }
        let vset: BTreeSet<Vertex> = vs.iter().copied().collect();
        let mut es: Vec<Edge> = Vec::with_capacity(edges.len());
        for mut e in edges {
            e.sort_unstable();
            e.dedup();
            if e.is_empty() {
                return Err(Error::InvalidArgument("empty edge".into()));
            }
            if let Some(&v) = e.iter().find(|v| !vset.contains(v)) {
                return Err(Error::InvalidArgument(format!(
                    "edge vertex {v} is not in the vertex set"
                )));
            }
            es.push(e);
        }
        es.sort();
        let before = es.len();
        es.dedup();
        if es.len() != before {
            return Err(Error::InvalidArgument("duplicate edges".into()));
        }
        for (&v, &d) in &local_dims {
            if !vset.contains(&v) {
                return Err(Error::InvalidArgument(format!(
                    "local_dims mentions unknown vertex {v}"
                )));
            }
            if d == 0 {
                return Err(Error::InvalidArgument("local dimension must be positive".into()));
            }
        }
        let mut dims = local_dims;
        for &v in &vs {
            dims.entry(v).or_insert(2);
        }

        let mut incidence: BTreeMap<Vertex, Vec<usize>> = vs.iter().map(|&v| (v, vec![])).collect();
        for (i, e) in es.iter().enumerate() {
            for &v in e {
                incidence.get_mut(&v).unwrap().push(i);
            }
        }
        let edge_adjacency = es
            .iter()
            .enumerate()
            .map(|(i, e)| {
                let mut adj: Vec<usize> = e
                    .iter()
                    .flat_map(|v| incidence[v].iter().copied())
                    .filter(|&j| j != i)
                    .collect();
                adj.sort_unstable();
                adj.dedup();
                adj
            })
            .collect();

        Ok(InteractionGraph {
            vertices: vs,
            edges: es,
            local_dims: dims,
            incidence,
            edge_adjacency,
            m_max: DEFAULT_M_MAX,
        })
    }

    /// Open or periodic chain of `n` vertices with nearest-neighbor edges.
    pub fn chain(n: usize, periodic: bool) -> Result<Self> {
        if n < 2 {
            return Err(Error::InvalidSize(format!("chain needs n >= 2, got {n}")));
        }
        let mut edges: Vec<Edge> = (0..n - 1).map(|i| vec![i, i + 1]).collect();
        if periodic && n > 2 {
            edges.push(vec![0, n - 1]);
        }
        Self::new((0..n).collect(), edges, BTreeMap::new())
    }

    /// `rows x cols` square lattice with nearest-neighbor edges.
    pub fn square_lattice(rows: usize, cols: usize, periodic: bool) -> Result<Self> {
        if rows == 0 || cols == 0 || (rows == 1 && cols == 1) {
            return Err(Error::InvalidSize(format!(
                "square lattice needs rows*cols >= 2, got {rows}x{cols}"
            )));
        }
        let id = |r: usize, c: usize| r * cols + c;
        let mut edges: Vec<Edge> = Vec::new();
        for r in 0..rows {
            for c in 0..cols {
                if c + 1 < cols {
                    edges.push(vec![id(r, c), id(r, c + 1)]);
                } else if periodic && cols > 2 {
                    edges.push(vec![id(r, 0), id(r, c)]);
                }
                if r + 1 < rows {
                    edges.push(vec![id(r, c), id(r + 1, c)]);
                } else if periodic && rows > 2 {
                    edges.push(vec![id(0, c), id(r, c)]);
                }
            }
        }
        Self::new((0..rows * cols).collect(), edges, BTreeMap::new())
    }

    pub fn vertices(&self) -> &[Vertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[Edge] {
        &self.edges
    }

    pub fn vertex_count(&self) -> usize {
        self.vertices.len()
    }

    pub fn edge_count(&self) -> usize {
        self.edges.len()
    }

    pub fn local_dim(&self, v: Vertex) -> Option<usize> {
        self.local_dims.get(&v).copied()
    }

    pub fn local_dims(&self) -> &BTreeMap<Vertex, usize> {
        &self.local_dims
    }

    /// Sets the per-vertex local dimension (default 2).
    pub fn set_local_dim(&mut self, v: Vertex, d: usize) -> Result<()> {
        if !self.local_dims.contains_key(&v) {
            return Err(Error::InvalidArgument(format!("unknown vertex {v}")));
        }
        if d == 0 {
            return Err(Error::InvalidArgument("local dimension must be positive".into()));
        }
        self.local_dims.insert(v, d);
        Ok(())
    }

    /// Position of an edge in the canonical edge order, if present.
    pub fn edge_index(&self, edge: &[Vertex]) -> Option<usize> {
        let mut e = edge.to_vec();
        e.sort_unstable();
        e.dedup();
        self.edges.binary_search(&e).ok()
    }

    /// Cap accepted by [`Self::enumerate_animals`].
    pub fn m_max(&self) -> usize {
        self.m_max
    }

    pub fn set_m_max(&mut self, m_max: usize) {
        self.m_max = m_max;
    }

    /// All edges as an [`EdgeSubset`].
    pub fn all_edges(&self) -> EdgeSubset {
        EdgeSubset::from_sorted((0..self.edge_count()).collect())
    }

    /// Indices of edges overlapping (sharing a vertex with) the given edge.
    pub fn edge_adjacency(&self, edge_index: usize) -> &[usize] {
        &self.edge_adjacency[edge_index]
    }

    /// Vertices adjacent to `v` (sharing some edge with it).
    fn neighbors(&self, v: Vertex) -> impl Iterator<Item = Vertex> + '_ {
        self.incidence[&v]
            .iter()
            .flat_map(move |&ei| self.edges[ei].iter().copied())
            .filter(move |&u| u != v)
    }

    /// Graph distance between two nonempty vertex sets: the minimum over
    /// pairs of the shortest-path distance, 0 if the sets overlap.
    pub fn vertex_set_distance(
        &self,
        xs: &BTreeSet<Vertex>,
        ys: &BTreeSet<Vertex>,
    ) -> Result<usize> {
        self.check_vertex_set(xs)?;
        self.check_vertex_set(ys)?;
        if xs.intersection(ys).next().is_some() {
            return Ok(0);
        }
        // multi-source BFS from xs
        let mut dist: BTreeMap<Vertex, usize> = xs.iter().map(|&v| (v, 0)).collect();
        let mut queue: VecDeque<Vertex> = xs.iter().copied().collect();
        while let Some(v) = queue.pop_front() {
            let d = dist[&v];
            for u in self.neighbors(v).collect::<Vec<_>>() {
                if !dist.contains_key(&u) {
                    if ys.contains(&u) {
                        return Ok(d + 1);
                    }
                    dist.insert(u, d + 1);
                    queue.push_back(u);
                }
            }
        }
        Err(Error::DistanceUndefined)
    }

    /// Distance between a vertex set and an edge subset: 0 if they overlap,
    /// otherwise the size of the smallest edge subset connecting them
    /// (breadth-first search on the edge-overlap graph).
    pub fn edge_set_distance(&self, xs: &BTreeSet<Vertex>, f: &EdgeSubset) -> Result<usize> {
        self.check_vertex_set(xs)?;
        if f.is_empty() {
            return Err(Error::InvalidArgument("edge subset must be nonempty".into()));
        }
        // distance 0: some edge of f touches xs
        for &fi in f.indices() {
            if self.edges[fi].iter().any(|v| xs.contains(v)) {
                return Ok(0);
            }
        }
        let overlaps_f =
            |ei: usize| f.contains(ei) || self.edge_adjacency[ei].iter().any(|&j| f.contains(j));
        // BFS levels over edges; level k holds the edges reachable with a
        // connecting subset of size k
        let mut seen = vec![false; self.edge_count()];
        let mut frontier: Vec<usize> = Vec::new();
        for (&v, incident) in &self.incidence {
            if xs.contains(&v) {
                for &ei in incident {
                    if !seen[ei] {
                        seen[ei] = true;
                        frontier.push(ei);
                    }
                }
            }
        }
        let mut level = 1usize;
        while !frontier.is_empty() {
            if frontier.iter().any(|&ei| overlaps_f(ei)) {
                return Ok(level);
            }
            let mut next = Vec::new();
            for &ei in &frontier {
                for &ej in &self.edge_adjacency[ei] {
                    if !seen[ej] {
                        seen[ej] = true;
                        next.push(ej);
                    }
                }
            }
            frontier = next;
            level += 1;
        }
        Err(Error::DistanceUndefined)
    }

    /// Boundary edges of `b`: edges overlapping both `b` and its complement.
    pub fn boundary_edges(&self, b: &BTreeSet<Vertex>) -> EdgeSubset {
        let indices = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| {
                let inside = e.iter().any(|v| b.contains(v));
                let outside = e.iter().any(|v| !b.contains(v));
                inside && outside
            })
            .map(|(i, _)| i)
            .collect();
        EdgeSubset::from_sorted(indices)
    }

    /// Restricted edge set of `b`: all edges contained in `b`.
    pub fn restricted_edges(&self, b: &BTreeSet<Vertex>) -> EdgeSubset {
        let indices = self
            .edges
            .iter()
            .enumerate()
            .filter(|(_, e)| e.iter().all(|v| b.contains(v)))
            .map(|(i, _)| i)
            .collect();
        EdgeSubset::from_sorted(indices)
    }

    /// Extension of `g` (all edges sharing a vertex with some edge of `g`,
    /// including `g` itself) and its boundary (extension minus `g`).
    pub fn edge_extension_and_boundary(&self, g: &EdgeSubset) -> (EdgeSubset, EdgeSubset) {
        let mut ext: BTreeSet<usize> = g.indices().iter().copied().collect();
        for &ei in g.indices() {
            ext.extend(self.edge_adjacency[ei].iter().copied());
        }
        let boundary: Vec<usize> = ext.iter().copied().filter(|&i| !g.contains(i)).collect();
        (
            EdgeSubset::from_sorted(ext.into_iter().collect()),
            EdgeSubset::from_sorted(boundary),
        )
    }

    /// Whether an edge subset is connected in the overlap relation.
    pub fn edge_subset_connected(&self, f: &EdgeSubset) -> bool {
        if f.is_empty() {
            return true;
        }
        let members: BTreeSet<usize> = f.indices().iter().copied().collect();
        let start = f.indices()[0];
        let mut seen = BTreeSet::from([start]);
        let mut stack = vec![start];
        while let Some(ei) = stack.pop() {
            for &ej in &self.edge_adjacency[ei] {
                if members.contains(&ej) && seen.insert(ej) {
                    stack.push(ej);
                }
            }
        }
        seen.len() == members.len()
    }

    /// All animals of size `m` containing the root edge `lambda0`, each
    /// exactly once, in a deterministic sorted order.
    ///
    /// Enumeration is canonical augmentation on the discovery order of the
    /// candidate list: at each level only candidates past the branch cursor
    /// may be added, so every animal is produced along exactly one growth
    /// path and no deduplication pass is needed.
    pub fn enumerate_animals(&self, lambda0: usize, m: usize) -> Result<Vec<Animal>> {
        if lambda0 >= self.edge_count() {
            return Err(Error::InvalidArgument(format!(
                "edge index {lambda0} out of range"
            )));
        }
        if m < 1 {
            return Err(Error::InvalidArgument("animal size must be >= 1".into()));
        }
        if m > self.m_max {
            return Err(Error::ResourceLimit(format!(
                "animal size {m} exceeds m_max {}",
                self.m_max
            )));
        }
        let mut out: Vec<Vec<usize>> = Vec::new();
        let mut subset = vec![lambda0];
        let mut candidates: Vec<usize> = self.edge_adjacency[lambda0].to_vec();
        self.grow(m, &mut subset, &mut candidates, 0, &mut out);
        let mut animals: Vec<Animal> = out
            .into_iter()
            .map(|mut ids| {
                ids.sort_unstable();
                Animal {
                    edges: EdgeSubset::from_sorted(ids),
                }
            })
            .collect();
        animals.sort_by(|a, b| a.edges.indices.cmp(&b.edges.indices));
        Ok(animals)
    }

    fn grow(
        &self,
        m: usize,
        subset: &mut Vec<usize>,
        candidates: &mut Vec<usize>,
        cursor: usize,
        out: &mut Vec<Vec<usize>>,
    ) {
        if subset.len() == m {
            out.push(subset.clone());
            return;
        }
        for i in cursor..candidates.len() {
            let e = candidates[i];
            subset.push(e);
            let added_from = candidates.len();
            for &n in &self.edge_adjacency[e] {
                if !subset.contains(&n) && !candidates.contains(&n) {
                    candidates.push(n);
                }
            }
            self.grow(m, subset, candidates, i + 1, out);
            candidates.truncate(added_from);
            subset.pop();
        }
    }

    /// `a_m` contribution for a fixed root edge: the animal count of size `m`.
    pub fn animal_count(&self, lambda0: usize, m: usize) -> Result<usize> {
        Ok(self.enumerate_animals(lambda0, m)?.len())
    }

    /// Subgraph induced by a vertex set: vertices `b` (original ids kept)
    /// with the restricted edge set.
    pub fn induced_subgraph(&self, b: &BTreeSet<Vertex>) -> Result<InteractionGraph> {
        self.check_vertex_set(b)?;
        let edges: Vec<Edge> = self
            .restricted_edges(b)
            .indices()
            .iter()
            .map(|&i| self.edges[i].clone())
            .collect();
        let dims: BTreeMap<Vertex, usize> =
            b.iter().map(|&v| (v, self.local_dims[&v])).collect();
        let mut sub = Self::new(b.iter().copied().collect(), edges, dims)?;
        sub.set_m_max(self.m_max);
        Ok(sub)
    }

    /// Serializes to the JSON document `{"vertices":..,"edges":..,"local_dims":..}`.
    pub fn to_json(&self) -> String {
        let doc = GraphDocument {
            vertices: self.vertices.clone(),
            edges: self.edges.clone(),
            local_dims: self
                .local_dims
                .iter()
                .map(|(&v, &d)| (v.to_string(), d))
                .collect(),
        };
        serde_json::to_string(&doc).expect("graph document serializes")
    }

    /// Parses the JSON document form.
    pub fn from_json(s: &str) -> Result<Self> {
        let doc: GraphDocument =
            serde_json::from_str(s).map_err(|e| Error::InvalidArgument(e.to_string()))?;
        let mut dims = BTreeMap::new();
        for (k, d) in doc.local_dims {
            let v: Vertex = k
                .parse()
                .map_err(|_| Error::InvalidArgument(format!("bad vertex id {k:?}")))?;
            dims.insert(v, d);
        }
        Self::new(doc.vertices, doc.edges, dims)
    }

    fn check_vertex_set(&self, xs: &BTreeSet<Vertex>) -> Result<()> {
        if xs.is_empty() {
            return Err(Error::InvalidArgument("vertex set must be nonempty".into()));
        }
        if let Some(&v) = xs.iter().find(|v| !self.local_dims.contains_key(v)) {
            return Err(Error::InvalidArgument(format!("unknown vertex {v}")));
        }
        Ok(())
    }
}

/// Families with known upper bounds on the animal growth constant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GrowthFamily {
    /// D-dimensional cubic lattice: alpha <= 2 D e.
    Cubic { dimension: u32 },
    /// Spread-out graph of range R in dimension D: alpha <= ((2R+1)^D - 1) e.
    SpreadOut { dimension: u32, range: u32 },
    /// A caller-supplied growth constant, passed through unchanged.
    Explicit { alpha: f64 },
}

/// Upper bound on the growth constant for the given family.
pub fn growth_constant_bound(family: GrowthFamily) -> Result<f64> {
    match family {
        GrowthFamily::Cubic { dimension } => {
            if dimension < 1 {
                return Err(Error::InvalidArgument("dimension must be >= 1".into()));
            }
            Ok(2.0 * f64::from(dimension) * std::f64::consts::E)
        }
        GrowthFamily::SpreadOut { dimension, range } => {
            if dimension < 1 || range < 1 {
                return Err(Error::InvalidArgument(
                    "dimension and range must be >= 1".into(),
                ));
            }
            let k = f64::from(2 * range + 1).powi(dimension as i32) - 1.0;
            Ok(k * std::f64::consts::E)
        }
        GrowthFamily::Explicit { alpha } => {
            if !(alpha > 0.0) {
                return Err(Error::InvalidArgument("alpha must be positive".into()));
            }
            Ok(alpha)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn vset(vs: &[Vertex]) -> BTreeSet<Vertex> {
        vs.iter().copied().collect()
    }

    /// Brute-force oracle: all edge subsets of size m that contain lambda0 and
    /// are connected, found by filtering the full power set.
    fn animals_by_filter(g: &InteractionGraph, lambda0: usize, m: usize) -> Vec<Vec<usize>> {
        let n = g.edge_count();
        assert!(n <= 20, "oracle is exponential in the edge count");
        let mut found = Vec::new();
        for mask in 0u32..(1 << n) {
            if mask.count_ones() as usize != m || mask & (1 << lambda0) == 0 {
                continue;
            }
            let ids: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
            let subset = EdgeSubset::from_indices(g, ids.clone()).unwrap();
            if g.edge_subset_connected(&subset) {
                found.push(ids);
            }
        }
        found.sort();
        found
    }

    /// Exhaustive oracle for dist(X, F): smallest connecting edge subset.
    fn edge_distance_by_filter(
        g: &InteractionGraph,
        xs: &BTreeSet<Vertex>,
        f: &EdgeSubset,
    ) -> Option<usize> {
        let n = g.edge_count();
        assert!(n <= 20);
        if f.indices()
            .iter()
            .any(|&i| g.edges()[i].iter().any(|v| xs.contains(v)))
        {
            return Some(0);
        }
        let overlaps_x =
            |ids: &[usize]| ids.iter().any(|&i| g.edges()[i].iter().any(|v| xs.contains(v)));
        let overlaps_f = |ids: &[usize]| {
            ids.iter()
                .any(|&i| f.contains(i) || g.edge_adjacency(i).iter().any(|&j| f.contains(j)))
        };
        for size in 1..=n {
            for mask in 0u32..(1 << n) {
                if mask.count_ones() as usize != size {
                    continue;
                }
                let ids: Vec<usize> = (0..n).filter(|&i| mask & (1 << i) != 0).collect();
                let subset = EdgeSubset::from_indices(g, ids.clone()).unwrap();
                if g.edge_subset_connected(&subset) && overlaps_x(&ids) && overlaps_f(&ids) {
                    return Some(size);
                }
            }
        }
        None
    }

    #[test]
    fn chain_construction() {
        let g = InteractionGraph::chain(4, false).unwrap();
        assert_eq!(g.edges(), &[vec![0, 1], vec![1, 2], vec![2, 3]]);
        let g = InteractionGraph::chain(3, true).unwrap();
        assert_eq!(g.edges(), &[vec![0, 1], vec![0, 2], vec![1, 2]]);
        let g = InteractionGraph::chain(2, false).unwrap();
        assert_eq!(g.edges(), &[vec![0, 1]]);
        assert!(matches!(
            InteractionGraph::chain(1, false),
            Err(Error::InvalidSize(_))
        ));
    }

    #[test]
    fn square_lattice_construction() {
        assert_eq!(
            InteractionGraph::square_lattice(2, 2, false).unwrap().edge_count(),
            4
        );
        // 3x3 open grid: 2 * 3 * 2 = 12 nearest-neighbor edges
        assert_eq!(
            InteractionGraph::square_lattice(3, 3, false).unwrap().edge_count(),
            12
        );
        let row = InteractionGraph::square_lattice(1, 4, false).unwrap();
        let chain = InteractionGraph::chain(4, false).unwrap();
        assert_eq!(row.edges(), chain.edges());
        assert!(InteractionGraph::square_lattice(1, 1, false).is_err());
    }

    #[test]
    fn vertex_distances() {
        let g = InteractionGraph::chain(5, false).unwrap();
        assert_eq!(g.vertex_set_distance(&vset(&[1, 2]), &vset(&[2, 4])).unwrap(), 0);
        assert_eq!(g.vertex_set_distance(&vset(&[0]), &vset(&[4])).unwrap(), 4);
        // 3x3 grid, corner to opposite corner: BFS says 4
        let grid = InteractionGraph::square_lattice(3, 3, false).unwrap();
        assert_eq!(grid.vertex_set_distance(&vset(&[0]), &vset(&[8])).unwrap(), 4);
        assert!(g.vertex_set_distance(&BTreeSet::new(), &vset(&[0])).is_err());
    }

    #[test]
    fn edge_distances() {
        let g = InteractionGraph::chain(6, false).unwrap();
        let f = EdgeSubset::from_indices(&g, vec![g.edge_index(&[4, 5]).unwrap()]).unwrap();
        assert_eq!(g.edge_set_distance(&vset(&[0]), &f).unwrap(), 4);
        assert_eq!(edge_distance_by_filter(&g, &vset(&[0]), &f), Some(4));
        // overlap rule
        let f0 = EdgeSubset::from_indices(&g, vec![0]).unwrap();
        assert_eq!(g.edge_set_distance(&vset(&[1]), &f0).unwrap(), 0);
        // buffer-region picture: S a single site strictly inside B,
        // dist(S, boundary of B) realized by a shortest edge path of size 2
        let g7 = InteractionGraph::chain(7, false).unwrap();
        let b = vset(&[1, 2, 3, 4, 5]);
        let s = vset(&[3]);
        let boundary = g7.boundary_edges(&b);
        assert_eq!(g7.edge_set_distance(&s, &boundary).unwrap(), 2);
        assert_eq!(edge_distance_by_filter(&g7, &s, &boundary), Some(2));
        // same picture on a 2D grid: center of a 7x7 lattice, B the 5x5 block
        let grid = InteractionGraph::square_lattice(7, 7, false).unwrap();
        let b2: BTreeSet<Vertex> = (0..49)
            .filter(|v| (1..6).contains(&(v / 7)) && (1..6).contains(&(v % 7)))
            .collect();
        let boundary2 = grid.boundary_edges(&b2);
        assert_eq!(grid.edge_set_distance(&vset(&[24]), &boundary2).unwrap(), 2);
    }

    #[test]
    fn enlarging_f_never_increases_distance() {
        let g = InteractionGraph::square_lattice(3, 3, false).unwrap();
        let xs = vset(&[0]);
        let f_small = EdgeSubset::from_indices(&g, vec![11]).unwrap();
        let d_small = g.edge_set_distance(&xs, &f_small).unwrap();
        for extra in 0..g.edge_count() {
            let f_big = EdgeSubset::from_indices(&g, vec![11, extra]).unwrap();
            let d_big = g.edge_set_distance(&xs, &f_big).unwrap();
            assert!(d_big <= d_small, "F={f_big:?}: {d_big} > {d_small}");
        }
    }

    #[test]
    fn disconnected_distance_is_undefined() {
        let g = InteractionGraph::new(
            vec![0, 1, 2, 3],
            vec![vec![0, 1], vec![2, 3]],
            BTreeMap::new(),
        )
        .unwrap();
        let f = EdgeSubset::from_indices(&g, vec![1]).unwrap();
        assert_eq!(g.edge_set_distance(&vset(&[0]), &f), Err(Error::DistanceUndefined));
        assert_eq!(
            g.vertex_set_distance(&vset(&[0]), &vset(&[3])),
            Err(Error::DistanceUndefined)
        );
    }

    #[test]
    fn boundary_and_restricted() {
        let g = InteractionGraph::chain(4, false).unwrap();
        let b = vset(&[0, 1]);
        assert_eq!(g.boundary_edges(&b).edges(&g), vec![&vec![1, 2]]);
        let all: BTreeSet<Vertex> = g.vertices().iter().copied().collect();
        assert!(g.boundary_edges(&all).is_empty());
        assert!(g.boundary_edges(&BTreeSet::new()).is_empty());
        let r = g.restricted_edges(&vset(&[0, 1, 2]));
        assert_eq!(r.edges(&g), vec![&vec![0, 1], &vec![1, 2]]);
        assert!(g.restricted_edges(&vset(&[1])).is_empty());

        // 3x3 grid: the center vertex alone has its 4 incident edges as boundary
        let grid = InteractionGraph::square_lattice(3, 3, false).unwrap();
        assert_eq!(grid.boundary_edges(&vset(&[4])).len(), 4);
        // left 3x2 block contains 3 horizontal + 4 vertical edges
        let block = vset(&[0, 1, 3, 4, 6, 7]);
        assert_eq!(grid.restricted_edges(&block).len(), 7);
    }

    #[test]
    fn boundary_restricted_partition() {
        // every edge is inside B, inside the complement, or on the boundary
        let g = InteractionGraph::square_lattice(3, 3, false).unwrap();
        let all: BTreeSet<Vertex> = g.vertices().iter().copied().collect();
        for bits in [0u32, 1, 0b1011, 0b111000111, 0b10101] {
            let b: BTreeSet<Vertex> = (0..9).filter(|v| bits & (1 << v) != 0).collect();
            let comp: BTreeSet<Vertex> = all.difference(&b).copied().collect();
            let mut union: Vec<usize> = Vec::new();
            union.extend(g.boundary_edges(&b).indices());
            union.extend(g.restricted_edges(&b).indices());
            union.extend(g.restricted_edges(&comp).indices());
            union.sort_unstable();
            let expect: Vec<usize> = (0..g.edge_count()).collect();
            assert_eq!(union, expect, "partition failed for B={b:?}");
        }
    }

    #[test]
    fn extension_and_boundary() {
        let g = InteractionGraph::chain(5, false).unwrap();
        let mid = EdgeSubset::from_indices(&g, vec![1]).unwrap();
        let (ext, boundary) = g.edge_extension_and_boundary(&mid);
        assert_eq!(ext.indices(), &[0, 1, 2]);
        assert_eq!(boundary.indices(), &[0, 2]);
        let (ext, boundary) = g.edge_extension_and_boundary(&g.all_edges());
        assert_eq!(ext.len(), g.edge_count());
        assert!(boundary.is_empty());
        // an edge incident to the interior vertex of the open 3x3 grid touches
        // deg(3)-1 + deg(4)-1 = 5 others; with both endpoints interior (4x4
        // grid) the count is 6
        let grid = InteractionGraph::square_lattice(3, 3, false).unwrap();
        let e = grid.edge_index(&[3, 4]).unwrap();
        let (_, boundary) = grid
            .edge_extension_and_boundary(&EdgeSubset::from_indices(&grid, vec![e]).unwrap());
        assert_eq!(boundary.len(), 5);
        let grid4 = InteractionGraph::square_lattice(4, 4, false).unwrap();
        let e = grid4.edge_index(&[5, 6]).unwrap();
        let (_, boundary) = grid4
            .edge_extension_and_boundary(&EdgeSubset::from_indices(&grid4, vec![e]).unwrap());
        assert_eq!(boundary.len(), 6);
    }

    #[test]
    fn animal_enumeration_matches_filter_oracle() {
        let chain = InteractionGraph::chain(10, false).unwrap();
        let mid = chain.edge_index(&[4, 5]).unwrap();
        for m in 1..=5 {
            let got: Vec<Vec<usize>> = chain
                .enumerate_animals(mid, m)
                .unwrap()
                .iter()
                .map(|a| a.edges().indices().to_vec())
                .collect();
            assert_eq!(got, animals_by_filter(&chain, mid, m));
            // interior edge on a long chain: exactly m contiguous segments
            assert_eq!(got.len(), m);
        }
        let grid = InteractionGraph::square_lattice(3, 3, false).unwrap();
        let e = grid.edge_index(&[3, 4]).unwrap();
        for m in 1..=4 {
            let got: Vec<Vec<usize>> = grid
                .enumerate_animals(e, m)
                .unwrap()
                .iter()
                .map(|a| a.edges().indices().to_vec())
                .collect();
            assert_eq!(got, animals_by_filter(&grid, e, m), "m={m}");
        }
    }

    #[test]
    fn animal_basics() {
        let g = InteractionGraph::square_lattice(4, 4, false).unwrap();
        let interior = g.edge_index(&[5, 6]).unwrap();
        assert_eq!(g.animal_count(interior, 1).unwrap(), 1);
        assert_eq!(g.animal_count(interior, 2).unwrap(), 6);
        assert!(matches!(
            g.enumerate_animals(interior, g.m_max() + 1),
            Err(Error::ResourceLimit(_))
        ));
    }

    #[test]
    fn animal_counts_respect_growth_bound() {
        let chain = InteractionGraph::chain(12, false).unwrap();
        let alpha = growth_constant_bound(GrowthFamily::Cubic { dimension: 1 }).unwrap();
        let mid = chain.edge_index(&[5, 6]).unwrap();
        for m in 1..=8 {
            let a_m = chain.animal_count(mid, m).unwrap() as f64;
            assert!(a_m <= alpha.powi(m as i32), "m={m}: {a_m} > alpha^m");
        }
        let grid = InteractionGraph::square_lattice(4, 4, false).unwrap();
        let alpha = growth_constant_bound(GrowthFamily::Cubic { dimension: 2 }).unwrap();
        let e = grid.edge_index(&[5, 6]).unwrap();
        for m in 1..=5 {
            let a_m = grid.animal_count(e, m).unwrap() as f64;
            assert!(a_m <= alpha.powi(m as i32), "m={m}: {a_m} > alpha^m");
        }
    }

    #[test]
    fn growth_bounds() {
        let e = std::f64::consts::E;
        assert!(
            (growth_constant_bound(GrowthFamily::Cubic { dimension: 2 }).unwrap() - 4.0 * e).abs()
                < 1e-15
        );
        assert!(
            (growth_constant_bound(GrowthFamily::SpreadOut { dimension: 1, range: 1 }).unwrap()
                - 2.0 * e)
                .abs()
                < 1e-15
        );
        assert!(
            (growth_constant_bound(GrowthFamily::SpreadOut { dimension: 2, range: 1 }).unwrap()
                - 8.0 * e)
                .abs()
                < 1e-15
        );
        assert!(growth_constant_bound(GrowthFamily::Explicit { alpha: -1.0 }).is_err());
    }

    #[test]
    fn size_one_edges_participate() {
        // on-site field terms are size-1 hyperedges
        let g = InteractionGraph::new(
            vec![0, 1, 2],
            vec![vec![0], vec![0, 1], vec![1, 2]],
            BTreeMap::new(),
        )
        .unwrap();
        let field = g.edge_index(&[0]).unwrap();
        assert_eq!(g.animal_count(field, 2).unwrap(), 1);
        assert_eq!(g.boundary_edges(&vset(&[0])).len(), 1);
        let f = EdgeSubset::from_indices(&g, vec![field]).unwrap();
        assert_eq!(g.edge_set_distance(&vset(&[2]), &f).unwrap(), 2);
    }

    #[test]
    fn json_round_trip() {
        let g = InteractionGraph::square_lattice(2, 3, false).unwrap();
        let parsed = InteractionGraph::from_json(&g.to_json()).unwrap();
        assert_eq!(parsed, g);
    }
}
