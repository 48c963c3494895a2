//! Combinatorial model of a self-crossing elliptic divisor in a four-manifold.
//!
//! Vertices are strands (immersed spheres or embedded tori), edges are points of
//! `D(2)`. Every sphere strand meets `D(2)` in exactly two preimages, so a
//! component with crossings is a necklace: a cycle of spheres, or a single sphere
//! with a loop. Intersection indices are stored relative to a per-vertex
//! co-orientation gauge; only relative signs are observable.
//!
//! A non-co-orientable component carries `None` for every gauge and index.

use std::collections::{BTreeMap, BTreeSet, HashMap};
use std::fmt;
use std::str::FromStr;

use num_traits::{One, Signed};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

use crate::scalar::{self, Rational};
use crate::sign::Sign;

/// Largest component for which [`DivisorGraph::exhaustive_positive_coorientation`]
/// enumerates every gauge.
pub const EXHAUSTIVE_LIMIT: usize = 24;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum GraphError {
    #[error("unknown vertex {0}")]
    UnknownVertex(VertexId),
    #[error("unknown edge {0}")]
    UnknownEdge(EdgeId),
    #[error("unknown component #{0}")]
    UnknownComponent(usize),
    #[error("component containing {0} is not co-orientable; parity is undefined")]
    NotCoOrientable(VertexId),
    #[error("component has {0} strands, above the exhaustive search limit {EXHAUSTIVE_LIMIT}")]
    TooLarge(usize),
    #[error("invalid graph: {0}")]
    Invalid(String),
}

macro_rules! labelled_id {
    ($name:ident, $prefix:literal) => {
        #[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
        pub struct $name(pub u32);

        impl fmt::Display for $name {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, concat!($prefix, "{}"), self.0)
            }
        }

        impl FromStr for $name {
            type Err = GraphError;

            fn from_str(s: &str) -> Result<Self, Self::Err> {
                s.strip_prefix($prefix)
                    .and_then(|n| n.parse::<u32>().ok())
                    .map($name)
                    .ok_or_else(|| GraphError::Invalid(format!("bad id {s:?}, expected {}N", $prefix)))
            }
        }

        impl Serialize for $name {
            fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
                serializer.collect_str(self)
            }
        }

        impl<'de> Deserialize<'de> for $name {
            fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
                let text = String::deserialize(deserializer)?;
                text.parse().map_err(serde::de::Error::custom)
            }
        }
    };
}

labelled_id!(VertexId, "v");
labelled_id!(EdgeId, "e");

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Topology {
    #[default]
    Sphere,
    Torus,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct StrandVertex {
    pub id: VertexId,
    pub topology: Topology,
    /// Gauge sign; `None` when the strand's component is not co-orientable.
    pub co_orientation: Option<Sign>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CrossingEdge {
    pub id: EdgeId,
    /// Unordered; a loop repeats its vertex.
    pub endpoints: [VertexId; 2],
    pub index: Option<Sign>,
    /// `|Res_{r1 r2}|` of the symplectic form at this point.
    #[serde(with = "scalar::serde_rational")]
    pub param_modulus: Rational,
    pub imaginary_parameter: bool,
}

impl CrossingEdge {
    pub fn is_loop(&self) -> bool {
        self.endpoints[0] == self.endpoints[1]
    }

    fn touches(&self, v: VertexId) -> bool {
        self.endpoints.contains(&v)
    }
}

/// What a connected component of the divisor looks like.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum ComponentKind {
    /// Smooth co-orientable component.
    Torus,
    /// Smooth non-co-orientable component.
    KleinBottle,
    /// One sphere crossing itself once.
    NodalSphere,
    /// Cycle of at least two spheres.
    Necklace,
    /// Anything else; only produced by invalid input graphs.
    Irregular,
}

impl fmt::Display for ComponentKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            ComponentKind::Torus => "torus",
            ComponentKind::KleinBottle => "klein_bottle",
            ComponentKind::NodalSphere => "nodal_sphere",
            ComponentKind::Necklace => "necklace",
            ComponentKind::Irregular => "irregular",
        })
    }
}

/// Position of a component in [`DivisorGraph::components`].
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct ComponentId(pub usize);

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Component {
    pub vertices: Vec<VertexId>,
    pub edges: Vec<EdgeId>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Violation {
    DuplicateVertex(VertexId),
    DuplicateEdge(EdgeId),
    UnknownEndpoint { edge: EdgeId, vertex: VertexId },
    TorusWithCrossings { vertex: VertexId, degree: usize },
    SphereDegree { vertex: VertexId, degree: usize },
    NegativeModulus(EdgeId),
    /// Some but not all gauges and indices of a component are defined.
    MixedCoOrientation { vertices: Vec<VertexId> },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::DuplicateVertex(v) => write!(f, "duplicate vertex id {v}"),
            Violation::DuplicateEdge(e) => write!(f, "duplicate edge id {e}"),
            Violation::UnknownEndpoint { edge, vertex } => {
                write!(f, "edge {edge} references unknown vertex {vertex}")
            }
            Violation::TorusWithCrossings { vertex, degree } => {
                write!(f, "torus {vertex} has {degree} crossing incidences (expected 0)")
            }
            Violation::SphereDegree { vertex, degree } => {
                write!(f, "sphere {vertex} has degree {degree} (expected 2)")
            }
            Violation::NegativeModulus(e) => write!(f, "edge {e} has negative parameter modulus"),
            Violation::MixedCoOrientation { vertices } => {
                let names: Vec<String> = vertices.iter().map(|v| v.to_string()).collect();
                write!(f, "component {{{}}} mixes defined and undefined signs", names.join(", "))
            }
        }
    }
}

/// A rule identifying one strand end with another during surgery.
///
/// `sign` is `+1` when the co-orientations of the two strands agree across the
/// identification and `-1` when they are reversed; `None` when unknown.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub(crate) struct Join {
    pub a: VertexId,
    pub b: VertexId,
    pub sign: Option<Sign>,
}

/// Result of [`DivisorGraph::splice`].
#[derive(Clone, Debug)]
pub(crate) struct Splice {
    pub graph: DivisorGraph,
    /// Old vertex id to new vertex id.
    pub vertex_map: HashMap<VertexId, VertexId>,
}

/// Immutable value; operations return new graphs.
#[derive(Clone, Debug, PartialEq, Eq, Default, Serialize, Deserialize)]
pub struct DivisorGraph {
    vertices: Vec<StrandVertex>,
    edges: Vec<CrossingEdge>,
}

impl DivisorGraph {
    /// Builds a graph without validating it; see [`DivisorGraph::validate`].
    pub fn from_parts(mut vertices: Vec<StrandVertex>, mut edges: Vec<CrossingEdge>) -> Self {
        vertices.sort_by_key(|v| v.id);
        edges.sort_by_key(|e| e.id);
        DivisorGraph { vertices, edges }
    }

    /// A necklace of `indices.len()` spheres `v1, ..., vn` with edge
    /// `e_i = (v_i, v_{i+1})` carrying `indices[i]`; a single index gives a
    /// nodal sphere. All gauges are `+1`.
    pub fn necklace(indices: &[Sign], param_modulus: &Rational, imaginary_parameter: bool) -> Self {
        let n = indices.len() as u32;
        let vertices = (1..=n)
            .map(|i| StrandVertex { id: VertexId(i), topology: Topology::Sphere, co_orientation: Some(Sign::Plus) })
            .collect();
        let edges = indices
            .iter()
            .enumerate()
            .map(|(i, &index)| {
                let i = i as u32;
                CrossingEdge {
                    id: EdgeId(i + 1),
                    endpoints: [VertexId(i + 1), VertexId((i + 1) % n + 1)],
                    index: Some(index),
                    param_modulus: param_modulus.clone(),
                    imaginary_parameter,
                }
            })
            .collect();
        DivisorGraph { vertices, edges }
    }

    pub fn vertices(&self) -> &[StrandVertex] {
        &self.vertices
    }

    pub fn edges(&self) -> &[CrossingEdge] {
        &self.edges
    }

    pub fn vertex(&self, id: VertexId) -> Result<&StrandVertex, GraphError> {
        self.vertices.iter().find(|v| v.id == id).ok_or(GraphError::UnknownVertex(id))
    }

    pub fn edge(&self, id: EdgeId) -> Result<&CrossingEdge, GraphError> {
        self.edges.iter().find(|e| e.id == id).ok_or(GraphError::UnknownEdge(id))
    }

    /// Number of `D(2)` points.
    pub fn crossing_count(&self) -> usize {
        self.edges.len()
    }

    /// Crossing incidences of `v`, a loop counting twice.
    pub fn degree(&self, v: VertexId) -> usize {
        self.edges
            .iter()
            .map(|e| e.endpoints.iter().filter(|&&x| x == v).count())
            .sum()
    }

    /// Connected components ordered by smallest vertex id.
    pub fn components(&self) -> Vec<Component> {
        let index: HashMap<VertexId, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let mut uf = UnionFind::new(self.vertices.len());
        for e in &self.edges {
            if let (Some(&a), Some(&b)) = (index.get(&e.endpoints[0]), index.get(&e.endpoints[1])) {
                uf.union(a, b);
            }
        }
        let mut groups: BTreeMap<usize, Component> = BTreeMap::new();
        let mut root_order: HashMap<usize, usize> = HashMap::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let root = uf.find(i);
            let key = *root_order.entry(root).or_insert(i);
            groups.entry(key).or_insert_with(|| Component { vertices: Vec::new(), edges: Vec::new() }).vertices.push(v.id);
        }
        for e in &self.edges {
            if let Some(&a) = index.get(&e.endpoints[0]) {
                let key = root_order[&uf.find(a)];
                groups.get_mut(&key).expect("grouped").edges.push(e.id);
            }
        }
        groups.into_values().collect()
    }

    pub fn component(&self, id: ComponentId) -> Result<Component, GraphError> {
        self.components().into_iter().nth(id.0).ok_or(GraphError::UnknownComponent(id.0))
    }

    pub fn component_of_vertex(&self, v: VertexId) -> Result<ComponentId, GraphError> {
        self.vertex(v)?;
        Ok(ComponentId(
            self.components().iter().position(|c| c.vertices.contains(&v)).expect("every vertex has a component"),
        ))
    }

    pub fn component_of_edge(&self, e: EdgeId) -> Result<ComponentId, GraphError> {
        let edge = self.edge(e)?;
        self.component_of_vertex(edge.endpoints[0])
    }

    fn component_is_co_orientable(&self, component: &Component) -> bool {
        component.vertices.iter().all(|&v| self.vertex(v).is_ok_and(|x| x.co_orientation.is_some()))
            && component.edges.iter().all(|&e| self.edge(e).is_ok_and(|x| x.index.is_some()))
    }

    pub fn is_co_orientable(&self, id: ComponentId) -> Result<bool, GraphError> {
        Ok(self.component_is_co_orientable(&self.component(id)?))
    }

    pub fn kind(&self, id: ComponentId) -> Result<ComponentKind, GraphError> {
        let component = self.component(id)?;
        Ok(self.kind_of(&component))
    }

    fn kind_of(&self, component: &Component) -> ComponentKind {
        let spheres = component
            .vertices
            .iter()
            .all(|&v| self.vertex(v).is_ok_and(|x| x.topology == Topology::Sphere));
        let regular = component.vertices.iter().all(|&v| self.degree(v) == 2);
        match (component.vertices.len(), component.edges.len()) {
            (1, 0) if self.vertices_topology(component) == Some(Topology::Torus) => {
                if self.component_is_co_orientable(component) {
                    ComponentKind::Torus
                } else {
                    ComponentKind::KleinBottle
                }
            }
            (1, 1) if spheres && regular => ComponentKind::NodalSphere,
            (n, e) if n >= 2 && e == n && spheres && regular => ComponentKind::Necklace,
            _ => ComponentKind::Irregular,
        }
    }

    fn vertices_topology(&self, component: &Component) -> Option<Topology> {
        component.vertices.first().and_then(|&v| self.vertex(v).ok()).map(|v| v.topology)
    }

    /// Reports every degree, topology, id and sign-consistency violation.
    pub fn validate(&self) -> Result<(), Vec<Violation>> {
        let mut violations = Vec::new();
        let mut seen = BTreeSet::new();
        for v in &self.vertices {
            if !seen.insert(v.id) {
                violations.push(Violation::DuplicateVertex(v.id));
            }
        }
        let mut seen_edges = BTreeSet::new();
        for e in &self.edges {
            if !seen_edges.insert(e.id) {
                violations.push(Violation::DuplicateEdge(e.id));
            }
            for &x in &e.endpoints {
                if !seen.contains(&x) {
                    violations.push(Violation::UnknownEndpoint { edge: e.id, vertex: x });
                }
            }
            if e.param_modulus.is_negative() {
                violations.push(Violation::NegativeModulus(e.id));
            }
        }
        for v in &self.vertices {
            let degree = self.degree(v.id);
            match v.topology {
                Topology::Torus if degree != 0 => {
                    violations.push(Violation::TorusWithCrossings { vertex: v.id, degree })
                }
                Topology::Sphere if degree != 2 => {
                    violations.push(Violation::SphereDegree { vertex: v.id, degree })
                }
                _ => {}
            }
        }
        for component in self.components() {
            let defined = component
                .vertices
                .iter()
                .map(|&v| self.vertex(v).map(|x| x.co_orientation.is_some()))
                .chain(component.edges.iter().map(|&e| self.edge(e).map(|x| x.index.is_some())))
                .filter_map(Result::ok)
                .collect::<BTreeSet<bool>>();
            if defined.len() > 1 {
                violations.push(Violation::MixedCoOrientation { vertices: component.vertices.clone() });
            }
        }
        if violations.is_empty() {
            Ok(())
        } else {
            Err(violations)
        }
    }

    /// Reverses the co-orientation of `v`: every non-loop incident edge changes
    /// index once per incidence; a loop is incident twice and is unchanged.
    pub fn flip(&self, v: VertexId) -> Result<DivisorGraph, GraphError> {
        let vertex = self.vertex(v)?;
        let component = self.component(self.component_of_vertex(v)?)?;
        if !self.component_is_co_orientable(&component) {
            return Err(GraphError::NotCoOrientable(v));
        }
        let mut out = self.clone();
        for x in out.vertices.iter_mut().filter(|x| x.id == v) {
            x.co_orientation = vertex.co_orientation.map(|s| -s);
        }
        for e in out.edges.iter_mut().filter(|e| e.touches(v) && !e.is_loop()) {
            e.index = e.index.map(|s| -s);
        }
        Ok(out)
    }

    /// Product of the indices over a component; `+1` for an edgeless
    /// co-orientable component, `None` when the component is not co-orientable.
    pub fn parity(&self, id: ComponentId) -> Result<Option<Sign>, GraphError> {
        let component = self.component(id)?;
        Ok(self.parity_of(&component))
    }

    fn parity_of(&self, component: &Component) -> Option<Sign> {
        if !self.component_is_co_orientable(component) {
            return None;
        }
        Some(Sign::product(component.edges.iter().map(|&e| self.edge(e).expect("listed").index.expect("co-oriented"))))
    }

    /// Parity, or `-1` for a non-co-orientable component: the product of the
    /// gluing signs around the component.
    pub(crate) fn holonomy(&self, component: &Component) -> Sign {
        self.parity_of(component).unwrap_or(Sign::Minus)
    }

    /// Whether the component can be re-gauged so every index is `+1`. Returns the
    /// flips achieving it, or `None` when the parity is `-1`.
    ///
    /// The necklace is broken at its first vertex and walked; whenever the edge
    /// just traversed is negative the next strand is flipped, which leaves the
    /// closing edge carrying the parity.
    pub fn admits_positive_coorientation(&self, id: ComponentId) -> Result<Option<Vec<VertexId>>, GraphError> {
        let component = self.component(id)?;
        let first = component.vertices[0];
        if !self.component_is_co_orientable(&component) {
            return Err(GraphError::NotCoOrientable(first));
        }
        if component.edges.is_empty() {
            return Ok(Some(Vec::new()));
        }
        let walk = self.walk(&component)?;
        let mut current = self.clone();
        let mut witness = Vec::new();
        for step in &walk[..walk.len() - 1] {
            if current.edge(step.edge)?.index == Some(Sign::Minus) {
                current = current.flip(step.to)?;
                witness.push(step.to);
            }
        }
        let closing = current.edge(walk.last().expect("nonempty").edge)?.index;
        if closing == Some(Sign::Plus) {
            debug_assert!(component.edges.iter().all(|&e| current.edge(e).unwrap().index == Some(Sign::Plus)));
            Ok(Some(witness))
        } else {
            Ok(None)
        }
    }

    /// Traversal of a cyclic component starting from its first vertex.
    fn walk(&self, component: &Component) -> Result<Vec<Step>, GraphError> {
        if self.kind_of(component) == ComponentKind::Irregular {
            return Err(GraphError::Invalid(format!(
                "component at {} is not a necklace",
                component.vertices[0]
            )));
        }
        let start = component.vertices[0];
        let mut steps = Vec::with_capacity(component.edges.len());
        let mut at = start;
        let mut used: BTreeSet<EdgeId> = BTreeSet::new();
        while steps.len() < component.edges.len() {
            let edge = self
                .edges
                .iter()
                .find(|e| e.touches(at) && !used.contains(&e.id))
                .expect("regular component has an unused incident edge");
            used.insert(edge.id);
            let to = if edge.endpoints[0] == at { edge.endpoints[1] } else { edge.endpoints[0] };
            steps.push(Step { edge: edge.id, to });
            at = to;
        }
        debug_assert_eq!(at, start);
        Ok(steps)
    }

    /// Searches all `2^V` gauge choices of a component for one making every
    /// index `+1`; returns the strands to flip.
    pub fn exhaustive_positive_coorientation(&self, id: ComponentId) -> Result<Option<Vec<VertexId>>, GraphError> {
        let component = self.component(id)?;
        if !self.component_is_co_orientable(&component) {
            return Err(GraphError::NotCoOrientable(component.vertices[0]));
        }
        let n = component.vertices.len();
        if n > EXHAUSTIVE_LIMIT {
            return Err(GraphError::TooLarge(n));
        }
        let position: HashMap<VertexId, usize> =
            component.vertices.iter().enumerate().map(|(i, &v)| (v, i)).collect();
        let edges: Vec<(usize, usize, Sign)> = component
            .edges
            .iter()
            .map(|&e| {
                let edge = self.edge(e).expect("listed");
                (position[&edge.endpoints[0]], position[&edge.endpoints[1]], edge.index.expect("co-oriented"))
            })
            .collect();
        let works = |mask: &u32| {
            edges.iter().all(|&(a, b, index)| {
                let flips = ((mask >> a) & 1) ^ ((mask >> b) & 1);
                (flips == 1) != index.is_plus()
            })
        };
        let found = crate::par::find_first_mask(1u32 << n, works);
        Ok(found.map(|mask| {
            component.vertices.iter().enumerate().filter(|(i, _)| (mask >> i) & 1 == 1).map(|(_, &v)| v).collect()
        }))
    }

    /// Every component co-orientable with parity `+1`.
    pub fn is_stable_compatible(&self) -> bool {
        self.components().iter().all(|c| self.parity_of(c) == Some(Sign::Plus))
    }

    pub fn scale_moduli(&self, factor: &Rational) -> DivisorGraph {
        let mut out = self.clone();
        for e in &mut out.edges {
            e.param_modulus = &e.param_modulus * factor;
        }
        out
    }

    /// Disjoint union; the other graph's ids are shifted past this graph's.
    pub(crate) fn disjoint_union(&self, other: &DivisorGraph) -> (DivisorGraph, u32, u32) {
        let v_offset = self.vertices.iter().map(|v| v.id.0).max().unwrap_or(0);
        let e_offset = self.edges.iter().map(|e| e.id.0).max().unwrap_or(0);
        let mut out = self.clone();
        out.vertices.extend(other.vertices.iter().map(|v| StrandVertex { id: VertexId(v.id.0 + v_offset), ..v.clone() }));
        out.edges.extend(other.edges.iter().map(|e| CrossingEdge {
            id: EdgeId(e.id.0 + e_offset),
            endpoints: [VertexId(e.endpoints[0].0 + v_offset), VertexId(e.endpoints[1].0 + v_offset)],
            ..e.clone()
        }));
        (out, v_offset, e_offset)
    }

    /// Removes `removed` crossings and identifies strand ends along `joins`.
    ///
    /// Strands joined together become one strand. A merged strand whose ends are
    /// all consumed closes up into a torus, co-orientable exactly when the join
    /// signs around it multiply to `+1`. Indices of surviving crossings are
    /// re-expressed in the gauge of each merged strand's first member. Ids are
    /// renumbered densely, preserving order.
    pub(crate) fn splice(&self, removed: &[EdgeId], joins: &[Join]) -> Result<Splice, GraphError> {
        for &e in removed {
            self.edge(e)?;
        }
        let index: HashMap<VertexId, usize> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.id, i)).collect();
        let n = self.vertices.len();
        let mut uf = SignedUnionFind::new(n);
        let mut joined = vec![false; n];
        let mut unknown = vec![false; n];
        let mut inconsistent = vec![false; n];
        for join in joins {
            let a = *index.get(&join.a).ok_or(GraphError::UnknownVertex(join.a))?;
            let b = *index.get(&join.b).ok_or(GraphError::UnknownVertex(join.b))?;
            joined[a] = true;
            joined[b] = true;
            match join.sign {
                Some(sign) => {
                    if !uf.union(a, b, sign) {
                        inconsistent[a] = true;
                    }
                }
                None => {
                    uf.union(a, b, Sign::Plus);
                    unknown[a] = true;
                }
            }
        }
        // fold flags onto roots
        let mut root_flags: HashMap<usize, (bool, bool, bool)> = HashMap::new();
        for i in 0..n {
            let (root, _) = uf.find(i);
            let entry = root_flags.entry(root).or_default();
            entry.0 |= joined[i];
            entry.1 |= unknown[i] || self.vertices[i].co_orientation.is_none();
            entry.2 |= inconsistent[i];
        }
        let survivors: Vec<&CrossingEdge> = self.edges.iter().filter(|e| !removed.contains(&e.id)).collect();
        let mut ports = vec![0usize; n];
        for e in &survivors {
            for x in e.endpoints {
                ports[uf.find(index[&x]).0] += 1;
            }
        }
        // representative of each group: its first member; gauges relative to it
        let mut representative: HashMap<usize, usize> = HashMap::new();
        for i in 0..n {
            representative.entry(uf.find(i).0).or_insert(i);
        }
        let relative = |i: usize| -> (usize, Sign) {
            let (root, to_root) = uf.find(i);
            let rep = representative[&root];
            let (_, rep_to_root) = uf.find(rep);
            (rep, to_root * rep_to_root)
        };

        let mut vertices = Vec::new();
        for (i, v) in self.vertices.iter().enumerate() {
            let (root, _) = uf.find(i);
            if representative[&root] != i {
                continue;
            }
            let (joined, unknown, inconsistent) = root_flags[&root];
            if !joined {
                vertices.push(v.clone());
                continue;
            }
            let topology = if ports[root] == 0 { Topology::Torus } else { Topology::Sphere };
            if inconsistent && topology == Topology::Sphere {
                return Err(GraphError::Invalid(format!("inconsistent gluing along open strand at {}", v.id)));
            }
            let co_orientation = if unknown || inconsistent { None } else { v.co_orientation };
            vertices.push(StrandVertex { id: v.id, topology, co_orientation });
        }
        let mut edges = Vec::new();
        for e in survivors {
            let (ra, sa) = relative(index[&e.endpoints[0]]);
            let (rb, sb) = relative(index[&e.endpoints[1]]);
            let undefined = root_flags[&uf.find(ra).0].1 || root_flags[&uf.find(rb).0].1;
            edges.push(CrossingEdge {
                endpoints: [self.vertices[ra].id, self.vertices[rb].id],
                index: if undefined { None } else { e.index.map(|s| s * sa * sb) },
                ..e.clone()
            });
        }
        let mut graph = DivisorGraph { vertices, edges };
        graph.propagate_undefined();
        let (graph, renumbered) = graph.renumbered();
        let vertex_map = self
            .vertices
            .iter()
            .enumerate()
            .map(|(i, v)| (v.id, renumbered[&self.vertices[relative(i).0].id]))
            .collect();
        Ok(Splice { graph, vertex_map })
    }

    /// Makes every sign of a component undefined once any of them is.
    fn propagate_undefined(&mut self) {
        for component in self.components() {
            if self.component_is_co_orientable(&component) {
                continue;
            }
            for v in self.vertices.iter_mut().filter(|v| component.vertices.contains(&v.id)) {
                v.co_orientation = None;
            }
            for e in self.edges.iter_mut().filter(|e| component.edges.contains(&e.id)) {
                e.index = None;
            }
        }
    }

    /// Dense renumbering `v1.., e1..` in current order.
    fn renumbered(&self) -> (DivisorGraph, HashMap<VertexId, VertexId>) {
        let map: HashMap<VertexId, VertexId> =
            self.vertices.iter().enumerate().map(|(i, v)| (v.id, VertexId(i as u32 + 1))).collect();
        let vertices = self.vertices.iter().map(|v| StrandVertex { id: map[&v.id], ..v.clone() }).collect();
        let edges = self
            .edges
            .iter()
            .enumerate()
            .map(|(i, e)| CrossingEdge {
                id: EdgeId(i as u32 + 1),
                endpoints: [map[&e.endpoints[0]], map[&e.endpoints[1]]],
                ..e.clone()
            })
            .collect();
        (DivisorGraph { vertices, edges }, map)
    }

    /// Parses the graph exchange document (JSON).
    pub fn from_json(text: &str) -> Result<DivisorGraph, serde_json::Error> {
        let graph: DivisorGraph = serde_json::from_str(text)?;
        Ok(DivisorGraph::from_parts(graph.vertices, graph.edges))
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("graph serializes")
    }
}

#[derive(Clone, Copy, Debug)]
struct Step {
    edge: EdgeId,
    to: VertexId,
}

struct UnionFind {
    parent: Vec<usize>,
}

impl UnionFind {
    fn new(n: usize) -> Self {
        UnionFind { parent: (0..n).collect() }
    }

    fn find(&mut self, mut x: usize) -> usize {
        while self.parent[x] != x {
            self.parent[x] = self.parent[self.parent[x]];
            x = self.parent[x];
        }
        x
    }

    fn union(&mut self, a: usize, b: usize) {
        let (ra, rb) = (self.find(a), self.find(b));
        if ra != rb {
            self.parent[ra.max(rb)] = ra.min(rb);
        }
    }
}

/// Union-find tracking, for each element, the sign relating its gauge to the
/// root's.
struct SignedUnionFind {
    parent: Vec<usize>,
    to_parent: Vec<Sign>,
}

impl SignedUnionFind {
    fn new(n: usize) -> Self {
        SignedUnionFind { parent: (0..n).collect(), to_parent: vec![Sign::Plus; n] }
    }

    fn find(&self, mut x: usize) -> (usize, Sign) {
        let mut sign = Sign::Plus;
        while self.parent[x] != x {
            sign = sign * self.to_parent[x];
            x = self.parent[x];
        }
        (x, sign)
    }

    /// Records `gauge(b) = sign * gauge(a)`; returns `false` if this contradicts
    /// what is already known.
    fn union(&mut self, a: usize, b: usize, sign: Sign) -> bool {
        let (ra, sa) = self.find(a);
        let (rb, sb) = self.find(b);
        if ra == rb {
            return sa * sb == sign;
        }
        self.parent[rb] = ra;
        self.to_parent[rb] = sa * sb * sign;
        true
    }
}

/// Unit modulus, the normalization used by the building blocks.
pub fn unit_modulus() -> Rational {
    Rational::one()
}
