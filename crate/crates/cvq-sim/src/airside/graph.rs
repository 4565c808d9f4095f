//! Taxiway lattice: nodes with coordinates, weighted undirected edges,
//! labeled gate and runway-threshold nodes, and shortest-path routing.
//!
//! Lattice file format (line oriented, `#` comments):
//!
//! ```text
//! node <id> <x_m> <y_m> [gate|threshold]
//! edge <id1> <id2> [<length_m>]
//! ```
//!
//! Edge length defaults to the Euclidean distance between the endpoints.

use crate::error::{Error, Result};
use std::collections::BTreeMap;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct NodeId(pub u32);

impl std::fmt::Display for NodeId {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        write!(f, "{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum NodeKind {
    Plain,
    Gate,
    Threshold,
}

#[derive(Clone, Debug)]
struct NodeInfo {
    x: f64,
    y: f64,
    kind: NodeKind,
}

/// Undirected weighted graph over taxiway intersections.
#[derive(Clone, Debug)]
pub struct TaxiwayGraph {
    nodes: BTreeMap<NodeId, NodeInfo>,
    // Neighbor lists kept sorted by node id for deterministic traversal.
    adjacency: BTreeMap<NodeId, Vec<(NodeId, f64)>>,
}

impl TaxiwayGraph {
    pub fn new() -> Self {
        TaxiwayGraph {
            nodes: BTreeMap::new(),
            adjacency: BTreeMap::new(),
        }
    }

    pub fn add_node(&mut self, id: NodeId, x: f64, y: f64, kind: NodeKind) -> Result<()> {
        if self.nodes.insert(id, NodeInfo { x, y, kind }).is_some() {
            return Err(Error::Config(format!("duplicate node {id}")));
        }
        self.adjacency.entry(id).or_default();
        Ok(())
    }

    pub fn add_edge(&mut self, a: NodeId, b: NodeId, length: Option<f64>) -> Result<()> {
        if a == b {
            return Err(Error::Config(format!("self-loop edge at node {a}")));
        }
        let (na, nb) = match (self.nodes.get(&a), self.nodes.get(&b)) {
            (Some(na), Some(nb)) => (na, nb),
            _ => return Err(Error::Config(format!("edge {a}-{b} references unknown node"))),
        };
        let length = length.unwrap_or_else(|| ((na.x - nb.x).powi(2) + (na.y - nb.y).powi(2)).sqrt());
        if !(length > 0.0) {
            return Err(Error::Config(format!("edge {a}-{b} has non-positive length {length}")));
        }
        let insert = |list: &mut Vec<(NodeId, f64)>, to: NodeId| {
            if list.iter().any(|(n, _)| *n == to) {
                return Err(Error::Config(format!("duplicate edge {a}-{b}")));
            }
            list.push((to, length));
            list.sort_by_key(|(n, _)| *n);
            Ok(())
        };
        insert(self.adjacency.get_mut(&a).unwrap(), b)?;
        insert(self.adjacency.get_mut(&b).unwrap(), a)?;
        Ok(())
    }

    pub fn contains(&self, id: NodeId) -> bool {
        self.nodes.contains_key(&id)
    }

    pub fn node_count(&self) -> usize {
        self.nodes.len()
    }

    /// Gate nodes, ascending by id.
    pub fn gates(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.kind == NodeKind::Gate)
            .map(|(id, _)| *id)
            .collect()
    }

    /// Runway threshold nodes, ascending by id.
    pub fn thresholds(&self) -> Vec<NodeId> {
        self.nodes
            .iter()
            .filter(|(_, n)| n.kind == NodeKind::Threshold)
            .map(|(id, _)| *id)
            .collect()
    }

    pub fn neighbors(&self, id: NodeId) -> &[(NodeId, f64)] {
        self.adjacency.get(&id).map(Vec::as_slice).unwrap_or(&[])
    }

    /// Single-source shortest distances (Dijkstra). Unreachable nodes are absent.
    fn distances_from(&self, source: NodeId) -> BTreeMap<NodeId, f64> {
        let mut dist: BTreeMap<NodeId, f64> = BTreeMap::new();
        let mut done: BTreeMap<NodeId, bool> = BTreeMap::new();
        dist.insert(source, 0.0);
        loop {
            // Linear min-selection; lattices are small and this keeps the
            // traversal order free of float-ordering subtleties.
            let next = dist
                .iter()
                .filter(|(id, _)| !done.get(id).copied().unwrap_or(false))
                .min_by(|(ia, da), (ib, db)| da.total_cmp(db).then(ia.cmp(ib)))
                .map(|(id, d)| (*id, *d));
            let Some((u, du)) = next else { break };
            done.insert(u, true);
            for &(v, w) in self.neighbors(u) {
                let cand = du + w;
                let better = match dist.get(&v) {
                    Some(&dv) => cand < dv,
                    None => true,
                };
                if better {
                    dist.insert(v, cand);
                }
            }
        }
        dist
    }

    /// Length of the shortest path from `from` to `to`, if any.
    pub fn shortest_distance(&self, from: NodeId, to: NodeId) -> Option<f64> {
        if !self.contains(from) || !self.contains(to) {
            return None;
        }
        self.distances_from(to).get(&from).copied()
    }

    /// Shortest path from `from` to `to`, minimizing total edge length.
    ///
    /// Among equal-length shortest paths, returns the lexicographically
    /// smallest node-id sequence: distances-to-target are computed once,
    /// then the walk greedily takes the smallest-id neighbor that lies on
    /// a tight edge (`w(u,v) + dist_to_target(v) == dist_to_target(u)`).
    /// Tightness is exact `f64` equality, which is reliable whenever edge
    /// lengths are exactly representable (integers, short decimals).
    pub fn shortest_path(&self, from: NodeId, to: NodeId) -> Result<Vec<NodeId>> {
        if !self.contains(from) {
            return Err(Error::Config(format!("unknown node {from}")));
        }
        if !self.contains(to) {
            return Err(Error::Config(format!("unknown node {to}")));
        }
        let dist_to = self.distances_from(to);
        if !dist_to.contains_key(&from) {
            return Err(Error::Config(format!("no taxiway path from {from} to {to}")));
        }
        let mut path = vec![from];
        let mut u = from;
        while u != to {
            let du = dist_to[&u];
            let next = self
                .neighbors(u)
                .iter()
                .filter(|(v, w)| dist_to.get(v).is_some_and(|dv| w + dv == du))
                .map(|(v, _)| *v)
                .next(); // neighbors sorted by id, so first tight is smallest
            match next {
                Some(v) => {
                    path.push(v);
                    u = v;
                }
                None => {
                    // Float drift broke exact tightness; fall back to the
                    // neighbor that best approximates it.
                    let v = self
                        .neighbors(u)
                        .iter()
                        .filter(|(v, _)| dist_to.contains_key(v))
                        .min_by(|(va, wa), (vb, wb)| {
                            let ra = (wa + dist_to[va] - du).abs();
                            let rb = (wb + dist_to[vb] - du).abs();
                            ra.total_cmp(&rb).then(va.cmp(vb))
                        })
                        .map(|(v, _)| *v)
                        .ok_or_else(|| {
                            Error::Runtime(format!("shortest-path walk stuck at node {u}"))
                        })?;
                    path.push(v);
                    u = v;
                }
            }
        }
        Ok(path)
    }

    /// Total length of a node sequence along existing edges.
    pub fn path_length(&self, path: &[NodeId]) -> Result<f64> {
        let mut total = 0.0;
        for pair in path.windows(2) {
            let w = self
                .neighbors(pair[0])
                .iter()
                .find(|(n, _)| *n == pair[1])
                .map(|(_, w)| *w)
                .ok_or_else(|| Error::Config(format!("no edge {}-{}", pair[0], pair[1])))?;
            total += w;
        }
        Ok(total)
    }

    /// Parse the line-oriented lattice format.
    pub fn parse(text: &str) -> Result<TaxiwayGraph> {
        let mut graph = TaxiwayGraph::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let fields: Vec<&str> = line.split_whitespace().collect();
            let at = |msg: String| Error::Config(format!("lattice line {}: {}", lineno + 1, msg));
            match fields[0] {
                "node" => {
                    if fields.len() < 4 || fields.len() > 5 {
                        return Err(at("expected: node <id> <x_m> <y_m> [gate|threshold]".into()));
                    }
                    let id = fields[1]
                        .parse::<u32>()
                        .map_err(|_| at(format!("bad node id {:?}", fields[1])))?;
                    let x = fields[2]
                        .parse::<f64>()
                        .map_err(|_| at(format!("bad x coordinate {:?}", fields[2])))?;
                    let y = fields[3]
                        .parse::<f64>()
                        .map_err(|_| at(format!("bad y coordinate {:?}", fields[3])))?;
                    let kind = match fields.get(4) {
                        None => NodeKind::Plain,
                        Some(&"gate") => NodeKind::Gate,
                        Some(&"threshold") => NodeKind::Threshold,
                        Some(other) => return Err(at(format!("unknown node label {other:?}"))),
                    };
                    graph
                        .add_node(NodeId(id), x, y, kind)
                        .map_err(|e| at(e.to_string()))?;
                }
                "edge" => {
                    if fields.len() < 3 || fields.len() > 4 {
                        return Err(at("expected: edge <id1> <id2> [<length_m>]".into()));
                    }
                    let a = fields[1]
                        .parse::<u32>()
                        .map_err(|_| at(format!("bad node id {:?}", fields[1])))?;
                    let b = fields[2]
                        .parse::<u32>()
                        .map_err(|_| at(format!("bad node id {:?}", fields[2])))?;
                    let length = match fields.get(3) {
                        Some(s) => Some(
                            s.parse::<f64>()
                                .map_err(|_| at(format!("bad edge length {s:?}")))?,
                        ),
                        None => None,
                    };
                    graph
                        .add_edge(NodeId(a), NodeId(b), length)
                        .map_err(|e| at(e.to_string()))?;
                }
                other => return Err(at(format!("unknown record {other:?}"))),
            }
        }
        if graph.nodes.is_empty() {
            return Err(Error::Config("lattice file defines no nodes".into()));
        }
        Ok(graph)
    }
}

impl Default for TaxiwayGraph {
    fn default() -> Self {
        TaxiwayGraph::new()
    }
}
