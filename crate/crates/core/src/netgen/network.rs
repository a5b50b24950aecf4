use std::collections::BTreeSet;
use std::fmt;
use std::io::Write;

use petgraph::algo::astar;
use petgraph::graph::{DiGraph, NodeIndex};

use super::{LANE_WIDTH_M, MARKING_BUFFER_M, MIN_SIDEWALK_M};

pub type EdgeId = usize;
pub type NodeId = usize;

/// Static geometry of one directed road edge.
#[derive(Debug, Clone, PartialEq)]
pub struct EdgeSpec {
    pub id: EdgeId,
    pub from_node: NodeId,
    pub to_node: NodeId,
    pub length_m: f64,
    pub width_m: f64,
    /// Facility-belt share of the width (trees, street furniture).
    pub facility_ratio: f64,
    pub init_lanes: u32,
    pub init_sidewalk_ratio: f64,
}

impl EdgeSpec {
    pub fn facility_m(&self) -> f64 {
        self.facility_ratio * self.width_m
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct RoadNetwork {
    pub edges: Vec<EdgeSpec>,
    /// Synthetic planar coordinates, metres.
    pub nodes: Vec<(f64, f64)>,
    /// Successor edges of each edge (U-turns excluded).
    pub adjacency: Vec<Vec<EdgeId>>,
    pub origins: BTreeSet<NodeId>,
    pub destinations: BTreeSet<NodeId>,
}

#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    MissingNode { edge: EdgeId, node: NodeId },
    NonPositive { edge: EdgeId, field: &'static str },
    RatioOutOfRange { edge: EdgeId, field: &'static str },
    NoCarriageway { edge: EdgeId },
    InitialLanesTooWide { edge: EdgeId },
    WidthInfeasible { edge: EdgeId, width_m: f64, required_m: f64 },
    BadAdjacency { edge: EdgeId },
    Disconnected { origin: NodeId, destination: NodeId },
    EmptyOdSets,
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::MissingNode { edge, node } => {
                write!(f, "edge {edge}: node {node} does not exist")
            }
            Violation::NonPositive { edge, field } => write!(f, "edge {edge}: {field} must be > 0"),
            Violation::RatioOutOfRange { edge, field } => {
                write!(f, "edge {edge}: {field} must lie in (0,1)")
            }
            Violation::NoCarriageway { edge } => {
                write!(f, "edge {edge}: facility + sidewalk leave no carriageway")
            }
            Violation::InitialLanesTooWide { edge } => {
                write!(f, "edge {edge}: initial lanes do not fit the carriageway")
            }
            Violation::WidthInfeasible {
                edge,
                width_m,
                required_m,
            } => write!(
                f,
                "edge {edge}: width infeasible ({width_m} m < {required_m} m required)"
            ),
            Violation::BadAdjacency { edge } => {
                write!(f, "edge {edge}: adjacency lists a non-adjoining edge")
            }
            Violation::Disconnected {
                origin,
                destination,
            } => write!(f, "disconnected: node {destination} unreachable from {origin}"),
            Violation::EmptyOdSets => write!(f, "origin or destination set is empty"),
        }
    }
}

impl RoadNetwork {
    /// Builds a network, deriving adjacency from edge endpoints.
    pub fn from_parts(
        nodes: Vec<(f64, f64)>,
        edges: Vec<EdgeSpec>,
        origins: BTreeSet<NodeId>,
        destinations: BTreeSet<NodeId>,
    ) -> Self {
        let adjacency = edges
            .iter()
            .map(|e| {
                edges
                    .iter()
                    .filter(|n| n.from_node == e.to_node && n.to_node != e.from_node)
                    .map(|n| n.id)
                    .collect()
            })
            .collect();
        RoadNetwork {
            edges,
            nodes,
            adjacency,
            origins,
            destinations,
        }
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    /// All (origin, destination) pairs with distinct endpoints, ordered.
    pub fn od_pairs(&self) -> Vec<(NodeId, NodeId)> {
        let mut pairs = Vec::new();
        for &o in &self.origins {
            for &d in &self.destinations {
                if o != d {
                    pairs.push((o, d));
                }
            }
        }
        pairs
    }

    /// Shortest route by length, as a list of edge ids. `None` when `to` is
    /// unreachable or `from == to`.
    pub fn shortest_route(&self, from: NodeId, to: NodeId) -> Option<Vec<EdgeId>> {
        if from == to || from >= self.nodes.len() || to >= self.nodes.len() {
            return None;
        }
        let mut g: DiGraph<(), (EdgeId, f64)> = DiGraph::new();
        let idx: Vec<NodeIndex> = (0..self.nodes.len()).map(|_| g.add_node(())).collect();
        for e in &self.edges {
            if e.from_node < idx.len() && e.to_node < idx.len() {
                g.add_edge(idx[e.from_node], idx[e.to_node], (e.id, e.length_m));
            }
        }
        let (_, path) = astar(&g, idx[from], |n| n == idx[to], |e| e.weight().1, |_| 0.0)?;
        let route = path
            .windows(2)
            .map(|w| {
                // parallel edges do not occur in the templates; take the shortest
                g.edges_connecting(w[0], w[1])
                    .min_by(|a, b| a.weight().1.total_cmp(&b.weight().1))
                    .map(|e| e.weight().0)
                    .expect("astar path follows graph edges")
            })
            .collect();
        Some(route)
    }

    /// Plain-text edge list `id,from,to,length_m,width_m,facility_ratio,init_lanes`.
    pub fn write_edge_list<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "id,from,to,length_m,width_m,facility_ratio,init_lanes")?;
        for e in &self.edges {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                e.id, e.from_node, e.to_node, e.length_m, e.width_m, e.facility_ratio, e.init_lanes
            )?;
        }
        Ok(())
    }
}

/// Checks every structural and geometric invariant; an empty list means the
/// network is usable.
pub fn validate_network(network: &RoadNetwork) -> Vec<Violation> {
    let mut out = Vec::new();
    let n_nodes = network.nodes.len();
    for (i, e) in network.edges.iter().enumerate() {
        let edge = e.id;
        if e.id != i {
            out.push(Violation::BadAdjacency { edge });
        }
        for node in [e.from_node, e.to_node] {
            if node >= n_nodes {
                out.push(Violation::MissingNode { edge, node });
            }
        }
        for (field, v) in [("length_m", e.length_m), ("width_m", e.width_m)] {
            if !(v > 0.0) {
                out.push(Violation::NonPositive { edge, field });
            }
        }
        if e.init_lanes < 1 {
            out.push(Violation::NonPositive {
                edge,
                field: "init_lanes",
            });
        }
        for (field, v) in [
            ("facility_ratio", e.facility_ratio),
            ("init_sidewalk_ratio", e.init_sidewalk_ratio),
        ] {
            if !(v > 0.0 && v < 1.0) {
                out.push(Violation::RatioOutOfRange { edge, field });
            }
        }
        let carriageway = (1.0 - e.facility_ratio - e.init_sidewalk_ratio) * e.width_m;
        if !(e.facility_ratio + e.init_sidewalk_ratio < 1.0) {
            out.push(Violation::NoCarriageway { edge });
        } else if f64::from(e.init_lanes) * LANE_WIDTH_M > carriageway + 1e-9 {
            out.push(Violation::InitialLanesTooWide { edge });
        }
        let required = e.facility_ratio * e.width_m + MIN_SIDEWALK_M + LANE_WIDTH_M + MARKING_BUFFER_M;
        if e.width_m < required - 1e-9 {
            out.push(Violation::WidthInfeasible {
                edge,
                width_m: e.width_m,
                required_m: required,
            });
        }
    }
    for (i, succ) in network.adjacency.iter().enumerate() {
        let bad = succ.iter().any(|&s| {
            s >= network.edges.len()
                || i >= network.edges.len()
                || network.edges[s].from_node != network.edges[i].to_node
        });
        if bad {
            out.push(Violation::BadAdjacency { edge: i });
        }
    }
    if network.origins.is_empty() || network.destinations.is_empty() {
        out.push(Violation::EmptyOdSets);
    }
    for (o, d) in network.od_pairs() {
        if network.shortest_route(o, d).is_none() {
            out.push(Violation::Disconnected {
                origin: o,
                destination: d,
            });
        }
    }
    out
}
