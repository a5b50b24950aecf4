use std::collections::BTreeSet;
use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::network::{validate_network, EdgeSpec, NodeId, RoadNetwork};
use super::{NetgenError, LANE_WIDTH_M};

const DEFAULT_LENGTH_M: f64 = 100.0;
const DEFAULT_ROUNDABOUT_ARM_M: f64 = 50.0;
const ROUNDABOUT_RADIUS_M: f64 = 20.0;
const DEFAULT_WIDTH_M: f64 = 13.0;
const DEFAULT_FACILITY_M: f64 = 1.5;
const DEFAULT_LANES: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum TemplateKind {
    StreetSection,
    TJunction,
    Intersection,
    Roundabout,
}

impl TemplateKind {
    pub const ALL: [TemplateKind; 4] = [
        TemplateKind::StreetSection,
        TemplateKind::TJunction,
        TemplateKind::Intersection,
        TemplateKind::Roundabout,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            TemplateKind::StreetSection => "street_section",
            TemplateKind::TJunction => "t_junction",
            TemplateKind::Intersection => "intersection",
            TemplateKind::Roundabout => "roundabout",
        }
    }

    /// Number of edges the template produces.
    pub fn edge_count(self) -> usize {
        match self {
            TemplateKind::StreetSection => 2,
            TemplateKind::TJunction => 6,
            TemplateKind::Intersection => 8,
            TemplateKind::Roundabout => 12,
        }
    }
}

impl fmt::Display for TemplateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for TemplateKind {
    type Err = NetgenError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        TemplateKind::ALL
            .into_iter()
            .find(|k| k.as_str() == s)
            .ok_or_else(|| NetgenError::UnknownKind(s.to_string()))
    }
}

/// Optional cross-section and length overrides; `None` keeps the default.
///
/// For the roundabout, `length_m` applies to the straight arms; ring edges
/// follow from the fixed ring radius.
#[derive(Debug, Clone, Copy, Default, PartialEq)]
pub struct GeometryOverrides {
    pub width_m: Option<f64>,
    pub length_m: Option<f64>,
    pub facility_m: Option<f64>,
    pub init_lanes: Option<u32>,
}

struct CrossSection {
    width_m: f64,
    facility_ratio: f64,
    init_lanes: u32,
    init_sidewalk_ratio: f64,
}

/// Builds one of the four parametric road components.
///
/// Every edge gets the same cross-section: the initial lanes occupy the
/// carriageway exactly and the remainder after the facility belt is sidewalk.
pub fn build_template(
    kind: TemplateKind,
    overrides: &GeometryOverrides,
) -> Result<RoadNetwork, NetgenError> {
    for (name, v) in [
        ("width_m", overrides.width_m),
        ("length_m", overrides.length_m),
        ("facility_m", overrides.facility_m),
    ] {
        if let Some(v) = v {
            if !(v > 0.0 && v.is_finite()) {
                return Err(NetgenError::Profile(format!("{name} must be positive, got {v}")));
            }
        }
    }
    if overrides.init_lanes == Some(0) {
        return Err(NetgenError::Profile("init_lanes must be positive".into()));
    }

    let width_m = overrides.width_m.unwrap_or(DEFAULT_WIDTH_M);
    let facility_m = overrides.facility_m.unwrap_or(DEFAULT_FACILITY_M);
    let init_lanes = overrides.init_lanes.unwrap_or(DEFAULT_LANES);
    let xs = CrossSection {
        width_m,
        facility_ratio: facility_m / width_m,
        init_lanes,
        init_sidewalk_ratio: (width_m - facility_m - f64::from(init_lanes) * LANE_WIDTH_M)
            / width_m,
    };

    let network = match kind {
        TemplateKind::StreetSection => {
            street_section(&xs, overrides.length_m.unwrap_or(DEFAULT_LENGTH_M))
        }
        TemplateKind::TJunction => {
            star(&xs, overrides.length_m.unwrap_or(DEFAULT_LENGTH_M), &[PI, 0.0, -FRAC_PI_2])
        }
        TemplateKind::Intersection => star(
            &xs,
            overrides.length_m.unwrap_or(DEFAULT_LENGTH_M),
            &[FRAC_PI_2, 0.0, -FRAC_PI_2, PI],
        ),
        TemplateKind::Roundabout => {
            roundabout(&xs, overrides.length_m.unwrap_or(DEFAULT_ROUNDABOUT_ARM_M))
        }
    };

    let violations = validate_network(&network);
    if violations.is_empty() {
        Ok(network)
    } else {
        Err(NetgenError::Invalid(violations))
    }
}

fn edge(xs: &CrossSection, id: usize, from: NodeId, to: NodeId, length_m: f64) -> EdgeSpec {
    EdgeSpec {
        id,
        from_node: from,
        to_node: to,
        length_m,
        width_m: xs.width_m,
        facility_ratio: xs.facility_ratio,
        init_lanes: xs.init_lanes,
        init_sidewalk_ratio: xs.init_sidewalk_ratio,
    }
}

fn street_section(xs: &CrossSection, length_m: f64) -> RoadNetwork {
    let nodes = vec![(0.0, 0.0), (length_m, 0.0)];
    let edges = vec![edge(xs, 0, 0, 1, length_m), edge(xs, 1, 1, 0, length_m)];
    let ends: BTreeSet<NodeId> = [0, 1].into();
    RoadNetwork::from_parts(nodes, edges, ends.clone(), ends)
}

/// A centre node with one two-way arm per heading (T-junction, 4-way
/// intersection). Arm `i` contributes edges `2i` (inbound) and `2i+1`
/// (outbound).
fn star(xs: &CrossSection, length_m: f64, headings: &[f64]) -> RoadNetwork {
    let mut nodes = vec![(0.0, 0.0)];
    let mut edges = Vec::new();
    for (i, h) in headings.iter().enumerate() {
        let arm = nodes.len();
        nodes.push((length_m * h.cos(), length_m * h.sin()));
        edges.push(edge(xs, 2 * i, arm, 0, length_m));
        edges.push(edge(xs, 2 * i + 1, 0, arm, length_m));
    }
    let ends: BTreeSet<NodeId> = (1..nodes.len()).collect();
    RoadNetwork::from_parts(nodes, edges, ends.clone(), ends)
}

/// Four two-way arms joined by a one-way, counter-clockwise ring.
fn roundabout(xs: &CrossSection, arm_m: f64) -> RoadNetwork {
    let ring_arc = FRAC_PI_2 * ROUNDABOUT_RADIUS_M;
    let mut nodes = Vec::new();
    for i in 0..4 {
        let h = FRAC_PI_2 * i as f64;
        nodes.push((ROUNDABOUT_RADIUS_M * h.cos(), ROUNDABOUT_RADIUS_M * h.sin()));
    }
    for i in 0..4 {
        let h = FRAC_PI_2 * i as f64;
        let r = ROUNDABOUT_RADIUS_M + arm_m;
        nodes.push((r * h.cos(), r * h.sin()));
    }
    let mut edges = Vec::new();
    for i in 0..4 {
        let ring = i;
        let arm = 4 + i;
        edges.push(edge(xs, 2 * i, arm, ring, arm_m));
        edges.push(edge(xs, 2 * i + 1, ring, arm, arm_m));
    }
    for i in 0..4 {
        edges.push(edge(xs, 8 + i, i, (i + 1) % 4, ring_arc));
    }
    let ends: BTreeSet<NodeId> = (4..8).collect();
    RoadNetwork::from_parts(nodes, edges, ends.clone(), ends)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn street_section_defaults() {
        let net = build_template(TemplateKind::StreetSection, &Default::default()).unwrap();
        assert_eq!(net.num_edges(), 2);
        for e in &net.edges {
            assert_eq!(e.length_m, 100.0);
            assert_eq!(e.width_m, 13.0);
            assert_eq!(e.facility_ratio, 1.5 / 13.0);
            assert_eq!(e.init_lanes, 3);
            // 13 - 1.5 - 10.5 = 1 m of sidewalk
            assert!((e.init_sidewalk_ratio * 13.0 - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn roundabout_defaults() {
        let net = build_template(TemplateKind::Roundabout, &Default::default()).unwrap();
        assert_eq!(net.num_edges(), 12);
        let straight: Vec<_> = net.edges.iter().filter(|e| e.length_m == 50.0).collect();
        assert_eq!(straight.len(), 8);
        assert_eq!(net.od_pairs().len(), 12);
    }

    #[test]
    fn intersection_is_symmetric() {
        let net = build_template(TemplateKind::Intersection, &Default::default()).unwrap();
        assert_eq!(net.num_edges(), 8);
        let first = &net.edges[0];
        for e in &net.edges {
            assert_eq!(e.length_m, first.length_m);
            assert_eq!(e.width_m, first.width_m);
            assert_eq!(e.facility_ratio, first.facility_ratio);
            assert_eq!(e.init_lanes, first.init_lanes);
            assert_eq!(e.init_sidewalk_ratio, first.init_sidewalk_ratio);
        }
    }

    #[test]
    fn every_kind_validates_and_has_its_dimension() {
        for kind in TemplateKind::ALL {
            let net = build_template(kind, &Default::default()).unwrap();
            assert_eq!(net.num_edges(), kind.edge_count(), "{kind}");
            assert!(validate_network(&net).is_empty(), "{kind}");
        }
    }

    #[test]
    fn pure_function_of_inputs() {
        let o = GeometryOverrides {
            width_m: Some(15.0),
            ..Default::default()
        };
        for kind in TemplateKind::ALL {
            assert_eq!(build_template(kind, &o).unwrap(), build_template(kind, &o).unwrap());
        }
    }

    #[test]
    fn rejects_bad_overrides() {
        let o = GeometryOverrides {
            length_m: Some(-1.0),
            ..Default::default()
        };
        assert!(build_template(TemplateKind::StreetSection, &o).is_err());
        let o = GeometryOverrides {
            width_m: Some(5.0),
            init_lanes: Some(1),
            ..Default::default()
        };
        let err = build_template(TemplateKind::StreetSection, &o).unwrap_err();
        assert!(err.to_string().contains("width infeasible"), "{err}");
        assert!("cloverleaf".parse::<TemplateKind>().is_err());
    }

    #[test]
    fn junction_routes_cross_the_centre() {
        let net = build_template(TemplateKind::TJunction, &Default::default()).unwrap();
        for (o, d) in net.od_pairs() {
            let route = net.shortest_route(o, d).unwrap();
            assert_eq!(route.len(), 2);
            assert!(net.adjacency[route[0]].contains(&route[1]));
        }
        let rb = build_template(TemplateKind::Roundabout, &Default::default()).unwrap();
        for (o, d) in rb.od_pairs() {
            let route = rb.shortest_route(o, d).unwrap();
            for w in route.windows(2) {
                assert!(rb.adjacency[w[0]].contains(&w[1]));
            }
        }
    }
}
