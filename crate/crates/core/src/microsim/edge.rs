use std::collections::VecDeque;

use super::world::{PedestrianAgent, VehicleAgent};
use super::SimError;
use crate::netgen::{EdgeSpec, LANE_WIDTH_M, MARKING_BUFFER_M, MIN_SIDEWALK_M};

const FEAS_EPS: f64 = 1e-9;
/// Spacing forced between vehicles that land on the same spot after a merge.
const MERGE_EPS_M: f64 = 1e-3;

/// Cross-section decision for one edge and slot.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowConfig {
    pub beta: f64,
    pub lanes: u32,
}

/// Mutable state of one edge: current cross-section plus the agents on it.
#[derive(Debug, Clone)]
pub struct EdgeRuntime {
    pub spec: EdgeSpec,
    pub lanes: u32,
    pub sidewalk_ratio: f64,
    /// One queue per lane, leader first (descending position).
    pub lane_queues: Vec<VecDeque<VehicleAgent>>,
    pub pedestrians: Vec<PedestrianAgent>,
}

impl EdgeRuntime {
    /// Edge in its initial template layout. The initial layout is not
    /// checked against the controlled-configuration bounds.
    pub fn new(spec: EdgeSpec) -> Self {
        let lanes = spec.init_lanes;
        EdgeRuntime {
            sidewalk_ratio: spec.init_sidewalk_ratio,
            lanes,
            lane_queues: (0..lanes).map(|_| VecDeque::new()).collect(),
            pedestrians: Vec::new(),
            spec,
        }
    }

    pub fn sidewalk_width_m(&self) -> f64 {
        self.sidewalk_ratio * self.spec.width_m
    }

    pub fn carriageway_width_m(&self) -> f64 {
        (1.0 - self.sidewalk_ratio - self.spec.facility_ratio) * self.spec.width_m
    }

    pub fn vehicle_count(&self) -> usize {
        self.lane_queues.iter().map(VecDeque::len).sum()
    }

    pub fn vehicles(&self) -> impl Iterator<Item = &VehicleAgent> {
        self.lane_queues.iter().flatten()
    }

    pub fn config(&self) -> RowConfig {
        RowConfig {
            beta: self.sidewalk_ratio,
            lanes: self.lanes,
        }
    }
}

/// Reconfigures an edge's cross-section.
///
/// Vehicles on removed lanes merge into the highest surviving lane. Order
/// is by position; on equal positions the vehicle from the lower lane index
/// stays ahead.
pub fn apply_row_config(edge: &mut EdgeRuntime, beta: f64, lanes: u32) -> Result<(), SimError> {
    let id = edge.spec.id;
    if lanes < 1 {
        return Err(SimError::Domain {
            edge: id,
            what: "lane count must be at least 1".into(),
        });
    }
    if !(beta > 0.0 && beta < 1.0) {
        return Err(SimError::Domain {
            edge: id,
            what: format!("sidewalk proportion {beta} outside (0,1)"),
        });
    }
    let w = edge.spec.width_m;
    let sidewalk_m = beta * w;
    if sidewalk_m < MIN_SIDEWALK_M - FEAS_EPS {
        return Err(SimError::InfeasibleSidewalk { edge: id, sidewalk_m });
    }
    let carriageway_m = (1.0 - beta - edge.spec.facility_ratio) * w;
    if carriageway_m < LANE_WIDTH_M * f64::from(lanes) + MARKING_BUFFER_M - FEAS_EPS {
        return Err(SimError::InfeasibleCarriageway {
            edge: id,
            carriageway_m,
            lanes,
        });
    }

    edge.sidewalk_ratio = beta;
    let keep = lanes as usize;
    if keep < edge.lane_queues.len() {
        let mut merged: Vec<(usize, VehicleAgent)> = Vec::new();
        for (lane, q) in edge.lane_queues.drain(keep - 1..).enumerate() {
            merged.extend(q.into_iter().map(|v| (keep - 1 + lane, v)));
        }
        merged.sort_by(|(la, a), (lb, b)| {
            b.edge_pos_m
                .total_cmp(&a.edge_pos_m)
                .then(la.cmp(lb))
        });
        let mut queue: VecDeque<VehicleAgent> = merged.into_iter().map(|(_, v)| v).collect();
        enforce_strict_order(&mut queue, edge.spec.length_m);
        for v in queue.iter_mut() {
            v.lane_index = keep - 1;
        }
        edge.lane_queues.push(queue);
    } else {
        while edge.lane_queues.len() < keep {
            edge.lane_queues.push(VecDeque::new());
        }
    }
    edge.lanes = lanes;
    Ok(())
}

/// Pushes coincident vehicles apart so positions are strictly decreasing
/// and stay inside `[0, length]`.
fn enforce_strict_order(queue: &mut VecDeque<VehicleAgent>, length: f64) {
    for i in 1..queue.len() {
        let ahead = queue[i - 1].edge_pos_m;
        if queue[i].edge_pos_m > ahead - MERGE_EPS_M {
            queue[i].edge_pos_m = ahead - MERGE_EPS_M;
        }
    }
    // a pile-up at the entry may have gone negative; push forward from the back
    if let Some(last) = queue.back_mut() {
        if last.edge_pos_m < 0.0 {
            last.edge_pos_m = 0.0;
            for i in (0..queue.len() - 1).rev() {
                let behind = queue[i + 1].edge_pos_m;
                if queue[i].edge_pos_m < behind + MERGE_EPS_M {
                    queue[i].edge_pos_m = (behind + MERGE_EPS_M).min(length);
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{build_template, TemplateKind};
    use std::sync::Arc;

    fn default_edge() -> EdgeRuntime {
        let net = build_template(TemplateKind::StreetSection, &Default::default()).unwrap();
        EdgeRuntime::new(net.edges[0].clone())
    }

    fn car(id: u64, pos: f64, lane: usize) -> VehicleAgent {
        VehicleAgent {
            id,
            od: 0,
            route: Arc::from(vec![0usize]),
            route_pos: 0,
            edge_pos_m: pos,
            lane_index: lane,
            speed_mps: 0.0,
            destination: 1,
            line_since: None,
        }
    }

    #[test]
    fn two_lane_layout_widths() {
        let mut e = default_edge();
        apply_row_config(&mut e, 4.0 / 13.0, 2).unwrap();
        assert!((e.sidewalk_width_m() - 4.0).abs() < 1e-12);
        assert!((e.carriageway_width_m() - 7.5).abs() < 1e-12);
        assert_eq!(e.lane_queues.len(), 2);
        // the rounded value from the worked example lands within 1e-4 m
        apply_row_config(&mut e, 0.30769, 2).unwrap();
        assert!((e.sidewalk_width_m() - 4.0).abs() < 1e-4);
        assert!((e.carriageway_width_m() - 7.5).abs() < 1e-4);
    }

    #[test]
    fn narrow_sidewalk_rejected() {
        let mut e = default_edge();
        let err = apply_row_config(&mut e, 0.05, 1).unwrap_err();
        assert!(matches!(err, SimError::InfeasibleSidewalk { .. }), "{err}");
        let err = apply_row_config(&mut e, 0.3, 3).unwrap_err();
        assert!(matches!(err, SimError::InfeasibleCarriageway { .. }), "{err}");
        let err = apply_row_config(&mut e, 0.3, 0).unwrap_err();
        assert!(matches!(err, SimError::Domain { .. }), "{err}");
    }

    #[test]
    fn reapplying_same_config_is_identity() {
        let mut e = default_edge();
        apply_row_config(&mut e, 4.0 / 13.0, 2).unwrap();
        e.lane_queues[0].push_back(car(1, 50.0, 0));
        e.lane_queues[1].push_back(car(2, 20.0, 1));
        let before = format!("{e:?}");
        apply_row_config(&mut e, 4.0 / 13.0, 2).unwrap();
        assert_eq!(before, format!("{e:?}"));
    }

    #[test]
    fn removed_lanes_merge_in_position_order() {
        let mut e = default_edge();
        e.lane_queues[0].push_back(car(1, 80.0, 0));
        e.lane_queues[1].push_back(car(2, 60.0, 1));
        e.lane_queues[1].push_back(car(3, 10.0, 1));
        e.lane_queues[2].push_back(car(4, 60.0, 2));
        e.lane_queues[2].push_back(car(5, 30.0, 2));
        apply_row_config(&mut e, 7.5 / 13.0, 1).unwrap();
        assert_eq!(e.lane_queues.len(), 1);
        let ids: Vec<u64> = e.lane_queues[0].iter().map(|v| v.id).collect();
        // tie at 60 m: lane 1 beats lane 2
        assert_eq!(ids, vec![1, 2, 4, 5, 3]);
        let pos: Vec<f64> = e.lane_queues[0].iter().map(|v| v.edge_pos_m).collect();
        assert!(pos.windows(2).all(|w| w[0] > w[1]));
        assert!(e.lane_queues[0].iter().all(|v| v.lane_index == 0));
    }

    #[test]
    fn pile_up_at_entry_stays_on_edge() {
        let mut e = default_edge();
        for lane in 0..3 {
            e.lane_queues[lane].push_back(car(lane as u64, 0.0, lane));
        }
        apply_row_config(&mut e, 7.5 / 13.0, 1).unwrap();
        let pos: Vec<f64> = e.lane_queues[0].iter().map(|v| v.edge_pos_m).collect();
        assert!(pos.iter().all(|&p| p >= 0.0));
        assert!(pos.windows(2).all(|w| w[0] > w[1]));
    }
}
