use std::collections::VecDeque;
use std::sync::Arc;

use rand::Rng as _;

use super::edge::{apply_row_config, EdgeRuntime, RowConfig};
use super::summary::{ModeFlow, ObservationRecord, OdFlow, SlotSummary};
use super::{SimError, SimParams};
use crate::netgen::{DemandSchedule, EdgeId, NetgenError, NodeId, RoadNetwork, Violation};
use crate::rng;

#[derive(Debug, Clone, PartialEq)]
pub struct VehicleAgent {
    pub id: u64,
    /// Index into the world's OD pair list.
    pub od: usize,
    pub route: Arc<[EdgeId]>,
    /// Index of the current edge within `route`.
    pub route_pos: usize,
    pub edge_pos_m: f64,
    pub lane_index: usize,
    pub speed_mps: f64,
    pub destination: NodeId,
    /// Tick at which the vehicle first reached the stop line of its edge.
    pub line_since: Option<u64>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct PedestrianAgent {
    pub id: u64,
    pub od: usize,
    pub route: Arc<[EdgeId]>,
    pub route_pos: usize,
    pub edge_pos_m: f64,
    pub speed_mps: f64,
    pub destination: NodeId,
}

#[derive(Debug, Clone, Copy)]
struct PendingTrip {
    due_tick: u64,
    od: usize,
}

#[derive(Debug, Clone, Copy)]
struct Transfer {
    edge: EdgeId,
    lane: usize,
    overshoot: f64,
    line_since: u64,
}

#[derive(Debug, Clone, Copy, Default)]
struct SlotCounters {
    veh: ModeFlow,
    ped: ModeFlow,
}

/// A running simulation: network, agents, pending trips and per-slot
/// bookkeeping. Single owner; distinct worlds share nothing mutable.
#[derive(Debug, Clone)]
pub struct World {
    network: Arc<RoadNetwork>,
    params: SimParams,
    seed: u64,
    pub edges: Vec<EdgeRuntime>,
    od_pairs: Vec<(NodeId, NodeId)>,
    routes: Vec<Arc<[EdgeId]>>,
    pending_veh: Vec<PendingTrip>,
    pending_ped: Vec<PendingTrip>,
    counters: Vec<SlotCounters>,
    /// Trips carried into the next slot, per OD: (vehicles, pedestrians).
    carry: Vec<(u32, u32)>,
    admitted: Vec<Vec<bool>>,
    tick: u64,
    next_id: u64,
}

impl World {
    /// Empty world in the template's initial layout.
    pub fn new(network: Arc<RoadNetwork>, params: SimParams, seed: u64) -> Result<Self, NetgenError> {
        let od_pairs = network.od_pairs();
        let mut routes = Vec::with_capacity(od_pairs.len());
        for &(o, d) in &od_pairs {
            let route = network.shortest_route(o, d).ok_or_else(|| {
                NetgenError::Invalid(vec![Violation::Disconnected {
                    origin: o,
                    destination: d,
                }])
            })?;
            routes.push(Arc::from(route));
        }
        let edges: Vec<EdgeRuntime> = network.edges.iter().cloned().map(EdgeRuntime::new).collect();
        let admitted = edges.iter().map(|e| vec![false; e.lanes as usize]).collect();
        Ok(World {
            params,
            seed,
            edges,
            counters: vec![SlotCounters::default(); od_pairs.len()],
            carry: vec![(0, 0); od_pairs.len()],
            od_pairs,
            routes,
            pending_veh: Vec::new(),
            pending_ped: Vec::new(),
            admitted,
            tick: 0,
            next_id: 0,
            network,
        })
    }

    pub fn network(&self) -> &RoadNetwork {
        &self.network
    }

    pub fn params(&self) -> &SimParams {
        &self.params
    }

    pub fn od_pairs(&self) -> &[(NodeId, NodeId)] {
        &self.od_pairs
    }

    pub fn route(&self, od: usize) -> &[EdgeId] {
        &self.routes[od]
    }

    pub fn current_tick(&self) -> u64 {
        self.tick
    }

    pub fn vehicle_count(&self) -> usize {
        self.edges.iter().map(EdgeRuntime::vehicle_count).sum()
    }

    pub fn pedestrian_count(&self) -> usize {
        self.edges.iter().map(|e| e.pedestrians.len()).sum()
    }

    pub fn vehicles(&self) -> impl Iterator<Item = &VehicleAgent> {
        self.edges.iter().flat_map(EdgeRuntime::vehicles)
    }

    pub fn pedestrians(&self) -> impl Iterator<Item = &PedestrianAgent> {
        self.edges.iter().flat_map(|e| e.pedestrians.iter())
    }

    /// Puts a vehicle at the back of `lane` on the `route_pos`-th edge of
    /// OD `od`'s route. Counts as a trip rolled into the current slot.
    pub fn place_vehicle(
        &mut self,
        od: usize,
        route_pos: usize,
        lane: usize,
        pos_m: f64,
        speed_mps: f64,
    ) -> u64 {
        let route = self.routes[od].clone();
        let edge = route[route_pos];
        let id = self.fresh_id();
        let v = VehicleAgent {
            id,
            od,
            destination: self.od_pairs[od].1,
            route,
            route_pos,
            edge_pos_m: pos_m,
            lane_index: lane,
            speed_mps,
            line_since: None,
        };
        let q = &mut self.edges[edge].lane_queues[lane];
        debug_assert!(q.back().is_none_or(|b| b.edge_pos_m > pos_m));
        q.push_back(v);
        self.carry[od].0 += 1;
        self.counters[od].veh.rolled_in += 1;
        id
    }

    pub fn place_pedestrian(&mut self, od: usize, route_pos: usize, pos_m: f64, speed_mps: f64) -> u64 {
        let route = self.routes[od].clone();
        let edge = route[route_pos];
        let id = self.fresh_id();
        self.edges[edge].pedestrians.push(PedestrianAgent {
            id,
            od,
            destination: self.od_pairs[od].1,
            route,
            route_pos,
            edge_pos_m: pos_m,
            speed_mps,
        });
        self.carry[od].1 += 1;
        self.counters[od].ped.rolled_in += 1;
        id
    }

    fn fresh_id(&mut self) -> u64 {
        self.next_id += 1;
        self.next_id
    }

    /// Applies one cross-section per edge.
    pub fn configure(&mut self, configs: &[RowConfig]) -> Result<(), SimError> {
        if configs.len() != self.edges.len() {
            return Err(SimError::ConfigCount {
                expected: self.edges.len(),
                got: configs.len(),
            });
        }
        for (edge, cfg) in self.edges.iter_mut().zip(configs) {
            apply_row_config(edge, cfg.beta, cfg.lanes)?;
        }
        self.admitted = self.edges.iter().map(|e| vec![false; e.lanes as usize]).collect();
        Ok(())
    }

    /// Advances the world by one time step of `params.dt_s`.
    pub fn tick(&mut self) {
        for a in self.admitted.iter_mut() {
            a.fill(false);
        }
        self.depart_due();
        self.move_vehicles();
        self.move_pedestrians();
        self.tick += 1;
    }

    fn depart_due(&mut self) {
        let now = self.tick;
        let mut waiting = Vec::new();
        for trip in std::mem::take(&mut self.pending_veh) {
            if trip.due_tick > now || !self.try_depart_vehicle(trip.od) {
                waiting.push(trip);
            }
        }
        self.pending_veh = waiting;

        let mut waiting = Vec::new();
        for trip in std::mem::take(&mut self.pending_ped) {
            if trip.due_tick > now {
                waiting.push(trip);
                continue;
            }
            let route = self.routes[trip.od].clone();
            let id = self.fresh_id();
            self.edges[route[0]].pedestrians.push(PedestrianAgent {
                id,
                od: trip.od,
                destination: self.od_pairs[trip.od].1,
                route,
                route_pos: 0,
                edge_pos_m: 0.0,
                speed_mps: 0.0,
            });
            self.counters[trip.od].ped.departed += 1;
        }
        self.pending_ped = waiting;
    }

    /// Enters a vehicle at the start of its first edge, in the lane with the
    /// most room. Fails when every lane is full or already admitted a vehicle
    /// this tick.
    fn try_depart_vehicle(&mut self, od: usize) -> bool {
        let route = self.routes[od].clone();
        let e = route[0];
        let edge = &self.edges[e];
        let mut best: Option<(usize, f64)> = None;
        for (lane, q) in edge.lane_queues.iter().enumerate() {
            if self.admitted[e][lane] {
                continue;
            }
            let room = self.entry_room(q, edge.spec.length_m);
            if room >= 0.0 && best.is_none_or(|(_, r)| room > r) {
                best = Some((lane, room));
            }
        }
        let Some((lane, _)) = best else {
            return false;
        };
        let id = self.fresh_id();
        self.edges[e].lane_queues[lane].push_back(VehicleAgent {
            id,
            od,
            destination: self.od_pairs[od].1,
            route,
            route_pos: 0,
            edge_pos_m: 0.0,
            lane_index: lane,
            speed_mps: 0.0,
            line_since: None,
        });
        self.admitted[e][lane] = true;
        self.counters[od].veh.departed += 1;
        true
    }

    /// Free length at the entry of a lane before the standstill gap behind
    /// its last vehicle.
    fn entry_room(&self, q: &VecDeque<VehicleAgent>, length_m: f64) -> f64 {
        match q.back() {
            Some(b) => b.edge_pos_m - self.params.vehicle_length_m - self.params.standstill_gap_m,
            None => length_m,
        }
    }

    fn has_entry_room(&self, e: EdgeId) -> bool {
        let edge = &self.edges[e];
        edge.lane_queues
            .iter()
            .any(|q| self.entry_room(q, edge.spec.length_m) >= 0.0)
    }

    fn move_vehicles(&mut self) {
        let p = self.params.clone();
        let entry_ok: Vec<bool> = (0..self.edges.len()).map(|e| self.has_entry_room(e)).collect();
        let mut transfers = Vec::new();

        for e in 0..self.edges.len() {
            let length = self.edges[e].spec.length_m;
            for lane in 0..self.edges[e].lane_queues.len() {
                let queue = &mut self.edges[e].lane_queues[lane];
                let mut leader_rear: Option<f64> = None;
                let mut i = 0;
                while i < queue.len() {
                    let v = &mut queue[i];
                    let last_edge = v.route_pos + 1 == v.route.len();
                    let gap_free = match leader_rear {
                        Some(rear) => rear - p.standstill_gap_m - v.edge_pos_m,
                        None if last_edge || entry_ok[v.route[v.route_pos + 1]] => f64::INFINITY,
                        None => length - v.edge_pos_m,
                    };
                    let speed = follow_speed(v.speed_mps, gap_free, &p);
                    let new_pos = v.edge_pos_m + speed * p.dt_s;
                    v.speed_mps = speed;
                    if leader_rear.is_none() && new_pos >= length {
                        if last_edge {
                            let od = v.od;
                            queue.remove(i);
                            self.counters[od].veh.arrived += 1;
                            continue;
                        }
                        v.edge_pos_m = length;
                        let since = *v.line_since.get_or_insert(self.tick);
                        transfers.push(Transfer {
                            edge: e,
                            lane,
                            overshoot: new_pos - length,
                            line_since: since,
                        });
                    } else {
                        v.edge_pos_m = new_pos.min(length);
                    }
                    leader_rear = Some(v.edge_pos_m - p.vehicle_length_m);
                    i += 1;
                }
            }
        }

        // first come, first served across all stop lines
        transfers.sort_by_key(|a| (a.line_since, a.edge, a.lane));
        for t in transfers {
            let (next, pref) = {
                let v = &self.edges[t.edge].lane_queues[t.lane][0];
                let next = v.route[v.route_pos + 1];
                let n = self.edges[next].lane_queues.len();
                (next, v.lane_index.min(n - 1))
            };
            let next_len = self.edges[next].spec.length_m;
            let mut order: Vec<usize> = (0..self.edges[next].lane_queues.len()).collect();
            order.sort_by_key(|&j| (j.abs_diff(pref), j));
            let target = order.into_iter().find_map(|j| {
                if self.admitted[next][j] {
                    return None;
                }
                let room = self.entry_room(&self.edges[next].lane_queues[j], next_len);
                (room >= 0.0).then_some((j, room))
            });
            match target {
                Some((j, room)) => {
                    let mut v = self.edges[t.edge].lane_queues[t.lane]
                        .pop_front()
                        .expect("transfer candidate is the lane leader");
                    v.route_pos += 1;
                    v.edge_pos_m = t.overshoot.min(room).min(next_len);
                    v.lane_index = j;
                    v.line_since = None;
                    self.edges[next].lane_queues[j].push_back(v);
                    self.admitted[next][j] = true;
                }
                None => {
                    self.edges[t.edge].lane_queues[t.lane][0].speed_mps = 0.0;
                }
            }
        }
    }

    fn move_pedestrians(&mut self) {
        let p = &self.params;
        let mut moved: Vec<(EdgeId, PedestrianAgent)> = Vec::new();
        for e in 0..self.edges.len() {
            let edge = &mut self.edges[e];
            let length = edge.spec.length_m;
            let area = edge.sidewalk_ratio * edge.spec.width_m * length;
            let speed = walking_speed(edge.pedestrians.len(), area, p);
            let mut stay = Vec::with_capacity(edge.pedestrians.len());
            for mut ped in edge.pedestrians.drain(..) {
                ped.speed_mps = speed;
                let new_pos = ped.edge_pos_m + speed * p.dt_s;
                if new_pos < length {
                    ped.edge_pos_m = new_pos;
                    stay.push(ped);
                } else if ped.route_pos + 1 == ped.route.len() {
                    self.counters[ped.od].ped.arrived += 1;
                } else {
                    ped.route_pos += 1;
                    ped.edge_pos_m = new_pos - length;
                    moved.push((ped.route[ped.route_pos], ped));
                }
            }
            edge.pedestrians = stay;
        }
        for (e, mut ped) in moved {
            ped.edge_pos_m = ped.edge_pos_m.min(self.edges[e].spec.length_m);
            self.edges[e].pedestrians.push(ped);
        }
    }

    /// Runs slot `t`: applies `configs` (or keeps the current layout when
    /// `None`), schedules the slot's trips, ticks through the slot and
    /// records one observation every `obs_interval_s`. Unfinished and
    /// undeparted trips roll into the next slot; after the final slot they
    /// are counted and dropped.
    pub fn run_slot(
        &mut self,
        schedule: &DemandSchedule,
        t: usize,
        configs: Option<&[RowConfig]>,
        slot_seconds: u32,
        obs_interval_s: u32,
    ) -> Result<SlotSummary, SimError> {
        if t >= schedule.slots {
            return Err(SimError::SlotOutOfRange {
                slot: t,
                slots: schedule.slots,
            });
        }
        if schedule.od_pairs != self.od_pairs {
            return Err(SimError::Timing("schedule OD pairs do not match the network".into()));
        }
        if obs_interval_s == 0 || !slot_seconds.is_multiple_of(obs_interval_s) {
            return Err(SimError::Timing(format!(
                "slot of {slot_seconds} s is not a multiple of the {obs_interval_s} s observation interval"
            )));
        }
        let ticks_per_obs = f64::from(obs_interval_s) / self.params.dt_s;
        if !(self.params.dt_s > 0.0) || (ticks_per_obs - ticks_per_obs.round()).abs() > 1e-9 {
            return Err(SimError::Timing(format!(
                "observation interval {obs_interval_s} s is not a multiple of dt {}",
                self.params.dt_s
            )));
        }
        let ticks_per_obs = ticks_per_obs.round() as u64;
        let observations = u64::from(slot_seconds / obs_interval_s);
        let slot_ticks = ticks_per_obs * observations;

        if let Some(configs) = configs {
            self.configure(configs)?;
        }

        for (c, &(veh, ped)) in self.counters.iter_mut().zip(&self.carry) {
            *c = SlotCounters::default();
            c.veh.rolled_in = veh;
            c.ped.rolled_in = ped;
        }

        let start = self.tick;
        let mut rng = rng::split(self.seed, rng::stream::SIM, t as u64);
        let mut new_veh = Vec::new();
        let mut new_ped = Vec::new();
        for od in 0..self.od_pairs.len() {
            let (nv, np) = (schedule.veh_trips[od][t], schedule.ped_trips[od][t]);
            self.counters[od].veh.scheduled = nv;
            self.counters[od].ped.scheduled = np;
            for _ in 0..nv {
                new_veh.push(PendingTrip {
                    due_tick: start + rng.random_range(0..slot_ticks),
                    od,
                });
            }
            for _ in 0..np {
                new_ped.push(PendingTrip {
                    due_tick: start + rng.random_range(0..slot_ticks),
                    od,
                });
            }
        }
        // carried trips keep their earlier due times, so they stay in front
        new_veh.sort_by_key(|p| (p.due_tick, p.od));
        new_ped.sort_by_key(|p| (p.due_tick, p.od));
        self.pending_veh.extend(new_veh);
        self.pending_ped.extend(new_ped);

        let mut per_h: Vec<Vec<ObservationRecord>> = Vec::with_capacity(observations as usize);
        for k in 0..slot_ticks {
            self.tick();
            if (k + 1) % ticks_per_obs == 0 {
                per_h.push(observe(self, per_h.len()));
            }
        }
        let mut records: Vec<Vec<ObservationRecord>> =
            (0..self.edges.len()).map(|_| Vec::with_capacity(per_h.len())).collect();
        for obs in per_h {
            for r in obs {
                records[r.edge].push(r);
            }
        }

        // count what is still around by enumeration, not by the counters
        let mut en_route = vec![(0u32, 0u32); self.od_pairs.len()];
        for v in self.vehicles() {
            en_route[v.od].0 += 1;
        }
        for p in self.pedestrians() {
            en_route[p.od].1 += 1;
        }
        let mut waiting = vec![(0u32, 0u32); self.od_pairs.len()];
        for p in &self.pending_veh {
            waiting[p.od].0 += 1;
        }
        for p in &self.pending_ped {
            waiting[p.od].1 += 1;
        }

        let mut flows = Vec::with_capacity(self.od_pairs.len());
        for od in 0..self.od_pairs.len() {
            let c = &mut self.counters[od];
            c.veh.unfinished = en_route[od].0;
            c.ped.unfinished = en_route[od].1;
            c.veh.undeparted = waiting[od].0;
            c.ped.undeparted = waiting[od].1;
            self.carry[od] = (c.veh.rollover(), c.ped.rollover());
            flows.push(OdFlow {
                origin: self.od_pairs[od].0,
                destination: self.od_pairs[od].1,
                veh: c.veh,
                ped: c.ped,
            });
        }

        if t + 1 == schedule.slots {
            self.clear_agents();
        }

        Ok(SlotSummary {
            slot: t,
            records,
            flows,
        })
    }

    fn clear_agents(&mut self) {
        for e in self.edges.iter_mut() {
            e.lane_queues.iter_mut().for_each(VecDeque::clear);
            e.pedestrians.clear();
        }
        self.pending_veh.clear();
        self.pending_ped.clear();
        self.carry.iter_mut().for_each(|c| *c = (0, 0));
    }
}

/// Safe-speed car following.
///
/// `gap_free` is the distance the vehicle may cover before violating the
/// standstill gap behind its leader (or reaching a closed stop line). The
/// desired speed keeps the time headway and respects comfortable
/// acceleration and deceleration; the result is then capped so the vehicle
/// never closes the gap within one step.
fn follow_speed(v: f64, gap_free: f64, p: &SimParams) -> f64 {
    let headway_speed = (gap_free / p.time_headway_s).max(0.0);
    let desired = p
        .vm_mps
        .min(v + p.accel_mps2 * p.dt_s)
        .min((v - p.decel_mps2 * p.dt_s).max(headway_speed));
    let safe = (gap_free / p.dt_s).max(0.0);
    desired.min(safe).clamp(0.0, p.vm_mps)
}

/// Linear density-speed law on a sidewalk of `area_m2`.
fn walking_speed(count: usize, area_m2: f64, p: &SimParams) -> f64 {
    if count == 0 {
        return p.pm_mps;
    }
    let density = count as f64 / area_m2;
    p.pm_mps * (1.0 - density / p.ped_jam_density).max(0.0)
}

/// Per-edge counts and speed-ratio sums for the current instant.
pub fn observe(world: &World, h: usize) -> Vec<ObservationRecord> {
    let p = &world.params;
    world
        .edges
        .iter()
        .map(|e| {
            let (veh_count, veh_sum) = e
                .vehicles()
                .fold((0u32, 0.0), |(n, s), v| (n + 1, s + v.speed_mps / p.vm_mps));
            let (ped_count, ped_sum) = e
                .pedestrians
                .iter()
                .fold((0u32, 0.0), |(n, s), q| (n + 1, s + q.speed_mps / p.pm_mps));
            ObservationRecord {
                edge: e.spec.id,
                h,
                veh_count,
                ped_count,
                veh_speed_ratio_sum: veh_sum,
                ped_speed_ratio_sum: ped_sum,
            }
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::microsim::{PM_MPS, VM_MPS};
    use crate::netgen::{build_template, GeometryOverrides, TemplateKind};

    fn world(kind: TemplateKind) -> World {
        let net = build_template(kind, &GeometryOverrides::default()).unwrap();
        World::new(Arc::new(net), SimParams::default(), 1).unwrap()
    }

    #[test]
    fn free_vehicle_reaches_top_speed_and_stays_there() {
        let long = GeometryOverrides {
            length_m: Some(1000.0),
            ..Default::default()
        };
        let net = build_template(TemplateKind::StreetSection, &long).unwrap();
        let mut w = World::new(Arc::new(net), SimParams::default(), 1).unwrap();
        w.place_vehicle(0, 0, 0, 0.0, 0.0);
        let mut last = 0.0;
        for _ in 0..20 {
            w.tick();
            let v = w.vehicles().next().unwrap().speed_mps;
            assert!(v <= VM_MPS + 1e-12);
            assert!(v >= last);
            last = v;
        }
        assert!((last - VM_MPS).abs() < 1e-12);
    }

    #[test]
    fn follower_stops_behind_stopped_leader() {
        let p = SimParams::default();
        let leader_rear = 60.0 - p.vehicle_length_m;
        let (mut x, mut v) = (0.0, VM_MPS);
        for _ in 0..60 {
            v = follow_speed(v, leader_rear - p.standstill_gap_m - x, &p);
            x += v * p.dt_s;
            assert!(leader_rear - x >= p.standstill_gap_m - 1e-9);
        }
        assert_eq!(v, 0.0);
        assert!(leader_rear - x >= p.standstill_gap_m - 1e-9);
    }

    #[test]
    fn queue_at_blocked_stop_line_stays_ordered() {
        let mut w = world(TemplateKind::TJunction);
        // fill the first edge of route 0 with a platoon; the second edge is
        // free so they all pass eventually, ordering must hold throughout
        let mut pos = 90.0;
        for _ in 0..8 {
            w.place_vehicle(0, 0, 0, pos, VM_MPS);
            pos -= 8.0;
        }
        for _ in 0..120 {
            w.tick();
            for e in &w.edges {
                for q in &e.lane_queues {
                    let xs: Vec<f64> = q.iter().map(|v| v.edge_pos_m).collect();
                    assert!(xs.windows(2).all(|p| p[0] > p[1]), "{xs:?}");
                    assert!(q.iter().all(|v| v.edge_pos_m >= 0.0 && v.edge_pos_m <= e.spec.length_m));
                }
            }
        }
        assert_eq!(w.vehicle_count(), 0);
    }

    #[test]
    fn lone_pedestrian_walks_near_top_speed() {
        let mut w = world(TemplateKind::StreetSection);
        w.place_pedestrian(0, 0, 0.0, 0.0);
        w.tick();
        let area = w.edges[0].sidewalk_width_m() * w.edges[0].spec.length_m;
        let expected = PM_MPS * (1.0 - (1.0 / area) / 5.4);
        let p = w.pedestrians().next().unwrap();
        assert!((p.speed_mps - expected).abs() < 1e-12);
        assert!((p.edge_pos_m - expected).abs() < 1e-12);
        assert!(p.speed_mps > 0.99 * PM_MPS);
    }

    #[test]
    fn walking_speed_monotone() {
        let p = SimParams::default();
        let mut prev = f64::INFINITY;
        for n in 0..2000 {
            let v = walking_speed(n, 150.0, &p);
            assert!(v <= prev && v >= 0.0);
            prev = v;
        }
        let mut prev = 0.0;
        for width in 1..40 {
            let v = walking_speed(300, 100.0 * (1.0 + 0.5 * width as f64), &p);
            assert!(v >= prev);
            prev = v;
        }
    }

    #[test]
    fn observe_empty_world() {
        let w = world(TemplateKind::Intersection);
        for r in observe(&w, 0) {
            assert_eq!((r.veh_count, r.ped_count), (0, 0));
            assert_eq!(r.veh_speed_ratio_sum, 0.0);
            assert_eq!(r.ped_speed_ratio_sum, 0.0);
        }
    }

    #[test]
    fn observe_at_top_speed_ratio_equals_count() {
        let mut w = world(TemplateKind::StreetSection);
        w.place_vehicle(0, 0, 0, 50.0, VM_MPS);
        w.place_vehicle(0, 0, 1, 20.0, VM_MPS);
        w.place_pedestrian(1, 0, 3.0, PM_MPS);
        let r = observe(&w, 0);
        assert_eq!(r[0].veh_count, 2);
        assert!((r[0].veh_speed_ratio_sum - 2.0).abs() < 1e-12);
        assert_eq!(r[1].ped_count, 1);
        assert!((r[1].ped_speed_ratio_sum - 1.0).abs() < 1e-12);
    }

    #[test]
    fn vehicles_cross_the_junction() {
        let mut w = world(TemplateKind::TJunction);
        let schedule = {
            let mut s = DemandSchedule::empty(w.network(), 3, 1800);
            s.veh_trips[0][0] = 5;
            s.ped_trips[0][0] = 2;
            s
        };
        let summary = w.run_slot(&schedule, 0, None, 1800, 10).unwrap();
        assert_eq!(summary.flows[0].veh.arrived, 5);
        assert_eq!(summary.flows[0].ped.arrived, 2);
        assert!(summary.conserves());
    }

    #[test]
    fn infeasible_config_propagates() {
        let mut w = world(TemplateKind::StreetSection);
        let s = DemandSchedule::empty(w.network(), 3, 1800);
        let cfg = [RowConfig { beta: 0.05, lanes: 1 }; 2];
        assert!(matches!(
            w.run_slot(&s, 0, Some(&cfg), 1800, 10),
            Err(SimError::InfeasibleSidewalk { .. })
        ));
        assert!(w.run_slot(&s, 0, None, 1800, 7).is_err());
        assert!(w.run_slot(&s, 3, None, 1800, 10).is_err());
    }
}
