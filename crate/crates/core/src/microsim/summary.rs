use std::io::Write;

use crate::netgen::{EdgeId, NodeId};

/// Counts and speed-ratio sums on one edge at one observation instant.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct ObservationRecord {
    pub edge: EdgeId,
    pub h: usize,
    pub veh_count: u32,
    pub ped_count: u32,
    /// Sum over vehicles of speed / vm.
    pub veh_speed_ratio_sum: f64,
    /// Sum over pedestrians of speed / pm.
    pub ped_speed_ratio_sum: f64,
}

/// Trip bookkeeping for one mode and OD pair over one slot.
///
/// `scheduled + rolled_in = arrived + unfinished + undeparted` must hold
/// exactly; `unfinished` and `undeparted` become the next slot's `rolled_in`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub struct ModeFlow {
    pub scheduled: u32,
    pub rolled_in: u32,
    pub departed: u32,
    pub arrived: u32,
    /// Still en route at slot end.
    pub unfinished: u32,
    /// Due but not yet departed at slot end.
    pub undeparted: u32,
}

impl ModeFlow {
    pub fn conserves(&self) -> bool {
        u64::from(self.arrived) + u64::from(self.unfinished) + u64::from(self.undeparted)
            == u64::from(self.scheduled) + u64::from(self.rolled_in)
    }

    /// Trips carried into the next slot.
    pub fn rollover(&self) -> u32 {
        self.unfinished + self.undeparted
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct OdFlow {
    pub origin: NodeId,
    pub destination: NodeId,
    pub veh: ModeFlow,
    pub ped: ModeFlow,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SlotSummary {
    pub slot: usize,
    /// `records[edge][h]`
    pub records: Vec<Vec<ObservationRecord>>,
    pub flows: Vec<OdFlow>,
}

impl SlotSummary {
    pub fn observations_per_edge(&self) -> usize {
        self.records.first().map_or(0, Vec::len)
    }

    pub fn conserves(&self) -> bool {
        self.flows.iter().all(|f| f.veh.conserves() && f.ped.conserves())
    }

    /// Mean instantaneous vehicle speed over all vehicle observations, m/s.
    /// `None` when no vehicle was observed.
    pub fn mean_drive_speed_mps(&self, vm: f64) -> Option<f64> {
        let (n, s) = self
            .records
            .iter()
            .flatten()
            .fold((0u64, 0.0), |(n, s), r| (n + u64::from(r.veh_count), s + r.veh_speed_ratio_sum));
        (n > 0).then(|| s / n as f64 * vm)
    }

    pub fn mean_walk_speed_mps(&self, pm: f64) -> Option<f64> {
        let (n, s) = self
            .records
            .iter()
            .flatten()
            .fold((0u64, 0.0), |(n, s), r| (n + u64::from(r.ped_count), s + r.ped_speed_ratio_sum));
        (n > 0).then(|| s / n as f64 * pm)
    }

    /// Appends rows `slot,edge,h,veh_count,ped_count,veh_ratio_sum,ped_ratio_sum`.
    pub fn write_trace<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        for r in self.records.iter().flatten() {
            writeln!(
                out,
                "{},{},{},{},{},{},{}",
                self.slot,
                r.edge,
                r.h,
                r.veh_count,
                r.ped_count,
                r.veh_speed_ratio_sum,
                r.ped_speed_ratio_sum
            )?;
        }
        Ok(())
    }

    pub const TRACE_HEADER: &'static str =
        "slot,edge,h,veh_count,ped_count,veh_ratio_sum,ped_ratio_sum";
}
