use std::io::Write;

use rand::Rng as _;
use rand_distr::{Distribution, Poisson};

use super::network::{NodeId, RoadNetwork};
use super::NetgenError;
use crate::rng;

/// Shape of the daily demand curve: a flat base with two Gaussian peaks,
/// rescaled so the day-long mean per OD pair equals the base rates.
#[derive(Debug, Clone, PartialEq)]
pub struct DemandProfile {
    /// Mean vehicle trips per hour per OD pair.
    pub base_rate_veh: f64,
    /// Mean pedestrian trips per hour per OD pair.
    pub base_rate_ped: f64,
    pub peak_slots: [f64; 2],
    pub peak_multiplier: f64,
    pub peak_spread_slots: f64,
    pub slot_seconds: u32,
}

impl Default for DemandProfile {
    fn default() -> Self {
        DemandProfile {
            base_rate_veh: 114.0,
            base_rate_ped: 21.0,
            // 08:00 and 18:00 with half-hour slots
            peak_slots: [16.0, 36.0],
            peak_multiplier: 3.0,
            peak_spread_slots: 2.0,
            slot_seconds: 1800,
        }
    }
}

impl DemandProfile {
    pub fn validate(&self) -> Result<(), NetgenError> {
        let bad = |m: &str| Err(NetgenError::Profile(m.to_string()));
        if !(self.base_rate_veh >= 0.0) || !(self.base_rate_ped >= 0.0) {
            return bad("base rates must be non-negative");
        }
        if !(self.peak_multiplier >= 1.0) {
            return bad("peak_multiplier must be >= 1");
        }
        if !(self.peak_spread_slots > 0.0) {
            return bad("peak spread must be > 0");
        }
        if self.slot_seconds == 0 {
            return bad("slot_seconds must be > 0");
        }
        Ok(())
    }

    /// Unnormalised shape value at `slot` (1 away from the peaks).
    fn shape(&self, slot: usize) -> f64 {
        let t = slot as f64;
        let bump = |p: f64| (-(t - p).powi(2) / (2.0 * self.peak_spread_slots.powi(2))).exp();
        1.0 + (self.peak_multiplier - 1.0) * (bump(self.peak_slots[0]) + bump(self.peak_slots[1]))
    }

    /// Per-slot multipliers with unit mean over `slots`.
    pub fn slot_weights(&self, slots: usize) -> Vec<f64> {
        let raw: Vec<f64> = (0..slots).map(|t| self.shape(t)).collect();
        let mean = raw.iter().sum::<f64>() / slots as f64;
        raw.into_iter().map(|v| v / mean).collect()
    }

    /// Expected (vehicle, pedestrian) trips in `slot` for one OD pair.
    pub fn expected_trips(&self, slots: usize, slot: usize) -> (f64, f64) {
        let w = self.slot_weights(slots)[slot];
        let hours = f64::from(self.slot_seconds) / 3600.0;
        (self.base_rate_veh * w * hours, self.base_rate_ped * w * hours)
    }
}

/// Trip counts per OD pair and slot for both modes.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct DemandSchedule {
    pub slots: usize,
    pub slot_seconds: u32,
    pub od_pairs: Vec<(NodeId, NodeId)>,
    /// `veh_trips[od][slot]`
    pub veh_trips: Vec<Vec<u32>>,
    pub ped_trips: Vec<Vec<u32>>,
    pub seed: u64,
}

impl DemandSchedule {
    /// A schedule with no trips at all.
    pub fn empty(network: &RoadNetwork, slots: usize, slot_seconds: u32) -> Self {
        let od_pairs = network.od_pairs();
        DemandSchedule {
            slots,
            slot_seconds,
            veh_trips: vec![vec![0; slots]; od_pairs.len()],
            ped_trips: vec![vec![0; slots]; od_pairs.len()],
            od_pairs,
            seed: 0,
        }
    }

    pub fn total_veh(&self) -> u64 {
        self.veh_trips.iter().flatten().map(|&c| u64::from(c)).sum()
    }

    pub fn total_ped(&self) -> u64 {
        self.ped_trips.iter().flatten().map(|&c| u64::from(c)).sum()
    }

    /// Realised mean trips per hour per OD pair, (vehicles, pedestrians).
    pub fn mean_rates(&self) -> (f64, f64) {
        let hours = self.slots as f64 * f64::from(self.slot_seconds) / 3600.0;
        let n = self.od_pairs.len().max(1) as f64;
        (
            self.total_veh() as f64 / hours / n,
            self.total_ped() as f64 / hours / n,
        )
    }

    /// CSV `slot,origin,destination,veh_trips,ped_trips`.
    pub fn write_csv<W: Write>(&self, mut out: W) -> std::io::Result<()> {
        writeln!(out, "slot,origin,destination,veh_trips,ped_trips")?;
        for t in 0..self.slots {
            for (i, (o, d)) in self.od_pairs.iter().enumerate() {
                writeln!(
                    out,
                    "{t},{o},{d},{},{}",
                    self.veh_trips[i][t], self.ped_trips[i][t]
                )?;
            }
        }
        Ok(())
    }
}

/// Draws Poisson trip counts around the bimodal profile for every OD pair.
pub fn synth_demand(
    network: &RoadNetwork,
    profile: &DemandProfile,
    slots: usize,
    seed: u64,
) -> Result<DemandSchedule, NetgenError> {
    if slots < 3 {
        return Err(NetgenError::TooFewSlots { min: 3, got: slots });
    }
    profile.validate()?;
    let od_pairs = network.od_pairs();
    if od_pairs.is_empty() {
        return Err(NetgenError::NoOdPairs);
    }
    let weights = profile.slot_weights(slots);
    let hours = f64::from(profile.slot_seconds) / 3600.0;
    let mut rng = rng::split(seed, rng::stream::DEMAND, 0);
    let mut draw = |mean: f64| -> u32 {
        if mean <= 0.0 {
            return 0;
        }
        match Poisson::new(mean) {
            Ok(p) => p.sample(&mut rng) as u32,
            // unreachable for positive finite means
            Err(_) => rng.random_range(0..=(2.0 * mean) as u32),
        }
    };
    let mut veh_trips = vec![vec![0; slots]; od_pairs.len()];
    let mut ped_trips = vec![vec![0; slots]; od_pairs.len()];
    for t in 0..slots {
        for od in 0..od_pairs.len() {
            veh_trips[od][t] = draw(profile.base_rate_veh * weights[t] * hours);
            ped_trips[od][t] = draw(profile.base_rate_ped * weights[t] * hours);
        }
    }
    Ok(DemandSchedule {
        slots,
        slot_seconds: profile.slot_seconds,
        od_pairs,
        veh_trips,
        ped_trips,
        seed,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::netgen::{build_template, TemplateKind};

    fn street() -> RoadNetwork {
        build_template(TemplateKind::StreetSection, &Default::default()).unwrap()
    }

    #[test]
    fn long_run_mean_hits_target() {
        let net = street();
        let profile = DemandProfile::default();
        let (mut veh, mut ped) = (0.0, 0.0);
        for seed in 0..100 {
            let s = synth_demand(&net, &profile, 48, seed).unwrap();
            let (v, p) = s.mean_rates();
            veh += v;
            ped += p;
        }
        veh /= 100.0;
        ped /= 100.0;
        assert!((veh / 114.0 - 1.0).abs() < 0.01, "veh {veh}");
        assert!((ped / 21.0 - 1.0).abs() < 0.01, "ped {ped}");
    }

    #[test]
    fn unit_multiplier_is_flat() {
        let profile = DemandProfile {
            peak_multiplier: 1.0,
            ..Default::default()
        };
        let w = profile.slot_weights(48);
        assert!(w.iter().all(|&x| (x - 1.0).abs() < 1e-15));
        let e0 = profile.expected_trips(48, 0);
        for t in 1..48 {
            assert_eq!(profile.expected_trips(48, t), e0);
        }
    }

    #[test]
    fn bimodal_peaks_where_configured() {
        let w = DemandProfile::default().slot_weights(48);
        let argmax = |r: std::ops::Range<usize>| {
            r.clone().max_by(|&a, &b| w[a].total_cmp(&w[b])).unwrap()
        };
        assert_eq!(argmax(0..26), 16);
        assert_eq!(argmax(26..48), 36);
        assert!(w[16] > 2.0 * w[0]);
    }

    #[test]
    fn deterministic_under_seed() {
        let net = street();
        let p = DemandProfile::default();
        assert_eq!(
            synth_demand(&net, &p, 48, 7).unwrap(),
            synth_demand(&net, &p, 48, 7).unwrap()
        );
        assert_ne!(
            synth_demand(&net, &p, 48, 7).unwrap(),
            synth_demand(&net, &p, 48, 8).unwrap()
        );
    }

    #[test]
    fn rejects_short_horizons_and_empty_od() {
        let net = street();
        assert!(synth_demand(&net, &DemandProfile::default(), 2, 0).is_err());
        let mut lonely = net.clone();
        lonely.destinations.clear();
        assert!(matches!(
            synth_demand(&lonely, &DemandProfile::default(), 48, 0),
            Err(NetgenError::NoOdPairs)
        ));
    }
}
