//! Experiment configuration file (TOML).
//!
//! ```toml
//! [network]
//! kind = "street_section"
//!
//! [demand]
//! veh_rate = 114.0
//! ped_rate = 21.0
//!
//! [schedule]
//! slots = 48
//! seed = 1
//!
//! [training]
//! epochs = 150
//! sigma0 = 0.2
//!
//! [experiment]
//! algo = "ddpg"
//! seeds = [1]
//! ```
//!
//! Every key is optional; unknown keys are rejected.

use std::path::{Path, PathBuf};
use std::sync::Arc;

use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::agents::{Algo, Hyperparams, Scenario};
use crate::microsim::SimParams;
use crate::netgen::{build_template, synth_demand, DemandProfile, GeometryOverrides, RoadNetwork, TemplateKind};
use crate::{Error, Result};

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct NetworkSection {
    pub kind: TemplateKind,
    pub width_m: Option<f64>,
    pub length_m: Option<f64>,
    pub facility_m: Option<f64>,
    pub init_lanes: Option<u32>,
}

impl Default for NetworkSection {
    fn default() -> Self {
        NetworkSection {
            kind: TemplateKind::StreetSection,
            width_m: None,
            length_m: None,
            facility_m: None,
            init_lanes: None,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct DemandSection {
    /// Vehicle trips per hour per OD pair, day average.
    pub veh_rate: f64,
    /// Pedestrian trips per hour per OD pair, day average.
    pub ped_rate: f64,
    pub peak_multiplier: f64,
    pub peak_slots: [f64; 2],
    pub spread: f64,
}

impl Default for DemandSection {
    fn default() -> Self {
        let p = DemandProfile::default();
        DemandSection {
            veh_rate: p.base_rate_veh,
            ped_rate: p.base_rate_ped,
            peak_multiplier: p.peak_multiplier,
            peak_slots: p.peak_slots,
            spread: p.peak_spread_slots,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ScheduleSection {
    pub slots: usize,
    /// Seed of the demand draw.
    pub seed: u64,
    pub slot_seconds: u32,
    pub obs_interval_seconds: u32,
}

impl Default for ScheduleSection {
    fn default() -> Self {
        ScheduleSection {
            slots: 48,
            seed: 1,
            slot_seconds: 1800,
            obs_interval_seconds: 10,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentSection {
    pub algo: Algo,
    pub seeds: Vec<u64>,
    pub out_dir: PathBuf,
}

impl Default for ExperimentSection {
    fn default() -> Self {
        ExperimentSection {
            algo: Algo::Ddpg,
            seeds: vec![1],
            out_dir: PathBuf::from("runs"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct ExperimentConfig {
    pub network: NetworkSection,
    pub demand: DemandSection,
    pub schedule: ScheduleSection,
    pub training: Hyperparams,
    pub experiment: ExperimentSection,
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self> {
        let cfg: ExperimentConfig = toml::from_str(text).map_err(|e| Error::Config(e.to_string()))?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
        Self::parse(&text).map_err(|e| match e {
            Error::Config(m) => Error::Config(format!("{}: {m}", path.display())),
            other => other,
        })
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("config always serialises")
    }

    pub fn validate(&self) -> Result<()> {
        self.training.validate()?;
        if self.schedule.slots < 3 {
            return Err(Error::Config(format!(
                "schedule.slots must be at least 3, got {}",
                self.schedule.slots
            )));
        }
        if self.schedule.obs_interval_seconds == 0
            || !self.schedule.slot_seconds.is_multiple_of(self.schedule.obs_interval_seconds)
        {
            return Err(Error::Config(
                "schedule.slot_seconds must be a positive multiple of obs_interval_seconds".into(),
            ));
        }
        if self.experiment.seeds.is_empty() {
            return Err(Error::Config("experiment.seeds must not be empty".into()));
        }
        self.profile().validate()?;
        Ok(())
    }

    pub fn overrides(&self) -> GeometryOverrides {
        GeometryOverrides {
            width_m: self.network.width_m,
            length_m: self.network.length_m,
            facility_m: self.network.facility_m,
            init_lanes: self.network.init_lanes,
        }
    }

    pub fn profile(&self) -> DemandProfile {
        DemandProfile {
            base_rate_veh: self.demand.veh_rate,
            base_rate_ped: self.demand.ped_rate,
            peak_slots: self.demand.peak_slots,
            peak_multiplier: self.demand.peak_multiplier,
            peak_spread_slots: self.demand.spread,
            slot_seconds: self.schedule.slot_seconds,
        }
    }

    pub fn network(&self) -> Result<RoadNetwork> {
        Ok(build_template(self.network.kind, &self.overrides())?)
    }

    /// Network, demand schedule and simulator settings.
    pub fn scenario(&self) -> Result<Scenario> {
        let net = self.network()?;
        let schedule = synth_demand(&net, &self.profile(), self.schedule.slots, self.schedule.seed)?;
        Ok(Scenario {
            name: self.network.kind.to_string(),
            network: Arc::new(net),
            schedule: Arc::new(schedule),
            sim: SimParams::default(),
            obs_interval_s: self.schedule.obs_interval_seconds,
        })
    }

    /// Short SHA-256 digest of the canonical serialisation.
    pub fn hash(&self) -> String {
        let digest = Sha256::digest(self.to_toml().as_bytes());
        hex::encode(&digest[..6])
    }
}
