//! Per-epoch metrics rows and their CSV form.

use std::io::{Read, Write};

use serde::{Deserialize, Serialize};

use crate::{Error, Result};

pub const METRICS_HEADER: &str = "epoch,algo,scenario,seed,sigma0,start_slot,epoch_reward,mean_action,mean_lanes,mean_drive_speed_mps,mean_walk_speed_mps,mean_critic_loss,wall_ms";

/// One row of the metrics table. Field order is the column order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EpochMetrics {
    pub epoch: usize,
    pub algo: String,
    pub scenario: String,
    pub seed: u64,
    pub sigma0: f64,
    pub start_slot: usize,
    pub epoch_reward: f64,
    /// Mean clipped sidewalk proportion over all edge decisions.
    pub mean_action: f64,
    pub mean_lanes: f64,
    pub mean_drive_speed_mps: f64,
    pub mean_walk_speed_mps: f64,
    /// Mean pre-step critic loss over the epoch's learning steps; 0 if none.
    pub mean_critic_loss: f64,
    pub wall_ms: u64,
}

impl EpochMetrics {
    pub fn is_finite(&self) -> bool {
        [
            self.sigma0,
            self.epoch_reward,
            self.mean_action,
            self.mean_lanes,
            self.mean_drive_speed_mps,
            self.mean_walk_speed_mps,
            self.mean_critic_loss,
        ]
        .iter()
        .all(|x| x.is_finite())
    }
}

pub fn write_metrics<W: Write>(rows: &[EpochMetrics], out: W) -> Result<()> {
    let mut w = csv::WriterBuilder::new().has_headers(false).from_writer(out);
    w.write_record(METRICS_HEADER.split(','))?;
    for r in rows {
        w.serialize(r)?;
    }
    w.flush().map_err(|e| Error::io("<metrics>", e))?;
    Ok(())
}

pub fn metrics_to_bytes(rows: &[EpochMetrics]) -> Result<Vec<u8>> {
    let mut buf = Vec::new();
    write_metrics(rows, &mut buf)?;
    Ok(buf)
}

/// Reads a metrics CSV, insisting on the exact header.
pub fn read_metrics<R: Read>(input: R) -> Result<Vec<EpochMetrics>> {
    let mut r = csv::Reader::from_reader(input);
    let header: Vec<String> = r.headers()?.iter().map(str::to_string).collect();
    if header.join(",") != METRICS_HEADER {
        return Err(Error::Other(format!(
            "metrics header mismatch: got `{}`",
            header.join(",")
        )));
    }
    let rows = r.deserialize().collect::<std::result::Result<Vec<EpochMetrics>, _>>()?;
    Ok(rows)
}

/// First epoch whose reward reaches `fraction` of the final level, where
/// the final level is the mean of the last `tail` epochs.
pub fn epochs_to_fraction(rewards: &[f64], fraction: f64, tail: usize) -> Option<usize> {
    if rewards.is_empty() || tail == 0 {
        return None;
    }
    let tail = tail.min(rewards.len());
    let last = &rewards[rewards.len() - tail..];
    let level = fraction * last.iter().sum::<f64>() / tail as f64;
    rewards.iter().position(|&r| r >= level)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn row(epoch: usize) -> EpochMetrics {
        EpochMetrics {
            epoch,
            algo: "ddpg".into(),
            scenario: "street_section".into(),
            seed: 7,
            sigma0: 0.2,
            start_slot: 0,
            epoch_reward: 2500.125,
            mean_action: 0.5,
            mean_lanes: 1.25,
            mean_drive_speed_mps: 8.0,
            mean_walk_speed_mps: 1.3,
            mean_critic_loss: 0.1,
            wall_ms: 12,
        }
    }

    #[test]
    fn csv_header_and_reread() {
        let rows = vec![row(0), row(1)];
        let bytes = metrics_to_bytes(&rows).unwrap();
        let text = String::from_utf8(bytes.clone()).unwrap();
        assert!(text.starts_with(METRICS_HEADER));
        assert_eq!(text.lines().count(), 3);
        assert_eq!(read_metrics(&bytes[..]).unwrap(), rows);
        assert!(read_metrics(&b"epoch,algo\n0,ddpg\n"[..]).is_err());
    }

    #[test]
    fn convergence_epoch() {
        let r = [100.0, 500.0, 900.0, 960.0, 1000.0, 1000.0];
        // level = 0.95 * 1000
        assert_eq!(epochs_to_fraction(&r, 0.95, 2), Some(3));
        assert_eq!(epochs_to_fraction(&[5.0; 4], 0.95, 10), Some(0));
        assert_eq!(epochs_to_fraction(&[], 0.95, 10), None);
    }
}
