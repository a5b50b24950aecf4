use super::EnvError;
use crate::microsim::ObservationRecord;
use crate::netgen::EdgeId;

/// Divisors applied to mean counts before they reach the networks.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StateNorm {
    pub veh: f64,
    pub ped: f64,
}

impl Default for StateNorm {
    fn default() -> Self {
        StateNorm {
            veh: 50.0,
            ped: 100.0,
        }
    }
}

/// Mean vehicle and pedestrian counts on one edge over a slot.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct RowState {
    pub edge: EdgeId,
    pub mean_veh_count: f64,
    pub mean_ped_count: f64,
}

impl RowState {
    pub fn normalized(&self, norm: &StateNorm) -> [f64; 2] {
        [self.mean_veh_count / norm.veh, self.mean_ped_count / norm.ped]
    }
}

pub fn aggregate_state(records: &[ObservationRecord]) -> Result<RowState, EnvError> {
    let first = records.first().ok_or(EnvError::NoRecords)?;
    let n = records.len() as f64;
    let veh: u64 = records.iter().map(|r| u64::from(r.veh_count)).sum();
    let ped: u64 = records.iter().map(|r| u64::from(r.ped_count)).sum();
    Ok(RowState {
        edge: first.edge,
        mean_veh_count: veh as f64 / n,
        mean_ped_count: ped as f64 / n,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};

    fn rec(h: usize, veh: u32, ped: u32) -> ObservationRecord {
        ObservationRecord {
            edge: 3,
            h,
            veh_count: veh,
            ped_count: ped,
            ..Default::default()
        }
    }

    #[test]
    fn constant_counts() {
        let records: Vec<_> = (0..180).map(|h| rec(h, 3, 2)).collect();
        let s = aggregate_state(&records).unwrap();
        assert_eq!((s.mean_veh_count, s.mean_ped_count), (3.0, 2.0));
        assert_eq!(s.edge, 3);
    }

    #[test]
    fn arithmetic_series() {
        let records: Vec<_> = (0..180).map(|h| rec(h, h as u32, 0)).collect();
        assert_eq!(aggregate_state(&records).unwrap().mean_veh_count, 89.5);
    }

    #[test]
    fn matches_summation_oracle() {
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(11);
        for _ in 0..50 {
            let n = rng.random_range(1..400);
            let records: Vec<_> = (0..n)
                .map(|h| rec(h, rng.random_range(0..60), rng.random_range(0..90)))
                .collect();
            let mut sv = 0.0;
            let mut sp = 0.0;
            for r in &records {
                sv += r.veh_count as f64;
                sp += r.ped_count as f64;
            }
            let s = aggregate_state(&records).unwrap();
            assert!((s.mean_veh_count - sv / n as f64).abs() < 1e-12);
            assert!((s.mean_ped_count - sp / n as f64).abs() < 1e-12);
        }
    }

    #[test]
    fn empty_is_an_error() {
        assert_eq!(aggregate_state(&[]), Err(EnvError::NoRecords));
    }
}
