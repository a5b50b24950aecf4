use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::microsim::ObservationRecord;
use crate::netgen::EdgeId;

/// Scale applied to the per-slot gain; caps the reward at 3000.
pub const REWARD_AMPLIFIER: f64 = 1000.0;

/// How the speed terms enter the gain.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RewardVariant {
    /// Squared mean speed ratio; each term stays in [0, 1].
    #[default]
    Squared,
    /// Mean speed ratio multiplied by `beta * lanes`; unbounded above.
    AsPrinted,
}

impl FromStr for RewardVariant {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "squared" => Ok(RewardVariant::Squared),
            "as_printed" => Ok(RewardVariant::AsPrinted),
            other => Err(format!("unknown reward variant `{other}`")),
        }
    }
}

impl fmt::Display for RewardVariant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            RewardVariant::Squared => "squared",
            RewardVariant::AsPrinted => "as_printed",
        })
    }
}

/// Whether edges share one averaged reward or keep their own.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RewardMode {
    Centralised,
    Distributive,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RewardBreakdown {
    pub edge: EdgeId,
    pub g_veh: f64,
    pub g_ped: f64,
    pub g_act: f64,
    pub g: f64,
    pub amplified: f64,
}

/// Mean of per-agent speed ratios over every agent observation in the
/// slot. An edge nobody used counts as unimpeded.
fn mean_ratio(records: &[ObservationRecord], pick: impl Fn(&ObservationRecord) -> (u32, f64)) -> f64 {
    let (n, sum) = records.iter().fold((0u64, 0.0), |(n, s), r| {
        let (c, x) = pick(r);
        (n + u64::from(c), s + x)
    });
    if n == 0 {
        1.0
    } else {
        sum / n as f64
    }
}

/// Gain of one edge over one slot, from its observations and the
/// cross-section it ran with.
pub fn immediate_reward(
    records: &[ObservationRecord],
    beta: f64,
    lanes: u32,
    psi: f64,
    variant: RewardVariant,
) -> RewardBreakdown {
    let m_veh = mean_ratio(records, |r| (r.veh_count, r.veh_speed_ratio_sum));
    let m_ped = mean_ratio(records, |r| (r.ped_count, r.ped_speed_ratio_sum));
    let (g_veh, g_ped) = match variant {
        RewardVariant::Squared => (m_veh * m_veh, m_ped * m_ped),
        RewardVariant::AsPrinted => {
            let k = beta * f64::from(lanes);
            (m_veh * k, m_ped * k)
        }
    };
    let g_act = beta + psi;
    let g = g_veh + g_ped + g_act;
    RewardBreakdown {
        edge: records.first().map_or(0, |r| r.edge),
        g_veh,
        g_ped,
        g_act,
        g,
        amplified: REWARD_AMPLIFIER * g,
    }
}

/// Centralised: every edge receives the mean. Distributive: unchanged.
pub fn redistribute_rewards(per_edge: &[f64], mode: RewardMode) -> Vec<f64> {
    match mode {
        RewardMode::Distributive => per_edge.to_vec(),
        RewardMode::Centralised => {
            if per_edge.is_empty() {
                return Vec::new();
            }
            let mean = per_edge.iter().sum::<f64>() / per_edge.len() as f64;
            vec![mean; per_edge.len()]
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    fn rec(veh: u32, veh_sum: f64, ped: u32, ped_sum: f64) -> ObservationRecord {
        ObservationRecord {
            edge: 0,
            h: 0,
            veh_count: veh,
            ped_count: ped,
            veh_speed_ratio_sum: veh_sum,
            ped_speed_ratio_sum: ped_sum,
        }
    }

    #[test]
    fn everyone_at_top_speed() {
        let records = vec![rec(4, 4.0, 2, 2.0); 180];
        let r = immediate_reward(&records, 0.4, 2, 0.1, RewardVariant::Squared);
        assert!((r.g - 2.5).abs() < 1e-12);
        assert!((r.amplified - 2500.0).abs() < 1e-9);
    }

    #[test]
    fn empty_edge_is_unimpeded() {
        let records = vec![rec(0, 0.0, 0, 0.0); 180];
        let psi = 1.5 / 13.0;
        let beta = 0.4231 - psi;
        let r = immediate_reward(&records, beta, 1, psi, RewardVariant::Squared);
        assert!((r.g - (2.0 + 0.4231)).abs() < 1e-12);
    }

    #[test]
    fn as_printed_scales_by_beta_lanes() {
        let records = vec![rec(2, 1.0, 1, 0.5); 10];
        let r = immediate_reward(&records, 0.3, 2, 0.1, RewardVariant::AsPrinted);
        assert!((r.g_veh - 0.5 * 0.6).abs() < 1e-12);
        assert!((r.g_ped - 0.5 * 0.6).abs() < 1e-12);
    }

    #[test]
    fn redistribute_examples() {
        assert_eq!(
            redistribute_rewards(&[1000.0, 2000.0], RewardMode::Centralised),
            vec![1500.0, 1500.0]
        );
        assert_eq!(
            redistribute_rewards(&[1000.0, 2000.0], RewardMode::Distributive),
            vec![1000.0, 2000.0]
        );
        assert_eq!(
            redistribute_rewards(&[1234.5], RewardMode::Centralised),
            redistribute_rewards(&[1234.5], RewardMode::Distributive)
        );
    }

    proptest! {
        #[test]
        fn components_in_range(
            counts in proptest::collection::vec((0u32..40, 0.0f64..1.0, 0u32..40, 0.0f64..1.0), 1..50),
            beta in 0.05f64..0.6,
            psi in 0.01f64..0.3,
        ) {
            let records: Vec<_> = counts
                .iter()
                .map(|&(v, fv, p, fp)| rec(v, v as f64 * fv, p, p as f64 * fp))
                .collect();
            let r = immediate_reward(&records, beta, 1, psi, RewardVariant::Squared);
            prop_assert!((0.0..=1.0).contains(&r.g_veh));
            prop_assert!((0.0..=1.0).contains(&r.g_ped));
            prop_assert!(r.g_act > 0.0 && r.g_act < 1.0);
            prop_assert!(r.amplified > 0.0 && r.amplified < 3000.0);
        }

        #[test]
        fn redistribute_idempotent_and_sum_preserving(
            xs in proptest::collection::vec(0.0f64..3000.0, 1..20)
        ) {
            for mode in [RewardMode::Centralised, RewardMode::Distributive] {
                let once = redistribute_rewards(&xs, mode);
                let twice = redistribute_rewards(&once, mode);
                for (a, b) in once.iter().zip(&twice) {
                    prop_assert!((a - b).abs() <= 1e-9 * a.abs().max(1.0));
                }
            }
            let c = redistribute_rewards(&xs, RewardMode::Centralised);
            let (s0, s1): (f64, f64) = (xs.iter().sum(), c.iter().sum());
            prop_assert!((s0 - s1).abs() < 1e-9 * s0.max(1.0));
        }
    }
}
