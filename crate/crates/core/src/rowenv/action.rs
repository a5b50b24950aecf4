use super::EnvError;
use crate::netgen::{EdgeId, LANE_WIDTH_M, MARKING_BUFFER_M, MIN_SIDEWALK_M};

/// Width of the narrowest carriageway: one lane plus marking buffer.
const ONE_LANE_M: f64 = LANE_WIDTH_M + MARKING_BUFFER_M;
const TOL: f64 = 1e-9;

/// One edge's decision for the next slot, from actor output to the applied
/// cross-section.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RowAction {
    pub edge: EdgeId,
    pub raw: f64,
    pub clipped: f64,
    pub lanes: u32,
    pub snapped_beta: f64,
}

/// Clamps a raw sidewalk proportion to `[1.5/w, 1 - psi - 4/w]`.
pub fn clip_action(raw: f64, w: f64, psi: f64) -> Result<f64, EnvError> {
    let lo = MIN_SIDEWALK_M / w;
    let hi = 1.0 - psi - ONE_LANE_M / w;
    if !(hi >= lo - TOL) {
        return Err(EnvError::InfeasibleEdge { width_m: w, psi });
    }
    Ok(raw.max(lo).min(hi))
}

/// Largest lane count whose lanes plus marking buffer fit the carriageway
/// left by sidewalk proportion `a`; never fewer than one.
pub fn choose_lanes(a: f64, w: f64, psi: f64) -> u32 {
    let carriageway = (1.0 - a - psi) * w;
    let fit = ((carriageway - MARKING_BUFFER_M) / LANE_WIDTH_M + TOL).floor();
    if fit < 1.0 {
        1
    } else {
        fit as u32
    }
}

/// Sidewalk proportion that gives every centimetre not needed by `lanes`
/// lanes and the marking buffer to the sidewalk.
pub fn snap_beta(lanes: u32, w: f64, psi: f64) -> Result<f64, EnvError> {
    let beta = 1.0 - psi - (LANE_WIDTH_M * f64::from(lanes) + MARKING_BUFFER_M) / w;
    if lanes < 1 || beta < MIN_SIDEWALK_M / w - TOL {
        return Err(EnvError::InfeasibleLanes { lanes, beta });
    }
    Ok(beta)
}

/// Full pipeline: clip, pick lanes, snap the sidewalk.
pub fn map_action(edge: EdgeId, raw: f64, w: f64, psi: f64) -> Result<RowAction, EnvError> {
    let clipped = clip_action(raw, w, psi)?;
    let lanes = choose_lanes(clipped, w, psi);
    let snapped_beta = snap_beta(lanes, w, psi)?;
    Ok(RowAction {
        edge,
        raw,
        clipped,
        lanes,
        snapped_beta,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;

    const W: f64 = 13.0;
    const PSI: f64 = 1.5 / 13.0;

    /// Lane count minimising the non-negative leftover width, by search.
    fn brute_lanes(a: f64, w: f64, psi: f64, max: u32) -> u32 {
        let carriageway = (1.0 - a - psi) * w;
        (1..=max)
            .filter(|&l| carriageway - (3.5 * l as f64 + 0.5) >= -1e-9)
            .min_by(|&x, &y| {
                let lx = carriageway - (3.5 * x as f64 + 0.5);
                let ly = carriageway - (3.5 * y as f64 + 0.5);
                lx.total_cmp(&ly)
            })
            .unwrap_or(1)
    }

    #[test]
    fn clip_examples() {
        assert!((clip_action(0.05, W, PSI).unwrap() - 1.5 / 13.0).abs() < 1e-15);
        assert!((clip_action(0.05, W, PSI).unwrap() - 0.11538).abs() < 1e-5);
        let hi = clip_action(0.90, W, PSI).unwrap();
        assert!((hi - 7.5 / 13.0).abs() < 1e-15);
        assert!((hi - 0.57692).abs() < 1e-5);
        assert_eq!(clip_action(0.3, W, PSI).unwrap(), 0.3);
        assert!(matches!(
            clip_action(0.3, 6.0, 2.5 / 6.0),
            Err(EnvError::InfeasibleEdge { .. })
        ));
    }

    #[test]
    fn lane_examples() {
        assert_eq!(brute_lanes(0.20, W, PSI, 6), 2);
        assert_eq!(choose_lanes(0.20, W, PSI), 2);
        let hi = clip_action(1.0, W, PSI).unwrap();
        assert_eq!(brute_lanes(hi, W, PSI, 6), 1);
        assert_eq!(choose_lanes(hi, W, PSI), 1);
        // carriageway 7.49 m
        let a = 1.0 - PSI - 7.49 / W;
        assert_eq!(choose_lanes(a, W, PSI), 1);
    }

    #[test]
    fn snap_examples() {
        let b2 = snap_beta(2, W, PSI).unwrap();
        assert!((b2 - (1.0 - 1.5 / 13.0 - 7.5 / 13.0)).abs() < 1e-15);
        assert!((b2 - 0.307692).abs() < 1e-6);
        let b1 = snap_beta(1, W, PSI).unwrap();
        assert!((b1 - 0.576923).abs() < 1e-6);
        assert!((b1 - clip_action(1.0, W, PSI).unwrap()).abs() < 1e-15);
        assert!(snap_beta(3, W, PSI).is_err());
    }

    #[test]
    fn lane_count_is_a_fixed_point() {
        for l in 1..=2 {
            let b = snap_beta(l, W, PSI).unwrap();
            assert_eq!(choose_lanes(b, W, PSI), l);
        }
        for w10 in 60..=200 {
            let w = w10 as f64 / 10.0;
            let psi = 1.0 / w;
            for l in 1..10 {
                if let Ok(b) = snap_beta(l, w, psi) {
                    assert_eq!(choose_lanes(b, w, psi), l, "w={w} l={l}");
                }
            }
        }
    }

    proptest! {
        #[test]
        fn pipeline_is_always_feasible(
            raw in -10.0f64..10.0,
            w in 7.0f64..25.0,
            facility in 0.3f64..1.5,
        ) {
            let psi = facility / w;
            let act = map_action(0, raw, w, psi).unwrap();
            prop_assert!(act.lanes >= 1);
            prop_assert!(act.snapped_beta * w >= 1.5 - 1e-9);
            let carriageway = (1.0 - act.snapped_beta - psi) * w;
            prop_assert!(carriageway >= 3.5 * act.lanes as f64 + 0.5 - 1e-9);
            prop_assert_eq!(act.lanes, brute_lanes(act.clipped, w, psi, 10));
        }
    }
}
