use roadshare::agents::{run_baseline, Algo, Hyperparams, Trainer};
use roadshare::config::ExperimentConfig;
use roadshare::microsim::SlotSummary;
use roadshare::netgen::TemplateKind;
use roadshare::rowenv::RewardBreakdown;

fn config(kind: TemplateKind) -> ExperimentConfig {
    let mut cfg = ExperimentConfig::default();
    cfg.network.kind = kind;
    cfg.schedule.slots = 6;
    cfg
}

#[test]
fn every_template_conserves_trips_while_training() {
    for kind in TemplateKind::ALL {
        let cfg = config(kind);
        let scenario = cfg.scenario().unwrap();
        let edges = scenario.num_edges();
        let hp = Hyperparams {
            hidden: vec![8],
            minibatch: 4,
            ..Hyperparams::default()
        };
        for algo in [Algo::Ddpg, Algo::Maddpg] {
            let mut trainer = Trainer::new(algo, hp.clone(), scenario.clone(), 5).unwrap();
            let mut slots = 0;
            let mut obs = |s: &SlotSummary, b: &[RewardBreakdown], r: &[f64]| {
                assert!(s.conserves(), "{kind} slot {}", s.slot);
                assert_eq!((b.len(), r.len()), (edges, edges));
                for x in b {
                    assert!(x.g > 0.0 && x.g < 3.0, "{x:?}");
                }
                slots += 1;
            };
            let m = trainer.train_epoch_observed(Some(&mut obs)).unwrap();
            assert_eq!(slots, 6, "{kind} {algo}");
            assert!(m.is_finite());
            assert!(m.mean_lanes >= 1.0);
        }
    }
}

#[test]
fn baseline_is_deterministic() {
    let cfg = config(TemplateKind::TJunction);
    let a = run_baseline(&cfg.scenario().unwrap(), &cfg.training, 2).unwrap();
    let b = run_baseline(&cfg.scenario().unwrap(), &cfg.training, 2).unwrap();
    assert_eq!(a.epoch_reward.to_bits(), b.epoch_reward.to_bits());
    assert!(a.epoch_reward > 0.0 && a.epoch_reward < 3000.0);
}
