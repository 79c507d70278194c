use std::path::Path;

use dpmon::harness::scenario::{laplace_sum, Schedule};
use dpmon::harness::MonitorConfig;
use dpmon::panel::{laplace_scale_panel, panel_run, PanelConfig};
use dpmon::threshold::{cached_quantile, ThresholdRequest};

fn member_threshold() -> f64 {
    let path = Path::new(env!("CARGO_MANIFEST_DIR")).join("data/thresholds.txt");
    cached_quantile(&ThresholdRequest::with_defaults(0.0125, 0.25), &path).unwrap().0
}

#[test]
fn no_violation_keeps_familywise_alarms_near_alpha() {
    let (config, _) = laplace_scale_panel(&[-1.0, -0.5, 0.0, 0.5], 0.05, false, 50).unwrap();
    let flat = Schedule::single_change(laplace_sum(1.0), laplace_sum(1.0), 50).unwrap();
    let cfg = MonitorConfig::new(750, 100, config.per_member_alpha(), 0.25, member_threshold());
    let res = panel_run(&config, &flat, &cfg, 100, 21).unwrap();
    let far = *res.aggregate_curve.last().unwrap();
    assert!(far <= 0.05 + 0.05, "aggregate false alarm fraction {far}");
}

#[test]
fn shared_batches_dominate_members() {
    let (config, schedule) = laplace_scale_panel(&[-1.0, 0.0, 0.5], 0.05, true, 30).unwrap();
    let cfg = MonitorConfig::new(400, 60, config.per_member_alpha(), 0.25, 2.9);
    let res = panel_run(&config, &schedule, &cfg, 20, 4).unwrap();
    assert_eq!(res.members.len(), 3);
    for m in &res.members {
        assert!(res.aggregate_curve.iter().zip(&m.curve).all(|(a, b)| a >= b), "{}", m.event_label);
    }
    for (rep, agg) in res.aggregate_first_detections.iter().enumerate() {
        let earliest = res.members.iter().filter_map(|m| m.first_detections[rep]).min();
        assert_eq!(*agg, earliest);
    }
}

#[test]
fn shared_batches_need_common_inputs() {
    let (mut config, _) = laplace_scale_panel(&[0.0, 0.5], 0.05, false, 50).unwrap();
    config.members[1].x[3] = 2.0;
    assert!(PanelConfig::new(config.members.clone(), 0.05, true).is_err());
    assert!(PanelConfig::new(config.members, 0.05, false).is_ok());
}
