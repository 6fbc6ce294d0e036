use rand::seq::SliceRandom;

use shazoo::audit::{bound_gap_report, cutsize_report};
use shazoo::harness::synth_planted_tree;
use shazoo::spanning::seeded_rng;
use shazoo::{run_online, NodeId};

/// Frozen multiplier on `xi(phi_w) * (1 + ln(1 + phi_w * D))`.
const C: f64 = 2.0;

#[test]
fn online_mistakes_stay_under_the_frozen_bound() {
    for n in [60, 300] {
        for k in 2..=8 {
            for scale in [0.02, 0.2, 1.0] {
                for seed in 0..6u64 {
                    let mut rng = seeded_rng(0x5eed_0000 + seed * 97 + (n * k) as u64);
                    let p = synth_planted_tree(n, k, scale * (k - 1) as f64, &mut rng).unwrap();
                    let report = cutsize_report(&p.tree, &p.labeling).unwrap();
                    assert!(report.xi_of_phi_w >= 1);
                    let mut order: Vec<NodeId> = (0..n).collect();
                    order.shuffle(&mut rng);
                    let trace = run_online(&p.tree, &p.labeling, &order).unwrap();
                    let gap = bound_gap_report(&trace, &report);
                    assert!(
                        gap.mistakes as f64 <= C * gap.upper_proxy,
                        "n={n} k={k} scale={scale} seed={seed}: {} mistakes, proxy {}",
                        gap.mistakes,
                        gap.upper_proxy
                    );
                }
            }
        }
    }
}
