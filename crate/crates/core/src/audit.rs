//! Cutsize measures, the edge budget function ξ, adversarial labelings and
//! mistake-bound diagnostics.

use std::io::Write;

use rand::Rng;

use crate::cut::CutMode;
use crate::dsu::DisjointSets;
use crate::error::{Error, Result};
use crate::graph::{EdgeId, WeightedTree};
use crate::harness::report::fmt_sig;
use crate::label::Label;
use crate::predictor::{check_labeling, MistakeTrace};

/// Edge ids sorted by weight magnitude, lightest first, ties by id.
fn edges_by_weight(t: &WeightedTree) -> Vec<EdgeId> {
    let mut ids: Vec<EdgeId> = (0..t.edges().len()).collect();
    ids.sort_by(|&a, &b| {
        t.edges()[a]
            .magnitude()
            .total_cmp(&t.edges()[b].magnitude())
    });
    ids
}

/// Greedy lightest-first edge set whose total weight stays within `budget`.
pub fn lightest_edges(t: &WeightedTree, budget: f64) -> Result<Vec<EdgeId>> {
    if !(budget >= 0.0) {
        return Err(Error::Config(format!(
            "budget must be nonnegative, got {budget}"
        )));
    }
    let mut total = 0.0;
    let mut kept = Vec::new();
    for id in edges_by_weight(t) {
        let w = t.edges()[id].magnitude();
        if total + w > budget {
            break;
        }
        total += w;
        kept.push(id);
    }
    Ok(kept)
}

/// Largest number of edges whose weights sum to at most `budget`.
pub fn xi(t: &WeightedTree, budget: f64) -> Result<usize> {
    lightest_edges(t, budget).map(|e| e.len())
}

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct CutsizeReport {
    pub n: usize,
    /// Number of cut (or, in signed mode, frustrated) edges.
    pub phi: usize,
    /// Their total weight magnitude.
    pub phi_w: f64,
    pub xi_of_phi_w: usize,
    pub resistance_diameter: f64,
}

pub fn cutsize_report(t: &WeightedTree, labeling: &[Label]) -> Result<CutsizeReport> {
    check_labeling(labeling, t.node_count())?;
    let mode = CutMode::for_tree(t);
    let mut phi = 0;
    let mut phi_w = 0.0;
    for e in t.edges() {
        let c = mode.edge_cost(e.weight, labeling[e.u], labeling[e.v]);
        if c > 0.0 {
            phi += 1;
            phi_w += c;
        }
    }
    Ok(CutsizeReport {
        n: t.node_count(),
        phi,
        phi_w,
        xi_of_phi_w: xi(t, phi_w)?,
        resistance_diameter: t.resistance_diameter(),
    })
}

#[derive(Clone, Debug, PartialEq)]
pub struct AdversarialInstance {
    pub labeling: Vec<Label>,
    pub removed_edges: Vec<EdgeId>,
    pub budget: f64,
    /// Component of the pruned forest containing each node.
    pub component: Vec<usize>,
}

impl AdversarialInstance {
    pub fn component_count(&self) -> usize {
        self.removed_edges.len() + 1
    }
}

/// Removes the ξ(budget) lightest edges and flips an independent fair coin
/// for each remaining component.
///
/// Every node's label is independent of the labels outside its component,
/// so any predictor errs with probability 1/2 on the first node it sees
/// from each component.
pub fn adversarial_instance<R: Rng + ?Sized>(
    t: &WeightedTree,
    budget: f64,
    rng: &mut R,
) -> Result<AdversarialInstance> {
    let removed = lightest_edges(t, budget)?;
    let n = t.node_count();
    let mut cut = vec![false; t.edges().len()];
    for &id in &removed {
        cut[id] = true;
    }
    let mut dsu = DisjointSets::new(n);
    for (id, e) in t.edges().iter().enumerate() {
        if !cut[id] {
            dsu.union(e.u, e.v);
        }
    }
    let mut index = vec![usize::MAX; n];
    let mut coins: Vec<Label> = Vec::new();
    let mut component = vec![0; n];
    for v in 0..n {
        let root = dsu.find(v);
        if index[root] == usize::MAX {
            index[root] = coins.len();
            coins.push(if rng.gen::<bool>() {
                Label::Pos
            } else {
                Label::Neg
            });
        }
        component[v] = index[root];
    }
    let labeling = component.iter().map(|&c| coins[c]).collect();
    Ok(AdversarialInstance {
        labeling,
        removed_edges: removed,
        budget,
        component,
    })
}

/// Mistakes set against the lower and upper proxies derived from ξ(Φ^W).
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct BoundGap {
    pub mistakes: usize,
    /// ξ(Φ^W) / 2.
    pub lower_proxy: f64,
    /// PROXY, not the exact upper bound: ξ(Φ^W) · (1 + ln(1 + Φ^W · D)).
    pub upper_proxy: f64,
    pub mistakes_over_lower: Option<f64>,
    pub mistakes_over_upper: Option<f64>,
    /// Every edge fits in the budget Φ^W, so both proxies scale with n.
    pub saturated: bool,
}

pub fn bound_gap_report(trace: &MistakeTrace, report: &CutsizeReport) -> BoundGap {
    let xi = report.xi_of_phi_w as f64;
    let lower_proxy = xi / 2.0;
    let upper_proxy = xi * (1.0 + (1.0 + report.phi_w * report.resistance_diameter).ln());
    let ratio = |d: f64| (d > 0.0).then(|| trace.mistakes as f64 / d);
    BoundGap {
        mistakes: trace.mistakes,
        lower_proxy,
        upper_proxy,
        mistakes_over_lower: ratio(lower_proxy),
        mistakes_over_upper: ratio(upper_proxy),
        saturated: report.n > 1 && report.xi_of_phi_w == report.n - 1,
    }
}

pub const BOUND_CSV_HEADER: &str =
    "tree_id,n,phi,phi_w,xi_phi_w,mistakes,lower_proxy,upper_proxy_PROXY";

pub fn write_bound_row<W: Write>(
    mut out: W,
    tree_id: &str,
    report: &CutsizeReport,
    gap: &BoundGap,
) -> Result<()> {
    writeln!(
        out,
        "{},{},{},{},{},{},{},{}",
        tree_id,
        report.n,
        report.phi,
        fmt_sig(report.phi_w),
        report.xi_of_phi_w,
        gap.mistakes,
        fmt_sig(gap.lower_proxy),
        fmt_sig(gap.upper_proxy)
    )?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spanning::seeded_rng;
    use Label::{Neg, Pos};

    fn path(weights: &[f64]) -> WeightedTree {
        WeightedTree::from_triples(
            weights.len() + 1,
            weights.iter().enumerate().map(|(i, &w)| (i, i + 1, w)),
            false,
        )
        .unwrap()
    }

    #[test]
    fn xi_examples() {
        let t = path(&[1.0, 2.0, 3.0]);
        assert_eq!(xi(&t, 3.0).unwrap(), 2);
        assert_eq!(xi(&t, 0.0).unwrap(), 0);
        assert_eq!(xi(&t, 6.0).unwrap(), 3);
        assert_eq!(xi(&t, 100.0).unwrap(), 3);
        assert!(xi(&t, -1.0).is_err());
    }

    #[test]
    fn constant_labeling_has_no_cut() {
        let t = path(&[1.0, 2.0]);
        let r = cutsize_report(&t, &[Pos, Pos, Pos]).unwrap();
        assert_eq!((r.phi, r.phi_w, r.xi_of_phi_w), (0, 0.0, 0));
        let gap = bound_gap_report(&MistakeTrace::default(), &r);
        assert_eq!(gap.lower_proxy, 0.0);
        assert_eq!(gap.mistakes_over_lower, None);
    }

    #[test]
    fn single_phi_edge() {
        let t = path(&[1.0, 2.0]);
        let r = cutsize_report(&t, &[Pos, Pos, Neg]).unwrap();
        assert_eq!((r.phi, r.phi_w, r.xi_of_phi_w), (1, 2.0, 1));
        assert_eq!(r.resistance_diameter, 1.5);
    }

    #[test]
    fn alternating_unit_path_saturates() {
        let n = 6;
        let t = path(&vec![1.0; n - 1]);
        let labels: Vec<Label> = (0..n).map(|i| if i % 2 == 0 { Pos } else { Neg }).collect();
        let r = cutsize_report(&t, &labels).unwrap();
        assert_eq!(
            (r.phi, r.phi_w, r.xi_of_phi_w),
            (n - 1, (n - 1) as f64, n - 1)
        );
        assert!(bound_gap_report(&MistakeTrace::default(), &r).saturated);
    }

    #[test]
    fn partial_labeling_is_rejected() {
        let t = path(&[1.0, 2.0]);
        assert!(matches!(
            cutsize_report(&t, &[Pos, Pos]),
            Err(Error::PartialLabeling { .. })
        ));
    }

    #[test]
    fn signed_report_counts_frustration() {
        let t = WeightedTree::from_triples(3, [(0, 1, -2.0), (1, 2, 1.0)], true).unwrap();
        let r = cutsize_report(&t, &[Pos, Pos, Pos]).unwrap();
        assert_eq!((r.phi, r.phi_w), (1, 2.0));
    }

    #[test]
    fn adversary_on_unit_path() {
        let t = path(&[1.0, 1.0, 1.0]);
        let mut rng = seeded_rng(3);
        let inst = adversarial_instance(&t, 2.0, &mut rng).unwrap();
        assert_eq!(inst.removed_edges, vec![0, 1]);
        assert_eq!(inst.component_count(), 3);
        assert_eq!(inst.component, vec![0, 1, 2, 2]);
        assert!(cutsize_report(&t, &inst.labeling).unwrap().phi_w <= 2.0);
    }

    #[test]
    fn zero_budget_gives_constant_labeling() {
        let t = path(&[1.0, 0.5, 2.0]);
        let mut rng = seeded_rng(9);
        for _ in 0..10 {
            let inst = adversarial_instance(&t, 0.0, &mut rng).unwrap();
            assert!(inst.removed_edges.is_empty());
            assert!(inst.labeling.iter().all(|&l| l == inst.labeling[0]));
        }
    }
}
