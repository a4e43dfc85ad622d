use std::fmt;

use super::cost::{allreduce_volume, alltoall_volume, collective_time, CollectiveKind, VolumeModel};
use super::MachineTopology;
use crate::{Error, Result};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Placement {
    /// Every all-to-all group lives on one node.
    Dim1IntraNode,
    /// Each all-to-all group spans this many nodes.
    Dim1Spread(usize),
}

impl fmt::Display for Placement {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Placement::Dim1IntraNode => f.write_str("dim1_intra_node"),
            Placement::Dim1Spread(k) => write!(f, "dim1_spread({k})"),
        }
    }
}

/// An `n1 × n2` rank grid placed on `nodes` nodes. Ranks on a node form an
/// `a1 × a2` block: `a1` members of each all-to-all group and `a2` members of
/// each all-reduce group share the node.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct CommPlan {
    n1: usize,
    n2: usize,
    nodes: usize,
    dim1_per_node: usize,
}

impl CommPlan {
    pub fn new(n1: usize, n2: usize, nodes: usize, dim1_per_node: usize) -> Result<Self> {
        if n1 == 0 || n2 == 0 || nodes == 0 || dim1_per_node == 0 {
            return Err(Error::Decomposition("all plan counts must be positive".into()));
        }
        let total = n1
            .checked_mul(n2)
            .ok_or_else(|| Error::Decomposition("rank count overflows".into()))?;
        if total % nodes != 0 {
            return Err(Error::Decomposition(format!(
                "{total} ranks do not divide evenly over {nodes} nodes"
            )));
        }
        let rpn = total / nodes;
        let a1 = dim1_per_node;
        if n1 % a1 != 0 || rpn % a1 != 0 || n2 % (rpn / a1) != 0 {
            return Err(Error::Decomposition(format!(
                "{a1} dim1 ranks per node does not tile {n1}x{n2} with {rpn} ranks per node"
            )));
        }
        Ok(Self { n1, n2, nodes, dim1_per_node })
    }

    /// Plan with the given placement; the spread count must divide `n1`.
    pub fn with_placement(n1: usize, n2: usize, nodes: usize, placement: Placement) -> Result<Self> {
        let k = match placement {
            Placement::Dim1IntraNode => 1,
            Placement::Dim1Spread(k) => k,
        };
        if k == 0 || n1 % k != 0 {
            return Err(Error::Decomposition(format!("cannot spread {n1} ranks over {k} nodes")));
        }
        Self::new(n1, n2, nodes, n1 / k)
    }

    pub fn n1(&self) -> usize {
        self.n1
    }
    pub fn n2(&self) -> usize {
        self.n2
    }
    pub fn nodes(&self) -> usize {
        self.nodes
    }
    pub fn total_ranks(&self) -> usize {
        self.n1 * self.n2
    }
    pub fn ranks_per_node(&self) -> usize {
        self.total_ranks() / self.nodes
    }
    pub fn dim1_per_node(&self) -> usize {
        self.dim1_per_node
    }
    pub fn dim2_per_node(&self) -> usize {
        self.ranks_per_node() / self.dim1_per_node
    }

    pub fn placement(&self) -> Placement {
        match self.n1 / self.dim1_per_node {
            1 => Placement::Dim1IntraNode,
            k => Placement::Dim1Spread(k),
        }
    }

    /// Check the plan fits the node.
    pub fn check(&self, topo: &MachineTopology) -> Result<()> {
        let cap = topo.ranks_per_node_capacity();
        if self.ranks_per_node() > cap {
            return Err(Error::Decomposition(format!(
                "{} ranks per node exceed {} on {}",
                self.ranks_per_node(),
                cap,
                topo.name
            )));
        }
        Ok(())
    }
}

impl fmt::Display for CommPlan {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(
            f,
            "n1={} n2={} nodes={} placement={}",
            self.n1,
            self.n2,
            self.nodes,
            self.placement()
        )
    }
}

/// Every valid plan for `total_ranks` on `nodes` nodes, ordered by `n1` then
/// by dim1 ranks per node.
pub fn enumerate_plans(total_ranks: usize, nodes: usize, topo: &MachineTopology) -> Result<Vec<CommPlan>> {
    if total_ranks == 0 || nodes == 0 {
        return Err(Error::Decomposition("ranks and nodes must be positive".into()));
    }
    if total_ranks % nodes != 0 {
        return Err(Error::Decomposition(format!(
            "{total_ranks} ranks do not divide evenly over {nodes} nodes"
        )));
    }
    let rpn = total_ranks / nodes;
    if rpn > topo.ranks_per_node_capacity() {
        return Err(Error::Decomposition(format!(
            "{rpn} ranks per node exceed {} on {}",
            topo.ranks_per_node_capacity(),
            topo.name
        )));
    }
    let mut plans = Vec::new();
    for n1 in (1..=total_ranks).filter(|n| total_ranks % n == 0) {
        for a1 in (1..=n1.min(rpn)).filter(|a| n1 % a == 0 && rpn % a == 0) {
            if let Ok(p) = CommPlan::new(n1, total_ranks / n1, nodes, a1) {
                plans.push(p);
            }
        }
    }
    if plans.is_empty() {
        return Err(Error::Decomposition(format!(
            "no placement of {total_ranks} ranks on {nodes} nodes"
        )));
    }
    Ok(plans)
}

/// Total predicted time of one all-to-all plus one all-reduce under `plan`.
pub fn plan_cost(vm: &VolumeModel, plan: &CommPlan, topo: &MachineTopology) -> f64 {
    collective_time(CollectiveKind::Alltoall, alltoall_volume(vm, plan), plan, topo)
        + collective_time(CollectiveKind::Allreduce, allreduce_volume(vm, plan), plan, topo)
}

/// Cheapest plan by exhaustive enumeration; near-ties (relative 1e-9) go to
/// the larger `n1`.
pub fn plan_decomposition(
    vm: &VolumeModel,
    total_ranks: usize,
    nodes: usize,
    topo: &MachineTopology,
) -> Result<CommPlan> {
    topo.validate()?;
    let mut best: Option<(f64, CommPlan)> = None;
    for p in enumerate_plans(total_ranks, nodes, topo)? {
        let c = plan_cost(vm, &p, topo);
        best = match best {
            None => Some((c, p)),
            Some((bc, bp)) => {
                let tie = (c - bc).abs() <= 1e-9 * bc.abs().max(f64::MIN_POSITIVE);
                if (tie && p.n1 > bp.n1) || (!tie && c < bc) {
                    Some((c, p))
                } else {
                    Some((bc, bp))
                }
            }
        };
    }
    Ok(best.expect("enumerate_plans never returns empty").1)
}

#[cfg(test)]
mod tests {
    use super::super::builtin_topology;
    use super::*;

    #[test]
    fn placement_names() {
        let p = CommPlan::new(8, 3, 6, 4).unwrap();
        assert_eq!(p.placement(), Placement::Dim1Spread(2));
        assert_eq!(p.dim2_per_node(), 1);
        assert_eq!(p.to_string(), "n1=8 n2=3 nodes=6 placement=dim1_spread(2)");
        let q = CommPlan::with_placement(4, 6, 6, Placement::Dim1IntraNode).unwrap();
        assert_eq!(q.dim1_per_node(), 4);
    }

    #[test]
    fn invalid_tilings() {
        assert!(CommPlan::new(3, 8, 6, 2).is_err());
        assert!(CommPlan::new(4, 6, 5, 4).is_err());
        let t = builtin_topology("perlmutter_like").unwrap();
        assert!(enumerate_plans(48, 6, &t).is_err());
    }

    #[test]
    fn prime_total_has_two_splits() {
        let t = builtin_topology("frontier_like").unwrap();
        let plans = enumerate_plans(7, 1, &t).unwrap();
        let splits: Vec<_> = plans.iter().map(|p| (p.n1(), p.n2())).collect();
        assert_eq!(splits, vec![(1, 7), (7, 1)]);
        let vm = VolumeModel::new(1 << 30, 1 << 20);
        let best = plan_decomposition(&vm, 7, 1, &t).unwrap();
        let cheaper = plans
            .iter()
            .min_by(|a, b| plan_cost(&vm, a, &t).total_cmp(&plan_cost(&vm, b, &t)))
            .unwrap();
        assert_eq!(plan_cost(&vm, &best, &t), plan_cost(&vm, cheaper, &t));
    }
}
