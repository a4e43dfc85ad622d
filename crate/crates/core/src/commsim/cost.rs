use std::fmt;

use super::{CommPlan, MachineTopology, NicLayout};
use crate::grid::{GridShape, COMPLEX_BYTES};
use crate::Result;

/// Segment size for pipelined all-reduce rounds.
pub const ALLREDUCE_SEGMENT: f64 = 256.0 * 1024.0;

const GB: f64 = 1e9;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum CollectiveKind {
    Alltoall,
    Allreduce,
}

impl fmt::Display for CollectiveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            CollectiveKind::Alltoall => "alltoall",
            CollectiveKind::Allreduce => "allreduce",
        })
    }
}

/// Total distributed state and the baseline field buffer, in bytes.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct VolumeModel {
    pub state_bytes: f64,
    pub field_bytes_base: f64,
}

impl VolumeModel {
    pub fn new(state_bytes: u64, field_bytes_base: u64) -> Self {
        Self {
            state_bytes: state_bytes as f64,
            field_bytes_base: field_bytes_base as f64,
        }
    }

    /// Full state and one field moment at 16 bytes per complex value.
    pub fn from_shape(shape: &GridShape) -> Self {
        Self {
            state_bytes: shape.state_bytes() as f64,
            field_bytes_base: (shape.config_len() as u64 * COMPLEX_BYTES) as f64,
        }
    }
}

/// Per-rank all-to-all bytes: `state / total · (n1 − 1) / n1`.
pub fn alltoall_volume(vm: &VolumeModel, plan: &CommPlan) -> f64 {
    let n1 = plan.n1() as f64;
    vm.state_bytes / plan.total_ranks() as f64 * (n1 - 1.0) / n1
}

/// Per-rank all-reduce bytes: ring traffic `2(n2 − 1)/n2` on a buffer of
/// `field_base · n2 / total`.
pub fn allreduce_volume(vm: &VolumeModel, plan: &CommPlan) -> f64 {
    let n2 = plan.n2() as f64;
    vm.field_bytes_base * n2 / plan.total_ranks() as f64 * 2.0 * (n2 - 1.0) / n2
}

/// Time of one collective over a group of `group` ranks, `local` of which
/// share the caller's node, with `ranks_per_node` ranks on each node.
pub fn group_time(
    kind: CollectiveKind,
    bytes: f64,
    group: usize,
    local: usize,
    ranks_per_node: usize,
    topo: &MachineTopology,
) -> f64 {
    if group <= 1 {
        return 0.0;
    }
    let local = local.clamp(1, group);
    let rpn = ranks_per_node.max(1) as f64;
    let per_chip = ranks_per_node.div_ceil(topo.gpus_per_node).max(1) as f64;
    let fabric = topo.intra_pair_bandwidth() * GB * topo.gpus_per_node.saturating_sub(1).max(1) as f64
        / per_chip;
    let mut network = topo.nics_per_node as f64 * topo.nic_bandwidth * GB / rpn;
    let mut penalty = 0.0;
    if topo.nic_layout == NicLayout::SharedBus {
        network /= topo.shared_bus_contention;
        penalty = topo.shared_bus_latency_penalty;
    }

    match kind {
        CollectiveKind::Alltoall => {
            let (g, a) = (group as f64, local as f64);
            let local_bytes = bytes * (a - 1.0) / (g - 1.0);
            let remote_bytes = bytes * (g - a) / (g - 1.0);
            let mut latency = (a - 1.0) * topo.intra_latency + (g - a) * topo.network_latency;
            if group > local {
                latency += penalty;
            }
            latency + (local_bytes / fabric).max(remote_bytes / network)
        }
        CollectiveKind::Allreduce => {
            let rounds = (bytes / ALLREDUCE_SEGMENT).ceil().max(1.0);
            let steps = (usize::BITS - (group - 1).leading_zeros()) as f64;
            let messages = 2.0 * steps * rounds;
            if local == group {
                messages * topo.intra_latency + bytes / fabric
            } else {
                messages * (topo.network_latency + penalty) + bytes / network
            }
        }
    }
}

/// Time of the all-to-all (dimension 1) or all-reduce (dimension 2) of
/// `plan` moving `bytes` per rank. Zero bytes still pays the latency floor.
pub fn collective_time(kind: CollectiveKind, bytes: f64, plan: &CommPlan, topo: &MachineTopology) -> f64 {
    let (group, local) = match kind {
        CollectiveKind::Alltoall => (plan.n1(), plan.dim1_per_node()),
        CollectiveKind::Allreduce => (plan.n2(), plan.dim2_per_node()),
    };
    group_time(kind, bytes, group, local, plan.ranks_per_node(), topo)
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommRow {
    pub dimension: usize,
    pub kind: CollectiveKind,
    pub group: usize,
    pub bytes: f64,
    pub seconds: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct CommReport {
    pub plan: CommPlan,
    pub topology: String,
    pub rows: Vec<CommRow>,
}

impl CommReport {
    pub fn total_seconds(&self) -> f64 {
        self.rows.iter().map(|r| r.seconds).sum()
    }

    pub fn total_bytes(&self) -> f64 {
        self.rows.iter().map(|r| r.bytes).sum()
    }

    pub fn csv_header() -> &'static str {
        "dimension,kind,group,placement,bytes,seconds"
    }

    /// Data rows followed by a `total` row.
    pub fn csv_rows(&self) -> Vec<String> {
        let mut out: Vec<String> = self
            .rows
            .iter()
            .map(|r| {
                format!(
                    "{},{},{},{},{:.1},{:.6e}",
                    r.dimension,
                    r.kind,
                    r.group,
                    self.plan.placement(),
                    r.bytes,
                    r.seconds
                )
            })
            .collect();
        out.push(format!(
            "total,all,{},{},{:.1},{:.6e}",
            self.plan.total_ranks(),
            self.plan.placement(),
            self.total_bytes(),
            self.total_seconds()
        ));
        out
    }
}

/// Per-dimension predicted seconds for one step. A collective with nothing to
/// move is not issued, so it reports zero rather than the latency floor.
pub fn predict_report(vm: &VolumeModel, topo: &MachineTopology, plan: &CommPlan) -> Result<CommReport> {
    topo.validate()?;
    plan.check(topo)?;
    let rows = [
        (1, CollectiveKind::Alltoall, plan.n1(), alltoall_volume(vm, plan)),
        (2, CollectiveKind::Allreduce, plan.n2(), allreduce_volume(vm, plan)),
    ]
    .into_iter()
    .map(|(dimension, kind, group, bytes)| CommRow {
        dimension,
        kind,
        group,
        bytes,
        seconds: if bytes > 0.0 { collective_time(kind, bytes, plan, topo) } else { 0.0 },
    })
    .collect();
    Ok(CommReport {
        plan: *plan,
        topology: topo.name.clone(),
        rows,
    })
}
