//! Analytic cost model for the two-dimensional communication pattern: an
//! all-to-all over `n1` ranks and an all-reduce over `n2` ranks, placed on
//! GPU nodes.
//!
//! Per-rank bandwidths, with `rpn` ranks per node and `rpc = ceil(rpn / gpus)`
//! ranks per GPU chip:
//!
//! * intra-node: `pair · max(1, gpus − 1) / rpc`, where `pair` is the link
//!   bundle between two GPUs (each chip talks to its peers over separate
//!   bundles);
//! * network: `nics · nic_bw / rpn`, divided by the contention factor on a
//!   shared bus.
//!
//! All-to-all (pairwise exchange, group `g`, `a` members on the caller's
//! node): `(a−1)·α_intra + (g−a)·α_net + π·[g > a] + max(V_loc/B_intra, V_rem/B_net)`
//! where `V_loc = V(a−1)/(g−1)`, `V_rem = V(g−a)/(g−1)` and `π` is the shared
//! bus penalty, paid once because the exchanges are issued back to back.
//!
//! All-reduce (segmented, `SEG` = 256 KiB, `r = max(1, ceil(V/SEG))` rounds,
//! `m = 2·ceil(log2 g)·r` messages): `m·α_intra + V/B_intra` when the group
//! fits on one node, otherwise `m·(α_net + π) + V/B_net`.
//!
//! Groups of one cost nothing.

mod cost;
mod planner;
mod topology;

pub use cost::{
    allreduce_volume, alltoall_volume, collective_time, group_time, predict_report, CollectiveKind,
    CommReport, CommRow, VolumeModel, ALLREDUCE_SEGMENT,
};
pub use planner::{enumerate_plans, plan_decomposition, CommPlan, Placement};
pub use topology::{builtin_topology, MachineTopology, NicLayout, BUILTIN_TOPOLOGIES};
