use gyroproxy::commsim::{
    allreduce_volume, alltoall_volume, builtin_topology, collective_time, enumerate_plans, group_time,
    plan_decomposition, predict_report, CollectiveKind, CommPlan, MachineTopology, NicLayout, Placement,
    VolumeModel,
};
use gyroproxy::grid::make_case;

fn perl() -> MachineTopology {
    builtin_topology("perlmutter_like").unwrap()
}

fn front() -> MachineTopology {
    builtin_topology("frontier_like").unwrap()
}

/// Volumes from 1 MB to 10 GB, 20 per decade.
fn volumes() -> impl Iterator<Item = f64> {
    (0..=80).map(|i| 1e6 * 10f64.powf(i as f64 / 20.0))
}

#[test]
fn volume_formulas() {
    let vm = VolumeModel::new(96_000_000_000, 8_000_000);
    let p = CommPlan::new(8, 3, 6, 4).unwrap();
    assert!((alltoall_volume(&vm, &p) - 3.5e9).abs() < 1e-3);
    let q = CommPlan::new(4, 6, 6, 4).unwrap();
    assert!((allreduce_volume(&vm, &q) - 10.0e6 / 3.0).abs() < 1e-6);
    // Fixed total: the all-to-all volume approaches state / total.
    let big = CommPlan::new(24, 1, 6, 4).unwrap();
    assert!(alltoall_volume(&vm, &big) < 96e9 / 24.0);
    // All-reduce volume grows with n2 at fixed total.
    let mut last = -1.0;
    for n2 in [1, 2, 3, 4, 6, 8, 12, 24] {
        let p = CommPlan::new(24 / n2, n2, 24, 1).unwrap();
        let v = allreduce_volume(&vm, &p);
        assert!(v > last);
        last = v;
    }
}

#[test]
fn monotone_in_bytes_and_group() {
    for t in [perl(), front()] {
        for kind in [CollectiveKind::Alltoall, CollectiveKind::Allreduce] {
            for (g, a) in [(2, 1), (4, 4), (8, 4), (36, 4), (6, 1)] {
                let mut last = 0.0;
                for v in std::iter::once(0.0).chain(volumes()) {
                    let c = group_time(kind, v, g, a, 4, &t);
                    assert!(c >= last, "{kind} g={g} a={a} v={v}");
                    last = c;
                }
            }
            for a in [1, 2, 4] {
                for v in [0.0, 1e6, 1e9] {
                    let mut last = 0.0;
                    for g in (a..=64).filter(|g| g % a == 0) {
                        let c = group_time(kind, v, g, a, 4, &t);
                        assert!(c >= last, "{kind} g={g} a={a} v={v}");
                        last = c;
                    }
                }
            }
        }
    }
}

#[test]
fn layouts_agree_without_penalty_or_contention() {
    let mut shared = perl();
    shared.shared_bus_contention = 1.0;
    shared.shared_bus_latency_penalty = 0.0;
    let dedicated = MachineTopology {
        nic_layout: NicLayout::PerGpu,
        ..shared.clone()
    };
    for p in enumerate_plans(24, 6, &shared).unwrap() {
        for kind in [CollectiveKind::Alltoall, CollectiveKind::Allreduce] {
            for v in [0.0, 1e6, 1e8] {
                assert_eq!(
                    collective_time(kind, v, &p, &shared),
                    collective_time(kind, v, &p, &dedicated)
                );
            }
        }
    }
}

#[test]
fn intra_node_alltoall_parity() {
    let p = CommPlan::with_placement(4, 6, 6, Placement::Dim1IntraNode).unwrap();
    for v in volumes() {
        let a = collective_time(CollectiveKind::Alltoall, v, &p, &perl());
        let b = collective_time(CollectiveKind::Alltoall, v, &p, &front());
        assert!((a - b).abs() / a.max(b) <= 0.01);
    }
}

#[test]
fn allreduce_suffers_more_from_shared_bus() {
    // Every plan on 4 ranks per node where both groups cross the network.
    for (total, nodes) in [(24, 6), (48, 12), (288, 72)] {
        for p in enumerate_plans(total, nodes, &perl()).unwrap() {
            if p.n1() == p.dim1_per_node() || p.n2() == p.dim2_per_node() {
                continue;
            }
            for v in volumes() {
                let ratio = |k| collective_time(k, v, &p, &perl()) / collective_time(k, v, &p, &front());
                let ar = ratio(CollectiveKind::Allreduce);
                let aa = ratio(CollectiveKind::Alltoall);
                assert!(ar > aa, "{p} v={v}: allreduce {ar} alltoall {aa}");
            }
        }
    }
}

#[test]
fn shared_bus_strictly_slower_for_allreduce() {
    let p = CommPlan::new(4, 6, 6, 4).unwrap();
    for v in std::iter::once(0.0).chain(volumes()) {
        assert!(
            collective_time(CollectiveKind::Allreduce, v, &p, &perl())
                > collective_time(CollectiveKind::Allreduce, v, &p, &front())
        );
    }
}

#[test]
fn sh03b_keeps_dim1_inside_node() {
    let vm = VolumeModel::from_shape(&make_case("sh03b").unwrap());
    for t in [perl(), front()] {
        let p = plan_decomposition(&vm, 24, 6, &t).unwrap();
        assert_eq!(p.placement(), Placement::Dim1IntraNode, "{}", t.name);
        assert_eq!(p.n1() * p.n2(), 24);
    }
}

#[test]
fn em04b_spreads_dim1() {
    let vm = VolumeModel::from_shape(&make_case("em04b").unwrap());
    for t in [perl(), front()] {
        let p = plan_decomposition(&vm, 288, 72, &t).unwrap();
        assert!(matches!(p.placement(), Placement::Dim1Spread(k) if k > 1), "{}: {p}", t.name);
    }
}

#[test]
fn planner_is_exhaustive_minimum() {
    let vm = VolumeModel::from_shape(&make_case("sh03b").unwrap());
    for t in [perl(), front()] {
        for (total, nodes) in [(24, 6), (16, 4), (12, 3), (7, 7)] {
            let best = plan_decomposition(&vm, total, nodes, &t).unwrap();
            assert_eq!(best.n1() * best.n2(), total);
            let cost = |p: &CommPlan| {
                collective_time(CollectiveKind::Alltoall, alltoall_volume(&vm, p), p, &t)
                    + collective_time(CollectiveKind::Allreduce, allreduce_volume(&vm, p), p, &t)
            };
            let c = cost(&best);
            for p in enumerate_plans(total, nodes, &t).unwrap() {
                assert!(cost(&p) >= c * (1.0 - 1e-9));
            }
        }
    }
}

#[test]
fn planner_errors() {
    let vm = VolumeModel::new(1 << 30, 1 << 20);
    assert!(plan_decomposition(&vm, 25, 6, &perl()).is_err());
    assert!(plan_decomposition(&vm, 48, 6, &perl()).is_err());
    assert!(plan_decomposition(&vm, 0, 1, &perl()).is_err());
}

#[test]
fn sh03b_report_ordering() {
    let vm = VolumeModel::from_shape(&make_case("sh03b").unwrap());
    let p = CommPlan::with_placement(4, 6, 6, Placement::Dim1IntraNode).unwrap();
    let a = predict_report(&vm, &perl(), &p).unwrap();
    let b = predict_report(&vm, &front(), &p).unwrap();
    let (a1, b1) = (a.rows[0].seconds, b.rows[0].seconds);
    assert!((a1 - b1).abs() / a1.max(b1) <= 0.01);
    assert!(b.rows[1].seconds < a.rows[1].seconds);
    for r in [&a, &b] {
        assert_eq!(r.total_seconds(), r.rows.iter().map(|x| x.seconds).sum::<f64>());
    }
}

#[test]
fn zero_volume_report_is_zero() {
    let vm = VolumeModel::new(0, 0);
    for t in [perl(), front()] {
        for p in enumerate_plans(24, 6, &t).unwrap() {
            let r = predict_report(&vm, &t, &p).unwrap();
            assert!(r.rows.iter().all(|x| x.seconds == 0.0 && x.bytes == 0.0));
        }
    }
}

#[test]
fn topology_file_round_trip() {
    let dir = tempfile::tempdir().unwrap();
    let path = dir.path().join("t.topo");
    std::fs::write(&path, "# test\nname=tiny\ngpus_per_node=2\nintra_node_links=1\nintra_link_bandwidth=10\nnic_layout=shared_bus\nnics_per_node=1\nnic_bandwidth=5\n").unwrap();
    let t = MachineTopology::from_file(&path).unwrap();
    assert_eq!(t.name, "tiny");
    assert_eq!(t.nic_layout, NicLayout::SharedBus);
    assert_eq!(t.ranks_per_node_capacity(), 2);
}
