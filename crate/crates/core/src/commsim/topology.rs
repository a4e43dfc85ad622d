use std::fmt;
use std::path::Path;
use std::str::FromStr;

use crate::{Error, Result};

pub const BUILTIN_TOPOLOGIES: [&str; 2] = ["perlmutter_like", "frontier_like"];

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NicLayout {
    /// NICs hang off a shared bus; network traffic pays contention and a
    /// per-message penalty.
    SharedBus,
    /// One NIC attached directly to each GPU.
    PerGpu,
}

impl fmt::Display for NicLayout {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            NicLayout::SharedBus => "shared_bus",
            NicLayout::PerGpu => "per_gpu",
        })
    }
}

impl FromStr for NicLayout {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "shared_bus" => Ok(NicLayout::SharedBus),
            "per_gpu" => Ok(NicLayout::PerGpu),
            _ => Err(Error::Parse(format!("nic_layout `{s}` (valid: shared_bus, per_gpu)"))),
        }
    }
}

/// Node and network description. Bandwidths in GB/s (10⁹ bytes/s), times in
/// seconds.
#[derive(Debug, Clone, PartialEq)]
pub struct MachineTopology {
    pub name: String,
    /// Physical GPU chips per node.
    pub gpus_per_node: usize,
    /// Ranks sharing one physical GPU.
    pub processes_per_gpu: usize,
    /// Link bundle between each pair of GPUs: `intra_node_links × intra_link_bandwidth`.
    pub intra_node_links: usize,
    pub intra_link_bandwidth: f64,
    pub nic_layout: NicLayout,
    pub nics_per_node: usize,
    pub nic_bandwidth: f64,
    pub shared_bus_latency_penalty: f64,
    pub shared_bus_contention: f64,
    pub intra_latency: f64,
    pub network_latency: f64,
}

pub const DEFAULT_INTRA_LATENCY: f64 = 0.5e-6;
pub const DEFAULT_NETWORK_LATENCY: f64 = 2e-6;
pub const DEFAULT_SHARED_BUS_PENALTY: f64 = 2e-6;
pub const DEFAULT_SHARED_BUS_CONTENTION: f64 = 1.5;

impl MachineTopology {
    pub fn validate(&self) -> Result<()> {
        let counts = [
            ("gpus_per_node", self.gpus_per_node),
            ("processes_per_gpu", self.processes_per_gpu),
            ("intra_node_links", self.intra_node_links),
            ("nics_per_node", self.nics_per_node),
        ];
        for (k, v) in counts {
            if v == 0 {
                return Err(Error::Parameter(format!("{k} must be at least 1")));
            }
        }
        for (k, v) in [
            ("intra_link_bandwidth", self.intra_link_bandwidth),
            ("nic_bandwidth", self.nic_bandwidth),
        ] {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::Parameter(format!("{k} must be positive, got {v}")));
            }
        }
        for (k, v) in [
            ("shared_bus_latency_penalty", self.shared_bus_latency_penalty),
            ("intra_latency", self.intra_latency),
            ("network_latency", self.network_latency),
        ] {
            if !(v.is_finite() && v >= 0.0) {
                return Err(Error::Parameter(format!("{k} must be nonnegative, got {v}")));
            }
        }
        if !(self.shared_bus_contention.is_finite() && self.shared_bus_contention >= 1.0) {
            return Err(Error::Parameter(format!(
                "shared_bus_contention must be at least 1, got {}",
                self.shared_bus_contention
            )));
        }
        Ok(())
    }

    /// Bandwidth of the link bundle between two GPUs, GB/s.
    pub fn intra_pair_bandwidth(&self) -> f64 {
        self.intra_node_links as f64 * self.intra_link_bandwidth
    }

    pub fn ranks_per_node_capacity(&self) -> usize {
        self.gpus_per_node * self.processes_per_gpu
    }

    /// Parse the `key=value` text form. Blank lines and `#` comments are
    /// skipped; unset optional keys take the builtin defaults.
    pub fn parse(text: &str) -> Result<Self> {
        let mut t = MachineTopology {
            name: "custom".into(),
            gpus_per_node: 0,
            processes_per_gpu: 1,
            intra_node_links: 0,
            intra_link_bandwidth: 0.0,
            nic_layout: NicLayout::PerGpu,
            nics_per_node: 0,
            nic_bandwidth: 0.0,
            shared_bus_latency_penalty: DEFAULT_SHARED_BUS_PENALTY,
            shared_bus_contention: DEFAULT_SHARED_BUS_CONTENTION,
            intra_latency: DEFAULT_INTRA_LATENCY,
            network_latency: DEFAULT_NETWORK_LATENCY,
        };
        let mut seen = Vec::new();
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("line {}: expected key=value", lineno + 1)))?;
            let (key, value) = (key.trim(), value.trim());
            let bad = |what: &str| Error::Parse(format!("line {}: {key}: {what} `{value}`", lineno + 1));
            let count = || value.parse::<usize>().map_err(|_| bad("not a count"));
            let real = || value.parse::<f64>().map_err(|_| bad("not a number"));
            match key {
                "name" => t.name = value.to_string(),
                "gpus_per_node" => t.gpus_per_node = count()?,
                "processes_per_gpu" => t.processes_per_gpu = count()?,
                "intra_node_links" => t.intra_node_links = count()?,
                "intra_link_bandwidth" => t.intra_link_bandwidth = real()?,
                "nic_layout" => t.nic_layout = value.parse()?,
                "nics_per_node" => t.nics_per_node = count()?,
                "nic_bandwidth" => t.nic_bandwidth = real()?,
                "shared_bus_latency_penalty" => t.shared_bus_latency_penalty = real()?,
                "shared_bus_contention" => t.shared_bus_contention = real()?,
                "intra_latency" => t.intra_latency = real()?,
                "network_latency" => t.network_latency = real()?,
                _ => return Err(Error::Parse(format!("line {}: unknown key `{key}`", lineno + 1))),
            }
            if seen.contains(&key) {
                return Err(Error::Parse(format!("line {}: duplicate key `{key}`", lineno + 1)));
            }
            seen.push(key);
        }
        for required in [
            "gpus_per_node",
            "intra_node_links",
            "intra_link_bandwidth",
            "nic_layout",
            "nics_per_node",
            "nic_bandwidth",
        ] {
            if !seen.contains(&required) {
                return Err(Error::Parse(format!("missing key `{required}`")));
            }
        }
        t.validate()?;
        Ok(t)
    }

    pub fn from_file(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Inverse of [`MachineTopology::parse`].
    pub fn to_text(&self) -> String {
        format!(
            "name={}\ngpus_per_node={}\nprocesses_per_gpu={}\nintra_node_links={}\n\
             intra_link_bandwidth={}\nnic_layout={}\nnics_per_node={}\nnic_bandwidth={}\n\
             shared_bus_latency_penalty={:e}\nshared_bus_contention={}\n\
             intra_latency={:e}\nnetwork_latency={:e}\n",
            self.name,
            self.gpus_per_node,
            self.processes_per_gpu,
            self.intra_node_links,
            self.intra_link_bandwidth,
            self.nic_layout,
            self.nics_per_node,
            self.nic_bandwidth,
            self.shared_bus_latency_penalty,
            self.shared_bus_contention,
            self.intra_latency,
            self.network_latency,
        )
    }
}

pub fn builtin_topology(name: &str) -> Result<MachineTopology> {
    let base = |name: &str| MachineTopology {
        name: name.to_string(),
        gpus_per_node: 4,
        processes_per_gpu: 1,
        intra_node_links: 4,
        intra_link_bandwidth: 25.0,
        nic_layout: NicLayout::SharedBus,
        nics_per_node: 4,
        nic_bandwidth: 25.0,
        shared_bus_latency_penalty: DEFAULT_SHARED_BUS_PENALTY,
        shared_bus_contention: DEFAULT_SHARED_BUS_CONTENTION,
        intra_latency: DEFAULT_INTRA_LATENCY,
        network_latency: DEFAULT_NETWORK_LATENCY,
    };
    match name {
        "perlmutter_like" => Ok(base(name)),
        "frontier_like" => Ok(MachineTopology {
            processes_per_gpu: 2,
            intra_node_links: 2,
            intra_link_bandwidth: 50.0,
            nic_layout: NicLayout::PerGpu,
            ..base(name)
        }),
        _ => Err(Error::UnknownTopology {
            name: name.to_string(),
            valid: BUILTIN_TOPOLOGIES.join(", "),
        }),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn builtins() {
        let p = builtin_topology("perlmutter_like").unwrap();
        let f = builtin_topology("frontier_like").unwrap();
        assert_eq!(p.nic_layout, NicLayout::SharedBus);
        assert_eq!(f.nic_layout, NicLayout::PerGpu);
        assert_eq!(p.intra_pair_bandwidth(), 100.0);
        assert_eq!(f.intra_pair_bandwidth(), 100.0);
        assert_eq!(f.ranks_per_node_capacity(), 8);
        assert!(matches!(
            builtin_topology("summit_like"),
            Err(Error::UnknownTopology { .. })
        ));
    }

    #[test]
    fn text_round_trip() {
        for n in BUILTIN_TOPOLOGIES {
            let t = builtin_topology(n).unwrap();
            assert_eq!(MachineTopology::parse(&t.to_text()).unwrap(), t);
        }
    }

    #[test]
    fn parse_errors() {
        assert!(MachineTopology::parse("gpus_per_node=4").is_err());
        assert!(MachineTopology::parse("bogus=1").is_err());
        let t = builtin_topology("perlmutter_like")
            .unwrap()
            .to_text()
            .replace("shared_bus_contention=1.5", "shared_bus_contention=0.5");
        assert!(MachineTopology::parse(&t).is_err());
    }
}
