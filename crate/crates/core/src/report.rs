//! Kernel timing reports: CSV with one `#` metadata line, parsing, atomic
//! writes and before/after speedup tables.

use std::collections::BTreeMap;
use std::fmt::Write as _;
use std::io::Write as _;
use std::path::Path;
use std::time::{SystemTime, UNIX_EPOCH};

use crate::kernels::{KernelId, KernelTiming, KernelVariant};
use crate::{Error, Result};

pub const KERNEL_HEADER: &str = "case,kernel,variant,reps,median_s,min_s,checksum";

/// Contents of the `#` line at the top of every output file.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Metadata {
    pub version: String,
    pub seed: Option<u64>,
    pub timestamp: u64,
    pub host: String,
}

impl Metadata {
    pub fn capture(seed: Option<u64>) -> Self {
        Self {
            version: env!("CARGO_PKG_VERSION").to_string(),
            seed,
            timestamp: SystemTime::now()
                .duration_since(UNIX_EPOCH)
                .map(|d| d.as_secs())
                .unwrap_or(0),
            host: host_description(),
        }
    }

    pub fn line(&self) -> String {
        let seed = self.seed.map_or_else(|| "-".to_string(), |s| s.to_string());
        format!(
            "# gyroproxy version={} seed={} timestamp={} host={}",
            self.version, seed, self.timestamp, self.host
        )
    }

    pub fn parse(line: &str) -> Result<Self> {
        let body = line
            .strip_prefix("# gyroproxy")
            .ok_or_else(|| Error::Parse(format!("not a metadata line: `{line}`")))?;
        let mut m = Metadata {
            version: String::new(),
            seed: None,
            timestamp: 0,
            host: String::new(),
        };
        for field in body.split_whitespace() {
            let (k, v) = field
                .split_once('=')
                .ok_or_else(|| Error::Parse(format!("metadata field `{field}`")))?;
            match k {
                "version" => m.version = v.to_string(),
                "seed" if v == "-" => m.seed = None,
                "seed" => m.seed = Some(v.parse().map_err(|_| Error::Parse(format!("seed `{v}`")))?),
                "timestamp" => {
                    m.timestamp = v.parse().map_err(|_| Error::Parse(format!("timestamp `{v}`")))?
                }
                "host" => m.host = v.to_string(),
                _ => {}
            }
        }
        Ok(m)
    }
}

/// `os-arch-Nthreads-hostname`, with no whitespace.
pub fn host_description() -> String {
    let threads = std::thread::available_parallelism().map_or(1, |n| n.get());
    let name = std::fs::read_to_string("/proc/sys/kernel/hostname")
        .ok()
        .or_else(|| std::env::var("HOSTNAME").ok())
        .or_else(|| std::env::var("COMPUTERNAME").ok())
        .map(|s| s.trim().to_string())
        .filter(|s| !s.is_empty())
        .unwrap_or_else(|| "unknown".into());
    let pool = rayon::current_num_threads();
    format!(
        "{}-{}-{}cpus-{}threads-{}",
        std::env::consts::OS,
        std::env::consts::ARCH,
        threads,
        pool,
        name
    )
    .replace(char::is_whitespace, "_")
}

/// Write `contents` to `path` through a temporary file in the same directory,
/// so readers never see a partial file.
pub fn write_atomic(path: &Path, contents: &str) -> Result<()> {
    let dir = match path.parent() {
        Some(p) if !p.as_os_str().is_empty() => p,
        _ => Path::new("."),
    };
    let mut tmp = tempfile::NamedTempFile::new_in(dir)?;
    tmp.write_all(contents.as_bytes())?;
    tmp.as_file().sync_all()?;
    tmp.persist(path).map_err(|e| Error::Io(e.error))?;
    Ok(())
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelRow {
    pub case: String,
    pub kernel: KernelId,
    pub variant: KernelVariant,
    pub reps: usize,
    pub median_s: f64,
    pub min_s: f64,
    pub checksum: String,
}

impl KernelRow {
    pub fn from_timing(case: &str, t: &KernelTiming) -> Self {
        Self {
            case: case.to_string(),
            kernel: t.kernel,
            variant: t.variant,
            reps: t.reps,
            median_s: t.median_s,
            min_s: t.min_s,
            checksum: t.checksum.clone(),
        }
    }

    pub fn csv(&self) -> String {
        format!(
            "{},{},{},{},{:.6e},{:.6e},{}",
            self.case, self.kernel, self.variant, self.reps, self.median_s, self.min_s, self.checksum
        )
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct KernelReport {
    pub metadata: Metadata,
    pub rows: Vec<KernelRow>,
}

impl KernelReport {
    pub fn to_csv(&self) -> String {
        let mut s = format!("{}\n{KERNEL_HEADER}\n", self.metadata.line());
        for r in &self.rows {
            s.push_str(&r.csv());
            s.push('\n');
        }
        s
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut metadata = None;
        let mut header_seen = false;
        let mut rows = Vec::new();
        for (i, line) in text.lines().enumerate() {
            let line = line.trim_end_matches('\r');
            if line.trim().is_empty() {
                continue;
            }
            if line.starts_with('#') {
                if metadata.is_none() {
                    metadata = Some(Metadata::parse(line)?);
                }
                continue;
            }
            if !header_seen {
                if line != KERNEL_HEADER {
                    return Err(Error::Parse(format!("expected header `{KERNEL_HEADER}`, got `{line}`")));
                }
                header_seen = true;
                continue;
            }
            let f: Vec<&str> = line.split(',').collect();
            if f.len() != 7 {
                return Err(Error::Parse(format!("line {}: expected 7 fields, got {}", i + 1, f.len())));
            }
            let num = |s: &str| {
                s.parse::<f64>()
                    .map_err(|_| Error::Parse(format!("line {}: bad number `{s}`", i + 1)))
            };
            rows.push(KernelRow {
                case: f[0].to_string(),
                kernel: f[1].parse()?,
                variant: f[2].parse()?,
                reps: f[3]
                    .parse()
                    .map_err(|_| Error::Parse(format!("line {}: bad reps `{}`", i + 1, f[3])))?,
                median_s: num(f[4])?,
                min_s: num(f[5])?,
                checksum: f[6].to_string(),
            });
        }
        if !header_seen {
            return Err(Error::Parse("report has no header".into()));
        }
        Ok(Self {
            metadata: metadata.ok_or_else(|| Error::Parse("report has no metadata line".into()))?,
            rows,
        })
    }

    pub fn read(path: &Path) -> Result<Self> {
        Self::parse(&std::fs::read_to_string(path)?)
    }

    /// Rows of one variant, keeping the metadata.
    pub fn only(&self, variant: KernelVariant) -> Self {
        Self {
            metadata: self.metadata.clone(),
            rows: self.rows.iter().filter(|r| r.variant == variant).cloned().collect(),
        }
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from(
            "| case | kernel | variant | reps | median (s) | min (s) | checksum |\n\
             |------|--------|---------|-----:|-----------:|--------:|----------|\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {} | {} | {:.4e} | {:.4e} | `{}` |",
                r.case, r.kernel, r.variant, r.reps, r.median_s, r.min_s, r.checksum
            );
        }
        s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct Speedup {
    pub case: String,
    pub kernel: KernelId,
    pub before_s: f64,
    pub after_s: f64,
}

impl Speedup {
    pub fn ratio(&self) -> f64 {
        self.before_s / self.after_s
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct SpeedupTable {
    pub rows: Vec<Speedup>,
}

impl SpeedupTable {
    /// Sum of before medians over sum of after medians.
    pub fn overall(&self) -> f64 {
        let b: f64 = self.rows.iter().map(|r| r.before_s).sum();
        let a: f64 = self.rows.iter().map(|r| r.after_s).sum();
        b / a
    }

    pub fn to_csv(&self) -> String {
        let mut s = String::from("case,kernel,before_median_s,after_median_s,ratio\n");
        for r in &self.rows {
            let _ = writeln!(
                s,
                "{},{},{:.6e},{:.6e},{:.4}",
                r.case, r.kernel, r.before_s, r.after_s, r.ratio()
            );
        }
        let _ = writeln!(s, "overall,all,,,{:.4}", self.overall());
        s
    }

    pub fn to_markdown(&self) -> String {
        let mut s = String::from(
            "| case | kernel | before (s) | after (s) | ratio |\n\
             |------|--------|-----------:|----------:|------:|\n",
        );
        for r in &self.rows {
            let _ = writeln!(
                s,
                "| {} | {} | {:.4e} | {:.4e} | {:.3} |",
                r.case, r.kernel, r.before_s, r.after_s, r.ratio()
            );
        }
        let _ = writeln!(s, "| **overall** | | | | {:.3} |", self.overall());
        s
    }
}

fn by_key(report: &KernelReport, side: &str) -> Result<BTreeMap<(String, KernelId), f64>> {
    let mut m = BTreeMap::new();
    for r in &report.rows {
        if m.insert((r.case.clone(), r.kernel), r.median_s).is_some() {
            return Err(Error::Coverage(format!(
                "{side} report has more than one row for {}/{}",
                r.case, r.kernel
            )));
        }
    }
    Ok(m)
}

/// Per-(case, kernel) ratio `before / after` of median times. Both reports
/// must cover the same set of (case, kernel) pairs.
pub fn summarize(before: &KernelReport, after: &KernelReport) -> Result<SpeedupTable> {
    let b = by_key(before, "before")?;
    let a = by_key(after, "after")?;
    let missing = |from: &BTreeMap<(String, KernelId), f64>, to: &BTreeMap<(String, KernelId), f64>| {
        from.keys()
            .filter(|k| !to.contains_key(*k))
            .map(|(c, k)| format!("{c}/{k}"))
            .collect::<Vec<_>>()
    };
    let only_before = missing(&b, &a);
    let only_after = missing(&a, &b);
    if !only_before.is_empty() || !only_after.is_empty() {
        let mut msg = Vec::new();
        if !only_before.is_empty() {
            msg.push(format!("missing from after: {}", only_before.join(", ")));
        }
        if !only_after.is_empty() {
            msg.push(format!("missing from before: {}", only_after.join(", ")));
        }
        return Err(Error::Coverage(msg.join("; ")));
    }
    if b.is_empty() {
        return Err(Error::Coverage("reports have no rows".into()));
    }
    let rows = b
        .into_iter()
        .map(|((case, kernel), before_s)| {
            let after_s = a[&(case.clone(), kernel)];
            Speedup { case, kernel, before_s, after_s }
        })
        .collect();
    Ok(SpeedupTable { rows })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn sample() -> KernelReport {
        let row = |kernel, variant, m| KernelRow {
            case: "sh03b-desk".into(),
            kernel,
            variant,
            reps: 9,
            median_s: m,
            min_s: m * 0.9,
            checksum: "0123456789abcdef".into(),
        };
        KernelReport {
            metadata: Metadata::capture(Some(7)),
            rows: vec![
                row(KernelId::Stream, KernelVariant::Original, 2.0e-3),
                row(KernelId::Stream, KernelVariant::Optimized, 1.0e-3),
                row(KernelId::Shear, KernelVariant::Original, 3.0e-3),
                row(KernelId::Shear, KernelVariant::Optimized, 3.0e-3),
            ],
        }
    }

    #[test]
    fn csv_round_trip() {
        let r = sample();
        let back = KernelReport::parse(&r.to_csv()).unwrap();
        assert_eq!(back.to_csv(), r.to_csv());
        assert_eq!(back.metadata.seed, Some(7));
    }

    #[test]
    fn identical_reports_ratio_one() {
        let r = sample().only(KernelVariant::Original);
        let t = summarize(&r, &r).unwrap();
        assert!(t.rows.iter().all(|s| s.ratio() == 1.0));
        assert_eq!(t.overall(), 1.0);
    }

    #[test]
    fn ratios_and_overall() {
        let r = sample();
        let t = summarize(&r.only(KernelVariant::Original), &r.only(KernelVariant::Optimized)).unwrap();
        let stream = t.rows.iter().find(|s| s.kernel == KernelId::Stream).unwrap();
        assert_eq!(stream.ratio(), 2.0);
        assert!((t.overall() - 5.0 / 4.0).abs() < 1e-15);
    }

    #[test]
    fn coverage_error_names_rows() {
        let r = sample();
        let mut after = r.only(KernelVariant::Optimized);
        after.rows.retain(|x| x.kernel != KernelId::Shear);
        match summarize(&r.only(KernelVariant::Original), &after) {
            Err(Error::Coverage(msg)) => assert!(msg.contains("sh03b-desk/shear"), "{msg}"),
            other => panic!("{other:?}"),
        }
    }

    #[test]
    fn metadata_line_has_no_spaces_in_values() {
        let m = Metadata::capture(None);
        assert_eq!(Metadata::parse(&m.line()).unwrap(), m);
    }
}
