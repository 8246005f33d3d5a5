//! Job configuration: a TOML document parsed into a fully defaulted
//! [`JobConfig`].

use std::fmt;
use std::path::{Path, PathBuf};

use fewbody::single_particle::{CustomPotential, TrapPotential};
use fewbody::symmetry::Partition;
use serde::{Deserialize, Serialize};

use crate::JobError;

pub const TRAP_KINDS: [&str; 3] = ["harmonic", "infinite_well", "custom"];

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum Analysis {
    Spectrum,
    Sweep,
    Stats,
    Entangle,
    Comrel,
    TpsDemo,
}

impl Analysis {
    pub const ALL: [Analysis; 6] = [
        Analysis::Spectrum,
        Analysis::Sweep,
        Analysis::Stats,
        Analysis::Entangle,
        Analysis::Comrel,
        Analysis::TpsDemo,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Analysis::Spectrum => "spectrum",
            Analysis::Sweep => "sweep",
            Analysis::Stats => "stats",
            Analysis::Entangle => "entangle",
            Analysis::Comrel => "comrel",
            Analysis::TpsDemo => "tps-demo",
        }
    }

    fn parse(name: &str) -> Result<Self, JobError> {
        Self::ALL.into_iter().find(|a| a.name() == name).ok_or_else(|| {
            let names: Vec<&str> = Self::ALL.iter().map(|a| a.name()).collect();
            JobError::validation(format!(
                "unknown analysis '{name}'; expected one of: {}",
                names.join(", ")
            ))
        })
    }

    /// Whether the analysis draws random numbers and therefore needs a seed.
    fn is_stochastic(self, job: &JobConfig) -> bool {
        match self {
            Analysis::Stats => job.stats.source != StatsSource::Sector,
            Analysis::TpsDemo => job.tps.operators.is_none(),
            _ => false,
        }
    }
}

impl fmt::Display for Analysis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum TrapSpec {
    Harmonic { omega: f64 },
    InfiniteWell { length: f64 },
    Custom {
        #[serde(skip_serializing_if = "Option::is_none")]
        file: Option<PathBuf>,
        x: Vec<f64>,
        v: Vec<f64>,
    },
}

#[derive(Debug, Clone, PartialEq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Sectors {
    All,
    List(Vec<Partition>),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Profile {
    Standard,
    Strict,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Tolerances {
    pub profile: Profile,
    /// Clustering tolerance relative to the spectral span of a block.
    pub degeneracy: f64,
}

impl Tolerances {
    fn from_profile(profile: Profile, degeneracy: Option<f64>) -> Self {
        let base = match profile {
            Profile::Standard => 1e-6,
            Profile::Strict => 1e-9,
        };
        Self {
            profile,
            degeneracy: degeneracy.unwrap_or(base),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StatsSource {
    /// Eigenvalues of one symmetry sector of the configured model.
    Sector,
    /// A seeded GOE matrix.
    Goe,
    /// Seeded Poisson levels.
    Poisson,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Parity {
    Even,
    Odd,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StatsConfig {
    pub source: StatsSource,
    pub sector: Option<Partition>,
    pub parity: Option<Parity>,
    /// Matrix dimension for `goe`, level count for `poisson`.
    pub size: usize,
    pub degree: usize,
    pub edge_fraction: f64,
    pub bins: usize,
    pub s_max: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct EntangleConfig {
    pub sector: Option<Partition>,
    /// Sector eigenstates superposed with equal weights.
    pub levels: Vec<usize>,
    pub times: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct TpsConfig {
    /// Operator-set JSON; the built-in demonstration runs when absent.
    pub operators: Option<PathBuf>,
    pub factors: Vec<usize>,
}

/// A validated, fully defaulted job.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct JobConfig {
    pub trap: TrapSpec,
    pub m: f64,
    #[serde(rename = "N")]
    pub n: usize,
    #[serde(rename = "E_max")]
    pub e_max: f64,
    /// Single-particle modes; derived from `E_max` when absent.
    pub cutoff: Option<usize>,
    pub sectors: Sectors,
    pub g: Vec<f64>,
    pub analyses: Vec<Analysis>,
    pub tolerances: Tolerances,
    pub output: Option<PathBuf>,
    pub seed: Option<u64>,
    pub stats: StatsConfig,
    pub entangle: EntangleConfig,
    pub tps: TpsConfig,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    trap: RawTrap,
    #[serde(rename = "N")]
    n: usize,
    #[serde(rename = "E_max")]
    e_max: f64,
    cutoff: Option<usize>,
    sectors: Option<toml::Value>,
    g: Option<Vec<f64>>,
    sweep: Option<RawGrid>,
    analyses: Vec<String>,
    tolerances: Option<RawTolerances>,
    output: Option<PathBuf>,
    seed: Option<u64>,
    stats: Option<RawStats>,
    entangle: Option<RawEntangle>,
    tps: Option<RawTps>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTrap {
    kind: String,
    omega: Option<f64>,
    length: Option<f64>,
    m: Option<f64>,
    file: Option<PathBuf>,
    x: Option<Vec<f64>>,
    v: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawGrid {
    start: f64,
    stop: f64,
    points: usize,
    #[serde(default)]
    log: bool,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTolerances {
    profile: Option<Profile>,
    degeneracy: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawStats {
    source: Option<StatsSource>,
    sector: Option<Vec<usize>>,
    parity: Option<Parity>,
    size: Option<usize>,
    degree: Option<usize>,
    edge_fraction: Option<f64>,
    bins: Option<usize>,
    s_max: Option<f64>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawEntangle {
    sector: Option<Vec<usize>>,
    levels: Option<Vec<usize>>,
    times: Option<Vec<f64>>,
}

#[derive(Deserialize)]
#[serde(deny_unknown_fields)]
struct RawTps {
    operators: Option<PathBuf>,
    factors: Option<Vec<usize>>,
}

/// Parses a job whose relative paths resolve against the working directory.
pub fn parse_config(text: &str) -> Result<JobConfig, JobError> {
    parse_config_in(text, Path::new(""))
}

/// Parses a job whose relative paths resolve against `base`.
pub fn parse_config_in(text: &str, base: &Path) -> Result<JobConfig, JobError> {
    let raw: RawConfig =
        toml::from_str(text).map_err(|e| JobError::validation(format!("config: {}", e.message())))?;
    let resolve = |p: PathBuf| if p.is_absolute() { p } else { base.join(p) };

    let (trap, m) = parse_trap(raw.trap, &resolve)?;
    let n = raw.n;
    let sectors = match raw.sectors {
        None => Sectors::All,
        Some(v) => parse_sectors(v, n)?,
    };
    let g = match (raw.g, raw.sweep) {
        (Some(_), Some(_)) => {
            return Err(JobError::validation("give either `g` or `[sweep]`, not both"));
        }
        (Some(g), None) => g,
        (None, Some(grid)) => grid_values(&grid)?,
        (None, None) => return Err(JobError::validation("no coupling values: set `g` or `[sweep]`")),
    };
    let analyses = raw
        .analyses
        .iter()
        .map(|a| Analysis::parse(a))
        .collect::<Result<Vec<_>, _>>()?;
    let tolerances = match raw.tolerances {
        None => Tolerances::from_profile(Profile::Standard, None),
        Some(t) => Tolerances::from_profile(t.profile.unwrap_or(Profile::Standard), t.degeneracy),
    };
    let stats = raw.stats.map_or(Ok(default_stats()), |s| parse_stats(s, n))?;
    let entangle = match raw.entangle {
        None => default_entangle(),
        Some(e) => EntangleConfig {
            sector: e.sector.map(|p| sector_partition(p, n)).transpose()?,
            levels: e.levels.unwrap_or_else(|| vec![0, 1]),
            times: e.times.unwrap_or_else(default_times),
        },
    };
    let tps = match raw.tps {
        None => TpsConfig {
            operators: None,
            factors: vec![2, 2],
        },
        Some(t) => TpsConfig {
            operators: t.operators.map(resolve),
            factors: t.factors.unwrap_or_else(|| vec![2, 2]),
        },
    };

    let job = JobConfig {
        trap,
        m,
        n,
        e_max: raw.e_max,
        cutoff: raw.cutoff,
        sectors,
        g,
        analyses,
        tolerances,
        output: raw.output.map(resolve),
        seed: raw.seed,
        stats,
        entangle,
        tps,
    };
    job.validate()?;
    Ok(job)
}

/// Reads and parses a config file; relative paths resolve next to it.
pub fn load_config(path: &Path) -> Result<JobConfig, JobError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| JobError::validation(format!("cannot read config {}: {e}", path.display())))?;
    parse_config_in(&text, path.parent().unwrap_or(Path::new("")))
}

impl JobConfig {
    /// Checks the cross-field invariants.
    pub fn validate(&self) -> Result<(), JobError> {
        if self.n == 0 {
            return Err(JobError::validation("N must be >= 1"));
        }
        if !(self.e_max.is_finite()) {
            return Err(JobError::validation("E_max must be finite"));
        }
        if self.cutoff == Some(0) {
            return Err(JobError::validation("cutoff must be >= 1"));
        }
        if self.g.is_empty() {
            return Err(JobError::validation("coupling grid is empty"));
        }
        if let Some(bad) = self.g.iter().find(|g| !g.is_finite()) {
            return Err(JobError::validation(format!("coupling {bad} is not finite")));
        }
        if let Some(w) = self.g.windows(2).find(|w| !(w[1] > w[0])) {
            return Err(JobError::validation(format!(
                "coupling grid must be strictly ascending ({} then {})",
                w[0], w[1]
            )));
        }
        if self.analyses.is_empty() {
            return Err(JobError::validation("no analyses requested"));
        }
        if let Some(a) = self.analyses.iter().find(|a| a.is_stochastic(self)) {
            if self.seed.is_none() {
                return Err(JobError::validation(format!(
                    "analysis '{a}' is stochastic and needs an explicit `seed`"
                )));
            }
        }
        if self.analyses.contains(&Analysis::Stats)
            && self.stats.source == StatsSource::Sector
            && self.stats.sector.is_none()
        {
            return Err(JobError::validation(
                "spacing statistics need a single sector: set `stats.sector`",
            ));
        }
        if self.analyses.contains(&Analysis::Entangle) {
            if self.n != 2 {
                return Err(JobError::validation(format!(
                    "entanglement analysis needs N = 2, got {}",
                    self.n
                )));
            }
            if self.entangle.levels.is_empty() {
                return Err(JobError::validation("`entangle.levels` is empty"));
            }
        }
        if self.analyses.contains(&Analysis::Comrel) && self.n != 2 {
            return Err(JobError::validation(format!(
                "centre-of-mass analysis needs N = 2, got {}",
                self.n
            )));
        }
        let s = &self.stats;
        if !(s.edge_fraction >= 0.0 && s.edge_fraction < 0.5) {
            return Err(JobError::validation("`stats.edge_fraction` must lie in [0, 0.5)"));
        }
        if s.bins == 0 || !(s.s_max > 0.0) {
            return Err(JobError::validation("`stats.bins` and `stats.s_max` must be positive"));
        }
        Ok(())
    }

    /// Restricts the job to a single analysis.
    pub fn only(&self, analysis: Analysis) -> Result<Self, JobError> {
        let mut job = self.clone();
        job.analyses = vec![analysis];
        job.validate()?;
        Ok(job)
    }

    pub fn trap_potential(&self) -> Result<TrapPotential, JobError> {
        let trap = match &self.trap {
            TrapSpec::Harmonic { omega } => TrapPotential::harmonic(*omega),
            TrapSpec::InfiniteWell { length } => TrapPotential::infinite_well(*length),
            TrapSpec::Custom { x, v, .. } => TrapPotential::custom(CustomPotential::new(x.clone(), v.clone())?),
        }
        .with_mass(self.m);
        trap.validate()?;
        Ok(trap)
    }
}

fn parse_trap(
    raw: RawTrap,
    resolve: &dyn Fn(PathBuf) -> PathBuf,
) -> Result<(TrapSpec, f64), JobError> {
    let unexpected = |key: &str, present: bool| {
        if present {
            Err(JobError::validation(format!(
                "trap key `{key}` does not apply to kind '{}'",
                raw.kind
            )))
        } else {
            Ok(())
        }
    };
    let custom_keys = raw.file.is_some() || raw.x.is_some() || raw.v.is_some();
    let spec = match raw.kind.as_str() {
        "harmonic" => {
            unexpected("length", raw.length.is_some())?;
            unexpected("file/x/v", custom_keys)?;
            TrapSpec::Harmonic {
                omega: raw.omega.unwrap_or(1.0),
            }
        }
        "infinite_well" => {
            unexpected("omega", raw.omega.is_some())?;
            unexpected("file/x/v", custom_keys)?;
            TrapSpec::InfiniteWell {
                length: raw.length.unwrap_or(1.0),
            }
        }
        "custom" => {
            unexpected("omega", raw.omega.is_some())?;
            unexpected("length", raw.length.is_some())?;
            match (raw.file, raw.x, raw.v) {
                (Some(file), None, None) => {
                    let path = resolve(file);
                    let pot = CustomPotential::from_file(&path)?;
                    let (x, v) = pot.samples().unzip();
                    TrapSpec::Custom {
                        file: Some(path),
                        x,
                        v,
                    }
                }
                (None, Some(x), Some(v)) => {
                    CustomPotential::new(x.clone(), v.clone())?;
                    TrapSpec::Custom { file: None, x, v }
                }
                _ => {
                    return Err(JobError::validation(
                        "custom trap needs either `file` or both `x` and `v`",
                    ))
                }
            }
        }
        other => {
            return Err(JobError::validation(format!(
                "unknown trap kind '{other}'; expected one of: {}",
                TRAP_KINDS.join(", ")
            )))
        }
    };
    let m = raw.m.unwrap_or(1.0);
    if !(m > 0.0 && m.is_finite()) {
        return Err(JobError::validation(format!("mass must be positive, got {m}")));
    }
    Ok((spec, m))
}

fn sector_partition(parts: Vec<usize>, n: usize) -> Result<Partition, JobError> {
    let p = Partition::new(parts)?;
    p.check_degree(n)?;
    Ok(p)
}

fn parse_sectors(value: toml::Value, n: usize) -> Result<Sectors, JobError> {
    let bad = || JobError::validation("`sectors` must be \"all\" or a list of partitions such as [[2], [1, 1]]");
    match value {
        toml::Value::String(s) if s == "all" => Ok(Sectors::All),
        toml::Value::Array(items) => {
            let mut list = Vec::with_capacity(items.len());
            for item in items {
                let parts: Vec<usize> = item.try_into().map_err(|_| bad())?;
                let p = sector_partition(parts, n)?;
                if list.contains(&p) {
                    return Err(JobError::validation(format!("sector {p} listed twice")));
                }
                list.push(p);
            }
            if list.is_empty() {
                return Err(bad());
            }
            Ok(Sectors::List(list))
        }
        _ => Err(bad()),
    }
}

fn grid_values(grid: &RawGrid) -> Result<Vec<f64>, JobError> {
    if grid.points == 0 {
        return Err(JobError::validation("`sweep.points` must be >= 1"));
    }
    if grid.points == 1 {
        return Ok(vec![grid.start]);
    }
    if grid.log && !(grid.start > 0.0 && grid.stop > 0.0) {
        return Err(JobError::validation("logarithmic sweep needs positive endpoints"));
    }
    let last = (grid.points - 1) as f64;
    Ok((0..grid.points)
        .map(|k| {
            let t = k as f64 / last;
            if grid.log {
                (grid.start.ln() + t * (grid.stop.ln() - grid.start.ln())).exp()
            } else {
                grid.start + t * (grid.stop - grid.start)
            }
        })
        .collect())
}

fn default_stats() -> StatsConfig {
    StatsConfig {
        source: StatsSource::Sector,
        sector: None,
        parity: None,
        size: 500,
        degree: 7,
        edge_fraction: 0.05,
        bins: 40,
        s_max: 4.0,
    }
}

fn parse_stats(raw: RawStats, n: usize) -> Result<StatsConfig, JobError> {
    let d = default_stats();
    let source = raw.source.unwrap_or(d.source);
    let size = raw.size.unwrap_or(match source {
        StatsSource::Poisson => 10_001,
        _ => d.size,
    });
    Ok(StatsConfig {
        source,
        sector: raw.sector.map(|p| sector_partition(p, n)).transpose()?,
        parity: raw.parity,
        size,
        degree: raw.degree.unwrap_or(d.degree),
        edge_fraction: raw.edge_fraction.unwrap_or(d.edge_fraction),
        bins: raw.bins.unwrap_or(d.bins),
        s_max: raw.s_max.unwrap_or(d.s_max),
    })
}

fn default_entangle() -> EntangleConfig {
    EntangleConfig {
        sector: None,
        levels: vec![0, 1],
        times: default_times(),
    }
}

fn default_times() -> Vec<f64> {
    (0..=20).map(|k| 0.5 * k as f64).collect()
}
