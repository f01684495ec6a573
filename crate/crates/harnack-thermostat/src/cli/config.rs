//! Run configuration from `key=value` files and command-line overrides.

use std::collections::BTreeMap;
use std::fmt;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use serde::Serialize;

use super::tolerances::default_tolerance;
use crate::error::{GeomError, Result};
use crate::flow::FlowFamily;

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Identities,
    Flow,
    Harnack,
    Thermostat,
    Entropy,
    All,
}

impl Suite {
    pub const NAMES: [&'static str; 6] = ["identities", "flow", "harnack", "thermostat", "entropy", "all"];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Identities => "identities",
            Suite::Flow => "flow",
            Suite::Harnack => "harnack",
            Suite::Thermostat => "thermostat",
            Suite::Entropy => "entropy",
            Suite::All => "all",
        }
    }

    /// The suites this one runs, in report order.
    pub fn members(self) -> Vec<Suite> {
        match self {
            Suite::All => vec![Suite::Identities, Suite::Flow, Suite::Harnack, Suite::Thermostat, Suite::Entropy],
            s => vec![s],
        }
    }
}

impl FromStr for Suite {
    type Err = GeomError;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "identities" => Suite::Identities,
            "flow" => Suite::Flow,
            "harnack" => Suite::Harnack,
            "thermostat" => Suite::Thermostat,
            "entropy" => Suite::Entropy,
            "all" => Suite::All,
            _ => return Err(GeomError::Config(format!("unknown suite '{s}', expected one of {}", Suite::NAMES.join("|")))),
        })
    }
}

impl fmt::Display for Suite {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct RunConfig {
    pub suite: Suite,
    /// Fiber dimensions for the thermostat checks.
    pub n_list: Vec<usize>,
    /// Doubling fiber dimensions for the Harnack limit constants.
    pub limit_n: Vec<usize>,
    pub t_grid: Vec<f64>,
    /// Time range sampled by the Ricci decay fit.
    pub decay_t: (f64, f64),
    pub tau_grid: Vec<f64>,
    /// Entropy horizon `T`, with `τ = T − t`.
    pub horizon: f64,
    /// Random points per family.
    pub samples: usize,
    pub seed: u64,
    /// Initial scale of the shrinking spheres.
    pub c0: f64,
    pub product_c1: f64,
    pub product_c2: f64,
    pub surface_intervals: usize,
    pub surface_amplitude: f64,
    /// Tolerance overrides by tolerance name.
    pub tolerances: BTreeMap<String, f64>,
    #[serde(skip)]
    pub out: PathBuf,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            suite: Suite::All,
            n_list: vec![8, 12, 16, 24],
            limit_n: vec![16, 32, 64],
            t_grid: vec![0.05, 0.1, 0.2],
            decay_t: (0.02, 0.1),
            tau_grid: (1..=8).map(|i| 0.05 * i as f64).collect(),
            horizon: 0.5,
            samples: 20,
            seed: 0,
            c0: 3.0,
            product_c1: 2.0,
            product_c2: 3.0,
            surface_intervals: 64,
            surface_amplitude: 0.3,
            tolerances: BTreeMap::new(),
            out: PathBuf::from("out"),
        }
    }
}

impl RunConfig {
    pub fn sphere(&self, n: usize) -> FlowFamily {
        FlowFamily::ConstantCurvature { n, c0: self.c0 }
    }

    pub fn product(&self) -> FlowFamily {
        FlowFamily::ProductSpheres { c1: self.product_c1, c2: self.product_c2 }
    }

    pub fn surface(&self) -> FlowFamily {
        FlowFamily::SurfaceRotsym { grid: self.surface_intervals, amplitude: self.surface_amplitude }
    }

    /// Families whose flows must exist on the whole `t` grid.
    pub fn flow_corpus(&self) -> Vec<FlowFamily> {
        vec![self.sphere(2), self.sphere(3), self.product(), self.surface()]
    }

    /// Families the entropy is evaluated on.
    pub fn entropy_corpus(&self) -> Vec<FlowFamily> {
        vec![self.sphere(2), self.sphere(3), self.product(), FlowFamily::StaticFlat { n: 2 }]
    }

    /// First extinction time over the flow corpus.
    pub fn final_time(&self) -> f64 {
        self.flow_corpus().iter().map(FlowFamily::extinction_time).fold(f64::INFINITY, f64::min)
    }

    pub fn tolerance(&self, name: &str) -> f64 {
        self.tolerances.get(name).copied().unwrap_or_else(|| default_tolerance(name).unwrap_or(f64::NAN))
    }

    fn validate(&self) -> Result<()> {
        let bad = |m: String| Err(GeomError::Config(m));
        if self.samples == 0 {
            return bad("samples must be at least 1".into());
        }
        if let Some(n) = self.n_list.iter().chain(&self.limit_n).find(|&&n| n < 2) {
            return bad(format!("fiber dimension {n} < 2"));
        }
        if !(self.c0 > 0.0 && self.product_c1 > 0.0 && self.product_c2 > 0.0) {
            return bad("sphere scales must be positive".into());
        }
        if self.surface_intervals < 8 {
            return bad("surface_intervals must be at least 8".into());
        }
        let t_end = self.final_time();
        if let Some(t) = self.t_grid.iter().find(|&&t| !(t > 0.0 && t < t_end)) {
            return bad(format!("t grid value {t} outside (0, T) with T = {t_end} the first extinction time of the corpus"));
        }
        let (lo, hi) = self.decay_t;
        if !(lo > 0.0 && lo <= hi && hi < t_end) {
            return bad(format!("decay_t range ({lo}, {hi}) outside (0, {t_end})"));
        }
        let h = self.horizon;
        if let Some(f) = self.entropy_corpus().iter().find(|f| !(h > 0.0 && h <= f.extinction_time())) {
            return bad(format!("horizon {h} outside (0, T] for {}", f.label()));
        }
        if let Some(tau) = self.tau_grid.iter().find(|&&s| !(s > 0.0 && s <= h)) {
            return bad(format!("τ grid value {tau} outside (0, {h}]"));
        }
        if self.tau_grid.windows(2).any(|w| w[1] <= w[0]) {
            return bad("τ grid must be strictly increasing".into());
        }
        Ok(())
    }
}

/// Where a setting came from, for error messages.
#[derive(Clone, Copy, Debug)]
enum Origin {
    Line(usize),
    Flag,
}

impl fmt::Display for Origin {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Origin::Line(n) => write!(f, "line {n}"),
            Origin::Flag => f.write_str("command line"),
        }
    }
}

fn number<T: FromStr>(v: &str, key: &str, at: Origin) -> Result<T> {
    v.trim().parse().map_err(|_| GeomError::Config(format!("{at}: malformed number '{}' for {key}", v.trim())))
}

fn list<T: FromStr>(v: &str, key: &str, at: Origin) -> Result<Vec<T>> {
    v.split(',').map(str::trim).filter(|s| !s.is_empty()).map(|s| number(s, key, at)).collect()
}

fn apply(cfg: &mut RunConfig, key: &str, value: &str, at: Origin) -> Result<()> {
    let v = value.trim();
    match key {
        "suite" => cfg.suite = v.parse().map_err(|e: GeomError| GeomError::Config(format!("{at}: {e}")))?,
        "N" => cfg.n_list = list(v, key, at)?,
        "limit_N" => cfg.limit_n = list(v, key, at)?,
        "t_grid" => cfg.t_grid = list(v, key, at)?,
        "decay_t" => match list::<f64>(v, key, at)?[..] {
            [lo, hi] => cfg.decay_t = (lo, hi),
            _ => return Err(GeomError::Config(format!("{at}: decay_t takes two times, lo,hi"))),
        },
        "tau_grid" => cfg.tau_grid = list(v, key, at)?,
        "horizon" => cfg.horizon = number(v, key, at)?,
        "samples" => cfg.samples = number(v, key, at)?,
        "seed" => cfg.seed = number(v, key, at)?,
        "c0" => cfg.c0 = number(v, key, at)?,
        "product_c1" => cfg.product_c1 = number(v, key, at)?,
        "product_c2" => cfg.product_c2 = number(v, key, at)?,
        "surface_intervals" => cfg.surface_intervals = number(v, key, at)?,
        "surface_amplitude" => cfg.surface_amplitude = number(v, key, at)?,
        "out" => cfg.out = PathBuf::from(v),
        _ => match key.strip_prefix("tol.") {
            Some(name) if default_tolerance(name).is_some() => {
                cfg.tolerances.insert(name.to_string(), number(v, key, at)?);
            }
            Some(name) => return Err(GeomError::Config(format!("{at}: unknown tolerance '{name}'"))),
            None => return Err(GeomError::Config(format!("{at}: unknown key '{key}'"))),
        },
    }
    Ok(())
}

/// Parses a configuration file (if any), then applies `flags` as
/// `(key, value)` pairs in file syntax. `suite` must come from one of them.
pub fn parse_config(path: Option<&Path>, flags: &[(String, String)]) -> Result<RunConfig> {
    let mut cfg = RunConfig::default();
    let mut have_suite = false;
    if let Some(path) = path {
        let text = std::fs::read_to_string(path)?;
        for (i, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let at = Origin::Line(i + 1);
            let Some((k, v)) = line.split_once('=') else {
                return Err(GeomError::Config(format!("{at}: expected key=value, got '{line}'")));
            };
            apply(&mut cfg, k.trim(), v, at)?;
            have_suite |= k.trim() == "suite";
        }
    }
    for (k, v) in flags {
        apply(&mut cfg, k, v, Origin::Flag)?;
        have_suite |= k == "suite";
    }
    if !have_suite {
        return Err(GeomError::Config("missing required key 'suite'".into()));
    }
    cfg.validate()?;
    Ok(cfg)
}

/// Splits a `--tol NAME=VALUE` argument into a `tol.NAME` setting.
pub fn tolerance_flag(arg: &str) -> Result<(String, String)> {
    let (name, value) =
        arg.split_once('=').ok_or_else(|| GeomError::Config(format!("--tol expects NAME=VALUE, got '{arg}'")))?;
    Ok((format!("tol.{}", name.trim()), value.trim().to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn write(name: &str, text: &str) -> PathBuf {
        let dir = std::env::temp_dir().join("harnack-thermostat-config-tests");
        std::fs::create_dir_all(&dir).unwrap();
        let p = dir.join(name);
        std::fs::write(&p, text).unwrap();
        p
    }

    #[test]
    fn suite_only_file_gets_defaults() {
        let p = write("suite.cfg", "# identities only\nsuite = identities\n");
        let cfg = parse_config(Some(&p), &[]).unwrap();
        assert_eq!(cfg, RunConfig { suite: Suite::Identities, ..RunConfig::default() });
        assert_eq!(cfg.seed, 0);
    }

    #[test]
    fn flags_override_file() {
        let p = write("n.cfg", "suite=thermostat\nN=8\n");
        let flags = vec![("N".to_string(), "8,12,16,24".to_string())];
        assert_eq!(parse_config(Some(&p), &flags).unwrap().n_list, vec![8, 12, 16, 24]);
    }

    #[test]
    fn rejections() {
        let msg = |text: &str| match parse_config(Some(&write("bad.cfg", text)), &[]) {
            Err(GeomError::Config(m)) => m,
            other => panic!("{other:?}"),
        };
        assert!(msg("suite=flow\nt_grid=0,0.1\n").contains("outside (0, T)"));
        assert!(msg("suite=flow\nwidth=3\n").contains("unknown key 'width'"));
        assert!(msg("suite=flow\n\nseed=1x\n").starts_with("line 3: malformed number"));
        assert!(msg("seed=1\n").contains("missing required key 'suite'"));
        assert!(msg("suite=flow\ntol.nonsense=1\n").contains("unknown tolerance"));
    }

    #[test]
    fn tolerance_override() {
        let flags = vec![("suite".into(), "all".into()), tolerance_flag("bianchi=1e-20").unwrap()];
        assert_eq!(parse_config(None, &flags).unwrap().tolerance("bianchi"), 1e-20);
    }
}
