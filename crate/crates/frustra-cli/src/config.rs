//! Command-line flags merged over an optional TOML file.

use std::path::{Path, PathBuf};

use clap::{Args, ValueEnum};
use frustra::io::Format;
use frustra::scaling::Window;
use frustra::{Error, HoppingSign, ModelParams, Result, SeedMode};
use serde::{Deserialize, Serialize};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SignArg {
    Positive,
    Negative,
}

impl From<SignArg> for HoppingSign {
    fn from(s: SignArg) -> Self {
        match s {
            SignArg::Positive => HoppingSign::Positive,
            SignArg::Negative => HoppingSign::Negative,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum FormatArg {
    Csv,
    Json,
}

impl From<FormatArg> for Format {
    fn from(f: FormatArg) -> Self {
        match f {
            FormatArg::Csv => Format::Csv,
            FormatArg::Json => Format::Json,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum SeedModeArg {
    SymmetryOrbit,
    Exhaustive,
}

impl From<SeedModeArg> for SeedMode {
    fn from(m: SeedModeArg) -> Self {
        match m {
            SeedModeArg::SymmetryOrbit => SeedMode::SymmetryOrbit,
            SeedModeArg::Exhaustive => SeedMode::Exhaustive,
        }
    }
}

/// Keys accepted both as flags and in the config file. Every field is
/// optional so that explicit flags can override the file key by key.
#[derive(Debug, Clone, Default, PartialEq, Args, Deserialize)]
#[serde(deny_unknown_fields, rename_all = "kebab-case")]
pub struct Settings {
    /// Atomic transition frequency ω₀
    #[arg(long)]
    pub omega0: Option<f64>,
    /// Cavity frequency Ω
    #[arg(long)]
    pub omega: Option<f64>,
    /// Reduced hopping J̄ = J/Ω
    #[arg(long, allow_hyphen_values = true)]
    pub jbar: Option<f64>,
    /// Light-matter coupling g
    #[arg(long)]
    pub g: Option<f64>,
    /// Number of sites N (odd, at least 3)
    #[arg(long)]
    pub sites: Option<usize>,
    /// Hopping sign; inferred from J̄ when absent
    #[arg(long, value_enum)]
    pub sign: Option<SignArg>,
    /// Write here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,
    #[arg(long, value_enum)]
    pub format: Option<FormatArg>,
    #[arg(long, value_enum)]
    pub seed_mode: Option<SeedModeArg>,
    /// Smallest reduced coupling |g − g_c|/g_c of a sweep
    #[arg(long)]
    pub lo: Option<f64>,
    /// Largest reduced coupling of a sweep
    #[arg(long)]
    pub hi: Option<f64>,
    #[arg(long)]
    pub per_decade: Option<usize>,
    /// Emit the whole degenerate manifold
    #[arg(long, default_missing_value = "true", num_args = 0..=1)]
    pub manifold: Option<bool>,
}

impl Settings {
    pub fn from_file(path: &Path) -> Result<Self> {
        let text = std::fs::read_to_string(path).map_err(|e| Error::Io(format!("{}: {e}", path.display())))?;
        toml::from_str(&text).map_err(|e| Error::Validation(format!("{}: {e}", path.display())))
    }

    /// Keys set here win over `base`.
    pub fn over(self, base: Settings) -> Settings {
        Settings {
            omega0: self.omega0.or(base.omega0),
            omega: self.omega.or(base.omega),
            jbar: self.jbar.or(base.jbar),
            g: self.g.or(base.g),
            sites: self.sites.or(base.sites),
            sign: self.sign.or(base.sign),
            output: self.output.or(base.output),
            format: self.format.or(base.format),
            seed_mode: self.seed_mode.or(base.seed_mode),
            lo: self.lo.or(base.lo),
            hi: self.hi.or(base.hi),
            per_decade: self.per_decade.or(base.per_decade),
            manifold: self.manifold.or(base.manifold),
        }
    }
}

pub const DEFAULT_JBAR: f64 = 0.01;
pub const DEFAULT_SITES: usize = 3;
pub const DEFAULT_PER_DECADE: usize = 25;

/// Fully resolved run configuration, echoed into JSON output.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RunConfig {
    pub command: &'static str,
    pub omega0: f64,
    pub omega: f64,
    pub jbar: f64,
    pub g: Option<f64>,
    pub sites: usize,
    pub sign: SignArg,
    pub format: FormatArg,
    pub seed_mode: SeedModeArg,
    pub window: Window,
    pub per_decade: usize,
    pub manifold: bool,
    #[serde(skip)]
    pub output: Option<PathBuf>,
}

impl RunConfig {
    pub fn resolve(command: &'static str, s: Settings) -> Result<Self> {
        let jbar = s.jbar.unwrap_or(DEFAULT_JBAR);
        let sign = s.sign.unwrap_or(match HoppingSign::of(jbar) {
            HoppingSign::Positive => SignArg::Positive,
            HoppingSign::Negative => SignArg::Negative,
        });
        let default = Window::default_range();
        let window = Window::new(s.lo.unwrap_or(default.lo), s.hi.unwrap_or(default.hi))?;
        let per_decade = s.per_decade.unwrap_or(DEFAULT_PER_DECADE);
        if per_decade == 0 {
            return Err(Error::Validation("per-decade must be positive".into()));
        }
        let cfg = RunConfig {
            command,
            omega0: s.omega0.unwrap_or(1.0),
            omega: s.omega.unwrap_or(1.0),
            jbar,
            g: s.g,
            sites: s.sites.unwrap_or(DEFAULT_SITES),
            sign,
            format: s.format.unwrap_or(FormatArg::Csv),
            seed_mode: s.seed_mode.unwrap_or(SeedModeArg::SymmetryOrbit),
            window,
            per_decade,
            manifold: s.manifold.unwrap_or(false),
            output: s.output,
        };
        // catches every parameter error before any work is done
        cfg.params_at(cfg.g.unwrap_or(1.0))?;
        if !HoppingSign::from(sign).admits(jbar) {
            return Err(Error::Validation(format!("hopping sign {sign:?} does not match jbar = {jbar}")));
        }
        Ok(cfg)
    }

    pub fn params_at(&self, g: f64) -> Result<ModelParams> {
        ModelParams::new(self.omega0, self.omega, self.jbar, g, self.sites)
    }

    pub fn required_g(&self) -> Result<f64> {
        self.g.ok_or_else(|| Error::Validation(format!("{} needs --g", self.command)))
    }
}
