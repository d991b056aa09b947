//! Run configuration: one JSON document, overridden field by field by flags.

use std::fmt;
use std::fs;
use std::path::{Path, PathBuf};

use bifrac::harness::example_profiles;
use bifrac::{
    make_profile, CorpusKind, Cube, ExponentProfile, GridFunction, GridSpec, RawExponents,
    TheoremTag,
};
use serde::Deserialize;

#[derive(Debug)]
pub enum CliError {
    ConfigInvalid(String),
    InputUnreadable(String),
    Core(bifrac::Error),
}

impl CliError {
    pub fn name(&self) -> &'static str {
        match self {
            CliError::ConfigInvalid(_) => "ConfigInvalid",
            CliError::InputUnreadable(_) => "InputUnreadable",
            CliError::Core(e) => e.name(),
        }
    }
}

impl fmt::Display for CliError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            CliError::ConfigInvalid(m) | CliError::InputUnreadable(m) => f.write_str(m),
            CliError::Core(e) => write!(f, "{e}"),
        }
    }
}

impl From<bifrac::Error> for CliError {
    fn from(e: bifrac::Error) -> Self {
        CliError::Core(e)
    }
}

pub type CliResult<T> = Result<T, CliError>;

pub fn invalid(msg: impl Into<String>) -> CliError {
    CliError::ConfigInvalid(msg.into())
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    #[default]
    Csv,
    Json,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct GridConfig {
    pub n: Option<usize>,
    pub half_width: Option<f64>,
    pub cells: Option<usize>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Inputs {
    pub f: Option<PathBuf>,
    pub g: Option<PathBuf>,
    pub w1: Option<PathBuf>,
    pub w2: Option<PathBuf>,
    pub v: Option<PathBuf>,
}

/// Lower corner and side of a cube.
#[derive(Debug, Clone, PartialEq, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CubeConfig {
    pub corner: Vec<f64>,
    pub side: f64,
}

impl CubeConfig {
    /// `x[,y]:side`.
    pub fn parse(text: &str) -> CliResult<Self> {
        let (corner, side) = text
            .split_once(':')
            .ok_or_else(|| invalid(format!("cube `{text}`: expected x[,y]:side")))?;
        let corner = corner
            .split(',')
            .map(|t| {
                t.trim()
                    .parse::<f64>()
                    .map_err(|e| invalid(format!("cube `{text}`: {e}")))
            })
            .collect::<CliResult<Vec<_>>>()?;
        let side = side
            .trim()
            .parse::<f64>()
            .map_err(|e| invalid(format!("cube `{text}`: {e}")))?;
        Ok(Self { corner, side })
    }

    pub fn cube(&self) -> CliResult<Cube> {
        Ok(Cube::new(&self.corner, self.side)?)
    }
}

/// Exponents used by `apply`, `constants`, `norms` and `decompose`.
#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct Exponents {
    pub alpha: Option<f64>,
    pub r: Option<f64>,
    pub p: Option<f64>,
    pub q: Option<f64>,
    pub p0: Option<f64>,
    pub p1: Option<f64>,
    pub p2: Option<f64>,
    pub q0: Option<f64>,
    pub r0: Option<f64>,
    pub r1: Option<f64>,
    pub r2: Option<f64>,
    pub epsilon: Option<f64>,
    pub base: Option<f64>,
}

/// A profile given inline, by example number, or as a file holding either.
#[derive(Debug, Clone, Deserialize)]
#[serde(untagged)]
#[allow(clippy::large_enum_variant)]
pub enum ProfileRef {
    File(PathBuf),
    Inline(ProfileSpec),
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ProfileSpec {
    pub tag: TheoremTag,
    #[serde(default)]
    pub example: Option<usize>,
    #[serde(default)]
    pub exponents: Option<RawExponents>,
}

impl ProfileSpec {
    pub fn resolve(&self) -> CliResult<ExponentProfile> {
        match (self.example, &self.exponents) {
            (Some(_), Some(_)) => Err(invalid(
                "profile: give either `example` or `exponents`, not both",
            )),
            (None, Some(raw)) => Ok(make_profile(self.tag, raw)?),
            (k, None) => {
                let all = example_profiles(self.tag);
                let k = k.unwrap_or(0);
                all.get(k).copied().ok_or_else(|| {
                    invalid(format!(
                        "profile {}: example {k} does not exist (have {})",
                        self.tag,
                        all.len()
                    ))
                })
            }
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct SweepConfig {
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct RunConfig {
    pub grid: GridConfig,
    pub seed: Option<u64>,
    pub cube_cap: Option<usize>,
    pub inputs: Inputs,
    pub profile: Option<ProfileRef>,
    pub corpus: Option<Vec<CorpusKind>>,
    pub calibration: Option<usize>,
    pub evaluation: Option<usize>,
    pub margin: Option<f64>,
    pub root: Option<CubeConfig>,
    pub operator: Option<String>,
    pub exponents: Exponents,
    pub constants: Option<Vec<String>>,
    pub sweep: SweepConfig,
    pub output: Option<PathBuf>,
    pub summary: Option<PathBuf>,
    pub format: Option<Format>,
    /// Directory that relative paths are resolved against.
    #[serde(skip)]
    pub base_dir: PathBuf,
}

pub const DEFAULT_SEED: u64 = 7;

impl RunConfig {
    pub fn load(path: Option<&Path>) -> CliResult<Self> {
        let Some(path) = path else {
            return Ok(Self {
                base_dir: PathBuf::from("."),
                ..Self::default()
            });
        };
        let text = fs::read_to_string(path)
            .map_err(|e| CliError::InputUnreadable(format!("{}: {e}", path.display())))?;
        let mut cfg: RunConfig =
            serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))?;
        cfg.base_dir = path
            .parent()
            .map(Path::to_path_buf)
            .unwrap_or_else(|| PathBuf::from("."));
        Ok(cfg)
    }

    fn resolve_path(&self, p: &Path) -> PathBuf {
        if p.is_absolute() {
            p.to_path_buf()
        } else {
            self.base_dir.join(p)
        }
    }

    pub fn seed(&self) -> u64 {
        self.seed.unwrap_or(DEFAULT_SEED)
    }

    pub fn cube_cap(&self) -> usize {
        self.cube_cap.unwrap_or(bifrac::DEFAULT_CUBE_CAP)
    }

    pub fn format(&self) -> Format {
        self.format.unwrap_or_default()
    }

    /// Grid for generated corpora; defaults to `n = 1`, `[-2, 2)`, 64 cells.
    pub fn grid(&self) -> CliResult<GridSpec> {
        let n = self.grid.n.unwrap_or(1);
        let l = self.grid.half_width.unwrap_or(2.0);
        let cells = self.grid.cells.unwrap_or(64);
        if !cells.is_power_of_two() {
            return Err(invalid(format!("grid: N = {cells} is not a power of two")));
        }
        GridSpec::new(n, l, cells).map_err(|e| invalid(format!("grid: {e}")))
    }

    pub fn profile(&self) -> CliResult<ExponentProfile> {
        match &self.profile {
            None => Err(invalid("no profile given")),
            Some(ProfileRef::Inline(spec)) => spec.resolve(),
            Some(ProfileRef::File(path)) => {
                let path = self.resolve_path(path);
                let text = fs::read_to_string(&path)
                    .map_err(|e| CliError::InputUnreadable(format!("{}: {e}", path.display())))?;
                let spec: ProfileSpec = serde_json::from_str(&text)
                    .map_err(|e| invalid(format!("{}: {e}", path.display())))?;
                spec.resolve()
            }
        }
    }

    pub fn corpus_kinds(&self, default: &[CorpusKind]) -> Vec<CorpusKind> {
        self.corpus.clone().unwrap_or_else(|| default.to_vec())
    }

    /// Reads a grid file named in `inputs`.
    pub fn input(&self, name: &str) -> CliResult<Option<GridFunction>> {
        let path = match name {
            "f" => &self.inputs.f,
            "g" => &self.inputs.g,
            "w1" => &self.inputs.w1,
            "w2" => &self.inputs.w2,
            "v" => &self.inputs.v,
            _ => unreachable!("unknown input {name}"),
        };
        let Some(path) = path else { return Ok(None) };
        let path = self.resolve_path(path);
        let text = fs::read_to_string(&path)
            .map_err(|e| CliError::InputUnreadable(format!("{}: {e}", path.display())))?;
        let f = GridFunction::from_grid_text(&text)
            .map_err(|e| CliError::InputUnreadable(format!("{}: {e}", path.display())))?;
        if !f.spec().cells_per_axis().is_power_of_two() {
            return Err(invalid(format!(
                "{}: N is not a power of two",
                path.display()
            )));
        }
        Ok(Some(f))
    }

    pub fn require_input(&self, name: &str) -> CliResult<GridFunction> {
        self.input(name)?
            .ok_or_else(|| invalid(format!("missing input `{name}`")))
    }

    pub fn output_path(&self) -> Option<PathBuf> {
        self.output.as_deref().map(|p| self.resolve_path(p))
    }

    pub fn summary_path(&self) -> Option<PathBuf> {
        self.summary.as_deref().map(|p| self.resolve_path(p))
    }

    /// Output locations must be in existing directories.
    pub fn check_outputs(&self) -> CliResult<()> {
        for p in [self.output_path(), self.summary_path()]
            .into_iter()
            .flatten()
        {
            let dir = p
                .parent()
                .filter(|d| !d.as_os_str().is_empty())
                .unwrap_or(Path::new("."));
            if !dir.is_dir() {
                return Err(invalid(format!(
                    "{}: directory does not exist",
                    p.display()
                )));
            }
        }
        Ok(())
    }
}
