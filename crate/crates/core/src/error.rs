use thiserror::Error;

/// Errors raised by the toolkit. Every variant has a stable name used by the
/// command-line front end when reporting failures on stderr.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("grid function samples are invalid: {0}")]
    InvalidSamples(String),
    #[error("cube corners are not on lattice cell boundaries")]
    NonAlignedCube,
    #[error("cube is not contained in the lattice box")]
    OutOfBox,
    #[error("cube has zero measure")]
    DegenerateCube,
    #[error("exponents are not Hölder conjugate: 1/{r} + 1/{s} != 1")]
    ConjugateMismatch { r: f64, s: f64 },
    #[error("level {level} is coarser than the region it should tile")]
    LevelTooCoarse { level: i32 },
    #[error("cube does not belong to the dyadic grid")]
    NotInGrid,
    #[error("function has a negative sample")]
    NonNegativityViolation,
    #[error("sparse family has no level {0}")]
    LevelAbsent(u32),
    #[error("alpha = {alpha} is outside ({lo}, {hi})")]
    AlphaOutOfRange { alpha: f64, lo: f64, hi: f64 },
    #[error("grid functions live on different lattices")]
    SpecMismatch,
    #[error("exponent p = {0} is out of range")]
    POutOfRange(f64),
    #[error("weight has a non-positive sample")]
    NonPositiveWeight,
    #[error("cube family is empty")]
    EmptyCubeFamily,
    #[error("exponent order violated: {0}")]
    ExponentOrder(String),
    #[error("relation violated: {0}")]
    RelationViolated(String),
    #[error("weight constant is infinite")]
    InfiniteConstant,
    #[error("grid file: {0}")]
    GridFormat(String),
}

impl Error {
    /// Stable identifier of the variant.
    pub fn name(&self) -> &'static str {
        match self {
            Error::InvalidGrid(_) => "InvalidGrid",
            Error::InvalidSamples(_) => "InvalidSamples",
            Error::NonAlignedCube => "NonAlignedCube",
            Error::OutOfBox => "OutOfBox",
            Error::DegenerateCube => "DegenerateCube",
            Error::ConjugateMismatch { .. } => "ConjugateMismatch",
            Error::LevelTooCoarse { .. } => "LevelTooCoarse",
            Error::NotInGrid => "NotInGrid",
            Error::NonNegativityViolation => "NonNegativityViolation",
            Error::LevelAbsent(_) => "LevelAbsent",
            Error::AlphaOutOfRange { .. } => "AlphaOutOfRange",
            Error::SpecMismatch => "SpecMismatch",
            Error::POutOfRange(_) => "POutOfRange",
            Error::NonPositiveWeight => "NonPositiveWeight",
            Error::EmptyCubeFamily => "EmptyCubeFamily",
            Error::ExponentOrder(_) => "ExponentOrder",
            Error::RelationViolated(_) => "RelationViolated",
            Error::InfiniteConstant => "InfiniteConstant",
            Error::GridFormat(_) => "GridFormat",
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;

/// Absolute tolerance for exponent relations such as `1/r + 1/s = 1`.
pub const RELATION_TOL: f64 = 1e-12;

pub(crate) fn check_conjugate(r: f64, s: f64) -> Result<()> {
    if !(r > 1.0 && s > 1.0) || (1.0 / r + 1.0 / s - 1.0).abs() > RELATION_TOL {
        return Err(Error::ConjugateMismatch { r, s });
    }
    Ok(())
}
