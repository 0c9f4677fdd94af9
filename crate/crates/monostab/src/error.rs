use monostab_core::grid2d::GridError;
use monostab_core::shoot1d::ShootError;
use monostab_core::spatialdyn::SpatialError;
use monostab_core::spectra::SpectraError;
use monostab_core::stargeom::StarError;
use monostab_core::ReactionError;
use std::fmt;

/// Everything that can stop an experiment before its report is written.
/// Failed assertions are not errors; they land in the report and drive the
/// exit code instead.
#[derive(Debug)]
pub enum PipelineError {
    Config(String),
    Io(std::io::Error),
    Json(serde_json::Error),
    Reaction(ReactionError),
    Shoot(ShootError),
    Grid(GridError),
    Spectra(SpectraError),
    Spatial(SpatialError),
    Star(StarError),
    /// No bridge width in the configured sweep passed the midpoint test.
    SweepExhausted { tried: Vec<f64> },
    /// The interpolation endpoint never exhibits a non-injective length map.
    PredicateNeverTrue,
    /// The two-parameter Newton for the marginal interval did not settle.
    FoldDivergence { residual: f64 },
}

impl fmt::Display for PipelineError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            PipelineError::Config(why) => write!(f, "config: {why}"),
            PipelineError::Io(e) => write!(f, "io: {e}"),
            PipelineError::Json(e) => write!(f, "json: {e}"),
            PipelineError::Reaction(e) => write!(f, "reaction: {e}"),
            PipelineError::Shoot(e) => write!(f, "shooting: {e}"),
            PipelineError::Grid(e) => write!(f, "grid: {e}"),
            PipelineError::Spectra(e) => write!(f, "spectra: {e}"),
            PipelineError::Spatial(e) => write!(f, "spatial dynamics: {e}"),
            PipelineError::Star(e) => write!(f, "geometry: {e}"),
            PipelineError::SweepExhausted { tried } => {
                write!(f, "no bridge width in {tried:?} passed the midpoint test")
            }
            PipelineError::PredicateNeverTrue => {
                write!(f, "endpoint reaction has an injective length map; nothing to bisect")
            }
            PipelineError::FoldDivergence { residual } => {
                write!(f, "marginal-interval Newton stalled at residual {residual:e}")
            }
        }
    }
}

impl std::error::Error for PipelineError {}

impl From<std::io::Error> for PipelineError {
    fn from(e: std::io::Error) -> Self {
        PipelineError::Io(e)
    }
}

impl From<serde_json::Error> for PipelineError {
    fn from(e: serde_json::Error) -> Self {
        PipelineError::Json(e)
    }
}

impl From<ReactionError> for PipelineError {
    fn from(e: ReactionError) -> Self {
        PipelineError::Reaction(e)
    }
}

impl From<ShootError> for PipelineError {
    fn from(e: ShootError) -> Self {
        PipelineError::Shoot(e)
    }
}

impl From<GridError> for PipelineError {
    fn from(e: GridError) -> Self {
        PipelineError::Grid(e)
    }
}

impl From<SpectraError> for PipelineError {
    fn from(e: SpectraError) -> Self {
        PipelineError::Spectra(e)
    }
}

impl From<SpatialError> for PipelineError {
    fn from(e: SpatialError) -> Self {
        PipelineError::Spatial(e)
    }
}

impl From<StarError> for PipelineError {
    fn from(e: StarError) -> Self {
        PipelineError::Star(e)
    }
}
