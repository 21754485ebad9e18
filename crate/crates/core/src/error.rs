use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("parse error: {0}")]
    Parse(String),

    #[error("no cycle near seed")]
    NoCycleNearSeed,
    #[error("degenerate seed")]
    DegenerateSeed,

    #[error("period collapse: converged to a center of period {found}, a proper divisor of {requested}")]
    PeriodCollapse { requested: usize, found: usize },
    #[error("no center near seed")]
    NoCenterNearSeed,
    #[error("no center within q_max = {0} near seed")]
    NoCenterWithin(usize),
    #[error("degenerate: actually periodic or smaller preperiod (relation holds for ({0}, {1}))")]
    DegenerateMisiurewicz(usize, usize),
    #[error("no Misiurewicz point near seed")]
    NoMisiurewiczNearSeed,
    #[error("degenerate configuration")]
    DegenerateConfiguration,
    #[error("parabolic solve did not converge (residuals {cycle:.3e}, {multiplier:.3e})")]
    ParabolicNoConvergence { cycle: f64, multiplier: f64 },
    #[error("tuning escaped the small copy; refine seed")]
    TuningEscaped,
    #[error("not repelling: input not Misiurewicz for spec")]
    NotRepelling,
    #[error("zero on contour")]
    ZeroOnContour,
    #[error("winding number sampling budget of {0} samples exceeded")]
    SamplingBudget(usize),

    #[error("Böttcher coordinate undefined: orbit did not escape")]
    BottcherUndefined,
    #[error("domain error: |w| = {0} must exceed 1")]
    BottcherDomain(f64),
    #[error("inversion failed; increase precision")]
    InversionFailed,

    #[error("radii do not bracket J_c' (samples span |z| in [{min}, {max}], annulus ({inner}, {outer}))")]
    RadiiDoNotBracket { min: f64, max: f64, inner: f64, outer: f64 },
    #[error("decoration level {level}: {dropped} of {total} inversions failed")]
    TooManyDrops { level: u32, dropped: usize, total: usize },

    #[error("re-reference failed; raise precision ({0} glitched pixels remain)")]
    ReReferenceFailed(usize),

    #[error("no boundary in frame")]
    NoBoundary,
    #[error("degenerate cloud")]
    DegenerateCloud,

    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Image(#[from] image::ImageError),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
