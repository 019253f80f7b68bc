use thiserror::Error;

/// Errors raised by the numerical engine.
#[derive(Debug, Error)]
pub enum Error {
    #[error("unknown preset `{0}`")]
    UnknownPreset(String),
    #[error("invalid preset parameters: {0}")]
    InvalidParameters(String),
    #[error("truncation point {b} outside (0, {b_max}]")]
    TruncationOutOfRange { b: f64, b_max: f64 },
    #[error("invalid input: {0}")]
    InvalidInput(String),
    #[error("integration step failure at x = {x}: {detail}")]
    StepFailure { x: f64, detail: String },
    #[error("overflow while integrating at k = {k_re}{k_im:+}i (Im k * b = {growth})")]
    Overflow { k_re: f64, k_im: f64, growth: f64 },
    #[error("pole proximity at lambda = {re}{im:+}i (distance {distance} to i*{kappa})")]
    PoleProximity { re: f64, im: f64, kappa: f64, distance: f64 },
    #[error("half-line Dirichlet eigenvalue near z = {re}{im:+}i (|psi(0)| = {value})")]
    DirichletPole { re: f64, im: f64, value: f64 },
    #[error("bound-state search failed: {0}")]
    RootFinder(String),
    #[error("nearly degenerate bound states at kappa = {0} and {1}")]
    DegenerateRoots(f64, f64),
    #[error("contour: {0}")]
    Contour(String),
    #[error("positivity failure at x = {x}, t = {t}: smallest eigenvalue {min_eig} below floor {floor}")]
    Positivity { x: f64, t: f64, min_eig: f64, floor: f64 },
    #[error("resolution: {0}")]
    Resolution(String),
    #[error("grid must be uniform and symmetric")]
    NonUniformGrid,
    #[error("pde integrator: {0}")]
    Pde(String),
    #[error("reconstruction failed at {count} point(s); first at x = {x}, t = {t}: {first}")]
    PointFailures { count: usize, x: f64, t: f64, first: String },
    #[error("configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
