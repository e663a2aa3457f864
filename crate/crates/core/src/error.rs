use thiserror::Error;

/// Errors raised by the library. The CLI maps every variant to exit code 2.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("inconsistent gamma matrices: Clifford residual {0:e} above tolerance")]
    Inconsistent(f64),

    #[error("singular frame at u = {0:?}")]
    SingularFrame([f64; 3]),

    #[error("parameter A is not antisymmetric (symmetric part {0:e})")]
    NotAntisymmetric(f64),

    #[error("inadmissible potential: {0}")]
    InadmissiblePotential(String),

    #[error("singular point t = {0} inside integration interval")]
    SingularInterval(f64),

    #[error("step size underflow at t = {0}")]
    StepUnderflow(f64),

    #[error("evaluation at t = {t} outside trajectory range [{lo}, {hi}]")]
    OutsideRange { t: f64, lo: f64, hi: f64 },

    #[error("configuration error: {0}")]
    Config(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
