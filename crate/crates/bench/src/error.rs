use thiserror::Error;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error(transparent)]
    Core(#[from] llrk_core::Error),
    #[error("config error: {0}")]
    Config(String),
    #[error("reference solution did not settle before refine = {refine} (worst relative change {worst:.3e})")]
    ReferenceUnconverged { refine: usize, worst: f64 },
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("{0}")]
    Invalid(String),
}

pub type BenchResult<T> = std::result::Result<T, BenchError>;
