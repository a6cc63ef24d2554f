use thiserror::Error;

pub type Result<T, E = Error> = core::result::Result<T, E>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(&'static str),

    /// Repeated step halving could not keep the path away from its boundary;
    /// the configured step is too coarse there.
    #[error("step halving exhausted at time {time}")]
    StepHalvingExhausted { time: f64 },

    #[error("non-finite state at time {time}")]
    NonFinite { time: f64 },

    /// The geometric-clock drift `1/(X (ln X + s/2))` lost its positive
    /// denominator: the represented radial path came back to the unit circle.
    #[error("drift denominator underflow at geometric time {time}")]
    DriftDenominatorUnderflow { time: f64 },

    #[error("clock switch limit exceeded ({0} switches)")]
    PhaseThrash(usize),

    #[error("cycle source is empty or exhausted")]
    EmptySource,

    #[error("too few samples: need at least {need}, got {got}")]
    TooFewSamples { need: usize, got: usize },

    #[error("envelope evaluation failed at index {0}")]
    Envelope(usize),
}
