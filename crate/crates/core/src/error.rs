use thiserror::Error;

use crate::symbol::VarId;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("pattern must be nonempty")]
    EmptyPattern,

    #[error("variable {0:?} has no image under the substitution")]
    UndefinedVariable(VarId),

    #[error("window index {index} out of range 1..={last}")]
    IndexOutOfRange { index: usize, last: usize },

    #[error("correlation output may reach {bound}, beyond exact floating-point range")]
    OverflowRisk { bound: u128 },

    #[error("kernel of length {kernel} is longer than the input of length {input}")]
    KernelTooLong { kernel: usize, input: usize },

    #[error("{0}")]
    Io(#[from] std::io::Error),
}
