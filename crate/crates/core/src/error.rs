use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("invalid input: {0}")]
    Validation(String),
    #[error("operands belong to different contexts")]
    ContextMismatch,
    #[error("division by zero")]
    DivisionByZero,
    #[error("pair is not in H(l,k): N(u) + T(v) != 0")]
    NotInH,
    #[error("matrix is not in SU(h)")]
    NotUnitary,
    #[error("vector is anisotropic")]
    Anisotropic,
    #[error("precision exhausted: {0}")]
    Precision(String),
    #[error("lattice class is not a vertex of the tree")]
    NotAVertex,
    #[error("search window exhausted: {0}")]
    Window(String),
    #[error("enumeration cap exceeded: {0}")]
    Cap(String),
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("invariant violated: {0}")]
    Invariant(String),
}

impl Error {
    /// Process exit code used by the command-line front end.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Validation(_) | Error::ContextMismatch | Error::NotInH | Error::NotUnitary | Error::Precondition(_) => 2,
            Error::Precision(_) | Error::Window(_) | Error::Cap(_) => 3,
            _ => 1,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
