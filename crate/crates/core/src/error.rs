use alloc::string::String;
use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A caller-supplied argument violates an operation precondition.
    InvalidArgument { name: &'static str, reason: String },
    /// Two objects that must share a grid do not.
    GridMismatch,
    /// The requested index range exceeds the sequence length.
    SequenceTooShort { required: usize, available: usize },
    /// A diagnostic window contains no indices.
    EmptyWindow,
    /// The time step violated the stability bound after the update.
    CflViolation { courant: f64 },
    /// A simulation member produced non-finite values or non-positive density.
    MemberBlowUp { member: usize, reason: String },
    /// An energy cell has vacuum density with non-zero momentum.
    InfiniteEnergy { member: usize },
}

impl Error {
    pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Self {
        Error::InvalidArgument { name, reason: reason.into() }
    }
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::InvalidArgument { name, reason } => write!(f, "invalid `{name}`: {reason}"),
            Error::GridMismatch => f.write_str("grids do not match"),
            Error::SequenceTooShort { required, available } => {
                write!(f, "sequence has {available} members, {required} required")
            }
            Error::EmptyWindow => f.write_str("index window is empty"),
            Error::CflViolation { courant } => {
                write!(f, "CFL bound violated during step (courant number {courant:.4})")
            }
            Error::MemberBlowUp { member, reason } => write!(f, "member {member} blew up: {reason}"),
            Error::InfiniteEnergy { member } => {
                write!(f, "member {member} has vacuum cells with non-zero momentum")
            }
        }
    }
}

impl core::error::Error for Error {}
