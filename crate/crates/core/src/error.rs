use core::fmt;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A length or count that must be positive was not.
    NonPositive { name: &'static str, value: f64 },
    /// Magnet index outside `0..n_mag`.
    IndexOutOfRange { index: usize, n_mag: usize },
    /// Displacement of a magnet from itself was requested.
    SelfDisplacement(usize),
    /// Dipole kernel evaluated at zero separation.
    ZeroSeparation,
    /// Clock stage outside `1..=7`.
    StageOutOfRange(usize),
    /// Input bit other than 0 or 1.
    InvalidBit(u8),
    /// An operation that needs at least one element received none.
    Empty(&'static str),
    DimensionMismatch {
        what: &'static str,
        expected: usize,
        found: usize,
    },
    /// A value failed a domain check (for example a non-finite parameter).
    InvalidParameter(&'static str),
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::NonPositive { name, value } => {
                write!(f, "{name} must be positive, got {value}")
            }
            Error::IndexOutOfRange { index, n_mag } => {
                write!(f, "magnet index {index} out of range for {n_mag} magnets")
            }
            Error::SelfDisplacement(i) => write!(f, "displacement of magnet {i} from itself"),
            Error::ZeroSeparation => write!(f, "dipole kernel evaluated at zero separation"),
            Error::StageOutOfRange(p) => write!(f, "clock stage {p} outside 1..=7"),
            Error::InvalidBit(b) => write!(f, "input bit must be 0 or 1, got {b}"),
            Error::Empty(what) => write!(f, "{what} is empty"),
            Error::DimensionMismatch {
                what,
                expected,
                found,
            } => write!(f, "{what}: expected length {expected}, found {found}"),
            Error::InvalidParameter(what) => write!(f, "invalid parameter: {what}"),
        }
    }
}

impl core::error::Error for Error {}

pub type Result<T> = core::result::Result<T, Error>;
