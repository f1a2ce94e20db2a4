use thiserror::Error;

use crate::Count;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid color scheme: {0}")]
    Scheme(String),

    #[error("weight {weight} exceeds the table bound {max}")]
    TableBounds { weight: u32, max: u32 },

    #[error("rank {rank} is out of range for a space of size {size}")]
    RankOutOfRange { rank: Count, size: Count },

    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("the requested space is empty")]
    EmptySpace,

    #[error("parse error: {0}")]
    Parse(String),

    #[error("table cache: {0}")]
    Cache(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
