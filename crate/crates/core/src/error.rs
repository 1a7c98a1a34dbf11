use thiserror::Error;

use crate::lattice::{MultiIndex, SubIndex};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("odd parity where an even lattice sum is required: {0}")]
    Parity(String),
    #[error("invalid parameters: {0}")]
    InvalidParams(String),
    #[error("degenerate quadrilateral (zero denominator in cross-ratio)")]
    DegenerateQuad,
    #[error("no finite fourth point for the requested cross-ratio")]
    Infinity,
    #[error("axis recurrence degenerates at n={0}")]
    AxisDegenerate(i64),
    #[error("stencil at {0} is incomplete")]
    IncompleteStencil(MultiIndex),
    #[error("degenerate edge (coincident endpoints)")]
    DegenerateEdge,
    #[error("degenerate stencil at {0}")]
    DegenerateStencil(SubIndex),
    #[error("nonpositive radius {value:e} at {site}")]
    Positivity {
        site: SubIndex,
        value: f64,
        upstream: Vec<(SubIndex, f64)>,
    },
    #[error("pole in recurrence step at n={0}")]
    StepPole(i64),
    #[error("singular step at n={0}")]
    StepSingular(i64),
    #[error("domain error: {0}")]
    Domain(String),
    #[error("no kite case matches")]
    NotAKite,
    #[error("inconsistent closure while placing {0}")]
    Closure(MultiIndex),
    #[error("no exit-side bracket: {0}")]
    NoBracket(String),
    #[error("{source} (at {site})")]
    AtSite {
        site: MultiIndex,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub fn at(self, site: MultiIndex) -> Error {
        Error::AtSite {
            site,
            source: Box::new(self),
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
