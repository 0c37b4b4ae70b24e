use std::fmt;

use thiserror::Error;

use crate::lattice::Site;

/// One clause of the standing non-degeneracy assumption on the coefficients.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum Assumption {
    /// `d = a - b - c` must not vanish.
    DNonZero,
    /// `b` must not vanish.
    BNonZero,
    /// `c` must not vanish.
    CNonZero,
    /// `a` must differ from 1 (otherwise the surface is locally planar).
    ANotOne,
}

impl fmt::Display for Assumption {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let s = match self {
            Assumption::DNonZero => "a - b - c != 0",
            Assumption::BNonZero => "b != 0",
            Assumption::CNonZero => "c != 0",
            Assumption::ANotOne => "a != 1",
        };
        f.write_str(s)
    }
}

fn at(site: &Option<Site>) -> String {
    match site {
        Some(s) => format!(" at {s}"),
        None => String::new(),
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("zero denominator `{what}`{}", at(.site))]
    ZeroDenominator { what: String, site: Option<Site> },

    #[error("missing stencil point {needed} required at {site}")]
    MissingStencil { site: Site, needed: Site },

    #[error("assumption violated: {clause}{}", at(.site))]
    AssumptionViolated {
        clause: Assumption,
        site: Option<Site>,
    },

    #[error("singular transition matrix {which} at {site}")]
    SingularTransition { which: char, site: Site },

    #[error("incompatible coefficient data at {site}: {detail}")]
    IncompatibleField { site: Site, detail: String },

    #[error("degenerate frame at {0}: columns are linearly dependent")]
    DegenerateFrame(Site),

    #[error("invalid window: {0}")]
    InvalidWindow(String),

    #[error("non-finite value: {0}")]
    NonFinite(String),

    #[error("cross-check failed: {0}")]
    CrossCheck(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("i/o error: {0}")]
    Io(String),
}

impl Error {
    pub(crate) fn zero_den(what: impl Into<String>, site: Option<Site>) -> Self {
        Error::ZeroDenominator {
            what: what.into(),
            site,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Parse(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
