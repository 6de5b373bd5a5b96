use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("chain needs at least 3 sites, got {0}")]
    TooFewSites(usize),

    #[error("parameter `{name}` must be finite, got {value}")]
    NonFinite { name: &'static str, value: f64 },

    #[error("J^x + J^y must be nonzero to define the anisotropy")]
    DegenerateCouplings,

    #[error("site {site} is outside 1..={n_sites}")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("input amplitudes must satisfy alpha^2 + beta^2 = 1 (got {norm_sq})")]
    NotNormalized { norm_sq: f64 },

    #[error("{quantity} has imaginary residue {residue:e}")]
    ImaginaryResidue {
        quantity: &'static str,
        residue: f64,
    },

    #[error("{quantity} = {value:e} is outside its physical range")]
    OutOfRange { quantity: &'static str, value: f64 },

    #[error("Bloch vector length {0} exceeds 1/2")]
    BlochTooLong(f64),

    #[error("operator string of length {len} is invalid: {reason}")]
    InvalidString { len: usize, reason: &'static str },

    #[error("exact diagonalization limited to {max} sites, got {got}")]
    TooManySites { got: usize, max: usize },

    #[error("isotropic closed form requires gamma = 0, got {0}")]
    NotIsotropic(f64),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("malformed sweep file: {0}")]
    Malformed(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
