use thiserror::Error;

/// Failures raised across the workbench.
///
/// The CLI maps `Config` to exit code 2 and every mathematical or usage
/// failure to exit code 3.
#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error in `{subexpr}`: {reason}")]
    Domain { subexpr: String, reason: String },

    #[error("usage error: {0}")]
    Usage(String),

    #[error("construction error: {reason} (witness {witness})")]
    Construction { reason: String, witness: String },

    #[error("hypothesis violated: {0}")]
    Hypothesis(String),

    #[error("contour error: {0}")]
    Contour(String),

    #[error("quadrature did not converge: {0}")]
    Quadrature(String),

    #[error("fit error: {0}")]
    Fit(String),

    #[error("oracle error: {0}")]
    Oracle(String),

    #[error("spectral collision at lambda = {lambda}; nearest eigenvalue {nearest}")]
    SpectralCollision { lambda: String, nearest: String },

    #[error("config error at line {line}, column {column}: {message}")]
    Config {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("io error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T> = std::result::Result<T, Error>;

impl Error {
    pub fn domain(subexpr: impl Into<String>, reason: impl Into<String>) -> Self {
        let mut s: String = subexpr.into();
        if s.len() > 160 {
            let cut = (0..=160).rev().find(|&i| s.is_char_boundary(i)).unwrap_or(0);
            s.truncate(cut);
            s.push_str("...");
        }
        Error::Domain {
            subexpr: s,
            reason: reason.into(),
        }
    }

    pub fn usage(msg: impl Into<String>) -> Self {
        Error::Usage(msg.into())
    }
}
