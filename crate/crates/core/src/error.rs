use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("point outside the domain of definition: {0}")]
    Domain(String),
    #[error("parameter {re},{im} lies on the excluded slit (-inf, -1/12)")]
    Slit { re: f64, im: f64 },
    #[error("circumcircle touches the cardioid at two points within tolerance")]
    TangencyAmbiguous,
    #[error("point lies in the fundamental tile; treat as escaped")]
    InDroplet,
    #[error("cycle passes within tolerance of a singular point")]
    NearSingular,
    #[error("word is not admissible: {0}")]
    InadmissibleWord(String),
    #[error("angle {0} hits a partition endpoint; a side must be given")]
    AmbiguousEndpoint(String),
    #[error("ray bifurcates at pullback step {0}")]
    BifurcatedRay(usize),
    #[error("angle {0} is not pre-periodic")]
    NotPreperiodic(String),
}

impl Error {
    /// Stable upper-case code used by the command line front end.
    pub fn code(&self) -> &'static str {
        match self {
            Error::Domain(_) => "DOMAIN_ERROR",
            Error::Slit { .. } => "SLIT_ERROR",
            Error::TangencyAmbiguous => "TANGENCY_AMBIGUOUS",
            Error::InDroplet => "IN_DROPLET",
            Error::NearSingular => "NEAR_SINGULAR",
            Error::InadmissibleWord(_) => "INADMISSIBLE_WORD",
            Error::AmbiguousEndpoint(_) => "AMBIGUOUS_ENDPOINT",
            Error::BifurcatedRay(_) => "BIFURCATED_RAY",
            Error::NotPreperiodic(_) => "NOT_PREPERIODIC",
        }
    }
}
