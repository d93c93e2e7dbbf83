use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("seed {seed} does not satisfy the {family} seed congruences")]
    SeedCongruence { family: String, seed: String },

    #[error("{family} instance at u = {seed} is not prime ({which})")]
    NonPrimeInstance {
        family: String,
        seed: String,
        which: &'static str,
    },

    #[error("no {what} found after {budget} candidates")]
    NotFound { what: String, budget: u64 },

    #[error("setup validation failed: {0}")]
    SetupValidation(String),

    #[error("setup recipe incompatible: {0}")]
    RecipeIncompatibility(String),

    #[error("no feasible (A, B) point on the search grid for {0}")]
    Infeasible(String),

    #[error("unknown curve or family `{0}`")]
    Unknown(String),

    #[error("config error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}
