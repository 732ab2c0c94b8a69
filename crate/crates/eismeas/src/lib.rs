//! Exact-arithmetic construction of a p-adic Eisenstein measure on `Z_p^*`.
//!
//! The crate builds, entirely in exact rational and cyclotomic-field
//! arithmetic, the finite-level distributions attached to normalized
//! Eisenstein series of weight `k >= 3`, checks the identities the
//! construction rests on (Fourier expansions, Gauss-sum and character
//! lemmas, Kummer congruences, divisibility claims), and evaluates the
//! interpolation property of the resulting measure at desk scale.
//!
//! Layout:
//! * [`rational`] / [`cyclotomic`] — scalar rings: `Q`, `Q(zeta_n)` in the
//!   power basis, p-adic valuations, complex embeddings for numeric oracles.
//! * [`characters`] — Dirichlet characters mod `p^m` (odd `p`), conductors,
//!   parity, Gauss sums.
//! * [`bernoulli`] — Bernoulli numbers/polynomials, `zeta(1-k)`, partial and
//!   character L-values, the regular-prime test.
//! * [`qexp`] — truncated q-expansions, the U operator, twists, partial forms.
//! * [`eisenstein`] — exact normalized Eisenstein expansions, numeric raw
//!   expansions, lattice-sum oracles, Moebius/Hecke identities, the
//!   distribution refinement check.
//! * [`projector`] — the alpha-primary projector on finite U-stable spans.
//! * [`measure`] — finite-level distribution tables, the regularized
//!   Bernoulli (Mazur) measure, Kummer congruences, the summation and
//!   divisibility lemmas, and the end-to-end interpolation check.

pub mod bernoulli;
pub mod characters;
pub mod cyclotomic;
pub mod eisenstein;
pub mod measure;
pub mod numtheory;
pub mod projector;
pub mod qexp;
pub mod rational;

use thiserror::Error;

/// Errors surfaced by exact operations.
#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero in {0}")]
    DivisionByZero(&'static str),
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("precision too small: need at least {need}, have {have}")]
    PrecisionTooSmall { need: usize, have: usize },
    #[error("element is not in the span (nonzero residual at q^{0})")]
    NotInSpan(usize),
    #[error("L-value vanishes (parity-trivial zero), cannot invert")]
    ParityTrivialZero,
    #[error("prime {0} is irregular; measure construction requires a regular prime")]
    IrregularPrime(u64),
    #[error("value has a nonzero non-rational component")]
    NotRational,
}

pub type Result<T> = std::result::Result<T, Error>;
