//! Exact rational power series, a channel algebra for linear-in-field operator
//! terms, and the word expansion used to check channel independence.
//!
//! The series variable is `t = 𝓞²/m²`; no floating point is used anywhere.

mod channel;
mod identity;
mod series;
mod word;

pub use channel::{
    channel_agreement, channel_expand_corrected, channel_expand_series_linear, Channel,
    ChannelAgreement, ChannelPoly, ChannelTerm, Monomial,
};
pub use identity::{
    rational_identity_probe, rational_identity_secondorder, secondorder_identity_holds,
    BivariatePoly, FactoredFraction, IdentityCheck,
};
pub use series::{
    channel_coeff_darwin2, channel_coeff_spin, series_arith, ArithOutcome, PowerSeries, SeriesOp,
};
pub use word::{word_expand, Letter, WordPoly};

pub use num_rational::BigRational as Rational;

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum SeriesError {
    #[error("constant term is zero; series is not invertible")]
    NotInvertible,
    #[error("square root needs constant term 1, got {0}")]
    SqrtConstant(Rational),
    #[error("operation {0} needs a second operand")]
    MissingOperand(&'static str),
    #[error("power series needs at least one coefficient")]
    Empty,
    #[error("order {got} below the minimum {min}")]
    OrderTooLow { min: usize, got: usize },
    #[error("m powers {left} and {right} differ by an odd amount")]
    MismatchedPower { left: i32, right: i32 },
    #[error("degree {requested} needs series order {needed}, only {available} available")]
    DegreeOverflow {
        requested: usize,
        needed: usize,
        available: usize,
    },
}

pub type Result<T> = std::result::Result<T, SeriesError>;

pub(crate) fn rat(n: i64, d: i64) -> Rational {
    Rational::new(n.into(), d.into())
}
