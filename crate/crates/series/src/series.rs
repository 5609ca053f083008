use std::fmt;

use num_traits::{One, Zero};

use crate::{rat, Rational, Result, SeriesError};

/// Truncated power series `Σ_{j≤K} c_j t^j` with exact coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct PowerSeries {
    coeffs: Vec<Rational>,
}

impl PowerSeries {
    pub fn new(coeffs: Vec<Rational>) -> Result<Self> {
        if coeffs.is_empty() {
            return Err(SeriesError::Empty);
        }
        Ok(Self { coeffs })
    }

    /// Integer-ratio coefficients `(numerator, denominator)`.
    pub fn from_ratios(coeffs: &[(i64, i64)]) -> Result<Self> {
        Self::new(coeffs.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn constant(c: Rational, order: usize) -> Self {
        let mut coeffs = vec![Rational::zero(); order + 1];
        coeffs[0] = c;
        Self { coeffs }
    }

    pub fn one(order: usize) -> Self {
        Self::constant(Rational::one(), order)
    }

    /// `t` itself, or `0` at order 0.
    pub fn variable(order: usize) -> Self {
        let mut s = Self::constant(Rational::zero(), order);
        if order >= 1 {
            s.coeffs[1] = Rational::one();
        }
        s
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[Rational] {
        &self.coeffs
    }

    pub fn coeff(&self, j: usize) -> Rational {
        self.coeffs.get(j).cloned().unwrap_or_else(Rational::zero)
    }

    pub fn truncate(&self, order: usize) -> Self {
        let mut coeffs: Vec<Rational> = self.coeffs.iter().take(order + 1).cloned().collect();
        coeffs.resize(order + 1, Rational::zero());
        Self { coeffs }
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.iter().all(Zero::is_zero)
    }

    pub fn scale(&self, s: &Rational) -> Self {
        Self {
            coeffs: self.coeffs.iter().map(|c| c * s).collect(),
        }
    }

    pub fn add(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        Self {
            coeffs: (0..=k).map(|j| &self.coeffs[j] + &other.coeffs[j]).collect(),
        }
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.add(&other.scale(&-Rational::one()))
    }

    pub fn mul(&self, other: &Self) -> Self {
        let k = self.order().min(other.order());
        let coeffs = (0..=k)
            .map(|n| {
                (0..=n).fold(Rational::zero(), |acc, i| {
                    acc + &self.coeffs[i] * &other.coeffs[n - i]
                })
            })
            .collect();
        Self { coeffs }
    }

    pub fn invert(&self) -> Result<Self> {
        let a0 = &self.coeffs[0];
        if a0.is_zero() {
            return Err(SeriesError::NotInvertible);
        }
        let inv0 = a0.recip();
        let mut out: Vec<Rational> = vec![inv0.clone()];
        for n in 1..=self.order() {
            let s = (1..=n).fold(Rational::zero(), |acc, i| acc + &self.coeffs[i] * &out[n - i]);
            out.push(-s * &inv0);
        }
        Ok(Self { coeffs: out })
    }

    /// `√a` for a series with constant term 1.
    pub fn sqrt1p(&self) -> Result<Self> {
        if !self.coeffs[0].is_one() {
            return Err(SeriesError::SqrtConstant(self.coeffs[0].clone()));
        }
        let half = rat(1, 2);
        let mut out: Vec<Rational> = vec![Rational::one()];
        for n in 1..=self.order() {
            let cross = (1..n).fold(Rational::zero(), |acc, i| acc + &out[i] * &out[n - i]);
            out.push((&self.coeffs[n] - cross) * &half);
        }
        Ok(Self { coeffs: out })
    }
}

impl fmt::Display for PowerSeries {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str("[")?;
        for (i, c) in self.coeffs.iter().enumerate() {
            if i > 0 {
                f.write_str(", ")?;
            }
            write!(f, "{c}")?;
        }
        f.write_str("]")
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum SeriesOp {
    Add,
    Mul,
    Invert,
    Sqrt1p,
}

impl SeriesOp {
    pub fn name(&self) -> &'static str {
        match self {
            SeriesOp::Add => "ADD",
            SeriesOp::Mul => "MUL",
            SeriesOp::Invert => "INVERT",
            SeriesOp::Sqrt1p => "SQRT1P",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ArithOutcome {
    pub series: PowerSeries,
    /// The operands had different orders and the longer one was cut.
    pub truncated: bool,
}

pub fn series_arith<'a>(op: SeriesOp, a: &PowerSeries, b: Option<&'a PowerSeries>) -> Result<ArithOutcome> {
    let binary = |b: Option<&'a PowerSeries>| b.ok_or(SeriesError::MissingOperand(op.name()));
    let (series, truncated) = match op {
        SeriesOp::Add => {
            let b = binary(b)?;
            (a.add(b), a.order() != b.order())
        }
        SeriesOp::Mul => {
            let b = binary(b)?;
            (a.mul(b), a.order() != b.order())
        }
        SeriesOp::Invert => (a.invert()?, false),
        SeriesOp::Sqrt1p => (a.sqrt1p()?, false),
    };
    Ok(ArithOutcome { series, truncated })
}

/// `√(1+t) = ε/m`.
fn eps_over_mass(order: usize) -> PowerSeries {
    PowerSeries::one(order)
        .add(&PowerSeries::variable(order))
        .sqrt1p()
        .expect("constant term is one")
}

/// `m²/(ε(ε+m))` in powers of `t`.
pub fn channel_coeff_spin(order: usize) -> Result<PowerSeries> {
    if order < 2 {
        return Err(SeriesError::OrderTooLow { min: 2, got: order });
    }
    let s = eps_over_mass(order);
    let s_plus_one = s.add(&PowerSeries::one(order));
    s.mul(&s_plus_one).invert()
}

/// `m⁴(2ε²−m²)/(ε⁴(ε+m)²)` in powers of `t`.
pub fn channel_coeff_darwin2(order: usize) -> Result<PowerSeries> {
    if order < 1 {
        return Err(SeriesError::OrderTooLow { min: 1, got: order });
    }
    let t = PowerSeries::variable(order);
    let one = PowerSeries::one(order);
    let s_plus_one = eps_over_mass(order).add(&one);
    let numerator = one.add(&t.scale(&rat(2, 1)));
    let eps_sq = one.add(&t);
    let denominator = eps_sq.mul(&eps_sq).mul(&s_plus_one).mul(&s_plus_one);
    Ok(numerator.mul(&denominator.invert()?))
}
