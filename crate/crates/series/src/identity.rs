use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};

use crate::Rational;

/// Polynomial with integer coefficients in the commuting symbols `ε` and `m`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct BivariatePoly {
    /// `(power of ε, power of m) → coefficient`, zeros removed.
    terms: BTreeMap<(u32, u32), BigInt>,
}

impl BivariatePoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(coeff: i64, eps: u32, m: u32) -> Self {
        let mut p = Self::zero();
        p.push((eps, m), BigInt::from(coeff));
        p
    }

    pub fn from_terms(terms: &[(i64, u32, u32)]) -> Self {
        terms
            .iter()
            .fold(Self::zero(), |acc, &(c, e, m)| acc.add(&Self::monomial(c, e, m)))
    }

    /// `ε + m`.
    pub fn eps_plus_mass() -> Self {
        Self::from_terms(&[(1, 1, 0), (1, 0, 1)])
    }

    fn push(&mut self, key: (u32, u32), coeff: BigInt) {
        let entry = self.terms.entry(key).or_insert_with(BigInt::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.push(*k, c.clone());
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for (k, c) in &other.terms {
            out.push(*k, -c);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((ea, ma), ca) in &self.terms {
            for ((eb, mb), cb) in &other.terms {
                out.push((ea + eb, ma + mb), ca * cb);
            }
        }
        out
    }

    pub fn pow(&self, n: u32) -> Self {
        (0..n).fold(Self::monomial(1, 0, 0), |acc, _| acc.mul(self))
    }

    pub fn eval(&self, eps: &Rational, m: &Rational) -> Rational {
        self.terms.iter().fold(Rational::zero(), |acc, ((e, p), c)| {
            acc + Rational::from_integer(c.clone()) * pow_rat(eps, *e) * pow_rat(m, *p)
        })
    }
}

fn pow_rat(x: &Rational, n: u32) -> Rational {
    (0..n).fold(Rational::one(), |acc, _| acc * x)
}

impl fmt::Display for BivariatePoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, ((e, m), c)) in self.terms.iter().rev().enumerate() {
            let sign = if c.is_negative() { "-" } else { "+" };
            if i == 0 {
                if c.is_negative() {
                    f.write_str("-")?;
                }
            } else {
                write!(f, " {sign} ")?;
            }
            write!(f, "{}·ε^{e}·m^{m}", c.abs())?;
        }
        Ok(())
    }
}

/// `numerator / (ε^a m^b (ε+m)^c)`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FactoredFraction {
    pub numerator: BivariatePoly,
    pub eps_power: u32,
    pub mass_power: u32,
    pub sum_power: u32,
}

impl FactoredFraction {
    pub fn new(numerator: BivariatePoly, eps_power: u32, mass_power: u32, sum_power: u32) -> Self {
        Self {
            numerator,
            eps_power,
            mass_power,
            sum_power,
        }
    }

    /// Numerator over the denominator `ε^a m^b (ε+m)^c` with larger exponents.
    fn lifted(&self, a: u32, b: u32, c: u32) -> BivariatePoly {
        self.numerator
            .mul(&BivariatePoly::monomial(1, a - self.eps_power, b - self.mass_power))
            .mul(&BivariatePoly::eps_plus_mass().pow(c - self.sum_power))
    }

    /// `None` when the denominator vanishes.
    pub fn eval(&self, eps: &Rational, m: &Rational) -> Option<Rational> {
        let den = pow_rat(eps, self.eps_power)
            * pow_rat(m, self.mass_power)
            * pow_rat(&(eps + m), self.sum_power);
        (!den.is_zero()).then(|| self.numerator.eval(eps, m) / den)
    }
}

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct IdentityCheck {
    pub holds: bool,
    /// `lhs − Σ rhs` over the common denominator.
    pub residual: BivariatePoly,
}

/// Exact check of `lhs = Σ rhs` by cross-multiplication to a common denominator.
pub fn check_identity(lhs: &FactoredFraction, rhs: &[FactoredFraction]) -> IdentityCheck {
    let all = std::iter::once(lhs).chain(rhs);
    let a = all.clone().map(|f| f.eps_power).max().unwrap_or(0);
    let b = all.clone().map(|f| f.mass_power).max().unwrap_or(0);
    let c = all.map(|f| f.sum_power).max().unwrap_or(0);
    let mut residual = lhs.lifted(a, b, c);
    for term in rhs {
        residual = residual.sub(&term.lifted(a, b, c));
    }
    IdentityCheck {
        holds: residual.is_zero(),
        residual,
    }
}

/// `(2ε²−m²)/(ε⁴(ε+m)²)` and the split `1/ε⁴ + (ε²−2(ε+m)m)/(ε⁴(ε+m)²)`.
pub fn secondorder_identity_sides() -> (FactoredFraction, Vec<FactoredFraction>) {
    let lhs = FactoredFraction::new(BivariatePoly::from_terms(&[(2, 2, 0), (-1, 0, 2)]), 4, 0, 2);
    let inverse_quartic = FactoredFraction::new(BivariatePoly::monomial(1, 0, 0), 4, 0, 0);
    let remainder = FactoredFraction::new(
        BivariatePoly::from_terms(&[(1, 2, 0), (-2, 1, 1), (-2, 0, 2)]),
        4,
        0,
        2,
    );
    (lhs, vec![inverse_quartic, remainder])
}

pub fn rational_identity_secondorder() -> IdentityCheck {
    let (lhs, rhs) = secondorder_identity_sides();
    check_identity(&lhs, &rhs)
}

pub fn secondorder_identity_holds() -> bool {
    rational_identity_secondorder().holds
}

/// Evaluates both sides of the split at each `(ε, m)`; points where a denominator
/// vanishes are skipped.
pub fn rational_identity_probe(points: &[(Rational, Rational)]) -> bool {
    let (lhs, rhs) = secondorder_identity_sides();
    points.iter().all(|(e, m)| {
        let Some(left) = lhs.eval(e, m) else {
            return true;
        };
        let right: Option<Rational> = rhs.iter().map(|t| t.eval(e, m)).sum();
        right.is_some_and(|r| r == left)
    })
}
