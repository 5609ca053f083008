use std::collections::BTreeMap;
use std::fmt;

use num_traits::Zero;

use crate::series::{channel_coeff_darwin2, channel_coeff_spin, PowerSeries};
use crate::{rat, Rational, Result, SeriesError};

/// Bracket structures that carry a field linearly.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Channel {
    /// `𝓕` itself.
    Unit,
    /// `[𝓞,[𝓞,𝓕]]`.
    C1,
    /// `[𝓞²,[𝓞²,𝓕]]`.
    C2,
    /// `[𝓞²,[𝓞²,[𝓞,[𝓞,𝓕]]]]`.
    C3,
}

impl Channel {
    pub const ALL: [Channel; 4] = [Channel::Unit, Channel::C1, Channel::C2, Channel::C3];

    pub fn name(&self) -> &'static str {
        match self {
            Channel::Unit => "UNIT",
            Channel::C1 => "C1",
            Channel::C2 => "C2",
            Channel::C3 => "C3",
        }
    }

    /// Number of `𝓞` factors in every word of the bracket.
    pub fn o_degree(&self) -> usize {
        match self {
            Channel::Unit => 0,
            Channel::C1 => 2,
            Channel::C2 => 4,
            Channel::C3 => 6,
        }
    }
}

impl fmt::Display for Channel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

/// `m^{m_power} Σ_j c_j t^j ∘ C` with `t = 𝓞²/m²` and `P ∘ C = ½{P, C}`.
///
/// Because `𝓞²` commutes with any polynomial in itself, `{P, C}` is recorded as
/// `2·P ∘ C`; [`ChannelPoly::anticommutator_form`] undoes the factor.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelTerm {
    pub series: PowerSeries,
    pub m_power: i32,
}

/// One scalar coefficient: channel, power of `𝓞²`, and total power of `m`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Monomial {
    pub channel: Channel,
    pub o2_power: usize,
    pub m_power: i32,
}

impl fmt::Display for Monomial {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}·O^{}·m^{}", self.channel, 2 * self.o2_power, self.m_power)
    }
}

#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct ChannelPoly {
    terms: BTreeMap<Channel, ChannelTerm>,
}

impl ChannelPoly {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn with(mut self, channel: Channel, series: PowerSeries, m_power: i32) -> Self {
        self.terms.insert(channel, ChannelTerm { series, m_power });
        self
    }

    pub fn term(&self, channel: Channel) -> Option<&ChannelTerm> {
        self.terms.get(&channel)
    }

    pub fn terms(&self) -> impl Iterator<Item = (Channel, &ChannelTerm)> {
        self.terms.iter().map(|(c, t)| (*c, t))
    }

    /// Coefficients of `{t^j, C}`, half of the stored ones.
    pub fn anticommutator_form(&self, channel: Channel) -> Option<PowerSeries> {
        self.term(channel).map(|t| t.series.scale(&rat(1, 2)))
    }

    /// Sum term by term; offsets that differ by an even power are aligned by
    /// shifting the coefficients of the lower one.
    pub fn add(&self, other: &Self) -> Result<Self> {
        let mut out = self.clone();
        for (&ch, b) in &other.terms {
            let merged = match out.terms.get(&ch) {
                None => b.clone(),
                Some(a) => {
                    let (hi, lo) = if a.m_power >= b.m_power { (a, b) } else { (b, a) };
                    let gap = hi.m_power - lo.m_power;
                    if gap % 2 != 0 {
                        return Err(SeriesError::MismatchedPower {
                            left: a.m_power,
                            right: b.m_power,
                        });
                    }
                    let shift = (gap / 2) as usize;
                    let mut shifted = vec![Rational::zero(); shift];
                    shifted.extend(lo.series.coeffs().iter().cloned());
                    let lo_series = PowerSeries::new(shifted)?;
                    ChannelTerm {
                        series: hi.series.add(&lo_series),
                        m_power: hi.m_power,
                    }
                }
            };
            out.terms.insert(ch, merged);
        }
        Ok(out)
    }

    /// Nonzero coefficients whose total `m` power is at least `-max_inverse_power`.
    pub fn monomials(&self, max_inverse_power: i32) -> BTreeMap<Monomial, Rational> {
        let mut out = BTreeMap::new();
        for (&channel, term) in &self.terms {
            for (j, c) in term.series.coeffs().iter().enumerate() {
                let m_power = term.m_power - 2 * j as i32;
                if m_power < -max_inverse_power || c.is_zero() {
                    continue;
                }
                out.insert(
                    Monomial {
                        channel,
                        o2_power: j,
                        m_power,
                    },
                    c.clone(),
                );
            }
        }
        out
    }
}

/// Linear-in-field channels of the closed-form Hamiltonian with
/// `1/(ε(ε+m))` and `(2ε²−m²)/(ε⁴(ε+m)²)` expanded to order `K` in `t`.
pub fn channel_expand_corrected(order: usize) -> Result<ChannelPoly> {
    if order < 2 {
        return Err(SeriesError::OrderTooLow { min: 2, got: order });
    }
    let spin = channel_coeff_spin(order)?;
    let darwin2 = channel_coeff_darwin2(order)?;
    Ok(ChannelPoly::new()
        .with(Channel::Unit, PowerSeries::one(order), 0)
        .with(Channel::C1, spin.scale(&rat(-1, 4)), -2)
        .with(Channel::C2, darwin2.scale(&rat(1, 32)), -4))
}

/// Linear-in-field channels of the eighth-order series Hamiltonian, padded to order `K`.
pub fn channel_expand_series_linear(order: usize) -> Result<ChannelPoly> {
    if order < 2 {
        return Err(SeriesError::OrderTooLow { min: 2, got: order });
    }
    let poly = |c: &[(i64, i64)]| -> Result<PowerSeries> {
        Ok(PowerSeries::from_ratios(c)?.truncate(order))
    };
    // −(1/128m⁶){8m⁴−6m²𝓞²+5𝓞⁴, C1} = m⁻²(−2/128)(8 − 6t + 5t²) ∘ C1.
    let c1 = poly(&[(8, 1), (-6, 1), (5, 1)])?.scale(&rat(-2, 128));
    // (1/512m⁶){2m²−𝓞², C2} = m⁻⁴(2/512)(2 − t) ∘ C2.
    let c2 = poly(&[(2, 1), (-1, 1)])?.scale(&rat(2, 512));
    let c3 = poly(&[(11, 1024)])?;
    Ok(ChannelPoly::new()
        .with(Channel::Unit, PowerSeries::one(order), 0)
        .with(Channel::C1, c1, -2)
        .with(Channel::C2, c2, -4)
        .with(Channel::C3, c3, -6))
}

/// Comparison of the two channel expansions through `m^{-order}`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ChannelAgreement {
    pub max_inverse_power: i32,
    /// Series minus closed form, nonzero entries only.
    pub difference: BTreeMap<Monomial, Rational>,
}

impl ChannelAgreement {
    pub fn channel_matches(&self, channel: Channel) -> bool {
        self.difference.keys().all(|m| m.channel != channel)
    }

    /// The only discrepancy is the `11/1024·m⁻⁶` term on `C3`.
    pub fn isolates_c3(&self) -> bool {
        let expected = Monomial {
            channel: Channel::C3,
            o2_power: 0,
            m_power: -6,
        };
        self.difference.len() == 1 && self.difference.get(&expected) == Some(&rat(11, 1024))
    }
}

pub fn channel_agreement(order: usize) -> Result<ChannelAgreement> {
    let max_inverse_power = 6;
    let corrected = channel_expand_corrected(order)?.monomials(max_inverse_power);
    let series = channel_expand_series_linear(order)?.monomials(max_inverse_power);
    let mut difference = series;
    for (k, v) in corrected {
        let entry = difference.entry(k).or_insert_with(Rational::zero);
        *entry -= v;
    }
    difference.retain(|_, v| !v.is_zero());
    Ok(ChannelAgreement {
        max_inverse_power,
        difference,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ps(c: &[(i64, i64)]) -> PowerSeries {
        PowerSeries::from_ratios(c).unwrap()
    }

    #[test]
    fn corrected_channels_in_anticommutator_form() {
        let cp = channel_expand_corrected(2).unwrap();
        assert_eq!(
            cp.anticommutator_form(Channel::C1).unwrap(),
            ps(&[(1, 2), (-3, 8), (5, 16)]).scale(&rat(-1, 8))
        );
        let c2 = channel_expand_corrected(2).unwrap().anticommutator_form(Channel::C2).unwrap();
        assert_eq!(c2.truncate(1), ps(&[(1, 4), (-1, 8)]).scale(&rat(1, 64)));
        assert!(cp.term(Channel::C3).is_none());
    }

    #[test]
    fn series_channels() {
        let cp = channel_expand_series_linear(2).unwrap();
        let c3 = cp.term(Channel::C3).unwrap();
        assert_eq!(c3.series.coeff(0), rat(11, 1024));
        assert_eq!(c3.m_power, -6);
        // −(1/128)·8 on {1, C1} at m⁻².
        assert_eq!(cp.anticommutator_form(Channel::C1).unwrap().coeff(0), rat(-1, 16));
    }

    #[test]
    fn agreement_through_sixth_inverse_power() {
        for k in [2, 3, 5] {
            let a = channel_agreement(k).unwrap();
            assert!(a.channel_matches(Channel::Unit));
            assert!(a.channel_matches(Channel::C1));
            assert!(a.channel_matches(Channel::C2));
            assert!(!a.channel_matches(Channel::C3));
            assert!(a.isolates_c3(), "{:?}", a.difference);
        }
    }

    #[test]
    fn monomials_drop_zeros_and_high_orders() {
        let cp = ChannelPoly::new().with(Channel::C1, ps(&[(1, 1), (0, 1), (3, 1)]), -2);
        let m = cp.monomials(6);
        assert_eq!(m.len(), 2);
        assert_eq!(cp.monomials(4).len(), 1);
    }

    #[test]
    fn add_aligns_offsets() {
        let a = ChannelPoly::new().with(Channel::C1, ps(&[(1, 1), (1, 1), (1, 1)]), -2);
        let b = ChannelPoly::new().with(Channel::C1, ps(&[(2, 1), (0, 1)]), -4);
        let s = a.add(&b).unwrap();
        assert_eq!(s.term(Channel::C1).unwrap().series, ps(&[(1, 1), (3, 1), (1, 1)]));
        let odd = ChannelPoly::new().with(Channel::C1, ps(&[(1, 1)]), -3);
        assert!(matches!(a.add(&odd), Err(SeriesError::MismatchedPower { .. })));
    }

    #[test]
    fn order_checks() {
        assert!(channel_expand_corrected(1).is_err());
        assert!(channel_expand_series_linear(1).is_err());
    }
}
