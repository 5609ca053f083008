use std::collections::BTreeMap;
use std::fmt;

use num_traits::{One, Zero};

use crate::channel::{Channel, ChannelPoly};
use crate::{rat, Rational, Result, SeriesError};

#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Letter {
    O,
    F,
}

/// Noncommutative polynomial over `{O, F}`; each term carries a power of `m`.
#[derive(Debug, Clone, Default, PartialEq, Eq)]
pub struct WordPoly {
    terms: BTreeMap<(Vec<Letter>, i32), Rational>,
}

impl WordPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn word(letters: &[Letter]) -> Self {
        Self::term(letters.to_vec(), 0, Rational::one())
    }

    pub fn term(letters: Vec<Letter>, m_power: i32, coeff: Rational) -> Self {
        let mut out = Self::zero();
        out.push(letters, m_power, coeff);
        out
    }

    fn push(&mut self, letters: Vec<Letter>, m_power: i32, coeff: Rational) {
        let key = (letters, m_power);
        let entry = self.terms.entry(key.clone()).or_insert_with(Rational::zero);
        *entry += coeff;
        if entry.is_zero() {
            self.terms.remove(&key);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn coefficient(&self, letters: &[Letter], m_power: i32) -> Rational {
        self.terms
            .get(&(letters.to_vec(), m_power))
            .cloned()
            .unwrap_or_else(Rational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&[Letter], i32, &Rational)> {
        self.terms.iter().map(|((w, p), c)| (w.as_slice(), *p, c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let mut out = self.clone();
        for ((w, p), c) in &other.terms {
            out.push(w.clone(), *p, c.clone());
        }
        out
    }

    pub fn scale(&self, s: &Rational) -> Self {
        let mut out = Self::zero();
        for ((w, p), c) in &self.terms {
            out.push(w.clone(), *p, c * s);
        }
        out
    }

    pub fn mul(&self, other: &Self) -> Self {
        let mut out = Self::zero();
        for ((wa, pa), ca) in &self.terms {
            for ((wb, pb), cb) in &other.terms {
                let mut w = wa.clone();
                w.extend_from_slice(wb);
                out.push(w, pa + pb, ca * cb);
            }
        }
        out
    }

    pub fn commutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self).scale(&-Rational::one()))
    }

    pub fn anticommutator(&self, other: &Self) -> Self {
        self.mul(other).add(&other.mul(self))
    }

    /// Every word contains exactly one `F`.
    pub fn is_linear_in_field(&self) -> bool {
        self.terms.keys().all(|(w, _)| w.iter().filter(|l| **l == Letter::F).count() == 1)
    }

    /// Some word `O^a F O^b` has odd `a`.
    pub fn has_odd_split(&self) -> bool {
        self.terms.keys().any(|(w, _)| {
            let a = w.iter().take_while(|l| **l == Letter::O).count();
            a % 2 == 1 && w.get(a) == Some(&Letter::F)
        })
    }
}

impl fmt::Display for WordPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return f.write_str("0");
        }
        for (i, ((w, p), c)) in self.terms.iter().enumerate() {
            if i > 0 {
                f.write_str(" + ")?;
            }
            write!(f, "({c})·")?;
            for l in w {
                f.write_str(match l {
                    Letter::O => "O",
                    Letter::F => "F",
                })?;
            }
            if *p != 0 {
                write!(f, "·m^{p}")?;
            }
        }
        Ok(())
    }
}

fn o_power(n: usize) -> WordPoly {
    WordPoly::word(&vec![Letter::O; n])
}

/// Words of one channel bracket.
pub(crate) fn channel_word(channel: Channel) -> WordPoly {
    let f = WordPoly::word(&[Letter::F]);
    let o = o_power(1);
    let o2 = o_power(2);
    let c1 = o.commutator(&o.commutator(&f));
    match channel {
        Channel::Unit => f,
        Channel::C1 => c1,
        Channel::C2 => o2.commutator(&o2.commutator(&f)),
        Channel::C3 => o2.commutator(&o2.commutator(&c1)),
    }
}

/// Expands `m^p c_j t^j ∘ C` into words by `[A,B] → AB − BA`, `{A,B} → AB + BA`,
/// keeping terms with at most `max_degree` letters `O`.
pub fn word_expand(cp: &ChannelPoly, max_degree: usize) -> Result<WordPoly> {
    let mut out = WordPoly::zero();
    for (channel, term) in cp.terms() {
        let base = channel.o_degree();
        if base > max_degree {
            continue;
        }
        let needed = (max_degree - base) / 2;
        if needed > term.series.order() {
            return Err(SeriesError::DegreeOverflow {
                requested: max_degree,
                needed,
                available: term.series.order(),
            });
        }
        let bracket = channel_word(channel);
        for j in 0..=needed {
            let c = term.series.coeff(j);
            if c.is_zero() {
                continue;
            }
            let m_power = term.m_power - 2 * j as i32;
            let sym = if j == 0 {
                bracket.clone()
            } else {
                o_power(2 * j).anticommutator(&bracket).scale(&rat(1, 2))
            };
            let shifted = sym.mul(&WordPoly::term(Vec::new(), m_power, Rational::one()));
            out = out.add(&shifted.scale(&c));
        }
    }
    Ok(out)
}
