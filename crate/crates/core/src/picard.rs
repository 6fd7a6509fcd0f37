//! Picard lattice of the plane blown up at `r` points.
//!
//! A class `(d; m_1, ..., m_r)` stands for `dH - sum m_i E_i`. Pairing,
//! Euler characteristic and arithmetic genus follow the usual Riemann-Roch
//! formulas on the blow-up; multiplicities may be negative and are never
//! clamped here.
//!
//! Textual notation is `d;m1,m2,...` with run-length shorthand `m^k`, e.g.
//! `6;2^9` or `-3;-1^9`. Printing groups every run of two or more equal
//! entries; a class with no points prints as the bare degree.

use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Deserializer, Serialize, Serializer};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PicardError {
    #[error("classes live on different blow-ups ({0} vs {1} points)")]
    DimensionMismatch(usize, usize),
    #[error("degree {0} is below -2; h^2 vanishing does not apply")]
    OutOfRange(i64),
    #[error("integer overflow in lattice arithmetic")]
    Overflow,
    #[error("cannot parse class '{input}': {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct PicClass {
    pub d: i64,
    pub mults: Vec<i64>,
}

fn narrow(v: i128) -> Result<i64, PicardError> {
    i64::try_from(v).map_err(|_| PicardError::Overflow)
}

fn tri(m: i128) -> i128 {
    m * (m + 1) / 2
}

impl PicClass {
    pub fn new(d: i64, mults: Vec<i64>) -> Self {
        Self { d, mults }
    }

    /// `(d; m^r)`
    pub fn uniform(d: i64, m: i64, r: usize) -> Self {
        Self::new(d, vec![m; r])
    }

    pub fn r(&self) -> usize {
        self.mults.len()
    }

    fn same_r(&self, other: &PicClass) -> Result<(), PicardError> {
        if self.r() != other.r() {
            return Err(PicardError::DimensionMismatch(self.r(), other.r()));
        }
        Ok(())
    }

    /// Pads with zero multiplicities up to `r` points.
    pub fn extended(&self, r: usize) -> PicClass {
        let mut mults = self.mults.clone();
        if mults.len() < r {
            mults.resize(r, 0);
        }
        PicClass::new(self.d, mults)
    }

    pub fn add(&self, other: &PicClass) -> Result<PicClass, PicardError> {
        self.same_r(other)?;
        Ok(PicClass::new(
            self.d.checked_add(other.d).ok_or(PicardError::Overflow)?,
            self.mults
                .iter()
                .zip(&other.mults)
                .map(|(a, b)| a.checked_add(*b).ok_or(PicardError::Overflow))
                .collect::<Result<_, _>>()?,
        ))
    }

    /// Integer multiple `k * self`.
    pub fn scaled(&self, k: i64) -> Result<PicClass, PicardError> {
        Ok(PicClass::new(
            self.d.checked_mul(k).ok_or(PicardError::Overflow)?,
            self.mults
                .iter()
                .map(|a| a.checked_mul(k).ok_or(PicardError::Overflow))
                .collect::<Result<_, _>>()?,
        ))
    }

    /// Largest multiplicity, 0 for an empty list.
    pub fn max_mult(&self) -> i64 {
        self.mults.iter().copied().max().unwrap_or(0).max(0)
    }
}

/// `d_A d_B - sum m_i n_i`.
pub fn intersect(a: &PicClass, b: &PicClass) -> Result<i64, PicardError> {
    a.same_r(b)?;
    let mut acc = a.d as i128 * b.d as i128;
    for (m, n) in a.mults.iter().zip(&b.mults) {
        acc = acc
            .checked_sub(*m as i128 * *n as i128)
            .ok_or(PicardError::Overflow)?;
    }
    narrow(acc)
}

/// Canonical class `(-3; (-1)^r)`.
pub fn canonical(r: usize) -> PicClass {
    PicClass::uniform(-3, -1, r)
}

/// `(d+1)(d+2)/2 - sum m_i(m_i+1)/2`.
pub fn chi(class: &PicClass) -> Result<i64, PicardError> {
    let d = class.d as i128;
    let mut acc = (d + 1) * (d + 2) / 2;
    for &m in &class.mults {
        acc = acc.checked_sub(tri(m as i128)).ok_or(PicardError::Overflow)?;
    }
    narrow(acc)
}

/// `(d-1)(d-2)/2 - sum m_i(m_i-1)/2`.
pub fn genus(class: &PicClass) -> Result<i64, PicardError> {
    let d = class.d as i128;
    let mut acc = (d - 1) * (d - 2) / 2;
    for &m in &class.mults {
        let m = m as i128;
        acc = acc
            .checked_sub(m * (m - 1) / 2)
            .ok_or(PicardError::Overflow)?;
    }
    narrow(acc)
}

/// `max(chi - 1, -1)`, defined for `d >= -2`.
pub fn expected_dim(class: &PicClass) -> Result<i64, PicardError> {
    if class.d < -2 {
        return Err(PicardError::OutOfRange(class.d));
    }
    Ok((chi(class)? - 1).max(-1))
}

/// Componentwise difference `D - C`.
pub fn residual(d: &PicClass, c: &PicClass) -> Result<PicClass, PicardError> {
    d.add(&c.scaled(-1)?)
}

impl fmt::Display for PicClass {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.d)?;
        if self.mults.is_empty() {
            return Ok(());
        }
        write!(f, ";{}", format_runs(&self.mults))
    }
}

/// `2,2,2,1` -> `2^3,1`.
pub(crate) fn format_runs<T: PartialEq + fmt::Display>(items: &[T]) -> String {
    let mut parts = Vec::new();
    let mut i = 0;
    while i < items.len() {
        let mut j = i + 1;
        while j < items.len() && items[j] == items[i] {
            j += 1;
        }
        if j - i >= 2 {
            parts.push(format!("{}^{}", items[i], j - i));
        } else {
            parts.push(items[i].to_string());
        }
        i = j;
    }
    parts.join(",")
}

/// Splits `body^count` into body and a run length (1 when absent).
pub(crate) fn split_run(token: &str) -> Result<(&str, usize), String> {
    match token.rsplit_once('^') {
        None => Ok((token, 1)),
        Some((body, count)) => {
            let count: usize = count
                .trim()
                .parse()
                .map_err(|_| format!("bad run length in '{}'", token))?;
            if count == 0 {
                return Err(format!("zero run length in '{}'", token));
            }
            Ok((body, count))
        }
    }
}

impl FromStr for PicClass {
    type Err = PicardError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = |reason: String| PicardError::Parse {
            input: s.to_string(),
            reason,
        };
        let s_trim = s.trim();
        let (deg, rest) = match s_trim.split_once(';') {
            Some((d, r)) => (d, Some(r)),
            None => (s_trim, None),
        };
        let d: i64 = deg
            .trim()
            .parse()
            .map_err(|_| err(format!("bad degree '{}'", deg.trim())))?;
        let mut mults = Vec::new();
        if let Some(rest) = rest.filter(|r| !r.trim().is_empty()) {
            for token in rest.split(',') {
                let token = token.trim();
                let (body, count) = split_run(token).map_err(err)?;
                let m: i64 = body
                    .trim()
                    .parse()
                    .map_err(|_| err(format!("bad multiplicity '{}'", body.trim())))?;
                if mults.len() + count > 50_000_000 {
                    return Err(err("too many points".into()));
                }
                mults.extend(std::iter::repeat(m).take(count));
            }
        }
        Ok(PicClass::new(d, mults))
    }
}

impl Serialize for PicClass {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for PicClass {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> PicClass {
        s.parse().unwrap()
    }

    #[test]
    fn pairing_examples() {
        assert_eq!(intersect(&c("6;2^9"), &c("3;1^9")).unwrap(), 0);
        assert_eq!(intersect(&c("5"), &c("7")).unwrap(), 35);
        let w = canonical(9);
        assert_eq!(intersect(&w, &w).unwrap(), 0);
        assert!(matches!(
            intersect(&c("1;1"), &c("1;1,1")),
            Err(PicardError::DimensionMismatch(1, 2))
        ));
    }

    #[test]
    fn canonical_classes() {
        assert_eq!(canonical(0), c("-3"));
        assert_eq!(canonical(2), c("-3;-1,-1"));
    }

    #[test]
    fn chi_genus_edim() {
        assert_eq!(chi(&c("6;2^9")).unwrap(), 1);
        assert_eq!(chi(&c("2;2,2")).unwrap(), 0);
        assert_eq!(chi(&c("4;2^5")).unwrap(), 0);
        assert_eq!(genus(&c("6;2^9")).unwrap(), 1);
        assert_eq!(genus(&c("3;1^9")).unwrap(), 1);
        for a in 0..12 {
            assert_eq!(genus(&PicClass::new(a, vec![])).unwrap(), (a - 1) * (a - 2) / 2);
            assert_eq!(
                expected_dim(&PicClass::new(a, vec![])).unwrap(),
                a * (a + 3) / 2
            );
        }
        assert_eq!(expected_dim(&c("6;2^9")).unwrap(), 0);
        assert_eq!(expected_dim(&c("2;2,2,2")).unwrap(), -1);
        assert!(matches!(
            expected_dim(&c("-3;1")),
            Err(PicardError::OutOfRange(-3))
        ));
    }

    #[test]
    fn residual_examples() {
        assert_eq!(residual(&c("6;2^9"), &c("3;1^9")).unwrap(), c("3;1^9"));
        let d = c("20;2^45");
        let cc = PicClass::new(3, [vec![1; 39], vec![0; 6]].concat());
        assert_eq!(
            residual(&d, &cc).unwrap(),
            PicClass::new(17, [vec![1; 39], vec![2; 6]].concat())
        );
        assert_eq!(residual(&d, &PicClass::uniform(0, 0, 45)).unwrap(), d);
    }

    #[test]
    fn notation_round_trip() {
        for s in ["6;2^9", "5;2,-1,3", "-3;-1^9", "4", "20;2^39,1^6", "7;3,2^2,3"] {
            assert_eq!(c(s).to_string(), s);
        }
        assert_eq!(c("4;").to_string(), "4");
        assert_eq!(c(" 6 ; 2^3 , 2 ").to_string(), "6;2^4");
        assert!("x;1".parse::<PicClass>().is_err());
        assert!("3;1^0".parse::<PicClass>().is_err());
    }

    #[test]
    fn wide_arithmetic_detects_overflow() {
        let big = PicClass::new(i64::MAX, vec![]);
        assert!(matches!(chi(&big), Err(PicardError::Overflow)));
        let ok = PicClass::new(3_000_000_000, vec![]);
        assert_eq!(intersect(&ok, &ok).unwrap(), 9_000_000_000_000_000_000);
    }
}
