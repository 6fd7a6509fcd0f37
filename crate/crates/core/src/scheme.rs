//! Zero-dimensional schemes built from fat points and residue points.
//!
//! Conditions are symbolic: a point is an opaque [`PointId`], and positions
//! only exist once the oracle samples a geometry. Points on the reference
//! curve `C` carry either a fat point `P^m` or a residue point `D^i(P^m)`,
//! the scheme of `I_P^{m-1} ∩ (I_C^i + I_P^m)`.
//!
//! Notation (comma separated, `^k` repeats an item k times):
//!
//! | item       | meaning                                        |
//! |------------|------------------------------------------------|
//! | `m`        | free fat point of multiplicity `m`             |
//! | `C:m`      | fat point of multiplicity `m` on `C`           |
//! | `C:D(m,i)` | residue point `D^i(P^m)` on `C`                |
//! | `C:Tm`     | `D^1(P^(m+1))`: multiplicity `m`, tangent to C |
//!
//! The empty scheme is the empty string.

use std::fmt;

use serde::{Deserialize, Serialize};

use crate::field::Poly;
use crate::picard::{format_runs, split_run, PicClass};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum SchemeError {
    #[error("invalid condition {0}")]
    InvalidCondition(String),
    #[error("duplicate point identifier {0}")]
    DuplicateId(u32),
    #[error("constrained point {0} requires a reference curve")]
    MissingCurve(u32),
    #[error("scheme is attached to a different reference curve")]
    CurveMismatch,
    #[error("no symbolic trace/residue rule for D^{i}(P^{m}) (only simple and tangency residues)")]
    UnsupportedResidue { m: u32, i: u32 },
    #[error("cannot parse scheme '{input}': {reason}")]
    Parse { input: String, reason: String },
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub struct PointId(pub u32);

impl fmt::Display for PointId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "P{}", self.0)
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum PointKind {
    FreeFat(u32),
    CurveFat(u32),
    /// `D^i(P^m)`
    CurveResidue { m: u32, i: u32 },
}

impl PointKind {
    /// Tangency condition at a point of multiplicity `m`: `D^1(P^(m+1))`.
    pub fn tangency(m: u32) -> PointKind {
        PointKind::CurveResidue { m: m + 1, i: 1 }
    }

    /// Tangency at a point of multiplicity `m` on the blow-up; for `m = 0`
    /// this is a simple point on `C`.
    pub fn tangent_branch(m: u32) -> PointKind {
        if m == 0 {
            PointKind::CurveFat(1)
        } else {
            PointKind::tangency(m)
        }
    }

    pub fn is_constrained(self) -> bool {
        !matches!(self, PointKind::FreeFat(_))
    }

    /// Length of the local ring; equals the number of linear conditions.
    pub fn degree(self) -> u64 {
        match self {
            PointKind::FreeFat(m) | PointKind::CurveFat(m) => {
                let m = m as u64;
                m * (m + 1) / 2
            }
            PointKind::CurveResidue { m, i } => {
                let m = m as u64;
                m * (m - 1) / 2 + i as u64
            }
        }
    }

    /// Multiplicity of the support (the `m` of `P^m` or `D^i(P^m)`).
    pub fn multiplicity(self) -> u32 {
        match self {
            PointKind::FreeFat(m) | PointKind::CurveFat(m) => m,
            PointKind::CurveResidue { m, .. } => m,
        }
    }

    pub fn is_simple_residue(self) -> bool {
        matches!(self, PointKind::CurveResidue { m, i } if i + 1 == m)
    }

    fn validate(self) -> Result<(), SchemeError> {
        if let PointKind::CurveResidue { m, i } = self {
            if m == 0 || i >= m {
                return Err(SchemeError::InvalidCondition(format!("D^{}(P^{})", i, m)));
            }
        }
        Ok(())
    }

    /// Canonical form; `None` for the empty scheme.
    fn normalized(self) -> Option<PointKind> {
        match self {
            PointKind::FreeFat(0) | PointKind::CurveFat(0) => None,
            PointKind::CurveResidue { m, i: 0 } => PointKind::CurveFat(m - 1).normalized(),
            k => Some(k),
        }
    }

    /// Degree of the trace on `C`.
    pub fn trace_degree(self) -> Result<u64, SchemeError> {
        match self {
            PointKind::FreeFat(_) => Ok(0),
            PointKind::CurveFat(m) => Ok(m as u64),
            PointKind::CurveResidue { m, i } if i + 1 == m => {
                Ok(if m > 1 { m as u64 } else { 0 })
            }
            PointKind::CurveResidue { m, i: 1 } => Ok(m as u64),
            PointKind::CurveResidue { m, i } => Err(SchemeError::UnsupportedResidue { m, i }),
        }
    }

    /// Residue with respect to `C`; `None` when it is empty.
    pub fn residue(self) -> Result<Option<PointKind>, SchemeError> {
        let out = match self {
            PointKind::FreeFat(m) => PointKind::FreeFat(m),
            PointKind::CurveFat(m) => PointKind::CurveFat(m - 1),
            PointKind::CurveResidue { m, i } if i + 1 == m => {
                if m == 1 {
                    return Ok(None);
                }
                PointKind::CurveResidue { m: m - 1, i: m - 2 }
            }
            PointKind::CurveResidue { m, i: 1 } => PointKind::CurveFat(m - 2),
            PointKind::CurveResidue { m, i } => {
                return Err(SchemeError::UnsupportedResidue { m, i })
            }
        };
        Ok(out.normalized())
    }
}

impl fmt::Display for PointKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match *self {
            PointKind::FreeFat(m) => write!(f, "{}", m),
            PointKind::CurveFat(m) => write!(f, "C:{}", m),
            PointKind::CurveResidue { m, i: 1 } => write!(f, "C:T{}", m - 1),
            PointKind::CurveResidue { m, i } => write!(f, "C:D({},{})", m, i),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PointCondition {
    pub id: PointId,
    pub kind: PointKind,
}

/// Reference curve `C` of the constrained part.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum CurveDescriptor {
    /// The generic smooth plane curve of the given degree.
    Generic(u32),
    /// An explicit smooth curve.
    Explicit(Poly),
}

impl CurveDescriptor {
    pub fn degree(&self) -> u32 {
        match self {
            CurveDescriptor::Generic(a) => *a,
            CurveDescriptor::Explicit(p) => p.total_degree().unwrap_or(0),
        }
    }

    /// Genus of a smooth plane curve of this degree.
    pub fn genus(&self) -> i64 {
        let a = self.degree() as i64;
        (a - 1) * (a - 2) / 2
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Default)]
pub struct ZeroScheme {
    conditions: Vec<PointCondition>,
    ref_curve: Option<CurveDescriptor>,
}

impl ZeroScheme {
    pub fn empty() -> Self {
        Self::default()
    }

    /// Validates, normalizes away empty conditions and checks identifiers.
    pub fn new(
        conditions: impl IntoIterator<Item = PointCondition>,
        ref_curve: Option<CurveDescriptor>,
    ) -> Result<Self, SchemeError> {
        let mut out = ZeroScheme {
            conditions: Vec::new(),
            ref_curve,
        };
        for c in conditions {
            out.push(c)?;
        }
        Ok(out)
    }

    /// Free fat points `P_1^{m_1}, ..., P_r^{m_r}` with ids `1..=r`.
    pub fn free_points(mults: &[u32]) -> Self {
        Self::new(
            mults.iter().enumerate().map(|(k, &m)| PointCondition {
                id: PointId(k as u32 + 1),
                kind: PointKind::FreeFat(m),
            }),
            None,
        )
        .expect("free points are always valid")
    }

    pub fn push(&mut self, c: PointCondition) -> Result<(), SchemeError> {
        c.kind.validate()?;
        if self.conditions.iter().any(|o| o.id == c.id) {
            return Err(SchemeError::DuplicateId(c.id.0));
        }
        let Some(kind) = c.kind.normalized() else {
            return Ok(());
        };
        if kind.is_constrained() && self.ref_curve.is_none() {
            return Err(SchemeError::MissingCurve(c.id.0));
        }
        self.conditions.push(PointCondition { id: c.id, kind });
        Ok(())
    }

    /// Appends a condition with the next unused identifier.
    pub fn push_kind(&mut self, kind: PointKind) -> Result<PointId, SchemeError> {
        let id = PointId(self.next_id());
        self.push(PointCondition { id, kind })?;
        Ok(id)
    }

    pub fn next_id(&self) -> u32 {
        self.conditions.iter().map(|c| c.id.0).max().unwrap_or(0) + 1
    }

    pub fn conditions(&self) -> &[PointCondition] {
        &self.conditions
    }

    pub fn ref_curve(&self) -> Option<&CurveDescriptor> {
        self.ref_curve.as_ref()
    }

    pub fn with_curve(mut self, curve: CurveDescriptor) -> Self {
        self.ref_curve = Some(curve);
        self
    }

    pub fn len(&self) -> usize {
        self.conditions.len()
    }

    pub fn is_empty(&self) -> bool {
        self.conditions.is_empty()
    }

    pub fn get(&self, id: PointId) -> Option<&PointCondition> {
        self.conditions.iter().find(|c| c.id == id)
    }

    pub fn free(&self) -> impl Iterator<Item = &PointCondition> {
        self.conditions.iter().filter(|c| !c.kind.is_constrained())
    }

    pub fn constrained(&self) -> impl Iterator<Item = &PointCondition> {
        self.conditions.iter().filter(|c| c.kind.is_constrained())
    }

    pub fn max_multiplicity(&self) -> u32 {
        self.conditions
            .iter()
            .map(|c| c.kind.multiplicity())
            .max()
            .unwrap_or(0)
    }

    pub fn degree(&self) -> u64 {
        self.conditions.iter().map(|c| c.kind.degree()).sum()
    }

    /// `chi(I_Z(d)) = (d+1)(d+2)/2 - deg Z`.
    pub fn chi(&self, d: i64) -> i64 {
        forms_dim(d) as i64 - self.degree() as i64
    }

    fn check_curve(&self, curve: &CurveDescriptor) -> Result<(), SchemeError> {
        match &self.ref_curve {
            Some(c) if c == curve => Ok(()),
            Some(_) => Err(SchemeError::CurveMismatch),
            None if self.constrained().next().is_none() => Ok(()),
            None => Err(SchemeError::CurveMismatch),
        }
    }

    /// Degree of `Z ∩ C`.
    pub fn trace_degree(&self, curve: &CurveDescriptor) -> Result<u64, SchemeError> {
        self.check_curve(curve)?;
        self.conditions.iter().map(|c| c.kind.trace_degree()).sum()
    }

    /// Residual scheme `(I_Z : I_C)`, keeping identifiers.
    pub fn residue(&self, curve: &CurveDescriptor) -> Result<ZeroScheme, SchemeError> {
        self.check_curve(curve)?;
        let mut out = ZeroScheme {
            conditions: Vec::new(),
            ref_curve: self.ref_curve.clone(),
        };
        for c in &self.conditions {
            if let Some(kind) = c.kind.residue()? {
                out.conditions.push(PointCondition { id: c.id, kind });
            }
        }
        Ok(out)
    }

    /// Parses the notation above, numbering points `1, 2, ...`.
    pub fn parse(s: &str, curve: Option<CurveDescriptor>) -> Result<Self, SchemeError> {
        let err = |reason: String| SchemeError::Parse {
            input: s.to_string(),
            reason,
        };
        let mut out = ZeroScheme {
            conditions: Vec::new(),
            ref_curve: curve,
        };
        let mut next = 1u32;
        let trimmed = s.trim();
        if trimmed.is_empty() {
            return Ok(out);
        }
        for token in split_top_level(trimmed) {
            let token = token.trim();
            let (body, count) = split_run(token).map_err(err)?;
            let kind = parse_item(body.trim()).map_err(err)?;
            for _ in 0..count {
                out.push(PointCondition {
                    id: PointId(next),
                    kind,
                })?;
                next += 1;
            }
        }
        Ok(out)
    }
}

impl fmt::Display for ZeroScheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let kinds: Vec<String> = self.conditions.iter().map(|c| c.kind.to_string()).collect();
        write!(f, "{}", format_runs(&kinds))
    }
}

/// Number of degree-`d` forms in three variables, 0 for negative `d`.
pub fn forms_dim(d: i64) -> u64 {
    if d < 0 {
        0
    } else {
        let d = d as u64;
        (d + 1) * (d + 2) / 2
    }
}

fn split_top_level(s: &str) -> Vec<&str> {
    let mut out = Vec::new();
    let mut depth = 0i32;
    let mut start = 0;
    for (k, ch) in s.char_indices() {
        match ch {
            '(' => depth += 1,
            ')' => depth -= 1,
            ',' if depth == 0 => {
                out.push(&s[start..k]);
                start = k + 1;
            }
            _ => {}
        }
    }
    out.push(&s[start..]);
    out
}

fn parse_u32(s: &str) -> Result<u32, String> {
    s.trim()
        .parse()
        .map_err(|_| format!("bad integer '{}'", s.trim()))
}

fn parse_item(body: &str) -> Result<PointKind, String> {
    let Some(rest) = body.strip_prefix("C:") else {
        let m = parse_u32(body)?;
        if m == 0 {
            return Err("multiplicity must be positive".into());
        }
        return Ok(PointKind::FreeFat(m));
    };
    let rest = rest.trim();
    if let Some(inner) = rest.strip_prefix("D(").and_then(|r| r.strip_suffix(')')) {
        let (m, i) = inner
            .split_once(',')
            .ok_or_else(|| format!("expected D(m,i), got '{}'", rest))?;
        let (m, i) = (parse_u32(m)?, parse_u32(i)?);
        if m == 0 || i >= m {
            return Err(format!("D({},{}) needs 0 <= i < m", m, i));
        }
        return Ok(PointKind::CurveResidue { m, i });
    }
    if let Some(m) = rest.strip_prefix('T') {
        let m = parse_u32(m)?;
        if m == 0 {
            return Err("tangency needs multiplicity >= 1".into());
        }
        return Ok(PointKind::tangency(m));
    }
    let m = parse_u32(rest)?;
    if m == 0 {
        return Err("multiplicity must be positive".into());
    }
    Ok(PointKind::CurveFat(m))
}

/// Free fat points `P_i^{max(m_i, 0)}` of a class, dropping zeros. The
/// identifier of `P_i` is `i` (1-based), so dropped entries leave gaps.
pub fn clamp_nonneg(class: &PicClass) -> ZeroScheme {
    ZeroScheme::new(
        class
            .mults
            .iter()
            .enumerate()
            .filter(|(_, &m)| m > 0)
            .map(|(k, &m)| PointCondition {
                id: PointId(k as u32 + 1),
                kind: PointKind::FreeFat(m.min(u32::MAX as i64) as u32),
            }),
        None,
    )
    .expect("clamped free points are valid")
}

#[cfg(test)]
mod tests {
    use super::*;

    fn cubic() -> CurveDescriptor {
        CurveDescriptor::Generic(3)
    }

    fn z(s: &str) -> ZeroScheme {
        ZeroScheme::parse(s, Some(cubic())).unwrap()
    }

    #[test]
    fn degrees() {
        assert_eq!(z("3").degree(), 6);
        assert_eq!(z("C:D(2,1)").degree(), 2);
        assert_eq!(PointKind::CurveResidue { m: 1, i: 0 }.degree(), 0);
        assert!(z("C:D(1,0)").is_empty());
    }

    #[test]
    fn trace_examples() {
        assert_eq!(z("C:4").trace_degree(&cubic()).unwrap(), 4);
        assert_eq!(z("C:D(3,2)").trace_degree(&cubic()).unwrap(), 3);
        assert_eq!(PointKind::CurveResidue { m: 1, i: 0 }.trace_degree().unwrap(), 0);
        assert_eq!(z("C:T3").trace_degree(&cubic()).unwrap(), 4);
        assert!(matches!(
            z("C:D(5,2)").trace_degree(&cubic()),
            Err(SchemeError::UnsupportedResidue { m: 5, i: 2 })
        ));
    }

    #[test]
    fn residue_examples() {
        assert_eq!(z("C:3").residue(&cubic()).unwrap(), z("C:2"));
        // D^1(O^(n+1)) -> O^(n-1)
        for n in 1..6u32 {
            let r = z(&format!("C:T{}", n)).residue(&cubic()).unwrap();
            let expect = if n == 1 { z("") } else { z(&format!("C:{}", n - 1)) };
            assert_eq!(r, expect);
        }
        assert_eq!(z("5").residue(&cubic()).unwrap(), z("5"));
        assert_eq!(z("C:D(4,3)").residue(&cubic()).unwrap(), z("C:D(3,2)"));
    }

    #[test]
    fn repeated_residue_empties_fat_point() {
        for m in 1..7 {
            let mut s = z(&format!("C:{}", m));
            for _ in 0..m {
                s = s.residue(&cubic()).unwrap();
            }
            assert!(s.is_empty());
        }
    }

    #[test]
    fn degree_accounting_closes() {
        let s = z("2^3,C:3^2,C:D(4,3),C:T2,C:D(2,1),1");
        let t = s.trace_degree(&cubic()).unwrap();
        let r = s.residue(&cubic()).unwrap();
        assert_eq!(s.degree(), t + r.degree());
    }

    #[test]
    fn residue_degree_monotone_in_i() {
        for m in 1..8u32 {
            let degs: Vec<u64> = (0..m).map(|i| PointKind::CurveResidue { m, i }.degree()).collect();
            assert!(degs.windows(2).all(|w| w[0] < w[1]));
            assert_eq!(degs[0], PointKind::FreeFat(m - 1).degree());
        }
    }

    #[test]
    fn clamp() {
        let s = clamp_nonneg(&"5;2,-1,3".parse().unwrap());
        assert_eq!(s.to_string(), "2,3");
        assert_eq!(s.conditions()[1].id, PointId(3));
        assert!(clamp_nonneg(&"5;0,0".parse().unwrap()).is_empty());
        assert_eq!(clamp_nonneg(&"6;2^9".parse().unwrap()).to_string(), "2^9");
    }

    #[test]
    fn notation_round_trip() {
        for s in ["2^9", "C:3^4", "C:D(5,4)", "C:T2", "", "3,C:2,C:T1^3,C:D(4,2),1^5"] {
            assert_eq!(z(s).to_string(), s);
        }
        assert_eq!(z("C:D(2,1)").to_string(), "C:T1");
        assert!(ZeroScheme::parse("C:3", None).is_err());
        assert!(ZeroScheme::parse("C:D(3,3)", Some(cubic())).is_err());
        assert!(ZeroScheme::parse("0", None).is_err());
    }

    #[test]
    fn duplicate_ids_rejected() {
        let c = PointCondition {
            id: PointId(1),
            kind: PointKind::FreeFat(2),
        };
        assert_eq!(
            ZeroScheme::new([c, c], None).unwrap_err(),
            SchemeError::DuplicateId(1)
        );
    }
}
