//! Hypothesis checkers for the Horace-type lemmas.
//!
//! Each checker recomputes its arithmetic side conditions from the data it
//! is given, records them as [`Check`](crate::cert::Check)s on a
//! certificate [`Node`], and returns the node together with the sub-claims
//! it depends on. A failing side condition is an error naming the
//! hypothesis; nothing is trusted from the caller.
//!
//! Leaves that need the asymptotic vanishing axiom are produced by a
//! caller-supplied [`LeafMaker`], so the same checkers serve both the
//! axiom mode and the oracle-backed mode.

use crate::cert::{Discharge, Node, Op};
use crate::picard::{self, PicClass, PicardError};
use crate::planner::find_s_vanish;
use crate::scheme::{CurveDescriptor, PointCondition, PointId, PointKind, SchemeError, ZeroScheme};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum HoraceError {
    #[error("{rule}: hypothesis {hypothesis} fails ({check})")]
    HypothesisFailed {
        rule: String,
        hypothesis: String,
        check: String,
    },
    #[error("stored alpha {stored} differs from recomputed {computed}")]
    InconsistentAlpha { stored: i64, computed: i64 },
    #[error("no discharger supplied for {0}")]
    MissingDischarger(&'static str),
    #[error("unsupported regime: {0}")]
    Unsupported(String),
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("leaf failed: {0}")]
    Leaf(String),
    #[error(transparent)]
    Picard(#[from] PicardError),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
}

/// Axiom thresholds in force for one `(a, m)`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct Thresholds {
    pub a_cfg: u32,
    pub d0: u32,
}

/// A vanishing claim to be discharged: `Z` is a winning `(d, m, a)`
/// candidate.
pub struct LeafRequest<'a> {
    pub scheme: &'a ZeroScheme,
    pub d: i64,
    pub a: u32,
    pub m: u32,
}

pub type LeafMaker<'a> = dyn Fn(&LeafRequest) -> Result<Node, HoraceError> + 'a;

/// Pushes a check and fails with the hypothesis name if it does not hold.
fn require(
    node: &mut Node,
    hypothesis: &str,
    name: &str,
    lhs: i128,
    op: Op,
    rhs: i128,
) -> Result<(), HoraceError> {
    if node.check(name, lhs, op, rhs) {
        return Ok(());
    }
    Err(HoraceError::HypothesisFailed {
        rule: node.rule.clone(),
        hypothesis: hypothesis.to_string(),
        check: node.checks.last().unwrap().to_string(),
    })
}

pub fn curve_genus(a: u32) -> i64 {
    let a = a as i64;
    (a - 1) * (a - 2) / 2
}

/// The asymptotic vanishing axiom applied to one candidate.
pub fn ah_leaf(req: &LeafRequest, th: Thresholds) -> Result<Node, HoraceError> {
    let chi = req.scheme.chi(req.d);
    let mut node = Node::new("ah-axiom", Discharge::AhAxiom)
        .param("scheme", req.scheme.to_string())
        .int("d", req.d)
        .int("a", req.a)
        .int("m", req.m)
        .int("a_cfg", th.a_cfg)
        .int("d0", th.d0)
        .param("branch", if chi <= 0 { "h0" } else { "h1" });
    require(&mut node, "a >= a(m)", "a >= a_cfg", req.a as i128, Op::Ge, th.a_cfg as i128)?;
    require(&mut node, "d >= d0(a,m)", "d >= d0", req.d as i128, Op::Ge, th.d0 as i128)?;
    Ok(node)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum VerdictKind {
    NotConfiguration,
    ConfigurationOnly,
    Candidate,
    ExtendedCandidate,
}

#[derive(Clone, Debug, PartialEq)]
pub struct CandidateVerdict {
    pub kind: VerdictKind,
    pub reasons: Vec<crate::cert::Check>,
}

/// Classifies `Z` as an `(m, a)`-configuration and `(d, m, a)`-candidate.
/// `h0(C, O_C(d))` is taken as `da + 1 - g`, valid for `d >= a - 2`.
pub fn classify_candidate(z: &ZeroScheme, d: i64, m: u32, a: u32) -> Result<CandidateVerdict, HoraceError> {
    if d < a as i64 - 2 {
        return Err(HoraceError::Unsupported(format!(
            "d = {} below a - 2 = {}",
            d,
            a as i64 - 2
        )));
    }
    let mut node = Node::new("candidate", Discharge::Arithmetic);
    let bad_shape = z
        .conditions()
        .iter()
        .filter(|c| matches!(c.kind, PointKind::CurveResidue { .. }) && !c.kind.is_simple_residue())
        .count();
    let curve_ok = match z.ref_curve() {
        Some(c) if z.constrained().next().is_some() => c.degree() == a,
        _ => true,
    };
    let shape = node.check("constrained part: fat or simple residues", bad_shape as i128, Op::Eq, 0)
        & node.check("curve degree matches", curve_ok as i128, Op::Eq, 1)
        & node.check("multiplicities <= m", z.max_multiplicity() as i128, Op::Le, m as i128);
    if !shape {
        return Ok(CandidateVerdict {
            kind: VerdictKind::NotConfiguration,
            reasons: node.checks,
        });
    }
    let curve = z.ref_curve().cloned().unwrap_or(CurveDescriptor::Generic(a));
    let trace = z.trace_degree(&curve)? as i128;
    let capacity = d as i128 * a as i128 + 1 - curve_genus(a) as i128;
    let fits = node.check("trace capacity: da+1-g >= deg(Z∩C)", capacity, Op::Ge, trace);
    let chi_ok = node.check("chi(I_Z(d)) <= 0", z.chi(d) as i128, Op::Le, 0);
    let kind = match (fits, chi_ok) {
        (false, _) => VerdictKind::ConfigurationOnly,
        (true, true) => VerdictKind::Candidate,
        (true, false) => VerdictKind::ExtendedCandidate,
    };
    Ok(CandidateVerdict {
        kind,
        reasons: node.checks,
    })
}

/// Candidate node for `Z` in degree `d`, discharged by `leaf`.
pub fn candidate_node(
    z: &ZeroScheme,
    d: i64,
    m: u32,
    a: u32,
    leaf: &LeafMaker,
) -> Result<Node, HoraceError> {
    let verdict = classify_candidate(z, d, m, a)?;
    let mut node = Node::new("candidate", Discharge::Arithmetic)
        .param("scheme", z.to_string())
        .int("d", d)
        .int("m", m)
        .int("a", a)
        .param("verdict", serde_json::to_value(verdict.kind).unwrap());
    node.checks = verdict.reasons;
    if !matches!(verdict.kind, VerdictKind::Candidate | VerdictKind::ExtendedCandidate) {
        let failed = node.failed_checks().next().map(|c| c.to_string()).unwrap_or_default();
        return Err(HoraceError::HypothesisFailed {
            rule: "candidate".into(),
            hypothesis: "candidate".into(),
            check: failed,
        });
    }
    Ok(node.sub(leaf(&LeafRequest { scheme: z, d, a, m })?))
}

/// Xu's criterion: `d_res >= 3 max(m_i)` and `(d_res+3)^2 > (10/9) sum (m_i+1)^2`.
pub fn xu_ok(d_res: i64, mults: &[u32]) -> bool {
    let Some(&top) = mults.iter().max() else {
        return true;
    };
    let sum: i128 = mults.iter().map(|&m| (m as i128 + 1).pow(2)).sum();
    d_res >= 3 * top as i64 && 9 * (d_res as i128 + 3).pow(2) > 10 * sum
}

pub fn xu_node(d_res: i64, mults: &[u32]) -> Result<Node, HoraceError> {
    let base = Node::new("xu", Discharge::XuAxiom)
        .int("d", d_res)
        .ints("mults", mults.iter().map(|&m| m as i64));
    let Some(&top) = mults.iter().max() else {
        return Ok(Node {
            discharge: Discharge::Arithmetic,
            ..base
        });
    };
    let mut node = base;
    let sum: i128 = mults.iter().map(|&m| (m as i128 + 1).pow(2)).sum();
    require(&mut node, "xu", "d >= 3 max(m_i)", d_res as i128, Op::Ge, 3 * top as i128)?;
    require(
        &mut node,
        "xu",
        "9(d+3)^2 > 10 sum (m_i+1)^2",
        9 * (d_res as i128 + 3).pow(2),
        Op::Gt,
        10 * sum,
    )?;
    Ok(node)
}

/// Differential Horace step for `Z = Z0 ∪ P_1^{m_1} ∪ ... ∪ P_β^{m_β}` on a
/// generic curve of degree `a`.
pub fn check_hordiff(
    z0: &ZeroScheme,
    block: &[u32],
    d: i64,
    a: u32,
    m: u32,
    leaf: &LeafMaker,
) -> Result<Node, HoraceError> {
    let g = curve_genus(a);
    let curve = CurveDescriptor::Generic(a);
    let mut z = z0.clone();
    let mut block_ids = Vec::new();
    for &mj in block {
        block_ids.push(z.push_kind(PointKind::FreeFat(mj))?);
    }
    let trace = z0.trace_degree(&curve)? as i128;
    let beta = block.len() as i128;
    let on_curve = z0
        .constrained()
        .filter(|c| c.kind.trace_degree().map(|t| t > 0).unwrap_or(false))
        .count() as i128;
    let mut node = Node::new("hordiff", Discharge::Arithmetic)
        .param("z0", z0.to_string())
        .ints("block", block.iter().map(|&v| v as i64))
        .int("d", d)
        .int("a", a)
        .int("g", g)
        .int("beta", beta)
        .int("trace", trace);
    require(&mut node, "pre", "d > a", d as i128, Op::Gt, a as i128)?;
    require(&mut node, "pre", "chi(I_Z(d)) <= 0", z.chi(d) as i128, Op::Le, 0)?;
    require(
        &mut node,
        "ii",
        "beta == da+1-g-deg(Z∩C)",
        beta,
        Op::Eq,
        d as i128 * a as i128 + 1 - g as i128 - trace,
    )?;
    require(&mut node, "iii", "points on C + beta >= g", on_curve + beta, Op::Ge, g as i128)?;

    // residue: Z0' plus a simple residue at each moved point
    let mut t = z0.residue(&curve)?;
    if t.ref_curve().is_none() {
        t = t.with_curve(curve.clone());
    }
    for (&mj, id) in block.iter().zip(&block_ids) {
        t.push(PointCondition {
            id: *id,
            kind: PointKind::CurveResidue { m: mj, i: mj - 1 },
        })?;
    }
    node = node.param("t", t.to_string());
    let i = xu_node(d - a as i64, block)?;
    let iv = candidate_node(&t, d - a as i64, m, a, leaf)?;
    Ok(node.sub(i).sub(iv))
}

/// High-dimension proposition on `dd` with respect to `cc`.
pub fn check_highdim(dd: &PicClass, cc: &PicClass, a: u32, m: u32, th: Thresholds) -> Result<Node, HoraceError> {
    let g = picard::genus(cc)?;
    let chi = picard::chi(dd)?;
    let pairing = picard::intersect(dd, cc)?;
    let mut node = Node::new("highdim", Discharge::HighdimTheorem)
        .param("dd", dd.to_string())
        .param("cc", cc.to_string())
        .int("a", a)
        .int("m", m)
        .int("g", g)
        .int("a_cfg", th.a_cfg)
        .int("d0", th.d0)
        .param(
            "conclusions",
            serde_json::json!([
                "base-point-free",
                "geometrically-irreducible",
                "smooth",
                "transversal-to-C",
                "irreducible-intersection-with-C"
            ]),
        );
    require(&mut node, "a >= a(m)", "a >= a_cfg", a as i128, Op::Ge, th.a_cfg as i128)?;
    require(&mut node, "m_i <= m", "max m_i <= m", dd.max_mult() as i128, Op::Le, m as i128)?;
    require(&mut node, "d >= d0+1", "d >= d0 + 1", dd.d as i128, Op::Ge, th.d0 as i128 + 1)?;
    require(&mut node, "chi >= d+1", "chi(d) >= d + 1", chi as i128, Op::Ge, dd.d as i128 + 1)?;
    require(&mut node, "d.c+1-g >= a", "d.c + 1 - g >= a", pairing as i128 + 1 - g as i128, Op::Ge, a as i128)?;
    Ok(node)
}

/// Data of one application of the geometric lemma.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct HorgeoInstance {
    pub dd: PicClass,
    pub cc: PicClass,
    pub g: i64,
    pub alpha: i64,
    pub s_on_curve: usize,
    /// 1-based indices of the points carrying hypothesis 3°.
    pub spec_indices: Vec<usize>,
    pub chi_dd: i64,
}

impl HorgeoInstance {
    pub fn new(dd: PicClass, cc: PicClass, s_on_curve: usize, spec_indices: Vec<usize>) -> Result<Self, HoraceError> {
        let g = picard::genus(&cc)?;
        let alpha = -(picard::intersect(&dd, &cc)? + 1 - g);
        let chi_dd = picard::chi(&dd)?;
        Ok(HorgeoInstance {
            dd,
            cc,
            g,
            alpha,
            s_on_curve,
            spec_indices,
            chi_dd,
        })
    }
}

/// Geometric lemma. `hyp4` discharges the regularity hypothesis; `highdim`,
/// when present, discharges the irreducibility and smoothness part.
pub fn check_horgeo(inst: &HorgeoInstance, hyp4: Option<Node>, highdim: Option<Node>) -> Result<Node, HoraceError> {
    let g = picard::genus(&inst.cc)?;
    let computed = -(picard::intersect(&inst.dd, &inst.cc)? + 1 - g);
    if computed != inst.alpha || g != inst.g {
        return Err(HoraceError::InconsistentAlpha {
            stored: inst.alpha,
            computed,
        });
    }
    let a = inst.cc.d;
    let s = inst.s_on_curve as i128;
    let alpha = inst.alpha as i128;
    let ones = inst.cc.mults.iter().filter(|&&v| v == 1).count() as i128;
    let others = inst.cc.mults.iter().filter(|&&v| v != 0 && v != 1).count() as i128;
    let residual = picard::residual(&inst.dd, &inst.cc)?;
    let chi_res = picard::chi(&residual)?;
    let chi_dd = picard::chi(&inst.dd)?;
    let geometric = highdim.is_some();
    let mut node = Node::new("horgeo", Discharge::Arithmetic)
        .param("dd", inst.dd.to_string())
        .param("cc", inst.cc.to_string())
        .int("g", g)
        .int("alpha", inst.alpha)
        .int("s", inst.s_on_curve as i64)
        .ints("spec_indices", inst.spec_indices.iter().map(|&i| i as i64))
        .int("chi", chi_dd)
        .int("chi_residual", chi_res)
        .int("dim_x", chi_dd - 1)
        .int("dim_y", chi_res - 1)
        .param("geometric", geometric);
    require(&mut node, "shape", "c = (a; 1^s, 0^(r-s))", others, Op::Eq, 0)?;
    require(&mut node, "shape", "simple points of c", ones, Op::Eq, s)?;
    require(&mut node, "1", "alpha >= 0", alpha, Op::Ge, 0)?;
    require(&mut node, "2", "s >= g", s, Op::Ge, g as i128)?;
    let idx = &inst.spec_indices;
    let mut sorted = idx.clone();
    sorted.sort_unstable();
    sorted.dedup();
    let valid = sorted.iter().filter(|&&i| i >= 1 && i as i128 <= s).count() as i128;
    if alpha >= 1 {
        require(&mut node, "3", "indices == alpha + 1", idx.len() as i128, Op::Eq, alpha + 1)?;
        require(&mut node, "3", "distinct indices on C", valid, Op::Eq, idx.len() as i128)?;
    } else {
        require(&mut node, "3", "no indices when alpha = 0", idx.len() as i128, Op::Eq, 0)?;
    }
    require(
        &mut node,
        "dimension growth",
        "dim L_y(d) - dim L_x(d) == alpha",
        (chi_res - chi_dd) as i128,
        Op::Eq,
        alpha,
    )?;
    let hyp4 = hyp4.ok_or(HoraceError::MissingDischarger("hypothesis 4"))?;
    node = node.sub(hyp4);
    if let Some(hd) = highdim {
        require(&mut node, "5", "2s > a(a+3)", 2 * s, Op::Gt, a as i128 * (a as i128 + 3))?;
        node = node.sub(hd);
        let seventh = if alpha >= 1 {
            let mut n = Node::new("horgeo-7", Discharge::Arithmetic);
            require(&mut n, "7", "alpha >= 1 (vacuous)", alpha, Op::Ge, 1)?;
            n
        } else {
            Node::new("horgeo-7", Discharge::Assumption)
                .param("statement", "y is normal and the closure of x")
        };
        node = node.sub(seventh);
    }
    Ok(node)
}

/// Inputs of the vanishing corollary: `dd = (d; n_1..n_t, m_1..m_r)` with
/// tangency at the first `alpha` of the `t` points on `C`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct VanishParams {
    pub d: i64,
    pub a: u32,
    pub m: u32,
    pub n: Vec<u32>,
    pub mults: Vec<u32>,
    pub alpha: i64,
}

/// The vanishing corollary, executed constructively down to one candidate.
pub fn check_vanish(p: &VanishParams, th: Thresholds, leaf: &LeafMaker) -> Result<Node, HoraceError> {
    let (d, a, m) = (p.d as i128, p.a as i128, p.m as i128);
    let g = curve_genus(p.a) as i128;
    let t = p.n.len();
    let r = p.mults.len();
    let dd = PicClass::new(
        p.d,
        p.n.iter().chain(&p.mults).map(|&v| v as i64).collect(),
    );
    let sum_n: i128 = p.n.iter().map(|&v| v as i128).sum();
    let mut node = Node::new("vanish", Discharge::Arithmetic)
        .param("dd", dd.to_string())
        .int("d", p.d)
        .int("a", p.a)
        .int("m", p.m)
        .int("t", t as i64)
        .int("r", r as i64)
        .int("alpha", p.alpha)
        .int("a_cfg", th.a_cfg)
        .int("d0", th.d0);
    let chi = picard::chi(&dd)? as i128;
    require(&mut node, "pre", "chi(d) - alpha == 0", chi - p.alpha as i128, Op::Eq, 0)?;
    require(&mut node, "pre", "0 <= alpha", p.alpha as i128, Op::Ge, 0)?;
    require(&mut node, "pre", "alpha <= t", p.alpha as i128, Op::Le, t as i128)?;
    let max_n = p.n.iter().copied().max().unwrap_or(0) as i128;
    let max_m = p.mults.iter().copied().max().unwrap_or(0) as i128;
    let min_m = p.mults.iter().copied().min().unwrap_or(1) as i128;
    require(&mut node, "pre", "n_i <= m - 1", max_n, Op::Le, m - 1)?;
    require(&mut node, "pre", "m_j <= m", max_m, Op::Le, m)?;
    require(&mut node, "pre", "m_j >= 1", min_m, Op::Ge, 1)?;
    require(&mut node, "i", "a >= a_cfg", a, Op::Ge, th.a_cfg as i128)?;
    require(&mut node, "i", "a >= 4m", a, Op::Ge, 4 * m)?;
    require(&mut node, "ii", "d >= d0 + a", d, Op::Ge, th.d0 as i128 + a)?;
    require(&mut node, "ii", "d >= 2am", d, Op::Ge, 2 * a * m)?;
    require(
        &mut node,
        "iii",
        "da+1-g-sum n_i-alpha >= 0",
        d * a + 1 - g - sum_n - p.alpha as i128,
        Op::Ge,
        0,
    )?;
    require(&mut node, "chain", "-7m^2-4m+1 <= 0", -7 * m * m - 4 * m + 1, Op::Le, 0)?;
    require(&mut node, "chain", "15m^2-7m >= 0", 15 * m * m - 7 * m, Op::Ge, 0)?;

    let (s, beta) = find_s_vanish(p.d, p.a, p.alpha, &p.n, &p.mults, p.m)
        .map_err(|e| HoraceError::Infeasible(e.to_string()))?;
    let (si, bi) = (s as i128, beta as i128);
    let sum_s: i128 = p.mults[..s].iter().map(|&v| v as i128).sum();
    node = node.int("s", s as i64).int("beta", beta as i64);
    let beta_def = d * a + 1 - g - p.alpha as i128 - sum_n - sum_s;
    require(&mut node, "ajust", "beta == da+1-g-alpha-sum n-sum_{j<=s} m_j", bi, Op::Eq, beta_def)?;
    require(&mut node, "ajust", "beta >= 0", bi, Op::Ge, 0)?;
    require(&mut node, "ajust", "beta <= m - 1", bi, Op::Le, m - 1)?;
    require(&mut node, "ajust", "s + beta <= r", si + bi, Op::Le, r as i128)?;
    require(
        &mut node,
        "bigts",
        "2m(t+s+beta) >= 4a^2 m - a^2",
        2 * m * (t as i128 + si + bi),
        Op::Ge,
        4 * a * a * m - a * a,
    )?;

    // Z0 = Y0 ∪ Q_1..Q_s on C ∪ P_{s+beta+1}..P_r free
    let mut z0 = ZeroScheme::empty().with_curve(CurveDescriptor::Generic(p.a));
    for (k, &n) in p.n.iter().enumerate() {
        let kind = if (k as i64) < p.alpha {
            PointKind::tangent_branch(n)
        } else {
            PointKind::CurveFat(n)
        };
        z0.push(PointCondition {
            id: PointId(k as u32 + 1),
            kind,
        })?;
    }
    for (j, &mj) in p.mults.iter().enumerate() {
        if j >= s && j < s + beta {
            continue;
        }
        let kind = if j < s {
            PointKind::CurveFat(mj)
        } else {
            PointKind::FreeFat(mj)
        };
        z0.push(PointCondition {
            id: PointId((t + j) as u32 + 1),
            kind,
        })?;
    }
    let block = &p.mults[s..s + beta];
    let hordiff = check_hordiff(&z0, block, p.d, p.a, p.m, leaf)?;
    Ok(node.sub(hordiff))
}
