//! Certificate planner for the large-degree regularity theorem.
//!
//! [`plan_theorem2`] walks a class through the χ = 1 reduction, picks the
//! curve `C` of degree `a` through the first `s` points, and emits a tree
//! of [`Node`]s whose leaves are axiom applications or oracle rank
//! reports. [`verify_certificate`] replays every check, recomputes every
//! oracle leaf and re-plans from the recorded claim and configuration; the
//! certificate is valid only if the re-plan reproduces it exactly.

use std::cell::Cell;
use std::collections::BTreeMap;
use std::path::Path;

use num_bigint::BigUint;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::cert::{Discharge, Node, Op};
use crate::field::{PrimeField, DEFAULT_PRIME};
use crate::horace::{
    self, ah_leaf, candidate_node, check_highdim, check_horgeo, check_vanish, curve_genus, HoraceError,
    HorgeoInstance, LeafRequest, Thresholds, VanishParams,
};
use crate::oracle::{self, OracleError, RankReport, DEFAULT_TRIALS};
use crate::picard::{self, PicClass, PicardError};
use crate::scheme::{clamp_nonneg, CurveDescriptor, PointKind, ZeroScheme};

pub const CERT_VERSION: &str = "horace-cert/1";
pub const CONFIG_ENV: &str = "HORACE_CONFIG";

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum PlanError {
    #[error("multiplicity {mult} exceeds the bound m = {m}")]
    MultiplicityAboveBound { mult: i64, m: u32 },
    #[error("multiplicities must be positive (found {0})")]
    NonpositiveMultiplicity(i64),
    #[error("no threshold configured for {0}; axiom mode needs explicit values")]
    MissingThreshold(String),
    #[error("degree {d} is below the bound {bound}")]
    BelowBound { d: i64, bound: u64 },
    #[error("infeasible parameters: {0}")]
    Infeasible(String),
    #[error("oracle leaf failed: {0}")]
    LeafFailed(String),
    #[error("bad configuration: {0}")]
    Config(String),
    #[error(transparent)]
    Horace(#[from] HoraceError),
    #[error(transparent)]
    Oracle(#[from] OracleError),
    #[error(transparent)]
    Picard(#[from] PicardError),
}

/// User-supplied thresholds: `a_cfg` keyed by `"m"`, `d0` keyed by `"a,m"`.
///
/// ```json
/// {"a_cfg": {"1": 4}, "d0": {"4,1": 4}}
/// ```
#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct ThresholdTable {
    #[serde(default)]
    pub a_cfg: BTreeMap<String, u32>,
    #[serde(default)]
    pub d0: BTreeMap<String, u32>,
}

impl ThresholdTable {
    pub fn from_json(text: &str) -> Result<Self, PlanError> {
        let t: ThresholdTable = serde_json::from_str(text).map_err(|e| PlanError::Config(e.to_string()))?;
        for (k, &v) in &t.a_cfg {
            k.parse::<u32>().map_err(|_| PlanError::Config(format!("bad a_cfg key '{k}'")))?;
            if v == 0 {
                return Err(PlanError::Config(format!("a_cfg({k}) must be at least 1")));
            }
        }
        for (k, &v) in &t.d0 {
            let ok = k
                .split_once(',')
                .map(|(a, m)| a.trim().parse::<u32>().is_ok() && m.trim().parse::<u32>().is_ok())
                .unwrap_or(false);
            if !ok {
                return Err(PlanError::Config(format!("bad d0 key '{k}', expected \"a,m\"")));
            }
            if v == 0 {
                return Err(PlanError::Config(format!("d0({k}) must be at least 1")));
            }
        }
        Ok(t)
    }

    pub fn load(path: &Path) -> Result<Self, PlanError> {
        let text = std::fs::read_to_string(path).map_err(|e| PlanError::Config(format!("{}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    pub fn a_cfg(&self, m: u32) -> Option<u32> {
        self.a_cfg.get(&m.to_string()).copied()
    }

    pub fn d0(&self, a: u32, m: u32) -> Option<u32> {
        self.d0.get(&format!("{a},{m}")).copied()
    }

    pub fn set_a_cfg(&mut self, m: u32, v: u32) {
        self.a_cfg.insert(m.to_string(), v);
    }

    pub fn set_d0(&mut self, a: u32, m: u32, v: u32) {
        self.d0.insert(format!("{a},{m}"), v);
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PlanConfig {
    pub m: u32,
    pub thresholds: ThresholdTable,
    pub oracle_backing: bool,
    pub prime: u64,
    pub trials: u32,
    pub seed: u64,
    /// Oracle mode only: use this curve degree instead of `max(a_cfg, 4m)`.
    pub curve_degree: Option<u32>,
}

impl PlanConfig {
    pub fn axiom(m: u32, thresholds: ThresholdTable) -> Self {
        PlanConfig {
            m,
            thresholds,
            oracle_backing: false,
            prime: DEFAULT_PRIME,
            trials: DEFAULT_TRIALS,
            seed: 0,
            curve_degree: None,
        }
    }

    pub fn oracle(m: u32, thresholds: ThresholdTable, seed: u64) -> Self {
        PlanConfig {
            oracle_backing: true,
            seed,
            ..Self::axiom(m, thresholds)
        }
    }

    /// Placeholder `a_cfg(m) = 4m`, oracle mode only.
    fn a_cfg(&self, placeholder: &mut bool) -> Result<u32, PlanError> {
        match self.thresholds.a_cfg(self.m) {
            Some(v) => Ok(v),
            None if self.oracle_backing => {
                *placeholder = true;
                Ok(4 * self.m)
            }
            None => Err(PlanError::MissingThreshold(format!("a_cfg({})", self.m))),
        }
    }

    /// Placeholder `d0(a, m) = a`, oracle mode only.
    fn d0(&self, a: u32, placeholder: &mut bool) -> Result<u32, PlanError> {
        match self.thresholds.d0(a, self.m) {
            Some(v) => Ok(v),
            None if self.oracle_backing => {
                *placeholder = true;
                Ok(a)
            }
            None => Err(PlanError::MissingThreshold(format!("d0({a},{})", self.m))),
        }
    }
}

/// The configuration values a certificate depends on.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ConfigSnapshot {
    pub mode: String,
    pub m: u32,
    pub a: u32,
    pub a_cfg: u32,
    pub d0: u32,
    pub placeholder: bool,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub curve_degree: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub p: Option<u64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub trials: Option<u32>,
    #[serde(default, skip_serializing_if = "Option::is_none", with = "opt_seed")]
    pub seed: Option<u64>,
}

mod opt_seed {
    use serde::{Deserialize, Deserializer, Serializer};
    use serde_json::Value;

    pub fn serialize<S: Serializer>(v: &Option<u64>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => crate::json::safe_u64::serialize(v, s),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<u64>, D::Error> {
        let v = Value::deserialize(d)?;
        crate::json::value_int(&v)
            .and_then(|i| u64::try_from(i).ok())
            .map(Some)
            .ok_or_else(|| serde::de::Error::custom("expected an unsigned integer"))
    }
}

impl ConfigSnapshot {
    /// The configuration that reproduces this snapshot.
    pub fn to_config(&self) -> Result<PlanConfig, String> {
        let oracle_backing = match self.mode.as_str() {
            "oracle" => true,
            "axiom" => false,
            other => return Err(format!("unknown mode '{other}'")),
        };
        if self.placeholder && !oracle_backing {
            return Err("placeholder thresholds in axiom mode".into());
        }
        let mut thresholds = ThresholdTable::default();
        if !self.placeholder {
            thresholds.set_a_cfg(self.m, self.a_cfg);
            thresholds.set_d0(self.a, self.m, self.d0);
        }
        let cfg = PlanConfig {
            m: self.m,
            thresholds,
            oracle_backing,
            prime: self.p.unwrap_or(DEFAULT_PRIME),
            trials: self.trials.unwrap_or(DEFAULT_TRIALS),
            seed: self.seed.unwrap_or(0),
            curve_degree: self.curve_degree,
        };
        Ok(cfg)
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Claim {
    pub class: PicClass,
    pub regular: bool,
    pub geometric: bool,
    pub route: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub note: Option<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Certificate {
    pub version: String,
    pub claim: Claim,
    pub config: ConfigSnapshot,
    pub tree: Node,
}

/// Appends `chi - 1` simple points so that the result has `chi = 1`.
pub fn reduce_to_chi1(class: &PicClass) -> Result<Option<PicClass>, PicardError> {
    let chi = picard::chi(class)?;
    if chi <= 0 {
        return Ok(None);
    }
    let mut mults = class.mults.clone();
    mults.extend(std::iter::repeat(1).take((chi - 1) as usize));
    Ok(Some(PicClass::new(class.d, mults)))
}

/// Smallest `s` with `-alpha = da - sum_{i<=s} m_i + 1 - g` in
/// `[-d+a-m, -d+a-1]`.
pub fn find_s_theorem2(d: i64, a: u32, mults: &[i64], m: u32) -> Result<(usize, i64), PlanError> {
    let g = curve_genus(a);
    let base = d * a as i64 + 1 - g;
    let lo = -d + a as i64 - m as i64;
    let hi = -d + a as i64 - 1;
    let mut acc = 0i64;
    for s in 0..=mults.len() {
        if s > 0 {
            acc += mults[s - 1];
        }
        let neg_alpha = base - acc;
        if (lo..=hi).contains(&neg_alpha) {
            return Ok((s, -neg_alpha));
        }
        if neg_alpha < lo {
            break;
        }
    }
    Err(PlanError::Infeasible(format!(
        "no s places da+1-g-sum m_i in [{lo}, {hi}] (d={d}, a={a}, r={})",
        mults.len()
    )))
}

/// Smallest `s` with `beta = da+1-g-alpha-sum n_i-sum_{j<=s} m_j` in
/// `[0, m-1]` and `s + beta <= r`.
pub fn find_s_vanish(
    d: i64,
    a: u32,
    alpha: i64,
    n: &[u32],
    mults: &[u32],
    m: u32,
) -> Result<(usize, usize), PlanError> {
    let g = curve_genus(a);
    let sum_n: i64 = n.iter().map(|&v| v as i64).sum();
    let base = d * a as i64 + 1 - g - alpha - sum_n;
    if base < 0 {
        return Err(PlanError::Infeasible(format!("da+1-g-alpha-sum n_i = {base} < 0")));
    }
    let mut acc = 0i64;
    for s in 0..=mults.len() {
        if s > 0 {
            acc += mults[s - 1] as i64;
        }
        let beta = base - acc;
        if beta < 0 {
            break;
        }
        if beta < m as i64 {
            if s + beta as usize > mults.len() {
                return Err(PlanError::Infeasible(format!(
                    "s + beta = {} exceeds r = {}",
                    s + beta as usize,
                    mults.len()
                )));
            }
            return Ok((s, beta as usize));
        }
    }
    Err(PlanError::Infeasible(format!(
        "no s places beta in [0, {}] with r = {}",
        m as i64 - 1,
        mults.len()
    )))
}

/// `2((m+2) 38)^(2^(m-1))`
pub fn bound_d_prime_explicit(m: u32) -> BigUint {
    assert!(m >= 1, "m must be positive");
    let base = BigUint::from((m as u64 + 2) * 38);
    let mut v = base;
    for _ in 1..m {
        v = &v * &v;
    }
    v * 2u32
}

/// `a'(m) = max(a_cfg(m), 4m)`
pub fn a_prime(a_cfg: u32, m: u32) -> u32 {
    a_cfg.max(4 * m)
}

/// `max(d0 + 2a, a(2m+1))`
pub fn bound_theorem2(a: u32, d0: u32, m: u32) -> u64 {
    (d0 as u64 + 2 * a as u64).max(a as u64 * (2 * m as u64 + 1))
}

/// Degree above which `L(d; m_1, m_2, m_3, ...)` is expected regular, for
/// the three largest multiplicities.
pub fn bound_conjectural(m1: u32, m2: u32, m3: u32) -> u64 {
    m1 as u64 + m2 as u64 + m3 as u64
}

/// `(3n; n^9)`, the exception to the conjectural bound.
pub fn is_conjectural_exception(class: &PicClass) -> bool {
    let n = class.d / 3;
    class.d > 0 && class.d % 3 == 0 && class.r() == 9 && class.mults.iter().all(|&v| v == n)
}

struct Planner<'c> {
    cfg: &'c PlanConfig,
    field: Option<PrimeField>,
    leaves: Cell<u64>,
    placeholder: Cell<bool>,
}

impl<'c> Planner<'c> {
    fn new(cfg: &'c PlanConfig) -> Result<Self, PlanError> {
        let field = if cfg.oracle_backing {
            if cfg.trials == 0 {
                return Err(OracleError::NoTrials.into());
            }
            Some(PrimeField::new(cfg.prime).map_err(|e| PlanError::Config(e.to_string()))?)
        } else {
            None
        };
        Ok(Planner {
            cfg,
            field,
            leaves: Cell::new(0),
            placeholder: Cell::new(false),
        })
    }

    fn thresholds(&self, a: u32) -> Result<Thresholds, PlanError> {
        let mut ph = self.placeholder.get();
        let th = Thresholds {
            a_cfg: self.cfg.a_cfg(&mut ph)?,
            d0: self.cfg.d0(a, &mut ph)?,
        };
        self.placeholder.set(ph);
        Ok(th)
    }

    fn next_seed(&self) -> u64 {
        let k = self.leaves.get();
        self.leaves.set(k + 1);
        self.cfg.seed.wrapping_add(k)
    }

    /// Oracle rank report on `z` in degree `d`, expected to equal `expected`.
    fn oracle_leaf(&self, z: &ZeroScheme, d: i64, a: Option<u32>, expected: u64) -> Result<Node, PlanError> {
        let field = self.field.expect("oracle leaves need oracle mode");
        let seed = self.next_seed();
        let text = z.to_string();
        let curve_degree = if z.constrained().next().is_some() { a } else { None };
        let canonical =
            ZeroScheme::parse(&text, curve_degree.map(CurveDescriptor::Generic)).map_err(HoraceError::from)?;
        let (report, digests) = oracle::h0_traced(&canonical, d, curve_degree, field, self.cfg.trials, seed)?;
        let mut node = Node::new("oracle", Discharge::Oracle)
            .param("scheme", text)
            .int("d", d)
            .param("curve_degree", curve_degree.map(Value::from).unwrap_or(Value::Null))
            .int("p", field.modulus())
            .param("seed", crate::json::int_value(seed as i128))
            .int("trials", self.cfg.trials)
            .int("expected_h0", expected)
            .param("digests", digests)
            .param("report", serde_json::to_value(&report).unwrap());
        if !node.check("h0 == expected", report.h0, Op::Eq, expected) {
            return Err(PlanError::LeafFailed(format!(
                "h0({z}, {d}) = {} but {expected} was expected",
                report.h0
            )));
        }
        Ok(node)
    }

    fn leaf(&self, req: &LeafRequest) -> Result<Node, HoraceError> {
        if self.cfg.oracle_backing {
            let expected = req.scheme.chi(req.d).max(0) as u64;
            return self
                .oracle_leaf(req.scheme, req.d, Some(req.a), expected)
                .map_err(|e| HoraceError::Leaf(e.to_string()));
        }
        let th = self.thresholds(req.a).map_err(|e| HoraceError::Leaf(e.to_string()))?;
        ah_leaf(req, th)
    }
}

fn validate_mults(class: &PicClass, m: u32) -> Result<(), PlanError> {
    for &v in &class.mults {
        if v <= 0 {
            return Err(PlanError::NonpositiveMultiplicity(v));
        }
        if v > m as i64 {
            return Err(PlanError::MultiplicityAboveBound { mult: v, m });
        }
    }
    Ok(())
}

struct Outcome {
    tree: Node,
    route: &'static str,
    geometric: bool,
    note: Option<String>,
}

/// Plans a certificate that `L(class)` is regular, and when possible that
/// its general member is irreducible with ordinary singularities.
pub fn plan_theorem2(class: &PicClass, cfg: &PlanConfig) -> Result<Certificate, PlanError> {
    validate_mults(class, cfg.m)?;
    if cfg.m == 0 {
        return Err(PlanError::Config("m must be at least 1".into()));
    }
    if cfg.curve_degree.is_some() && !cfg.oracle_backing {
        return Err(PlanError::Config("a curve degree override needs oracle mode".into()));
    }
    let planner = Planner::new(cfg)?;
    let mut ph = false;
    let a_cfg = cfg.a_cfg(&mut ph)?;
    let a = cfg.curve_degree.unwrap_or_else(|| a_prime(a_cfg, cfg.m));
    if a == 0 {
        return Err(PlanError::Config("curve degree must be at least 1".into()));
    }
    let d0 = cfg.d0(a, &mut ph)?;
    planner.placeholder.set(ph);

    let chi = picard::chi(class)?;
    let mut root = Node::new("theorem2", Discharge::Arithmetic)
        .param("class", class.to_string())
        .int("chi", chi)
        .int("a", a)
        .int("a_cfg", a_cfg)
        .int("d0", d0);
    root.check("max m_i <= m", class.max_mult(), Op::Le, cfg.m);
    root.check(
        "min m_i >= 1",
        class.mults.iter().copied().min().unwrap_or(1),
        Op::Ge,
        1,
    );
    match cfg.curve_degree {
        Some(k) => root.check("a == curve degree override", a, Op::Eq, k),
        None => root.check("a == max(a_cfg, 4m)", a, Op::Eq, a_prime(a_cfg, cfg.m)),
    };
    let bound = bound_theorem2(a, d0, cfg.m);
    root = root.int("bound", bound).param("below_bound", (class.d as i128) < bound as i128);
    if !cfg.oracle_backing {
        root.check("d >= max(d0+2a, a(2m+1))", class.d, Op::Ge, bound);
        if (class.d as i128) < bound as i128 {
            return Err(PlanError::BelowBound { d: class.d, bound });
        }
    }

    let outcome = match reduce_to_chi1(class)? {
        None => plan_empty(&planner, class, a, root)?,
        Some(reduced) => match plan_horace(&planner, &reduced, a, root.clone()) {
            Ok(o) => o,
            Err(e) if cfg.oracle_backing && recoverable(&e) => {
                let leaf = planner.oracle_leaf(&clamp_nonneg(class), class.d, None, chi.max(0) as u64)?;
                Outcome {
                    tree: root.param("reduced", reduced.to_string()).sub(leaf),
                    route: "oracle-direct",
                    geometric: false,
                    note: Some(format!("horace route unavailable: {e}")),
                }
            }
            Err(e) => return Err(e),
        },
    };
    let snapshot = ConfigSnapshot {
        mode: if cfg.oracle_backing { "oracle" } else { "axiom" }.into(),
        m: cfg.m,
        a,
        a_cfg,
        d0,
        placeholder: planner.placeholder.get(),
        curve_degree: cfg.curve_degree,
        p: cfg.oracle_backing.then_some(cfg.prime),
        trials: cfg.oracle_backing.then_some(cfg.trials),
        seed: cfg.oracle_backing.then_some(cfg.seed),
    };
    let tree = outcome
        .tree
        .param("config", serde_json::to_value(&snapshot).unwrap());
    if let Some(bad) = tree.walk().into_iter().find_map(|n| n.failed_checks().next().map(|c| (n.rule.clone(), c.to_string()))) {
        return Err(PlanError::Infeasible(format!("{}: {}", bad.0, bad.1)));
    }
    Ok(Certificate {
        version: CERT_VERSION.into(),
        claim: Claim {
            class: class.clone(),
            regular: true,
            geometric: outcome.geometric,
            route: outcome.route.into(),
            note: outcome.note,
        },
        config: snapshot,
        tree,
    })
}

fn recoverable(e: &PlanError) -> bool {
    matches!(
        e,
        PlanError::Infeasible(_) | PlanError::Horace(_) | PlanError::BelowBound { .. } | PlanError::LeafFailed(_)
    )
}

/// `chi <= 0`: the points themselves form a candidate, so the system is empty.
fn plan_empty(planner: &Planner, class: &PicClass, a: u32, mut root: Node) -> Result<Outcome, PlanError> {
    let cfg = planner.cfg;
    root.check("chi <= 0", picard::chi(class)?, Op::Le, 0);
    let z = clamp_nonneg(class);
    let leaf = |req: &LeafRequest| planner.leaf(req);
    match candidate_node(&z, class.d, cfg.m, a, &leaf) {
        Ok(node) => Ok(Outcome {
            tree: root.sub(node),
            route: "empty",
            geometric: false,
            note: None,
        }),
        Err(e) if cfg.oracle_backing => {
            let leaf = planner.oracle_leaf(&z, class.d, None, 0)?;
            Ok(Outcome {
                tree: root.sub(leaf),
                route: "oracle-direct",
                geometric: false,
                note: Some(format!("candidate route unavailable: {e}")),
            })
        }
        Err(e) => Err(e.into()),
    }
}

fn plan_horace(planner: &Planner, reduced: &PicClass, a: u32, mut root: Node) -> Result<Outcome, PlanError> {
    let cfg = planner.cfg;
    let m = cfg.m;
    let d = reduced.d;
    let g = curve_genus(a);
    let r = reduced.r();
    root = root.param("reduced", reduced.to_string()).int("g", g);
    root.check("chi(reduced) == 1", picard::chi(reduced)?, Op::Eq, 1);

    let (s, alpha) = find_s_theorem2(d, a, &reduced.mults, m)?;
    let neg_alpha = -alpha as i128;
    root = root.int("s", s as i64).int("alpha", alpha);
    let sum_s: i64 = reduced.mults[..s].iter().sum();
    root.check(
        "-alpha == da - sum_{i<=s} m_i + 1 - g",
        neg_alpha,
        Op::Eq,
        d as i128 * a as i128 - sum_s as i128 + 1 - g as i128,
    );
    root.check("-alpha >= -d+a-m", neg_alpha, Op::Ge, -d as i128 + a as i128 - m as i128);
    root.check("-alpha <= -d+a-1", neg_alpha, Op::Le, -d as i128 + a as i128 - 1);
    let bigs = root.check(
        "2ms >= 2da - a^2",
        2 * m as i128 * s as i128,
        Op::Ge,
        2 * d as i128 * a as i128 - (a as i128).pow(2),
    );
    if !bigs {
        return Err(PlanError::Infeasible("s below (2da - a^2)/(2m)".into()));
    }

    let cc = PicClass::new(a as i64, (0..r).map(|i| (i < s) as i64).collect());
    let tangent_at: Vec<usize> = if alpha >= 1 { (1..=alpha as usize + 1).collect() } else { vec![] };
    let inst = HorgeoInstance::new(reduced.clone(), cc.clone(), s, tangent_at)?;
    let residual = picard::residual(reduced, &cc)?;

    let hyp4 = hypothesis4(planner, reduced, a, s, alpha)?;
    let th = planner.thresholds(a)?;
    let (highdim, note) = match check_highdim(&residual, &cc, a, m, th) {
        Ok(n) => (Some(n), None),
        Err(e) if cfg.oracle_backing => (None, Some(format!("high-dimension hypotheses fail: {e}"))),
        Err(e) => return Err(e.into()),
    };
    let horgeo = check_horgeo(&inst, Some(hyp4), highdim.clone())?;
    root = root.sub(horgeo);
    let geometric = highdim.is_some();
    if let Some(hd) = highdim {
        let ordinary = Node::new("ordinary", Discharge::Arithmetic)
            .param("residual", residual.to_string())
            .param("statement", "L(d - c) is base point free")
            .sub(hd);
        root = root.sub(ordinary);
    }
    Ok(Outcome {
        tree: root,
        route: "horace",
        geometric,
        note,
    })
}

/// Regularity of `L(d - c)` with tangencies at the first `alpha + 1` points.
fn hypothesis4(planner: &Planner, reduced: &PicClass, a: u32, s: usize, alpha: i64) -> Result<Node, PlanError> {
    let cfg = planner.cfg;
    let params = VanishParams {
        d: reduced.d - a as i64,
        a,
        m: cfg.m,
        n: reduced.mults[..s].iter().map(|&v| v as u32 - 1).collect(),
        mults: reduced.mults[s..].iter().map(|&v| v as u32).collect(),
        alpha: alpha + 1,
    };
    let th = planner.thresholds(a)?;
    let leaf = |req: &LeafRequest| planner.leaf(req);
    match check_vanish(&params, th, &leaf) {
        Ok(node) => Ok(node),
        Err(e) if cfg.oracle_backing => {
            let mut z = ZeroScheme::empty().with_curve(CurveDescriptor::Generic(a));
            for (i, &v) in reduced.mults.iter().enumerate() {
                let v = v as u32;
                let kind = if i < s && (i as i64) < alpha + 1 {
                    PointKind::tangent_branch(v - 1)
                } else if i < s {
                    if v == 1 {
                        continue;
                    }
                    PointKind::CurveFat(v - 1)
                } else {
                    PointKind::FreeFat(v)
                };
                z.push_kind(kind).map_err(HoraceError::from)?;
            }
            let leaf = planner.oracle_leaf(&z, params.d, Some(a), 0)?;
            Ok(Node::new("tangency-regularity", Discharge::Arithmetic)
                .param("vanish_unavailable", e.to_string())
                .sub(leaf))
        }
        Err(e) => Err(e.into()),
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct VerifyReport {
    pub valid: bool,
    pub checks: usize,
    pub oracle_leaves: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub reason: Option<String>,
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum VerifyError {
    #[error("certificate does not match the schema: {0}")]
    Schema(String),
    #[error("unsupported certificate version '{0}'")]
    Version(String),
}

fn invalid(checks: usize, oracle_leaves: usize, reason: String) -> VerifyReport {
    VerifyReport {
        valid: false,
        checks,
        oracle_leaves,
        reason: Some(reason),
    }
}

fn recompute_leaf(node: &Node) -> Result<(), String> {
    let int = |k: &str| {
        node.params
            .get(k)
            .and_then(crate::json::value_int)
            .ok_or_else(|| format!("oracle leaf lacks integer '{k}'"))
    };
    let text = node.params.get("scheme").and_then(Value::as_str).ok_or("oracle leaf lacks scheme")?;
    let curve_degree = match node.params.get("curve_degree") {
        Some(Value::Null) | None => None,
        Some(v) => Some(crate::json::value_int(v).and_then(|v| u32::try_from(v).ok()).ok_or("bad curve_degree")?),
    };
    let z = ZeroScheme::parse(text, curve_degree.map(CurveDescriptor::Generic)).map_err(|e| e.to_string())?;
    let p = u64::try_from(int("p")?).map_err(|_| "bad p")?;
    let field = PrimeField::new(p).map_err(|e| e.to_string())?;
    let seed = u64::try_from(int("seed")?).map_err(|_| "bad seed")?;
    let trials = u32::try_from(int("trials")?).map_err(|_| "bad trials")?;
    let d = i64::try_from(int("d")?).map_err(|_| "bad d")?;
    let expected = int("expected_h0")?;
    let (report, digests) = oracle::h0_traced(&z, d, curve_degree, field, trials, seed).map_err(|e| e.to_string())?;
    let recorded: RankReport = node
        .params
        .get("report")
        .cloned()
        .ok_or("oracle leaf lacks report")
        .and_then(|v| serde_json::from_value(v).map_err(|_| "malformed report"))?;
    if recorded != report {
        return Err(format!("oracle report for {text} in degree {d} does not reproduce"));
    }
    if node.params.get("digests") != Some(&serde_json::to_value(&digests).unwrap()) {
        return Err(format!("geometry digests for {text} do not reproduce"));
    }
    if report.h0 as i128 != expected {
        return Err(format!("h0 = {} differs from expected {expected}", report.h0));
    }
    Ok(())
}

/// Validates a certificate. Schema and version problems are errors; every
/// other defect yields `valid == false` with a reason.
pub fn verify_certificate(value: &Value) -> Result<VerifyReport, VerifyError> {
    let version = value.get("version").and_then(Value::as_str).ok_or_else(|| VerifyError::Schema("missing version".into()))?;
    if version != CERT_VERSION {
        return Err(VerifyError::Version(version.into()));
    }
    let cert: Certificate = serde_json::from_value(value.clone()).map_err(|e| VerifyError::Schema(e.to_string()))?;
    let nodes = cert.tree.walk();
    let checks = nodes.iter().map(|n| n.checks.len()).sum();
    let oracle_nodes: Vec<&Node> = nodes.iter().copied().filter(|n| n.discharge == Discharge::Oracle).collect();
    let leaves = oracle_nodes.len();
    if let Err(reason) = cert.tree.replay_all() {
        return Ok(invalid(checks, leaves, reason));
    }
    if cert.tree.params.get("config") != Some(&serde_json::to_value(&cert.config).unwrap()) {
        return Ok(invalid(checks, leaves, "configuration snapshot differs from the one in the tree".into()));
    }
    if cert.config.mode == "axiom" && !oracle_nodes.is_empty() {
        return Ok(invalid(checks, leaves, "oracle leaves in an axiom-mode certificate".into()));
    }
    for n in &oracle_nodes {
        if let Err(reason) = recompute_leaf(n) {
            return Ok(invalid(checks, leaves, reason));
        }
    }
    let cfg = match cert.config.to_config() {
        Ok(c) => c,
        Err(reason) => return Ok(invalid(checks, leaves, reason)),
    };
    let replanned = match plan_theorem2(&cert.claim.class, &cfg) {
        Ok(c) => c,
        Err(e) => return Ok(invalid(checks, leaves, format!("re-planning fails: {e}"))),
    };
    if replanned != cert {
        return Ok(invalid(checks, leaves, "re-planning does not reproduce the certificate".into()));
    }
    Ok(VerifyReport {
        valid: true,
        checks,
        oracle_leaves: leaves,
        reason: None,
    })
}

/// Default threshold table: `$HORACE_CONFIG` if set, else empty.
pub fn default_thresholds() -> Result<ThresholdTable, PlanError> {
    match std::env::var_os(CONFIG_ENV) {
        Some(p) => ThresholdTable::load(Path::new(&p)),
        None => Ok(ThresholdTable::default()),
    }
}

/// Re-export for callers that only need the classifier.
pub use horace::{classify_candidate, VerdictKind};

#[cfg(test)]
mod tests {
    use super::*;

    fn c(s: &str) -> PicClass {
        s.parse().unwrap()
    }

    fn table(text: &str) -> ThresholdTable {
        ThresholdTable::from_json(text).unwrap()
    }

    #[test]
    fn reduction() {
        assert_eq!(reduce_to_chi1(&c("6;2^9")).unwrap(), Some(c("6;2^9")));
        assert_eq!(reduce_to_chi1(&c("4")).unwrap(), Some(c("4;1^14")));
        assert_eq!(reduce_to_chi1(&c("2;2^3")).unwrap(), None);
    }

    #[test]
    fn theorem2_search() {
        let mults = [vec![2; 45], vec![1; 95]].concat();
        assert_eq!(find_s_theorem2(20, 3, &mults, 2).unwrap(), (39, 18));
        let ones = vec![1; 90];
        assert_eq!(find_s_theorem2(12, 4, &ones, 1).unwrap(), (55, 9));
        assert!(matches!(find_s_theorem2(20, 3, &[2; 10], 2), Err(PlanError::Infeasible(_))));
    }

    #[test]
    fn vanish_search() {
        assert_eq!(find_s_vanish(20, 3, 2, &[], &[2; 40], 2).unwrap(), (29, 0));
        assert_eq!(find_s_vanish(8, 4, 10, &[0; 55], &[1; 35], 1).unwrap(), (20, 0));
        // beta = 1 needs one more point than is available
        let err = find_s_vanish(20, 3, 1, &[], &[2; 29], 2).unwrap_err();
        assert!(err.to_string().contains("exceeds r"));
    }

    #[test]
    fn explicit_bounds() {
        assert_eq!(bound_d_prime_explicit(1), BigUint::from(228u32));
        assert_eq!(bound_d_prime_explicit(2), BigUint::from(46208u32));
        assert_eq!(bound_d_prime_explicit(3), BigUint::from(2_606_420_000u64));
        assert!(bound_d_prime_explicit(5).bits() > 64);
        assert_eq!(a_prime(10, 3), 12);
        assert_eq!(bound_theorem2(12, 100, 3), 124);
        assert_eq!(bound_theorem2(12, 50, 3), 84);
        assert_eq!(bound_conjectural(3, 2, 2), 7);
        assert_eq!(bound_conjectural(1, 1, 1), 3);
        assert!(is_conjectural_exception(&c("6;2^9")));
        assert!(!is_conjectural_exception(&c("6;2^8")));
    }

    #[test]
    fn thresholds_parse() {
        let t = table(r#"{"a_cfg":{"1":4},"d0":{"4,1":4}}"#);
        assert_eq!((t.a_cfg(1), t.d0(4, 1), t.d0(1, 4)), (Some(4), Some(4), None));
        assert!(ThresholdTable::from_json(r#"{"d0":{"4":4}}"#).is_err());
        assert!(ThresholdTable::from_json(r#"{"a_cfg":{"1":0}}"#).is_err());
    }

    #[test]
    fn axiom_mode_needs_thresholds() {
        let cfg = PlanConfig::axiom(1, ThresholdTable::default());
        assert!(matches!(plan_theorem2(&c("12;1^90"), &cfg), Err(PlanError::MissingThreshold(_))));
    }

    #[test]
    fn axiom_plan_round_trip() {
        let cfg = PlanConfig::axiom(1, table(r#"{"a_cfg":{"1":4},"d0":{"4,1":4}}"#));
        let cert = plan_theorem2(&c("12;1^90"), &cfg).unwrap();
        assert_eq!(cert.claim.route, "horace");
        assert!(cert.claim.geometric);
        let v = serde_json::to_value(&cert).unwrap();
        assert!(verify_certificate(&v).unwrap().valid);
        let below = plan_theorem2(&c("11;1^78"), &cfg).unwrap_err();
        assert!(matches!(below, PlanError::BelowBound { bound: 12, .. }));
    }

    #[test]
    fn rejects_large_multiplicity() {
        let cfg = PlanConfig::oracle(1, ThresholdTable::default(), 1);
        assert!(matches!(
            plan_theorem2(&c("6;2^9"), &cfg),
            Err(PlanError::MultiplicityAboveBound { mult: 2, m: 1 })
        ));
    }

    #[test]
    fn oracle_direct_double_cubic() {
        let cfg = PlanConfig::oracle(2, ThresholdTable::default(), 7);
        let cert = plan_theorem2(&c("6;2^9"), &cfg).unwrap();
        assert_eq!(cert.claim.route, "oracle-direct");
        assert!(!cert.claim.geometric);
        let mut v = serde_json::to_value(&cert).unwrap();
        assert!(verify_certificate(&v).unwrap().valid);
        v["config"]["seed"] = 8.into();
        assert!(!verify_certificate(&v).unwrap().valid);
    }

    #[test]
    fn empty_system() {
        let cfg = PlanConfig::oracle(2, ThresholdTable::default(), 3);
        let cert = plan_theorem2(&c("3;2^4"), &cfg).unwrap();
        assert!(cert.claim.route == "empty" || cert.claim.route == "oracle-direct");
        assert!(verify_certificate(&serde_json::to_value(&cert).unwrap()).unwrap().valid);
        // (2; 2^2) is special: the planner refuses to certify it
        assert!(matches!(plan_theorem2(&c("2;2^2"), &cfg), Err(PlanError::LeafFailed(_))));
    }

    #[test]
    fn oracle_backed_desk_instance() {
        let cfg = PlanConfig::oracle(1, ThresholdTable::default(), 11);
        let cert = plan_theorem2(&c("12;1^90"), &cfg).unwrap();
        assert_eq!(cert.claim.route, "horace", "{:?}", cert.claim.note);
        assert!(cert.claim.geometric);
        assert!(cert.config.placeholder);
        assert_eq!((cert.tree.params["s"].clone(), cert.tree.params["alpha"].clone()), (55.into(), 9.into()));
        let horgeo = &cert.tree.subclaims[0];
        assert_eq!(horgeo.params["dim_y"].as_i64().unwrap() - horgeo.params["dim_x"].as_i64().unwrap(), 9);
        let leaves = cert.tree.walk().into_iter().filter(|n| n.discharge == Discharge::Oracle).count();
        assert_eq!(leaves, 1);
        let report = verify_certificate(&serde_json::to_value(&cert).unwrap()).unwrap();
        assert!(report.valid, "{:?}", report.reason);
    }

    #[test]
    fn tangency_hypothesis_can_fail() {
        // with a cubic the residual system carries C as a fixed component
        let mut cfg = PlanConfig::oracle(2, table(r#"{"a_cfg":{"2":3},"d0":{"3,2":10}}"#), 11);
        cfg.curve_degree = Some(3);
        let cert = plan_theorem2(&c("20;2^45"), &cfg).unwrap();
        assert_eq!(cert.claim.route, "oracle-direct");
        assert!(cert.claim.note.as_deref().unwrap().contains("= 7 but 0 was expected"));
        assert_eq!(cert.tree.params["reduced"], "20;2^45,1^95");
    }

    #[test]
    fn version_and_schema() {
        assert!(matches!(
            verify_certificate(&serde_json::json!({"version": "x"})),
            Err(VerifyError::Version(_))
        ));
        assert!(matches!(
            verify_certificate(&serde_json::json!({"version": CERT_VERSION})),
            Err(VerifyError::Schema(_))
        ));
    }
}
