//! Brute-force dimension oracle.
//!
//! Points are placed at random over GF(p) (constrained ones on a random
//! smooth curve of the requested degree), every point condition is turned
//! into linear functionals on the coefficients of degree-`d` forms, and
//! `h0 = N - rank`. Specialization can only raise `h0`, so the minimum over
//! several independent geometries bounds the generic value from above; when
//! it meets the lower bound `max(chi, 0)` the system is certified regular.
//!
//! A failed certification is Monte Carlo evidence only: an unlucky geometry
//! occurs with probability `O(poly(d) / p)` per trial.
//!
//! Conditions are read off truncated jets in local coordinates `(u, w)` at
//! each point. For a point on the reference curve `C`, `w` is a local
//! equation of `C` obtained by solving `C = 0` for the normal coordinate as
//! a power series in the tangent one, so `D^i(P^m)` becomes the monomial
//! ideal `(u, w)^(m-1) ∩ ((w^i) + (u, w)^m)`.
//!
//! Cost is dominated by dense elimination, `O(rows * N^2)` with
//! `N = (d+1)(d+2)/2`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use sha2::{Digest, Sha256};

use crate::curve::{self, format_curve, frame_at, CurveError, Point};
use crate::field::{DenseMatrix, Exps, Poly, PrimeField, Series};
use crate::scheme::{forms_dim, CurveDescriptor, PointKind, SchemeError, ZeroScheme};

/// Curves up to this degree are checked for smoothness globally.
pub const SMOOTHNESS_FULL_CHECK_MAX_DEGREE: u32 = 6;
pub const DEFAULT_TRIALS: u32 = 3;
const CURVE_BUDGET: usize = 32;
const POINT_BUDGET: usize = 4096;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum OracleError {
    #[error("prime {p} too small: need p > {need}")]
    SmallPrime { p: u64, need: u64 },
    #[error("trials must be at least 1")]
    NoTrials,
    #[error("scheme has constrained points but no reference curve degree")]
    NoCurveDegree,
    #[error("reference curve degree must be at least 1")]
    BadCurveDegree,
    #[error("no smooth curve found within the sampling budget; retry with another seed or a larger prime")]
    SmoothnessBudget,
    #[error("no point found on the reference curve; retry with a larger prime")]
    NoCurvePoint,
    #[error("no placement for point {0}")]
    MissingPlacement(u32),
    #[error("reference curve is singular at point {0}")]
    SingularSupport(u32),
    #[error("point {0} is not on the reference curve")]
    OffCurve(u32),
    #[error("point {0} cannot carry a tangency condition")]
    NotTangencyCandidate(u32),
    #[error(transparent)]
    Scheme(#[from] SchemeError),
    #[error(transparent)]
    Curve(#[from] CurveError),
}

/// A concrete realization of a scheme's points.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Geometry {
    pub field: PrimeField,
    pub ref_curve: Option<Poly>,
    pub placements: BTreeMap<u32, Point>,
    pub seed: u64,
}

impl Geometry {
    /// SHA-256 over the prime, curve and placements.
    pub fn digest(&self) -> String {
        let mut h = Sha256::new();
        h.update(self.field.modulus().to_le_bytes());
        if let Some(c) = &self.ref_curve {
            h.update(format_curve(c).as_bytes());
        }
        h.update(b"|");
        for (id, p) in &self.placements {
            h.update(id.to_le_bytes());
            for v in p {
                h.update(v.to_le_bytes());
            }
        }
        hex::encode(h.finalize())
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct RankReport {
    #[serde(rename = "N")]
    pub n: u64,
    pub chi: i64,
    pub dim: i64,
    pub h0: u64,
    pub p: u64,
    pub rank: u64,
    pub regular: bool,
    pub rows: u64,
    #[serde(with = "crate::json::safe_u64")]
    pub seed: u64,
    pub trials: u32,
}

fn check_prime(field: PrimeField, d: i64, z: &ZeroScheme, a: Option<u32>) -> Result<(), OracleError> {
    let need = [d.max(0) as u64, a.unwrap_or(0) as u64, z.max_multiplicity() as u64 + 1]
        .into_iter()
        .max()
        .unwrap();
    if field.modulus() <= need {
        return Err(OracleError::SmallPrime {
            p: field.modulus(),
            need,
        });
    }
    Ok(())
}

fn curve_degree(z: &ZeroScheme, a: Option<u32>) -> Option<u32> {
    match z.ref_curve() {
        Some(CurveDescriptor::Generic(k)) => Some(a.unwrap_or(*k)),
        Some(CurveDescriptor::Explicit(p)) => p.total_degree(),
        None => a,
    }
}

fn random_curve(field: PrimeField, a: u32, rng: &mut ChaCha8Rng) -> Result<Poly, OracleError> {
    for _ in 0..CURVE_BUDGET {
        let mut f = Poly::zero(field, 3);
        for e in monomials(a) {
            f.add_term(e, rng.gen_range(0..field.modulus()));
        }
        if f.total_degree() != Some(a) {
            continue;
        }
        if a > SMOOTHNESS_FULL_CHECK_MAX_DEGREE {
            return Ok(f);
        }
        match curve::singular_points(&f) {
            Ok(locus) if locus.points.is_empty() && !locus.possibly_nonrational => return Ok(f),
            _ => continue,
        }
    }
    Err(OracleError::SmoothnessBudget)
}

fn gradient_at(f: &Poly, p: Point) -> [u64; 3] {
    let g = f.gradient();
    [g[0].eval(&p), g[1].eval(&p), g[2].eval(&p)]
}

fn point_on_curve(f: &Poly, rng: &mut ChaCha8Rng) -> Result<Point, OracleError> {
    let field = f.field();
    for _ in 0..POINT_BUDGET {
        // the line x = x0 z in the chart z = 1
        let x0 = rng.gen_range(0..field.modulus());
        let roots = f.substitute(2, 1).substitute(0, x0).to_unipoly(1).roots();
        if roots.is_empty() {
            continue;
        }
        let y0 = roots[rng.gen_range(0..roots.len())];
        let p = [x0, y0, 1];
        if gradient_at(f, p) != [0, 0, 0] {
            return Ok(p);
        }
    }
    Err(OracleError::NoCurvePoint)
}

/// Random geometry for `z`: a smooth curve of degree `a` (or the scheme's
/// explicit curve) and distinct points, the constrained ones on the curve.
pub fn sample_geometry(
    z: &ZeroScheme,
    a: Option<u32>,
    field: PrimeField,
    seed: u64,
) -> Result<Geometry, OracleError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let needs_curve = z.constrained().next().is_some();
    let ref_curve = match (z.ref_curve(), curve_degree(z, a)) {
        (Some(CurveDescriptor::Explicit(p)), _) => Some(p.clone()),
        (_, Some(0)) => return Err(OracleError::BadCurveDegree),
        (_, Some(k)) => Some(random_curve(field, k, &mut rng)?),
        (_, None) if needs_curve => return Err(OracleError::NoCurveDegree),
        (_, None) => None,
    };
    let mut placements = BTreeMap::new();
    let mut used: Vec<Point> = Vec::new();
    for c in z.conditions() {
        let p = loop {
            let p = if c.kind.is_constrained() {
                point_on_curve(ref_curve.as_ref().unwrap(), &mut rng)?
            } else {
                [
                    rng.gen_range(0..field.modulus()),
                    rng.gen_range(0..field.modulus()),
                    1,
                ]
            };
            if !used.contains(&p) {
                break p;
            }
        };
        used.push(p);
        placements.insert(c.id.0, p);
    }
    let geom = Geometry {
        field,
        ref_curve,
        placements,
        seed,
    };
    validate_geometry(z, &geom)?;
    Ok(geom)
}

fn validate_geometry(z: &ZeroScheme, g: &Geometry) -> Result<(), OracleError> {
    for c in z.conditions() {
        let p = *g.placements.get(&c.id.0).ok_or(OracleError::MissingPlacement(c.id.0))?;
        if c.kind.is_constrained() {
            let curve = g.ref_curve.as_ref().ok_or(OracleError::NoCurveDegree)?;
            if curve.eval(&p) != 0 {
                return Err(OracleError::OffCurve(c.id.0));
            }
            if gradient_at(curve, p) == [0, 0, 0] {
                return Err(OracleError::SingularSupport(c.id.0));
            }
        }
    }
    Ok(())
}

/// Degree-`d` monomials in `x, y, z`, lexicographically descending; this is
/// the column order of every interpolation matrix.
pub fn monomials(d: u32) -> Vec<Exps> {
    let mut out = Vec::with_capacity(forms_dim(d as i64) as usize);
    for i in (0..=d).rev() {
        for j in (0..=d - i).rev() {
            out.push([i, j, d - i - j]);
        }
    }
    out
}

// ---- truncated bivariate jets ----

/// Polynomial in `(u, w)` truncated above total order `ord`.
#[derive(Clone, Debug)]
struct Jet {
    ord: usize,
    c: Vec<u64>,
}

fn jet_index(a: usize, b: usize) -> usize {
    let t = a + b;
    t * (t + 1) / 2 + b
}

impl Jet {
    fn zero(ord: usize) -> Self {
        Jet {
            ord,
            c: vec![0; jet_index(0, ord + 1)],
        }
    }

    fn one(ord: usize) -> Self {
        let mut j = Jet::zero(ord);
        j.c[0] = 1;
        j
    }

    fn get(&self, a: usize, b: usize) -> u64 {
        if a + b > self.ord {
            0
        } else {
            self.c[jet_index(a, b)]
        }
    }

    fn mul(&self, other: &Jet, f: PrimeField) -> Jet {
        let ord = self.ord;
        let mut out = Jet::zero(ord);
        for t1 in 0..=ord {
            for b1 in 0..=t1 {
                let x = self.c[jet_index(t1 - b1, b1)];
                if x == 0 {
                    continue;
                }
                for t2 in 0..=ord - t1 {
                    for b2 in 0..=t2 {
                        let y = other.c[jet_index(t2 - b2, b2)];
                        if y != 0 {
                            let k = jet_index(t1 - b1 + t2 - b2, b1 + b2);
                            out.c[k] = f.add(out.c[k], f.mul(x, y));
                        }
                    }
                }
            }
        }
        out
    }
}

/// Local equation `v = phi(u)` of the curve `G(u, v) = 0` near the origin,
/// given `G(0,0) = 0`, `G_u(0,0) = 0`, `G_v(0,0) != 0`.
fn normal_series(g: &Poly, ord: usize) -> Series {
    let f = g.field();
    let gv = g.coeff(&[0, 1, 0]);
    let inv = f.inv(gv);
    let mut phi = vec![0u64; ord + 1];
    for k in 1..=ord {
        let s = Series::new(f, &phi, ord);
        let mut powers = vec![Series::new(f, &[1], ord)];
        let mut acc = Series::zero(f, ord);
        for (e, &c) in g.terms() {
            while powers.len() <= e[1] as usize {
                let next = powers.last().unwrap().mul(&s);
                powers.push(next);
            }
            let mut u_pow = vec![0u64; e[0] as usize + 1];
            u_pow[e[0] as usize] = 1;
            let term = Series::new(f, &u_pow, ord).mul(&powers[e[1] as usize]).scale(c);
            acc = acc.add(&term);
        }
        phi[k] = f.sub(phi[k], f.mul(acc.coeff(k), inv));
    }
    Series::new(f, &phi, ord)
}

/// Jets of `x, y, z` at `p` in local coordinates, truncated at `ord`.
fn local_jets(geom: &Geometry, p: Point, on_curve: bool, ord: usize) -> [Jet; 3] {
    let f = geom.field;
    let (a, phi) = if on_curve {
        let c = geom.ref_curve.as_ref().unwrap();
        let a = frame_at(f, p, Some(gradient_at(c, p)));
        let local = c.transform(&a).dehomogenize();
        (a, Some(normal_series(&local, ord)))
    } else {
        (frame_at(f, p, None), None)
    };
    let make = |i: usize| {
        // X_i = a_i0 u + a_i1 v + a_i2 with v = w + phi(u)
        let mut j = Jet::zero(ord);
        j.c[0] = a[i][2];
        if ord >= 1 {
            j.c[jet_index(1, 0)] = a[i][0];
            j.c[jet_index(0, 1)] = a[i][1];
        }
        if let Some(phi) = &phi {
            for k in 1..=ord {
                let idx = jet_index(k, 0);
                j.c[idx] = f.add(j.c[idx], f.mul(a[i][1], phi.coeff(k)));
            }
        }
        j
    };
    [make(0), make(1), make(2)]
}

/// Standard monomials `u^a w^b` of the local ideal; one row each.
fn condition_exponents(kind: PointKind) -> Vec<(usize, usize)> {
    let (full, extra) = match kind {
        PointKind::FreeFat(m) | PointKind::CurveFat(m) => (m as usize, 0),
        PointKind::CurveResidue { m, i } => (m as usize - 1, i as usize),
    };
    let mut out = Vec::new();
    for t in 0..full {
        for b in 0..=t {
            out.push((t - b, b));
        }
    }
    for b in 0..extra {
        out.push((full - b, b));
    }
    out
}

fn jet_order(kind: PointKind) -> usize {
    match kind {
        PointKind::FreeFat(m) | PointKind::CurveFat(m) => m as usize - 1,
        PointKind::CurveResidue { m, .. } => m as usize - 1,
    }
}

/// Interpolation matrix of `z` in degree `d`: one row per linear condition,
/// columns ordered as [`monomials`].
pub fn condition_rows(z: &ZeroScheme, d: i64, geom: &Geometry) -> Result<DenseMatrix, OracleError> {
    let f = geom.field;
    check_prime(f, d, z, None)?;
    validate_geometry(z, geom)?;
    if d < 0 {
        return Ok(DenseMatrix::zeros(f, z.degree() as usize, 0));
    }
    let d = d as u32;
    let monos = monomials(d);
    let mut m = DenseMatrix::zeros(f, 0, monos.len());
    for c in z.conditions() {
        let p = geom.placements[&c.id.0];
        let ord = jet_order(c.kind);
        let on_curve = matches!(c.kind, PointKind::CurveResidue { .. });
        let jets = local_jets(geom, p, on_curve, ord);
        let powers: Vec<Vec<Jet>> = jets
            .iter()
            .map(|j| {
                let mut v = vec![Jet::one(ord)];
                for _ in 0..d {
                    let next = v.last().unwrap().mul(j, f);
                    v.push(next);
                }
                v
            })
            .collect();
        let cols: Vec<Jet> = monos
            .iter()
            .map(|e| {
                powers[0][e[0] as usize]
                    .mul(&powers[1][e[1] as usize], f)
                    .mul(&powers[2][e[2] as usize], f)
            })
            .collect();
        for (a, b) in condition_exponents(c.kind) {
            let row: Vec<u64> = cols.iter().map(|j| j.get(a, b)).collect();
            m.push_row(&row);
        }
    }
    Ok(m)
}

fn report(z: &ZeroScheme, d: i64, rank: u64, p: u64, seed: u64, trials: u32) -> RankReport {
    let n = forms_dim(d);
    let h0 = n - rank;
    let chi = z.chi(d);
    RankReport {
        n,
        chi,
        dim: h0 as i64 - 1,
        h0,
        p,
        rank,
        regular: h0 as i64 == chi.max(0),
        rows: z.degree(),
        seed,
        trials,
    }
}

/// Rank of the interpolation matrix at one geometry.
pub fn rank_at(z: &ZeroScheme, d: i64, geom: &Geometry) -> Result<u64, OracleError> {
    Ok(condition_rows(z, d, geom)?.rank() as u64)
}

/// `h0` at a fixed geometry, reported as a single trial.
pub fn h0_at(z: &ZeroScheme, d: i64, geom: &Geometry) -> Result<RankReport, OracleError> {
    let rank = rank_at(z, d, geom)?;
    Ok(report(z, d, rank, geom.field.modulus(), geom.seed, 1))
}

/// Minimum `h0` over `trials` geometries seeded `seed ^ t`.
pub fn h0(
    z: &ZeroScheme,
    d: i64,
    a: Option<u32>,
    field: PrimeField,
    trials: u32,
    seed: u64,
) -> Result<RankReport, OracleError> {
    Ok(h0_traced(z, d, a, field, trials, seed)?.0)
}

/// As [`h0`], also returning the digest of each trial's geometry.
pub fn h0_traced(
    z: &ZeroScheme,
    d: i64,
    a: Option<u32>,
    field: PrimeField,
    trials: u32,
    seed: u64,
) -> Result<(RankReport, Vec<String>), OracleError> {
    if trials == 0 {
        return Err(OracleError::NoTrials);
    }
    check_prime(field, d, z, curve_degree(z, a))?;
    let runs: Vec<Result<(u64, String), OracleError>> = std::thread::scope(|s| {
        let handles: Vec<_> = (0..trials)
            .map(|t| {
                s.spawn(move || {
                    let geom = sample_geometry(z, a, field, seed ^ t as u64)?;
                    Ok((rank_at(z, d, &geom)?, geom.digest()))
                })
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("trial panicked")).collect()
    });
    let mut best = 0u64;
    let mut digests = Vec::with_capacity(runs.len());
    for r in runs {
        let (rank, digest) = r?;
        best = best.max(rank);
        digests.push(digest);
    }
    Ok((report(z, d, best, field.modulus(), seed, trials), digests))
}

/// Basis of the degree-`d` forms satisfying `z` at this geometry.
pub fn extract_basis(z: &ZeroScheme, d: i64, geom: &Geometry) -> Result<Vec<Poly>, OracleError> {
    let m = condition_rows(z, d, geom)?;
    if d < 0 {
        return Ok(vec![]);
    }
    let monos = monomials(d as u32);
    let basis = if m.rows() == 0 {
        (0..monos.len())
            .map(|k| {
                let mut v = vec![0; monos.len()];
                v[k] = 1;
                v
            })
            .collect()
    } else {
        m.nullspace()
    };
    Ok(basis
        .into_iter()
        .map(|v| Poly::from_terms(geom.field, 3, monos.iter().copied().zip(v)).monic())
        .collect())
}

/// `h0` after imposing a tangency to the reference curve at each listed
/// point: `CurveFat(m)` becomes `D^1(P^(m+1))`.
pub fn dim_on_restriction(
    z: &ZeroScheme,
    d: i64,
    geom: &Geometry,
    tangency: &[u32],
) -> Result<RankReport, OracleError> {
    let augmented = ZeroScheme::new(
        z.conditions().iter().map(|c| {
            let mut c = *c;
            if tangency.contains(&c.id.0) {
                if let PointKind::CurveFat(m) = c.kind {
                    c.kind = PointKind::tangency(m);
                }
            }
            c
        }),
        z.ref_curve().cloned(),
    )?;
    for &id in tangency {
        match augmented.get(crate::scheme::PointId(id)).map(|c| c.kind) {
            Some(PointKind::CurveResidue { i: 1, .. }) => {}
            _ => return Err(OracleError::NotTangencyCandidate(id)),
        }
    }
    h0_at(&augmented, d, geom)
}
