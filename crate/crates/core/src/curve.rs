//! Analysis of explicit plane curves over GF(p): multiplicity and tangent
//! cone at a point, the GF(p)-rational singular locus, and the number of
//! absolutely irreducible components.
//!
//! Component counting solves Gao's first-order differential system
//! `d/dy (g/f) = d/dx (h/f)` in a generic affine chart; the dimension of
//! its solution space is the number of absolutely irreducible factors,
//! provided `p > (2n - 1) n` for a curve of degree `n`.

use std::collections::BTreeMap;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use crate::field::{resultant, DenseMatrix, FieldError, Poly, PrimeField, UniPoly};

/// Projective point, normalized so its last nonzero coordinate is 1.
pub type Point = [u64; 3];

/// Degree limit for the resultant-based singular locus.
pub const SINGULAR_LOCUS_MAX_DEGREE: u32 = 12;

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum CurveError {
    #[error("zero polynomial")]
    ZeroCurve,
    #[error("curve is not homogeneous")]
    NotHomogeneous,
    #[error("curve is not squarefree")]
    NotSquarefree,
    #[error("expected multiplicity {expected}, measured {measured}")]
    MultiplicityMismatch { expected: u32, measured: u32 },
    #[error("characteristic {p} too small for degree {degree} (need p > {bound})")]
    SmallCharacteristic { p: u64, degree: u32, bound: u64 },
    #[error("degree {0} exceeds the singular-locus cutoff")]
    DegreeTooLarge(u32),
    #[error("no generic chart found")]
    NoGenericChart,
    #[error("point is the zero vector")]
    ZeroPoint,
    #[error("cannot parse curve: {0}")]
    Parse(String),
    #[error(transparent)]
    Field(#[from] FieldError),
}

pub fn normalize_point(field: PrimeField, p: Point) -> Result<Point, CurveError> {
    let k = (0..3).rev().find(|&k| p[k] % field.modulus() != 0).ok_or(CurveError::ZeroPoint)?;
    let inv = field.inv(p[k] % field.modulus());
    Ok([field.mul(p[0], inv), field.mul(p[1], inv), field.mul(p[2], inv)])
}

pub fn format_point(p: &Point) -> String {
    format!("{}:{}:{}", p[0], p[1], p[2])
}

pub fn parse_point(s: &str, field: PrimeField) -> Result<Point, CurveError> {
    let parts: Vec<&str> = s.trim().split(':').collect();
    if parts.len() != 3 {
        return Err(CurveError::Parse(format!("point '{}' must be x:y:z", s)));
    }
    let mut p = [0u64; 3];
    for (k, part) in parts.iter().enumerate() {
        let v: i64 = part
            .trim()
            .parse()
            .map_err(|_| CurveError::Parse(format!("bad coordinate '{}'", part)))?;
        p[k] = field.from_i64(v);
    }
    normalize_point(field, p)
}

fn check_curve(f: &Poly) -> Result<u32, CurveError> {
    if f.is_zero() {
        return Err(CurveError::ZeroCurve);
    }
    if f.nvars() != 3 || !f.is_homogeneous() {
        return Err(CurveError::NotHomogeneous);
    }
    let n = f.total_degree().unwrap();
    if f.field().modulus() <= n as u64 {
        return Err(CurveError::SmallCharacteristic {
            p: f.field().modulus(),
            degree: n,
            bound: n as u64,
        });
    }
    Ok(n)
}

/// Column-major completion of `p` to an invertible matrix `[q1 | q2 | p]`.
/// When `tangent` is given, `q1` is chosen on the line `tangent . X = 0`.
pub(crate) fn frame_at(field: PrimeField, p: Point, tangent: Option<[u64; 3]>) -> [[u64; 3]; 3] {
    let cross = |a: [u64; 3], b: [u64; 3]| -> [u64; 3] {
        [
            field.sub(field.mul(a[1], b[2]), field.mul(a[2], b[1])),
            field.sub(field.mul(a[2], b[0]), field.mul(a[0], b[2])),
            field.sub(field.mul(a[0], b[1]), field.mul(a[1], b[0])),
        ]
    };
    let dot = |a: [u64; 3], b: [u64; 3]| -> u64 {
        (0..3).fold(0, |acc, k| field.add(acc, field.mul(a[k], b[k])))
    };
    let units = [[1, 0, 0], [0, 1, 0], [0, 0, 1]];
    let (q1, q2) = match tangent {
        Some(t) => {
            // the tangent line through p is spanned by p and t x e for some e
            let q1 = units
                .iter()
                .map(|&e| cross(t, e))
                .find(|&q| q != [0, 0, 0] && cross(q, p) != [0, 0, 0])
                .expect("tangent line has a second point");
            let q2 = *units.iter().find(|&&e| dot(t, e) != 0).expect("nonzero tangent");
            (q1, q2)
        }
        None => {
            let q1 = *units.iter().find(|&&e| cross(e, p) != [0, 0, 0]).unwrap();
            let n = cross(p, q1);
            let q2 = *units.iter().find(|&&e| dot(n, e) != 0).unwrap();
            (q1, q2)
        }
    };
    let mut a = [[0u64; 3]; 3];
    for i in 0..3 {
        a[i] = [q1[i], q2[i], p[i]];
    }
    a
}

/// `F` in affine coordinates centred at `p`.
fn local_equation(f: &Poly, p: Point) -> Poly {
    let a = frame_at(f.field(), p, None);
    f.transform(&a).dehomogenize()
}

/// Order of vanishing of `F` at `p`.
pub fn multiplicity_at(f: &Poly, p: Point) -> Result<u32, CurveError> {
    check_curve(f)?;
    let p = normalize_point(f.field(), p)?;
    Ok(local_equation(f, p).order().unwrap_or(0))
}

/// Whether the tangent cone at `p` consists of `m` distinct lines.
pub fn is_ordinary(f: &Poly, p: Point, m: u32) -> Result<bool, CurveError> {
    check_curve(f)?;
    let p = normalize_point(f.field(), p)?;
    let local = local_equation(f, p);
    let measured = local.order().unwrap_or(0);
    if measured != m || m < 2 {
        return Err(CurveError::MultiplicityMismatch {
            expected: m,
            measured,
        });
    }
    Ok(binary_form_squarefree(&local.homogeneous_part(m), m))
}

/// A binary form in the first two variables is squarefree iff `y` divides
/// it at most once and its dehomogenization at `y = 1` is squarefree.
fn binary_form_squarefree(form: &Poly, m: u32) -> bool {
    let f = form.field();
    let mut coeffs = vec![0u64; m as usize + 1];
    for (e, &c) in form.terms() {
        coeffs[e[0] as usize] = c;
    }
    let u = UniPoly::new(f, coeffs);
    let drop = m as isize - u.deg();
    drop <= 1 && u.is_squarefree()
}

/// Squarefreeness of a form: no component in common with all partials.
pub fn is_squarefree(f: &Poly) -> Result<bool, CurveError> {
    check_curve(f)?;
    let mut g = f.clone();
    for v in 0..3 {
        g = g.gcd(&f.derivative(v))?;
        if g.is_constant() {
            return Ok(true);
        }
    }
    Ok(g.is_constant())
}

/// Random invertible change of coordinates after which `F` contains both
/// `x^n` and `y^n`; deterministic in the seed.
fn generic_frame(f: &Poly, seed: u64) -> Result<([[u64; 3]; 3], Poly), CurveError> {
    let field = f.field();
    let n = f.total_degree().unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let mut a = [[0u64; 3]; 3];
        for row in a.iter_mut() {
            for v in row.iter_mut() {
                *v = rng.gen_range(0..field.modulus());
            }
        }
        let det = DenseMatrix::from_rows(field, 3, a.iter().map(|r| r.to_vec()).collect()).determinant();
        if det == 0 {
            continue;
        }
        let g = f.transform(&a);
        if g.coeff(&[n, 0, 0]) != 0 && g.coeff(&[0, n, 0]) != 0 {
            return Ok((a, g));
        }
    }
    Err(CurveError::NoGenericChart)
}

fn apply(field: PrimeField, a: &[[u64; 3]; 3], v: Point) -> Point {
    let mut out = [0u64; 3];
    for i in 0..3 {
        out[i] = (0..3).fold(0, |acc, j| field.add(acc, field.mul(a[i][j], v[j])));
    }
    out
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularLocus {
    /// GF(p)-rational singular points, sorted.
    pub points: Vec<Point>,
    /// Set when elimination leaves singular points not defined over GF(p)
    /// or degenerates; the rational list is then not the whole locus.
    pub possibly_nonrational: bool,
}

/// Singular points of a squarefree curve of degree at most
/// [`SINGULAR_LOCUS_MAX_DEGREE`].
pub fn singular_points(f: &Poly) -> Result<SingularLocus, CurveError> {
    let n = check_curve(f)?;
    if n > SINGULAR_LOCUS_MAX_DEGREE {
        return Err(CurveError::DegreeTooLarge(n));
    }
    if !is_squarefree(f)? {
        return Err(CurveError::NotSquarefree);
    }
    let field = f.field();
    if n <= 1 {
        return Ok(SingularLocus {
            points: vec![],
            possibly_nonrational: false,
        });
    }
    let (a, g) = generic_frame(f, 0x51_6e_9a_12)?;
    let grad = g.gradient();
    let mut found = Vec::new();
    let mut nonrational = false;

    // affine chart z = 1
    let ga = g.dehomogenize();
    let (gx, gy) = (grad[0].dehomogenize(), grad[1].dehomogenize());
    let r1 = resultant(&gx, &gy, 1)?.to_unipoly(0);
    let r2 = resultant(&ga, &gy, 1)?.to_unipoly(0);
    let elim = r1.gcd(&r2);
    if r1.is_zero() || r2.is_zero() {
        nonrational = true;
    } else if elim.deg() > 0 {
        let roots = elim.roots_with_multiplicity();
        if roots.iter().map(|(_, k)| k).sum::<usize>() < elim.deg() as usize {
            nonrational = true;
        }
        for (x0, _) in roots {
            let fib = [&ga, &gx, &gy]
                .iter()
                .map(|q| q.substitute(0, x0).to_unipoly(1))
                .fold(UniPoly::zero(field), |acc, u| acc.gcd(&u));
            if fib.deg() <= 0 {
                continue;
            }
            let ys = fib.roots();
            if ys.len() < fib.deg() as usize {
                nonrational = true;
            }
            found.extend(ys.into_iter().map(|y0| [x0, y0, 1]));
        }
    }

    // line at infinity z = 0
    let at_inf: Vec<Poly> = std::iter::once(&g)
        .chain(grad.iter())
        .map(|q| q.substitute(2, 0))
        .collect();
    if at_inf.iter().all(|q| q.eval(&[1, 0, 0]) == 0) {
        found.push([1, 0, 0]);
    }
    let fib = at_inf
        .iter()
        .map(|q| q.substitute(1, 1).to_unipoly(0))
        .fold(UniPoly::zero(field), |acc, u| acc.gcd(&u));
    if fib.deg() > 0 {
        let xs = fib.roots();
        if xs.len() < fib.deg() as usize {
            nonrational = true;
        }
        found.extend(xs.into_iter().map(|x0| [x0, 1, 0]));
    }

    let mut points: Vec<Point> = found
        .into_iter()
        .map(|v| normalize_point(field, apply(field, &a, v)))
        .collect::<Result<_, _>>()?;
    points.sort_unstable();
    points.dedup();
    Ok(SingularLocus {
        points,
        possibly_nonrational: nonrational,
    })
}

/// Number of absolutely irreducible components of a squarefree curve.
pub fn absolute_factor_count(f: &Poly) -> Result<usize, CurveError> {
    let n = check_curve(f)?;
    let field = f.field();
    let bound = (2 * n as u64).saturating_sub(1) * n as u64;
    if field.modulus() <= bound {
        return Err(CurveError::SmallCharacteristic {
            p: field.modulus(),
            degree: n,
            bound,
        });
    }
    if !is_squarefree(f)? {
        return Err(CurveError::NotSquarefree);
    }
    if n <= 1 {
        return Ok(1);
    }
    let mut seed = 0x6a0_u64;
    let local = loop {
        let (_, g) = generic_frame(f, seed)?;
        let local = g.dehomogenize();
        if local.gcd(&local.derivative(0))?.is_constant() {
            break local;
        }
        seed += 1;
        if seed > 0x6a0 + 32 {
            return Err(CurveError::NoGenericChart);
        }
    };
    Ok(gao_solution_dimension(&local, n))
}

/// Dimension of `{(g, h) : f g_y - g f_y - f h_x + h f_x = 0}` with
/// `deg g <= (n-1, n)` and `deg h <= (n, n-1)` in `(x, y)`.
fn gao_solution_dimension(f: &Poly, n: u32) -> usize {
    let field = f.field();
    let (fx, fy) = (f.derivative(0), f.derivative(1));
    let mut columns: Vec<Poly> = Vec::new();
    for i in 0..n {
        for j in 0..=n {
            let g = Poly::monomial(field, 2, [i, j, 0], 1);
            columns.push(f.mul(&g.derivative(1)).sub(&g.mul(&fy)));
        }
    }
    for i in 0..=n {
        for j in 0..n {
            let h = Poly::monomial(field, 2, [i, j, 0], 1);
            columns.push(h.mul(&fx).sub(&f.mul(&h.derivative(0))));
        }
    }
    let mut index: BTreeMap<[u32; 3], usize> = BTreeMap::new();
    for col in &columns {
        for (e, _) in col.terms() {
            let next = index.len();
            index.entry(*e).or_insert(next);
        }
    }
    let mut m = DenseMatrix::zeros(field, index.len(), columns.len());
    for (j, col) in columns.iter().enumerate() {
        for (e, &c) in col.terms() {
            m.set(index[e], j, c);
        }
    }
    columns.len() - m.rank()
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct PointReport {
    pub point: String,
    pub mult_expected: u32,
    pub mult_observed: u32,
    /// `None` when the observed multiplicity is below 2.
    pub ordinary: Option<bool>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct SingularityReport {
    pub points: Vec<PointReport>,
    /// Singular points outside the prescribed list; `None` if not computed.
    pub extra_singularities: Option<Vec<String>>,
    pub possibly_nonrational: bool,
    /// Absolutely irreducible components; `None` if not computed.
    pub factors: Option<usize>,
    pub squarefree: bool,
}

/// Full report for a curve with prescribed points and multiplicities.
/// The singular locus and component count are skipped for non-squarefree
/// curves and above the degree cutoff.
pub fn analyze(f: &Poly, prescribed: &[(Point, u32)]) -> Result<SingularityReport, CurveError> {
    let n = check_curve(f)?;
    let field = f.field();
    let mut points = Vec::new();
    let mut normalized = Vec::new();
    for &(p, m) in prescribed {
        let p = normalize_point(field, p)?;
        normalized.push(p);
        let observed = multiplicity_at(f, p)?;
        let ordinary = if observed >= 2 {
            Some(is_ordinary(f, p, observed)?)
        } else {
            None
        };
        points.push(PointReport {
            point: format_point(&p),
            mult_expected: m,
            mult_observed: observed,
            ordinary,
        });
    }
    let squarefree = is_squarefree(f)?;
    let (extra, nonrational) = if squarefree && n <= SINGULAR_LOCUS_MAX_DEGREE {
        let locus = singular_points(f)?;
        let extra = locus
            .points
            .iter()
            .filter(|p| !normalized.contains(p))
            .map(format_point)
            .collect();
        (Some(extra), locus.possibly_nonrational)
    } else {
        (None, false)
    };
    let factors = if squarefree {
        absolute_factor_count(f).ok()
    } else {
        None
    };
    Ok(SingularityReport {
        points,
        extra_singularities: extra,
        possibly_nonrational: nonrational,
        factors,
        squarefree,
    })
}

// ---- text formats ----

/// Parses either `monomial:coeff` lines (`x^2*y:5`) or an inline expression
/// (`x^2*y - 3*z^3`). Lines starting with `#` are ignored.
pub fn parse_curve(text: &str, field: PrimeField) -> Result<Poly, CurveError> {
    let body: Vec<&str> = text
        .lines()
        .map(str::trim)
        .filter(|l| !l.is_empty() && !l.starts_with('#'))
        .collect();
    let mut out = Poly::zero(field, 3);
    if !body.is_empty() && body.iter().all(|l| l.contains(':')) {
        for line in body {
            let (mono, coeff) = line.rsplit_once(':').unwrap();
            let c: i64 = coeff
                .trim()
                .parse()
                .map_err(|_| CurveError::Parse(format!("bad coefficient in '{}'", line)))?;
            let (k, e) = parse_monomial(mono.trim())?;
            out.add_term(e, field.mul(field.from_i64(c), field.from_i64(k)));
        }
        return Ok(out);
    }
    let expr: String = body.join(" ");
    let expr: String = expr.chars().filter(|c| !c.is_whitespace()).collect();
    if expr.is_empty() {
        return Err(CurveError::Parse("empty curve".into()));
    }
    let mut term = String::new();
    let mut sign = 1i64;
    let flush = |term: &mut String, sign: i64, out: &mut Poly| -> Result<(), CurveError> {
        if term.is_empty() {
            return Ok(());
        }
        let (k, e) = parse_monomial(term)?;
        out.add_term(e, field.from_i64(sign.checked_mul(k).ok_or_else(|| CurveError::Parse("coefficient overflow".into()))?));
        term.clear();
        Ok(())
    };
    for ch in expr.chars() {
        match ch {
            '+' | '-' if !term.ends_with('^') => {
                flush(&mut term, sign, &mut out)?;
                sign = if ch == '-' { -1 } else { 1 };
            }
            _ => term.push(ch),
        }
    }
    flush(&mut term, sign, &mut out)?;
    Ok(out)
}

/// `3*x^2*y` -> (3, [2, 1, 0])
fn parse_monomial(s: &str) -> Result<(i64, [u32; 3]), CurveError> {
    let mut coeff = 1i64;
    let mut e = [0u32; 3];
    for factor in s.split('*').map(str::trim).filter(|f| !f.is_empty()) {
        let (base, pow) = match factor.split_once('^') {
            Some((b, p)) => (
                b,
                p.parse::<u32>()
                    .map_err(|_| CurveError::Parse(format!("bad exponent in '{}'", factor)))?,
            ),
            None => (factor, 1),
        };
        match base {
            "x" => e[0] += pow,
            "y" => e[1] += pow,
            "z" => e[2] += pow,
            num => {
                let v: i64 = num
                    .parse()
                    .map_err(|_| CurveError::Parse(format!("bad factor '{}'", factor)))?;
                coeff = coeff
                    .checked_mul(v.checked_pow(pow).ok_or_else(|| CurveError::Parse("coefficient overflow".into()))?)
                    .ok_or_else(|| CurveError::Parse("coefficient overflow".into()))?;
            }
        }
    }
    Ok((coeff, e))
}

/// `monomial:coeff` lines, coefficients as symmetric residues.
pub fn format_curve(f: &Poly) -> String {
    let field = f.field();
    let mut out = String::new();
    for (e, &c) in f.terms().collect::<Vec<_>>().into_iter().rev() {
        let mut factors = Vec::new();
        for (v, name) in ["x", "y", "z"].iter().enumerate() {
            match e[v] {
                0 => {}
                1 => factors.push(name.to_string()),
                k => factors.push(format!("{}^{}", name, k)),
            }
        }
        let mono = if factors.is_empty() { "1".to_string() } else { factors.join("*") };
        out.push_str(&format!("{}:{}\n", mono, field.to_signed(c)));
    }
    out
}

/// Reads `# point x:y:z mult m` annotations from a curve file.
pub fn parse_point_annotations(text: &str, field: PrimeField) -> Result<Vec<(Point, u32)>, CurveError> {
    let mut out = Vec::new();
    for line in text.lines() {
        let Some(rest) = line.trim().strip_prefix('#') else {
            continue;
        };
        let words: Vec<&str> = rest.split_whitespace().collect();
        if let ["point", coords, "mult", m] = words.as_slice() {
            let m: u32 = m
                .parse()
                .map_err(|_| CurveError::Parse(format!("bad multiplicity in '{}'", line)))?;
            out.push((parse_point(coords, field)?, m));
        }
    }
    Ok(out)
}
