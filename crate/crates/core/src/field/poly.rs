//! Sparse polynomials in up to three variables over GF(p).
//!
//! Plane curves are homogeneous forms in `x, y, z` (variables 0, 1, 2);
//! affine charts use the first two variables.

use std::collections::BTreeMap;
use std::fmt;

use super::{FieldError, PrimeField, UniPoly};

/// Exponent vector; unused variables carry exponent 0.
pub type Exps = [u32; 3];

pub const VAR_NAMES: [&str; 3] = ["x", "y", "z"];

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Poly {
    field: PrimeField,
    nvars: usize,
    terms: BTreeMap<Exps, u64>,
}

impl fmt::Debug for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Poly({})", self)
    }
}

impl fmt::Display for Poly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.terms.is_empty() {
            return write!(f, "0");
        }
        let mut first = true;
        for (e, &c) in self.terms.iter().rev() {
            let c = self.field.to_signed(c);
            let (sign, mag) = if c < 0 { ("-", -c) } else { ("+", c) };
            if first {
                if sign == "-" {
                    write!(f, "-")?;
                }
            } else {
                write!(f, " {} ", sign)?;
            }
            first = false;
            let mut factors = Vec::new();
            for (v, &k) in e.iter().enumerate().take(self.nvars) {
                match k {
                    0 => {}
                    1 => factors.push(VAR_NAMES[v].to_string()),
                    _ => factors.push(format!("{}^{}", VAR_NAMES[v], k)),
                }
            }
            if factors.is_empty() {
                write!(f, "{}", mag)?;
            } else if mag == 1 {
                write!(f, "{}", factors.join("*"))?;
            } else {
                write!(f, "{}*{}", mag, factors.join("*"))?;
            }
        }
        Ok(())
    }
}

impl Poly {
    pub fn zero(field: PrimeField, nvars: usize) -> Self {
        assert!((1..=3).contains(&nvars), "1 to 3 variables supported");
        Self {
            field,
            nvars,
            terms: BTreeMap::new(),
        }
    }

    pub fn constant(field: PrimeField, nvars: usize, c: u64) -> Self {
        Self::monomial(field, nvars, [0, 0, 0], c)
    }

    pub fn var(field: PrimeField, nvars: usize, v: usize) -> Self {
        let mut e = [0; 3];
        e[v] = 1;
        Self::monomial(field, nvars, e, 1)
    }

    pub fn monomial(field: PrimeField, nvars: usize, e: Exps, c: u64) -> Self {
        let mut out = Self::zero(field, nvars);
        out.add_term(e, c);
        out
    }

    pub fn from_terms(
        field: PrimeField,
        nvars: usize,
        terms: impl IntoIterator<Item = (Exps, u64)>,
    ) -> Self {
        let mut out = Self::zero(field, nvars);
        for (e, c) in terms {
            out.add_term(e, c);
        }
        out
    }

    /// Linear form `a*x + b*y + c*z`.
    pub fn linear(field: PrimeField, coeffs: [u64; 3]) -> Self {
        Self::from_terms(
            field,
            3,
            (0..3).map(|v| {
                let mut e = [0; 3];
                e[v] = 1;
                (e, coeffs[v])
            }),
        )
    }

    pub fn add_term(&mut self, e: Exps, c: u64) {
        debug_assert!(e[self.nvars..].iter().all(|&k| k == 0));
        let c = c % self.field.modulus();
        if c == 0 {
            return;
        }
        let f = self.field;
        let entry = self.terms.entry(e).or_insert(0);
        *entry = f.add(*entry, c);
        if *entry == 0 {
            self.terms.remove(&e);
        }
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn nvars(&self) -> usize {
        self.nvars
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Exps, &u64)> {
        self.terms.iter()
    }

    pub fn num_terms(&self) -> usize {
        self.terms.len()
    }

    pub fn coeff(&self, e: &Exps) -> u64 {
        self.terms.get(e).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn is_constant(&self) -> bool {
        self.terms.keys().all(|e| e == &[0, 0, 0])
    }

    /// Leading coefficient in lexicographic order.
    pub fn lc(&self) -> u64 {
        self.terms.values().next_back().copied().unwrap_or(0)
    }

    pub fn total_degree(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).max()
    }

    pub fn degree_in(&self, v: usize) -> Option<u32> {
        self.terms.keys().map(|e| e[v]).max()
    }

    /// Smallest total degree of a term.
    pub fn order(&self) -> Option<u32> {
        self.terms.keys().map(|e| e.iter().sum()).min()
    }

    pub fn is_homogeneous(&self) -> bool {
        let mut degs = self.terms.keys().map(|e| e.iter().sum::<u32>());
        match degs.next() {
            None => true,
            Some(d) => degs.all(|k| k == d),
        }
    }

    pub fn homogeneous_part(&self, deg: u32) -> Poly {
        Self::from_terms(
            self.field,
            self.nvars,
            self.terms
                .iter()
                .filter(|(e, _)| e.iter().sum::<u32>() == deg)
                .map(|(e, &c)| (*e, c)),
        )
    }

    pub fn variables(&self) -> Vec<usize> {
        (0..self.nvars)
            .filter(|&v| self.terms.keys().any(|e| e[v] > 0))
            .collect()
    }

    pub fn eval(&self, point: &[u64]) -> u64 {
        assert!(point.len() >= self.nvars);
        let f = self.field;
        self.terms.iter().fold(0, |acc, (e, &c)| {
            let mut t = c;
            for v in 0..self.nvars {
                if e[v] > 0 {
                    t = f.mul(t, f.pow(point[v], e[v] as u64));
                }
            }
            f.add(acc, t)
        })
    }

    pub fn add(&self, other: &Poly) -> Poly {
        let mut out = self.clone();
        out.nvars = self.nvars.max(other.nvars);
        for (e, &c) in &other.terms {
            out.add_term(*e, c);
        }
        out
    }

    pub fn neg(&self) -> Poly {
        self.scale(self.field.neg(1))
    }

    pub fn sub(&self, other: &Poly) -> Poly {
        self.add(&other.neg())
    }

    pub fn scale(&self, c: u64) -> Poly {
        let f = self.field;
        Self::from_terms(
            f,
            self.nvars,
            self.terms.iter().map(|(e, &a)| (*e, f.mul(a, c))),
        )
    }

    pub fn mul(&self, other: &Poly) -> Poly {
        let f = self.field;
        let mut out = Self::zero(f, self.nvars.max(other.nvars));
        for (ea, &a) in &self.terms {
            for (eb, &b) in &other.terms {
                out.add_term([ea[0] + eb[0], ea[1] + eb[1], ea[2] + eb[2]], f.mul(a, b));
            }
        }
        out
    }

    pub fn pow(&self, mut e: u32) -> Poly {
        let mut acc = Self::constant(self.field, self.nvars, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn derivative(&self, v: usize) -> Poly {
        let f = self.field;
        Self::from_terms(
            f,
            self.nvars,
            self.terms.iter().filter(|(e, _)| e[v] > 0).map(|(e, &c)| {
                let mut e2 = *e;
                e2[v] -= 1;
                (e2, f.mul(c, e[v] as u64 % f.modulus()))
            }),
        )
    }

    pub fn gradient(&self) -> Vec<Poly> {
        (0..self.nvars).map(|v| self.derivative(v)).collect()
    }

    /// Substitutes `v = value`.
    pub fn substitute(&self, v: usize, value: u64) -> Poly {
        let f = self.field;
        Self::from_terms(
            f,
            self.nvars,
            self.terms.iter().map(|(e, &c)| {
                let mut e2 = *e;
                e2[v] = 0;
                (e2, f.mul(c, f.pow(value, e[v] as u64)))
            }),
        )
    }

    /// `self(forms[0], forms[1], forms[2])`; the result lives in the ring of
    /// the substituted forms.
    pub fn compose(&self, forms: &[Poly]) -> Poly {
        assert!(forms.len() >= self.nvars);
        let f = self.field;
        let nv = forms.iter().map(|p| p.nvars).max().unwrap_or(1);
        let mut powers: Vec<Vec<Poly>> = Vec::with_capacity(self.nvars);
        for v in 0..self.nvars {
            let maxe = self.degree_in(v).unwrap_or(0);
            let mut pw = vec![Poly::constant(f, nv, 1)];
            for k in 1..=maxe as usize {
                let next = pw[k - 1].mul(&forms[v]);
                pw.push(next);
            }
            powers.push(pw);
        }
        let mut out = Poly::zero(f, nv);
        for (e, &c) in &self.terms {
            let mut t = Poly::constant(f, nv, c);
            for v in 0..self.nvars {
                if e[v] > 0 {
                    t = t.mul(&powers[v][e[v] as usize]);
                }
            }
            out = out.add(&t);
        }
        out
    }

    /// Applies the projective change of coordinates `X = A X'`, i.e. returns
    /// `F(A (x, y, z))` where `a` is row-major 3x3.
    pub fn transform(&self, a: &[[u64; 3]; 3]) -> Poly {
        let f = self.field;
        let forms: Vec<Poly> = (0..3).map(|i| Poly::linear(f, a[i])).collect();
        self.compose(&forms)
    }

    /// `F(x, y, 1)` as a polynomial in the first two variables.
    pub fn dehomogenize(&self) -> Poly {
        assert_eq!(self.nvars, 3);
        let mut out = Poly::zero(self.field, 2);
        for (e, &c) in &self.terms {
            out.add_term([e[0], e[1], 0], c);
        }
        out
    }

    /// Inverse of [`Poly::dehomogenize`] at the given degree.
    pub fn homogenize(&self, degree: u32) -> Poly {
        assert!(self.nvars <= 2);
        let mut out = Poly::zero(self.field, 3);
        for (e, &c) in &self.terms {
            let s = e[0] + e[1];
            assert!(s <= degree, "homogenizing below the total degree");
            out.add_term([e[0], e[1], degree - s], c);
        }
        out
    }

    /// Coefficients of `v^k`, `k = 0..=deg_v`, each free of `v`.
    pub fn coefficients_in(&self, v: usize) -> Vec<Poly> {
        let deg = self.degree_in(v).unwrap_or(0) as usize;
        let mut out = vec![Poly::zero(self.field, self.nvars); deg + 1];
        for (e, &c) in &self.terms {
            let mut e2 = *e;
            let k = e2[v] as usize;
            e2[v] = 0;
            out[k].add_term(e2, c);
        }
        out
    }

    /// Converts a polynomial involving only variable `v` to a [`UniPoly`].
    pub fn to_unipoly(&self, v: usize) -> UniPoly {
        let deg = self.degree_in(v).unwrap_or(0) as usize;
        let mut coeffs = vec![0; deg + 1];
        for (e, &c) in &self.terms {
            assert!(
                (0..3).all(|w| w == v || e[w] == 0),
                "polynomial is not univariate in variable {}",
                v
            );
            coeffs[e[v] as usize] = c;
        }
        UniPoly::new(self.field, coeffs)
    }

    pub fn from_unipoly(u: &UniPoly, nvars: usize, v: usize) -> Poly {
        Poly::from_terms(
            u.field(),
            nvars,
            u.coeffs().iter().enumerate().map(|(k, &c)| {
                let mut e = [0; 3];
                e[v] = k as u32;
                (e, c)
            }),
        )
    }

    /// Divides out the leading coefficient (lexicographic order).
    pub fn monic(&self) -> Poly {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lc()))
    }

    /// Exact quotient `self / d`, or `None` when `d` does not divide `self`.
    pub fn div_exact(&self, d: &Poly) -> Option<Poly> {
        assert!(!d.is_zero(), "division by zero polynomial");
        let f = self.field;
        let (&lead_e, &lead_c) = d.terms.iter().next_back().unwrap();
        let inv = f.inv(lead_c);
        let mut rem = self.clone();
        let mut quot = Poly::zero(f, self.nvars.max(d.nvars));
        while let Some((&e, &c)) = rem.terms.iter().next_back() {
            if (0..3).any(|v| e[v] < lead_e[v]) {
                return None;
            }
            let qe = [e[0] - lead_e[0], e[1] - lead_e[1], e[2] - lead_e[2]];
            let qc = f.mul(c, inv);
            let t = Poly::monomial(f, quot.nvars, qe, qc);
            rem = rem.sub(&t.mul(d));
            quot.add_term(qe, qc);
        }
        Some(quot)
    }

    /// Gcd, normalized monic in lexicographic order.
    ///
    /// Supports inputs involving at most two variables, and pairs of
    /// homogeneous forms in three variables.
    pub fn gcd(&self, other: &Poly) -> Result<Poly, FieldError> {
        let f = self.field;
        let nv = self.nvars.max(other.nvars);
        if self.is_zero() {
            return Ok(other.monic());
        }
        if other.is_zero() {
            return Ok(self.monic());
        }
        let mut vars = self.variables();
        for v in other.variables() {
            if !vars.contains(&v) {
                vars.push(v);
            }
        }
        vars.sort_unstable();
        match vars.len() {
            0 => Ok(Poly::constant(f, nv, 1)),
            1 => {
                let v = vars[0];
                let g = self.to_unipoly(v).gcd(&other.to_unipoly(v));
                Ok(Poly::from_unipoly(&g, nv, v))
            }
            2 => {
                let g = bivariate_gcd(self, other, vars[0], vars[1]);
                Ok(Poly { nvars: nv, ..g })
            }
            _ => {
                if !(self.is_homogeneous() && other.is_homogeneous()) {
                    return Err(FieldError::Unsupported(
                        "gcd of non-homogeneous trivariate polynomials",
                    ));
                }
                let za = self.terms.keys().map(|e| e[2]).min().unwrap();
                let zb = other.terms.keys().map(|e| e[2]).min().unwrap();
                let g = self.dehomogenize().gcd(&other.dehomogenize())?;
                let deg = g.total_degree().unwrap_or(0);
                let zpow = Poly::monomial(f, 3, [0, 0, za.min(zb)], 1);
                Ok(g.homogenize(deg).mul(&zpow).monic())
            }
        }
    }
}

// ---- bivariate gcd via primitive pseudo-remainder sequences ----

/// Polynomial in `main` with coefficients univariate in `coef`.
type BiPoly = Vec<UniPoly>;

fn to_bi(p: &Poly, coef: usize, main: usize) -> BiPoly {
    let f = p.field();
    let deg = p.degree_in(main).unwrap_or(0) as usize;
    let mut rows: Vec<Vec<u64>> = vec![Vec::new(); deg + 1];
    for (e, &c) in p.terms() {
        let row = &mut rows[e[main] as usize];
        let k = e[coef] as usize;
        if row.len() <= k {
            row.resize(k + 1, 0);
        }
        row[k] = c;
    }
    let mut out: BiPoly = rows.into_iter().map(|r| UniPoly::new(f, r)).collect();
    trim_bi(&mut out);
    out
}

fn from_bi(b: &BiPoly, f: PrimeField, nvars: usize, coef: usize, main: usize) -> Poly {
    let mut out = Poly::zero(f, nvars);
    for (j, u) in b.iter().enumerate() {
        for (k, &c) in u.coeffs().iter().enumerate() {
            let mut e = [0; 3];
            e[main] = j as u32;
            e[coef] = k as u32;
            out.add_term(e, c);
        }
    }
    out
}

fn trim_bi(b: &mut BiPoly) {
    while b.last().is_some_and(|u| u.is_zero()) {
        b.pop();
    }
}

fn bi_content(b: &BiPoly, f: PrimeField) -> UniPoly {
    b.iter()
        .fold(UniPoly::zero(f), |acc, u| acc.gcd(u))
}

fn bi_primitive(b: &BiPoly, f: PrimeField) -> BiPoly {
    let c = bi_content(b, f);
    if c.is_zero() {
        return b.clone();
    }
    b.iter()
        .map(|u| u.div_exact(&c).expect("content divides coefficients"))
        .collect()
}

/// Pseudo-remainder of `a` by `b` in the main variable.
fn bi_prem(a: &BiPoly, b: &BiPoly) -> BiPoly {
    let db = b.len() - 1;
    let lb = b[db].clone();
    let mut r = a.clone();
    while r.len() > db {
        let dr = r.len() - 1;
        let lr = r[dr].clone();
        let shift = dr - db;
        let mut next: BiPoly = r.iter().map(|u| u.mul(&lb)).collect();
        for (j, u) in b.iter().enumerate() {
            next[j + shift] = next[j + shift].sub(&u.mul(&lr));
        }
        trim_bi(&mut next);
        r = next;
    }
    r
}

fn bivariate_gcd(a: &Poly, b: &Poly, coef: usize, main: usize) -> Poly {
    let f = a.field();
    let nv = a.nvars().max(b.nvars());
    let ba = to_bi(a, coef, main);
    let bb = to_bi(b, coef, main);
    let cont = bi_content(&ba, f).gcd(&bi_content(&bb, f));
    let (mut x, mut y) = (bi_primitive(&ba, f), bi_primitive(&bb, f));
    if x.len() < y.len() {
        std::mem::swap(&mut x, &mut y);
    }
    let prim = loop {
        if y.len() == 1 {
            // constant in the main variable: primitive part is 1
            break vec![UniPoly::constant(f, 1)];
        }
        let r = bi_prem(&x, &y);
        if r.is_empty() {
            break y;
        }
        x = y;
        y = bi_primitive(&r, f);
    };
    let g: BiPoly = prim.iter().map(|u| u.mul(&cont)).collect();
    from_bi(&g, f, nv, coef, main).monic()
}

// ---- resultants ----

/// Sylvester resultant of `f` and `g` with respect to variable `v`.
///
/// Convention: the determinant of the Sylvester matrix whose first
/// `deg_v g` rows carry the coefficients of `f` from the leading one down,
/// followed by `deg_v f` rows for `g`. With this convention
/// `res_y(y - x, y + x) = 2x`.
pub fn resultant(f: &Poly, g: &Poly, v: usize) -> Result<Poly, FieldError> {
    if f.is_zero() || g.is_zero() {
        return Err(FieldError::Degenerate("resultant of a zero polynomial"));
    }
    let n = f.degree_in(v).unwrap_or(0) as usize;
    let m = g.degree_in(v).unwrap_or(0) as usize;
    if n == 0 && m == 0 {
        return Err(FieldError::Degenerate(
            "both polynomials are constant in the eliminated variable",
        ));
    }
    let nvars = f.nvars().max(g.nvars());
    let free: Vec<usize> = (0..nvars).filter(|&w| w != v).collect();
    resultant_rec(f, g, v, n, m, &free, nvars)
}

fn resultant_rec(
    f: &Poly,
    g: &Poly,
    v: usize,
    n: usize,
    m: usize,
    free: &[usize],
    nvars: usize,
) -> Result<Poly, FieldError> {
    let field = f.field();
    let Some((&w, rest)) = free.split_first() else {
        let fc = f.coefficients_in(v);
        let gc = g.coefficients_in(v);
        let coef = |cs: &[Poly], k: usize| cs.get(k).map(|p| p.coeff(&[0, 0, 0])).unwrap_or(0);
        let size = n + m;
        let mut rows = Vec::with_capacity(size);
        for i in 0..m {
            let mut row = vec![0; size];
            for k in 0..=n {
                row[i + k] = coef(&fc, n - k);
            }
            rows.push(row);
        }
        for i in 0..n {
            let mut row = vec![0; size];
            for k in 0..=m {
                row[i + k] = coef(&gc, m - k);
            }
            rows.push(row);
        }
        let det = super::DenseMatrix::from_rows(field, size, rows).determinant();
        return Ok(Poly::constant(field, nvars, det));
    };
    let dfw = f.degree_in(w).unwrap_or(0) as usize;
    let dgw = g.degree_in(w).unwrap_or(0) as usize;
    let bound = n * dgw + m * dfw;
    if bound == 0 {
        return resultant_rec(f, g, v, n, m, rest, nvars);
    }
    if (bound as u64) >= field.modulus() {
        return Err(FieldError::Unsupported(
            "field too small for resultant interpolation",
        ));
    }
    let nodes: Vec<u64> = (0..=bound as u64).collect();
    let mut samples = Vec::with_capacity(nodes.len());
    for &c in &nodes {
        samples.push(resultant_rec(
            &f.substitute(w, c),
            &g.substitute(w, c),
            v,
            n,
            m,
            rest,
            nvars,
        )?);
    }
    let basis = lagrange_basis(field, &nodes);
    let mut out = Poly::zero(field, nvars);
    for (sample, lag) in samples.iter().zip(&basis) {
        let lag = Poly::from_unipoly(lag, nvars, w);
        out = out.add(&sample.mul(&lag));
    }
    Ok(out)
}

fn lagrange_basis(f: PrimeField, nodes: &[u64]) -> Vec<UniPoly> {
    let full = nodes.iter().fold(UniPoly::constant(f, 1), |acc, &c| {
        acc.mul(&UniPoly::linear_root(f, c))
    });
    nodes
        .iter()
        .map(|&c| {
            let num = full.div_exact(&UniPoly::linear_root(f, c)).unwrap();
            let denom = num.eval(c);
            num.scale(f.inv(denom))
        })
        .collect()
}
