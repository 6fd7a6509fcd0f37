//! Dense univariate polynomials over GF(p).

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::PrimeField;

/// Coefficients in increasing degree; no trailing zeros.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct UniPoly {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl UniPoly {
    pub fn new(field: PrimeField, mut coeffs: Vec<u64>) -> Self {
        let p = field.modulus();
        for c in coeffs.iter_mut() {
            *c %= p;
        }
        while coeffs.last() == Some(&0) {
            coeffs.pop();
        }
        Self { field, coeffs }
    }

    pub fn zero(field: PrimeField) -> Self {
        Self {
            field,
            coeffs: Vec::new(),
        }
    }

    pub fn constant(field: PrimeField, c: u64) -> Self {
        Self::new(field, vec![c])
    }

    pub fn x(field: PrimeField) -> Self {
        Self::new(field, vec![0, 1])
    }

    /// `x - r`
    pub fn linear_root(field: PrimeField, r: u64) -> Self {
        Self::new(field, vec![field.neg(r), 1])
    }

    pub fn field(&self) -> PrimeField {
        self.field
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    /// Degree with `deg 0 = -1`.
    pub fn deg(&self) -> isize {
        self.coeffs.len() as isize - 1
    }

    pub fn lc(&self) -> u64 {
        self.coeffs.last().copied().unwrap_or(0)
    }

    pub fn eval(&self, x: u64) -> u64 {
        let f = self.field;
        self.coeffs
            .iter()
            .rev()
            .fold(0, |acc, &c| f.add(f.mul(acc, x), c))
    }

    pub fn add(&self, other: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            f,
            (0..n).map(|k| f.add(self.coeff(k), other.coeff(k))).collect(),
        )
    }

    pub fn sub(&self, other: &Self) -> Self {
        let f = self.field;
        let n = self.coeffs.len().max(other.coeffs.len());
        Self::new(
            f,
            (0..n).map(|k| f.sub(self.coeff(k), other.coeff(k))).collect(),
        )
    }

    pub fn scale(&self, c: u64) -> Self {
        let f = self.field;
        Self::new(f, self.coeffs.iter().map(|&a| f.mul(a, c)).collect())
    }

    pub fn mul(&self, other: &Self) -> Self {
        if self.is_zero() || other.is_zero() {
            return Self::zero(self.field);
        }
        let f = self.field;
        let mut out = vec![0u64; self.coeffs.len() + other.coeffs.len() - 1];
        for (i, &a) in self.coeffs.iter().enumerate() {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate() {
                out[i + j] = f.add(out[i + j], f.mul(a, b));
            }
        }
        Self::new(f, out)
    }

    pub fn pow(&self, mut e: u32) -> Self {
        let mut acc = Self::constant(self.field, 1);
        let mut base = self.clone();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            base = base.mul(&base);
            e >>= 1;
        }
        acc
    }

    /// Euclidean division; panics if `d` is zero.
    pub fn div_rem(&self, d: &Self) -> (Self, Self) {
        assert!(!d.is_zero(), "division by zero polynomial");
        let f = self.field;
        let mut rem = self.coeffs.clone();
        let dd = d.coeffs.len() - 1;
        if rem.len() <= dd {
            return (Self::zero(f), self.clone());
        }
        let inv = f.inv(d.lc());
        let mut quot = vec![0u64; rem.len() - dd];
        for k in (0..quot.len()).rev() {
            let c = f.mul(rem[k + dd], inv);
            quot[k] = c;
            if c == 0 {
                continue;
            }
            for (j, &b) in d.coeffs.iter().enumerate() {
                rem[k + j] = f.sub(rem[k + j], f.mul(c, b));
            }
        }
        rem.truncate(dd);
        (Self::new(f, quot), Self::new(f, rem))
    }

    pub fn rem(&self, d: &Self) -> Self {
        self.div_rem(d).1
    }

    /// Exact quotient, `None` if `d` does not divide `self`.
    pub fn div_exact(&self, d: &Self) -> Option<Self> {
        let (q, r) = self.div_rem(d);
        r.is_zero().then_some(q)
    }

    pub fn derivative(&self) -> Self {
        let f = self.field;
        Self::new(
            f,
            self.coeffs
                .iter()
                .enumerate()
                .skip(1)
                .map(|(k, &c)| f.mul(c, k as u64 % f.modulus()))
                .collect(),
        )
    }

    pub fn monic(&self) -> Self {
        if self.is_zero() {
            return self.clone();
        }
        self.scale(self.field.inv(self.lc()))
    }

    /// Monic gcd (zero if both inputs are zero).
    pub fn gcd(&self, other: &Self) -> Self {
        let (mut a, mut b) = (self.clone(), other.clone());
        while !b.is_zero() {
            let r = a.rem(&b);
            a = b;
            b = r;
        }
        a.monic()
    }

    pub fn is_squarefree(&self) -> bool {
        self.gcd(&self.derivative()).deg() <= 0
    }

    fn pow_mod(&self, mut e: u64, modulus: &Self) -> Self {
        let mut acc = Self::constant(self.field, 1).rem(modulus);
        let mut base = self.rem(modulus);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base).rem(modulus);
            }
            base = base.mul(&base).rem(modulus);
            e >>= 1;
        }
        acc
    }

    /// Product of the distinct linear factors, `gcd(f, x^p - x)`.
    pub fn rational_part(&self) -> Self {
        if self.deg() <= 0 {
            return Self::constant(self.field, 1);
        }
        let f = self.monic();
        let xp = Self::x(self.field).pow_mod(self.field.modulus(), &f);
        f.gcd(&xp.sub(&Self::x(self.field)))
    }

    /// Distinct roots in GF(p), sorted. Equal-degree splitting uses a fixed
    /// seed so the result is deterministic.
    pub fn roots(&self) -> Vec<u64> {
        assert!(!self.is_zero(), "roots of the zero polynomial");
        let g = self.rational_part();
        let mut out = Vec::new();
        let mut rng = ChaCha8Rng::seed_from_u64(0x5eed_0f_2007);
        split_linear(&g, &mut rng, &mut out);
        out.sort_unstable();
        out
    }

    /// Roots in GF(p) with multiplicities.
    pub fn roots_with_multiplicity(&self) -> Vec<(u64, usize)> {
        self.roots()
            .into_iter()
            .map(|r| {
                let lin = Self::linear_root(self.field, r);
                let mut k = 0;
                let mut cur = self.clone();
                while let Some(q) = cur.div_exact(&lin) {
                    cur = q;
                    k += 1;
                }
                (r, k)
            })
            .collect()
    }
}

fn split_linear(g: &UniPoly, rng: &mut ChaCha8Rng, out: &mut Vec<u64>) {
    let f = g.field();
    match g.degree() {
        None | Some(0) => {}
        Some(1) => out.push(f.div(f.neg(g.coeff(0)), g.coeff(1))),
        Some(_) => {
            let p = f.modulus();
            if p == 2 {
                for r in 0..2 {
                    if g.eval(r) == 0 {
                        out.push(r);
                    }
                }
                return;
            }
            loop {
                let shift = rng.gen_range(0..p);
                let h = UniPoly::new(f, vec![shift, 1]).pow_mod((p - 1) / 2, g);
                let d = g.gcd(&h.sub(&UniPoly::constant(f, 1)));
                if d.deg() > 0 && d.deg() < g.deg() {
                    let (q, _) = g.div_rem(&d);
                    split_linear(&d, rng, out);
                    split_linear(&q.monic(), rng, out);
                    return;
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn f() -> PrimeField {
        PrimeField::new(1_000_003).unwrap()
    }

    fn from_roots(roots: &[u64]) -> UniPoly {
        roots.iter().fold(UniPoly::constant(f(), 1), |acc, &r| {
            acc.mul(&UniPoly::linear_root(f(), r))
        })
    }

    #[test]
    fn finds_rational_roots_only() {
        let mut g = from_roots(&[3, 17, 17, 999_000]);
        // x^2 + 1 has no roots since p = 3 mod 4
        g = g.mul(&UniPoly::new(f(), vec![1, 0, 1]));
        assert_eq!(g.roots(), vec![3, 17, 999_000]);
        assert_eq!(
            g.roots_with_multiplicity(),
            vec![(3, 1), (17, 2), (999_000, 1)]
        );
        assert_eq!(g.rational_part().deg(), 3);
    }

    #[test]
    fn gcd_and_division() {
        let a = from_roots(&[1, 2, 3]);
        let b = from_roots(&[2, 3, 4]);
        assert_eq!(a.gcd(&b), from_roots(&[2, 3]));
        let (q, r) = a.mul(&b).div_rem(&b);
        assert!(r.is_zero());
        assert_eq!(q, a);
        assert!(!from_roots(&[5, 5]).is_squarefree());
        assert!(from_roots(&[5, 6]).is_squarefree());
    }
}
