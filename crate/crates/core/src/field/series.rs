//! Truncated univariate power series over GF(p).

use super::{FieldError, PrimeField};

/// Power series truncated after `t^order`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Series {
    field: PrimeField,
    coeffs: Vec<u64>,
}

impl Series {
    pub fn new(field: PrimeField, coeffs: &[u64], order: usize) -> Self {
        let p = field.modulus();
        let mut c: Vec<u64> = coeffs.iter().take(order + 1).map(|&v| v % p).collect();
        c.resize(order + 1, 0);
        Self { field, coeffs: c }
    }

    pub fn zero(field: PrimeField, order: usize) -> Self {
        Self::new(field, &[], order)
    }

    pub fn order(&self) -> usize {
        self.coeffs.len() - 1
    }

    pub fn coeffs(&self) -> &[u64] {
        &self.coeffs
    }

    pub fn coeff(&self, k: usize) -> u64 {
        self.coeffs.get(k).copied().unwrap_or(0)
    }

    pub fn add(&self, other: &Series) -> Series {
        let f = self.field;
        let order = self.order().min(other.order());
        let c: Vec<u64> = (0..=order)
            .map(|k| f.add(self.coeffs[k], other.coeffs[k]))
            .collect();
        Series::new(f, &c, order)
    }

    pub fn mul(&self, other: &Series) -> Series {
        let f = self.field;
        let order = self.order().min(other.order());
        let mut c = vec![0u64; order + 1];
        for (i, &a) in self.coeffs.iter().enumerate().take(order + 1) {
            if a == 0 {
                continue;
            }
            for (j, &b) in other.coeffs.iter().enumerate().take(order + 1 - i) {
                c[i + j] = f.add(c[i + j], f.mul(a, b));
            }
        }
        Series { field: f, coeffs: c }
    }

    pub fn scale(&self, s: u64) -> Series {
        let f = self.field;
        Series {
            field: f,
            coeffs: self.coeffs.iter().map(|&a| f.mul(a, s)).collect(),
        }
    }
}

/// `outer(inner(t))` truncated after `t^order`, where `outer` is given by its
/// coefficient list and `inner` has zero constant term.
pub fn series_compose(
    field: PrimeField,
    outer: &[u64],
    inner: &Series,
    order: usize,
) -> Result<Series, FieldError> {
    if inner.coeff(0) != 0 {
        return Err(FieldError::Precondition(
            "inner series must have zero constant term",
        ));
    }
    let inner = Series::new(field, inner.coeffs(), order);
    // Horner; terms of outer beyond `order` cannot contribute.
    let mut acc = Series::zero(field, order);
    for &a in outer.iter().take(order + 1).rev() {
        acc = acc.mul(&inner).add(&Series::new(field, &[a], order));
    }
    Ok(acc)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    fn f() -> PrimeField {
        PrimeField::new(10_007).unwrap()
    }

    #[test]
    fn square_of_t_plus_t2() {
        let inner = Series::new(f(), &[0, 1, 1], 3);
        let out = series_compose(f(), &[0, 0, 1], &inner, 3).unwrap();
        assert_eq!(out.coeffs(), &[0, 0, 1, 2]);
    }

    #[test]
    fn identity_inner_truncates() {
        let inner = Series::new(f(), &[0, 1], 4);
        let out = series_compose(f(), &[5, 4, 3, 2, 1, 7, 7], &inner, 4).unwrap();
        assert_eq!(out.coeffs(), &[5, 4, 3, 2, 1]);
    }

    #[test]
    fn rejects_constant_term() {
        let inner = Series::new(f(), &[1, 1], 2);
        assert!(series_compose(f(), &[0, 1], &inner, 2).is_err());
    }

    // Naive oracle: expand sum a_k * inner^k as full polynomials, truncate last.
    fn naive(outer: &[u64], inner: &[u64], order: usize) -> Vec<u64> {
        let fl = f();
        let polymul = |a: &[u64], b: &[u64]| {
            let mut c = vec![0u64; a.len() + b.len() - 1];
            for (i, &x) in a.iter().enumerate() {
                for (j, &y) in b.iter().enumerate() {
                    c[i + j] = fl.add(c[i + j], fl.mul(x, y));
                }
            }
            c
        };
        let mut total = vec![0u64; 1];
        let mut power = vec![1u64];
        for &a in outer {
            let term: Vec<u64> = power.iter().map(|&v| fl.mul(v, a)).collect();
            if term.len() > total.len() {
                total.resize(term.len(), 0);
            }
            for (k, v) in term.into_iter().enumerate() {
                total[k] = fl.add(total[k], v);
            }
            power = polymul(&power, inner);
        }
        total.resize(order + 1, 0);
        total.truncate(order + 1);
        total
    }

    #[test]
    fn matches_naive_expansion() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..50 {
            let order = rng.gen_range(0..7);
            let outer: Vec<u64> = (0..rng.gen_range(1..6)).map(|_| rng.gen_range(0..10_007)).collect();
            let mut inner: Vec<u64> = (0..rng.gen_range(1..5)).map(|_| rng.gen_range(0..10_007)).collect();
            inner[0] = 0;
            let got = series_compose(f(), &outer, &Series::new(f(), &inner, order), order).unwrap();
            assert_eq!(got.coeffs(), naive(&outer, &inner, order).as_slice());
        }
    }
}
