//! Exact Gaussian-rational scalars and the small polynomial rings used by
//! the coefficient-matrix star product.

use std::collections::BTreeMap;
use std::ops::{Add, Mul, Neg, Sub};

use num::{BigInt, BigRational, One, Zero};
use num_complex::Complex64;

/// A Gaussian rational a + b i with exact arithmetic.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct QC {
    pub re: BigRational,
    pub im: BigRational,
}

impl QC {
    pub fn zero() -> Self {
        QC { re: BigRational::zero(), im: BigRational::zero() }
    }

    pub fn one() -> Self {
        QC { re: BigRational::one(), im: BigRational::zero() }
    }

    pub fn i() -> Self {
        QC { re: BigRational::zero(), im: BigRational::one() }
    }

    pub fn from_int(v: i64) -> Self {
        QC { re: BigRational::from_integer(BigInt::from(v)), im: BigRational::zero() }
    }

    pub fn from_ratio(num: i64, den: i64) -> Self {
        QC {
            re: BigRational::new(BigInt::from(num), BigInt::from(den)),
            im: BigRational::zero(),
        }
    }

    pub fn is_zero(&self) -> bool {
        self.re.is_zero() && self.im.is_zero()
    }

    pub fn conj(&self) -> Self {
        QC { re: self.re.clone(), im: -self.im.clone() }
    }

    pub fn recip(&self) -> Self {
        let d = &self.re * &self.re + &self.im * &self.im;
        assert!(!d.is_zero(), "division by zero Gaussian rational");
        QC { re: &self.re / &d, im: -&self.im / &d }
    }

    pub fn to_complex(&self) -> Complex64 {
        let f = |r: &BigRational| {
            let n = r.numer().to_string().parse::<f64>().unwrap_or(f64::NAN);
            let d = r.denom().to_string().parse::<f64>().unwrap_or(f64::NAN);
            n / d
        };
        Complex64::new(f(&self.re), f(&self.im))
    }
}

impl Add for QC {
    type Output = QC;
    fn add(self, o: QC) -> QC {
        QC { re: self.re + o.re, im: self.im + o.im }
    }
}

impl Sub for QC {
    type Output = QC;
    fn sub(self, o: QC) -> QC {
        QC { re: self.re - o.re, im: self.im - o.im }
    }
}

impl Neg for QC {
    type Output = QC;
    fn neg(self) -> QC {
        QC { re: -self.re, im: -self.im }
    }
}

impl Mul for QC {
    type Output = QC;
    fn mul(self, o: QC) -> QC {
        QC {
            re: &self.re * &o.re - &self.im * &o.im,
            im: &self.re * &o.im + &self.im * &o.re,
        }
    }
}

/// Polynomial in the ambient coordinates x1, x2, x3 with QC coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct SpherePoly {
    /// (a, b, c) -> coefficient of x1^a x2^b x3^c
    pub terms: BTreeMap<(u8, u8, u8), QC>,
}

impl SpherePoly {
    pub fn zero() -> Self {
        SpherePoly::default()
    }

    pub fn constant(c: QC) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((0, 0, 0), c);
        }
        p
    }

    pub fn one() -> Self {
        Self::constant(QC::one())
    }

    pub fn coordinate(i: usize) -> Self {
        let mut p = Self::zero();
        let key = match i {
            1 => (1, 0, 0),
            2 => (0, 1, 0),
            3 => (0, 0, 1),
            _ => panic!("coordinate index must be 1..3"),
        };
        p.terms.insert(key, QC::one());
        p
    }

    pub fn x1() -> Self {
        Self::coordinate(1)
    }
    pub fn x2() -> Self {
        Self::coordinate(2)
    }
    pub fn x3() -> Self {
        Self::coordinate(3)
    }

    pub fn degree(&self) -> u32 {
        self.terms
            .keys()
            .map(|&(a, b, c)| a as u32 + b as u32 + c as u32)
            .max()
            .unwrap_or(0)
    }

    fn insert(&mut self, key: (u8, u8, u8), val: QC) {
        if val.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(QC::zero);
        let new = entry.clone() + val;
        if new.is_zero() {
            self.terms.remove(&key);
        } else {
            *entry = new;
        }
    }

    pub fn add(&self, o: &SpherePoly) -> SpherePoly {
        let mut r = self.clone();
        for (k, v) in &o.terms {
            r.insert(*k, v.clone());
        }
        r
    }

    pub fn sub(&self, o: &SpherePoly) -> SpherePoly {
        self.add(&o.scale(&-QC::one()))
    }

    pub fn scale(&self, c: &QC) -> SpherePoly {
        let mut r = SpherePoly::zero();
        for (k, v) in &self.terms {
            r.insert(*k, v.clone() * c.clone());
        }
        r
    }

    pub fn mul(&self, o: &SpherePoly) -> SpherePoly {
        let mut r = SpherePoly::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &o.terms {
                let key = (ka.0 + kb.0, ka.1 + kb.1, ka.2 + kb.2);
                r.insert(key, va.clone() * vb.clone());
            }
        }
        r
    }

    /// Partial derivative with respect to x_i, as ambient polynomials.
    pub fn partial(&self, i: usize) -> SpherePoly {
        let mut r = SpherePoly::zero();
        for (&(a, b, c), v) in &self.terms {
            let (e, key) = match i {
                1 if a > 0 => (a, (a - 1, b, c)),
                2 if b > 0 => (b, (a, b - 1, c)),
                3 if c > 0 => (c, (a, b, c - 1)),
                _ => continue,
            };
            r.insert(key, v.clone() * QC::from_int(e as i64));
        }
        r
    }

    pub fn eval(&self, x: [f64; 3]) -> Complex64 {
        let mut acc = Complex64::new(0.0, 0.0);
        for (&(a, b, c), v) in &self.terms {
            acc += v.to_complex()
                * x[0].powi(a as i32)
                * x[1].powi(b as i32)
                * x[2].powi(c as i32);
        }
        acc
    }
}

/// Bivariate polynomial in (z, z-bar) with QC coefficients.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct BivarPoly {
    /// (j, k) -> coefficient of z^j zbar^k
    pub terms: BTreeMap<(u32, u32), QC>,
}

impl BivarPoly {
    pub fn zero() -> Self {
        BivarPoly::default()
    }

    pub fn constant(c: QC) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((0, 0), c);
        }
        p
    }

    pub fn monomial(j: u32, k: u32, c: QC) -> Self {
        let mut p = Self::zero();
        if !c.is_zero() {
            p.terms.insert((j, k), c);
        }
        p
    }

    fn insert(&mut self, key: (u32, u32), val: QC) {
        if val.is_zero() {
            return;
        }
        let entry = self.terms.entry(key).or_insert_with(QC::zero);
        let new = entry.clone() + val;
        if new.is_zero() {
            self.terms.remove(&key);
        } else {
            *entry = new;
        }
    }

    pub fn add(&self, o: &BivarPoly) -> BivarPoly {
        let mut r = self.clone();
        for (k, v) in &o.terms {
            r.insert(*k, v.clone());
        }
        r
    }

    pub fn mul(&self, o: &BivarPoly) -> BivarPoly {
        let mut r = BivarPoly::zero();
        for (ka, va) in &self.terms {
            for (kb, vb) in &o.terms {
                r.insert((ka.0 + kb.0, ka.1 + kb.1), va.clone() * vb.clone());
            }
        }
        r
    }

    pub fn pow(&self, e: u32) -> BivarPoly {
        let mut acc = BivarPoly::constant(QC::one());
        for _ in 0..e {
            acc = acc.mul(self);
        }
        acc
    }

    pub fn max_degree(&self) -> (u32, u32) {
        let mut dz = 0;
        let mut dzb = 0;
        for &(j, k) in self.terms.keys() {
            dz = dz.max(j);
            dzb = dzb.max(k);
        }
        (dz, dzb)
    }

    /// Exact division by s = 1 + z zbar; `None` when not divisible.
    pub fn divide_by_s(&self) -> Option<BivarPoly> {
        let (dz, dzb) = self.max_degree();
        if self.terms.is_empty() {
            return Some(BivarPoly::zero());
        }
        let get = |m: &BTreeMap<(u32, u32), QC>, j: i64, k: i64| -> QC {
            if j < 0 || k < 0 {
                QC::zero()
            } else {
                m.get(&(j as u32, k as u32)).cloned().unwrap_or_else(QC::zero)
            }
        };
        let mut q: BTreeMap<(u32, u32), QC> = BTreeMap::new();
        for j in 0..=dz {
            for k in 0..=dzb {
                let c = get(&self.terms, j as i64, k as i64);
                let prev = get(&q, j as i64 - 1, k as i64 - 1);
                let v = c - prev;
                if !v.is_zero() {
                    q.insert((j, k), v);
                }
            }
        }
        // Divisible iff the quotient fits strictly inside the degree box.
        for (&(j, k), v) in &q {
            if (j == dz || k == dzb) && !v.is_zero() && dz > 0 && dzb > 0 {
                return None;
            }
        }
        // Also verify the reconstruction exactly.
        let s = BivarPoly::constant(QC::one()).add(&BivarPoly::monomial(1, 1, QC::one()));
        let qq = BivarPoly { terms: q };
        if qq.mul(&s) == *self {
            Some(qq)
        } else {
            None
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn qc_field_ops() {
        let a = QC::from_ratio(3, 4) + QC::i() * QC::from_int(2);
        let b = a.clone() * a.clone().recip();
        assert_eq!(b, QC::one());
        assert_eq!(a.clone().conj().conj(), a);
    }

    #[test]
    fn sphere_poly_algebra() {
        let p = SpherePoly::x1().mul(&SpherePoly::x1()).add(&SpherePoly::x3());
        assert_eq!(p.degree(), 2);
        let d = p.partial(1);
        // d/dx1 (x1^2 + x3) = 2 x1
        assert_eq!(d, SpherePoly::x1().scale(&QC::from_int(2)));
        let v = p.eval([0.5, 0.0, -0.3]);
        assert!((v.re - (0.25 - 0.3)).abs() < 1e-15);
    }

    #[test]
    fn bivar_division_by_s() {
        // (1 + z zbar)(2 + z) is divisible; (z + zbar) is not.
        let s = BivarPoly::constant(QC::one()).add(&BivarPoly::monomial(1, 1, QC::one()));
        let f = BivarPoly::constant(QC::from_int(2)).add(&BivarPoly::monomial(1, 0, QC::one()));
        let prod = s.mul(&f);
        assert_eq!(prod.divide_by_s().unwrap(), f);
        let bad = BivarPoly::monomial(1, 0, QC::one()).add(&BivarPoly::monomial(0, 1, QC::one()));
        assert!(bad.divide_by_s().is_none());
    }
}
