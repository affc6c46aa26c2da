//! The noncommutative product on sphere coefficient matrices, the exact
//! polynomial coordinate conversion, and the semiclassical expansion check.

pub mod rat;

use ndarray::Array2;
use num_complex::Complex64;

use crate::error::{CsqError, Result};
pub use rat::{BivarPoly, SpherePoly, QC};

fn binomial_int(n: u32, k: u32) -> i64 {
    let mut acc: i64 = 1;
    for i in 0..k {
        acc = acc * (n - i) as i64 / (i + 1) as i64;
    }
    acc
}

/// Coefficient matrix of a level-n function a(z, zbar)/(1+|z|^2)^n.
///
/// Entries are stored as the exact monomial coefficients a~_{jk} of
/// z^j zbar^k; the conventional matrix in the orthonormal-section basis is
/// a_{jk} = a~_{jk} / sqrt(C(n,j) C(n,k)) and is produced on demand in
/// floating point.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct CoeffMatrix {
    pub n: u32,
    entries: Vec<QC>,
}

impl CoeffMatrix {
    pub fn zero(n: u32) -> Self {
        let dim = (n + 1) as usize;
        CoeffMatrix { n, entries: vec![QC::zero(); dim * dim] }
    }

    /// The constant function 1: a~ = diag(C(n,k)).
    pub fn identity(n: u32) -> Self {
        let mut m = Self::zero(n);
        for k in 0..=n {
            *m.at_mut(k as usize, k as usize) = QC::from_int(binomial_int(n, k));
        }
        m
    }

    pub fn dim(&self) -> usize {
        (self.n + 1) as usize
    }

    pub fn at(&self, j: usize, k: usize) -> &QC {
        &self.entries[j * self.dim() + k]
    }

    pub fn at_mut(&mut self, j: usize, k: usize) -> &mut QC {
        let d = self.dim();
        &mut self.entries[j * d + k]
    }

    /// Monomial coefficient matrix from a bivariate polynomial of degree <= n.
    fn from_bivar(n: u32, p: &BivarPoly) -> Result<Self> {
        let mut m = Self::zero(n);
        for (&(j, k), v) in &p.terms {
            if j > n || k > n {
                return Err(CsqError::Param(format!(
                    "degree overflow: monomial z^{j} zbar^{k} exceeds level {n}"
                )));
            }
            *m.at_mut(j as usize, k as usize) = v.clone();
        }
        Ok(m)
    }

    /// The involution: complex conjugation of the represented function.
    pub fn dagger(&self) -> Self {
        let mut r = Self::zero(self.n);
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                *r.at_mut(j, k) = self.at(k, j).conj();
            }
        }
        r
    }

    pub fn is_hermitian(&self) -> bool {
        *self == self.dagger()
    }

    pub fn add(&self, o: &Self) -> Result<Self> {
        if self.n != o.n {
            return Err(CsqError::LevelMismatch { left: self.n as usize, right: o.n as usize });
        }
        let mut r = self.clone();
        for (a, b) in r.entries.iter_mut().zip(&o.entries) {
            *a = a.clone() + b.clone();
        }
        Ok(r)
    }

    pub fn scale(&self, c: &QC) -> Self {
        let mut r = self.clone();
        for a in r.entries.iter_mut() {
            *a = a.clone() * c.clone();
        }
        r
    }

    /// Matrix in the orthonormal-section basis (floating point).
    pub fn to_operator_matrix(&self) -> Array2<Complex64> {
        let dim = self.dim();
        Array2::from_shape_fn((dim, dim), |(j, k)| {
            let norm =
                (binomial_int(self.n, j as u32) as f64 * binomial_int(self.n, k as u32) as f64)
                    .sqrt();
            self.at(j, k).to_complex() / norm
        })
    }

    /// Evaluates the represented function at an embedded sphere point, in a
    /// pole-stable form.
    pub fn eval(&self, x: [f64; 3]) -> Complex64 {
        // z^j zbar^k / (1+|z|^2)^n = sin(phi)^{j+k} cos(phi)^{2n-j-k} e^{i(j-k)th}
        let u = (0.5 * (1.0 + x[2])).clamp(0.0, 1.0);
        let sp = u.sqrt();
        let cp = (1.0 - u).sqrt();
        let th = x[1].atan2(x[0]);
        let mut acc = Complex64::new(0.0, 0.0);
        for j in 0..self.dim() {
            for k in 0..self.dim() {
                let c = self.at(j, k);
                if c.is_zero() {
                    continue;
                }
                let radial = sp.powi((j + k) as i32) * cp.powi((2 * self.n as usize - j - k) as i32);
                acc += c.to_complex() * radial * Complex64::from_polar(1.0, (j as f64 - k as f64) * th);
            }
        }
        acc
    }

    /// JSON export: level plus row-major entries as [re, im] pairs of the
    /// orthonormal-basis matrix.
    pub fn to_json(&self) -> serde_json::Value {
        let m = self.to_operator_matrix();
        let entries: Vec<[f64; 2]> = m.iter().map(|v| [v.re, v.im]).collect();
        serde_json::json!({ "n": self.n, "entries": entries })
    }
}

/// The noncommutative product: plain matrix product of the coefficient
/// arrays in the orthonormal basis, c_{jk} = sum_i a_{ji} b_{ik}; on the
/// monomial coefficients this is a~ diag(1/C(n,i)) b~, exactly rational.
pub fn star(a: &CoeffMatrix, b: &CoeffMatrix) -> Result<CoeffMatrix> {
    if a.n != b.n {
        return Err(CsqError::LevelMismatch { left: a.n as usize, right: b.n as usize });
    }
    let n = a.n;
    let dim = a.dim();
    let mut r = CoeffMatrix::zero(n);
    for j in 0..dim {
        for k in 0..dim {
            let mut acc = QC::zero();
            for i in 0..dim {
                let term = a.at(j, i).clone() * b.at(i, k).clone();
                acc = acc + term * QC::from_ratio(1, binomial_int(n, i as u32));
            }
            *r.at_mut(j, k) = acc;
        }
    }
    Ok(r)
}

/// Exact conversion of a polynomial in the coordinate functions to its
/// level-n coefficient matrix: multiply through by (1+|z|^2)^n, expand via
/// x1 + i x2 = 2z/(1+|z|^2), x3 = (|z|^2 - 1)/(1+|z|^2), and read off the
/// monomial coefficients. Degrees above n must cancel through the sphere
/// relation; otherwise the conversion reports degree overflow.
pub fn poly_to_coeff(p: &SpherePoly, n: u32) -> Result<CoeffMatrix> {
    let deg = p.degree();
    let lift = deg.max(n);
    // building blocks scaled by s = 1 + z zbar:
    // x1 s = z + zbar, x2 s = -i (z - zbar), x3 s = z zbar - 1
    let x1s = BivarPoly::monomial(1, 0, QC::one()).add(&BivarPoly::monomial(0, 1, QC::one()));
    let x2s = BivarPoly::monomial(1, 0, -QC::i()).add(&BivarPoly::monomial(0, 1, QC::i()));
    let x3s = BivarPoly::monomial(1, 1, QC::one()).add(&BivarPoly::constant(-QC::one()));
    let s = BivarPoly::constant(QC::one()).add(&BivarPoly::monomial(1, 1, QC::one()));

    let mut total = BivarPoly::zero();
    for (&(a, b, c), v) in &p.terms {
        let d = a as u32 + b as u32 + c as u32;
        let mut term = BivarPoly::constant(v.clone());
        term = term.mul(&x1s.pow(a as u32));
        term = term.mul(&x2s.pow(b as u32));
        term = term.mul(&x3s.pow(c as u32));
        term = term.mul(&s.pow(lift - d));
        total = total.add(&term);
    }
    // Reduce the lift back down to level n by exact division.
    let mut reduced = total;
    for _ in n..lift {
        reduced = reduced.divide_by_s().ok_or_else(|| {
            CsqError::Param(format!(
                "degree overflow: polynomial of degree {deg} does not reduce to level {n}"
            ))
        })?;
    }
    CoeffMatrix::from_bivar(n, &reduced)
}

/// Poisson bracket on the sphere in the normalization calibrated against the
/// exact level-1 commutator: {x_i, x_j} = 2 eps_{ijk} x_k.
pub fn poisson_bracket(p: &SpherePoly, q: &SpherePoly) -> SpherePoly {
    let dp: Vec<SpherePoly> = (1..=3).map(|i| p.partial(i)).collect();
    let dq: Vec<SpherePoly> = (1..=3).map(|i| q.partial(i)).collect();
    let mut acc = SpherePoly::zero();
    let eps = [(0usize, 1usize, 2usize, 1i64), (1, 2, 0, 1), (2, 0, 1, 1), (1, 0, 2, -1), (2, 1, 0, -1), (0, 2, 1, -1)];
    for &(i, j, k, sign) in &eps {
        let term = dp[i].mul(&dq[j]).mul(&SpherePoly::coordinate(k + 1));
        acc = acc.add(&term.scale(&QC::from_int(2 * sign)));
    }
    acc
}

/// Inverse-metric pairing of Hamiltonian vector fields in the same
/// normalization: g^{-1}(X_p, X_q) = 2 (grad p . grad q - (x.grad p)(x.grad q)).
pub fn metric_pairing(p: &SpherePoly, q: &SpherePoly) -> SpherePoly {
    let dp: Vec<SpherePoly> = (1..=3).map(|i| p.partial(i)).collect();
    let dq: Vec<SpherePoly> = (1..=3).map(|i| q.partial(i)).collect();
    let mut dot = SpherePoly::zero();
    let mut xp = SpherePoly::zero();
    let mut xq = SpherePoly::zero();
    for i in 0..3 {
        dot = dot.add(&dp[i].mul(&dq[i]));
        xp = xp.add(&SpherePoly::coordinate(i + 1).mul(&dp[i]));
        xq = xq.add(&SpherePoly::coordinate(i + 1).mul(&dq[i]));
    }
    dot.sub(&xp.mul(&xq)).scale(&QC::from_int(2))
}

/// One row of the semiclassical error table.
#[derive(Debug, Clone, serde::Serialize)]
pub struct SemiclassicalRow {
    pub n: u32,
    pub error: f64,
}

/// E(n) = sup over sample points of
/// |star(p,q) - p q - (i/2n)({p,q} - i g^{-1}(X_p, X_q))|.
pub fn semiclassical_check(
    p: &SpherePoly,
    q: &SpherePoly,
    levels: &[u32],
    samples: &[[f64; 3]],
) -> Result<Vec<SemiclassicalRow>> {
    let pq = p.mul(q);
    let bracket = poisson_bracket(p, q);
    let pairing = metric_pairing(p, q);
    let mut rows = Vec::with_capacity(levels.len());
    for &n in levels {
        if p.degree() > n || q.degree() > n {
            return Err(CsqError::Param(format!(
                "semiclassical check needs degree <= n; got degrees {}, {} at n = {n}",
                p.degree(),
                q.degree()
            )));
        }
        let sp = star(&poly_to_coeff(p, n)?, &poly_to_coeff(q, n)?)?;
        let mut err = 0.0f64;
        for &x in samples {
            let star_val = sp.eval(x);
            let first = pq.eval(x)
                + Complex64::new(0.0, 0.5 / n as f64)
                    * (bracket.eval(x) - Complex64::new(0.0, 1.0) * pairing.eval(x));
            err = err.max((star_val - first).norm());
        }
        rows.push(SemiclassicalRow { n, error: err });
    }
    Ok(rows)
}
