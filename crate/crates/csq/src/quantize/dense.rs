//! Small dense complex-matrix helpers used by the quantization routines.

use ndarray::Array2;
use num_complex::Complex64;

pub fn dagger(a: &Array2<Complex64>) -> Array2<Complex64> {
    a.t().mapv(|v| v.conj())
}

pub fn trace(a: &Array2<Complex64>) -> Complex64 {
    a.diag().sum()
}

pub fn identity(dim: usize) -> Array2<Complex64> {
    Array2::from_shape_fn((dim, dim), |(i, j)| {
        if i == j { Complex64::new(1.0, 0.0) } else { Complex64::new(0.0, 0.0) }
    })
}

/// Max entrywise absolute difference.
pub fn max_abs_diff(a: &Array2<Complex64>, b: &Array2<Complex64>) -> f64 {
    a.iter().zip(b.iter()).map(|(x, y)| (x - y).norm()).fold(0.0, f64::max)
}

pub fn max_abs(a: &Array2<Complex64>) -> f64 {
    a.iter().map(|x| x.norm()).fold(0.0, f64::max)
}

/// Inverse by Gauss–Jordan elimination with partial pivoting; fine for the
/// small dimensions used here.
pub fn invert(a: &Array2<Complex64>) -> Option<Array2<Complex64>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols());
    let mut m = a.clone();
    let mut inv = identity(n);
    for col in 0..n {
        let (pivot, pmag) = (col..n)
            .map(|r| (r, m[(r, col)].norm()))
            .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
            .unwrap();
        if pmag < 1e-300 {
            return None;
        }
        if pivot != col {
            for j in 0..n {
                m.swap((pivot, j), (col, j));
                inv.swap((pivot, j), (col, j));
            }
        }
        let d = m[(col, col)];
        for j in 0..n {
            m[(col, j)] /= d;
            inv[(col, j)] /= d;
        }
        for r in 0..n {
            if r != col {
                let f = m[(r, col)];
                if f.norm() > 0.0 {
                    for j in 0..n {
                        let mcj = m[(col, j)];
                        let icj = inv[(col, j)];
                        m[(r, j)] -= f * mcj;
                        inv[(r, j)] -= f * icj;
                    }
                }
            }
        }
    }
    Some(inv)
}

/// Eigenvalues of a Hermitian matrix by the cyclic complex Jacobi method.
pub fn hermitian_eigenvalues(a: &Array2<Complex64>) -> Vec<f64> {
    let n = a.nrows();
    let mut m = a.clone();
    for _sweep in 0..60 {
        let mut off = 0.0f64;
        for p in 0..n {
            for q in (p + 1)..n {
                off = off.max(m[(p, q)].norm());
            }
        }
        if off < 1e-14 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                let apq = m[(p, q)];
                if apq.norm() < 1e-300 {
                    continue;
                }
                let app = m[(p, p)].re;
                let aqq = m[(q, q)].re;
                // Unitary 2x2 rotation diagonalizing the (p,q) block.
                let phase = apq / apq.norm();
                let theta = 0.5 * (2.0 * apq.norm()).atan2(aqq - app);
                let c = theta.cos();
                let s_ = theta.sin();
                // columns
                for i in 0..n {
                    let aip = m[(i, p)];
                    let aiq = m[(i, q)];
                    m[(i, p)] = c * aip - s_ * phase * aiq;
                    m[(i, q)] = s_ * phase.conj() * aip + c * aiq;
                }
                // rows
                for j in 0..n {
                    let apj = m[(p, j)];
                    let aqj = m[(q, j)];
                    m[(p, j)] = c * apj - s_ * phase.conj() * aqj;
                    m[(q, j)] = s_ * phase * apj + c * aqj;
                }
            }
        }
    }
    let mut ev: Vec<f64> = m.diag().iter().map(|v| v.re).collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    ev
}

/// exp(A) by scaling-and-squaring with a Taylor core.
pub fn expm(a: &Array2<Complex64>) -> Array2<Complex64> {
    let n = a.nrows();
    let norm = a.iter().map(|v| v.norm()).fold(0.0, f64::max) * n as f64;
    let s = norm.log2().ceil().max(0.0) as u32 + 1;
    let scaled = a.mapv(|v| v / 2f64.powi(s as i32));
    let mut term = identity(n);
    let mut acc = identity(n);
    for k in 1..=20 {
        term = term.dot(&scaled) / Complex64::new(k as f64, 0.0);
        acc += &term;
    }
    let mut r = acc;
    for _ in 0..s {
        r = r.dot(&r);
    }
    r
}
