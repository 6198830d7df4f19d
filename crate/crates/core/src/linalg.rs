//! Small dense complex linear algebra on coefficient spaces.

use num_complex::Complex64;

use crate::error::{Error, Result};
use crate::lattice::CplxVec;

/// Normalized Gram determinants below this value count as linear dependence.
pub const DEPENDENCE_TOL: f64 = 1e-12;

/// Euclidean Gram matrix `M[j][k] = Σᵢ conj(bⱼᵢ) bₖᵢ`.
pub(crate) fn gram(basis: &[CplxVec]) -> Vec<Vec<Complex64>> {
    basis
        .iter()
        .map(|bj| basis.iter().map(|bk| bk.dot(bj)).collect())
        .collect()
}

/// Determinant via Gaussian elimination with partial pivoting.
pub(crate) fn determinant(mut m: Vec<Vec<Complex64>>) -> Complex64 {
    let n = m.len();
    let mut det = Complex64::new(1.0, 0.0);
    for col in 0..n {
        let pivot = (col..n)
            .max_by(|&a, &b| m[a][col].norm().total_cmp(&m[b][col].norm()))
            .unwrap();
        if m[pivot][col].norm() == 0.0 {
            return Complex64::new(0.0, 0.0);
        }
        if pivot != col {
            m.swap(pivot, col);
            det = -det;
        }
        let p = m[col][col];
        det *= p;
        for row in col + 1..n {
            let factor = m[row][col] / p;
            for k in col..n {
                let sub = factor * m[col][k];
                m[row][k] -= sub;
            }
        }
    }
    det
}

/// Gram determinant of the unit-normalized basis; 1 for orthogonal, 0 for dependent.
pub fn normalized_gram_det(basis: &[CplxVec]) -> f64 {
    let scaled: Vec<CplxVec> = basis
        .iter()
        .map(|b| {
            let n = b.dot(b).re.sqrt();
            if n > 0.0 {
                b.scale_real(1.0 / n)
            } else {
                b.clone()
            }
        })
        .collect();
    determinant(gram(&scaled)).re.max(0.0)
}

pub(crate) fn ensure_independent(basis: &[CplxVec]) -> Result<()> {
    let gram_det = normalized_gram_det(basis);
    if gram_det > DEPENDENCE_TOL {
        Ok(())
    } else {
        Err(Error::Dependent { gram_det })
    }
}

/// Least-squares coordinates of `h` in a two-vector basis with relative residual.
pub(crate) fn coordinates2(basis: &[CplxVec; 2], h: &CplxVec) -> ([Complex64; 2], f64) {
    let m = gram(basis);
    let r0 = h.dot(&basis[0]);
    let r1 = h.dot(&basis[1]);
    let det = m[0][0] * m[1][1] - m[0][1] * m[1][0];
    let c0 = (m[1][1] * r0 - m[0][1] * r1) / det;
    let c1 = (m[0][0] * r1 - m[1][0] * r0) / det;
    let recon = &basis[0].scale(c0) + &basis[1].scale(c1);
    let h_norm = h.dot(h).re.sqrt();
    let res = (h - &recon).dot(&(h - &recon)).re.sqrt();
    let rel = if h_norm > 0.0 { res / h_norm } else { 0.0 };
    ([c0, c1], rel)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn determinant_of_known_matrix() {
        let c = |x: f64| Complex64::new(x, 0.0);
        let m = vec![
            vec![c(2.0), c(1.0), c(0.0)],
            vec![c(1.0), c(3.0), c(1.0)],
            vec![c(0.0), c(1.0), c(4.0)],
        ];
        assert!((determinant(m) - c(18.0)).norm() < 1e-12);
    }

    #[test]
    fn independence_detection() {
        let a = CplxVec::from_pairs(&[(1.0, 0.0), (0.0, 1.0), (2.0, 0.0)]);
        let b = a.scale(Complex64::new(0.3, -2.0));
        assert!(ensure_independent(&[a.clone(), b]).is_err());
        let c = CplxVec::real(&[0.0, 1.0, 0.0]);
        assert!(ensure_independent(&[a, c]).is_ok());
        assert!((normalized_gram_det(&[CplxVec::real(&[1.0, 0.0]), CplxVec::real(&[0.0, 5.0])]) - 1.0).abs() < 1e-15);
    }

    #[test]
    fn coordinates_recover_combination() {
        let b = [
            CplxVec::from_pairs(&[(1.0, 0.5), (0.0, 1.0), (2.0, 0.0)]),
            CplxVec::from_pairs(&[(0.0, -1.0), (1.0, 1.0), (0.5, 0.5)]),
        ];
        let c0 = Complex64::new(0.7, -0.2);
        let c1 = Complex64::new(-1.1, 0.4);
        let h = &b[0].scale(c0) + &b[1].scale(c1);
        let (c, res) = coordinates2(&b, &h);
        assert!((c[0] - c0).norm() < 1e-12 && (c[1] - c1).norm() < 1e-12);
        assert!(res < 1e-12);
        let (_, res) = coordinates2(&b, &CplxVec::real(&[0.0, 0.0, 1.0]));
        assert!(res > 1e-3);
    }
}
