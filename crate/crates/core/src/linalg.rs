//! Small dense helpers on top of nalgebra.

use nalgebra::{DMatrix, DVector};

pub fn norm1(v: &[f64]) -> f64 {
    v.iter().map(|x| x.abs()).sum()
}

pub fn norm2(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

pub fn norm_inf(v: &[f64]) -> f64 {
    v.iter().fold(0.0_f64, |m, x| m.max(x.abs()))
}

pub fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

/// Extreme eigenvalues `(min, max)` of a symmetric matrix.
pub fn sym_eig_extremes(m: DMatrix<f64>) -> (f64, f64) {
    if m.nrows() == 1 {
        let v = m[(0, 0)];
        return (v, v);
    }
    let eig = m.symmetric_eigen();
    eig.eigenvalues
        .iter()
        .fold((f64::INFINITY, f64::NEG_INFINITY), |(lo, hi), &l| {
            (lo.min(l), hi.max(l))
        })
}

/// Largest singular value of a (small) rectangular block.
pub fn spectral_norm(b: &DMatrix<f64>) -> f64 {
    let (r, c) = b.shape();
    if r == 1 || c == 1 {
        return b.iter().map(|x| x * x).sum::<f64>().sqrt();
    }
    let gram = if r <= c {
        b * b.transpose()
    } else {
        b.transpose() * b
    };
    sym_eig_extremes(gram).1.max(0.0).sqrt()
}

/// Solves a square system, returning `None` when it is numerically singular.
pub fn solve(a: DMatrix<f64>, b: &DVector<f64>) -> Option<DVector<f64>> {
    if a.nrows() == 0 {
        return Some(DVector::zeros(0));
    }
    let lu = a.lu();
    let x = lu.solve(b)?;
    x.iter().all(|v| v.is_finite()).then_some(x)
}

/// Minimum-norm least-squares solution via SVD.
pub fn lstsq(a: &DMatrix<f64>, b: &DVector<f64>) -> DVector<f64> {
    let svd = a.clone().svd(true, true);
    let smax = svd.singular_values.max();
    let eps = smax * 1e-12 * (a.nrows().max(a.ncols()) as f64);
    svd.solve(b, eps)
        .unwrap_or_else(|_| DVector::zeros(a.ncols()))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spectral_norm_of_rank_one_block() {
        let b = DMatrix::from_row_slice(2, 3, &[1.0, 1.0, 1.0, 1.0, 1.0, 1.0]);
        assert!((spectral_norm(&b) - 6.0_f64.sqrt()).abs() < 1e-12);
    }

    #[test]
    fn norms() {
        let v = [3.0, -4.0];
        assert_eq!(norm1(&v), 7.0);
        assert_eq!(norm2(&v), 5.0);
        assert_eq!(norm_inf(&v), 4.0);
    }
}
