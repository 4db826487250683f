//! Small dense-matrix helpers on top of nalgebra.

use nalgebra::{Complex, DMatrix, DVector};

use crate::error::{Error, Result};

pub type Mat = DMatrix<f64>;
pub type Vector = DVector<f64>;

/// ‖a − b‖_F relative to the larger of the two norms. Pairs whose norms are
/// both below 1e-12 are compared absolutely.
pub fn rel_frobenius(a: &Mat, b: &Mat) -> f64 {
    let diff = (a - b).norm();
    let scale = a.norm().max(b.norm());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

pub fn rel_vec(a: &Vector, b: &Vector) -> f64 {
    let diff = (a - b).norm();
    let scale = a.norm().max(b.norm());
    if scale < 1e-12 {
        diff
    } else {
        diff / scale
    }
}

/// Relative asymmetry ‖m − mᵀ‖ / ‖m‖.
pub fn asymmetry(m: &Mat) -> f64 {
    let n = m.norm();
    if n == 0.0 {
        0.0
    } else {
        (m - m.transpose()).norm() / n
    }
}

pub fn symmetrize(m: &Mat) -> Mat {
    (m + m.transpose()) * 0.5
}

/// Eigenvalues (ascending) of the Hermitian matrix `re + i·im`, where `re` is
/// real symmetric and `im` real antisymmetric.
pub fn hermitian_eigenvalues(re: &Mat, im: &Mat) -> Vec<f64> {
    let n = re.nrows();
    let h = DMatrix::<Complex<f64>>::from_fn(n, n, |i, j| Complex::new(re[(i, j)], im[(i, j)]));
    let mut ev: Vec<f64> = h.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(f64::total_cmp);
    ev
}

pub fn hermitian_min_eigenvalue(re: &Mat, im: &Mat) -> f64 {
    hermitian_eigenvalues(re, im)[0]
}

/// Symmetric eigen-decomposition with eigenvalues sorted descending and the
/// eigenvector columns permuted to match.
pub fn sym_eigen_desc(m: &Mat) -> (Vec<f64>, Mat) {
    let eig = symmetrize(m).symmetric_eigen();
    let n = m.nrows();
    let mut idx: Vec<usize> = (0..n).collect();
    idx.sort_by(|&a, &b| eig.eigenvalues[b].total_cmp(&eig.eigenvalues[a]));
    let values = idx.iter().map(|&i| eig.eigenvalues[i]).collect();
    let vectors = Mat::from_fn(n, n, |r, c| eig.eigenvectors[(r, idx[c])]);
    (values, vectors)
}

/// `f(m)` for symmetric `m`, applied on the spectrum.
pub fn sym_function(m: &Mat, f: impl Fn(f64) -> f64) -> Mat {
    let eig = symmetrize(m).symmetric_eigen();
    let d = Mat::from_diagonal(&eig.eigenvalues.map(f));
    &eig.eigenvectors * d * eig.eigenvectors.transpose()
}

/// Principal square root and inverse square root of a symmetric positive
/// definite matrix.
pub fn spd_sqrt_pair(m: &Mat) -> Result<(Mat, Mat)> {
    let eig = symmetrize(m).symmetric_eigen();
    let min = eig.eigenvalues.min();
    if !(min > 0.0) {
        return Err(Error::NotPositiveDefinite { min_eigenvalue: min });
    }
    let v = &eig.eigenvectors;
    let sqrt = v * Mat::from_diagonal(&eig.eigenvalues.map(f64::sqrt)) * v.transpose();
    let inv_sqrt = v * Mat::from_diagonal(&eig.eigenvalues.map(|x| 1.0 / x.sqrt())) * v.transpose();
    Ok((sqrt, inv_sqrt))
}

/// Direct sum `a ⊕ b`.
pub fn direct_sum(a: &Mat, b: &Mat) -> Mat {
    let (ra, ca) = a.shape();
    let (rb, cb) = b.shape();
    let mut out = Mat::zeros(ra + rb, ca + cb);
    out.view_mut((0, 0), (ra, ca)).copy_from(a);
    out.view_mut((ra, ca), (rb, cb)).copy_from(b);
    out
}

/// Groups a descending sequence into clusters whose consecutive gaps are
/// within `tol` relative to the largest magnitude.
pub fn clusters(values: &[f64], tol: f64) -> Vec<std::ops::Range<usize>> {
    let scale = values.iter().fold(1.0f64, |m, v| m.max(v.abs()));
    let mut out = Vec::new();
    let mut start = 0;
    for i in 1..=values.len() {
        if i == values.len() || (values[i - 1] - values[i]).abs() > tol * scale {
            out.push(start..i);
            start = i;
        }
    }
    out
}

pub fn row_major(m: &Mat) -> Vec<f64> {
    let (r, c) = m.shape();
    (0..r).flat_map(|i| (0..c).map(move |j| (i, j))).map(|(i, j)| m[(i, j)]).collect()
}

pub fn from_row_major(rows: usize, cols: usize, data: &[f64]) -> Result<Mat> {
    if data.len() != rows * cols {
        return Err(Error::Dimension(format!(
            "expected {} entries for a {rows}x{cols} matrix, found {}",
            rows * cols,
            data.len()
        )));
    }
    Ok(Mat::from_row_slice(rows, cols, data))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn hermitian_vacuum_bound_is_zero() {
        // (1/2)I + (i/2)σ for one mode has eigenvalues 0 and 1.
        let re = Mat::identity(2, 2) * 0.5;
        let im = Mat::from_row_slice(2, 2, &[0.0, 0.5, -0.5, 0.0]);
        let ev = hermitian_eigenvalues(&re, &im);
        assert!(ev[0].abs() < 1e-15);
        assert!((ev[1] - 1.0).abs() < 1e-15);
    }

    #[test]
    fn sqrt_pair_inverts() {
        let m = Mat::from_row_slice(2, 2, &[2.0, 0.3, 0.3, 1.0]);
        let (s, si) = spd_sqrt_pair(&m).unwrap();
        assert!(rel_frobenius(&(&s * &s), &m) < 1e-14);
        assert!(rel_frobenius(&(&s * &si), &Mat::identity(2, 2)) < 1e-14);
    }

    #[test]
    fn sqrt_pair_rejects_indefinite() {
        let m = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(spd_sqrt_pair(&m), Err(Error::NotPositiveDefinite { .. })));
    }

    #[test]
    fn clusters_split_on_gaps() {
        let c = clusters(&[3.0, 3.0, 1.0 + 1e-13, 1.0, 0.5], 1e-9);
        assert_eq!(c, vec![0..2, 2..4, 4..5]);
    }

    #[test]
    fn row_major_round_trip() {
        let m = Mat::from_row_slice(2, 3, &[1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(row_major(&m), vec![1.0, 2.0, 3.0, 4.0, 5.0, 6.0]);
        assert_eq!(from_row_major(2, 3, &row_major(&m)).unwrap(), m);
        assert!(from_row_major(2, 2, &[1.0]).is_err());
    }
}
