//! Symplectic structure in the `(x₁..xₙ, p₁..pₙ)` quadrature ordering.
//!
//! The form is σ = [[0, Iₙ], [−Iₙ, 0]] and a real 2n×2n matrix `M` is
//! symplectic when `Mᵀ σ M = σ`. Gaussian unitaries act on covariance
//! matrices as `γ → Mᵀ γ M`.

use std::ops::Mul;

use nalgebra::{Complex, DMatrix};

use crate::error::{Error, Result};
use crate::linalg::{clusters, direct_sum, spd_sqrt_pair, sym_eigen_desc, Mat, Vector};
use crate::policy::{policy, MAX_MODES};

/// The raw 2n×2n symplectic form.
pub fn sigma(n: usize) -> Mat {
    let mut s = Mat::zeros(2 * n, 2 * n);
    for i in 0..n {
        s[(i, n + i)] = 1.0;
        s[(n + i, i)] = -1.0;
    }
    s
}

pub(crate) fn check_modes(n: usize) -> Result<()> {
    if n == 0 || n > MAX_MODES {
        Err(Error::ModeCount(n))
    } else {
        Ok(())
    }
}

/// Mode count of a square, even-sized matrix.
pub(crate) fn modes_of(m: &Mat, what: &str) -> Result<usize> {
    let (r, c) = m.shape();
    if r != c || r % 2 != 0 {
        return Err(Error::Dimension(format!("{what} must be square with even size, got {r}x{c}")));
    }
    let n = r / 2;
    check_modes(n)?;
    Ok(n)
}

/// Validated symplectic form for `n` modes.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticForm {
    n: usize,
    matrix: Mat,
}

impl SymplecticForm {
    pub fn new(n: usize) -> Result<Self> {
        check_modes(n)?;
        Ok(SymplecticForm { n, matrix: sigma(n) })
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }
}

/// ‖Mᵀ σ M − σ‖_F / ‖σ‖_F.
pub fn symplectic_residual(m: &Mat) -> f64 {
    let n = m.nrows() / 2;
    let s = sigma(n);
    (m.transpose() * &s * m - &s).norm() / s.norm()
}

/// A real matrix preserving the symplectic form.
#[derive(Debug, Clone, PartialEq)]
pub struct SymplecticMatrix {
    n: usize,
    matrix: Mat,
}

impl SymplecticMatrix {
    /// Validates shape and `‖MᵀσM − σ‖ ≤ tol·‖σ‖` under the current policy.
    pub fn new(matrix: Mat) -> Result<Self> {
        let n = modes_of(&matrix, "symplectic matrix")?;
        let residual = symplectic_residual(&matrix);
        if !(residual <= policy().algebraic) {
            return Err(Error::NotSymplectic { residual });
        }
        Ok(SymplecticMatrix { n, matrix })
    }

    /// Wraps a matrix that is symplectic by construction.
    pub(crate) fn from_trusted(matrix: Mat) -> Self {
        let n = matrix.nrows() / 2;
        debug_assert!(symplectic_residual(&matrix) < 1e-6, "constructed matrix lost symplecticity");
        SymplecticMatrix { n, matrix }
    }

    pub fn identity(n: usize) -> Self {
        SymplecticMatrix {
            n,
            matrix: Mat::identity(2 * n, 2 * n),
        }
    }

    pub fn modes(&self) -> usize {
        self.n
    }

    pub fn matrix(&self) -> &Mat {
        &self.matrix
    }

    pub fn into_matrix(self) -> Mat {
        self.matrix
    }

    /// `M⁻¹ = σ⁻¹ Mᵀ σ`, exact up to rounding.
    pub fn inverse(&self) -> Self {
        let s = sigma(self.n);
        SymplecticMatrix {
            n: self.n,
            matrix: -(&s * self.matrix.transpose() * &s),
        }
    }

    pub fn transpose(&self) -> Self {
        SymplecticMatrix {
            n: self.n,
            matrix: self.matrix.transpose(),
        }
    }

    pub fn residual(&self) -> f64 {
        symplectic_residual(&self.matrix)
    }

    /// `Bᵀ B = I` within the algebraic tolerance.
    pub fn is_orthogonal(&self) -> bool {
        let id = Mat::identity(2 * self.n, 2 * self.n);
        (self.matrix.transpose() * &self.matrix - &id).norm() <= policy().algebraic * id.norm()
    }
}

impl Mul for &SymplecticMatrix {
    type Output = SymplecticMatrix;

    fn mul(self, rhs: &SymplecticMatrix) -> SymplecticMatrix {
        assert_eq!(self.n, rhs.n, "mode count mismatch in symplectic product");
        SymplecticMatrix {
            n: self.n,
            matrix: &self.matrix * &rhs.matrix,
        }
    }
}

/// Single-mode phase rotation `[[cos θ, sin θ], [−sin θ, cos θ]]`.
pub fn rotation(theta: f64) -> SymplecticMatrix {
    let (s, c) = theta.sin_cos();
    SymplecticMatrix {
        n: 1,
        matrix: Mat::from_row_slice(2, 2, &[c, s, -s, c]),
    }
}

fn check_gain(gain: f64) -> Result<()> {
    if gain.is_finite() && gain >= 1.0 {
        Ok(())
    } else {
        Err(Error::out_of_range(
            "gain",
            gain,
            "G >= 1 (rotate a unit-or-above squeezer for other orientations)",
        ))
    }
}

/// Phase-quadrature squeezer `diag(√G + √(G−1), √G − √(G−1))`.
///
/// The squeezing parameter `r` satisfies `√G + √(G−1) = eʳ`.
pub fn squeezer(gain: f64) -> Result<SymplecticMatrix> {
    check_gain(gain)?;
    let (a, b) = (gain.sqrt(), (gain - 1.0).sqrt());
    // (√G − √(G−1)) = 1/(√G + √(G−1)) keeps the determinant at one for large G.
    let up = a + b;
    Ok(SymplecticMatrix {
        n: 1,
        matrix: Mat::from_diagonal(&Vector::from_vec(vec![up, 1.0 / up])),
    })
}

/// `R_θ' S_G R_θ'ᵀ`.
pub fn squeezer_angled(gain: f64, angle: f64) -> Result<SymplecticMatrix> {
    let r = rotation(angle);
    Ok(&(&r * &squeezer(gain)?) * &r.transpose())
}

/// `M = B · diag(Λ, Λ⁻¹) · B′` with `B`, `B′` orthogonal symplectic.
#[derive(Debug, Clone, PartialEq)]
pub struct EulerFactors {
    pub left: SymplecticMatrix,
    /// Diagonal of Λ, every entry ≥ 1.
    pub squeezing: Vec<f64>,
    pub right: SymplecticMatrix,
}

impl EulerFactors {
    pub fn middle(&self) -> Mat {
        let lam = Mat::from_diagonal(&Vector::from_vec(self.squeezing.clone()));
        let inv = Mat::from_diagonal(&Vector::from_iterator(
            self.squeezing.len(),
            self.squeezing.iter().map(|x| 1.0 / x),
        ));
        direct_sum(&lam, &inv)
    }

    pub fn reconstruct(&self) -> Mat {
        self.left.matrix() * self.middle() * self.right.matrix()
    }
}

/// Orthonormal vectors spanning the range of the projector `p`, picked by
/// pivoted Gram–Schmidt over its columns (the projected standard basis).
/// Residual ties go to the lowest column index. `against` holds vectors the
/// result must stay orthogonal to.
fn pivoted_basis_real(p: &Mat, count: usize, against: &[Vector]) -> Vec<Vector> {
    let mut basis: Vec<Vector> = Vec::with_capacity(count);
    for _ in 0..count {
        let mut best: Option<(f64, Vector)> = None;
        for j in 0..p.ncols() {
            let mut r: Vector = p.column(j).into_owned();
            for q in against.iter().chain(basis.iter()) {
                let c = q.dot(&r);
                r -= q * c;
            }
            let norm = r.norm();
            if best.as_ref().is_none_or(|(b, _)| norm > b * (1.0 + 1e-9)) {
                best = Some((norm, r));
            }
        }
        let (norm, r) = best.expect("projector has columns");
        basis.push(r / norm);
    }
    basis
}

/// Euler (Bloch–Messiah) decomposition of a symplectic matrix.
///
/// Polar-decomposes `M = O P` with `P = √(MᵀM)`, then diagonalizes `P` by an
/// orthogonal symplectic `U` whose first n columns span eigenvectors with
/// eigenvalues ≥ 1 and whose last n columns are their images under σᵀ.
pub fn euler_decompose(m: &SymplecticMatrix) -> EulerFactors {
    let n = m.modes();
    let mm = m.matrix();
    let (s2, v) = sym_eigen_desc(&(mm.transpose() * mm));
    let s: Vec<f64> = s2.iter().map(|x| x.max(0.0).sqrt()).collect();
    let p_inv = &v * Mat::from_diagonal(&Vector::from_iterator(2 * n, s.iter().map(|x| 1.0 / x))) * v.transpose();
    let p = &v * Mat::from_diagonal(&Vector::from_vec(s.clone())) * v.transpose();
    let sig_t = sigma(n).transpose();

    let tol = policy().eigen;
    let mut us: Vec<Vector> = Vec::with_capacity(n);
    let mut chosen: Vec<Vector> = Vec::with_capacity(2 * n);
    for range in clusters(&s, tol) {
        let d = range.len();
        let mean = s[range.clone()].iter().sum::<f64>() / d as f64;
        let quota = if mean > 1.0 + tol {
            d
        } else if (mean - 1.0).abs() <= tol {
            d / 2
        } else {
            continue;
        };
        let vc = v.columns(range.start, d);
        let proj = vc * vc.transpose();
        for _ in 0..quota {
            let u = pivoted_basis_real(&proj, 1, &chosen).remove(0);
            let w = &sig_t * &u;
            chosen.push(u.clone());
            chosen.push(w);
            us.push(u);
        }
    }
    debug_assert_eq!(us.len(), n, "Euler pairing did not find n directions");

    let mut u_mat = Mat::zeros(2 * n, 2 * n);
    let mut squeezing = Vec::with_capacity(n);
    for (k, u) in us.iter().enumerate() {
        u_mat.set_column(k, u);
        u_mat.set_column(n + k, &(&sig_t * u));
        squeezing.push(u.dot(&(&p * u)));
    }
    let o = mm * p_inv;
    EulerFactors {
        left: SymplecticMatrix::from_trusted(o * &u_mat),
        squeezing,
        right: SymplecticMatrix::from_trusted(u_mat.transpose()),
    }
}

/// Single-mode form `M = R_θ · S_G · R_φ`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SingleModeEuler {
    pub theta: f64,
    pub gain: f64,
    pub phi: f64,
}

impl SingleModeEuler {
    pub fn matrix(&self) -> Result<Mat> {
        Ok(rotation(self.theta).matrix() * squeezer(self.gain)?.matrix() * rotation(self.phi).matrix())
    }
}

pub fn euler_single_mode(m: &SymplecticMatrix) -> Result<SingleModeEuler> {
    if m.modes() != 1 {
        return Err(Error::Dimension(format!("expected a single-mode matrix, got {} modes", m.modes())));
    }
    let f = euler_decompose(m);
    let lam = f.squeezing[0];
    let g = 0.25 * (lam + 1.0 / lam).powi(2);
    let angle = |b: &Mat| b[(0, 1)].atan2(b[(0, 0)]);
    Ok(SingleModeEuler {
        theta: angle(f.left.matrix()),
        gain: g.max(1.0),
        phi: angle(f.right.matrix()),
    })
}

/// `Mᵀ γ M = diag(ν₁..νₙ, ν₁..νₙ)` with ν sorted descending.
#[derive(Debug, Clone, PartialEq)]
pub struct WilliamsonResult {
    pub transform: SymplecticMatrix,
    pub spectrum: Vec<f64>,
}

impl WilliamsonResult {
    pub fn diagonal(&self) -> Mat {
        let d = Mat::from_diagonal(&Vector::from_vec(self.spectrum.clone()));
        direct_sum(&d, &d)
    }
}

pub(crate) fn validate_spd(gamma: &Mat, what: &str) -> Result<usize> {
    let n = modes_of(gamma, what)?;
    let asym = crate::linalg::asymmetry(gamma);
    if asym > policy().algebraic {
        return Err(Error::NotSymmetric { asymmetry: asym });
    }
    Ok(n)
}

/// Williamson normal form by the square-root construction.
///
/// With `A = γ^{1/2} σ γ^{1/2}` (real antisymmetric), the positive eigenpairs
/// `ω, w = a + ib` of the Hermitian `iA` give an orthogonal `O` with columns
/// `x = √2·a`, `p = −√2·b` bringing `A` to `[[0, Ω], [−Ω, 0]]`. Then
/// `M = γ^{-1/2} O (Ω^{1/2} ⊕ Ω^{1/2})` is symplectic and `Mᵀ γ M = Ω ⊕ Ω`.
/// Degenerate eigenspaces are canonicalized by projecting the standard basis
/// in index order, which makes `M = I` for already-diagonal thermal inputs.
pub fn williamson(gamma: &Mat) -> Result<WilliamsonResult> {
    let n = validate_spd(gamma, "covariance matrix")?;
    let gamma = crate::linalg::symmetrize(gamma);
    let (sqrt, inv_sqrt) = spd_sqrt_pair(&gamma)?;
    let a = &sqrt * sigma(n) * &sqrt;
    let dim = 2 * n;
    let h = DMatrix::<Complex<f64>>::from_fn(dim, dim, |i, j| Complex::new(0.0, a[(i, j)]));
    let eig = h.symmetric_eigen();
    let mut idx: Vec<usize> = (0..dim).collect();
    idx.sort_by(|&x, &y| eig.eigenvalues[y].total_cmp(&eig.eigenvalues[x]));
    let top: Vec<f64> = idx[..n].iter().map(|&i| eig.eigenvalues[i]).collect();
    if !(top[n - 1] > 0.0) {
        return Err(Error::Numerical("symplectic spectrum is not positive".into()));
    }

    let mut o = Mat::zeros(dim, dim);
    let mut col = 0;
    for range in clusters(&top, policy().eigen) {
        let d = range.len();
        let wc = DMatrix::<Complex<f64>>::from_fn(dim, d, |r, c| eig.eigenvectors[(r, idx[range.start + c])]);
        let proj = &wc * wc.adjoint();
        let mut basis: Vec<nalgebra::DVector<Complex<f64>>> = Vec::with_capacity(d);
        for _ in 0..d {
            let mut best: Option<(f64, nalgebra::DVector<Complex<f64>>)> = None;
            for j in 0..dim {
                let mut r = proj.column(j).into_owned();
                for q in &basis {
                    let c = q.dotc(&r);
                    r -= q * c;
                }
                let norm = r.norm();
                if best.as_ref().is_none_or(|(b, _)| norm > b * (1.0 + 1e-9)) {
                    best = Some((norm, r));
                }
            }
            let (norm, r) = best.expect("nonempty projector");
            basis.push(r.unscale(norm));
        }
        for w in basis {
            let sq2 = std::f64::consts::SQRT_2;
            for r in 0..dim {
                o[(r, col)] = sq2 * w[r].re;
                o[(r, n + col)] = -sq2 * w[r].im;
            }
            col += 1;
        }
    }

    let root = Vector::from_iterator(n, top.iter().map(|x| x.sqrt()));
    let scale = direct_sum(&Mat::from_diagonal(&root), &Mat::from_diagonal(&root));
    let m = inv_sqrt * o * scale;
    Ok(WilliamsonResult {
        transform: SymplecticMatrix::from_trusted(m),
        spectrum: top,
    })
}

/// Symplectic eigenvalues as the positive imaginary parts of the eigenvalues
/// of σγ (a general, non-symmetric eigenproblem). Used as a cross-check for
/// [`williamson`].
pub fn symplectic_spectrum_direct(gamma: &Mat) -> Result<Vec<f64>> {
    let n = validate_spd(gamma, "covariance matrix")?;
    let ev = (sigma(n) * gamma).complex_eigenvalues();
    let mut nu: Vec<f64> = ev.iter().map(|z| z.im.abs()).collect();
    nu.sort_by(|a, b| b.total_cmp(a));
    // each ν appears as the ±iν pair
    Ok(nu.into_iter().step_by(2).collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::linalg::rel_frobenius;
    use std::f64::consts::{FRAC_1_SQRT_2, FRAC_PI_2, FRAC_PI_4, SQRT_2};

    fn close(a: &Mat, b: &Mat, tol: f64) -> bool {
        (a - b).norm() <= tol
    }

    #[test]
    fn form_squares_to_minus_identity() {
        let s = SymplecticForm::new(3).unwrap();
        let m = s.matrix();
        assert_eq!(m.transpose(), -m.clone());
        assert_eq!(m * m, -Mat::identity(6, 6));
        assert!(SymplecticForm::new(0).is_err());
        assert!(SymplecticForm::new(9).is_err());
    }

    #[test]
    fn rotation_examples() {
        assert_eq!(rotation(0.0).matrix(), &Mat::identity(2, 2));
        assert!(close(rotation(FRAC_PI_2).matrix(), &sigma(1), 1e-15));
        let r = rotation(FRAC_PI_4);
        for v in r.matrix().iter() {
            assert!((v.abs() - FRAC_1_SQRT_2).abs() < 1e-15);
        }
        assert!(r.residual() < 1e-15);
        assert!(r.is_orthogonal());
    }

    #[test]
    fn rotations_add() {
        for (a, b) in [(0.3, 1.1), (-2.0, 0.7), (5.0, 4.0)] {
            let lhs = &rotation(a) * &rotation(b);
            assert!(close(lhs.matrix(), rotation(a + b).matrix(), 1e-12));
        }
    }

    #[test]
    fn squeezer_examples() {
        assert!(close(squeezer(1.0).unwrap().matrix(), &Mat::identity(2, 2), 0.0));
        let s2 = squeezer(2.0).unwrap();
        assert!((s2.matrix()[(0, 0)] - (SQRT_2 + 1.0)).abs() < 1e-15);
        assert!((s2.matrix()[(1, 1)] - (SQRT_2 - 1.0)).abs() < 1e-15);
        assert!((s2.matrix()[(0, 0)] * s2.matrix()[(1, 1)] - 1.0).abs() < 1e-15);
        assert!(squeezer(5.0).unwrap().residual() < 1e-15);
        assert!(matches!(squeezer(0.5), Err(Error::OutOfRange { .. })));
        assert!(squeezer(f64::NAN).is_err());
    }

    #[test]
    fn angled_squeezer_examples() {
        assert_eq!(squeezer_angled(3.0, 0.0).unwrap().matrix(), squeezer(3.0).unwrap().matrix());
        assert!(close(squeezer_angled(1.0, 0.8).unwrap().matrix(), &Mat::identity(2, 2), 1e-15));
        let s = squeezer_angled(2.0, FRAC_PI_2).unwrap();
        let want = Mat::from_row_slice(2, 2, &[SQRT_2 - 1.0, 0.0, 0.0, SQRT_2 + 1.0]);
        assert!(close(s.matrix(), &want, 1e-15));
    }

    #[test]
    fn symplectic_matrix_rejects_non_symplectic() {
        let m = Mat::from_row_slice(2, 2, &[2.0, 0.0, 0.0, 2.0]);
        assert!(matches!(SymplecticMatrix::new(m), Err(Error::NotSymplectic { .. })));
        assert!(SymplecticMatrix::new(Mat::identity(3, 3)).is_err());
    }

    #[test]
    fn inverse_is_exact() {
        let m = &(&rotation(0.3) * &squeezer(3.0).unwrap()) * &rotation(1.1);
        let prod = m.matrix() * m.inverse().matrix();
        assert!(close(&prod, &Mat::identity(2, 2), 1e-14));
    }

    #[test]
    fn euler_identity() {
        let f = euler_decompose(&SymplecticMatrix::identity(2));
        assert_eq!(f.left.matrix(), &Mat::identity(4, 4));
        assert_eq!(f.right.matrix(), &Mat::identity(4, 4));
        assert_eq!(f.squeezing, vec![1.0, 1.0]);
    }

    #[test]
    fn euler_of_squeezer() {
        let f = euler_decompose(&squeezer(2.0).unwrap());
        assert!((f.squeezing[0] - (SQRT_2 + 1.0)).abs() < 1e-13);
        assert!(close(f.left.matrix(), &Mat::identity(2, 2), 1e-13));
        assert!(close(f.right.matrix(), &Mat::identity(2, 2), 1e-13));
    }

    #[test]
    fn euler_round_trip_single_mode() {
        let m = &(&rotation(0.3) * &squeezer(3.0).unwrap()) * &rotation(1.1);
        let f = euler_decompose(&m);
        assert!(rel_frobenius(&f.reconstruct(), m.matrix()) < 1e-10);
        assert!(f.left.is_orthogonal() && f.right.is_orthogonal());
        let e = euler_single_mode(&m).unwrap();
        assert!((e.gain - 3.0).abs() < 1e-10);
        assert!(rel_frobenius(&e.matrix().unwrap(), m.matrix()) < 1e-10);
    }

    #[test]
    fn williamson_vacuum_is_identity() {
        let w = williamson(&(Mat::identity(4, 4) * 0.5)).unwrap();
        assert!(close(w.transform.matrix(), &Mat::identity(4, 4), 1e-14));
        for nu in &w.spectrum {
            assert!((nu - 0.5).abs() < 1e-15);
        }
    }

    #[test]
    fn williamson_squeezed_vacuum() {
        let g = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, 0.25]);
        let w = williamson(&g).unwrap();
        assert!((w.spectrum[0] - 0.5).abs() < 1e-14);
        let want = Mat::from_row_slice(2, 2, &[FRAC_1_SQRT_2, 0.0, 0.0, SQRT_2]);
        assert!(close(w.transform.matrix(), &want, 1e-14));
    }

    #[test]
    fn williamson_recovers_known_spectrum() {
        let m0 = (&(&rotation(0.4) * &squeezer(2.5).unwrap()) * &rotation(-1.3)).into_matrix();
        let gamma = m0.transpose() * (Mat::identity(2, 2) * 0.8) * &m0;
        let w = williamson(&gamma).unwrap();
        assert!((w.spectrum[0] - 0.8).abs() < 1e-9);
        let diag = w.transform.matrix().transpose() * &gamma * w.transform.matrix();
        assert!(rel_frobenius(&diag, &w.diagonal()) < 1e-9);
        assert!(w.transform.residual() < 1e-10);
    }

    #[test]
    fn williamson_validation() {
        let g = Mat::from_row_slice(2, 2, &[1.0, 0.5, 0.0, 1.0]);
        assert!(matches!(williamson(&g), Err(Error::NotSymmetric { .. })));
        let g = Mat::from_row_slice(2, 2, &[1.0, 0.0, 0.0, -1.0]);
        assert!(matches!(williamson(&g), Err(Error::NotPositiveDefinite { .. })));
        assert!(williamson(&Mat::identity(3, 3)).is_err());
    }

    #[test]
    fn direct_spectrum_agrees() {
        let g = Mat::from_row_slice(4, 4, &[
            2.0, 0.3, 0.1, 0.0, //
            0.3, 1.5, 0.0, 0.2, //
            0.1, 0.0, 1.0, 0.1, //
            0.0, 0.2, 0.1, 0.9,
        ]);
        let a = williamson(&g).unwrap().spectrum;
        let b = symplectic_spectrum_direct(&g).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() < 1e-12, "{a:?} vs {b:?}");
        }
    }
}
