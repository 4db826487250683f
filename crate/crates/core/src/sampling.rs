//! Seeded random instances for property checks and the self-test.

use nalgebra::{Complex, DMatrix};
use rand::Rng;
use rand_chacha::rand_core::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rand_distr::StandardNormal;

use crate::channel::{channel_is_physical, GaussianChannel, GaussianState};
use crate::linalg::{direct_sum, sym_function, symmetrize, Mat, Vector};
use crate::symplectic::{sigma, SymplecticMatrix};

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

fn gaussian_mat<R: Rng + ?Sized>(rng: &mut R, r: usize, c: usize) -> Mat {
    Mat::from_fn(r, c, |_, _| rng.sample(StandardNormal))
}

/// Haar-ish orthogonal symplectic matrix from the QR factor of a complex
/// Gaussian matrix `U = A + iB`, embedded as `[[A, −B], [B, A]]`.
pub fn random_orthogonal_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize) -> SymplecticMatrix {
    let z = DMatrix::<Complex<f64>>::from_fn(n, n, |_, _| {
        Complex::new(rng.sample(StandardNormal), rng.sample(StandardNormal))
    });
    let q = z.qr().q();
    let a = q.map(|c| c.re);
    let b = q.map(|c| c.im);
    let mut m = Mat::zeros(2 * n, 2 * n);
    m.view_mut((0, 0), (n, n)).copy_from(&a);
    m.view_mut((0, n), (n, n)).copy_from(&(-&b));
    m.view_mut((n, 0), (n, n)).copy_from(&b);
    m.view_mut((n, n), (n, n)).copy_from(&a);
    SymplecticMatrix::from_trusted(m)
}

/// `O · diag(eʳ, e⁻ʳ) · O′` with squeezing `|r| ≤ max_r` per mode.
pub fn random_symplectic<R: Rng + ?Sized>(rng: &mut R, n: usize, max_r: f64) -> SymplecticMatrix {
    let o1 = random_orthogonal_symplectic(rng, n);
    let o2 = random_orthogonal_symplectic(rng, n);
    let r: Vec<f64> = (0..n).map(|_| rng.random_range(-max_r..=max_r)).collect();
    let up = Mat::from_diagonal(&Vector::from_iterator(n, r.iter().map(|x| x.exp())));
    let down = Mat::from_diagonal(&Vector::from_iterator(n, r.iter().map(|x| (-x).exp())));
    let mid = SymplecticMatrix::from_trusted(direct_sum(&up, &down));
    &(&o1 * &mid) * &o2
}

/// Thermal state `Sᵀ·diag(ν)·S` with `ν ∈ [1/2, 1/2 + max_excess]`, plus a
/// Gaussian displacement.
pub fn random_state<R: Rng + ?Sized>(rng: &mut R, n: usize, max_r: f64, max_excess: f64) -> GaussianState {
    let s = random_symplectic(rng, n, max_r);
    let nu: Vec<f64> = (0..n).map(|_| 0.5 + rng.random_range(0.0..=max_excess)).collect();
    let d = Vector::from_iterator(2 * n, nu.iter().chain(nu.iter()).copied());
    let gamma = symmetrize(&(s.matrix().transpose() * Mat::from_diagonal(&d) * s.matrix()));
    let disp = Vector::from_fn(2 * n, |_, _| rng.sample(StandardNormal));
    GaussianState::new(gamma, disp).expect("thermal state is physical")
}

/// Channel with `K` uniform in `[−2, 2]` and the least noise `|i·C|`,
/// `C = (σ − KᵀσK)/2`, plus a random positive part.
pub fn random_physical_channel<R: Rng + ?Sized>(rng: &mut R, n: usize) -> GaussianChannel {
    let s = sigma(n);
    loop {
        let k = Mat::from_fn(2 * n, 2 * n, |_, _| rng.random_range(-2.0..=2.0));
        let c = (&s - k.transpose() * &s * &k) * 0.5;
        let floor = sym_function(&(c.transpose() * &c), |x| x.max(0.0).sqrt());
        let q = gaussian_mat(rng, 2 * n, 2 * n);
        // A third of the draws are quantum-limited.
        let scale = if rng.random_bool(1.0 / 3.0) { 0.0 } else { rng.random_range(0.0..=0.5) };
        let extra = q.transpose() * q * scale;
        // Tiny isotropic padding keeps the eigenvalue test clear of rounding.
        let alpha = symmetrize(&(floor + extra + Mat::identity(2 * n, 2 * n) * 1e-9));
        let ch = GaussianChannel::from_trusted(k, Vector::zeros(2 * n), alpha);
        if channel_is_physical(&ch).physical {
            return ch;
        }
    }
}

pub fn random_displacement<R: Rng + ?Sized>(rng: &mut R, n: usize) -> Vector {
    Vector::from_fn(2 * n, |_, _| rng.sample(StandardNormal))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn symplectic_samples_are_symplectic() {
        let mut r = rng(7);
        for n in 1..=3 {
            let m = random_symplectic(&mut r, n, 1.0);
            assert!(m.residual() < 1e-10);
            assert!(random_orthogonal_symplectic(&mut r, n).is_orthogonal());
        }
    }

    #[test]
    fn channel_samples_are_physical() {
        let mut r = rng(11);
        for n in 1..=2 {
            for _ in 0..20 {
                let ch = random_physical_channel(&mut r, n);
                assert!(channel_is_physical(&ch).physical);
            }
        }
    }

    #[test]
    fn seeds_are_deterministic() {
        let a = random_physical_channel(&mut rng(3), 1);
        let b = random_physical_channel(&mut rng(3), 1);
        assert_eq!(a, b);
    }

    #[test]
    fn state_samples_are_physical() {
        let mut r = rng(5);
        assert!(random_state(&mut r, 2, 1.0, 2.0).physicality().physical);
    }
}
