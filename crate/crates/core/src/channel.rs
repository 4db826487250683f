//! Gaussian states `(γ, d)` and channels `(K, m, α)`.

use crate::error::{Error, Result};
use crate::linalg::{asymmetry, hermitian_min_eigenvalue, symmetrize, Mat, Vector};
use crate::policy::policy;
use crate::symplectic::{modes_of, sigma, symplectic_residual, SymplecticMatrix};

/// Outcome of a Hermitian positivity test.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Physicality {
    pub physical: bool,
    pub min_eigenvalue: f64,
}

impl Physicality {
    fn from_min(min_eigenvalue: f64) -> Self {
        Physicality {
            physical: min_eigenvalue >= -policy().psd_floor,
            min_eigenvalue,
        }
    }
}

fn check_symmetric(m: &Mat) -> Result<()> {
    let a = asymmetry(m);
    if a > policy().algebraic {
        Err(Error::NotSymmetric { asymmetry: a })
    } else {
        Ok(())
    }
}

/// `γ + (i/2)σ ⪰ 0`.
pub fn state_is_physical(gamma: &Mat, d: &Vector) -> Result<Physicality> {
    let n = modes_of(gamma, "covariance matrix")?;
    if d.len() != 2 * n {
        return Err(Error::Dimension(format!(
            "displacement has {} entries, covariance matrix needs {}",
            d.len(),
            2 * n
        )));
    }
    Ok(Physicality::from_min(hermitian_min_eigenvalue(gamma, &(sigma(n) * 0.5))))
}

#[derive(Debug, Clone, PartialEq)]
pub struct GaussianState {
    gamma: Mat,
    d: Vector,
}

impl GaussianState {
    /// Validated state: shapes, symmetry and the uncertainty relation.
    pub fn new(gamma: Mat, d: Vector) -> Result<Self> {
        check_symmetric(&gamma)?;
        let ph = state_is_physical(&gamma, &d)?;
        if !ph.physical {
            return Err(Error::Unphysical {
                what: "covariance matrix",
                min_eigenvalue: ph.min_eigenvalue,
            });
        }
        Ok(GaussianState {
            gamma: symmetrize(&gamma),
            d,
        })
    }

    pub fn vacuum(n: usize) -> Self {
        GaussianState {
            gamma: Mat::identity(2 * n, 2 * n) * 0.5,
            d: Vector::zeros(2 * n),
        }
    }

    pub fn modes(&self) -> usize {
        self.d.len() / 2
    }

    pub fn gamma(&self) -> &Mat {
        &self.gamma
    }

    pub fn displacement(&self) -> &Vector {
        &self.d
    }

    pub fn physicality(&self) -> Physicality {
        Physicality::from_min(hermitian_min_eigenvalue(&self.gamma, &(sigma(self.modes()) * 0.5)))
    }
}

/// A Gaussian channel acting as `γ → Kᵀ γ K + α`, `d → Kᵀ d + m`.
///
/// Only square (n → n) maps are represented.
#[derive(Debug, Clone, PartialEq)]
pub struct GaussianChannel {
    k: Mat,
    m: Vector,
    alpha: Mat,
}

impl GaussianChannel {
    /// Shape- and symmetry-checked triplet; physicality is not enforced.
    pub fn from_parts(k: Mat, m: Vector, alpha: Mat) -> Result<Self> {
        let n = modes_of(&k, "K")?;
        if alpha.shape() != k.shape() {
            return Err(Error::Dimension(format!(
                "alpha is {:?} but K is {:?}",
                alpha.shape(),
                k.shape()
            )));
        }
        if m.len() != 2 * n {
            return Err(Error::Dimension(format!("m has {} entries, expected {}", m.len(), 2 * n)));
        }
        check_symmetric(&alpha)?;
        Ok(GaussianChannel {
            k,
            m,
            alpha: symmetrize(&alpha),
        })
    }

    /// Fully validated channel, including `α ⪰ (i/2)(σ − Kᵀ σ K)`.
    pub fn new(k: Mat, m: Vector, alpha: Mat) -> Result<Self> {
        let ch = Self::from_parts(k, m, alpha)?;
        let ph = channel_is_physical(&ch);
        if !ph.physical {
            return Err(Error::Unphysical {
                what: "channel",
                min_eigenvalue: ph.min_eigenvalue,
            });
        }
        Ok(ch)
    }

    pub(crate) fn from_trusted(k: Mat, m: Vector, alpha: Mat) -> Self {
        GaussianChannel { k, m, alpha }
    }

    pub fn identity(n: usize) -> Self {
        GaussianChannel {
            k: Mat::identity(2 * n, 2 * n),
            m: Vector::zeros(2 * n),
            alpha: Mat::zeros(2 * n, 2 * n),
        }
    }

    /// The unitary channel `(M, 0, 0)`.
    pub fn unitary(m: &SymplecticMatrix) -> Self {
        let n = m.modes();
        GaussianChannel {
            k: m.matrix().clone(),
            m: Vector::zeros(2 * n),
            alpha: Mat::zeros(2 * n, 2 * n),
        }
    }

    pub fn modes(&self) -> usize {
        self.m.len() / 2
    }

    pub fn k(&self) -> &Mat {
        &self.k
    }

    pub fn m(&self) -> &Vector {
        &self.m
    }

    pub fn alpha(&self) -> &Mat {
        &self.alpha
    }

    pub fn with_displacement(mut self, m: Vector) -> Result<Self> {
        if m.len() != self.m.len() {
            return Err(Error::Dimension(format!("m has {} entries, expected {}", m.len(), self.m.len())));
        }
        self.m = m;
        Ok(self)
    }

    /// `α = 0` and `K` symplectic.
    pub fn is_unitary(&self) -> bool {
        self.alpha.norm() == 0.0 && symplectic_residual(&self.k) <= policy().algebraic
    }
}

/// `α − (i/2)(σ − Kᵀ σ K) ⪰ 0`.
pub fn channel_is_physical(ch: &GaussianChannel) -> Physicality {
    let s = sigma(ch.modes());
    let defect = &s - ch.k.transpose() * &s * &ch.k;
    Physicality::from_min(hermitian_min_eigenvalue(&ch.alpha, &(defect * -0.5)))
}

fn same_modes(a: &GaussianChannel, b: &GaussianChannel) -> Result<()> {
    if a.modes() != b.modes() {
        return Err(Error::Dimension(format!(
            "cannot compose a {}-mode channel with a {}-mode channel",
            a.modes(),
            b.modes()
        )));
    }
    Ok(())
}

/// `second ∘ first`: `(K₁K₂, K₂ᵀ m₁ + m₂, K₂ᵀ α₁ K₂ + α₂)`.
pub fn compose(first: &GaussianChannel, second: &GaussianChannel) -> Result<GaussianChannel> {
    same_modes(first, second)?;
    let k2t = second.k.transpose();
    let alpha = &k2t * &first.alpha * &second.k + &second.alpha;
    let out = GaussianChannel {
        k: &first.k * &second.k,
        m: &k2t * &first.m + &second.m,
        alpha: symmetrize(&alpha),
    };
    debug_assert!(
        channel_is_physical(&out).min_eigenvalue >= -1e-8 * (1.0 + out.alpha.norm() + out.k.norm_squared())
            || channel_is_physical(first).min_eigenvalue < 0.0
            || channel_is_physical(second).min_eigenvalue < 0.0,
        "composition of physical channels lost physicality"
    );
    Ok(out)
}

/// Ordered list of channels in application order.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelChain {
    links: Vec<GaussianChannel>,
}

impl ChannelChain {
    pub fn new(links: Vec<GaussianChannel>) -> Result<Self> {
        let first = links
            .first()
            .ok_or_else(|| Error::InvalidChain("a chain needs at least one channel".into()))?;
        let n = first.modes();
        if let Some((i, bad)) = links.iter().enumerate().find(|(_, l)| l.modes() != n) {
            return Err(Error::InvalidChain(format!(
                "link {} acts on {} modes, link 1 on {n}",
                i + 1,
                bad.modes()
            )));
        }
        Ok(ChannelChain { links })
    }

    pub fn links(&self) -> &[GaussianChannel] {
        &self.links
    }

    pub fn modes(&self) -> usize {
        self.links[0].modes()
    }
}

/// Left fold of [`compose`] in application order.
pub fn compose_chain(chain: &ChannelChain) -> GaussianChannel {
    let mut links = chain.links.iter();
    let first = links.next().expect("validated chain is nonempty").clone();
    links.fold(first, |acc, next| compose(&acc, next).expect("validated chain has uniform modes"))
}

/// `(γ, d) → (Kᵀ γ K + α, Kᵀ d + m)`.
pub fn apply(ch: &GaussianChannel, st: &GaussianState) -> Result<GaussianState> {
    if ch.modes() != st.modes() {
        return Err(Error::Dimension(format!(
            "{}-mode channel applied to a {}-mode state",
            ch.modes(),
            st.modes()
        )));
    }
    let kt = ch.k.transpose();
    Ok(GaussianState {
        gamma: symmetrize(&(&kt * &st.gamma * &ch.k + &ch.alpha)),
        d: &kt * &st.d + &ch.m,
    })
}

/// Moves every displacement into the last link.
///
/// The returned `m_t = Σ_{j≥2} K_{j→n}ᵀ m_{j−1} + m_n` is accumulated with
/// the same operations as [`compose`], so composing either chain gives
/// bit-identical triplets.
pub fn extract_displacements(chain: &ChannelChain) -> (ChannelChain, Vector) {
    let n = chain.modes();
    let mut total = Vector::zeros(2 * n);
    for (i, link) in chain.links.iter().enumerate() {
        total = if i == 0 {
            link.m.clone()
        } else {
            link.k.transpose() * &total + &link.m
        };
    }
    let last = chain.links.len() - 1;
    let links = chain
        .links
        .iter()
        .enumerate()
        .map(|(i, l)| GaussianChannel {
            k: l.k.clone(),
            m: if i == last { total.clone() } else { Vector::zeros(2 * n) },
            alpha: l.alpha.clone(),
        })
        .collect();
    (ChannelChain { links }, total)
}
