//! Quasi-static flat Rayleigh-fading MIMO channel: Y = XH + W with H an
//! L×N matrix of i.i.d. CN(0,1) gains, held fixed for a whole codeword.

use num_complex::Complex64;

use crate::math::{db_to_linear, hermitian_eigenvalues, ComplexMatrix, RngState};
use crate::{Error, Result};

/// Antenna counts and SNR. `snr` is a linear power ratio.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SystemConfig {
    tx: usize,
    rx: usize,
    snr: f64,
}

impl SystemConfig {
    pub fn new(tx: usize, rx: usize, snr: f64) -> Result<Self> {
        if tx == 0 || rx == 0 {
            return Err(Error::Config(format!("antenna counts must be positive (L={tx}, N={rx})")));
        }
        if !(snr > 0.0 && snr.is_finite()) {
            return Err(Error::Config(format!("snr must be a positive finite ratio, got {snr}")));
        }
        Ok(Self { tx, rx, snr })
    }

    pub fn with_snr_db(tx: usize, rx: usize, snr_db: f64) -> Result<Self> {
        Self::new(tx, rx, db_to_linear(snr_db))
    }

    /// L, the number of transmit antennas.
    pub fn tx(&self) -> usize {
        self.tx
    }

    /// N, the number of receive antennas.
    pub fn rx(&self) -> usize {
        self.rx
    }

    /// ρ, linear.
    pub fn snr(&self) -> f64 {
        self.snr
    }

    /// Spatial degrees of freedom m = min(L, N).
    pub fn dof(&self) -> usize {
        self.tx.min(self.rx)
    }

    /// ρ/L, the SNR scale applied to each eigen-gain.
    pub fn per_antenna_snr(&self) -> f64 {
        self.snr / self.tx as f64
    }
}

/// Blocklength n (channel uses) and target error probability ε.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct OperatingPoint {
    pub blocklength: u64,
    pub epsilon: f64,
}

impl OperatingPoint {
    pub fn new(blocklength: u64, epsilon: f64) -> Result<Self> {
        if blocklength == 0 {
            return Err(Error::Config("blocklength must be at least 1".into()));
        }
        if !(epsilon > 0.0 && epsilon < 1.0) {
            return Err(Error::Config(format!("epsilon must lie in (0,1), got {epsilon}")));
        }
        Ok(Self { blocklength, epsilon })
    }

    pub fn n(&self) -> f64 {
        self.blocklength as f64
    }
}

/// One draw of the channel: the matrix and the m nonzero eigenvalues of its
/// Gram matrix, descending.
#[derive(Debug, Clone, PartialEq)]
pub struct ChannelRealization {
    h: ComplexMatrix,
    eigenvalues: Vec<f64>,
}

impl ChannelRealization {
    pub fn from_matrix(h: ComplexMatrix) -> Result<Self> {
        let eigenvalues = gram_eigenvalues(&h)?;
        Ok(Self { h, eigenvalues })
    }

    /// A realization with prescribed eigen-gains: H is the L×N matrix with
    /// √λᵢ on its diagonal. Useful for frozen fixtures.
    pub fn from_eigenvalues(cfg: &SystemConfig, eigenvalues: &[f64]) -> Result<Self> {
        if eigenvalues.len() != cfg.dof() {
            return Err(Error::Dimension(format!("{} eigenvalues given for m = {}", eigenvalues.len(), cfg.dof())));
        }
        if eigenvalues.iter().any(|&l| !(l >= 0.0 && l.is_finite())) {
            return Err(Error::Domain("eigenvalues must be finite and nonnegative".into()));
        }
        let mut sorted = eigenvalues.to_vec();
        sorted.sort_by(|a, b| b.total_cmp(a));
        let h = ComplexMatrix::from_fn(cfg.tx(), cfg.rx(), |r, c| {
            Complex64::new(if r == c { sorted[r].sqrt() } else { 0.0 }, 0.0)
        })?;
        Ok(Self { h, eigenvalues: sorted })
    }

    pub fn matrix(&self) -> &ComplexMatrix {
        &self.h
    }

    pub fn eigenvalues(&self) -> &[f64] {
        &self.eigenvalues
    }

    pub fn dof(&self) -> usize {
        self.eigenvalues.len()
    }
}

/// Draws H with i.i.d. CN(0,1) entries from the stream named by `rng`.
pub fn sample_channel(cfg: &SystemConfig, rng: RngState) -> ChannelRealization {
    let h = ComplexMatrix::gaussian(cfg.tx(), cfg.rx(), 1.0, &mut rng.generator())
        .expect("unit variance and a validated shape");
    ChannelRealization::from_matrix(h).expect("Gram matrices are Hermitian by construction")
}

/// The m = min(L,N) eigenvalues of HᴴH (equivalently of the smaller-side
/// Gram matrix), descending and clamped at zero.
pub fn gram_eigenvalues(h: &ComplexMatrix) -> Result<Vec<f64>> {
    let eig = hermitian_eigenvalues(&h.smaller_gram())?;
    Ok(eig.into_iter().map(|x| x.max(0.0)).collect())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(SystemConfig::new(0, 2, 1.0).is_err());
        assert!(SystemConfig::new(2, 2, 0.0).is_err());
        let c = SystemConfig::with_snr_db(4, 2, 10.0).unwrap();
        assert_eq!(c.dof(), 2);
        assert!((c.snr() - 10.0).abs() < 1e-12);
        assert!((c.per_antenna_snr() - 2.5).abs() < 1e-12);
        assert!(OperatingPoint::new(0, 0.1).is_err());
        assert!(OperatingPoint::new(10, 1.0).is_err());
    }

    #[test]
    fn identity_and_rank_one() {
        let id = ComplexMatrix::identity(2).unwrap();
        assert_eq!(gram_eigenvalues(&id).unwrap(), vec![1.0, 1.0]);
        let col = ComplexMatrix::from_real(2, 1, &[2f64.sqrt(), 0.0]).unwrap();
        let e = gram_eigenvalues(&col).unwrap();
        assert_eq!(e.len(), 1);
        assert!((e[0] - 2.0).abs() < 1e-15);
    }

    #[test]
    fn shape_contract() {
        let cfg = SystemConfig::new(4, 2, 10.0).unwrap();
        let ch = sample_channel(&cfg, RngState::new(3, 0));
        assert_eq!(ch.dof(), 2);
        assert!(ch.eigenvalues().iter().all(|&l| l >= 0.0));
        assert_eq!(ch.matrix().rows(), 4);
        assert_eq!(ch.matrix().cols(), 2);
    }

    /// Roots of the characteristic polynomial of a 3×3 Hermitian matrix via
    /// the trigonometric cubic formula.
    fn cubic_eigenvalues(g: &ComplexMatrix) -> Vec<f64> {
        let a = |i, j| g[(i, j)];
        let c2 = -(a(0, 0) + a(1, 1) + a(2, 2)).re;
        let c1 = (a(0, 0) * a(1, 1) + a(0, 0) * a(2, 2) + a(1, 1) * a(2, 2)
            - a(0, 1) * a(1, 0)
            - a(0, 2) * a(2, 0)
            - a(1, 2) * a(2, 1))
        .re;
        let det = (a(0, 0) * (a(1, 1) * a(2, 2) - a(1, 2) * a(2, 1))
            - a(0, 1) * (a(1, 0) * a(2, 2) - a(1, 2) * a(2, 0))
            + a(0, 2) * (a(1, 0) * a(2, 1) - a(1, 1) * a(2, 0)))
        .re;
        let c0 = -det;
        // λ³ + c2 λ² + c1 λ + c0 = 0, shift λ = t - c2/3
        let p = c1 - c2 * c2 / 3.0;
        let q = 2.0 * c2.powi(3) / 27.0 - c2 * c1 / 3.0 + c0;
        let r = (-p / 3.0).sqrt();
        let phi = ((3.0 * q) / (2.0 * p * r)).clamp(-1.0, 1.0).acos() / 3.0;
        let mut roots: Vec<f64> =
            (0..3).map(|k| 2.0 * r * (phi - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos() - c2 / 3.0).collect();
        roots.sort_by(|x, y| y.total_cmp(x));
        roots
    }

    #[test]
    fn six_by_three_matches_cubic_oracle() {
        for seed in 0..10 {
            let h = crate::math::sample_complex_gaussian(6, 3, 1.0, RngState::new(seed, 11)).unwrap();
            let jac = gram_eigenvalues(&h).unwrap();
            let cub = cubic_eigenvalues(&h.conj_transpose().matmul(&h).unwrap());
            for (x, y) in jac.iter().zip(&cub) {
                assert!((x - y).abs() <= 1e-8 * y.abs(), "seed {seed}: {jac:?} vs {cub:?}");
            }
        }
    }

    #[test]
    fn spectrum_of_h_and_its_adjoint_coincide() {
        let h = crate::math::sample_complex_gaussian(5, 3, 1.0, RngState::new(9, 0)).unwrap();
        let a = gram_eigenvalues(&h).unwrap();
        let b = gram_eigenvalues(&h.conj_transpose()).unwrap();
        for (x, y) in a.iter().zip(&b) {
            assert!((x - y).abs() <= 1e-9 * x.max(1.0));
        }
    }

    #[test]
    fn fixture_from_eigenvalues() {
        let cfg = SystemConfig::new(4, 4, 10.0).unwrap();
        let ch = ChannelRealization::from_eigenvalues(&cfg, &[1.0, 3.0, 0.5, 2.0]).unwrap();
        assert_eq!(ch.eigenvalues(), &[3.0, 2.0, 1.0, 0.5]);
        let again = gram_eigenvalues(ch.matrix()).unwrap();
        for (x, y) in again.iter().zip(ch.eigenvalues()) {
            assert!((x - y).abs() < 1e-14);
        }
        assert!(ChannelRealization::from_eigenvalues(&cfg, &[1.0]).is_err());
        assert!(ChannelRealization::from_eigenvalues(&cfg, &[1.0, -1.0, 0.0, 0.0]).is_err());
    }
}
