//! Coarse-step PMD emulation: fixed-length sections with constant
//! birefringence, each preceded by a random rotation on the Poincaré sphere
//! and a random phase.

use std::f64::consts::PI;

use num_complex::Complex64;
use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use super::FiberParams;

/// One constant-birefringence section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PmdSection {
    /// Half the polar angle of the new birefringence axis on the sphere.
    pub theta: f64,
    /// Azimuth of the new axis.
    pub phi: f64,
    /// Random phase between the two local eigenstates.
    pub phase: f64,
    /// Differential group delay, s. Signed; only |dgd| is physical.
    pub dgd: f64,
    /// Physical length covered by the section, m.
    pub length: f64,
}

impl PmdSection {
    /// Jones matrix of the frequency-independent part: rotation, then phase.
    pub fn jones(&self) -> [[Complex64; 2]; 2] {
        let (s, c) = self.theta.sin_cos();
        let e = Complex64::from_polar(1.0, self.phi);
        let p = Complex64::from_polar(1.0, self.phase / 2.0);
        let r = [
            [Complex64::new(c, 0.0), -s * e.conj()],
            [s * e, Complex64::new(c, 0.0)],
        ];
        [
            [p * r[0][0], p * r[0][1]],
            [p.conj() * r[1][0], p.conj() * r[1][1]],
        ]
    }

    /// Jones matrix including the DGD at angular frequency `omega`.
    pub fn jones_at(&self, omega: f64) -> [[Complex64; 2]; 2] {
        let j = self.jones();
        let d = Complex64::from_polar(1.0, omega * self.dgd / 2.0);
        [
            [d * j[0][0], d * j[0][1]],
            [d.conj() * j[1][0], d.conj() * j[1][1]],
        ]
    }
}

/// One random draw of the birefringence along the whole link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PmdRealization {
    pub sections: Vec<PmdSection>,
    pub seed: u64,
}

/// Draws one realization. Per-section DGDs are zero-mean Gaussian with
/// standard deviation `D_PMD·√(section length)`, so that the rms of the
/// concatenated DGD is `D_PMD·√L`.
pub fn sample_pmd_realization<R: Rng + ?Sized>(
    params: &FiberParams,
    seed: u64,
    rng: &mut R,
) -> PmdRealization {
    let total = params.total_length();
    let n = params.n_sections();
    let mut sections = Vec::with_capacity(n);
    for k in 0..n {
        let start = k as f64 * params.section_length;
        let length = (total - start).min(params.section_length);
        let cos2 = rng.random_range(-1.0..=1.0f64);
        let theta = cos2.acos() / 2.0;
        let phi = rng.random_range(0.0..2.0 * PI);
        let phase = rng.random_range(0.0..2.0 * PI);
        let sigma = params.pmd_coeff * length.sqrt();
        let dgd = if sigma > 0.0 {
            Normal::new(0.0, sigma).expect("finite sigma").sample(rng)
        } else {
            0.0
        };
        sections.push(PmdSection {
            theta,
            phi,
            phase,
            dgd,
            length,
        });
    }
    PmdRealization { sections, seed }
}

/// Rotation of Stokes space induced by a 2×2 unitary,
/// `M_ij = ½ tr(σᵢ J σⱼ J†)`.
pub(crate) fn stokes_rotation(j: &[[Complex64; 2]; 2]) -> [[f64; 3]; 3] {
    let i = Complex64::i();
    let one = Complex64::new(1.0, 0.0);
    let zero = Complex64::new(0.0, 0.0);
    let pauli = [
        [[one, zero], [zero, -one]],
        [[zero, one], [one, zero]],
        [[zero, -i], [i, zero]],
    ];
    let mul = |a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]| {
        let mut c = [[zero; 2]; 2];
        for r in 0..2 {
            for col in 0..2 {
                c[r][col] = a[r][0] * b[0][col] + a[r][1] * b[1][col];
            }
        }
        c
    };
    let jh = [
        [j[0][0].conj(), j[1][0].conj()],
        [j[0][1].conj(), j[1][1].conj()],
    ];
    let mut m = [[0.0; 3]; 3];
    for col in 0..3 {
        let t = mul(&mul(j, &pauli[col]), &jh);
        for row in 0..3 {
            let p = mul(&pauli[row], &t);
            m[row][col] = 0.5 * (p[0][0] + p[1][1]).re;
        }
    }
    m
}

/// Magnitude of the first-order PMD vector of the concatenated sections.
pub fn aggregate_dgd(pmd: &PmdRealization) -> f64 {
    let mut omega = [0.0f64; 3];
    for s in &pmd.sections {
        let m = stokes_rotation(&s.jones());
        let rotated = [
            m[0][0] * omega[0] + m[0][1] * omega[1] + m[0][2] * omega[2],
            m[1][0] * omega[0] + m[1][1] * omega[1] + m[1][2] * omega[2],
            m[2][0] * omega[0] + m[2][1] * omega[1] + m[2][2] * omega[2],
        ];
        omega = [rotated[0] - s.dgd, rotated[1], rotated[2]];
    }
    (omega[0] * omega[0] + omega[1] * omega[1] + omega[2] * omega[2]).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn params(d_ps: f64, km: f64) -> FiberParams {
        FiberParams {
            pmd_coeff: FiberParams::pmd_from_ps_per_sqrt_km(d_ps),
            span_length: km * 1e3,
            n_spans: 1,
            ..FiberParams::default()
        }
    }

    fn matmul(a: &[[Complex64; 2]; 2], b: &[[Complex64; 2]; 2]) -> [[Complex64; 2]; 2] {
        let mut c = [[Complex64::new(0.0, 0.0); 2]; 2];
        for r in 0..2 {
            for k in 0..2 {
                c[r][k] = a[r][0] * b[0][k] + a[r][1] * b[1][k];
            }
        }
        c
    }

    /// DGD from the eigenphases of T(ω+δ)·T(ω−δ)†.
    fn dgd_by_differentiation(pmd: &PmdRealization) -> f64 {
        let delta = 1e7;
        let transfer = |w: f64| {
            let mut t = [
                [Complex64::new(1.0, 0.0), Complex64::new(0.0, 0.0)],
                [Complex64::new(0.0, 0.0), Complex64::new(1.0, 0.0)],
            ];
            for s in &pmd.sections {
                t = matmul(&s.jones_at(w), &t);
            }
            t
        };
        let a = transfer(delta);
        let b = transfer(-delta);
        let bh = [
            [b[0][0].conj(), b[1][0].conj()],
            [b[0][1].conj(), b[1][1].conj()],
        ];
        let p = matmul(&a, &bh);
        // eigenvalues of a unitary 2×2: trace/2 ± sqrt((trace/2)² − det)
        let tr = (p[0][0] + p[1][1]) / 2.0;
        let det = p[0][0] * p[1][1] - p[0][1] * p[1][0];
        let disc = (tr * tr - det).sqrt();
        let (e1, e2) = (tr + disc, tr - disc);
        let dphi = (e1 / e2).arg().abs();
        dphi / (2.0 * delta)
    }

    #[test]
    fn rotation_is_orthogonal() {
        let s = PmdSection {
            theta: 0.3,
            phi: 1.1,
            phase: 2.0,
            dgd: 0.0,
            length: 1.0,
        };
        let m = stokes_rotation(&s.jones());
        for r in 0..3 {
            for c in 0..3 {
                let dot: f64 = (0..3).map(|k| m[k][r] * m[k][c]).sum();
                assert!((dot - if r == c { 1.0 } else { 0.0 }).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn zero_pmd_has_rotations_only() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let r = sample_pmd_realization(&params(0.0, 50.0), 3, &mut rng);
        assert_eq!(r.sections.len(), 50);
        assert!(r.sections.iter().all(|s| s.dgd == 0.0));
        assert!(r.sections.iter().any(|s| s.theta != r.sections[0].theta));
        assert_eq!(aggregate_dgd(&r), 0.0);
    }

    #[test]
    fn deterministic_under_seed() {
        let p = params(0.1, 100.0);
        let a = sample_pmd_realization(&p, 9, &mut ChaCha8Rng::seed_from_u64(9));
        let b = sample_pmd_realization(&p, 9, &mut ChaCha8Rng::seed_from_u64(9));
        assert_eq!(a, b);
    }

    #[test]
    fn single_section_and_partial_last_section() {
        let s = PmdSection {
            theta: 0.4,
            phi: 0.2,
            phase: 1.0,
            dgd: -3e-12,
            length: 1e3,
        };
        let r = PmdRealization {
            sections: vec![s],
            seed: 0,
        };
        assert!((aggregate_dgd(&r) - 3e-12).abs() < 1e-24);

        let mut p = params(0.1, 10.5);
        p.section_length = 1e3;
        let r = sample_pmd_realization(&p, 1, &mut ChaCha8Rng::seed_from_u64(1));
        assert_eq!(r.sections.len(), 11);
        assert!((r.sections[10].length - 500.0).abs() < 1e-9);
    }

    #[test]
    fn concatenation_matches_differentiated_transfer() {
        let p = params(0.5, 200.0);
        for seed in 0..5 {
            let r = sample_pmd_realization(&p, seed, &mut ChaCha8Rng::seed_from_u64(seed));
            let a = aggregate_dgd(&r);
            let b = dgd_by_differentiation(&r);
            assert!((a - b).abs() < 1e-3 * a, "{a} vs {b}");
        }
    }
}
