//! Pure states, probe preparation and the central-spin partial trace.

use nalgebra::DVector;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::C64;
use crate::space::{BasisKind, HilbertSpace};

const NORM_TOL: f64 = 1e-12;
const BLOCH_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq)]
pub struct StateVector {
    space: HilbertSpace,
    amplitudes: DVector<C64>,
}

impl StateVector {
    /// Wraps amplitudes that are already normalized to within `1e-12`.
    pub fn new(space: HilbertSpace, amplitudes: DVector<C64>) -> Result<Self> {
        check_len(space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if (norm - 1.0).abs() > NORM_TOL {
            return Err(Error::domain(format!("state norm {norm} differs from 1")));
        }
        Ok(Self { space, amplitudes })
    }

    /// Normalizes arbitrary non-zero amplitudes.
    pub fn normalized(space: HilbertSpace, amplitudes: DVector<C64>) -> Result<Self> {
        check_len(space, amplitudes.len())?;
        let norm = amplitudes.norm();
        if !(norm.is_finite() && norm > 0.0) {
            return Err(Error::domain("cannot normalize a zero or non-finite vector"));
        }
        Ok(Self {
            space,
            amplitudes: amplitudes / C64::new(norm, 0.0),
        })
    }

    /// Used by propagators, which are responsible for norm conservation.
    pub(crate) fn from_evolved(space: HilbertSpace, amplitudes: DVector<C64>) -> Self {
        debug_assert_eq!(amplitudes.len(), space.dim());
        Self { space, amplitudes }
    }

    pub fn space(&self) -> HilbertSpace {
        self.space
    }

    pub fn amplitudes(&self) -> &DVector<C64> {
        &self.amplitudes
    }

    pub fn into_amplitudes(self) -> DVector<C64> {
        self.amplitudes
    }

    pub fn norm(&self) -> f64 {
        self.amplitudes.norm()
    }

    /// `<self|other>`.
    pub fn overlap(&self, other: &StateVector) -> Result<C64> {
        if self.space != other.space {
            return Err(Error::domain("overlap across different spaces"));
        }
        Ok(self.amplitudes.dotc(&other.amplitudes))
    }

    /// Euclidean distance `|| self - other ||`.
    pub fn distance(&self, other: &StateVector) -> Result<f64> {
        if self.space != other.space {
            return Err(Error::domain("distance across different spaces"));
        }
        Ok((&self.amplitudes - &other.amplitudes).norm())
    }
}

fn check_len(space: HilbertSpace, len: usize) -> Result<()> {
    if len != space.dim() {
        return Err(Error::domain(format!(
            "{len} amplitudes supplied for {space}"
        )));
    }
    Ok(())
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ProbeKind {
    /// Central spin along +x, every ring spin along +x.
    RingXPolarized,
    /// Central spin along +x, ring in the stretched state `|I, M_z = I>`.
    RingZStretched,
    /// Caller-supplied amplitudes, normalized on use.
    Custom(Vec<C64>),
}

const PLUS_X: [C64; 2] = [
    C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
    C64::new(std::f64::consts::FRAC_1_SQRT_2, 0.0),
];
const UP: [C64; 2] = [C64::new(1.0, 0.0), C64::new(0.0, 0.0)];

pub fn probe_state(space: HilbertSpace, kind: ProbeKind) -> Result<StateVector> {
    match kind {
        ProbeKind::RingXPolarized => product_state(space, PLUS_X, PLUS_X),
        ProbeKind::RingZStretched => product_state(space, PLUS_X, UP),
        ProbeKind::Custom(amps) => {
            if amps.is_empty() {
                return Err(Error::domain("custom probe requires amplitudes"));
            }
            StateVector::normalized(space, DVector::from_vec(amps))
        }
    }
}

/// `|central> (x) |ring>^(x)N` with every ring spin in the same single-spin
/// state. In the collective sector this symmetric product is expanded in the
/// Dicke basis. Both single-spin states are normalized first.
pub fn product_state(space: HilbertSpace, central: [C64; 2], ring: [C64; 2]) -> Result<StateVector> {
    let central = normalize2(central)?;
    let ring = normalize2(ring)?;
    let n = space.n_ring();
    let ring_amps: Vec<C64> = match space.kind() {
        BasisKind::FullProduct => (0..1usize << n)
            .map(|bits| {
                let downs = bits.count_ones() as usize;
                ring[0].powu((n - downs) as u32) * ring[1].powu(downs as u32)
            })
            .collect(),
        BasisKind::CollectiveSector => dicke_coherent_amplitudes(n, ring),
    };
    let amps: Vec<C64> = central
        .iter()
        .flat_map(|&c| ring_amps.iter().map(move |&r| c * r))
        .collect();
    StateVector::normalized(space, DVector::from_vec(amps))
}

/// Amplitudes of `u^(x)N` on Dicke states `|I, I - k>`:
/// `sqrt(C(N, k)) u_up^(N-k) u_down^k`, evaluated in log space.
pub(crate) fn dicke_coherent_amplitudes(n: usize, u: [C64; 2]) -> Vec<C64> {
    let (ln_up, ph_up) = (u[0].norm().ln(), u[0].arg());
    let (ln_dn, ph_dn) = (u[1].norm().ln(), u[1].arg());
    let weighted = |e: usize, ln: f64| if e == 0 { 0.0 } else { e as f64 * ln };
    let mut ln_binom = 0.0f64;
    (0..=n)
        .map(|k| {
            if k > 0 {
                ln_binom += ((n - k + 1) as f64 / k as f64).ln();
            }
            let ln_mag = 0.5 * ln_binom + weighted(n - k, ln_up) + weighted(k, ln_dn);
            let phase = (n - k) as f64 * ph_up + k as f64 * ph_dn;
            C64::from_polar(ln_mag.exp(), phase)
        })
        .collect()
}

fn normalize2(v: [C64; 2]) -> Result<[C64; 2]> {
    let norm = (v[0].norm_sqr() + v[1].norm_sqr()).sqrt();
    if !(norm.is_finite() && norm > 0.0) {
        return Err(Error::domain("single-spin state must be non-zero"));
    }
    Ok([v[0] / norm, v[1] / norm])
}

/// `(V_x, V_y, V_z) = 2 <sigma_0>` of the central spin.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BlochVector {
    pub x: f64,
    pub y: f64,
    pub z: f64,
}

impl BlochVector {
    pub fn new(x: f64, y: f64, z: f64) -> Self {
        Self { x, y, z }
    }

    pub fn norm_squared(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_squared().sqrt()
    }

    pub fn dot(&self, other: &BlochVector) -> f64 {
        self.x * other.x + self.y * other.y + self.z * other.z
    }

    pub fn sub(&self, other: &BlochVector) -> BlochVector {
        BlochVector::new(self.x - other.x, self.y - other.y, self.z - other.z)
    }

    pub fn scale(&self, s: f64) -> BlochVector {
        BlochVector::new(self.x * s, self.y * s, self.z * s)
    }
}

/// Traces out the ring and returns the central spin's Bloch vector.
pub fn reduce_to_central_bloch(psi: &StateVector) -> Result<BlochVector> {
    let half = psi.space().central_half();
    let amps = psi.amplitudes().as_slice();
    let (up, down) = amps.split_at(half);
    let coherence: C64 = up.iter().zip(down).map(|(a, b)| a.conj() * b).sum();
    let p_up: f64 = up.iter().map(|a| a.norm_sqr()).sum();
    let p_down: f64 = down.iter().map(|a| a.norm_sqr()).sum();
    let v = BlochVector::new(2.0 * coherence.re, 2.0 * coherence.im, p_up - p_down);
    if v.norm() > 1.0 + BLOCH_TOL {
        return Err(Error::Internal(format!(
            "Bloch vector length {} exceeds 1",
            v.norm()
        )));
    }
    Ok(v)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{expectation, single_site_op, Axis};
    use proptest::prelude::*;

    const S: f64 = std::f64::consts::FRAC_1_SQRT_2;

    #[test]
    fn x_polarized_full_product_is_uniform() {
        let space = HilbertSpace::full_product(2).unwrap();
        let psi = probe_state(space, ProbeKind::RingXPolarized).unwrap();
        let target = 1.0 / 8f64.sqrt();
        for a in psi.amplitudes().iter() {
            assert!((a.re - target).abs() < 1e-15 && a.im == 0.0);
        }
    }

    #[test]
    fn stretched_collective_probe() {
        let space = HilbertSpace::collective(4).unwrap();
        let psi = probe_state(space, ProbeKind::RingZStretched).unwrap();
        let a = psi.amplitudes();
        assert!((a[0].re - S).abs() < 1e-15);
        assert!((a[5].re - S).abs() < 1e-15);
        assert!((psi.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn custom_probe_requires_amplitudes() {
        let space = HilbertSpace::collective(1).unwrap();
        assert!(matches!(
            probe_state(space, ProbeKind::Custom(vec![])),
            Err(Error::Domain(_))
        ));
        let psi = probe_state(space, ProbeKind::Custom(vec![C64::new(3.0, 0.0); 4])).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-15);
    }

    #[test]
    fn bloch_of_simple_states() {
        let space = HilbertSpace::full_product(2).unwrap();
        let chi = [C64::new(0.3, 0.1), C64::new(-0.2, 0.9)];
        let up = product_state(space, UP, chi).unwrap();
        let v = reduce_to_central_bloch(&up).unwrap();
        assert!((v.x).abs() < 1e-15 && v.y.abs() < 1e-15 && (v.z - 1.0).abs() < 1e-15);

        let plus = product_state(space, PLUS_X, chi).unwrap();
        let v = reduce_to_central_bloch(&plus).unwrap();
        assert!((v.x - 1.0).abs() < 1e-15 && v.y.abs() < 1e-15 && v.z.abs() < 1e-15);

        // (|up>|a> + |down>|b>)/sqrt(2) with <a|b> = 0
        let mut amps = DVector::from_element(8, C64::new(0.0, 0.0));
        amps[0] = C64::new(S, 0.0);
        amps[4 + 3] = C64::new(S, 0.0);
        let ent = StateVector::new(space, amps).unwrap();
        let v = reduce_to_central_bloch(&ent).unwrap();
        assert!(v.norm() < 1e-15);
    }

    #[test]
    fn collective_x_polarized_matches_binomial() {
        let space = HilbertSpace::collective(6).unwrap();
        let psi = probe_state(space, ProbeKind::RingXPolarized).unwrap();
        let a = psi.amplitudes();
        let binom = [1.0, 6.0, 15.0, 20.0, 15.0, 6.0, 1.0];
        for (k, b) in binom.iter().enumerate() {
            let target = S * (b / 64.0f64).sqrt();
            assert!((a[k].re - target).abs() < 1e-15);
        }
    }

    #[test]
    fn large_collective_state_stays_normalized() {
        let space = HilbertSpace::collective(512).unwrap();
        let psi = probe_state(space, ProbeKind::RingXPolarized).unwrap();
        assert!((psi.norm() - 1.0).abs() < 1e-12);
        assert!(psi.amplitudes().iter().all(|a| a.re.is_finite()));
    }

    proptest! {
        #[test]
        fn bloch_z_matches_direct_expectation(
            re in proptest::collection::vec(-1.0f64..1.0, 16),
            im in proptest::collection::vec(-1.0f64..1.0, 16),
        ) {
            let space = HilbertSpace::full_product(3).unwrap();
            let amps: Vec<C64> = re.iter().zip(&im).map(|(&a, &b)| C64::new(a, b)).collect();
            prop_assume!(amps.iter().map(|a| a.norm_sqr()).sum::<f64>() > 1e-3);
            let psi = StateVector::normalized(space, DVector::from_vec(amps)).unwrap();
            let v = reduce_to_central_bloch(&psi).unwrap();
            for (axis, comp) in [(Axis::X, v.x), (Axis::Y, v.y), (Axis::Z, v.z)] {
                let op = single_site_op(space, 0, axis).unwrap();
                let direct = 2.0 * expectation(&op, &psi).unwrap();
                prop_assert!((direct - comp).abs() < 1e-12);
            }
            prop_assert!(v.norm() <= 1.0 + 1e-10);
        }
    }
}
