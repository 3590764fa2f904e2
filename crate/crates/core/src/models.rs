//! Central-spin Hamiltonians, their field derivatives and coupling profiles.
//!
//! Conventions shared by every variant (spin-1/2 operators, `S` central,
//! `I = sum_i s_i` ring):
//!
//! | variant | Hamiltonian |
//! |---|---|
//! | `IsingRingCentral` | `-J sum_i s_i^x s_{i+1}^x - h I_y + A S_z I_z`, periodic ring |
//! | `CollectiveNoZeeman` | `-h I_y + A S_z I_z` |
//! | `Zzxx` | `-h (S_y + I_y) + A S_z I_z` |
//! | `XxzCollective` | `-h (S_a + I_a) + (D/2)(S+ I- + S- I+) + A S_z I_z`, `a` in {y, z} |
//! | `InhomogeneousZz` | `-h I_y + sum_k A_k S_z s_k^z` |

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::{Axis, HermitianOperator, TermSum, C64};
use crate::space::{BasisKind, HilbertSpace};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldAxis {
    #[default]
    Y,
    Z,
}

impl FieldAxis {
    fn axis(self) -> Axis {
        match self {
            FieldAxis::Y => Axis::Y,
            FieldAxis::Z => Axis::Z,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Variant {
    IsingRingCentral { j: f64, h: f64, a: f64 },
    CollectiveNoZeeman { h: f64, a: f64 },
    Zzxx { h: f64, a: f64 },
    XxzCollective { h: f64, a: f64, delta: f64, field_axis: FieldAxis },
    InhomogeneousZz { h: f64, couplings: Vec<f64> },
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ModelSpec {
    variant: Variant,
    n_ring: usize,
}

impl ModelSpec {
    pub fn new(variant: Variant, n_ring: usize) -> Result<Self> {
        if n_ring == 0 {
            return Err(Error::domain("ring must contain at least one spin"));
        }
        let finite = |xs: &[f64]| xs.iter().all(|x| x.is_finite());
        let ok = match &variant {
            Variant::IsingRingCentral { j, h, a } => {
                if *j != 0.0 && n_ring < 2 {
                    return Err(Error::domain("Ising ring bond needs at least two ring spins"));
                }
                finite(&[*j, *h, *a])
            }
            Variant::CollectiveNoZeeman { h, a } | Variant::Zzxx { h, a } => finite(&[*h, *a]),
            Variant::XxzCollective { h, a, delta, .. } => finite(&[*h, *a, *delta]),
            Variant::InhomogeneousZz { h, couplings } => {
                if couplings.len() != n_ring {
                    return Err(Error::domain(format!(
                        "{} couplings supplied for {n_ring} ring spins",
                        couplings.len()
                    )));
                }
                finite(couplings) && h.is_finite()
            }
        };
        if !ok {
            return Err(Error::domain("model parameters must be finite"));
        }
        Ok(Self { variant, n_ring })
    }

    pub fn ising_ring(j: f64, h: f64, a: f64, n_ring: usize) -> Result<Self> {
        Self::new(Variant::IsingRingCentral { j, h, a }, n_ring)
    }

    pub fn no_zeeman(h: f64, a: f64, n_ring: usize) -> Result<Self> {
        Self::new(Variant::CollectiveNoZeeman { h, a }, n_ring)
    }

    pub fn zzxx(h: f64, a: f64, n_ring: usize) -> Result<Self> {
        Self::new(Variant::Zzxx { h, a }, n_ring)
    }

    pub fn xxz(h: f64, a: f64, delta: f64, n_ring: usize) -> Result<Self> {
        Self::new(
            Variant::XxzCollective {
                h,
                a,
                delta,
                field_axis: FieldAxis::Y,
            },
            n_ring,
        )
    }

    pub fn inhomogeneous(h: f64, couplings: Vec<f64>) -> Result<Self> {
        let n = couplings.len();
        Self::new(Variant::InhomogeneousZz { h, couplings }, n)
    }

    pub fn variant(&self) -> &Variant {
        &self.variant
    }

    pub fn n_ring(&self) -> usize {
        self.n_ring
    }

    pub fn name(&self) -> &'static str {
        match self.variant {
            Variant::IsingRingCentral { .. } => "ising_ring_central",
            Variant::CollectiveNoZeeman { .. } => "collective_no_zeeman",
            Variant::Zzxx { .. } => "zzxx",
            Variant::XxzCollective { .. } => "xxz_collective",
            Variant::InhomogeneousZz { .. } => "inhomogeneous_zz",
        }
    }

    /// The estimated field `h`.
    pub fn field(&self) -> f64 {
        match self.variant {
            Variant::IsingRingCentral { h, .. }
            | Variant::CollectiveNoZeeman { h, .. }
            | Variant::Zzxx { h, .. }
            | Variant::XxzCollective { h, .. }
            | Variant::InhomogeneousZz { h, .. } => h,
        }
    }

    /// Copy with the field replaced.
    pub fn with_field(&self, new_h: f64) -> Self {
        let mut out = self.clone();
        match &mut out.variant {
            Variant::IsingRingCentral { h, .. }
            | Variant::CollectiveNoZeeman { h, .. }
            | Variant::Zzxx { h, .. }
            | Variant::XxzCollective { h, .. }
            | Variant::InhomogeneousZz { h, .. } => *h = new_h,
        }
        out
    }

    /// Hyperfine coupling `A`, or the mean of `A_k` for inhomogeneous rings.
    pub fn mean_coupling(&self) -> f64 {
        match &self.variant {
            Variant::IsingRingCentral { a, .. }
            | Variant::CollectiveNoZeeman { a, .. }
            | Variant::Zzxx { a, .. }
            | Variant::XxzCollective { a, .. } => *a,
            Variant::InhomogeneousZz { couplings, .. } => {
                couplings.iter().sum::<f64>() / couplings.len() as f64
            }
        }
    }

    /// Whether the variant is built purely from collective operators.
    pub fn is_collective(&self) -> bool {
        matches!(
            self.variant,
            Variant::CollectiveNoZeeman { .. } | Variant::Zzxx { .. } | Variant::XxzCollective { .. }
        )
    }

    /// The basis used when none is requested: the collective sector where allowed.
    pub fn natural_space(&self) -> Result<HilbertSpace> {
        if self.is_collective() {
            HilbertSpace::collective(self.n_ring)
        } else {
            HilbertSpace::full_product(self.n_ring)
        }
    }

    fn check_space(&self, space: HilbertSpace) -> Result<()> {
        if space.n_ring() != self.n_ring {
            return Err(Error::domain(format!(
                "model has N={} but space has N={}",
                self.n_ring,
                space.n_ring()
            )));
        }
        if space.kind() == BasisKind::CollectiveSector && !self.is_collective() {
            return Err(Error::basis(format!(
                "{} cannot be represented in the collective sector",
                self.name()
            )));
        }
        Ok(())
    }
}

fn re(x: f64) -> C64 {
    C64::new(x, 0.0)
}

pub fn build_hamiltonian(spec: &ModelSpec, space: HilbertSpace) -> Result<HermitianOperator> {
    spec.check_space(space)?;
    let mut sum = TermSum::new(space);
    match &spec.variant {
        Variant::IsingRingCentral { j, h, a } => {
            let n = spec.n_ring;
            if *j != 0.0 {
                for i in 1..=n {
                    let next = if i == n { 1 } else { i + 1 };
                    sum.site_pair(re(-j), (i, Axis::X), (next, Axis::X));
                }
            }
            sum.ring(re(-h), Axis::Y);
            sum.central_ring(re(*a), Axis::Z, Axis::Z);
        }
        Variant::CollectiveNoZeeman { h, a } => {
            sum.ring(re(-h), Axis::Y);
            sum.central_ring(re(*a), Axis::Z, Axis::Z);
        }
        Variant::Zzxx { h, a } => {
            sum.central(re(-h), Axis::Y);
            sum.ring(re(-h), Axis::Y);
            sum.central_ring(re(*a), Axis::Z, Axis::Z);
        }
        Variant::XxzCollective {
            h,
            a,
            delta,
            field_axis,
        } => {
            sum.central(re(-h), field_axis.axis());
            sum.ring(re(-h), field_axis.axis());
            sum.central_ring(re(delta / 2.0), Axis::Plus, Axis::Minus);
            sum.central_ring(re(delta / 2.0), Axis::Minus, Axis::Plus);
            sum.central_ring(re(*a), Axis::Z, Axis::Z);
        }
        Variant::InhomogeneousZz { h, couplings } => {
            sum.ring(re(-h), Axis::Y);
            for (k, &ak) in couplings.iter().enumerate() {
                sum.site_pair(re(ak), (0, Axis::Z), (k + 1, Axis::Z));
            }
        }
    }
    sum.assemble(true)
}

/// `H_1 = dH/dh`, independent of `h`.
pub fn field_derivative(spec: &ModelSpec, space: HilbertSpace) -> Result<HermitianOperator> {
    spec.check_space(space)?;
    let mut sum = TermSum::new(space);
    match &spec.variant {
        Variant::IsingRingCentral { .. }
        | Variant::CollectiveNoZeeman { .. }
        | Variant::InhomogeneousZz { .. } => sum.ring(re(-1.0), Axis::Y),
        Variant::Zzxx { .. } => {
            sum.central(re(-1.0), Axis::Y);
            sum.ring(re(-1.0), Axis::Y);
        }
        Variant::XxzCollective { field_axis, .. } => {
            sum.central(re(-1.0), field_axis.axis());
            sum.ring(re(-1.0), field_axis.axis());
        }
    }
    sum.assemble(true)
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum ProfileKind {
    Constant,
    /// `A_k = mean (1 + spread u_k)`, `u_k` uniform in `[-1, 1)`.
    UniformWindow { spread: f64 },
    /// `A_k` proportional to `exp(-x_k^2 / (2 (width N)^2))` with `x_k` on a
    /// jittered lattice of spacing 1 centred on the dot.
    GaussianEnvelope { width: f64 },
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CouplingProfile {
    pub kind: ProfileKind,
    pub seed: u64,
}

impl CouplingProfile {
    pub fn constant() -> Self {
        Self {
            kind: ProfileKind::Constant,
            seed: 0,
        }
    }

    /// The default inhomogeneous profile: Gaussian envelope of width `N / 2`.
    pub fn default_gaussian(seed: u64) -> Self {
        Self {
            kind: ProfileKind::GaussianEnvelope { width: 0.5 },
            seed,
        }
    }
}

/// Draws `n` strictly positive couplings whose arithmetic mean is `mean`.
pub fn sample_couplings(profile: &CouplingProfile, n: usize, mean: f64) -> Result<Vec<f64>> {
    if !(mean > 0.0 && mean.is_finite()) {
        return Err(Error::domain(format!("mean coupling must be positive, got {mean}")));
    }
    if n == 0 {
        return Err(Error::domain("need at least one coupling"));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(profile.seed);
    let raw: Vec<f64> = match profile.kind {
        ProfileKind::Constant => vec![mean; n],
        ProfileKind::UniformWindow { spread } => {
            if !(0.0..1.0).contains(&spread) {
                return Err(Error::domain(format!(
                    "uniform spread {spread} must lie in [0, 1) to keep couplings positive"
                )));
            }
            (0..n)
                .map(|_| mean * (1.0 + spread * rng.random_range(-1.0..1.0)))
                .collect()
        }
        ProfileKind::GaussianEnvelope { width } => {
            if !(width > 0.0 && width.is_finite()) {
                return Err(Error::domain(format!("envelope width {width} must be positive")));
            }
            let sigma = width * n as f64;
            let half = n as f64 / 2.0;
            (0..n)
                .map(|k| {
                    let x = k as f64 + rng.random::<f64>() - half;
                    (-x * x / (2.0 * sigma * sigma)).exp()
                })
                .collect()
        }
    };
    if raw.iter().any(|&a| !(a > 0.0 && a.is_finite())) {
        return Err(Error::domain("profile produced a non-positive coupling"));
    }
    let avg = raw.iter().sum::<f64>() / n as f64;
    let out: Vec<f64> = raw.iter().map(|a| a * (mean / avg)).collect();
    if out.iter().any(|&a| a <= 0.0) {
        return Err(Error::domain("profile produced a non-positive coupling"));
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::operator::{collective_op, Party};
    use nalgebra::DMatrix;

    fn max_diff(a: &DMatrix<C64>, b: &DMatrix<C64>) -> f64 {
        (a - b).iter().map(|v| v.norm()).fold(0.0, f64::max)
    }

    fn eigenvalues(m: &DMatrix<C64>) -> Vec<f64> {
        let mut e: Vec<f64> = m.clone().symmetric_eigenvalues().iter().copied().collect();
        e.sort_by(|a, b| a.partial_cmp(b).unwrap());
        e
    }

    #[test]
    fn no_zeeman_single_spin_spectrum() {
        let spec = ModelSpec::no_zeeman(1.0, 1.0, 1).unwrap();
        for space in [
            HilbertSpace::full_product(1).unwrap(),
            HilbertSpace::collective(1).unwrap(),
        ] {
            let h = build_hamiltonian(&spec, space).unwrap();
            let e = eigenvalues(&h.to_dense());
            let omega = 1.25f64.sqrt() / 2.0;
            let target = [-omega, -omega, omega, omega];
            for (a, b) in e.iter().zip(target) {
                assert!((a - b).abs() < 1e-14, "{e:?}");
            }
            assert!((omega - 0.5590170).abs() < 1e-7);
        }
    }

    #[test]
    fn ising_j0_equals_no_zeeman() {
        let space = HilbertSpace::full_product(4).unwrap();
        let a = build_hamiltonian(&ModelSpec::ising_ring(0.0, 0.7, 1.3, 4).unwrap(), space).unwrap();
        let b = build_hamiltonian(&ModelSpec::no_zeeman(0.7, 1.3, 4).unwrap(), space).unwrap();
        assert_eq!(a.to_dense(), b.to_dense());
    }

    #[test]
    fn inhomogeneous_with_equal_couplings_equals_ising_j0() {
        let space = HilbertSpace::full_product(5).unwrap();
        let a = build_hamiltonian(&ModelSpec::inhomogeneous(0.4, vec![1.1; 5]).unwrap(), space).unwrap();
        let b = build_hamiltonian(&ModelSpec::ising_ring(0.0, 0.4, 1.1, 5).unwrap(), space).unwrap();
        assert!(max_diff(&a.to_dense(), &b.to_dense()) < 1e-15);
    }

    #[test]
    fn isotropic_xxz_commutes_with_total_field_operator() {
        for space in [
            HilbertSpace::collective(5).unwrap(),
            HilbertSpace::full_product(4).unwrap(),
        ] {
            let n = space.n_ring();
            let spec = ModelSpec::xxz(1.0, 1.0, 1.0, n).unwrap();
            let h = build_hamiltonian(&spec, space).unwrap();
            let h1 = field_derivative(&spec, space).unwrap();
            let comm = h1.commutator(&h).unwrap();
            assert!(comm.max_abs() < 1e-13);
        }
        // anisotropy breaks it
        let space = HilbertSpace::collective(3).unwrap();
        let spec = ModelSpec::xxz(1.0, 1.0, 0.2, 3).unwrap();
        let h = build_hamiltonian(&spec, space).unwrap();
        let h1 = field_derivative(&spec, space).unwrap();
        assert!(h1.commutator(&h).unwrap().max_abs() > 1e-3);
    }

    #[test]
    fn xxz_without_transverse_term_is_zzxx() {
        let space = HilbertSpace::collective(4).unwrap();
        let a = build_hamiltonian(&ModelSpec::xxz(0.8, 1.0, 0.0, 4).unwrap(), space).unwrap();
        let b = build_hamiltonian(&ModelSpec::zzxx(0.8, 1.0, 4).unwrap(), space).unwrap();
        assert!(max_diff(&a.to_dense(), &b.to_dense()) < 1e-15);
    }

    #[test]
    fn field_derivative_forms() {
        let space = HilbertSpace::collective(3).unwrap();
        let h1 = field_derivative(&ModelSpec::no_zeeman(2.0, 1.0, 3).unwrap(), space).unwrap();
        let iy = collective_op(space, Axis::Y, Party::Ring).unwrap();
        assert_eq!(h1.to_dense(), -iy.to_dense());

        let fp = HilbertSpace::full_product(1).unwrap();
        let h1 = field_derivative(&ModelSpec::zzxx(1.0, 1.0, 1).unwrap(), fp).unwrap();
        let m = h1.to_dense();
        assert!(m.trace().norm() < 1e-15);
        let e = eigenvalues(&m);
        for (a, b) in e.iter().zip([-1.0, 0.0, 0.0, 1.0]) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn field_derivative_matches_finite_difference() {
        let specs = [
            ModelSpec::ising_ring(0.3, 0.9, 1.0, 3).unwrap(),
            ModelSpec::zzxx(0.9, 1.0, 3).unwrap(),
            ModelSpec::xxz(0.9, 1.0, 0.4, 3).unwrap(),
            ModelSpec::inhomogeneous(0.9, vec![0.5, 1.0, 1.5]).unwrap(),
        ];
        let d = 1e-4;
        for spec in specs {
            let space = HilbertSpace::full_product(3).unwrap();
            let hp = build_hamiltonian(&spec.with_field(0.9 + d), space).unwrap().to_dense();
            let hm = build_hamiltonian(&spec.with_field(0.9 - d), space).unwrap().to_dense();
            let fd = (hp - hm) / C64::new(2.0 * d, 0.0);
            let h1 = field_derivative(&spec, space).unwrap().to_dense();
            assert!(max_diff(&fd, &h1) < 1e-9, "{}", spec.name());
        }
    }

    #[test]
    fn collective_models_commute_with_ring_casimir() {
        let space = HilbertSpace::full_product(4).unwrap();
        let casimir = {
            let parts: Vec<HermitianOperator> = [Axis::X, Axis::Y, Axis::Z]
                .iter()
                .map(|&a| {
                    let i = collective_op(space, a, Party::Ring).unwrap();
                    i.compose(&i).unwrap()
                })
                .collect();
            HermitianOperator::linear_combination(&[
                (C64::new(1.0, 0.0), &parts[0]),
                (C64::new(1.0, 0.0), &parts[1]),
                (C64::new(1.0, 0.0), &parts[2]),
            ])
            .unwrap()
        };
        for spec in [
            ModelSpec::no_zeeman(1.0, 1.0, 4).unwrap(),
            ModelSpec::zzxx(1.0, 1.0, 4).unwrap(),
            ModelSpec::xxz(1.0, 1.0, 0.3, 4).unwrap(),
        ] {
            let h = build_hamiltonian(&spec, space).unwrap();
            assert!(casimir.commutator(&h).unwrap().max_abs() < 1e-13);
        }
        let ising = build_hamiltonian(&ModelSpec::ising_ring(0.5, 1.0, 1.0, 4).unwrap(), space).unwrap();
        assert!(casimir.commutator(&ising).unwrap().max_abs() > 1e-3);
    }

    #[test]
    fn space_compatibility() {
        let coll = HilbertSpace::collective(3).unwrap();
        let ising = ModelSpec::ising_ring(0.1, 1.0, 1.0, 3).unwrap();
        assert!(matches!(build_hamiltonian(&ising, coll), Err(Error::UnsupportedBasis(_))));
        let inh = ModelSpec::inhomogeneous(1.0, vec![1.0; 3]).unwrap();
        assert!(matches!(field_derivative(&inh, coll), Err(Error::UnsupportedBasis(_))));
        let wrong_n = HilbertSpace::collective(4).unwrap();
        let zz = ModelSpec::zzxx(1.0, 1.0, 3).unwrap();
        assert!(matches!(build_hamiltonian(&zz, wrong_n), Err(Error::Domain(_))));
    }

    #[test]
    fn spec_validation() {
        assert!(ModelSpec::ising_ring(0.1, 1.0, 1.0, 1).is_err());
        assert!(ModelSpec::ising_ring(0.0, 1.0, 1.0, 1).is_ok());
        assert!(ModelSpec::new(Variant::InhomogeneousZz { h: 1.0, couplings: vec![1.0; 2] }, 3).is_err());
        assert!(ModelSpec::inhomogeneous(1.0, vec![1.0, f64::NAN]).is_err());
    }

    #[test]
    fn coupling_profiles() {
        assert_eq!(
            sample_couplings(&CouplingProfile::constant(), 4, 1.0).unwrap(),
            vec![1.0; 4]
        );
        let g = CouplingProfile::default_gaussian(7);
        let a = sample_couplings(&g, 16, 1.0).unwrap();
        let mean = a.iter().sum::<f64>() / 16.0;
        assert!((mean - 1.0).abs() < 1e-15);
        assert!(a.iter().all(|&x| x > 0.0));
        assert_eq!(a, sample_couplings(&g, 16, 1.0).unwrap());
        let other = sample_couplings(&CouplingProfile::default_gaussian(8), 16, 1.0).unwrap();
        assert_ne!(a, other);

        let u = CouplingProfile {
            kind: ProfileKind::UniformWindow { spread: 0.5 },
            seed: 3,
        };
        let b = sample_couplings(&u, 10, 2.0).unwrap();
        assert!((b.iter().sum::<f64>() / 10.0 - 2.0).abs() < 1e-14);

        let bad = CouplingProfile {
            kind: ProfileKind::UniformWindow { spread: 1.5 },
            seed: 0,
        };
        assert!(matches!(sample_couplings(&bad, 4, 1.0), Err(Error::Domain(_))));
        assert!(sample_couplings(&CouplingProfile::constant(), 4, -1.0).is_err());
    }
}
