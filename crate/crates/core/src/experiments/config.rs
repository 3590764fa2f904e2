use std::fmt;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use crate::dynamics::{Method, DEFAULT_CHEBYSHEV_TOL};
use crate::error::{Error, Result};
use crate::metrology::{RingPolarization, SensingKind};
use crate::models::{sample_couplings, CouplingProfile, FieldAxis, ModelSpec, ProfileKind, Variant};
use crate::space::{BasisKind, HilbertSpace};
use crate::state::ProbeKind;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ModelKind {
    IsingRingCentral,
    CollectiveNoZeeman,
    Zzxx,
    XxzCollective,
    InhomogeneousZz,
}

fn one() -> f64 {
    1.0
}

fn default_threads() -> usize {
    1
}

fn default_name() -> String {
    "run".to_string()
}

fn default_tol() -> f64 {
    DEFAULT_CHEBYSHEV_TOL
}

/// Model parameters before the sweep is applied.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModelConfig {
    pub variant: ModelKind,
    pub n_ring: usize,
    /// Hyperfine coupling, or the mean coupling for inhomogeneous rings.
    #[serde(default = "one")]
    pub a: f64,
    #[serde(default = "one")]
    pub h: f64,
    #[serde(default)]
    pub j: f64,
    #[serde(default)]
    pub delta: f64,
    #[serde(default)]
    pub field_axis: FieldAxis,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub profile: Option<ProfileKind>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum BasisChoice {
    #[default]
    Auto,
    FullProduct,
    CollectiveSector,
}

/// Evolution time of every point not on a `t` sweep.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case", deny_unknown_fields)]
pub enum TimeRule {
    Fixed {
        value: f64,
    },
    /// `pi / Omega` or `2 pi / Omega`; `a` and `h` default to the point's own values.
    Sensing {
        rule: SensingKind,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        a: Option<f64>,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        h: Option<f64>,
    },
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum SweepAxis {
    #[serde(rename = "N")]
    N,
    #[serde(rename = "J")]
    J,
    #[serde(rename = "h")]
    H,
    #[serde(rename = "delta")]
    Delta,
    #[serde(rename = "t")]
    T,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::N => "N",
            SweepAxis::J => "J",
            SweepAxis::H => "h",
            SweepAxis::Delta => "delta",
            SweepAxis::T => "t",
        }
    }
}

impl fmt::Display for SweepAxis {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for SweepAxis {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        Ok(match s {
            "N" => SweepAxis::N,
            "J" => SweepAxis::J,
            "h" => SweepAxis::H,
            "delta" => SweepAxis::Delta,
            "t" => SweepAxis::T,
            other => return Err(Error::domain(format!("unknown sweep axis `{other}`"))),
        })
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct Sweep {
    pub axis: SweepAxis,
    pub values: Vec<f64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum MethodKind {
    /// Global QFI from finite differences of the evolved state.
    FdState,
    /// Global QFI as `4 Var(G)` with the exact generator.
    GeneratorExact,
    /// Global QFI of the no-Zeeman closed form.
    Analytic,
    /// Central-spin QFI of the no-Zeeman closed form.
    LocalAnalytic,
    /// Central-spin QFI from finite differences of the Bloch vector.
    LocalBloch,
    /// Squared inverse error-propagation sensitivity of `s_0^x`.
    Epf,
    /// Simulated `<s_0^x>`.
    SxExpectation,
    /// `<s_0^x>` of the no-Zeeman closed form.
    SxAnalytic,
    /// `t^2 (N + 1)`.
    Sql,
}

impl MethodKind {
    pub const ALL: [MethodKind; 9] = [
        MethodKind::FdState,
        MethodKind::GeneratorExact,
        MethodKind::Analytic,
        MethodKind::LocalAnalytic,
        MethodKind::LocalBloch,
        MethodKind::Epf,
        MethodKind::SxExpectation,
        MethodKind::SxAnalytic,
        MethodKind::Sql,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            MethodKind::FdState => "fd_state",
            MethodKind::GeneratorExact => "generator_exact",
            MethodKind::Analytic => "analytic",
            MethodKind::LocalAnalytic => "local_analytic",
            MethodKind::LocalBloch => "local_bloch",
            MethodKind::Epf => "epf",
            MethodKind::SxExpectation => "sx_expectation",
            MethodKind::SxAnalytic => "sx_analytic",
            MethodKind::Sql => "sql",
        }
    }

    /// Whether the method evolves states on the finite-difference stencil.
    pub fn needs_stencil(self) -> bool {
        matches!(
            self,
            MethodKind::FdState | MethodKind::LocalBloch | MethodKind::Epf | MethodKind::SxExpectation
        )
    }

    fn needs_ring_polarization(self) -> bool {
        matches!(self, MethodKind::Analytic | MethodKind::LocalAnalytic | MethodKind::SxAnalytic)
    }
}

impl fmt::Display for MethodKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for MethodKind {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        MethodKind::ALL
            .into_iter()
            .find(|m| m.as_str() == s)
            .ok_or_else(|| Error::domain(format!("unknown method `{s}`")))
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
#[serde(tag = "method", rename_all = "snake_case", deny_unknown_fields)]
pub enum PropagationChoice {
    #[default]
    Auto,
    Eigen,
    Chebyshev {
        #[serde(default = "default_tol")]
        tol: f64,
    },
}

impl PropagationChoice {
    pub fn method(self) -> Option<Method> {
        match self {
            PropagationChoice::Auto => None,
            PropagationChoice::Eigen => Some(Method::Eigen),
            PropagationChoice::Chebyshev { tol } => Some(Method::Chebyshev { tol }),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    #[serde(default = "default_name")]
    pub name: String,
    pub model: ModelConfig,
    #[serde(default)]
    pub basis: BasisChoice,
    pub probe: ProbeKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub time: Option<TimeRule>,
    pub sweep: Sweep,
    pub methods: Vec<MethodKind>,
    #[serde(default)]
    pub propagation: PropagationChoice,
    /// Finite-difference step in `h`; defaults to `1e-4 max(1, |h|)`.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub fd_step: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub output_dir: Option<PathBuf>,
    #[serde(default)]
    pub seed: u64,
    #[serde(default = "default_threads")]
    pub threads: usize,
    /// Write measured times to the `wall_ms` column instead of zeros.
    #[serde(default)]
    pub record_wall_time: bool,
}

/// A fully resolved sweep point.
#[derive(Debug, Clone, PartialEq)]
pub struct Point {
    pub sweep_value: f64,
    pub spec: ModelSpec,
    pub space: HilbertSpace,
    pub t: f64,
}

fn cfg_err(path: &str, message: impl Into<String>) -> Error {
    Error::config(path, message)
}

impl RunConfig {
    /// Parses and validates a JSON document; unknown keys are rejected with their path.
    pub fn from_json(text: &str) -> Result<Self> {
        let de = &mut serde_json::Deserializer::from_str(text);
        let cfg: RunConfig = serde_path_to_error::deserialize(de).map_err(|e| {
            let path = e.path().to_string();
            cfg_err(&path, e.into_inner().to_string())
        })?;
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("config serializes")
    }

    pub fn ring_polarization(&self) -> Option<RingPolarization> {
        match self.probe {
            ProbeKind::RingXPolarized => Some(RingPolarization::X),
            ProbeKind::RingZStretched => Some(RingPolarization::Z),
            ProbeKind::Custom(_) => None,
        }
    }

    pub fn validate(&self) -> Result<()> {
        let m = &self.model;
        if self.sweep.values.is_empty() {
            return Err(cfg_err("sweep.values", "must not be empty"));
        }
        if let Some(i) = self.sweep.values.iter().position(|v| !v.is_finite()) {
            return Err(cfg_err(&format!("sweep.values[{i}]"), "must be finite"));
        }
        if self.methods.is_empty() {
            return Err(cfg_err("methods", "must not be empty"));
        }
        for (i, a) in self.methods.iter().enumerate() {
            if self.methods[..i].contains(a) {
                return Err(cfg_err(&format!("methods[{i}]"), format!("duplicate method `{a}`")));
            }
            if a.needs_ring_polarization() && self.ring_polarization().is_none() {
                return Err(cfg_err(
                    &format!("methods[{i}]"),
                    format!("`{a}` needs the ring_x_polarized or ring_z_stretched probe"),
                ));
            }
        }
        if self.threads == 0 {
            return Err(cfg_err("threads", "must be at least 1"));
        }
        if let Some(step) = self.fd_step {
            if !(step > 0.0 && step.is_finite()) {
                return Err(cfg_err("fd_step", "must be positive"));
            }
        }
        if let PropagationChoice::Chebyshev { tol } = self.propagation {
            if !(tol > 0.0 && tol <= 1e-6) {
                return Err(cfg_err("propagation.tol", "must lie in (0, 1e-6]"));
            }
        }
        match (self.sweep.axis, self.time) {
            (SweepAxis::T, Some(_)) => return Err(cfg_err("time", "must be omitted for a t sweep")),
            (SweepAxis::T, None) => {}
            (_, None) => return Err(cfg_err("time", "required unless sweeping t")),
            (_, Some(TimeRule::Fixed { value })) if !(value >= 0.0 && value.is_finite()) => {
                return Err(cfg_err("time.value", "must be finite and non-negative"))
            }
            _ => {}
        }
        let axis_ok = match self.sweep.axis {
            SweepAxis::J => m.variant == ModelKind::IsingRingCentral,
            SweepAxis::Delta => m.variant == ModelKind::XxzCollective,
            SweepAxis::N => m.couplings.is_none(),
            SweepAxis::H => true,
            SweepAxis::T => self.sweep.values.iter().all(|t| *t >= 0.0),
        };
        if !axis_ok {
            return Err(cfg_err(
                "sweep.axis",
                format!("cannot sweep {} for {:?} with this configuration", self.sweep.axis, m.variant),
            ));
        }
        if self.sweep.axis == SweepAxis::N {
            if let Some(i) = self
                .sweep
                .values
                .iter()
                .position(|v| *v < 1.0 || v.fract() != 0.0)
            {
                return Err(cfg_err(&format!("sweep.values[{i}]"), "N must be a positive integer"));
            }
        }
        if m.j != 0.0 && m.variant != ModelKind::IsingRingCentral {
            return Err(cfg_err("model.j", "only the Ising ring model has a ring coupling"));
        }
        if m.delta != 0.0 && m.variant != ModelKind::XxzCollective {
            return Err(cfg_err("model.delta", "only the XXZ model has an anisotropy"));
        }
        if m.field_axis != FieldAxis::Y && m.variant != ModelKind::XxzCollective {
            return Err(cfg_err("model.field_axis", "only the XXZ model accepts a z field"));
        }
        if m.variant != ModelKind::InhomogeneousZz && (m.couplings.is_some() || m.profile.is_some()) {
            return Err(cfg_err("model", "couplings and profile apply to inhomogeneous_zz only"));
        }
        if m.couplings.is_some() && m.profile.is_some() {
            return Err(cfg_err("model.profile", "give either couplings or profile"));
        }
        if self.basis == BasisChoice::CollectiveSector && !matches!(self.probe, ProbeKind::Custom(_)) {
            let collective = matches!(
                m.variant,
                ModelKind::CollectiveNoZeeman | ModelKind::Zzxx | ModelKind::XxzCollective
            );
            if !collective {
                return Err(cfg_err("basis", format!("{:?} needs the full product basis", m.variant)));
            }
        }
        // every point must at least build
        for i in 0..self.sweep.values.len() {
            self.point(i).map_err(|e| match e {
                Error::Capacity { .. } | Error::Config { .. } => e,
                other => cfg_err(&format!("sweep.values[{i}]"), other.to_string()),
            })?;
        }
        Ok(())
    }

    fn spec_for(&self, n: usize, j: f64, h: f64, delta: f64) -> Result<ModelSpec> {
        let m = &self.model;
        let variant = match m.variant {
            ModelKind::IsingRingCentral => Variant::IsingRingCentral { j, h, a: m.a },
            ModelKind::CollectiveNoZeeman => Variant::CollectiveNoZeeman { h, a: m.a },
            ModelKind::Zzxx => Variant::Zzxx { h, a: m.a },
            ModelKind::XxzCollective => Variant::XxzCollective {
                h,
                a: m.a,
                delta,
                field_axis: m.field_axis,
            },
            ModelKind::InhomogeneousZz => {
                let couplings = match (&m.couplings, m.profile) {
                    (Some(c), _) => c.clone(),
                    (None, kind) => sample_couplings(
                        &CouplingProfile {
                            kind: kind.unwrap_or(ProfileKind::Constant),
                            seed: self.seed,
                        },
                        n,
                        m.a,
                    )?,
                };
                Variant::InhomogeneousZz { h, couplings }
            }
        };
        ModelSpec::new(variant, n)
    }

    /// Resolves sweep point `index` into a model, basis and evolution time.
    pub fn point(&self, index: usize) -> Result<Point> {
        let m = &self.model;
        let v = self.sweep.values[index];
        let (mut n, mut j, mut h, mut delta) = (m.n_ring, m.j, m.h, m.delta);
        match self.sweep.axis {
            SweepAxis::N => n = v as usize,
            SweepAxis::J => j = v,
            SweepAxis::H => h = v,
            SweepAxis::Delta => delta = v,
            SweepAxis::T => {}
        }
        let spec = self.spec_for(n, j, h, delta)?;
        let kind = match self.basis {
            BasisChoice::FullProduct => BasisKind::FullProduct,
            BasisChoice::CollectiveSector => BasisKind::CollectiveSector,
            BasisChoice::Auto => {
                if spec.is_collective() && !matches!(self.probe, ProbeKind::Custom(_)) {
                    BasisKind::CollectiveSector
                } else {
                    BasisKind::FullProduct
                }
            }
        };
        let space = HilbertSpace::new(kind, n)?;
        let dense_only = self.methods.contains(&MethodKind::GeneratorExact)
            || self.propagation == PropagationChoice::Eigen;
        if dense_only && !space.fits_dense() {
            return Err(Error::Capacity {
                what: format!("dense eigendecomposition at N={n} in {kind:?}"),
                limit: crate::space::DENSE_DIM_LIMIT,
                requested: space.dim(),
            });
        }
        let t = match (self.sweep.axis, self.time) {
            (SweepAxis::T, _) => v,
            (_, Some(TimeRule::Fixed { value })) => value,
            (_, Some(TimeRule::Sensing { rule, a, h: h_ref })) => crate::metrology::sensing_time(
                a.unwrap_or_else(|| spec.mean_coupling()),
                h_ref.unwrap_or(h),
                rule,
            )
            .map_err(|e| cfg_err("time", e.to_string()))?,
            (_, None) => return Err(cfg_err("time", "required unless sweeping t")),
        };
        Ok(Point {
            sweep_value: v,
            spec,
            space,
            t,
        })
    }
}
