//! Built-in scenarios. N ranges are chosen for desk-scale runtime.

use crate::dynamics::DEFAULT_CHEBYSHEV_TOL;
use crate::error::{Error, Result};
use crate::metrology::{sensing_time, SensingKind};
use crate::models::{FieldAxis, ProfileKind};
use crate::state::ProbeKind;

use super::config::{
    BasisChoice, MethodKind, ModelConfig, ModelKind, PropagationChoice, RunConfig, Sweep, SweepAxis, TimeRule,
};

pub const PRESETS: [&str; 5] = ["fig1a", "fig1b", "fig2", "fig3", "fig4"];

pub const RANGE_NOTE: &str =
    "figure N ranges are not given numerically in the source; preset ranges are chosen for desk-scale runtime";

const PRESET_SEED: u64 = 20_200_601;

fn model(variant: ModelKind, n_ring: usize) -> ModelConfig {
    ModelConfig {
        variant,
        n_ring,
        a: 1.0,
        h: 1.0,
        j: 0.0,
        delta: 0.0,
        field_axis: FieldAxis::Y,
        couplings: None,
        profile: None,
    }
}

fn base(name: String, model: ModelConfig, probe: ProbeKind, sweep: Sweep, methods: Vec<MethodKind>) -> RunConfig {
    RunConfig {
        name,
        model,
        basis: BasisChoice::Auto,
        probe,
        time: None,
        sweep,
        methods,
        propagation: PropagationChoice::Auto,
        fd_step: None,
        output_dir: None,
        seed: PRESET_SEED,
        threads: 1,
        record_wall_time: false,
    }
}

fn sensing(rule: SensingKind) -> Option<TimeRule> {
    Some(TimeRule::Sensing { rule, a: None, h: None })
}

fn range(lo: usize, hi: usize, step: usize) -> Vec<f64> {
    (lo..=hi).step_by(step).map(|n| n as f64).collect()
}

fn label(x: f64) -> String {
    format!("{x}").replace('.', "p")
}

/// `count` evenly spaced times on `[0, span]`.
fn times(span: f64, count: usize) -> Vec<f64> {
    (0..count).map(|k| span * k as f64 / (count - 1) as f64).collect()
}

fn fig1(local: bool) -> Vec<RunConfig> {
    [0.0, 0.1, 0.2]
        .into_iter()
        .map(|j| {
            let mut m = model(ModelKind::IsingRingCentral, 2);
            m.j = j;
            let (probe, rule, methods, tag) = if local {
                (
                    ProbeKind::RingXPolarized,
                    SensingKind::LocalEpf,
                    vec![MethodKind::LocalBloch, MethodKind::LocalAnalytic],
                    "fig1a",
                )
            } else {
                (
                    ProbeKind::RingZStretched,
                    SensingKind::GlobalQfi,
                    vec![MethodKind::FdState, MethodKind::Analytic],
                    "fig1b",
                )
            };
            let mut cfg = base(
                format!("{tag}_J{}", label(j)),
                m,
                probe,
                Sweep {
                    axis: SweepAxis::N,
                    values: range(2, 12, 1),
                },
                methods,
            );
            cfg.basis = BasisChoice::FullProduct;
            cfg.time = sensing(rule);
            cfg
        })
        .collect()
}

fn fig2() -> Result<Vec<RunConfig>> {
    let t0 = sensing_time(1.0, 1.0, SensingKind::GlobalQfi)?;
    let t_local = sensing_time(1.0, 1.0, SensingKind::LocalEpf)?;
    let mut out = Vec::new();
    for n in [8usize, 40] {
        let sweep_t = Sweep {
            axis: SweepAxis::T,
            values: times(1.2 * t0, 400),
        };
        out.push(base(
            format!("fig2_sx_N{n}"),
            model(ModelKind::Zzxx, n),
            ProbeKind::RingZStretched,
            sweep_t.clone(),
            vec![MethodKind::SxExpectation, MethodKind::SxAnalytic],
        ));
        out.push(base(
            format!("fig2_qfi_N{n}"),
            model(ModelKind::Zzxx, n),
            ProbeKind::RingZStretched,
            sweep_t,
            vec![MethodKind::FdState, MethodKind::Analytic],
        ));
        let mut local = base(
            format!("fig2_local_N{n}"),
            model(ModelKind::Zzxx, n),
            ProbeKind::RingXPolarized,
            Sweep {
                axis: SweepAxis::H,
                values: (1..=30).map(|k| 0.1 * k as f64).collect(),
            },
            vec![MethodKind::LocalBloch, MethodKind::LocalAnalytic],
        );
        local.time = Some(TimeRule::Fixed { value: t_local });
        out.push(local);
    }
    Ok(out)
}

fn fig3() -> Vec<RunConfig> {
    let mut out = Vec::new();
    for delta in [0.0, 0.1, 0.2] {
        let mut m = model(ModelKind::XxzCollective, 2);
        m.delta = delta;
        let sweep = Sweep {
            axis: SweepAxis::N,
            values: range(2, 40, 2),
        };
        let mut local = base(
            format!("fig3_local_delta{}", label(delta)),
            m.clone(),
            ProbeKind::RingXPolarized,
            sweep.clone(),
            vec![MethodKind::LocalBloch, MethodKind::LocalAnalytic, MethodKind::Sql],
        );
        local.time = sensing(SensingKind::LocalEpf);
        out.push(local);
        let mut global = base(
            format!("fig3_global_delta{}", label(delta)),
            m,
            ProbeKind::RingZStretched,
            sweep,
            vec![MethodKind::FdState, MethodKind::Analytic, MethodKind::Sql],
        );
        global.time = sensing(SensingKind::GlobalQfi);
        out.push(global);
    }
    out
}

fn fig4() -> Result<Vec<RunConfig>> {
    let t0 = sensing_time(1.0, 1.0, SensingKind::GlobalQfi)?;
    let mut m = model(ModelKind::InhomogeneousZz, 16);
    m.profile = Some(ProfileKind::GaussianEnvelope { width: 0.5 });
    let mut trajectory = base(
        "fig4_qfi_N16".into(),
        m.clone(),
        ProbeKind::RingZStretched,
        Sweep {
            axis: SweepAxis::T,
            values: times(1.2 * t0, 61),
        },
        vec![MethodKind::FdState, MethodKind::Analytic],
    );
    trajectory.propagation = PropagationChoice::Chebyshev {
        tol: DEFAULT_CHEBYSHEV_TOL,
    };
    let mut scaling = base(
        "fig4_qfi_vs_N".into(),
        m,
        ProbeKind::RingZStretched,
        Sweep {
            axis: SweepAxis::N,
            values: range(4, 16, 2),
        },
        vec![MethodKind::FdState, MethodKind::Analytic],
    );
    scaling.time = sensing(SensingKind::GlobalQfi);
    Ok(vec![trajectory, scaling])
}

/// Run configurations of a preset, one per output curve.
pub fn preset_configs(name: &str) -> Result<Vec<RunConfig>> {
    match name {
        "fig1a" => Ok(fig1(true)),
        "fig1b" => Ok(fig1(false)),
        "fig2" => fig2(),
        "fig3" => Ok(fig3()),
        "fig4" => fig4(),
        other => Err(Error::config(
            "preset",
            format!("unknown preset `{other}`; expected one of {}", PRESETS.join(", ")),
        )),
    }
}
