use std::time::Instant;

use rayon::prelude::*;
use serde::Serialize;

use crate::dynamics::{EigenSystem, Propagator};
use crate::error::{Error, Result};
use crate::metrology::{
    default_step, local_qfi_no_zeeman, qfi_from_generator, qfi_no_zeeman, sql_reference, sx_trajectory_no_zeeman,
    FieldStencil, RingPolarization, StencilStates,
};
use crate::models::{build_hamiltonian, field_derivative};
use crate::space::BasisKind;
use crate::state::{probe_state, StateVector};

use super::config::{MethodKind, Point, RunConfig, SweepAxis};
use super::curve::{CurveRow, QfiCurve, RowValue};

/// Numerical context recorded for every sweep point.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PointMeta {
    pub sweep_value: f64,
    pub t: f64,
    pub n_ring: usize,
    pub basis: BasisKind,
    pub dim: usize,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub propagator: Option<&'static str>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub spectral_bounds: Option<[f64; 2]>,
    /// Chebyshev orders of the five stencil propagators for this point's step.
    #[serde(skip_serializing_if = "Option::is_none")]
    pub chebyshev_orders: Option<Vec<usize>>,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub couplings: Option<Vec<f64>>,
}

#[derive(Debug, Clone)]
pub struct RunOutcome {
    pub config: RunConfig,
    pub curve: QfiCurve,
    pub points: Vec<PointMeta>,
    /// Errors recorded in rows, in row order.
    pub failures: Vec<Error>,
    pub elapsed_ms: f64,
}

impl RunOutcome {
    /// Exit code of the first in-row failure, or 0.
    pub fn exit_code(&self) -> i32 {
        self.failures.first().map_or(0, Error::exit_code)
    }
}

/// Per-curve inputs shared by all points.
struct Context<'a> {
    cfg: &'a RunConfig,
    ring: Option<RingPolarization>,
}

impl Context<'_> {
    fn ring(&self) -> Result<RingPolarization> {
        self.ring
            .ok_or_else(|| Error::domain("closed forms need a ring_x_polarized or ring_z_stretched probe"))
    }

    fn closed_form(&self, method: MethodKind, p: &Point) -> Result<f64> {
        let (a, h, n, t) = (p.spec.mean_coupling(), p.spec.field(), p.spec.n_ring(), p.t);
        match method {
            MethodKind::Analytic => qfi_no_zeeman(a, h, n, t, self.ring()?),
            MethodKind::LocalAnalytic => local_qfi_no_zeeman(a, h, n, t, self.ring()?),
            MethodKind::SxAnalytic => Ok(sx_trajectory_no_zeeman(a, h, n, t, self.ring()?)?.0),
            MethodKind::Sql => Ok(sql_reference(n, t)),
            _ => Err(Error::Internal(format!("{method} is not a closed form"))),
        }
    }

    fn stencil(&self, p: &Point) -> Result<FieldStencil> {
        let h = p.spec.field();
        let step = self.cfg.fd_step.unwrap_or_else(|| default_step(h));
        FieldStencil::new(&p.spec, p.space, h, step, self.cfg.propagation.method())
    }

    fn probe(&self, p: &Point) -> Result<StateVector> {
        probe_state(p.space, self.cfg.probe.clone())
    }

    fn needs_stencil(&self) -> bool {
        self.cfg.methods.iter().any(|m| m.needs_stencil())
    }

    fn from_stencil(method: MethodKind, states: &StencilStates) -> Result<f64> {
        match method {
            MethodKind::FdState => Ok(states.global_qfi()?.value),
            MethodKind::LocalBloch => Ok(states.local_qfi()?.value),
            MethodKind::Epf => Ok(states.inverse_epf()?.value),
            MethodKind::SxExpectation => states.central_sx(),
            _ => Err(Error::Internal(format!("{method} does not use the stencil"))),
        }
    }
}

fn base_meta(p: &Point) -> PointMeta {
    let couplings = match p.spec.variant() {
        crate::models::Variant::InhomogeneousZz { couplings, .. } => Some(couplings.clone()),
        _ => None,
    };
    PointMeta {
        sweep_value: p.sweep_value,
        t: p.t,
        n_ring: p.spec.n_ring(),
        basis: p.space.kind(),
        dim: p.space.dim(),
        propagator: None,
        spectral_bounds: None,
        chebyshev_orders: None,
        couplings,
    }
}

fn describe(meta: &mut PointMeta, stencil: &FieldStencil, step_t: f64) {
    let center = stencil.center();
    meta.propagator = Some(match center {
        Propagator::Eigen(_) => "eigen",
        Propagator::Chebyshev(_) => "chebyshev",
    });
    meta.spectral_bounds = center.bounds().map(|b| [b.e_min, b.e_max]);
    if matches!(center, Propagator::Chebyshev(_)) {
        meta.chebyshev_orders = stencil.chebyshev_orders(step_t).ok();
    }
}

struct Timer {
    record: bool,
    start: Instant,
}

impl Timer {
    fn start(record: bool) -> Self {
        Self {
            record,
            start: Instant::now(),
        }
    }

    fn ms(&self) -> f64 {
        if self.record {
            (self.start.elapsed().as_secs_f64() * 1e6).round() / 1e3
        } else {
            0.0
        }
    }
}

type PointResult = (Vec<(CurveRow, Option<Error>)>, PointMeta);

fn row(p: &Point, method: MethodKind, value: Result<f64>, wall_ms: f64) -> (CurveRow, Option<Error>) {
    let (value, err) = match value {
        Ok(v) => (RowValue::Number(v), None),
        Err(e) => (RowValue::Error(e.kind().to_string()), Some(e)),
    };
    (
        CurveRow {
            sweep_value: p.sweep_value,
            method,
            value,
            wall_ms,
        },
        err,
    )
}

fn generator_qfi(p: &Point, probe: &Result<StateVector>) -> Result<f64> {
    let ham = build_hamiltonian(&p.spec, p.space)?;
    let h1 = field_derivative(&p.spec, p.space)?;
    let g = EigenSystem::new(&ham)?.generator(&h1, p.t)?;
    qfi_from_generator(&g, probe.as_ref().map_err(Clone::clone)?)
}

fn eval_point(ctx: &Context, p: &Point) -> PointResult {
    let record = ctx.cfg.record_wall_time;
    let mut meta = base_meta(p);
    let probe = ctx.probe(p);
    let stencil_timer = Timer::start(record);
    let states: Option<Result<StencilStates>> = ctx.needs_stencil().then(|| {
        let stencil = ctx.stencil(p)?;
        describe(&mut meta, &stencil, p.t);
        stencil.states(probe.as_ref().map_err(Clone::clone)?, p.t)
    });
    let shared_ms = stencil_timer.ms();
    let rows = ctx
        .cfg
        .methods
        .iter()
        .map(|&m| {
            let timer = Timer::start(record);
            let value = if m.needs_stencil() {
                match &states {
                    Some(Ok(s)) => Context::from_stencil(m, s),
                    Some(Err(e)) => Err(e.clone()),
                    None => Err(Error::Internal("stencil missing".into())),
                }
            } else if m == MethodKind::GeneratorExact {
                generator_qfi(p, &probe)
            } else {
                ctx.closed_form(m, p)
            };
            let extra = if m.needs_stencil() { shared_ms } else { 0.0 };
            row(p, m, value, timer.ms() + extra)
        })
        .collect();
    (rows, meta)
}

/// A `t` sweep: one model, states streamed through ascending times.
fn eval_time_sweep(ctx: &Context, points: &[Point]) -> Vec<PointResult> {
    let record = ctx.cfg.record_wall_time;
    let first = &points[0];
    let mut order: Vec<usize> = (0..points.len()).collect();
    order.sort_by(|&a, &b| points[a].t.total_cmp(&points[b].t));
    let times: Vec<f64> = order.iter().map(|&i| points[i].t).collect();

    let probe = ctx.probe(first);
    let methods = &ctx.cfg.methods;
    // values of the stencil methods, computed while streaming so states are not kept
    let mut stencil_values: Vec<Vec<Result<f64>>> = vec![Vec::new(); points.len()];
    let mut metas: Vec<PointMeta> = points.iter().map(base_meta).collect();
    let mut stencil_ms = vec![0.0; points.len()];
    if ctx.needs_stencil() {
        let built = ctx.stencil(first).and_then(|s| Ok((s, probe.clone()?)));
        let mut done = 0;
        let failure = match built {
            Ok((stencil, psi)) => {
                let mut prev_t = 0.0;
                let mut timer = Timer::start(record);
                stencil
                    .for_each_time(&psi, &times, |states| {
                        let idx = order[done];
                        describe(&mut metas[idx], &stencil, states.t - prev_t);
                        prev_t = states.t;
                        stencil_values[idx] = methods
                            .iter()
                            .filter(|m| m.needs_stencil())
                            .map(|&m| Context::from_stencil(m, states))
                            .collect();
                        stencil_ms[idx] = timer.ms();
                        done += 1;
                        timer = Timer::start(record);
                        Ok(())
                    })
                    .err()
            }
            Err(e) => Some(e),
        };
        if let Some(e) = failure {
            let count = methods.iter().filter(|m| m.needs_stencil()).count();
            for &idx in &order[done..] {
                stencil_values[idx] = vec![Err(e.clone()); count];
            }
        }
    }

    let eigen = ctx
        .cfg
        .methods
        .contains(&MethodKind::GeneratorExact)
        .then(|| -> Result<(EigenSystem, crate::operator::HermitianOperator)> {
            let ham = build_hamiltonian(&first.spec, first.space)?;
            Ok((EigenSystem::new(&ham)?, field_derivative(&first.spec, first.space)?))
        });

    points
        .iter()
        .zip(metas)
        .enumerate()
        .map(|(i, (p, meta))| {
            let mut from_stencil = stencil_values[i].iter().cloned();
            let rows = methods
                .iter()
                .map(|&m| {
                    let timer = Timer::start(record);
                    let value = if m.needs_stencil() {
                        from_stencil
                            .next()
                            .unwrap_or_else(|| Err(Error::Internal("stencil value missing".into())))
                    } else if m == MethodKind::GeneratorExact {
                        match &eigen {
                            Some(Ok((es, h1))) => es
                                .generator(h1, p.t)
                                .and_then(|g| qfi_from_generator(&g, probe.as_ref().map_err(Clone::clone)?)),
                            Some(Err(e)) => Err(e.clone()),
                            None => Err(Error::Internal("eigensystem missing".into())),
                        }
                    } else {
                        ctx.closed_form(m, p)
                    };
                    let extra = if m.needs_stencil() { stencil_ms[i] } else { 0.0 };
                    row(p, m, value, timer.ms() + extra)
                })
                .collect();
            (rows, meta)
        })
        .collect()
}

/// Runs every sweep point of `cfg`. Point failures become in-row error
/// markers; only configuration and capacity problems abort the run.
pub fn run_config(cfg: &RunConfig) -> Result<RunOutcome> {
    cfg.validate()?;
    let start = Instant::now();
    let points = (0..cfg.sweep.values.len())
        .map(|i| cfg.point(i))
        .collect::<Result<Vec<_>>>()?;
    let ctx = Context {
        cfg,
        ring: cfg.ring_polarization(),
    };
    let results: Vec<PointResult> = if cfg.sweep.axis == SweepAxis::T {
        eval_time_sweep(&ctx, &points)
    } else {
        let pool = rayon::ThreadPoolBuilder::new()
            .num_threads(cfg.threads)
            .build()
            .map_err(|e| Error::Internal(format!("thread pool: {e}")))?;
        pool.install(|| points.par_iter().map(|p| eval_point(&ctx, p)).collect())
    };
    let mut curve = QfiCurve::new(cfg.sweep.axis);
    let mut metas = Vec::with_capacity(results.len());
    let mut failures = Vec::new();
    for (rows, meta) in results {
        for (r, e) in rows {
            curve.rows.push(r);
            failures.extend(e);
        }
        metas.push(meta);
    }
    Ok(RunOutcome {
        config: cfg.clone(),
        curve,
        points: metas,
        failures,
        elapsed_ms: start.elapsed().as_secs_f64() * 1e3,
    })
}
