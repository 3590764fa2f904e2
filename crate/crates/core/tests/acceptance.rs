//! End-to-end acceptance criteria. Each prints one PASS/FAIL line.

use std::time::{Duration, Instant};

use centralspin::dynamics::{evolve, Propagation};
use centralspin::experiments::{fit_scaling, FitForm, FitReport};
use centralspin::metrology::*;
use centralspin::models::{build_hamiltonian, field_derivative, sample_couplings, CouplingProfile, ModelSpec};
use centralspin::state::{probe_state, ProbeKind};
use centralspin::HilbertSpace;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

type Outcome = Result<String, String>;
type Criterion = (&'static str, fn() -> Outcome);

fn check(ok: bool, detail: String) -> Outcome {
    if ok {
        Ok(detail)
    } else {
        Err(detail)
    }
}

fn err(e: centralspin::Error) -> String {
    e.to_string()
}

fn rel(x: f64, y: f64) -> f64 {
    (x - y).abs() / y.abs()
}

fn within(elapsed: Duration, limit_s: u64, detail: String) -> Outcome {
    check(
        elapsed <= Duration::from_secs(limit_s),
        format!("{detail}, {:.2}s (limit {limit_s}s)", elapsed.as_secs_f64()),
    )
}

fn local_closed_form() -> Outcome {
    let start = Instant::now();
    let t = sensing_time(1.0, 1.0, SensingKind::LocalEpf).map_err(err)?;
    let mut worst = 0.0f64;
    for n in [2usize, 4, 6, 8, 10] {
        let spec = ModelSpec::ising_ring(0.0, 1.0, 1.0, n).map_err(err)?;
        let space = HilbertSpace::full_product(n).map_err(err)?;
        let probe = probe_state(space, ProbeKind::RingXPolarized).map_err(err)?;
        let f = local_qfi_fd(&spec, space, &probe, t, 1.0, default_step(1.0), None).map_err(err)?;
        let expected = 16.0 * (n * n) as f64 / 25.0;
        worst = worst.max(rel(f.value, expected));
    }
    if worst >= 1e-5 {
        return Err(format!("worst relative error {worst:.2e}"));
    }
    within(start.elapsed(), 30, format!("worst relative error {worst:.2e}"))
}

fn global_closed_form() -> Outcome {
    let start = Instant::now();
    let t = sensing_time(1.0, 1.0, SensingKind::GlobalQfi).map_err(err)?;
    let mut worst = 0.0f64;
    let mut values = Vec::new();
    for n in [2usize, 10, 40] {
        let spec = ModelSpec::no_zeeman(1.0, 1.0, n).map_err(err)?;
        let space = HilbertSpace::collective(n).map_err(err)?;
        let probe = probe_state(space, ProbeKind::RingZStretched).map_err(err)?;
        let f = qfi_pure_fd(&spec, space, &probe, t, 1.0, default_step(1.0), None).map_err(err)?;
        worst = worst.max(rel(f.value, qfi_analytic_t0(1.0, 1.0, n)));
        values.push(f.value);
    }
    // quoted reference values, rounded
    let quoted = rel(values[1], 707.45) < 1e-4 && rel(values[2], 8893.8) < 1e-4;
    if worst >= 1e-4 || !quoted {
        return Err(format!("worst relative error {worst:.2e}, F(10)={} F(40)={}", values[1], values[2]));
    }
    within(
        start.elapsed(),
        10,
        format!("worst relative error {worst:.2e}, F(10)={:.3} F(40)={:.3}", values[1], values[2]),
    )
}

fn generator_exactness() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let (mut coeff, mut resid) = (0.0f64, 0.0f64);
    for n in 1..=6usize {
        let space = HilbertSpace::collective(n).map_err(err)?;
        for _ in 0..5 {
            let h = rng.random_range(0.2..2.0);
            let t = rng.random_range(0.1..10.0);
            let spec = ModelSpec::no_zeeman(h, 1.0, n).map_err(err)?;
            let ham = build_hamiltonian(&spec, space).map_err(err)?;
            let h1 = field_derivative(&spec, space).map_err(err)?;
            let p = project_generator(&generator_exact(&ham, &h1, t).map_err(err)?).map_err(err)?;
            let c = generator_coeffs_analytic(1.0, h, t).map_err(err)?;
            coeff = coeff
                .max((p.alpha - c.alpha).abs())
                .max((p.beta - c.beta).abs())
                .max((p.gamma - c.gamma).abs());
            resid = resid.max(p.residual);
        }
    }
    check(
        coeff < 1e-10 && resid < 1e-10,
        format!("max coefficient error {coeff:.2e}, max residual {resid:.2e}"),
    )
}

fn fmax_consistency() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 4, 6] {
        let space = HilbertSpace::collective(n).map_err(err)?;
        let spec = ModelSpec::no_zeeman(1.0, 1.0, n).map_err(err)?;
        let ham = build_hamiltonian(&spec, space).map_err(err)?;
        let h1 = field_derivative(&spec, space).map_err(err)?;
        for t in [1.3, sensing_time(1.0, 1.0, SensingKind::GlobalQfi).map_err(err)?] {
            let c = generator_coeffs_analytic(1.0, 1.0, t).map_err(err)?;
            let (fmax, probe) = fmax_and_optimal_probe(&c, n).map_err(err)?;
            let g = generator_exact(&ham, &h1, t).map_err(err)?;
            let f = qfi_from_generator(&g, &probe.state(space).map_err(err)?).map_err(err)?;
            worst = worst.max(rel(f, fmax));
        }
    }
    check(worst < 1e-8, format!("worst relative error {worst:.2e}"))
}

fn ordering_chain() -> Outcome {
    let t = sensing_time(1.0, 1.0, SensingKind::LocalEpf).map_err(err)?;
    let mut lines = Vec::new();
    let mut ok = true;
    for n in [2usize, 4, 6] {
        let spec = ModelSpec::ising_ring(0.0, 1.0, 1.0, n).map_err(err)?;
        let space = HilbertSpace::full_product(n).map_err(err)?;
        let probe = probe_state(space, ProbeKind::RingXPolarized).map_err(err)?;
        let states = FieldStencil::new(&spec, space, 1.0, default_step(1.0), None)
            .map_err(err)?
            .states(&probe, t)
            .map_err(err)?;
        let e = states.inverse_epf().map_err(err)?.value;
        let local = states.local_qfi().map_err(err)?.value;
        let global = states.global_qfi().map_err(err)?.value;
        let (fmax, _) = fmax_and_optimal_probe(&generator_coeffs_analytic(1.0, 1.0, t).map_err(err)?, n).map_err(err)?;
        ok &= e <= local + 1e-6 && local <= global + 1e-6 && global <= fmax + 1e-6;
        lines.push(format!("N={n}: {e:.4} <= {local:.4} <= {global:.4} <= {fmax:.4}"));
    }
    check(ok, lines.join("; "))
}

fn sql_no_go() -> Outcome {
    let mut worst = 0.0f64;
    for n in [2usize, 4, 8] {
        let spec = ModelSpec::xxz(1.0, 1.0, 1.0, n).map_err(err)?;
        let space = HilbertSpace::collective(n).map_err(err)?;
        let probe = probe_state(space, ProbeKind::RingZStretched).map_err(err)?;
        for t in [1.0, 5.0] {
            let f = qfi_pure_fd(&spec, space, &probe, t, 1.0, default_step(1.0), None).map_err(err)?;
            worst = worst.max(rel(f.value, t * t * (n as f64 + 1.0)));
        }
    }
    check(worst < 1e-6, format!("worst relative error {worst:.2e}"))
}

fn propagator_differential() -> Outcome {
    let start = Instant::now();
    let couplings = sample_couplings(&CouplingProfile::default_gaussian(11), 10, 1.0).map_err(err)?;
    let spec = ModelSpec::inhomogeneous(1.0, couplings).map_err(err)?;
    let space = HilbertSpace::full_product(10).map_err(err)?;
    let ham = build_hamiltonian(&spec, space).map_err(err)?;
    let psi0 = probe_state(space, ProbeKind::RingXPolarized).map_err(err)?;
    let exact = evolve(&ham, &psi0, Propagation::eigen(10.0)).map_err(err)?;
    let cheb = evolve(&ham, &psi0, Propagation::chebyshev(10.0, 1e-12)).map_err(err)?;
    let d = exact.distance(&cheb).map_err(err)?;
    if d >= 1e-10 {
        return Err(format!("state distance {d:.2e}"));
    }
    within(start.elapsed(), 20, format!("state distance {d:.2e}"))
}

fn zzxx_convergence() -> Outcome {
    let t0 = sensing_time(1.0, 1.0, SensingKind::GlobalQfi).map_err(err)?;
    let times: Vec<f64> = (0..=200).map(|k| t0 * k as f64 / 200.0).collect();
    let mut devs = Vec::new();
    for n in [8usize, 40] {
        let spec = ModelSpec::zzxx(1.0, 1.0, n).map_err(err)?;
        let space = HilbertSpace::collective(n).map_err(err)?;
        let probe = probe_state(space, ProbeKind::RingZStretched).map_err(err)?;
        let stencil = FieldStencil::new(&spec, space, 1.0, default_step(1.0), None).map_err(err)?;
        let mut worst = 0.0f64;
        let mut failure = None;
        stencil
            .for_each_time(&probe, &times, |states| {
                let sim = states.central_sx()?;
                let closed = sx_trajectory_no_zeeman(1.0, 1.0, n, states.t, RingPolarization::Z)?.0;
                worst = worst.max((sim - closed).abs());
                Ok(())
            })
            .unwrap_or_else(|e| failure = Some(e));
        if let Some(e) = failure {
            return Err(err(e));
        }
        devs.push(worst);
    }
    check(
        devs[1] < devs[0] / 2.0,
        format!("max deviation N=8 {:.4}, N=40 {:.4}", devs[0], devs[1]),
    )
}

fn heisenberg_fit() -> Outcome {
    let ns: Vec<f64> = (8..=64).map(|n| n as f64).collect();
    let fs: Vec<f64> = ns.iter().map(|&n| qfi_analytic_t0(1.0, 1.0, n as usize)).collect();
    let t0 = sensing_time(1.0, 1.0, SensingKind::GlobalQfi).map_err(err)?;
    let c = generator_coeffs_analytic(1.0, 1.0, t0).map_err(err)?;
    let (a_true, b_true) = (c.alpha * c.alpha, c.beta * c.beta / 4.0);
    let (a, b) = match fit_scaling(&ns, &fs, FitForm::LinearPlusQuadratic).map_err(err)? {
        FitReport::LinearPlusQuadratic { a, b, .. } => (a, b),
        other => return Err(format!("unexpected report {other:?}")),
    };
    let locals: Vec<f64> = ns
        .iter()
        .map(|&n| local_qfi_analytic(1.0, 1.0, n as usize))
        .collect::<centralspin::Result<_>>()
        .map_err(err)?;
    let slope = match fit_scaling(&ns, &locals, FitForm::PowerLaw).map_err(err)? {
        FitReport::PowerLaw { slope, .. } => slope,
        other => return Err(format!("unexpected report {other:?}")),
    };
    let (ea, eb) = (rel(a, a_true), rel(b, b_true));
    check(
        ea < 1e-8 && eb < 1e-8 && (slope - 2.0).abs() < 1e-6,
        format!("a rel err {ea:.2e}, b rel err {eb:.2e}, slope {slope:.9}"),
    )
}

fn inhomogeneity_robustness() -> Outcome {
    let start = Instant::now();
    let n = 12;
    let t0 = sensing_time(1.0, 1.0, SensingKind::GlobalQfi).map_err(err)?;
    let couplings = sample_couplings(&CouplingProfile::default_gaussian(20_200_601), n, 1.0).map_err(err)?;
    let spec = ModelSpec::inhomogeneous(1.0, couplings).map_err(err)?;
    let space = HilbertSpace::full_product(n).map_err(err)?;
    let probe = probe_state(space, ProbeKind::RingZStretched).map_err(err)?;
    let f = qfi_pure_fd(&spec, space, &probe, t0, 1.0, default_step(1.0), None).map_err(err)?;
    let homogeneous = qfi_analytic_t0(1.0, 1.0, n);
    let r = rel(f.value, homogeneous);
    if r >= 0.15 {
        return Err(format!("F={:.3} vs homogeneous {homogeneous:.3}, deviation {r:.3}", f.value));
    }
    within(
        start.elapsed(),
        300,
        format!("F={:.3} vs homogeneous {homogeneous:.3}, deviation {:.2}%", f.value, 100.0 * r),
    )
}

fn main() {
    let criteria: [Criterion; 10] = [
        ("1 local QFI closed form", local_closed_form),
        ("2 global QFI closed form", global_closed_form),
        ("3 generator exactness", generator_exactness),
        ("4 F_max consistency", fmax_consistency),
        ("5 ordering chain", ordering_chain),
        ("6 SQL no-go", sql_no_go),
        ("7 propagator differential", propagator_differential),
        ("8 ZZXX convergence", zzxx_convergence),
        ("9 scaling fits", heisenberg_fit),
        ("10 inhomogeneity robustness", inhomogeneity_robustness),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        match run() {
            Ok(detail) => println!("PASS {name}: {detail}"),
            Err(detail) => {
                println!("FAIL {name}: {detail}");
                failed.push(name);
            }
        }
    }
    println!("acceptance: {} passed, {} failed", 10 - failed.len(), failed.len());
    if !failed.is_empty() {
        std::process::exit(1);
    }
}
