use centralspin::metrology::*;
use centralspin::models::{build_hamiltonian, field_derivative, FieldAxis, ModelSpec, Variant};
use centralspin::operator::{collective_op, Axis, HermitianOperator, Party};
use centralspin::state::{probe_state, ProbeKind};
use centralspin::{HilbertSpace, C64};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn collective_models(n: usize) -> Vec<ModelSpec> {
    vec![
        ModelSpec::no_zeeman(1.0, 1.0, n).unwrap(),
        ModelSpec::zzxx(1.0, 1.0, n).unwrap(),
        ModelSpec::xxz(1.0, 1.0, 0.3, n).unwrap(),
        ModelSpec::new(
            Variant::XxzCollective {
                h: 1.0,
                a: 1.0,
                delta: 0.2,
                field_axis: FieldAxis::Z,
            },
            n,
        )
        .unwrap(),
    ]
}

#[test]
fn fd_and_generator_agree_for_collective_models() {
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    for n in [2usize, 4, 6] {
        let space = HilbertSpace::collective(n).unwrap();
        let probe = probe_state(space, ProbeKind::RingZStretched).unwrap();
        for base in collective_models(n) {
            for _ in 0..5 {
                let h = rng.random_range(0.2..2.0);
                let t = rng.random_range(0.1..8.0);
                let spec = base.with_field(h);
                let ham = build_hamiltonian(&spec, space).unwrap();
                let h1 = field_derivative(&spec, space).unwrap();
                let exact = qfi_from_generator(&generator_exact(&ham, &h1, t).unwrap(), &probe).unwrap();
                let fd = qfi_pure_fd(&spec, space, &probe, t, h, default_step(h), None).unwrap();
                let rel = (fd.value - exact).abs() / exact.max(1.0);
                assert!(rel < 1e-5, "{} N={n} h={h} t={t}: {} vs {exact}", spec.name(), fd.value);
            }
        }
    }
}

#[test]
fn zero_time_has_no_information() {
    let spec = ModelSpec::zzxx(1.0, 1.0, 4).unwrap();
    let space = HilbertSpace::collective(4).unwrap();
    let probe = probe_state(space, ProbeKind::RingZStretched).unwrap();
    let fd = qfi_pure_fd(&spec, space, &probe, 0.0, 1.0, default_step(1.0), None).unwrap();
    assert!(fd.value.abs() < 1e-12, "{}", fd.value);
}

#[test]
fn generator_short_time_limit_and_symmetry() {
    let spec = ModelSpec::no_zeeman(1.0, 1.0, 5).unwrap();
    let space = HilbertSpace::collective(5).unwrap();
    let ham = build_hamiltonian(&spec, space).unwrap();
    let h1 = field_derivative(&spec, space).unwrap();
    let t = 1e-6;
    let g = generator_exact(&ham, &h1, t).unwrap();
    let diff = HermitianOperator::linear_combination(&[(C64::new(1.0, 0.0), &g), (C64::new(-t, 0.0), &h1)]).unwrap();
    assert!(diff.frobenius_norm() / (t * h1.frobenius_norm()) < 1e-5);

    let sz = collective_op(space, Axis::Z, Party::Central).unwrap();
    let g = generator_exact(&ham, &h1, 3.7).unwrap();
    assert!(g.commutator(&sz).unwrap().max_abs() < 1e-10);
    // probe mean of the generator vanishes at t0
    let t0 = sensing_time(1.0, 1.0, SensingKind::GlobalQfi).unwrap();
    let g0 = generator_exact(&ham, &h1, t0).unwrap();
    let probe = probe_state(space, ProbeKind::RingZStretched).unwrap();
    assert!(centralspin::operator::expectation(&g0, &probe).unwrap().abs() < 1e-10);
}

#[test]
fn matched_coupling_gives_standard_limit() {
    for n in [2usize, 4, 6] {
        let spec = ModelSpec::xxz(1.0, 1.0, 1.0, n).unwrap();
        let space = HilbertSpace::collective(n).unwrap();
        let probe = probe_state(space, ProbeKind::RingZStretched).unwrap();
        let ham = build_hamiltonian(&spec, space).unwrap();
        let h1 = field_derivative(&spec, space).unwrap();
        for t in [0.5, 1.0, 3.0, 5.0] {
            let f = qfi_from_generator(&generator_exact(&ham, &h1, t).unwrap(), &probe).unwrap();
            let per_t2 = f / (t * t);
            assert!((per_t2 - (n as f64 + 1.0)).abs() < 1e-8 * (n as f64 + 1.0), "N={n} t={t}: {per_t2}");
        }
    }
}

#[test]
fn z_field_generator_is_linear_in_time() {
    let spec = ModelSpec::new(
        Variant::XxzCollective {
            h: 0.8,
            a: 1.0,
            delta: 0.4,
            field_axis: FieldAxis::Z,
        },
        5,
    )
    .unwrap();
    let space = HilbertSpace::collective(5).unwrap();
    let ham = build_hamiltonian(&spec, space).unwrap();
    let h1 = field_derivative(&spec, space).unwrap();
    let total_z = HermitianOperator::linear_combination(&[
        (C64::new(1.0, 0.0), &collective_op(space, Axis::Z, Party::Central).unwrap()),
        (C64::new(1.0, 0.0), &collective_op(space, Axis::Z, Party::Ring).unwrap()),
    ])
    .unwrap();
    for t in [0.3, 2.5] {
        let g = generator_exact(&ham, &h1, t).unwrap();
        // the field derivative is -(S_z + I_z)
        let diff = HermitianOperator::linear_combination(&[(C64::new(1.0, 0.0), &g), (C64::new(t, 0.0), &total_z)]).unwrap();
        assert!(diff.max_abs() < 1e-10);
    }
}

#[test]
fn sensitivity_ordering_chain() {
    for n in [2usize, 4, 6] {
        let spec = ModelSpec::ising_ring(0.0, 1.0, 1.0, n).unwrap();
        let space = HilbertSpace::full_product(n).unwrap();
        let probe = probe_state(space, ProbeKind::RingXPolarized).unwrap();
        let t = sensing_time(1.0, 1.0, SensingKind::LocalEpf).unwrap();
        let states = FieldStencil::new(&spec, space, 1.0, default_step(1.0), None)
            .unwrap()
            .states(&probe, t)
            .unwrap();
        let epf = states.inverse_epf().unwrap().value;
        let local = states.local_qfi().unwrap().value;
        let global = states.global_qfi().unwrap().value;
        let (fmax, _) = fmax_and_optimal_probe(&generator_coeffs_analytic(1.0, 1.0, t).unwrap(), n).unwrap();
        assert!(epf <= local + 1e-6 && local <= global + 1e-6 && global <= fmax + 1e-6, "N={n}: {epf} {local} {global} {fmax}");
    }
}
