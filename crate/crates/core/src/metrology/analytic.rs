//! Closed-form results for the collective model without central Zeeman term,
//! `H = -h I_y + A S_z I_z`.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::operator::C64;
use crate::state::BlochVector;

/// Coefficients of `G = alpha I_y + beta S_z I_z + gamma S_z I_x`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct GeneratorCoeffs {
    pub alpha: f64,
    pub beta: f64,
    pub gamma: f64,
    pub omega: f64,
    pub t: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum SensingKind {
    /// `pi / Omega`, where the central-spin readout is optimal.
    LocalEpf,
    /// `2 pi / Omega`, where the generator loses its `S_z I_x` part.
    GlobalQfi,
}

/// Precession frequency `Omega = sqrt(A^2/4 + h^2)`.
pub fn precession_frequency(a: f64, h: f64) -> Result<f64> {
    let omega = (a * a / 4.0 + h * h).sqrt();
    if !(omega > 0.0 && omega.is_finite()) {
        return Err(Error::domain("precession frequency vanishes (A = h = 0)"));
    }
    Ok(omega)
}

pub fn sensing_time(a: f64, h: f64, kind: SensingKind) -> Result<f64> {
    let omega = precession_frequency(a, h)?;
    Ok(match kind {
        SensingKind::LocalEpf => PI / omega,
        SensingKind::GlobalQfi => 2.0 * PI / omega,
    })
}

/// `sin x - x` without cancellation near zero.
fn sin_minus_x(x: f64) -> f64 {
    if x.abs() < 1e-2 {
        let x2 = x * x;
        -x * x2 / 6.0 * (1.0 - x2 / 20.0 * (1.0 - x2 / 42.0 * (1.0 - x2 / 72.0)))
    } else {
        x.sin() - x
    }
}

pub fn generator_coeffs_analytic(a: f64, h: f64, t: f64) -> Result<GeneratorCoeffs> {
    let omega = precession_frequency(a, h)?;
    let x = omega * t;
    let o3 = omega * omega * omega;
    let s = sin_minus_x(x);
    // cos x - 1 = -2 sin^2(x/2)
    let c = -2.0 * (0.5 * x).sin().powi(2);
    Ok(GeneratorCoeffs {
        alpha: -t - a * a / 4.0 * s / o3,
        beta: -a * h * s / o3,
        gamma: a * c / (omega * omega),
        omega,
        t,
    })
}

/// Dynamic QFI of the stretched probe at any `t`:
/// `4 Var(G) = 2 alpha^2 I + beta^2 I^2 + gamma^2 I / 2`.
pub fn qfi_stretched_probe(a: f64, h: f64, n_ring: usize, t: f64) -> Result<f64> {
    let c = generator_coeffs_analytic(a, h, t)?;
    let spin = n_ring as f64 / 2.0;
    Ok(2.0 * c.alpha * c.alpha * spin + c.beta * c.beta * spin * spin + c.gamma * c.gamma * spin / 2.0)
}

/// `F = 2 alpha0^2 I + beta0^2 I^2` at `t0 = 2 pi / Omega`, using
/// `alpha0 = -2 pi h^2 / Omega^3` and `beta0 = 2 pi A h / Omega^3`.
pub fn qfi_analytic_t0(a: f64, h: f64, n_ring: usize) -> f64 {
    if h == 0.0 {
        return 0.0;
    }
    let omega = (a * a / 4.0 + h * h).sqrt();
    let o3 = omega * omega * omega;
    let alpha0 = -2.0 * PI * h * h / o3;
    let beta0 = 2.0 * PI * a * h / o3;
    let spin = n_ring as f64 / 2.0;
    2.0 * alpha0 * alpha0 * spin + beta0 * beta0 * spin * spin
}

/// Local (central-spin) QFI at `t = pi / Omega`: `16 A^2 N^2 / (A^2 + 4 h^2)^2`.
pub fn local_qfi_analytic(a: f64, h: f64, n_ring: usize) -> Result<f64> {
    let d = a * a + 4.0 * h * h;
    if d == 0.0 {
        return Err(Error::domain("local QFI undefined for A = h = 0"));
    }
    let n = n_ring as f64;
    Ok(16.0 * a * a * n * n / (d * d))
}

/// `(<s_0^x>, <s_0^y>) = (cos(2 N theta), sin(2 N theta)) / 2` at
/// `t = pi / Omega` with `theta = arctan(2h / A)`, for the x-polarized probe.
///
/// Direct propagation gives these values times `(-1)^N`; the magnitude and
/// the local QFI derived from it are unaffected.
pub fn sx_expectation_analytic(a: f64, h: f64, n_ring: usize) -> Result<(f64, f64)> {
    if a == 0.0 {
        return Err(Error::domain("closed form requires A != 0"));
    }
    let theta = (2.0 * h / a).atan();
    let phase = 2.0 * n_ring as f64 * theta;
    Ok((0.5 * phase.cos(), 0.5 * phase.sin()))
}

/// Direction of the ring spins in a symmetric product probe.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RingPolarization {
    X,
    Z,
}

type Spinor = [C64; 2];
type Mat2 = [[C64; 2]; 2];

fn mat_mul(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = [[C64::new(0.0, 0.0); 2]; 2];
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][0] * b[0][j] + a[i][1] * b[1][j];
        }
    }
    out
}

fn dagger(a: &Mat2) -> Mat2 {
    [[a[0][0].conj(), a[1][0].conj()], [a[0][1].conj(), a[1][1].conj()]]
}

fn sandwich(psi: &Spinor, m: &Mat2) -> C64 {
    let mut acc = C64::new(0.0, 0.0);
    for i in 0..2 {
        for j in 0..2 {
            acc += psi[i].conj() * m[i][j] * psi[j];
        }
    }
    acc
}

/// `c - i s (n . sigma)` for a real `n = (0, ny, nz)`.
fn rotation(c: f64, s: f64, ny: f64, nz: f64) -> Mat2 {
    let i = C64::new(0.0, 1.0);
    let z = C64::new(0.0, 0.0);
    // n . sigma = [[nz, -i ny], [i ny, -nz]]
    let ns = [[C64::new(nz, 0.0), -i * ny], [i * ny, C64::new(-nz, 0.0)]];
    let mut out = [[z; 2]; 2];
    for r in 0..2 {
        for k in 0..2 {
            let id = if r == k { c } else { 0.0 };
            out[r][k] = C64::new(id, 0.0) - i * s * ns[r][k];
        }
    }
    out
}

/// Single ring-spin overlap `<psi| U_up^dag U_down |psi>` and its `h` derivative,
/// where the ring spin sees `-h s^y +- (A/2) s^z` for central spin up/down.
fn ring_overlap(a: f64, h: f64, t: f64, ring: RingPolarization) -> Result<(C64, C64)> {
    let omega = precession_frequency(a, h)?;
    let r = std::f64::consts::FRAC_1_SQRT_2;
    let psi: Spinor = match ring {
        RingPolarization::X => [C64::new(r, 0.0), C64::new(r, 0.0)],
        RingPolarization::Z => [C64::new(1.0, 0.0), C64::new(0.0, 0.0)],
    };
    let (s, c) = (0.5 * omega * t).sin_cos();
    let d_omega = h / omega;
    let dc = -0.5 * t * s * d_omega;
    let ds = 0.5 * t * c * d_omega;
    let o3 = omega * omega * omega;
    let ny = -h / omega;
    let dny = -1.0 / omega + h * h / o3;
    let u = |sign: f64| {
        let nz = sign * 0.5 * a / omega;
        let dnz = -sign * 0.5 * a * h / o3;
        let m = rotation(c, s, ny, nz);
        // d/dh of c - i s n.sigma, assembled from the pieces
        let part_c = rotation(dc, 0.0, 0.0, 0.0);
        let part_s = rotation(0.0, ds, ny, nz);
        let part_n = rotation(0.0, s, dny, dnz);
        let mut dm = [[C64::new(0.0, 0.0); 2]; 2];
        for i in 0..2 {
            for j in 0..2 {
                dm[i][j] = part_c[i][j] + part_s[i][j] + part_n[i][j];
            }
        }
        (m, dm)
    };
    let (up, d_up) = u(1.0);
    let (down, d_down) = u(-1.0);
    let f = sandwich(&psi, &mat_mul(&dagger(&up), &down));
    let df = sandwich(&psi, &mat_mul(&dagger(&d_up), &down)) + sandwich(&psi, &mat_mul(&dagger(&up), &d_down));
    Ok((f, df))
}

/// Central-spin `(<s_0^x>, <s_0^y>)` at any `t` for a probe with the central
/// spin along +x and every ring spin along `ring`.
///
/// Each ring spin evolves under `-h s^y +- (A/2) s^z` depending on the central
/// spin, so the coherence is the `N`-th power of a single-spin overlap.
pub fn sx_trajectory_no_zeeman(a: f64, h: f64, n_ring: usize, t: f64, ring: RingPolarization) -> Result<(f64, f64)> {
    let (f, _) = ring_overlap(a, h, t, ring)?;
    let z = f.powu(n_ring as u32);
    Ok((0.5 * z.re, 0.5 * z.im))
}

/// Local QFI of the central spin at any `t`, from the Bloch vector
/// `(Re f^N, Im f^N, 0)` and its exact `h` derivative.
pub fn local_qfi_no_zeeman(a: f64, h: f64, n_ring: usize, t: f64, ring: RingPolarization) -> Result<f64> {
    let (f, df) = ring_overlap(a, h, t, ring)?;
    let n = n_ring as u32;
    let big = f.powu(n);
    let d_big = if n == 0 { C64::new(0.0, 0.0) } else { f.powu(n - 1) * df * n as f64 };
    super::local_qubit_qfi(
        BlochVector::new(big.re, big.im, 0.0),
        BlochVector::new(d_big.re, d_big.im, 0.0),
    )
}

/// Global QFI at any `t`: `4 Var(G)` of the closed-form generator in the probe.
///
/// Stretched ring: `alpha^2 N + beta^2 N^2 / 4 + gamma^2 N / 4`.
/// X-polarized ring: `alpha^2 N + beta^2 N / 4 + gamma^2 N^2 / 4`.
pub fn qfi_no_zeeman(a: f64, h: f64, n_ring: usize, t: f64, ring: RingPolarization) -> Result<f64> {
    let c = generator_coeffs_analytic(a, h, t)?;
    let n = n_ring as f64;
    let (a2, b2, g2) = (c.alpha * c.alpha, c.beta * c.beta, c.gamma * c.gamma);
    Ok(match ring {
        RingPolarization::Z => a2 * n + b2 * n * n / 4.0 + g2 * n / 4.0,
        RingPolarization::X => a2 * n + b2 * n / 4.0 + g2 * n * n / 4.0,
    })
}

/// Standard-quantum-limit reference `t^2 (N + 1)`.
pub fn sql_reference(n_ring: usize, t: f64) -> f64 {
    t * t * (n_ring as f64 + 1.0)
}
