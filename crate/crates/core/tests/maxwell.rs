use dissem_core::dispersion::{permittivity_low_loss, DispersionParams};
use dissem_core::maxwell::{
    appendix_a_identity, snapshot_table, step_fields, step_potentials, total_energy, Boundary,
    FieldState1D, Grid1D, PotentialSnapshot, PotentialState1D,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use std::f64::consts::PI;

fn gaussian(n: usize, center: f64, width: f64) -> Vec<f64> {
    (0..n)
        .map(|i| (-0.5 * ((i as f64 - center) / width).powi(2)).exp())
        .collect()
}

/// Smooth random periodic samples built from a few Fourier modes.
fn random_periodic(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let modes: Vec<(f64, f64, f64)> = (1..=5)
        .map(|m| {
            (
                m as f64,
                rng.gen_range(-1.0..1.0),
                rng.gen_range(0.0..2.0 * PI),
            )
        })
        .collect();
    (0..n)
        .map(|i| {
            let x = 2.0 * PI * i as f64 / n as f64;
            modes
                .iter()
                .map(|(m, a, ph)| a * (m * x + ph).cos())
                .sum::<f64>()
        })
        .collect()
}

#[test]
fn vacuum_pulse_returns_after_one_transit() {
    let n = 256;
    let g = Grid1D::with_courant(n, 1.0, 0.8, Boundary::Periodic).unwrap();
    // E = H right-moving pulse, 20 points per pulse width.
    let e0 = gaussian(n, 128.0, 20.0);
    let h0 = gaussian(n, 128.0 - 0.5 - 0.4, 20.0);
    let mut s = FieldState1D::vacuum(&g)
        .with_fields(e0.clone(), h0)
        .unwrap();
    let steps = (n as f64 / g.dt()).round() as usize;
    assert!((steps as f64 * g.dt() - n as f64).abs() < 1e-9);
    for _ in 0..steps {
        step_fields(&mut s, &g).unwrap();
    }
    let err: f64 =
        s.e.iter()
            .zip(&e0)
            .map(|(a, b)| (a - b).powi(2))
            .sum::<f64>()
            .sqrt();
    let norm: f64 = e0.iter().map(|a| a * a).sum::<f64>().sqrt();
    assert!(err / norm < 1e-3, "relative L2 error {}", err / norm);
}

/// Lock-in measurement of the spatial wavenumber radiated by a monochromatic
/// soft source into a uniform medium.
fn measured_wavenumber(medium: DispersionParams, omega: f64, cells_per_wavelength: f64) -> f64 {
    let k_expected = omega
        * permittivity_low_loss(&medium, omega)
            .unwrap()
            .value
            .re
            .sqrt();
    let dx = 2.0 * PI / k_expected / cells_per_wavelength;
    let n = 6000;
    let g = Grid1D::with_courant(n, dx, 0.5, Boundary::Mur).unwrap();
    let mut s = FieldState1D::uniform(&g, medium);
    let src = n / 2;
    let period = 2.0 * PI / omega;
    let t_end = 40.0 * period;
    let lock_start = t_end - 8.0 * period;
    let probe: Vec<usize> = (src + 40..src + 40 + (3.0 * cells_per_wavelength) as usize).collect();
    let mut acc = vec![Complex64::new(0.0, 0.0); probe.len()];
    let ramp = 6.0 * period;
    while s.t < t_end {
        let t_half = s.t + 0.5 * g.dt();
        let envelope = if t_half < ramp {
            (0.5 * PI * t_half / ramp).sin().powi(2)
        } else {
            1.0
        };
        s.step_with_current(&g, src, envelope * (omega * t_half).sin())
            .unwrap();
        if s.t >= lock_start {
            let phase = Complex64::from_polar(1.0, omega * s.t);
            for (a, &i) in acc.iter_mut().zip(&probe) {
                *a += s.e[i] * phase;
            }
        }
    }
    // unwrap the phase along x and fit its slope
    let mut phases = Vec::with_capacity(acc.len());
    let mut prev = acc[0].arg();
    let mut offset = 0.0;
    for a in &acc {
        let mut ph = a.arg();
        while ph + offset - prev > PI {
            offset -= 2.0 * PI;
        }
        while ph + offset - prev < -PI {
            offset += 2.0 * PI;
        }
        ph += offset;
        phases.push(ph);
        prev = ph;
    }
    let xs: Vec<f64> = probe.iter().map(|&i| i as f64 * dx).collect();
    let mx = xs.iter().sum::<f64>() / xs.len() as f64;
    let mp = phases.iter().sum::<f64>() / phases.len() as f64;
    let num: f64 = xs
        .iter()
        .zip(&phases)
        .map(|(x, p)| (x - mx) * (p - mp))
        .sum();
    let den: f64 = xs.iter().map(|x| (x - mx).powi(2)).sum();
    num / den
}

#[test]
fn lorentz_medium_wavelength_matches_dispersion_relation() {
    let medium = DispersionParams::new(1.0, 2.0, 0.0).unwrap();
    let k = measured_wavenumber(medium, 1.0, 40.0);
    let k_exact = (4.0f64 / 3.0).sqrt();
    assert!(
        (k - k_exact).abs() / k_exact < 0.01,
        "k = {k}, expected {k_exact}"
    );
}

#[test]
fn numerical_dispersion_converges_at_second_order() {
    let medium = DispersionParams::new(1.0, 2.0, 0.0).unwrap();
    let k_exact = (4.0f64 / 3.0).sqrt();
    let coarse = (measured_wavenumber(medium, 1.0, 10.0) - k_exact).abs();
    let fine = (measured_wavenumber(medium, 1.0, 20.0) - k_exact).abs();
    let order = (coarse / fine).log2();
    assert!(
        order > 1.6 && order < 2.6,
        "observed order {order} ({coarse:e} -> {fine:e})"
    );
}

fn half_lorentz_medium(n: usize, gamma: f64) -> Vec<DispersionParams> {
    let lorentz = DispersionParams::new(1.0, 2.0, gamma).unwrap();
    (0..n)
        .map(|i| {
            if i >= n / 2 {
                lorentz
            } else {
                DispersionParams::vacuum()
            }
        })
        .collect()
}

#[test]
fn lossless_energy_is_conserved() {
    let n = 512;
    let g = Grid1D::with_courant(n, 0.1, 0.5, Boundary::Periodic).unwrap();
    let e = gaussian(n, 128.0, 16.0);
    let mut s = FieldState1D::new(&g, half_lorentz_medium(n, 0.0))
        .unwrap()
        .with_fields(e.clone(), e)
        .unwrap();
    step_fields(&mut s, &g).unwrap();
    let w0 = total_energy(&s, &g);
    let mut worst = 0.0f64;
    for _ in 1..10_000 {
        step_fields(&mut s, &g).unwrap();
        worst = worst.max((total_energy(&s, &g) - w0).abs() / w0);
    }
    assert!(
        s.p.iter().any(|&p| p.abs() > 1e-3),
        "pulse never reached the medium"
    );
    assert!(worst < 1e-6, "relative drift {worst:e}");
}

#[test]
fn lossy_energy_never_increases() {
    let n = 256;
    let g = Grid1D::with_courant(n, 0.1, 0.7, Boundary::Periodic).unwrap();
    let e = gaussian(n, 64.0, 10.0);
    let mut s = FieldState1D::new(&g, half_lorentz_medium(n, 0.3))
        .unwrap()
        .with_fields(e.clone(), e)
        .unwrap();
    step_fields(&mut s, &g).unwrap();
    let start = total_energy(&s, &g);
    let mut prev = start;
    for _ in 0..5_000 {
        step_fields(&mut s, &g).unwrap();
        let w = total_energy(&s, &g);
        assert!(w <= prev * (1.0 + 1e-9), "energy rose from {prev} to {w}");
        prev = w;
    }
    assert!(prev < 0.9 * start);
}

#[test]
fn potential_and_field_integrators_agree() {
    let n = 200;
    let g = Grid1D::with_courant(n, 0.05, 0.8, Boundary::Periodic).unwrap();
    let medium: Vec<_> = (0..n)
        .map(|i| {
            if (60..140).contains(&i) {
                DispersionParams::new(2.0, 3.0, 0.4).unwrap()
            } else {
                DispersionParams::vacuum()
            }
        })
        .collect();
    let e = gaussian(n, 40.0, 8.0);
    let mut h = gaussian(n, 40.0, 8.0);
    let mean = h.iter().sum::<f64>() / n as f64;
    h.iter_mut().for_each(|x| *x -= mean);

    let mut fields = FieldState1D::new(&g, medium.clone())
        .unwrap()
        .with_fields(e.clone(), h.clone())
        .unwrap();
    let mut pots = PotentialState1D::from_transverse_fields(&g, medium, &e, &h).unwrap();
    for step in 0..1000 {
        step_fields(&mut fields, &g).unwrap();
        step_potentials(&mut pots, &g).unwrap();
        let ep = pots.electric_field();
        let worst = fields
            .e
            .iter()
            .zip(&ep)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max);
        assert!(worst < 1e-10, "step {step}: max |dE| = {worst:e}");
    }
    assert!(fields.p.iter().any(|&p| p.abs() > 1e-3));
}

#[test]
fn lorenz_gauge_is_preserved() {
    let n = 128;
    let g = Grid1D::with_courant(n, 0.1, 0.6, Boundary::Periodic).unwrap();
    let dx = g.dx();
    let medium = vec![DispersionParams::new(1.5, 2.0, 0.2).unwrap(); n];
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    let mut s = PotentialState1D::new(&g, medium).unwrap();
    s.phi = random_periodic(&mut rng, n);
    s.a_long = random_periodic(&mut rng, n);
    s.p_long = random_periodic(&mut rng, n);
    // gauge-consistent data: Pi_Phi = -dA_x/dx, Pi_Ax = -dPhi/dx
    s.pi_phi = (0..n)
        .map(|i| -(s.a_long[i] - s.a_long[(i + n - 1) % n]) / dx)
        .collect();
    s.pi_a_long = (0..n)
        .map(|i| -(s.phi[(i + 1) % n] - s.phi[i]) / dx)
        .collect();
    let scale = s.pi_phi.iter().map(|x| x.abs()).fold(0.0, f64::max);
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        step_potentials(&mut s, &g).unwrap();
        worst = s
            .gauge_residual(&g)
            .iter()
            .fold(worst, |m, r| m.max(r.abs()));
    }
    assert!(s.p_long.iter().any(|&p| p.abs() > 1e-3));
    assert!(worst < 1e-8, "gauge residual {worst:e} (scale {scale})");
    // Gauss's law follows from the same constraint: dE_x/dx = -rho_P
    let ex = s.longitudinal_field(&g);
    let rho = s.polarization_charge(&g);
    for i in 0..n {
        let div = (ex[i] - ex[(i + n - 1) % n]) / dx;
        assert!((div + rho[i]).abs() < 1e-8);
    }
}

#[test]
fn energy_identity_on_random_periodic_fields() {
    let n = 96;
    let g = Grid1D::new(n, 0.2, 0.1, Boundary::Periodic).unwrap();
    let dx = g.dx();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..50 {
        let phi = random_periodic(&mut rng, n);
        let a = random_periodic(&mut rng, n);
        let pi_a = random_periodic(&mut rng, n);
        let b = random_periodic(&mut rng, n);
        let grad_phi: Vec<f64> = (0..n).map(|i| (phi[(i + 1) % n] - phi[i]) / dx).collect();
        let e: Vec<f64> = (0..n).map(|i| -pi_a[i] - grad_phi[i]).collect();
        let pi_phi: Vec<f64> = (0..n).map(|i| -(a[i] - a[(i + n - 1) % n]) / dx).collect();
        // rho from d2Phi/dt2 = lap Phi - rho with d2Phi/dt2 = -d(Pi_A)/dx
        let rho: Vec<f64> = (0..n)
            .map(|i| {
                let p = (i + n - 1) % n;
                (grad_phi[i] - grad_phi[p]) / dx + (pi_a[i] - pi_a[p]) / dx
            })
            .collect();
        let snap = PotentialSnapshot {
            e: &e,
            b: &b,
            a: &a,
            phi: &phi,
            pi_a: &pi_a,
            pi_phi: &pi_phi,
            rho: &rho,
        };
        let (lhs, rhs) = appendix_a_identity(&snap, &g).unwrap();
        assert!(
            (lhs - rhs).abs() / lhs.abs() < 1e-10,
            "lhs {lhs}, rhs {rhs}"
        );
    }
}

#[test]
fn snapshot_has_five_columns() {
    let g = Grid1D::new(10, 0.5, 0.25, Boundary::Pec).unwrap();
    let s = FieldState1D::vacuum(&g);
    let t = snapshot_table(&s, &g);
    assert_eq!(t.rows(), 10);
    assert_eq!(
        t.to_text().lines().next().unwrap(),
        "x[length] E[field] H[field] P[field] V[field/time]"
    );
}
