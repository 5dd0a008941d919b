//! Acceptance criteria 1-11. Runs as a plain binary (`harness = false`) so the
//! per-criterion lines always reach the test output.

use std::f64::consts::PI;
use std::process::ExitCode;
use std::time::Instant;

use dissem_core::bath::{fit_decay, kernel_integral, simulate_bath_sampled, BathSystem};
use dissem_core::dispersion::{
    conductivity, fdt_noise_weight, high_loss_denominator, kramers_kronig_check,
    low_loss_denominator, susceptibility, DispersionParams, LossRegime,
};
use dissem_core::emission::{
    emission_rate, green_function_1d, layers_from_grid, population, purcell_factors,
    transfer_matrix_green, vacuum_reference, FieldSpectralDensity, GreenOptions, GreenSource,
    Termination, TwoLevelAtom,
};
use dissem_core::langevin::{
    compare_bath_vs_langevin, langevin_ensemble, measure_susceptibility, ComparisonConfig,
    LangevinParams,
};
use dissem_core::maxwell::{
    appendix_a_identity, step_fields, step_potentials, total_energy, Boundary, FieldState1D,
    Grid1D, PotentialSnapshot, PotentialState1D,
};
use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn fdt_identity() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(1);
    let mut worst = 0.0f64;
    for _ in 0..100 {
        let p = DispersionParams::new(
            rng.gen_range(0.1..5.0),
            rng.gen_range(0.1..5.0),
            rng.gen_range(1e-3..3.0),
        )
        .unwrap();
        let hbar = rng.gen_range(0.1..2.0);
        let w0 = p.omega_0();
        for k in 0..10_000 {
            let w = 0.01 * w0 + (10.0 - 0.01) * w0 * k as f64 / 9_999.0;
            for regime in LossRegime::ALL {
                let reference = hbar * w / PI * conductivity(&p, w, regime).unwrap();
                let weight = fdt_noise_weight(&p, w, hbar, regime);
                worst = worst.max((weight - reference).abs() / reference.abs());
            }
        }
    }
    check(
        worst < 1e-12,
        format!("max relative error {worst:.2e} (limit 1e-12)"),
    )
}

fn loss_regimes() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut shift_err = 0.0f64;
    for _ in 0..100 {
        let gamma = rng.gen_range(0.0..3.0);
        let p = DispersionParams::new(1.0, rng.gen_range(0.1..5.0), gamma).unwrap();
        let w = rng.gen_range(0.0..10.0);
        let shift = high_loss_denominator(&p, w) - low_loss_denominator(&p, w);
        let scale = low_loss_denominator(&p, w).norm().max(1.0);
        shift_err =
            shift_err.max((shift - Complex64::new(gamma * gamma / 4.0, 0.0)).norm() / scale);
    }
    let sweep = [0.5, 0.8, 1.0, 1.2, 1.5];
    let response_errors = |eta: f64| {
        let lp = LangevinParams::new(1.0, eta)
            .unwrap()
            .with_omega_p(0.8)
            .unwrap();
        let disp = DispersionParams::new(0.8, 1.0, 2.0 * eta).unwrap();
        let mut high = 0.0f64;
        let mut low = 0.0f64;
        for &w in &sweep {
            let chi = measure_susceptibility(&lp, w, 0.01, 14.0, 10).unwrap();
            let h = susceptibility(&disp, w, LossRegime::HighLoss).unwrap();
            let l = susceptibility(&disp, w, LossRegime::LowLoss).unwrap();
            high = high.max((chi - h).norm() / h.norm());
            low = low.max((chi - l).norm() / l.norm());
        }
        (high, low)
    };
    let (high_03, low_03) = response_errors(0.3);
    let (high_001, low_001) = response_errors(0.01);
    check(
        shift_err < 1e-12 && high_03 < 0.01 && low_03 > 0.01 && low_001 < 0.01,
        format!(
            "denominator shift error {shift_err:.1e}; eta=0.3: high-loss {:.3}%, low-loss {:.1}%; \
             eta=0.01: high-loss {:.3}%, low-loss {:.3}%",
            100.0 * high_03,
            100.0 * low_03,
            100.0 * high_001,
            100.0 * low_001
        ),
    )
}

fn gaussian(n: usize, center: f64, width: f64) -> Vec<f64> {
    (0..n)
        .map(|i| (-0.5 * ((i as f64 - center) / width).powi(2)).exp())
        .collect()
}

fn half_filled(n: usize, gamma: f64) -> Vec<DispersionParams> {
    let m = DispersionParams::new(1.0, 2.0, gamma).unwrap();
    (0..n)
        .map(|i| {
            if i >= n / 2 {
                m
            } else {
                DispersionParams::vacuum()
            }
        })
        .collect()
}

fn energy_conservation() -> Outcome {
    let n = 512;
    let g = Grid1D::with_courant(n, 0.1, 0.5, Boundary::Periodic).unwrap();
    let e = gaussian(n, 128.0, 16.0);
    let mut s = FieldState1D::new(&g, half_filled(n, 0.0))
        .unwrap()
        .with_fields(e.clone(), e.clone())
        .unwrap();
    step_fields(&mut s, &g).unwrap();
    let w0 = total_energy(&s, &g);
    let mut drift = 0.0f64;
    for _ in 1..10_000 {
        step_fields(&mut s, &g).unwrap();
        drift = drift.max((total_energy(&s, &g) - w0).abs() / w0);
    }

    let mut s = FieldState1D::new(&g, half_filled(n, 0.2))
        .unwrap()
        .with_fields(e.clone(), e)
        .unwrap();
    step_fields(&mut s, &g).unwrap();
    let mut prev = total_energy(&s, &g);
    let mut worst_rise = f64::NEG_INFINITY;
    for _ in 1..10_000 {
        step_fields(&mut s, &g).unwrap();
        let w = total_energy(&s, &g);
        worst_rise = worst_rise.max((w - prev) / prev);
        prev = w;
    }
    check(
        drift < 1e-6 && worst_rise <= 1e-12,
        format!(
            "lossless drift {drift:.2e} (limit 1e-6); lossy largest step change {worst_rise:.2e}"
        ),
    )
}

fn formulation_equivalence() -> Outcome {
    let n = 256;
    let g = Grid1D::with_courant(n, 0.05, 0.8, Boundary::Periodic).unwrap();
    let medium: Vec<_> = (0..n)
        .map(|i| {
            if (80..180).contains(&i) {
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
    let mut worst = 0.0f64;
    for _ in 0..1000 {
        step_fields(&mut fields, &g).unwrap();
        step_potentials(&mut pots, &g).unwrap();
        let ep = pots.electric_field();
        for (a, b) in fields.e.iter().zip(&ep) {
            worst = worst.max((a - b).abs());
        }
    }
    check(
        worst < 1e-10,
        format!("max |E_field - E_potential| {worst:.2e} over 1000 steps (limit 1e-10)"),
    )
}

fn random_periodic(rng: &mut ChaCha8Rng, n: usize) -> Vec<f64> {
    let modes: Vec<(f64, f64, f64)> = (1..=6)
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

fn energy_identity() -> Outcome {
    let n = 128;
    let g = Grid1D::new(n, 0.15, 0.1, Boundary::Periodic).unwrap();
    let dx = g.dx();
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    let mut worst = 0.0f64;
    for _ in 0..50 {
        let phi = random_periodic(&mut rng, n);
        let a = random_periodic(&mut rng, n);
        let pi_a = random_periodic(&mut rng, n);
        let b = random_periodic(&mut rng, n);
        let grad_phi: Vec<f64> = (0..n).map(|i| (phi[(i + 1) % n] - phi[i]) / dx).collect();
        let e: Vec<f64> = (0..n).map(|i| -pi_a[i] - grad_phi[i]).collect();
        let pi_phi: Vec<f64> = (0..n).map(|i| -(a[i] - a[(i + n - 1) % n]) / dx).collect();
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
        worst = worst.max((lhs - rhs).abs() / lhs.abs());
    }
    check(
        worst < 1e-10,
        format!("max relative mismatch {worst:.2e} over 50 sets (limit 1e-10)"),
    )
}

fn reference_bath() -> BathSystem {
    BathSystem::flat(1.0, 0.05, (0.2, 1.8), 2000).unwrap()
}

fn emergent_dissipation() -> Outcome {
    let sys = reference_bath();
    let tr = simulate_bath_sampled(&sys, 80.0, 0.02, 0, 0.0, 10).unwrap();
    let fit = fit_decay(&tr, (5.0, 75.0)).unwrap();
    let inv = tr.invariant();
    let drift = inv.iter().map(|x| (x - inv[0]).abs()).fold(0.0, f64::max) / inv[0];
    let rel = (fit.eta_measured - 0.05).abs() / 0.05;
    check(
        rel < 0.05 && drift < 1e-8 && 80.0 < sys.recurrence_time(),
        format!(
            "fitted eta {:.5} ({:.2}% off, limit 5%), r^2 {:.5}; invariant drift {drift:.2e} (limit 1e-8)",
            fit.eta_measured,
            100.0 * rel,
            fit.r_squared
        ),
    )
}

fn memory_kernel_limit() -> Outcome {
    let k = kernel_integral(&reference_bath(), 200.0, 8000).unwrap();
    let rel = (k.causal.re - 0.05).abs() / 0.05;
    check(
        rel < 0.02,
        format!(
            "Re int_0^T B e^(i w0 t) dt = {:.5} ({:.2}% off eta, limit 2%); two-sided {:.5}",
            k.causal.re,
            100.0 * rel,
            k.two_sided.re
        ),
    )
}

fn stationary_langevin() -> Outcome {
    let eta = 0.05;
    let p = LangevinParams::new(1.0, eta).unwrap();
    let a0 = Complex64::new(1.0, 0.0);
    let stats = langevin_ensemble(
        &p,
        a0,
        40.0 / eta,
        0.05,
        20,
        10_000,
        2024,
        Some((20.0 / eta, 40.0 / eta)),
    )
    .unwrap();
    let st = stats.stationary().unwrap();
    let z = (st.mean - 1.0).abs() / st.stderr;
    let worst_mean = stats
        .t
        .iter()
        .enumerate()
        .map(|(k, t)| {
            let exact = a0 * Complex64::new(-eta, -1.0).scale(*t).exp();
            (stats.mean_a[k] - exact).norm() / stats.mean_stderr[k]
        })
        .fold(0.0, f64::max);
    check(
        z < 3.0 && worst_mean < 3.0,
        format!(
            "<|a|^2> = {:.4} +- {:.4} ({z:.2} stderr); worst <a(t)> deviation {worst_mean:.2} stderr",
            st.mean, st.stderr
        ),
    )
}

fn bath_langevin_equivalence() -> Outcome {
    let eta = 0.02;
    let bath = BathSystem::flat(1.0, eta, (0.2, 1.8), 2000).unwrap();
    let lp = LangevinParams::new(1.0, eta).unwrap();
    let cfg = ComparisonConfig {
        seed: 9,
        bath_dt: 0.025,
        langevin_dt: 0.05,
        sample_dt: 0.5,
        cold_t_end: 2.0 / eta,
        warm_t_end: 300.0,
        window: (150.0, 300.0),
        n_bath: 64,
        n_langevin: 4000,
    };
    let r = compare_bath_vs_langevin(&bath, &lp, &cfg).unwrap();

    // same comparison for the criterion-6 bath, reported only
    let strong = reference_bath();
    let cold = simulate_bath_sampled(&strong, 2.0 / 0.05, 0.025, 0, 0.0, 20).unwrap();
    let strong_dev = cold
        .t
        .iter()
        .zip(&cold.a)
        .map(|(t, a)| (a.norm_sqr() / (-0.1 * t).exp() - 1.0).abs())
        .fold(0.0, f64::max);
    check(
        r.cold_max_rel_dev < 0.05 && r.warm_z < 3.0,
        format!(
            "eta=0.02: cold |a|^2 vs e^(-2 eta t) max {:.2}% over t<={} (limit 5%); warm bath {:.3}+-{:.3} vs \
             Langevin {:.3}+-{:.3} ({:.2} combined stderr); eta=0.05 cold deviation {:.1}%",
            100.0 * r.cold_max_rel_dev,
            r.cold_t_end,
            r.warm_bath.mean,
            r.warm_bath.stderr,
            r.warm_langevin.mean,
            r.warm_langevin.stderr,
            r.warm_z,
            100.0 * strong_dev
        ),
    )
}

fn kramers_kronig() -> Outcome {
    let p = DispersionParams::new(1.0, 1.0, 0.2).unwrap();
    let n = 200_001;
    let grid: Vec<f64> = (0..n)
        .map(|k| -20.0 + 40.0 * k as f64 / (n - 1) as f64)
        .collect();
    let low = kramers_kronig_check(&p, &grid, LossRegime::LowLoss).unwrap();
    let high = kramers_kronig_check(&p, &grid, LossRegime::HighLoss).unwrap();
    check(
        low < 1e-3 && high < 1e-3,
        format!("residual low-loss {low:.2e}, high-loss {high:.2e} (limit 1e-3)"),
    )
}

fn emission_pipeline() -> Outcome {
    // white spectrum
    let atom = TwoLevelAtom::new(3.0, 0.7, 0.0).unwrap();
    let s0 = 0.2;
    let half_span = 5.0;
    let h = 2.0 * PI / (20.0 * 60.0);
    let n = (2.0 * half_span / h).ceil() as usize + 1;
    let s = FieldSpectralDensity::sampled(3.0 - half_span, 3.0 + half_span, n, |_| s0).unwrap();
    let slope =
        (population(&atom, &s, 60.0).unwrap() - population(&atom, &s, 40.0).unwrap()) / 20.0;
    let rate = emission_rate(&atom, s0).unwrap();
    let slope_err = (slope - rate).abs() / rate;

    // vacuum Green function
    let opts = |t_end| GreenOptions {
        source: GreenSource::new(2.0, 3.0),
        t_end,
        window: false,
        decay_tolerance: 1e-4,
    };
    let probes = [1.6, 1.8, 2.0, 2.2, 2.4];
    let vac = vacuum_reference(0.02, 0.01, 400, &probes, &opts(60.0)).unwrap();
    let vac_err = probes
        .iter()
        .zip(&vac.values)
        .map(|(w, g)| (g.im * 2.0 * w - 1.0).abs())
        .fold(0.0, f64::max);

    // lossy-filled PEC cavity, emitter at the center
    let fill = DispersionParams::new(3.0, 6.0, 2.0).unwrap();
    let cells = 100;
    let grid = Grid1D::with_courant(cells, 1.39 / cells as f64, 0.5, Boundary::Pec).unwrap();
    let medium = vec![fill; cells];
    let x0 = 0.5 * grid.length();
    let oracle = |w: f64| {
        let layers = layers_from_grid(&grid, &medium, w).unwrap();
        transfer_matrix_green(&layers, x0, w, Termination::Pec, Termination::Pec)
            .unwrap()
            .im
            * 2.0
            * w
    };
    let resonance = (0..2001)
        .map(|k| 1.5 + k as f64 * 5e-4)
        .max_by(|a, b| oracle(*a).total_cmp(&oracle(*b)))
        .unwrap();
    let probes = [resonance - 0.1, resonance, resonance + 0.1];
    let cav = green_function_1d(&grid, &medium, x0, &probes, &opts(800.0)).unwrap();
    let reference = vacuum_reference(grid.dx(), grid.dt(), 600, &probes, &opts(60.0)).unwrap();
    let purcell = purcell_factors(&cav, &reference).unwrap();
    let purcell_err = probes
        .iter()
        .zip(&purcell)
        .map(|(w, f)| (f - oracle(*w)).abs() / oracle(*w))
        .fold(0.0, f64::max);
    check(
        slope_err < 0.02 && vac_err < 0.03 && purcell_err < 0.05,
        format!(
            "population slope {:.3}% off (limit 2%); vacuum Im G {:.3}% off (limit 3%); \
             Purcell {:.2} at resonance, {:.3}% off oracle (limit 5%)",
            100.0 * slope_err,
            100.0 * vac_err,
            purcell[1],
            100.0 * purcell_err
        ),
    )
}

fn main() -> ExitCode {
    type Criterion = (u32, &'static str, f64, fn() -> Outcome);
    let criteria: [Criterion; 11] = [
        (1, "FDT identity", 1.0, fdt_identity),
        (2, "high-loss vs low-loss response", 60.0, loss_regimes),
        (3, "energy conservation", 10.0, energy_conservation),
        (
            4,
            "field/potential equivalence",
            f64::INFINITY,
            formulation_equivalence,
        ),
        (5, "energy identity", f64::INFINITY, energy_identity),
        (6, "emergent dissipation", 60.0, emergent_dissipation),
        (7, "memory-kernel limit", f64::INFINITY, memory_kernel_limit),
        (8, "stationary Langevin moment", 120.0, stationary_langevin),
        (
            9,
            "bath/Langevin equivalence",
            f64::INFINITY,
            bath_langevin_equivalence,
        ),
        (10, "Kramers-Kronig", f64::INFINITY, kramers_kronig),
        (11, "emission pipeline", 300.0, emission_pipeline),
    ];
    let mut failures = 0;
    for (id, name, budget, run) in criteria {
        let start = Instant::now();
        let outcome = run();
        let secs = start.elapsed().as_secs_f64();
        let in_time = secs < budget;
        let pass = outcome.pass && in_time;
        if !pass {
            failures += 1;
        }
        let limit = if budget.is_finite() {
            format!(", limit {budget} s")
        } else {
            String::new()
        };
        println!(
            "criterion {id:>2} [{name}]: {} - {} ({secs:.2} s{limit})",
            if pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
    }
    println!("acceptance: {} of 11 criteria passed", 11 - failures);
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
