//! The runnable studies behind the command line, one function per
//! subcommand.
//!
//! Every runner follows the same contract: parse and validate its parameters
//! through [`ConfigReader`] (collecting every problem before giving up),
//! derive the canonical config hash, create `<out>/<subcommand>/<hash>/`,
//! do the work, write the data artifacts, and record named pass/fail
//! assertions in `manifest.json`. Apart from the wall-clock duration stamped
//! into the manifest, rerunning with the same effective config produces
//! byte-identical files: stochastic runs draw exclusively from counter-based
//! streams keyed by the mandatory `seed`, deterministic runs take no entropy
//! at all, and every float is printed through the same 17-digit formatter.

use std::f64::consts::PI;
use std::path::Path;

use num_complex::Complex64;
use rand::Rng;
use serde::Serialize;

use crate::dirac::{
    beta_matrix, checkerboard_vs_dirac, dispersion_frequency, enumerate_paths, h_matrix,
    helicity_vector, massless_limit_study, telegraph_monte_carlo, CheckerboardLattice,
    CheckerboardStudyConfig, RsDiracPropagator, TelegraphState, WeylPropagator, WeylSpinor,
};
use crate::error::{Error, Result};
use crate::gauge::{
    field_equation_residuals, lagrangian_density, rs_vector, weak_field_magnetic,
    weak_field_scaling, write_field_json, write_residual_report, Branch, LieField, SuNAlgebra,
};
use crate::harness::config::{ConfigMap, ConfigReader};
use crate::harness::manifest::{RunContext, RunManifest};
use crate::io_util::{fmt_f64, CsvWriter};
use crate::nelson::{empirical_density, fokker_planck_residual, Direction, DriftSpec, Ensemble};
use crate::network::{
    chain_vs_checkerboard, continued_flip_closed_form, face_clusters, flip_constraint_residuals,
    foam_amplitude, master_flip_closed_form, random_connected_foam, read_foam_json,
    write_constraint_report, write_foam_json, AmplitudeSeriesWriter, ChainStudyConfig,
    EdgeAmplitudes, FoamFace, FoamSpec, FoamStrategy, FoamVertex, NetworkDynamics, SpinNetwork,
    TransportModel, MAX_ENUMERATED_FACES,
};
use crate::numerics::{integrate, log_log_slope, Boundary, ComplexField, Grid1D, RngStream};
use crate::schrodinger::{
    collapse_detector, continuity_residual, free_gaussian_analytic, free_packet_variance,
    gaussian_packet, harmonic_ground_state, nelson_map, CrankNicolson, Potential,
};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Subcommand {
    Nelson,
    Telegraph,
    Checkerboard,
    RsPhoton,
    RsField,
    Network,
    Foam,
    All,
}

impl Subcommand {
    /// The individual studies, in the order `all` runs them.
    pub const EACH: [Subcommand; 7] = [
        Subcommand::Nelson,
        Subcommand::Telegraph,
        Subcommand::Checkerboard,
        Subcommand::RsPhoton,
        Subcommand::RsField,
        Subcommand::Network,
        Subcommand::Foam,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Subcommand::Nelson => "nelson",
            Subcommand::Telegraph => "telegraph",
            Subcommand::Checkerboard => "checkerboard",
            Subcommand::RsPhoton => "rs-photon",
            Subcommand::RsField => "rs-field",
            Subcommand::Network => "network",
            Subcommand::Foam => "foam",
            Subcommand::All => "all",
        }
    }

    pub fn parse(name: &str) -> Option<Subcommand> {
        match name {
            "nelson" => Some(Subcommand::Nelson),
            "telegraph" => Some(Subcommand::Telegraph),
            "checkerboard" => Some(Subcommand::Checkerboard),
            "rs-photon" => Some(Subcommand::RsPhoton),
            "rs-field" => Some(Subcommand::RsField),
            "network" => Some(Subcommand::Network),
            "foam" => Some(Subcommand::Foam),
            "all" => Some(Subcommand::All),
            _ => None,
        }
    }
}

pub fn run(sub: Subcommand, cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    match sub {
        Subcommand::Nelson => run_nelson(cfg, out_root),
        Subcommand::Telegraph => run_telegraph(cfg, out_root),
        Subcommand::Checkerboard => run_checkerboard(cfg, out_root),
        Subcommand::RsPhoton => run_rs_photon(cfg, out_root),
        Subcommand::RsField => run_rs_field(cfg, out_root),
        Subcommand::Network => run_network(cfg, out_root),
        Subcommand::Foam => run_foam(cfg, out_root),
        Subcommand::All => run_all(cfg, out_root),
    }
}

/// Process exit code for a finished or failed run: 0 all assertions passed,
/// 1 an assertion failed, 2 bad configuration, 3 the computation itself died.
pub fn exit_code(outcome: &Result<RunManifest>) -> i32 {
    match outcome {
        Ok(manifest) if manifest.passed => 0,
        Ok(_) => 1,
        Err(Error::Config(_)) => 2,
        Err(Error::Assertion(_)) => 1,
        Err(_) => 3,
    }
}

fn write_json<T: Serialize>(path: &Path, value: &T) -> Result<()> {
    let mut bytes = serde_json::to_vec_pretty(value)?;
    bytes.push(b'\n');
    std::fs::write(path, bytes)?;
    Ok(())
}

fn l1_distance(a: &[f64], b: &[f64], dx: f64) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).sum::<f64>() * dx
}

/// (mean, variance) of the normalized weight rho(x) dx.
fn density_moments(grid: &Grid1D, rho: &[f64]) -> (f64, f64) {
    let dx = grid.dx();
    let mass = integrate(rho, dx);
    let mean = grid.points().zip(rho).map(|(x, r)| x * r).sum::<f64>() * dx / mass;
    let var = grid
        .points()
        .zip(rho)
        .map(|(x, r)| (x - mean) * (x - mean) * r)
        .sum::<f64>()
        * dx
        / mass;
    (mean, var)
}

fn linear_slope(xs: &[f64], ys: &[f64]) -> f64 {
    let n = xs.len() as f64;
    let mx = xs.iter().sum::<f64>() / n;
    let my = ys.iter().sum::<f64>() / n;
    let num: f64 = xs.iter().zip(ys).map(|(x, y)| (x - mx) * (y - my)).sum();
    let den: f64 = xs.iter().map(|x| (x - mx) * (x - mx)).sum();
    num / den
}

fn bits_equal(a: Complex64, b: Complex64) -> bool {
    a.re.to_bits() == b.re.to_bits() && a.im.to_bits() == b.im.to_bits()
}

// ---------------------------------------------------------------------------
// nelson: diffusing particles against the wave-side oracle

fn run_nelson(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    let mut r = ConfigReader::new(cfg);
    let seed = r.require_seed("seed");
    let n_particles = r.usize("n_particles", 100_000);
    let dt = r.f64("dt", 1e-3);
    let t_final = r.f64("t_final", 10.0);
    let x_min = r.f64("x_min", -8.0);
    let x_max = r.f64("x_max", 8.0);
    let n_points = r.usize("n_points", 256);
    let mass = r.f64("mass", 1.0);
    let hbar = r.f64("hbar", 1.0);
    let omega = r.f64("omega", 1.0);
    let bandwidth = r.f64("bandwidth", 0.08);
    r.check(
        n_particles > 0,
        format!("key 'n_particles' must be positive, got {n_particles}"),
    );
    r.check(
        n_points >= 16,
        format!("key 'n_points' must be at least 16, got {n_points}"),
    );
    r.check(
        dt.is_finite() && dt > 0.0,
        format!("key 'dt' must be positive, got {dt}"),
    );
    r.check(
        t_final.is_finite() && t_final >= dt,
        format!("key 't_final' must be at least dt, got {t_final}"),
    );
    r.check(
        x_min.is_finite() && x_max.is_finite() && x_min < x_max,
        format!("keys 'x_min'/'x_max' must bound a box, got [{x_min}, {x_max}]"),
    );
    r.check(
        mass.is_finite() && mass > 0.0,
        format!("key 'mass' must be positive, got {mass}"),
    );
    r.check(
        hbar.is_finite() && hbar > 0.0,
        format!("key 'hbar' must be positive, got {hbar}"),
    );
    r.check(
        omega.is_finite() && omega > 0.0,
        format!("key 'omega' must be positive, got {omega}"),
    );
    r.check(
        bandwidth.is_finite() && bandwidth > 0.0,
        format!("key 'bandwidth' must be positive, got {bandwidth}"),
    );
    let eff = r.finish()?;
    let mut ctx = RunContext::create(out_root, "nelson", &eff.hash("nelson"))?;

    // Oscillator ground state: the drift is time-independent, so the cloud
    // must hold the stationary density over the whole run.
    let grid = Grid1D::new(x_min, x_max, n_points, Boundary::Clamped)?;
    let psi0 = harmonic_ground_state(&grid, mass, omega, hbar);
    let target = psi0.density();
    let drift = DriftSpec::from_fields(&nelson_map(&psi0, mass, hbar)?)?;
    let mut cloud = Ensemble::from_density(n_particles, &grid, &target, RngStream::new(seed, 0))?;
    let n_steps = (t_final / dt).round() as usize;
    for _ in 0..n_steps {
        cloud.forward_step(&drift, dt)?;
    }
    let empirical = empirical_density(&cloud, &grid, bandwidth)?;
    let stationary_l1 = l1_distance(&empirical, &target, grid.dx());
    ctx.assert_le("harmonic_stationary_l1", stationary_l1, 0.05);

    let mut csv = CsvWriter::create(&ctx.artifact("harmonic_density.csv"), "x,empirical,target")?;
    for (i, x) in grid.points().enumerate() {
        csv.row(&[fmt_f64(x), fmt_f64(empirical[i]), fmt_f64(target[i])])?;
    }
    csv.finish()?;

    // Free packet: co-evolve the wave solver and the particle cloud until the
    // width has tripled, checking both variances against the closed form
    // sigma^2 (1 + (hbar t / 2 m sigma^2)^2).
    let sigma0 = 0.5;
    let spread_t = 2.0 * 2.0f64.sqrt() * mass * sigma0 * sigma0 / hbar;
    let spread_steps = (spread_t / dt).ceil() as usize;
    let sgrid = Grid1D::new(x_min, x_max, n_points.max(512), Boundary::Clamped)?;
    let mut psi = gaussian_packet(&sgrid, 0.0, sigma0, 0.0);
    let solver = CrankNicolson::new(&sgrid, &Potential::Free, mass, hbar, dt)?;
    let mut walkers =
        Ensemble::from_density(n_particles, &sgrid, &psi.density(), RngStream::new(seed, 1))?;
    let mut spread_csv = CsvWriter::create(
        &ctx.artifact("spreading.csv"),
        "t,closed_form_variance,solver_variance,walker_variance",
    )?;
    let mut worst_solver = 0.0f64;
    let mut t = 0.0;
    for step in 0..spread_steps {
        let drift_now = DriftSpec::from_fields(&nelson_map(&psi, mass, hbar)?)?;
        walkers.forward_step(&drift_now, dt)?;
        solver.step(&mut psi)?;
        t = (step + 1) as f64 * dt;
        if (step + 1) % 50 == 0 || step + 1 == spread_steps {
            let oracle = free_packet_variance(t, sigma0, mass, hbar);
            let (_, solver_var) = density_moments(&sgrid, &psi.density());
            worst_solver = worst_solver.max((solver_var - oracle).abs() / oracle);
            spread_csv.row(&[
                fmt_f64(t),
                fmt_f64(oracle),
                fmt_f64(solver_var),
                fmt_f64(walkers.variance()),
            ])?;
        }
    }
    spread_csv.finish()?;
    let oracle_end = free_packet_variance(t, sigma0, mass, hbar);
    let walker_rel = (walkers.variance() - oracle_end).abs() / oracle_end;
    ctx.assert_le("spreading_solver_rel_error", worst_solver, 0.005);
    ctx.assert_le("spreading_walker_rel_error", walker_rel, 0.03);

    // One extra solver step gives a snapshot pair for the transport-equation
    // residual of the diffusing density.
    let rho_before = psi.density();
    let drift_end = DriftSpec::from_fields(&nelson_map(&psi, mass, hbar)?)?;
    solver.step(&mut psi)?;
    let rho_after = psi.density();
    let fp = fokker_planck_residual(&rho_before, &rho_after, &drift_end, dt, Direction::Forward)?;
    #[derive(Serialize)]
    struct FpRecord {
        residual_forward: f64,
        dt: f64,
        t: f64,
    }
    write_json(
        &ctx.artifact("fokker_planck.json"),
        &FpRecord {
            residual_forward: fp,
            dt,
            t,
        },
    )?;
    let collapse = collapse_detector(&nelson_map(&psi, mass, hbar)?, 1e-3)?;
    write_json(&ctx.artifact("collapse.json"), &collapse)?;

    // Continuity ladder on exact snapshots: halving dx and dt together must
    // shrink the residual of d rho/dt + d(rho v)/dx at second order.
    let mut ladder_dts = Vec::new();
    let mut ladder_res = Vec::new();
    for rung in 0..3u32 {
        let n = 128usize << rung;
        let rdt = 4e-3 / 2.0f64.powi(rung as i32);
        let lgrid = Grid1D::new(-10.0, 10.0, n, Boundary::Clamped)?;
        let s1 = free_gaussian_analytic(&lgrid, 1.0, 0.4, mass, hbar);
        let s2 = free_gaussian_analytic(&lgrid, 1.0, 0.4 + rdt, mass, hbar);
        let report = continuity_residual(
            &nelson_map(&s1, mass, hbar)?,
            &nelson_map(&s2, mass, hbar)?,
            rdt,
        )?;
        ladder_dts.push(rdt);
        ladder_res.push(report.max_residual);
    }
    let continuity_order = log_log_slope(&ladder_dts, &ladder_res)?;
    ctx.assert_that(
        "continuity_order",
        continuity_order >= 1.8,
        format!("fitted order {continuity_order:.3} from residuals {ladder_res:?}"),
    );
    #[derive(Serialize)]
    struct ContinuityLadder<'a> {
        dt_ladder: &'a [f64],
        max_residuals: &'a [f64],
        fitted_order: f64,
    }
    write_json(
        &ctx.artifact("continuity.json"),
        &ContinuityLadder {
            dt_ladder: &ladder_dts,
            max_residuals: &ladder_res,
            fitted_order: continuity_order,
        },
    )?;

    // Round trip psi -> (rho, S) -> sqrt(rho) e^{iS/hbar} on randomized
    // smooth states, aligned at the density peak to fix the free phase.
    let mut rng = RngStream::new(seed, 2).rng();
    let rgrid = Grid1D::new(-10.0, 10.0, 512, Boundary::Clamped)?;
    let mut worst_round_trip = 0.0f64;
    for _ in 0..5 {
        let mut coeffs = [[0.0f64; 3]; 4];
        for j in 0..3 {
            coeffs[0][j] = rng.random_range(-0.2..0.2);
            coeffs[1][j] = rng.random_range(0.3..1.5);
            coeffs[2][j] = rng.random_range(-1.0..1.0);
            coeffs[3][j] = rng.random_range(0.0..2.0 * PI);
        }
        let psi_r = ComplexField::from_fn(rgrid.clone(), |x| {
            let mut log_amp = -0.25 * x * x;
            let mut phase = 0.0;
            for j in 0..3 {
                log_amp += coeffs[0][j] * (coeffs[1][j] * x + coeffs[3][j]).cos();
                phase += coeffs[2][j] * (coeffs[1][j] * x + coeffs[3][j]).sin();
            }
            Complex64::from_polar(log_amp.exp(), phase / hbar)
        });
        let f = nelson_map(&psi_r, mass, hbar)?;
        let peak = f
            .rho
            .iter()
            .enumerate()
            .max_by(|a, b| a.1.total_cmp(b.1))
            .map(|(i, _)| i)
            .unwrap_or(0);
        let rec_peak = Complex64::from_polar(f.rho[peak].sqrt(), f.s[peak] / hbar);
        let phase_shift = (psi_r.values()[peak] / rec_peak).arg();
        for i in 0..rgrid.len() {
            if f.is_masked(i) {
                continue;
            }
            let rec = Complex64::from_polar(f.rho[i].sqrt(), f.s[i] / hbar + phase_shift);
            worst_round_trip = worst_round_trip.max((rec - psi_r.values()[i]).norm());
        }
    }
    ctx.assert_le("round_trip_max_error", worst_round_trip, 1e-6);
    #[derive(Serialize)]
    struct RoundTrip {
        states: usize,
        max_error: f64,
    }
    write_json(
        &ctx.artifact("roundtrip.json"),
        &RoundTrip {
            states: 5,
            max_error: worst_round_trip,
        },
    )?;

    ctx.finish()
}

// ---------------------------------------------------------------------------
// telegraph: flip-process walkers against the grid pair

fn run_telegraph(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    let mut r = ConfigReader::new(cfg);
    let seed = r.require_seed("seed");
    let n_walkers = r.usize("n_walkers", 100_000);
    let rate = r.f64("rate", 1.0);
    let speed = r.f64("speed", 1.0);
    let x_min = r.f64("x_min", -8.0);
    let x_max = r.f64("x_max", 8.0);
    let n_points = r.usize("n_points", 512);
    let t_final = r.f64("t_final", 1.0);
    let bin_factor = r.usize("bin_factor", 64);
    let packet_width = r.f64("packet_width", 0.5);
    r.check(
        n_walkers > 0,
        format!("key 'n_walkers' must be positive, got {n_walkers}"),
    );
    r.check(
        rate.is_finite() && rate >= 0.0,
        format!("key 'rate' must be nonnegative, got {rate}"),
    );
    r.check(
        speed.is_finite() && speed > 0.0,
        format!("key 'speed' must be positive, got {speed}"),
    );
    r.check(
        x_min.is_finite() && x_max.is_finite() && x_min < x_max,
        format!("keys 'x_min'/'x_max' must bound a box, got [{x_min}, {x_max}]"),
    );
    r.check(
        n_points >= 16,
        format!("key 'n_points' must be at least 16, got {n_points}"),
    );
    r.check(
        t_final.is_finite() && t_final > 0.0,
        format!("key 't_final' must be positive, got {t_final}"),
    );
    r.check(
        bin_factor >= 1 && n_points.is_multiple_of(bin_factor.max(1)),
        format!("key 'bin_factor' must divide n_points, got {bin_factor}"),
    );
    r.check(
        packet_width.is_finite() && packet_width > 0.0,
        format!("key 'packet_width' must be positive, got {packet_width}"),
    );
    let eff = r.finish()?;
    let mut ctx = RunContext::create(out_root, "telegraph", &eff.hash("telegraph"))?;

    // Symmetric packet, split evenly between directions, normalized to unit
    // mass. The grid pair runs at unit Courant number, where both substeps
    // are exact; the walkers are exact in law, so the binned comparison sees
    // only splitting bias plus sampling noise.
    let grid = Grid1D::new(x_min, x_max, n_points, Boundary::Periodic)?;
    let raw: Vec<f64> = grid
        .points()
        .map(|x| (-x * x / (2.0 * packet_width * packet_width)).exp())
        .collect();
    let total = 2.0 * integrate(&raw, grid.dx());
    let half: Vec<f64> = raw.iter().map(|v| v / total).collect();
    let initial = TelegraphState::new(grid.clone(), half.clone(), half, speed, rate)?;

    let dt_pde = grid.dx() / speed;
    let pde_steps = ((t_final / dt_pde).round() as usize).max(1);
    let t_run = pde_steps as f64 * dt_pde;
    let mut pde = initial.clone();
    for _ in 0..pde_steps {
        pde.step(dt_pde)?;
    }
    let mc = telegraph_monte_carlo(&initial, t_run, n_walkers, RngStream::new(seed, 0))?;

    let pde_bins = pde.binned_mass(bin_factor)?;
    let mc_bins = mc.state.binned_mass(bin_factor)?;
    let binned_l1: f64 = pde_bins
        .iter()
        .zip(&mc_bins)
        .map(|((_, a), (_, b))| (a - b).abs())
        .sum();
    ctx.assert_le("pde_vs_walkers_l1", binned_l1, 0.02);
    ctx.assert_le(
        "pde_mass_drift",
        (pde.total_probability() - 1.0).abs(),
        1e-9,
    );

    let mut csv = CsvWriter::create(&ctx.artifact("pde_vs_mc.csv"), "bin_x,pde_mass,walker_mass")?;
    for ((x, a), (_, b)) in pde_bins.iter().zip(&mc_bins) {
        csv.row(&[fmt_f64(*x), fmt_f64(*a), fmt_f64(*b)])?;
    }
    csv.finish()?;

    // Uniform fields leave advection inert, so the direction fractions must
    // relax along (1 +- e^{-2 rate t})/2 to arithmetic accuracy.
    let u0 = 1.0 / (x_max - x_min);
    let mut uniform = TelegraphState::new(
        grid.clone(),
        vec![u0; n_points],
        vec![0.0; n_points],
        speed,
        rate,
    )?;
    let relax_dt = (grid.dx() / speed).min(0.01);
    let relax_steps = ((1.0 / relax_dt).round() as usize).max(1);
    let mut relax_csv =
        CsvWriter::create(&ctx.artifact("relaxation.csv"), "t,plus_fraction,target")?;
    let mut worst_relax = 0.0f64;
    for k in 1..=relax_steps {
        uniform.step(relax_dt)?;
        let t = k as f64 * relax_dt;
        let plus_frac = integrate(uniform.p_plus(), grid.dx()) / uniform.total_probability();
        let target = 0.5 * (1.0 + (-2.0 * rate * t).exp());
        worst_relax = worst_relax.max((plus_frac - target).abs());
        if k % 10 == 0 || k == relax_steps {
            relax_csv.row(&[fmt_f64(t), fmt_f64(plus_frac), fmt_f64(target)])?;
        }
    }
    relax_csv.finish()?;
    ctx.assert_le("uniform_relaxation_max_dev", worst_relax, 1e-8);

    // Reversal counts are Poisson(rate * t): mean and variance must sit
    // within three standard errors of the counted sample.
    let lambda = rate * t_run;
    let nw = mc.flip_counts.len() as f64;
    let mean = mc.flip_counts.iter().map(|&c| c as f64).sum::<f64>() / nw;
    let var = mc
        .flip_counts
        .iter()
        .map(|&c| (c as f64 - mean) * (c as f64 - mean))
        .sum::<f64>()
        / nw;
    let se_mean = (lambda / nw).sqrt();
    let se_var = ((lambda + 2.0 * lambda * lambda) / nw).sqrt();
    ctx.assert_le("flip_mean_dev", (mean - lambda).abs(), 3.0 * se_mean);
    ctx.assert_le("flip_variance_dev", (var - lambda).abs(), 3.0 * se_var);
    #[derive(Serialize)]
    struct FlipStats {
        lambda: f64,
        mean: f64,
        variance: f64,
        se_mean: f64,
        se_variance: f64,
        n_walkers: usize,
    }
    write_json(
        &ctx.artifact("flips.json"),
        &FlipStats {
            lambda,
            mean,
            variance: var,
            se_mean,
            se_variance: se_var,
            n_walkers,
        },
    )?;

    ctx.finish()
}

// ---------------------------------------------------------------------------
// checkerboard: lattice path sums against enumeration and the mode solver

fn run_checkerboard(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    let mut r = ConfigReader::new(cfg);
    let x_min = r.f64("x_min", -8.0);
    let x_max = r.f64("x_max", 8.0);
    let base_sites = r.usize("base_sites", 64);
    let base_steps = r.usize("base_steps", 4);
    let rungs = r.usize("rungs", 4);
    let mass = r.f64("mass", 1.0);
    let speed = r.f64("speed", 1.0);
    let hbar = r.f64("hbar", 1.0);
    let packet_center = r.f64("packet_center", 0.0);
    let packet_width = r.f64("packet_width", 1.0);
    let packet_wavenumber = r.f64("packet_wavenumber", 1.0);
    let exact_mixing = r.bool("exact_mixing", false);
    r.check(
        x_min.is_finite() && x_max.is_finite() && x_min < x_max,
        format!("keys 'x_min'/'x_max' must bound a box, got [{x_min}, {x_max}]"),
    );
    r.check(
        base_sites >= 2,
        format!("key 'base_sites' must be at least 2, got {base_sites}"),
    );
    r.check(base_steps >= 1, "key 'base_steps' must be positive");
    r.check(
        (1..=8).contains(&rungs),
        format!("key 'rungs' must be in 1..=8, got {rungs}"),
    );
    r.check(
        mass.is_finite() && mass >= 0.0,
        format!("key 'mass' must be nonnegative, got {mass}"),
    );
    r.check(
        speed.is_finite() && speed > 0.0,
        format!("key 'speed' must be positive, got {speed}"),
    );
    r.check(
        hbar.is_finite() && hbar > 0.0,
        format!("key 'hbar' must be positive, got {hbar}"),
    );
    r.check(
        packet_width.is_finite() && packet_width > 0.0,
        format!("key 'packet_width' must be positive, got {packet_width}"),
    );
    r.check(
        packet_center.is_finite() && packet_wavenumber.is_finite(),
        "keys 'packet_center'/'packet_wavenumber' must be finite",
    );
    let eff = r.finish()?;
    let mut ctx = RunContext::create(out_root, "checkerboard", &eff.hash("checkerboard"))?;

    // Lattice vs mode solver under dt refinement: first-order mixing fits
    // order one, the symmetrized exact mixing fits order two.
    let study = CheckerboardStudyConfig {
        x_min,
        x_max,
        base_sites,
        base_steps,
        rungs,
        mass,
        speed,
        hbar,
        packet_center,
        packet_width,
        packet_wavenumber,
        exact_mixing,
    };
    let report = checkerboard_vs_dirac(&study)?;
    write_json(&ctx.artifact("convergence.json"), &report)?;
    if mass == 0.0 {
        let worst = report.l2_errors.iter().copied().fold(0.0f64, f64::max);
        ctx.assert_le("massless_agreement_l2", worst, 1e-10);
    } else {
        match report.fitted_order {
            Some(order) if exact_mixing => ctx.assert_close("lattice_order", order, 2.0, 0.2),
            Some(order) => ctx.assert_close("lattice_order", order, 1.0, 0.2),
            None => ctx.assert_that(
                "lattice_order",
                false,
                "study produced no fitted order".into(),
            ),
        }
    }

    // Massless control at two rungs: with no flips both routes advect the
    // packet exactly, so the cross-method error is pure roundoff.
    let massless = checkerboard_vs_dirac(&CheckerboardStudyConfig {
        mass: 0.0,
        rungs: 2,
        exact_mixing: false,
        ..study
    })?;
    let worst_massless = massless.l2_errors.iter().copied().fold(0.0f64, f64::max);
    ctx.assert_le("massless_control_l2", worst_massless, 1e-10);
    write_json(&ctx.artifact("massless.json"), &massless)?;

    // Path sum vs exhaustive history enumeration: identical arithmetic, so
    // the two routes must agree bit for bit.
    let egrid = Grid1D::new(x_min, x_max, 16, Boundary::Periodic)?;
    let lattice = CheckerboardLattice::continued(egrid, 10, speed, mass, hbar)?;
    let mut delta_plus = vec![Complex64::ZERO; 16];
    delta_plus[8] = Complex64::ONE;
    let delta_minus = vec![Complex64::ZERO; 16];
    let (prop_plus, prop_minus) = lattice.propagate(&delta_plus, &delta_minus)?;
    let (enum_plus, enum_minus) = enumerate_paths(&lattice, 8, true)?;
    let enum_dev = prop_plus
        .iter()
        .zip(&enum_plus)
        .chain(prop_minus.iter().zip(&enum_minus))
        .map(|(a, b)| (a - b).norm())
        .fold(0.0f64, f64::max);
    ctx.assert_that(
        "path_sum_matches_enumeration",
        enum_dev == 0.0,
        format!("max difference {} over 10 steps", fmt_f64(enum_dev)),
    );
    #[derive(Serialize)]
    struct EnumerationCheck {
        sites: usize,
        steps: usize,
        max_difference: f64,
    }
    write_json(
        &ctx.artifact("enumeration.json"),
        &EnumerationCheck {
            sites: 16,
            steps: 10,
            max_difference: enum_dev,
        },
    )?;

    // Mode-solver dispersion: one short step per plane wave recovers
    // omega(k) = sqrt((m c^2)^2 + (c hbar k)^2) / hbar from the overlap phase.
    let dgrid = Grid1D::new(x_min, x_max, 64, Boundary::Periodic)?;
    let ddt = 0.01;
    let mode_prop = WeylPropagator::new(&dgrid, mass, speed, hbar, ddt)?;
    let mut disp_csv = CsvWriter::create(
        &ctx.artifact("dispersion.csv"),
        "k,measured_omega,predicted_omega",
    )?;
    let mut worst_disp = 0.0f64;
    for k in dgrid.wavenumbers() {
        let omega = dispersion_frequency(mass, speed, hbar, k);
        let a = speed * hbar * k;
        let mc2 = mass * speed * speed;
        // Positive-frequency eigenvector of [[a, mc2], [mc2, -a]], taking
        // whichever algebraic form keeps the larger norm.
        let (v0, v1) = if (hbar * omega + a).abs() >= mc2.abs() {
            (hbar * omega + a, mc2)
        } else {
            (mc2, hbar * omega - a)
        };
        let norm = (v0 * v0 + v1 * v1).sqrt();
        let (v0, v1) = if norm > 0.0 {
            (v0 / norm, v1 / norm)
        } else {
            (1.0, 0.0)
        };
        let plus: Vec<Complex64> = dgrid
            .points()
            .map(|x| Complex64::from_polar(v0, k * x))
            .collect();
        let minus: Vec<Complex64> = dgrid
            .points()
            .map(|x| Complex64::from_polar(v1, k * x))
            .collect();
        let mut wave = WeylSpinor::new(
            dgrid.clone(),
            plus.clone(),
            minus.clone(),
            mass,
            speed,
            hbar,
        )?;
        mode_prop.step(&mut wave)?;
        let mut overlap = Complex64::ZERO;
        for i in 0..dgrid.len() {
            overlap += plus[i].conj() * wave.psi_plus()[i] + minus[i].conj() * wave.psi_minus()[i];
        }
        let measured = -overlap.arg() / ddt;
        worst_disp = worst_disp.max((measured - omega).abs());
        disp_csv.row(&[fmt_f64(k), fmt_f64(measured), fmt_f64(omega)])?;
    }
    disp_csv.finish()?;
    ctx.assert_le("dispersion_max_error", worst_disp, 1e-9);

    // The mode solver is unitary per mode: norm drift over 10^4 steps is
    // pure roundoff.
    let mut packet = WeylSpinor::packet(
        Grid1D::new(x_min, x_max, 64, Boundary::Periodic)?,
        packet_center,
        packet_width,
        packet_wavenumber,
        mass,
        speed,
        hbar,
    )?;
    let norm_prop = WeylPropagator::new(packet.grid(), mass, speed, hbar, 1e-3)?;
    for _ in 0..10_000 {
        norm_prop.step(&mut packet)?;
    }
    let norm_drift = (packet.norm() - 1.0).abs();
    ctx.assert_le("mode_solver_norm_drift", norm_drift, 1e-10);
    #[derive(Serialize)]
    struct SpectralChecks {
        dispersion_max_error: f64,
        norm_drift: f64,
        norm_steps: usize,
    }
    write_json(
        &ctx.artifact("spectral_checks.json"),
        &SpectralChecks {
            dispersion_max_error: worst_disp,
            norm_drift,
            norm_steps: 10_000,
        },
    )?;

    ctx.finish()
}

// ---------------------------------------------------------------------------
// rs-photon: six-component field structure and the massless ladder

fn run_rs_photon(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    let mut r = ConfigReader::new(cfg);
    let mass = r.f64("mass", 0.2);
    let speed = r.f64("speed", 1.0);
    let hbar = r.f64("hbar", 1.0);
    let rungs = r.usize("rungs", 4);
    let dt = r.f64("dt", 0.05);
    let n_steps = r.usize("n_steps", 40);
    let n_points = r.usize("n_points", 64);
    let x_min = r.f64("x_min", -8.0);
    let x_max = r.f64("x_max", 8.0);
    r.check(
        mass.is_finite() && mass > 0.0,
        format!("key 'mass' must be positive (it tops the halving ladder), got {mass}"),
    );
    r.check(
        speed.is_finite() && speed > 0.0,
        format!("key 'speed' must be positive, got {speed}"),
    );
    r.check(
        hbar.is_finite() && hbar > 0.0,
        format!("key 'hbar' must be positive, got {hbar}"),
    );
    r.check(
        (2..=10).contains(&rungs),
        format!("key 'rungs' must be in 2..=10, got {rungs}"),
    );
    r.check(
        dt.is_finite() && dt > 0.0,
        format!("key 'dt' must be positive, got {dt}"),
    );
    r.check(n_steps >= 1, "key 'n_steps' must be positive");
    r.check(
        n_points >= 8,
        format!("key 'n_points' must be at least 8, got {n_points}"),
    );
    r.check(
        x_min.is_finite() && x_max.is_finite() && x_min < x_max,
        format!("keys 'x_min'/'x_max' must bound a box, got [{x_min}, {x_max}]"),
    );
    let eff = r.finish()?;
    let mut ctx = RunContext::create(out_root, "rs-photon", &eff.hash("rs-photon"))?;

    // Structural identities: the mass matrix squares to the identity with no
    // rounding at all, and the per-mode generator is Hermitian.
    let beta = beta_matrix();
    let mut beta_defect = 0.0f64;
    for i in 0..6 {
        for j in 0..6 {
            let mut entry = Complex64::ZERO;
            for k in 0..6 {
                entry += beta[i][k] * beta[k][j];
            }
            let expected = if i == j {
                Complex64::ONE
            } else {
                Complex64::ZERO
            };
            beta_defect = beta_defect.max((entry - expected).norm());
        }
    }
    ctx.assert_that(
        "beta_squared_identity",
        beta_defect == 0.0,
        format!("max entry defect {}", fmt_f64(beta_defect)),
    );
    let mut herm_defect = 0.0f64;
    for &k in &[-3.0, -1.0, 0.0, 1.7, 5.0] {
        let h = h_matrix(k, mass, speed, hbar);
        for i in 0..6 {
            for j in 0..6 {
                herm_defect = herm_defect.max((h[i][j] - h[j][i].conj()).norm());
            }
        }
    }
    ctx.assert_le("mode_generator_hermitian", herm_defect, 1e-12);

    // Massless ladder: halving the mass halves the distance to the massless
    // run, and one linear constant bounds the whole ladder.
    let grid = Grid1D::new(x_min, x_max, n_points, Boundary::Periodic)?;
    let template = {
        let e = helicity_vector(1);
        let envelope: Vec<Complex64> = grid
            .points()
            .map(|x| Complex64::new((-x * x / 2.0).exp(), 0.0))
            .collect();
        let f_plus = [
            envelope.iter().map(|g| g * e[0]).collect(),
            envelope.iter().map(|g| g * e[1]).collect(),
            envelope.iter().map(|g| g * e[2]).collect(),
        ];
        let zeros = vec![Complex64::ZERO; grid.len()];
        let f_minus = [zeros.clone(), zeros.clone(), zeros];
        let mut st =
            crate::dirac::RsDiracState::new(grid.clone(), f_plus, f_minus, mass, speed, hbar)?;
        st.normalize()?;
        st
    };
    let masses: Vec<f64> = (0..rungs).map(|k| mass / 2.0f64.powi(k as i32)).collect();
    let ladder = massless_limit_study(&template, &masses, dt, n_steps)?;
    let worst_ratio = ladder
        .successive_differences
        .windows(2)
        .map(|w| (w[0] / w[1] - 2.0).abs())
        .fold(0.0f64, f64::max);
    ctx.assert_le("ladder_halving_ratio_dev", worst_ratio, 0.3);
    let linear_c = ladder.differences_to_massless[0] / ladder.masses[0];
    let worst_bound = ladder
        .masses
        .iter()
        .zip(&ladder.differences_to_massless)
        .map(|(m, d)| d / (linear_c * m))
        .fold(0.0f64, f64::max);
    ctx.assert_le("ladder_linear_bound", worst_bound, 1.05);
    match ladder.fitted_mass_order {
        Some(order) => ctx.assert_close("ladder_mass_order", order, 1.0, 0.2),
        None => ctx.assert_that("ladder_mass_order", false, "no fitted order".into()),
    }
    write_json(&ctx.artifact("ladder.json"), &ladder)?;

    // Unitary evolution: norm drift over 10^4 steps stays at roundoff.
    let mut state = template.with_mass(mass)?;
    let prop = RsDiracPropagator::new(&grid, mass, speed, hbar, 1e-3)?;
    for _ in 0..10_000 {
        prop.step(&mut state)?;
    }
    let norm_drift = (state.norm() - 1.0).abs();
    ctx.assert_le("rs_norm_drift", norm_drift, 1e-10);

    // Rest-frame oscillation: at k = 0 the generator is mc^2 beta, so
    // beta^2 = 1 gives the closed form cos(theta) - i sin(theta) beta.
    let n = grid.len();
    let mut rest = crate::dirac::RsDiracState::new(
        grid.clone(),
        [
            vec![Complex64::new(1.0, 0.0); n],
            vec![Complex64::ZERO; n],
            vec![Complex64::ZERO; n],
        ],
        [
            vec![Complex64::ZERO; n],
            vec![Complex64::ZERO; n],
            vec![Complex64::ZERO; n],
        ],
        mass,
        speed,
        hbar,
    )?;
    let psi0: Vec<Complex64> = {
        let c = rest.components();
        (0..6).map(|i| c[i][0]).collect()
    };
    let osc_dt = 0.01;
    let osc_steps = 200;
    let rest_prop = RsDiracPropagator::new(&grid, mass, speed, hbar, osc_dt)?;
    for _ in 0..osc_steps {
        rest_prop.step(&mut rest)?;
    }
    let theta = mass * speed * speed * (osc_steps as f64 * osc_dt) / hbar;
    let mut oracle = [Complex64::ZERO; 6];
    for i in 0..6 {
        let mut mixed = Complex64::ZERO;
        for j in 0..6 {
            mixed += beta[i][j] * psi0[j];
        }
        oracle[i] = theta.cos() * psi0[i] - Complex64::i() * theta.sin() * mixed;
    }
    let comps = rest.components();
    let mut rest_dev = 0.0f64;
    for i in 0..6 {
        for v in comps[i] {
            rest_dev = rest_dev.max((v - oracle[i]).norm());
        }
    }
    ctx.assert_le("rest_frame_oscillation", rest_dev, 1e-10);

    #[derive(Serialize)]
    struct Structure {
        beta_squared_defect: f64,
        hermiticity_defect: f64,
        rest_oscillation_error: f64,
        rest_angle: f64,
    }
    write_json(
        &ctx.artifact("structure.json"),
        &Structure {
            beta_squared_defect: beta_defect,
            hermiticity_defect: herm_defect,
            rest_oscillation_error: rest_dev,
            rest_angle: theta,
        },
    )?;
    #[derive(Serialize)]
    struct NormDrift {
        drift: f64,
        steps: usize,
        dt: f64,
    }
    write_json(
        &ctx.artifact("norm.json"),
        &NormDrift {
            drift: norm_drift,
            steps: 10_000,
            dt: 1e-3,
        },
    )?;

    ctx.finish()
}

// ---------------------------------------------------------------------------
// rs-field: structure constants and the non-Abelian residual ladder

/// Fixed, generic electric probe: three non-parallel vectors per adjoint
/// index, linear in the index so no two are proportional.
fn probe_e_field(dim: usize) -> Vec<[f64; 3]> {
    (0..dim)
        .map(|a| {
            let s = (a + 1) as f64;
            [0.3 + 0.1 * s, -0.2 + 0.07 * s, 0.15 * s - 0.4]
        })
        .collect()
}

fn probe_b_field(dim: usize) -> Vec<[f64; 3]> {
    (0..dim)
        .map(|a| {
            let s = (a + 1) as f64;
            [0.05 * s - 0.3, 0.22 - 0.04 * s, 0.1 + 0.02 * s]
        })
        .collect()
}

fn run_rs_field(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    let mut r = ConfigReader::new(cfg);
    let n = r.usize("n", 2);
    let g = r.f64("g", 0.1);
    r.check(
        (2..=6).contains(&n),
        format!("key 'n' must be in 2..=6, got {n}"),
    );
    r.check(
        g.is_finite() && g >= 0.0,
        format!("key 'g' must be nonnegative, got {g}"),
    );
    let eff = r.finish()?;
    let mut ctx = RunContext::create(out_root, "rs-field", &eff.hash("rs-field"))?;

    // Structure constants for su(2), su(3), su(4): total antisymmetry and
    // the Jacobi identity hold to strict tolerance, and the su(3) values
    // land on the textbook entries.
    #[derive(Serialize)]
    struct AlgebraCheck {
        n: usize,
        antisymmetry: f64,
        jacobi: f64,
    }
    let mut algebra_checks = Vec::new();
    for algebra_n in [2usize, 3, 4] {
        let algebra = SuNAlgebra::new(algebra_n)?;
        let anti = algebra.antisymmetry_residual();
        let jacobi = algebra.jacobi_residual();
        ctx.assert_le(&format!("su{algebra_n}_antisymmetry"), anti, 1e-12);
        ctx.assert_le(&format!("su{algebra_n}_jacobi"), jacobi, 1e-12);
        algebra_checks.push(AlgebraCheck {
            n: algebra_n,
            antisymmetry: anti,
            jacobi,
        });
    }
    let su3 = SuNAlgebra::new(3)?;
    ctx.assert_close("su3_f123", su3.f(0, 1, 2), 1.0, 1e-12);
    ctx.assert_close("su3_f147", su3.f(0, 3, 6), 0.5, 1e-12);
    ctx.assert_close("su3_f458", su3.f(3, 4, 7), 0.75f64.sqrt(), 1e-12);
    write_json(&ctx.artifact("algebra.json"), &algebra_checks)?;

    // With the coupling off, the two field combinations must reduce to
    // E +- iB with no arithmetic in between.
    let algebra = SuNAlgebra::new(n)?;
    let dim = algebra.dim();
    let e = probe_e_field(dim);
    let b = probe_b_field(dim);
    let free = LieField::new(algebra.clone(), e.clone(), b.clone(), 0.0)?;
    let rs_free = rs_vector(&free);
    let mut reduction_dev = 0.0f64;
    for a in 0..dim {
        for i in 0..3 {
            let plus = Complex64::new(e[a][i], b[a][i]);
            let minus = Complex64::new(e[a][i], -b[a][i]);
            reduction_dev = reduction_dev
                .max((rs_free.branch(Branch::Plus)[a][i] - plus).norm())
                .max((rs_free.branch(Branch::Minus)[a][i] - minus).norm());
        }
    }
    ctx.assert_that(
        "zero_coupling_reduction",
        reduction_dev == 0.0,
        format!("max deviation from E +- iB is {}", fmt_f64(reduction_dev)),
    );

    // The vacuum solves the field equations with zero residual outright.
    let vacuum = LieField::new(algebra.clone(), vec![[0.0; 3]; dim], vec![[0.0; 3]; dim], g)?;
    let vac = field_equation_residuals(&vacuum);
    let vac_worst = vac.plus.max.max(vac.minus.max);
    ctx.assert_that(
        "vacuum_residuals",
        vac_worst == 0.0,
        format!("max residual {}", fmt_f64(vac_worst)),
    );

    // Weak-field ladder with B^a = g f^{abc} (E^b x E^c): the two O(g)
    // terms in the magnetic variation cancel identically, leaving a cubic
    // residual, while the electric variation departs from its g = 0 value
    // quadratically.
    let su2 = SuNAlgebra::new(2)?;
    let probe = probe_e_field(su2.dim());
    let couplings = [1e-1, 1e-2, 1e-3, 1e-4];
    let scaling = weak_field_scaling(&su2, &probe, &couplings)?;
    ctx.assert_close("b_residual_cubic_slope", scaling.fitted_slope, 3.0, 0.1);
    let mut e_deviations = Vec::new();
    for &gw in &couplings {
        let bw = weak_field_magnetic(&su2, &probe, gw)?;
        let field = LieField::new(su2.clone(), probe.clone(), bw, gw)?;
        let report = field_equation_residuals(&field);
        let mut worst = 0.0f64;
        for a in 0..su2.dim() {
            let base = probe[a].iter().fold(0.0f64, |m, v| m.max(v.abs()));
            worst = worst.max((report.plus.e_residuals[a] - base).abs());
        }
        e_deviations.push(worst);
    }
    let e_slope = log_log_slope(&couplings, &e_deviations)?;
    ctx.assert_close("e_residual_quadratic_slope", e_slope, 2.0, 0.15);
    #[derive(Serialize)]
    struct ScalingRecord {
        couplings: Vec<f64>,
        b_residuals: Vec<f64>,
        b_fitted_slope: f64,
        e_deviations: Vec<f64>,
        e_fitted_slope: f64,
    }
    write_json(
        &ctx.artifact("scaling.json"),
        &ScalingRecord {
            couplings: scaling.couplings.clone(),
            b_residuals: scaling.b_residuals.clone(),
            b_fitted_slope: scaling.fitted_slope,
            e_deviations,
            e_fitted_slope: e_slope,
        },
    )?;

    // Probe field at the configured coupling: the trace- and index-form
    // Lagrangians must sit in their exact 2:1 ratio, and the field plus its
    // residual report round-trip through the JSON writers.
    let probe_field = LieField::new(algebra.clone(), e, b, g)?;
    let lagrangian = lagrangian_density(&algebra, &rs_vector(&probe_field));
    ctx.assert_that(
        "trace_index_halving",
        lagrangian.is_ok(),
        match &lagrangian {
            Ok(v) => format!("L = {}", fmt_f64(*v)),
            Err(e) => e.to_string(),
        },
    );
    write_field_json(&ctx.artifact("field.json"), &probe_field)?;
    write_residual_report(
        &ctx.artifact("residuals.json"),
        &field_equation_residuals(&probe_field),
    )?;

    ctx.finish()
}

// ---------------------------------------------------------------------------
// network: edge flows, constraints, and the lattice cross-check

fn run_network(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    let mut r = ConfigReader::new(cfg);
    let n_edges = r.usize("n_edges", 6);
    let lambda = r.f64("lambda", 1.0);
    let dt = r.f64("dt", 0.005);
    let t_final = r.f64("t_final", 1.0);
    r.check(
        (2..=4096).contains(&n_edges),
        format!("key 'n_edges' must be in 2..=4096, got {n_edges}"),
    );
    r.check(
        lambda.is_finite() && lambda > 0.0,
        format!("key 'lambda' must be positive (the decay fit needs it), got {lambda}"),
    );
    r.check(
        dt.is_finite() && dt > 0.0,
        format!("key 'dt' must be positive, got {dt}"),
    );
    r.check(
        t_final.is_finite() && t_final >= dt,
        format!("key 't_final' must be at least dt, got {t_final}"),
    );
    let eff = r.finish()?;
    let mut ctx = RunContext::create(out_root, "network", &eff.hash("network"))?;

    // Ring relaxation from an all-plus start: every edge follows the closed
    // form, the per-edge helicity sum is pinned, and the gap decays at 2 lambda.
    let net = SpinNetwork::ring(n_edges)?;
    let flow = NetworkDynamics::new(lambda)?;
    let mut amps = EdgeAmplitudes::uniform(n_edges, Complex64::ONE, Complex64::ZERO);
    let steps = ((t_final / dt).round() as usize).max(2);
    let mut series = AmplitudeSeriesWriter::create(&ctx.artifact("series.csv"), &net)?;
    series.record(0.0, &amps)?;
    let mut worst_closed = 0.0f64;
    let mut worst_sum = 0.0f64;
    let mut ts = Vec::with_capacity(steps);
    let mut log_gaps = Vec::with_capacity(steps);
    for k in 1..=steps {
        amps = flow.master_step(&net, &amps, dt)?;
        let t = k as f64 * dt;
        series.record(t, &amps)?;
        let (want_plus, want_minus) =
            master_flip_closed_form((Complex64::ONE, Complex64::ZERO), lambda, t);
        for e in 0..n_edges {
            worst_closed = worst_closed
                .max((amps.plus()[e] - want_plus).norm())
                .max((amps.minus()[e] - want_minus).norm());
            worst_sum = worst_sum.max((amps.helicity_sum(e) - Complex64::ONE).norm());
        }
        let gap = (amps.plus()[0] - amps.minus()[0]).norm();
        if gap > 1e-300 {
            ts.push(t);
            log_gaps.push(gap.ln());
        }
    }
    series.finish()?;
    ctx.assert_le("relaxation_closed_form_dev", worst_closed, 1e-8);
    ctx.assert_le("helicity_sum_drift", worst_sum, 1e-10);
    let fitted_rate = -linear_slope(&ts, &log_gaps);
    ctx.assert_close(
        "relaxation_rate",
        fitted_rate,
        2.0 * lambda,
        0.01 * 2.0 * lambda,
    );
    #[derive(Serialize)]
    struct Relaxation {
        fitted_rate: f64,
        target_rate: f64,
        closed_form_dev: f64,
        helicity_sum_drift: f64,
    }
    write_json(
        &ctx.artifact("relaxation.json"),
        &Relaxation {
            fitted_rate,
            target_rate: 2.0 * lambda,
            closed_form_dev: worst_closed,
            helicity_sum_drift: worst_sum,
        },
    )?;

    // Balanced amplitudes are fixed points of both flows to the last bit,
    // transport included.
    let hopping =
        NetworkDynamics::new(lambda)?.with_transport(TransportModel::Adjacency { hop_rate: 1.0 });
    let eq = EdgeAmplitudes::uniform(n_edges, Complex64::new(0.6, 0.1), Complex64::new(0.6, 0.1));
    let eq_master = hopping.master_step(&net, &eq, dt)?;
    let eq_continued = hopping.continued_step(&net, &eq, dt)?;
    ctx.assert_that(
        "equilibrium_fixed_point",
        eq_master == eq && eq_continued == eq,
        "balanced state reproduced bit for bit by both flows".into(),
    );

    // Two-edge witness: crossed offsets satisfy the global constraint
    // exactly while every edge carries a visible local residual.
    let witness_net = SpinNetwork::chain(2)?;
    let delta = 0.25;
    let witness = EdgeAmplitudes::new(
        vec![
            Complex64::new(1.0 + delta, 0.0),
            Complex64::new(1.0 - delta, 0.0),
        ],
        vec![
            Complex64::new(1.0 - delta, 0.0),
            Complex64::new(1.0 + delta, 0.0),
        ],
    )?;
    let constraint = flip_constraint_residuals(&witness);
    ctx.assert_that(
        "witness_global_residual",
        constraint.global == 0.0,
        format!("global residual {}", fmt_f64(constraint.global)),
    );
    ctx.assert_that(
        "witness_edge_residuals",
        constraint.per_edge.iter().all(|&p| p == 2.0 * delta),
        format!("per-edge residuals {:?}", constraint.per_edge),
    );
    write_constraint_report(&ctx.artifact("constraints.json"), &witness_net, &constraint)?;

    // Continued flow against its unitary closed form, plus norm conservation.
    let mut rotated = EdgeAmplitudes::uniform(n_edges, Complex64::ONE, Complex64::ZERO);
    let norm0 = rotated.norm_sq();
    for _ in 0..steps {
        rotated = flow.continued_step(&net, &rotated, dt)?;
    }
    let t_run = steps as f64 * dt;
    let (cf_plus, cf_minus) =
        continued_flip_closed_form((Complex64::ONE, Complex64::ZERO), lambda, t_run);
    let mut worst_continued = 0.0f64;
    for e in 0..n_edges {
        worst_continued = worst_continued
            .max((rotated.plus()[e] - cf_plus).norm())
            .max((rotated.minus()[e] - cf_minus).norm());
    }
    ctx.assert_le("continued_closed_form_dev", worst_continued, 1e-9);
    ctx.assert_le(
        "continued_norm_drift",
        (rotated.norm_sq() - norm0).abs() / norm0,
        1e-10,
    );
    #[derive(Serialize)]
    struct Continued {
        closed_form_dev: f64,
        norm_drift: f64,
        t: f64,
    }
    write_json(
        &ctx.artifact("continued.json"),
        &Continued {
            closed_form_dev: worst_continued,
            norm_drift: (rotated.norm_sq() - norm0).abs() / norm0,
            t: t_run,
        },
    )?;

    // Flip-free transport against the lattice at matching resolution: the
    // one-sided hop converges to the advected packet at first order.
    let chain_report = chain_vs_checkerboard(&ChainStudyConfig::default())?;
    write_json(&ctx.artifact("chain_convergence.json"), &chain_report)?;
    match chain_report.fitted_order {
        Some(order) => ctx.assert_that(
            "chain_lattice_order",
            order >= 0.8,
            format!("fitted order {order:.3}"),
        ),
        None => ctx.assert_that("chain_lattice_order", false, "no fitted order".into()),
    }

    ctx.finish()
}

// ---------------------------------------------------------------------------
// foam: clustered evaluation against brute force

fn run_foam(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    let mut r = ConfigReader::new(cfg);
    let foam_file = r.optional_path("foam_file");
    let mut seed_faces = None;
    if foam_file.is_some() {
        r.forbid("seed", "does not apply when 'foam_file' is given");
        r.forbid("n_faces", "does not apply when 'foam_file' is given");
    } else {
        let seed = r.require_seed("seed");
        let n_faces = r.usize("n_faces", 8);
        r.check(
            (1..=20).contains(&n_faces),
            format!("key 'n_faces' must be in 1..=20 so brute force stays feasible, got {n_faces}"),
        );
        seed_faces = Some((seed, n_faces));
    }
    let eff = r.finish()?;
    let mut ctx = RunContext::create(out_root, "foam", &eff.hash("foam"))?;

    let spec = match (&foam_file, seed_faces) {
        (Some(path), _) => read_foam_json(Path::new(path))?,
        (None, Some((seed, n_faces))) => random_connected_foam(seed, n_faces)?,
        (None, None) => unreachable!("reader enforces one of file or seed"),
    };
    let clusters = face_clusters(&spec);
    let fast = foam_amplitude(&spec, FoamStrategy::Clustered)?;
    let brute = if spec.faces().len() <= MAX_ENUMERATED_FACES {
        Some(foam_amplitude(&spec, FoamStrategy::BruteForce)?)
    } else {
        None
    };
    match brute {
        Some(brute) if clusters.len() <= 1 => ctx.assert_that(
            "clustered_equals_brute",
            bits_equal(fast, brute),
            format!(
                "single cluster: {} vs {}",
                fmt_f64(fast.re),
                fmt_f64(brute.re)
            ),
        ),
        Some(brute) => ctx.assert_le(
            "clustered_equals_brute",
            (fast - brute).norm(),
            1e-12 * (1.0 + brute.norm()),
        ),
        None => ctx.assert_that(
            "amplitude_finite",
            fast.re.is_finite() && fast.im.is_finite(),
            format!(
                "{} faces exceed the enumeration cap; clustered value only",
                spec.faces().len()
            ),
        ),
    }

    // Control with the same combinatorics but trivial weights: every
    // assignment contributes 2^-n, so the sum is exactly one.
    let mut trivial_control = None;
    if foam_file.is_none() {
        let half = Complex64::new(0.5, 0.0);
        let faces: Vec<FoamFace> = spec
            .faces()
            .iter()
            .map(|f| FoamFace::new(f.id(), half, half))
            .collect();
        let vertices: Vec<FoamVertex> = spec
            .vertices()
            .iter()
            .map(|v| {
                FoamVertex::new(
                    v.id(),
                    v.faces().to_vec(),
                    vec![Complex64::ONE; 1 << v.faces().len()],
                )
            })
            .collect();
        let trivial = FoamSpec::new(faces, vertices)?;
        let flat = foam_amplitude(&trivial, FoamStrategy::Clustered)?;
        let flat_brute = foam_amplitude(&trivial, FoamStrategy::BruteForce)?;
        ctx.assert_that(
            "trivial_weights_unity",
            flat == Complex64::ONE && flat_brute == Complex64::ONE,
            format!(
                "clustered {} brute {}",
                fmt_f64(flat.re),
                fmt_f64(flat_brute.re)
            ),
        );
        trivial_control = Some(flat);
    }

    write_foam_json(&ctx.artifact("foam.json"), &spec)?;
    #[derive(Serialize)]
    struct AmplitudeRecord {
        clustered: [f64; 2],
        brute_force: Option<[f64; 2]>,
        clusters: usize,
        n_faces: usize,
        trivial_control: Option<[f64; 2]>,
    }
    write_json(
        &ctx.artifact("amplitude.json"),
        &AmplitudeRecord {
            clustered: [fast.re, fast.im],
            brute_force: brute.map(|b| [b.re, b.im]),
            clusters: clusters.len(),
            n_faces: spec.faces().len(),
            trivial_control: trivial_control.map(|c| [c.re, c.im]),
        },
    )?;

    ctx.finish()
}

// ---------------------------------------------------------------------------
// all: the full battery under fixed defaults

fn run_all(cfg: &ConfigMap, out_root: &Path) -> Result<RunManifest> {
    if !cfg.is_empty() {
        return Err(Error::config(
            "'all' runs every subcommand with fixed defaults; configure subcommands individually",
        ));
    }
    let eff = ConfigReader::new(cfg).finish()?;
    let mut ctx = RunContext::create(out_root, "all", &eff.hash("all"))?;

    #[derive(Serialize)]
    struct SubSummary {
        subcommand: String,
        config_hash: String,
        passed: bool,
        assertions: usize,
    }
    let mut summaries = Vec::new();
    for sub in Subcommand::EACH {
        let mut sub_cfg = ConfigMap::empty();
        if matches!(
            sub,
            Subcommand::Nelson | Subcommand::Telegraph | Subcommand::Foam
        ) {
            sub_cfg.set("seed", "1701");
        }
        let manifest = run(sub, &sub_cfg, out_root)?;
        let passed_count = manifest.assertions.iter().filter(|a| a.passed).count();
        ctx.assert_that(
            &format!("{}_passed", sub.name().replace('-', "_")),
            manifest.passed,
            format!(
                "{}/{} assertions, hash {}",
                passed_count,
                manifest.assertions.len(),
                manifest.config_hash
            ),
        );
        summaries.push(SubSummary {
            subcommand: sub.name().to_string(),
            config_hash: manifest.config_hash,
            passed: manifest.passed,
            assertions: manifest.assertions.len(),
        });
    }
    write_json(&ctx.artifact("summary.json"), &summaries)?;
    ctx.finish()
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::collections::BTreeMap;
    use std::fs;

    fn tmp_dir(tag: &str) -> std::path::PathBuf {
        let dir =
            std::env::temp_dir().join(format!("stochos-harness-{tag}-{}", std::process::id()));
        let _ = fs::remove_dir_all(&dir);
        fs::create_dir_all(&dir).unwrap();
        dir
    }

    #[test]
    fn foam_runner_is_deterministic_byte_for_byte() {
        let out = tmp_dir("foam");
        let mut cfg = ConfigMap::empty();
        cfg.set("seed", "42");
        cfg.set("n_faces", "6");
        let first = run(Subcommand::Foam, &cfg, &out).unwrap();
        assert!(first.passed);
        let dir = out.join("foam").join(&first.config_hash);
        let mut before = BTreeMap::new();
        for name in &first.outputs {
            before.insert(name.clone(), fs::read(dir.join(name)).unwrap());
        }
        let second = run(Subcommand::Foam, &cfg, &out).unwrap();
        assert_eq!(first.config_hash, second.config_hash);
        for name in &second.outputs {
            assert_eq!(
                before.get(name).unwrap(),
                &fs::read(dir.join(name)).unwrap(),
                "artifact {name} changed between identical runs"
            );
        }
        fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn foam_runner_rejects_seed_next_to_a_file() {
        let out = tmp_dir("foam-conflict");
        let mut cfg = ConfigMap::empty();
        cfg.set("foam_file", "/nonexistent.json");
        cfg.set("seed", "7");
        match run(Subcommand::Foam, &cfg, &out) {
            Err(Error::Config(problems)) => {
                assert!(
                    problems.iter().any(|p| p.contains("'seed'")),
                    "{problems:?}"
                );
            }
            other => panic!("expected a config error, got {other:?}"),
        }
        fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn missing_seed_is_a_config_error_naming_the_key() {
        let out = tmp_dir("noseed");
        let outcome = run(Subcommand::Telegraph, &ConfigMap::empty(), &out);
        match &outcome {
            Err(Error::Config(problems)) => {
                assert!(
                    problems.iter().any(|p| p.contains("'seed'")),
                    "{problems:?}"
                );
            }
            other => panic!("expected a config error, got {other:?}"),
        }
        assert_eq!(exit_code(&outcome), 2);
        fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn zero_particles_is_a_config_error_naming_the_key() {
        let out = tmp_dir("zerop");
        let mut cfg = ConfigMap::empty();
        cfg.set("seed", "1");
        cfg.set("n_particles", "0");
        match run(Subcommand::Nelson, &cfg, &out) {
            Err(Error::Config(problems)) => {
                assert!(
                    problems.iter().any(|p| p.contains("'n_particles'")),
                    "{problems:?}"
                );
            }
            other => panic!("expected a config error, got {other:?}"),
        }
        fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn all_rejects_custom_configuration() {
        let out = tmp_dir("all-cfg");
        let mut cfg = ConfigMap::empty();
        cfg.set("seed", "1");
        assert_eq!(exit_code(&run(Subcommand::All, &cfg, &out)), 2);
        fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn network_runner_passes_and_writes_its_artifacts() {
        let out = tmp_dir("network");
        let manifest = run(Subcommand::Network, &ConfigMap::empty(), &out).unwrap();
        assert!(manifest.passed, "{:?}", manifest.assertions);
        let dir = out.join("network").join(&manifest.config_hash);
        for name in [
            "series.csv",
            "relaxation.json",
            "constraints.json",
            "continued.json",
            "chain_convergence.json",
            "manifest.json",
        ] {
            assert!(dir.join(name).is_file(), "missing {name}");
        }
        assert_eq!(exit_code(&Ok(manifest)), 0);
        fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn rs_field_runner_checks_both_scaling_slopes() {
        let out = tmp_dir("rs-field");
        let manifest = run(Subcommand::RsField, &ConfigMap::empty(), &out).unwrap();
        assert!(manifest.passed, "{:?}", manifest.assertions);
        let cubic = manifest
            .assertions
            .iter()
            .find(|a| a.name == "b_residual_cubic_slope")
            .unwrap();
        assert!(cubic.passed);
        assert!(manifest
            .assertions
            .iter()
            .any(|a| a.name == "e_residual_quadratic_slope" && a.passed));
        fs::remove_dir_all(&out).unwrap();
    }

    #[test]
    fn subcommand_names_round_trip() {
        for sub in Subcommand::EACH {
            assert_eq!(Subcommand::parse(sub.name()), Some(sub));
        }
        assert_eq!(Subcommand::parse("all"), Some(Subcommand::All));
        assert_eq!(Subcommand::parse("bogus"), None);
    }
}
