//! Acceptance suite: one PASS/FAIL line per criterion, with the tolerance
//! and runtime budget of each pinned below. Exits non-zero if any fails.

use std::f64::consts::{E, PI};
use std::process::ExitCode;
use std::time::{Duration, Instant};

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use rdbound::bounds::{
    cantor_bound, cantor_sigma, circle_bound, circle_delta_grid, circle_slb, classical_slb, make_curve, minimize_q,
    p_of_s, p_prime, q_of_s, r_lower, solve_s0, BoundKind, CurveMetadata, TheoremOneInput,
};
use rdbound::measures::{
    cantor_certificate, circle_subregularity, euclidean_unit_ball_volume, globalize_constant, j_delta_max,
    jittered_centers, validate_certificate, DistortionSpec, IfsMeasure, IfsSpec, LebesgueSpace, MeasureModel,
    Provenance, SubregularityCertificate, UniformCircle,
};
use rdbound::numerics::{lin_space, log_space, ToleranceConfig};
use rdbound::sandwich::{binary_hamming, blahut_arimoto, discretize_model, sandwich};

const TOL_GAUSSIAN: f64 = 1e-9;
const TOL_CANTOR: f64 = 1e-12;
const TOL_CANTOR_SLOPE: f64 = 1e-9;
const TOL_CHAIN: f64 = 1e-4;
const TOL_SOLVER_AGREEMENT: f64 = 1e-5;
const TOL_FD_RELATIVE: f64 = 1e-6;
const MC_SAMPLES: usize = 100_000;
const MC_CENTERS: usize = 200;
const MC_RADII: usize = 20;
const J_DELTA_LIMIT: usize = 3;
const TOL_BA_BINARY: f64 = 1e-6;
const TOL_SANDWICH: f64 = 1e-6;

type Outcome = Result<String, String>;

fn ensure(ok: bool, msg: impl FnOnce() -> String) -> Result<(), String> {
    if ok {
        Ok(())
    } else {
        Err(msg())
    }
}

fn err<E: std::fmt::Display>(e: E) -> String {
    e.to_string()
}

/// 1. Gaussian source: explicit bound = classical SLB = ½ log(1/D).
fn gaussian_equality() -> Outcome {
    let line = LebesgueSpace::gaussian(1).map_err(err)?;
    let h = 0.5 * (2.0 * PI * E).ln();
    let input = TheoremOneInput::new(h, line.certificate(), 2.0).map_err(err)?;
    let v1 = euclidean_unit_ball_volume(1).map_err(err)?;
    let tol = ToleranceConfig::default();
    let mut worst: f64 = 0.0;
    for d in [0.01, 0.1, 0.5] {
        let rl = r_lower(&input, d, &tol).map_err(err)?;
        let slb = classical_slb(h, 1, 2.0, v1, d).map_err(err)?;
        let want = 0.5 * (1.0 / d).ln();
        worst = worst.max((rl - want).abs()).max((slb - want).abs());
    }
    ensure(worst <= TOL_GAUSSIAN, || format!("max deviation {worst:e}"))?;
    Ok(format!("max |R - log(1/D)/2| = {worst:.1e}"))
}

/// 2. Cantor: generic explicit bound against the closed form and its slope.
fn cantor_closed_form() -> Outcome {
    let input = TheoremOneInput::new(0.0, cantor_certificate(), 2.0).map_err(err)?;
    let tol = ToleranceConfig::default();
    let grid = log_space(1e-4, 1e-1, 50);
    let mut worst: f64 = 0.0;
    let mut rates = Vec::new();
    for &d in &grid {
        let generic = r_lower(&input, d, &tol).map_err(err)?;
        worst = worst.max((generic - cantor_bound(d).map_err(err)?).abs());
        rates.push(generic);
    }
    // 50-digit evaluations of the closed form
    for (d, want) in [(1e-4, 1.238_163_819_020_396), (1e-3, 0.511_779_096_370_373_7), (1e-1, -0.940_990_348_929_670_95)] {
        worst = worst.max((r_lower(&input, d, &tol).map_err(err)? - want).abs());
    }
    let sigma = cantor_sigma();
    let slope_err = grid
        .windows(2)
        .zip(rates.windows(2))
        .map(|(d, r)| ((r[0] - r[1]) / (d[1] / d[0]).ln() - sigma).abs())
        .fold(0.0, f64::max);
    ensure(worst <= TOL_CANTOR, || format!("max deviation {worst:e}"))?;
    ensure(slope_err <= TOL_CANTOR_SLOPE, || format!("slope deviation {slope_err:e}"))?;
    Ok(format!("max deviation {worst:.1e}, slope deviation {slope_err:.1e}"))
}

/// 3. Circle: ordering R_L ≤ R_SLB, monotone curves, gap shrinking as D → 0.
fn circle_ordering() -> Outcome {
    let tol = ToleranceConfig::default();
    let grid = log_space(1e-4, 1.0 / 3.0, 60);
    let delta_grid = circle_delta_grid();
    let meta = CurveMetadata::default();
    let lower = make_curve(BoundKind::RLower, &grid, meta.clone(), |d| circle_bound(d, &delta_grid, &tol).map(|r| r.0))
        .map_err(err)?;
    let slb = make_curve(BoundKind::NumericSlb, &grid, meta, |d| circle_slb(d, &tol)).map_err(err)?;
    ensure(lower.gaps() == 0 && slb.gaps() == 0, || "curve has gaps".into())?;
    let mut worst = f64::NEG_INFINITY;
    for (l, s) in lower.points.iter().zip(&slb.points) {
        worst = worst.max(l.rate.unwrap() - s.rate.unwrap());
    }
    ensure(worst <= TOL_CHAIN, || format!("R_L exceeds R_SLB by {worst:e}"))?;
    let raw_monotone = |c: &rdbound::bounds::BoundCurve| c.points.windows(2).all(|w| w[1].rate <= w[0].rate);
    ensure(raw_monotone(&lower) && raw_monotone(&slb), || "a curve increases".into())?;
    let gap = |d: f64| -> Result<f64, String> {
        Ok(circle_slb(d, &tol).map_err(err)? - circle_bound(d, &delta_grid, &tol).map_err(err)?.0)
    };
    let (small, large) = (gap(1e-4)?, gap(1e-1)?);
    ensure(small < large, || format!("gap at 1e-4 ({small}) not below gap at 1e-1 ({large})"))?;
    Ok(format!(
        "max R_L - R_SLB = {worst:.2e}, gap {small:.4} at D=1e-4 vs {large:.4} at D=1e-1"
    ))
}

fn random_certificate(rng: &mut ChaCha8Rng) -> TheoremOneInput {
    let m = rng.random_range(0.5..2.0);
    let k = rng.random_range(1.0..4.0);
    let delta0: f64 = rng.random_range(0.5..1.0);
    let c = rng.random_range(0.1..0.9) * delta0.powf(-m);
    let cert = SubregularityCertificate::new(m, c, delta0, 1.0, Provenance::Analytic).unwrap();
    TheoremOneInput::new(0.0, cert, k).unwrap()
}

/// 4. Convexity of q(·, D), agreement of the two solvers, p′ vs differences.
fn convexity_and_solvers() -> Outcome {
    let mut rng = ChaCha8Rng::seed_from_u64(20);
    let tol = ToleranceConfig::default();
    let s_grid = log_space(1e-4, 1e2, 100);
    let mut worst_agreement: f64 = 0.0;
    let mut worst_fd: f64 = 0.0;
    for _ in 0..10 {
        let input = random_certificate(&mut rng);
        for d in [1e-3, 1e-2, 1e-1] {
            let q: Vec<f64> = s_grid.iter().map(|&s| q_of_s(&input, s, d).unwrap()).collect();
            for i in 1..s_grid.len() - 1 {
                let left = (q[i] - q[i - 1]) / (s_grid[i] - s_grid[i - 1]);
                let right = (q[i + 1] - q[i]) / (s_grid[i + 1] - s_grid[i]);
                ensure(right > left, || format!("q not convex at s={} for {input:?}", s_grid[i]))?;
            }
            let root = solve_s0(&input, d, &tol).map_err(err)?;
            let direct = minimize_q(&input, d, &tol.with_abs_tol(1e-12)).map_err(err)?;
            worst_agreement = worst_agreement.max((root.argmin - direct.argmin).abs());
        }
        for s in [0.01, 0.1, 1.0, 10.0] {
            let h = 1e-5 * s;
            let fd = (p_of_s(&input, s + h).unwrap() - p_of_s(&input, s - h).unwrap()) / (2.0 * h);
            let exact = p_prime(&input, s).unwrap();
            worst_fd = worst_fd.max((fd - exact).abs() / exact.abs());
        }
    }
    ensure(worst_agreement <= TOL_SOLVER_AGREEMENT, || format!("solvers disagree by {worst_agreement:e}"))?;
    ensure(worst_fd <= TOL_FD_RELATIVE, || format!("p' off by relative {worst_fd:e}"))?;
    Ok(format!("solver gap {worst_agreement:.1e}, p' relative error {worst_fd:.1e}"))
}

fn centers(model: &dyn MeasureModel, lo: f64, hi: f64, spread: f64, seed: u64) -> Vec<Vec<f64>> {
    let mut out = jittered_centers(model, MC_CENTERS / 2, spread, seed).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(seed + 1);
    while out.len() < MC_CENTERS {
        out.push((0..model.dim()).map(|_| rng.random_range(lo..hi)).collect());
    }
    out
}

/// 5. Monte-Carlo validation of the shipped certificates and a falsified one.
fn certificates() -> Outcome {
    let dist = DistortionSpec::euclidean(2.0).map_err(err)?;
    let circle_centers = centers(&UniformCircle, -1.2, 1.2, 0.1, 50);
    let mut report = Vec::new();
    for dh in [0.25, 0.5, 1.0] {
        let cert = circle_subregularity(dh).map_err(err)?;
        let radii = lin_space(dh / MC_RADII as f64, dh * (1.0 - 1e-9), MC_RADII);
        let check = validate_certificate(&UniformCircle, &dist, &cert, &circle_centers, &radii, MC_SAMPLES, 51)
            .map_err(err)?;
        ensure(check.passed, || format!("circle certificate {dh} failed: {:?}", check.witness))?;
        report.push(format!("circle {dh}: ratio {:.3}", check.worst_ratio));
    }
    let cantor = IfsMeasure::cantor();
    let cantor_centers = centers(&cantor, -0.1, 1.1, 0.01, 52);
    let radii = log_space(1e-3, 1.0, MC_RADII);
    let cert = cantor_certificate();
    let check = validate_certificate(&cantor, &dist, &cert, &cantor_centers, &radii, MC_SAMPLES, 53).map_err(err)?;
    ensure(check.passed, || format!("Cantor certificate failed: {:?}", check.witness))?;
    report.push(format!("cantor: ratio {:.3}", check.worst_ratio));

    let good = circle_subregularity(1.0).map_err(err)?;
    let falsified = SubregularityCertificate { c: good.c / 10.0, ..good };
    let radii = lin_space(0.05, 1.0 - 1e-9, MC_RADII);
    let check =
        validate_certificate(&UniformCircle, &dist, &falsified, &circle_centers, &radii, MC_SAMPLES, 54).map_err(err)?;
    let witness = check.witness.ok_or("falsified circle constant was not caught")?;
    let falsified = SubregularityCertificate { c: cert.c / 10.0, ..cert };
    let check = validate_certificate(&cantor, &dist, &falsified, &cantor_centers, &log_space(1e-3, 1.0, MC_RADII), MC_SAMPLES, 55)
        .map_err(err)?;
    ensure(!check.passed && check.witness.is_some(), || "falsified Cantor constant was not caught".into())?;
    report.push(format!(
        "c/10 witness at {:?}, delta {:.3}",
        witness.center.iter().map(|v| (v * 1e3).round() / 1e3).collect::<Vec<_>>(),
        witness.delta
    ));
    Ok(report.join("; "))
}

/// 6. Exhaustive J_δ count for the Cantor system.
fn j_delta() -> Outcome {
    let xs: Vec<Vec<f64>> = lin_space(-0.1, 1.1, 1001).into_iter().map(|x| vec![x]).collect();
    let deltas: Vec<f64> = (1..=10).map(|j| 1.5 * 3f64.powi(-j)).collect();
    let worst = j_delta_max(&IfsSpec::cantor(), &xs, &deltas, 64).map_err(err)?;
    ensure(worst.max <= J_DELTA_LIMIT, || format!("|J| = {} at x={:?}, delta={}", worst.max, worst.x, worst.delta))?;
    Ok(format!("max |J| = {} over {} evaluations", worst.max, worst.evaluations))
}

/// 7. Blahut–Arimoto: binary closed form and sandwich above the lower bounds.
fn sandwich_consistency() -> Outcome {
    let ba_tol = ToleranceConfig::new(1e-10, 1e-12, 200_000).map_err(err)?;
    let binary = binary_hamming(0.5).map_err(err)?;
    let mut worst_binary: f64 = 0.0;
    for d in [0.05f64, 0.1, 0.2, 0.4] {
        let pt = blahut_arimoto(&binary, ((1.0 - d) / d).ln(), &ba_tol).map_err(err)?;
        let hb = -pt.distortion * pt.distortion.ln() - (1.0 - pt.distortion) * (1.0 - pt.distortion).ln();
        worst_binary = worst_binary.max((pt.rate - (2f64.ln() - hb)).abs());
    }
    ensure(worst_binary <= TOL_BA_BINARY, || format!("binary BA off by {worst_binary:e}"))?;

    let dist = DistortionSpec::euclidean(2.0).map_err(err)?;
    let tol = ToleranceConfig::default();
    let circle = discretize_model(&UniformCircle, &dist, 64, 64, 70).map_err(err)?;
    let delta_grid = circle_delta_grid();
    let circle_lower = |d: f64| circle_bound(d, &delta_grid, &tol).map(|r| r.0);
    let pts = sandwich(&circle, &[1.0, 1.5, 2.0, 3.0, 4.0, 6.0, 8.0], &circle_lower, &ba_tol).map_err(err)?;
    let circle_margin = pts.iter().map(|p| p.upper - p.lower).fold(f64::INFINITY, f64::min);

    let cantor_model = IfsMeasure::cantor();
    let cantor = discretize_model(&cantor_model, &dist, 64, 64, 71).map_err(err)?;
    let cantor_input = TheoremOneInput::new(0.0, cantor_certificate(), 2.0).map_err(err)?;
    let cantor_lower = |d: f64| r_lower(&cantor_input, d, &tol);
    let qts = sandwich(&cantor, &[30.0, 100.0, 300.0, 1000.0, 3000.0], &cantor_lower, &ba_tol).map_err(err)?;
    let cantor_margin = qts.iter().map(|p| p.upper - p.lower).fold(f64::INFINITY, f64::min);
    ensure(circle_margin >= -TOL_SANDWICH, || format!("circle BA below R_L by {circle_margin:e}"))?;
    ensure(cantor_margin >= -TOL_SANDWICH, || format!("Cantor BA below R_L by {cantor_margin:e}"))?;
    Ok(format!(
        "binary error {worst_binary:.1e}; min BA - R_L: circle {circle_margin:.3} ({} pts), cantor {cantor_margin:.3} ({} pts)",
        pts.len(),
        qts.len()
    ))
}

/// 8. Globalized circle certificate holds at every radius.
fn globalization() -> Outcome {
    let global = globalize_constant(&circle_subregularity(1.0).map_err(err)?).map_err(err)?;
    ensure(global.c == 1.0 && global.delta0.is_infinite(), || format!("globalized to {global:?}"))?;
    let dist = DistortionSpec::euclidean(2.0).map_err(err)?;
    let circle_centers = centers(&UniformCircle, -3.0, 3.0, 0.1, 80);
    let check = validate_certificate(&UniformCircle, &dist, &global, &circle_centers, &[0.5, 1.0, 2.0, 5.0], MC_SAMPLES, 81)
        .map_err(err)?;
    ensure(check.passed, || format!("witness {:?}", check.witness))?;
    Ok(format!("c' = {}, worst ratio {:.3} over {} balls", global.c, check.worst_ratio, check.checks))
}

fn main() -> ExitCode {
    let criteria: [(&str, Duration, fn() -> Outcome); 8] = [
        ("gaussian equality", Duration::from_secs(1), gaussian_equality),
        ("cantor closed form", Duration::from_secs(1), cantor_closed_form),
        ("circle curve ordering", Duration::from_secs(60), circle_ordering),
        ("convexity and solver agreement", Duration::from_secs(5), convexity_and_solvers),
        ("subregularity certificates", Duration::from_secs(30), certificates),
        ("J_delta exhaustive bound", Duration::from_secs(10), j_delta),
        ("sandwich consistency", Duration::from_secs(30), sandwich_consistency),
        ("radius threshold globalization", Duration::from_secs(10), globalization),
    ];
    let mut failures = 0;
    for (i, (name, budget, run)) in criteria.iter().enumerate() {
        let start = Instant::now();
        let outcome = run();
        let elapsed = start.elapsed();
        let (status, detail) = match outcome {
            Ok(detail) if elapsed <= *budget => ("PASS", detail),
            Ok(detail) => ("FAIL", format!("{detail}; over the {budget:?} budget")),
            Err(detail) => ("FAIL", detail),
        };
        if status == "FAIL" {
            failures += 1;
        }
        println!("criterion {} ({name}): {status} [{:.2} s] {detail}", i + 1, elapsed.as_secs_f64());
    }
    println!("acceptance: {} of {} criteria passed", criteria.len() - failures, criteria.len());
    if failures == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::FAILURE
    }
}
