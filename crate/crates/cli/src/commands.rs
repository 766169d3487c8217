use edgewalk_core::asymptotics::{ballistic_front, AsymptoticParams};
use edgewalk_core::coined::{coined_step, edge_to_coined, verify_intertwining, CoinOperator};
use edgewalk_core::spectral::{
    cycle_eigensystem, eigen_residual, even_odd_ratio, free_eigensystem, phase_shifted_sector, quartic_residual,
    uniform_limit_condition, Branch, SpectrumEntry,
};
use edgewalk_core::sum::CompensatedSum;
use edgewalk_core::transport::{scattering_coefficients, theta_grid, VertexScatterer};
use edgewalk_core::walk::{time_averaged_distribution, vertex_probabilities, LineWalk, PhasePattern};
use edgewalk_core::{Graph, StepOperator, WalkState};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;

use crate::config::{Command, Config, DistributionKind, Placement, RingSize, SpectrumKind, Start};
use crate::error::CliError;
use crate::table::{Cell, ResultTable};

const NORM_TOL: f64 = 1e-10;
const RESIDUAL_TOL: f64 = 1e-10;
const QUARTIC_TOL: f64 = 1e-9;
const FLUX_TOL: f64 = 1e-10;
const EQUIVALENCE_TOL: f64 = 1e-12;

pub fn run(command: Command, cfg: &Config) -> Result<ResultTable, CliError> {
    match command {
        Command::Simulate => simulate(cfg),
        Command::Average => average(cfg),
        Command::Spectrum => spectrum(cfg),
        Command::Asymptotic => asymptotic(cfg),
        Command::Scattering => scattering(cfg),
        Command::Equivalence => equivalence(cfg),
    }
}

fn pattern(cfg: &Config) -> PhasePattern {
    match cfg.phi_placement {
        Placement::None => PhasePattern::None,
        Placement::Even => PhasePattern::EvenEdges(cfg.phi),
        Placement::Odd => PhasePattern::OddEdges(cfg.phi),
        Placement::All => PhasePattern::AllEdges(cfg.phi),
    }
}

fn ring_size(cfg: &Config, command: &str) -> Result<usize, CliError> {
    match cfg.n {
        RingSize::Fixed(n) => Ok(n),
        RingSize::Auto if command == "simulate" || command == "equivalence" => Ok(LineWalk::ring_size_for(cfg.steps)),
        RingSize::Auto => Err(CliError::Config(format!("{command} needs an explicit ring size n"))),
    }
}

fn initial_state(cfg: &Config, lw: &LineWalk) -> Result<WalkState, CliError> {
    Ok(match cfg.start {
        Start::Edge(tail, head) => lw.basis(tail, head)?,
        Start::Uniform => WalkState::uniform(lw.graph()),
        Start::Random => WalkState::random(lw.graph(), &mut ChaCha8Rng::seed_from_u64(cfg.seed)),
    })
}

fn check_norm(s: &WalkState) -> Result<(), CliError> {
    let defect = (s.norm() - 1.0).abs();
    if defect > NORM_TOL {
        return Err(CliError::Numeric {
            invariant: "state norm stays 1 within 1e-10",
            detail: format!("|norm - 1| = {defect:.3e}"),
        });
    }
    Ok(())
}

fn require_no_phases(cfg: &Config, command: &str) -> Result<(), CliError> {
    if cfg.phi_placement != Placement::None && cfg.phi != 0.0 {
        return Err(CliError::Config(format!(
            "{command} describes the walk without phase shifters; set phi=0 or phi_placement=none"
        )));
    }
    Ok(())
}

fn simulate(cfg: &Config) -> Result<ResultTable, CliError> {
    let n = ring_size(cfg, "simulate")?;
    let lw = LineWalk::with_ring_size(n, cfg.steps, cfg.t, cfg.r, pattern(cfg))?;
    let s = lw.operator().evolve(&initial_state(cfg, &lw)?, cfg.steps)?;
    check_norm(&s)?;

    let mut table = ResultTable::new(Command::Simulate, cfg, vec!["index", "label", "probability"]);
    let dist = match cfg.distribution {
        DistributionKind::Edge => lw.edge_distribution(&s),
        DistributionKind::Vertex => lw.vertex_distribution(&s),
    };
    for (i, (j, p)) in dist.into_iter().enumerate() {
        table.push(vec![Cell::Int(i as i64), Cell::Int(j), Cell::Real(p)]);
    }
    table.check_distribution("probability")?;
    table.result("ring_size", n);
    table.result("line_equivalent", n >= 2 * cfg.steps + 4);
    table.result("support_99", lw.support_width(&s, 0.99));
    table.plot_column = Some("probability");
    Ok(table)
}

fn average(cfg: &Config) -> Result<ResultTable, CliError> {
    let n = ring_size(cfg, "average")?;
    let lw = LineWalk::with_ring_size(n, 0, cfg.t, cfg.r, pattern(cfg))?;
    let s = initial_state(cfg, &lw)?;
    let d = time_averaged_distribution(lw.graph(), lw.operator(), &s, cfg.m)?;

    let mut table = ResultTable::new(Command::Average, cfg, vec!["index", "label", "probability"]);
    for (e, p) in d.probabilities.iter().enumerate() {
        table.push(vec![Cell::Int(e as i64), Cell::Int(e as i64), Cell::Real(*p)]);
    }
    table.check_distribution("probability")?;
    let uniform = 1.0 / n as f64;
    let dev = d.probabilities.iter().map(|p| (p - uniform).abs()).fold(0.0, f64::max);
    table.result("max_deviation_from_uniform", format!("{dev:.16e}"));
    if cfg.t.norm() > 0.0 && cfg.phi_placement == Placement::None {
        table.result("uniform_limit_condition", uniform_limit_condition(n, cfg.t)?);
    }
    table.plot_column = Some("probability");
    Ok(table)
}

fn branch_name(b: Branch) -> &'static str {
    match b {
        Branch::Plus => "plus",
        Branch::Minus => "minus",
        Branch::Degenerate => "degenerate",
    }
}

fn check_eigenpair(e: &SpectrumEntry, residual: f64) -> Result<(), CliError> {
    if residual > RESIDUAL_TOL {
        return Err(CliError::Numeric {
            invariant: "eigen residual below 1e-10",
            detail: format!("sector {} {}: residual {residual:.3e}", e.sector.k, branch_name(e.branch)),
        });
    }
    let modulus = (e.lambda.norm() - 1.0).abs();
    if modulus > RESIDUAL_TOL {
        return Err(CliError::Numeric {
            invariant: "|lambda| = 1 within 1e-10",
            detail: format!("sector {}: ||lambda| - 1| = {modulus:.3e}", e.sector.k),
        });
    }
    Ok(())
}

fn spectrum(cfg: &Config) -> Result<ResultTable, CliError> {
    let n = ring_size(cfg, "spectrum")?;
    let graph = Graph::cycle(n)?;
    match cfg.spectrum {
        SpectrumKind::Cycle => {
            require_no_phases(cfg, "the cycle spectrum")?;
            let op = StepOperator::uniform_beam_splitters(&graph, cfg.t, cfg.r, &[])?;
            let entries = if cfg.r.norm() < 1e-12 {
                free_eigensystem(n, cfg.t)?
            } else {
                cycle_eigensystem(n, cfg.t, cfg.r)?
            };
            let residuals = entries
                .par_iter()
                .map(|e| eigen_residual(&op, e))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = ResultTable::new(
                Command::Spectrum,
                cfg,
                vec!["k", "theta", "branch", "lambda_re", "lambda_im", "residual"],
            );
            for (e, res) in entries.iter().zip(residuals) {
                check_eigenpair(e, res)?;
                table.push(vec![
                    Cell::Int(e.sector.k as i64),
                    Cell::Real(e.sector.theta),
                    Cell::Text(branch_name(e.branch).into()),
                    Cell::Real(e.lambda.re),
                    Cell::Real(e.lambda.im),
                    Cell::Real(res),
                ]);
            }
            table.result("eigenpairs", entries.len());
            Ok(table)
        }
        SpectrumKind::TwoPeriodic => {
            let phases = PhasePattern::EvenEdges(cfg.phi).ring_phases(n);
            let op = StepOperator::uniform_beam_splitters(&graph, cfg.t, cfg.r, &phases)?;
            let sectors = (0..n)
                .into_par_iter()
                .map(|k| phase_shifted_sector(n, k, cfg.t, cfg.r, cfg.phi))
                .collect::<Result<Vec<_>, _>>()?;
            let mut table = ResultTable::new(
                Command::Spectrum,
                cfg,
                vec![
                    "k",
                    "theta",
                    "branch",
                    "lambda_re",
                    "lambda_im",
                    "residual",
                    "quartic_residual",
                    "even_odd_ratio",
                ],
            );
            for e in sectors.iter().flatten() {
                let res = eigen_residual(&op, e)?;
                check_eigenpair(e, res)?;
                let quartic = quartic_residual(e.lambda, e.sector.theta, cfg.t, cfg.r, cfg.phi);
                if quartic > QUARTIC_TOL {
                    return Err(CliError::Numeric {
                        invariant: "quartic residual below 1e-9",
                        detail: format!("sector {}: {quartic:.3e}", e.sector.k),
                    });
                }
                table.push(vec![
                    Cell::Int(e.sector.k as i64),
                    Cell::Real(e.sector.theta),
                    Cell::Text(branch_name(e.branch).into()),
                    Cell::Real(e.lambda.re),
                    Cell::Real(e.lambda.im),
                    Cell::Real(res),
                    Cell::Real(quartic),
                    Cell::Real(even_odd_ratio(e).unwrap_or(f64::NAN)),
                ]);
            }
            table.result("eigenpairs", table.rows.len());
            Ok(table)
        }
    }
}

fn asymptotic(cfg: &Config) -> Result<ResultTable, CliError> {
    require_no_phases(cfg, "the asymptotic comparison")?;
    let params = AsymptoticParams::new(cfg.t, cfg.r)?;
    let tau = cfg.steps;
    let half = cfg.window / 2;
    if tau <= half {
        return Err(CliError::Config(format!(
            "steps ({tau}) must exceed half the window ({half})"
        )));
    }
    let last = tau + half;
    let lw = LineWalk::new(last, cfg.t, cfg.r, PhasePattern::None)?;
    let mut s = lw.operator().evolve(&lw.basis(0, 1)?, tau - half)?;
    let jmax = last as i64;
    let width = (jmax + 1) as usize;
    let mut sim = vec![CompensatedSum::new(); width];
    let mut fixed = vec![CompensatedSum::new(); width];
    let mut scaled = vec![CompensatedSum::new(); width];
    let mut envelope = vec![CompensatedSum::new(); width];
    let samples = (last - (tau - half) + 1) as f64;
    for step in tau - half..=last {
        for j in 0..=jmax {
            let i = j as usize;
            sim[i].add(lw.edge_probability(&s, j));
            fixed[i].add(params.p_fixed_j(j, step as u64));
            let alpha = j as f64 / step as f64;
            scaled[i].add(params.p_scaled(alpha, step as u64)?.value());
            envelope[i].add(params.scaled_envelope(alpha, step as u64).unwrap_or(0.0));
        }
        if step < last {
            s = lw.operator().apply(&s)?;
        }
    }
    check_norm(&s)?;

    let mut table = ResultTable::new(
        Command::Asymptotic,
        cfg,
        vec!["j", "alpha", "simulated", "fixed_j", "scaled", "envelope"],
    );
    for j in 0..=jmax {
        let i = j as usize;
        table.push(vec![
            Cell::Int(j),
            Cell::Real(j as f64 / tau as f64),
            Cell::Real(sim[i].value() / samples),
            Cell::Real(fixed[i].value() / samples),
            Cell::Real(scaled[i].value() / samples),
            Cell::Real(envelope[i].value() / samples),
        ]);
    }
    let origin = sim[0].value() / samples;
    let law = fixed[0].value() / samples;
    table.result("origin_simulated", format!("{origin:.16e}"));
    table.result("origin_asymptotic", format!("{law:.16e}"));
    table.result("origin_relative_error", format!("{:.6e}", (origin - law).abs() / law));
    let front = ballistic_front(params.t_mag, tau as u64, 0.01)?;
    table.result("front", front);
    table.result("mu", format!("{:.16e}", params.mu));
    table.result("window_samples", samples);
    table.plot_column = Some("simulated");
    Ok(table)
}

fn scattering(cfg: &Config) -> Result<ResultTable, CliError> {
    if cfg.theta_points == 0 {
        return Err(CliError::Config("theta_points must be positive".into()));
    }
    let barrier = cfg
        .barrier
        .iter()
        .enumerate()
        .map(|(k, b)| {
            VertexScatterer::new(b.t, b.r, b.phi).map_err(|e| CliError::Config(format!("barrier vertex {k}: {e}")))
        })
        .collect::<Result<Vec<_>, _>>()?;
    let thetas = theta_grid(cfg.theta_min, cfg.theta_max, cfg.theta_points);
    let results = thetas
        .par_iter()
        .map(|&theta| scattering_coefficients(&barrier, theta))
        .collect::<Result<Vec<_>, _>>()?;

    let mut table = ResultTable::new(Command::Scattering, cfg, vec!["theta", "R", "T", "residual"]);
    let mut worst: f64 = 0.0;
    for res in &results {
        let residual = res.flux_defect();
        if residual > FLUX_TOL {
            return Err(CliError::Numeric {
                invariant: "R + T = 1 within 1e-10",
                detail: format!("theta {}: |R + T - 1| = {residual:.3e}", res.theta),
            });
        }
        worst = worst.max(residual);
        table.push(vec![
            Cell::Real(res.theta),
            Cell::Real(res.reflectance),
            Cell::Real(res.transmittance),
            Cell::Real(residual),
        ]);
    }
    let transmittance: Vec<f64> = results.iter().map(|r| r.transmittance).collect();
    let peaks: Vec<String> = (0..transmittance.len())
        .filter(|&i| {
            let left = if i > 0 { transmittance[i - 1] } else { f64::NEG_INFINITY };
            let right = transmittance.get(i + 1).copied().unwrap_or(f64::NEG_INFINITY);
            transmittance[i] >= left && transmittance[i] >= right && transmittance[i] > 0.999
        })
        .map(|i| format!("{:.16e}", thetas[i]))
        .collect();
    table.result("max_flux_defect", format!("{worst:.3e}"));
    table.result("resonance_count", peaks.len());
    table.result("resonance_theta", peaks.join(" "));
    table.plot_column = Some("T");
    Ok(table)
}

fn equivalence(cfg: &Config) -> Result<ResultTable, CliError> {
    require_no_phases(cfg, "the coined walk")?;
    let n = ring_size(cfg, "equivalence")?;
    let lw = LineWalk::with_ring_size(n, cfg.steps, cfg.t, cfg.r, PhasePattern::None)?;
    let coin = CoinOperator::from_amplitudes(cfg.t, cfg.r)?;
    let intertwining = verify_intertwining(n, cfg.t, cfg.r)?;
    if intertwining > EQUIVALENCE_TOL {
        return Err(CliError::Numeric {
            invariant: "V E = E U within 1e-12",
            detail: format!("basis deviation {intertwining:.3e}"),
        });
    }
    let mut edge = initial_state(cfg, &lw)?;
    let mut coined = edge_to_coined(lw.graph(), &edge)?;
    let mut worst: f64 = 0.0;
    for step in 0..=cfg.steps {
        let a = vertex_probabilities(lw.graph(), &edge).probabilities;
        let d = a
            .iter()
            .zip(coined.vertex_probabilities())
            .map(|(x, y)| (x - y).abs())
            .fold(0.0, f64::max);
        if d > EQUIVALENCE_TOL {
            return Err(CliError::Numeric {
                invariant: "coined vertex probabilities equal edge-walk vertex probabilities",
                detail: format!("step {step}: difference {d:.3e}"),
            });
        }
        worst = worst.max(d);
        if step < cfg.steps {
            edge = lw.operator().apply(&edge)?;
            coined = coined_step(&coined, &coin, n)?;
        }
    }
    check_norm(&edge)?;

    let mut table = ResultTable::new(
        Command::Equivalence,
        cfg,
        vec!["index", "label", "edge_probability", "vertex_probability"],
    );
    let vertex = coined.vertex_probabilities();
    let mut diff: f64 = 0.0;
    for (i, (j, p)) in lw.edge_distribution(&edge).into_iter().enumerate() {
        let q = vertex[lw.vertex_of(j)];
        diff = diff.max((p - q).abs());
        table.push(vec![Cell::Int(i as i64), Cell::Int(j), Cell::Real(p), Cell::Real(q)]);
    }
    table.check_distribution("edge_probability")?;
    table.check_distribution("vertex_probability")?;
    table.result("intertwining_deviation", format!("{intertwining:.3e}"));
    table.result("max_coined_vs_edge_vertex", format!("{worst:.3e}"));
    table.result("max_edge_vs_vertex_difference", format!("{diff:.16e}"));
    table.plot_column = Some("vertex_probability");
    Ok(table)
}
