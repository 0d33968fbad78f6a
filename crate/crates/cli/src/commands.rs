use std::path::{Path, PathBuf};

use serde::Serialize;
use serde_json::{json, Value};

use nhmagic::antidephasing::{self, evolve_average, liouvillian_spectrum, SdqParams};
use nhmagic::magic::m2_tilde_bloch;
use nhmagic::nh::{self, DqParams};
use nhmagic::qubit::{bloch_to_density, density_to_bloch};
use nhmagic::sde::{simulate_ensemble, EnsembleSpec};
use nhmagic::sweep::{
    fit_power_law, gap_diagram, gap_weighted_diagram, locate_maximum, steady_diagram, trajectory_diagram, Maximum, PhaseDiagram,
    Quantity, TrajectoryProtocol, GAP_WEIGHTED_HIGHLIGHT,
};
use nhmagic::verify::{run_all, CriterionResult, VerifyOptions};
use nhmagic::{BlochVector, Error, Hopping};

use crate::config::{EvolveConfig, EvolveRun, Model, SpectrumConfig, SweepConfig, TrajectoriesConfig};
use crate::error::{CliError, CliResult};
use crate::output::{fmt_f64, OutputDir, Table};

fn to_value<T: Serialize>(v: &T) -> Value {
    serde_json::to_value(v).unwrap_or(Value::Null)
}

fn rate_units() -> Value {
    json!({
        "gamma_decay": "J",
        "delta": "J",
        "noise": "1/J",
        "t": "1/J",
        "eigenvalues": "J",
        "gap": "J",
        "sre": "bits",
    })
}

fn signed_zero_free(v: Option<f64>) -> Option<f64> {
    v.map(|x| x + 0.0)
}

fn complex_pair(z: nhmagic::Complex64) -> [f64; 2] {
    [z.re, z.im]
}

#[derive(Serialize)]
struct NhBlock {
    eps_plus: [f64; 2],
    eps_minus: [f64; 2],
    gap: f64,
    is_exceptional: bool,
    steady_bloch: Option<BlochVector>,
    steady_sre: Option<f64>,
}

#[derive(Serialize)]
struct LiouvillianBlock {
    lambda: Vec<[f64; 2]>,
    gap: f64,
    degenerate: bool,
    coalesced: bool,
    liouville_a: f64,
    liouville_b: f64,
    residual: f64,
    steady_bloch: Option<BlochVector>,
    steady_sre: Option<f64>,
}

#[derive(Serialize)]
struct SpectrumReport {
    gap: f64,
    degenerate: bool,
    steady_bloch: Option<BlochVector>,
    steady_sre: Option<f64>,
    nh: NhBlock,
    liouvillian: Option<LiouvillianBlock>,
}

fn dq_params(hopping: Hopping, delta: f64, gamma_decay: f64) -> CliResult<DqParams> {
    let (jx, jy) = hopping.components();
    Ok(DqParams::new(jx, jy, delta, gamma_decay)?)
}

pub fn spectrum(cfg: &SpectrumConfig, out: &Path) -> CliResult<PathBuf> {
    let dq = dq_params(cfg.hopping, cfg.delta, cfg.gamma_decay)?;
    let spec = nh::nh_spectrum(&dq);
    let nh_state = nh::steady_state_bloch(&dq).ok();
    let nh_block = NhBlock {
        eps_plus: complex_pair(spec.eps_plus),
        eps_minus: complex_pair(spec.eps_minus),
        gap: spec.gap(),
        is_exceptional: spec.is_exceptional,
        steady_bloch: nh_state.map(|s| s.bloch),
        steady_sre: signed_zero_free(nh::steady_sre(&dq).ok()),
    };
    if cfg.delta != 0.0 && cfg.noise != 0.0 {
        return Err(CliError::Config(
            "at `noise`: the averaged generator has no detuning; use delta = 0 with noise".into(),
        ));
    }
    let report = if cfg.delta == 0.0 {
        let p = SdqParams::new(cfg.hopping, cfg.gamma_decay, cfg.noise)?;
        let an = liouvillian_spectrum(&p);
        let sre = signed_zero_free(antidephasing::steady_sre(&p).ok());
        SpectrumReport {
            gap: an.gap,
            degenerate: an.degenerate,
            steady_bloch: an.steady_bloch,
            steady_sre: sre,
            nh: nh_block,
            liouvillian: Some(LiouvillianBlock {
                lambda: an.lambda.iter().map(|l| complex_pair(*l)).collect(),
                gap: an.gap,
                degenerate: an.degenerate,
                coalesced: an.coalesced,
                liouville_a: an.liouville_a,
                liouville_b: an.liouville_b,
                residual: an.residual,
                steady_bloch: an.steady_bloch,
                steady_sre: sre,
            }),
        }
    } else {
        SpectrumReport {
            gap: nh_block.gap,
            degenerate: spec.is_exceptional,
            steady_bloch: nh_block.steady_bloch,
            steady_sre: nh_block.steady_sre,
            nh: nh_block,
            liouvillian: None,
        }
    };
    let dir = OutputDir::create(out, "spectrum", to_value(cfg), None)?;
    dir.write_json("spectrum.json", &report, rate_units())
}

fn time_grid(t_final: f64, n: usize) -> CliResult<Vec<f64>> {
    if !(t_final.is_finite() && t_final > 0.0) {
        return Err(CliError::Config("at `t_final`: must be finite and > 0".into()));
    }
    if n < 2 {
        return Err(CliError::Config("at `n_points`: needs at least 2 points".into()));
    }
    Ok((0..n).map(|k| t_final * k as f64 / (n - 1) as f64).collect())
}

struct EvolveRows {
    bloch: Vec<BlochVector>,
    success: Option<Vec<f64>>,
}

fn evolve_rows(run: &EvolveRun, times: &[f64]) -> CliResult<EvolveRows> {
    let r0 = run.initial.bloch()?;
    match run.model {
        Model::Nh => {
            if run.noise != 0.0 {
                return Err(CliError::Config(format!(
                    "at `runs.{}.noise`: noise applies to the average model only",
                    run.name
                )));
            }
            let p = dq_params(run.hopping, run.delta, run.gamma_decay)?;
            if let Some(psi) = run.initial.pure() {
                let mut bloch = Vec::with_capacity(times.len());
                let mut success = Vec::with_capacity(times.len());
                for &t in times {
                    let (s, sr) = nh::evolve_pure(&p, &psi, t)?;
                    bloch.push(s.bloch());
                    success.push(sr);
                }
                Ok(EvolveRows {
                    bloch,
                    success: Some(success),
                })
            } else {
                let rho0 = bloch_to_density(r0)?;
                let bloch = times
                    .iter()
                    .map(|&t| nh::evolve_density(&p, &rho0, t).map(|r| density_to_bloch(&r)))
                    .collect::<Result<Vec<_>, Error>>()?;
                Ok(EvolveRows { bloch, success: None })
            }
        }
        Model::Average => {
            if run.delta != 0.0 {
                return Err(CliError::Config(format!(
                    "at `runs.{}.delta`: the average model has no detuning",
                    run.name
                )));
            }
            let p = SdqParams::new(run.hopping, run.gamma_decay, run.noise)?;
            Ok(EvolveRows {
                bloch: evolve_average(&p, r0, times)?,
                success: None,
            })
        }
    }
}

pub fn evolve(cfg: &EvolveConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    if cfg.runs.is_empty() {
        return Err(CliError::Config("at `runs`: at least one run is required".into()));
    }
    let dir = OutputDir::create(out, "evolve", to_value(cfg), None)?;
    let mut written = Vec::new();
    for (k, run) in cfg.runs.iter().enumerate() {
        if run.name.is_empty() || !run.name.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-') {
            return Err(CliError::Config(format!(
                "at `runs[{k}].name`: use letters, digits, '_' or '-'"
            )));
        }
        let times = time_grid(run.t_final, run.n_points)?;
        let rows = evolve_rows(run, &times)?;
        let analytic = if run.analytic {
            if run.model != Model::Nh || run.hopping != Hopping::Real {
                return Err(CliError::Config(format!(
                    "at `runs[{k}].analytic`: closed form needs the nh model with real hopping"
                )));
            }
            let p = dq_params(run.hopping, run.delta, run.gamma_decay)?;
            let r0 = run.initial.bloch()?;
            Some(
                times
                    .iter()
                    .map(|&t| nh::m2_analytic_broken(&p, r0, t))
                    .collect::<Result<Vec<_>, Error>>()?,
            )
        } else {
            None
        };

        let mut header = vec!["t", "x", "y", "z", "m2_tilde", "purity", "success_rate"];
        if analytic.is_some() {
            header.push("m2_analytic");
        }
        let mut table = Table::new(header);
        let mut max_diff: f64 = 0.0;
        for (n, (&t, r)) in times.iter().zip(&rows.bloch).enumerate() {
            let m2 = m2_tilde_bloch(*r);
            let sr = rows.success.as_ref().map_or(f64::NAN, |s| s[n]);
            let mut row = vec![t, r.x, r.y, r.z, m2, r.purity(), sr];
            if let Some(a) = &analytic {
                max_diff = max_diff.max((a[n] - m2).abs());
                row.push(a[n]);
            }
            table.push_numbers(row);
        }
        let extra = json!({
            "run": run,
            "max_abs_analytic_diff": analytic.as_ref().map(|_| max_diff),
        });
        written.push(dir.write_csv(&format!("evolve_{}.csv", run.name), &table, rate_units(), extra)?);
    }
    Ok(written)
}

pub fn trajectories(cfg: &TrajectoriesConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let p = SdqParams::new(cfg.hopping, cfg.gamma_decay, cfg.noise)?;
    let an = liouvillian_spectrum(&p);
    if !(an.gap > 0.0) {
        return Err(CliError::Numerical(Error::DegenerateSteadyState));
    }
    let r0 = cfg.initial.bloch()?;
    if !(cfg.horizon_gaps.is_finite() && cfg.horizon_gaps > 0.0) {
        return Err(CliError::Config("at `horizon_gaps`: must be finite and > 0".into()));
    }
    let spec = EnsembleSpec {
        t_final: cfg.horizon_gaps / an.gap,
        n_steps: cfg.n_steps,
        n_trajectories: cfg.n_trajectories,
        master_seed: cfg.seed,
        histogram_times: cfg.histogram_times_gaps.iter().map(|t| t / an.gap).collect(),
    };
    let dir = OutputDir::create(out, "trajectories", to_value(cfg), Some(cfg.seed))?;
    let ens = match simulate_ensemble(&p, r0, &spec) {
        Ok(e) => e,
        Err(e) => {
            dir.write_sidecar("trajectories_abort", json!({}), json!({ "reason": e.to_string() }))?;
            return Err(e.into());
        }
    };
    let mut units = rate_units();
    units["t_gap"] = json!("1/gap");
    let common = json!({
        "gap": an.gap,
        "steady_bloch": an.steady_bloch,
        "steady_sre": antidephasing::steady_sre(&p).ok(),
        "dt": spec.dt(),
        "t_final": spec.t_final,
        "master_seed": cfg.seed,
    });

    let mut mean = Table::new([
        "t", "t_gap", "x", "y", "z", "se_x", "se_y", "se_z", "sre_of_mean", "mean_of_sre",
    ]);
    for (n, &t) in ens.times.iter().enumerate() {
        let m = ens.mean[n];
        let se = ens.std_err[n];
        mean.push_numbers([
            t,
            t * an.gap,
            m.x,
            m.y,
            m.z,
            se[0],
            se[1],
            se[2],
            ens.sre_of_mean[n],
            ens.mean_of_sre[n],
        ]);
    }
    let mut extra = common.clone();
    extra["trajectory_seeds"] = json!(ens.seeds);
    let mut written = vec![dir.write_csv("trajectories_mean.csv", &mean, units.clone(), extra)?];

    if cfg.trajectories_written > 0 {
        let mut long = Table::new(["trajectory", "step", "t", "x", "y", "z", "m2_tilde"]);
        for (k, path) in ens.trajectories.iter().take(cfg.trajectories_written).enumerate() {
            for (n, r) in path.iter().enumerate() {
                let mut row = vec![k.to_string(), n.to_string()];
                row.extend([ens.times[n], r.x, r.y, r.z, ens.sre_paths[k][n]].map(fmt_f64));
                long.push(row);
            }
        }
        written.push(dir.write_csv("trajectories_paths.csv", &long, units.clone(), common.clone())?);
    }

    let mut hist = Table::new(["time", "bin_low", "bin_high", "count"]);
    for h in &ens.histograms {
        for (b, count) in h.counts.iter().enumerate() {
            let mut row: Vec<String> = [h.time, h.edges[b], h.edges[b + 1]].map(fmt_f64).to_vec();
            row.push(count.to_string());
            hist.push(row);
        }
    }
    written.push(dir.write_csv("trajectories_histograms.csv", &hist, units, common)?);
    Ok(written)
}

fn coarse_maximum(d: &PhaseDiagram) -> Option<Maximum> {
    let mut best: Option<Maximum> = None;
    for (i, row) in d.values.iter().enumerate() {
        for (j, &v) in row.iter().enumerate() {
            if v.is_finite() && best.is_none_or(|b| v > b.value) {
                best = Some(Maximum {
                    noise: d.noise_values[j],
                    decay: d.decay_values[i],
                    value: v,
                    tie: false,
                    refinement_rounds: 0,
                });
            }
        }
    }
    best
}

pub fn sweep(cfg: &SweepConfig, out: &Path) -> CliResult<Vec<PathBuf>> {
    let grid = cfg.grid_spec();
    let diagram = match cfg.quantity {
        Quantity::SteadySre => steady_diagram(&grid)?,
        Quantity::Gap => gap_diagram(&grid)?,
        Quantity::GapWeighted => gap_weighted_diagram(&grid)?,
        Quantity::TrajectorySre => {
            let t = cfg
                .trajectory
                .ok_or_else(|| CliError::Config("at `trajectory`: required for trajectory_sre".into()))?;
            trajectory_diagram(
                &grid,
                &TrajectoryProtocol {
                    horizon_gaps: t.horizon_gaps,
                    n_steps: t.n_steps,
                    n_trajectories: t.n_trajectories,
                    seed: cfg.seed,
                },
            )?
        }
    };
    let maximum = if !cfg.locate_maximum {
        None
    } else if cfg.quantity == Quantity::TrajectorySre {
        coarse_maximum(&diagram)
    } else {
        locate_maximum(&grid, cfg.quantity)?
    };
    let ridge = diagram.ridge();
    let seed = (cfg.quantity == Quantity::TrajectorySre).then_some(cfg.seed);
    let dir = OutputDir::create(out, "sweep", to_value(cfg), seed)?;
    let mut units = rate_units();
    units["value"] = json!(match cfg.quantity {
        Quantity::Gap => "J",
        Quantity::GapWeighted => "bits J",
        _ => "bits",
    });
    let summary = json!({
        "quantity": cfg.quantity.name(),
        "hopping": cfg.hopping,
        "grid": grid,
        "shape": [diagram.decay_values.len(), diagram.noise_values.len()],
        "layout": "row = decay index, column = noise index",
        "nan_count": diagram.nan_count(),
        "maximum": maximum,
        "ridge_power_law": fit_power_law(&ridge),
        "highlight_threshold": diagram.highlight.as_ref().map(|_| GAP_WEIGHTED_HIGHLIGHT),
        "protocol": diagram.protocol,
    });

    let cols: Vec<String> = (0..diagram.noise_values.len()).map(|j| format!("j{j}")).collect();
    let mut matrix = Table::new(cols.clone());
    for row in &diagram.values {
        matrix.push_numbers(row.iter().copied());
    }
    let mut written = vec![dir.write_csv("sweep_matrix.csv", &matrix, units.clone(), summary.clone())?];

    let mut axes = Table::new(["axis", "index", "value"]);
    for (name, values) in [("noise", &diagram.noise_values), ("decay", &diagram.decay_values)] {
        for (k, v) in values.iter().enumerate() {
            axes.push(vec![name.to_string(), k.to_string(), fmt_f64(*v)]);
        }
    }
    written.push(dir.write_csv("sweep_axes.csv", &axes, units.clone(), summary.clone())?);

    let mut ridge_table = Table::new(["noise", "decay", "value"]);
    for r in &ridge {
        ridge_table.push_numbers([r.noise, r.decay, r.value]);
    }
    written.push(dir.write_csv("sweep_ridge.csv", &ridge_table, units.clone(), summary.clone())?);

    if let Some(mask) = &diagram.highlight {
        let mut t = Table::new(cols);
        for row in mask {
            t.push(row.iter().map(|b| u8::from(*b).to_string()).collect());
        }
        written.push(dir.write_csv("sweep_mask.csv", &t, units.clone(), summary.clone())?);
    }
    written.push(dir.write_json("sweep.json", &summary, units)?);
    Ok(written)
}

/// Run the acceptance suite, printing one line per criterion.
pub fn verify(opts: VerifyOptions, out: Option<&Path>) -> CliResult<Vec<CriterionResult>> {
    let results = run_all(opts);
    for r in &results {
        println!("{}", r.line());
    }
    let failed = results.iter().filter(|r| !r.passed).count();
    println!("{} passed, {failed} failed", results.len() - failed);
    if let Some(dir) = out {
        let params = json!({ "quick": opts.quick });
        OutputDir::create(dir, "verify", params, None)?.write_json("verify.json", &results, json!({}))?;
    }
    if failed > 0 {
        return Err(CliError::Acceptance {
            failed,
            total: results.len(),
        });
    }
    Ok(results)
}
