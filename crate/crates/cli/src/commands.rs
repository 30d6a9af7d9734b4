//! One function per subcommand. Each fills in the manifest and writes its
//! artifacts; errors bubble up as [`Failure`] values.

use std::fs;
use std::io::{self, Read};
use std::path::Path;

use delta_shells::boundary::{secular_det, threshold_report};
use delta_shells::calibrate::{calibrate, CalibrationInput, DotModel, Preset};
use delta_shells::oracle::mismatch;
use delta_shells::secular::{matching_matrix, scaled_secular, secular_f};
use delta_shells::Error;
use delta_shells::{enumerate_spectrum, splitting_curve, validate_config, BoundState, ScanPlan, ShellConfig};
use serde::Serialize;
use serde_json::json;

use crate::output::{emit, sidecar_path, to_json, ConfigSource, Failure, RunManifest, Table};
use crate::{CalibrateArgs, Global, ScanArgs, SplittingArgs, ThresholdArgs};

/// Exit status on a run that produced its artifact.
type Outcome = Result<u8, Failure>;

fn load_config(global: &Global) -> Result<ConfigSource, Failure> {
    let Some(spec) = global.config.as_deref() else {
        return Err(Failure::input("MissingConfig", "--config <path|-> is required"));
    };
    let (origin, path, text) = if spec == "-" {
        let mut text = String::new();
        io::stdin().read_to_string(&mut text)?;
        ("stdin", None, text)
    } else {
        let text = fs::read_to_string(spec)
            .map_err(|e| Failure::input("Io", format!("cannot read {spec}: {e}")))?;
        ("path", Some(spec.to_string()), text)
    };
    let raw: ShellConfig =
        serde_json::from_str(&text).map_err(|e| Failure::input("InvalidConfig", e.to_string()))?;
    Ok(ConfigSource { origin, path, config: validate_config(raw)? })
}

fn plan_for(global: &Global, base: ScanPlan) -> Result<ScanPlan, Failure> {
    let mut plan = base;
    if let Some(v) = global.kappa_max {
        plan.kappa_max = v;
    }
    if let Some(v) = global.grid {
        plan.grid_points = v;
    }
    if let Some(v) = global.ell_max {
        plan.ell_max = v;
    }
    if let Some(v) = global.tol {
        plan.tol = v;
    }
    plan.validate()?;
    Ok(plan)
}

fn out_label(path: Option<&Path>) -> String {
    path.map_or_else(|| "stdout".to_string(), |p| p.display().to_string())
}

#[derive(Serialize)]
struct ChannelCount {
    ell: usize,
    count: usize,
}

#[derive(Serialize)]
struct SpectrumOutput<'a> {
    manifest: &'a RunManifest,
    states: &'a [BoundState],
    per_channel_counts: Vec<ChannelCount>,
    hints: &'a [delta_shells::solver::ScanHint],
}

pub fn spectrum(global: &Global, manifest: &mut RunManifest) -> Outcome {
    let input = load_config(global)?;
    let plan = plan_for(global, ScanPlan::for_config(&input.config))?;
    manifest.plan = Some(plan);
    manifest.outputs.push(out_label(global.out.as_deref()));
    let cfg = input.config.clone();
    manifest.input = Some(input);

    let spectrum = enumerate_spectrum(&cfg, &plan)?;
    spectrum.require_complete(plan.ell_max)?;
    let out = SpectrumOutput {
        manifest,
        states: &spectrum.states,
        per_channel_counts: spectrum
            .per_channel_counts
            .iter()
            .map(|&(ell, count)| ChannelCount { ell, count })
            .collect(),
        hints: &spectrum.hints,
    };
    emit(global.out.as_deref(), &to_json(&out))?;
    Ok(0)
}

pub fn scan(global: &Global, args: &ScanArgs, manifest: &mut RunManifest) -> Outcome {
    let input = load_config(global)?;
    let mut base = ScanPlan::for_config(&input.config);
    if let Some(k) = args.kappa_min {
        base.kappa_min = k;
    }
    let plan = plan_for(global, base)?;
    let cfg = input.config.clone();
    let ell = args.ell;
    manifest.input = Some(input);
    manifest.plan = Some(plan);
    manifest.parameters = json!({ "ell": ell });

    let two_shell_s = cfg.len() == 2 && ell == 0;
    let mut table = if two_shell_s {
        Table::new(&["kappa", "S", "F_d", "minus_det_m_over_kappa", "det"])
    } else {
        Table::new(&["kappa", "det", "mismatch"])
    };
    for kappa in plan.grid() {
        let det = secular_det(&cfg, ell, kappa)?;
        if two_shell_s {
            let matched = match matching_matrix(kappa, &cfg) {
                Ok(m) => -(m[0][0] * m[1][1] - m[0][1] * m[1][0]) / kappa,
                Err(Error::MatchingOverflow(_)) => f64::NAN,
                Err(e) => return Err(e.into()),
            };
            table.row(&[kappa, scaled_secular(kappa, &cfg)?, secular_f(kappa, &cfg)?, matched, det]);
        } else {
            table.row(&[kappa, det, mismatch(&cfg, ell, kappa)?]);
        }
    }
    write_table(global.out.as_deref(), &table, manifest)
}

/// The table goes to `path` with a manifest sidecar, or to stdout with the
/// manifest echoed on stderr.
fn write_table(path: Option<&Path>, table: &Table, manifest: &mut RunManifest) -> Outcome {
    manifest.outputs.push(out_label(path));
    match path {
        Some(p) => {
            fs::write(p, table.as_str())?;
            fs::write(sidecar_path(p), to_json(manifest))?;
        }
        None => {
            emit(None, table.as_str())?;
            eprint!("{}", to_json(manifest));
        }
    }
    Ok(0)
}

#[derive(Serialize)]
struct SplittingOutput<'a> {
    manifest: &'a RunManifest,
    r1: f64,
    alpha1: f64,
    kappa0: f64,
    alpha2_tuned: f64,
    c_const: f64,
    fitted_exponent: f64,
    exponent_relative_error: f64,
    fitted_intercept: f64,
    d_cutoff: Option<f64>,
    rows: &'a [delta_shells::solver::SplittingRow],
}

pub fn splitting(global: &Global, args: &SplittingArgs, manifest: &mut RunManifest) -> Outcome {
    if !(args.d_min > 0.0 && args.d_max > args.d_min && args.d_steps >= 4) {
        return Err(Failure::input("InvalidRange", "need 0 < d-min < d-max and at least 4 d-steps"));
    }
    let plan = plan_for(global, ScanPlan::default())?;
    manifest.plan = Some(plan);
    manifest.parameters = json!({
        "r1": args.r1,
        "alpha1": args.alpha1,
        "d_min": args.d_min,
        "d_max": args.d_max,
        "d_steps": args.d_steps,
    });
    manifest.outputs.push(out_label(global.out.as_deref()));
    if let Some(csv) = &args.csv {
        manifest.outputs.push(csv.display().to_string());
    }

    let step = (args.d_max - args.d_min) / (args.d_steps - 1) as f64;
    let d_grid: Vec<f64> = (0..args.d_steps).map(|i| args.d_min + step * i as f64).collect();
    let report = splitting_curve(args.r1, args.alpha1, &d_grid, &plan)?;

    if let Some(csv) = &args.csv {
        let mut table = Table::new(&["d", "gap", "predicted_gap", "ratio"]);
        for r in &report.rows {
            table.row(&[r.d, r.gap, r.predicted_gap, r.ratio]);
        }
        fs::write(csv, table.as_str())?;
        fs::write(sidecar_path(csv), to_json(manifest))?;
    }
    let out = SplittingOutput {
        manifest,
        r1: args.r1,
        alpha1: args.alpha1,
        kappa0: report.kappa0,
        alpha2_tuned: report.alpha2_tuned,
        c_const: report.c_const,
        fitted_exponent: report.fitted_exponent(),
        exponent_relative_error: (report.fitted_exponent() - report.kappa0).abs() / report.kappa0,
        fitted_intercept: report.fitted_intercept,
        d_cutoff: report.d_cutoff,
        rows: &report.rows,
    };
    emit(global.out.as_deref(), &to_json(&out))?;
    Ok(0)
}

#[derive(Serialize)]
struct Refusal<'a> {
    manifest: &'a RunManifest,
    ell: usize,
    reason: &'static str,
}

#[derive(Serialize)]
struct ThresholdOutput<'a> {
    manifest: &'a RunManifest,
    ell: usize,
    det: f64,
    kernel_dim: usize,
    multiplicity: usize,
    singular_values: &'a [f64],
}

pub fn threshold(global: &Global, args: &ThresholdArgs, manifest: &mut RunManifest) -> Outcome {
    let input = load_config(global)?;
    let cfg = input.config.clone();
    manifest.input = Some(input);
    manifest.parameters = json!({ "ell": args.ell });
    manifest.outputs.push(out_label(global.out.as_deref()));

    if args.ell == 0 {
        let refusal = Refusal { manifest, ell: 0, reason: "s-wave has no zero-energy eigenstate" };
        emit(global.out.as_deref(), &to_json(&refusal))?;
        return Ok(2);
    }
    let report = threshold_report(&cfg, args.ell)?;
    let out = ThresholdOutput {
        manifest,
        ell: report.ell,
        det: report.det,
        kernel_dim: report.kernel_dim,
        multiplicity: report.multiplicity,
        singular_values: &report.singular_values,
    };
    emit(global.out.as_deref(), &to_json(&out))?;
    Ok(0)
}

#[derive(Serialize)]
struct Level {
    ell: usize,
    kappa: f64,
    energy: f64,
    energy_ev: f64,
    degeneracy: usize,
}

#[derive(Serialize)]
struct CalibrateOutput<'a> {
    manifest: &'a RunManifest,
    preset: Option<&'static str>,
    #[serde(rename = "E0_eV")]
    e0_ev: f64,
    alphas: [f64; 2],
    classification: delta_shells::calibrate::Alignment,
    dimensionless_config: &'a ShellConfig,
    levels: Vec<Level>,
    accuracy: &'static str,
}

fn dot_model(args: &CalibrateArgs) -> Result<(Option<Preset>, DotModel), Failure> {
    if let Some(name) = &args.preset {
        let preset = Preset::from_name(name).ok_or_else(|| {
            let known: Vec<&str> = Preset::ALL.iter().map(|p| p.name()).collect();
            Failure::input("UnknownPreset", format!("unknown preset {name:?}; known: {}", known.join(", ")))
        })?;
        return Ok((Some(preset), preset.model()));
    }
    let missing = |flag: &str| Failure::input("MissingFlag", format!("{flag} is required without --preset"));
    let radii = args.radii_nm.as_deref().ok_or_else(|| missing("--radii-nm"))?;
    let [r1, r2] = radii else {
        return Err(Failure::input("InvalidCalibration", "--radii-nm takes exactly two values"));
    };
    Ok((
        None,
        DotModel {
            radii_nm: [*r1, *r2],
            inner_alpha: args.inner_alpha.ok_or_else(|| missing("--inner-alpha"))?,
            outer: CalibrationInput {
                delta_v: args.delta_v_ev.ok_or_else(|| missing("--delta-v-ev"))?,
                width: args.width_nm.ok_or_else(|| missing("--width-nm"))?,
                mass_ratio: args.mass_ratio.ok_or_else(|| missing("--mass-ratio"))?,
                l0: args.l0_nm,
            },
        },
    ))
}

pub fn calibrate_dot(global: &Global, args: &CalibrateArgs, manifest: &mut RunManifest) -> Outcome {
    let (preset, model) = dot_model(args)?;
    manifest.parameters = serde_json::to_value(model).expect("model serializes");
    let cal = calibrate(&model)?;
    let plan = plan_for(global, ScanPlan::for_config(&cal.config))?;
    manifest.plan = Some(plan);
    manifest.input = Some(ConfigSource { origin: "flags", path: None, config: cal.config.clone() });
    manifest.outputs.push(out_label(global.out.as_deref()));

    let spectrum = enumerate_spectrum(&cal.config, &plan)?;
    spectrum.require_complete(plan.ell_max)?;
    let out = CalibrateOutput {
        manifest,
        preset: preset.map(Preset::name),
        e0_ev: cal.e0_ev,
        alphas: cal.alphas,
        classification: cal.classification,
        dimensionless_config: &cal.config,
        levels: spectrum
            .states
            .iter()
            .map(|s| Level {
                ell: s.ell,
                kappa: s.kappa,
                energy: s.energy,
                energy_ev: cal.energy_ev(s.energy),
                degeneracy: s.degeneracy,
            })
            .collect(),
        accuracy: "order-of-magnitude",
    };
    emit(global.out.as_deref(), &to_json(&out))?;
    Ok(0)
}
