mod scenario;

use std::collections::BTreeMap;
use std::f64::consts::FRAC_PI_2;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Value};

use symproj_core::entanglement::{tangle_curve, WitnessReport, WitnessSpec};
use symproj_core::fock::{
    fidelity_sweep, linspace, sweep_csv, sweep_maximum, DetectorModel, FockTarget, LossModel, PipelineConfig,
};
use symproj_core::symstate::{parse_state, DensityMatrix, ProjectorSpec, PureState};
use symproj_core::{fmt_sig, Error};

use scenario::{AnalysisEntry, NetworkSection, PolarizationSpec, Scenario, SourceSection};

#[derive(Parser)]
#[command(name = "symproj", version, args_override_self = true, about = "Projective engineering of symmetric multi-qubit states and their photonic preparation")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Project one qubit of a state and print the conditional state.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Project(ProjectArgs),
    /// Three-tangle of the projected D4^(2) states as CSV.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    TangleSweep(TangleArgs),
    /// Heralded W4 / GHZ4+ fidelity over a (|z_w|, phi_w) grid as CSV.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    FidelitySweep(SweepArgs),
    /// Evaluate the fidelity witness offset*1 - |target><target| on a state.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    Witness(WitnessArgs),
    /// Run one photonic scenario and dump the conditional state as JSON.
    #[command(allow_negative_numbers = true, args_override_self = true)]
    SourceSim(SourceSimArgs),
}

#[derive(Clone, Copy, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, ValueEnum)]
enum Detector {
    Threshold,
    NumberResolving,
}

impl From<Detector> for DetectorModel {
    fn from(d: Detector) -> Self {
        match d {
            Detector::Threshold => DetectorModel::Threshold,
            Detector::NumberResolving => DetectorModel::NumberResolving,
        }
    }
}

#[derive(Args)]
struct ProjectArgs {
    /// JSON file with flag values (keys are flag names).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Named state (GHZ3, W3, G3+, D4_2, delta5:a,e, GHZ4+, HHV, ...) or a JSON state file.
    #[arg(long)]
    state: String,
    /// Qubit to measure, counted from 1.
    #[arg(long)]
    qubit: usize,
    /// Projection amplitude on |H>.
    #[arg(long)]
    alpha: f64,
    /// Relative phase of the |V> component.
    #[arg(long, default_value_t = 0.0)]
    eps: f64,
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Args)]
struct TangleArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 91)]
    samples: usize,
    /// Apply the T+ filter to all three qubits first.
    #[arg(long)]
    filtered: bool,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct SweepArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// W4 or GHZ4+.
    #[arg(long)]
    target: String,
    #[arg(long, default_value_t = 0.17)]
    z_dc: f64,
    #[arg(long, default_value_t = 0.05)]
    zw_min: f64,
    #[arg(long, default_value_t = 1.0)]
    zw_max: f64,
    #[arg(long, default_value_t = 20)]
    zw_steps: usize,
    #[arg(long, default_value_t = 0.0)]
    phi_min: f64,
    #[arg(long, default_value_t = FRAC_PI_2)]
    phi_max: f64,
    #[arg(long, default_value_t = 1)]
    phi_steps: usize,
    #[arg(long, default_value_t = 1.0)]
    eta_c: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_d: f64,
    /// Keep all photon numbers up to n_max instead of only five-photon events.
    #[arg(long)]
    six_photons: bool,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    #[arg(long, value_enum, default_value_t = Detector::NumberResolving)]
    detector: Detector,
    #[arg(long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct WitnessArgs {
    #[arg(long)]
    config: Option<PathBuf>,
    /// Target state spec or JSON file.
    #[arg(long)]
    target: String,
    /// Witness offset in (0,1); fractions like 2/3 are accepted.
    #[arg(long)]
    offset: String,
    /// State spec or JSON file (pure state or density matrix).
    #[arg(long)]
    state: String,
    /// Weight of the state when mixed with white noise.
    #[arg(long, default_value_t = 1.0)]
    visibility: f64,
}

#[derive(Args)]
struct SourceSimArgs {
    /// Scenario JSON file; replaces all other flags.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long, default_value_t = 0.17)]
    z_dc: f64,
    #[arg(long, default_value_t = 0.39)]
    z_w: f64,
    #[arg(long, default_value_t = 0.0)]
    phi_w: f64,
    /// H, V, D, A, R or L.
    #[arg(long, default_value = "H")]
    wcb_pol: String,
    /// Number of symmetric output ports a, b, ...
    #[arg(long, default_value_t = 5)]
    outputs: usize,
    #[arg(long, default_value_t = 1.0)]
    eta_c: f64,
    #[arg(long, default_value_t = 1.0)]
    eta_d: f64,
    /// Analyzed modes in qubit order, e.g. a,b,c,d,e.
    #[arg(long, default_value = "a,b,c,d,e")]
    pattern: String,
    /// Herald mode and direction, e.g. e:0,0 (mode:alpha,eps).
    #[arg(long)]
    herald: Vec<String>,
    #[arg(long, default_value_t = 6)]
    n_max: usize,
    #[arg(long)]
    photon_sector: Option<usize>,
    #[arg(long, value_enum, default_value_t = Detector::NumberResolving)]
    detector: Detector,
    /// State to compare the conditional state with.
    #[arg(long)]
    target: Option<String>,
    /// Include the output-mode Fock terms in the dump.
    #[arg(long)]
    terms: bool,
}

enum Failure {
    Validation(String),
    Degenerate(String),
}

impl From<Error> for Failure {
    fn from(e: Error) -> Self {
        if e.is_validation() {
            Failure::Validation(e.to_string())
        } else {
            Failure::Degenerate(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, Failure>;

fn invalid(msg: impl Into<String>) -> Failure {
    Failure::Validation(msg.into())
}

fn sig6(x: f64) -> f64 {
    fmt_sig(x, 6).parse().unwrap_or(x)
}

fn read_json(path: &Path) -> CliResult<Value> {
    let text = fs::read_to_string(path).map_err(|e| invalid(format!("cannot read {}: {e}", path.display())))?;
    serde_json::from_str(&text).map_err(|e| invalid(format!("{}: {e}", path.display())))
}

/// Turns a flat JSON object into `--key value` arguments.
fn config_flags(v: &Value) -> CliResult<Vec<String>> {
    let obj = v.as_object().ok_or_else(|| invalid("config must be a JSON object"))?;
    let mut out = Vec::new();
    for (k, v) in obj {
        if k == "command" {
            continue;
        }
        let flag = format!("--{}", k.replace('_', "-"));
        match v {
            Value::Bool(true) => out.push(flag),
            Value::Bool(false) | Value::Null => {}
            Value::Number(n) => out.extend([flag, n.to_string()]),
            Value::String(s) => out.extend([flag, s.clone()]),
            Value::Array(items) => {
                for item in items {
                    let s = match item {
                        Value::String(s) => s.clone(),
                        other => other.to_string(),
                    };
                    out.extend([flag.clone(), s]);
                }
            }
            Value::Object(_) => return Err(invalid(format!("config key '{k}' must not be an object"))),
        }
    }
    Ok(out)
}

/// Replaces `--config <file>` by the flags it holds; `source-sim` keeps its
/// scenario file. A leading `--config` selects the subcommand from `"command"`.
fn expand_config(argv: Vec<String>) -> CliResult<Vec<String>> {
    let pos = argv.iter().position(|a| a == "--config" || a.starts_with("--config="));
    let Some(pos) = pos else { return Ok(argv) };
    let (path, width) = match argv[pos].strip_prefix("--config=") {
        Some(p) => (p.to_string(), 1),
        None => (argv.get(pos + 1).cloned().ok_or_else(|| invalid("--config needs a file"))?, 2),
    };
    if pos == 1 {
        let v = read_json(Path::new(&path))?;
        let cmd = v.get("command").and_then(Value::as_str).ok_or_else(|| invalid("config needs a \"command\" entry"))?;
        if cmd == "source-sim" {
            return Err(invalid("use `source-sim --config <scenario>` for scenario files"));
        }
        let mut out = vec![argv[0].clone(), cmd.to_string()];
        out.extend(config_flags(&v)?);
        out.extend(argv[pos + width..].iter().cloned());
        return Ok(out);
    }
    if argv.get(1).map(String::as_str) == Some("source-sim") {
        return Ok(argv);
    }
    let v = read_json(Path::new(&path))?;
    let mut out: Vec<String> = argv[..pos].to_vec();
    out.extend(config_flags(&v)?);
    out.extend(argv[pos + width..].iter().cloned());
    Ok(out)
}

fn load_state(spec: &str) -> CliResult<PureState> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let v = read_json(Path::new(spec))?;
        return serde_json::from_value(v).map_err(|e| invalid(format!("{spec}: {e}")));
    }
    Ok(parse_state(spec)?)
}

fn load_density(spec: &str) -> CliResult<DensityMatrix> {
    if spec.ends_with(".json") || Path::new(spec).is_file() {
        let v = read_json(Path::new(spec))?;
        if v.get("rho").is_some() {
            return serde_json::from_value(v).map_err(|e| invalid(format!("{spec}: {e}")));
        }
        let psi: PureState = serde_json::from_value(v).map_err(|e| invalid(format!("{spec}: {e}")))?;
        return Ok(DensityMatrix::from_pure(&psi));
    }
    Ok(DensityMatrix::from_pure(&parse_state(spec)?))
}

fn parse_fraction(s: &str) -> CliResult<f64> {
    let bad = || invalid(format!("'{s}' is not a number or fraction"));
    match s.split_once('/') {
        Some((a, b)) => {
            let (a, b): (f64, f64) = (a.trim().parse().map_err(|_| bad())?, b.trim().parse().map_err(|_| bad())?);
            if b == 0.0 {
                return Err(bad());
            }
            Ok(a / b)
        }
        None => s.trim().parse().map_err(|_| bad()),
    }
}

/// Writes to `path` or stdout; nothing is written before the content is complete.
fn emit(path: Option<&Path>, content: &str) -> CliResult<()> {
    match path {
        Some(p) => fs::write(p, content).map_err(|e| invalid(format!("cannot write {}: {e}", p.display()))),
        None => {
            // A closed pipe (e.g. `| head`) is not an error.
            let _ = std::io::stdout().lock().write_all(content.as_bytes());
            Ok(())
        }
    }
}

fn cmd_project(a: ProjectArgs) -> CliResult<()> {
    let state = load_state(&a.state)?;
    let proj = ProjectorSpec::new(a.alpha, a.eps)?;
    if a.qubit == 0 || a.qubit > state.n_qubits() {
        return Err(invalid(format!("qubit {} is outside 1..={}", a.qubit, state.n_qubits())));
    }
    let (out, p) = state.project_qubit(a.qubit, proj)?;
    match a.format {
        Format::Text => println!("state: {out}\nprobability: {}", fmt_sig(p, 6)),
        Format::Json => println!("{}", json!({ "state": out, "probability": sig6(p) })),
    }
    Ok(())
}

fn cmd_tangle(a: TangleArgs) -> CliResult<()> {
    if a.samples < 2 {
        return Err(invalid("--samples must be at least 2"));
    }
    let mut csv = String::from("theta,tau3\n");
    for (theta, tau) in tangle_curve(a.samples, a.filtered)? {
        let tau = if tau.abs() < 1e-12 { 0.0 } else { tau };
        csv.push_str(&format!("{},{}\n", fmt_sig(theta, 6), fmt_sig(tau, 6)));
    }
    emit(a.output.as_deref(), &csv)
}

fn cmd_sweep(a: SweepArgs) -> CliResult<()> {
    let target = FockTarget::parse(&a.target)?;
    if !(0.0..1.0).contains(&a.z_dc) || a.z_dc == 0.0 {
        return Err(invalid("--z-dc must lie in (0,1)"));
    }
    if a.zw_steps == 0 || a.phi_steps == 0 {
        return Err(invalid("grid step counts must be positive"));
    }
    let finite = [a.zw_min, a.zw_max, a.phi_min, a.phi_max].iter().all(|x| x.is_finite());
    if !finite || a.zw_min < 0.0 || a.zw_max < a.zw_min || a.phi_max < a.phi_min {
        return Err(invalid("grid bounds must be finite with 0 <= zw-min <= zw-max and phi-min <= phi-max"));
    }
    if a.n_max < 5 {
        return Err(invalid("--n-max must be at least 5"));
    }
    let loss = LossModel::new(a.eta_c, a.eta_d)?;
    let cfg = PipelineConfig { loss, include_six: a.six_photons, detector: a.detector.into(), n_max: a.n_max };
    let z_ws = linspace(a.zw_min, a.zw_max, a.zw_steps);
    let phis = linspace(a.phi_min, a.phi_max, a.phi_steps);

    let points = fidelity_sweep(target, a.z_dc, &z_ws, &phis, &cfg)?;
    let best = sweep_maximum(&points).ok_or_else(|| invalid("empty grid"))?;
    let mut summary = format!(
        "max fidelity {} at z_w={} phi_w={}",
        fmt_sig(best.fidelity, 6),
        fmt_sig(best.z_w, 6),
        fmt_sig(best.phi_w, 6)
    );
    if !a.six_photons && loss.eta() == 1.0 {
        let dev = points
            .iter()
            .filter_map(|p| target.analytic(a.z_dc, p.z_w, p.phi_w).ok().map(|f| (f - p.fidelity).abs()))
            .fold(0.0, f64::max);
        summary.push_str(&format!("; max deviation from closed form {dev:.1e}"));
    }
    emit(a.output.as_deref(), &sweep_csv(&points))?;
    if a.output.is_some() {
        println!("{summary}");
    } else {
        eprintln!("{summary}");
    }
    Ok(())
}

fn cmd_witness(a: WitnessArgs) -> CliResult<()> {
    let target = load_state(&a.target)?;
    let offset = parse_fraction(&a.offset)?;
    let spec = WitnessSpec::new(target.clone(), offset)?;
    if !(0.0..=1.0).contains(&a.visibility) {
        return Err(invalid("--visibility must lie in [0,1]"));
    }
    let rho = load_density(&a.state)?;
    if rho.n_qubits() != target.n_qubits() {
        return Err(invalid(format!(
            "state has {} qubits, target has {}",
            rho.n_qubits(),
            target.n_qubits()
        )));
    }
    let noise = DensityMatrix::maximally_mixed(rho.n_qubits());
    let mixed = DensityMatrix::mixture(&[(a.visibility, rho), (1.0 - a.visibility, noise)])?;
    let report = WitnessReport::evaluate(&a.target, &spec, &mixed)?;
    let out = json!({
        "target": report.target,
        "offset": sig6(report.offset),
        "value": sig6(report.value),
        "entangled": report.entangled,
    });
    println!("{out}");
    Ok(())
}

fn scenario_from_flags(a: &SourceSimArgs) -> CliResult<Scenario> {
    let outputs: Vec<String> = (0..a.outputs.min(26) as u8).map(|k| ((b'a' + k) as char).to_string()).collect();
    if a.outputs == 0 || a.outputs > 24 {
        return Err(invalid("--outputs must lie in 1..=24"));
    }
    let mut analysis = BTreeMap::new();
    for h in &a.herald {
        let (mode, dir) = h.split_once(':').ok_or_else(|| invalid(format!("--herald '{h}' must look like e:alpha,eps")))?;
        let nums: Vec<f64> = dir.split(',').map(parse_fraction).collect::<CliResult<_>>()?;
        let (alpha, eps) = match nums.as_slice() {
            [a] => (*a, 0.0),
            [a, e] => (*a, *e),
            _ => return Err(invalid(format!("--herald '{h}' must look like e:alpha,eps"))),
        };
        analysis.insert(mode.to_string(), AnalysisEntry { alpha, eps, herald: true });
    }
    Ok(Scenario {
        source: SourceSection {
            z_dc: a.z_dc,
            z_w: a.z_w,
            phi_w: a.phi_w,
            wcb_polarization: PolarizationSpec::Named(a.wcb_pol.clone()),
        },
        network: NetworkSection { outputs, weights: Vec::new() },
        loss: LossModel { eta_c: a.eta_c, eta_d: a.eta_d },
        pattern: a.pattern.split(',').map(|s| s.trim().to_string()).collect(),
        analysis,
        n_max: a.n_max,
        photon_sector: a.photon_sector,
        detector: a.detector.into(),
        target: a.target.clone(),
    })
}

fn cmd_source_sim(a: SourceSimArgs) -> CliResult<()> {
    let scenario: Scenario = match &a.config {
        Some(p) => serde_json::from_value(read_json(p)?).map_err(|e| invalid(format!("{}: {e}", p.display())))?,
        None => scenario_from_flags(&a)?,
    };
    let plan = scenario.plan()?;
    let target = scenario.target.as_deref().map(load_state).transpose()?;
    if let Some(t) = &target {
        scenario::check_target(&plan, t)?;
    }

    let outcome = plan.run()?;
    let rho = outcome.result.rho;
    let fidelity = target.as_ref().map(|t| rho.fidelity(t)).transpose()?.map(sig6);
    let rows: Vec<Vec<[f64; 2]>> = rho
        .matrix()
        .row_iter()
        .map(|r| r.iter().map(|x| [sig6(x.re), sig6(x.im)]).collect())
        .collect();
    let mut out = json!({
        "n_qubits": rho.n_qubits(),
        "probability": sig6(outcome.result.probability),
        "weight": sig6(outcome.result.weight),
        "source_terms": outcome.source_terms,
        "output_terms": outcome.output.len(),
        "target": scenario.target,
        "fidelity": fidelity,
        "purity": sig6(rho.purity()),
        "rho": rows,
    });
    if a.terms {
        let modes = outcome.output.modes();
        let terms: Vec<Value> = outcome
            .output
            .terms()
            .map(|(occ, amp)| {
                let occupied: BTreeMap<String, u8> = occ
                    .iter()
                    .zip(modes)
                    .filter(|(&n, _)| n > 0)
                    .map(|(&n, m)| (m.to_string(), n))
                    .collect();
                json!({ "modes": occupied, "amp": [sig6(amp.re), sig6(amp.im)] })
            })
            .collect();
        out["terms"] = Value::Array(terms);
    }
    emit(None, &format!("{out}\n"))
}

fn run(cli: Cli) -> CliResult<()> {
    match cli.command {
        Command::Project(a) => cmd_project(a),
        Command::TangleSweep(a) => cmd_tangle(a),
        Command::FidelitySweep(a) => cmd_sweep(a),
        Command::Witness(a) => cmd_witness(a),
        Command::SourceSim(a) => cmd_source_sim(a),
    }
}

fn main() -> ExitCode {
    let argv = match expand_config(std::env::args().collect()) {
        Ok(v) => v,
        Err(Failure::Validation(m) | Failure::Degenerate(m)) => {
            eprintln!("error: {m}");
            return ExitCode::from(2);
        }
    };
    let cli = match Cli::try_parse_from(argv) {
        Ok(c) => c,
        Err(e) => e.exit(),
    };
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(Failure::Validation(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(2)
        }
        Err(Failure::Degenerate(m)) => {
            eprintln!("error: {m}");
            ExitCode::from(3)
        }
    }
}
