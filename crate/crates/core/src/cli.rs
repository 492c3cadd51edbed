// Copyright 2026 The qwalk Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//    http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

//! The `qwalk` command line.
//!
//! Exit codes: 0 ok, 1 I/O failure, 2 parse error, 3 infeasible schedule,
//! 4 pulse collision, 5 any other domain error.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::distr::weighted::WeightedIndex;
use rand::distr::Distribution as _;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use crate::compile::{
    compile_launches, decompile_schedule, Calibration, PulseSchedule, TimingModel,
};
use crate::error::{Error, Result};
use crate::formats::{
    counts_to_text, distribution_to_text, parse_distribution, parse_samples, parse_targets,
    purity_report, targets_to_text, Convention, ProgramFile, PurityRow,
};
use crate::measure::{
    chi_square_uniformity, extract_bits, pair_density_via_tomography, shannon_entropy, similarity,
    PurityRecord,
};
use crate::noise::{
    bootstrap_errorbars, counts_to_distribution, emulate_counts_at, emulate_tomography,
    sample_counts, NoiseModel, DEFAULT_SEED,
};
use crate::state::{support, CoinProgram, Distribution, DistributionSchedule, INPUT_TOL};
use crate::synth::{synthesize_schedule, with_disentangling, Builtin};
use crate::walk;

#[derive(Parser, Debug)]
#[command(
    name = "qwalk",
    version,
    about = "Programmable one-dimensional quantum walks"
)]
struct Cli {
    /// Seed for every random draw.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Run a coin program and write the distribution after every step.
    Simulate(SimulateArgs),
    /// Build a coin program for a built-in walk or a target schedule.
    Synthesize(SynthesizeArgs),
    /// Write the analytic target distribution or schedule of a built-in walk.
    Target(TargetArgs),
    /// Compile a coin program into a modulator pulse schedule.
    Compile(CompileArgs),
    /// Recover coin angles from a pulse schedule.
    Decompile(DecompileArgs),
    /// Draw finite-count detections with bootstrap error bars.
    Sample(SampleArgs),
    /// Shannon entropy of a distribution, in bits.
    Entropy(EntropyArgs),
    /// Similarity of two distributions.
    Similarity(SimilarityArgs),
    /// Check the pair purity condition of a disentangled walk.
    VerifyPurity(PurityArgs),
    /// Turn measured positions into random bits.
    ExtractBits(ExtractArgs),
    /// Regenerate the figure and table data files.
    Reproduce(ReproduceArgs),
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum Target {
    Hadamard,
    Gaussian,
    Uniform,
}

impl From<Target> for Builtin {
    fn from(t: Target) -> Builtin {
        match t {
            Target::Hadamard => Builtin::Hadamard,
            Target::Gaussian => Builtin::Gaussian,
            Target::Uniform => Builtin::Uniform,
        }
    }
}

#[derive(Args, Debug)]
#[group(required = true, multiple = true)]
struct ProgramSource {
    /// Program file.
    #[arg(long, conflicts_with_all = ["target", "steps"])]
    program: Option<PathBuf>,
    /// Built-in walk.
    #[arg(long, requires = "steps")]
    target: Option<Target>,
    #[arg(long, requires = "target")]
    steps: Option<usize>,
}

impl ProgramSource {
    fn load(&self) -> Result<CoinProgram> {
        match (&self.program, self.target, self.steps) {
            (Some(path), _, _) => Ok(ProgramFile::parse(&read(path)?)?.canonical()),
            (None, Some(t), Some(n)) => Builtin::from(t).program(n),
            _ => Err(Error::Domain(
                "give --program or --target with --steps".into(),
            )),
        }
    }
}

#[derive(Args, Debug)]
struct NoiseArgs {
    /// Noise config file of `key value` lines; flags override it.
    #[arg(long)]
    noise_config: Option<PathBuf>,
    #[arg(long)]
    survival: Option<f64>,
    #[arg(long)]
    outcoupling: Option<f64>,
    /// Coin-angle error standard deviation, radians.
    #[arg(long)]
    jitter: Option<f64>,
    /// Off-diagonal retention per dephasing step.
    #[arg(long)]
    gamma: Option<f64>,
    /// Probability retention of every right move.
    #[arg(long)]
    right_move_retention: Option<f64>,
}

impl NoiseArgs {
    fn model(&self, seed: u64) -> Result<NoiseModel> {
        let mut nm = match &self.noise_config {
            Some(path) => NoiseModel::parse(&read(path)?)?,
            None => NoiseModel::default(),
        };
        let set = |v: Option<f64>, field: &mut f64| {
            if let Some(v) = v {
                *field = v;
            }
        };
        set(self.survival, &mut nm.round_trip_survival);
        set(self.outcoupling, &mut nm.outcoupling_fraction);
        set(self.jitter, &mut nm.coin_angle_jitter_rad);
        set(self.gamma, &mut nm.dephasing_gamma);
        set(self.right_move_retention, &mut nm.right_move_retention);
        nm.seed = seed;
        nm.validate()?;
        Ok(nm)
    }
}

#[derive(Args, Debug)]
struct TimingArgs {
    #[arg(long, default_value_t = TimingModel::default().round_trip_ns)]
    round_trip_ns: f64,
    #[arg(long, default_value_t = TimingModel::default().bin_delay_ns)]
    bin_delay_ns: f64,
    #[arg(long, default_value_t = TimingModel::default().sagnac_delay_ns)]
    sagnac_delay_ns: f64,
    #[arg(long, default_value_t = TimingModel::default().pulse_width_ns)]
    pulse_width_ns: f64,
    #[arg(long, default_value_t = TimingModel::default().rep_period_ns)]
    rep_period_ns: f64,
    /// Calibration file of `phase_rad voltage_v` anchors.
    #[arg(long)]
    calibration: Option<PathBuf>,
}

impl TimingArgs {
    fn model(&self) -> TimingModel {
        TimingModel {
            round_trip_ns: self.round_trip_ns,
            bin_delay_ns: self.bin_delay_ns,
            sagnac_delay_ns: self.sagnac_delay_ns,
            pulse_width_ns: self.pulse_width_ns,
            rep_period_ns: self.rep_period_ns,
        }
    }

    fn calibration(&self) -> Result<Calibration> {
        match &self.calibration {
            Some(path) => Calibration::parse(&read(path)?),
            None => Ok(Calibration::default()),
        }
    }
}

#[derive(Args, Debug)]
struct SimulateArgs {
    #[command(flatten)]
    source: ProgramSource,
    /// Directory for `step_NN.txt` files; without it the last step goes to
    /// standard output.
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct SynthesizeArgs {
    /// Target schedule file of `t x probability` lines.
    #[arg(long, conflicts_with_all = ["target", "steps"], required_unless_present = "target")]
    targets: Option<PathBuf>,
    #[arg(long, requires = "steps")]
    target: Option<Target>,
    #[arg(long, requires = "target")]
    steps: Option<usize>,
    /// Append a disentangling layer if the program has none.
    #[arg(long, conflicts_with = "bare")]
    disentangle: bool,
    /// Drop the disentangling layer.
    #[arg(long)]
    bare: bool,
    /// Write the program for the mirrored shift convention.
    #[arg(long)]
    mirrored: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct TargetArgs {
    #[arg(long)]
    target: Target,
    #[arg(long)]
    steps: usize,
    /// Write every row as a target schedule instead of the last row.
    #[arg(long)]
    schedule: bool,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct CompileArgs {
    #[command(flatten)]
    source: ProgramSource,
    #[command(flatten)]
    timing: TimingArgs,
    /// Number of successive laser launches.
    #[arg(long, default_value_t = 1)]
    launches: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct DecompileArgs {
    /// Pulse schedule file.
    schedule: PathBuf,
    #[command(flatten)]
    timing: TimingArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
#[group(id = "sample_source", required = true, multiple = true)]
struct SampleSource {
    /// Distribution file to draw from.
    #[arg(long, conflicts_with_all = ["program", "target", "steps"])]
    dist: Option<PathBuf>,
    #[arg(long)]
    program: Option<PathBuf>,
    #[arg(long, requires = "steps", conflicts_with = "program")]
    target: Option<Target>,
    #[arg(long, requires = "target")]
    steps: Option<usize>,
}

#[derive(Args, Debug)]
struct SampleArgs {
    #[command(flatten)]
    source: SampleSource,
    /// Detected events.
    #[arg(long)]
    events: u64,
    /// Detection step for program sources (default: the last).
    #[arg(long)]
    at_step: Option<usize>,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Reference distribution for the similarity; programs default to
    /// their noiseless distribution.
    #[arg(long)]
    reference: Option<PathBuf>,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct EntropyArgs {
    dist: PathBuf,
}

#[derive(Args, Debug)]
struct SimilarityArgs {
    p: PathBuf,
    q: PathBuf,
}

#[derive(Args, Debug)]
struct PurityArgs {
    #[command(flatten)]
    source: ProgramSource,
    /// Attach a disentangling layer to programs without one.
    #[arg(long)]
    disentangle: bool,
    /// Dephasing steps applied at retention `gamma` each.
    #[arg(long, default_value_t = 1)]
    dephasing_steps: usize,
    /// Emulate finite-shot tomography with this many shots per setting.
    #[arg(long)]
    shots: Option<u64>,
    #[command(flatten)]
    noise: NoiseArgs,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ExtractArgs {
    /// File of measured positions, one per line.
    #[arg(long, required_unless_present = "dist", conflicts_with = "dist")]
    samples: Option<PathBuf>,
    /// Distribution file to draw `--count` positions from.
    #[arg(long, requires = "count")]
    dist: Option<PathBuf>,
    #[arg(long)]
    count: Option<usize>,
    /// Steps of the walk that produced the positions.
    #[arg(long)]
    steps: usize,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args, Debug)]
struct ReproduceArgs {
    #[arg(long)]
    out_dir: PathBuf,
    #[arg(long, default_value_t = 10_000)]
    events: u64,
    #[arg(long, default_value_t = 0.01)]
    jitter: f64,
    #[arg(long, default_value_t = 1000)]
    resamples: usize,
    /// Tomography shots per setting for the purity tables.
    #[arg(long, default_value_t = 10_000)]
    shots: u64,
}

/// Entry point of the binary.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let stdout = std::io::stdout();
    let stderr = std::io::stderr();
    run_command(args, &mut stdout.lock(), &mut stderr.lock())
}

/// Parses `args` (program name first), runs the subcommand and returns the
/// exit code. Results go to `out`, diagnostics to `err`.
pub fn run_command<I, T>(args: I, out: &mut dyn Write, err: &mut dyn Write) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let text = e.render().to_string();
            let _ = if code == 0 {
                out.write_all(text.as_bytes())
            } else {
                err.write_all(text.as_bytes())
            };
            return code;
        }
    };
    match dispatch(cli, out, err) {
        Ok(()) => 0,
        Err(e) => {
            let _ = writeln!(err, "error: {e}");
            e.exit_code()
        }
    }
}

fn dispatch(cli: Cli, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let seed = cli.seed;
    match cli.command {
        Command::Simulate(a) => simulate(a, out),
        Command::Synthesize(a) => synthesize(a, out),
        Command::Target(a) => target(a, out),
        Command::Compile(a) => compile(a, out),
        Command::Decompile(a) => decompile(a, out),
        Command::Sample(a) => {
            let _ = writeln!(err, "seed: {seed}");
            sample(a, seed, out)
        }
        Command::Entropy(a) => {
            let (d, _) = parse_distribution(&read(&a.dist)?)?;
            d.validate(INPUT_TOL)?;
            writeln!(out, "{}", shannon_entropy(&d))?;
            Ok(())
        }
        Command::Similarity(a) => {
            let (p, _) = parse_distribution(&read(&a.p)?)?;
            let (q, _) = parse_distribution(&read(&a.q)?)?;
            writeln!(out, "{}", similarity(&p, &q)?)?;
            Ok(())
        }
        Command::VerifyPurity(a) => {
            if a.shots.is_some() {
                let _ = writeln!(err, "seed: {seed}");
            }
            verify_purity(a, seed, out)
        }
        Command::ExtractBits(a) => extract(a, seed, out, err),
        Command::Reproduce(a) => {
            let _ = writeln!(err, "seed: {seed}");
            reproduce(a, seed, out)
        }
    }
}

fn read(path: &Path) -> Result<String> {
    fs::read_to_string(path).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn write_file(path: &Path, text: &str) -> Result<()> {
    fs::write(path, text).map_err(|e| {
        Error::Io(std::io::Error::new(
            e.kind(),
            format!("{}: {e}", path.display()),
        ))
    })
}

fn emit(path: &Option<PathBuf>, text: &str, out: &mut dyn Write) -> Result<()> {
    match path {
        Some(p) => write_file(p, text),
        None => Ok(out.write_all(text.as_bytes())?),
    }
}

fn simulate(a: SimulateArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.source.load()?;
    let reports = walk::run_program(&p)?;
    match &a.out_dir {
        Some(dir) => {
            fs::create_dir_all(dir)?;
            for r in &reports {
                let name = format!("step_{:02}.txt", r.step);
                write_file(
                    &dir.join(name),
                    &distribution_to_text(&r.distribution, None),
                )?;
            }
            writeln!(
                out,
                "wrote {} distributions to {}",
                reports.len(),
                dir.display()
            )?;
            Ok(())
        }
        None => {
            let last = reports.last().expect("at least the initial state");
            out.write_all(distribution_to_text(&last.distribution, None).as_bytes())?;
            Ok(())
        }
    }
}

fn synthesize(a: SynthesizeArgs, out: &mut dyn Write) -> Result<()> {
    let mut p = match (&a.targets, a.target, a.steps) {
        (Some(path), _, _) => synthesize_schedule(&parse_targets(&read(path)?)?)?,
        (None, Some(t), Some(n)) => Builtin::from(t).program(n)?,
        _ => {
            return Err(Error::Domain(
                "give --targets or --target with --steps".into(),
            ))
        }
    };
    if a.bare {
        p = p.without_final_layer();
    } else if a.disentangle && p.final_layer().is_none() {
        p = with_disentangling(p)?;
    }
    let file = if a.mirrored {
        ProgramFile {
            convention: Convention::ALeft,
            program: p.mirror(),
        }
    } else {
        ProgramFile::new(p)
    };
    emit(&a.out, &file.to_text(), out)
}

fn target(a: TargetArgs, out: &mut dyn Write) -> Result<()> {
    let b = Builtin::from(a.target);
    let text = if a.schedule {
        let rows = (0..=a.steps).map(|t| b.theory(t)).collect::<Result<_>>()?;
        targets_to_text(&DistributionSchedule::new(rows)?)
    } else {
        distribution_to_text(&b.theory(a.steps)?, None)
    };
    emit(&a.out, &text, out)
}

fn compile(a: CompileArgs, out: &mut dyn Write) -> Result<()> {
    let p = a.source.load()?;
    let ps = compile_launches(&p, &a.timing.model(), &a.timing.calibration()?, a.launches)?;
    emit(&a.out, &ps.to_text(), out)
}

fn decompile(a: DecompileArgs, out: &mut dyn Write) -> Result<()> {
    let ps = PulseSchedule::parse(&read(&a.schedule)?)?;
    let cells = decompile_schedule(&ps, &a.timing.model(), &a.timing.calibration()?)?;
    let mut text = String::from("# step position theta phi_h phi_v\n");
    for c in cells {
        let _ = writeln!(
            text,
            "{} {} {} {} {}",
            c.step,
            c.position,
            c.theta(),
            c.phi_h,
            c.phi_v
        );
    }
    emit(&a.out, &text, out)
}

fn sample(a: SampleArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let nm = a.noise.model(seed)?;
    let s = &a.source;
    let (counts, ideal) = match (&s.dist, &s.program, s.target, s.steps) {
        (Some(path), _, _, _) => {
            let (d, _) = parse_distribution(&read(path)?)?;
            d.validate(INPUT_TOL)?;
            (sample_counts(&d, a.events, seed), None)
        }
        (None, program, target, steps) => {
            let p = ProgramSource {
                program: program.clone(),
                target,
                steps,
            }
            .load()?;
            let t = a.at_step.unwrap_or(p.steps());
            let ideal = walk::run_program(&p)?
                .into_iter()
                .nth(t)
                .ok_or_else(|| Error::Domain(format!("step {t} beyond program")))?
                .distribution;
            (emulate_counts_at(&p, &nm, t, a.events)?, Some(ideal))
        }
    };
    let reference = match &a.reference {
        Some(path) => Some(parse_distribution(&read(path)?)?.0),
        None => ideal,
    };
    let boot = bootstrap_errorbars(
        &counts,
        a.resamples,
        seed ^ BOOTSTRAP_STREAM,
        reference.as_ref(),
    )?;
    let measured = counts_to_distribution(&counts)?;
    let mut text = String::new();
    let _ = writeln!(text, "# seed {seed}");
    let _ = writeln!(text, "# events {}", a.events);
    if let Some(r) = &reference {
        let _ = writeln!(
            text,
            "# similarity {} +- {}",
            similarity(&measured, r)?,
            boot.sigma_similarity
        );
    }
    let _ = writeln!(
        text,
        "# entropy {} +- {}",
        shannon_entropy(&measured),
        boot.sigma_entropy
    );
    let _ = writeln!(text, "# position count frequency sigma");
    text.push_str(&counts_to_text(&counts, &boot.sigma));
    emit(&a.out, &text, out)
}

const BOOTSTRAP_STREAM: u64 = 0x5EED_B007;

/// Pair-purity rows of a program's final state, with dephasing and
/// optional finite-shot tomography.
fn purity_rows(
    p: &CoinProgram,
    nm: &NoiseModel,
    dephasing_steps: usize,
    shots: Option<u64>,
) -> Result<Vec<PurityRow>> {
    let s = walk::final_state(p)?;
    let t = s.step();
    let mut rows = Vec::with_capacity(t);
    for (i, x) in support(t).take(t).enumerate() {
        let d = nm.dephase(&pair_density_via_tomography(&s, x)?, dephasing_steps);
        let row = match shots {
            None => PurityRow {
                record: PurityRecord::from_density(&d, INPUT_TOL),
                lhs_sigma: None,
                rhs_sigma: None,
            },
            Some(n) => {
                let est = emulate_tomography(&d, n, 200, nm.seed.wrapping_add(i as u64))?;
                let tol = 3.0 * est.sigma_coherence.hypot(est.sigma_population_product);
                PurityRow {
                    record: PurityRecord::from_density(&est.density, tol.max(INPUT_TOL)),
                    lhs_sigma: Some(est.sigma_coherence),
                    rhs_sigma: Some(est.sigma_population_product),
                }
            }
        };
        rows.push(row);
    }
    Ok(rows)
}

fn verify_purity(a: PurityArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    let mut p = a.source.load()?;
    if p.final_layer().is_none() && a.disentangle {
        p = with_disentangling(p)?;
    }
    let nm = a.noise.model(seed)?;
    let rows = purity_rows(&p, &nm, a.dephasing_steps, a.shots)?;
    let title = format!(
        "pair purity after {} steps, gamma {} over {} dephasing steps",
        p.steps(),
        nm.dephasing_gamma,
        a.dephasing_steps
    );
    let mut text = purity_report(&title, &rows);
    let all = rows.iter().all(|r| r.record.pass);
    let _ = writeln!(text, "# all pairs pure: {}", if all { "yes" } else { "no" });
    emit(&a.out, &text, out)
}

fn extract(a: ExtractArgs, seed: u64, out: &mut dyn Write, err: &mut dyn Write) -> Result<()> {
    let samples = match (&a.samples, &a.dist, a.count) {
        (Some(path), _, _) => parse_samples(&read(path)?)?,
        (None, Some(path), Some(n)) => {
            let _ = writeln!(err, "seed: {seed}");
            let (d, _) = parse_distribution(&read(path)?)?;
            d.validate(INPUT_TOL)?;
            draw_positions(&d, n, seed)?
        }
        _ => {
            return Err(Error::Domain(
                "give --samples or --dist with --count".into(),
            ))
        }
    };
    let bits = extract_bits(&samples, a.steps)?;
    let mut text = String::new();
    for pattern in bits.patterns() {
        text.push_str(&pattern);
        text.push('\n');
    }
    emit(&a.out, &text, out)?;
    let _ = writeln!(
        err,
        "accepted {} rejected {} bits {}",
        bits.accepted,
        bits.rejected,
        bits.bits.len()
    );
    if bits.width > 0 && bits.accepted > 0 {
        let mut hist = vec![0u64; 1 << bits.width];
        for w in bits.words() {
            hist[w as usize] += 1;
        }
        let (stat, pvalue) = chi_square_uniformity(&hist)?;
        let _ = writeln!(err, "chi-square {stat} p-value {pvalue}");
    }
    Ok(())
}

/// Independent position draws from `d`, in draw order.
pub fn draw_positions(d: &Distribution, n: usize, seed: u64) -> Result<Vec<i64>> {
    let positions: Vec<i64> = d.positions().collect();
    let weights: Vec<f64> = d.iter().map(|(_, p)| p.max(0.0)).collect();
    let index = WeightedIndex::new(&weights).map_err(|e| Error::Domain(e.to_string()))?;
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Ok((0..n).map(|_| positions[index.sample(&mut rng)]).collect())
}

/// Steps of the reproduced figures.
pub const REPRODUCE_STEPS: usize = 11;
/// Step of the reproduced purity tables.
pub const PURITY_STEPS: usize = 9;

fn reproduce(a: ReproduceArgs, seed: u64, out: &mut dyn Write) -> Result<()> {
    fs::create_dir_all(&a.out_dir)?;
    let files = reproduce_files(&a, seed)?;
    for (name, text) in &files {
        write_file(&a.out_dir.join(name), text)?;
    }
    writeln!(
        out,
        "wrote {} files to {}",
        files.len(),
        a.out_dir.display()
    )?;
    Ok(())
}

fn noise_for(a: &ReproduceArgs, seed: u64) -> Result<NoiseModel> {
    let nm = NoiseModel {
        coin_angle_jitter_rad: a.jitter,
        seed,
        ..NoiseModel::default()
    };
    nm.validate()?;
    Ok(nm)
}

/// Emulated measurement of `b` after step `t`: counts, bootstrap and the
/// similarity to the ideal row.
struct Emulated {
    measured: Distribution,
    sigma: std::collections::BTreeMap<i64, f64>,
    similarity: f64,
    sigma_similarity: f64,
    entropy: f64,
    sigma_entropy: f64,
}

fn emulate(
    p: &CoinProgram,
    theory: &Distribution,
    t: usize,
    a: &ReproduceArgs,
    seed: u64,
) -> Result<Emulated> {
    let nm = noise_for(a, seed)?;
    let counts = emulate_counts_at(p, &nm, t, a.events)?;
    let boot = bootstrap_errorbars(&counts, a.resamples, seed ^ BOOTSTRAP_STREAM, Some(theory))?;
    let measured = counts_to_distribution(&counts)?;
    Ok(Emulated {
        similarity: similarity(&measured, theory)?,
        entropy: shannon_entropy(&measured),
        measured,
        sigma: boot.sigma,
        sigma_similarity: boot.sigma_similarity,
        sigma_entropy: boot.sigma_entropy,
    })
}

fn reproduce_files(a: &ReproduceArgs, seed: u64) -> Result<Vec<(String, String)>> {
    let mut files = Vec::new();
    let n = REPRODUCE_STEPS;

    // Final distributions of the three walks.
    for (k, b) in Builtin::ALL.into_iter().enumerate() {
        let p = b.program(n)?;
        let theory = b.theory(n)?;
        let e = emulate(&p, &theory, n, a, seed.wrapping_add(k as u64))?;
        let mut text = String::new();
        let _ = writeln!(
            text,
            "# {} walk after {n} steps, {} events",
            b.name(),
            a.events
        );
        let _ = writeln!(
            text,
            "# similarity {:.6} +- {:.6}",
            e.similarity, e.sigma_similarity
        );
        let _ = writeln!(text, "# position theory measured sigma");
        for x in support(n) {
            let _ = writeln!(
                text,
                "{x} {:.6} {:.6} {:.6}",
                theory.get(x),
                e.measured.get(x),
                e.sigma.get(&x).copied().unwrap_or(0.0)
            );
        }
        files.push((format!("fig2_{}.txt", b.name()), text));
    }

    // Intermediate steps of the two synthesized walks.
    for (k, b) in [Builtin::Gaussian, Builtin::Uniform]
        .into_iter()
        .enumerate()
    {
        let p = b.program(n)?;
        let mut text = String::new();
        let _ = writeln!(
            text,
            "# {} walk at odd steps, {} events each",
            b.name(),
            a.events
        );
        let _ = writeln!(text, "# step position theory measured sigma");
        for t in (1..=n).step_by(2) {
            let theory = b.theory(t)?;
            let e = emulate(
                &p,
                &theory,
                t,
                a,
                seed.wrapping_add(((k + 1) * 100 + t) as u64),
            )?;
            let _ = writeln!(
                text,
                "# step {t} similarity {:.6} +- {:.6}",
                e.similarity, e.sigma_similarity
            );
            for x in support(t) {
                let _ = writeln!(
                    text,
                    "{t} {x} {:.6} {:.6} {:.6}",
                    theory.get(x),
                    e.measured.get(x),
                    e.sigma.get(&x).copied().unwrap_or(0.0)
                );
            }
        }
        files.push((format!("fig3_{}.txt", b.name()), text));
    }

    // Entropy against step.
    let mut text = String::new();
    let _ = writeln!(
        text,
        "# Shannon entropy in bits, theory and measured +- sigma"
    );
    let _ = write!(text, "# step");
    for b in Builtin::ALL {
        let _ = write!(text, " {0}_theory {0}_measured {0}_sigma", b.name());
    }
    text.push('\n');
    let programs: Vec<CoinProgram> = Builtin::ALL
        .into_iter()
        .map(|b| b.program(n))
        .collect::<Result<_>>()?;
    for t in 1..=n {
        let _ = write!(text, "{t}");
        for (k, (b, p)) in Builtin::ALL.into_iter().zip(&programs).enumerate() {
            let theory = b.theory(t)?;
            let e = emulate(
                p,
                &theory,
                t,
                a,
                seed.wrapping_add((1000 + 20 * t + k) as u64),
            )?;
            let _ = write!(
                text,
                " {:.6} {:.6} {:.6}",
                shannon_entropy(&theory),
                e.entropy,
                e.sigma_entropy
            );
        }
        text.push('\n');
    }
    files.push(("fig4_entropy.txt".into(), text));

    // Purity tables.
    let nm = noise_for(a, seed)?;
    for (name, b) in [
        ("table1_uniform.txt", Builtin::Uniform),
        ("table2_gaussian.txt", Builtin::Gaussian),
    ] {
        let p = b.program(PURITY_STEPS)?;
        let ideal = purity_rows(&p, &nm, 1, None)?;
        let measured = purity_rows(&p, &nm, 1, Some(a.shots))?;
        let mut text = purity_report(
            &format!("{} walk after {PURITY_STEPS} steps, ideal", b.name()),
            &ideal,
        );
        text.push_str(&purity_report(
            &format!(
                "{} walk after {PURITY_STEPS} steps, {} tomography shots per setting",
                b.name(),
                a.shots
            ),
            &measured,
        ));
        files.push((name.into(), text));
    }
    Ok(files)
}
