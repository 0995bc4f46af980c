use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use super::config::{Mode, RunConfig};
use super::manifest::{LoadedManifest, Manifest};
use crate::dp::{
    backward_induction_equivariant, backward_induction_full, backward_induction_reduced,
    lifted_policy, simulate_rollout, table_policy, ControlInput, ControlSystem,
    EquivariantScaling, Retain, SolveOptions, SolveResult,
};
use crate::symmetry::{
    check_group_axioms, check_system_equivariance, check_system_invariance, verify_moving_frame,
    InvarianceReport, MovingFrame, Sampler, TransformationGroup,
};
use crate::systems::{
    dubins, mri, DubinsFrame, DubinsPair, DubinsSampler, LinearSampler, LinearSystem, MriFrame,
    MriSampler, MriSystem, Rotor2D, RotorFrame, RotorSampler, SystemConfig,
};
use crate::{Error, Result};

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_USAGE: i32 = 2;
pub const EXIT_CHECK: i32 = 3;

/// Exit status for an error: configuration and argument problems are usage
/// errors, everything else is a run failure.
pub fn exit_code(e: &Error) -> i32 {
    match e {
        Error::Config(_) | Error::Slice(_) | Error::InvalidAxis(_) => EXIT_USAGE,
        _ => EXIT_FAILURE,
    }
}

fn report(e: &Error) -> i32 {
    eprintln!("error: {e}");
    let mut source = std::error::Error::source(e);
    while let Some(s) = source {
        eprintln!("  caused by: {s}");
        source = s.source();
    }
    exit_code(e)
}

/// Floats in CSV output: 17 significant digits.
pub fn fmt_float(v: f64) -> String {
    format!("{v:.16e}")
}

/// Operation run against a concrete system, its frame and a sampler.
trait Visit {
    type Out;

    fn visit<S, F, Smp>(
        self,
        system: &S,
        frame: &F,
        sampler: &Smp,
        scaling: Option<EquivariantScaling>,
    ) -> Result<Self::Out>
    where
        S: ControlSystem,
        F: MovingFrame,
        F::Group: TransformationGroup<Input = S::Input>,
        Smp: Sampler<Input = S::Input>;
}

fn config_error(e: Error) -> Error {
    match e {
        Error::Config(_) => e,
        other => Error::Config(other.to_string()),
    }
}

fn dispatch<V: Visit>(config: &SystemConfig, v: V) -> Result<V::Out> {
    match config {
        SystemConfig::DubinsPair(c) => {
            let s = DubinsPair::new(c.clone()).map_err(config_error)?;
            v.visit(&s, &DubinsFrame::new(), &DubinsSampler::new(&s), None)
        }
        SystemConfig::MriFingerprint(c) => {
            let s = MriSystem::new(c.clone()).map_err(config_error)?;
            v.visit(&s, &MriFrame::new(), &MriSampler::new(&s), None)
        }
        SystemConfig::Rotor2d(c) => {
            let s = Rotor2D::new(c.clone()).map_err(config_error)?;
            v.visit(&s, &RotorFrame::new(), &RotorSampler::new(&s), None)
        }
        SystemConfig::Lqr(c) => {
            let s = LinearSystem::lqr(c.clone()).map_err(config_error)?;
            v.visit(&s, &s.frame(), &LinearSampler::new(&s), Some(s.scaling()))
        }
        SystemConfig::L1(c) => {
            let s = LinearSystem::l1(c.clone()).map_err(config_error)?;
            v.visit(&s, &s.frame(), &LinearSampler::new(&s), Some(s.scaling()))
        }
    }
}

struct SolveVisit<'a> {
    config: &'a RunConfig,
    retain: Retain,
}

impl Visit for SolveVisit<'_> {
    type Out = SolveResult;

    fn visit<S, F, Smp>(
        self,
        system: &S,
        frame: &F,
        _sampler: &Smp,
        scaling: Option<EquivariantScaling>,
    ) -> Result<SolveResult>
    where
        S: ControlSystem,
        F: MovingFrame,
        F::Group: TransformationGroup<Input = S::Input>,
        Smp: Sampler<Input = S::Input>,
    {
        let options = SolveOptions {
            workers: self.config.workers,
            retain: self.retain,
        };
        let grid = &self.config.grid;
        match (self.config.mode, scaling) {
            (Mode::Full, _) => backward_induction_full(system, grid, &options),
            (Mode::Reduced, _) => backward_induction_reduced(system, frame, grid, &options),
            (Mode::Equivariant, Some(s)) => {
                backward_induction_equivariant(system, frame, &s, grid, &options)
            }
            (Mode::Equivariant, None) => Err(Error::Config(format!(
                "system `{}` has no scaling symmetry",
                self.config.system.name()
            ))),
        }
    }
}

/// Solves a configuration in memory.
pub fn solve_config(config: &RunConfig, retain: Retain) -> Result<SolveResult> {
    dispatch(&config.system, SolveVisit { config, retain })
}

/// `solve`: writes one table per stage and a manifest into the output
/// directory.
pub fn cmd_solve(config_path: &Path, out: Option<&Path>, workers: Option<usize>) -> i32 {
    match run_solve(config_path, out, workers) {
        Ok(_) => EXIT_OK,
        Err(e) => report(&e),
    }
}

fn run_solve(config_path: &Path, out: Option<&Path>, workers: Option<usize>) -> Result<Manifest> {
    let mut config = RunConfig::load(config_path)?;
    if let Some(dir) = out {
        config.out_dir = dir.to_path_buf();
    }
    if let Some(w) = workers {
        if w == 0 {
            return Err(Error::Config("--workers must be at least 1".into()));
        }
        config.workers = w;
    }
    println!(
        "solving {} ({} mode), horizon {}, {} grid nodes, {} workers",
        config.system.name(),
        config.mode.as_str(),
        config.system.horizon(),
        config.grid.len(),
        config.workers
    );
    let start = Instant::now();
    let result = solve_config(&config, Retain::All)?;
    for d in &result.diagnostics {
        println!(
            "stage {:>4}  {:>9.3}s  clamped {}/{}",
            d.stage, d.seconds, d.clamped, d.evaluations
        );
    }
    let manifest = Manifest::write(&config.out_dir, &config, &result)?;
    println!(
        "wrote {} tables to {} in {:.3}s",
        manifest.files.len(),
        config.out_dir.display(),
        start.elapsed().as_secs_f64()
    );
    Ok(manifest)
}

struct SimulateVisit<'a> {
    mode: Mode,
    solution: &'a SolveResult,
    x0: Option<&'a [f64]>,
    rollouts: usize,
    seed: u64,
}

/// CSV text and realized costs of a batch of rollouts.
pub struct RolloutBatch {
    pub csv: String,
    pub costs: Vec<f64>,
}

fn default_x0(config: &SystemConfig) -> Vec<f64> {
    match config {
        SystemConfig::DubinsPair(_) => dubins::FORMATION_X0.to_vec(),
        SystemConfig::MriFingerprint(_) => mri::EQUILIBRIUM.to_vec(),
        SystemConfig::Rotor2d(_) => vec![1.5, 0.0],
        SystemConfig::Lqr(c) | SystemConfig::L1(c) => {
            (0..c.n).map(|i| if i == 0 { 0.8 } else { -0.4 }).collect()
        }
    }
}

impl Visit for SimulateVisit<'_> {
    type Out = RolloutBatch;

    fn visit<S, F, Smp>(
        self,
        system: &S,
        frame: &F,
        _sampler: &Smp,
        _scaling: Option<EquivariantScaling>,
    ) -> Result<RolloutBatch>
    where
        S: ControlSystem,
        F: MovingFrame,
        F::Group: TransformationGroup<Input = S::Input>,
        Smp: Sampler<Input = S::Input>,
    {
        let x0 = self.x0.expect("resolved by caller");
        if x0.len() != system.state_dim() {
            return Err(Error::Config(format!(
                "--x0 needs {} components, got {}",
                system.state_dim(),
                x0.len()
            )));
        }
        let n = system.state_dim();
        let m = system
            .inputs()
            .first()
            .map(|u| u.components().len())
            .unwrap_or(0);
        let mut csv = String::from("rollout,k");
        for i in 0..n {
            let _ = write!(csv, ",x{i}");
        }
        for i in 0..m {
            let _ = write!(csv, ",u{i}");
        }
        csv.push_str(",stage_cost\n");
        let mut costs = Vec::with_capacity(self.rollouts);
        for r in 0..self.rollouts {
            let seed = self.seed.wrapping_add(r as u64);
            let rollout = match self.mode {
                Mode::Full => simulate_rollout(system, table_policy(system, self.solution), x0, seed)?,
                Mode::Reduced | Mode::Equivariant => simulate_rollout(
                    system,
                    lifted_policy(system, frame, self.solution),
                    x0,
                    seed,
                )?,
            };
            for (k, x) in rollout.states.iter().enumerate() {
                let _ = write!(csv, "{r},{k}");
                for v in x.iter() {
                    let _ = write!(csv, ",{}", fmt_float(*v));
                }
                match rollout.inputs.get(k) {
                    Some(u) => {
                        for v in u.components() {
                            let _ = write!(csv, ",{}", fmt_float(v));
                        }
                    }
                    None => csv.push_str(&",".repeat(m)),
                }
                let _ = writeln!(csv, ",{}", fmt_float(rollout.costs[k]));
            }
            costs.push(rollout.total_cost);
        }
        Ok(RolloutBatch { csv, costs })
    }
}

/// Runs rollouts of a verified solution; the policy is lifted from reduced
/// tables automatically.
pub fn simulate_manifest(
    loaded: &LoadedManifest,
    x0: Option<&[f64]>,
    rollouts: usize,
    seed: u64,
) -> Result<RolloutBatch> {
    let config = &loaded.manifest.config;
    let solution = loaded.solution()?;
    let fallback = default_x0(&config.system);
    let visit = SimulateVisit {
        mode: config.mode,
        solution: &solution,
        x0: Some(x0.unwrap_or(&fallback)),
        rollouts,
        seed,
    };
    dispatch(&config.system, visit)
}

/// `simulate`: writes rollouts as CSV and prints the mean realized cost.
pub fn cmd_simulate(
    manifest_path: &Path,
    x0: Option<&[f64]>,
    rollouts: usize,
    seed: u64,
    out: Option<&Path>,
) -> i32 {
    let run = || -> Result<()> {
        if rollouts == 0 {
            return Err(Error::Config("--rollouts must be at least 1".into()));
        }
        let loaded = Manifest::load(manifest_path)?;
        let batch = simulate_manifest(&loaded, x0, rollouts, seed)?;
        let path = out
            .map(Path::to_path_buf)
            .unwrap_or_else(|| loaded.dir.join("rollouts.csv"));
        fs::write(&path, &batch.csv).map_err(|e| Error::io(&path, e))?;
        let (mean, se) = mean_and_stderr(&batch.costs);
        println!(
            "{} rollouts, mean cost {mean:.6} ± {se:.6} (standard error); wrote {}",
            rollouts,
            path.display()
        );
        Ok(())
    };
    match run() {
        Ok(()) => EXIT_OK,
        Err(e) => report(&e),
    }
}

pub fn mean_and_stderr(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    if xs.len() < 2 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1.0);
    (mean, (var / n).sqrt())
}

struct CheckVisit {
    seed: u64,
    samples: usize,
}

impl Visit for CheckVisit {
    type Out = Vec<(&'static str, InvarianceReport)>;

    fn visit<S, F, Smp>(
        self,
        system: &S,
        frame: &F,
        sampler: &Smp,
        scaling: Option<EquivariantScaling>,
    ) -> Result<Self::Out>
    where
        S: ControlSystem,
        F: MovingFrame,
        F::Group: TransformationGroup<Input = S::Input>,
        Smp: Sampler<Input = S::Input>,
    {
        let group = frame.group();
        let axioms = check_group_axioms(group, sampler, self.seed, self.samples);
        let system_report = match scaling {
            Some(s) => check_system_equivariance(
                system,
                group,
                &s,
                sampler,
                self.seed.wrapping_add(1),
                self.samples,
            )?,
            None => check_system_invariance(
                system,
                group,
                sampler,
                self.seed.wrapping_add(1),
                self.samples,
            )?,
        };
        let frame_report = verify_moving_frame(frame, sampler, self.seed.wrapping_add(2), self.samples);
        Ok(vec![
            ("group", axioms),
            ("system", system_report),
            ("frame", frame_report),
        ])
    }
}

/// Runs the group-axiom, system-invariance and moving-frame checks for a
/// configuration.
pub fn check_config(config: &RunConfig) -> Result<Vec<(&'static str, InvarianceReport)>> {
    dispatch(
        &config.system,
        CheckVisit {
            seed: config.seed,
            samples: config.check.samples,
        },
    )
}

/// `check`: exit 0 iff every residual is within the configured tolerance.
pub fn cmd_check(config_path: &Path) -> i32 {
    let config = match RunConfig::load(config_path) {
        Ok(c) => c,
        Err(e) => return report(&e),
    };
    let reports = match check_config(&config) {
        Ok(r) => r,
        Err(e) => return report(&e),
    };
    let tolerance = config.check.tolerance;
    let mut ok = true;
    for (name, r) in &reports {
        println!("== {name} ==\n{r}\n");
        ok &= r.passes(tolerance);
    }
    for (name, r) in &reports {
        print!("{}", r.key_values(name));
    }
    if ok {
        println!("all residuals <= {tolerance:e}");
        EXIT_OK
    } else {
        println!("residuals exceed {tolerance:e}");
        EXIT_CHECK
    }
}

/// Parsed `--slice` argument.
#[derive(Debug, Clone, PartialEq)]
pub struct SliceSpec {
    pub stage: usize,
    pub policy: bool,
    /// `(axis, coordinate)` pairs fixing axes at their nearest node.
    pub fixed: Vec<(usize, f64)>,
}

impl SliceSpec {
    /// `stage=K,table=value|policy,aI=<coordinate>,...`; every key is
    /// optional, defaults are stage 0 and the value table.
    pub fn parse(text: &str) -> Result<SliceSpec> {
        let mut spec = SliceSpec {
            stage: 0,
            policy: false,
            fixed: Vec::new(),
        };
        for part in text.split(',').map(str::trim).filter(|p| !p.is_empty()) {
            let (key, value) = part
                .split_once('=')
                .ok_or_else(|| Error::Slice(format!("expected key=value, got `{part}`")))?;
            let bad = || Error::Slice(format!("bad value in `{part}`"));
            match key.trim() {
                "stage" => spec.stage = value.trim().parse().map_err(|_| bad())?,
                "table" => {
                    spec.policy = match value.trim() {
                        "value" => false,
                        "policy" => true,
                        _ => return Err(bad()),
                    }
                }
                k if k.starts_with('a') => {
                    let axis: usize = k[1..]
                        .parse()
                        .map_err(|_| Error::Slice(format!("unknown key `{k}`")))?;
                    let coord: f64 = value.trim().parse().map_err(|_| bad())?;
                    if !coord.is_finite() {
                        return Err(bad());
                    }
                    if spec.fixed.iter().any(|(a, _)| *a == axis) {
                        return Err(Error::Slice(format!("axis {axis} fixed twice")));
                    }
                    spec.fixed.push((axis, coord));
                }
                k => return Err(Error::Slice(format!("unknown key `{k}`"))),
            }
        }
        Ok(spec)
    }
}

/// CSV of the selected 1-D or 2-D slice: one column per free axis
/// coordinate, then `value` or `policy`.
pub fn export_slice(loaded: &LoadedManifest, spec: &SliceSpec) -> Result<String> {
    let (grid, values, choices) = if spec.policy {
        let t = loaded.policy_table(spec.stage)?;
        (t.grid, None, Some(t.choices))
    } else {
        let t = loaded.value_table(spec.stage)?;
        (t.grid, Some(t.values), None)
    };
    let dim = grid.dim();
    let mut fixed = vec![None; dim];
    for &(axis, coord) in &spec.fixed {
        if axis >= dim {
            return Err(Error::Slice(format!("axis {axis} outside a {dim}-axis grid")));
        }
        fixed[axis] = Some(grid.axes()[axis].nearest(coord));
    }
    let free: Vec<usize> = (0..dim).filter(|&i| fixed[i].is_none()).collect();
    if free.len() > 2 {
        return Err(Error::Slice(format!(
            "{} axes left free; fix all but at most two",
            free.len()
        )));
    }
    let mut csv = String::new();
    for &i in &free {
        let _ = write!(csv, "a{i},");
    }
    csv.push_str(if spec.policy { "policy\n" } else { "value\n" });
    let counts: Vec<usize> = free.iter().map(|&i| grid.axes()[i].count).collect();
    let total: usize = counts.iter().product();
    let mut index: Vec<usize> = fixed.iter().map(|f| f.unwrap_or(0)).collect();
    for flat in 0..total {
        let mut rem = flat;
        for (j, &axis) in free.iter().enumerate().rev() {
            index[axis] = rem % counts[j];
            rem /= counts[j];
        }
        let node = grid.flatten(&index)?;
        for &axis in &free {
            let _ = write!(csv, "{},", fmt_float(grid.axes()[axis].node(index[axis])));
        }
        match (&values, &choices) {
            (Some(v), _) => {
                let _ = writeln!(csv, "{}", fmt_float(v[node]));
            }
            (_, Some(c)) => {
                let _ = writeln!(csv, "{}", c[node]);
            }
            _ => unreachable!("one table is loaded"),
        }
    }
    Ok(csv)
}

/// `export`: writes a slice of a stored table as CSV.
pub fn cmd_export(manifest_path: &Path, slice: &str, out: Option<&Path>) -> i32 {
    let run = || -> Result<PathBuf> {
        let spec = SliceSpec::parse(slice)?;
        let loaded = Manifest::load(manifest_path)?;
        let csv = export_slice(&loaded, &spec)?;
        let path = out
            .map(Path::to_path_buf)
            .unwrap_or_else(|| loaded.dir.join("slice.csv"));
        fs::write(&path, csv).map_err(|e| Error::io(&path, e))?;
        Ok(path)
    };
    match run() {
        Ok(path) => {
            println!("wrote {}", path.display());
            EXIT_OK
        }
        Err(e) => report(&e),
    }
}
