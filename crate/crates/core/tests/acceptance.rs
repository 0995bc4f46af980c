//! Acceptance run: one PASS/FAIL line per criterion.
//!
//! Criteria 1-8 run twice, with one and with three workers; the last
//! criterion compares digests of everything the two passes produced.

use std::f64::consts::{FRAC_PI_2, FRAC_PI_4, TAU};
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use sha2::{Digest, Sha256};

use symdp::dp::{
    backward_induction_equivariant, backward_induction_full, backward_induction_reduced,
    brute_force_value, lifted_policy, simulate_rollout, ControlSystem, Retain, SolveOptions,
    SolveResult,
};
use symdp::grid::io::{encode_policy, encode_values};
use symdp::grid::{Axis, GridSpec};
use symdp::symmetry::{
    check_group_axioms, check_system_invariance, lift_equivariant_value, MovingFrame,
    TransformationGroup, GroupElement, verify_moving_frame, InvarianceReport,
};
use symdp::systems::dubins::FORMATION_X0;
use symdp::systems::mri::EQUILIBRIUM;
use symdp::systems::{
    DubinsConfig, DubinsFrame, DubinsPair, DubinsSampler, LinearConfig, LinearSystem, MriConfig,
    MriFrame, MriSampler, MriSystem, Rotor2D, RotorConfig, RotorFrame, RotorGroup,
};
use symdp::Point;

type Outcome = symdp::Result<(bool, String)>;

/// Collects the bytes a criterion produced, for the determinism check.
#[derive(Default)]
struct Digest256(Sha256);

impl Digest256 {
    fn f64s(&mut self, values: &[f64]) {
        for v in values {
            self.0.update(v.to_le_bytes());
        }
    }

    fn result(&mut self, r: &SolveResult) {
        for t in &r.values {
            self.0.update(encode_values(t));
        }
        for t in &r.policies {
            self.0.update(encode_policy(t));
        }
    }

    fn finish(self) -> String {
        hex::encode(self.0.finalize())
    }
}

fn options(workers: usize) -> SolveOptions {
    SolveOptions {
        workers,
        retain: Retain::All,
    }
}

/// Max `|J_0_full - J̄_0|` over full-grid nodes on the positive x-axis.
fn rotor_discrepancy(count: usize, workers: usize, d: &mut Digest256) -> symdp::Result<f64> {
    let system = Rotor2D::new(RotorConfig::default())?;
    let full_grid = RotorConfig::full_grid(count, 2.0)?;
    let reduced_grid = RotorConfig::reduced_grid(count, 2.0)?;
    let full = backward_induction_full(&system, &full_grid, &options(workers))?;
    let reduced =
        backward_induction_reduced(&system, &RotorFrame::new(), &reduced_grid, &options(workers))?;
    d.result(&full);
    d.result(&reduced);
    let mid = (count - 1) / 2;
    let mut worst = 0.0f64;
    for i in mid..count {
        let node = full_grid.flatten(&[i, mid])?;
        let x = full_grid.node_coordinates(node)?;
        assert_eq!(x[1], 0.0);
        let lifted = reduced.initial_value().interpolate(&[x[0]])?;
        worst = worst.max((full.initial_value().values[node] - lifted).abs());
    }
    Ok(worst)
}

fn criterion_1(workers: usize, d: &mut Digest256) -> Outcome {
    let coarse = rotor_discrepancy(101, workers, d)?;
    let fine = rotor_discrepancy(201, workers, d)?;
    d.f64s(&[coarse, fine]);
    let ratio = coarse / fine;
    Ok((
        coarse <= 5e-2 && ratio >= 1.8,
        format!("coarse {coarse:.3e} (<= 5e-2), refined {fine:.3e}, reduction {ratio:.2}x (>= 1.8x)"),
    ))
}

/// Max over stages and 200 sampled pairs of `|J_k(φ_α x) − J_k(x)|`.
fn rotor_symmetry(count: usize, workers: usize, d: &mut Digest256) -> symdp::Result<f64> {
    let system = Rotor2D::new(RotorConfig::default())?;
    let grid = RotorConfig::full_grid(count, 2.0)?;
    let full = backward_induction_full(&system, &grid, &options(workers))?;
    d.result(&full);
    let group = RotorGroup;
    let mut rng = ChaCha8Rng::seed_from_u64(2);
    let mut worst = 0.0f64;
    for _ in 0..200 {
        let r = rng.random_range(0.0..1.9);
        let t = rng.random_range(0.0..TAU);
        let x = [r * t.cos(), r * t.sin()];
        let moved = group.act_state(&GroupElement::new(&[rng.random_range(0.0..TAU)]), &x);
        for table in &full.values {
            let diff = (table.interpolate(&moved)? - table.interpolate(&x)?).abs();
            worst = worst.max(diff);
        }
    }
    Ok(worst)
}

fn criterion_2(workers: usize, d: &mut Digest256) -> Outcome {
    let coarse = rotor_symmetry(101, workers, d)?;
    let fine = rotor_symmetry(201, workers, d)?;
    d.f64s(&[coarse, fine]);
    Ok((
        coarse <= 5e-2 && fine <= 0.5 * coarse,
        format!("coarse {coarse:.3e} (<= 5e-2), refined {fine:.3e} (<= half)"),
    ))
}

/// Scalar Riccati recursion `P_k = Q + A²P − (ABP)²/(R + B²P)`.
fn riccati_p0(a: f64, b: f64, q: f64, r: f64, horizon: usize) -> f64 {
    let mut p = q;
    for _ in 0..horizon {
        p = q + a * a * p - (a * b * p).powi(2) / (r + b * b * p);
    }
    p
}

fn criterion_3(workers: usize, d: &mut Digest256) -> Outcome {
    let system = LinearSystem::lqr(LinearConfig::lqr_default())?;
    let grid = GridSpec::new(vec![Axis::new(-2.0, 2.0, 401)?])?;
    let result = backward_induction_full(&system, &grid, &options(workers))?;
    d.result(&result);
    let p0 = riccati_p0(1.0, 1.0, 1.0, 1.0, 3);
    let values = &result.initial_value().values;
    let policy = result.policy(0)?;
    let step = 4.0 / 200.0;
    let (mut worst_rel, mut worst_u) = (0.0f64, 0.0f64);
    for i in 0..grid.len() {
        let x = grid.axes()[0].node(i);
        if !(0.5..=1.0).contains(&x.abs()) {
            continue;
        }
        let exact = p0 * x * x;
        worst_rel = worst_rel.max((values[i] - exact).abs() / exact.max(0.1));
        let u = |y: f64| -> symdp::Result<f64> {
            Ok(system.inputs()[policy.choice_at(&[y])?][0])
        };
        worst_u = worst_u.max((u(2.0 * x)? - 2.0 * u(x)?).abs());
    }
    d.f64s(&[worst_rel, worst_u]);
    Ok((
        worst_rel <= 0.02 && worst_u <= step + 1e-12,
        format!(
            "P0 {p0:.6}, max relative error {:.3}% (<= 2%), max |u*(2x) - 2u*(x)| {worst_u:.4} (<= {step})",
            100.0 * worst_rel
        ),
    ))
}

fn criterion_4(workers: usize, d: &mut Digest256) -> Outcome {
    let system = LinearSystem::l1(LinearConfig::l1_default())?;
    let frame = system.frame();
    let scaling = system.scaling();
    let grid = frame.reduced_grid(256)?;
    let coarse = backward_induction_equivariant(&system, &frame, &scaling, &grid, &options(workers))?;
    let fine_grid = grid.refined(2)?;
    let fine =
        backward_induction_equivariant(&system, &frame, &scaling, &fine_grid, &options(workers))?;
    d.result(&coarse);
    d.result(&fine);
    // interpolation error of the coarse table, measured against the refined one
    let eps_grid = fine_grid
        .nodes()
        .map(|t| {
            let a = coarse.initial_value().interpolate(&t)?;
            let b = fine.initial_value().interpolate(&t)?;
            Ok((a - b).abs())
        })
        .collect::<symdp::Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    let table = coarse.initial_value();
    let policy = coarse.policy(0)?;
    let mut rng = ChaCha8Rng::seed_from_u64(4);
    let (mut worst, mut index_mismatch) = (0.0f64, 0usize);
    for _ in 0..500 {
        let r = rng.random_range(0.3..=1.0);
        let t = rng.random_range(0.0..TAU);
        let x = [r * t.cos(), r * t.sin()];
        let x3 = [3.0 * x[0], 3.0 * x[1]];
        let j = lift_equivariant_value(&frame, &scaling, table, &x)?;
        let j3 = lift_equivariant_value(&frame, &scaling, table, &x3)?;
        worst = worst.max((j3 - 3.0 * j).abs());
        if policy.choice_at(&frame.rho(&x)?)? != policy.choice_at(&frame.rho(&x3)?)? {
            index_mismatch += 1;
        }
    }
    d.f64s(&[eps_grid, worst]);
    Ok((
        worst <= 3.0 * eps_grid && index_mismatch == 0,
        format!(
            "max |J(3x) - 3J(x)| {worst:.3e} (<= 3 eps_grid = {:.3e}), argmin mismatches {index_mismatch}/500",
            3.0 * eps_grid
        ),
    ))
}

/// Reduced box around every reduced state the brute force visits.
fn mri_box(system: &MriSystem, frame: &MriFrame, x0: &[f64], horizon: usize) -> symdp::Result<GridSpec> {
    let mut layer = vec![Point::from_slice(x0)];
    let mut lo = [f64::INFINITY; 5];
    let mut hi = [f64::NEG_INFINITY; 5];
    for k in 0..=horizon {
        for x in &layer {
            let r = frame.rho(x)?;
            for i in 0..5 {
                lo[i] = lo[i].min(r[i]);
                hi[i] = hi[i].max(r[i]);
            }
        }
        if k < horizon {
            layer = layer
                .iter()
                .flat_map(|x| system.inputs().iter().map(move |u| system.step(k, x, u, &[])))
                .collect();
        }
    }
    let axes = (0..5)
        .map(|i| {
            let margin = 0.1 * (hi[i] - lo[i]).max(0.5);
            let low = if i == 0 { (lo[i] - margin).max(0.0) } else { lo[i] - margin };
            Axis::new(low, hi[i] + margin, 41)
        })
        .collect::<symdp::Result<Vec<_>>>()?;
    GridSpec::new(axes)
}

fn criterion_5(workers: usize, d: &mut Digest256) -> Outcome {
    let config = MriConfig {
        horizon: 2,
        pulses: vec![
            [0.0, FRAC_PI_4],
            [0.0, FRAC_PI_2],
            [FRAC_PI_2, FRAC_PI_4],
            [FRAC_PI_2, FRAC_PI_2],
        ],
        ..MriConfig::default()
    };
    let mri = MriSystem::new(config)?;
    let mri_frame = MriFrame::new();
    let grid = mri_box(&mri, &mri_frame, &EQUILIBRIUM, 2)?;
    let opts = SolveOptions {
        workers,
        retain: Retain::Initial,
    };
    let reduced = backward_induction_reduced(&mri, &mri_frame, &grid, &opts)?;
    let dp = reduced.initial_value().interpolate(&mri_frame.rho(&EQUILIBRIUM)?)?;
    drop(reduced);
    let brute = brute_force_value(&mri, &EQUILIBRIUM, 2)?;
    let mri_err = (dp - brute).abs();

    let config = DubinsConfig {
        sigma: 0.0,
        v_set: vec![0.1],
        horizon: 2,
        ..DubinsConfig::default()
    };
    let dubins = DubinsPair::new(config)?;
    let dubins_frame = DubinsFrame::new();
    let grid = DubinsConfig::reduced_grid(81, 81, 256, 1.0)?;
    let reduced = backward_induction_reduced(&dubins, &dubins_frame, &grid, &options(workers))?;
    d.result(&reduced);
    let dubins_dp = reduced.initial_value().interpolate(&dubins_frame.rho(&FORMATION_X0)?)?;
    let dubins_brute = brute_force_value(&dubins, &FORMATION_X0, 2)?;
    let dubins_err = (dubins_dp - dubins_brute).abs();
    d.f64s(&[dp, brute, dubins_dp, dubins_brute]);
    Ok((
        mri_err <= 2e-2 && dubins_err <= 2e-2,
        format!(
            "mri: dp {dp:.6} brute {brute:.6} |diff| {mri_err:.2e}; dubins: dp {dubins_dp:.6} brute {dubins_brute:.6} |diff| {dubins_err:.2e} (<= 2e-2)"
        ),
    ))
}

fn criterion_6(_workers: usize, d: &mut Digest256) -> Outcome {
    fn worst(reports: &[InvarianceReport]) -> f64 {
        reports.iter().map(|r| r.max_residual()).fold(0.0, f64::max)
    }
    let dubins = DubinsPair::new(DubinsConfig::default())?;
    let dubins_frame = DubinsFrame::new();
    let sampler = DubinsSampler::new(&dubins);
    let dubins_reports = [
        check_group_axioms(dubins_frame.group(), &sampler, 6, 1000),
        check_system_invariance(&dubins, dubins_frame.group(), &sampler, 7, 1000)?,
        verify_moving_frame(&dubins_frame, &sampler, 8, 1000),
    ];
    let mri = MriSystem::new(MriConfig::default())?;
    let mri_frame = MriFrame::new();
    let sampler = MriSampler::new(&mri);
    let mri_reports = [
        check_group_axioms(mri_frame.group(), &sampler, 6, 1000),
        check_system_invariance(&mri, mri_frame.group(), &sampler, 7, 1000)?,
        verify_moving_frame(&mri_frame, &sampler, 8, 1000),
    ];
    let (a, b) = (worst(&dubins_reports), worst(&mri_reports));
    d.f64s(&[a, b]);
    Ok((
        a <= 1e-9 && b <= 1e-9,
        format!("max residual dubins-pair {a:.2e}, mri-fingerprint {b:.2e} (<= 1e-9, 1000 samples)"),
    ))
}

fn mean(xs: &[f64]) -> f64 {
    xs.iter().sum::<f64>() / xs.len() as f64
}

fn criterion_7(workers: usize, d: &mut Digest256) -> Outcome {
    let config = DubinsConfig {
        sigma: 0.3,
        nodes_per_dim: 5,
        horizon: 20,
        ..DubinsConfig::default()
    };
    let system = DubinsPair::new(config)?;
    let frame = DubinsFrame::new();
    let grid = DubinsConfig::reduced_grid(21, 21, 17, 2.0)?;
    let start = Instant::now();
    let result = backward_induction_reduced(&system, &frame, &grid, &options(workers))?;
    let solve_seconds = start.elapsed().as_secs_f64();
    d.result(&result);
    let zero = system
        .inputs()
        .iter()
        .position(|u| u.iter().all(|&c| c == 0.0))
        .expect("zero input present");
    let n_inputs = system.inputs().len();
    let (mut dp, mut idle, mut random) = (Vec::new(), Vec::new(), Vec::new());
    for r in 0..200u64 {
        let seed = 1000 + r;
        dp.push(simulate_rollout(&system, lifted_policy(&system, &frame, &result), &FORMATION_X0, seed)?.total_cost);
        let inputs = system.inputs();
        idle.push(simulate_rollout(&system, |_, _| Ok(inputs[zero].clone()), &FORMATION_X0, seed)?.total_cost);
        let mut picker = ChaCha8Rng::seed_from_u64(seed ^ 0x5eed);
        random.push(
            simulate_rollout(
                &system,
                |_, _| Ok(inputs[picker.random_range(0..n_inputs)].clone()),
                &FORMATION_X0,
                seed,
            )?
            .total_cost,
        );
    }
    let (a, b, c) = (mean(&dp), mean(&idle), mean(&random));
    d.f64s(&[a, b, c]);
    Ok((
        a < b && a < c,
        format!("mean cost dp {a:.4}, zero input {b:.4}, random {c:.4} (200 rollouts; solve {solve_seconds:.0}s)"),
    ))
}

fn criterion_8(workers: usize, d: &mut Digest256) -> Outcome {
    let system = MriSystem::new(MriConfig::default())?;
    let frame = MriFrame::new();
    let grid = MriConfig::reduced_grid([6, 10, 15, 15, 15], 5.0)?;
    let start = Instant::now();
    let result = backward_induction_reduced(&system, &frame, &grid, &options(workers))?;
    let solve_seconds = start.elapsed().as_secs_f64();
    d.result(&result);
    let rollout = simulate_rollout(&system, lifted_policy(&system, &frame, &result), &EQUILIBRIUM, 0)?;
    let dp = system.fisher_information(&rollout.states);
    let inputs = system.inputs();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    let mut best = f64::NEG_INFINITY;
    for _ in 0..100 {
        let sequence: Vec<usize> = (0..system.horizon())
            .map(|_| rng.random_range(0..inputs.len()))
            .collect();
        let r = simulate_rollout(&system, |k, _| Ok(inputs[sequence[k]].clone()), &EQUILIBRIUM, 0)?;
        best = best.max(system.fisher_information(&r.states));
    }
    d.f64s(&[dp, best]);
    Ok((
        dp > best,
        format!(
            "fisher information dp {dp:.3}, best of 100 random {best:.3}; clamped {} of {} lookups (solve {solve_seconds:.0}s)",
            result.total_clamped(),
            result.diagnostics.iter().map(|s| s.evaluations).sum::<u64>()
        ),
    ))
}

/// Quadrature convergence on the dubins desk config: 3 vs 7 nodes per
/// dimension, max change of `J̄_0` over all nodes.
fn quadrature_convergence() -> Outcome {
    let grid = DubinsConfig::reduced_grid(21, 21, 17, 2.0)?;
    let solve = |nodes_per_dim| -> symdp::Result<Vec<f64>> {
        let system = DubinsPair::new(DubinsConfig {
            sigma: 0.3,
            nodes_per_dim,
            horizon: 20,
            ..DubinsConfig::default()
        })?;
        let options = SolveOptions {
            workers: 1,
            retain: Retain::Initial,
        };
        let result = backward_induction_reduced(&system, &DubinsFrame::new(), &grid, &options)?;
        Ok(result.initial_value().values.clone())
    };
    let (coarse, fine) = (solve(3)?, solve(7)?);
    let worst = coarse
        .iter()
        .zip(&fine)
        .map(|(a, b)| (a - b).abs())
        .fold(0.0, f64::max);
    Ok((
        worst <= 1e-3,
        format!("max |J_0(3 nodes) - J_0(7 nodes)| {worst:.3e} (<= 1e-3)"),
    ))
}

type Criterion = fn(usize, &mut Digest256) -> Outcome;

const CRITERIA: [(&str, Criterion); 8] = [
    ("rotor reduction matches full solve", criterion_1),
    ("rotor value tables are rotation invariant", criterion_2),
    ("scalar LQR matches Riccati", criterion_3),
    ("L1 value scales linearly", criterion_4),
    ("reduced DP matches brute force", criterion_5),
    ("invariance suites", criterion_6),
    ("dubins desk policy beats baselines", criterion_7),
    ("mri desk policy beats random sequences", criterion_8),
];

struct Run {
    pass: bool,
    detail: String,
    seconds: f64,
    digest: String,
}

fn run_all(workers: usize) -> Vec<Run> {
    CRITERIA
        .iter()
        .map(|(_, criterion)| {
            let mut digest = Digest256::default();
            let start = Instant::now();
            let (pass, detail) = match criterion(workers, &mut digest) {
                Ok(r) => r,
                Err(e) => (false, format!("error: {e}")),
            };
            Run {
                pass,
                detail,
                seconds: start.elapsed().as_secs_f64(),
                digest: digest.finish(),
            }
        })
        .collect()
}

fn line(index: usize, name: &str, pass: bool, detail: &str) {
    let status = if pass { "PASS" } else { "FAIL" };
    println!("{status} criterion {index}: {name}: {detail}");
}

fn main() {
    let first = run_all(1);
    let mut passed = 0;
    for (i, (run, (name, _))) in first.iter().zip(CRITERIA.iter()).enumerate() {
        line(i + 1, name, run.pass, &format!("{} [{:.1}s]", run.detail, run.seconds));
        passed += run.pass as usize;
    }
    let second = run_all(3);
    let differing: Vec<String> = first
        .iter()
        .zip(&second)
        .enumerate()
        .filter(|(_, (a, b))| a.digest != b.digest)
        .map(|(i, _)| (i + 1).to_string())
        .collect();
    let deterministic = differing.is_empty();
    let detail = if deterministic {
        "criteria 1-8 outputs identical with 1 and 3 workers".to_string()
    } else {
        format!("outputs differ between 1 and 3 workers for criteria {}", differing.join(", "))
    };
    line(9, "determinism across reruns and worker counts", deterministic, &detail);
    passed += deterministic as usize;
    println!("{passed}/9 criteria passed");

    let start = Instant::now();
    let (pass, detail) = quadrature_convergence().unwrap_or_else(|e| (false, format!("error: {e}")));
    let status = if pass { "PASS" } else { "FAIL" };
    println!(
        "{status} property: dubins quadrature convergence: {detail} [{:.1}s]",
        start.elapsed().as_secs_f64()
    );
}
