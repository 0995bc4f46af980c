use std::fmt;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{max_abs_diff, GroupElement, MovingFrame, NoiseAction, TransformationGroup};
use crate::dp::{ControlInput, ControlSystem, EquivariantScaling, NoiseModel};
use crate::{Error, Point, Result};

pub type SampleRng = ChaCha8Rng;

/// Random draws for the numeric checks. Implementations must stay inside
/// the domain of the system and away from the singular set of the frame.
pub trait Sampler {
    type Input;

    fn state(&self, rng: &mut SampleRng) -> Point;

    fn input(&self, rng: &mut SampleRng) -> Self::Input;

    fn noise(&self, rng: &mut SampleRng) -> Point;

    fn element(&self, rng: &mut SampleRng) -> GroupElement;

    /// A point in the image of `ρ̄`.
    fn reduced(&self, rng: &mut SampleRng) -> Point;
}

/// Largest residual of one check over all samples.
#[derive(Debug, Clone, PartialEq)]
pub struct Residual {
    pub name: String,
    pub max: f64,
    /// Debug rendering of the sample that produced `max`.
    pub worst: String,
    /// Verified from the structure of the group rather than by sampling.
    pub structural: bool,
    pub skipped: bool,
}

impl Residual {
    fn new(name: &str) -> Self {
        Residual {
            name: name.to_string(),
            max: 0.0,
            worst: String::new(),
            structural: false,
            skipped: false,
        }
    }

    fn record(&mut self, value: f64, sample: impl FnOnce() -> String) {
        // NaN counts as a failure
        let value = if value.is_nan() { f64::INFINITY } else { value };
        if value > self.max || (self.worst.is_empty() && value == self.max) {
            self.max = value;
            self.worst = sample();
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct InvarianceReport {
    pub samples: usize,
    pub residuals: Vec<Residual>,
}

impl InvarianceReport {
    pub fn get(&self, name: &str) -> Option<&Residual> {
        self.residuals.iter().find(|r| r.name == name)
    }

    pub fn max_residual(&self) -> f64 {
        self.residuals
            .iter()
            .filter(|r| !r.skipped)
            .map(|r| r.max)
            .fold(0.0, f64::max)
    }

    pub fn passes(&self, tolerance: f64) -> bool {
        self.max_residual() <= tolerance
    }

    /// `prefix.check.key=value` lines.
    pub fn key_values(&self, prefix: &str) -> String {
        let mut out = format!("{prefix}.samples={}\n", self.samples);
        for r in &self.residuals {
            let status = if r.skipped {
                "not-checked"
            } else if r.structural {
                "structural"
            } else {
                "sampled"
            };
            out.push_str(&format!("{prefix}.{}.max_residual={:e}\n", r.name, r.max));
            out.push_str(&format!("{prefix}.{}.status={status}\n", r.name));
        }
        out
    }
}

impl fmt::Display for InvarianceReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "{:<28} {:>12}  {}", "check", "max residual", "worst sample")?;
        for r in &self.residuals {
            let value = if r.skipped {
                "not checked".to_string()
            } else {
                format!("{:.3e}", r.max)
            };
            let note = if r.structural {
                "(structural)".to_string()
            } else {
                r.worst.clone()
            };
            writeln!(f, "{:<28} {:>12}  {}", r.name, value, note)?;
        }
        write!(f, "{} samples", self.samples)
    }
}

/// Identity, composition and inverse laws of `(φ, χ, ψ)` on random samples.
pub fn check_group_axioms<G, Smp>(
    group: &G,
    sampler: &Smp,
    seed: u64,
    n_samples: usize,
) -> InvarianceReport
where
    G: TransformationGroup,
    Smp: Sampler<Input = G::Input>,
{
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut phi_id = Residual::new("phi.identity");
    let mut chi_id = Residual::new("chi.identity");
    let mut psi_id = Residual::new("psi.identity");
    let mut phi_comp = Residual::new("phi.compose");
    let mut chi_comp = Residual::new("chi.compose");
    let mut psi_comp = Residual::new("psi.compose");
    let mut inv = Residual::new("group.inverse");
    let e = group.identity();
    for _ in 0..n_samples {
        let x = sampler.state(&mut rng);
        let u = sampler.input(&mut rng);
        let w = sampler.noise(&mut rng);
        let a = sampler.element(&mut rng);
        let b = sampler.element(&mut rng);

        phi_id.record(group.state_distance(&group.act_state(&e, &x), &x), || {
            format!("x={x:?}")
        });
        chi_id.record(group.act_input(&e, &u).distance(&u), || format!("u={u:?}"));
        psi_id.record(max_abs_diff(&group.act_noise(&e, &w), &w), || {
            format!("w={w:?}")
        });

        let ab = group.compose(&a, &b);
        let lhs = group.act_state(&ab, &x);
        let rhs = group.act_state(&a, &group.act_state(&b, &x));
        phi_comp.record(group.state_distance(&lhs, &rhs), || {
            format!("a={:?} b={:?} x={x:?}", a.0, b.0)
        });
        let lhs = group.act_input(&ab, &u);
        let rhs = group.act_input(&a, &group.act_input(&b, &u));
        chi_comp.record(lhs.distance(&rhs), || format!("a={:?} b={:?} u={u:?}", a.0, b.0));
        let lhs = group.act_noise(&ab, &w);
        let rhs = group.act_noise(&a, &group.act_noise(&b, &w));
        psi_comp.record(max_abs_diff(&lhs, &rhs), || {
            format!("a={:?} b={:?} w={w:?}", a.0, b.0)
        });

        let round = group.compose(&a, &group.inverse(&a));
        inv.record(group.element_distance(&round, &e), || format!("a={:?}", a.0));
    }
    InvarianceReport {
        samples: n_samples,
        residuals: vec![phi_id, chi_id, psi_id, phi_comp, chi_comp, psi_comp, inv],
    }
}

/// Invariance of dynamics, stage cost, terminal cost and noise density.
///
/// The density condition `p(ψ(w)) |det Dψ(w)| = p(w)` is not sampled: it
/// holds structurally when `ψ` is the identity, or an orthogonal map acting
/// on isotropic Gaussian noise, and is reported as not checked otherwise.
pub fn check_system_invariance<S, G, Smp>(
    system: &S,
    group: &G,
    sampler: &Smp,
    seed: u64,
    n_samples: usize,
) -> Result<InvarianceReport>
where
    S: ControlSystem,
    G: TransformationGroup<Input = S::Input>,
    Smp: Sampler<Input = S::Input>,
{
    system_check(system, group, None, sampler, seed, n_samples)
}

/// Like [`check_system_invariance`] for costs that scale under the group:
/// checks `g(φx, χu, ψw) = l(α) g(x, u, w)` and `g_N(φx) = l(α) g_N(x)`.
pub fn check_system_equivariance<S, G, Smp>(
    system: &S,
    group: &G,
    scaling: &EquivariantScaling,
    sampler: &Smp,
    seed: u64,
    n_samples: usize,
) -> Result<InvarianceReport>
where
    S: ControlSystem,
    G: TransformationGroup<Input = S::Input>,
    Smp: Sampler<Input = S::Input>,
{
    system_check(system, group, Some(scaling), sampler, seed, n_samples)
}

fn system_check<S, G, Smp>(
    system: &S,
    group: &G,
    scaling: Option<&EquivariantScaling>,
    sampler: &Smp,
    seed: u64,
    n_samples: usize,
) -> Result<InvarianceReport>
where
    S: ControlSystem,
    G: TransformationGroup<Input = S::Input>,
    Smp: Sampler<Input = S::Input>,
{
    if system.state_dim() != group.state_dim() {
        return Err(Error::DimensionMismatch {
            expected: system.state_dim(),
            got: group.state_dim(),
        });
    }
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut f_res = Residual::new("f.invariance");
    let suffix = if scaling.is_some() {
        "equivariance"
    } else {
        "invariance"
    };
    let mut g_res = Residual::new(&format!("g.{suffix}"));
    let mut gn_res = Residual::new(&format!("gN.{suffix}"));
    let horizon = system.horizon();
    for _ in 0..n_samples {
        let k = if horizon > 0 {
            rng.random_range(0..horizon)
        } else {
            0
        };
        let x = sampler.state(&mut rng);
        let u = sampler.input(&mut rng);
        let w = sampler.noise(&mut rng);
        let a = sampler.element(&mut rng);
        let l = scaling.map_or(1.0, |s| s.factor(&a));
        let (tx, tu, tw) = (
            group.act_state(&a, &x),
            group.act_input(&a, &u),
            group.act_noise(&a, &w),
        );
        if horizon > 0 {
            let moved = system.step(k, &tx, &tu, &tw);
            let back = group.act_state(&group.inverse(&a), &moved);
            let direct = system.step(k, &x, &u, &w);
            f_res.record(group.state_distance(&back, &direct), || {
                format!("k={k} a={:?} x={x:?} u={u:?} w={w:?}", a.0)
            });
            let dg = system.stage_cost(k, &tx, &tu, &tw) - l * system.stage_cost(k, &x, &u, &w);
            g_res.record(dg.abs(), || {
                format!("k={k} a={:?} x={x:?} u={u:?} w={w:?}", a.0)
            });
        }
        let dgn = system.terminal_cost(&tx) - l * system.terminal_cost(&x);
        gn_res.record(dgn.abs(), || format!("a={:?} x={x:?}", a.0));
    }
    let mut density = Residual::new("noise.density");
    match (system.noise(), group.noise_action()) {
        (_, NoiseAction::Identity)
        | (NoiseModel::IsotropicGaussian { .. }, NoiseAction::Orthogonal)
        | (NoiseModel::Deterministic { .. }, NoiseAction::Orthogonal) => density.structural = true,
        _ => density.skipped = true,
    }
    Ok(InvarianceReport {
        samples: n_samples,
        residuals: vec![f_res, g_res, gn_res, density],
    })
}

/// Normalization, invariance, right-inverse and equivariance properties of a
/// moving frame.
pub fn verify_moving_frame<F, Smp>(
    frame: &F,
    sampler: &Smp,
    seed: u64,
    n_samples: usize,
) -> InvarianceReport
where
    F: MovingFrame,
    Smp: Sampler<Input = <F::Group as TransformationGroup>::Input>,
{
    let group = frame.group();
    let mut rng = SampleRng::seed_from_u64(seed);
    let mut norm = Residual::new("frame.normalization");
    let mut def = Residual::new("rho.definition");
    let mut invariance = Residual::new("rho.invariance");
    let mut equivariance = Residual::new("gamma.equivariance");
    let mut right_inv = Residual::new("rho_bar_inv.right_inverse");
    let mut section = Residual::new("rho_bar_inv.on_section");
    for _ in 0..n_samples {
        let x = sampler.state(&mut rng);
        let a = sampler.element(&mut rng);
        let moved = group.act_state(&a, &x);
        match (
            frame.gamma(&x),
            frame.rho(&x),
            frame.gamma(&moved),
            frame.rho(&moved),
        ) {
            (Ok(g), Ok(r), Ok(g_moved), Ok(r_moved)) => {
                norm.record(max_abs_diff(&group.split_a(&g, &x), frame.level()), || {
                    format!("x={x:?}")
                });
                def.record(frame.reduced_distance(&group.split_b(&g, &x), &r), || {
                    format!("x={x:?}")
                });
                invariance.record(frame.reduced_distance(&r_moved, &r), || {
                    format!("a={:?} x={x:?}", a.0)
                });
                let expected = group.compose(&g, &group.inverse(&a));
                equivariance.record(group.element_distance(&g_moved, &expected), || {
                    format!("a={:?} x={x:?}", a.0)
                });
            }
            _ => norm.record(f64::INFINITY, || format!("singular sample x={x:?}")),
        }

        let reduced = sampler.reduced(&mut rng);
        match frame
            .rho_bar_inv(&reduced)
            .and_then(|z| frame.rho(&z).map(|r| (z, r)))
        {
            Ok((z, r)) => {
                right_inv.record(frame.reduced_distance(&r, &reduced), || {
                    format!("xbar={reduced:?}")
                });
                let off = if frame.on_cross_section(&z) { 0.0 } else { 1.0 };
                section.record(off, || format!("xbar={reduced:?}"));
            }
            Err(e) => right_inv.record(f64::INFINITY, || format!("xbar={reduced:?}: {e}")),
        }
    }
    InvarianceReport {
        samples: n_samples,
        residuals: vec![norm, def, invariance, equivariance, right_inv, section],
    }
}
