//! Cost function, parameter-shift circuit gradients, finite-difference
//! nuclear gradients, adaptive circuit construction, and the joint
//! gradient-descent loop over circuit parameters and nuclear coordinates.

use crate::hamiltonian::GeometryContext;
use crate::molecule::{geometry_params, GeometryParams, Molecule};
use crate::pauli::PauliSum;
use crate::sector::{quadratic_form, SectorCircuit, SectorSpace};
use crate::statevector::{run_circuit_gate_angles, Circuit, Gate, GateKind, Statevector};
use crate::{Error, Result};
use nalgebra::{DMatrix, DVector};
use rayon::prelude::*;
use std::f64::consts::{FRAC_PI_4, SQRT_2};

/// Spin-projection-conserving excitation of the Hartree-Fock determinant.
/// Spin-orbital `p` has spin `p mod 2` (interleaved convention).
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Excitation {
    pub kind: GateKind,
    pub occupied: Vec<usize>,
    pub virtuals: Vec<usize>,
}

impl Excitation {
    /// The excitation gate acting on `[occupied..., virtuals...]`; indices
    /// are strictly increasing because occupied < N_e <= virtual.
    pub fn gate(&self, angle_index: usize) -> Gate {
        let mut qubits = self.occupied.clone();
        qubits.extend_from_slice(&self.virtuals);
        Gate {
            kind: self.kind,
            qubits,
            angle_index,
        }
    }
}

/// Knobs of the joint optimizer. Every CLI flag maps onto one field.
#[derive(Debug, Clone)]
pub struct OptimizerConfig {
    /// Gradient-descent step for circuit angles.
    pub step_theta: f64,
    /// Gradient-descent step for coordinates, Bohr per (Ha/Bohr).
    pub step_x: f64,
    /// Stop when max |∂g/∂x_i| falls to this (Ha/Bohr).
    pub grad_tolerance_x: f64,
    pub max_iterations: usize,
    /// Central-difference step for the Hamiltonian derivative (Bohr).
    pub fd_delta: f64,
    /// "Non-zero gradient" cutoff (Ha) for adaptive gate selection.
    pub adaptive_grad_threshold: f64,
}

impl Default for OptimizerConfig {
    fn default() -> Self {
        OptimizerConfig {
            step_theta: 0.4,
            step_x: 0.5,
            grad_tolerance_x: 1e-5,
            max_iterations: 500,
            fd_delta: 0.01,
            adaptive_grad_threshold: 1e-5,
        }
    }
}

impl OptimizerConfig {
    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("step_theta", self.step_theta),
            ("step_x", self.step_x),
            ("grad_tolerance_x", self.grad_tolerance_x),
            ("fd_delta", self.fd_delta),
            ("adaptive_grad_threshold", self.adaptive_grad_threshold),
        ];
        for (name, v) in fields {
            if !(v > 0.0) {
                return Err(Error::Invalid(format!("{name} must be positive, got {v}")));
            }
        }
        if self.max_iterations == 0 {
            return Err(Error::Invalid("max_iterations must be positive".into()));
        }
        Ok(())
    }
}

/// One recorded optimizer step.
#[derive(Debug, Clone)]
pub struct TrajectoryPoint {
    pub iteration: usize,
    pub energy: f64,
    pub theta: Vec<f64>,
    pub x: Vec<f64>,
    pub max_grad_x: f64,
    pub max_grad_theta: f64,
}

/// Why the loop ended.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum StopReason {
    /// max |∇x| fell under the tolerance.
    Converged,
    /// The iteration cap was reached first.
    MaxIterations,
    /// A mid-trajectory failure (SCF, geometry) cut the run short.
    Aborted(String),
}

/// Per-iteration record of the joint optimization plus the final artifacts.
#[derive(Debug, Clone)]
pub struct Trajectory {
    pub points: Vec<TrajectoryPoint>,
    pub stop: StopReason,
    pub circuit: Option<Circuit>,
    pub final_geometry: Option<GeometryParams>,
}

impl Trajectory {
    pub fn converged(&self) -> bool {
        self.stop == StopReason::Converged
    }

    pub fn final_point(&self) -> &TrajectoryPoint {
        self.points.last().expect("trajectory has at least one point")
    }

    /// CSV with one row per iteration and 12 significant digits:
    /// `iter,energy_ha,max_grad_x,max_grad_theta,<x...>,<theta...>`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("iter,energy_ha,max_grad_x,max_grad_theta");
        if let Some(p) = self.points.first() {
            for i in 0..p.x.len() {
                out.push_str(&format!(",x_{i}"));
            }
            for i in 0..p.theta.len() {
                out.push_str(&format!(",theta_{i}"));
            }
        }
        out.push('\n');
        for p in &self.points {
            out.push_str(&format!(
                "{},{:.11e},{:.11e},{:.11e}",
                p.iteration, p.energy, p.max_grad_x, p.max_grad_theta
            ));
            for v in &p.x {
                out.push_str(&format!(",{v:.11e}"));
            }
            for v in &p.theta {
                out.push_str(&format!(",{v:.11e}"));
            }
            out.push('\n');
        }
        out
    }
}

/// Four-term parameter-shift rule for gates whose generator has spectrum
/// {0, ±1} (full-angle rotation convention, frequencies {1, 2}):
///
/// ```text
/// dg/dθ = c₊ [g(θ+π/4) − g(θ−π/4)] − c₋ [g(θ+3π/4) − g(θ−3π/4)]
/// c± = (√2 ± 1) / (2√2)
/// ```
pub fn four_term_shift<F>(mut eval: F, theta: f64) -> Result<f64>
where
    F: FnMut(f64) -> Result<f64>,
{
    let c_plus = (SQRT_2 + 1.0) / (2.0 * SQRT_2);
    let c_minus = (SQRT_2 - 1.0) / (2.0 * SQRT_2);
    let v = c_plus * (eval(theta + FRAC_PI_4)? - eval(theta - FRAC_PI_4)?)
        - c_minus * (eval(theta + 3.0 * FRAC_PI_4)? - eval(theta - 3.0 * FRAC_PI_4)?);
    Ok(v)
}

/// Expectation engine for one (circuit, observable) pair, compressed onto
/// the Hartree-Fock particle/spin sector when possible.
enum CostEngine<'a> {
    Sector {
        compiled: SectorCircuit,
        start: DVector<f64>,
        matrix: DMatrix<f64>,
    },
    Dense {
        circuit: &'a Circuit,
        observable: &'a PauliSum,
    },
}

impl CostEngine<'_> {
    fn new<'a>(circuit: &'a Circuit, observable: &'a PauliSum) -> Result<CostEngine<'a>> {
        circuit.validate()?;
        if observable.n_qubits() != circuit.n_qubits {
            return Err(Error::Invalid(format!(
                "observable on {} qubits, circuit on {}",
                observable.n_qubits(),
                circuit.n_qubits
            )));
        }
        let n_alpha = circuit
            .hf_occupations
            .iter()
            .enumerate()
            .filter(|(q, &occ)| occ && q % 2 == 0)
            .count();
        let n_beta = circuit
            .hf_occupations
            .iter()
            .enumerate()
            .filter(|(q, &occ)| occ && q % 2 == 1)
            .count();
        let space = SectorSpace::new(circuit.n_qubits, n_alpha, n_beta);
        if let (Some(matrix), Some(compiled), Some(start)) = (
            space.project(observable),
            space.compile(circuit),
            space.basis_vector(&circuit.hf_occupations),
        ) {
            Ok(CostEngine::Sector {
                compiled,
                start,
                matrix,
            })
        } else {
            Ok(CostEngine::Dense {
                circuit,
                observable,
            })
        }
    }

    /// Expectation value with explicit per-gate angles.
    fn energy(&self, gate_angles: &[f64]) -> Result<f64> {
        match self {
            CostEngine::Sector {
                compiled,
                start,
                matrix,
            } => {
                let v = compiled.run(gate_angles, start);
                Ok(quadratic_form(matrix, &v))
            }
            CostEngine::Dense {
                circuit,
                observable,
            } => run_circuit_gate_angles(circuit, gate_angles).expectation(observable),
        }
    }
}

fn gate_angles_from_slots(circuit: &Circuit, theta: &[f64]) -> Result<Vec<f64>> {
    if circuit.n_parameters() > theta.len() {
        return Err(Error::Invalid(format!(
            "circuit references angle slot {} but only {} angles given",
            circuit.n_parameters() - 1,
            theta.len()
        )));
    }
    Ok(circuit.gates.iter().map(|g| theta[g.angle_index]).collect())
}

fn gradient_wrt_slots(
    engine: &CostEngine<'_>,
    circuit: &Circuit,
    theta: &[f64],
) -> Result<Vec<f64>> {
    let base = gate_angles_from_slots(circuit, theta)?;
    let grads: Vec<Result<f64>> = (0..theta.len())
        .into_par_iter()
        .map(|slot| {
            let mut total = 0.0;
            for (pos, gate) in circuit.gates.iter().enumerate() {
                if gate.angle_index != slot {
                    continue;
                }
                total += four_term_shift(
                    |angle| {
                        let mut angles = base.clone();
                        angles[pos] = angle;
                        engine.energy(&angles)
                    },
                    base[pos],
                )?;
            }
            Ok(total)
        })
        .collect();
    grads.into_iter().collect()
}

/// The cost `g(θ, x)`: total energy of the circuit state under the
/// Hamiltonian at geometry `x`, nuclear repulsion and core energy included.
pub fn cost(circuit: &Circuit, theta: &[f64], molecule: &Molecule, x: &[f64]) -> Result<f64> {
    let ctx = GeometryContext::new(molecule, x)?;
    let h = ctx.hamiltonian()?;
    let engine = CostEngine::new(circuit, &h)?;
    engine.energy(&gate_angles_from_slots(circuit, theta)?)
}

/// Analytic circuit gradient of `⟨Ψ(θ)|H|Ψ(θ)⟩` by the parameter-shift
/// rule, one entry per angle slot.
pub fn grad_theta(circuit: &Circuit, theta: &[f64], hamiltonian: &PauliSum) -> Result<Vec<f64>> {
    let engine = CostEngine::new(circuit, hamiltonian)?;
    gradient_wrt_slots(&engine, circuit, theta)
}

/// Nuclear gradient: component `i` is the expectation of the
/// finite-difference observable `∂H/∂x_i` in the fixed state `|Ψ(θ)⟩`.
pub fn grad_x(
    circuit: &Circuit,
    theta: &[f64],
    molecule: &Molecule,
    x: &[f64],
    fd_delta: f64,
) -> Result<Vec<f64>> {
    let ctx = GeometryContext::new(molecule, x)?;
    grad_x_with_context(&ctx, circuit, theta, fd_delta)
}

fn grad_x_with_context(
    ctx: &GeometryContext,
    circuit: &Circuit,
    theta: &[f64],
    fd_delta: f64,
) -> Result<Vec<f64>> {
    let angles = gate_angles_from_slots(circuit, theta)?;
    let n_coords = ctx.molecule().coordinates().len();

    // fixed state, prepared once
    let n_alpha = circuit
        .hf_occupations
        .iter()
        .enumerate()
        .filter(|(q, &occ)| occ && q % 2 == 0)
        .count();
    let n_beta = circuit
        .hf_occupations
        .iter()
        .enumerate()
        .filter(|(q, &occ)| occ && q % 2 == 1)
        .count();
    let space = SectorSpace::new(circuit.n_qubits, n_alpha, n_beta);
    let sector_state = space
        .compile(circuit)
        .zip(space.basis_vector(&circuit.hf_occupations))
        .map(|(compiled, start)| compiled.run(&angles, &start));
    let dense_state: Option<Statevector> = if sector_state.is_none() {
        Some(run_circuit_gate_angles(circuit, &angles))
    } else {
        None
    };

    let components: Vec<Result<f64>> = (0..n_coords)
        .into_par_iter()
        .map(|i| {
            let d = ctx.derivative(i, fd_delta)?;
            if let Some(v) = &sector_state {
                if let Some(m) = space.project(&d) {
                    return Ok(quadratic_form(&m, v));
                }
            }
            let state = match &dense_state {
                Some(s) => s.clone(),
                None => space.embed(sector_state.as_ref().unwrap()),
            };
            state.expectation(&d)
        })
        .collect();
    components.into_iter().collect()
}

/// All Sz-conserving single and double excitations out of the
/// first-`n_electrons`-filled determinant, in lexicographic
/// (occupied, virtual) order.
pub fn generate_excitations(
    n_electrons: usize,
    n_spin_orbitals: usize,
) -> (Vec<Excitation>, Vec<Excitation>) {
    let mut singles = Vec::new();
    for i in 0..n_electrons {
        for a in n_electrons..n_spin_orbitals {
            if i % 2 == a % 2 {
                singles.push(Excitation {
                    kind: GateKind::Single,
                    occupied: vec![i],
                    virtuals: vec![a],
                });
            }
        }
    }
    let mut doubles = Vec::new();
    for i in 0..n_electrons {
        for j in (i + 1)..n_electrons {
            for a in n_electrons..n_spin_orbitals {
                for b in (a + 1)..n_spin_orbitals {
                    if (i % 2 + j % 2) == (a % 2 + b % 2) {
                        doubles.push(Excitation {
                            kind: GateKind::Double,
                            occupied: vec![i, j],
                            virtuals: vec![a, b],
                        });
                    }
                }
            }
        }
    }
    (singles, doubles)
}

/// Outcome of the adaptive circuit construction, with the screening
/// diagnostics the gate-count reports are written from.
#[derive(Debug, Clone)]
pub struct AdaptiveBuild {
    pub circuit: Circuit,
    pub n_doubles_enumerated: usize,
    pub n_singles_enumerated: usize,
    pub kept_doubles: Vec<Excitation>,
    pub kept_singles: Vec<Excitation>,
    /// Screening gradients (Ha) of every enumerated double at θ = 0.
    pub double_gradients: Vec<f64>,
    /// Screening gradients (Ha) of every enumerated single, evaluated after
    /// the kept doubles were optimized.
    pub single_gradients: Vec<f64>,
}

impl AdaptiveBuild {
    pub fn n_gates(&self) -> usize {
        self.circuit.gates.len()
    }
}

// step-4 inner optimization: fixed thresholds of the construction recipe
const DOUBLES_OPT_GRAD_TOL: f64 = 1e-5;
const DOUBLES_OPT_MAX_ITER: usize = 500;

/// Build the variational circuit adaptively at geometry `x0`:
/// enumerate doubles, keep those with screening gradient above threshold,
/// optimize them, then screen all singles behind the optimized doubles and
/// keep the survivors. Gate order follows the enumeration order.
pub fn adaptive_build(
    molecule: &Molecule,
    x0: &[f64],
    config: &OptimizerConfig,
) -> Result<AdaptiveBuild> {
    config.validate()?;
    let ctx = GeometryContext::new(molecule, x0)?;
    let h = ctx.hamiltonian()?;
    let n_qubits = h.n_qubits();
    let n_electrons = ctx.n_active_electrons();
    let (singles, doubles) = generate_excitations(n_electrons, n_qubits);

    // screen doubles at θ = 0
    let mut all_doubles = Circuit::hartree_fock(n_qubits, n_electrons);
    all_doubles.gates = doubles
        .iter()
        .enumerate()
        .map(|(k, e)| e.gate(k))
        .collect();
    let double_gradients = grad_theta(&all_doubles, &vec![0.0; doubles.len()], &h)?;
    let kept_doubles: Vec<Excitation> = doubles
        .iter()
        .zip(&double_gradients)
        .filter(|(_, g)| g.abs() > config.adaptive_grad_threshold)
        .map(|(e, _)| e.clone())
        .collect();

    // optimize the kept doubles at fixed geometry
    let mut opt_circuit = Circuit::hartree_fock(n_qubits, n_electrons);
    opt_circuit.gates = kept_doubles
        .iter()
        .enumerate()
        .map(|(k, e)| e.gate(k))
        .collect();
    let mut theta = vec![0.0; kept_doubles.len()];
    if !theta.is_empty() {
        let engine = CostEngine::new(&opt_circuit, &h)?;
        for _ in 0..DOUBLES_OPT_MAX_ITER {
            let g = gradient_wrt_slots(&engine, &opt_circuit, &theta)?;
            let max = g.iter().fold(0.0f64, |m, v| m.max(v.abs()));
            if max <= DOUBLES_OPT_GRAD_TOL {
                break;
            }
            for (t, gi) in theta.iter_mut().zip(&g) {
                *t -= config.step_theta * gi;
            }
        }
    }

    // screen singles appended after the optimized doubles
    let mut screen = opt_circuit.clone();
    let base_slots = kept_doubles.len();
    for (k, e) in singles.iter().enumerate() {
        screen.gates.push(e.gate(base_slots + k));
    }
    let mut screen_theta = theta.clone();
    screen_theta.extend(std::iter::repeat(0.0).take(singles.len()));
    let all_gradients = grad_theta(&screen, &screen_theta, &h)?;
    let single_gradients = all_gradients[base_slots..].to_vec();
    let kept_singles: Vec<Excitation> = singles
        .iter()
        .zip(&single_gradients)
        .filter(|(_, g)| g.abs() > config.adaptive_grad_threshold)
        .map(|(e, _)| e.clone())
        .collect();

    let mut circuit = Circuit::hartree_fock(n_qubits, n_electrons);
    for e in kept_doubles.iter().chain(&kept_singles) {
        let slot = circuit.gates.len();
        circuit.gates.push(e.gate(slot));
    }
    if circuit.gates.is_empty() {
        log::warn!("adaptive selection kept no gates; returning the bare Hartree-Fock circuit");
    }

    Ok(AdaptiveBuild {
        circuit,
        n_doubles_enumerated: doubles.len(),
        n_singles_enumerated: singles.len(),
        kept_doubles,
        kept_singles,
        double_gradients,
        single_gradients,
    })
}

/// Energy/gradient source driving the shared descent loop.
pub(crate) trait EnergyModel: Sync {
    fn n_theta(&self) -> usize;
    fn evaluate(&self, theta: &[f64], x: &[f64]) -> Result<Evaluation>;
}

pub(crate) struct Evaluation {
    pub energy: f64,
    pub grad_theta: Vec<f64>,
    pub grad_x: Vec<f64>,
}

struct CircuitModel<'a> {
    molecule: &'a Molecule,
    circuit: &'a Circuit,
    fd_delta: f64,
}

impl EnergyModel for CircuitModel<'_> {
    fn n_theta(&self) -> usize {
        self.circuit.n_parameters()
    }

    fn evaluate(&self, theta: &[f64], x: &[f64]) -> Result<Evaluation> {
        let ctx = GeometryContext::new(self.molecule, x)?;
        let h = ctx.hamiltonian()?;
        let engine = CostEngine::new(self.circuit, &h)?;
        let angles = gate_angles_from_slots(self.circuit, theta)?;
        let energy = engine.energy(&angles)?;
        let grad_theta = gradient_wrt_slots(&engine, self.circuit, theta)?;
        let grad_x = grad_x_with_context(&ctx, self.circuit, theta, self.fd_delta)?;
        Ok(Evaluation {
            energy,
            grad_theta,
            grad_x,
        })
    }
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0f64, |m, x| m.max(x.abs()))
}

/// Plain simultaneous gradient descent on (θ, x): both gradients are
/// evaluated at the current point, both vectors updated together, no
/// nested re-optimization per geometry.
pub(crate) fn gradient_descent(
    model: &dyn EnergyModel,
    molecule: &Molecule,
    x0: &[f64],
    config: &OptimizerConfig,
    circuit: Option<Circuit>,
) -> Result<Trajectory> {
    let mut theta = vec![0.0; model.n_theta()];
    let mut x = x0.to_vec();
    let mut points: Vec<TrajectoryPoint> = Vec::new();
    let mut stop = StopReason::MaxIterations;

    for iteration in 0..=config.max_iterations {
        let ev = match model.evaluate(&theta, &x) {
            Ok(ev) => ev,
            Err(err) => {
                if points.is_empty() {
                    return Err(err);
                }
                stop = StopReason::Aborted(err.to_string());
                break;
            }
        };
        let max_grad_x = max_abs(&ev.grad_x);
        let max_grad_theta = max_abs(&ev.grad_theta);
        points.push(TrajectoryPoint {
            iteration,
            energy: ev.energy,
            theta: theta.clone(),
            x: x.clone(),
            max_grad_x,
            max_grad_theta,
        });
        if max_grad_x <= config.grad_tolerance_x {
            stop = StopReason::Converged;
            break;
        }
        if iteration == config.max_iterations {
            break;
        }
        for (t, g) in theta.iter_mut().zip(&ev.grad_theta) {
            *t -= config.step_theta * g;
        }
        for (xi, g) in x.iter_mut().zip(&ev.grad_x) {
            *xi -= config.step_x * g;
        }
    }

    let final_geometry = points
        .last()
        .and_then(|p| molecule.with_coordinates(&p.x).ok())
        .and_then(|m| geometry_params(&m));

    Ok(Trajectory {
        points,
        stop,
        circuit,
        final_geometry,
    })
}

/// Jointly optimize circuit parameters (initialized to zero) and nuclear
/// coordinates until the largest nuclear-gradient component drops below
/// tolerance.
pub fn joint_optimize(
    molecule: &Molecule,
    x0: &[f64],
    circuit: &Circuit,
    config: &OptimizerConfig,
) -> Result<Trajectory> {
    config.validate()?;
    circuit.validate()?;
    let model = CircuitModel {
        molecule,
        circuit,
        fd_delta: config.fd_delta,
    };
    gradient_descent(&model, molecule, x0, config, Some(circuit.clone()))
}
