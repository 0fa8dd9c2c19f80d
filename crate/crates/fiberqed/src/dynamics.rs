//! Two-atom master-equation dynamics: density-matrix propagation,
//! directional photon fluxes, cumulative photon numbers, and concurrence.
//!
//! Basis ordering is {e, a, b, g} = {|++>, |+->, |-+>, |-->}. Time is
//! measured in units of 1/γ0 and all rates in γ0, matching the coupling
//! module.

use crate::coupling::{CouplingCoefficients, Mat2};
use crate::guided::Sign;
use crate::linalg::{
    hermitian_eigenvalues, hermiticity_defect, matmul4, sqrtm_psd, trace4, zero4, Mat4,
};
use crate::{Error, Result};
use num_complex::Complex64;

type C64 = Complex64;

const IDX_E: usize = 0;
const IDX_A: usize = 1;
const IDX_B: usize = 2;
const IDX_G: usize = 3;

/// Two-atom density matrix with its time tag (units 1/γ0).
#[derive(Clone, Debug)]
pub struct TwoAtomState {
    pub rho: Mat4,
    pub t: f64,
}

impl TwoAtomState {
    pub fn new(rho: Mat4, t: f64) -> Result<Self> {
        validate_density_matrix(&rho)?;
        Ok(TwoAtomState { rho, t })
    }

    /// Excited-state population of atom 1 (rho_ee + rho_aa).
    pub fn excited_population_1(&self) -> f64 {
        self.rho[IDX_E][IDX_E].re + self.rho[IDX_A][IDX_A].re
    }

    /// Excited-state population of atom 2 (rho_ee + rho_bb).
    pub fn excited_population_2(&self) -> f64 {
        self.rho[IDX_E][IDX_E].re + self.rho[IDX_B][IDX_B].re
    }
}

fn validate_density_matrix(rho: &Mat4) -> Result<()> {
    let herm = hermiticity_defect(rho);
    if herm > 1e-12 {
        return Err(Error::State(format!(
            "density matrix not Hermitian (defect {herm:.3e})"
        )));
    }
    let tr = trace4(rho);
    if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-12 {
        return Err(Error::State(format!("trace = {tr} (must be 1)")));
    }
    let min_eig = hermitian_eigenvalues(rho)[0];
    if min_eig < -1e-9 {
        return Err(Error::State(format!(
            "density matrix not positive semidefinite (min eig {min_eig:.3e})"
        )));
    }
    Ok(())
}

/// Initial-state selector for the standard one-excitation runs.
#[derive(Clone, Debug)]
pub enum InitialState {
    /// Atom 1 excited: |+->.
    Psi1,
    /// Atom 2 excited: |-+>.
    Psi2,
    /// (|+-> + e^{-i phi12} |-+>)/sqrt(2), phi12 = arg gamma12.
    Sym,
    /// (|+-> - e^{-i phi12} |-+>)/sqrt(2).
    Asym,
    /// Atom 1 excited, intended for single-atom reference runs.
    SingleExcited,
    Custom(Mat4),
}

/// Construct the initial density matrix. `phi12` (the phase of γ12) enters
/// the symmetric/antisymmetric superpositions only.
pub fn build_initial_state(kind: &InitialState, phi12: f64) -> Result<TwoAtomState> {
    let mut rho = zero4();
    match kind {
        InitialState::Psi1 | InitialState::SingleExcited => {
            rho[IDX_A][IDX_A] = C64::new(1.0, 0.0);
        }
        InitialState::Psi2 => {
            rho[IDX_B][IDX_B] = C64::new(1.0, 0.0);
        }
        InitialState::Sym | InitialState::Asym => {
            let sign = if matches!(kind, InitialState::Sym) {
                1.0
            } else {
                -1.0
            };
            rho[IDX_A][IDX_A] = C64::new(0.5, 0.0);
            rho[IDX_B][IDX_B] = C64::new(0.5, 0.0);
            let coh = 0.5 * sign * C64::from_polar(1.0, phi12);
            rho[IDX_A][IDX_B] = coh;
            rho[IDX_B][IDX_A] = coh.conj();
        }
        InitialState::Custom(m) => {
            rho = *m;
        }
    }
    TwoAtomState::new(rho, 0.0)
}

fn lowering_operators() -> [Mat4; 2] {
    let mut s1 = zero4();
    s1[IDX_B][IDX_E] = C64::new(1.0, 0.0);
    s1[IDX_G][IDX_A] = C64::new(1.0, 0.0);
    let mut s2 = zero4();
    s2[IDX_A][IDX_E] = C64::new(1.0, 0.0);
    s2[IDX_G][IDX_B] = C64::new(1.0, 0.0);
    [s1, s2]
}

/// The master-equation generator assembled once per coefficient set as a
/// constant 16x16 action on the vectorized density matrix.
#[derive(Clone)]
pub struct MasterOperator {
    l: [[C64; 16]; 16],
    gamma_max: f64,
}

fn add_sandwich(a: &Mat4, b: &Mat4, w: C64, l: &mut [[C64; 16]; 16]) {
    // term w * A rho B contributes L[(i,j),(k,m)] += w A[i][k] B[m][j]
    for i in 0..4 {
        for j in 0..4 {
            for k in 0..4 {
                for m in 0..4 {
                    let v = w * a[i][k] * b[m][j];
                    if v != C64::new(0.0, 0.0) {
                        l[4 * i + j][4 * k + m] += v;
                    }
                }
            }
        }
    }
}

impl MasterOperator {
    pub fn new(coeffs: &CouplingCoefficients) -> Self {
        let s = lowering_operators();
        let sdag = [
            crate::linalg::adjoint4(&s[0]),
            crate::linalg::adjoint4(&s[1]),
        ];
        let mut l = [[C64::new(0.0, 0.0); 16]; 16];
        let eye = {
            let mut m = zero4();
            for (i, row) in m.iter_mut().enumerate() {
                row[i] = C64::new(1.0, 0.0);
            }
            m
        };
        let gamma = &coeffs.gamma_total;
        for i in 0..2 {
            for j in 0..2 {
                let gij = gamma[i][j];
                if gij == C64::new(0.0, 0.0) {
                    continue;
                }
                let sisj = matmul4(&sdag[i], &s[j]);
                add_sandwich(&s[j], &sdag[i], gij, &mut l);
                add_sandwich(&sisj, &eye, -0.5 * gij, &mut l);
                add_sandwich(&eye, &sisj, -0.5 * gij, &mut l);
            }
        }
        // dipole-dipole term; diagonal shifts omitted
        let omegas = [
            (0usize, 1usize, coeffs.omega12),
            (1, 0, coeffs.omega12.conj()),
        ];
        for (i, j, om) in omegas {
            if om == C64::new(0.0, 0.0) {
                continue;
            }
            let sisj = matmul4(&sdag[i], &s[j]);
            add_sandwich(&sisj, &eye, -C64::i() * om, &mut l);
            add_sandwich(&eye, &sisj, C64::i() * om, &mut l);
        }
        let gamma_max = gamma[0][0]
            .re
            .max(gamma[1][1].re)
            .max(2.0 * coeffs.omega12.norm());
        MasterOperator { l, gamma_max }
    }

    /// Apply the generator: d rho / dt.
    pub fn apply(&self, rho: &Mat4) -> Mat4 {
        let mut v = [C64::new(0.0, 0.0); 16];
        for i in 0..4 {
            for j in 0..4 {
                v[4 * i + j] = rho[i][j];
            }
        }
        let mut out_v = [C64::new(0.0, 0.0); 16];
        for (row, lrow) in self.l.iter().enumerate() {
            let mut acc = C64::new(0.0, 0.0);
            for (col, lv) in lrow.iter().enumerate() {
                if *lv != C64::new(0.0, 0.0) {
                    acc += *lv * v[col];
                }
            }
            out_v[row] = acc;
        }
        let mut out = zero4();
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] = out_v[4 * i + j];
            }
        }
        out
    }

    /// Rate of change of the total excited population under the generator.
    pub fn excited_population_rate(&self, rho: &Mat4) -> f64 {
        let rhs = self.apply(rho);
        2.0 * rhs[IDX_E][IDX_E].re + rhs[IDX_A][IDX_A].re + rhs[IDX_B][IDX_B].re
    }
}

/// Right-hand side of the master equation for a single state.
pub fn master_rhs(rho: &Mat4, coeffs: &CouplingCoefficients) -> Mat4 {
    MasterOperator::new(coeffs).apply(rho)
}

/// The fastest rate in the generator: max(γ11, γ22, 2|Ω12|). The step
/// bound for [`evolve`] is dt <= 0.01 / stability_rate.
pub fn stability_rate(coeffs: &CouplingCoefficients) -> f64 {
    coeffs.gamma_total[0][0]
        .re
        .max(coeffs.gamma_total[1][1].re)
        .max(2.0 * coeffs.omega12.norm())
}

/// Guided-mode photon flux into direction f, in γ0 units.
pub fn guided_flux(rho: &Mat4, coeffs: &CouplingCoefficients, f: Sign) -> f64 {
    flux_from_matrix(rho, coeffs.gamma_g_dir.by(f))
}

/// Photon flux into radiation modes, in γ0 units.
pub fn radiation_flux(rho: &Mat4, coeffs: &CouplingCoefficients) -> f64 {
    flux_from_matrix(rho, &coeffs.gamma_r)
}

/// Total photon flux (guided + radiation), in γ0 units.
pub fn total_flux(rho: &Mat4, coeffs: &CouplingCoefficients) -> f64 {
    flux_from_matrix(rho, &coeffs.gamma_total)
}

fn flux_from_matrix(rho: &Mat4, g: &Mat2) -> f64 {
    let pop1 = rho[IDX_E][IDX_E].re + rho[IDX_A][IDX_A].re;
    let pop2 = rho[IDX_E][IDX_E].re + rho[IDX_B][IDX_B].re;
    let rho_ba = rho[IDX_B][IDX_A];
    g[0][0].re * pop1 + g[1][1].re * pop2 + 2.0 * (g[0][1] * rho_ba).re
}

/// Time series of a master-equation run. Fluxes are in γ0 units, photon
/// numbers are cumulative trapezoid integrals of the fluxes.
#[derive(Clone, Debug)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub rho_exc_1: Vec<f64>,
    pub rho_exc_2: Vec<f64>,
    pub p_plus: Vec<f64>,
    pub p_minus: Vec<f64>,
    pub p_gyd: Vec<f64>,
    pub p_rad: Vec<f64>,
    pub p_tot: Vec<f64>,
    pub n_plus: Vec<f64>,
    pub n_minus: Vec<f64>,
    pub n_gyd: Vec<f64>,
    pub n_rad: Vec<f64>,
    pub n_tot: Vec<f64>,
    pub concurrence: Vec<f64>,
    pub final_state: TwoAtomState,
    /// Recorded density matrices (only with `record_states`).
    pub states: Option<Vec<Mat4>>,
    /// True if any concurrence evaluation fell back to the general
    /// spin-flip formula because the state was not X-structured.
    pub concurrence_fallback_used: bool,
}

#[derive(Clone, Copy, Debug)]
pub struct EvolveOptions {
    /// Record every n-th step (the final step is always recorded).
    pub record_stride: usize,
    pub record_states: bool,
    /// Run the (more expensive) positivity check every n-th step.
    pub psd_check_stride: usize,
}

impl Default for EvolveOptions {
    fn default() -> Self {
        EvolveOptions {
            record_stride: 1,
            record_states: false,
            psd_check_stride: 20,
        }
    }
}

/// Integrate the master equation with a fixed-step classical 4th-order
/// scheme from `state0` to `t_end` in steps of `dt` (both in 1/γ0). No
/// per-step trace renormalization: trace drift is a diagnostic and aborts
/// the run beyond tolerance.
pub fn evolve(
    state0: &TwoAtomState,
    coeffs: &CouplingCoefficients,
    t_end: f64,
    dt: f64,
) -> Result<Trajectory> {
    evolve_with_options(state0, coeffs, t_end, dt, &EvolveOptions::default())
}

pub fn evolve_with_options(
    state0: &TwoAtomState,
    coeffs: &CouplingCoefficients,
    t_end: f64,
    dt: f64,
    opts: &EvolveOptions,
) -> Result<Trajectory> {
    validate_density_matrix(&state0.rho)?;
    if !(dt > 0.0 && t_end > 0.0) {
        return Err(Error::Config(format!(
            "need dt > 0 and t_end > 0, got {dt}, {t_end}"
        )));
    }
    let op = MasterOperator::new(coeffs);
    if op.gamma_max > 0.0 && dt > 0.01 / op.gamma_max {
        return Err(Error::Config(format!(
            "dt = {dt} too large for the fastest rate (need dt <= {:.3e})",
            0.01 / op.gamma_max
        )));
    }
    let n_steps = (t_end / dt).round() as usize;
    let stride = opts.record_stride.max(1);

    let mut rho = state0.rho;
    let mut t = state0.t;
    let mut traj = Trajectory {
        times: Vec::new(),
        rho_exc_1: Vec::new(),
        rho_exc_2: Vec::new(),
        p_plus: Vec::new(),
        p_minus: Vec::new(),
        p_gyd: Vec::new(),
        p_rad: Vec::new(),
        p_tot: Vec::new(),
        n_plus: Vec::new(),
        n_minus: Vec::new(),
        n_gyd: Vec::new(),
        n_rad: Vec::new(),
        n_tot: Vec::new(),
        concurrence: Vec::new(),
        final_state: TwoAtomState { rho, t },
        states: if opts.record_states {
            Some(Vec::new())
        } else {
            None
        },
        concurrence_fallback_used: false,
    };

    let record = |rho: &Mat4, t: f64, traj: &mut Trajectory| {
        traj.times.push(t);
        traj.rho_exc_1
            .push(rho[IDX_E][IDX_E].re + rho[IDX_A][IDX_A].re);
        traj.rho_exc_2
            .push(rho[IDX_E][IDX_E].re + rho[IDX_B][IDX_B].re);
        let pp = flux_from_matrix(rho, &coeffs.gamma_g_dir.plus);
        let pm = flux_from_matrix(rho, &coeffs.gamma_g_dir.minus);
        let pr = flux_from_matrix(rho, &coeffs.gamma_r);
        traj.p_plus.push(pp);
        traj.p_minus.push(pm);
        traj.p_gyd.push(pp + pm);
        traj.p_rad.push(pr);
        traj.p_tot.push(pp + pm + pr);
        let (c, fb) = concurrence_checked(rho);
        traj.concurrence.push(c);
        traj.concurrence_fallback_used |= fb;
        if let Some(states) = traj.states.as_mut() {
            states.push(*rho);
        }
    };

    record(&rho, t, &mut traj);
    for step in 1..=n_steps {
        let k1 = op.apply(&rho);
        let r2 = add_scaled(&rho, &k1, 0.5 * dt);
        let k2 = op.apply(&r2);
        let r3 = add_scaled(&rho, &k2, 0.5 * dt);
        let k3 = op.apply(&r3);
        let r4 = add_scaled(&rho, &k3, dt);
        let k4 = op.apply(&r4);
        for i in 0..4 {
            for j in 0..4 {
                rho[i][j] += dt / 6.0 * (k1[i][j] + 2.0 * k2[i][j] + 2.0 * k3[i][j] + k4[i][j]);
            }
        }
        t = state0.t + step as f64 * dt;

        let tr = trace4(&rho);
        if (tr.re - 1.0).abs() > 1e-9 || tr.im.abs() > 1e-10 {
            return Err(Error::Integration {
                step,
                t,
                what: format!("trace drift {:.3e}", (tr.re - 1.0).abs()),
            });
        }
        let herm = hermiticity_defect(&rho);
        if herm > 1e-11 {
            return Err(Error::Integration {
                step,
                t,
                what: format!("hermiticity defect {herm:.3e}"),
            });
        }
        if step % opts.psd_check_stride == 0 || step == n_steps {
            let min_eig = hermitian_eigenvalues(&rho)[0];
            if min_eig < -1e-9 {
                return Err(Error::Integration {
                    step,
                    t,
                    what: format!("negative eigenvalue {min_eig:.3e}"),
                });
            }
        }
        if step % stride == 0 || step == n_steps {
            record(&rho, t, &mut traj);
        }
    }
    traj.final_state = TwoAtomState { rho, t };
    photon_numbers(&mut traj);
    Ok(traj)
}

fn add_scaled(base: &Mat4, delta: &Mat4, s: f64) -> Mat4 {
    let mut out = *base;
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] += s * delta[i][j];
        }
    }
    out
}

/// Fill the cumulative photon-number series by trapezoid integration of
/// the flux series (N_gyd = N+ + N-).
pub fn photon_numbers(traj: &mut Trajectory) {
    let integrate = |times: &[f64], p: &[f64]| -> Vec<f64> {
        let mut acc = 0.0;
        let mut out = Vec::with_capacity(p.len());
        out.push(0.0);
        for i in 1..p.len() {
            acc += 0.5 * (p[i] + p[i - 1]) * (times[i] - times[i - 1]);
            out.push(acc);
        }
        out
    };
    traj.n_plus = integrate(&traj.times, &traj.p_plus);
    traj.n_minus = integrate(&traj.times, &traj.p_minus);
    traj.n_rad = integrate(&traj.times, &traj.p_rad);
    traj.n_gyd = traj
        .n_plus
        .iter()
        .zip(&traj.n_minus)
        .map(|(a, b)| a + b)
        .collect();
    traj.n_tot = traj
        .n_gyd
        .iter()
        .zip(&traj.n_rad)
        .map(|(a, b)| a + b)
        .collect();
}

/// Smallest eigenvalue of a (Hermitian) density matrix; positivity
/// diagnostic.
pub fn density_min_eigenvalue(rho: &Mat4) -> f64 {
    hermitian_eigenvalues(rho)[0]
}

/// True when the single-excitation coherence structure holds (rho_ea,
/// rho_eb, rho_ga, rho_gb all below tolerance).
pub fn is_x_structured(rho: &Mat4, tol: f64) -> bool {
    rho[IDX_E][IDX_A].norm() <= tol
        && rho[IDX_E][IDX_B].norm() <= tol
        && rho[IDX_G][IDX_A].norm() <= tol
        && rho[IDX_G][IDX_B].norm() <= tol
}

/// Concurrence closed form for X-structured states.
pub fn concurrence_x_structured(rho: &Mat4) -> f64 {
    let c1 = 2.0
        * (rho[IDX_E][IDX_G].norm()
            - (rho[IDX_A][IDX_A].re * rho[IDX_B][IDX_B].re)
                .max(0.0)
                .sqrt());
    let c2 = 2.0
        * (rho[IDX_A][IDX_B].norm()
            - (rho[IDX_E][IDX_E].re * rho[IDX_G][IDX_G].re)
                .max(0.0)
                .sqrt());
    c1.max(c2).max(0.0)
}

/// General two-qubit concurrence from the spin-flipped density matrix.
pub fn concurrence_spin_flip(rho: &Mat4) -> f64 {
    // Y = sigma_y (x) sigma_y in the {e, a, b, g} basis.
    let mut y = zero4();
    y[IDX_E][IDX_G] = C64::new(-1.0, 0.0);
    y[IDX_G][IDX_E] = C64::new(-1.0, 0.0);
    y[IDX_A][IDX_B] = C64::new(1.0, 0.0);
    y[IDX_B][IDX_A] = C64::new(1.0, 0.0);
    let mut rho_conj = zero4();
    for i in 0..4 {
        for j in 0..4 {
            rho_conj[i][j] = rho[i][j].conj();
        }
    }
    let rho_tilde = matmul4(&matmul4(&y, &rho_conj), &y);
    let s = sqrtm_psd(rho);
    let inner = matmul4(&matmul4(&s, &rho_tilde), &s);
    let mu = hermitian_eigenvalues(&inner); // ascending
    let lam: Vec<f64> = mu.iter().rev().map(|v| v.max(0.0).sqrt()).collect();
    (lam[0] - lam[1] - lam[2] - lam[3]).max(0.0)
}

/// Concurrence with the structure dispatch: the closed form for X states,
/// the general spin-flip formula otherwise. The boolean reports the
/// fallback.
pub fn concurrence_checked(rho: &Mat4) -> (f64, bool) {
    if is_x_structured(rho, 1e-8) {
        (concurrence_x_structured(rho), false)
    } else {
        (concurrence_spin_flip(rho), true)
    }
}

/// Concurrence of the two-atom state, in [0, 1].
pub fn concurrence(rho: &Mat4) -> f64 {
    concurrence_checked(rho).0
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::coupling::Directional;

    fn c(re: f64, im: f64) -> C64 {
        C64::new(re, im)
    }

    fn mat2(g11: C64, g12: C64, g22: C64) -> Mat2 {
        [[g11, g12], [g12.conj(), g22]]
    }

    fn synthetic_coeffs(gamma: Mat2, omega12: C64) -> CouplingCoefficients {
        let zero = mat2(c(0.0, 0.0), c(0.0, 0.0), c(0.0, 0.0));
        let mut half = gamma;
        for row in half.iter_mut() {
            for v in row.iter_mut() {
                *v *= 0.5;
            }
        }
        CouplingCoefficients {
            gamma_g: zero,
            gamma_g_dir: Directional {
                plus: zero,
                minus: zero,
            },
            gamma_r: gamma,
            gamma_r_dir: Directional {
                plus: half,
                minus: half,
            },
            gamma_total: gamma,
            omega_g12: c(0.0, 0.0),
            omega_r12: omega12,
            omega12,
            gamma_vac: gamma,
            omega_vac12: omega12,
            phi_gamma: 0.0,
            phi_omega: 0.0,
            transfer_fwd: 0.0,
            transfer_bwd: 0.0,
        }
    }

    #[test]
    fn initial_states() {
        let s = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        assert_eq!(s.rho[IDX_A][IDX_A], c(1.0, 0.0));
        assert_eq!(trace4(&s.rho), c(1.0, 0.0));

        let sym = build_initial_state(&InitialState::Sym, 0.0).unwrap();
        assert_eq!(sym.rho[IDX_A][IDX_A], c(0.5, 0.0));
        assert_eq!(sym.rho[IDX_B][IDX_B], c(0.5, 0.0));
        assert_eq!(sym.rho[IDX_A][IDX_B], c(0.5, 0.0));
        assert_eq!(sym.rho[IDX_B][IDX_A], c(0.5, 0.0));
        // purity of the pure state
        let sq = matmul4(&sym.rho, &sym.rho);
        assert!((trace4(&sq).re - 1.0).abs() < 1e-14);

        // custom state validation
        let mut bad = zero4();
        bad[0][0] = c(2.0, 0.0);
        assert!(build_initial_state(&InitialState::Custom(bad), 0.0).is_err());
    }

    #[test]
    fn master_rhs_preserves_trace() {
        let coeffs = synthetic_coeffs(mat2(c(1.0, 0.0), c(0.3, 0.2), c(0.8, 0.0)), c(0.15, -0.4));
        let sym = build_initial_state(&InitialState::Sym, 0.7).unwrap();
        let rhs = master_rhs(&sym.rho, &coeffs);
        assert!(trace4(&rhs).norm() < 1e-14);
    }

    #[test]
    fn independent_decay_rate() {
        let coeffs = synthetic_coeffs(mat2(c(1.3, 0.0), c(0.0, 0.0), c(0.9, 0.0)), c(0.0, 0.0));
        let s = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        let rhs = master_rhs(&s.rho, &coeffs);
        assert!((rhs[IDX_A][IDX_A].re + 1.3).abs() < 1e-14);
    }

    #[test]
    fn dicke_superradiant_rate() {
        // gamma11 = gamma22 = gamma12 = gamma, omega = 0: the symmetric
        // state decays with rate 2 gamma.
        let g = 0.7;
        let coeffs = synthetic_coeffs(mat2(c(g, 0.0), c(g, 0.0), c(g, 0.0)), c(0.0, 0.0));
        let s = build_initial_state(&InitialState::Sym, 0.0).unwrap();
        let traj = evolve(&s, &coeffs, 2.0, 1e-3).unwrap();
        for (t, pop) in traj.times.iter().zip(
            traj.rho_exc_1
                .iter()
                .zip(&traj.rho_exc_2)
                .map(|(a, b)| a + b),
        ) {
            let expect = (-2.0 * g * t).exp();
            assert!((pop - expect).abs() < 1e-7, "t = {t}: {pop} vs {expect}");
        }
    }

    #[test]
    fn single_atom_exponential() {
        let coeffs = synthetic_coeffs(mat2(c(1.0, 0.0), c(0.0, 0.0), c(0.0, 0.0)), c(0.0, 0.0));
        let s = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        let traj = evolve(&s, &coeffs, 5.0, 1e-3).unwrap();
        let mut max_err: f64 = 0.0;
        for (t, p1) in traj.times.iter().zip(&traj.rho_exc_1) {
            max_err = max_err.max((p1 - (-t).exp()).abs());
        }
        assert!(max_err < 1e-8, "max error {max_err:.3e}");
    }

    #[test]
    fn step_halving_self_convergence() {
        let coeffs = synthetic_coeffs(mat2(c(1.0, 0.0), c(0.6, 0.3), c(1.1, 0.0)), c(0.2, -0.5));
        let s = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        let coarse = evolve(&s, &coeffs, 2.0, 1e-3).unwrap();
        let fine = evolve_with_options(
            &s,
            &coeffs,
            2.0,
            0.5e-3,
            &EvolveOptions {
                record_stride: 2,
                ..Default::default()
            },
        )
        .unwrap();
        assert_eq!(coarse.times.len(), fine.times.len());
        for i in 0..coarse.times.len() {
            assert!((coarse.rho_exc_1[i] - fine.rho_exc_1[i]).abs() < 1e-6);
            assert!((coarse.p_tot[i] - fine.p_tot[i]).abs() < 1e-6);
        }
    }

    #[test]
    fn excitation_transfer_peak() {
        let coeffs = synthetic_coeffs(mat2(c(1.0, 0.0), c(0.4, 0.1), c(1.0, 0.0)), c(0.9, 0.2));
        let s = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        let traj = evolve(&s, &coeffs, 6.0, 1e-3).unwrap();
        assert_eq!(traj.rho_exc_2[0], 0.0);
        let peak = traj.rho_exc_2.iter().cloned().fold(0.0, f64::max);
        assert!(peak > 1e-3, "no transfer: peak = {peak:.3e}");
        assert!(*traj.rho_exc_2.last().unwrap() < 0.5 * peak);
    }

    #[test]
    fn flux_identities() {
        let coeffs = synthetic_coeffs(mat2(c(1.0, 0.0), c(0.5, -0.2), c(0.8, 0.0)), c(0.3, 0.1));
        // ground state emits nothing
        let mut ground = zero4();
        ground[IDX_G][IDX_G] = c(1.0, 0.0);
        assert_eq!(total_flux(&ground, &coeffs), 0.0);

        // product state with no coherence: no interference term
        let mut prod = zero4();
        prod[IDX_A][IDX_A] = c(0.5, 0.0);
        prod[IDX_G][IDX_G] = c(0.5, 0.0);
        let p = total_flux(&prod, &coeffs);
        assert!((p - 0.5 * 1.0).abs() < 1e-14);

        // P_tot = P_gyd + P_rad identically and equals -d rho_exc/dt
        let sym = build_initial_state(&InitialState::Sym, 0.35).unwrap();
        let op = MasterOperator::new(&coeffs);
        let p_parts = guided_flux(&sym.rho, &coeffs, Sign::Plus)
            + guided_flux(&sym.rho, &coeffs, Sign::Minus)
            + radiation_flux(&sym.rho, &coeffs);
        let p_tot = total_flux(&sym.rho, &coeffs);
        assert!((p_parts - p_tot).abs() < 1e-14);
        assert!((p_tot + op.excited_population_rate(&sym.rho)).abs() < 1e-12);

        // single excited atom at t = 0: P_tot = gamma11
        let s1 = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        assert!((total_flux(&s1.rho, &coeffs) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn photon_number_closure() {
        let coeffs = synthetic_coeffs(
            mat2(c(1.0, 0.0), c(0.45, 0.15), c(0.95, 0.0)),
            c(0.25, -0.1),
        );
        for kind in [InitialState::Psi1, InitialState::Psi2, InitialState::Sym] {
            let s = build_initial_state(&kind, 0.32).unwrap();
            let traj = evolve_with_options(
                &s,
                &coeffs,
                60.0,
                1e-3,
                &EvolveOptions {
                    record_stride: 10,
                    ..Default::default()
                },
            )
            .unwrap();
            let n_end = *traj.n_tot.last().unwrap();
            assert!((n_end - 1.0).abs() < 1e-3, "N_tot(inf) = {n_end}");
            // monotone when the flux stays nonnegative
            for i in 1..traj.n_tot.len() {
                if traj.p_tot[i] >= 0.0 && traj.p_tot[i - 1] >= 0.0 {
                    assert!(traj.n_tot[i] >= traj.n_tot[i - 1] - 1e-12);
                }
            }
        }
    }

    #[test]
    fn x_structure_preserved() {
        let coeffs = synthetic_coeffs(mat2(c(1.0, 0.0), c(0.5, 0.3), c(0.9, 0.0)), c(0.4, -0.2));
        let s = build_initial_state(&InitialState::Sym, 1.1).unwrap();
        let traj = evolve_with_options(
            &s,
            &coeffs,
            5.0,
            1e-3,
            &EvolveOptions {
                record_stride: 50,
                record_states: true,
                ..Default::default()
            },
        )
        .unwrap();
        for rho in traj.states.as_ref().unwrap() {
            assert!(is_x_structured(rho, 1e-10));
        }
        assert!(!traj.concurrence_fallback_used);
    }

    #[test]
    fn concurrence_values() {
        // Bell state (|+-> + |-+>)/sqrt(2)
        let bell = build_initial_state(&InitialState::Sym, 0.0).unwrap();
        assert!((concurrence(&bell.rho) - 1.0).abs() < 1e-14);
        assert!((concurrence_spin_flip(&bell.rho) - 1.0).abs() < 1e-10);

        // product states have zero concurrence
        let mut prod = zero4();
        prod[IDX_A][IDX_A] = c(1.0, 0.0);
        assert_eq!(concurrence(&prod), 0.0);
        assert!(concurrence_spin_flip(&prod) < 1e-10);

        // non-X state takes the fallback
        let mut nx = zero4();
        nx[IDX_E][IDX_E] = c(0.5, 0.0);
        nx[IDX_A][IDX_A] = c(0.5, 0.0);
        nx[IDX_E][IDX_A] = c(0.5, 0.0);
        nx[IDX_A][IDX_E] = c(0.5, 0.0);
        let (_, fallback) = concurrence_checked(&nx);
        assert!(fallback);
    }

    #[test]
    fn tanas_ficek_matches_spin_flip_along_trajectory() {
        let coeffs = synthetic_coeffs(
            mat2(c(1.0, 0.0), c(0.55, 0.25), c(0.85, 0.0)),
            c(0.35, -0.3),
        );
        let s = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        let traj = evolve_with_options(
            &s,
            &coeffs,
            4.0,
            1e-3,
            &EvolveOptions {
                record_stride: 100,
                record_states: true,
                ..Default::default()
            },
        )
        .unwrap();
        for rho in traj.states.as_ref().unwrap() {
            let tf = concurrence_x_structured(rho);
            let wo = concurrence_spin_flip(rho);
            assert!((tf - wo).abs() < 1e-8, "{tf} vs {wo}");
        }
    }

    #[test]
    fn oversized_step_rejected() {
        let coeffs = synthetic_coeffs(mat2(c(5.0, 0.0), c(0.0, 0.0), c(5.0, 0.0)), c(0.0, 0.0));
        let s = build_initial_state(&InitialState::Psi1, 0.0).unwrap();
        assert!(matches!(
            evolve(&s, &coeffs, 1.0, 0.05),
            Err(Error::Config(_))
        ));
    }
}
