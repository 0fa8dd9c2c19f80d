//! Decay and dipole-dipole coupling coefficients of the two-atom master
//! equation: guided and radiation contributions, directional components,
//! free-space references, and chirality diagnostics.
//!
//! Every rate is reported in units of the free-space single-atom decay rate
//! γ0, which removes the dipole magnitude and all field-unit constants.

use crate::constants::{rate_prefactor, C};
use crate::guided::{
    eval_guided_profile, solve_eigenvalue, solve_he11_mode_branch, solve_he11_mode_branch_hinted,
    FiberSpec, GuidedModeIndex, GuidedModeSolution, Sign,
};
use crate::quad::gauss_legendre;
use crate::radiation::{mode_from_match_data, MatchData};
use crate::specialfn::{bessel_j_array, bessel_y_array, prime_from_cyl_array};
use crate::{Error, Result};
use num_complex::Complex64;

type C64 = Complex64;

/// A two-level atom: cylindrical position and a unit complex dipole vector
/// in Cartesian components (the dipole magnitude is folded into γ0).
#[derive(Clone, Copy, Debug)]
pub struct AtomSpec {
    /// Radial position, meters (must be outside the fiber, r >= a).
    pub r: f64,
    /// Azimuthal angle, radians.
    pub phi: f64,
    /// Axial position, meters.
    pub z: f64,
    /// Unit dipole matrix element direction, Cartesian (x, y, z).
    pub dipole: [C64; 3],
}

impl AtomSpec {
    pub fn new(r: f64, phi: f64, z: f64, dipole: [C64; 3]) -> Result<Self> {
        if !(r >= 0.0 && r.is_finite() && phi.is_finite() && z.is_finite()) {
            return Err(Error::Config(format!(
                "invalid atom position (r={r}, phi={phi}, z={z})"
            )));
        }
        let norm = dipole.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if (norm - 1.0).abs() > 1e-12 {
            return Err(Error::Config(format!(
                "dipole must be unit norm (|d| = {norm:.15})"
            )));
        }
        Ok(AtomSpec { r, phi, z, dipole })
    }

    /// Normalizes the dipole to unit magnitude before constructing.
    pub fn with_normalized_dipole(r: f64, phi: f64, z: f64, dipole: [C64; 3]) -> Result<Self> {
        let norm = dipole.iter().map(|c| c.norm_sqr()).sum::<f64>().sqrt();
        if !(norm > 0.0 && norm.is_finite()) {
            return Err(Error::Config("dipole vector must be nonzero".into()));
        }
        AtomSpec::new(
            r,
            phi,
            z,
            [dipole[0] / norm, dipole[1] / norm, dipole[2] / norm],
        )
    }

    /// σ+ dipole about the y axis: d = (i, 0, -1)/sqrt(2).
    pub fn sigma_plus_y(r: f64, phi: f64, z: f64) -> Result<Self> {
        let s = std::f64::consts::FRAC_1_SQRT_2;
        AtomSpec::new(
            r,
            phi,
            z,
            [C64::new(0.0, s), C64::new(0.0, 0.0), C64::new(-s, 0.0)],
        )
    }

    /// Dipole components in the local cylindrical basis at the atom azimuth.
    pub fn dipole_cyl(&self) -> [C64; 3] {
        let (sin_p, cos_p) = self.phi.sin_cos();
        [
            self.dipole[0] * cos_p + self.dipole[1] * sin_p,
            -self.dipole[0] * sin_p + self.dipole[1] * cos_p,
            self.dipole[2],
        ]
    }

    pub fn position_cartesian(&self) -> [f64; 3] {
        let (sin_p, cos_p) = self.phi.sin_cos();
        [self.r * cos_p, self.r * sin_p, self.z]
    }
}

fn check_atoms_outside(fiber: &FiberSpec, atoms: &[AtomSpec]) -> Result<()> {
    for (i, atom) in atoms.iter().enumerate() {
        if atom.r < fiber.radius {
            return Err(Error::Config(format!(
                "atom {} at r = {:.3e} lies inside the fiber (a = {:.3e})",
                i + 1,
                atom.r,
                fiber.radius
            )));
        }
    }
    Ok(())
}

/// Pair of values indexed by propagation direction f.
#[derive(Clone, Copy, Debug, Default)]
pub struct Directional<T> {
    pub plus: T,
    pub minus: T,
}

impl<T> Directional<T> {
    pub fn by(&self, f: Sign) -> &T {
        match f {
            Sign::Plus => &self.plus,
            Sign::Minus => &self.minus,
        }
    }
}

impl Directional<C64> {
    pub fn total(&self) -> C64 {
        self.plus + self.minus
    }
}

pub type Mat2 = [[C64; 2]; 2];

fn mat2_zero() -> Mat2 {
    [[C64::new(0.0, 0.0); 2]; 2]
}

fn mat2_add(a: &Mat2, b: &Mat2) -> Mat2 {
    let mut out = mat2_zero();
    for i in 0..2 {
        for j in 0..2 {
            out[i][j] = a[i][j] + b[i][j];
        }
    }
    out
}

/// Numerical controls for the coupling computation.
#[derive(Clone, Copy, Debug)]
pub struct Numerics {
    /// Initial Gauss-Legendre node count per β half-axis.
    pub beta_nodes: usize,
    /// Relative tolerance of the node-doubling loop.
    pub beta_rel_tol: f64,
    /// Relative exclusion of the β endpoints ±k0.
    pub beta_endpoint_eps: f64,
    pub max_beta_doublings: usize,
    /// Minimum azimuthal order before the shell-convergence test applies.
    pub m_start: i32,
    /// Hard cap on the azimuthal order.
    pub m_cap: i32,
}

impl Default for Numerics {
    fn default() -> Self {
        Numerics {
            beta_nodes: 200,
            beta_rel_tol: 1e-4,
            beta_endpoint_eps: 1e-6,
            max_beta_doublings: 6,
            m_start: 5,
            m_cap: 60,
        }
    }
}

/// Guided-mode coupling factor G for mode index (f, l) and one atom, in
/// units chosen so that γ^(g)f_ij = Σ_l G_i conj(G_j) is already in γ0
/// units (the 2π and the field prefactor are absorbed).
pub fn coupling_g_guided(
    mode: &GuidedModeSolution,
    idx: GuidedModeIndex,
    atom: &AtomSpec,
) -> Result<C64> {
    let e = eval_guided_profile(mode, idx, atom.r, atom.phi)?;
    let d = atom.dipole_cyl();
    let proj = d[0] * e[0] + d[1] * e[1] + d[2] * e[2];
    let phase = C64::from_polar(
        1.0,
        idx.f.value() * mode.beta * atom.z + idx.l.value() * atom.phi,
    );
    let kappa = rate_prefactor(mode.omega) * mode.beta_prime;
    Ok(kappa.sqrt() * proj * phase)
}

/// Counter-rotating variant of [`coupling_g_guided`]: the dipole is
/// conjugated before projection.
pub fn coupling_g_guided_tilde(
    mode: &GuidedModeSolution,
    idx: GuidedModeIndex,
    atom: &AtomSpec,
) -> Result<C64> {
    let e = eval_guided_profile(mode, idx, atom.r, atom.phi)?;
    let d = atom.dipole_cyl();
    let proj = d[0].conj() * e[0] + d[1].conj() * e[1] + d[2].conj() * e[2];
    let phase = C64::from_polar(
        1.0,
        idx.f.value() * mode.beta * atom.z + idx.l.value() * atom.phi,
    );
    let kappa = rate_prefactor(mode.omega) * mode.beta_prime;
    Ok(kappa.sqrt() * proj * phase)
}

/// Guided-mode cross-atom decay coefficient γ^(g)_ij per direction, in γ0
/// units; the total is the sum over directions.
pub fn gamma_guided(
    mode: &GuidedModeSolution,
    atom_i: &AtomSpec,
    atom_j: &AtomSpec,
) -> Result<Directional<C64>> {
    check_atoms_outside(&mode.fiber, &[*atom_i, *atom_j])?;
    let mut out = Directional {
        plus: C64::new(0.0, 0.0),
        minus: C64::new(0.0, 0.0),
    };
    for f in Sign::BOTH {
        let mut acc = C64::new(0.0, 0.0);
        for l in Sign::BOTH {
            let idx = GuidedModeIndex::new(f, l);
            let gi = coupling_g_guided(mode, idx, atom_i)?;
            let gj = coupling_g_guided(mode, idx, atom_j)?;
            acc += gi * gj.conj();
        }
        match f {
            Sign::Plus => out.plus = acc,
            Sign::Minus => out.minus = acc,
        }
    }
    Ok(out)
}

/// Radiation γ matrices, split by direction of the axial wavenumber.
#[derive(Clone, Debug)]
pub struct RadGammaMatrix {
    pub dir: Directional<Mat2>,
}

impl RadGammaMatrix {
    pub fn total(&self) -> Mat2 {
        mat2_add(&self.dir.plus, &self.dir.minus)
    }
}

fn ln_factorial(m: usize) -> f64 {
    if m < 2 {
        return 0.0;
    }
    let x = m as f64 + 1.0;
    (x - 0.5) * x.ln() - x + 0.5 * (2.0 * std::f64::consts::PI).ln() + 1.0 / (12.0 * x)
}

/// log10 |J_m(x)| estimate in the evanescent regime m > x (0 otherwise).
fn jm_log10_estimate(m: i32, x: f64) -> f64 {
    let mf = m.unsigned_abs() as f64;
    if x >= mf || x <= 0.0 {
        return 0.0;
    }
    (mf * (0.5 * x).ln() - ln_factorial(m.unsigned_abs() as usize)) / std::f64::consts::LN_10
}

/// Radiation-mode decay coefficient matrix γ^(r)±_ij by Gauss-Legendre
/// quadrature over β with adaptive azimuthal truncation, in γ0 units.
/// Accepts one or two atoms; unused entries stay zero.
pub fn gamma_radiation_matrix(
    fiber: &FiberSpec,
    omega0: f64,
    atoms: &[AtomSpec],
    num: &Numerics,
) -> Result<RadGammaMatrix> {
    check_atoms_outside(fiber, atoms)?;
    let mut nodes = num.beta_nodes.max(8);
    let mut prev = rad_integral_pass(fiber, omega0, atoms, num, nodes)?;
    for _ in 0..num.max_beta_doublings {
        nodes *= 2;
        let cur = rad_integral_pass(fiber, omega0, atoms, num, nodes)?;
        if rad_converged(&prev, &cur, atoms.len(), num.beta_rel_tol) {
            return Ok(cur);
        }
        prev = cur;
    }
    Err(Error::Quadrature(format!(
        "radiation β quadrature not converged after {} doublings from {} nodes",
        num.max_beta_doublings, num.beta_nodes
    )))
}

fn rad_converged(a: &RadGammaMatrix, b: &RadGammaMatrix, n_atoms: usize, tol: f64) -> bool {
    let mut diag_scale: f64 = 0.0;
    for i in 0..n_atoms {
        diag_scale = diag_scale
            .max(b.dir.plus[i][i].norm())
            .max(b.dir.minus[i][i].norm());
    }
    let floor = 1e-6 * diag_scale.max(1e-300);
    for (ma, mb) in [(&a.dir.plus, &b.dir.plus), (&a.dir.minus, &b.dir.minus)] {
        for i in 0..n_atoms {
            for j in 0..n_atoms {
                let scale = mb[i][j].norm().max(floor);
                if (ma[i][j] - mb[i][j]).norm() > tol * scale {
                    return false;
                }
            }
        }
    }
    true
}

fn rad_integral_pass(
    fiber: &FiberSpec,
    omega0: f64,
    atoms: &[AtomSpec],
    num: &Numerics,
    nodes_per_half: usize,
) -> Result<RadGammaMatrix> {
    let k0 = omega0 / C;
    let beta_hi = fiber.n2 * k0 * (1.0 - num.beta_endpoint_eps);
    let (xs, ws) = gauss_legendre(nodes_per_half);
    let mut plus = mat2_zero();
    let mut minus = mat2_zero();
    let half = 0.5 * beta_hi;
    let n_atoms = atoms.len();
    let r_max = atoms.iter().map(|a| a.r).fold(0.0_f64, f64::max);
    let d_cyl: Vec<[C64; 3]> = atoms.iter().map(|a| a.dipole_cyl()).collect();

    for (x, w) in xs.iter().zip(&ws) {
        let beta_abs = half + half * x;
        let weight = w * half;
        node_contribution(
            fiber, omega0, atoms, &d_cyl, num, beta_abs, r_max, weight, &mut plus, &mut minus,
        )?;
    }
    let kappa = rate_prefactor(omega0);
    for i in 0..n_atoms {
        for j in 0..n_atoms {
            plus[i][j] *= kappa;
            minus[i][j] *= kappa;
        }
    }
    Ok(RadGammaMatrix {
        dir: Directional { plus, minus },
    })
}

struct OrderVals {
    v: f64,
    p: f64,
}

fn order_vals(arr: &[f64], m: i32) -> OrderVals {
    let am = m.unsigned_abs() as usize;
    let s = if m < 0 && m % 2 != 0 { -1.0 } else { 1.0 };
    OrderVals {
        v: s * arr[am],
        p: s * prime_from_cyl_array(arr, am),
    }
}

#[allow(clippy::too_many_arguments)]
fn node_contribution(
    fiber: &FiberSpec,
    omega0: f64,
    atoms: &[AtomSpec],
    d_cyl: &[[C64; 3]],
    num: &Numerics,
    beta_abs: f64,
    r_max: f64,
    weight: f64,
    plus: &mut Mat2,
    minus: &mut Mat2,
) -> Result<()> {
    let k0 = omega0 / C;
    let a = fiber.radius;
    let h = (k0 * k0 * fiber.n1 * fiber.n1 - beta_abs * beta_abs).sqrt();
    let q = (k0 * k0 * fiber.n2 * fiber.n2 - beta_abs * beta_abs).sqrt();
    let m_hi = num.m_cap.unsigned_abs() as usize + 1;
    let j_ha = bessel_j_array(h * a, m_hi)?;
    let j_qa = bessel_j_array(q * a, m_hi)?;
    let y_qa = bessel_y_array(q * a, m_hi)?;
    let n_atoms = atoms.len();
    let mut j_qr = Vec::with_capacity(n_atoms);
    let mut y_qr = Vec::with_capacity(n_atoms);
    for atom in atoms {
        j_qr.push(bessel_j_array(q * atom.r, m_hi)?);
        y_qr.push(bessel_y_array(q * atom.r, m_hi)?);
    }

    let mut diag_running = [0.0_f64; 2];
    let mut quiet_shells = 0usize;
    let mut m_shell: i32 = 0;
    loop {
        if m_shell > num.m_cap {
            return Err(Error::MSumNotConverged { m_cap: num.m_cap });
        }
        // Deeply evanescent shells at the atoms contribute nothing and
        // their Hankel intermediates can overflow; cut off by estimate.
        if m_shell > num.m_start && jm_log10_estimate(m_shell, q * r_max) < -25.0 {
            break;
        }
        let mut shell_diag = [0.0_f64; 2];
        let m_list: &[i32] = if m_shell == 0 {
            &[0]
        } else {
            &[m_shell, -m_shell]
        };
        for &m in m_list {
            let jha = order_vals(&j_ha, m);
            let jqa = order_vals(&j_qa, m);
            let yqa = order_vals(&y_qa, m);
            let data = MatchData {
                j_ha: jha.v,
                jp_ha: jha.p,
                j_qa: jqa.v,
                jp_qa: jqa.p,
                y_qa: yqa.v,
                yp_qa: yqa.p,
            };
            for l in Sign::BOTH {
                for beta_sign in [1.0_f64, -1.0] {
                    let beta = beta_sign * beta_abs;
                    let mode = mode_from_match_data(fiber, omega0, beta, m, l, &data)?;
                    let mut g = [C64::new(0.0, 0.0); 2];
                    for (ai, atom) in atoms.iter().enumerate() {
                        let jr = order_vals(&j_qr[ai], m);
                        let yr = order_vals(&y_qr[ai], m);
                        let e = mode.exterior_components(atom.r, jr.v, jr.p, yr.v, yr.p);
                        let proj = d_cyl[ai][0] * e[0] + d_cyl[ai][1] * e[1] + d_cyl[ai][2] * e[2];
                        let phase = C64::from_polar(1.0, beta * atom.z + m as f64 * atom.phi);
                        g[ai] = proj * phase;
                    }
                    let tgt = if beta_sign > 0.0 {
                        &mut *plus
                    } else {
                        &mut *minus
                    };
                    for i in 0..n_atoms {
                        for j in 0..n_atoms {
                            tgt[i][j] += weight * g[i] * g[j].conj();
                        }
                    }
                    for (i, gi) in g.iter().enumerate().take(n_atoms) {
                        shell_diag[i] += gi.norm_sqr();
                    }
                }
            }
        }
        let mut quiet = m_shell >= num.m_start;
        for i in 0..n_atoms {
            diag_running[i] += shell_diag[i];
            if shell_diag[i] > 1e-6 * diag_running[i] {
                quiet = false;
            }
        }
        if quiet {
            quiet_shells += 1;
            if quiet_shells >= 2 {
                break;
            }
        } else {
            quiet_shells = 0;
        }
        m_shell += 1;
    }
    Ok(())
}

/// Radiation-mode cross-atom decay coefficient for one atom pair, per
/// direction, in γ0 units ([`gamma_radiation_matrix`] computes the whole
/// matrix at once and is cheaper for two-atom work).
pub fn gamma_radiation(
    fiber: &FiberSpec,
    omega0: f64,
    atom_i: &AtomSpec,
    atom_j: &AtomSpec,
    num: &Numerics,
) -> Result<Directional<C64>> {
    let atoms = [*atom_i, *atom_j];
    let rad = gamma_radiation_matrix(fiber, omega0, &atoms, num)?;
    Ok(Directional {
        plus: rad.dir.plus[0][1],
        minus: rad.dir.minus[0][1],
    })
}

/// Free-space decay coefficient γ^vac_ij in γ0 units. The i = j case (and
/// the coincident-position limit) reduces to d_i · d_j*.
pub fn gamma_vac(atom_i: &AtomSpec, atom_j: &AtomSpec, omega0: f64) -> C64 {
    let k0 = omega0 / C;
    let pi = atom_i.position_cartesian();
    let pj = atom_j.position_cartesian();
    let rv = [pi[0] - pj[0], pi[1] - pj[1], pi[2] - pj[2]];
    let r = (rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2]).sqrt();
    let ddot: C64 = (0..3)
        .map(|k| atom_i.dipole[k] * atom_j.dipole[k].conj())
        .sum();
    if r == 0.0 {
        return ddot;
    }
    let rhat = [rv[0] / r, rv[1] / r, rv[2] / r];
    let di_r: C64 = (0..3).map(|k| atom_i.dipole[k] * rhat[k]).sum();
    let dj_r: C64 = (0..3).map(|k| atom_j.dipole[k].conj() * rhat[k]).sum();
    let x = k0 * r;
    let far = ddot - 3.0 * di_r * dj_r;
    let near = ddot - di_r * dj_r;
    let f1 = x.cos() / (x * x) - x.sin() / (x * x * x);
    let f2 = x.sin() / x;
    1.5 * (far * f1 + near * f2)
}

/// Free-space dipole-dipole interaction coefficient Ω^vac_12 in γ0 units
/// (complex in general; real when d1 = d2).
pub fn omega_vac(atom_1: &AtomSpec, atom_2: &AtomSpec, omega0: f64) -> Result<C64> {
    let k0 = omega0 / C;
    let p1 = atom_1.position_cartesian();
    let p2 = atom_2.position_cartesian();
    let rv = [p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2]];
    let r = (rv[0] * rv[0] + rv[1] * rv[1] + rv[2] * rv[2]).sqrt();
    if r == 0.0 {
        return Err(Error::SingularGeometry(
            "free-space dipole-dipole coefficient diverges at zero separation".into(),
        ));
    }
    let rhat = [rv[0] / r, rv[1] / r, rv[2] / r];
    let ddot: C64 = (0..3)
        .map(|k| atom_1.dipole[k] * atom_2.dipole[k].conj())
        .sum();
    let d1_r: C64 = (0..3).map(|k| atom_1.dipole[k] * rhat[k]).sum();
    let d2_r: C64 = (0..3).map(|k| atom_2.dipole[k].conj() * rhat[k]).sum();
    let x = k0 * r;
    let far = ddot - 3.0 * d1_r * d2_r;
    let near = ddot - d1_r * d2_r;
    let g1 = x.sin() / (x * x) + x.cos() / (x * x * x);
    let g2 = x.cos() / x;
    Ok(0.75 * (far * g1 - near * g2))
}

/// Pole-formula combination of the directional cross-decay coefficients:
/// Ω = -(i/2) Σ_f sign(f z12) γ12^f. At z12 = 0 the limit z2 -> z1 with
/// z2 > z1 applies (z12 -> 0-).
pub fn omega_pole_formula(gamma12_dir: &Directional<C64>, z12: f64) -> C64 {
    let s_plus = if z12 > 0.0 { 1.0 } else { -1.0 };
    let s_minus = -s_plus;
    -0.5 * C64::i() * (s_plus * gamma12_dir.plus + s_minus * gamma12_dir.minus)
}

/// Guided-mode dipole-dipole coefficient Ω^(g)_12 in γ0 units (pole
/// formula; the production path).
pub fn omega_guided(
    mode: &GuidedModeSolution,
    atom_1: &AtomSpec,
    atom_2: &AtomSpec,
) -> Result<C64> {
    let gdir = gamma_guided(mode, atom_1, atom_2)?;
    Ok(omega_pole_formula(&gdir, atom_1.z - atom_2.z))
}

/// Window handling of the principal-value oracle.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum PvTaper {
    /// Sharp window cutoff (the literal windowed principal value).
    Plain,
    /// Hann taper toward the window edges.
    Hann,
    /// Sharp cutoff plus the leading analytic estimate of the neglected
    /// oscillatory tails (one integration by parts against the phase
    /// e^{i f beta(omega) z12} at each edge and direction).
    EdgeCorrected,
}

/// Verification oracle for [`omega_guided`]: symmetric-grid principal-value
/// quadrature of the frequency integral of the guided-mode kernel over
/// [omega0 - w, omega0 + w], where w is the smaller half-width of `window`.
/// Follows the HE11 branch across the window, which may extend beyond the
/// single-mode band. Not the production path.
pub fn omega_guided_pv(
    fiber: &FiberSpec,
    omega0: f64,
    atom_1: &AtomSpec,
    atom_2: &AtomSpec,
    window: (f64, f64),
    n_nodes: usize,
    taper: PvTaper,
) -> Result<C64> {
    let (lo, hi) = window;
    if !(lo < omega0 && omega0 < hi) {
        return Err(Error::Config(format!(
            "PV window ({lo:.3e}, {hi:.3e}) does not bracket omega0 = {omega0:.3e}"
        )));
    }
    if atom_1.z == atom_2.z {
        return Err(Error::Config(
            "PV oracle requires distinct axial positions".into(),
        ));
    }
    let w = (omega0 - lo).min(hi - omega0);
    let du = w / n_nodes as f64;
    let z12 = atom_1.z - atom_2.z;
    let d1 = atom_1.dipole_cyl();
    let d2 = atom_2.dipole_cyl();
    // kernel split by propagation direction, in γ0 units per rad/s
    let kernel_parts = |mode: &GuidedModeSolution| -> Result<Directional<C64>> {
        let pref = (0.75 * C * C * C / omega0.powi(3)) * mode.omega * mode.beta_prime;
        let mut parts = Directional {
            plus: C64::new(0.0, 0.0),
            minus: C64::new(0.0, 0.0),
        };
        for f in Sign::BOTH {
            let mut acc = C64::new(0.0, 0.0);
            for l in Sign::BOTH {
                let idx = GuidedModeIndex::new(f, l);
                let e1 = eval_guided_profile(mode, idx, atom_1.r, atom_1.phi)?;
                let e2 = eval_guided_profile(mode, idx, atom_2.r, atom_2.phi)?;
                let p1: C64 = d1[0] * e1[0] + d1[1] * e1[1] + d1[2] * e1[2];
                let p2: C64 = d2[0] * e2[0] + d2[1] * e2[1] + d2[2] * e2[2];
                let phase = C64::from_polar(
                    1.0,
                    f.value() * mode.beta * z12 + l.value() * (atom_1.phi - atom_2.phi),
                );
                acc += p1 * p2.conj() * phase * pref;
            }
            match f {
                Sign::Plus => parts.plus = acc,
                Sign::Minus => parts.minus = acc,
            }
        }
        Ok(parts)
    };
    // Walk outward from omega0 so each eigensolve is seeded by its neighbor.
    let mode0 = solve_he11_mode_branch(fiber, omega0)?;
    let mut hint_up = mode0.beta;
    let mut hint_dn = mode0.beta;
    let mut sum = C64::new(0.0, 0.0);
    for j in 0..n_nodes {
        let u = (j as f64 + 0.5) * du;
        let wgt = match taper {
            PvTaper::Plain | PvTaper::EdgeCorrected => 1.0,
            PvTaper::Hann => {
                let cv = (std::f64::consts::FRAC_PI_2 * u / w).cos();
                cv * cv
            }
        };
        let mode_up = solve_he11_mode_branch_hinted(fiber, omega0 + u, hint_up)?;
        hint_up = mode_up.beta;
        let mode_dn = solve_he11_mode_branch_hinted(fiber, omega0 - u, hint_dn)?;
        hint_dn = mode_dn.beta;
        let k_plus = kernel_parts(&mode_up)?.total();
        let k_minus = kernel_parts(&mode_dn)?.total();
        sum += wgt * (k_plus - k_minus) / u * du;
    }
    let mut omega_pv = -sum;
    if taper == PvTaper::EdgeCorrected {
        // Leading asymptotic estimate of each neglected tail: one
        // integration by parts against the phase f beta(omega) z12.
        let mode_hi = solve_he11_mode_branch_hinted(fiber, omega0 + w, hint_up)?;
        let mode_lo = solve_he11_mode_branch_hinted(fiber, omega0 - w, hint_dn)?;
        let parts_hi = kernel_parts(&mode_hi)?;
        let parts_lo = kernel_parts(&mode_lo)?;
        for f in Sign::BOTH {
            let theta_p_hi = f.value() * mode_hi.beta_prime * z12;
            let tail_up = -*parts_hi.by(f) / (C64::i() * theta_p_hi * w);
            let theta_p_lo = f.value() * mode_lo.beta_prime * z12;
            let tail_dn = *parts_lo.by(f) / (C64::i() * theta_p_lo * (-w));
            omega_pv -= tail_up + tail_dn;
        }
    }
    Ok(omega_pv)
}

/// Counter-rotating companion of the principal-value oracle: the regular
/// (pole-free) frequency integral of the conjugate-dipole kernel over
/// [omega_lo, omega_hi], in γ0 units. Part of the same verification
/// machinery as [`omega_guided_pv`]; the full oracle is their sum.
pub fn omega_guided_counter_rotating(
    fiber: &FiberSpec,
    omega0: f64,
    atom_1: &AtomSpec,
    atom_2: &AtomSpec,
    window: (f64, f64),
    n_nodes: usize,
) -> Result<C64> {
    let (lo, hi) = window;
    if !(lo > 0.0 && lo < hi) {
        return Err(Error::Config(format!(
            "counter-rotating window ({lo:.3e}, {hi:.3e}) must satisfy 0 < lo < hi"
        )));
    }
    let d1 = atom_1.dipole_cyl();
    let d2 = atom_2.dipole_cyl();
    let z12 = atom_1.z - atom_2.z;
    let (xs, ws) = gauss_legendre(n_nodes);
    let mid = 0.5 * (lo + hi);
    let half = 0.5 * (hi - lo);
    let mut hint: Option<f64> = None;
    let mut acc = C64::new(0.0, 0.0);
    // Gauss-Legendre nodes ordered ascending; chain eigen hints.
    for (x, w) in xs.iter().zip(&ws) {
        let omega = mid + half * x;
        let mode = match hint {
            Some(h) => solve_he11_mode_branch_hinted(fiber, omega, h)?,
            None => solve_he11_mode_branch(fiber, omega)?,
        };
        hint = Some(mode.beta);
        let pref = (0.75 * C * C * C / omega0.powi(3)) * mode.omega * mode.beta_prime;
        let mut kernel = C64::new(0.0, 0.0);
        for f in Sign::BOTH {
            for l in Sign::BOTH {
                let idx = GuidedModeIndex::new(f, l);
                let e1 = eval_guided_profile(&mode, idx, atom_1.r, atom_1.phi)?;
                let e2 = eval_guided_profile(&mode, idx, atom_2.r, atom_2.phi)?;
                let q1: C64 = d1[0].conj() * e1[0] + d1[1].conj() * e1[1] + d1[2].conj() * e1[2];
                let q2: C64 = d2[0].conj() * e2[0] + d2[1].conj() * e2[1] + d2[2].conj() * e2[2];
                let phase = C64::from_polar(
                    1.0,
                    -f.value() * mode.beta * z12 - l.value() * (atom_1.phi - atom_2.phi),
                );
                kernel += q1.conj() * q2 * phase * pref;
            }
        }
        acc += w * half * kernel / (omega + omega0);
    }
    Ok(-acc)
}

/// Radiation-mode dipole-dipole coefficient by the mode-density-scaled
/// free-space approximation, in γ0 units.
pub fn omega_radiation_approx(omega_vac12: C64, gamma_r_11: f64, gamma_r_22: f64) -> C64 {
    omega_vac12 * (gamma_r_11 * gamma_r_22).max(0.0).sqrt()
}

/// Phases of the complex collective coefficients and the two excitation
/// transfer coefficients of the phase-rotated frame.
#[derive(Clone, Copy, Debug)]
pub struct ChiralityDiagnostics {
    pub phi_gamma: f64,
    pub phi_omega: f64,
    /// Coefficient of forward (atom 1 -> atom 2) excitation transfer.
    pub transfer_fwd: f64,
    /// Coefficient of backward (atom 2 -> atom 1) excitation transfer.
    pub transfer_bwd: f64,
}

/// Chirality diagnostics from the total γ12 and Ω12.
pub fn chirality_diagnostics(gamma12: C64, omega12: C64) -> Result<ChiralityDiagnostics> {
    if gamma12.norm() == 0.0 {
        return Err(Error::PhaseUndefined);
    }
    let phi_gamma = gamma12.arg();
    let phi_omega = omega12.arg();
    let gamma_t = gamma12.norm();
    let im_omega_t = omega12.norm() * (phi_omega - phi_gamma).sin();
    Ok(ChiralityDiagnostics {
        phi_gamma,
        phi_omega,
        transfer_fwd: gamma_t + 2.0 * im_omega_t,
        transfer_bwd: gamma_t - 2.0 * im_omega_t,
    })
}

/// The full γ/Ω ledger for a two-atom geometry, everything in γ0 units.
#[derive(Clone, Debug)]
pub struct CouplingCoefficients {
    pub gamma_g: Mat2,
    pub gamma_g_dir: Directional<Mat2>,
    pub gamma_r: Mat2,
    pub gamma_r_dir: Directional<Mat2>,
    pub gamma_total: Mat2,
    pub omega_g12: C64,
    pub omega_r12: C64,
    pub omega12: C64,
    pub gamma_vac: Mat2,
    pub omega_vac12: C64,
    pub phi_gamma: f64,
    pub phi_omega: f64,
    pub transfer_fwd: f64,
    pub transfer_bwd: f64,
}

impl CouplingCoefficients {
    /// Minimum eigenvalues of [γ^(g)], [γ^(r)], [γ] (Gram positivity check).
    pub fn psd_min_eigenvalues(&self) -> [f64; 3] {
        [
            crate::linalg::min_eig_2x2(
                self.gamma_g[0][0].re,
                self.gamma_g[1][1].re,
                self.gamma_g[0][1],
            ),
            crate::linalg::min_eig_2x2(
                self.gamma_r[0][0].re,
                self.gamma_r[1][1].re,
                self.gamma_r[0][1],
            ),
            crate::linalg::min_eig_2x2(
                self.gamma_total[0][0].re,
                self.gamma_total[1][1].re,
                self.gamma_total[0][1],
            ),
        ]
    }

    /// Zero out atom 2: the single-atom reference set produced from the
    /// same engine (baseline trajectories).
    pub fn single_atom_reduction(&self) -> Self {
        let keep = |m: &Mat2| -> Mat2 {
            let mut out = mat2_zero();
            out[0][0] = m[0][0];
            out
        };
        CouplingCoefficients {
            gamma_g: keep(&self.gamma_g),
            gamma_g_dir: Directional {
                plus: keep(&self.gamma_g_dir.plus),
                minus: keep(&self.gamma_g_dir.minus),
            },
            gamma_r: keep(&self.gamma_r),
            gamma_r_dir: Directional {
                plus: keep(&self.gamma_r_dir.plus),
                minus: keep(&self.gamma_r_dir.minus),
            },
            gamma_total: keep(&self.gamma_total),
            omega_g12: C64::new(0.0, 0.0),
            omega_r12: C64::new(0.0, 0.0),
            omega12: C64::new(0.0, 0.0),
            gamma_vac: keep(&self.gamma_vac),
            omega_vac12: C64::new(0.0, 0.0),
            phi_gamma: 0.0,
            phi_omega: 0.0,
            transfer_fwd: 0.0,
            transfer_bwd: 0.0,
        }
    }

    /// Free-space-only coefficient set for the same atoms: no guided
    /// channel; the radiation channel carries the vacuum coefficients,
    /// split evenly over the two directions.
    pub fn free_space(atoms: &[AtomSpec; 2], omega0: f64) -> Result<Self> {
        let mut gvac = mat2_zero();
        for i in 0..2 {
            for j in 0..2 {
                gvac[i][j] = gamma_vac(&atoms[i], &atoms[j], omega0);
            }
        }
        let ovac = omega_vac(&atoms[0], &atoms[1], omega0)?;
        let mut half = mat2_zero();
        for i in 0..2 {
            for j in 0..2 {
                half[i][j] = 0.5 * gvac[i][j];
            }
        }
        let diag = chirality_diagnostics(gvac[0][1], ovac).unwrap_or(ChiralityDiagnostics {
            phi_gamma: 0.0,
            phi_omega: 0.0,
            transfer_fwd: 0.0,
            transfer_bwd: 0.0,
        });
        Ok(CouplingCoefficients {
            gamma_g: mat2_zero(),
            gamma_g_dir: Directional {
                plus: mat2_zero(),
                minus: mat2_zero(),
            },
            gamma_r: gvac,
            gamma_r_dir: Directional {
                plus: half,
                minus: half,
            },
            gamma_total: gvac,
            omega_g12: C64::new(0.0, 0.0),
            omega_r12: ovac,
            omega12: ovac,
            gamma_vac: gvac,
            omega_vac12: ovac,
            phi_gamma: diag.phi_gamma,
            phi_omega: diag.phi_omega,
            transfer_fwd: diag.transfer_fwd,
            transfer_bwd: diag.transfer_bwd,
        })
    }
}

/// Coupling ledger for a single atom (atom-2 entries zero, no cross
/// coefficients or chirality phases).
pub fn compute_coupling_single(
    mode: &GuidedModeSolution,
    atom: &AtomSpec,
    num: &Numerics,
) -> Result<CouplingCoefficients> {
    let fiber = mode.fiber;
    check_atoms_outside(&fiber, std::slice::from_ref(atom))?;
    let gdir = gamma_guided(mode, atom, atom)?;
    let mut gamma_g_dir = Directional {
        plus: mat2_zero(),
        minus: mat2_zero(),
    };
    gamma_g_dir.plus[0][0] = gdir.plus;
    gamma_g_dir.minus[0][0] = gdir.minus;
    let gamma_g = mat2_add(&gamma_g_dir.plus, &gamma_g_dir.minus);
    let rad = gamma_radiation_matrix(&fiber, mode.omega, std::slice::from_ref(atom), num)?;
    let gamma_r = rad.total();
    let gamma_total = mat2_add(&gamma_g, &gamma_r);
    let mut gvac = mat2_zero();
    gvac[0][0] = gamma_vac(atom, atom, mode.omega);
    Ok(CouplingCoefficients {
        gamma_g,
        gamma_g_dir,
        gamma_r,
        gamma_r_dir: rad.dir,
        gamma_total,
        omega_g12: C64::new(0.0, 0.0),
        omega_r12: C64::new(0.0, 0.0),
        omega12: C64::new(0.0, 0.0),
        gamma_vac: gvac,
        omega_vac12: C64::new(0.0, 0.0),
        phi_gamma: 0.0,
        phi_omega: 0.0,
        transfer_fwd: 0.0,
        transfer_bwd: 0.0,
    })
}

/// Compute the full coupling ledger for an atom pair at atomic frequency
/// omega0, solving the guided eigenproblem internally.
pub fn compute_coupling(
    fiber: &FiberSpec,
    omega0: f64,
    atoms: &[AtomSpec; 2],
    num: &Numerics,
) -> Result<CouplingCoefficients> {
    let mode = solve_eigenvalue(fiber, omega0)?;
    compute_coupling_with_mode(&mode, atoms, num)
}

/// Same as [`compute_coupling`] with a pre-solved guided mode (memoized
/// solutions from the scenario layer land here).
pub fn compute_coupling_with_mode(
    mode: &GuidedModeSolution,
    atoms: &[AtomSpec; 2],
    num: &Numerics,
) -> Result<CouplingCoefficients> {
    let fiber = mode.fiber;
    check_atoms_outside(&fiber, atoms)?;
    let omega0 = mode.omega;

    let mut gamma_g_dir = Directional {
        plus: mat2_zero(),
        minus: mat2_zero(),
    };
    for f in Sign::BOTH {
        let mut acc = mat2_zero();
        for l in Sign::BOTH {
            let idx = GuidedModeIndex::new(f, l);
            let g = [
                coupling_g_guided(mode, idx, &atoms[0])?,
                coupling_g_guided(mode, idx, &atoms[1])?,
            ];
            for i in 0..2 {
                for j in 0..2 {
                    acc[i][j] += g[i] * g[j].conj();
                }
            }
        }
        match f {
            Sign::Plus => gamma_g_dir.plus = acc,
            Sign::Minus => gamma_g_dir.minus = acc,
        }
    }
    let gamma_g = mat2_add(&gamma_g_dir.plus, &gamma_g_dir.minus);

    let rad = gamma_radiation_matrix(&fiber, omega0, atoms, num)?;
    let gamma_r = rad.total();
    let gamma_total = mat2_add(&gamma_g, &gamma_r);

    let gdir12 = Directional {
        plus: gamma_g_dir.plus[0][1],
        minus: gamma_g_dir.minus[0][1],
    };
    let omega_g12 = omega_pole_formula(&gdir12, atoms[0].z - atoms[1].z);

    let mut gvac = mat2_zero();
    for i in 0..2 {
        for j in 0..2 {
            gvac[i][j] = gamma_vac(&atoms[i], &atoms[j], omega0);
        }
    }
    let omega_vac12 = omega_vac(&atoms[0], &atoms[1], omega0)?;
    let omega_r12 = omega_radiation_approx(omega_vac12, gamma_r[0][0].re, gamma_r[1][1].re);
    let omega12 = omega_g12 + omega_r12;

    let diag = chirality_diagnostics(gamma_total[0][1], omega12)?;
    Ok(CouplingCoefficients {
        gamma_g,
        gamma_g_dir,
        gamma_r,
        gamma_r_dir: rad.dir,
        gamma_total,
        omega_g12,
        omega_r12,
        omega12,
        gamma_vac: gvac,
        omega_vac12,
        phi_gamma: diag.phi_gamma,
        phi_omega: diag.phi_omega,
        transfer_fwd: diag.transfer_fwd,
        transfer_bwd: diag.transfer_bwd,
    })
}
