//! HE11 guided modes of a step-index nanofiber: eigenvalue solve,
//! dispersion, normalization, and profile functions.

use crate::constants::{C, V_SINGLE_MODE};
use crate::specialfn::{j012, k012};
use crate::{quad, Error, Result};
use num_complex::Complex64;

/// A binary direction index: propagation direction f or polarization
/// circulation l, valued +1 or -1.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub enum Sign {
    Plus,
    Minus,
}

impl Sign {
    pub const BOTH: [Sign; 2] = [Sign::Plus, Sign::Minus];

    pub fn value(self) -> f64 {
        match self {
            Sign::Plus => 1.0,
            Sign::Minus => -1.0,
        }
    }

    pub fn flip(self) -> Sign {
        match self {
            Sign::Plus => Sign::Minus,
            Sign::Minus => Sign::Plus,
        }
    }
}

/// Fiber geometry and refractive indices.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct FiberSpec {
    /// Core radius, meters.
    pub radius: f64,
    /// Core refractive index.
    pub n1: f64,
    /// Cladding (surrounding medium) refractive index.
    pub n2: f64,
}

impl FiberSpec {
    pub fn new(radius: f64, n1: f64, n2: f64) -> Result<Self> {
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(Error::Config(format!(
                "fiber radius must be > 0, got {radius}"
            )));
        }
        if !(n1 > n2 && n2 >= 1.0) {
            return Err(Error::Config(format!(
                "refractive indices must satisfy n1 > n2 >= 1, got n1={n1}, n2={n2}"
            )));
        }
        Ok(FiberSpec { radius, n1, n2 })
    }

    /// V parameter k a sqrt(n1^2 - n2^2) at angular frequency omega.
    pub fn v_parameter(&self, omega: f64) -> f64 {
        omega / C * self.radius * (self.n1 * self.n1 - self.n2 * self.n2).sqrt()
    }
}

/// Mode index mu = (omega, f, l): propagation direction f and
/// quasicircular polarization circulation l.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash)]
pub struct GuidedModeIndex {
    pub f: Sign,
    pub l: Sign,
}

impl GuidedModeIndex {
    pub fn new(f: Sign, l: Sign) -> Self {
        GuidedModeIndex { f, l }
    }

    /// All four (f, l) combinations at one frequency.
    pub fn all() -> [GuidedModeIndex; 4] {
        [
            GuidedModeIndex::new(Sign::Plus, Sign::Plus),
            GuidedModeIndex::new(Sign::Plus, Sign::Minus),
            GuidedModeIndex::new(Sign::Minus, Sign::Plus),
            GuidedModeIndex::new(Sign::Minus, Sign::Minus),
        ]
    }
}

/// One normalized HE11 eigenmode at a fixed frequency. Immutable after
/// construction; safe to share across threads.
#[derive(Clone, Debug)]
pub struct GuidedModeSolution {
    pub omega: f64,
    /// Free-space wavenumber omega/c.
    pub k: f64,
    /// Propagation constant, 1/m.
    pub beta: f64,
    /// d beta / d omega, s/m (inverse group velocity).
    pub beta_prime: f64,
    /// Interior transverse wavenumber sqrt(n1^2 k^2 - beta^2).
    pub h: f64,
    /// Exterior decay constant sqrt(beta^2 - n2^2 k^2).
    pub q: f64,
    /// Polarization parameter s.
    pub s: f64,
    /// Normalization constant (positive real).
    pub norm_c: f64,
    pub fiber: FiberSpec,
    /// Cached K1(qa)/J1(ha), the interior matching ratio.
    ratio: f64,
}

/// Eigenvalue residual of the HE11 characteristic equation in its natural
/// dimensionless form (zero at a guided mode).
pub fn eigenvalue_residual(fiber: &FiberSpec, omega: f64, beta: f64) -> Result<f64> {
    let k = omega / C;
    let (n1, n2, a) = (fiber.n1, fiber.n2, fiber.radius);
    let h2 = n1 * n1 * k * k - beta * beta;
    let q2 = beta * beta - n2 * n2 * k * k;
    if h2 <= 0.0 || q2 <= 0.0 {
        return Err(Error::Domain(format!(
            "beta = {beta} outside the guided interval (n2 k, n1 k)"
        )));
    }
    let ha = h2.sqrt() * a;
    let qa = q2.sqrt() * a;
    let (j0, j1, _) = j012(ha)?;
    let (k0, k1, k2) = k012(qa)?;
    let k1p = -0.5 * (k0 + k2);
    let kap = k1p / (qa * k1);
    let lhs = j0 / (ha * j1);
    let n1sq = n1 * n1;
    let n2sq = n2 * n2;
    let term = -(n1sq + n2sq) / (2.0 * n1sq) * kap + 1.0 / (ha * ha);
    let inv2 = 1.0 / (qa * qa) + 1.0 / (ha * ha);
    let inner =
        ((n1sq - n2sq) / (2.0 * n1sq) * kap).powi(2) + beta * beta / (n1sq * k * k) * inv2 * inv2;
    Ok(lhs - (term - inner.sqrt()))
}

const BRACKET_EPS: f64 = 1e-9;
const SCAN_POINTS: usize = 2048;
/// The characteristic equation has a single HE11 root for V below the
/// second hybrid-mode cutoff; the branch solver is valid up to there.
const V_BRANCH_MAX: f64 = 3.8;

/// Root of the characteristic equation on (n2 k, n1 k), without the
/// single-mode check: follows the HE11 branch while it is the only root
/// (V < 3.8). Deterministic scan + bisection.
pub fn solve_he11_beta(fiber: &FiberSpec, omega: f64) -> Result<f64> {
    let v = fiber.v_parameter(omega);
    if v >= V_BRANCH_MAX {
        return Err(Error::Multimode { v });
    }
    solve_he11_beta_impl(fiber, omega, SCAN_POINTS)
}

fn solve_he11_beta_impl(fiber: &FiberSpec, omega: f64, scan: usize) -> Result<f64> {
    let k = omega / C;
    let lo = fiber.n2 * k * (1.0 + BRACKET_EPS);
    let hi = fiber.n1 * k * (1.0 - BRACKET_EPS);
    if lo >= hi {
        return Err(Error::NoGuidedRoot);
    }
    let f_at = |beta: f64| eigenvalue_residual(fiber, omega, beta);
    // Scan from the high-beta end: the fundamental mode has the largest
    // effective index, so the first sign change found is HE11.
    let mut prev_beta = hi;
    let mut prev_f = f_at(hi)?;
    let mut bracket = None;
    for i in 1..=scan {
        let beta = hi + (lo - hi) * i as f64 / scan as f64;
        let fv = f_at(beta)?;
        if prev_f == 0.0 {
            return Ok(prev_beta);
        }
        if prev_f.signum() != fv.signum() {
            bracket = Some((beta, prev_beta));
            break;
        }
        prev_beta = beta;
        prev_f = fv;
    }
    let (mut b_lo, mut b_hi) = bracket.ok_or(Error::NoGuidedRoot)?;
    let mut f_lo = f_at(b_lo)?;
    for _ in 0..200 {
        let mid = 0.5 * (b_lo + b_hi);
        if mid <= b_lo || mid >= b_hi {
            break; // interval at machine resolution
        }
        let f_mid = f_at(mid)?;
        if f_mid == 0.0 {
            return Ok(mid);
        }
        if f_lo.signum() == f_mid.signum() {
            b_lo = mid;
            f_lo = f_mid;
        } else {
            b_hi = mid;
        }
    }
    Ok(0.5 * (b_lo + b_hi))
}

/// Bisection refinement near a known beta (continuation along the branch);
/// falls back to the full scan when the local bracket fails.
pub(crate) fn solve_he11_beta_hinted(fiber: &FiberSpec, omega: f64, hint: f64) -> Result<f64> {
    let k = omega / C;
    let lo_lim = fiber.n2 * k * (1.0 + BRACKET_EPS);
    let hi_lim = fiber.n1 * k * (1.0 - BRACKET_EPS);
    let mut width = 0.01 * hint;
    for _ in 0..3 {
        let b_lo = (hint - width).max(lo_lim);
        let b_hi = (hint + width).min(hi_lim);
        if b_lo < b_hi {
            if let (Ok(f_lo), Ok(f_hi)) = (
                eigenvalue_residual(fiber, omega, b_lo),
                eigenvalue_residual(fiber, omega, b_hi),
            ) {
                if f_lo.signum() != f_hi.signum() {
                    let (mut lo, mut hi, mut flo) = (b_lo, b_hi, f_lo);
                    for _ in 0..200 {
                        let mid = 0.5 * (lo + hi);
                        if mid <= lo || mid >= hi {
                            break;
                        }
                        let fm = eigenvalue_residual(fiber, omega, mid)?;
                        if fm == 0.0 {
                            return Ok(mid);
                        }
                        if flo.signum() == fm.signum() {
                            lo = mid;
                            flo = fm;
                        } else {
                            hi = mid;
                        }
                    }
                    return Ok(0.5 * (lo + hi));
                }
            }
        }
        width *= 4.0;
    }
    solve_he11_beta_impl(fiber, omega, SCAN_POINTS)
}

/// d beta / d omega by centered finite difference with relative step
/// `rel_step`, plus one Richardson halving as a consistency check.
pub fn beta_derivative_with_step(fiber: &FiberSpec, omega: f64, rel_step: f64) -> Result<f64> {
    let beta0 = solve_he11_beta_impl(fiber, omega, SCAN_POINTS)?;
    beta_derivative_hinted(fiber, omega, rel_step, beta0)
}

fn beta_derivative_hinted(
    fiber: &FiberSpec,
    omega: f64,
    rel_step: f64,
    beta_hint: f64,
) -> Result<f64> {
    let fd = |delta: f64| -> Result<f64> {
        let bp = solve_he11_beta_hinted(fiber, omega * (1.0 + delta), beta_hint)?;
        let bm = solve_he11_beta_hinted(fiber, omega * (1.0 - delta), beta_hint)?;
        Ok((bp - bm) / (2.0 * delta * omega))
    };
    let d1 = fd(rel_step)?;
    let d2 = fd(0.5 * rel_step)?;
    if (d1 - d2).abs() > 1e-4 * d2.abs() {
        return Err(Error::Quadrature(format!(
            "beta' finite difference unstable: {d1:.6e} vs {d2:.6e}"
        )));
    }
    Ok(d2)
}

/// d beta / d omega at the default relative step 1e-5.
pub fn beta_derivative(fiber: &FiberSpec, omega: f64) -> Result<f64> {
    beta_derivative_with_step(fiber, omega, 1e-5)
}

/// Solve the HE11 eigenvalue problem at omega, requiring the single-mode
/// condition V < 2.405, and return the fully normalized mode.
pub fn solve_eigenvalue(fiber: &FiberSpec, omega: f64) -> Result<GuidedModeSolution> {
    let v = fiber.v_parameter(omega);
    if v >= V_SINGLE_MODE {
        return Err(Error::Multimode { v });
    }
    build_mode(fiber, omega)
}

/// Same as [`solve_eigenvalue`] but following the HE11 branch past the
/// single-mode boundary (used by the dispersion-window integrals).
pub(crate) fn solve_he11_mode_branch(fiber: &FiberSpec, omega: f64) -> Result<GuidedModeSolution> {
    build_mode(fiber, omega)
}

/// Branch-mode construction seeded by a nearby known root (continuation
/// along a frequency grid).
pub(crate) fn solve_he11_mode_branch_hinted(
    fiber: &FiberSpec,
    omega: f64,
    beta_hint: f64,
) -> Result<GuidedModeSolution> {
    let beta = solve_he11_beta_hinted(fiber, omega, beta_hint)?;
    build_mode_from_beta(fiber, omega, beta)
}

fn build_mode(fiber: &FiberSpec, omega: f64) -> Result<GuidedModeSolution> {
    let beta = solve_he11_beta(fiber, omega)?;
    build_mode_from_beta(fiber, omega, beta)
}

fn build_mode_from_beta(fiber: &FiberSpec, omega: f64, beta: f64) -> Result<GuidedModeSolution> {
    let beta_prime = beta_derivative_hinted(fiber, omega, 1e-5, beta)?;
    let k = omega / C;
    let h = (fiber.n1 * fiber.n1 * k * k - beta * beta).sqrt();
    let q = (beta * beta - fiber.n2 * fiber.n2 * k * k).sqrt();
    let a = fiber.radius;
    let (ha, qa) = (h * a, q * a);
    let (j0a, j1a, j2a) = j012(ha)?;
    let (k0a, k1a, k2a) = k012(qa)?;
    let j1p = 0.5 * (j0a - j2a);
    let k1p = -0.5 * (k0a + k2a);
    let s = (1.0 / (ha * ha) + 1.0 / (qa * qa)) / (j1p / (ha * j1a) + k1p / (qa * k1a));
    let ratio = k1a / j1a;
    let mut mode = GuidedModeSolution {
        omega,
        k,
        beta,
        beta_prime,
        h,
        q,
        s,
        norm_c: 1.0,
        fiber: *fiber,
        ratio,
    };
    mode.norm_c = normalize(&mode)?;
    Ok(mode)
}

/// Normalization constant: positive real C such that the weighted profile
/// integral over the cross-section equals one.
pub fn normalize(mode: &GuidedModeSolution) -> Result<f64> {
    let n = norm_integral_c1(mode, 1)?;
    let n_check = norm_integral_c1(mode, 2)?;
    if (n - n_check).abs() > 1e-7 * n.abs() {
        return Err(Error::Quadrature(format!(
            "guided-mode normalization integral not converged: {n:.12e} vs {n_check:.12e}"
        )));
    }
    if !(n_check > 0.0) {
        return Err(Error::Quadrature(
            "normalization integral not positive".into(),
        ));
    }
    Ok(1.0 / n_check.sqrt())
}

/// The normalization integral evaluated with C = 1 (refinement >= 1 doubles
/// the panel counts).
pub(crate) fn norm_integral_c1(mode: &GuidedModeSolution, refinement: usize) -> Result<f64> {
    let a = mode.fiber.radius;
    let n1 = mode.fiber.n1;
    let n2 = mode.fiber.n2;
    let r_cut = a + 12.0 / mode.q;
    let density = |r: f64| -> f64 {
        let e = profile_unnormalized(mode, r).expect("profile in normalization range");
        e[0].norm_sqr() + e[1].norm_sqr() + e[2].norm_sqr()
    };
    let inner = quad::integrate_panels(|r| n1 * n1 * density(r) * r, 0.0, a, 4 * refinement, 40);
    // geometric panels: the evanescent tail can span decades in r when q
    // is small, with logarithmic structure near the surface
    let panels = 8 * refinement;
    let ratio = (r_cut / a).powf(1.0 / panels as f64);
    let mut outer = 0.0;
    let mut lo = a;
    for _ in 0..panels {
        let hi = (lo * ratio).min(r_cut);
        outer += quad::integrate(|r| n2 * n2 * density(r) * r, lo, hi, 40);
        lo = hi;
    }
    Ok(2.0 * std::f64::consts::PI * (inner + outer))
}

/// Base profile (forward, counterclockwise) before normalization.
fn profile_unnormalized(mode: &GuidedModeSolution, r: f64) -> Result<[Complex64; 3]> {
    if r < 0.0 {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    let a = mode.fiber.radius;
    let (s, q, h, beta) = (mode.s, mode.q, mode.h, mode.beta);
    let (one_m, one_p) = (1.0 - s, 1.0 + s);
    if r < a {
        let (j0, j1, j2) = j012(h * r)?;
        let pre = q / h * mode.ratio;
        let er = pre * (one_m * j0 - one_p * j2);
        let ephi = -pre * (one_m * j0 + one_p * j2);
        let ez = 2.0 * q / beta * mode.ratio * j1;
        Ok([
            Complex64::new(0.0, er),
            Complex64::new(ephi, 0.0),
            Complex64::new(ez, 0.0),
        ])
    } else {
        let (k0, k1, k2) = k012(q * r)?;
        let er = one_m * k0 + one_p * k2;
        let ephi = -(one_m * k0 - one_p * k2);
        let ez = 2.0 * q / beta * k1;
        Ok([
            Complex64::new(0.0, er),
            Complex64::new(ephi, 0.0),
            Complex64::new(ez, 0.0),
        ])
    }
}

impl GuidedModeSolution {
    /// Normalized base profile (e_r, e_phi, e_z) at radius r, i.e. the
    /// (f, l) = (+, +) cylindrical components. e_r is purely imaginary;
    /// e_phi and e_z are real.
    pub fn profile_base(&self, r: f64) -> Result<[Complex64; 3]> {
        let e = profile_unnormalized(self, r)?;
        Ok([e[0] * self.norm_c, e[1] * self.norm_c, e[2] * self.norm_c])
    }

    /// Interior formulas evaluated at radius r regardless of the region
    /// (tangential-continuity checks at r = a).
    pub fn profile_interior_formula(&self, r: f64) -> Result<[Complex64; 3]> {
        let (j0, j1, j2) = j012(self.h * r)?;
        let (one_m, one_p) = (1.0 - self.s, 1.0 + self.s);
        let pre = self.q / self.h * self.ratio * self.norm_c;
        let er = pre * (one_m * j0 - one_p * j2);
        let ephi = -pre * (one_m * j0 + one_p * j2);
        let ez = 2.0 * self.q / self.beta * self.ratio * self.norm_c * j1;
        Ok([
            Complex64::new(0.0, er),
            Complex64::new(ephi, 0.0),
            Complex64::new(ez, 0.0),
        ])
    }

    /// Exterior formulas evaluated at radius r (r can equal a).
    pub fn profile_exterior_formula(&self, r: f64) -> Result<[Complex64; 3]> {
        let (k0, k1, k2) = k012(self.q * r)?;
        let (one_m, one_p) = (1.0 - self.s, 1.0 + self.s);
        let er = (one_m * k0 + one_p * k2) * self.norm_c;
        let ephi = -(one_m * k0 - one_p * k2) * self.norm_c;
        let ez = 2.0 * self.q / self.beta * k1 * self.norm_c;
        Ok([
            Complex64::new(0.0, er),
            Complex64::new(ephi, 0.0),
            Complex64::new(ez, 0.0),
        ])
    }
}

/// Cylindrical components of the profile function of mode (omega, f, l) at
/// (r, phi): (e_r, l e_phi, f e_z). The values do not depend on phi; the
/// argument is kept because the components refer to the local cylindrical
/// basis at that azimuth.
pub fn eval_guided_profile(
    mode: &GuidedModeSolution,
    idx: GuidedModeIndex,
    r: f64,
    _phi: f64,
) -> Result<[Complex64; 3]> {
    let base = mode.profile_base(r)?;
    Ok([base[0], base[1] * idx.l.value(), base[2] * idx.f.value()])
}
