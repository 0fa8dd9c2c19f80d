//! Radiation modes nu = (omega, beta, m, l) of the nanofiber: construction,
//! normalization, and profile evaluation.
//!
//! Internally the exterior solution C1 H^(1) + C2 H^(2) is stored in the
//! regrouped real form cJ*J + cY*Y (and i(pd*J + qd*Y) for the D part).
//! The two groupings are algebraically identical, but the J/Y split keeps
//! every intermediate at the physical scale: near the endpoints |beta| ->
//! n2 k the individual Hankel products grow like Y_m(qa)^2 and their
//! difference is Wronskian-small, which the complex form cannot represent
//! without catastrophic cancellation.

use crate::constants::{C, EPS0, MU0};
use crate::guided::{FiberSpec, Sign};
use crate::specialfn::{
    bessel_j, bessel_j_prime, bessel_y, bessel_y_prime, hankel1, hankel1_prime, hankel2,
    hankel2_prime,
};
use crate::{Error, Result};
use num_complex::Complex64;

/// One normalized radiation mode. Immutable after construction.
#[derive(Clone, Debug)]
pub struct RadiationModeSolution {
    pub omega: f64,
    pub k: f64,
    /// Signed axial wavenumber, |beta| < n2 k.
    pub beta: f64,
    /// Azimuthal order.
    pub m: i32,
    /// Polarization index.
    pub l: Sign,
    /// Interior transverse wavenumber sqrt(k^2 n1^2 - beta^2).
    pub h: f64,
    /// Exterior transverse wavenumber sqrt(k^2 n2^2 - beta^2).
    pub q: f64,
    /// Polarization mixing ratio (B = i l eta A).
    pub eta: f64,
    /// Interior amplitude A (real).
    pub a_coeff: f64,
    pub fiber: FiberSpec,
    /// Exterior C-part in the J/Y basis: C1 H1 + C2 H2 = c_j J + c_y Y.
    c_j: f64,
    c_y: f64,
    /// Exterior D-part: D1 H1 + D2 H2 = i (p_d J + q_d Y).
    p_d: f64,
    q_d: f64,
}

/// Scalar Bessel data at one (signed) order: values and derivatives at ha
/// and qa, with reflection signs for negative order already applied.
pub(crate) struct MatchData {
    pub j_ha: f64,
    pub jp_ha: f64,
    pub j_qa: f64,
    pub jp_qa: f64,
    pub y_qa: f64,
    pub yp_qa: f64,
}

/// Assemble a normalized mode from precomputed Bessel data at order m.
pub(crate) fn mode_from_match_data(
    fiber: &FiberSpec,
    omega: f64,
    beta: f64,
    m: i32,
    l: Sign,
    d: &MatchData,
) -> Result<RadiationModeSolution> {
    let k = omega / C;
    let (n1, n2, a) = (fiber.n1, fiber.n2, fiber.radius);
    let h2 = k * k * n1 * n1 - beta * beta;
    let q2 = k * k * n2 * n2 - beta * beta;
    if q2 <= 0.0 {
        return Err(Error::Domain(format!(
            "radiation modes require |beta| < n2 k (beta = {beta:.6e}, n2 k = {:.6e})",
            n2 * k
        )));
    }
    let h = h2.sqrt();
    let q = q2.sqrt();
    if q * a < 1e-8 {
        return Err(Error::EndpointSingularity { qa: q * a });
    }
    let mf = m as f64;
    let lf = l.value();
    let n1sq = n1 * n1;
    let n2sq = n2 * n2;

    let pref_v = mf * k * beta / (a * h * h * q * q) * (n2sq - n1sq);
    let v_j = pref_v * d.j_ha * d.j_qa;
    let v_y = pref_v * d.j_ha * d.y_qa;
    let m_j = d.jp_ha * d.j_qa / h - d.j_ha * d.jp_qa / q;
    let m_y = d.jp_ha * d.y_qa / h - d.j_ha * d.yp_qa / q;
    let l_j = n1sq * d.jp_ha * d.j_qa / h - n2sq * d.j_ha * d.jp_qa / q;
    let l_y = n1sq * d.jp_ha * d.y_qa / h - n2sq * d.j_ha * d.yp_qa / q;

    let v2 = v_j * v_j + v_y * v_y;
    let eta = EPS0
        * C
        * ((n2sq * v2 + l_j * l_j + l_y * l_y) / (v2 + n2sq * (m_j * m_j + m_y * m_y))).sqrt();

    // A = 1 to start; every coefficient scales linearly with A.
    let w_r = l_j - lf * MU0 * C * eta * v_j;
    let w_i = l_y - lf * MU0 * C * eta * v_y;
    let u_r = EPS0 * C * v_j - lf * eta * m_j;
    let u_i = EPS0 * C * v_y - lf * eta * m_y;
    let hc = std::f64::consts::PI * q * q * a / 2.0;
    let mut c_j = -hc / n2sq * w_i;
    let mut c_y = hc / n2sq * w_r;
    let mut p_d = hc * u_i;
    let mut q_d = -hc * u_r;
    let mut a_coeff = 1.0_f64;

    // Normalize to N_nu = 1, with a magnitude prescale so the squares stay
    // in range even for deeply evanescent orders.
    let z0 = (MU0 / EPS0).sqrt();
    let mag = (n2 * c_j.abs())
        .max(n2 * c_y.abs())
        .max(z0 * p_d.abs())
        .max(z0 * q_d.abs());
    if !(mag > 0.0 && mag.is_finite()) {
        return Err(Error::Domain(format!(
            "degenerate radiation-mode coefficients at beta = {beta:.6e}, m = {m}"
        )));
    }
    let s1 = 1.0 / mag;
    c_j *= s1;
    c_y *= s1;
    p_d *= s1;
    q_d *= s1;
    a_coeff *= s1;
    let nbar = 2.0 * std::f64::consts::PI * omega / (q * q)
        * (n2sq * (c_j * c_j + c_y * c_y) + z0 * z0 * (p_d * p_d + q_d * q_d));
    let s2 = 1.0 / nbar.sqrt();
    Ok(RadiationModeSolution {
        omega,
        k,
        beta,
        m,
        l,
        h,
        q,
        eta,
        a_coeff: a_coeff * s2,
        fiber: *fiber,
        c_j: c_j * s2,
        c_y: c_y * s2,
        p_d: p_d * s2,
        q_d: q_d * s2,
    })
}

/// Build one normalized radiation mode (omega, beta, m, l).
pub fn build_radiation_mode(
    fiber: &FiberSpec,
    omega: f64,
    beta: f64,
    m: i32,
    l: Sign,
) -> Result<RadiationModeSolution> {
    let k = omega / C;
    let q2 = k * k * fiber.n2 * fiber.n2 - beta * beta;
    if q2 <= 0.0 {
        return Err(Error::Domain(format!(
            "radiation modes require |beta| < n2 k (beta = {beta:.6e}, n2 k = {:.6e})",
            fiber.n2 * k
        )));
    }
    let h = (k * k * fiber.n1 * fiber.n1 - beta * beta).sqrt();
    let q = q2.sqrt();
    let (ha, qa) = (h * fiber.radius, q * fiber.radius);
    if qa < 1e-8 {
        return Err(Error::EndpointSingularity { qa });
    }
    let d = MatchData {
        j_ha: bessel_j(m, ha)?,
        jp_ha: bessel_j_prime(m, ha)?,
        j_qa: bessel_j(m, qa)?,
        jp_qa: bessel_j_prime(m, qa)?,
        y_qa: bessel_y(m, qa)?,
        yp_qa: bessel_y_prime(m, qa)?,
    };
    mode_from_match_data(fiber, omega, beta, m, l, &d)
}

impl RadiationModeSolution {
    /// Coefficient B = i l eta A of the interior magnetic-type term.
    pub fn b_coeff(&self) -> Complex64 {
        Complex64::new(0.0, self.l.value() * self.eta * self.a_coeff)
    }

    /// Exterior coefficient C_j (j = 1 or 2) of H^(j)_m.
    pub fn c_coeff(&self, j: usize) -> Complex64 {
        match j {
            1 => Complex64::new(0.5 * self.c_j, -0.5 * self.c_y),
            2 => Complex64::new(0.5 * self.c_j, 0.5 * self.c_y),
            _ => panic!("j must be 1 or 2"),
        }
    }

    /// Exterior coefficient D_j (j = 1 or 2) of H^(j)_m.
    pub fn d_coeff(&self, j: usize) -> Complex64 {
        // D1 + D2 = i p_d ; D1 - D2 = q_d
        match j {
            1 => Complex64::new(0.5 * self.q_d, 0.5 * self.p_d),
            2 => Complex64::new(-0.5 * self.q_d, 0.5 * self.p_d),
            _ => panic!("j must be 1 or 2"),
        }
    }

    /// Re-evaluate the orthogonality constant from its closed form using the
    /// j-th exterior coefficient pair. Equals 1 after normalization.
    pub fn norm_b7(&self, j: usize) -> f64 {
        let c = self.c_coeff(j);
        let d = self.d_coeff(j);
        8.0 * std::f64::consts::PI * self.omega / (self.q * self.q)
            * (self.fiber.n2 * self.fiber.n2 * c.norm_sqr() + MU0 / EPS0 * d.norm_sqr())
    }

    /// Exterior field components from precomputed J_m, J'_m, Y_m, Y'_m at qr.
    pub(crate) fn exterior_components(
        &self,
        r: f64,
        jv: f64,
        jpv: f64,
        yv: f64,
        ypv: f64,
    ) -> [Complex64; 3] {
        let mf = self.m as f64;
        let q2 = self.q * self.q;
        let cpart = self.c_j * jv + self.c_y * yv;
        let cpart_p = self.c_j * jpv + self.c_y * ypv;
        let dpart = self.p_d * jv + self.q_d * yv;
        let dpart_p = self.p_d * jpv + self.q_d * ypv;
        let er = (self.beta * self.q * cpart_p - mf * self.omega * MU0 / r * dpart) / q2;
        let ephi = -((mf * self.beta / r) * cpart - self.q * self.omega * MU0 * dpart_p) / q2;
        [
            Complex64::new(0.0, er),
            Complex64::new(ephi, 0.0),
            Complex64::new(cpart, 0.0),
        ]
    }

    fn interior_components(&self, r: f64) -> Result<[Complex64; 3]> {
        let mf = self.m as f64;
        let lf = self.l.value();
        let h2 = self.h * self.h;
        let (jv, jpv, j_over_r);
        if r == 0.0 {
            jv = if self.m == 0 { 1.0 } else { 0.0 };
            jpv = match self.m {
                1 => 0.5,
                -1 => -0.5,
                _ => 0.0,
            };
            j_over_r = match self.m {
                1 => 0.5 * self.h,
                -1 => -0.5 * self.h,
                _ => 0.0,
            };
        } else {
            jv = bessel_j(self.m, self.h * r)?;
            jpv = bessel_j_prime(self.m, self.h * r)?;
            j_over_r = jv / r;
        }
        let a = self.a_coeff;
        let er = (self.beta * self.h * a * jpv
            - mf * lf * self.eta * a * self.omega * MU0 * j_over_r)
            / h2;
        let ephi = -(mf * self.beta * a * j_over_r
            - self.h * self.omega * MU0 * lf * self.eta * a * jpv)
            / h2;
        Ok([
            Complex64::new(0.0, er),
            Complex64::new(ephi, 0.0),
            Complex64::new(a * jv, 0.0),
        ])
    }

    /// Interior formulas evaluated at r (continuity checks at r = a).
    pub fn eval_interior_formula(&self, r: f64) -> Result<[Complex64; 3]> {
        self.interior_components(r)
    }

    /// Exterior formulas evaluated at r > 0.
    pub fn eval_exterior_formula(&self, r: f64) -> Result<[Complex64; 3]> {
        let x = self.q * r;
        let jv = bessel_j(self.m, x)?;
        let jpv = bessel_j_prime(self.m, x)?;
        let yv = bessel_y(self.m, x)?;
        let ypv = bessel_y_prime(self.m, x)?;
        Ok(self.exterior_components(r, jv, jpv, yv, ypv))
    }
}

/// Cylindrical components (e_r, e_phi, e_z) of the radiation-mode profile at
/// (r, phi). Values are independent of phi (the basis vectors are not).
pub fn eval_rad_profile(mode: &RadiationModeSolution, r: f64, _phi: f64) -> Result<[Complex64; 3]> {
    if r < 0.0 {
        return Err(Error::Domain(format!("radius must be >= 0, got {r}")));
    }
    if r < mode.fiber.radius {
        mode.interior_components(r)
    } else {
        mode.eval_exterior_formula(r)
    }
}

/// Independent reconstruction of the exterior coefficients straight from the
/// printed matching formulas with complex Hankel functions. Cancellation-
/// prone near the endpoints; retained as a cross-check.
pub fn coefficients_from_hankel_form(
    fiber: &FiberSpec,
    omega: f64,
    beta: f64,
    m: i32,
    l: Sign,
    a_coeff: f64,
    eta: f64,
) -> Result<([Complex64; 2], [Complex64; 2])> {
    let k = omega / C;
    let (n1, n2, a) = (fiber.n1, fiber.n2, fiber.radius);
    let h = (k * k * n1 * n1 - beta * beta).sqrt();
    let q = (k * k * n2 * n2 - beta * beta).sqrt();
    let (ha, qa) = (h * a, q * a);
    let j_ha = bessel_j(m, ha)?;
    let jp_ha = bessel_j_prime(m, ha)?;
    let b = Complex64::new(0.0, l.value() * eta * a_coeff);
    let mut c = [Complex64::default(); 2];
    let mut d = [Complex64::default(); 2];
    for (idx, jj) in [1i32, 2].iter().enumerate() {
        let (hk, hkp) = if *jj == 1 {
            (hankel1(m, qa)?, hankel1_prime(m, qa)?)
        } else {
            (hankel2(m, qa)?, hankel2_prime(m, qa)?)
        };
        // H^(j)* of a real argument
        let hks = hk.conj();
        let hkps = hkp.conj();
        let mf = m as f64;
        let v = mf * k * beta / (a * h * h * q * q) * (n2 * n2 - n1 * n1) * j_ha * hks;
        let mm = jp_ha * hks / h - j_ha * hkps / q;
        let ll = n1 * n1 * jp_ha * hks / h - n2 * n2 * j_ha * hkps / q;
        let sign_c = if *jj == 1 { -1.0 } else { 1.0 };
        let sign_d = if *jj == 1 { 1.0 } else { -1.0 };
        let kc = Complex64::new(0.0, std::f64::consts::PI * q * q * a / (4.0 * n2 * n2));
        let kd = Complex64::new(0.0, std::f64::consts::PI * q * q * a / 4.0);
        c[idx] = sign_c * kc * (a_coeff * ll + Complex64::i() * MU0 * C * b * v);
        d[idx] = sign_d * kd * (Complex64::i() * EPS0 * C * a_coeff * v - b * mm);
    }
    Ok((c, d))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline_fiber() -> FiberSpec {
        FiberSpec::new(250e-9, 1.45, 1.0).unwrap()
    }

    fn baseline_omega() -> f64 {
        2.0 * std::f64::consts::PI * C / 852e-9
    }

    #[test]
    fn rejects_beta_outside_light_cone() {
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        assert!(build_radiation_mode(&fiber, omega, 1.2 * k, 0, Sign::Plus).is_err());
    }

    #[test]
    fn rejects_endpoint_singularity() {
        // long wavelength so that q a < 1e-8 is reachable with q^2 > 0
        let fiber = baseline_fiber();
        let omega = 1e9;
        let k = omega / C;
        let beta = k * (1.0 - 1e-8);
        match build_radiation_mode(&fiber, omega, beta, 1, Sign::Plus) {
            Err(Error::EndpointSingularity { .. }) => {}
            other => panic!("expected EndpointSingularity, got {other:?}"),
        }
    }

    #[test]
    fn normalization_is_one_both_j() {
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        for (i, &(bfrac, m)) in [(0.3, 0), (0.7, 1), (-0.5, 2), (0.9, -3), (-0.05, 5)]
            .iter()
            .enumerate()
        {
            for l in Sign::BOTH {
                let mode = build_radiation_mode(&fiber, omega, bfrac * k, m, l).unwrap();
                let n1 = mode.norm_b7(1);
                let n2 = mode.norm_b7(2);
                assert!((n1 - 1.0).abs() < 1e-10, "case {i}: N(j=1) = {n1}");
                assert!((n1 - n2).abs() < 1e-10, "case {i}: j mismatch");
            }
        }
    }

    #[test]
    fn b_coefficient_convention() {
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        let mode = build_radiation_mode(&fiber, omega, 0.4 * k, 1, Sign::Plus).unwrap();
        assert!((mode.b_coeff() - Complex64::i() * mode.eta * mode.a_coeff).norm() < 1e-15);
        let modem = build_radiation_mode(&fiber, omega, 0.4 * k, 1, Sign::Minus).unwrap();
        assert!((modem.b_coeff() + Complex64::i() * modem.eta * modem.a_coeff).norm() < 1e-15);
    }

    #[test]
    fn regrouped_coefficients_match_hankel_form() {
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        for &(bfrac, m, l) in &[
            (0.25, 0, Sign::Plus),
            (0.6, 1, Sign::Minus),
            (-0.45, 2, Sign::Plus),
            (0.8, -2, Sign::Minus),
        ] {
            let mode = build_radiation_mode(&fiber, omega, bfrac * k, m, l).unwrap();
            let (c, d) = coefficients_from_hankel_form(
                &fiber,
                omega,
                mode.beta,
                m,
                l,
                mode.a_coeff,
                mode.eta,
            )
            .unwrap();
            for j in [1usize, 2] {
                let rel_c = (mode.c_coeff(j) - c[j - 1]).norm() / c[j - 1].norm();
                let rel_d = (mode.d_coeff(j) - d[j - 1]).norm() / d[j - 1].norm();
                assert!(rel_c < 1e-10, "C_{j} mismatch: {rel_c:.2e}");
                assert!(rel_d < 1e-10, "D_{j} mismatch: {rel_d:.2e}");
            }
            assert!((c[0].norm() - c[1].norm()).abs() < 1e-12 * c[0].norm());
            assert!((d[0].norm() - d[1].norm()).abs() < 1e-12 * d[0].norm().max(1e-300));
        }
    }

    #[test]
    fn tangential_continuity_100_random() {
        use rand::Rng;
        use rand_chacha::rand_core::SeedableRng;
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        let a = fiber.radius;
        for _ in 0..100 {
            let bfrac: f64 = rng.gen_range(-0.98..0.98);
            let m: i32 = rng.gen_range(-8..=8);
            let l = if rng.gen_bool(0.5) {
                Sign::Plus
            } else {
                Sign::Minus
            };
            let mode = build_radiation_mode(&fiber, omega, bfrac * k, m, l).unwrap();
            let ein = mode.eval_interior_formula(a).unwrap();
            let eout = mode.eval_exterior_formula(a).unwrap();
            for comp in [1usize, 2] {
                let scale = eout[comp].norm().max(ein[comp].norm()).max(1e-30);
                let rel = (ein[comp] - eout[comp]).norm() / scale;
                assert!(
                    rel < 1e-8,
                    "beta/k={bfrac} m={m} comp {comp}: rel {rel:.2e}"
                );
            }
        }
    }

    #[test]
    fn symmetry_beta_l_flip() {
        // e_r and e_phi flip sign, e_z unchanged under (beta, l) -> (-beta, -l).
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        for &(bfrac, m) in &[(0.4, 0), (0.6, 1), (0.2, -2), (0.75, 3)] {
            let e1 = build_radiation_mode(&fiber, omega, bfrac * k, m, Sign::Plus).unwrap();
            let e2 = build_radiation_mode(&fiber, omega, -bfrac * k, m, Sign::Minus).unwrap();
            for &r in &[100e-9, 250e-9, 600e-9, 2000e-9] {
                let a1 = eval_rad_profile(&e1, r, 0.0).unwrap();
                let a2 = eval_rad_profile(&e2, r, 0.0).unwrap();
                let s = a1[0].norm().max(a1[1].norm()).max(a1[2].norm());
                assert!((a1[0] + a2[0]).norm() < 1e-10 * s);
                assert!((a1[1] + a2[1]).norm() < 1e-10 * s);
                assert!((a1[2] - a2[2]).norm() < 1e-10 * s);
            }
        }
    }

    #[test]
    fn symmetry_m_l_flip() {
        // (m, l) -> (-m, -l) carries (-1)^m for e_r, e_z and (-1)^(m+1) for e_phi.
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        for &(bfrac, m) in &[(0.35, 1), (0.5, 2), (0.8, 3), (0.15, 4)] {
            let e1 = build_radiation_mode(&fiber, omega, bfrac * k, m, Sign::Plus).unwrap();
            let e2 = build_radiation_mode(&fiber, omega, bfrac * k, -m, Sign::Minus).unwrap();
            let sgn = if m % 2 == 0 { 1.0 } else { -1.0 };
            for &r in &[150e-9, 250e-9, 900e-9] {
                let a1 = eval_rad_profile(&e1, r, 0.0).unwrap();
                let a2 = eval_rad_profile(&e2, r, 0.0).unwrap();
                let s = a1[0].norm().max(a1[1].norm()).max(a1[2].norm());
                assert!((a1[0] - sgn * a2[0]).norm() < 1e-10 * s);
                assert!((a1[1] + sgn * a2[1]).norm() < 1e-10 * s);
                assert!((a1[2] - sgn * a2[2]).norm() < 1e-10 * s);
            }
        }
    }

    #[test]
    fn conjugation_structure() {
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        let mode = build_radiation_mode(&fiber, omega, 0.55 * k, 2, Sign::Minus).unwrap();
        for &r in &[0.0, 120e-9, 250e-9, 1500e-9] {
            let e = eval_rad_profile(&mode, r, 1.0).unwrap();
            assert_eq!(e[0].re, 0.0);
            assert_eq!(e[1].im, 0.0);
            assert_eq!(e[2].im, 0.0);
        }
    }

    #[test]
    fn far_field_bounded() {
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        let a = fiber.radius;
        for &(bfrac, m) in &[(0.3, 0), (0.7, 1), (0.5, 3)] {
            let mode = build_radiation_mode(&fiber, omega, bfrac * k, m, Sign::Plus).unwrap();
            let mag = |r: f64| {
                let e = eval_rad_profile(&mode, r, 0.0).unwrap();
                (e[0].norm_sqr() + e[1].norm_sqr() + e[2].norm_sqr()).sqrt()
            };
            assert!(mag(100.0 * a) < 3.0 * mag(10.0 * a));
        }
    }

    #[test]
    fn polarizations_linearly_independent() {
        let fiber = baseline_fiber();
        let omega = baseline_omega();
        let k = omega / C;
        for &(bfrac, m) in &[(0.4, 0), (0.6, 1), (0.3, 2)] {
            let p = build_radiation_mode(&fiber, omega, bfrac * k, m, Sign::Plus).unwrap();
            let q = build_radiation_mode(&fiber, omega, bfrac * k, m, Sign::Minus).unwrap();
            let vp = [p.c_j, p.c_y, p.p_d, p.q_d];
            let vq = [q.c_j, q.c_y, q.p_d, q.q_d];
            let np = vp.iter().map(|x| x * x).sum::<f64>().sqrt();
            let nq = vq.iter().map(|x| x * x).sum::<f64>().sqrt();
            let mut cross: f64 = 0.0;
            for i in 0..4 {
                for j in (i + 1)..4 {
                    cross = cross.max((vp[i] * vq[j] - vp[j] * vq[i]).abs());
                }
            }
            assert!(cross > 1e-6 * np * nq, "l = +/- proportional at m = {m}");
        }
    }
}
