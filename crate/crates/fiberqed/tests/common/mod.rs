//! Independent oracles shared by the integration suites. These evaluate
//! reference values through routes disjoint from the library internals:
//! integral representations for the special functions, a dense-scan
//! bisection for the eigenvalue, and plain Simpson re-quadrature for the
//! mode normalization.

#![allow(dead_code)]

use fiberqed::guided::{eigenvalue_residual, FiberSpec, GuidedModeSolution};

/// J_m(x) from its cosine integral representation (trapezoid rule, which
/// converges spectrally for this periodic-analytic integrand).
pub fn bessel_j_oracle(m: i32, x: f64) -> f64 {
    let n = 800;
    let mut acc = 0.0;
    for i in 0..n {
        let theta = std::f64::consts::PI * (i as f64 + 0.5) / n as f64;
        acc += (m as f64 * theta - x * theta.sin()).cos();
    }
    acc / n as f64
}

/// K_m(x) from its exponential integral representation, composite Simpson.
pub fn bessel_k_oracle(m: i32, x: f64) -> f64 {
    // e^{-x cosh t} cosh(m t): truncate where the exponent is ~ -750
    let mf = m.unsigned_abs() as f64;
    let mut t_max = 2.0_f64;
    while x * t_max.cosh() - mf * t_max < 750.0 && t_max < 700.0 {
        t_max += 0.5;
    }
    let n = 20_000; // even
    let h = t_max / n as f64;
    let f = |t: f64| (-x * t.cosh()).exp() * (mf * t).cosh();
    let mut acc = f(0.0) + f(t_max);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(i as f64 * h);
    }
    acc * h / 3.0
}

/// Dense-scan bisection oracle for the HE11 propagation constant: 1e5
/// sign-change scan over the guided interval followed by bisection to
/// machine resolution.
pub fn dense_scan_beta_oracle(fiber: &FiberSpec, omega: f64) -> Option<f64> {
    let k = omega / fiberqed::constants::C;
    let lo = fiber.n2 * k * (1.0 + 1e-9);
    let hi = fiber.n1 * k * (1.0 - 1e-9);
    let n = 100_000;
    let f = |b: f64| eigenvalue_residual(fiber, omega, b).unwrap();
    let mut prev_b = lo;
    let mut prev_f = f(lo);
    let mut bracket = None;
    for i in 1..=n {
        let b = lo + (hi - lo) * i as f64 / n as f64;
        let fb = f(b);
        if prev_f.signum() != fb.signum() {
            bracket = Some((prev_b, b));
            break;
        }
        prev_b = b;
        prev_f = fb;
    }
    let (mut blo, mut bhi) = bracket?;
    let mut flo = f(blo);
    for _ in 0..200 {
        let mid = 0.5 * (blo + bhi);
        if mid <= blo || mid >= bhi {
            break;
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Some(mid);
        }
        if flo.signum() == fm.signum() {
            blo = mid;
            flo = fm;
        } else {
            bhi = mid;
        }
    }
    Some(0.5 * (blo + bhi))
}

/// Independent re-quadrature of the normalization integral with plain
/// Simpson sums (dense uniform grid inside, dense geometric grid outside).
pub fn normalization_requadrature(mode: &GuidedModeSolution) -> f64 {
    let a = mode.fiber.radius;
    let n1 = mode.fiber.n1;
    let n2 = mode.fiber.n2;
    // e_r jumps across r = a, so each region must use its own formula
    // (the surface point belongs to both integrals' closures).
    let density_in = |r: f64| {
        let e = mode.profile_interior_formula(r).unwrap();
        (e[0].norm_sqr() + e[1].norm_sqr() + e[2].norm_sqr()) * r
    };
    let density_out = |r: f64| {
        let e = mode.profile_exterior_formula(r).unwrap();
        (e[0].norm_sqr() + e[1].norm_sqr() + e[2].norm_sqr()) * r
    };
    let simpson = |f: &dyn Fn(f64) -> f64, lo: f64, hi: f64, n: usize| {
        let h = (hi - lo) / n as f64;
        let mut acc = f(lo) + f(hi);
        for i in 1..n {
            let w = if i % 2 == 1 { 4.0 } else { 2.0 };
            acc += w * f(lo + i as f64 * h);
        }
        acc * h / 3.0
    };
    let inner = simpson(&density_in, 0.0, a, 4000);
    // outer region in geometric segments out to the far tail
    let r_cut = a + 14.0 / mode.q;
    let segments = 40;
    let ratio = (r_cut / a).powf(1.0 / segments as f64);
    let mut outer = 0.0;
    let mut lo = a;
    for _ in 0..segments {
        let hi = (lo * ratio).min(r_cut);
        outer += simpson(&density_out, lo, hi, 400);
        lo = hi;
    }
    2.0 * std::f64::consts::PI * (n1 * n1 * inner + n2 * n2 * outer)
}
