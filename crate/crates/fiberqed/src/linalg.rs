//! Minimal complex linear algebra for 4x4 density matrices: Hermitian
//! eigenvalues by cyclic Jacobi, PSD matrix square root, and the usual
//! products. Deterministic, no external backend.

use num_complex::Complex64;

pub type C64 = Complex64;
pub type Mat4 = [[C64; 4]; 4];

pub fn zero4() -> Mat4 {
    [[C64::new(0.0, 0.0); 4]; 4]
}

pub fn matmul4(a: &Mat4, b: &Mat4) -> Mat4 {
    let mut out = zero4();
    for i in 0..4 {
        for k in 0..4 {
            let aik = a[i][k];
            if aik == C64::new(0.0, 0.0) {
                continue;
            }
            for j in 0..4 {
                out[i][j] += aik * b[k][j];
            }
        }
    }
    out
}

pub fn adjoint4(a: &Mat4) -> Mat4 {
    let mut out = zero4();
    for i in 0..4 {
        for j in 0..4 {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn trace4(a: &Mat4) -> C64 {
    a[0][0] + a[1][1] + a[2][2] + a[3][3]
}

/// Largest entrywise deviation from Hermiticity.
pub fn hermiticity_defect(a: &Mat4) -> f64 {
    let mut worst: f64 = 0.0;
    for i in 0..4 {
        for j in 0..4 {
            worst = worst.max((a[i][j] - a[j][i].conj()).norm());
        }
    }
    worst
}

/// Eigenvalues of a complex Hermitian matrix by cyclic Jacobi rotations,
/// ascending order. The input is symmetrized first.
pub fn hermitian_eigenvalues(a: &Mat4) -> [f64; 4] {
    let (vals, _) = jacobi(a, false);
    vals
}

/// Hermitian PSD square root via eigendecomposition (negative eigenvalues
/// from roundoff are clamped to zero).
pub fn sqrtm_psd(a: &Mat4) -> Mat4 {
    let (vals, vecs) = jacobi(a, true);
    let vecs = vecs.expect("vectors requested");
    let mut out = zero4();
    for (k, lam) in vals.iter().enumerate() {
        let s = lam.max(0.0).sqrt();
        for i in 0..4 {
            for j in 0..4 {
                out[i][j] += s * vecs[i][k] * vecs[j][k].conj();
            }
        }
    }
    out
}

fn jacobi(a: &Mat4, want_vectors: bool) -> ([f64; 4], Option<Mat4>) {
    // Work on the Hermitian part.
    let mut m = zero4();
    for i in 0..4 {
        for j in 0..4 {
            m[i][j] = 0.5 * (a[i][j] + a[j][i].conj());
        }
    }
    let mut v = zero4();
    for (i, row) in v.iter_mut().enumerate() {
        row[i] = C64::new(1.0, 0.0);
    }
    for _sweep in 0..60 {
        let mut off: f64 = 0.0;
        for i in 0..4 {
            for j in (i + 1)..4 {
                off = off.max(m[i][j].norm());
            }
        }
        let scale = (0..4).map(|i| m[i][i].re.abs()).fold(0.0_f64, f64::max);
        if off <= 1e-16 * scale.max(1e-300) {
            break;
        }
        for p in 0..4 {
            for q in (p + 1)..4 {
                let apq = m[p][q];
                if apq.norm() == 0.0 {
                    continue;
                }
                let app = m[p][p].re;
                let aqq = m[q][q].re;
                // Unitary 2x2 rotation diagonalizing the (p, q) block:
                // [c, -s*e^{i phi}; s*e^{-i phi}, c] with phi = arg(apq).
                let phi = apq.arg();
                let abs_apq = apq.norm();
                // Zeroing condition for the (p, q) block: tan(2t) = 2|apq|/(app - aqq).
                let t = 0.5 * (2.0 * abs_apq).atan2(app - aqq);
                let c = t.cos();
                let s = t.sin();
                let e_pos = C64::from_polar(1.0, phi);
                // Column transform: M <- R^dagger M R, R[p][p]=c, R[p][q]=-s e^{i phi},
                // R[q][p]= s e^{-i phi}, R[q][q]=c.
                for i in 0..4 {
                    let mip = m[i][p];
                    let miq = m[i][q];
                    m[i][p] = c * mip + s * e_pos.conj() * miq;
                    m[i][q] = -s * e_pos * mip + c * miq;
                }
                for j in 0..4 {
                    let mpj = m[p][j];
                    let mqj = m[q][j];
                    m[p][j] = c * mpj + s * e_pos * mqj;
                    m[q][j] = -s * e_pos.conj() * mpj + c * mqj;
                }
                if want_vectors {
                    for i in 0..4 {
                        let vip = v[i][p];
                        let viq = v[i][q];
                        v[i][p] = c * vip + s * e_pos.conj() * viq;
                        v[i][q] = -s * e_pos * vip + c * viq;
                    }
                }
            }
        }
    }
    let mut vals = [m[0][0].re, m[1][1].re, m[2][2].re, m[3][3].re];
    // sort ascending, permuting vectors alongside
    let mut order = [0usize, 1, 2, 3];
    order.sort_by(|&i, &j| vals[i].partial_cmp(&vals[j]).unwrap());
    let sorted = [
        vals[order[0]],
        vals[order[1]],
        vals[order[2]],
        vals[order[3]],
    ];
    vals = sorted;
    if want_vectors {
        let mut vv = zero4();
        for (newc, &oldc) in order.iter().enumerate() {
            for i in 0..4 {
                vv[i][newc] = v[i][oldc];
            }
        }
        (vals, Some(vv))
    } else {
        (vals, None)
    }
}

/// Minimum eigenvalue of a 2x2 Hermitian matrix (closed form).
pub fn min_eig_2x2(a11: f64, a22: f64, a12: C64) -> f64 {
    let tr = a11 + a22;
    let det = a11 * a22 - a12.norm_sqr();
    let disc = (tr * tr - 4.0 * det).max(0.0).sqrt();
    0.5 * (tr - disc)
}
