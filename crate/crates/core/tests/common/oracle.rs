//! Brute-force small-matrix oracle.
//!
//! Everything here is written out with nested `Vec`s and explicit loops so it
//! shares no code path with the library's dense-matrix machinery.

#![allow(dead_code, clippy::needless_range_loop)]

use num_complex::Complex64;

pub type Mat = Vec<Vec<Complex64>>;

fn c(re: f64, im: f64) -> Complex64 {
    Complex64::new(re, im)
}

pub fn zeros(n: usize) -> Mat {
    vec![vec![c(0.0, 0.0); n]; n]
}

pub fn identity(n: usize) -> Mat {
    let mut m = zeros(n);
    for (i, row) in m.iter_mut().enumerate() {
        row[i] = c(1.0, 0.0);
    }
    m
}

/// Single-mode annihilation operator, `a|n> = sqrt(n)|n-1>`.
pub fn lowering(d: usize) -> Mat {
    let mut m = zeros(d);
    for n in 1..d {
        m[n - 1][n] = c((n as f64).sqrt(), 0.0);
    }
    m
}

pub fn matmul(a: &Mat, b: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            let mut acc = c(0.0, 0.0);
            for k in 0..n {
                acc += a[i][k] * b[k][j];
            }
            out[i][j] = acc;
        }
    }
    out
}

pub fn dagger(a: &Mat) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[j][i].conj();
        }
    }
    out
}

pub fn add(a: &Mat, b: &Mat, sb: Complex64) -> Mat {
    let n = a.len();
    let mut out = zeros(n);
    for i in 0..n {
        for j in 0..n {
            out[i][j] = a[i][j] + sb * b[i][j];
        }
    }
    out
}

pub fn scale(a: &Mat, s: Complex64) -> Mat {
    a.iter().map(|row| row.iter().map(|&v| v * s).collect()).collect()
}

/// Kronecker product, first factor is the slow (row-major outer) index.
pub fn kron(a: &Mat, b: &Mat) -> Mat {
    let (na, nb) = (a.len(), b.len());
    let mut out = zeros(na * nb);
    for i1 in 0..na {
        for j1 in 0..na {
            for i2 in 0..nb {
                for j2 in 0..nb {
                    out[i1 * nb + i2][j1 * nb + j2] = a[i1][j1] * b[i2][j2];
                }
            }
        }
    }
    out
}

pub fn power(a: &Mat, k: usize) -> Mat {
    let mut out = identity(a.len());
    for _ in 0..k {
        out = matmul(&out, a);
    }
    out
}

/// `<psi| op |psi>` for an already-normalized pure state.
pub fn expect(psi: &[Complex64], op: &Mat) -> Complex64 {
    let n = psi.len();
    let mut acc = c(0.0, 0.0);
    for i in 0..n {
        for j in 0..n {
            acc += psi[i].conj() * op[i][j] * psi[j];
        }
    }
    acc
}

pub fn normalize(v: &[Complex64]) -> Vec<Complex64> {
    let norm: f64 = v.iter().map(|z| z.norm_sqr()).sum::<f64>().sqrt();
    v.iter().map(|z| z / norm).collect()
}

/// Quadratures and intensity for `C = a^k` on a single mode of dimension `d`,
/// computed as plain truncated matrices.
pub fn quadratures(d: usize, k: usize) -> (Mat, Mat, Mat) {
    let cm = power(&lowering(d), k);
    let cd = dagger(&cm);
    let x = scale(&add(&cm, &cd, c(1.0, 0.0)), c(0.5, 0.0));
    // (C - C^dag) / (2i) = -i/2 (C - C^dag)
    let y = scale(&add(&cm, &cd, c(-1.0, 0.0)), c(0.0, -0.5));
    let n = matmul(&cd, &cm);
    (x, y, n)
}

/// Every correlator entering the inequalities for a two-mode pure state with
/// per-mode dimension `d`.
///
/// The `s` terms are evaluated after embedding the state into a padded space
/// of dimension `d + k` per mode, where the truncated `X^2 + Y^2` coincides
/// with the untruncated operator on the original levels.
pub struct Correlators {
    pub xx: f64,
    pub yy: f64,
    pub xy: f64,
    pub yx: f64,
    pub n1n2: f64,
    pub n1: f64,
    pub n2: f64,
    pub s1s2: f64,
    pub s1: f64,
    pub s2: f64,
    pub c1c2dag: Complex64,
}

pub fn correlators(psi: &[Complex64], d: usize, k: usize) -> Correlators {
    let psi = normalize(psi);
    let id = identity(d);
    let (x, y, n) = quadratures(d, k);
    let re = |op: Mat| expect(&psi, &op).re;
    let cm = power(&lowering(d), k);

    let dp = d + k;
    let mut padded = vec![c(0.0, 0.0); dp * dp];
    for i1 in 0..d {
        for i2 in 0..d {
            padded[i1 * dp + i2] = psi[i1 * d + i2];
        }
    }
    let (xp, yp, _) = quadratures(dp, k);
    let sp = add(&matmul(&xp, &xp), &matmul(&yp, &yp), c(1.0, 0.0));
    let idp = identity(dp);
    let pre = |op: Mat| expect(&padded, &op).re;

    Correlators {
        xx: re(kron(&x, &x)),
        yy: re(kron(&y, &y)),
        xy: re(kron(&x, &y)),
        yx: re(kron(&y, &x)),
        n1n2: re(kron(&n, &n)),
        n1: re(kron(&n, &id)),
        n2: re(kron(&id, &n)),
        s1s2: pre(kron(&sp, &sp)),
        s1: pre(kron(&sp, &idp)),
        s2: pre(kron(&idp, &sp)),
        c1c2dag: expect(&psi, &kron(&cm, &dagger(&cm))),
    }
}

/// Density matrix `|psi><psi|` as a real matrix (valid for real amplitudes).
pub fn real_projector(psi: &[f64]) -> Vec<Vec<f64>> {
    let norm: f64 = psi.iter().map(|v| v * v).sum::<f64>().sqrt();
    let v: Vec<f64> = psi.iter().map(|x| x / norm).collect();
    v.iter().map(|a| v.iter().map(|b| a * b).collect()).collect()
}

/// Partial transpose on the second factor of a `d x d` two-mode real matrix.
pub fn partial_transpose_second(rho: &[Vec<f64>], d: usize) -> Vec<Vec<f64>> {
    let n = d * d;
    let mut out = vec![vec![0.0; n]; n];
    for i1 in 0..d {
        for i2 in 0..d {
            for j1 in 0..d {
                for j2 in 0..d {
                    out[i1 * d + j2][j1 * d + i2] = rho[i1 * d + i2][j1 * d + j2];
                }
            }
        }
    }
    out
}

/// Cyclic Jacobi eigenvalue iteration for a small real symmetric matrix.
pub fn jacobi_eigenvalues(m: &[Vec<f64>]) -> Vec<f64> {
    let n = m.len();
    let mut a: Vec<Vec<f64>> = m.to_vec();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-30 {
            break;
        }
        for p in 0..n {
            for q in (p + 1)..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let akp = a[k][p];
                    let akq = a[k][q];
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let apk = a[p][k];
                    let aqk = a[q][k];
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    let mut eig: Vec<f64> = (0..n).map(|i| a[i][i]).collect();
    eig.sort_by(|x, y| x.partial_cmp(y).unwrap());
    eig
}

/// Untruncated TMSV moments: `<n1>` and `<a1 a2>` summed from the
/// geometric photon-number distribution.
pub fn tmsv_series(r: f64, terms: usize) -> (f64, f64) {
    let lambda = r.tanh();
    let norm = 1.0 - lambda * lambda;
    let mut mean_n = 0.0;
    let mut pair = 0.0;
    for n in 0..terms {
        let p = norm * lambda.powi(2 * n as i32);
        mean_n += n as f64 * p;
        // <n,n| a1 a2 |n+1,n+1> = n + 1, amplitudes c_n c_{n+1}
        let cn = norm.sqrt() * lambda.powi(n as i32);
        let cn1 = norm.sqrt() * lambda.powi(n as i32 + 1);
        pair += cn * cn1 * (n as f64 + 1.0);
    }
    (mean_n, pair)
}

/// Pure-loss channel on a single mode, applied to a diagonal Fock
/// distribution by explicit binomial thinning.
pub fn thin_distribution(p: &[f64], eta: f64) -> Vec<f64> {
    let mut out = vec![0.0; p.len()];
    for (n, &pn) in p.iter().enumerate() {
        for l in 0..=n {
            let mut binom = 1.0;
            for i in 0..l {
                binom *= (n - i) as f64 / (i + 1) as f64;
            }
            out[n - l] += pn * binom * eta.powi((n - l) as i32) * (1.0 - eta).powi(l as i32);
        }
    }
    out
}
