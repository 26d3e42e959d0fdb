//! Dense eigenvalues of small real matrices: Householder reduction to
//! upper Hessenberg form followed by the Francis double-shift QR iteration
//! with exceptional shifts.
//!
//! The exceptional shifts matter here: the moment-system flux matrices
//! have spectra in symmetric ± pairs, a structure on which plain
//! Wilkinson-shift iterations stall.

use crate::error::{Error, Result};

/// Reduces `a` to upper Hessenberg form in place by Householder
/// similarity transforms.
pub fn hessenberg_reduce(a: &mut [Vec<f64>]) {
    let n = a.len();
    for k in 0..n.saturating_sub(2) {
        let mut norm2 = 0.0;
        for row in a.iter().take(n).skip(k + 1) {
            norm2 += row[k] * row[k];
        }
        let norm = norm2.sqrt();
        if norm == 0.0 {
            continue;
        }
        let alpha = if a[k + 1][k] >= 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = (k + 1..n).map(|i| a[i][k]).collect();
        v[0] -= alpha;
        let vnorm2: f64 = v.iter().map(|x| x * x).sum();
        if vnorm2 == 0.0 {
            continue;
        }
        // A <- P A, P = I - 2 v v^T / v^T v acting on rows k+1..n
        for j in k..n {
            let mut dot = 0.0;
            for (i, vi) in v.iter().enumerate() {
                dot += vi * a[k + 1 + i][j];
            }
            let f = 2.0 * dot / vnorm2;
            for (i, vi) in v.iter().enumerate() {
                a[k + 1 + i][j] -= f * vi;
            }
        }
        // A <- A P acting on columns k+1..n
        for i in 0..n {
            let mut dot = 0.0;
            for (jj, vj) in v.iter().enumerate() {
                dot += a[i][k + 1 + jj] * vj;
            }
            let f = 2.0 * dot / vnorm2;
            for (jj, vj) in v.iter().enumerate() {
                a[i][k + 1 + jj] -= f * vj;
            }
        }
        a[k + 1][k] = alpha;
        for row in a.iter_mut().take(n).skip(k + 2) {
            row[k] = 0.0;
        }
    }
}

/// Eigenvalues `(re, im)` of an upper Hessenberg matrix, destroying it.
/// Exceptional shifts every ten iterations break the symmetric-spectrum
/// cycles; exceeding the iteration budget is a hard error.
pub fn hessenberg_eigenvalues(h: &mut [Vec<f64>]) -> Result<Vec<(f64, f64)>> {
    let n = h.len();
    let mut out = vec![(0.0f64, 0.0f64); n];
    if n == 0 {
        return Ok(out);
    }
    let eps = f64::EPSILON;
    let mut anorm = 0.0;
    for i in 0..n {
        for j in i.saturating_sub(1)..n {
            anorm += h[i][j].abs();
        }
    }
    let mut t = 0.0;
    let mut nn = n as isize - 1;
    while nn >= 0 {
        let mut its = 0;
        loop {
            let nnu = nn as usize;
            // Look for a negligible subdiagonal element.
            let mut l = 0usize;
            for ll in (1..=nnu).rev() {
                let mut s = h[ll - 1][ll - 1].abs() + h[ll][ll].abs();
                if s == 0.0 {
                    s = anorm;
                }
                if h[ll][ll - 1].abs() <= eps * s {
                    h[ll][ll - 1] = 0.0;
                    l = ll;
                    break;
                }
            }
            let mut x = h[nnu][nnu];
            if l == nnu {
                // One real root.
                out[nnu] = (x + t, 0.0);
                nn -= 1;
                break;
            }
            let y = h[nnu - 1][nnu - 1];
            let mut w = h[nnu][nnu - 1] * h[nnu - 1][nnu];
            if l + 1 == nnu {
                // A 2x2 block: two real roots or a conjugate pair.
                let p = 0.5 * (y - x);
                let q = p * p + w;
                let z = q.abs().sqrt();
                x += t;
                if q >= 0.0 {
                    let zs = p + if p >= 0.0 { z } else { -z };
                    let r1 = x + zs;
                    let r2 = if zs != 0.0 { x - w / zs } else { r1 };
                    out[nnu - 1] = (r1, 0.0);
                    out[nnu] = (r2, 0.0);
                } else {
                    out[nnu - 1] = (x + p, z);
                    out[nnu] = (x + p, -z);
                }
                nn -= 2;
                break;
            }
            if its == 40 {
                return Err(Error::EigenFailed);
            }
            let mut y = y;
            if its % 10 == 0 && its > 0 {
                // Exceptional shift.
                t += x;
                for i in 0..=nnu {
                    h[i][i] -= x;
                }
                let s = h[nnu][nnu - 1].abs() + h[nnu - 1][nnu - 2].abs();
                x = 0.75 * s;
                y = x;
                w = -0.4375 * s * s;
            }
            its += 1;

            // Seek two consecutive small subdiagonals to start the sweep.
            let (m, mut p, mut q, mut r) = {
                let mut mm = nnu - 2;
                loop {
                    let z = h[mm][mm];
                    let rr = x - z;
                    let ss = y - z;
                    let mut pp = (rr * ss - w) / h[mm + 1][mm] + h[mm][mm + 1];
                    let mut qq = h[mm + 1][mm + 1] - z - rr - ss;
                    let mut rq = h[mm + 2][mm + 1];
                    let s = pp.abs() + qq.abs() + rq.abs();
                    pp /= s;
                    qq /= s;
                    rq /= s;
                    if mm == l {
                        break (mm, pp, qq, rq);
                    }
                    let u = h[mm][mm - 1].abs() * (qq.abs() + rq.abs());
                    let v =
                        pp.abs() * (h[mm - 1][mm - 1].abs() + z.abs() + h[mm + 1][mm + 1].abs());
                    if u <= eps * v {
                        break (mm, pp, qq, rq);
                    }
                    mm -= 1;
                }
            };
            for i in m + 2..=nnu {
                h[i][i - 2] = 0.0;
                if i != m + 2 {
                    h[i][i - 3] = 0.0;
                }
            }

            // Double QR sweep over rows l..nn.
            for k in m..nnu {
                if k != m {
                    p = h[k][k - 1];
                    q = h[k + 1][k - 1];
                    r = if k != nnu - 1 { h[k + 2][k - 1] } else { 0.0 };
                    x = p.abs() + q.abs() + r.abs();
                    if x != 0.0 {
                        p /= x;
                        q /= x;
                        r /= x;
                    }
                }
                let smag = (p * p + q * q + r * r).sqrt();
                let s = if p >= 0.0 { smag } else { -smag };
                if s == 0.0 {
                    continue;
                }
                if k == m {
                    if l != m {
                        h[k][k - 1] = -h[k][k - 1];
                    }
                } else {
                    h[k][k - 1] = -s * x;
                }
                p += s;
                x = p / s;
                let yy = q / s;
                let z = r / s;
                q /= p;
                r /= p;
                for j in k..=nnu {
                    let mut pp = h[k][j] + q * h[k + 1][j];
                    if k != nnu - 1 {
                        pp += r * h[k + 2][j];
                        h[k + 2][j] -= pp * z;
                    }
                    h[k + 1][j] -= pp * yy;
                    h[k][j] -= pp * x;
                }
                let mmin = if nnu < k + 3 { nnu } else { k + 3 };
                for i in l..=mmin {
                    let mut pp = x * h[i][k] + yy * h[i][k + 1];
                    if k != nnu - 1 {
                        pp += z * h[i][k + 2];
                        h[i][k + 2] -= pp * r;
                    }
                    h[i][k + 1] -= pp * q;
                    h[i][k] -= pp;
                }
            }
        }
    }
    Ok(out)
}

/// Eigenvalues of a general dense real matrix given as nested rows.
pub fn dense_eigenvalues(mut a: Vec<Vec<f64>>) -> Result<Vec<(f64, f64)>> {
    hessenberg_reduce(&mut a);
    hessenberg_eigenvalues(&mut a)
}
