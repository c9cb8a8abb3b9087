//! Certified isolation of the complex roots of a square-free integer
//! polynomial.
//!
//! Approximations come from Aberth–Ehrlich iteration in `f64`. They are
//! certified with Weierstrass corrections `W_i = p(z_i) / (a_n ∏_{j≠i}(z_i − z_j))`:
//! the roots of `p` are the eigenvalues of `diag(z) − W·1ᵀ`, so by
//! Gerschgorin every connected component of `⋃ D(z_i, n|W_i|)` made of `m`
//! disks holds exactly `m` roots. Evaluation error is bounded with a
//! running Horner error estimate, so the radii are rigorous upper bounds.

use alloc::vec::Vec;

use num_complex::Complex64;

use crate::poly::IntPoly;
use crate::{Error, Result};

const U: f64 = f64::EPSILON * 0.5;

/// A disk known to contain exactly one root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootDisk {
    pub center: Complex64,
    pub radius: f64,
}

impl RootDisk {
    pub fn disjoint(&self, other: &RootDisk) -> bool {
        (self.center - other.center).norm() * (1.0 - 8.0 * U) > self.radius + other.radius
    }
}

fn horner(a: &[f64], z: Complex64) -> (Complex64, Complex64, f64) {
    // value, derivative, Σ|a_k||z|^k
    let mut p = Complex64::new(0.0, 0.0);
    let mut dp = Complex64::new(0.0, 0.0);
    let mut s = 0.0;
    let az = z.norm();
    for &c in a.iter().rev() {
        dp = dp * z + p;
        p = p * z + c;
        s = s * az + c.abs();
    }
    (p, dp, s)
}

fn aberth(a: &[f64], max_iter: usize) -> Vec<Complex64> {
    let n = a.len() - 1;
    let lead = a[n].abs();
    // geometric-mean radius of the roots, nudged off symmetric positions
    let r0 = libm::pow((a[0].abs() / lead).max(1e-300), 1.0 / n as f64).clamp(1e-3, 1e6);
    let mut z: Vec<Complex64> = (0..n)
        .map(|k| {
            let th = 2.0 * core::f64::consts::PI * (k as f64) / (n as f64) + 0.4;
            Complex64::from_polar(r0 * (1.0 + 0.01 * k as f64), th)
        })
        .collect();
    for _ in 0..max_iter {
        let mut moved = 0.0f64;
        for i in 0..n {
            let (p, dp, _) = horner(a, z[i]);
            if p.norm() == 0.0 {
                continue;
            }
            let ratio = p / dp;
            let mut sum = Complex64::new(0.0, 0.0);
            for j in 0..n {
                if j != i {
                    sum += (z[i] - z[j]).inv();
                }
            }
            let w = ratio / (Complex64::new(1.0, 0.0) - ratio * sum);
            if w.re.is_finite() && w.im.is_finite() {
                z[i] -= w;
                moved = moved.max(w.norm() / z[i].norm().max(1e-300));
            }
        }
        if moved < 4.0 * f64::EPSILON {
            break;
        }
    }
    z
}

fn certify(a: &[f64], z: &[Complex64]) -> Vec<RootDisk> {
    let n = z.len();
    let nf = n as f64;
    z.iter()
        .enumerate()
        .map(|(i, &zi)| {
            let (p, _, s) = horner(a, zi);
            let e_p = (4.0 * nf + 6.0) * U * s * 1.1 + f64::MIN_POSITIVE;
            let mut q = Complex64::new(a[n], 0.0);
            for (j, &zj) in z.iter().enumerate() {
                if j != i {
                    q *= zi - zj;
                }
            }
            let q_lo = q.norm() * (1.0 - (8.0 * nf + 8.0) * U);
            let w_hi = if q_lo > 0.0 { (p.norm() + e_p) / q_lo } else { f64::INFINITY };
            RootDisk { center: zi, radius: nf * w_hi * (1.0 + 1e-12) + f64::MIN_POSITIVE }
        })
        .collect()
}

fn relative_radius(d: &RootDisk) -> f64 {
    d.radius / d.center.norm().max(1.0)
}

fn pairwise_disjoint(d: &[RootDisk]) -> bool {
    for i in 0..d.len() {
        for j in i + 1..d.len() {
            if !d[i].disjoint(&d[j]) {
                return false;
            }
        }
    }
    true
}

/// Make the disk list symmetric under conjugation: disks meeting the real
/// axis are re-centred on it, lower-half disks are replaced by conjugates
/// of upper-half ones. Fails if the counts do not pair up.
fn symmetrize(disks: Vec<RootDisk>) -> Option<Vec<RootDisk>> {
    let mut real = Vec::new();
    let mut upper = Vec::new();
    let mut lower = 0usize;
    for d in disks {
        if d.center.im.abs() <= d.radius {
            real.push(RootDisk {
                center: Complex64::new(d.center.re, 0.0),
                radius: d.radius + d.center.im.abs() * (1.0 + 2.0 * U),
            });
        } else if d.center.im > 0.0 {
            upper.push(d);
        } else {
            lower += 1;
        }
    }
    if lower != upper.len() {
        return None;
    }
    let mut out = real;
    for d in upper {
        out.push(d);
        out.push(RootDisk { center: d.center.conj(), radius: d.radius });
    }
    Some(out)
}

/// Isolate all roots of a square-free integer polynomial.
///
/// Every returned disk contains exactly one root and has radius at most
/// `max_radius · max(1, |center|)`; otherwise `PrecisionExhausted` is
/// returned. The budget is relative for large roots because a double
/// precision certificate cannot beat `|z|·2⁻⁵²`.
pub fn isolate(p: &IntPoly, max_radius: f64) -> Result<Vec<RootDisk>> {
    let n = p.degree();
    if n == 0 {
        return Ok(Vec::new());
    }
    let a = p.to_f64();
    if a.iter().any(|c| !c.is_finite()) {
        return Err(Error::Overflow("polynomial coefficients exceed f64 range".into()));
    }
    let mut reached = f64::INFINITY;
    for &iters in &[200usize, 2000] {
        let z = aberth(&a, iters);
        if z.iter().any(|c| !c.re.is_finite() || !c.im.is_finite()) {
            continue;
        }
        // a few Newton steps from the converged simultaneous iterate
        let z: Vec<Complex64> = z
            .into_iter()
            .map(|mut zi| {
                for _ in 0..3 {
                    let (pv, dp, _) = horner(&a, zi);
                    if dp.norm() > 0.0 && pv.norm() > 0.0 {
                        let step = pv / dp;
                        if step.re.is_finite() && step.im.is_finite() {
                            zi -= step;
                        }
                    }
                }
                zi
            })
            .collect();
        let disks = certify(&a, &z);
        let Some(disks) = symmetrize(disks) else { continue };
        let worst = disks.iter().map(relative_radius).fold(0.0, f64::max);
        reached = reached.min(worst);
        if pairwise_disjoint(&disks) && worst <= max_radius {
            return Ok(disks);
        }
    }
    Err(Error::PrecisionExhausted { requested: max_radius, reached })
}

/// Ensure that a collection of disks (from several coprime factors) is
/// pairwise disjoint, so each still contains exactly one root of the product.
pub fn check_disjoint(disks: &[RootDisk], max_radius: f64) -> Result<()> {
    if pairwise_disjoint(disks) {
        Ok(())
    } else {
        let worst = disks.iter().map(relative_radius).fold(0.0, f64::max);
        Err(Error::PrecisionExhausted { requested: max_radius, reached: worst.max(max_radius * 2.0) })
    }
}
