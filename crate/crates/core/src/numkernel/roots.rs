//! Certified complex root isolation.
//!
//! Approximations come from the Aberth–Ehrlich iteration. Certification
//! uses the Weierstrass-correction inclusion: with distinct approximations
//! `z_i` and `W_i = f(z_i) / (lc · Π_{j≠i} (z_i − z_j))`, every root of `f`
//! lies in the union of the disks `D(z_i, n·|W_i|)`, and a connected
//! component made of `k` disks holds exactly `k` roots. Pairwise disjoint
//! disks therefore isolate one simple root each.

use num_bigint::BigInt;
use num_complex::Complex;
use num_traits::{Float, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::numkernel::Poly;

/// Disk in ℂ certified to contain exactly one root.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RootDisk<F> {
    pub center: Complex<F>,
    pub radius: F,
}

impl<F: Float> RootDisk<F> {
    pub fn contains(&self, z: Complex<F>) -> bool {
        (z - self.center).norm() <= self.radius
    }

    /// Bounds on `|z|` over the disk.
    pub fn modulus_range(&self) -> (F, F) {
        let m = self.center.norm();
        ((m - self.radius).max(F::zero()), m + self.radius)
    }
}

fn c<F: Float>(re: F) -> Complex<F> {
    Complex::new(re, F::zero())
}

fn horner<F: Float>(coeffs: &[F], z: Complex<F>) -> (Complex<F>, Complex<F>) {
    let mut p = Complex::zero();
    let mut dp = Complex::zero();
    for &a in coeffs.iter().rev() {
        dp = dp * z + p;
        p = p * z + c(a);
    }
    (p, dp)
}

/// Isolate all roots of a squarefree polynomial given in floating point.
///
/// `coeff_err[i]` bounds the error already present in `coeffs[i]` (for example
/// from conversion of a big integer). Each returned disk has
/// `radius ≤ rel_tol · max(1, |center|)`.
pub fn isolate_roots<F: Float>(coeffs: &[F], coeff_err: &[F], rel_tol: F) -> Result<Vec<RootDisk<F>>> {
    let zs = aberth(coeffs)?;
    certify(coeffs, coeff_err, &zs, rel_tol)
}

fn aberth<F: Float>(coeffs: &[F]) -> Result<Vec<Complex<F>>> {
    let n = coeffs.len().saturating_sub(1);
    if n == 0 || coeffs[n].is_zero() {
        return Err(Error::domain("root isolation needs a nonconstant polynomial"));
    }
    let lead = coeffs[n];

    // Initial guesses on a circle whose radius is the geometric mean of the root moduli.
    let c0 = coeffs.iter().position(|a| !a.is_zero()).unwrap();
    let mut zs: Vec<Complex<F>> = Vec::with_capacity(n);
    for _ in 0..c0 {
        zs.push(Complex::zero());
    }
    let m = n - c0;
    if m > 0 {
        let r0 = (coeffs[c0].abs() / lead.abs()).powf(F::one() / F::from(m).unwrap());
        let r0 = if r0.is_finite() && r0 > F::zero() { r0 } else { F::one() };
        let tau = F::from(std::f64::consts::TAU).unwrap();
        for k in 0..m {
            let theta = tau * F::from(k).unwrap() / F::from(m).unwrap() + F::from(0.4).unwrap();
            zs.push(Complex::from_polar(r0, theta));
        }
    }

    let eps = F::epsilon();
    // Aberth only stalls on clusters; certification below reports those.
    for _ in 0..2000 {
        let mut max_step = F::zero();
        for i in c0..n {
            let (p, dp) = horner(coeffs, zs[i]);
            if p.is_zero() {
                continue;
            }
            let ratio = p / dp;
            let mut s = Complex::zero();
            for j in 0..n {
                if j != i {
                    s = s + (zs[i] - zs[j]).inv();
                }
            }
            let w = ratio / (Complex::new(F::one(), F::zero()) - ratio * s);
            if w.re.is_finite() && w.im.is_finite() {
                zs[i] = zs[i] - w;
                let scale = zs[i].norm().max(F::one());
                max_step = max_step.max(w.norm() / scale);
            }
        }
        if max_step < eps * F::from(4.0).unwrap() {
            break;
        }
    }
    Ok(zs)
}

fn certify<F: Float>(coeffs: &[F], coeff_err: &[F], zs: &[Complex<F>], rel_tol: F) -> Result<Vec<RootDisk<F>>> {
    let n = zs.len();
    let lead = coeffs[n];
    let nf = F::from(n).unwrap();
    let eps = F::epsilon();

    // Rounding bound for Horner: γ_{2n} Σ |a_k| |z|^k plus the coefficient errors.
    let gamma = F::from(2 * n + 2).unwrap() * eps / (F::one() - F::from(2 * n + 2).unwrap() * eps);
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let z = zs[i];
        let (p, _) = horner(coeffs, z);
        let az = z.norm();
        let abs_sum = coeffs
            .iter()
            .rev()
            .fold(F::zero(), |acc, a| acc * az + a.abs());
        let err_sum = coeff_err
            .iter()
            .rev()
            .fold(F::zero(), |acc, a| acc * az + a.abs());
        let pbound = p.norm() + gamma * abs_sum + err_sum;
        let mut denom = lead.abs() - coeff_err.get(n).copied().unwrap_or(F::zero());
        for (j, zj) in zs.iter().enumerate() {
            if j != i {
                denom = denom * (z - *zj).norm();
            }
        }
        let slack = F::one() + F::from(4 * n + 4).unwrap() * eps;
        let radius = nf * pbound / denom * slack;
        if !radius.is_finite() || denom <= F::zero() {
            return Err(Error::Precision {
                context: "root isolation".into(),
                detail: "coincident approximations (repeated root?)".into(),
            });
        }
        out.push(RootDisk { center: z, radius });
    }
    check_disks(out, rel_tol)
}

fn check_disks<F: Float>(mut out: Vec<RootDisk<F>>, rel_tol: F) -> Result<Vec<RootDisk<F>>> {
    let n = out.len();
    for i in 0..n {
        for j in (i + 1)..n {
            if (out[i].center - out[j].center).norm() <= out[i].radius + out[j].radius {
                return Err(Error::Precision {
                    context: "root isolation".into(),
                    detail: format!("disks {i} and {j} overlap"),
                });
            }
        }
        let bound = rel_tol * out[i].center.norm().max(F::one());
        if out[i].radius > bound {
            return Err(Error::Precision {
                context: "root isolation".into(),
                detail: format!("radius of disk {i} not below tolerance"),
            });
        }
    }
    out.sort_by(|a, b| {
        a.center
            .re
            .partial_cmp(&b.center.re)
            .unwrap()
            .then(a.center.im.partial_cmp(&b.center.im).unwrap())
    });
    Ok(out)
}

/// Convert big-integer coefficients to doubles together with conversion errors.
pub fn coeffs_to_f64(f: &Poly<BigInt>) -> (Vec<f64>, Vec<f64>) {
    f.coeffs()
        .iter()
        .map(|a| {
            let v = a.to_f64().unwrap_or(f64::INFINITY);
            (v, v.abs() * f64::EPSILON)
        })
        .unzip()
}

/// Roots of an integer polynomial as certified disks of radius at most
/// `2^-40 · max(1, |center|)`, sorted by real then imaginary part.
///
/// Double precision is tried first. When cancellation in the coefficients
/// defeats it, the approximations are polished by Newton's method in
/// fixed-point big-integer arithmetic and certified from exact residuals.
pub fn poly_roots(f: &Poly<BigInt>) -> Result<Vec<RootDisk<f64>>> {
    if f.is_zero() || f.degree() == 0 {
        return Err(Error::domain("poly_roots needs degree >= 1"));
    }
    let (co, err) = coeffs_to_f64(f);
    if co.iter().any(|x| !x.is_finite()) {
        return Err(Error::Precision {
            context: format!("{f}"),
            detail: "coefficients overflow double precision".into(),
        });
    }
    let tol = 2f64.powi(-40);
    let zs = aberth(&co)?;
    let result = certify(&co, &err, &zs, tol).or_else(|e| match e {
        Error::Precision { .. } => certify_fixed_point(f, &zs, tol),
        other => Err(other),
    });
    result.map_err(|e| match e {
        Error::Precision { detail, .. } => Error::Precision { context: format!("{f}"), detail },
        other => other,
    })
}

/// Complex number `(re + i·im) / 2^bits`.
#[derive(Clone)]
struct Fixed {
    re: BigInt,
    im: BigInt,
}

fn fixed_from(z: Complex<f64>, bits: u32) -> Fixed {
    let conv = |x: f64| {
        let (m, e, sign) = num_traits::float::FloatCore::integer_decode(x);
        let v = BigInt::from(m) * BigInt::from(sign);
        let shift = e as i64 + bits as i64;
        if shift >= 0 {
            v << shift as usize
        } else {
            v >> (-shift) as usize
        }
    };
    Fixed { re: conv(z.re), im: conv(z.im) }
}

impl Fixed {
    fn mul(&self, o: &Fixed, bits: u32) -> Fixed {
        Fixed {
            re: (&self.re * &o.re - &self.im * &o.im) >> bits as usize,
            im: (&self.re * &o.im + &self.im * &o.re) >> bits as usize,
        }
    }

    fn sub(&self, o: &Fixed) -> Fixed {
        Fixed { re: &self.re - &o.re, im: &self.im - &o.im }
    }

    fn div(&self, o: &Fixed, bits: u32) -> Option<Fixed> {
        let d = &o.re * &o.re + &o.im * &o.im;
        if d.is_zero() {
            return None;
        }
        let re = ((&self.re * &o.re + &self.im * &o.im) << bits as usize) / &d;
        let im = ((&self.im * &o.re - &self.re * &o.im) << bits as usize) / &d;
        Some(Fixed { re, im })
    }

    /// `ln |z|` (−∞ at zero).
    fn ln_norm(&self, bits: u32) -> f64 {
        let n2 = &self.re * &self.re + &self.im * &self.im;
        if n2.is_zero() {
            return f64::NEG_INFINITY;
        }
        0.5 * crate::numkernel::arith::ln_abs(&n2) - bits as f64 * std::f64::consts::LN_2
    }

    fn to_complex(&self, bits: u32) -> Complex<f64> {
        let conv = |x: &BigInt| {
            let (b, scale) = if x.bits() > 1000 { (x >> (x.bits() - 900) as usize, x.bits() - 900) } else { (x.clone(), 0) };
            b.to_f64().unwrap() * 2f64.powi(scale as i32 - bits as i32)
        };
        Complex::new(conv(&self.re), conv(&self.im))
    }
}

/// `(f(z), f'(z))` by Horner in fixed point.
fn horner_fixed(f: &Poly<BigInt>, z: &Fixed, bits: u32) -> (Fixed, Fixed) {
    let zero = || Fixed { re: BigInt::zero(), im: BigInt::zero() };
    let mut p = zero();
    let mut dp = zero();
    for a in f.coeffs().iter().rev() {
        dp = dp.mul(z, bits);
        dp.re += &p.re;
        dp.im += &p.im;
        p = p.mul(z, bits);
        p.re += a << bits as usize;
    }
    (p, dp)
}

fn certify_fixed_point(f: &Poly<BigInt>, approx: &[Complex<f64>], rel_tol: f64) -> Result<Vec<RootDisk<f64>>> {
    let n = f.degree();
    let rmax = approx.iter().map(|z| z.norm()).fold(1.0, f64::max);
    let coeff_bits = f.coeffs().iter().map(|c| c.bits()).max().unwrap_or(1);
    let bits = (128.0 + coeff_bits as f64 + n as f64 * rmax.log2()).ceil() as u32;
    let mut zs: Vec<Fixed> = approx.iter().map(|&z| fixed_from(z, bits)).collect();
    // Aberth steps: f/f' in fixed point, the pairwise sum in double precision
    for _ in 0..500 {
        let mut max_step: f64 = 0.0;
        for i in 0..n {
            let (p, dp) = horner_fixed(f, &zs[i], bits);
            if p.re.is_zero() && p.im.is_zero() {
                continue;
            }
            let Some(ratio) = p.div(&dp, bits) else { continue };
            let ratio = ratio.to_complex(bits);
            let mut sum = Complex::zero();
            for j in 0..n {
                if j != i {
                    sum += zs[i].sub(&zs[j]).to_complex(bits).inv();
                }
            }
            let w = ratio / (Complex::new(1.0, 0.0) - ratio * sum);
            if !(w.re.is_finite() && w.im.is_finite()) {
                continue;
            }
            zs[i] = zs[i].sub(&fixed_from(w, bits));
            max_step = max_step.max(w.norm() / zs[i].to_complex(bits).norm().max(1.0));
        }
        if max_step < 2f64.powi(-110) {
            break;
        }
    }
    // Weierstrass radii n·|f(z_i)| / (|lc|·Π|z_i − z_j|), in the log domain
    let ln2 = std::f64::consts::LN_2;
    let ln_lead = crate::numkernel::arith::ln_abs(&f.leading());
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let (p, _) = horner_fixed(f, &zs[i], bits);
        let zn = zs[i].ln_norm(bits).max(0.0);
        // each Horner step truncates by at most 2 units in the last place
        let ln_trunc = (4.0 * (n + 1) as f64).ln() + n as f64 * zn + (coeff_bits as f64 + 2.0) * ln2 - bits as f64 * ln2;
        let lp = p.ln_norm(bits);
        let ln_pbound = if lp > ln_trunc { lp + (1.0 + (ln_trunc - lp).exp()).ln() } else { ln_trunc + 2f64.ln() };
        let mut ln_den = ln_lead;
        for (j, zj) in zs.iter().enumerate() {
            if j != i {
                ln_den += zs[i].sub(zj).ln_norm(bits);
            }
        }
        if !ln_den.is_finite() {
            return Err(Error::Precision {
                context: "root isolation".into(),
                detail: "coincident approximations (repeated root?)".into(),
            });
        }
        let center = zs[i].to_complex(bits);
        // rounding the center to double precision moves it by at most one ulp per component
        let radius = ((n as f64).ln() + ln_pbound - ln_den).exp() * (1.0 + 1e-12) + 2.0 * f64::EPSILON * center.norm();
        out.push(RootDisk { center, radius });
    }
    check_disks(out, rel_tol)
}

/// Cauchy bound `1 + max |c_i / c_deg|` on the moduli of all roots.
pub fn cauchy_bound(f: &Poly<BigInt>) -> f64 {
    let lead = f.leading().to_f64().unwrap().abs();
    1.0 + f.coeffs()[..f.degree()]
        .iter()
        .map(|c| c.to_f64().unwrap().abs() / lead)
        .fold(0.0, f64::max)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ip(v: &[i64]) -> Poly<BigInt> {
        Poly::new(v.iter().map(|&c| BigInt::from(c)).collect())
    }

    #[test]
    fn sqrt_two() {
        let r = poly_roots(&ip(&[-2, 0, 1])).unwrap();
        assert_eq!(r.len(), 2);
        assert!((r[0].center.re + 2f64.sqrt()).abs() < 1e-10);
        assert!((r[1].center.re - 2f64.sqrt()).abs() < 1e-10);
        assert!(r.iter().all(|d| d.radius <= 1e-10));
    }

    #[test]
    fn linear() {
        let r = poly_roots(&ip(&[-1, 1])).unwrap();
        assert!((r[0].center.re - 1.0).abs() < 1e-15);
    }

    #[test]
    fn cube_root_two_moduli() {
        let r = poly_roots(&ip(&[-2, 0, 0, 1])).unwrap();
        let m = 2f64.powf(1.0 / 3.0);
        for d in &r {
            assert!((d.center.norm() - m).abs() < 1e-9);
        }
        let real: Vec<_> = r.iter().filter(|d| d.center.im.abs() < 1e-9).collect();
        assert_eq!(real.len(), 1);
        assert!((real[0].center.re - 1.259921).abs() < 1e-6);
    }

    #[test]
    fn roots_inside_cauchy_bound() {
        let f = ip(&[7, -3, 0, 5, 2, 1]);
        let b = cauchy_bound(&f);
        for d in poly_roots(&f).unwrap() {
            assert!(d.center.norm() + d.radius <= b);
        }
    }

    #[test]
    fn repeated_root_is_a_precision_error() {
        let f = ip(&[1, -2, 1]);
        assert!(matches!(poly_roots(&f), Err(Error::Precision { .. })));
    }

    #[test]
    fn works_in_single_precision() {
        let r = isolate_roots(&[-2.0f32, 0.0, 1.0], &[0.0, 0.0, 0.0], 1e-4).unwrap();
        assert!((r[1].center.re - 2f32.sqrt()).abs() < 1e-5);
    }
}
