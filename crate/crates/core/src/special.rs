//! The Faddeeva function W(ξ) = exp(−ξ²)·erfc(−iξ) over the whole complex
//! plane, and overflow-free products exp(s)·W(η).
//!
//! The upper half-plane uses Gautschi's scheme (power series near the origin,
//! Laplace continued fraction far away, and a Taylor expansion whose
//! derivatives come from the continued fraction in between), with the term
//! counts of ACM Algorithm 680. The lower half-plane goes through the
//! reflection W(ξ) = 2·exp(−ξ²) − W(−ξ).

use num_complex::Complex64;

use crate::error::{Error, Result};

const TWO_OVER_SQRT_PI: f64 = 1.128_379_167_095_512_6;
const INV_SQRT_PI: f64 = 0.564_189_583_547_756_3;

/// Largest x with exp(x) finite.
const MAX_EXP_ARG: f64 = 709.782_712_893_384;

/// Mantissa magnitudes outside this band trigger renormalization.
const MANTISSA_LO: f64 = 1e-2;
const MANTISSA_HI: f64 = 1e2;

/// A complex number stored as `mantissa * exp(log_scale)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ComplexScaled {
    pub mantissa: Complex64,
    pub log_scale: f64,
}

impl ComplexScaled {
    pub const ZERO: Self = Self {
        mantissa: Complex64::new(0.0, 0.0),
        log_scale: 0.0,
    };

    pub fn new(mantissa: Complex64, log_scale: f64) -> Self {
        Self {
            mantissa,
            log_scale,
        }
        .normalized()
    }

    pub fn from_complex(c: Complex64) -> Self {
        Self::new(c, 0.0)
    }

    /// exp(c) without evaluating the real exponential.
    pub fn exp(c: Complex64) -> Self {
        Self {
            mantissa: Complex64::from_polar(1.0, c.im),
            log_scale: c.re,
        }
    }

    /// exp(re + i·im) where both parts carry a low-order correction term.
    fn exp_split(re: f64, re_lo: f64, im: f64, im_lo: f64) -> Self {
        let (s, c) = im.sin_cos();
        let mantissa = Complex64::new(c - im_lo * s, s + im_lo * c) * (1.0 + re_lo);
        Self {
            mantissa,
            log_scale: re,
        }
    }

    pub fn is_zero(&self) -> bool {
        self.mantissa.re == 0.0 && self.mantissa.im == 0.0
    }

    fn normalized(mut self) -> Self {
        let r = self.mantissa.norm();
        if r == 0.0 || !r.is_finite() {
            if r == 0.0 {
                self.log_scale = 0.0;
            }
            return self;
        }
        if !(MANTISSA_LO..=MANTISSA_HI).contains(&r) {
            self.mantissa /= r;
            self.log_scale += r.ln();
        }
        self
    }

    /// The represented value; overflows to infinity or underflows to zero
    /// when out of range.
    pub fn value(&self) -> Complex64 {
        if self.is_zero() {
            return self.mantissa;
        }
        self.mantissa * self.log_scale.exp()
    }

    /// The represented value when it is finite.
    pub fn try_value(&self) -> Option<Complex64> {
        let v = self.value();
        (v.re.is_finite() && v.im.is_finite()).then_some(v)
    }

    /// ln|value|.
    pub fn ln_norm(&self) -> f64 {
        self.log_scale + self.mantissa.norm().ln()
    }

    pub fn mul(self, other: Self) -> Self {
        Self::new(
            self.mantissa * other.mantissa,
            self.log_scale + other.log_scale,
        )
    }

    pub fn mul_complex(self, c: Complex64) -> Self {
        Self::new(self.mantissa * c, self.log_scale)
    }

    /// Multiplies by exp(c).
    pub fn mul_exp(self, c: Complex64) -> Self {
        self.mul(Self::exp(c))
    }

    pub fn add(self, other: Self) -> Self {
        if self.is_zero() {
            return other;
        }
        if other.is_zero() {
            return self;
        }
        let top = self.log_scale.max(other.log_scale);
        let a = self.mantissa * (self.log_scale - top).exp();
        let b = other.mantissa * (other.log_scale - top).exp();
        Self::new(a + b, top)
    }

    pub fn sub(self, other: Self) -> Self {
        self.add(other.neg())
    }

    pub fn neg(self) -> Self {
        Self {
            mantissa: -self.mantissa,
            log_scale: self.log_scale,
        }
    }
}

/// Error-free product: returns (p, e) with a·b = p + e exactly.
#[inline]
fn two_prod(a: f64, b: f64) -> (f64, f64) {
    let p = a * b;
    (p, a.mul_add(b, -p))
}

/// Error-free sum.
#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

/// −z² split into (re, re_lo, im, im_lo) high/low parts.
pub(crate) fn neg_square_parts(z: Complex64) -> (f64, f64, f64, f64) {
    let (xx, xx_lo) = two_prod(z.re, z.re);
    let (yy, yy_lo) = two_prod(z.im, z.im);
    let (re, re_err) = two_sum(yy, -xx);
    let re_lo = re_err + (yy_lo - xx_lo);
    let (xy, xy_lo) = two_prod(z.re, z.im);
    (re, re_lo, -2.0 * xy, -2.0 * xy_lo)
}

/// exp(s − η²) with the η² part formed error-free.
fn exp_shift_neg_square(s: Complex64, eta: Complex64) -> ComplexScaled {
    let (re, re_lo, im, im_lo) = neg_square_parts(eta);
    let (re, re_err) = two_sum(re, s.re);
    let (im, im_err) = two_sum(im, s.im);
    ComplexScaled::exp_split(re, re_lo + re_err, im, im_lo + im_err)
}

/// W(x + iy) for y ≥ 0.
fn w_upper(z: Complex64) -> Complex64 {
    debug_assert!(z.im >= 0.0);
    let xa = z.re.abs();
    let ya = z.im;

    if xa.max(ya) > 1e150 {
        // Leading asymptotic term; the next correction is below f64 resolution.
        let m = xa.max(ya);
        let w = Complex64::new(0.0, INV_SQRT_PI) / Complex64::new(xa / m, ya / m) / m;
        return if z.re < 0.0 { w.conj() } else { w };
    }

    let xs = xa / 6.3;
    let ys = ya / 4.4;
    let qrho = xs * xs + ys * ys;
    let xquad = xa * xa - ya * ya;
    let yquad = 2.0 * xa * ya;

    let (u, v) = if qrho < 0.085_264 {
        // Power series for exp(z²)·∫₀^z exp(t²)dt, summed by Horner's scheme.
        let q = (1.0 - 0.85 * ys) * qrho.sqrt();
        let n = (6.0 + 72.0 * q).round() as usize;
        let mut j = 2 * n + 1;
        let mut xsum = 1.0 / j as f64;
        let mut ysum = 0.0;
        for i in (1..=n).rev() {
            j -= 2;
            let fi = i as f64;
            let xaux = (xsum * xquad - ysum * yquad) / fi;
            ysum = (xsum * yquad + ysum * xquad) / fi;
            xsum = xaux + 1.0 / j as f64;
        }
        let u1 = -TWO_OVER_SQRT_PI * (xsum * ya + ysum * xa) + 1.0;
        let v1 = TWO_OVER_SQRT_PI * (xsum * xa - ysum * ya);
        let daux = (-xquad).exp();
        let u2 = daux * yquad.cos();
        let v2 = -daux * yquad.sin();
        (u1 * u2 - v1 * v2, u1 * v2 + v1 * u2)
    } else {
        let (h, kapn, nu) = if qrho > 1.0 {
            let q = qrho.sqrt();
            (0.0, 0usize, (3.0 + 1442.0 / (26.0 * q + 77.0)) as usize)
        } else {
            let q = (1.0 - ys) * (1.0 - qrho).sqrt();
            (
                1.88 * q,
                (7.0 + 34.0 * q).round() as usize,
                (16.0 + 26.0 * q).round() as usize,
            )
        };
        let taylor = h > 0.0;
        let h2 = 2.0 * h;
        let mut qlambda = if taylor { h2.powi(kapn as i32) } else { 0.0 };
        let (mut rx, mut ry, mut sx, mut sy) = (0.0f64, 0.0f64, 0.0f64, 0.0f64);
        for n in (0..=nu).rev() {
            let np1 = (n + 1) as f64;
            let tx = ya + h + np1 * rx;
            let ty = xa - np1 * ry;
            let c = 0.5 / (tx * tx + ty * ty);
            rx = c * tx;
            ry = c * ty;
            if taylor && n <= kapn {
                let tx = qlambda + sx;
                sx = rx * tx - ry * sy;
                sy = ry * tx + rx * sy;
                qlambda /= h2;
            }
        }
        let (mut u, v) = if taylor {
            (TWO_OVER_SQRT_PI * sx, TWO_OVER_SQRT_PI * sy)
        } else {
            (TWO_OVER_SQRT_PI * rx, TWO_OVER_SQRT_PI * ry)
        };
        if ya == 0.0 {
            u = (-xa * xa).exp();
        }
        (u, v)
    };

    if z.re < 0.0 {
        Complex64::new(u, -v)
    } else {
        Complex64::new(u, v)
    }
}

/// The Faddeeva function W(ξ) = exp(−ξ²)·erfc(−iξ).
///
/// Fails with [`Error::Overflow`] when ξ lies so deep in the lower half-plane
/// that exp(−ξ²) is not representable; use [`scaled_exp_w`] there.
pub fn faddeeva(xi: Complex64) -> Result<Complex64> {
    if !(xi.re.is_finite() && xi.im.is_finite()) {
        return Err(Error::Overflow {
            re: xi.re,
            im: xi.im,
        });
    }
    if xi.im >= 0.0 {
        return Ok(w_upper(xi));
    }
    let (re, re_lo, im, im_lo) = neg_square_parts(xi);
    if re + re_lo > MAX_EXP_ARG - std::f64::consts::LN_2 {
        return Err(Error::Overflow {
            re: xi.re,
            im: xi.im,
        });
    }
    let reflected = ComplexScaled::exp_split(re, re_lo, im, im_lo).value() * 2.0;
    Ok(reflected - w_upper(-xi))
}

/// exp(s)·W(η), computed without intermediate overflow.
///
/// `s` is the exponent b²/a_t² of the kernel; the lower half-plane reflection
/// of W is merged with it in log space.
pub fn scaled_exp_w(s: Complex64, eta: Complex64) -> ComplexScaled {
    if eta.im >= 0.0 {
        return ComplexScaled::exp(s).mul_complex(w_upper(eta));
    }
    let reflected = exp_shift_neg_square(s, eta).mul_complex(Complex64::new(2.0, 0.0));
    let direct = ComplexScaled::exp(s).mul_complex(w_upper(-eta));
    reflected.sub(direct)
}
