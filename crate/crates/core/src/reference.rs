//! High-precision reference values for W(ξ), used to validate
//! [`crate::special::faddeeva`].
//!
//! Everything here is evaluated in double-double arithmetic (about 32
//! significant digits) with methods unrelated to the production algorithm:
//! the Maclaurin series of erf near the origin and close to the real axis,
//! the asymptotic expansion for large |ξ| near the real axis, and the Laplace
//! continued fraction (with adaptive depth) everywhere else in the upper
//! half-plane. Values are carried as `mantissa · 2^exp2` so the lower
//! half-plane never overflows.

use std::ops::{Add, Div, Mul, Neg, Sub};

use num_complex::Complex64;

use crate::special::ComplexScaled;

/// Double-double number hi + lo with |lo| ≤ ulp(hi)/2.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Dd {
    pub hi: f64,
    pub lo: f64,
}

const LN2: Dd = Dd::new(0.693_147_180_559_945_3, 2.319_046_813_846_299_6e-17);
const HALF_PI: Dd = Dd::new(1.570_796_326_794_896_6, 6.123_233_995_736_766e-17);
const TWO_OVER_SQRT_PI: Dd = Dd::new(1.128_379_167_095_512_6, 1.533_545_961_316_588e-17);
const INV_SQRT_PI: Dd = Dd::new(0.564_189_583_547_756_3, 7.667_729_806_582_94e-18);
const DD_EPS: f64 = 1e-32;

#[inline]
fn two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    let bb = s - a;
    (s, (a - (s - bb)) + (b - bb))
}

#[inline]
fn quick_two_sum(a: f64, b: f64) -> (f64, f64) {
    let s = a + b;
    (s, b - (s - a))
}

impl Dd {
    pub const fn new(hi: f64, lo: f64) -> Self {
        Self { hi, lo }
    }

    pub const fn from_f64(x: f64) -> Self {
        Self { hi: x, lo: 0.0 }
    }

    fn renorm(hi: f64, lo: f64) -> Self {
        let (hi, lo) = quick_two_sum(hi, lo);
        Self { hi, lo }
    }

    pub fn to_f64(self) -> f64 {
        self.hi + self.lo
    }

    pub fn abs(self) -> Self {
        if self.hi < 0.0 {
            -self
        } else {
            self
        }
    }

    /// Multiplies by 2^n; exact while the result stays normal.
    fn ldexp(self, n: i64) -> Self {
        let mut out = self;
        let mut n = n;
        while n != 0 {
            let step = n.clamp(-1000, 1000);
            let f = 2f64.powi(step as i32);
            out = Self::new(out.hi * f, out.lo * f);
            n -= step;
        }
        out
    }

    fn mul_f64(self, b: f64) -> Self {
        let p = self.hi * b;
        let e = self.hi.mul_add(b, -p);
        Self::renorm(p, e + self.lo * b)
    }

    fn sqr(self) -> Self {
        self * self
    }

    /// exp(self) as (mantissa, k) with value mantissa · 2^k.
    fn exp_split(self) -> (Self, i64) {
        let k = (self.hi / LN2.hi).round();
        let r = self - LN2.mul_f64(k);
        let r = r.ldexp(-10);
        let mut term = Dd::from_f64(1.0);
        let mut sum = Dd::from_f64(1.0);
        for n in 1..=16 {
            term = (term * r) / Dd::from_f64(n as f64);
            sum = sum + term;
        }
        for _ in 0..10 {
            sum = sum.sqr();
        }
        (sum, k as i64)
    }

    /// (sin, cos).
    fn sin_cos(self) -> (Self, Self) {
        let j = (self.hi / HALF_PI.hi).round();
        let r = self - HALF_PI.mul_f64(j);
        let r2 = r.sqr();
        let mut s_term = r;
        let mut s = r;
        let mut c_term = Dd::from_f64(1.0);
        let mut c = Dd::from_f64(1.0);
        for n in 1..=20 {
            let n = n as f64;
            s_term = -(s_term * r2) / Dd::from_f64((2.0 * n) * (2.0 * n + 1.0));
            c_term = -(c_term * r2) / Dd::from_f64((2.0 * n - 1.0) * (2.0 * n));
            s = s + s_term;
            c = c + c_term;
        }
        match (j as i64).rem_euclid(4) {
            0 => (s, c),
            1 => (c, -s),
            2 => (-s, -c),
            _ => (-c, s),
        }
    }
}

impl Add for Dd {
    type Output = Dd;
    fn add(self, o: Dd) -> Dd {
        let (s, e) = two_sum(self.hi, o.hi);
        let (t, f) = two_sum(self.lo, o.lo);
        let (s, e) = quick_two_sum(s, e + t);
        Dd::renorm(s, e + f)
    }
}

impl Neg for Dd {
    type Output = Dd;
    fn neg(self) -> Dd {
        Dd::new(-self.hi, -self.lo)
    }
}

impl Sub for Dd {
    type Output = Dd;
    fn sub(self, o: Dd) -> Dd {
        self + (-o)
    }
}

impl Mul for Dd {
    type Output = Dd;
    fn mul(self, o: Dd) -> Dd {
        let p = self.hi * o.hi;
        let e = self.hi.mul_add(o.hi, -p);
        Dd::renorm(p, e + (self.hi * o.lo + self.lo * o.hi))
    }
}

impl Div for Dd {
    type Output = Dd;
    fn div(self, o: Dd) -> Dd {
        let q1 = self.hi / o.hi;
        let r = self - o.mul_f64(q1);
        let q2 = r.hi / o.hi;
        let r = r - o.mul_f64(q2);
        let q3 = r.hi / o.hi;
        let (a, b) = quick_two_sum(q1, q2);
        Dd::new(a, b) + Dd::from_f64(q3)
    }
}

/// Complex double-double.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Cdd {
    re: Dd,
    im: Dd,
}

impl Cdd {
    const ONE: Cdd = Cdd::new(Dd::from_f64(1.0), Dd::from_f64(0.0));

    const fn new(re: Dd, im: Dd) -> Self {
        Self { re, im }
    }

    fn from_c64(z: Complex64) -> Self {
        Self::new(Dd::from_f64(z.re), Dd::from_f64(z.im))
    }

    fn to_c64(self) -> Complex64 {
        Complex64::new(self.re.to_f64(), self.im.to_f64())
    }

    fn scale(self, k: Dd) -> Self {
        Self::new(self.re * k, self.im * k)
    }

    fn ldexp(self, n: i64) -> Self {
        Self::new(self.re.ldexp(n), self.im.ldexp(n))
    }

    fn times_i(self) -> Self {
        Self::new(-self.im, self.re)
    }

    fn norm1(self) -> f64 {
        self.re.hi.abs() + self.im.hi.abs()
    }
}

impl Add for Cdd {
    type Output = Cdd;
    fn add(self, o: Cdd) -> Cdd {
        Cdd::new(self.re + o.re, self.im + o.im)
    }
}

impl Sub for Cdd {
    type Output = Cdd;
    fn sub(self, o: Cdd) -> Cdd {
        Cdd::new(self.re - o.re, self.im - o.im)
    }
}

impl Mul for Cdd {
    type Output = Cdd;
    fn mul(self, o: Cdd) -> Cdd {
        Cdd::new(
            self.re * o.re - self.im * o.im,
            self.re * o.im + self.im * o.re,
        )
    }
}

impl Div for Cdd {
    type Output = Cdd;
    fn div(self, o: Cdd) -> Cdd {
        let d = o.re * o.re + o.im * o.im;
        Cdd::new(
            (self.re * o.re + self.im * o.im) / d,
            (self.im * o.re - self.re * o.im) / d,
        )
    }
}

/// A complex value mantissa · 2^exp2.
#[derive(Debug, Clone, Copy, PartialEq)]
struct Scaled {
    m: Cdd,
    exp2: i64,
}

impl Scaled {
    fn normalized(self) -> Self {
        let r = self.m.norm1();
        if r == 0.0 {
            return self;
        }
        let e = r.log2().floor() as i64;
        Self {
            m: self.m.ldexp(-e),
            exp2: self.exp2 + e,
        }
    }

    fn sub(self, o: Scaled) -> Scaled {
        let top = self.exp2.max(o.exp2);
        Scaled {
            m: self.m.ldexp(self.exp2 - top) - o.m.ldexp(o.exp2 - top),
            exp2: top,
        }
        .normalized()
    }
}

/// exp(−z²) with −z² formed exactly.
fn exp_neg_square(z: Complex64) -> Scaled {
    let x = Dd::from_f64(z.re);
    let y = Dd::from_f64(z.im);
    let re = y * y - x * x;
    let im = -(x * y).mul_f64(2.0);
    let (mag, k) = re.exp_split();
    let (s, c) = im.sin_cos();
    Scaled {
        m: Cdd::new(mag * c, mag * s),
        exp2: k,
    }
    .normalized()
}

/// exp(−z²)·(1 + (2i/√π)·Σ z^{2n+1}/(n!(2n+1))).
fn series(z: Complex64) -> Scaled {
    let zz = Cdd::from_c64(z);
    let z2 = zz * zz;
    let mut t = zz;
    let mut sum = zz;
    let mut n = 0u32;
    loop {
        n += 1;
        t = (t * z2).scale(Dd::from_f64(1.0) / Dd::from_f64(n as f64));
        let term = t.scale(Dd::from_f64(1.0) / Dd::from_f64((2 * n + 1) as f64));
        sum = sum + term;
        if term.norm1() < DD_EPS * sum.norm1() || n > 20_000 {
            break;
        }
    }
    let bracket = Cdd::ONE + sum.scale(TWO_OVER_SQRT_PI).times_i();
    let e = exp_neg_square(z);
    Scaled {
        m: e.m * bracket,
        exp2: e.exp2,
    }
    .normalized()
}

/// (i/(√π z))·Σ (2n−1)!!/(2z²)^n, optimally truncated.
fn asymptotic(z: Complex64) -> Scaled {
    let zz = Cdd::from_c64(z);
    let inv_2z2 = Cdd::ONE / (zz * zz).scale(Dd::from_f64(2.0));
    let mut term = Cdd::ONE;
    let mut sum = Cdd::ONE;
    let mut prev = f64::INFINITY;
    for n in 1..100_000u32 {
        let next = term * inv_2z2.scale(Dd::from_f64((2 * n - 1) as f64));
        let size = next.norm1();
        if size >= prev || size < DD_EPS * sum.norm1() {
            break;
        }
        prev = size;
        term = next;
        sum = sum + term;
    }
    let w = (sum / zz).scale(INV_SQRT_PI).times_i();
    Scaled { m: w, exp2: 0 }.normalized()
}

/// Laplace continued fraction (i/√π)/(z − (1/2)/(z − 1/(z − (3/2)/…))).
fn continued_fraction(z: Complex64) -> Scaled {
    let zz = Cdd::from_c64(z);
    let eval = |depth: u32| {
        let mut t = zz;
        for k in (1..=depth).rev() {
            t = zz - Cdd::new(Dd::from_f64(k as f64 * 0.5), Dd::from_f64(0.0)) / t;
        }
        (Cdd::ONE / t).scale(INV_SQRT_PI).times_i()
    };
    let mut depth = 32;
    let mut prev = eval(depth);
    loop {
        depth *= 2;
        let cur = eval(depth);
        if (cur - prev).norm1() < 1e-31 * cur.norm1() || depth >= 1 << 18 {
            return Scaled { m: cur, exp2: 0 }.normalized();
        }
        prev = cur;
    }
}

fn upper(z: Complex64) -> Scaled {
    debug_assert!(z.im >= 0.0);
    let (x, y) = (z.re, z.im);
    if z.norm() <= 3.5 || (y < 3.0 && x.abs() < 26.0) {
        series(z)
    } else if y < 3.0 {
        asymptotic(z)
    } else {
        continued_fraction(z)
    }
}

fn reference(z: Complex64) -> Scaled {
    if z.im >= 0.0 {
        return upper(z);
    }
    let mut e = exp_neg_square(z);
    e.m = e.m.scale(Dd::from_f64(2.0));
    e.sub(upper(-z))
}

/// Reference value of W(ξ) rounded to f64 (infinite when out of range).
pub fn faddeeva_reference(xi: Complex64) -> Complex64 {
    let r = reference(xi);
    let m = r.m.to_c64();
    if r.exp2 > 1100 {
        return Complex64::new(
            m.re.signum() * f64::INFINITY,
            m.im.signum() * f64::INFINITY,
        );
    }
    m * 2f64.powi(r.exp2.clamp(-1100, 1100) as i32)
}

/// ln|W(ξ)| and arg W(ξ) from the reference evaluation.
pub fn faddeeva_reference_log(xi: Complex64) -> (f64, f64) {
    let r = reference(xi);
    let m = r.m.to_c64();
    let ln = (LN2.mul_f64(r.exp2 as f64) + Dd::from_f64(m.norm().ln())).to_f64();
    (ln, m.arg())
}

/// |approx − W(ξ)| / |W(ξ)| for a scaled approximation, computed without
/// forming either value explicitly.
pub fn relative_error(approx: ComplexScaled, xi: Complex64) -> f64 {
    let r = reference(xi);
    let m = r.m.to_c64();
    if approx.is_zero() {
        return 1.0;
    }
    let shift = (Dd::from_f64(approx.log_scale) - LN2.mul_f64(r.exp2 as f64)).to_f64();
    if shift > 700.0 {
        return f64::INFINITY;
    }
    let ratio = approx.mantissa * shift.exp() / m;
    (ratio - 1.0).norm()
}

#[cfg(test)]
mod tests {
    use super::*;

    // (x, y, Re W, Im W), 22 significant digits.
    const TABLE: &[(f64, f64, f64, f64)] = &[
        (0.5, 0.3, 0.6148515391469910214014, 0.3031243496473510567526),
        (2.0, 2.0, 0.1479527595120158242288, 0.1311797170842178535853),
        (-3.2, 0.1, 0.006670021095481462824422, -0.1864210804020567711689),
        (20.0, 0.5, 0.0007074522198847295621598, 0.0282271209037877385294),
        (-25.9, 2.9, 0.00241411641008089058776, -0.02152874567070349705196),
        (40.0, 1.0, 0.0003527286482467838050243, 0.01410032496057852009952),
        (5.0, 4.0, 0.05599737714252387616078, 0.06829488564492277667751),
        (-4.0, 10.0, 0.04854215862174130350605, -0.01925223938584141658498),
        (45.0, 45.0, 0.006269546786327013930094, 0.00626799894145853442864),
        (0.1, 49.0, 0.01151162896858451661863, 0.00002348334583398074020073),
        (3.0, -2.0, -0.08133907992862736045366, 0.1210861624629984489432),
        (-10.0, -9.0, -0.02814690740235403787764, -0.03110183070534016211916),
        (20.0, -30.0, 2.796224689446225206947e217, -2.478143300932159034354e216),
        (-1.0, -5.0, -44452536418.86811208545, 28821283295.10266697046),
    ];

    #[test]
    fn tabulated_values() {
        for &(x, y, re, im) in TABLE {
            let w = faddeeva_reference(Complex64::new(x, y));
            let want = Complex64::new(re, im);
            let err = (w - want).norm() / want.norm();
            assert!(err < 1e-15, "({x},{y}): {w} vs {want}: {err:e}");
        }
    }

    #[test]
    fn real_axis_imaginary_part() {
        // W(30) = exp(−900) + 0.0188167848686607277905 i
        let w = faddeeva_reference(Complex64::new(30.0, 0.0));
        assert!((w.im - 0.018_816_784_868_660_728).abs() < 1e-17);
    }

    #[test]
    fn log_form_beyond_double_range() {
        let (ln, arg) = faddeeva_reference_log(Complex64::new(10.0, -45.0));
        assert!((ln - 1925.693_147_180_56).abs() < 1e-10);
        assert!((arg - 1.504_501_073_319_133_8).abs() < 1e-13);
        let (ln, arg) = faddeeva_reference_log(Complex64::new(-33.0, -47.0));
        assert!((ln - 1120.693_147_180_56).abs() < 1e-10);
        assert!((arg - 1.893_541_746_715_719_6).abs() < 1e-13);
    }

    #[test]
    fn double_double_basics() {
        let third = Dd::from_f64(1.0) / Dd::from_f64(3.0);
        let back = third * Dd::from_f64(3.0) - Dd::from_f64(1.0);
        assert!(back.to_f64().abs() < 1e-31);
        let (m, k) = Dd::from_f64(1.0).exp_split();
        let e = m.ldexp(k);
        assert!((e - Dd::new(2.718_281_828_459_045, 1.445_646_891_729_250_2e-16)).to_f64().abs() < 1e-28);
        let (s, c) = Dd::from_f64(1000.0).sin_cos();
        assert!((s.to_f64() - 0.826_879_540_532_002_5).abs() < 1e-16);
        assert!((c.to_f64() - 0.562_379_076_290_702_9).abs() < 1e-16);
    }
}
