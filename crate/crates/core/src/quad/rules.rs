//! Fixed quadrature rules.

use std::f64::consts::PI;

/// Gauss–Kronrod 21-point abscissae on [−1, 1] (non-negative half, descending).
pub(crate) const XGK21: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

/// Kronrod weights matching [`XGK21`].
pub(crate) const WGK21: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_208_980_224_222,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

/// 10-point Gauss weights for the odd-indexed entries of [`XGK21`].
pub(crate) const WG10: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

/// Nodes and weights of an n-point Gaussian rule.
#[derive(Debug, Clone, PartialEq)]
pub struct Rule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
}

/// Gauss–Hermite rule for ∫ f(x) exp(−x²) dx, nodes ascending.
pub fn gauss_hermite(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Hermite order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let pim4 = PI.powf(-0.25);
    let m = n.div_ceil(2);
    let nf = n as f64;
    let mut z = 0.0f64;
    for i in 0..m {
        // Initial guesses for the largest roots, then extrapolation from the
        // previous ones.
        z = match i {
            0 => (2.0 * nf + 1.0).sqrt() - 1.85575 * (2.0 * nf + 1.0).powf(-1.0 / 6.0),
            1 => z - 1.14 * nf.powf(0.426) / z,
            2 => 1.86 * z - 0.86 * nodes[0],
            3 => 1.91 * z - 0.91 * nodes[1],
            _ => 2.0 * z - nodes[i - 2],
        };
        let mut pp = 0.0;
        for _ in 0..100 {
            // Orthonormal Hermite recurrence.
            let mut p1 = pim4;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = z * (2.0 / (jf + 1.0)).sqrt() * p2 - (jf / (jf + 1.0)).sqrt() * p3;
            }
            pp = (2.0 * nf).sqrt() * p2;
            let z1 = z;
            z = z1 - p1 / pp;
            if (z - z1).abs() <= 1e-15 * z.abs().max(1.0) {
                break;
            }
        }
        nodes[i] = z;
        weights[i] = 2.0 / (pp * pp);
    }
    // Roots were found from the largest down; mirror and sort ascending.
    let mut out_nodes = vec![0.0; n];
    let mut out_weights = vec![0.0; n];
    for i in 0..m {
        out_nodes[i] = -nodes[i];
        out_weights[i] = weights[i];
        out_nodes[n - 1 - i] = nodes[i];
        out_weights[n - 1 - i] = weights[i];
    }
    Rule {
        nodes: out_nodes,
        weights: out_weights,
    }
}

/// Gauss–Legendre rule on [−1, 1], nodes ascending.
pub fn gauss_legendre(n: usize) -> Rule {
    assert!(n >= 1, "Gauss-Legendre order must be positive");
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        let mut z = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        let mut dp = 1.0;
        for _ in 0..100 {
            let mut p1 = 1.0;
            let mut p2 = 0.0;
            for j in 0..n {
                let p3 = p2;
                p2 = p1;
                let jf = j as f64;
                p1 = ((2.0 * jf + 1.0) * z * p2 - jf * p3) / (jf + 1.0);
            }
            dp = nf * (z * p1 - p2) / (z * z - 1.0);
            let z1 = z;
            z = z1 - p1 / dp;
            if (z - z1).abs() <= 1e-16 {
                break;
            }
        }
        nodes[i] = -z;
        nodes[n - 1 - i] = z;
        let w = 2.0 / ((1.0 - z * z) * dp * dp);
        weights[i] = w;
        weights[n - 1 - i] = w;
    }
    Rule { nodes, weights }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn gamma_half_int(k: u32) -> f64 {
        // Γ(k + 1/2) = (2k−1)!!/2^k √π
        let mut g = PI.sqrt();
        for j in 0..k {
            g *= j as f64 + 0.5;
        }
        g
    }

    #[test]
    fn hermite_integrates_polynomials_exactly() {
        for &n in &[8usize, 20, 40, 41, 80] {
            let r = gauss_hermite(n);
            for k in 0..n as u32 {
                // monomial x^{2k}, degree 2k ≤ 2n−1
                if 2 * k > 2 * n as u32 - 1 {
                    break;
                }
                let s: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(2 * k as i32))
                    .sum();
                let want = gamma_half_int(k);
                assert!((s - want).abs() <= 1e-13 * want, "n={n} k={k}: {s} vs {want}");
                let odd: f64 = r
                    .nodes
                    .iter()
                    .zip(&r.weights)
                    .map(|(x, w)| w * x.powi(2 * k as i32 + 1))
                    .sum();
                assert!(odd.abs() <= 1e-13 * want.max(1.0));
            }
            assert!(r.nodes.windows(2).all(|p| p[0] < p[1]));
        }
    }

    #[test]
    fn legendre_integrates_polynomials_exactly() {
        for &n in &[1usize, 5, 10, 16, 33] {
            let r = gauss_legendre(n);
            for d in 0..(2 * n) as i32 {
                let s: f64 = r.nodes.iter().zip(&r.weights).map(|(x, w)| w * x.powi(d)).sum();
                let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
                assert!((s - want).abs() < 1e-14, "n={n} d={d}");
            }
        }
    }

    #[test]
    fn kronrod_rule_degrees() {
        for d in 0..=31i32 {
            let mut k = WGK21[10] * if d == 0 { 1.0 } else { 0.0 };
            for j in 0..10 {
                let x = XGK21[j];
                k += WGK21[j] * (x.powi(d) + (-x).powi(d));
            }
            let want = if d % 2 == 1 { 0.0 } else { 2.0 / (d as f64 + 1.0) };
            assert!((k - want).abs() < 1e-14, "kronrod d={d}");
            if d <= 19 {
                let mut g = 0.0;
                for j in 0..5 {
                    let x = XGK21[2 * j + 1];
                    g += WG10[j] * (x.powi(d) + (-x).powi(d));
                }
                assert!((g - want).abs() < 1e-14, "gauss d={d}");
            }
        }
    }
}
