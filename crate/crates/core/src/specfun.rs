//! Modified Bessel functions `I_ν`, `K_ν` of real order `ν ≥ 0` and positive
//! real argument.
//!
//! `K` is computed by Temme's series (`x < 2`) or Steed's continued fraction
//! (`x ≥ 2`) at the reduced order `μ = ν − round(ν)`, then by forward
//! recurrence in the order. Temme's series works with `1/Γ(1 ± μ)` directly,
//! so integer and near-integer orders need no limit and are free of
//! cancellation. `I` comes from the continued fraction for `I'_ν/I_ν` and the
//! Wronskian, or from the Hankel expansion once `x` is large compared to `ν²`.
//!
//! Every routine works on the exponentially scaled values `e^{-x} I_ν(x)` and
//! `e^{x} K_ν(x)`; the unscaled values are derived at the very end.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const EPS: f64 = 1e-16;
const CF_EPS: f64 = 4e-16;
const FPMIN: f64 = 1e-300;
const MAXIT: usize = 100_000;
const RESCALE: f64 = 1e250;
const XMIN_TEMME: f64 = 2.0;

/// Taylor coefficients of `1/Γ(z) = Σ_{k≥1} c_k z^k`.
const RGAMMA: [f64; 30] = [
    1.0,
    0.577_215_664_901_532_860_61,
    -0.655_878_071_520_253_881_08,
    -0.042_002_635_034_095_235_529,
    0.166_538_611_382_291_489_5,
    -0.042_197_734_555_544_336_748,
    -0.009_621_971_527_876_973_562_1,
    0.007_218_943_246_663_099_542_4,
    -0.001_165_167_591_859_065_112_1,
    -0.000_215_241_674_114_950_972_82,
    0.000_128_050_282_388_116_186_15,
    -0.000_020_134_854_780_788_238_656,
    -1.250_493_482_142_670_657_3e-6,
    1.133_027_231_981_695_882_4e-6,
    -2.056_338_416_977_607_103_5e-7,
    6.116_095_104_481_415_817_9e-9,
    5.002_007_644_469_222_930_1e-9,
    -1.181_274_570_487_020_144_6e-9,
    1.043_426_711_691_100_510_5e-10,
    7.782_263_439_905_071_254e-12,
    -3.696_805_618_642_205_708_2e-12,
    5.100_370_287_454_475_979e-13,
    -2.058_326_053_566_506_783_2e-14,
    -5.348_122_539_423_017_982_4e-15,
    1.226_778_628_238_260_790_2e-15,
    -1.181_259_301_697_458_769_5e-16,
    1.186_692_254_751_600_332_6e-18,
    1.412_380_655_318_031_781_6e-18,
    -2.298_745_684_435_370_206_6e-19,
    1.714_406_321_927_337_433_4e-20,
];

/// Exponentially scaled values and first derivatives at one `(ν, x)`.
///
/// `i = e^{-x} I_ν(x)`, `di = e^{-x} I'_ν(x)`, `k = e^{x} K_ν(x)`,
/// `dk = e^{x} K'_ν(x)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScaledIK {
    pub i: f64,
    pub di: f64,
    pub k: f64,
    pub dk: f64,
}

/// One evaluation of both functions, as returned by [`bessel_eval`].
#[derive(Debug, Clone, Copy, PartialEq, serde::Serialize)]
pub struct BesselEval {
    pub order: f64,
    pub argument: f64,
    pub value_i: f64,
    pub value_k: f64,
    /// Values are `e^{-x} I_ν(x)` and `e^{x} K_ν(x)`.
    pub scaled: bool,
    /// Set when an unscaled value left the normal floating-point range.
    pub underflow: bool,
}

fn check_domain(nu: f64, x: f64) -> Result<()> {
    if !nu.is_finite() || nu < 0.0 {
        return Err(Error::Domain(format!("order must be finite and >= 0, got {nu}")));
    }
    if !x.is_finite() || x <= 0.0 {
        return Err(Error::Domain(format!("argument must be finite and > 0, got {x}")));
    }
    Ok(())
}

/// `(gam1, gam2, 1/Γ(1+μ), 1/Γ(1−μ))` for `|μ| ≤ 1/2`, where
/// `gam1 = (1/Γ(1−μ) − 1/Γ(1+μ)) / (2μ)` and `gam2 = (1/Γ(1−μ) + 1/Γ(1+μ)) / 2`.
fn temme_gammas(mu: f64) -> (f64, f64, f64, f64) {
    // 1/Γ(1+μ) = Σ c_k μ^{k-1}; even and odd parts give gam1 and gam2 directly.
    let mu2 = mu * mu;
    let mut gam1 = 0.0;
    let mut gam2 = 0.0;
    let mut p = 1.0;
    for pair in RGAMMA.chunks(2) {
        gam2 += pair[0] * p;
        if pair.len() > 1 {
            gam1 -= pair[1] * p;
        }
        p *= mu2;
    }
    let gampl = gam2 - mu * gam1;
    let gammi = gam2 + mu * gam1;
    (gam1, gam2, gampl, gammi)
}

/// Scaled `K_μ(x)` and `K_{μ+1}(x)` for `|μ| ≤ 1/2`.
fn k_reduced(mu: f64, x: f64) -> (f64, f64) {
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mu2 = mu * mu;
    if x < XMIN_TEMME {
        let x2 = 0.5 * x;
        let pimu = PI * mu;
        let fact = if pimu.abs() < EPS { 1.0 } else { pimu / pimu.sin() };
        let d = -x2.ln();
        let e = mu * d;
        let fact2 = if e.abs() < EPS { 1.0 } else { e.sinh() / e };
        let (gam1, gam2, gampl, gammi) = temme_gammas(mu);
        let mut ff = fact * (gam1 * e.cosh() + gam2 * fact2 * d);
        let mut sum = ff;
        let ee = e.exp();
        let mut p = 0.5 * ee / gampl;
        let mut q = 0.5 / (ee * gammi);
        let mut c = 1.0;
        let dd = x2 * x2;
        let mut sum1 = p;
        for i in 1..MAXIT {
            let fi = i as f64;
            ff = (fi * ff + p + q) / (fi * fi - mu2);
            c *= dd / fi;
            p /= fi - mu;
            q /= fi + mu;
            let del = c * ff;
            sum += del;
            let del1 = c * (p - fi * ff);
            sum1 += del1;
            if del.abs() < sum.abs() * EPS {
                break;
            }
        }
        let ex = x.exp();
        (sum * ex, sum1 * xi2 * ex)
    } else {
        // Steed's algorithm for the continued fraction CF2.
        let mut b = 2.0 * (1.0 + x);
        let mut d = 1.0 / b;
        let mut delh = d;
        let mut h = d;
        let mut q1 = 0.0;
        let mut q2 = 1.0;
        let a1 = 0.25 - mu2;
        let mut c = a1;
        let mut q = c;
        let mut a = -a1;
        let mut s = 1.0 + q * delh;
        for i in 2..MAXIT {
            let fi = i as f64;
            a -= 2.0 * (fi - 1.0);
            c = -a * c / fi;
            let qnew = (q1 - b * q2) / a;
            q1 = q2;
            q2 = qnew;
            q += c * qnew;
            b += 2.0;
            d = 1.0 / (b + a * d);
            delh = (b * d - 1.0) * delh;
            h += delh;
            let dels = q * delh;
            s += dels;
            if (dels / s).abs() < CF_EPS {
                break;
            }
        }
        h *= a1;
        let kmu = (PI / (2.0 * x)).sqrt() / s;
        let k1 = kmu * (mu + x + 0.5 - h) * xi;
        (kmu, k1)
    }
}

/// Scaled `K_ν(x)` and `K_{ν+1}(x)`.
fn k_pair(nu: f64, x: f64) -> (f64, f64) {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (mut kmu, mut k1) = k_reduced(mu, x);
    let xi2 = 2.0 / x;
    for i in 1..=(nl as usize) {
        let next = (mu + i as f64) * xi2 * k1 + kmu;
        kmu = k1;
        k1 = next;
    }
    (kmu, k1)
}

/// Scaled `I_ν(x)` via the Hankel expansion; requires `x ≫ ν²`.
fn i_hankel(nu: f64, x: f64) -> f64 {
    let m = 4.0 * nu * nu;
    let mut term = 1.0;
    let mut sum = 1.0;
    let mut prev = f64::INFINITY;
    for k in 1..200 {
        let fk = k as f64;
        let odd = 2.0 * fk - 1.0;
        term *= -(m - odd * odd) / (8.0 * fk * x);
        if term.abs() >= prev {
            break;
        }
        sum += term;
        prev = term.abs();
        if term.abs() < EPS * sum.abs() * 1e-2 {
            break;
        }
    }
    sum / (2.0 * PI * x).sqrt()
}

/// Scaled `I_ν(x)` from the ascending series; all terms are positive.
fn i_series(nu: f64, x: f64) -> f64 {
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let (_, _, gampl, _) = temme_gammas(mu);
    // 1/Γ(ν+1) = 1/(Γ(1+μ) (μ+1)…(μ+n))
    let mut lead = gampl;
    for j in 1..=(nl as usize) {
        lead /= mu + j as f64;
    }
    let q = 0.25 * x * x;
    let mut term = 1.0;
    let mut sum = 1.0;
    for k in 1..MAXIT {
        let fk = k as f64;
        term *= q / (fk * (nu + fk));
        sum += term;
        if term < EPS * sum {
            break;
        }
    }
    (nu * (0.5 * x).ln() - x).exp() * lead * sum
}

fn use_hankel(nu: f64, x: f64) -> bool {
    x >= 30.0 && x >= nu * nu
}

/// Scaled values and derivatives of `I_ν`, `K_ν` at `x`.
pub fn scaled_ik(nu: f64, x: f64) -> Result<ScaledIK> {
    check_domain(nu, x)?;
    let (k, k1) = k_pair(nu, x);
    let dk = nu / x * k - k1;
    if use_hankel(nu, x) {
        let i = i_hankel(nu, x);
        let i1 = i_hankel(nu + 1.0, x);
        return Ok(ScaledIK { i, di: nu / x * i + i1, k, dk });
    }
    if x < XMIN_TEMME {
        // The Wronskian route cancels for small x when the reduced order is
        // negative; the series has no such issue here.
        let i = i_series(nu, x);
        let i1 = i_series(nu + 1.0, x);
        return Ok(ScaledIK { i, di: nu / x * i + i1, k, dk });
    }
    // CF1 for f = I'_ν / I_ν (modified Lentz).
    let xi = 1.0 / x;
    let xi2 = 2.0 * xi;
    let mut h = (nu * xi).max(FPMIN);
    let mut b = xi2 * nu;
    let mut d = 0.0;
    let mut c = h;
    for _ in 0..MAXIT {
        b += xi2;
        d = 1.0 / (b + d);
        c = b + 1.0 / c;
        let del = c * d;
        h *= del;
        if (del - 1.0).abs() < CF_EPS {
            break;
        }
    }
    // Downward recurrence to the reduced order μ, keeping the unnormalised
    // starting pair so the result can be rescaled afterwards.
    let nl = (nu + 0.5).floor();
    let mu = nu - nl;
    let mut ril = 1.0;
    let mut ripl = h;
    let mut ril1 = 1.0;
    let mut rip1 = h;
    let mut fact = nu * xi;
    for _ in 0..(nl as usize) {
        let t = fact * ril + ripl;
        fact -= xi;
        ripl = fact * t + ril;
        ril = t;
        if ril.abs() > RESCALE {
            ril /= RESCALE;
            ripl /= RESCALE;
            ril1 /= RESCALE;
            rip1 /= RESCALE;
        }
    }
    let f = ripl / ril;
    let (kmu, k1mu) = k_reduced(mu, x);
    let kmup = mu * xi * kmu - k1mu;
    // Wronskian I_μ K'_μ − I'_μ K_μ = −1/x with I'_μ = f I_μ.
    let rimu = xi / (f * kmu - kmup);
    let i = rimu * ril1 / ril;
    let di = rimu * rip1 / ril;
    Ok(ScaledIK { i, di, k, dk })
}

/// `I_ν(x)`, or `e^{-x} I_ν(x)` when `scaled`.
pub fn bessel_i(nu: f64, x: f64, scaled: bool) -> Result<f64> {
    let v = scaled_ik(nu, x)?;
    Ok(if scaled { v.i } else { unscale_i(v.i, x) })
}

/// `K_ν(x)`, or `e^{x} K_ν(x)` when `scaled`.
pub fn bessel_k(nu: f64, x: f64, scaled: bool) -> Result<f64> {
    check_domain(nu, x)?;
    let (k, _) = k_pair(nu, x);
    Ok(if scaled { k } else { k * (-x).exp() })
}

/// Unscaled derivatives `(I'_ν(x), K'_ν(x))`.
pub fn bessel_derivatives(nu: f64, x: f64) -> Result<(f64, f64)> {
    let v = scaled_ik(nu, x)?;
    Ok((unscale_i(v.di, x), v.dk * (-x).exp()))
}

/// Both functions at once, with an underflow/overflow flag for the unscaled case.
pub fn bessel_eval(nu: f64, x: f64, scaled: bool) -> Result<BesselEval> {
    let v = scaled_ik(nu, x)?;
    let (value_i, value_k) = if scaled {
        (v.i, v.k)
    } else {
        (unscale_i(v.i, x), v.k * (-x).exp())
    };
    let out_of_range = |a: f64| !a.is_normal();
    Ok(BesselEval {
        order: nu,
        argument: x,
        value_i,
        value_k,
        scaled,
        underflow: !scaled && (out_of_range(value_i) || out_of_range(value_k)),
    })
}

fn unscale_i(v: f64, x: f64) -> f64 {
    // Split the exponential so large x overflows only when the result does.
    let half = (0.5 * x).exp();
    v * half * half
}

/// `x (K_ν I'_ν − K'_ν I_ν) − 1`, which vanishes identically.
pub fn wronskian_defect(nu: f64, x: f64) -> Result<f64> {
    let v = scaled_ik(nu, x)?;
    Ok(x * (v.k * v.di - v.dk * v.i) - 1.0)
}
