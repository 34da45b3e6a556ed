//! The hyperbolic Poisson-kernel upper bound.
//!
//! For genus `g`, the relevant geometry collapses to one scalar function:
//! the mean of the ν-th powers of the kernel
//! `b(ρ,φ) = 1/(cosh ρ − sinh ρ cos φ)` at distance `D = 2·acosh(cot(π/4g))`
//! over `4g` equally spaced angles. Its value at `φ = 0`, minimized over
//! the exponent `ν ∈ [0,1]`, is an upper bound on the spectral radius —
//! provided the angular maximum really sits at `φ = 0`. Everything that
//! claim rests on is machine-checked here: the sign pattern of the first
//! three derivatives of `β(φ) = b(D,φ)^ν`, a quartic positivity fact, and
//! a scalar inequality `1/δ ≥ rate(1)` per genus.

use crate::{Error, Result};
use std::f64::consts::PI;

/// Geometric constants of the `{4g, 4g}` tiling for one genus.
#[derive(Debug, Clone, Copy)]
pub struct Constants {
    /// Genus, at least 2.
    pub g: u32,
    /// `cot²(π/4g)`; always exceeds 2.
    pub x: f64,
    /// Distance between centers of adjacent tiles: `2·acosh(cot(π/4g))`.
    pub d: f64,
    /// `cosh d`; equals `2x − 1`.
    pub c: f64,
    /// `sinh d`; equals `2√(x(x−1))`.
    pub s: f64,
    /// `arccos(s/c)`: where the second-derivative sign condition starts.
    pub delta: f64,
    /// `arccos(s/c − 1/(s·c))`: where the third-derivative one starts.
    pub epsilon: f64,
}

/// Compute and cross-validate the constants for a genus.
///
/// Every relation between the fields (`c = 2x−1`, `s = 2√(x(x−1))`,
/// `c² − s² = 1`, `0 < δ < ε < π/4g`, `x > 2`) is verified to relative
/// precision 1e−12; a violation would signal a numeric fault and is
/// reported as an internal error.
pub fn constants(g: u32) -> Result<Constants> {
    if g < 2 {
        return Err(Error::InvalidGenus(g as u64));
    }
    let angle = PI / (4.0 * g as f64);
    let cot = angle.cos() / angle.sin();
    let x = cot * cot;
    let d = 2.0 * cot.acosh();
    let c = d.cosh();
    let s = d.sinh();
    let delta = (s / c).acos();
    let epsilon = (s / c - 1.0 / (s * c)).acos();

    let fail = |what: String| Err(Error::Internal(what));
    if (c - (2.0 * x - 1.0)).abs() > 1e-12 * c {
        return fail(format!("cosh d = {c} disagrees with 2x−1 at g={g}"));
    }
    let s_closed = 2.0 * (x * (x - 1.0)).sqrt();
    if (s - s_closed).abs() > 1e-12 * s {
        return fail(format!("sinh d = {s} disagrees with 2√(x(x−1)) at g={g}"));
    }
    if ((c - s) * (c + s) - 1.0).abs() > 1e-12 * c * c {
        return fail(format!("c² − s² drifts from 1 at g={g}"));
    }
    if !(x > 2.0) {
        return fail(format!("x = {x} ≤ 2 at g={g}"));
    }
    if !(0.0 < delta && delta < epsilon && epsilon < angle) {
        return fail(format!(
            "angle ordering 0 < {delta} < {epsilon} < {angle} broken at g={g}"
        ));
    }
    Ok(Constants {
        g,
        x,
        d,
        c,
        s,
        delta,
        epsilon,
    })
}

/// The Poisson kernel `1/(cosh ρ − sinh ρ cos φ)` for `ρ > 0`.
///
/// The denominator is at least `e^{−ρ} > 0`, so the value is finite and
/// strictly positive for every angle.
pub fn kernel(rho: f64, phi: f64) -> Result<f64> {
    if !(rho > 0.0) {
        return Err(Error::InvalidParameter {
            name: "rho",
            value: rho,
            reason: "the kernel needs a positive distance",
        });
    }
    Ok(1.0 / (rho.cosh() - rho.sinh() * phi.cos()))
}

/// `F(ν, φ)`: the mean of `b(d, φ + j·π/2g)^ν` over `j = 0..4g`.
pub fn mean_kernel_power(cst: &Constants, nu: f64, phi: f64) -> f64 {
    let n = 4 * cst.g as usize;
    let step = PI / (2.0 * cst.g as f64);
    let mut sum = 0.0;
    for j in 0..n {
        let a = phi + j as f64 * step;
        sum += (1.0 / (cst.c - cst.s * a.cos())).powf(nu);
    }
    sum / n as f64
}

/// Where and how large the angular maximum of `F(ν, ·)` is.
#[derive(Debug, Clone, Copy)]
pub struct Evaluation {
    pub nu: f64,
    /// Grid step the scan used.
    pub grid_step: f64,
    /// Angle of the maximum found.
    pub max_phi: f64,
    /// The maximum value found.
    pub max_value: f64,
    /// `F(ν, 0)` for comparison; the bound is certified when the maximum
    /// does not exceed it.
    pub value_at_zero: f64,
}

impl Evaluation {
    /// True when the scan confirms the maximum sits at `φ = 0`.
    pub fn max_is_at_zero(&self) -> bool {
        self.max_value <= self.value_at_zero * (1.0 + 1e-12)
    }
}

const INV_GOLDEN: f64 = 0.618_033_988_749_894_8; // (√5 − 1)/2

/// Golden-section minimization of a smooth unimodal function on [a, b],
/// to interval width `tol`. Deterministic; returns (argmin, min).
fn golden_min(f: impl Fn(f64) -> f64, mut a: f64, mut b: f64, tol: f64) -> (f64, f64) {
    let mut c = b - INV_GOLDEN * (b - a);
    let mut d = a + INV_GOLDEN * (b - a);
    let (mut fc, mut fd) = (f(c), f(d));
    while b - a > tol {
        if fc <= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - INV_GOLDEN * (b - a);
            fc = f(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + INV_GOLDEN * (b - a);
            fd = f(d);
        }
    }
    let mid = 0.5 * (a + b);
    (mid, f(mid))
}

/// Scan `F(ν, ·)` for its maximum over one fundamental domain `[0, π/4g]`
/// (the function is even and `π/2g`-periodic, which tests assert
/// separately): a uniform grid of the given step, then golden-section
/// refinement around the grid argmax. Ties prefer the smaller angle.
pub fn scan_max(cst: &Constants, nu: f64, step: f64) -> Result<Evaluation> {
    let range = PI / (4.0 * cst.g as f64);
    if !(step > 0.0 && step <= PI / (64.0 * cst.g as f64)) {
        return Err(Error::InvalidParameter {
            name: "step",
            value: step,
            reason: "the angular grid step must lie in (0, π/64g]",
        });
    }
    let n = (range / step).ceil() as usize;
    let mut best_i = 0usize;
    let mut best = f64::NEG_INFINITY;
    for i in 0..=n {
        let phi = range * i as f64 / n as f64;
        let v = mean_kernel_power(cst, nu, phi);
        if v > best {
            best = v;
            best_i = i;
        }
    }
    let lo = range * best_i.saturating_sub(1) as f64 / n as f64;
    let hi = range * (best_i + 1).min(n) as f64 / n as f64;
    let (phi_ref, neg_ref) =
        golden_min(|phi| -mean_kernel_power(cst, nu, phi), lo, hi, 1e-12);
    let value_at_zero = mean_kernel_power(cst, nu, 0.0);
    let (max_phi, max_value) = if -neg_ref > best {
        (phi_ref, -neg_ref)
    } else {
        (range * best_i as f64 / n as f64, best)
    };
    Ok(Evaluation {
        nu,
        grid_step: step,
        max_phi,
        max_value,
        value_at_zero,
    })
}

/// Minimize `ν ↦ F(ν, 0)` over `[0, 1]` by golden-section search to
/// interval width `tol`, after a coarse sweep that verifies the sampled
/// values are unimodal. Returns the minimizing exponent and the bound.
pub fn optimize_exponent(cst: &Constants, tol: f64) -> Result<(f64, f64)> {
    if !(tol > 0.0 && tol <= 1e-3) {
        return Err(Error::InvalidParameter {
            name: "tol",
            value: tol,
            reason: "the exponent tolerance must lie in (0, 1e−3]",
        });
    }
    const COARSE: usize = 64;
    let values: Vec<f64> = (0..=COARSE)
        .map(|i| mean_kernel_power(cst, i as f64 / COARSE as f64, 0.0))
        .collect();
    let m = values
        .iter()
        .enumerate()
        .min_by(|a, b| a.1.total_cmp(b.1))
        .map(|(i, _)| i)
        .expect("nonempty sweep");
    for i in 0..COARSE {
        let ordered = if i < m {
            values[i] >= values[i + 1] - 1e-15
        } else {
            values[i + 1] >= values[i] - 1e-15
        };
        if !ordered {
            return Err(Error::Internal(format!(
                "exponent sweep is not unimodal near ν = {}",
                i as f64 / COARSE as f64
            )));
        }
    }
    let a = m.saturating_sub(1) as f64 / COARSE as f64;
    let b = (m + 1).min(COARSE) as f64 / COARSE as f64;
    Ok(golden_min(
        |nu| mean_kernel_power(cst, nu, 0.0),
        a,
        b,
        tol,
    ))
}

/// The optimized upper bound for one genus, with its scan certificate.
#[derive(Debug, Clone, Copy)]
pub struct UpperBound {
    /// Minimizing exponent.
    pub nu: f64,
    /// The reported bound: the scanned maximum of `F(ν*, ·)`, which equals
    /// `F(ν*, 0)` whenever the scan certifies the maximum at zero. Using
    /// the scanned maximum keeps the bound valid even without that
    /// certificate.
    pub bound: f64,
    pub evaluation: Evaluation,
}

/// Optimize the exponent, then certify the angular maximum at the
/// optimum. `phi_step` defaults to `π/(64g)` when `None`.
pub fn optimized_upper_bound(
    cst: &Constants,
    nu_tol: f64,
    phi_step: Option<f64>,
) -> Result<UpperBound> {
    let (nu, at_zero) = optimize_exponent(cst, nu_tol)?;
    let step = phi_step.unwrap_or(PI / (64.0 * cst.g as f64));
    let evaluation = scan_max(cst, nu, step)?;
    Ok(UpperBound {
        nu,
        bound: evaluation.max_value.max(at_zero),
        evaluation,
    })
}

/// `β(φ) = (c − s·cos φ)^{−ν}` and its first three derivatives, via the
/// closed forms (no finite differences):
///
/// * `β′ = −ν s sin φ · u^{−(ν+1)}`
/// * `β″ = ν s (s − c cos φ + ν s sin²φ) · u^{−(ν+2)}`
/// * `β‴ = ν s sin φ (1 − (3ν+1) s (s − c cos φ) − ν² s² sin²φ) · u^{−(ν+3)}`
///
/// with `u = c − s·cos φ`.
pub fn kernel_power_derivatives(
    cst: &Constants,
    nu: f64,
    phi: f64,
) -> (f64, f64, f64, f64) {
    let (c, s) = (cst.c, cst.s);
    let (sin, cos) = phi.sin_cos();
    let u = c - s * cos;
    let beta = u.powf(-nu);
    let d1 = -nu * s * sin * u.powf(-(nu + 1.0));
    let d2 = nu * s * (s - c * cos + nu * s * sin * sin) * u.powf(-(nu + 2.0));
    let d3 = nu
        * s
        * sin
        * (1.0 - (3.0 * nu + 1.0) * s * (s - c * cos) - nu * nu * s * s * sin * sin)
        * u.powf(-(nu + 3.0));
    (beta, d1, d2, d3)
}

/// Grid certificate for the derivative sign pattern of `β`.
#[derive(Debug, Clone, Copy)]
pub struct SignCertificate {
    pub nu: f64,
    pub grid_points: usize,
    /// Largest first derivative on `[0, π]` (must be ≤ 0 up to 1e−12).
    pub worst_d1: f64,
    /// Smallest second derivative on `[δ, π]` (must be ≥ 0 up to 1e−12).
    pub worst_d2: f64,
    /// Largest third derivative on `[ε, π]` (must be ≤ 0 up to 1e−12).
    pub worst_d3: f64,
}

impl SignCertificate {
    pub fn passed(&self) -> bool {
        self.worst_d1 <= 1e-12 && self.worst_d2 >= -1e-12 && self.worst_d3 <= 1e-12
    }
}

/// Check the three sign conditions on dense uniform grids:
/// `β′ ≤ 0` on `[0, π]`, `β″ ≥ 0` on `[δ, π]`, `β‴ ≤ 0` on `[ε, π]`.
pub fn certify_derivative_signs(
    cst: &Constants,
    nu: f64,
    grid_n: usize,
) -> Result<SignCertificate> {
    if !(0.0..=1.0).contains(&nu) {
        return Err(Error::InvalidParameter {
            name: "nu",
            value: nu,
            reason: "the exponent must lie in [0, 1]",
        });
    }
    if grid_n < 10_000 {
        return Err(Error::InvalidParameter {
            name: "grid_n",
            value: grid_n as f64,
            reason: "the sign certificate needs at least 10⁴ grid points",
        });
    }
    let sweep = |a: f64, b: f64, pick: fn(&(f64, f64, f64, f64)) -> f64, max: bool| {
        let mut worst = if max { f64::NEG_INFINITY } else { f64::INFINITY };
        for i in 0..=grid_n {
            let phi = a + (b - a) * i as f64 / grid_n as f64;
            let v = pick(&kernel_power_derivatives(cst, nu, phi));
            worst = if max { worst.max(v) } else { worst.min(v) };
        }
        worst
    };
    Ok(SignCertificate {
        nu,
        grid_points: grid_n + 1,
        worst_d1: sweep(0.0, PI, |t| t.1, true),
        worst_d2: sweep(cst.delta, PI, |t| t.2, false),
        worst_d3: sweep(cst.epsilon, PI, |t| t.3, true),
    })
}

/// Coefficients of the quartic after shifting by 2; all positive, which
/// is the whole positivity argument for `x > 2`.
pub const SHIFTED_QUARTIC_COEFFS: [f64; 5] = [16.0, 84.0, 140.0, 73.0, 3.0];

/// Both forms of the quartic: direct `16x⁴ − 44x³ + 20x² + 9x + 1` and the
/// same polynomial written in powers of `x − 2`.
pub fn quartic_forms(x: f64) -> (f64, f64) {
    let direct = (((16.0 * x - 44.0) * x + 20.0) * x + 9.0) * x + 1.0;
    let y = x - 2.0;
    let shifted = SHIFTED_QUARTIC_COEFFS
        .iter()
        .fold(0.0, |acc, &coef| acc * y + coef);
    (direct, shifted)
}

/// Outcome of the quartic positivity check for one genus.
#[derive(Debug, Clone, Copy)]
pub struct QuarticCheck {
    pub x: f64,
    pub value: f64,
    /// Whether every coefficient of the shifted form is positive — the
    /// reason the value must be positive for `x > 2`.
    pub shifted_coeffs_positive: bool,
}

/// Evaluate the quartic at `x = cot²(π/4g)` in both forms, require they
/// agree to 1e−9 relative, and that the value is positive with `x > 2`.
pub fn quartic_positivity(g: u32) -> Result<QuarticCheck> {
    let cst = constants(g)?;
    let (direct, shifted) = quartic_forms(cst.x);
    if (direct - shifted).abs() > 1e-9 * direct.abs().max(1.0) {
        return Err(Error::Internal(format!(
            "quartic forms disagree at g={g}: {direct} vs {shifted}"
        )));
    }
    if !(cst.x > 2.0 && direct > 0.0) {
        return Err(Error::Internal(format!(
            "quartic positivity broken at g={g}: x={}, value={direct}",
            cst.x
        )));
    }
    Ok(QuarticCheck {
        x: cst.x,
        value: direct,
        shifted_coeffs_positive: SHIFTED_QUARTIC_COEFFS.iter().all(|&c| c > 0.0),
    })
}

/// The rate `(4g−1)·(s − c·cos(π/2g) + ν s sin²(π/2g)) / (c − s·cos(π/2g))²`
/// that the slope comparison measures `1/δ` against.
pub fn curvature_rate(cst: &Constants, nu: f64) -> f64 {
    let a = PI / (2.0 * cst.g as f64);
    let (c, s) = (cst.c, cst.s);
    let num = s - c * a.cos() + nu * s * a.sin().powi(2);
    (4.0 * cst.g as f64 - 1.0) * num / (c - s * a.cos()).powi(2)
}

/// One row of the per-genus scalar inequality table.
#[derive(Debug, Clone, Copy)]
pub struct PocketRow {
    pub g: u32,
    pub delta: f64,
    /// `curvature_rate` at ν = 1, the worst exponent.
    pub rate: f64,
    /// `1/δ − rate`; nonnegative exactly when the check passes.
    pub margin: f64,
    pub pass: bool,
}

/// Check `1/δ ≥ rate(1)` for every genus in `[2, g_max]`.
pub fn pocket_check(g_max: u32) -> Result<Vec<PocketRow>> {
    if g_max < 2 {
        return Err(Error::InvalidGenus(g_max as u64));
    }
    (2..=g_max)
        .map(|g| {
            let cst = constants(g)?;
            let rate = curvature_rate(&cst, 1.0);
            let margin = 1.0 / cst.delta - rate;
            Ok(PocketRow {
                g,
                delta: cst.delta,
                rate,
                margin,
                pass: margin >= 0.0,
            })
        })
        .collect()
}

/// First failing genus in a pocket-check table, if any.
pub fn first_fail(rows: &[PocketRow]) -> Option<u32> {
    rows.iter().find(|r| !r.pass).map(|r| r.g)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn c2() -> Constants {
        constants(2).unwrap()
    }

    #[test]
    fn genus_two_constants_match_closed_values() {
        let c = c2();
        assert!((c.d - 3.057).abs() < 5e-4);
        assert!((c.x - (3.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12 * c.x);
        assert!((c.c - (5.0 + 4.0 * 2f64.sqrt())).abs() < 1e-12 * c.c);
        assert!((c.c - 10.657).abs() < 1e-3);
        assert!(constants(1).is_err());
    }

    #[test]
    fn tile_distance_increases_with_genus() {
        let mut last = 0.0;
        for g in 2..=50 {
            let d = constants(g).unwrap().d;
            assert!(d > last);
            last = d;
        }
    }

    #[test]
    fn kernel_special_angles() {
        let rho = 1.7;
        assert!((kernel(rho, 0.0).unwrap() - rho.exp()).abs() < 1e-12 * rho.exp());
        assert!((kernel(rho, PI / 2.0).unwrap() - 1.0 / rho.cosh()).abs() < 1e-15);
        assert!((kernel(rho, PI).unwrap() - (-rho).exp()).abs() < 1e-15);
        assert!(kernel(0.0, 1.0).is_err());
        assert!(kernel(-1.0, 1.0).is_err());
    }

    #[test]
    fn zero_exponent_mean_is_one() {
        for g in [2u32, 3, 7] {
            let c = constants(g).unwrap();
            for phi in [0.0, 0.1, 0.5] {
                assert!((mean_kernel_power(&c, 0.0, phi) - 1.0).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn mean_matches_published_samples() {
        assert!((mean_kernel_power(&c2(), 0.2990, 0.0) - 0.7675).abs() < 1e-4);
        let c3 = constants(3).unwrap();
        assert!((mean_kernel_power(&c3, 0.2944, 0.0) - 0.6588).abs() < 1e-4);
    }

    #[test]
    fn mean_is_even_and_periodic() {
        let c = c2();
        let period = PI / (2.0 * c.g as f64);
        for (i, nu) in [0.13, 0.47, 0.88, 1.0].iter().enumerate() {
            let phi = 0.05 + 0.11 * i as f64;
            let f0 = mean_kernel_power(&c, *nu, phi);
            let fm = mean_kernel_power(&c, *nu, -phi);
            let fp = mean_kernel_power(&c, *nu, phi + period);
            assert!((f0 - fm).abs() < 1e-12 * f0);
            assert!((f0 - fp).abs() < 1e-12 * f0);
        }
    }

    #[test]
    fn scan_finds_the_maximum_at_zero() {
        let c = c2();
        for nu in [0.2990, 1.0] {
            let ev = scan_max(&c, nu, PI / (128.0 * 2.0)).unwrap();
            assert!(ev.max_phi.abs() < 1e-9, "argmax {}", ev.max_phi);
            assert!(ev.max_is_at_zero());
        }
        let ev0 = scan_max(&c, 0.0, PI / (128.0 * 2.0)).unwrap();
        assert!((ev0.max_value - 1.0).abs() < 1e-14);
        assert_eq!(ev0.max_phi, 0.0);
        assert!(scan_max(&c, 0.5, 1.0).is_err());
    }

    #[test]
    fn exponent_optimization_matches_published_rows() {
        for (g, nu_ref, bound_ref) in
            [(2u32, 0.2990, 0.7675), (5, 0.2926, 0.5352), (10, 0.2905, 0.3956)]
        {
            let c = constants(g).unwrap();
            let (nu, bound) = optimize_exponent(&c, 1e-6).unwrap();
            assert!((nu - nu_ref).abs() < 1e-3, "g={g} nu={nu}");
            assert!((bound - bound_ref).abs() < 1e-4, "g={g} bound={bound}");
        }
        assert!(optimize_exponent(&c2(), 0.0).is_err());
        assert!(optimize_exponent(&c2(), 1e-2).is_err());
    }

    #[test]
    fn derivatives_vanish_at_the_symmetry_angles() {
        let c = c2();
        let (_, d1, _, d3) = kernel_power_derivatives(&c, 0.37, 0.0);
        assert_eq!(d1, 0.0);
        assert_eq!(d3, 0.0);
        let (_, d1, _, d3) = kernel_power_derivatives(&c, 0.37, PI);
        assert!(d1.abs() < 1e-15);
        assert!(d3.abs() < 1e-15);
    }

    #[test]
    fn closed_form_derivatives_match_difference_quotients() {
        let h = 1e-5;
        for g in [2u32, 5] {
            let c = constants(g).unwrap();
            for nu in [0.1, 0.5, 0.9] {
                for phi in [0.3, 1.0, 2.0, 2.8] {
                    let at = |p: f64| kernel_power_derivatives(&c, nu, p);
                    let (_, d1, d2, d3) = at(phi);
                    let diff_b = (at(phi + h).0 - at(phi - h).0) / (2.0 * h);
                    let diff_d1 = (at(phi + h).1 - at(phi - h).1) / (2.0 * h);
                    let diff_d2 = (at(phi + h).2 - at(phi - h).2) / (2.0 * h);
                    assert!((d1 - diff_b).abs() < 1e-6 * d1.abs().max(1e-3));
                    assert!((d2 - diff_d1).abs() < 1e-6 * d2.abs().max(1e-3));
                    assert!((d3 - diff_d2).abs() < 1e-6 * d3.abs().max(1e-3));
                }
            }
        }
    }

    #[test]
    fn sign_certificates_hold_on_dense_grids() {
        let c = c2();
        let cert = certify_derivative_signs(&c, 0.5, 100_000).unwrap();
        assert!(cert.passed());
        assert!(cert.worst_d1 <= 0.0);
        let c27 = constants(27).unwrap();
        assert!(certify_derivative_signs(&c27, 1.0, 10_000).unwrap().passed());
        // ν = 0 keeps β constant: all derivatives vanish identically.
        let cert0 = certify_derivative_signs(&c, 0.0, 10_000).unwrap();
        assert!(cert0.passed());
        assert!(cert0.worst_d1.abs() < 1e-15 && cert0.worst_d2.abs() < 1e-15);
        assert!(certify_derivative_signs(&c, 1.5, 10_000).is_err());
        assert!(certify_derivative_signs(&c, 0.5, 100).is_err());
    }

    #[test]
    fn quartic_is_positive_past_two() {
        let (direct, shifted) = quartic_forms(2.0);
        assert_eq!(shifted, 3.0);
        assert!((direct - 3.0).abs() < 1e-12);
        for g in 2..=27 {
            let q = quartic_positivity(g).unwrap();
            assert!(q.value > 0.0 && q.x > 2.0 && q.shifted_coeffs_positive);
        }
    }

    #[test]
    fn curvature_rate_grows_with_the_exponent() {
        for g in [2u32, 27] {
            let c = constants(g).unwrap();
            assert!(curvature_rate(&c, 1.0) >= curvature_rate(&c, 0.0));
        }
    }

    #[test]
    fn scalar_inequality_holds_well_past_the_stated_range() {
        let rows = pocket_check(100).unwrap();
        assert_eq!(rows.len(), 99);
        assert!(first_fail(&rows).is_none());
        for r in &rows {
            assert!(r.pass && r.margin > 0.0, "g = {}", r.g);
        }
        assert!(pocket_check(1).is_err());
    }

    #[test]
    fn optimized_bound_is_certified_for_the_table_range() {
        for g in 2..=10 {
            let c = constants(g).unwrap();
            let ub = optimized_upper_bound(&c, 1e-6, None).unwrap();
            assert!(ub.evaluation.max_is_at_zero(), "g = {g}");
            // The scan never reports a bound below the closed evaluation
            // at zero.
            assert!(ub.bound >= ub.evaluation.value_at_zero - 1e-12);
            // Poisson improves on the 1-form bound for every table genus.
            let (_, c_star) = crate::bounds::one_form_bound(4 * g as u64).unwrap();
            assert!(ub.bound < c_star);
        }
    }
}
