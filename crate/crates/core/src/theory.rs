//! Closed-form bias and variance expansions of the difference estimators.
//!
//! Remainder terms are only known up to order, so they are returned as
//! magnitudes next to the point predictions and never folded into them.
//! Hypotheses such as Gaussian errors or growth conditions on the jump
//! functionals are not enforced; callers use these evaluators outside the
//! proven regime on purpose (t₄ and AR(1) errors).

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::signal::{scheme_bias_polynomial, DifferenceScheme};

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct LeadingTerms {
    /// Jump-free value (`γ_0`, or `(2m+3)γ_0²/n` for the variance).
    pub main: f64,
    /// Contribution of the step component.
    pub jump_correction: f64,
    /// Magnitude of the first neglected term, constant unknown.
    pub remainder_order: f64,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AsymptoticPrediction {
    pub expected_value: f64,
    pub variance: f64,
    pub mean_terms: LeadingTerms,
    pub variance_terms: LeadingTerms,
}

fn effective_length(n: usize, lost: usize) -> f64 {
    n as f64 - lost as f64
}

/// `E[γ̂_0] ≈ γ_0 + (m+1) J_K / (4 n_m)` with `n_m = n − (m+1)`.
pub fn predict_mean_gamma0(gamma0: f64, m: usize, n: usize, jk: f64) -> f64 {
    gamma0 + (m + 1) as f64 * jk / (4.0 * effective_length(n, m + 1))
}

/// `E[Q(y; (1,−1), h)] ≈ γ_0 − γ_h + h J_K / (4 (n − h))`.
pub fn predict_mean_qh(gamma0: f64, gamma_h: f64, h: usize, n: usize, jk: f64) -> f64 {
    gamma0 - gamma_h + h as f64 * jk / (4.0 * effective_length(n, h))
}

/// `E[γ̂_h]` implied by the two mean expansions.
pub fn predict_mean_gamma_h(gamma0: f64, gamma_h: f64, m: usize, h: usize, n: usize, jk: f64) -> f64 {
    predict_mean_gamma0(gamma0, m, n, jk) - predict_mean_qh(gamma0, gamma_h, h, n, jk)
}

/// `Var(γ̂_0) ≈ (2m+3) γ_0² / n + (m+1)(m+2) γ_0 J_K / n²`.
pub fn predict_var_gamma0(gamma0: f64, m: usize, n: usize, jk: f64) -> f64 {
    let nf = n as f64;
    let m = m as f64;
    (2.0 * m + 3.0) * gamma0 * gamma0 / nf + (m + 1.0) * (m + 2.0) * gamma0 * jk / (nf * nf)
}

/// Both expansions for `γ̂_0`, with remainder magnitudes.
pub fn predict_gamma0(gamma0: f64, m: usize, n: usize, jk: f64, jk_tv: f64) -> AsymptoticPrediction {
    let n_m = effective_length(n, m + 1);
    let nf = n as f64;
    let mean = predict_mean_gamma0(gamma0, m, n, jk);
    let variance = predict_var_gamma0(gamma0, m, n, jk);
    let main_var = (2 * m + 3) as f64 * gamma0 * gamma0 / nf;
    AsymptoticPrediction {
        expected_value: mean,
        variance,
        mean_terms: LeadingTerms {
            main: gamma0,
            jump_correction: mean - gamma0,
            remainder_order: (m + 1) as f64 * jk_tv / (n_m * n_m),
        },
        variance_terms: LeadingTerms {
            main: main_var,
            jump_correction: variance - main_var,
            remainder_order: 1.0 / (nf * nf),
        },
    }
}

/// Order magnitudes of `Var(γ̂_h)`: `J_K/n²`, `H_{K,h}/n³` and `1/n`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct VarianceOrders {
    pub quadratic_variation: f64,
    pub weighted_jumps: f64,
    pub noise: f64,
}

pub fn predict_var_gammah_order(m: usize, h: usize, n: usize, jk: f64, weighted: f64) -> Result<VarianceOrders> {
    if h == 0 || h > m {
        return Err(Error::InvalidArgument(format!("lag h must lie in 1..={m}, got {h}")));
    }
    let nf = n as f64;
    Ok(VarianceOrders {
        quadratic_variation: jk / (nf * nf),
        weighted_jumps: weighted / (nf * nf * nf),
        noise: 1.0 / nf,
    })
}

/// Ratios `K_n / n^{1/2−ε}` and `max jump / n^{ε/2}`; both must shrink along a
/// sequence of sample sizes for the root-n regime.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RootnDiagnostic {
    pub count_ratio: f64,
    pub jump_ratio: f64,
}

pub fn check_rootn_regime(jumps: usize, max_jump: f64, n: usize, eps: f64) -> Result<RootnDiagnostic> {
    if !(eps > 0.0 && eps < 0.5) {
        return Err(Error::InvalidArgument(format!(
            "epsilon must lie in (0, 1/2), got {eps}"
        )));
    }
    let nf = n as f64;
    Ok(RootnDiagnostic {
        count_ratio: jumps as f64 / nf.powf(0.5 - eps),
        jump_ratio: max_jump / nf.powf(eps / 2.0),
    })
}

/// The two bias magnitudes of a general scheme `Q_{l,gap}`:
/// `gap·J_K^|| Σ_r |S_r| / (2 N² p(d))` and `gap·J_K P_l(d) / (2 N p(d))`
/// with `N = n − l·gap`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct BiasOrders {
    pub total_variation_term: f64,
    pub quadratic_variation_term: f64,
}

pub fn predict_bias_general(scheme: &DifferenceScheme, n: usize, jk: f64, jk_tv: f64) -> Result<BiasOrders> {
    if !scheme.is_contrast() {
        return Err(Error::InvalidScheme("weights must sum to zero".into()));
    }
    if n <= scheme.span() {
        return Err(Error::SeriesTooShort {
            required: scheme.span() + 1,
            actual: n,
        });
    }
    let count = effective_length(n, scheme.span());
    let gap = scheme.gap() as f64;
    let p = scheme.norm_sq();
    let abs_partial: f64 = scheme.partial_sums().iter().map(|s| s.abs()).sum();
    Ok(BiasOrders {
        total_variation_term: gap * jk_tv * abs_partial / (2.0 * count * count * p),
        quadratic_variation_term: gap * jk * scheme_bias_polynomial(scheme) / (2.0 * count * p),
    })
}

/// Exact `E[Q(y; d)]` for an arbitrary mean vector and error autocovariances
/// `acf[k] = γ_k` (zero beyond the slice). Needs no distributional assumption.
pub fn exact_mean_quadratic_form(mean: &[f64], scheme: &DifferenceScheme, acf: &[f64]) -> Result<f64> {
    let span = scheme.span();
    if mean.len() <= span {
        return Err(Error::SeriesTooShort {
            required: span + 1,
            actual: mean.len(),
        });
    }
    let gamma = |k: usize| acf.get(k).copied().unwrap_or(0.0);
    let w = scheme.weights();
    let gap = scheme.gap();
    let mut noise = 0.0;
    for (s, ds) in w.iter().enumerate() {
        for (t, dt) in w.iter().enumerate() {
            noise += ds * dt * gamma(s.abs_diff(t) * gap);
        }
    }
    let count = mean.len() - span;
    let signal: f64 = (0..count)
        .map(|i| {
            let d: f64 = w.iter().enumerate().map(|(s, ds)| ds * mean[i + s * gap]).sum();
            d * d
        })
        .sum::<f64>()
        / count as f64;
    Ok((noise + signal) / scheme.norm_sq())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::signal::{evaluate_mean, quadratic_variation, SmoothComponent, StepSignal};
    use approx::assert_abs_diff_eq;
    use proptest::prelude::*;

    #[test]
    fn mean_gamma0_examples() {
        assert_eq!(predict_mean_gamma0(1.3, 2, 500, 0.0), 1.3);
        assert_abs_diff_eq!(
            predict_mean_gamma0(1.0, 1, 1600, 204.0),
            1.0 + 408.0 / 6392.0,
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(predict_mean_gamma0(1.0, 1, 1600, 204.0), 1.06383, epsilon = 1e-5);
        assert_abs_diff_eq!(predict_mean_gamma0(1.0, 2, 1600, 204.0), 1.09580, epsilon = 1e-5);
    }

    #[test]
    fn mean_qh_examples() {
        assert_eq!(predict_mean_qh(2.0, 0.0, 1, 100, 0.0), 2.0);
        assert_abs_diff_eq!(predict_mean_qh(1.0, 0.4, 1, 1600, 204.0), 0.63190, epsilon = 1e-5);
        let combined = predict_mean_gamma_h(1.0, 0.4, 1, 1, 1600, 204.0);
        assert_abs_diff_eq!(combined, 0.43193, epsilon = 1e-5);
    }

    #[test]
    fn var_gamma0_examples() {
        assert_abs_diff_eq!(predict_var_gamma0(1.0, 1, 1000, 0.0), 0.005, epsilon = 1e-15);
        assert_abs_diff_eq!(predict_var_gamma0(1.0, 1, 1600, 204.0), 0.0036031, epsilon = 1e-7);
        assert_eq!(
            predict_var_gamma0(1.0, 3, 2000, 0.0),
            predict_var_gamma0(1.0, 3, 1000, 0.0) / 2.0
        );
        let p = predict_gamma0(1.0, 1, 1600, 204.0, 24.0);
        assert_abs_diff_eq!(p.variance_terms.main, 5.0 / 1600.0, epsilon = 1e-15);
        assert_abs_diff_eq!(
            p.variance_terms.jump_correction,
            6.0 * 204.0 / 1600.0f64.powi(2),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(
            p.mean_terms.remainder_order,
            2.0 * 24.0 / 1598.0f64.powi(2),
            epsilon = 1e-15
        );
    }

    #[test]
    fn var_gammah_orders() {
        let o = predict_var_gammah_order(2, 1, 500, 0.0, 0.0).unwrap();
        assert_eq!(
            (o.quadratic_variation, o.weighted_jumps, o.noise),
            (0.0, 0.0, 1.0 / 500.0)
        );
        let o = predict_var_gammah_order(1, 1, 1600, 204.0, 0.0).unwrap();
        assert_abs_diff_eq!(o.quadratic_variation, 7.97e-5, epsilon = 1e-7);
        let big = predict_var_gammah_order(1, 1, 6400, 204.0, 0.0).unwrap();
        assert_abs_diff_eq!(o.quadratic_variation / big.quadratic_variation, 16.0, epsilon = 1e-12);
        assert_abs_diff_eq!(o.noise / big.noise, 4.0, epsilon = 1e-12);
        assert!(predict_var_gammah_order(1, 2, 100, 0.0, 0.0).is_err());
        assert!(predict_var_gammah_order(1, 0, 100, 0.0, 0.0).is_err());
    }

    #[test]
    fn rootn_examples() {
        let d = check_rootn_regime(1, 1.0, 1_000_000, 0.25).unwrap();
        assert_abs_diff_eq!(d.count_ratio, 10f64.powf(-1.5), epsilon = 1e-12);
        assert_abs_diff_eq!(d.jump_ratio, 10f64.powf(-0.75), epsilon = 1e-12);
        let ratios: Vec<f64> = [400usize, 1600, 6400]
            .iter()
            .map(|&n| {
                let k = (n as f64).powf(0.2).floor() as usize;
                check_rootn_regime(k, 1.0, n, 0.25).unwrap().count_ratio
            })
            .collect();
        assert!(ratios[0] > ratios[1] && ratios[1] > ratios[2], "{ratios:?}");
        assert!(check_rootn_regime(1, 1.0, 100, 0.0).is_err());
        assert!(check_rootn_regime(1, 1.0, 100, 0.5).is_err());
    }

    #[test]
    fn general_bias_examples() {
        let d = DifferenceScheme::unit_difference(2);
        let o = predict_bias_general(&d, 1600, 0.0, 0.0).unwrap();
        assert_eq!((o.total_variation_term, o.quadratic_variation_term), (0.0, 0.0));
        let o = predict_bias_general(&d, 1600, 204.0, 24.0).unwrap();
        assert_abs_diff_eq!(
            o.quadratic_variation_term,
            2.0 * 204.0 / (2.0 * 1598.0 * 2.0),
            epsilon = 1e-15
        );
        assert_abs_diff_eq!(o.quadratic_variation_term, 0.0638, epsilon = 1e-4);
        assert_abs_diff_eq!(
            o.total_variation_term,
            2.0 * 24.0 / (2.0 * 1598.0f64.powi(2) * 2.0),
            epsilon = 1e-15
        );

        // second order (1,−2,1): P_2 = 1, p = 6, N = 1596
        let d2 = DifferenceScheme::new(vec![1.0, -2.0, 1.0], 2).unwrap();
        let o2 = predict_bias_general(&d2, 1600, 204.0, 24.0).unwrap();
        assert_abs_diff_eq!(
            o2.quadratic_variation_term,
            2.0 * 204.0 / (2.0 * 1596.0 * 6.0),
            epsilon = 1e-15
        );
        assert!(o2.quadratic_variation_term < o.quadratic_variation_term);

        let bad = DifferenceScheme::new(vec![1.0, -0.5], 2).unwrap();
        assert!(predict_bias_general(&bad, 1600, 1.0, 1.0).is_err());
    }

    #[test]
    fn exact_mean_agrees_with_jump_count() {
        // each jump δ is straddled by exactly `gap` unit differences
        let step = StepSignal::six_jump();
        let mean = evaluate_mean(&step, &SmoothComponent::Zero, 1600).unwrap();
        let d = DifferenceScheme::unit_difference(2);
        let e = exact_mean_quadratic_form(&mean, &d, &[1.0, 0.2]).unwrap();
        assert_abs_diff_eq!(
            e,
            1.0 + 2.0 * quadratic_variation(&step) / (2.0 * 1598.0),
            epsilon = 1e-12
        );
    }

    proptest! {
        #[test]
        fn gamma_h_offset_closed_form(g0 in 0.1f64..5.0, gh in -2.0f64..2.0, m in 1usize..6,
                                      n in 50usize..10_000, jk in 0.0f64..500.0, hs in 0usize..6) {
            let h = 1 + hs % m;
            let lhs = predict_mean_gamma_h(g0, gh, m, h, n, jk) - gh;
            let rhs = jk / 4.0 * ((m + 1) as f64 / (n - m - 1) as f64 - h as f64 / (n - h) as f64);
            prop_assert!((lhs - rhs).abs() <= 1e-12 * (1.0 + g0 + jk));
        }

        #[test]
        fn variance_prediction_nonnegative(g0 in 0.0f64..10.0, m in 0usize..8, n in 10usize..100_000,
                                           jk in 0.0f64..1e4) {
            prop_assert!(predict_var_gamma0(g0, m, n, jk) >= 0.0);
        }
    }
}
