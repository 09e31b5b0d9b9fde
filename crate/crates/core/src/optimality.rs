//! Directional derivatives of `log det`, the Kiefer–Wolfowitz equivalence
//! check and D-efficiency.

use alloc::vec::Vec;

use crate::error::{Error, Result};
use crate::linalg::{pair_quadratic_form, InfoMatrix};
use crate::math;
use crate::model::{information_matrix, information_matrix_from, pairs, Design, Pair, Parameters};

/// Absolute tolerance on the directional derivative for certification.
pub const KW_TOLERANCE: f64 = 1e-7;

/// Outcome of the equivalence-theorem check for one design.
#[derive(Clone, Debug, PartialEq)]
pub struct KwCertificate {
    /// `λ_{ij} f(i,j)ᵀ M⁻¹ f(i,j) − (m−1)` for each checked pair.
    /// Empty when the information matrix is singular.
    pub derivatives: Vec<(Pair, f64)>,
    /// Largest derivative; `+∞` when singular.
    pub max_violation: f64,
    pub is_optimal: bool,
    /// Pairs whose derivative vanishes within the tolerance.
    pub equality_pairs: Vec<Pair>,
    pub singular: bool,
    pub tolerance: f64,
}

impl KwCertificate {
    fn singular(tolerance: f64) -> KwCertificate {
        KwCertificate {
            derivatives: Vec::new(),
            max_violation: f64::INFINITY,
            is_optimal: false,
            equality_pairs: Vec::new(),
            singular: true,
            tolerance,
        }
    }

    pub fn derivative(&self, pair: Pair) -> Option<f64> {
        self.derivatives.iter().find(|(p, _)| *p == pair).map(|(_, d)| *d)
    }
}

/// Standardized variances `d_{ij} = λ_{ij} f(i,j)ᵀ M⁻¹ f(i,j)` for all pairs.
pub fn variance_function(design: &Design, params: &Parameters) -> Result<Vec<f64>> {
    let inv = information_matrix(design, params)?.inverse()?;
    let m = params.m();
    Ok(pairs(m).map(|p| params.intensity(p) * pair_quadratic_form(&inv, p, m)).collect())
}

/// Same as [`variance_function`] from raw pair-index arrays.
pub(crate) fn variances_from(m: usize, weights: &[f64], lambda: &[f64]) -> Result<(InfoMatrix, Vec<f64>)> {
    let info = information_matrix_from(m, weights, lambda);
    let inv = info.inverse()?;
    let d = pairs(m)
        .enumerate()
        .map(|(k, p)| lambda[k] * pair_quadratic_form(&inv, p, m))
        .collect();
    Ok((info, d))
}

/// Derivative of `log det M` at `ξ` towards the one-point design on `pair`.
pub fn directional_derivative(design: &Design, params: &Parameters, pair: Pair) -> Result<f64> {
    pair.check(params.m())?;
    let info = information_matrix(design, params)?;
    let m = params.m();
    let inv = info.inverse()?;
    Ok(params.intensity(pair) * pair_quadratic_form(&inv, pair, m) - (m - 1) as f64)
}

/// Checks `λ_{ij} fᵀM⁻¹f ≤ m−1` for every pair with [`KW_TOLERANCE`].
pub fn kw_check(design: &Design, params: &Parameters) -> Result<KwCertificate> {
    kw_check_with_tolerance(design, params, KW_TOLERANCE)
}

pub fn kw_check_with_tolerance(design: &Design, params: &Parameters, tolerance: f64) -> Result<KwCertificate> {
    let all: Vec<Pair> = pairs(params.m()).collect();
    kw_check_on(design, params, &all, tolerance)
}

/// Equivalence check restricted to the listed pairs.
pub fn kw_check_on(design: &Design, params: &Parameters, candidates: &[Pair], tolerance: f64) -> Result<KwCertificate> {
    let m = params.m();
    for p in candidates {
        p.check(m)?;
    }
    let d = match variance_function(design, params) {
        Ok(d) => d,
        Err(Error::Singular) => return Ok(KwCertificate::singular(tolerance)),
        Err(e) => return Err(e),
    };
    Ok(certificate_from(m, &d, candidates, tolerance))
}

pub(crate) fn certificate_from(m: usize, variances: &[f64], candidates: &[Pair], tolerance: f64) -> KwCertificate {
    let p = (m - 1) as f64;
    let derivatives: Vec<(Pair, f64)> = candidates
        .iter()
        .map(|q| (*q, variances[q.index(m)] - p))
        .collect();
    let max_violation = derivatives
        .iter()
        .map(|(_, d)| *d)
        .fold(f64::NEG_INFINITY, f64::max);
    let equality_pairs = derivatives
        .iter()
        .filter(|(_, d)| d.abs() <= tolerance)
        .map(|(q, _)| *q)
        .collect();
    KwCertificate {
        derivatives,
        max_violation,
        is_optimal: max_violation <= tolerance,
        equality_pairs,
        singular: false,
        tolerance,
    }
}

/// `(det M(ξ) / det M(ξ_ref))^{1/(m−1)}`; zero for a singular `ξ`.
pub fn d_efficiency(design: &Design, reference: &Design, params: &Parameters) -> Result<f64> {
    let reference_ld = information_matrix(reference, params)?
        .log_det()
        .ok_or(Error::Singular)?;
    let Some(ld) = information_matrix(design, params)?.log_det() else {
        return Ok(0.0);
    };
    Ok(math::exp((ld - reference_ld) / (params.m() - 1) as f64))
}
