//! Bulk bands of the SSH chain with parasitic couplings.

use num_complex::Complex64;
use omlat_core::SshCouplings;
use serde::Serialize;

/// `ρ(k) = J + J′e^{-ik} + J3 e^{ik} + J3′e^{-2ik}`.
pub fn bulk_rho_ssh(k: f64, c: &SshCouplings) -> Complex64 {
    c.bloch_series().rho(k)
}

/// Bulk bands `(E₋, E₊) = ε(k) ∓ |ρ(k)|` relative to the cavity frequency.
///
/// `J2` couples every site to its second neighbours on both sides, so its
/// diagonal Bloch term is `ε(k) = 2·J2·cos k`. This matches the spectrum of
/// chains built by `omlat_core::build_ssh_chain` with the same `J2`.
pub fn bulk_bands_ssh(k: f64, c: &SshCouplings) -> (f64, f64) {
    let eps = 2.0 * c.j2 * k.cos();
    let r = bulk_rho_ssh(k, c).norm();
    (eps - r, eps + r)
}

/// One row of a band-structure export.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct BandRow {
    pub k: f64,
    pub re_rho: f64,
    pub im_rho: f64,
    pub e_minus: f64,
    pub e_plus: f64,
}

/// Bands on `n` points `k_i = -π + 2πi/n`.
pub fn band_table(c: &SshCouplings, n: usize) -> Vec<BandRow> {
    (0..n)
        .map(|i| {
            let k = -std::f64::consts::PI + 2.0 * std::f64::consts::PI * i as f64 / n as f64;
            let rho = bulk_rho_ssh(k, c);
            let (e_minus, e_plus) = bulk_bands_ssh(k, c);
            BandRow {
                k,
                re_rho: rho.re,
                im_rho: rho.im,
                e_minus,
                e_plus,
            }
        })
        .collect()
}
