//! Dimensional constants.
//!
//! All indices are plain `usize` dimensions. Gamma values are only ever needed
//! at half-integers, where the recurrence `Γ(x + 1) = x Γ(x)` started from
//! `Γ(1) = 1` and `Γ(1/2) = √π` is exact up to rounding, so no general gamma
//! approximation is used.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Largest dimension accepted by the fallible constants.
pub const MAX_DIM: usize = 64;

fn check_dim(name: &str, value: usize) -> Result<()> {
    if value > MAX_DIM {
        return Err(Error::domain(format!(
            "{name} = {value} exceeds the supported maximum dimension {MAX_DIM}"
        )));
    }
    Ok(())
}

/// `Γ(m / 2)` for `m ≥ 1`.
pub fn gamma_half(m: usize) -> f64 {
    assert!(m >= 1, "gamma_half requires m >= 1");
    let (mut value, mut x) = if m.is_multiple_of(2) { (1.0, 1.0) } else { (PI.sqrt(), 0.5) };
    let target = m as f64 / 2.0;
    while x < target {
        value *= x;
        x += 1.0;
    }
    value
}

/// Volume of the unit ball in `R^n`, `π^{n/2} / Γ(1 + n/2)`.
pub fn kappa(n: usize) -> f64 {
    PI.powf(n as f64 / 2.0) / gamma_half(n + 2)
}

/// Surface area of the unit sphere `S^{n-1}`, `n κ_n`. Undefined for `n = 0`.
pub fn omega(n: usize) -> Result<f64> {
    if n == 0 {
        return Err(Error::domain("omega(0) undefined by convention"));
    }
    check_dim("n", n)?;
    Ok(n as f64 * kappa(n))
}

fn omega_product(indices: impl Iterator<Item = usize>) -> Result<f64> {
    indices.map(omega).product()
}

pub fn factorial(n: usize) -> f64 {
    (1..=n).map(|i| i as f64).product()
}

pub fn binomial(n: usize, m: usize) -> f64 {
    if m > n {
        return 0.0;
    }
    let m = m.min(n - m);
    (0..m).fold(1.0, |acc, i| acc * (n - i) as f64 / (i + 1) as f64)
}

/// `b_{n,q} = ω_{n-q+1}···ω_n / (ω_1···ω_q)`, with `b_{n,0} = 1`.
pub fn b_coeff(n: usize, q: usize) -> Result<f64> {
    if q > n {
        return Err(Error::domain(format!("b_coeff requires q <= n, got n = {n}, q = {q}")));
    }
    check_dim("n", n)?;
    let num = omega_product(n - q + 1..=n)?;
    let den = omega_product(1..=q)?;
    Ok(num / den)
}

/// Classical Crofton constant
/// `c^{r1,r2}_{s1,s2} = (r1! κ_{r1} / s1! κ_{s1}) (r2! κ_{r2} / s2! κ_{s2})`.
pub fn crofton_const(s1: usize, s2: usize, r1: usize, r2: usize) -> f64 {
    let fk = |i: usize| factorial(i) * kappa(i);
    (fk(r1) / fk(s1)) * (fk(r2) / fk(s2))
}

/// Blaschke–Petkantschin constant of the rotational design,
///
/// `α_{n,k,q,r} = (ω_{k-q-r}···ω_{k-q}) / (ω_{n-q-r}···ω_{n-q}) · Π_{i<r} ω_{n-i}/ω_{k-i}`.
///
/// Requires `q + r + 1 ≤ k ≤ n`, so that no `ω_0` is touched.
pub fn alpha_const(n: usize, k: usize, q: usize, r: usize) -> Result<f64> {
    if k > n {
        return Err(Error::domain(format!("alpha_const requires k <= n, got n = {n}, k = {k}")));
    }
    if q + r + 1 > k {
        return Err(Error::domain(format!(
            "alpha_const requires q + r + 1 <= k (k - q - r would index omega(0)), got k = {k}, q = {q}, r = {r}"
        )));
    }
    check_dim("n", n)?;
    let num = omega_product(k - q - r..=k - q)?;
    let den = omega_product(n - q - r..=n - q)?;
    let tail = (0..r).try_fold(1.0, |acc, i| Ok::<_, Error>(acc * omega(n - i)? / omega(k - i)?))?;
    Ok(num / den * tail)
}

/// Leading constant of the rotational measurement function,
/// `c_0(q) = α_{n,k,q,r}^{-1} c^{q-j,n}_{n-j,q}`.
pub fn c0_const(n: usize, k: usize, q: usize, r: usize, j: usize) -> Result<f64> {
    if j > q {
        return Err(Error::domain(format!("c0_const requires j <= q, got j = {j}, q = {q}")));
    }
    let alpha = alpha_const(n, k, q, r)?;
    Ok(crofton_const(n - j, q, q - j, n) / alpha)
}

/// Leading constant of the vertical-sections measurement function,
///
/// `d_{n,k,r,j}(q) = (b_{n-r,q}/b_{k-r,q}) (b_{k,q}/b_{n,q}) c^{q-j,n}_{n-j,q}`.
///
/// Evaluated through the `b` ratios only, so `q = k - r` is admissible.
pub fn d_const(n: usize, k: usize, r: usize, j: usize, q: usize) -> Result<f64> {
    if r + 1 > k || k > n {
        return Err(Error::domain(format!(
            "d_const requires r + 1 <= k <= n, got n = {n}, k = {k}, r = {r}"
        )));
    }
    if j > q || q > k - r {
        return Err(Error::domain(format!(
            "d_const requires j <= q <= k - r, got j = {j}, q = {q}, k - r = {}",
            k - r
        )));
    }
    let ratio = b_coeff(n - r, q)? / b_coeff(k - r, q)? * (b_coeff(k, q)? / b_coeff(n, q)?);
    Ok(ratio * crofton_const(n - j, q, q - j, n))
}

/// `∫_{S^{d-1}} ‖p(u | L')‖^j du = ω_{d+j} ω_p / ω_{p+j}` for `L' ∈ G(d, p)`, `1 ≤ p ≤ d`.
pub fn sphere_projection_moment(d: usize, j: usize, p: usize) -> Result<f64> {
    if p == 0 || p > d {
        return Err(Error::domain(format!(
            "sphere_projection_moment requires 1 <= p <= d, got d = {d}, p = {p}"
        )));
    }
    Ok(omega(d + j)? * omega(p)? / omega(p + j)?)
}

/// Intrinsic volume `V_m` of a ball of radius `radius` in `R^n`:
/// `C(n, m) κ_n / κ_{n-m} radius^m`.
pub fn ball_intrinsic_volume(n: usize, m: usize, radius: f64) -> f64 {
    if m > n {
        return 0.0;
    }
    binomial(n, m) * kappa(n) / kappa(n - m) * radius.powi(m as i32)
}
