//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use nalgebra::DMatrix;
use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, ToPrimitive, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use zollcut::{BandedHermitian, SimulationScale};

/// Dense `Q̂` built from the ladder rule, entry by entry.
pub fn dense_q(n: u32, dim: usize) -> DMatrix<f64> {
    let hbar = 1.0 / n as f64;
    let mut m = DMatrix::zeros(dim, dim);
    for col in 0..dim {
        if col >= 2 {
            m[(col - 2, col)] = hbar * ((col * (col - 1)) as f64).sqrt();
        }
        if col + 2 < dim {
            m[(col + 2, col)] = hbar * (((col + 1) * (col + 2)) as f64).sqrt();
        }
    }
    m
}

pub fn dense_projector(dim: usize, cutoff: usize) -> DMatrix<f64> {
    DMatrix::from_fn(dim, dim, |i, j| if i == j && i <= cutoff { 1.0 } else { 0.0 })
}

/// Random symmetric banded matrix with entries in [-1, 1].
pub fn random_banded(rng: &mut ChaCha8Rng, n: u32, dim: usize, bw: usize) -> BandedHermitian {
    let scale = SimulationScale::new(n).unwrap();
    let mut m = BandedHermitian::zeros(scale, dim, bw).unwrap();
    for i in 0..dim {
        for j in i..dim.min(i + bw + 1) {
            m.set(i, j, rng.gen_range(-1.0..1.0)).unwrap();
        }
    }
    m
}

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

/// Characteristic polynomial coefficients `det(λI − M) = Σ a_k λ^k`
/// (ascending) by Faddeev–LeVerrier.
pub fn char_poly(m: &DMatrix<f64>) -> Vec<f64> {
    let n = m.nrows();
    let mut coeffs = vec![0.0; n + 1];
    coeffs[n] = 1.0;
    let mut mk = DMatrix::<f64>::zeros(n, n);
    for k in 1..=n {
        mk = m * &mk + DMatrix::identity(n, n) * coeffs[n - k + 1];
        let am = m * &mk;
        coeffs[n - k] = -am.trace() / k as f64;
    }
    coeffs
}

fn horner(c: &[f64], x: f64) -> f64 {
    c.iter().rev().fold(0.0, |acc, &a| acc * x + a)
}

/// Real roots of a polynomial with simple real roots in `[-bound, bound]`,
/// by sign-change scan and bisection.
pub fn real_roots(c: &[f64], bound: f64) -> Vec<f64> {
    let samples = 200_000;
    let mut roots = Vec::new();
    let step = 2.0 * bound / samples as f64;
    let mut a = -bound;
    let mut fa = horner(c, a);
    for k in 1..=samples {
        let b = -bound + k as f64 * step;
        let fb = horner(c, b);
        if fa == 0.0 {
            roots.push(a);
        } else if fa * fb < 0.0 {
            let (mut lo, mut hi, mut flo) = (a, b, fa);
            for _ in 0..200 {
                let mid = 0.5 * (lo + hi);
                let fm = horner(c, mid);
                if fm == 0.0 {
                    lo = mid;
                    hi = mid;
                    break;
                }
                if flo * fm < 0.0 {
                    hi = mid;
                } else {
                    lo = mid;
                    flo = fm;
                }
            }
            roots.push(0.5 * (lo + hi));
        }
        a = b;
        fa = fb;
    }
    roots
}

/// `e^{−μ} Σ_{n≤K} μⁿ/n!` with the partial sum done in exact rational
/// arithmetic; `mu` must be a dyadic rational such as 42.25.
pub fn poisson_partial_mass(mu_num: i64, mu_den: i64, k: usize) -> f64 {
    let mu = BigRational::new(BigInt::from(mu_num), BigInt::from(mu_den));
    let mut term = BigRational::one();
    let mut sum = BigRational::zero();
    for n in 0..=k {
        if n > 0 {
            term = term * &mu / BigInt::from(n);
        }
        sum += &term;
    }
    // e^{−μ}·S computed as exp(ln S − μ) with S split into mantissa and exponent
    let mu_f = mu_num as f64 / mu_den as f64;
    let bits = sum.numer().bits() as i64 - sum.denom().bits() as i64;
    let shift = bits - 60;
    let scaled = if shift > 0 {
        sum / BigRational::from_integer(BigInt::one() << shift as usize)
    } else {
        sum * BigRational::from_integer(BigInt::one() << (-shift) as usize)
    };
    let mant = scaled.to_f64().unwrap();
    (mant.ln() + shift as f64 * std::f64::consts::LN_2 - mu_f).exp()
}
