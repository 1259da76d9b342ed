//! Exact combinatorial helpers for multi-index sums.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::One;

use crate::scalar::Scalar;

pub(crate) fn factorial(n: u32) -> BigInt {
    let mut f = BigInt::one();
    for k in 2..=n {
        f *= BigInt::from(k);
    }
    f
}

pub(crate) fn binomial(n: u32, k: u32) -> BigInt {
    if k > n {
        return BigInt::from(0);
    }
    let mut num = BigInt::one();
    for j in 0..k {
        num *= BigInt::from(n - j);
    }
    num / factorial(k)
}

/// Product of per-slot factorials of a multi-index.
pub(crate) fn multi_factorial(exp: &[u32]) -> BigInt {
    exp.iter().map(|&e| factorial(e)).product()
}

/// Falling factorial `prod_i n_i (n_i - 1) ... (n_i - k_i + 1)`, i.e. the
/// exact coefficient picked up by `k`-fold differentiation of a monomial.
pub(crate) fn multi_falling(n: &[u32], k: &[u32]) -> BigInt {
    let mut out = BigInt::one();
    for (&ni, &ki) in n.iter().zip(k) {
        if ki > ni {
            return BigInt::from(0);
        }
        for j in 0..ki {
            out *= BigInt::from(ni - j);
        }
    }
    out
}

pub(crate) fn scalar_from_ratio(num: BigInt, den: BigInt) -> Scalar {
    Scalar::new(BigRational::new(num, den), BigRational::default())
}

/// All multi-indices `s` with `0 <= s <= bound` componentwise, in a
/// deterministic order.
pub(crate) fn multi_indices_up_to(bound: &[u32]) -> Vec<Vec<u32>> {
    let mut out = vec![Vec::new()];
    for &b in bound {
        let mut next = Vec::with_capacity(out.len() * (b as usize + 1));
        for prefix in &out {
            for v in 0..=b {
                let mut p = prefix.clone();
                p.push(v);
                next.push(p);
            }
        }
        out = next;
    }
    out
}

/// All multi-indices over `m` slots of total weight exactly `r`.
pub(crate) fn multi_indices_of_weight(m: usize, r: u32) -> Vec<Vec<u32>> {
    let mut out = Vec::new();
    let mut current = vec![0u32; m];
    fill(&mut out, &mut current, 0, r);
    out
}

fn fill(out: &mut Vec<Vec<u32>>, current: &mut Vec<u32>, slot: usize, remaining: u32) {
    if slot + 1 == current.len() {
        current[slot] = remaining;
        out.push(current.clone());
        return;
    }
    if current.is_empty() {
        if remaining == 0 {
            out.push(Vec::new());
        }
        return;
    }
    for v in 0..=remaining {
        current[slot] = v;
        fill(out, current, slot + 1, remaining - v);
    }
}
