//! Exact arithmetic with integer combinations of roots of unity.
//!
//! A value sum_k c_k zeta^k (zeta a fixed primitive E-th root of unity) is
//! held as the dense bucket vector (c_0, ..., c_{E-1}). Deciding whether the
//! value is zero uses the classical tensor basis: for each prime p dividing
//! E the relation 1 + zeta^{E/p} + ... + zeta^{(p-1)E/p} = 0 folds the top
//! p-adic digit away, and the surviving buckets form a Z-basis of Z[zeta].
//! Everything stays in integers; no floating point is ever involved.

/// Dense accumulator of exponents of a primitive `order`-th root of unity.
#[derive(Clone, Debug)]
pub struct RootSum {
    order: u64,
    buckets: Vec<i128>,
}

impl RootSum {
    pub fn new(order: u64) -> Self {
        assert!(order > 0);
        RootSum { order, buckets: vec![0; order as usize] }
    }

    pub fn order(&self) -> u64 {
        self.order
    }

    pub fn add_exponent(&mut self, k: u64, mult: i128) {
        let idx = (k % self.order) as usize;
        self.buckets[idx] = self.buckets[idx].checked_add(mult).expect("bucket overflow");
    }

    /// Adds the product of two exponent lists: every pair (a, b) contributes
    /// zeta^(a+b).
    pub fn add_product(&mut self, left: &[u64], right: &[u64]) {
        for &a in left {
            for &b in right {
                self.add_exponent(a + b, 1);
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.is_integer(0)
    }

    /// Exact test of `self == value` as an element of Z[zeta_order].
    pub fn is_integer(&self, value: i128) -> bool {
        let mut buckets = self.buckets.clone();
        buckets[0] = buckets[0].checked_sub(value).expect("bucket overflow");
        reduce_to_tensor_basis(self.order, &mut buckets);
        buckets.iter().all(|&c| c == 0)
    }
}

fn prime_factors(mut e: u64) -> Vec<(u64, u32)> {
    let mut out = Vec::new();
    let mut p = 2u64;
    while p * p <= e {
        if e % p == 0 {
            let mut k = 0;
            while e % p == 0 {
                e /= p;
                k += 1;
            }
            out.push((p, k));
        }
        p += 1;
    }
    if e > 1 {
        out.push((e, 1));
    }
    out
}

/// Folds every exponent whose p-adic top digit is p-1 (for each prime p
/// dividing the order) using the vanishing prime cycles. Afterwards the
/// nonzero buckets are coordinates in a Z-basis, so zero means zero.
fn reduce_to_tensor_basis(order: u64, buckets: &mut [i128]) {
    for (p, a) in prime_factors(order) {
        let pa = p.pow(a);
        let pa1 = p.pow(a - 1);
        // the unique shift that advances the p-digit by p^(a-1) and fixes
        // the coordinates at the other primes
        let rest = order / pa;
        let shift = {
            // solve s = pa1 mod pa, s = 0 mod rest via CRT
            let mut s = 0u64;
            while s % pa != pa1 % pa {
                s += rest;
            }
            s % order
        };
        for k in 0..order {
            let digit = (k % pa) / pa1;
            if digit != p - 1 {
                continue;
            }
            let c = buckets[k as usize];
            if c == 0 {
                continue;
            }
            buckets[k as usize] = 0;
            // zeta^k = -(zeta^(k+s) + zeta^(k+2s) + ... ) over the cycle
            let mut t = k;
            for _ in 1..p {
                t = (t + shift) % order;
                buckets[t as usize] =
                    buckets[t as usize].checked_sub(c).expect("fold overflow");
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn full_cycle_sums_to_zero() {
        for e in [2u64, 3, 4, 6, 8, 12, 30, 36, 210] {
            let mut s = RootSum::new(e);
            for k in 0..e {
                s.add_exponent(k, 1);
            }
            assert!(s.is_zero(), "order {e}");
        }
    }

    #[test]
    fn single_root_is_not_zero() {
        for e in [2u64, 3, 12, 30] {
            for k in 0..e {
                let mut s = RootSum::new(e);
                s.add_exponent(k, 1);
                assert!(!s.is_zero(), "zeta_{e}^{k}");
                assert_eq!(s.is_integer(1), k == 0);
            }
        }
    }

    #[test]
    fn prime_subcycles_vanish() {
        // inside order 12: the three 4th roots of unity spaced by 4 sum with
        // 1 + zeta^4 + zeta^8 = 0, and shifted copies too
        let mut s = RootSum::new(12);
        for k in [5u64, 9, 1] {
            s.add_exponent(k, 3);
        }
        assert!(s.is_zero());
        // 1 + zeta^6 = 0 at order 12
        let mut s = RootSum::new(12);
        s.add_exponent(2, 7);
        s.add_exponent(8, 7);
        assert!(s.is_zero());
    }

    #[test]
    fn norm_of_gaussian_sum() {
        // (1 + i)(1 - i) = 2 with i = zeta_4
        let mut s = RootSum::new(4);
        s.add_product(&[0, 1], &[0, 3]);
        assert!(s.is_integer(2));
        assert!(!s.is_integer(1));
    }

    #[test]
    fn detects_near_misses() {
        // 1 + zeta_3 + zeta_3^2 = 0 but 1 + zeta_3 + zeta_3 is not
        let mut s = RootSum::new(3);
        s.add_exponent(0, 1);
        s.add_exponent(1, 2);
        assert!(!s.is_zero());
        let mut s = RootSum::new(3);
        s.add_exponent(0, 5);
        s.add_exponent(1, 5);
        s.add_exponent(2, 5);
        assert!(s.is_zero());
    }

    #[test]
    fn composite_order_mixed_relations() {
        // zeta_6 = -zeta_6^4 since zeta_6^3 = -1: check 1 + zeta^1 + zeta^3 + zeta^4 = 0
        let mut s = RootSum::new(6);
        for k in [0u64, 1, 3, 4] {
            s.add_exponent(k, 11);
        }
        assert!(s.is_zero());
    }
}
