//! Tame symbol exponent tables for unramified extensions of local fields.
//!
//! All roots of unity are tracked additively as exponents of a fixed
//! generator of the residue multiplicative group: for an unramified degree-d
//! extension with residue cardinality q^d the relevant group is cyclic of
//! order N = q^d - 1. The tame symbol of two units reduces to residue
//! arithmetic; the symbol of the uniformizer against itself is the image of
//! -1 when the residue characteristic is odd and trivial when it is 2.

use crate::error::{Error, Result};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

/// Multiplicative generators of the field modulo n-th powers: the chosen
/// uniformizer and the fixed residue-field generator (a root of unity).
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Generator {
    Uniformizer,
    RootOfUnity,
}

/// Decomposes q as p^k for a prime p, or None when q is not a prime power.
pub fn prime_power(q: u64) -> Option<(u64, u32)> {
    if q < 2 {
        return None;
    }
    let mut p = 0u64;
    let mut m = 2u64;
    while m * m <= q {
        if q % m == 0 {
            p = m;
            break;
        }
        m += 1;
    }
    if p == 0 {
        return Some((q, 1));
    }
    let mut rest = q;
    let mut k = 0u32;
    while rest % p == 0 {
        rest /= p;
        k += 1;
    }
    if rest == 1 {
        Some((p, k))
    } else {
        None
    }
}

/// Exponent tables for the degree-n cover data over a field with residue
/// cardinality q and its unramified degree-d extension.
#[derive(Clone, Debug)]
pub struct SymbolTable {
    q: u64,
    d: u32,
    n: u64,
    /// N = q^d - 1, the order of the extension's residue generator.
    modulus: BigInt,
    /// m = (q - 1) / n.
    m: u64,
    /// r = (q^d - 1) / (q - 1).
    r: BigInt,
    /// Exponent of the uniformizer-vs-uniformizer symbol: N/2 for odd q,
    /// 0 for even q.
    h: BigInt,
}

impl SymbolTable {
    pub fn new(q: u64, d: u32, n: u64) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroOrder { d });
        }
        if q > (1 << 31) {
            return Err(Error::SmallQ { q });
        }
        let Some((_p, _k)) = prime_power(q) else {
            return Err(Error::NotPrimePower { q });
        };
        if q < 2 {
            return Err(Error::SmallQ { q });
        }
        if n == 0 || (q - 1) % n != 0 {
            return Err(Error::LevelDoesNotDivide { n, qm1: q - 1 });
        }
        let qb = BigInt::from(q);
        let modulus = qb.pow(d) - 1;
        let m = (q - 1) / n;
        let r = &modulus / BigInt::from(q - 1);
        let h = if q % 2 == 1 { &modulus / 2 } else { BigInt::zero() };
        Ok(SymbolTable { q, d, n, modulus, m, r, h })
    }

    pub fn q(&self) -> u64 {
        self.q
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn n(&self) -> u64 {
        self.n
    }

    /// N = q^d - 1.
    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn m(&self) -> u64 {
        self.m
    }

    pub fn r(&self) -> &BigInt {
        &self.r
    }

    pub fn h(&self) -> &BigInt {
        &self.h
    }

    /// m * r = N / n, the index of the degree-n roots inside the degree-N.
    pub fn genuine_divisor(&self) -> BigInt {
        BigInt::from(self.m) * &self.r
    }

    /// Exponent (mod N) of the tame symbol of two generators over the
    /// extension field at full level N.
    pub fn generator_symbol_exponent(&self, a: Generator, b: Generator) -> BigInt {
        use Generator::*;
        match (a, b) {
            (Uniformizer, Uniformizer) => self.h.clone(),
            (Uniformizer, RootOfUnity) => BigInt::one(),
            (RootOfUnity, Uniformizer) => &self.modulus - 1,
            (RootOfUnity, RootOfUnity) => BigInt::zero(),
        }
    }

    /// Symbol exponent for a split torus (d = 1): elements are written as
    /// pairs (a, b) meaning uniformizer^a * root^b, and the pairing is
    /// a1*b2 - a2*b1 + h*a1*a2 mod (q - 1).
    pub fn split_symbol_exponent(
        &self,
        u: (&BigInt, &BigInt),
        v: (&BigInt, &BigInt),
    ) -> Result<BigInt> {
        if self.d != 1 {
            return Err(Error::SplitOnly { d: self.d });
        }
        let raw = u.0 * v.1 - v.0 * u.1 + &self.h * u.0 * v.0;
        Ok(raw.mod_floor(&self.modulus))
    }
}
