//! Lattices with a finite cyclic group action and integral quadratic forms.
//!
//! The ambient object is a free Z-module Y of finite rank carrying an
//! automorphism gamma with gamma^d = 1. A quadratic form Q is stored through
//! an upper triangular integer matrix M with Q(y) = y^T M y; the associated
//! bilinear form is B = M + M^T, so B(y, y) = 2 Q(y). Sublattices are kept in
//! column Hermite form, which makes equality, membership and index questions
//! exact and canonical.

use crate::error::{Error, Result};
use crate::matrix::{hnf_solve, IntMat};
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// The four endomorphisms of Y built from the group action.
///
/// Trace sums the d powers of gamma, TraceQ weights the i-th power by q^i,
/// Delta is gamma - 1 and DeltaQ is q*gamma - 1. The composites satisfy
/// Trace . Delta = 0 and TraceQ . DeltaQ = (q^d - 1) * id.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Operator {
    Trace,
    TraceQ,
    Delta,
    DeltaQ,
}

/// A free Z-module of finite rank with an order-d automorphism.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct GammaLattice {
    rank: usize,
    d: u32,
    gamma: IntMat,
}

impl GammaLattice {
    pub fn new(d: u32, gamma: IntMat) -> Result<Self> {
        if d == 0 {
            return Err(Error::ZeroOrder { d });
        }
        if !gamma.is_square() {
            return Err(Error::NotSquare { rows: gamma.rows(), cols: gamma.cols() });
        }
        if !gamma.pow(d).is_identity() {
            return Err(Error::GammaOrder { d });
        }
        // gamma^d = 1 already forces invertibility; keep the explicit check
        // so a corrupted matrix cannot slip through.
        if !gamma.is_unimodular() {
            return Err(Error::GammaNotUnimodular);
        }
        Ok(GammaLattice { rank: gamma.rows(), d, gamma })
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn d(&self) -> u32 {
        self.d
    }

    pub fn gamma(&self) -> &IntMat {
        &self.gamma
    }

    /// Smallest k >= 1 with gamma^k = 1; divides d but may be smaller.
    pub fn gamma_order(&self) -> u32 {
        let mut acc = self.gamma.clone();
        for k in 1..=self.d {
            if acc.is_identity() {
                return k;
            }
            acc = acc.mul(&self.gamma);
        }
        self.d
    }

    pub fn operator_matrix(&self, op: Operator, q: u64) -> Result<IntMat> {
        match op {
            Operator::Delta => {
                Ok(self.gamma.sub(&IntMat::identity(self.rank)))
            }
            Operator::DeltaQ => {
                if q < 2 {
                    return Err(Error::SmallQ { q });
                }
                Ok(self.gamma.scale(&BigInt::from(q)).sub(&IntMat::identity(self.rank)))
            }
            Operator::Trace => {
                let mut acc = IntMat::zero(self.rank, self.rank);
                let mut pow = IntMat::identity(self.rank);
                for _ in 0..self.d {
                    acc = acc.add(&pow);
                    pow = pow.mul(&self.gamma);
                }
                Ok(acc)
            }
            Operator::TraceQ => {
                if q < 2 {
                    return Err(Error::SmallQ { q });
                }
                let q = BigInt::from(q);
                let mut acc = IntMat::zero(self.rank, self.rank);
                let mut pow = IntMat::identity(self.rank);
                let mut qi = BigInt::one();
                for _ in 0..self.d {
                    acc = acc.add(&pow.scale(&qi));
                    pow = pow.mul(&self.gamma);
                    qi *= &q;
                }
                Ok(acc)
            }
        }
    }

    pub fn apply_operator(&self, op: Operator, q: u64, v: &[BigInt]) -> Result<Vec<BigInt>> {
        if v.len() != self.rank {
            return Err(Error::DimensionMismatch { expected: self.rank, found: v.len() });
        }
        Ok(self.operator_matrix(op, q)?.mul_vec(v))
    }

    /// The fixed sublattice Y^Gamma = ker(gamma - 1); saturated in Y.
    pub fn invariant_sublattice(&self) -> Sublattice {
        let delta = self.gamma.sub(&IntMat::identity(self.rank));
        Sublattice::from_generator_matrix(self.rank, &delta.kernel())
    }
}

/// Integral quadratic form stored as an upper triangular Gram-half.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct QuadraticForm {
    upper: IntMat,
}

impl QuadraticForm {
    pub fn new(upper: IntMat) -> Result<Self> {
        if !upper.is_square() {
            return Err(Error::NotSquare { rows: upper.rows(), cols: upper.cols() });
        }
        if !upper.is_upper_triangular() {
            return Err(Error::NotUpperTriangular);
        }
        Ok(QuadraticForm { upper })
    }

    pub fn rank(&self) -> usize {
        self.upper.rows()
    }

    pub fn matrix(&self) -> &IntMat {
        &self.upper
    }

    /// B = M + M^T; symmetric with even diagonal, B(y, y) = 2 Q(y).
    pub fn bilinear(&self) -> IntMat {
        self.upper.add(&self.upper.transpose())
    }

    pub fn evaluate(&self, y: &[BigInt]) -> BigInt {
        assert_eq!(y.len(), self.rank());
        let mut acc = BigInt::zero();
        for i in 0..self.rank() {
            for j in 0..self.rank() {
                let m = &self.upper[(i, j)];
                if !m.is_zero() {
                    acc += m * (&y[i] * &y[j]);
                }
            }
        }
        acc
    }
}

/// True when Q(gamma e_i) = Q(e_i) for every basis vector and the bilinear
/// form satisfies gamma^T B gamma = B.
pub fn check_gamma_invariance(lat: &GammaLattice, qf: &QuadraticForm) -> Result<bool> {
    if qf.rank() != lat.rank() {
        return Err(Error::DimensionMismatch { expected: lat.rank(), found: qf.rank() });
    }
    let b = qf.bilinear();
    if lat.gamma.transpose().mul(&b).mul(&lat.gamma) != b {
        return Ok(false);
    }
    for i in 0..lat.rank() {
        let e = lat.gamma.col(i);
        let mut basis = vec![BigInt::zero(); lat.rank()];
        basis[i] = BigInt::one();
        if qf.evaluate(&e) != qf.evaluate(&basis) {
            return Ok(false);
        }
    }
    Ok(true)
}

/// A sublattice of Z^rank held as a canonical column-HNF basis; the columns
/// are Z-linearly independent and the representation is unique per subgroup.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Sublattice {
    ambient_rank: usize,
    basis: IntMat,
    pivots: Vec<usize>,
}

impl Sublattice {
    pub fn from_generators(ambient_rank: usize, gens: &[Vec<BigInt>]) -> Self {
        let m = IntMat::from_cols(ambient_rank, gens.to_vec());
        Self::from_generator_matrix(ambient_rank, &m)
    }

    /// Columns of `gens` generate the sublattice; zero columns are dropped.
    pub fn from_generator_matrix(ambient_rank: usize, gens: &IntMat) -> Self {
        assert_eq!(gens.rows(), ambient_rank);
        let hnf = gens.hnf();
        let k = hnf.pivots.len();
        let basis = IntMat::from_cols(ambient_rank, (0..k).map(|j| hnf.h.col(j)).collect());
        Sublattice { ambient_rank, basis, pivots: hnf.pivots }
    }

    pub fn full(ambient_rank: usize) -> Self {
        Sublattice {
            ambient_rank,
            basis: IntMat::identity(ambient_rank),
            pivots: (0..ambient_rank).collect(),
        }
    }

    pub fn zero(ambient_rank: usize) -> Self {
        Sublattice { ambient_rank, basis: IntMat::zero(ambient_rank, 0), pivots: vec![] }
    }

    pub fn ambient_rank(&self) -> usize {
        self.ambient_rank
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn basis(&self) -> &IntMat {
        &self.basis
    }

    pub fn basis_columns(&self) -> Vec<Vec<BigInt>> {
        (0..self.rank()).map(|j| self.basis.col(j)).collect()
    }

    pub fn contains_vector(&self, v: &[BigInt]) -> bool {
        assert_eq!(v.len(), self.ambient_rank);
        hnf_solve(&self.basis, &self.pivots, v).is_some()
    }

    pub fn contains(&self, other: &Sublattice) -> bool {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        other.basis_columns().iter().all(|c| self.contains_vector(c))
    }

    /// Coordinates of `v` in this basis, when `v` lies in the sublattice.
    pub fn coordinates_of(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        hnf_solve(&self.basis, &self.pivots, v)
    }

    /// Expresses the basis of `self` in the basis of `sup`; requires
    /// containment self <= sup.
    pub fn coordinates_in(&self, sup: &Sublattice) -> Result<IntMat> {
        let mut cols = Vec::with_capacity(self.rank());
        for c in self.basis_columns() {
            cols.push(sup.coordinates_of(&c).ok_or(Error::NotContained)?);
        }
        Ok(IntMat::from_cols(sup.rank(), cols))
    }

    pub fn intersect(&self, other: &Sublattice) -> Sublattice {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        if self.rank() == 0 || other.rank() == 0 {
            return Sublattice::zero(self.ambient_rank);
        }
        // kernel of [A | -B]: first block gives coefficients of common vectors
        let stacked = self.basis.hcat(&other.basis.scale(&BigInt::from(-1)));
        let ker = stacked.kernel();
        let mut gens = Vec::new();
        for j in 0..ker.cols() {
            let coeffs: Vec<BigInt> = (0..self.rank()).map(|i| ker[(i, j)].clone()).collect();
            gens.push(self.basis.mul_vec(&coeffs));
        }
        Sublattice::from_generators(self.ambient_rank, &gens)
    }

    pub fn sum(&self, other: &Sublattice) -> Sublattice {
        assert_eq!(self.ambient_rank, other.ambient_rank);
        Sublattice::from_generator_matrix(self.ambient_rank, &self.basis.hcat(&other.basis))
    }

    pub fn scaled(&self, k: &BigInt) -> Sublattice {
        Sublattice::from_generator_matrix(self.ambient_rank, &self.basis.scale(k))
    }

    /// Image under an integer matrix (rows = new ambient rank).
    pub fn image_under(&self, m: &IntMat) -> Sublattice {
        assert_eq!(m.cols(), self.ambient_rank);
        Sublattice::from_generator_matrix(m.rows(), &m.mul(&self.basis))
    }

    /// Index [sup : self] when finite (equal ranks and containment).
    pub fn index_in(&self, sup: &Sublattice) -> Result<BigInt> {
        if self.rank() != sup.rank() {
            return Err(Error::NotFiniteIndex { sub: self.rank(), sup: sup.rank() });
        }
        let coords = self.coordinates_in(sup)?;
        let prod: BigInt = coords.snf().diagonal().iter().product();
        Ok(prod.abs())
    }

    /// Invariant factors of sup / self dropping trivial ones; requires equal
    /// rank, i.e. a finite quotient.
    pub fn quotient_invariant_factors(&self, sup: &Sublattice) -> Result<Vec<BigInt>> {
        if self.rank() != sup.rank() {
            return Err(Error::NotFiniteIndex { sub: self.rank(), sup: sup.rank() });
        }
        let coords = self.coordinates_in(sup)?;
        let mut factors: Vec<BigInt> =
            coords.snf().diagonal().into_iter().filter(|f| !f.is_one()).collect();
        factors.sort();
        Ok(factors)
    }
}

/// {x in Z^cols : m x = 0 mod modulus}, as a full-rank sublattice of the
/// domain (it always contains modulus * Z^cols).
pub fn kernel_mod(m: &IntMat, modulus: &BigInt) -> Sublattice {
    assert!(modulus.is_positive(), "modulus must be positive");
    let cols = m.cols();
    // projection of ker [m | modulus*I] onto the first block
    let scaled_id = IntMat::identity(m.rows()).scale(modulus);
    let ker = m.hcat(&scaled_id).kernel();
    let mut gens = Vec::new();
    for j in 0..ker.cols() {
        gens.push((0..cols).map(|i| ker[(i, j)].clone()).collect());
    }
    for i in 0..cols {
        let mut v = vec![BigInt::zero(); cols];
        v[i] = modulus.clone();
        gens.push(v);
    }
    Sublattice::from_generators(cols, &gens)
}

/// {y in Y : B(y, w) in nZ for every w in W}, computed as the mod-n kernel of
/// the stacked rows w^T B. Always full rank: it contains nY.
pub fn sharp_sublattice(qf: &QuadraticForm, n: u64, w: &Sublattice) -> Result<Sublattice> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    let rank = qf.rank();
    if w.ambient_rank() != rank {
        return Err(Error::DimensionMismatch { expected: rank, found: w.ambient_rank() });
    }
    let rows = w.basis().transpose().mul(&qf.bilinear());
    Ok(kernel_mod(&rows, &BigInt::from(n)))
}

/// Smith-form data of a Gram matrix B relative to a level n:
/// B(y1, y2) = (alpha y1)^T D (beta y2) with alpha, beta unimodular and D
/// the diagonal of `divisors`. `co_divisors[j]` is the smallest e > 0 with
/// divisors[j] * e in nZ; a zero divisor imposes no condition, so its
/// co-divisor is 1.
#[derive(Clone, Debug)]
pub struct SmithForm {
    pub divisors: Vec<BigInt>,
    pub co_divisors: Vec<BigInt>,
    pub alpha: IntMat,
    pub beta: IntMat,
    alpha_inv: IntMat,
}

impl SmithForm {
    /// The sublattice alpha^{-1}(e_1 Z + ... + e_r Z); by the diagonalization
    /// this equals the n-sharp sublattice of the full lattice.
    pub fn predicted_sharp(&self) -> Sublattice {
        let gens = self.alpha_inv.mul(&IntMat::diagonal(&self.co_divisors));
        Sublattice::from_generator_matrix(gens.rows(), &gens)
    }
}

pub fn smith_elementary_divisors(b: &IntMat, n: u64) -> Result<SmithForm> {
    if n == 0 {
        return Err(Error::ZeroModulus);
    }
    if !b.is_square() {
        return Err(Error::NotSquare { rows: b.rows(), cols: b.cols() });
    }
    let snf = b.snf();
    // u b v = d  =>  b = u^{-1} d v^{-1} = (u^{-T})^T d v^{-1}
    let u_inv = snf.u.inverse_unimodular().expect("snf transform is unimodular");
    let alpha = u_inv.transpose();
    let alpha_inv = snf.u.transpose();
    let beta = snf.v.inverse_unimodular().expect("snf transform is unimodular");
    let divisors = snf.diagonal();
    let n_big = BigInt::from(n);
    let co_divisors = divisors
        .iter()
        .map(|d| {
            let g = d.gcd(&n_big);
            // gcd(0, n) = n, so a zero divisor yields co-divisor 1
            &n_big / g
        })
        .collect();
    Ok(SmithForm { divisors, co_divisors, alpha, beta, alpha_inv })
}
