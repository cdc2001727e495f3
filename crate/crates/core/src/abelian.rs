//! Finite abelian groups presented through lattices.
//!
//! A subgroup of a product of cyclic groups Z/m_1 x ... x Z/m_g corresponds
//! to an intermediate lattice between the relation lattice diag(m_i) Z^g and
//! Z^g. Storing that lattice in Hermite form makes subgroup equality,
//! membership, joins and quotients exact; Smith form on coordinate matrices
//! yields invariant factors and explicit independent cyclic generators.

use crate::error::{Error, Result};
use crate::lattice::Sublattice;
use crate::matrix::IntMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

/// A finite abelian group as an ascending chain of invariant factors, each
/// at least 2 and each dividing the next, together with a projection from
/// ambient coordinates onto the factor coordinates.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAbelianPresentation {
    factors: Vec<BigInt>,
    // full SNF diagonal including trivial entries, aligned with `transform`
    diagonal: Vec<BigInt>,
    // basis of the covering lattice and the row transform of the SNF, so
    // project(v) = transform * coords_basis(v) reduced mod the diagonal
    basis: Sublattice,
    transform: IntMat,
}

impl FiniteAbelianPresentation {
    pub fn trivial() -> Self {
        FiniteAbelianPresentation {
            factors: vec![],
            diagonal: vec![],
            basis: Sublattice::zero(0),
            transform: IntMat::identity(0),
        }
    }

    pub fn factors(&self) -> &[BigInt] {
        &self.factors
    }

    pub fn order(&self) -> BigInt {
        self.factors.iter().product()
    }

    pub fn is_trivial(&self) -> bool {
        self.factors.is_empty()
    }

    /// Factor coordinates of an ambient vector lying in the covering lattice.
    pub fn project(&self, v: &[BigInt]) -> Result<Vec<BigInt>> {
        let coords = self.basis.coordinates_of(v).ok_or(Error::NotInSublattice)?;
        let image = self.transform.mul_vec(&coords);
        let mut out = Vec::new();
        for (x, m) in image.iter().zip(&self.diagonal) {
            if m.is_one() {
                continue;
            }
            out.push(x.mod_floor(m));
        }
        Ok(out)
    }
}

/// Quotient sup / sub of two lattices of equal rank with sub contained in
/// sup: the coordinate matrix of sub in sup is diagonalized by Smith form.
pub fn lattice_quotient(sup: &Sublattice, sub: &Sublattice) -> Result<FiniteAbelianPresentation> {
    if !sup.contains(sub) {
        return Err(Error::NotContained);
    }
    if sub.rank() != sup.rank() {
        return Err(Error::NotFiniteIndex { sub: sub.rank(), sup: sup.rank() });
    }
    let coords = sub.coordinates_in(sup)?;
    let snf = coords.snf();
    let diagonal = snf.diagonal();
    let factors = diagonal.iter().filter(|f| !f.is_one()).cloned().collect();
    Ok(FiniteAbelianPresentation {
        factors,
        diagonal,
        basis: sup.clone(),
        transform: snf.u,
    })
}

/// A subgroup of Z/m_1 x ... x Z/m_g, canonically represented by the full
/// preimage lattice in Z^g.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct AbelianSubgroup {
    moduli: Vec<BigInt>,
    lattice: Sublattice,
}

impl AbelianSubgroup {
    fn relation_generators(moduli: &[BigInt]) -> Vec<Vec<BigInt>> {
        let g = moduli.len();
        (0..g)
            .map(|i| {
                let mut v = vec![BigInt::zero(); g];
                v[i] = moduli[i].clone();
                v
            })
            .collect()
    }

    pub fn from_generators(moduli: Vec<BigInt>, gens: &[Vec<BigInt>]) -> Result<Self> {
        if moduli.iter().any(|m| !m.is_positive()) {
            return Err(Error::ZeroModulus);
        }
        let mut all = Self::relation_generators(&moduli);
        for gen in gens {
            if gen.len() != moduli.len() {
                return Err(Error::DimensionMismatch {
                    expected: moduli.len(),
                    found: gen.len(),
                });
            }
            all.push(gen.clone());
        }
        let lattice = Sublattice::from_generators(moduli.len(), &all);
        Ok(AbelianSubgroup { moduli, lattice })
    }

    pub fn trivial(moduli: Vec<BigInt>) -> Self {
        Self::from_generators(moduli, &[]).expect("positive moduli")
    }

    pub fn full(moduli: Vec<BigInt>) -> Self {
        let g = moduli.len();
        let gens: Vec<Vec<BigInt>> = (0..g)
            .map(|i| {
                let mut v = vec![BigInt::zero(); g];
                v[i] = BigInt::one();
                v
            })
            .collect();
        Self::from_generators(moduli, &gens).expect("positive moduli")
    }

    /// Image in the quotient (Z/n)^rank of a sublattice of Z^rank.
    pub fn from_sublattice(s: &Sublattice, n: &BigInt) -> Result<Self> {
        if !n.is_positive() {
            return Err(Error::ZeroModulus);
        }
        let moduli = vec![n.clone(); s.ambient_rank()];
        Self::from_generators(moduli, &s.basis_columns())
    }

    pub fn moduli(&self) -> &[BigInt] {
        &self.moduli
    }

    pub fn coordinates(&self) -> usize {
        self.moduli.len()
    }

    /// The full-preimage lattice in Z^g; canonical per subgroup.
    pub fn preimage_lattice(&self) -> &Sublattice {
        &self.lattice
    }

    pub fn order(&self) -> BigInt {
        let ambient: BigInt = self.moduli.iter().product();
        let index = self
            .lattice
            .index_in(&Sublattice::full(self.moduli.len()))
            .expect("full-rank preimage");
        let (q, r) = ambient.div_rem(&index);
        debug_assert!(r.is_zero());
        q
    }

    pub fn contains_element(&self, v: &[BigInt]) -> bool {
        self.lattice.contains_vector(v)
    }

    pub fn is_subgroup_of(&self, other: &AbelianSubgroup) -> bool {
        self.moduli == other.moduli && other.lattice.contains(&self.lattice)
    }

    pub fn join(&self, other: &AbelianSubgroup) -> AbelianSubgroup {
        assert_eq!(self.moduli, other.moduli);
        AbelianSubgroup {
            moduli: self.moduli.clone(),
            lattice: self.lattice.sum(&other.lattice),
        }
    }

    pub fn joined_with(&self, v: &[BigInt]) -> AbelianSubgroup {
        let extra = Sublattice::from_generators(self.moduli.len(), &[v.to_vec()]);
        AbelianSubgroup { moduli: self.moduli.clone(), lattice: self.lattice.sum(&extra) }
    }

    /// Invariant-factor presentation of the subgroup itself.
    pub fn presentation(&self) -> FiniteAbelianPresentation {
        let relations = Sublattice::from_generators(
            self.moduli.len(),
            &Self::relation_generators(&self.moduli),
        );
        lattice_quotient(&self.lattice, &relations).expect("relations inside preimage")
    }

    /// Quotient self / sub as a finite abelian group.
    pub fn quotient_by(&self, sub: &AbelianSubgroup) -> Result<FiniteAbelianPresentation> {
        if self.moduli != sub.moduli {
            return Err(Error::DimensionMismatch {
                expected: self.moduli.len(),
                found: sub.moduli.len(),
            });
        }
        if !sub.is_subgroup_of(self) {
            return Err(Error::NotContained);
        }
        lattice_quotient(&self.lattice, &sub.lattice)
    }

    /// Independent cyclic generators: pairs (vector, order) such that the
    /// subgroup is the internal direct sum of the cyclic pieces.
    pub fn cyclic_generators(&self) -> Vec<(Vec<BigInt>, BigInt)> {
        let g = self.moduli.len();
        let relations =
            Sublattice::from_generators(g, &Self::relation_generators(&self.moduli));
        let coords = relations.coordinates_in(&self.lattice).expect("relations inside");
        let snf = coords.snf();
        // basis * u^{-1} pairs with the diagonal orders of the quotient
        let u_inv = snf.u.inverse_unimodular().expect("unimodular");
        let adapted = self.lattice.basis().mul(&u_inv);
        let mut out = Vec::new();
        for (i, d) in snf.diagonal().iter().enumerate() {
            if d.is_one() {
                continue;
            }
            let col: Vec<BigInt> = (0..g)
                .map(|r| adapted[(r, i)].mod_floor(&self.moduli[r]))
                .collect();
            out.push((col, d.clone()));
        }
        out
    }

    /// Coefficients of an element against `cyclic_generators`, reduced by
    /// each generator's order. None when the element is outside the subgroup.
    pub fn cyclic_coordinates(&self, v: &[BigInt]) -> Option<Vec<BigInt>> {
        if !self.contains_element(v) {
            return None;
        }
        let g = self.moduli.len();
        let relations =
            Sublattice::from_generators(g, &Self::relation_generators(&self.moduli));
        let coords = relations.coordinates_in(&self.lattice).expect("relations inside");
        let snf = coords.snf();
        let u_inv = snf.u.inverse_unimodular().expect("unimodular");
        let adapted = Sublattice::from_generator_matrix(g, &self.lattice.basis().mul(&u_inv));
        // adapted is another basis of the same lattice; coordinates against
        // the un-normalized column order need the raw matrix, so solve there.
        let raw = self.lattice.basis().mul(&u_inv);
        let hnf = raw.hnf();
        let in_hnf = crate::matrix::hnf_solve(&hnf.h, &hnf.pivots, v)?;
        // translate back through the unimodular column change of the HNF
        let x = hnf.transform.mul_vec(&padded(&in_hnf, hnf.transform.cols()));
        debug_assert!(adapted.contains_vector(v));
        let diag = snf.diagonal();
        let mut out = Vec::new();
        for (i, d) in diag.iter().enumerate() {
            if d.is_one() {
                continue;
            }
            out.push(x[i].mod_floor(d));
        }
        Some(out)
    }
}

fn padded(v: &[BigInt], len: usize) -> Vec<BigInt> {
    let mut out = v.to_vec();
    out.resize(len, BigInt::zero());
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn big(v: i64) -> BigInt {
        BigInt::from(v)
    }

    fn vecb(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| big(x)).collect()
    }

    #[test]
    fn diagonal_subgroup_mod_three() {
        let s = Sublattice::from_generators(2, &[vecb(&[1, 1])]);
        let sub = AbelianSubgroup::from_sublattice(&s, &big(3)).unwrap();
        assert_eq!(sub.order(), big(3));
        assert!(sub.contains_element(&vecb(&[2, 2])));
        assert!(!sub.contains_element(&vecb(&[1, 2])));
        assert_eq!(sub.presentation().factors(), &[big(3)]);
    }

    #[test]
    fn quotient_of_square_by_diagonal() {
        // (Z/6)^2 modulo the diagonal is cyclic of order 6
        let moduli = vec![big(6), big(6)];
        let full = AbelianSubgroup::full(moduli.clone());
        let diag =
            AbelianSubgroup::from_generators(moduli, &[vecb(&[1, 1])]).unwrap();
        let q = full.quotient_by(&diag).unwrap();
        assert_eq!(q.factors(), &[big(6)]);
        assert_eq!(q.order(), big(6));
    }

    #[test]
    fn presentation_orders_multiply() {
        let moduli = vec![big(4), big(4)];
        let sub = AbelianSubgroup::from_generators(
            moduli,
            &[vecb(&[2, 0]), vecb(&[0, 2])],
        )
        .unwrap();
        assert_eq!(sub.order(), big(4));
        assert_eq!(sub.presentation().factors(), &[big(2), big(2)]);
    }

    #[test]
    fn cyclic_generators_span_and_are_independent() {
        let moduli = vec![big(8), big(8)];
        let sub = AbelianSubgroup::from_generators(moduli.clone(), &[vecb(&[6, 2])]).unwrap();
        let gens = sub.cyclic_generators();
        let total: BigInt = gens.iter().map(|(_, o)| o.clone()).product();
        assert_eq!(total, sub.order());
        // every enumerated combination lands in the subgroup and is distinct
        let mut seen = std::collections::HashSet::new();
        let mut stack = vec![vec![]];
        for (_, order) in &gens {
            let mut next = Vec::new();
            let o = u64::try_from(order.clone()).unwrap();
            for partial in stack {
                for c in 0..o {
                    let mut p = partial.clone();
                    p.push(c);
                    next.push(p);
                }
            }
            stack = next;
        }
        for coeffs in stack {
            let mut v = vec![BigInt::zero(); 2];
            for ((gen, _), c) in gens.iter().zip(&coeffs) {
                for i in 0..2 {
                    v[i] += &gen[i] * BigInt::from(*c);
                }
            }
            let reduced: Vec<BigInt> =
                v.iter().zip(&moduli).map(|(x, m)| x.mod_floor(m)).collect();
            assert!(sub.contains_element(&reduced));
            assert!(seen.insert(reduced.clone()), "collision at {reduced:?}");
        }
        assert_eq!(BigInt::from(seen.len() as u64), sub.order());
    }

    #[test]
    fn cyclic_coordinates_invert_generation() {
        let moduli = vec![big(8), big(8), big(8)];
        let sub = AbelianSubgroup::from_generators(
            moduli,
            &[vecb(&[4, 4, 0]), vecb(&[6, 2, 0]), vecb(&[0, 0, 2])],
        )
        .unwrap();
        let gens = sub.cyclic_generators();
        for (gen, order) in &gens {
            let coords = sub.cyclic_coordinates(gen).expect("generator is a member");
            // rebuilding from the coordinates gives the element back mod 8
            let mut v = vec![BigInt::zero(); 3];
            for ((g, _), c) in gens.iter().zip(&coords) {
                for i in 0..3 {
                    v[i] += &g[i] * c;
                }
            }
            for i in 0..3 {
                assert_eq!(v[i].mod_floor(&big(8)), gen[i].mod_floor(&big(8)));
            }
            assert!(coords.iter().zip(gens.iter()).all(|(c, (_, o))| c < o || o == order));
        }
    }

    #[test]
    fn join_and_containment() {
        let moduli = vec![big(4), big(4)];
        let a = AbelianSubgroup::from_generators(moduli.clone(), &[vecb(&[2, 0])]).unwrap();
        let b = AbelianSubgroup::from_generators(moduli.clone(), &[vecb(&[0, 2])]).unwrap();
        let j = a.join(&b);
        assert!(a.is_subgroup_of(&j));
        assert!(b.is_subgroup_of(&j));
        assert_eq!(j.order(), big(4));
        assert_eq!(j, AbelianSubgroup::from_generators(moduli, &[vecb(&[2, 0]), vecb(&[0, 2])]).unwrap());
    }

    #[test]
    fn projection_respects_quotient() {
        let moduli = vec![big(8), big(8)];
        let full = AbelianSubgroup::full(moduli.clone());
        let sub = AbelianSubgroup::from_generators(moduli, &[vecb(&[4, 0]), vecb(&[0, 4])]).unwrap();
        let q = full.quotient_by(&sub).unwrap();
        assert_eq!(q.order(), big(16));
        // elements of the subgroup project to zero
        let z = q.project(&vecb(&[4, 4])).unwrap();
        assert!(z.iter().all(Zero::is_zero));
        let nz = q.project(&vecb(&[1, 0])).unwrap();
        assert!(!nz.iter().all(Zero::is_zero));
    }
}
