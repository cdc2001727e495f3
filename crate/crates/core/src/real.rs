//! Component groups of real tori and their double covers.
//!
//! Over the reals the cover degree is fixed at n = 2 and the Galois action
//! is an involution. The component group of the rational points is modeled
//! as pi0 = Y^gamma / (1 + gamma)Y, an elementary abelian 2-group receiving
//! a surjection from Y^gamma / 2Y^gamma whose kernel K is recorded
//! explicitly. The commutator of the cover descends to the sign pairing
//! (-1)^B(y, y') on lifts; its radical, pushed to pi0, must agree with the
//! image of the doubly-sharp invariants. All subgroups of pi0 are
//! represented by their preimages in (Z/2)^s, s the invariant rank.

use crate::abelian::{lattice_quotient, AbelianSubgroup, FiniteAbelianPresentation};
use crate::error::{Error, Result};
use crate::lattice::{
    check_gamma_invariance, sharp_sublattice, GammaLattice, QuadraticForm, Sublattice,
};
use crate::matrix::IntMat;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

/// A real torus with involution action and the degree-two cover data.
#[derive(Clone, Debug)]
pub struct RealCover {
    lat: GammaLattice,
    qf: QuadraticForm,
    invariant: Sublattice,
    norm_image: Sublattice,
    sharp: Sublattice,
    gamma_sharp: Sublattice,
}

/// Center, isogeny image and packet data inside the component group.
#[derive(Clone, Debug)]
pub struct RealPacketReport {
    pub component_factors: Vec<BigInt>,
    pub component_order: BigInt,
    /// Preimage in (Z/2)^s of the center image (contains the kernel K).
    pub center_image: AbelianSubgroup,
    /// Preimage in (Z/2)^s of the isogeny image (contains K).
    pub isogeny_image: AbelianSubgroup,
    pub center_order: BigInt,
    pub isogeny_order: BigInt,
    pub packet_factors: Vec<BigInt>,
    pub packet_order: BigInt,
    pub oracle_agrees: bool,
    pub containment_holds: bool,
    pub exact_sequence_holds: bool,
}

impl RealCover {
    pub fn new(lat: GammaLattice, qf: QuadraticForm) -> Result<Self> {
        if lat.d() > 2 {
            return Err(Error::NotInvolution { d: lat.d() });
        }
        if qf.rank() != lat.rank() {
            return Err(Error::DimensionMismatch { expected: lat.rank(), found: qf.rank() });
        }
        if !check_gamma_invariance(&lat, &qf)? {
            return Err(Error::NotGammaInvariant);
        }
        let invariant = lat.invariant_sublattice();
        let norm = IntMat::identity(lat.rank()).add(lat.gamma());
        let norm_image = Sublattice::full(lat.rank()).image_under(&norm);
        let sharp = sharp_sublattice(&qf, 2, &Sublattice::full(lat.rank()))?;
        let gamma_sharp = sharp_sublattice(&qf, 2, &invariant)?;
        Ok(RealCover { lat, qf, invariant, norm_image, sharp, gamma_sharp })
    }

    pub fn lattice(&self) -> &GammaLattice {
        &self.lat
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.qf
    }

    pub fn invariant_sublattice(&self) -> &Sublattice {
        &self.invariant
    }

    pub fn sharp(&self) -> &Sublattice {
        &self.sharp
    }

    pub fn gamma_sharp(&self) -> &Sublattice {
        &self.gamma_sharp
    }

    /// pi0 of the real points: Y^gamma / (1 + gamma)Y, with projection from
    /// ambient vectors of the invariant lattice.
    pub fn component_group(&self) -> FiniteAbelianPresentation {
        lattice_quotient(&self.invariant, &self.norm_image)
            .expect("(1 + gamma)Y is a finite-index sublattice of the invariants")
    }

    /// Kernel K of the surjection Y^gamma/2Y^gamma onto the component group,
    /// i.e. the image of (1 + gamma)Y in invariant coordinates mod 2.
    pub fn component_kernel(&self) -> AbelianSubgroup {
        self.subgroup_mod_two(&self.norm_image)
    }

    /// Image in (Z/2)^s of a sublattice of the invariant lattice.
    fn subgroup_mod_two(&self, sub: &Sublattice) -> AbelianSubgroup {
        let s = self.invariant.rank();
        let moduli = vec![BigInt::from(2); s];
        let gens: Vec<Vec<BigInt>> = sub
            .basis_columns()
            .iter()
            .map(|c| {
                self.invariant
                    .coordinates_of(c)
                    .expect("sublattice of the invariant lattice")
            })
            .collect();
        AbelianSubgroup::from_generators(moduli, &gens).expect("positive moduli")
    }

    /// Sign exponent of the cover commutator on two gamma-fixed vectors:
    /// 0 for +1 and 1 for -1, i.e. B(y, y') mod 2. Independent of the choice
    /// of lifts modulo 2Y^gamma and modulo (1 + gamma)Y.
    pub fn commutator_exponent(&self, y: &[BigInt], y2: &[BigInt]) -> Result<u8> {
        for v in [y, y2] {
            if v.len() != self.lat.rank() {
                return Err(Error::DimensionMismatch {
                    expected: self.lat.rank(),
                    found: v.len(),
                });
            }
            if self.lat.gamma().mul_vec(v) != v {
                return Err(Error::NotInSublattice);
            }
        }
        let b = self.qf.bilinear();
        let val: BigInt = y.iter().zip(b.mul_vec(y2)).map(|(a, c)| a * c).sum();
        Ok(if val.mod_floor(&BigInt::from(2)).is_zero() { 0 } else { 1 })
    }

    /// Radical of the sign pairing on Y^gamma/2Y^gamma found by exhausting
    /// all 2^s coordinate vectors, then pushed to the component group by
    /// joining the kernel K.
    pub fn center_oracle(&self) -> AbelianSubgroup {
        let s = self.invariant.rank();
        let basis = self.invariant.basis_columns();
        let mut radical = self.component_kernel();
        for mask in 0u64..(1u64 << s) {
            let coords: Vec<BigInt> =
                (0..s).map(|i| BigInt::from((mask >> i) & 1)).collect();
            let lift = self.invariant.basis().mul_vec(&coords);
            let central = basis
                .iter()
                .all(|w| self.commutator_exponent(&lift, w).expect("fixed vectors") == 0);
            if central && !radical.contains_element(&coords) {
                radical = radical.joined_with(&coords);
            }
        }
        radical
    }

    /// Image of the doubly-sharp invariants Y^{gamma#} intersect Y^gamma in
    /// the component group (represented with K joined in).
    pub fn center_lattice_image(&self) -> AbelianSubgroup {
        let doubly = self.gamma_sharp.intersect(&self.invariant);
        self.subgroup_mod_two(&doubly).join(&self.component_kernel())
    }

    /// Image of the sharp invariants Y^# intersect Y^gamma: the isogeny
    /// image inside the component group.
    pub fn isogeny_image(&self) -> AbelianSubgroup {
        let sharp_inv = self.sharp.intersect(&self.invariant);
        self.subgroup_mod_two(&sharp_inv).join(&self.component_kernel())
    }

    /// Full packet data with the oracle cross-check.
    pub fn packet(&self) -> RealPacketReport {
        let components = self.component_group();
        let kernel = self.component_kernel();
        let oracle = self.center_oracle();
        let center = self.center_lattice_image();
        let oracle_agrees =
            oracle.is_subgroup_of(&center) && center.is_subgroup_of(&oracle);
        let isogeny = self.isogeny_image();
        let containment_holds = isogeny.is_subgroup_of(&center);
        let packet = center.quotient_by(&isogeny).expect("contained subgroups");
        let center_order = center.order() / kernel.order();
        let isogeny_order = isogeny.order() / kernel.order();
        let exact_sequence_holds =
            center_order.clone() == isogeny_order.clone() * packet.order();
        RealPacketReport {
            component_factors: components.factors().to_vec(),
            component_order: components.order(),
            center_image: center,
            isogeny_image: isogeny,
            center_order,
            isogeny_order,
            packet_factors: packet.factors().to_vec(),
            packet_order: packet.order(),
            oracle_agrees,
            containment_holds,
            exact_sequence_holds,
        }
    }
}
