//! Finite model of a tame cover of an unramified torus over a
//! nonarchimedean local field.
//!
//! The residue field has q elements, the splitting extension is unramified
//! of degree d, and the cover has degree n with n | q - 1. Rational points
//! are modeled by pairs t = (y1, y2bar): a uniformizer part y1 in the
//! gamma-fixed sublattice and a unit part y2bar in the subgroup of
//! Y/(q^d - 1)Y killed by q*gamma - 1. The pro-p part contributes nothing
//! to commutators and is dropped, and the uniformizer part is truncated
//! modulo (q^d - 1), under which every predicate below descends.
//!
//! The commutator pairing of the cover is expressed through tame symbols:
//! on exponents, c(t, t') = m * (h*B(y1, y1') + B(y1, y2') - B(y2, y1'))
//! mod q^d - 1, with m = (q-1)/n and h the (pi, pi) symbol exponent. The
//! center is computed twice, by exhaustive radical search and by the sharp
//! sublattice characterization, and the two must agree.

use crate::abelian::AbelianSubgroup;
use crate::error::{Error, Result};
use crate::heisenberg::FiniteHeisenberg;
use crate::lattice::{
    check_gamma_invariance, kernel_mod, sharp_sublattice, GammaLattice, Operator,
    QuadraticForm, Sublattice,
};
use crate::matrix::IntMat;
use crate::symbols::SymbolTable;
use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{ToPrimitive, Zero};

/// A tame cover instance: invariant lattice data plus the symbol table.
#[derive(Clone, Debug)]
pub struct UnramifiedCover {
    lat: GammaLattice,
    qf: QuadraticForm,
    table: SymbolTable,
    invariant: Sublattice,
    sharp: Sublattice,
    gamma_sharp: Sublattice,
    sharp_invariant: Sublattice,
    trace_q: IntMat,
    residual: AbelianSubgroup,
}

/// A rational point of the torus modulo its pro-p part: a uniformizer
/// exponent vector fixed by gamma and a unit part killed by q*gamma - 1
/// modulo q^d - 1 (stored through a lift).
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct TorusPoint {
    y1: Vec<BigInt>,
    y2: Vec<BigInt>,
}

impl TorusPoint {
    pub fn uniformizer_part(&self) -> &[BigInt] {
        &self.y1
    }

    pub fn unit_part(&self) -> &[BigInt] {
        &self.y2
    }
}

/// Both descriptions of the center together with the isogeny image and the
/// packet group between them.
#[derive(Clone, Debug)]
pub struct PacketReport {
    pub center: AbelianSubgroup,
    pub isogeny: AbelianSubgroup,
    pub packet_factors: Vec<BigInt>,
    pub packet_order: BigInt,
    pub containment_holds: bool,
    pub exact_sequence_holds: bool,
    /// True when the trace image is strictly smaller than the full residual
    /// fixed-point group (only containment is guaranteed in general).
    pub trace_image_strict: bool,
}

/// Data of the centralizer of the identity component and the pseudo-trivial
/// quotient when a finite-index sublattice V of the sharp invariants is
/// supplied.
#[derive(Clone, Debug)]
pub struct PseudoSphericalReport {
    pub parameter_rank: usize,
    pub splitting_rank: usize,
    pub centralizer: AbelianSubgroup,
    pub pseudo_trivial_factors: Option<Vec<BigInt>>,
}

/// The containment chain tying the sharp sublattices to the operators.
#[derive(Clone, Copy, Debug)]
pub struct ContainmentChain {
    pub sharp_in_gamma_sharp: bool,
    pub scaled_in_sharp: bool,
    pub delta_q_into_gamma_sharp: bool,
    pub trace_q_into_sharp: bool,
}

impl ContainmentChain {
    pub fn holds(&self) -> bool {
        self.sharp_in_gamma_sharp
            && self.scaled_in_sharp
            && self.delta_q_into_gamma_sharp
            && self.trace_q_into_sharp
    }
}

impl UnramifiedCover {
    pub fn new(lat: GammaLattice, qf: QuadraticForm, q: u64, n: u64) -> Result<Self> {
        if qf.rank() != lat.rank() {
            return Err(Error::DimensionMismatch { expected: lat.rank(), found: qf.rank() });
        }
        let table = SymbolTable::new(q, lat.d(), n)?;
        if !check_gamma_invariance(&lat, &qf)? {
            return Err(Error::NotGammaInvariant);
        }
        let invariant = lat.invariant_sublattice();
        let sharp = sharp_sublattice(&qf, n, &Sublattice::full(lat.rank()))?;
        let gamma_sharp = sharp_sublattice(&qf, n, &invariant)?;
        let sharp_invariant = sharp.intersect(&invariant);
        let trace_q = lat.operator_matrix(Operator::TraceQ, q)?;
        let delta_q = lat.operator_matrix(Operator::DeltaQ, q)?;
        let residual =
            AbelianSubgroup::from_sublattice(&kernel_mod(&delta_q, table.modulus()), table.modulus())?;
        Ok(UnramifiedCover {
            lat,
            qf,
            table,
            invariant,
            sharp,
            gamma_sharp,
            sharp_invariant,
            trace_q,
            residual,
        })
    }

    pub fn lattice(&self) -> &GammaLattice {
        &self.lat
    }

    pub fn form(&self) -> &QuadraticForm {
        &self.qf
    }

    pub fn symbols(&self) -> &SymbolTable {
        &self.table
    }

    /// q^d - 1, the order of the residual root group of the splitting field.
    pub fn modulus(&self) -> &BigInt {
        self.table.modulus()
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

    pub fn sharp_invariant(&self) -> &Sublattice {
        &self.sharp_invariant
    }

    /// The subgroup of Y/(q^d-1)Y fixed in the twisted sense: kernel of
    /// q*gamma - 1.
    pub fn residual_fixed_points(&self) -> &AbelianSubgroup {
        &self.residual
    }

    /// Image of Tr_q applied to the whole lattice inside Y/(q^d-1)Y; always
    /// contained in the residual fixed points.
    pub fn trace_image(&self) -> AbelianSubgroup {
        let image = Sublattice::full(self.lat.rank()).image_under(&self.trace_q);
        AbelianSubgroup::from_sublattice(&image, self.table.modulus()).expect("positive modulus")
    }

    pub fn torus_point(&self, y1: Vec<BigInt>, y2: Vec<BigInt>) -> Result<TorusPoint> {
        let rank = self.lat.rank();
        if y1.len() != rank || y2.len() != rank {
            return Err(Error::DimensionMismatch { expected: rank, found: y1.len().max(y2.len()) });
        }
        let moved = self.lat.gamma().mul_vec(&y1);
        if moved != y1 {
            return Err(Error::NotInSublattice);
        }
        let twisted = self.lat.apply_operator(Operator::DeltaQ, self.table.q(), &y2)?;
        if twisted.iter().any(|x| !x.mod_floor(self.table.modulus()).is_zero()) {
            return Err(Error::NotInSublattice);
        }
        Ok(TorusPoint { y1, y2 })
    }

    /// Exponent of the commutator of two rational points against the fixed
    /// primitive root: m * (h*B(y1,y1') + B(y1,y2') - B(y2,y1')) mod q^d-1.
    /// Independent of the unit-part lifts.
    pub fn commutator_exponent(&self, t: &TorusPoint, u: &TorusPoint) -> BigInt {
        let b = self.qf.bilinear();
        let m = BigInt::from(self.table.m());
        let h = self.table.h();
        let c = h * pair(&b, &t.y1, &u.y1) + pair(&b, &t.y1, &u.y2) - pair(&b, &t.y2, &u.y1);
        (m * c).mod_floor(self.table.modulus())
    }

    /// Order of the modeled rational point group
    /// G = Y^gamma/(q^d-1)Y^gamma x residual fixed points.
    pub fn group_order(&self) -> BigInt {
        let s = self.invariant.rank();
        self.table.modulus().pow(s as u32) * self.residual.order()
    }

    /// Generators of G: images of an invariant-lattice basis in the
    /// uniformizer part, then independent cyclic generators of the residual
    /// fixed points in the unit part.
    pub fn standard_generators(&self) -> Vec<TorusPoint> {
        let rank = self.lat.rank();
        let mut gens = Vec::new();
        for col in self.invariant.basis_columns() {
            gens.push(TorusPoint { y1: col, y2: vec![BigInt::zero(); rank] });
        }
        for (v, _) in self.residual.cyclic_generators() {
            gens.push(TorusPoint { y1: vec![BigInt::zero(); rank], y2: v });
        }
        gens
    }

    /// Cyclic orders of `standard_generators` as elements of G.
    pub fn generator_orders(&self) -> Vec<BigInt> {
        let s = self.invariant.rank();
        let mut orders = vec![self.table.modulus().clone(); s];
        for (_, o) in self.residual.cyclic_generators() {
            orders.push(o);
        }
        orders
    }

    /// Coordinates of a point in the combined system used for subgroups of
    /// G: invariant-basis coordinates of y1, then ambient unit coordinates,
    /// everything mod q^d - 1.
    pub fn point_coordinates(&self, t: &TorusPoint) -> Vec<BigInt> {
        let mut a = self
            .invariant
            .coordinates_of(&t.y1)
            .expect("uniformizer part lies in the invariant lattice");
        for x in &t.y2 {
            a.push(x.clone());
        }
        let n = self.table.modulus();
        a.iter().map(|x| x.mod_floor(n)).collect()
    }

    fn combined_moduli(&self) -> Vec<BigInt> {
        vec![self.table.modulus().clone(); self.invariant.rank() + self.lat.rank()]
    }

    /// The center of the cover as a subgroup of G, by exhaustive search:
    /// every element is paired against every generator. Bi-additivity makes
    /// the generator test equivalent to testing against all of G.
    pub fn center_bruteforce(&self, cap: u64) -> Result<AbelianSubgroup> {
        let order = self.group_order();
        if order > BigInt::from(cap) {
            return Err(Error::CapExceeded { size: order, cap });
        }
        let total = order.to_u64().expect("order within cap");
        let n = self.table.modulus();
        let s = self.invariant.rank();
        let rank = self.lat.rank();
        let gens = self.standard_generators();
        let b = self.qf.bilinear();
        let m = BigInt::from(self.table.m());

        // c(t, g) = <a, p_g> - <y2_t, r_g> for t with invariant coordinates
        // a; p_g = W^T m (h B y1_g + B y2_g), r_g = m B y1_g
        let w_t = self.invariant.basis().transpose();
        let mut p = Vec::with_capacity(gens.len());
        let mut r = Vec::with_capacity(gens.len());
        for g in &gens {
            let u: Vec<BigInt> = b
                .mul_vec(&g.y1)
                .iter()
                .zip(b.mul_vec(&g.y2))
                .map(|(x, y)| ((self.table.h() * x + y) * &m).mod_floor(n))
                .collect();
            p.push(w_t.mul_vec(&u).iter().map(|x| x.mod_floor(n)).collect::<Vec<_>>());
            r.push(
                b.mul_vec(&g.y1)
                    .iter()
                    .map(|x| (x * &m).mod_floor(n))
                    .collect::<Vec<BigInt>>(),
            );
        }

        let theta = self.residual.cyclic_generators();
        // one odometer digit per invariant coordinate (modulus q^d-1) and
        // per residual cyclic generator (its order); each unit increment
        // shifts every pairing accumulator by a fixed amount
        let mut digit_mods: Vec<BigInt> = vec![n.clone(); s];
        let mut deltas: Vec<Vec<BigInt>> = Vec::new();
        for i in 0..s {
            deltas.push(p.iter().map(|pg| pg[i].clone()).collect());
        }
        for (v, o) in &theta {
            digit_mods.push(o.clone());
            deltas.push(
                r.iter()
                    .map(|rg| (-dot(v, rg)).mod_floor(n))
                    .collect(),
            );
        }

        if let (Some(n64), Some(mods)) = (n.to_u64(), small_all(&digit_mods)) {
            let deltas64: Vec<Vec<u64>> = deltas
                .iter()
                .map(|row| row.iter().map(|x| x.to_u64().expect("reduced")).collect())
                .collect();
            let theta64: Vec<Vec<u64>> = theta
                .iter()
                .map(|(v, _)| v.iter().map(|x| x.to_u64().expect("reduced")).collect())
                .collect();
            return self.radical_scan_u64(total, n64, s, rank, &mods, &deltas64, &theta64);
        }
        self.radical_scan_big(total, s, rank, &digit_mods, &deltas, &theta)
    }

    fn radical_scan_u64(
        &self,
        total: u64,
        n: u64,
        s: usize,
        rank: usize,
        digit_mods: &[u64],
        deltas: &[Vec<u64>],
        theta_gens: &[Vec<u64>],
    ) -> Result<AbelianSubgroup> {
        let gens = deltas.first().map_or(0, Vec::len);
        let mut counters = vec![0u64; digit_mods.len()];
        let mut acc = vec![0u64; gens];
        let mut unit = vec![0u64; rank];
        let mut subgroup = AbelianSubgroup::trivial(self.combined_moduli());
        let mut found = 0u64;
        for step in 0..total {
            if acc.iter().all(|&x| x == 0) {
                found += 1;
                let mut v: Vec<BigInt> =
                    counters[..s].iter().map(|&c| BigInt::from(c)).collect();
                v.extend(unit.iter().map(|&c| BigInt::from(c)));
                if !subgroup.contains_element(&v) {
                    subgroup = subgroup.joined_with(&v);
                }
            }
            if step + 1 == total {
                break;
            }
            let mut idx = 0;
            loop {
                for (a, d) in acc.iter_mut().zip(&deltas[idx]) {
                    *a = (*a + *d) % n;
                }
                if idx >= s {
                    for (u, g) in unit.iter_mut().zip(&theta_gens[idx - s]) {
                        *u = (*u + *g) % n;
                    }
                }
                counters[idx] += 1;
                if counters[idx] == digit_mods[idx] {
                    counters[idx] = 0;
                    idx += 1;
                } else {
                    break;
                }
            }
        }
        debug_assert_eq!(subgroup.order(), BigInt::from(found));
        Ok(subgroup)
    }

    fn radical_scan_big(
        &self,
        total: u64,
        s: usize,
        rank: usize,
        digit_mods: &[BigInt],
        deltas: &[Vec<BigInt>],
        theta_gens: &[(Vec<BigInt>, BigInt)],
    ) -> Result<AbelianSubgroup> {
        let n = self.table.modulus();
        let gens = deltas.first().map_or(0, Vec::len);
        let mut counters = vec![BigInt::zero(); digit_mods.len()];
        let mut acc = vec![BigInt::zero(); gens];
        let mut unit = vec![BigInt::zero(); rank];
        let mut subgroup = AbelianSubgroup::trivial(self.combined_moduli());
        let mut found = 0u64;
        for step in 0..total {
            if acc.iter().all(|x| x.is_zero()) {
                found += 1;
                let mut v: Vec<BigInt> = counters[..s].to_vec();
                v.extend(unit.iter().cloned());
                if !subgroup.contains_element(&v) {
                    subgroup = subgroup.joined_with(&v);
                }
            }
            if step + 1 == total {
                break;
            }
            let mut idx = 0;
            loop {
                for (a, d) in acc.iter_mut().zip(&deltas[idx]) {
                    *a = (&*a + d).mod_floor(n);
                }
                if idx >= s {
                    for (u, g) in unit.iter_mut().zip(&theta_gens[idx - s].0) {
                        *u = (&*u + g).mod_floor(n);
                    }
                }
                counters[idx] += 1;
                if counters[idx] == digit_mods[idx] {
                    counters[idx] = BigInt::zero();
                    idx += 1;
                } else {
                    break;
                }
            }
        }
        debug_assert_eq!(subgroup.order(), BigInt::from(found));
        Ok(subgroup)
    }

    /// The center by its lattice characterization: uniformizer part in the
    /// sharp invariants, unit part in the image of Tr_q applied to the
    /// gamma-sharp sublattice.
    pub fn center_lattice(&self) -> AbelianSubgroup {
        self.product_subgroup(&self.sharp_invariant, &self.gamma_sharp.image_under(&self.trace_q))
    }

    /// Image of the sharp isogeny: same uniformizer part as the center, unit
    /// part the image of Tr_q applied to the sharp sublattice.
    pub fn isogeny_image(&self) -> AbelianSubgroup {
        self.product_subgroup(&self.sharp_invariant, &self.sharp.image_under(&self.trace_q))
    }

    /// Subgroup of G with uniformizer part the image of `pi_lat` (a
    /// sublattice of the invariants) and unit part the image of `unit_lat`.
    fn product_subgroup(&self, pi_lat: &Sublattice, unit_lat: &Sublattice) -> AbelianSubgroup {
        let s = self.invariant.rank();
        let rank = self.lat.rank();
        let mut gens: Vec<Vec<BigInt>> = Vec::new();
        for col in pi_lat.basis_columns() {
            let mut v = self
                .invariant
                .coordinates_of(&col)
                .expect("sublattice of the invariant lattice");
            v.extend(vec![BigInt::zero(); rank]);
            gens.push(v);
        }
        for col in unit_lat.basis_columns() {
            let mut v = vec![BigInt::zero(); s];
            v.extend(col);
            gens.push(v);
        }
        AbelianSubgroup::from_generators(self.combined_moduli(), &gens)
            .expect("consistent dimensions")
    }

    /// Packet data: center, isogeny image, their quotient, and the exactness
    /// check |center| = |image| * |packet|.
    pub fn packet_group(&self) -> PacketReport {
        let center = self.center_lattice();
        let isogeny = self.isogeny_image();
        let n = self.table.modulus();
        let theta_center = AbelianSubgroup::from_sublattice(
            &self.gamma_sharp.image_under(&self.trace_q),
            n,
        )
        .expect("positive modulus");
        let theta_isogeny =
            AbelianSubgroup::from_sublattice(&self.sharp.image_under(&self.trace_q), n)
                .expect("positive modulus");
        let packet = theta_center
            .quotient_by(&theta_isogeny)
            .expect("trace image containment");
        let containment_holds = isogeny.is_subgroup_of(&center);
        let exact_sequence_holds = center.order() == isogeny.order() * packet.order();
        let trace_image_strict = self.trace_image().order() < self.residual.order();
        PacketReport {
            center,
            isogeny,
            packet_factors: packet.factors().to_vec(),
            packet_order: packet.order(),
            containment_holds,
            exact_sequence_holds,
            trace_image_strict,
        }
    }

    /// Pseudo-spherical data: ranks of the parameter torus and splitting
    /// torsor group, the centralizer of the identity component (full unit
    /// part, sharp-invariant uniformizer part), and the invariant factors of
    /// sharp-invariants/V when V is supplied.
    pub fn pseudospherical(&self, v: Option<&Sublattice>) -> Result<PseudoSphericalReport> {
        let centralizer = self.product_subgroup(
            &self.sharp_invariant,
            self.residual.preimage_lattice(),
        );
        let pseudo_trivial_factors = match v {
            None => None,
            Some(v) => {
                if v.ambient_rank() != self.lat.rank() || !self.sharp_invariant.contains(v) {
                    return Err(Error::NotContained);
                }
                if v.rank() != self.sharp_invariant.rank() {
                    return Err(Error::NotFiniteIndex {
                        sub: v.rank(),
                        sup: self.sharp_invariant.rank(),
                    });
                }
                Some(v.quotient_invariant_factors(&self.sharp_invariant)?)
            }
        };
        Ok(PseudoSphericalReport {
            parameter_rank: self.sharp_invariant.rank(),
            splitting_rank: self.invariant.rank(),
            centralizer,
            pseudo_trivial_factors,
        })
    }

    /// The operator containments that justify the finite truncation.
    pub fn containment_chain(&self) -> Result<ContainmentChain> {
        let full = Sublattice::full(self.lat.rank());
        let q = self.table.q();
        let delta_q = self.lat.operator_matrix(Operator::DeltaQ, q)?;
        Ok(ContainmentChain {
            sharp_in_gamma_sharp: self.gamma_sharp.contains(&self.sharp),
            scaled_in_sharp: self.sharp.contains(&full.scaled(self.table.modulus())),
            delta_q_into_gamma_sharp: self.gamma_sharp.contains(&full.image_under(&delta_q)),
            trace_q_into_sharp: self.sharp.contains(&self.gamma_sharp.image_under(&self.trace_q)),
        })
    }

    /// Every commutator exponent between rational points is divisible by
    /// m * r = (q^d - 1)/n; checked on generator pairs, which bi-additivity
    /// extends to all of G.
    pub fn genuine_divisor_respected(&self) -> bool {
        let divisor = self.table.genuine_divisor();
        let gens = self.standard_generators();
        gens.iter().all(|t| {
            gens.iter()
                .all(|u| self.commutator_exponent(t, u).mod_floor(&divisor).is_zero())
        })
    }

    /// G with its commutator pairing as a finite Heisenberg datum: base
    /// orders from `generator_orders`, center modulus q^d - 1, cocycle the
    /// strict upper triangle of the generator commutator table.
    pub fn heisenberg_model(&self, cap: u64) -> Result<FiniteHeisenberg> {
        let order = self.group_order();
        if order > BigInt::from(cap) {
            return Err(Error::CapExceeded { size: order, cap });
        }
        let n = self
            .table
            .modulus()
            .to_u64()
            .ok_or_else(|| Error::CapExceeded { size: self.table.modulus().clone(), cap })?;
        if n > i64::MAX as u64 {
            return Err(Error::CapExceeded { size: BigInt::from(n), cap });
        }
        let orders: Vec<u64> = self
            .generator_orders()
            .iter()
            .map(|o| o.to_u64().expect("divides the modulus"))
            .collect();
        let gens = self.standard_generators();
        let g = gens.len();
        let mut beta = vec![vec![0i64; g]; g];
        for i in 0..g {
            for j in i + 1..g {
                beta[i][j] = self
                    .commutator_exponent(&gens[i], &gens[j])
                    .to_i64()
                    .expect("reduced exponent");
            }
        }
        FiniteHeisenberg::new(orders, n, &beta)
    }
}

fn pair(b: &IntMat, x: &[BigInt], z: &[BigInt]) -> BigInt {
    dot(x, &b.mul_vec(z))
}

fn dot(x: &[BigInt], y: &[BigInt]) -> BigInt {
    x.iter().zip(y).map(|(a, b)| a * b).sum()
}

fn small_all(mods: &[BigInt]) -> Option<Vec<u64>> {
    mods.iter().map(ToPrimitive::to_u64).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::smith_elementary_divisors;
    use num_traits::One;

    fn cover(gamma: &[Vec<i64>], d: u32, q_upper: &[Vec<i64>], q: u64, n: u64) -> UnramifiedCover {
        let lat = GammaLattice::new(d, IntMat::from_rows(gamma)).unwrap();
        let qf = QuadraticForm::new(IntMat::from_rows(q_upper)).unwrap();
        UnramifiedCover::new(lat, qf, q, n).unwrap()
    }

    /// Split rank one, q = 5, n = 4, Q = y^2.
    fn split_rank_one() -> UnramifiedCover {
        cover(&[vec![1]], 1, &[vec![1]], 5, 4)
    }

    /// Weil-restriction style swap action, q = 3, d = 2, n = 2, Q = y1 y2.
    fn swap_fixture() -> UnramifiedCover {
        cover(&[vec![0, 1], vec![1, 0]], 2, &[vec![0, 1], vec![0, 0]], 3, 2)
    }

    /// Norm-one circle: gamma = -1, d = 2, q = 5, n = 4, Q = y^2.
    fn norm_one_fixture() -> UnramifiedCover {
        cover(&[vec![-1]], 2, &[vec![1]], 5, 4)
    }

    fn big(v: &[i64]) -> Vec<BigInt> {
        v.iter().map(|&x| BigInt::from(x)).collect()
    }

    #[test]
    fn rejects_non_invariant_forms() {
        let lat = GammaLattice::new(2, IntMat::from_rows(&[vec![0, 1], vec![1, 0]])).unwrap();
        let qf = QuadraticForm::new(IntMat::from_rows(&[vec![1, 0], vec![0, 0]])).unwrap();
        assert!(matches!(
            UnramifiedCover::new(lat, qf, 3, 2),
            Err(Error::NotGammaInvariant)
        ));
    }

    #[test]
    fn residual_points_full_when_split() {
        let c = split_rank_one();
        assert_eq!(c.residual_fixed_points().order(), BigInt::from(4));
        assert_eq!(c.group_order(), BigInt::from(16));
    }

    #[test]
    fn residual_points_of_swap_match_enumeration() {
        let c = swap_fixture();
        let residual = c.residual_fixed_points();
        // independent oracle: test all 64 vectors of (Z/8)^2 against
        // y = q gamma y
        let mut members = Vec::new();
        for a in 0..8i64 {
            for b in 0..8i64 {
                let v = big(&[a, b]);
                let moved = c.lattice().gamma().mul_vec(&v);
                let ok = (0..2).all(|i| {
                    (BigInt::from(3) * &moved[i] - &v[i])
                        .mod_floor(&BigInt::from(8))
                        .is_zero()
                });
                if ok {
                    members.push((a, b));
                }
            }
        }
        assert_eq!(members.len(), 8);
        assert_eq!(residual.order(), BigInt::from(8));
        for (a, b) in members {
            assert!(residual.contains_element(&big(&[a, b])));
        }
        assert!(residual.contains_element(&big(&[1, 3])));
        assert!(!residual.contains_element(&big(&[1, 1])));
    }

    #[test]
    fn trace_image_lands_in_residual_points() {
        for c in [split_rank_one(), swap_fixture(), norm_one_fixture()] {
            assert!(c.trace_image().is_subgroup_of(c.residual_fixed_points()));
        }
    }

    #[test]
    fn split_commutator_value() {
        let c = split_rank_one();
        let t = c.torus_point(big(&[1]), big(&[0])).unwrap();
        let u = c.torus_point(big(&[0]), big(&[1])).unwrap();
        assert_eq!(c.commutator_exponent(&t, &u), BigInt::from(2));
        assert_eq!(c.commutator_exponent(&t, &t), BigInt::zero());
        assert_eq!(c.commutator_exponent(&u, &u), BigInt::zero());
    }

    #[test]
    fn commutator_is_alternating_and_lift_independent() {
        let c = swap_fixture();
        let t = c.torus_point(big(&[2, 2]), big(&[1, 3])).unwrap();
        let u = c.torus_point(big(&[1, 1]), big(&[2, 6])).unwrap();
        assert_eq!(c.commutator_exponent(&t, &t), BigInt::zero());
        let minus = (-c.commutator_exponent(&u, &t)).mod_floor(c.modulus());
        assert_eq!(c.commutator_exponent(&t, &u), minus);
        // shift the unit lift by 8 * (1, 1): same exponent
        let t_shifted = c.torus_point(big(&[2, 2]), big(&[9, 11])).unwrap();
        assert_eq!(
            c.commutator_exponent(&t_shifted, &u),
            c.commutator_exponent(&t, &u)
        );
        assert_eq!(
            c.commutator_exponent(&u, &t_shifted),
            c.commutator_exponent(&u, &t)
        );
    }

    #[test]
    fn torus_point_validation() {
        let c = swap_fixture();
        // (1, 0) is not gamma-fixed
        assert!(c.torus_point(big(&[1, 0]), big(&[0, 0])).is_err());
        // (1, 1) is not in the twisted kernel mod 8
        assert!(c.torus_point(big(&[1, 1]), big(&[1, 1])).is_err());
        assert!(c.torus_point(big(&[1, 1]), big(&[1, 3])).is_ok());
    }

    #[test]
    fn split_center_both_ways() {
        let c = split_rank_one();
        let brute = c.center_bruteforce(1 << 20).unwrap();
        let lattice = c.center_lattice();
        assert!(brute.is_subgroup_of(&lattice) && lattice.is_subgroup_of(&brute));
        assert_eq!(lattice.order(), BigInt::from(4));
        assert!(lattice.contains_element(&big(&[2, 0])));
        assert!(lattice.contains_element(&big(&[0, 2])));
        assert!(!lattice.contains_element(&big(&[1, 0])));
        assert!(!lattice.contains_element(&big(&[0, 1])));
        // split case: the center is exactly the isogeny image
        let iso = c.isogeny_image();
        assert!(iso.is_subgroup_of(&lattice) && lattice.is_subgroup_of(&iso));
    }

    #[test]
    fn split_smith_consistency() {
        let c = split_rank_one();
        let smith = smith_elementary_divisors(&c.form().bilinear(), 4).unwrap();
        assert_eq!(smith.predicted_sharp().basis(), c.sharp().basis());
        // subgroup level: the unit part of the center equals the image of
        // the predicted sharp sublattice
        let predicted =
            AbelianSubgroup::from_sublattice(&smith.predicted_sharp(), c.modulus()).unwrap();
        let unit_center = AbelianSubgroup::from_sublattice(
            &c.gamma_sharp().image_under(&c.lattice().operator_matrix(Operator::TraceQ, 5).unwrap()),
            c.modulus(),
        )
        .unwrap();
        assert!(predicted.is_subgroup_of(&unit_center) && unit_center.is_subgroup_of(&predicted));
    }

    #[test]
    fn swap_center_both_ways() {
        let c = swap_fixture();
        assert_eq!(c.group_order(), BigInt::from(64));
        let brute = c.center_bruteforce(1 << 20).unwrap();
        let lattice = c.center_lattice();
        assert!(brute.is_subgroup_of(&lattice) && lattice.is_subgroup_of(&brute));
        assert_eq!(lattice.order(), BigInt::from(16));
        // index 4: perfect square
        assert!(lattice.contains_element(&big(&[2, 0, 0])));
        assert!(lattice.contains_element(&big(&[0, 6, 2])));
        assert!(!lattice.contains_element(&big(&[1, 0, 0])));
    }

    #[test]
    fn swap_packet_is_trivial() {
        let c = swap_fixture();
        let report = c.packet_group();
        assert_eq!(report.packet_order, BigInt::one());
        assert!(report.packet_factors.is_empty());
        assert!(report.containment_holds);
        assert!(report.exact_sequence_holds);
        assert!(!report.trace_image_strict);
    }

    #[test]
    fn norm_one_packet_has_order_two() {
        let c = norm_one_fixture();
        assert_eq!(c.invariant_sublattice().rank(), 0);
        assert_eq!(c.group_order(), BigInt::from(6));
        let report = c.packet_group();
        assert_eq!(report.center.order(), BigInt::from(6));
        assert_eq!(report.isogeny.order(), BigInt::from(3));
        assert_eq!(report.packet_order, BigInt::from(2));
        assert_eq!(report.packet_factors, vec![BigInt::from(2)]);
        assert!(report.containment_holds);
        assert!(report.exact_sequence_holds);
        // no uniformizer directions: the pairing is identically trivial
        let brute = c.center_bruteforce(1 << 20).unwrap();
        assert!(
            brute.is_subgroup_of(&report.center) && report.center.is_subgroup_of(&brute)
        );
    }

    #[test]
    fn even_form_centralizes_everything() {
        // B = 0 mod n kills every commutator, so the center is all of G
        let c = cover(&[vec![0, 1], vec![1, 0]], 2, &[vec![0, 2], vec![0, 0]], 3, 2);
        let brute = c.center_bruteforce(1 << 20).unwrap();
        assert_eq!(brute.order(), c.group_order());
        let lattice = c.center_lattice();
        assert!(brute.is_subgroup_of(&lattice) && lattice.is_subgroup_of(&brute));
    }

    #[test]
    fn containment_chain_on_fixtures() {
        for c in [split_rank_one(), swap_fixture(), norm_one_fixture()] {
            assert!(c.containment_chain().unwrap().holds());
        }
    }

    #[test]
    fn commutators_divisible_by_genuine_divisor() {
        for c in [split_rank_one(), swap_fixture(), norm_one_fixture()] {
            assert!(c.genuine_divisor_respected());
        }
        // exhaustive over the swap fixture: every pair of group elements
        let c = swap_fixture();
        let divisor = c.symbols().genuine_divisor();
        let mut points = Vec::new();
        for a in 0..8i64 {
            for t in 0..8i64 {
                points.push(
                    c.torus_point(big(&[a, a]), big(&[t, 3 * t % 8])).unwrap(),
                );
            }
        }
        for t in &points {
            for u in &points {
                assert!(c.commutator_exponent(t, u).mod_floor(&divisor).is_zero());
            }
        }
    }

    #[test]
    fn center_bullets_match_trace_image_form() {
        // the membership via Tr_q images agrees with the representative
        // conditions: y2 in the sharp sublattice and delta_q y2 in
        // (q^d-1) * gamma-sharp
        for c in [swap_fixture(), norm_one_fixture()] {
            let n = c.modulus().clone();
            let theta_center = AbelianSubgroup::from_sublattice(
                &c.gamma_sharp().image_under(
                    &c.lattice().operator_matrix(Operator::TraceQ, c.symbols().q()).unwrap(),
                ),
                &n,
            )
            .unwrap();
            let sharp_mod = c.sharp().sum(&Sublattice::full(c.lattice().rank()).scaled(&n));
            let scaled_gamma_sharp = c.gamma_sharp().scaled(&n);
            // enumerate the residual subgroup through its cyclic generators
            let gens = c.residual_fixed_points().cyclic_generators();
            let mut elements = vec![vec![BigInt::zero(); c.lattice().rank()]];
            for (v, o) in &gens {
                let mut next = Vec::new();
                for e in &elements {
                    let mut acc = e.clone();
                    for _ in 0..o.to_u64().unwrap() {
                        next.push(acc.clone());
                        acc = acc
                            .iter()
                            .zip(v)
                            .map(|(x, y)| (x + y).mod_floor(&n))
                            .collect();
                    }
                }
                elements = next;
            }
            for b in &elements {
                let via_image = theta_center.contains_element(b);
                let in_sharp = sharp_mod.contains_vector(b);
                let twisted = c
                    .lattice()
                    .apply_operator(Operator::DeltaQ, c.symbols().q(), b)
                    .unwrap();
                let via_bullets = in_sharp && scaled_gamma_sharp.contains_vector(&twisted);
                assert_eq!(via_image, via_bullets, "unit part {b:?}");
            }
        }
    }

    #[test]
    fn pseudospherical_reports() {
        let c = split_rank_one();
        let plain = c.pseudospherical(None).unwrap();
        assert_eq!(plain.parameter_rank, 1);
        assert_eq!(plain.splitting_rank, 1);
        assert!(plain.pseudo_trivial_factors.is_none());
        // centralizer: uniformizer part 2Z/4, full unit part
        assert_eq!(plain.centralizer.order(), BigInt::from(8));

        let v = Sublattice::from_generators(1, &[big(&[4])]);
        let with_v = c.pseudospherical(Some(&v)).unwrap();
        assert_eq!(with_v.pseudo_trivial_factors, Some(vec![BigInt::from(2)]));

        let same = c.pseudospherical(Some(c.sharp_invariant())).unwrap();
        assert_eq!(same.pseudo_trivial_factors, Some(vec![]));

        let not_inside = Sublattice::from_generators(1, &[big(&[3])]);
        assert!(c.pseudospherical(Some(&not_inside)).is_err());
        let not_finite = Sublattice::zero(1);
        assert!(c.pseudospherical(Some(&not_finite)).is_err());
    }

    #[test]
    fn cap_is_respected() {
        let c = swap_fixture();
        assert!(matches!(
            c.center_bruteforce(10),
            Err(Error::CapExceeded { .. })
        ));
        assert!(matches!(c.heisenberg_model(10), Err(Error::CapExceeded { .. })));
    }

    #[test]
    fn heisenberg_model_matches_center_and_dimension() {
        for c in [split_rank_one(), swap_fixture()] {
            let h = c.heisenberg_model(1 << 20).unwrap();
            assert_eq!(BigInt::from(h.base_order()), c.group_order());
            let heis_center = h.center(1 << 20).unwrap();
            let lattice_center = c.center_lattice();
            assert_eq!(heis_center.order(), lattice_center.order());
            let chis = crate::heisenberg::genuine_central_characters(&h, &heis_center);
            let report =
                crate::heisenberg::svn_verify(&h, &chis[0], 1 << 20).unwrap();
            assert!(report.all_claims_hold(), "{report:?}");
            let index = (c.group_order() / lattice_center.order())
                .to_u64()
                .unwrap();
            assert_eq!(report.dim * report.dim, index);
        }
    }
}
