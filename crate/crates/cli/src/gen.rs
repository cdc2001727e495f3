//! Seeded random instances. Every emitted file is a pure function of
//! (seed, index, profile): the generator draws from a ChaCha20 stream per
//! index and resamples deterministically until the size budget is met.

use crate::instance::{InstanceFile, Kind, SCHEMA_VERSION};
use metator_core::lattice::{GammaLattice, QuadraticForm};
use metator_core::matrix::IntMat;
use metator_core::unramified::UnramifiedCover;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha20Rng;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Profile {
    /// Unramified covers, rank <= 3, d <= 3.
    Default,
    /// Split tori only (d = 1, trivial action).
    Split,
    /// Rank up to 4.
    Wide,
    /// Real covers (n = 2, involutions).
    Real,
    /// Unramified covers small enough for full character-theoretic checks.
    Tiny,
}

impl Profile {
    pub fn as_str(self) -> &'static str {
        match self {
            Profile::Default => "default",
            Profile::Split => "split",
            Profile::Wide => "wide",
            Profile::Real => "real",
            Profile::Tiny => "tiny",
        }
    }
}

impl std::str::FromStr for Profile {
    type Err = String;

    fn from_str(s: &str) -> Result<Profile, String> {
        match s {
            "default" => Ok(Profile::Default),
            "split" => Ok(Profile::Split),
            "wide" => Ok(Profile::Wide),
            "real" => Ok(Profile::Real),
            "tiny" => Ok(Profile::Tiny),
            other => Err(format!(
                "unknown profile {other:?}, expected default|split|wide|real|tiny"
            )),
        }
    }
}

struct Bounds {
    kind: Kind,
    max_rank: usize,
    ds: &'static [u32],
    qs: &'static [u64],
    max_group: u64,
}

fn bounds(profile: Profile) -> Bounds {
    match profile {
        Profile::Default => Bounds {
            kind: Kind::NonarchUnramified,
            max_rank: 3,
            ds: &[1, 2, 3],
            qs: &[3, 4, 5, 7, 8, 9],
            max_group: 200_000,
        },
        Profile::Split => Bounds {
            kind: Kind::NonarchUnramified,
            max_rank: 3,
            ds: &[1],
            qs: &[3, 4, 5, 7, 8, 9],
            max_group: 200_000,
        },
        Profile::Wide => Bounds {
            kind: Kind::NonarchUnramified,
            max_rank: 4,
            ds: &[1, 2, 3],
            qs: &[3, 4, 5, 7, 8, 9],
            max_group: 200_000,
        },
        Profile::Real => Bounds {
            kind: Kind::Real,
            max_rank: 4,
            ds: &[1, 2],
            qs: &[],
            max_group: u64::MAX,
        },
        Profile::Tiny => Bounds {
            kind: Kind::NonarchUnramified,
            max_rank: 2,
            ds: &[1, 2],
            qs: &[3, 4, 5],
            max_group: 1024,
        },
    }
}

/// Order-d building blocks on the diagonal: fixed lines, sign flips (d even),
/// coordinate swaps (d even) and the order-3 companion block (d divisible
/// by 3).
fn random_gamma(rng: &mut ChaCha20Rng, rank: usize, d: u32) -> IntMat {
    let mut rows = vec![vec![0i64; rank]; rank];
    let mut i = 0;
    while i < rank {
        let room = rank - i;
        let choice = rng.gen_range(0..4u8);
        match (d, choice, room) {
            (2, 1, _) => {
                rows[i][i] = -1;
                i += 1;
            }
            (2, 2, r) if r >= 2 => {
                rows[i][i + 1] = 1;
                rows[i + 1][i] = 1;
                i += 2;
            }
            (3, 1, r) | (3, 2, r) if r >= 2 => {
                rows[i][i + 1] = -1;
                rows[i + 1][i] = 1;
                rows[i + 1][i + 1] = -1;
                i += 2;
            }
            _ => {
                rows[i][i] = 1;
                i += 1;
            }
        }
    }
    let gamma = IntMat::from_rows(&rows);
    if rank < 2 || rng.gen_bool(0.5) {
        return gamma;
    }
    // conjugate by a unit upper-triangular shear to leave the split basis
    let mut u = vec![vec![0i64; rank]; rank];
    for r in 0..rank {
        u[r][r] = 1;
        for c in (r + 1)..rank {
            u[r][c] = rng.gen_range(-1..=1);
        }
    }
    let u = IntMat::from_rows(&u);
    let u_inv = u.inverse_unimodular().expect("unit triangular");
    u.mul(&gamma).mul(&u_inv)
}

/// Symmetrization over the cyclic group: the form y -> sum_i Q0(gamma^i y)
/// is invariant by construction; refold the Gram matrix to upper triangular.
fn symmetrized_form(rng: &mut ChaCha20Rng, rank: usize, d: u32, gamma: &IntMat) -> Vec<Vec<i64>> {
    let mut seed = vec![vec![0i64; rank]; rank];
    for r in 0..rank {
        for c in r..rank {
            seed[r][c] = rng.gen_range(-3..=3);
        }
    }
    let seed = IntMat::from_rows(&seed);
    let mut total = IntMat::zero(rank, rank);
    let mut pow = IntMat::identity(rank);
    for _ in 0..d {
        total = total.add(&pow.transpose().mul(&seed).mul(&pow));
        pow = pow.mul(gamma);
    }
    let mut out = vec![vec![0i64; rank]; rank];
    for r in 0..rank {
        for c in r..rank {
            let entry = if c == r {
                total[(r, r)].clone()
            } else {
                &total[(r, c)] + &total[(c, r)]
            };
            out[r][c] = entry.to_i64().expect("small entries");
        }
    }
    out
}

fn matrix_rows(m: &IntMat) -> Vec<Vec<i64>> {
    (0..m.rows())
        .map(|r| {
            (0..m.cols())
                .map(|c| m[(r, c)].to_i64().expect("small entries"))
                .collect()
        })
        .collect()
}

fn draw(rng: &mut ChaCha20Rng, b: &Bounds) -> InstanceFile {
    let rank = rng.gen_range(1..=b.max_rank);
    let d = b.ds[rng.gen_range(0..b.ds.len())];
    let gamma = random_gamma(rng, rank, d);
    let q_upper = symmetrized_form(rng, rank, d, &gamma);
    let (q, n) = match b.kind {
        Kind::Real => (None, 2),
        Kind::NonarchUnramified => {
            let q = b.qs[rng.gen_range(0..b.qs.len())];
            let levels: Vec<u64> = (2..=q - 1).filter(|k| (q - 1) % k == 0).collect();
            (Some(q), levels[rng.gen_range(0..levels.len())])
        }
    };
    InstanceFile {
        schema_version: SCHEMA_VERSION,
        kind: b.kind,
        rank,
        d,
        gamma: matrix_rows(&gamma),
        q_upper,
        q,
        n,
        v_basis: None,
        caps: None,
    }
}

fn fits(file: &InstanceFile, b: &Bounds) -> bool {
    match file.kind {
        Kind::Real => true,
        Kind::NonarchUnramified => {
            let lat = GammaLattice::new(file.d, IntMat::from_rows(&file.gamma))
                .expect("generated action");
            let qf = QuadraticForm::new(IntMat::from_rows(&file.q_upper))
                .expect("generated form");
            let cover = UnramifiedCover::new(lat, qf, file.q.expect("unramified"), file.n)
                .expect("generated instance");
            cover.group_order() <= BigInt::from(b.max_group)
        }
    }
}

fn minimal(b: &Bounds) -> InstanceFile {
    InstanceFile {
        schema_version: SCHEMA_VERSION,
        kind: b.kind,
        rank: 1,
        d: 1,
        gamma: vec![vec![1]],
        q_upper: vec![vec![1]],
        q: match b.kind {
            Kind::Real => None,
            Kind::NonarchUnramified => Some(3),
        },
        n: 2,
        v_basis: None,
        caps: None,
    }
}

/// Deterministic instance for (seed, index, profile); resamples from the
/// same stream until the group-size budget holds.
pub fn random_instance(seed: u64, index: u64, profile: Profile) -> InstanceFile {
    let b = bounds(profile);
    let mut rng = ChaCha20Rng::seed_from_u64(seed);
    rng.set_stream(index);
    for _ in 0..64 {
        let file = draw(&mut rng, &b);
        if fits(&file, &b) {
            return file;
        }
    }
    minimal(&b)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn generation_is_deterministic() {
        for profile in [Profile::Default, Profile::Split, Profile::Wide, Profile::Real, Profile::Tiny] {
            let a = random_instance(17, 3, profile);
            let b = random_instance(17, 3, profile);
            assert_eq!(a.to_json(), b.to_json());
        }
    }

    #[test]
    fn generated_instances_validate() {
        for profile in [Profile::Default, Profile::Split, Profile::Wide, Profile::Real, Profile::Tiny] {
            for index in 0..20 {
                let file = random_instance(99, index, profile);
                let parsed = InstanceFile::from_json(&file.to_json());
                assert!(parsed.is_ok(), "{profile:?} #{index}: {:?}", parsed.err());
            }
        }
    }

    #[test]
    fn split_profile_has_trivial_action() {
        for index in 0..10 {
            let file = random_instance(5, index, Profile::Split);
            assert_eq!(file.d, 1);
            let gamma = IntMat::from_rows(&file.gamma);
            assert!(gamma.is_identity());
        }
    }

    #[test]
    fn tiny_profile_respects_the_size_budget() {
        for index in 0..30 {
            let file = random_instance(1, index, Profile::Tiny);
            assert!(fits(&file, &bounds(Profile::Tiny)), "#{index}");
        }
    }

    #[test]
    fn distinct_indices_differ() {
        let a = random_instance(7, 0, Profile::Default);
        let b = random_instance(7, 1, Profile::Default);
        let c = random_instance(8, 0, Profile::Default);
        assert!(a.to_json() != b.to_json() || a.to_json() != c.to_json());
    }
}
