//! Report construction. Serialization is canonical: serde_json object keys
//! are sorted, integers are emitted as JSON numbers inside the 53-bit safe
//! range and as decimal strings beyond it, and nothing time-dependent is
//! written (timings go to stderr).

use crate::instance::InstanceFile;
use metator_core::abelian::AbelianSubgroup;
use metator_core::lattice::{smith_elementary_divisors, Operator, Sublattice};
use metator_core::matrix::IntMat;
use metator_core::real::RealCover;
use metator_core::unramified::UnramifiedCover;
use num_bigint::BigInt;
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};

const SAFE_MAX: i64 = (1 << 53) - 1;

pub fn json_int(x: &BigInt) -> Value {
    match x.to_i64() {
        Some(v) if v.abs() <= SAFE_MAX => json!(v),
        _ => json!(x.to_string()),
    }
}

pub fn json_ints(xs: &[BigInt]) -> Value {
    Value::Array(xs.iter().map(json_int).collect())
}

pub fn json_u64(x: u64) -> Value {
    if x <= SAFE_MAX as u64 {
        json!(x)
    } else {
        json!(x.to_string())
    }
}

/// Generators, cyclic orders and total order of a finite abelian subgroup.
pub fn subgroup_value(g: &AbelianSubgroup) -> Value {
    let gens = g.cyclic_generators();
    json!({
        "generators": Value::Array(gens.iter().map(|(v, _)| json_ints(v)).collect()),
        "orders": Value::Array(gens.iter().map(|(_, o)| json_int(o)).collect()),
        "order": json_int(&g.order()),
    })
}

pub fn render(value: &Value) -> String {
    let mut text = serde_json::to_string_pretty(value).expect("serializable");
    text.push('\n');
    text
}

/// A finished run: the report plus whether every checked flag held.
pub struct Outcome {
    pub report: Value,
    pub ok: bool,
}

/// Work size exceeds the enumeration cap: reported with exit code 3.
#[derive(Debug)]
pub struct CapHit {
    pub size: BigInt,
    pub cap: u64,
}

impl CapHit {
    pub fn to_value(&self) -> Value {
        json!({
            "error": "cap-exceeded",
            "size": json_int(&self.size),
            "cap": json_u64(self.cap),
        })
    }
}

fn first_disagreement(a: &AbelianSubgroup, b: &AbelianSubgroup) -> Option<Vec<BigInt>> {
    for (g, _) in a.cyclic_generators() {
        if !b.contains_element(&g) {
            return Some(g);
        }
    }
    for (g, _) in b.cyclic_generators() {
        if !a.contains_element(&g) {
            return Some(g);
        }
    }
    None
}

pub fn unramified_report(
    file: &InstanceFile,
    cover: &UnramifiedCover,
    pseudo_trivial: Option<&Sublattice>,
    check: bool,
    cap: u64,
    seed: Value,
) -> Result<Outcome, CapHit> {
    let rank = cover.lattice().rank();
    let n_big = cover.modulus().clone();
    let order = cover.group_order();
    if order > BigInt::from(cap) {
        return Err(CapHit { size: order, cap });
    }

    let full = Sublattice::full(rank);
    let smith = smith_elementary_divisors(&cover.form().bilinear(), file.n)
        .expect("validated level");
    let packet = cover.packet_group();
    let pseudo = cover
        .pseudospherical(pseudo_trivial)
        .expect("pseudo-trivial subgroup validated before reporting");

    let mut map = Map::new();
    map.insert("echo".into(), file.to_value());
    map.insert("kind".into(), json!(file.kind.as_str()));
    map.insert("modulus".into(), json_int(&n_big));
    map.insert("group_order".into(), json_int(&cover.group_order()));
    map.insert(
        "invariant_rank".into(),
        json!(cover.invariant_sublattice().rank()),
    );
    map.insert(
        "invariant_factors".into(),
        json!({
            "ybar": json_ints(&vec![n_big.clone(); rank]),
            "residual": json_ints(cover.residual_fixed_points().presentation().factors()),
            "sharp_quotient": json_ints(
                &cover.sharp().quotient_invariant_factors(&full).expect("finite index")
            ),
            "gamma_sharp_quotient": json_ints(
                &cover.gamma_sharp().quotient_invariant_factors(&full).expect("finite index")
            ),
        }),
    );
    map.insert(
        "elementary_divisors".into(),
        json!({
            "d": json_ints(&smith.divisors),
            "e": json_ints(&smith.co_divisors),
        }),
    );
    map.insert("center".into(), subgroup_value(&packet.center));
    map.insert("isogeny_image".into(), subgroup_value(&packet.isogeny));
    map.insert(
        "packet".into(),
        json!({
            "factors": json_ints(&packet.packet_factors),
            "order": json_int(&packet.packet_order),
            "containment_holds": packet.containment_holds,
            "exact_sequence_holds": packet.exact_sequence_holds,
            "trace_image_strict": packet.trace_image_strict,
        }),
    );
    map.insert(
        "pseudospherical".into(),
        json!({
            "parameter_rank": pseudo.parameter_rank,
            "splitting_rank": pseudo.splitting_rank,
            "centralizer_order": json_int(&pseudo.centralizer.order()),
            "pseudo_trivial_factors": pseudo
                .pseudo_trivial_factors
                .as_deref()
                .map(json_ints)
                .unwrap_or(Value::Null),
        }),
    );
    map.insert("seed".into(), seed);

    let mut ok = true;
    if check {
        let brute = match cover.center_bruteforce(cap) {
            Ok(b) => b,
            Err(metator_core::Error::CapExceeded { size, cap }) => {
                return Err(CapHit { size, cap })
            }
            Err(e) => panic!("unexpected enumeration failure: {e}"),
        };
        let lattice = cover.center_lattice();
        let center_agrees =
            brute.is_subgroup_of(&lattice) && lattice.is_subgroup_of(&brute);
        let witness = if center_agrees {
            Value::Null
        } else {
            match first_disagreement(&brute, &lattice) {
                Some(w) => json!({
                    "coordinates": json_ints(&w),
                    "in_bruteforce": brute.contains_element(&w),
                    "in_lattice": lattice.contains_element(&w),
                }),
                None => Value::Null,
            }
        };

        let chain = cover.containment_chain().expect("validated instance");
        let lat = cover.lattice();
        let q = file.q.expect("unramified instance");
        let delta = lat.operator_matrix(Operator::Delta, q).expect("valid q");
        let trace = lat.operator_matrix(Operator::Trace, q).expect("valid q");
        let delta_q = lat.operator_matrix(Operator::DeltaQ, q).expect("valid q");
        let trace_q = lat.operator_matrix(Operator::TraceQ, q).expect("valid q");
        let identities = trace.mul(&delta) == IntMat::zero(rank, rank)
            && trace_q.mul(&delta_q) == IntMat::identity(rank).scale(&n_big);

        let smith_sharp = smith.predicted_sharp();
        let smith_matches =
            smith_sharp.contains(cover.sharp()) && cover.sharp().contains(&smith_sharp);

        let split_flag = if lat.d() == 1 {
            let split_ok = packet.center.is_subgroup_of(&packet.isogeny)
                && packet.isogeny.is_subgroup_of(&packet.center)
                && packet.packet_order == BigInt::from(1);
            Value::Bool(split_ok)
        } else {
            Value::Null
        };

        let flags = [
            ("center_oracle_agrees", Value::Bool(center_agrees)),
            ("containment_holds", Value::Bool(packet.containment_holds)),
            ("exact_sequence_holds", Value::Bool(packet.exact_sequence_holds)),
            (
                "genuine_divisor_respected",
                Value::Bool(cover.genuine_divisor_respected()),
            ),
            ("lattice_chain_holds", Value::Bool(chain.holds())),
            ("operator_identities_hold", Value::Bool(identities)),
            ("smith_sharp_matches", Value::Bool(smith_matches)),
            ("split_center_equals_isogeny", split_flag),
        ];
        ok = flags
            .iter()
            .all(|(_, v)| !matches!(v, Value::Bool(false)));
        let mut oracle = Map::new();
        for (k, v) in flags {
            oracle.insert(k.into(), v);
        }
        oracle.insert("witness".into(), witness);
        map.insert("oracle".into(), Value::Object(oracle));
    }

    Ok(Outcome { report: Value::Object(map), ok })
}

pub fn real_report(
    file: &InstanceFile,
    cover: &RealCover,
    check: bool,
    cap: u64,
    seed: Value,
) -> Result<Outcome, CapHit> {
    let rank = cover.lattice().rank();
    let s = cover.invariant_sublattice().rank();
    let size = BigInt::from(2).pow(s as u32);
    if size > BigInt::from(cap) {
        return Err(CapHit { size, cap });
    }

    let full = Sublattice::full(rank);
    let smith =
        smith_elementary_divisors(&cover.form().bilinear(), 2).expect("n = 2 is valid");
    let packet = cover.packet();

    let mut map = Map::new();
    map.insert("echo".into(), file.to_value());
    map.insert("kind".into(), json!(file.kind.as_str()));
    map.insert("component_factors".into(), json_ints(&packet.component_factors));
    map.insert("component_order".into(), json_int(&packet.component_order));
    map.insert(
        "component_kernel_order".into(),
        json_int(&cover.component_kernel().order()),
    );
    map.insert("invariant_rank".into(), json!(s));
    map.insert(
        "invariant_factors".into(),
        json!({
            "sharp_quotient": json_ints(
                &cover.sharp().quotient_invariant_factors(&full).expect("finite index")
            ),
            "gamma_sharp_quotient": json_ints(
                &cover.gamma_sharp().quotient_invariant_factors(&full).expect("finite index")
            ),
        }),
    );
    map.insert(
        "elementary_divisors".into(),
        json!({
            "d": json_ints(&smith.divisors),
            "e": json_ints(&smith.co_divisors),
        }),
    );
    let mut center = match subgroup_value(&packet.center_image) {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    center.insert("order_in_components".into(), json_int(&packet.center_order));
    map.insert("center".into(), Value::Object(center));
    let mut iota = match subgroup_value(&packet.isogeny_image) {
        Value::Object(m) => m,
        _ => unreachable!(),
    };
    iota.insert("order_in_components".into(), json_int(&packet.isogeny_order));
    map.insert("isogeny_image".into(), Value::Object(iota));
    map.insert(
        "packet".into(),
        json!({
            "factors": json_ints(&packet.packet_factors),
            "order": json_int(&packet.packet_order),
            "containment_holds": packet.containment_holds,
            "exact_sequence_holds": packet.exact_sequence_holds,
        }),
    );
    map.insert("seed".into(), seed);

    let mut ok = true;
    if check {
        ok = packet.oracle_agrees
            && packet.containment_holds
            && packet.exact_sequence_holds;
        let witness = if packet.oracle_agrees {
            Value::Null
        } else {
            let oracle = cover.center_oracle();
            match first_disagreement(&oracle, &packet.center_image) {
                Some(w) => json!({
                    "coordinates": json_ints(&w),
                    "in_bruteforce": oracle.contains_element(&w),
                    "in_lattice": packet.center_image.contains_element(&w),
                }),
                None => Value::Null,
            }
        };
        map.insert(
            "oracle".into(),
            json!({
                "center_oracle_agrees": packet.oracle_agrees,
                "containment_holds": packet.containment_holds,
                "exact_sequence_holds": packet.exact_sequence_holds,
                "witness": witness,
            }),
        );
    }

    Ok(Outcome { report: Value::Object(map), ok })
}
