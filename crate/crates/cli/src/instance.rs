//! Instance files: parsing, validation with field-precise diagnostics, and
//! canonical serialization. Integers may appear as JSON numbers or as
//! decimal strings; anything beyond the 53-bit safe range must use strings.

use metator_core::lattice::{check_gamma_invariance, GammaLattice, QuadraticForm};
use metator_core::matrix::IntMat;
use metator_core::symbols::SymbolTable;
use serde_json::{json, Map, Value};

pub const SCHEMA_VERSION: u64 = 1;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Kind {
    NonarchUnramified,
    Real,
}

impl Kind {
    pub fn as_str(self) -> &'static str {
        match self {
            Kind::NonarchUnramified => "nonarch-unramified",
            Kind::Real => "real",
        }
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct Caps {
    /// Bound on the order of any group that gets enumerated element by
    /// element; overrides the command-line default when present.
    pub center: Option<u64>,
}

#[derive(Clone, Debug)]
pub struct InstanceFile {
    pub schema_version: u64,
    pub kind: Kind,
    pub rank: usize,
    pub d: u32,
    pub gamma: Vec<Vec<i64>>,
    pub q_upper: Vec<Vec<i64>>,
    pub q: Option<u64>,
    pub n: u64,
    /// Generators (ambient column vectors) of a pseudo-trivial subgroup.
    pub v_basis: Option<Vec<Vec<i64>>>,
    pub caps: Option<Caps>,
}

/// One validation failure: the offending field and the violated rule.
#[derive(Clone, Debug)]
pub struct Issue {
    pub path: String,
    pub rule: String,
}

impl Issue {
    fn new(path: &str, rule: impl Into<String>) -> Issue {
        Issue { path: path.to_string(), rule: rule.into() }
    }

    pub fn to_value(&self) -> Value {
        json!({ "path": self.path, "rule": self.rule })
    }
}

fn as_integer(v: &Value) -> Option<i128> {
    match v {
        Value::Number(x) => {
            if x.is_f64() && !x.is_i64() && !x.is_u64() {
                return None;
            }
            x.as_i64().map(i128::from).or_else(|| x.as_u64().map(i128::from))
        }
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

fn get_integer(
    map: &Map<String, Value>,
    key: &str,
    issues: &mut Vec<Issue>,
) -> Option<i128> {
    match map.get(key) {
        None => {
            issues.push(Issue::new(key, "required field is missing"));
            None
        }
        Some(v) => match as_integer(v) {
            Some(x) => Some(x),
            None => {
                issues.push(Issue::new(key, "expected an integer (number or decimal string)"));
                None
            }
        },
    }
}

fn get_matrix(
    map: &Map<String, Value>,
    key: &str,
    rank: usize,
    issues: &mut Vec<Issue>,
) -> Option<Vec<Vec<i64>>> {
    let v = match map.get(key) {
        None => {
            issues.push(Issue::new(key, "required field is missing"));
            return None;
        }
        Some(v) => v,
    };
    let rows = match v.as_array() {
        Some(rows) => rows,
        None => {
            issues.push(Issue::new(key, "expected a row-major array of integer rows"));
            return None;
        }
    };
    if rows.len() != rank {
        issues.push(Issue::new(key, format!("expected {rank} rows, found {}", rows.len())));
        return None;
    }
    let mut out = Vec::with_capacity(rank);
    for (i, row) in rows.iter().enumerate() {
        let cells = match row.as_array() {
            Some(c) if c.len() == rank => c,
            _ => {
                issues.push(Issue::new(key, format!("row {i} must be an array of {rank} integers")));
                return None;
            }
        };
        let mut r = Vec::with_capacity(rank);
        for (j, cell) in cells.iter().enumerate() {
            match as_integer(cell).and_then(|x| i64::try_from(x).ok()) {
                Some(x) => r.push(x),
                None => {
                    issues.push(Issue::new(key, format!("entry ({i},{j}) is not a machine integer")));
                    return None;
                }
            }
        }
        out.push(r);
    }
    Some(out)
}

impl InstanceFile {
    /// Parses and fully validates a JSON instance. Every violated rule is
    /// reported with the path of the offending field.
    pub fn from_json(text: &str) -> Result<InstanceFile, Vec<Issue>> {
        let value: Value = match serde_json::from_str(text) {
            Ok(v) => v,
            Err(e) => return Err(vec![Issue::new("", format!("not valid JSON: {e}"))]),
        };
        let map = match value.as_object() {
            Some(m) => m,
            None => return Err(vec![Issue::new("", "top level must be a JSON object")]),
        };
        let mut issues = Vec::new();

        let schema_version = get_integer(map, "schema_version", &mut issues);
        if let Some(v) = schema_version {
            if v != SCHEMA_VERSION as i128 {
                issues.push(Issue::new(
                    "schema_version",
                    format!("unsupported version {v}, expected {SCHEMA_VERSION}"),
                ));
            }
        }

        let kind = match map.get("kind").and_then(Value::as_str) {
            Some("nonarch-unramified") => Some(Kind::NonarchUnramified),
            Some("real") => Some(Kind::Real),
            Some(other) => {
                issues.push(Issue::new(
                    "kind",
                    format!("unknown kind {other:?}, expected \"nonarch-unramified\" or \"real\""),
                ));
                None
            }
            None => {
                issues.push(Issue::new("kind", "required field is missing or not a string"));
                None
            }
        };

        let rank = match get_integer(map, "rank", &mut issues) {
            Some(r) if (1..=64).contains(&r) => Some(r as usize),
            Some(r) => {
                issues.push(Issue::new("rank", format!("rank {r} outside 1..=64")));
                None
            }
            None => None,
        };
        let d = match get_integer(map, "d", &mut issues) {
            Some(x) if (1..=64).contains(&x) => Some(x as u32),
            Some(x) => {
                issues.push(Issue::new("d", format!("d = {x} outside 1..=64")));
                None
            }
            None => None,
        };

        let (gamma, q_upper) = match rank {
            Some(r) => (
                get_matrix(map, "gamma", r, &mut issues),
                get_matrix(map, "Q_upper", r, &mut issues),
            ),
            None => (None, None),
        };

        let n = match get_integer(map, "n", &mut issues) {
            Some(x) if x >= 1 && x <= u64::MAX as i128 => Some(x as u64),
            Some(x) => {
                issues.push(Issue::new("n", format!("n = {x} must be a positive integer")));
                None
            }
            None => None,
        };

        let q = match map.get("q") {
            None => None,
            Some(v) => match as_integer(v).and_then(|x| u64::try_from(x).ok()) {
                Some(x) => Some(x),
                None => {
                    issues.push(Issue::new("q", "expected a positive integer"));
                    None
                }
            },
        };

        let v_basis = match map.get("V_basis") {
            None => None,
            Some(Value::Array(vecs)) => {
                let mut out = Vec::new();
                let mut ok = true;
                for (i, v) in vecs.iter().enumerate() {
                    let cells = v.as_array().filter(|c| rank == Some(c.len()));
                    match cells {
                        Some(c) => {
                            let mut col = Vec::new();
                            for cell in c {
                                match as_integer(cell).and_then(|x| i64::try_from(x).ok()) {
                                    Some(x) => col.push(x),
                                    None => {
                                        ok = false;
                                        issues.push(Issue::new(
                                            "V_basis",
                                            format!("vector {i} has a non-integer entry"),
                                        ));
                                        break;
                                    }
                                }
                            }
                            out.push(col);
                        }
                        None => {
                            ok = false;
                            issues.push(Issue::new(
                                "V_basis",
                                format!("vector {i} must be an array of rank-many integers"),
                            ));
                            break;
                        }
                    }
                }
                if ok {
                    Some(out)
                } else {
                    None
                }
            }
            Some(_) => {
                issues.push(Issue::new("V_basis", "expected an array of integer vectors"));
                None
            }
        };

        let caps = match map.get("caps") {
            None => None,
            Some(Value::Object(o)) => {
                let center = o.get("center").and_then(|v| {
                    as_integer(v).and_then(|x| u64::try_from(x).ok())
                });
                if o.contains_key("center") && center.is_none() {
                    issues.push(Issue::new("caps", "center cap must be a positive integer"));
                }
                Some(Caps { center })
            }
            Some(_) => {
                issues.push(Issue::new("caps", "expected an object"));
                None
            }
        };

        for key in map.keys() {
            if !matches!(
                key.as_str(),
                "schema_version" | "kind" | "rank" | "d" | "gamma" | "Q_upper" | "q" | "n"
                    | "V_basis" | "caps"
            ) {
                issues.push(Issue::new(key, "unknown field"));
            }
        }

        let (kind, rank, d, gamma, q_upper, n) = match (kind, rank, d, gamma, q_upper, n) {
            (Some(a), Some(b), Some(c), Some(e), Some(f), Some(g)) => (a, b, c, e, f, g),
            _ => return Err(issues),
        };
        let file = InstanceFile {
            schema_version: SCHEMA_VERSION,
            kind,
            rank,
            d,
            gamma,
            q_upper,
            q,
            n,
            v_basis,
            caps,
        };
        file.validate_semantics(&mut issues);
        if issues.is_empty() {
            Ok(file)
        } else {
            Err(issues)
        }
    }

    /// Module-level rules re-checked on load.
    fn validate_semantics(&self, issues: &mut Vec<Issue>) {
        let gamma = IntMat::from_rows(&self.gamma);
        let lat = match GammaLattice::new(self.d, gamma) {
            Ok(l) => Some(l),
            Err(e) => {
                issues.push(Issue::new("gamma", e.to_string()));
                None
            }
        };
        let qf = match QuadraticForm::new(IntMat::from_rows(&self.q_upper)) {
            Ok(f) => Some(f),
            Err(e) => {
                issues.push(Issue::new("Q_upper", e.to_string()));
                None
            }
        };
        if let (Some(lat), Some(qf)) = (&lat, &qf) {
            match check_gamma_invariance(lat, qf) {
                Ok(true) => {}
                Ok(false) => {
                    issues.push(Issue::new("Q_upper", "form is not invariant under gamma"));
                }
                Err(e) => issues.push(Issue::new("Q_upper", e.to_string())),
            }
        }
        match self.kind {
            Kind::NonarchUnramified => match self.q {
                None => issues.push(Issue::new("q", "required for kind \"nonarch-unramified\"")),
                Some(q) => {
                    if let Err(e) = SymbolTable::new(q, self.d, self.n) {
                        let path = match e {
                            metator_core::Error::LevelDoesNotDivide { .. } => "n",
                            _ => "q",
                        };
                        issues.push(Issue::new(path, e.to_string()));
                    }
                }
            },
            Kind::Real => {
                if self.q.is_some() {
                    issues.push(Issue::new("q", "must be absent for kind \"real\""));
                }
                if self.n != 2 {
                    issues.push(Issue::new("n", "real covers have n = 2"));
                }
                if self.d > 2 {
                    issues.push(Issue::new("d", "real actions are involutions (d <= 2)"));
                }
                if self.v_basis.is_some() {
                    issues.push(Issue::new(
                        "V_basis",
                        "only supported for kind \"nonarch-unramified\"",
                    ));
                }
            }
        }
    }

    /// Canonical JSON value (sorted keys; absent optionals omitted).
    pub fn to_value(&self) -> Value {
        let mut map = Map::new();
        map.insert("schema_version".into(), json!(self.schema_version));
        map.insert("kind".into(), json!(self.kind.as_str()));
        map.insert("rank".into(), json!(self.rank));
        map.insert("d".into(), json!(self.d));
        map.insert("gamma".into(), json!(self.gamma));
        map.insert("Q_upper".into(), json!(self.q_upper));
        if let Some(q) = self.q {
            map.insert("q".into(), json!(q));
        }
        map.insert("n".into(), json!(self.n));
        if let Some(v) = &self.v_basis {
            map.insert("V_basis".into(), json!(v));
        }
        if let Some(caps) = &self.caps {
            let mut c = Map::new();
            if let Some(x) = caps.center {
                c.insert("center".into(), json!(x));
            }
            map.insert("caps".into(), Value::Object(c));
        }
        Value::Object(map)
    }

    pub fn to_json(&self) -> String {
        let mut text = serde_json::to_string_pretty(&self.to_value()).expect("serializable");
        text.push('\n');
        text
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn split_instance() -> String {
        serde_json::to_string(&json!({
            "schema_version": 1,
            "kind": "nonarch-unramified",
            "rank": 1,
            "d": 1,
            "gamma": [[1]],
            "Q_upper": [[1]],
            "q": 5,
            "n": 4
        }))
        .unwrap()
    }

    #[test]
    fn parses_a_minimal_split_instance() {
        let f = InstanceFile::from_json(&split_instance()).unwrap();
        assert_eq!(f.kind, Kind::NonarchUnramified);
        assert_eq!(f.rank, 1);
        assert_eq!(f.q, Some(5));
    }

    #[test]
    fn string_integers_are_accepted() {
        let text = serde_json::to_string(&json!({
            "schema_version": "1",
            "kind": "nonarch-unramified",
            "rank": 1,
            "d": 1,
            "gamma": [["1"]],
            "Q_upper": [[1]],
            "q": "5",
            "n": 4
        }))
        .unwrap();
        assert!(InstanceFile::from_json(&text).is_ok());
    }

    #[test]
    fn broken_gamma_reports_its_path() {
        let text = serde_json::to_string(&json!({
            "schema_version": 1,
            "kind": "nonarch-unramified",
            "rank": 2,
            "d": 2,
            "gamma": [[1, 1], [0, 1]],
            "Q_upper": [[0, 0], [0, 0]],
            "q": 3,
            "n": 2
        }))
        .unwrap();
        let issues = InstanceFile::from_json(&text).unwrap_err();
        assert!(issues.iter().any(|i| i.path == "gamma"), "{issues:?}");
    }

    #[test]
    fn level_must_divide_q_minus_one() {
        let text = split_instance().replace("\"n\":4", "\"n\":3");
        let issues = InstanceFile::from_json(&text).unwrap_err();
        assert!(issues.iter().any(|i| i.path == "n"), "{issues:?}");
    }

    #[test]
    fn real_instances_reject_q() {
        let text = serde_json::to_string(&json!({
            "schema_version": 1,
            "kind": "real",
            "rank": 1,
            "d": 1,
            "gamma": [[1]],
            "Q_upper": [[1]],
            "q": 5,
            "n": 2
        }))
        .unwrap();
        let issues = InstanceFile::from_json(&text).unwrap_err();
        assert!(issues.iter().any(|i| i.path == "q"));
    }

    #[test]
    fn noninvariant_form_reports_q_upper() {
        let text = serde_json::to_string(&json!({
            "schema_version": 1,
            "kind": "nonarch-unramified",
            "rank": 2,
            "d": 2,
            "gamma": [[0, 1], [1, 0]],
            "Q_upper": [[1, 0], [0, 0]],
            "q": 3,
            "n": 2
        }))
        .unwrap();
        let issues = InstanceFile::from_json(&text).unwrap_err();
        assert!(issues.iter().any(|i| i.path == "Q_upper"));
    }

    #[test]
    fn canonical_round_trip_is_stable() {
        let f = InstanceFile::from_json(&split_instance()).unwrap();
        let text = f.to_json();
        let g = InstanceFile::from_json(&text).unwrap();
        assert_eq!(text, g.to_json());
    }
}
