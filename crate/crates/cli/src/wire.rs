//! Exact JSON encodings of the domain objects. Every number travels as a
//! `"p/q"` string; parse failures carry the JSON pointer of the bad field.

use std::collections::BTreeMap;

use polyheight_core::base_model::{build_ring, parse_monomial, BaseRing, RingSpec};
use polyheight_core::poly::{default_var_names, Polynomial};
use polyheight_core::polytope::{Halfspace, RationalPolytope};
use polyheight_core::rational::{fmt_rational, parse_rational, Point, Rational};
use polyheight_core::roofs::{build_roof, AdelicPolytope, Roof};
use polyheight_core::semiabelian::chambert_loir_polytope;
use serde_json::{json, Map, Value};

use crate::CliError;

pub type WireResult<T> = std::result::Result<T, CliError>;

fn escape(key: &str) -> String {
    key.replace('~', "~0").replace('/', "~1")
}

/// A JSON value together with its pointer from the request root.
#[derive(Debug, Clone)]
pub struct Node<'a> {
    pub value: &'a Value,
    pub pointer: String,
}

impl<'a> Node<'a> {
    pub fn root(value: &'a Value) -> Self {
        Node { value, pointer: String::new() }
    }

    pub fn error(&self, message: impl Into<String>) -> CliError {
        CliError::Schema { pointer: self.pointer.clone(), message: message.into() }
    }

    pub fn get(&self, key: &str) -> WireResult<Node<'a>> {
        self.opt(key)?.ok_or_else(|| CliError::Schema {
            pointer: format!("{}/{}", self.pointer, escape(key)),
            message: "missing required field".into(),
        })
    }

    pub fn opt(&self, key: &str) -> WireResult<Option<Node<'a>>> {
        let obj = self.value.as_object().ok_or_else(|| self.error("expected an object"))?;
        Ok(obj.get(key).map(|v| Node { value: v, pointer: format!("{}/{}", self.pointer, escape(key)) }))
    }

    pub fn items(&self) -> WireResult<Vec<Node<'a>>> {
        let arr = self.value.as_array().ok_or_else(|| self.error("expected an array"))?;
        Ok(arr
            .iter()
            .enumerate()
            .map(|(i, v)| Node { value: v, pointer: format!("{}/{i}", self.pointer) })
            .collect())
    }

    pub fn str(&self) -> WireResult<&'a str> {
        self.value.as_str().ok_or_else(|| self.error("expected a string"))
    }

    pub fn usize(&self) -> WireResult<usize> {
        let n = match self.value {
            Value::Number(n) => n.as_u64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        n.and_then(|n| usize::try_from(n).ok()).ok_or_else(|| self.error("expected a nonnegative integer"))
    }

    pub fn u64(&self) -> WireResult<u64> {
        let n = match self.value {
            Value::Number(n) => n.as_u64(),
            Value::String(s) => s.trim().parse().ok(),
            _ => None,
        };
        n.ok_or_else(|| self.error("expected a nonnegative integer"))
    }

    pub fn rational(&self) -> WireResult<Rational> {
        let q = match self.value {
            Value::String(s) => parse_rational(s),
            Value::Number(n) if n.is_i64() || n.is_u64() => parse_rational(&n.to_string()),
            _ => None,
        };
        q.ok_or_else(|| self.error("expected an exact rational such as \"3/2\""))
    }

    pub fn point(&self) -> WireResult<Point> {
        self.items()?.iter().map(Node::rational).collect()
    }

    pub fn matrix(&self) -> WireResult<Vec<Point>> {
        self.items()?.iter().map(Node::point).collect()
    }
}

pub fn rational_json(q: &Rational) -> Value {
    Value::String(fmt_rational(q))
}

pub fn point_json(p: &[Rational]) -> Value {
    Value::Array(p.iter().map(rational_json).collect())
}

pub fn count_json(n: usize) -> Value {
    Value::String(n.to_string())
}

// ---- polytopes ----

fn parse_interval(node: &Node, s: &str) -> WireResult<RationalPolytope> {
    let inner = s
        .trim()
        .strip_prefix('[')
        .and_then(|r| r.strip_suffix(']'))
        .ok_or_else(|| node.error("expected \"[a,b]\", \"CL-triangle\" or \"CL-<t>\""))?;
    let (a, b) = inner.split_once(',').ok_or_else(|| node.error("interval needs two endpoints"))?;
    match (parse_rational(a), parse_rational(b)) {
        (Some(a), Some(b)) if a <= b => Ok(RationalPolytope::interval(a, b)),
        _ => Err(node.error("interval endpoints must be rationals with a <= b")),
    }
}

pub fn parse_polytope(node: &Node) -> WireResult<RationalPolytope> {
    if let Value::String(s) = node.value {
        let t = match s.trim() {
            "CL-triangle" => Some(2),
            other => other.strip_prefix("CL-").map(|r| r.parse::<usize>().map_err(|_| node.error("bad CL dimension"))).transpose()?,
        };
        return match t {
            Some(t) => Ok(chambert_loir_polytope(t)?),
            None => parse_interval(node, s),
        };
    }
    if let Some(t) = node.opt("chambert_loir")? {
        return Ok(chambert_loir_polytope(t.usize()?)?);
    }
    if let Some(v) = node.opt("vertices")? {
        let pts = v.matrix()?;
        if pts.is_empty() {
            return Err(v.error("at least one vertex is required"));
        }
        let dim = pts[0].len();
        if let Some((i, _)) = pts.iter().enumerate().find(|(_, p)| p.len() != dim) {
            return Err(v.items()?[i].error(format!("expected {dim} coordinates")));
        }
        return Ok(RationalPolytope::from_vertices(pts)?);
    }
    if let Some(h) = node.opt("halfspaces")? {
        let items = h.items()?;
        if items.is_empty() {
            return Err(h.error("at least one halfspace is required"));
        }
        let mut hs = Vec::new();
        for item in &items {
            let normal = item.get("normal")?.point()?;
            let offset = item.get("offset")?.rational()?;
            if let Some(dim) = hs.first().map(|h: &Halfspace| h.normal.len()) {
                if dim != normal.len() {
                    return Err(item.get("normal")?.error(format!("expected {dim} coordinates")));
                }
            }
            hs.push(Halfspace::new(normal, offset));
        }
        let dim = hs[0].normal.len();
        return Ok(RationalPolytope::from_halfspaces(dim, &hs)?);
    }
    Err(node.error("expected a polytope: {\"vertices\"}, {\"halfspaces\"}, {\"chambert_loir\"} or an interval string"))
}

pub fn polytope_json(p: &RationalPolytope) -> Value {
    json!({ "vertices": p.vertices().iter().map(|v| point_json(v)).collect::<Vec<_>>() })
}

pub fn halfspaces_json(p: &RationalPolytope) -> Value {
    let rows: Vec<Value> = p
        .halfspaces()
        .iter()
        .map(|h| json!({ "normal": point_json(&h.normal), "offset": rational_json(&h.offset) }))
        .collect();
    json!({ "halfspaces": rows })
}

// ---- roofs and adelic polytopes ----

/// One roof entry `{"place", "weight", "lift": [[point..., height]]}` over `base`.
pub fn parse_roof(node: &Node, base: &RationalPolytope) -> WireResult<(String, Rational, Roof)> {
    let place = node.get("place")?.str()?.to_string();
    let weight = match node.opt("weight")? {
        Some(w) => w.rational()?,
        None => Rational::from_integer(1.into()),
    };
    let t = base.ambient_dim();
    let lift = node.get("lift")?;
    let mut pts = Vec::new();
    for row in lift.items()? {
        let mut v = row.point()?;
        if v.len() != t + 1 {
            return Err(row.error(format!("expected {t} coordinates and a height")));
        }
        let h = v.pop().expect("nonempty");
        pts.push((v, h));
    }
    let roof = build_roof(base, &pts)?;
    Ok((place, weight, roof))
}

/// Reads `polytope` and the optional `roofs` list from a payload object.
pub fn parse_adelic(payload: &Node) -> WireResult<AdelicPolytope> {
    let base = parse_polytope(&payload.get("polytope")?)?;
    let mut roofs = BTreeMap::new();
    let mut weights = BTreeMap::new();
    if let Some(list) = payload.opt("roofs")? {
        for item in list.items()? {
            let (place, weight, roof) = parse_roof(&item, &base)?;
            if roofs.contains_key(&place) {
                return Err(item.get("place")?.error(format!("place {place} appears twice")));
            }
            roofs.insert(place.clone(), roof);
            weights.insert(place, weight);
        }
    }
    Ok(AdelicPolytope::new(base, roofs, weights)?)
}

pub fn roof_json(place: &str, weight: &Rational, roof: &Roof) -> Value {
    let lift: Vec<Value> = roof
        .breakpoints()
        .iter()
        .map(|(p, h)| {
            let mut row = p.clone();
            row.push(h.clone());
            point_json(&row)
        })
        .collect();
    json!({ "place": place, "weight": rational_json(weight), "lift": lift })
}

/// `{"polytope", "roofs"}` in the payload layout read by [`parse_adelic`].
pub fn adelic_json(p: &AdelicPolytope) -> Value {
    let roofs: Vec<Value> = p.roofs().iter().map(|(w, r)| roof_json(w, &p.weight(w), r)).collect();
    json!({ "polytope": polytope_json(p.base()), "roofs": roofs })
}

// ---- polynomials ----

pub fn variable_names(payload: &Node, n: usize) -> WireResult<Vec<String>> {
    match payload.opt("variables")? {
        None => Ok(default_var_names(n)),
        Some(v) => {
            let names: Vec<String> = v.items()?.iter().map(|x| x.str().map(str::to_string)).collect::<WireResult<_>>()?;
            if names.len() != n {
                return Err(v.error(format!("expected {n} variable names")));
            }
            Ok(names)
        }
    }
}

pub fn parse_polynomial(node: &Node, vars: &[String]) -> WireResult<Polynomial> {
    let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    Polynomial::parse(node.str()?, &refs).map_err(|e| node.error(e.to_string()))
}

pub fn polynomial_json(p: &Polynomial, vars: &[String]) -> Value {
    let refs: Vec<&str> = vars.iter().map(String::as_str).collect();
    json!({ "polynomial": p.to_string_with(&refs), "variables": vars })
}

// ---- rings ----

/// Either `{"abelian": {"g", "degM", "gram"}}` or an explicit presentation
/// `{"generators": [{"name", "grade"}], "infinity", "top_degree", "table":
/// {monomial: value}, "zeros": [monomial], "lattice_map": [[...]]}`.
pub fn parse_ring(node: &Node) -> WireResult<BaseRing> {
    if let Some(ab) = node.opt("abelian")? {
        let g = ab.get("g")?.usize()?;
        let deg_m = ab.get("degM")?.rational()?;
        let gram = ab.get("gram")?.matrix()?;
        return Ok(polyheight_core::base_model::abelian_canonical_ring(g as u32, &deg_m, &gram)?);
    }
    let mut generators = Vec::new();
    for g in node.get("generators")?.items()? {
        let name = g.get("name")?.str()?.to_string();
        let grade = g.get("grade")?.usize()?;
        generators.push((name, grade as u32));
    }
    let names: Vec<String> = generators.iter().map(|(n, _)| n.clone()).collect();
    let infinity = node.get("infinity")?.str()?.to_string();
    let top_degree = node.get("top_degree")?.usize()? as u32;
    let table_node = node.get("table")?;
    let table_obj = table_node.value.as_object().ok_or_else(|| table_node.error("expected an object"))?;
    let mut table = Vec::new();
    for key in table_obj.keys() {
        let entry = table_node.get(key)?;
        let m = parse_monomial(&names, key).map_err(|e| entry.error(e.to_string()))?;
        table.push((m, entry.rational()?));
    }
    let mut zeros = Vec::new();
    if let Some(z) = node.opt("zeros")? {
        for item in z.items()? {
            zeros.push(parse_monomial(&names, item.str()?).map_err(|e| item.error(e.to_string()))?);
        }
    }
    let mut lattice_map = Vec::new();
    if let Some(l) = node.opt("lattice_map")? {
        for row in l.items()? {
            let r = row.point()?;
            if r.len() != names.len() {
                return Err(row.error(format!("expected {} coefficients", names.len())));
            }
            lattice_map.push(r);
        }
    }
    Ok(build_ring(&RingSpec { generators, infinity, top_degree, table, zeros, lattice_map })?)
}

pub fn ring_json(ring: &BaseRing) -> Value {
    let spec = ring.spec();
    let gens: Vec<Value> = spec.generators.iter().map(|(n, g)| json!({ "name": n, "grade": count_json(*g as usize) })).collect();
    let mut table = Map::new();
    for (m, v) in &spec.table {
        table.insert(ring.monomial_name(m), rational_json(v));
    }
    let zeros: Vec<Value> = spec.zeros.iter().map(|m| Value::String(ring.monomial_name(m))).collect();
    let lattice: Vec<Value> = spec.lattice_map.iter().map(|r| point_json(r)).collect();
    json!({
        "generators": gens,
        "infinity": spec.infinity,
        "top_degree": count_json(spec.top_degree as usize),
        "table": table,
        "zeros": zeros,
        "lattice_map": lattice,
    })
}
