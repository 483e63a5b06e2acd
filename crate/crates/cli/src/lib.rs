//! JSON request/response front end for `polyheight-core`.
//!
//! A request is `{"command": ..., "payload": {...}}`; the response is
//! `{"status": "ok"|"error", "result": ..., "provenance": [...]}` with every
//! number rendered as an exact `"p/q"` string.

pub mod wire;

use polyheight_core::bkk::{polarize_I, BkkInstance, F_hat, I_hat};
use polyheight_core::minima::{absolute_minimum, essential_minimum, Convention, ZetaOracle};
use polyheight_core::okounkov::{product_body, toric_okounkov, transform_extrema, volumes, BaseTransform};
use polyheight_core::polyint::{integrate_polynomial, integrate_roof_composite};
use polyheight_core::qp::QuadraticForm;
use polyheight_core::rational::Rational;
use polyheight_core::semiabelian::{height, minima_report, SemiabelianInput};
use polyheight_core::verify::{run_all, run_suite, DEFAULT_SEED, SUITES};
use serde_json::{json, Value};

use crate::wire::{
    adelic_json, count_json, halfspaces_json, parse_adelic, parse_polynomial, parse_polytope, parse_ring, point_json,
    rational_json, roof_json, variable_names, Node, WireResult,
};

pub const COMMANDS: [&str; 7] = ["describe", "integrate", "bkk", "height", "minima", "okounkov", "verify"];

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("schema error at '{pointer}': {message}")]
    Schema { pointer: String, message: String },
    #[error(transparent)]
    Domain(#[from] polyheight_core::Error),
}

impl CliError {
    pub fn kind(&self) -> &'static str {
        match self {
            CliError::Schema { .. } => "SchemaError",
            CliError::Domain(e) => e.name(),
        }
    }

    pub fn exit_code(&self) -> u8 {
        match self {
            CliError::Schema { .. } => 2,
            CliError::Domain(_) => 1,
        }
    }

    fn to_json(&self) -> Value {
        match self {
            CliError::Schema { pointer, message } => json!({ "kind": "SchemaError", "pointer": pointer, "message": message }),
            CliError::Domain(e) => json!({ "kind": e.name(), "message": e.to_string() }),
        }
    }
}

/// Command-line overrides applied on top of the payload.
#[derive(Debug, Clone, Copy, Default)]
pub struct Options {
    pub seed: Option<u64>,
    pub convention: Option<Convention>,
}

#[derive(Debug, Clone, PartialEq)]
pub struct Response {
    pub result: Result<Value, (String, Value, u8)>,
    pub provenance: Vec<String>,
}

impl Response {
    pub fn is_ok(&self) -> bool {
        self.result.is_ok()
    }

    pub fn exit_code(&self) -> u8 {
        match &self.result {
            Ok(_) => 0,
            Err((_, _, code)) => *code,
        }
    }

    pub fn to_json(&self) -> Value {
        match &self.result {
            Ok(v) => json!({ "status": "ok", "result": v, "provenance": self.provenance }),
            Err((_, e, _)) => json!({ "status": "error", "error": e, "provenance": self.provenance }),
        }
    }
}

struct Output {
    result: Value,
    provenance: Vec<&'static str>,
}

/// Runs a full request object.
pub fn run(request: &Value, opts: &Options) -> Response {
    let root = Node::root(request);
    let outcome = (|| {
        let command = root.get("command")?;
        let name = command.str()?;
        if !COMMANDS.contains(&name) {
            return Err(command.error(format!("unknown command; expected one of {}", COMMANDS.join(", "))));
        }
        dispatch(name, &root.get("payload")?, opts)
    })();
    match outcome {
        Ok(out) => Response { result: Ok(out.result), provenance: out.provenance.into_iter().map(String::from).collect() },
        Err(e) => Response { result: Err((e.kind().to_string(), e.to_json(), e.exit_code())), provenance: Vec::new() },
    }
}

/// Runs `command` on a bare payload, or on a full request whose command
/// must then agree.
pub fn run_command(command: &str, input: &Value, opts: &Options) -> Response {
    if let Some(given) = input.get("command") {
        if given.as_str() != Some(command) {
            let e = CliError::Schema { pointer: "/command".into(), message: format!("request is not a {command} request") };
            return Response { result: Err((e.kind().to_string(), e.to_json(), e.exit_code())), provenance: Vec::new() };
        }
        return run(input, opts);
    }
    run(&json!({ "command": command, "payload": input }), opts)
}

fn dispatch(name: &str, payload: &Node, opts: &Options) -> WireResult<Output> {
    match name {
        "describe" => describe(payload),
        "integrate" => integrate(payload),
        "bkk" => bkk(payload),
        "height" => height_cmd(payload),
        "minima" => minima(payload, opts),
        "okounkov" => okounkov(payload),
        _ => verify(payload, opts),
    }
}

fn describe(payload: &Node) -> WireResult<Output> {
    let p = parse_adelic(payload)?;
    let base = p.base();
    let t = base.ambient_dim();
    let f_vector: Vec<Value> =
        (0..=base.affine_dim()).map(|k| base.faces(k).map(|f| count_json(f.len()))).collect::<Result<_, _>>()?;
    let roofs: Vec<Value> = p
        .roofs()
        .iter()
        .map(|(w, r)| {
            let mut entry = roof_json(w, &p.weight(w), r);
            entry["max"] = rational_json(&r.max_value());
            entry["cells"] = count_json(r.cells().len());
            entry
        })
        .collect();
    let global = p.global_roof();
    Ok(Output {
        result: json!({
            "dim": count_json(t),
            "affine_dim": count_json(base.affine_dim()),
            "vertices": adelic_json(&p)["polytope"]["vertices"].clone(),
            "halfspaces": halfspaces_json(base)["halfspaces"].clone(),
            "f_vector": f_vector,
            "volume": rational_json(&base.volume()),
            "normalized_volume": rational_json(&(base.volume() * Rational::from_integer(polyheight_core::rational::factorial(t)))),
            "roofs": roofs,
            "global_roof_max": rational_json(&global.max_value()),
            "roof_integral": rational_json(&integrate_roof_composite(&p, &theta_polynomial(t))?),
        }),
        provenance: vec![
            "canonical polytope form: vertex list and facet inequalities by exact double description",
            "global roof: weighted sum over places of the roof functions",
            "roof integral: integral over the base polytope of the global roof",
        ],
    })
}

/// The polynomial `s` in `t + 1` variables, the last standing for the roof.
fn theta_polynomial(t: usize) -> polyheight_core::poly::Polynomial {
    polyheight_core::poly::Polynomial::var(t + 1, t)
}

fn integrate(payload: &Node) -> WireResult<Output> {
    let with_roofs = payload.opt("roofs")?.is_some();
    let p = parse_adelic(payload)?;
    let t = p.dim();
    if with_roofs {
        let mut vars = variable_names(payload, t + 1)?;
        if payload.opt("variables")?.is_none() {
            vars[t] = "s".into();
        }
        let f = parse_polynomial(&payload.get("polynomial")?, &vars)?;
        let value = integrate_roof_composite(&p, &f)?;
        return Ok(Output {
            result: rational_json(&value),
            provenance: vec!["integral over the base polytope of f(m, theta(m)) for the global roof theta, cell by cell"],
        });
    }
    let vars = variable_names(payload, t)?;
    let f = parse_polynomial(&payload.get("polynomial")?, &vars)?;
    let value = integrate_polynomial(p.base(), &f)?;
    Ok(Output {
        result: rational_json(&value),
        provenance: vec!["exact polynomial integral over a simplicial triangulation, monomials on the standard simplex"],
    })
}

fn bkk(payload: &Node) -> WireResult<Output> {
    let p = parse_adelic(payload)?;
    let ring = parse_ring(&payload.get("ring")?)?;
    let gamma_node = payload.get("gamma")?;
    let gamma = ring.parse_element(gamma_node.str()?).map_err(|e| gamma_node.error(e.to_string()))?;
    let i = payload.get("i")?.usize()? as u32;
    let inst = BkkInstance::new(ring, gamma, i)?;
    let mut result = json!({
        "I_hat": rational_json(&I_hat(&inst, &p)?),
        "F_hat": rational_json(&F_hat(&inst, &p)?),
        "degree": count_json(inst.degree()),
    });
    let mut provenance = vec![
        "I_hat = integral over the base polytope of deg((c(m) + theta(m)[inf])^i * gamma) dm",
        "F_hat = (t+i)!/i! * I_hat",
    ];
    if let Some(parts) = payload.opt("polarize")? {
        let mut polys = Vec::new();
        for item in parts.items()? {
            polys.push(parse_adelic(&item)?);
        }
        result["polarization"] = rational_json(&polarize_I(&inst, &polys)?);
        provenance.push("polarization of I_hat by inclusion-exclusion over Minkowski sums");
    }
    Ok(Output { result, provenance })
}

fn semiabelian_input(payload: &Node) -> WireResult<SemiabelianInput> {
    let p = parse_adelic(payload)?;
    if let Some(t) = payload.opt("t")? {
        if t.usize()? != p.dim() {
            return Err(t.error(format!("polytope has dimension {}", p.dim())));
        }
    }
    let g = payload.get("g")?.usize()?;
    let gram = payload.get("gram")?;
    let gram_m = gram.matrix()?;
    if gram_m.len() != p.dim() || gram_m.iter().any(|r| r.len() != p.dim()) {
        return Err(gram.error(format!("expected a {0}x{0} matrix", p.dim())));
    }
    let deg_m = match payload.opt("degM")? {
        Some(d) => d.rational()?,
        None => Rational::from_integer(1.into()),
    };
    Ok(SemiabelianInput::new(g, p, gram_m, deg_m)?)
}

fn height_cmd(payload: &Node) -> WireResult<Output> {
    let inp = semiabelian_input(payload)?;
    let r = height(&inp)?;
    Ok(Output {
        result: json!({
            "okounkov_route": rational_json(&r.okounkov_route),
            "bkk_route": rational_json(&r.bkk_route),
            "printed_formula": rational_json(&r.printed_formula),
            "consistent": r.consistent,
            "normalization_note": r.normalization_note,
        }),
        provenance: vec![
            "okounkov route: (d+1)! times the integral of theta - h(c(m)) over the base times the abelian fiber",
            "bkk route: sum over i of C(d+1, t+i) (t+i)!/i! I_hat for gamma = omega^(g+1-i)",
            "closed formula: -(d+1)! times the integral of h(c(m)) over the base",
        ],
    })
}

fn minima(payload: &Node, opts: &Options) -> WireResult<Output> {
    let inp = semiabelian_input(payload)?;
    let convention = match (opts.convention, payload.opt("convention")?) {
        (Some(c), _) => c,
        (None, Some(c)) => c.str()?.parse().map_err(|_| c.error("expected \"default\" or \"printed\""))?,
        (None, None) => Convention::Default,
    };
    let zetas = minima_report(&inp, convention)?;
    let z = ZetaOracle::concave_quadratic(inp.gram.clone(), vec![Rational::from_integer(0.into()); inp.t()], Rational::from_integer(0.into()))?;
    let abs = absolute_minimum(&inp.polytope, &z)?;
    Ok(Output {
        result: json!({
            "convention": match convention { Convention::Default => "default", Convention::Printed => "printed" },
            "zeta": zetas.iter().map(rational_json).collect::<Vec<_>>(),
            "essential_minimum": rational_json(&essential_minimum(&inp.polytope, &z)?),
            "absolute_minimum": {
                "value": rational_json(&abs.value),
                "at": point_json(&abs.at),
                "boundary_only": abs.boundary_only,
            },
        }),
        provenance: vec![
            "successive minima: min over k-faces of the max of theta - h(c(m)), exact quadratic programming per face",
            "essential minimum: max over the base of theta - h(c(m))",
            "absolute minimum: min over the vertices of theta - h(c(m))",
        ],
    })
}

fn okounkov(payload: &Node) -> WireResult<Output> {
    let p = parse_adelic(payload)?;
    let (body, provenance) = match payload.opt("fiber")? {
        None => (toric_okounkov(&p), vec!["toric body: the base polytope with transform the global roof"]),
        Some(f) => {
            let fiber = parse_polytope(&f)?;
            let transform = match payload.opt("gram")? {
                None => BaseTransform::Zero,
                Some(g) => BaseTransform::NegQuadratic(QuadraticForm::from_gram(g.matrix()?)?),
            };
            (product_body(&p, &fiber, transform)?, vec!["product body: base times fiber with transform theta - h(c(m))"])
        }
    };
    let v = volumes(&body)?;
    let e = transform_extrema(&body)?;
    let mut provenance = provenance;
    provenance.push("geometric volume d! vol, arithmetic volume (d+1)! times the transform integral");
    Ok(Output {
        result: json!({
            "dim": count_json(body.dim()),
            "geometric": rational_json(&v.geometric),
            "chi": rational_json(&v.chi),
            "transform_max": rational_json(&e.max),
            "transform_inf": rational_json(&e.inf),
        }),
        provenance,
    })
}

fn verify(payload: &Node, opts: &Options) -> WireResult<Output> {
    let suite = match payload.opt("suite")? {
        Some(s) => {
            let name = s.str()?;
            if name != "all" && !SUITES.contains(&name) {
                return Err(s.error(format!("unknown suite; expected \"all\" or one of {}", SUITES.join(", "))));
            }
            name.to_string()
        }
        None => "all".into(),
    };
    let seed = match (opts.seed, payload.opt("seed")?) {
        (Some(s), _) => s,
        (None, Some(s)) => s.u64()?,
        (None, None) => DEFAULT_SEED,
    };
    let results = if suite == "all" { run_all(seed) } else { vec![run_suite(&suite, seed)?] };
    let rows: Vec<Value> = results
        .iter()
        .map(|r| {
            let mut row = json!({
                "suite": r.name,
                "status": if r.ok() { "pass" } else { "fail" },
                "cases": count_json(r.cases),
                "passed": count_json(r.passed),
            });
            if let Some(c) = &r.counterexample {
                row["counterexample"] = Value::String(c.clone());
            }
            row
        })
        .collect();
    Ok(Output {
        result: json!({
            "seed": seed.to_string(),
            "all_passed": results.iter().all(|r| r.ok()),
            "suites": rows,
        }),
        provenance: vec!["seeded random identity suites with exact rational comparisons"],
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn error_kinds_and_codes() {
        let s = CliError::Schema { pointer: "/x".into(), message: "bad".into() };
        assert_eq!((s.kind(), s.exit_code()), ("SchemaError", 2));
        let d = CliError::from(polyheight_core::Error::NotPSD);
        assert_eq!((d.kind(), d.exit_code()), ("NotPSD", 1));
    }

    #[test]
    fn missing_payload_is_a_schema_error() {
        let r = run(&json!({"command": "describe"}), &Options::default());
        assert_eq!(r.to_json()["error"]["pointer"], "/payload");
        assert!(r.provenance.is_empty());
    }
}
