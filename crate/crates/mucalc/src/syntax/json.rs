//! JSON encoding of terms.
//!
//! Every node is an object tagged by `"k"`:
//!
//! | form            | encoding                                                |
//! |-----------------|---------------------------------------------------------|
//! | `x`             | `{"k":"var","name":"x"}`                                |
//! | `#a`            | `{"k":"mvar","name":"a"}`                               |
//! | `\x.t`          | `{"k":"lam","var":"x","body":t}`                        |
//! | `\1x.t`         | `{"k":"lam1","var":"x","body":t}`                       |
//! | `\2`            | `{"k":"lam2"}`                                          |
//! | `\'x.t`         | `{"k":"lamv","var":"x","body":t}`                       |
//! | `mu #a.[#b]t`   | `{"k":"mu","mvar":"a","name":"b","body":t}` (λμ)        |
//! | `mu #a.t`       | `{"k":"mu","mvar":"a","body":t}` (λμ++)                 |
//! | `mu'#a.t`       | `{"k":"muv","mvar":"a","body":t}`                       |
//! | `(t u)`         | `{"k":"app","fun":t,"arg":u}`                           |
//! | `xi#a`          | `{"k":"xi","mvar":"a"}`                                 |

use serde_json::{json, Value};

use crate::names::valid_ident;
use crate::syntax::{lmu, lmu::LmuTerm, mupp, mupp::MuppTerm, SyntaxError};

pub fn lmu_to_json(t: &LmuTerm) -> Value {
    match t {
        LmuTerm::Var(x) => json!({"k": "var", "name": x}),
        LmuTerm::Lam(x, b) => json!({"k": "lam", "var": x, "body": lmu_to_json(b)}),
        LmuTerm::App(f, a) => json!({"k": "app", "fun": lmu_to_json(f), "arg": lmu_to_json(a)}),
        LmuTerm::Mu { binder, name, body } => {
            json!({"k": "mu", "mvar": binder, "name": name, "body": lmu_to_json(body)})
        }
    }
}

pub fn mupp_to_json(t: &MuppTerm) -> Value {
    match t {
        MuppTerm::Var(x) => json!({"k": "var", "name": x}),
        MuppTerm::MuVar(a) => json!({"k": "mvar", "name": a}),
        MuppTerm::Lam(x, b) => json!({"k": "lam", "var": x, "body": mupp_to_json(b)}),
        MuppTerm::Lam1(x, b) => json!({"k": "lam1", "var": x, "body": mupp_to_json(b)}),
        MuppTerm::Lam2 => json!({"k": "lam2"}),
        MuppTerm::LamVac(x, b) => json!({"k": "lamv", "var": x, "body": mupp_to_json(b)}),
        MuppTerm::Mu(a, b) => json!({"k": "mu", "mvar": a, "body": mupp_to_json(b)}),
        MuppTerm::MuVac(a, b) => json!({"k": "muv", "mvar": a, "body": mupp_to_json(b)}),
        MuppTerm::App(f, a) => json!({"k": "app", "fun": mupp_to_json(f), "arg": mupp_to_json(a)}),
        MuppTerm::Xi(a) => json!({"k": "xi", "mvar": a}),
    }
}

fn field<'v>(v: &'v Value, k: &str, what: &str) -> Result<&'v Value, SyntaxError> {
    v.get(k)
        .ok_or_else(|| SyntaxError::new(format!("{what} node is missing field \"{k}\"")))
}

fn name_field(v: &Value, k: &str, what: &str) -> Result<String, SyntaxError> {
    let s = field(v, k, what)?
        .as_str()
        .ok_or_else(|| SyntaxError::new(format!("{what} field \"{k}\" must be a string")))?;
    if !valid_ident(s) {
        return Err(SyntaxError::new(format!(
            "{what} field \"{k}\": '{s}' is not a valid name \
             (lowercase first letter, then letters/digits/'_'/'$')"
        )));
    }
    Ok(s.to_string())
}

fn kind(v: &Value) -> Result<&str, SyntaxError> {
    v.get("k")
        .and_then(Value::as_str)
        .ok_or_else(|| SyntaxError::new("term node must be an object with a \"k\" tag"))
}

/// Decode a λμ term (also checks well-formedness).
pub fn lmu_from_json(v: &Value) -> Result<LmuTerm, SyntaxError> {
    let t = lmu_node(v)?;
    t.wf()?;
    Ok(t)
}

fn lmu_node(v: &Value) -> Result<LmuTerm, SyntaxError> {
    match kind(v)? {
        "var" => Ok(LmuTerm::Var(name_field(v, "name", "var")?)),
        "lam" => Ok(lmu::lam(name_field(v, "var", "lam")?, lmu_node(field(v, "body", "lam")?)?)),
        "app" => Ok(lmu::app(
            lmu_node(field(v, "fun", "app")?)?,
            lmu_node(field(v, "arg", "app")?)?,
        )),
        "mu" => Ok(lmu::mu(
            name_field(v, "mvar", "mu")?,
            name_field(v, "name", "mu")?,
            lmu_node(field(v, "body", "mu")?)?,
        )),
        k @ ("mvar" | "lam1" | "lam2" | "lamv" | "muv" | "xi") => Err(SyntaxError::new(format!(
            "\"{k}\" nodes are mupp syntax, not valid in an lmu term"
        ))),
        k => Err(SyntaxError::new(format!("unknown term node kind \"{k}\""))),
    }
}

/// Decode a λμ++ term (also checks well-formedness).
pub fn mupp_from_json(v: &Value) -> Result<MuppTerm, SyntaxError> {
    let t = mupp_node(v)?;
    t.wf()?;
    Ok(t)
}

fn mupp_node(v: &Value) -> Result<MuppTerm, SyntaxError> {
    match kind(v)? {
        "var" => Ok(MuppTerm::Var(name_field(v, "name", "var")?)),
        "mvar" => Ok(MuppTerm::MuVar(name_field(v, "name", "mvar")?)),
        "lam" => Ok(mupp::lam(name_field(v, "var", "lam")?, mupp_node(field(v, "body", "lam")?)?)),
        "lam1" => Ok(mupp::lam1(
            name_field(v, "var", "lam1")?,
            mupp_node(field(v, "body", "lam1")?)?,
        )),
        "lam2" => Ok(MuppTerm::Lam2),
        "lamv" => Ok(mupp::lamv(
            name_field(v, "var", "lamv")?,
            mupp_node(field(v, "body", "lamv")?)?,
        )),
        "mu" => {
            if v.get("name").is_some() {
                return Err(SyntaxError::new(
                    "\"mu\" node with a \"name\" field is an lmu naming; mupp mu nodes \
                     have only \"mvar\" and \"body\"",
                ));
            }
            Ok(mupp::mu(name_field(v, "mvar", "mu")?, mupp_node(field(v, "body", "mu")?)?))
        }
        "muv" => Ok(mupp::muv(name_field(v, "mvar", "muv")?, mupp_node(field(v, "body", "muv")?)?)),
        "app" => Ok(mupp::app(
            mupp_node(field(v, "fun", "app")?)?,
            mupp_node(field(v, "arg", "app")?)?,
        )),
        "xi" => Ok(MuppTerm::Xi(name_field(v, "mvar", "xi")?)),
        k => Err(SyntaxError::new(format!("unknown term node kind \"{k}\""))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::syntax::parse::{parse_lmu, parse_mupp};

    #[test]
    fn lmu_round_trip() {
        for s in ["x", "\\x.\\f.mu #a.[#a](f mu #b.[#a](f x))", "(f (\\x.x) y)"] {
            let t = parse_lmu(s).unwrap();
            let v = lmu_to_json(&t);
            assert_eq!(lmu_from_json(&v).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn mupp_round_trip() {
        for s in ["mu #a.((#a \\x.x) y)", "(\\2 (\\1x.x) \\'y.z)", "(xi#a mu'#b.x)"] {
            let t = parse_mupp(s).unwrap();
            let v = mupp_to_json(&t);
            assert_eq!(mupp_from_json(&v).unwrap(), t, "{s}");
        }
    }

    #[test]
    fn decode_errors() {
        let e = lmu_from_json(&serde_json::json!({"k": "mvar", "name": "a"})).unwrap_err();
        assert!(e.msg.contains("mupp syntax"), "{e}");
        let e = mupp_from_json(&serde_json::json!({"k": "mu", "mvar": "a", "name": "b",
            "body": {"k": "var", "name": "x"}}))
        .unwrap_err();
        assert!(e.msg.contains("naming"), "{e}");
        let e = mupp_from_json(&serde_json::json!({"k": "var", "name": "X"})).unwrap_err();
        assert!(e.msg.contains("valid name"), "{e}");
        // wf is enforced on decode.
        let e = mupp_from_json(&serde_json::json!({"k": "lam1", "var": "x",
            "body": {"k": "var", "name": "y"}}))
        .unwrap_err();
        assert!(e.msg.contains("exactly once"), "{e}");
    }
}
