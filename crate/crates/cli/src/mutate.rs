//! Single-site mutations of scenario documents, used to confirm that the
//! bundled expectations are sensitive to every coefficient they declare.

use serde_json::Value;

use twisted_dirac::Rational;

#[derive(Clone, Debug, PartialEq)]
enum Seg {
    Key(String),
    Index(usize),
}

/// One mutation: the location and the replacement value.
#[derive(Clone, Debug, PartialEq)]
pub struct Site {
    path: Vec<Seg>,
    pub label: String,
    pub original: Value,
    pub replacement: Value,
}

#[derive(Clone, Copy, Debug, PartialEq)]
enum Ctx {
    Auto,
    Skip,
    Form,
    Vector,
    Scalar,
    Coef,
    Tuples,
}

fn top_level(key: &str) -> Ctx {
    match key {
        "scalars" | "moment_maps" => Ctx::Scalar,
        "forms" => Ctx::Form,
        "fields" => Ctx::Vector,
        "sections" | "structures" | "algebras" | "modules" | "courant_algebras" | "actions" => Ctx::Auto,
        _ => Ctx::Skip,
    }
}

fn nested(key: &str) -> Ctx {
    match key {
        "vector" | "psi" => Ctx::Vector,
        "form" | "graph" | "twist" | "h" | "omega" => Ctx::Form,
        "bivector" | "mu_eq" => Ctx::Scalar,
        "brackets" | "action" => Ctx::Tuples,
        "pi" => Ctx::Coef,
        "algebra" | "module" | "courant" | "lie" | "basis" | "hemisemidirect" | "kind" | "trivial" | "adjoint"
        | "cotangent" => Ctx::Skip,
        _ => Ctx::Auto,
    }
}

fn label(path: &[Seg]) -> String {
    let mut s = String::new();
    for seg in path {
        match seg {
            Seg::Key(k) if s.is_empty() => s.push_str(k),
            Seg::Key(k) => {
                s.push('.');
                s.push_str(k);
            }
            Seg::Index(i) => s.push_str(&format!("[{i}]")),
        }
    }
    s
}

/// Increments the first integer literal that is not part of an identifier,
/// or doubles the whole expression when there is none.
pub fn mutate_expression(text: &str) -> String {
    let bytes = text.as_bytes();
    let mut i = 0;
    while i < bytes.len() {
        if bytes[i].is_ascii_digit() {
            let inside_name = i > 0 && (bytes[i - 1].is_ascii_alphanumeric() || bytes[i - 1] == b'_');
            let mut j = i;
            while j < bytes.len() && bytes[j].is_ascii_digit() {
                j += 1;
            }
            if !inside_name {
                let n: u128 = text[i..j].parse().expect("digits");
                return format!("{}{}{}", &text[..i], n + 1, &text[j..]);
            }
            i = j;
        } else {
            i += 1;
        }
    }
    format!("2*({text})")
}

/// A zero literal becomes a nonzero one; zero 1-forms become non-closed.
fn mutate_string(text: &str, ctx: Ctx, coords: &[String]) -> Option<String> {
    if text.starts_with('$') {
        return None;
    }
    if text.trim() == "0" {
        return Some(match ctx {
            Ctx::Vector => format!("@{}", coords[0]),
            Ctx::Form => format!("{}*d{}", coords[0], coords[coords.len().min(2) - 1]),
            _ => "1".into(),
        });
    }
    Some(mutate_expression(text))
}

fn mutate_coef(v: &Value) -> Option<Value> {
    match v {
        Value::Number(n) => n.as_i64().map(|k| Value::from(k + 1)),
        Value::String(s) => {
            let r: Rational = s.trim().parse().ok()?;
            Some(Value::String((r + Rational::from_integer(1.into())).to_string()))
        }
        _ => None,
    }
}

fn walk(v: &Value, ctx: Ctx, path: &mut Vec<Seg>, coords: &[String], out: &mut Vec<Site>) {
    let mut push = |path: &Vec<Seg>, replacement: Value| {
        out.push(Site {
            path: path.clone(),
            label: label(path),
            original: v.clone(),
            replacement,
        });
    };
    match (v, ctx) {
        (_, Ctx::Skip) => {}
        (Value::String(s), Ctx::Form | Ctx::Vector | Ctx::Scalar) => {
            if let Some(m) = mutate_string(s, ctx, coords) {
                push(path, Value::String(m));
            }
        }
        (Value::Number(_) | Value::String(_), Ctx::Coef) => {
            if let Some(m) = mutate_coef(v) {
                push(path, m);
            }
        }
        (Value::Array(items), Ctx::Tuples) => {
            for (i, t) in items.iter().enumerate() {
                if let Some(c) = t.as_array().and_then(|t| t.get(3)) {
                    path.extend([Seg::Index(i), Seg::Index(3)]);
                    walk(c, Ctx::Coef, path, coords, out);
                    path.truncate(path.len() - 2);
                }
            }
        }
        (Value::Array(items), _) => {
            for (i, x) in items.iter().enumerate() {
                path.push(Seg::Index(i));
                walk(x, ctx, path, coords, out);
                path.pop();
            }
        }
        (Value::Object(map), _) => {
            for (k, x) in map {
                let next = match ctx {
                    Ctx::Auto => nested(k),
                    other => other,
                };
                path.push(Seg::Key(k.clone()));
                walk(x, next, path, coords, out);
                path.pop();
            }
        }
        _ => {}
    }
}

/// Every mutation site of a scenario document: structure constants, module
/// and projection coefficients, and every symbolic literal outside `checks`.
pub fn sites(doc: &Value) -> Vec<Site> {
    let mut coords: Vec<String> = doc
        .get("patch")
        .and_then(Value::as_array)
        .map(|p| p.iter().filter_map(Value::as_str).map(String::from).collect())
        .unwrap_or_default();
    if coords.is_empty() {
        coords.push("x".into());
    }
    let mut out = Vec::new();
    let Some(map) = doc.as_object() else { return out };
    for (k, v) in map {
        // entries of a top-level map are named objects
        let ctx = top_level(k);
        let mut path = vec![Seg::Key(k.clone())];
        match (v, ctx) {
            (Value::Object(entries), Ctx::Auto) => {
                for (name, x) in entries {
                    path.push(Seg::Key(name.clone()));
                    walk(x, Ctx::Auto, &mut path, &coords, &mut out);
                    path.pop();
                }
            }
            _ => walk(v, ctx, &mut path, &coords, &mut out),
        }
    }
    out
}

/// The document with one site replaced.
pub fn apply(doc: &Value, site: &Site) -> Value {
    let mut out = doc.clone();
    let mut cur = &mut out;
    for seg in &site.path {
        cur = match seg {
            Seg::Key(k) => cur.get_mut(k.as_str()).expect("site path exists"),
            Seg::Index(i) => cur.get_mut(*i).expect("site path exists"),
        };
    }
    *cur = site.replacement.clone();
    out
}
