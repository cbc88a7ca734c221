//! JSON rendering with controlled number formatting.

use std::fmt::Write as _;

use serde::Serialize;
use serde_json::Value;

use crate::exact::{fmt_f64_digits, to_significant, Rational};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, serde::Deserialize, clap::ValueEnum)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    Csv,
    Json,
}

/// A JSON tree whose numbers are already rendered.
#[derive(Debug, Clone, PartialEq)]
pub enum Doc {
    Null,
    Bool(bool),
    Num(String),
    Str(String),
    Arr(Vec<Doc>),
    Obj(Vec<(String, Doc)>),
}

impl Doc {
    pub fn float(x: f64, digits: Option<usize>) -> Doc {
        if x.is_finite() {
            Doc::Num(fmt_f64_digits(x, digits))
        } else {
            Doc::Null
        }
    }

    /// Exact value rounded to `digits`, or the shortest form of its nearest double.
    pub fn exact(r: &Rational, digits: Option<usize>) -> Doc {
        match digits {
            Some(d) => Doc::Num(to_significant(r, d)),
            None => Doc::float(crate::exact::to_f64(r), None),
        }
    }

    pub fn obj<K: Into<String>>(fields: impl IntoIterator<Item = (K, Doc)>) -> Doc {
        Doc::Obj(fields.into_iter().map(|(k, v)| (k.into(), v)).collect())
    }

    /// Converts any serializable value, reformatting floats with `digits`.
    pub fn from_serialize<T: Serialize + ?Sized>(v: &T, digits: Option<usize>) -> Doc {
        Self::from_value(&serde_json::to_value(v).expect("output types serialize"), digits)
    }

    pub fn from_value(v: &Value, digits: Option<usize>) -> Doc {
        match v {
            Value::Null => Doc::Null,
            Value::Bool(b) => Doc::Bool(*b),
            Value::Number(n) => match (n.as_i64(), n.as_u64()) {
                (Some(i), _) => Doc::Num(i.to_string()),
                (_, Some(u)) => Doc::Num(u.to_string()),
                _ => Doc::float(n.as_f64().unwrap_or(f64::NAN), digits),
            },
            Value::String(s) => Doc::Str(s.clone()),
            Value::Array(a) => Doc::Arr(a.iter().map(|x| Self::from_value(x, digits)).collect()),
            Value::Object(m) => Doc::Obj(m.iter().map(|(k, x)| (k.clone(), Self::from_value(x, digits))).collect()),
        }
    }

    /// Pretty-printed with two-space indentation and a trailing newline.
    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, depth: usize) {
        let pad = |out: &mut String, d: usize| out.push_str(&"  ".repeat(d));
        match self {
            Doc::Null => out.push_str("null"),
            Doc::Bool(b) => write!(out, "{b}").unwrap(),
            Doc::Num(s) => out.push_str(s),
            Doc::Str(s) => out.push_str(&serde_json::to_string(s).expect("string escapes")),
            Doc::Arr(items) if items.is_empty() => out.push_str("[]"),
            Doc::Obj(items) if items.is_empty() => out.push_str("{}"),
            Doc::Arr(items) => {
                out.push_str("[\n");
                for (i, x) in items.iter().enumerate() {
                    pad(out, depth + 1);
                    x.write(out, depth + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, depth);
                out.push(']');
            }
            Doc::Obj(items) => {
                out.push_str("{\n");
                for (i, (k, x)) in items.iter().enumerate() {
                    pad(out, depth + 1);
                    out.push_str(&serde_json::to_string(k).expect("string escapes"));
                    out.push_str(": ");
                    x.write(out, depth + 1);
                    out.push_str(if i + 1 < items.len() { ",\n" } else { "\n" });
                }
                pad(out, depth);
                out.push('}');
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::exact::frac;

    #[test]
    fn renders_valid_json() {
        let d = Doc::obj([
            ("a", Doc::float(0.1, None)),
            ("b", Doc::exact(&frac(1, 3), Some(5))),
            ("c", Doc::Arr(vec![Doc::Bool(true), Doc::Null, Doc::Str("x\"y".into())])),
            ("d", Doc::float(f64::NAN, None)),
            ("e", Doc::float(1e-300, Some(3))),
        ]);
        let v: Value = serde_json::from_str(&d.render()).unwrap();
        assert_eq!(v["a"], 0.1);
        assert_eq!(v["b"].to_string(), "0.33333");
        assert_eq!(v["c"][2], "x\"y");
        assert!(v["d"].is_null());
        assert_eq!(v["e"].as_f64().unwrap(), 1e-300);
    }

    #[test]
    fn keeps_field_order() {
        #[derive(Serialize)]
        struct S {
            z: f64,
            a: u32,
        }
        let r = Doc::from_serialize(&S { z: 2.5, a: 1 }, None).render();
        assert!(r.find("\"z\"").unwrap() < r.find("\"a\"").unwrap(), "{r}");
    }
}
