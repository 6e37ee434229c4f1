//! Bit-stable CSV/JSON emission.
//!
//! Floats serialize with 17 significant digits so that output files are
//! byte-identical across runs and platforms and still parse back to the
//! exact f64. Files are written atomically (temp file, then rename).

use std::fmt::Write as _;
use std::fs;
use std::io;
use std::path::Path;

use ruinlab::cohort::RuinHistogram;
use ruinlab::solver::Policy;

/// 17 significant digits, scientific notation.
pub fn fmt_f64(x: f64) -> String {
    format!("{x:.16e}")
}

/// Ordered JSON document builder; key order is emission order.
#[derive(Debug, Clone, PartialEq)]
pub enum Json {
    Null,
    Bool(bool),
    Int(i64),
    UInt(u64),
    Float(f64),
    Str(String),
    Array(Vec<Json>),
    Object(Vec<(String, Json)>),
}

impl Json {
    pub fn object() -> Json {
        Json::Object(Vec::new())
    }

    pub fn push(&mut self, key: &str, value: Json) -> &mut Self {
        match self {
            Json::Object(entries) => entries.push((key.to_string(), value)),
            _ => panic!("push on a non-object"),
        }
        self
    }

    pub fn opt_float(value: Option<f64>) -> Json {
        value.map(Json::Float).unwrap_or(Json::Null)
    }

    pub fn opt_uint(value: Option<u64>) -> Json {
        value.map(Json::UInt).unwrap_or(Json::Null)
    }

    pub fn render(&self) -> String {
        let mut out = String::new();
        self.write(&mut out, 0);
        out.push('\n');
        out
    }

    fn write(&self, out: &mut String, indent: usize) {
        match self {
            Json::Null => out.push_str("null"),
            Json::Bool(b) => out.push_str(if *b { "true" } else { "false" }),
            Json::Int(i) => {
                let _ = write!(out, "{i}");
            }
            Json::UInt(u) => {
                let _ = write!(out, "{u}");
            }
            Json::Float(x) => out.push_str(&fmt_f64(*x)),
            Json::Str(s) => write_escaped(out, s),
            Json::Array(items) => {
                if items.is_empty() {
                    out.push_str("[]");
                    return;
                }
                out.push('[');
                for (i, item) in items.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    item.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push(']');
            }
            Json::Object(entries) => {
                if entries.is_empty() {
                    out.push_str("{}");
                    return;
                }
                out.push('{');
                for (i, (key, value)) in entries.iter().enumerate() {
                    if i > 0 {
                        out.push(',');
                    }
                    out.push('\n');
                    out.push_str(&"  ".repeat(indent + 1));
                    write_escaped(out, key);
                    out.push_str(": ");
                    value.write(out, indent + 1);
                }
                out.push('\n');
                out.push_str(&"  ".repeat(indent));
                out.push('}');
            }
        }
    }
}

fn write_escaped(out: &mut String, s: &str) {
    out.push('"');
    for ch in s.chars() {
        match ch {
            '"' => out.push_str("\\\""),
            '\\' => out.push_str("\\\\"),
            '\n' => out.push_str("\\n"),
            '\r' => out.push_str("\\r"),
            '\t' => out.push_str("\\t"),
            c if (c as u32) < 0x20 => {
                let _ = write!(out, "\\u{:04x}", c as u32);
            }
            c => out.push(c),
        }
    }
    out.push('"');
}

/// Policy table as `asset,value,consumption` rows.
pub fn policy_csv(policy: &Policy) -> String {
    let mut out = String::from("asset,value,consumption\n");
    for i in 0..policy.grid.len() {
        let _ = writeln!(
            out,
            "{},{},{}",
            fmt_f64(policy.grid[i]),
            fmt_f64(policy.values[i]),
            fmt_f64(policy.consumption[i])
        );
    }
    out
}

/// Histogram as `ruin_time,count` rows (ascending, non-empty bins only)
/// with a terminal `survived,<count>` row.
pub fn histogram_csv(histogram: &RuinHistogram) -> String {
    let mut out = String::from("ruin_time,count\n");
    for (&t, &n) in &histogram.counts {
        let _ = writeln!(out, "{t},{n}");
    }
    let _ = writeln!(out, "survived,{}", histogram.survivors);
    out
}

/// Histogram bins as a JSON array of [ruin_time, count] pairs.
pub fn histogram_json(histogram: &RuinHistogram) -> Json {
    let bins = histogram
        .counts
        .iter()
        .map(|(&t, &n)| Json::Array(vec![Json::UInt(t as u64), Json::UInt(n)]))
        .collect();
    let mut obj = Json::object();
    obj.push("bins", Json::Array(bins));
    obj.push("survived", Json::UInt(histogram.survivors));
    obj
}

/// Writes `content` to `path` atomically via a sibling temp file.
pub fn write_atomic(path: &Path, content: &str) -> io::Result<()> {
    if let Some(parent) = path.parent() {
        if !parent.as_os_str().is_empty() {
            fs::create_dir_all(parent)?;
        }
    }
    let mut tmp = path.as_os_str().to_owned();
    tmp.push(".tmp");
    let tmp = std::path::PathBuf::from(tmp);
    fs::write(&tmp, content)?;
    fs::rename(&tmp, path)?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn floats_render_with_17_significant_digits() {
        assert_eq!(fmt_f64(0.75), "7.5000000000000000e-1");
        assert_eq!(fmt_f64(141140.0), "1.4114000000000000e5");
        // Round trip is exact.
        for &x in &[0.1, 2.0 / 3.0, 6.737946999085467e-3, f64::MIN_POSITIVE] {
            let parsed: f64 = fmt_f64(x).parse().unwrap();
            assert_eq!(parsed.to_bits(), x.to_bits());
        }
    }

    #[test]
    fn json_objects_preserve_key_order() {
        let mut obj = Json::object();
        obj.push("zeta", Json::Int(1));
        obj.push("alpha", Json::Bool(false));
        obj.push("text", Json::Str("line\n\"quoted\"".into()));
        let rendered = obj.render();
        let zeta = rendered.find("zeta").unwrap();
        let alpha = rendered.find("alpha").unwrap();
        assert!(zeta < alpha);
        assert!(rendered.contains("\\n"));
        assert!(rendered.contains("\\\"quoted\\\""));
    }

    #[test]
    fn histogram_csv_layout() {
        let mut h = RuinHistogram::empty(50);
        h.counts.insert(3, 100);
        h.survivors = 0;
        h.n_agents = 100;
        assert_eq!(histogram_csv(&h), "ruin_time,count\n3,100\nsurvived,0\n");
    }
}
