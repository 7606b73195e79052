//! JSON Lines output.
//!
//! Every stream starts with a manifest record and ends with a summary
//! record; both carry a `"record"` key, data records do not. Integers that
//! fit in 64 bits are JSON numbers, larger ones are decimal strings.

use std::fs::File;
use std::io::{self, BufWriter, Write};
use std::path::{Path, PathBuf};

use chrono::{SecondsFormat, Utc};
use modcat_core::numeric::{BigInt, DimensionProfile, ReciprocalTuple};
use num_traits::ToPrimitive;
use serde_json::{json, Map, Value};
use sha2::{Digest, Sha256};

use crate::error::{CliError, CliResult};

pub const FORMAT_VERSION: u32 = 1;

pub fn num(v: &BigInt) -> Value {
    match v.to_i64() {
        Some(i) => json!(i),
        None => json!(v.to_string()),
    }
}

pub fn parse_num(v: &Value) -> Option<BigInt> {
    match v {
        Value::Number(n) => n
            .as_i64()
            .map(BigInt::from)
            .or_else(|| n.as_u64().map(BigInt::from)),
        Value::String(s) => s.parse().ok(),
        _ => None,
    }
}

/// `{"1": k_0, "d": k_d, ...}` in increasing dimension order.
pub fn dims_value(p: &DimensionProfile) -> Value {
    let mut m = Map::new();
    for (d, k) in p.multiplicities() {
        m.insert(d.to_string(), json!(k));
    }
    Value::Object(m)
}

pub fn tuple_record(t: &ReciprocalTuple, p: &DimensionProfile) -> Value {
    json!({
        "rank": t.rank(),
        "ell": t.weight(),
        "x": t.entries().iter().map(num).collect::<Vec<_>>(),
        "dim": num(t.total_dim()),
        "dims": dims_value(p),
    })
}

pub fn timestamp(deterministic: bool) -> String {
    if deterministic {
        "1970-01-01T00:00:00Z".into()
    } else {
        Utc::now().to_rfc3339_opts(SecondsFormat::Secs, true)
    }
}

pub fn sha256_file(path: &Path) -> CliResult<String> {
    let bytes = std::fs::read(path).map_err(CliError::io(path))?;
    Ok(hex::encode(Sha256::digest(&bytes)))
}

/// Head record of every JSON Lines stream.
pub struct Manifest {
    pub subcommand: &'static str,
    pub config: Value,
    pub threads: usize,
    pub inputs: Vec<(String, String)>,
    pub deterministic: bool,
}

impl Manifest {
    pub fn to_value(&self) -> Value {
        let inputs: Map<String, Value> = self
            .inputs
            .iter()
            .map(|(k, v)| (k.clone(), json!(format!("sha256:{v}"))))
            .collect();
        json!({
            "record": "manifest",
            "tool": "modcat",
            "version": env!("CARGO_PKG_VERSION"),
            "format_version": FORMAT_VERSION,
            "subcommand": self.subcommand,
            "config": self.config,
            "threads": self.threads,
            "inputs": inputs,
            "started_at": timestamp(self.deterministic),
        })
    }
}

pub struct Output {
    w: Box<dyn Write + Send>,
    path: PathBuf,
}

impl Output {
    pub fn open(path: Option<&Path>) -> CliResult<Self> {
        match path {
            Some(p) => {
                let f = File::create(p).map_err(CliError::io(p))?;
                Ok(Output {
                    w: Box::new(BufWriter::new(f)),
                    path: p.to_path_buf(),
                })
            }
            None => Ok(Output {
                w: Box::new(BufWriter::new(io::stdout())),
                path: PathBuf::from("<stdout>"),
            }),
        }
    }

    pub fn line(&mut self, s: &str) -> CliResult<()> {
        writeln!(self.w, "{s}").map_err(CliError::io(&self.path))
    }

    pub fn record(&mut self, v: &Value) -> CliResult<()> {
        self.line(&v.to_string())
    }

    pub fn flush(&mut self) -> CliResult<()> {
        self.w.flush().map_err(CliError::io(&self.path))
    }

    /// Summary record closing a stream; `fields` come first.
    pub fn summary(&mut self, fields: Value, deterministic: bool) -> CliResult<()> {
        let mut m = Map::new();
        m.insert("record".into(), json!("summary"));
        if let Value::Object(f) = fields {
            m.extend(f);
        }
        m.insert("ended_at".into(), json!(timestamp(deterministic)));
        self.record(&Value::Object(m))?;
        self.flush()
    }
}
