//! `scan` subcommand and its checkpoint file.
//!
//! The checkpoint is JSON Lines, appended to and never rewritten:
//!
//! ```text
//! {"checkpoint":"modcat-scan","format_version":1,"config_sha256":"...","units":N}
//! {"index":0,"dims":[1],"counts":{...},"records":[...],"chain":"..."}
//! {"index":1,"dims":[1,3],"counts":{...},"records":[...],"chain":"..."}
//! ```
//!
//! Unit lines appear in scan order. `chain` is the SHA-256 of the previous
//! line's `chain` (the config digest for the first unit), a newline, and the
//! compact JSON of `records`, so the last line certifies everything before
//! it. A torn final line from an interrupted write is dropped on resume.

use std::fs::{File, OpenOptions};
use std::io::{BufRead, BufReader, Write};
use std::path::Path;

use modcat_core::filters::{rules_to_toml, TheoremRule, VerdictStatus};
use modcat_core::snf::{scan_unit, scan_units, ScanConfig, ScanEntry, ScanUnit};
use rayon::prelude::*;
use serde_json::{json, Value};
use sha2::{Digest, Sha256};

use crate::args::ScanArgs;
use crate::commands::{load_rules, Ctx};
use crate::error::{CliError, CliResult};
use crate::output::{dims_value, num, sha256_file, FORMAT_VERSION};

const MAGIC: &str = "modcat-scan";

#[derive(Debug, Clone, Copy, Default)]
struct Counts {
    pointed: u64,
    eliminated: u64,
    survives: u64,
}

impl Counts {
    fn add(&mut self, o: &Counts) {
        self.pointed += o.pointed;
        self.eliminated += o.eliminated;
        self.survives += o.survives;
    }

    fn to_value(self) -> Value {
        json!({ "pointed": self.pointed, "eliminated": self.eliminated, "survives": self.survives })
    }

    fn from_value(v: &Value) -> Option<Counts> {
        Some(Counts {
            pointed: v.get("pointed")?.as_u64()?,
            eliminated: v.get("eliminated")?.as_u64()?,
            survives: v.get("survives")?.as_u64()?,
        })
    }
}

/// Result of one dimension set, as stored in the checkpoint.
struct UnitResult {
    index: usize,
    dims: Vec<u64>,
    counts: Counts,
    records: Vec<Value>,
}

fn entry_record(e: &ScanEntry) -> Value {
    json!({
        "rank": e.rank,
        "dim": num(e.profile.total_dim()),
        "dims": dims_value(&e.profile),
        "verdict": e.verdict,
        "trail": e.trail,
    })
}

fn run_unit(
    cfg: &ScanConfig,
    unit: &ScanUnit,
    rules: &[TheoremRule],
    all: bool,
) -> CliResult<UnitResult> {
    let entries = scan_unit(cfg, unit, rules)?;
    let mut counts = Counts::default();
    let mut records = Vec::new();
    for e in &entries {
        match e.verdict.status {
            VerdictStatus::Pointed => counts.pointed += 1,
            VerdictStatus::Eliminated => counts.eliminated += 1,
            VerdictStatus::Survives => counts.survives += 1,
        }
        if all || e.verdict.status == VerdictStatus::Survives {
            records.push(entry_record(e));
        }
    }
    Ok(UnitResult {
        index: unit.index,
        dims: unit.dims.clone(),
        counts,
        records,
    })
}

fn chain(prev: &str, records: &[Value]) -> String {
    let mut h = Sha256::new();
    h.update(prev.as_bytes());
    h.update(b"\n");
    h.update(
        serde_json::to_string(records)
            .expect("records serialize")
            .as_bytes(),
    );
    hex::encode(h.finalize())
}

struct Checkpoint {
    file: File,
    path: std::path::PathBuf,
    last_chain: String,
}

impl Checkpoint {
    /// Opens or creates the checkpoint and returns the completed units.
    fn open(
        path: &Path,
        config_digest: &str,
        units: usize,
    ) -> CliResult<(Checkpoint, Vec<UnitResult>)> {
        let mismatch = |m: String| CliError::Checkpoint(format!("{}: {m}", path.display()));
        let existing = if path.exists() {
            std::fs::read(path).map_err(CliError::io(path))?
        } else {
            Vec::new()
        };

        let mut done = Vec::new();
        let mut last_chain = config_digest.to_string();
        let mut keep = 0usize;
        if !existing.is_empty() {
            let mut lines = Vec::new();
            let mut offset = 0usize;
            for line in BufReader::new(&existing[..]).split(b'\n') {
                let line = line.map_err(CliError::io(path))?;
                let end = offset + line.len() + 1;
                lines.push((line, end.min(existing.len()), end <= existing.len()));
                offset = end;
            }
            let header: Value = serde_json::from_slice(&lines[0].0)
                .map_err(|_| mismatch("unreadable header".into()))?;
            if header.get("checkpoint").and_then(Value::as_str) != Some(MAGIC) {
                return Err(mismatch("not a scan checkpoint".into()));
            }
            if header.get("config_sha256").and_then(Value::as_str) != Some(config_digest) {
                return Err(mismatch(
                    "written for a different scan configuration".into(),
                ));
            }
            keep = lines[0].1;
            let count = lines.len();
            for (i, (line, end, terminated)) in lines.into_iter().enumerate().skip(1) {
                if line.is_empty() && i == count - 1 {
                    break;
                }
                let parsed: Option<Value> = serde_json::from_slice(&line).ok();
                let torn = i == count - 1 && (!terminated || parsed.is_none());
                if torn {
                    break;
                }
                let v = parsed.ok_or_else(|| mismatch(format!("line {} is not JSON", i + 1)))?;
                let unit = parse_unit(&v)
                    .ok_or_else(|| mismatch(format!("line {} is malformed", i + 1)))?;
                if unit.index != done.len() {
                    return Err(mismatch(format!(
                        "expected unit {}, found {}",
                        done.len(),
                        unit.index
                    )));
                }
                let expect = chain(&last_chain, &unit.records);
                if v.get("chain").and_then(Value::as_str) != Some(expect.as_str()) {
                    return Err(mismatch(format!(
                        "digest chain broken at unit {}",
                        unit.index
                    )));
                }
                last_chain = expect;
                done.push(unit);
                keep = end;
            }
            if done.len() > units {
                return Err(mismatch("more units than the scan has".into()));
            }
        }

        let mut file = OpenOptions::new()
            .create(true)
            .append(true)
            .open(path)
            .map_err(CliError::io(path))?;
        if keep < existing.len() {
            file.set_len(keep as u64).map_err(CliError::io(path))?;
        }
        if existing.is_empty() {
            let header = json!({
                "checkpoint": MAGIC,
                "format_version": FORMAT_VERSION,
                "config_sha256": config_digest,
                "units": units,
            });
            writeln!(file, "{header}").map_err(CliError::io(path))?;
            file.sync_data().map_err(CliError::io(path))?;
        }
        Ok((
            Checkpoint {
                file,
                path: path.to_path_buf(),
                last_chain,
            },
            done,
        ))
    }

    fn append(&mut self, u: &UnitResult) -> CliResult<()> {
        self.last_chain = chain(&self.last_chain, &u.records);
        let line = json!({
            "index": u.index,
            "dims": u.dims,
            "counts": u.counts.to_value(),
            "records": u.records,
            "chain": self.last_chain,
        });
        writeln!(self.file, "{line}").map_err(CliError::io(&self.path))?;
        self.file.sync_data().map_err(CliError::io(&self.path))
    }
}

fn parse_unit(v: &Value) -> Option<UnitResult> {
    Some(UnitResult {
        index: v.get("index")?.as_u64()? as usize,
        dims: v
            .get("dims")?
            .as_array()?
            .iter()
            .map(Value::as_u64)
            .collect::<Option<_>>()?,
        counts: Counts::from_value(v.get("counts")?)?,
        records: v.get("records")?.as_array()?.clone(),
    })
}

pub fn scan(ctx: &Ctx, args: &ScanArgs) -> CliResult<()> {
    let (rules, mut inputs) = load_rules(args.rules.as_deref())?;
    let cfg = ScanConfig {
        r_min: args.r_min,
        r_max: args.r_max,
        d_max: args.d_max,
        t_max: args.t_max,
        mnsd: args.mnsd,
        candidate_dims: None,
        parallel_degree: 0,
    };
    let units = scan_units(&cfg)?;
    let config = json!({
        "r_min": cfg.r_min,
        "r_max": cfg.r_max,
        "d_max": cfg.d_max,
        "t_max": cfg.t_max,
        "mnsd": cfg.mnsd,
        "all": args.all,
        "rules_sha256": hex::encode(Sha256::digest(rules_to_toml(&rules).as_bytes())),
    });
    let config_digest = hex::encode(Sha256::digest(config.to_string().as_bytes()));

    let (mut checkpoint, done) = match &args.resume {
        Some(path) => {
            let (c, d) = Checkpoint::open(path, &config_digest, units.len())?;
            (Some(c), d)
        }
        None => (None, Vec::new()),
    };
    if let Some(path) = &args.resume {
        if path.exists() {
            inputs.push((path.display().to_string(), sha256_file(path)?));
        }
    }
    let mut manifest_config = config.clone();
    manifest_config["units"] = json!(units.len());
    manifest_config["resumed_units"] = json!(done.len());

    let mut out = ctx.open()?;
    out.record(&ctx.manifest("scan", manifest_config, inputs).to_value())?;
    let mut totals = Counts::default();
    let mut emit = |u: &UnitResult, out: &mut crate::output::Output| -> CliResult<()> {
        totals.add(&u.counts);
        for r in &u.records {
            out.record(r)?;
        }
        Ok(())
    };
    for u in &done {
        emit(u, &mut out)?;
    }
    out.flush()?;

    // One dimension set per worker per round, so an interruption loses at
    // most the sets in flight.
    let round = rayon::current_num_threads().max(1);
    for chunk in units[done.len()..].chunks(round) {
        let results: Vec<UnitResult> = chunk
            .par_iter()
            .map(|u| run_unit(&cfg, u, &rules, args.all))
            .collect::<CliResult<_>>()?;
        for u in &results {
            if let Some(c) = checkpoint.as_mut() {
                c.append(u)?;
            }
            emit(u, &mut out)?;
        }
        out.flush()?;
    }

    let mut summary = json!({ "units": units.len() });
    if let (Value::Object(s), Value::Object(c)) = (&mut summary, totals.to_value()) {
        s.extend(c);
    }
    out.summary(summary, ctx.cli.deterministic)
}
